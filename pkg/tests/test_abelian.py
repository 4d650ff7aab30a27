import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localrings.abelian import (
    FinAbGroup, additive_group, coprime_split, cyclic_product, group_structure, hom_search,
    torsion_subgroup, unit_group,
)
from localrings.errors import BoundExceeded, BudgetExceeded, LRUError
from localrings.local import local_structure
from localrings.rings import build_ring

import oracles

# frozen from oracles.invariant_factors on the unit groups
UNIT_FACTORS = {
    "Z/9": [6], "Z/8": [2, 2], "Z/27": [18], "Z/4[x]/(x^2+x+1)": [2, 6], "GF(4)[t]/(t^2)": [2, 6],
    "GF(2)[t]/(t^3)": [4], "Z/9[x]/(x^2+1)": [3, 24], "GF(9)[t]/(t^2)": [3, 24],
    "GF(2)[x]/(x^2)[y]/(y^2)": [2, 2, 2], "Z/4[x]/(x^2)": [2, 4], "GF(3)[t]/(t^3)": [3, 6],
}


@pytest.mark.parametrize("text, factors", sorted(UNIT_FACTORS.items()))
def test_unit_group_structure(text, factors):
    R = build_ring(text)
    S = group_structure(unit_group(R))
    assert S.invariant_factors == factors
    assert S.verify()["ok"]


@pytest.mark.parametrize("text", ["Z/8", "Z/4[x]/(x^2)", "GF(2)[t]/(t^3)"])
def test_unit_factors_match_torsion_oracle(text):
    R = build_ring(text)
    G = unit_group(R)
    found = oracles.invariant_factors(G.elements.tolist(), R.mul, R.one)
    assert found == UNIT_FACTORS[text]


def test_trivial_group():
    G = unit_group(build_ring("GF(2)"))
    S = group_structure(G)
    assert S.invariant_factors == [] and S.verify()["ok"]


def test_structure_bound():
    with pytest.raises(BoundExceeded):
        group_structure(unit_group(build_ring("Z/27")), bound=10)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 4, 5, 6, 8, 9, 12]), min_size=1, max_size=3))
def test_structure_of_cyclic_products(cyclic):
    G = cyclic_product(cyclic)
    S = group_structure(G)
    assert S.invariant_factors == oracles.normalize(cyclic)
    check = S.verify()
    assert check["ok"] and check["mode"] == "exhaustive"


def test_torsion_examples():
    G = additive_group(build_ring("Z/12"))
    assert torsion_subgroup(G, 4).elements.tolist() == [0, 3, 6, 9]
    U = unit_group(build_ring("Z/9"))
    assert torsion_subgroup(U, 3).elements.tolist() == [1, 4, 7]
    assert torsion_subgroup(U, 1).elements.tolist() == [1]


def test_coprime_split_z12():
    G = additive_group(build_ring("Z/12"))
    H = torsion_subgroup(G, 4)
    split = coprime_split(G, H)
    assert split.K.elements.tolist() == [0, 4, 8]
    assert split.ok
    assert group_structure(split.H).invariant_factors == [4]
    assert group_structure(split.K).invariant_factors == [3]


def test_coprime_split_units_z9():
    R = build_ring("Z/9")
    G = unit_group(R)
    H = torsion_subgroup(G, 3)
    split = coprime_split(G, H)
    assert split.K.elements.tolist() == [1, 8]
    # coset of 2 is {2,5,8}; least rep 2 goes to 8
    assert split.section[2] == 8
    assert split.ok


def test_coprime_split_whole_group():
    G = unit_group(build_ring("Z/9"))
    split = coprime_split(G, G)
    assert split.K.elements.tolist() == [1] and split.ok


def test_coprime_split_requires_coprime_orders():
    G = additive_group(build_ring("Z/8"))
    with pytest.raises(LRUError):
        coprime_split(G, torsion_subgroup(G, 2))


@pytest.mark.parametrize("text", sorted(UNIT_FACTORS))
def test_coprime_split_on_corpus_units(text):
    R = build_ring(text)
    L = local_structure(R)
    G = unit_group(R)
    H = G.subgroup(np.unique(R.add_vec(R.one, L.maximal.elements)))
    split = coprime_split(G, H)
    assert split.ok
    Q = split.quotient
    for c, k in split.section.items():
        assert Q.rep[k] == c
    assert H.order * split.K.order == G.order


def _reduction_labels(big, small):
    """Label map Z/N -> Z/n on indices."""
    return np.arange(big.order) % small.order


def test_sections_z27_to_z9_none():
    Z27, Z9 = build_ring("Z/27"), build_ring("Z/9")
    res = hom_search(unit_group(Z9), unit_group(Z27), section_of=_reduction_labels(Z27, Z9))
    assert res.homs == [] and res.exhausted
    # every candidate is accounted for, pre-filtered or evaluated
    assert res.checked == res.candidate_space


def test_sections_z9_to_z3_unique():
    Z9, Z3 = build_ring("Z/9"), build_ring("Z/3")
    res = hom_search(unit_group(Z3), unit_group(Z9), section_of=_reduction_labels(Z9, Z3))
    assert res.exhausted and res.homs == [[8]]
    assert res.generators == [2]


def test_hom_z2_to_z3_trivial():
    res = hom_search(cyclic_product([2]), cyclic_product([3]))
    assert res.homs == [[0]] and res.exhausted


@pytest.mark.parametrize("a, b", [([2], [4]), ([4], [2, 2]), ([2, 2], [6]), ([3], [9]), ([6], [4])])
def test_hom_count_matches_gcd_formula(a, b):
    res = hom_search(cyclic_product(a), cyclic_product(b))
    expected = 1
    for x in a:
        for y in b:
            expected *= np.gcd(x, y)
    assert len(res.homs) == expected


def test_hom_search_budget():
    with pytest.raises(BudgetExceeded):
        hom_search(cyclic_product([4, 4]), cyclic_product([4, 4]), budget=10)


def test_first_mode_is_not_exhaustive():
    res = hom_search(cyclic_product([2]), cyclic_product([2]), first=True)
    assert len(res.homs) == 1 and not res.exhausted


def test_group_power_and_inverse():
    G = unit_group(build_ring("Z/9"))
    assert G.power(2, 6) == 1
    assert G.inverse(2) == 5
    assert isinstance(G, FinAbGroup)
