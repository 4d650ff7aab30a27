import math

import numpy as np
import pytest

from localrings import dsl
from localrings.errors import NotLocalError, ZeroRingError
from localrings.harness import random_local_table_ring
from localrings.local import (
    NotLocal, characteristics, ideal_power, jacobson_maximal, jacobson_radical, local_order_check,
    local_structure, residue_field, units, verify_unit_sequence,
)
from localrings.rational import build_rational
from localrings.rings import build_ring, ideal_generated, materialize, zero_ideal

import oracles

# frozen from oracles.units / oracles.invariant_factors
UNIT_COUNTS = {
    "Z/9": 6, "Z/8": 4, "Z/27": 18, "Z/4[x]/(x^2+x+1)": 12, "GF(4)[t]/(t^2)": 12,
    "GF(2)[t]/(t^3)": 4, "Z/9[x]/(x^2+1)": 72, "GF(9)[t]/(t^2)": 72,
    "GF(2)[x]/(x^2)[y]/(y^2)": 8, "Z/4[x]/(x^2)": 8, "GF(3)[t]/(t^3)": 18, "Z/7": 6,
}


def fmt_set(R, xs):
    return sorted(R.fmt(int(x)) for x in xs)


@pytest.mark.parametrize("text, count", sorted(UNIT_COUNTS.items()))
def test_unit_counts(text, count):
    R = build_ring(text)
    assert len(units(R)) == count


@pytest.mark.parametrize("text", ["Z/9", "GF(2)[t]/(t^3)", "Z/4[x]/(x^2+x+1)", "Z/4[x]/(x^2)"])
def test_units_match_brute_force(text):
    R = build_ring(text)
    add, mul = oracles.tables(R)
    assert units(R).tolist() == oracles.units(add, mul, R.one)


def test_unit_examples():
    assert units(build_ring("Z/9")).tolist() == [1, 2, 4, 5, 7, 8]
    R = build_ring("GF(2)[t]/(t^3)")
    assert fmt_set(R, units(R)) == sorted(["1", "1+t", "1+t^2", "1+t+t^2"])
    assert units(build_ring("Z/7")).tolist() == [1, 2, 3, 4, 5, 6]


def test_zero_ring_rejected():
    Z = build_ring("table(1,[[0]],[[0]])")
    for fn in (units, jacobson_maximal, local_structure):
        with pytest.raises(ZeroRingError):
            fn(Z)


def test_maximal_ideal_examples():
    assert jacobson_maximal(build_ring("Z/8")).elements.tolist() == [0, 2, 4, 6]
    assert jacobson_maximal(build_ring("Z/7")).elements.tolist() == [0]
    nl = jacobson_maximal(build_ring("Z/6"))
    assert isinstance(nl, NotLocal) and nl.witness == (2, 3)
    R = build_ring("Z/4[x]/(x^2+x+1)")
    assert fmt_set(R, jacobson_maximal(R).elements) == sorted(["0", "2", "2*x", "2+2*x"])


def test_not_local_error_carries_witness():
    with pytest.raises(NotLocalError) as info:
        local_structure(build_ring("product(Z/2,Z/2)"))
    a, b = info.value.witness
    R = build_ring("product(Z/2,Z/2)")
    assert R.unit_mask()[R.add(a, b)]


def _table_rings_up_to_64():
    rings = []
    for order in (4, 8, 9, 16, 25, 27, 32):
        for seed in range(3):
            rings.append(random_local_table_ring(order, seed))
    for text in ("product(Z/2,Z/3)", "product(Z/2,Z/2)", "product(GF(4),Z/4)", "product(Z/3,Z/9)",
                 "Z/10", "Z/12", "product(Z/2,GF(2)[t]/(t^2))"):
        R = build_ring(text)
        perm = [0] + list(np.random.default_rng(R.order).permutation(np.arange(1, R.order)))
        rings.append(materialize(R, perm))
    return rings


@pytest.mark.parametrize("R", _table_rings_up_to_64(), ids=lambda R: f"order{R.order}")
def test_jacobson_maximal_against_ideal_enumeration(R):
    add, mul = oracles.tables(R)
    maximal = oracles.maximal_ideals(add, mul, R.zero, R.one)
    result = jacobson_maximal(R)
    if len(maximal) == 1:
        assert not isinstance(result, NotLocal)
        assert set(result.elements.tolist()) == set(maximal[0])
    else:
        assert isinstance(result, NotLocal)
        a, b = result.witness
        nonunits = set(range(R.order)) - set(oracles.units(add, mul, R.one))
        assert a in nonunits and b in nonunits and add[a][b] not in nonunits


def test_jacobson_radical_of_non_local_ring():
    R = build_ring("product(Z/4,Z/9)")
    rad = jacobson_radical(R)
    assert rad.size == 2 * 3
    cert = verify_unit_sequence(R, rad)
    assert cert.ok and cert.data["best_effort"]


def test_ideal_powers():
    R = build_ring("Z/8")
    M = jacobson_maximal(R)
    assert ideal_power(M, 1).elements.tolist() == [0, 2, 4, 6]
    assert ideal_power(M, 2).elements.tolist() == [0, 4]
    assert ideal_power(M, 3).elements.tolist() == [0]
    S = build_ring("GF(3)[t]/(t^2)")
    assert ideal_power(jacobson_maximal(S), 2).is_zero()
    Z = zero_ideal(R)
    assert all(ideal_power(Z, n).is_zero() for n in range(1, 5))


def test_filtration_z8():
    L = local_structure(build_ring("Z/8"))
    assert [I.elements.tolist() for I in L.filtration] == [[0, 2, 4, 6], [0, 4], [0]]
    assert L.nilpotency == 3


@pytest.mark.parametrize("text, gen_order, q", [
    ("Z/4[x]/(x^2+x+1)", 3, 4), ("Z/9", 2, 3), ("GF(5)", 4, 5), ("GF(9)[t]/(t^2)", 8, 9),
])
def test_residue_field(text, gen_order, q):
    R = build_ring(text)
    k, pi, g = residue_field(R)
    assert k.order == q and len(units(k)) == q - 1
    assert oracles.element_order(k.mul, k.one, g) == gen_order
    assert pi.verify()["ok"] and pi.is_surjective()


def test_residue_generator_examples():
    k, _, g = residue_field(build_ring("Z/9"))
    assert k.fmt(g) == "2"
    k, pi, g = residue_field(build_ring("GF(5)"))
    assert g == 2 and (pi.mapping == np.arange(5)).all()


@pytest.mark.parametrize("text, chars", [("Z/9", (9, 3)), ("GF(3)[t]/(t^2)", (3, 3)), ("Z/4[x]/(x^2)", (4, 2))])
def test_characteristics(text, chars):
    assert characteristics(build_ring(text)) == chars


def test_rational_characteristics():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^2)[x]/(x^2-2-t)"))
    assert characteristics(R) == (0, 0)


@pytest.mark.parametrize("text, expected", [
    ("Z/4[x]/(x^2+x+1)", (2, 4)), ("Z/27", (3, 3)), ("GF(9)[t]/(t^2)", (3, 4)),
])
def test_local_order_check(text, expected):
    assert local_order_check(build_ring(text)) == expected


@pytest.mark.parametrize("text, sizes", [
    ("Z/8", (4, 4, 1)), ("Z/9", (6, 3, 2)), ("GF(7)", (6, 1, 6)), ("GF(4)", (3, 1, 3)),
])
def test_unit_sequence_examples(text, sizes):
    cert = verify_unit_sequence(build_ring(text))
    assert cert.ok
    assert (cert.data["units"], cert.data["one_plus"], cert.data["residue_units"]) == sizes


def test_unit_sequence_violation_outside_radical():
    R = build_ring("Z/6")
    cert = verify_unit_sequence(R, ideal_generated(R, [2]))
    assert not cert.ok and cert.verdict == "violation"
    assert "non-unit in 1+I" in cert.data["witness"]


CORPUS_LOCAL = ["Z/8", "Z/9", "Z/27", "Z/625", "GF(9)", "GF(4)[t]/(t^3)", "Z/4[x]/(x^2+x+1)",
                "Z/9[x]/(x^2+1)", "Z/4[x]/(x^2)", "GF(2)[x]/(x^2)[y]/(y^2)", "GF(3)[t]/(t^3)"]


@pytest.mark.parametrize("text", CORPUS_LOCAL)
def test_local_invariants(text):
    R = build_ring(text)
    L = local_structure(R)
    assert (~R.unit_mask() == L.maximal.mask).all()
    assert L.power(L.nilpotency).is_zero()
    assert L.nilpotency <= math.log2(R.order) + 1
    assert L.char_ring % L.char_residue == 0
    if L.char_ring != L.char_residue:
        assert dsl.prime_power(L.char_residue)[1] == 1
    for alpha in range(L.q):
        assert L.project(L.lift(alpha)) == alpha
    assert verify_unit_sequence(R).ok


@pytest.mark.parametrize("order", [4, 8, 9, 16, 25, 27, 32])
def test_unit_sequence_on_random_tables(order):
    for seed in range(15):
        R = random_local_table_ring(order, seed)
        assert verify_unit_sequence(R).ok


def test_rational_local_structure():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^2)[x]/(x^2-2-t)"))
    L = local_structure(R)
    assert L.maximal.dim == 2 and L.nilpotency == 2
    assert L.residue.dim == 2
    summary = L.summary()
    assert "x^2-2" in str(summary)


def test_rational_truncated_polynomials():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^3)"))
    L = local_structure(R)
    assert L.maximal.dim == 2 and L.nilpotency == 3 and L.residue.dim == 1


def test_rational_not_a_field():
    R = build_rational(dsl.parse_ring_spec("Q[x]/(x^2-1)"))
    with pytest.raises(NotLocalError):
        local_structure(R)
