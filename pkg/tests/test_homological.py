import pytest
from hypothesis import given, settings, strategies as st

from localrings.homological import (
    ext_vanishing_check, ext1, ext1_closed, ext1_snf, format_group, invariant_factors, smith_normal_form,
    verify_snf,
)
from localrings.harness import rng_for

import oracles


def test_snf_example():
    res = smith_normal_form([[2, 4], [6, 8]])
    assert res.D == [[2, 0], [0, 4]]
    assert res.U == [[1, 0], [3, -1]] and res.V == [[1, -2], [0, 1]]
    assert all(verify_snf([[2, 4], [6, 8]], res).values())


def test_snf_identity_and_scalar():
    I = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    res = smith_normal_form(I)
    assert res.D == I and res.U == I and res.V == I
    assert smith_normal_form([[6]]).D == [[6]]


def test_snf_big_entries():
    A = [[2 ** 70, 3 ** 50], [5 ** 40, 7 ** 30]]
    res = smith_normal_form(A)
    assert all(verify_snf(A, res).values())


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(A):
    res = smith_normal_form(A)
    assert all(verify_snf(A, res).values())
    transposed = smith_normal_form([list(c) for c in zip(*A)])
    assert transposed.diagonal == res.diagonal
    assert res.diagonal == oracles.determinantal_diagonal(A)


def test_invariant_factor_normalization():
    assert invariant_factors([2, 3]) == [6]
    assert invariant_factors([4, 6]) == [2, 12]
    assert invariant_factors([]) == []


@pytest.mark.parametrize("a, b, f, g, expected", [
    ([6], [4], 0, 0, [2]), ([], [2], 1, 0, []), ([3], [3], 0, 0, [3]),
    ([4, 6], [2, 8], 0, 0, [2, 2, 2, 4]), ([6], [], 0, 2, [6, 6]), ([5], [3], 1, 0, []),
])
def test_ext1_examples(a, b, f, g, expected):
    assert ext1(a, b, f, g) == expected


def test_ext1_against_enumeration():
    r = rng_for(7)
    for _ in range(25):
        a = [int(x) for x in r.integers(2, 13, r.integers(1, 3))]
        b = [int(x) for x in r.integers(2, 13, r.integers(1, 3))]
        assert ext1(a, b) == oracles.ext1_cyclic_sum(a, b)


def test_ext1_routes_on_500_random_pairs():
    r = rng_for(2024)
    for _ in range(500):
        a = [int(x) for x in r.integers(1, 101, r.integers(0, 4))]
        b = [int(x) for x in r.integers(1, 101, r.integers(0, 4))]
        f, g = int(r.integers(0, 4)), int(r.integers(0, 4))
        assert ext1_snf(a, f, b, g) == ext1_closed(a, f, b, g)


def test_format_group():
    assert format_group([2]) == "Z/2"
    assert format_group([]) == "0"
    assert format_group([2, 4]) == "Z/2 ⊕ Z/4"


def test_ext_vanishing_examples():
    c = ext_vanishing_check([5], [3], 3, f=1)
    assert c.ok and c.verdict == "witness" and c.data["ext1_snf"] == []
    c = ext_vanishing_check([3], [3], 3)
    assert c.verdict == "skipped" and not c.data["r_regular_on_A"]
    c = ext_vanishing_check([], [7], 7, f=2)
    assert c.ok and c.verdict == "witness"
    with pytest.raises(ValueError):
        ext_vanishing_check([2], [2], 1)


def test_ext_vanishing_on_200_random_instances():
    r = rng_for(11)
    primes = [2, 3, 5, 7, 11]
    for _ in range(200):
        rr = int(r.choice(primes))
        a = [int(x) for x in r.integers(1, 60, r.integers(0, 4)) if x % rr]
        divisors = [d for d in range(2, rr + 1) if rr % d == 0]
        b = [int(r.choice(divisors)) for _ in range(int(r.integers(1, 4)))]
        c = ext_vanishing_check(a, b, rr, f=int(r.integers(0, 3)))
        assert c.verdict == "witness" and c.ok
