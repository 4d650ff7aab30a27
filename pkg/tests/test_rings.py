from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localrings.errors import BoundExceeded, HomomorphismError, NotAnIdealError
from localrings.rational import RationalRing, build_rational, rational_ideal
from localrings.rings import (
    Ideal, RingHom, TableRing, build_ring, fiber_product, find_isomorphism, hom_from_images, ideal_generated,
    identity_hom, least_irreducible, materialize, quotient_ring, ring_axioms_check, zero_ideal,
)
from localrings import dsl

from oracles import tables

SPECS = [
    "Z/9", "Z/8", "GF(4)", "GF(9)", "Z/4[x]/(x^2+x+1)", "GF(2)[t]/(t^3)", "Z/4[x]/(x^2)",
    "GF(2)[x]/(x^2)[y]/(y^2)", "product(Z/2,Z/3)", "product(GF(4),Z/4)", "quot(Z/8,4)",
    "quot(GF(2)[t]/(t^4),t^2)", "table(2,[[0,1],[1,0]],[[0,0],[0,1]])",
    "pullback(Z/9,Z/3,Z/3,[],[])", "Z/9[x]/(x^2+1)", "GF(3)[t]/(t^3)",
]


@pytest.mark.parametrize("text", SPECS)
def test_constructors_pass_axioms_exhaustively(text):
    R = build_ring(text)
    report = ring_axioms_check(R)
    assert report.ok and report.mode == "exhaustive"


@pytest.mark.parametrize("text, order", [
    ("Z/9", 9), ("GF(4)", 4), ("GF(27)", 27), ("Z/4[x]/(x^2+x+1)", 16), ("GF(4)[t]/(t^3)", 64),
    ("product(Z/4,GF(9))", 36), ("Z/8[x]/(x^3+x+1)[y]/(y^2)", 8 ** 6), ("quot(Z/8,4)", 4),
])
def test_orders(text, order):
    assert build_ring(text).order == order


def test_zmod9_characteristic():
    R = build_ring("Z/9")
    assert (R.order, R.characteristic) == (9, 9)


def test_gr42_matches_table_enumeration():
    # independent model: pairs (a,b) meaning a+b*x with x^2 = -x-1 over Z/4
    R = build_ring("Z/4[x]/(x^2+x+1)")
    pairs = list(product(range(4), repeat=2))
    index = {(a, b): a + 4 * b for a, b in pairs}

    def mul(u, v):
        a, b = u
        c, d = v
        bd = b * d
        return ((a * c - bd) % 4, (a * d + b * c - bd) % 4)

    add, mul_t = tables(R)
    for u in pairs:
        for v in pairs:
            assert mul_t[index[u]][index[v]] == index[mul(u, v)]
            assert add[index[u]][index[v]] == index[((u[0] + v[0]) % 4, (u[1] + v[1]) % 4)]
    report = ring_axioms_check(R)
    assert report.ok and report.checked == 16 ** 3


def test_truncated_f2_has_t_cubed_zero():
    R = build_ring("GF(2)[t]/(t^3)")
    t = R.parse_element("t")
    assert R.order == 8 and R.pow(t, 3) == R.zero and R.pow(t, 2) != R.zero


def test_corrupted_table_fails_with_witness():
    R = build_ring("Z/4")
    add, mul = R.add_table.copy(), R.mul_table.copy()
    mul[2, 2] = 2  # 2*2 should be 0
    bad = TableRing(add, mul)
    report = ring_axioms_check(bad)
    assert not report.ok and len(report.witness) == 3
    a, b, c = report.witness
    A, M = bad.add_table, bad.mul_table
    violated = {
        "multiplicative associativity": M[M[a, b], c] != M[a, M[b, c]],
        "distributivity": M[a, A[b, c]] != A[M[a, b], M[a, c]],
    }
    assert violated[report.axiom]


def test_sampled_mode_above_bound():
    R = build_ring("Z/4[x]/(x^2+x+1)")
    report = ring_axioms_check(R, exhaustive_bound=8, samples=500)
    assert report.ok and report.mode == "sampled" and report.checked == 500


def test_gf_uses_least_irreducible():
    assert least_irreducible(2, 2) == [1, 1, 1]
    assert least_irreducible(3, 2) == [1, 0, 1]
    assert least_irreducible(2, 3) == [1, 1, 0, 1]
    assert least_irreducible(5, 2) == [2, 0, 1]


def test_canonical_element_printing():
    R = build_ring("GF(5)[t]/(t^3)")
    assert R.fmt(R.parse_element("2+t")) == "2+t"
    S = build_ring("Z/9[x]/(x^3)")
    assert S.fmt(S.parse_element("x+3*x^2")) == "x+3*x^2"
    for a in range(R.order):
        assert R.parse_element(R.fmt(a)) == a


def test_quotient_z9_by_3():
    R = build_ring("Z/9")
    Q, proj = quotient_ring(R, ideal_generated(R, [3]))
    assert Q.order == 3
    assert find_isomorphism(Q, build_ring("Z/3")) is not None
    assert proj.verify()["ok"] and proj.is_surjective()


def test_quotient_f2_t3_by_t2():
    R = build_ring("GF(2)[t]/(t^3)")
    I = ideal_generated(R, [R.parse_element("t^2")])
    Q, proj = quotient_ring(R, I)
    assert Q.order == 4
    t = proj(R.parse_element("t"))
    assert Q.mul(t, t) == Q.zero and t != Q.zero
    # coset representatives are least indices
    for c in range(Q.order):
        assert Q.reps[c] == min(x for x in range(R.order) if proj(x) == c)


def test_quotient_by_zero_is_identity():
    R = build_ring("Z/4[x]/(x^2)")
    Q, proj = quotient_ring(R, zero_ideal(R))
    assert Q.order == R.order
    assert (proj.mapping == np.arange(R.order)).all()


@pytest.mark.parametrize("text", ["Z/8", "GF(2)[t]/(t^3)", "Z/4[x]/(x^2)", "GF(2)[x]/(x^2)[y]/(y^2)"])
def test_projection_kernel_is_ideal(text):
    R = build_ring(text)
    for g in range(R.order):
        I = ideal_generated(R, [g])
        Q, proj = quotient_ring(R, I)
        assert Q.order * I.size == R.order
        assert (proj.kernel_mask() == I.mask).all()
        assert proj.is_surjective()
        assert proj.verify()["ok"]


def test_not_an_ideal_is_rejected():
    R = build_ring("Z/8")
    mask = np.zeros(8, dtype=bool)
    mask[[0, 3]] = True
    with pytest.raises(NotAnIdealError):
        quotient_ring(R, Ideal(R, mask))


def test_pullback_z9():
    Z9, Z3 = build_ring("Z/9"), build_ring("Z/3")
    Q, pi = quotient_ring(Z9, ideal_generated(Z9, [3]))
    f = onto_via_iso(pi, Z3)
    fp = fiber_product(f, identity_hom(Z3))
    # oracle: enumerate all 27 pairs
    compatible = [(a, b) for a in range(9) for b in range(3) if a % 3 == b]
    assert fp.ring.order == len(compatible) == 9
    assert find_isomorphism(Z9, fp.ring) is not None
    assert fp.f_surjective and fp.kernel_square_zero is True


def onto_via_iso(pi, target):
    """Compose a projection onto a quotient with the evident iso onto target."""
    iso = find_isomorphism(pi.codomain, target)
    return RingHom(pi.domain, target, iso.mapping[pi.mapping])


def test_pullback_identity_is_diagonal():
    C = build_ring("GF(4)")
    fp = fiber_product(identity_hom(C), identity_hom(C))
    assert fp.ring.order == C.order
    assert find_isomorphism(fp.ring, C) is not None


def test_pullback_truncated_f2():
    A = build_ring("GF(2)[t]/(t^3)")
    C = build_ring("GF(2)[t]/(t^2)")
    B = build_ring("GF(2)")
    f = hom_from_images(A, C, {"t": C.parse_element("t")})
    g = hom_from_images(B, C, {})
    assert f.verify()["ok"] and g.verify()["ok"]
    fp = fiber_product(f, g)
    P = fp.ring
    assert P.order == 4
    fmt = sorted(P.fmt(x) for x in range(P.order))
    assert fmt == sorted(["(0,0)", "(1,1)", "(t^2,0)", "(1+t^2,1)"])
    assert fp.to_b.is_surjective() and fp.kernel_square_zero is True
    assert ring_axioms_check(P).ok


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([("Z/8", "2"), ("GF(2)[t]/(t^3)", "t"), ("Z/4[x]/(x^2)", "x"), ("Z/9", "3")]),
       st.sampled_from([1, 2]))
def test_fiber_product_order_formula(case, n):
    A = build_ring(case[0])
    gen = A.parse_element(case[1])
    I = ideal_generated(A, [A.pow(gen, n)])
    C, f = quotient_ring(A, I)
    g = f  # B = A with the same projection
    fp = fiber_product(f, g)
    fibres = np.bincount(f.mapping, minlength=C.order)
    assert fp.ring.order == int((fibres * fibres).sum())
    assert fp.to_a.verify()["ok"] and fp.to_b.verify()["ok"]


def test_fiber_product_codomain_mismatch():
    A, B = build_ring("Z/4"), build_ring("Z/2")
    with pytest.raises(HomomorphismError):
        fiber_product(identity_hom(A), identity_hom(B))


def test_hom_verification_finds_failures():
    A = build_ring("GF(2)[t]/(t^2)")
    B = build_ring("GF(2)[t]/(t^2)")
    ok = hom_from_images(A, B, {"t": B.parse_element("t")})
    assert ok.verify() == {"ok": True, "mode": "exhaustive"}
    bad = hom_from_images(A, B, {"t": B.parse_element("1")})
    report = bad.verify()
    assert not report["ok"] and report["failure"] == "mul"


def test_materialize_relabel_is_isomorphic():
    R = build_ring("Z/4[x]/(x^2)")
    perm = [0] + list(np.random.default_rng(1).permutation(np.arange(1, 16)))
    T = materialize(R, perm)
    assert ring_axioms_check(T).ok
    iso = find_isomorphism(R, T)
    assert iso is not None


def test_find_isomorphism_distinguishes_order_4():
    Z4, D, F4 = build_ring("Z/4"), build_ring("GF(2)[t]/(t^2)"), build_ring("GF(4)")
    assert find_isomorphism(Z4, D) is None
    assert find_isomorphism(D, F4) is None
    assert find_isomorphism(F4, F4) is not None
    with pytest.raises(BoundExceeded):
        find_isomorphism(build_ring("GF(8)[t]/(t^3)"), build_ring("GF(8)[t]/(t^3)"))


def test_zero_ring_constructible():
    R = build_ring("table(1,[[0]],[[0]])")
    assert R.order == 1 and R.zero == R.one


# rational algebras

def test_rational_tower_arithmetic():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^2)[x]/(x^2-2-t)"))
    assert R.dim == 4
    x, t = R.variables()["x"], R.variables()["t"]
    assert R.mul(x, x) == R.add(R.from_int(2), t)
    assert R.mul(t, t) == R.zero
    assert R.axioms_check()["ok"]
    inv = R.inverse(x)
    assert R.mul(inv, x) == R.one
    assert R.inverse(t) is None


def test_rational_element_printing():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^2)[x]/(x^2-2-t)"))
    a = R.parse_element("(1-1/4*t)*x")
    assert R.fmt(a) == "(1-1/4*t)*x"
    assert R.mul(a, a) == R.from_int(2)


def test_rational_ideal_span():
    R = build_rational(dsl.parse_ring_spec("Q[t]/(t^3)"))
    t = R.variables()["t"]
    I = rational_ideal(R, [R.mul(t, t)])
    assert I.dim == 1 and I.contains(R.scale(Fraction(3, 7), R.mul(t, t)))
    assert not I.contains(t)


def test_q_itself():
    Q = RationalRing(spec=dsl.QQ())
    assert Q.mul((Fraction(2),), (Fraction(1, 2),)) == Q.one
