"""Sections of R -> k and R* -> k*: Teichmüller lifts, Hensel lifting, the pullback tower."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2

import numpy as np

from . import dsl
from .abelian import (QuotientGroup, additive_group, coprime_split, format_factors, group_structure,
                      hom_search, unit_group)
from .certificates import Certificate
from .errors import ConvergenceError, InseparableError, LRUError, TheoremViolation
from .local import RationalLocalStructure, local_structure, units
from .rings import RingHom, build_ring, fiber_product, hom_from_images

PAIR_BOUND = 64          # exhaustive pair checks on the residue field up to this order
UNIQUENESS_BOUND = 4096  # exhaustive root / fixed-point scans up to this ring order
SEARCH_BOUND = 256       # exhaustive ring-hom search k -> R up to this ring order


def first_preimages(mapping, size):
    """Least index mapping to each label 0..size-1."""
    labels, idx = np.unique(mapping, return_index=True)
    if len(labels) != size:
        raise LRUError("map is not surjective")
    return idx.astype(np.int64)


def frobenius_fixed(ring, proj, q, cap):
    """Iterate x -> x^q from least lifts until stable; returns (table, iterations)."""
    x = first_preimages(proj.mapping, proj.codomain.order)
    for it in range(cap + 1):
        y = ring.pow_vec(x, q)
        if np.array_equal(x, y):
            return x, it
        x = y
    raise ConvergenceError(f"Frobenius iteration did not stabilise within {cap} steps")


def teichmuller_table(L):
    """t(alpha) for every residue label alpha (t(0) = 0)."""
    if "teich" not in L.levels:
        L.levels["teich"] = frobenius_fixed(L.ring, L.projection, L.q, L.nilpotency + 1)
    return L.levels["teich"]


def teichmuller_lift(L, alpha):
    if alpha == L.residue.zero:
        raise ValueError("the zero residue has no unit lift")
    return int(teichmuller_table(L)[0][alpha])


def teichmuller_uniqueness(L, bound=UNIQUENESS_BOUND):
    """Count u with u^q = u above each residue; all counts must be 1."""
    R = L.ring
    if R.order > bound:
        return None
    e = R.elements()
    fixed = e[R.pow_vec(e, L.q) == e]
    counts = np.bincount(L.projection.mapping[fixed], minlength=L.q)
    return counts


# -- results -----------------------------------------------------------------

@dataclass(eq=False)
class SectionResult:
    kind: str                    # "ring-section" | "unit-section"
    found: bool
    domain: object = None
    codomain: object = None
    table: dict = field(default_factory=dict)   # residue element -> element of R
    transcript: dict = field(default_factory=dict)
    obstruction: dict | None = None

    @property
    def ok(self):
        return self.found and all(v for v in self.transcript.values() if isinstance(v, bool))

    def to_json(self):
        out = {"kind": self.kind, "found": self.found}
        if self.found:
            fd, fc = self.domain.fmt, self.codomain.fmt
            out["map"] = [[fd(a), fc(b)] for a, b in self.table.items()]
            out["transcript"] = self.transcript
        else:
            out["obstruction"] = self.obstruction
        return out


def unit_section(L):
    """s: k* -> R*, alpha -> t(alpha); image is the (q-1)-torsion of R*."""
    R, k = L.ring, L.residue
    table, iters = teichmuller_table(L)
    kstar = np.nonzero(k.unit_mask())[0]
    s = table[kstar]
    tr = {"iterations": iters, "iteration_bound": L.nilpotency}
    tr["projection o section = id"] = bool((L.projection.mapping[s] == kstar).all())
    if k.order <= PAIR_BOUND:
        lhs = table[k.mul_vec(kstar[:, None], kstar[None, :])]
        rhs = R.mul_vec(s[:, None], s[None, :])
        tr["multiplicative"] = bool((lhs == rhs).all())
        tr["multiplicative_mode"] = "exhaustive"
    else:
        g, ok, cur, img = L.generator, True, k.one, R.one
        for _ in range(k.order - 1):
            ok &= table[cur] == img
            cur, img = k.mul(cur, g), R.mul(img, int(table[g]))
        tr["multiplicative"] = bool(ok)
        tr["multiplicative_mode"] = "generator powers"
    G = unit_group(R)
    torsion = G.elements[G.power(G.elements, L.q - 1) == R.one]
    tr["image = (q-1)-torsion of R*"] = np.array_equal(np.sort(s), torsion)
    H = G.subgroup(np.unique(R.add_vec(R.one, L.maximal.elements)))
    split = coprime_split(G, H)
    tr["image = complement of 1+M"] = np.array_equal(np.sort(s), split.K.elements)
    tr["complement split verified"] = split.ok
    return SectionResult("unit-section", True, k, R, dict(zip(kstar.tolist(), s.tolist())), tr)


@dataclass(eq=False)
class UnitDecomposition:
    local: object
    section: SectionResult
    one_plus: np.ndarray
    one_plus_factors: list
    residue_factors: list
    unit_factors: list
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values()) and self.section.ok

    def to_json(self):
        L = self.local
        R, k = L.ring, L.residue
        g = L.generator
        return {"units_order": int(len(units(R))),
                "one_plus_M": {"order": len(self.one_plus), "invariant_factors": self.one_plus_factors,
                               "elements": [R.fmt(int(x)) for x in self.one_plus]},
                "residue_units": {"order": k.order - 1, "invariant_factors": self.residue_factors},
                "units_invariant_factors": self.unit_factors,
                "section_generator": [k.fmt(g), R.fmt(self.section.table[g])],
                "section": self.section.to_json(), "checks": self.checks}


def unit_decomposition(L, exhaustive=UNIQUENESS_BOUND):
    """R* -> (1+M) x k*, u -> (u s(pi(u))^-1, pi(u))."""
    R, k = L.ring, L.residue
    sec = unit_section(L)
    G = unit_group(R)
    U = G.elements
    inv = R.inverse_table()
    s = np.full(k.order, -1, dtype=np.int64)
    s[list(sec.table)] = list(sec.table.values())
    pi = L.projection.mapping
    first = R.mul_vec(U, inv[s[pi[U]]])
    second = pi[U]
    one_plus = np.unique(R.add_vec(R.one, L.maximal.elements))
    H = G.subgroup(one_plus)
    K = unit_group(k)
    checks = {"first component in 1+M": bool(H.mask[first].all()),
              "second component in k*": bool(K.mask[second].all())}
    codes = first * k.order + second
    checks["bijective"] = len(np.unique(codes)) == len(U) == H.order * K.order
    if len(U) <= exhaustive:
        ok = True
        for lo in range(0, len(U), 256):
            a = U[lo:lo + 256, None]
            iab = np.searchsorted(U, R.mul_vec(a, U[None, :]))
            ia = np.arange(lo, lo + len(a))[:, None]
            ok &= bool((first[iab] == R.mul_vec(first[ia], first[None, :])).all())
            ok &= bool((second[iab] == k.mul_vec(second[ia], second[None, :])).all())
        checks["homomorphism"] = ok
    hs, ks = group_structure(H), group_structure(K)
    return UnitDecomposition(L, sec, one_plus, hs.invariant_factors, ks.invariant_factors,
                             group_structure(G).invariant_factors, checks)


def format_units_line(dec):
    """R* ≅ <1+M> × <k*>; 1+M = {...}; section: g ↦ s(g)."""
    L = dec.local
    R, k = L.ring, L.residue
    factors = format_factors(dec.one_plus_factors + dec.residue_factors)
    elems = [R.fmt(int(x)) for x in dec.one_plus]
    shown = "{" + ",".join(elems) + "}" if len(elems) <= 16 else f"{len(elems)} elements"
    g = L.generator
    return f"R* ≅ {factors}; 1+M = {shown}; section: {k.fmt(g)} ↦ {R.fmt(dec.section.table[g])}"


# -- graded pieces -------------------------------------------------------------

@dataclass(eq=False)
class GradedUnitsIso:
    level: int
    domain_order: int
    codomain_order: int
    mapping: dict       # coset rep of (1+M^n)/(1+M^(n+1)) -> coset rep of M^n/M^(n+1)
    invariant_factors: list
    checks: dict

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self, R):
        return {"level": self.level, "domain_order": self.domain_order,
                "codomain_order": self.codomain_order,
                "invariant_factors": self.invariant_factors,
                "map": [[R.fmt(a), R.fmt(b)] for a, b in self.mapping.items()],
                "checks": self.checks}


def graded_units_iso(L, n):
    """(1+M^n)/(1+M^(n+1)) -> M^n/M^(n+1), 1+x -> x; level n = e gives the trivial map."""
    if not 1 <= n <= L.nilpotency:
        raise LRUError(f"level must satisfy 1 <= n <= {L.nilpotency}")
    R = L.ring
    Mn, Mn1 = L.power(n), L.power(n + 1)
    G = unit_group(R)
    Un = G.subgroup(np.unique(R.add_vec(R.one, Mn.elements)))
    Un1 = G.subgroup(np.unique(R.add_vec(R.one, Mn1.elements)))
    A = additive_group(R, Mn.elements)
    A1 = A.subgroup(Mn1.elements)
    Qd, Qc = QuotientGroup(Un, Un1), QuotientGroup(A, A1)
    x = Mn.elements
    dom = Qd.rep[R.add_vec(R.one, x)]
    cod = Qc.rep[x]
    pairs = np.unique(np.stack([dom, cod], axis=1), axis=0)
    checks = {"well defined": len(np.unique(pairs[:, 0])) == len(pairs)}
    mapping = {int(a): int(b) for a, b in pairs}
    checks["bijective"] = (len(mapping) == Qd.order == Qc.order
                           and len(set(mapping.values())) == Qc.order)
    reps = np.array(sorted(mapping), dtype=np.int64)
    img = np.array([mapping[r] for r in reps.tolist()], dtype=np.int64)
    prod_rep = Qd.op(reps[:, None], reps[None, :])
    lhs = np.array([[mapping[int(v)] for v in row] for row in prod_rep], dtype=np.int64)
    rhs = Qc.op(img[:, None], img[None, :])
    checks["homomorphism"] = bool((lhs == rhs).all())
    p = L.char_residue
    checks["annihilated by char k"] = bool(Un1.mask[Un.power(Un.elements, p)].all())
    factors = group_structure(Qd).invariant_factors
    return GradedUnitsIso(n, Qd.order, Qc.order, mapping, factors, checks)


# -- Hensel ------------------------------------------------------------------------

@dataclass
class HenselResult:
    root: object
    steps: int
    step_bound: int
    unique: bool | None

    def to_json(self, R):
        return {"root": R.fmt(self.root), "steps": self.steps, "step_bound": self.step_bound,
                "unique": self.unique}


def _poly_eval(R, coeffs, x):
    acc = R.zero
    for c in reversed(coeffs):
        acc = R.add(R.mul(acc, x), c)
    return acc


def _poly_eval_vec(R, coeffs, x):
    acc = np.full(np.shape(x), R.zero, dtype=np.int64)
    for c in reversed(coeffs):
        acc = R.add_vec(R.mul_vec(acc, x), c)
    return acc


def _derivative(R, coeffs):
    return [R.mul(R.from_int(i), c) for i, c in enumerate(coeffs)][1:]


def newton_bound(e):
    return ceil(log2(e)) + 1 if e > 1 else 1


def hensel_lift(L, coeffs, alpha):
    """Unique root of f above the simple residue root alpha, by Newton iteration.

    coeffs: little-endian coefficients of f in R (finite) or as R-vectors
    (rational); alpha: residue element, or a lift of it for the rational kind.
    """
    if isinstance(L, RationalLocalStructure):
        return _hensel_rational(L, coeffs, alpha)
    R, k, pi = L.ring, L.residue, L.projection
    dcoeffs = _derivative(R, coeffs)
    if _poly_eval(k, [pi(c) for c in coeffs], alpha) != k.zero:
        raise LRUError("alpha is not a root of f modulo M")
    if _poly_eval(k, [pi(c) for c in dcoeffs], alpha) == k.zero:
        raise InseparableError("f'(alpha) vanishes in the residue field; the root is not simple")
    x = L.lift(alpha)
    cap = ceil(log2(L.nilpotency)) + 2 if L.nilpotency > 1 else 2
    steps = 0
    while _poly_eval(R, coeffs, x) != R.zero:
        if steps >= cap:
            raise ConvergenceError("Newton iteration exceeded its bound")
        d = R.inverse(_poly_eval(R, dcoeffs, x))
        x = R.sub(x, R.mul(_poly_eval(R, coeffs, x), d))
        steps += 1
    unique = None
    if R.order <= UNIQUENESS_BOUND:
        e = R.elements()
        roots = e[(_poly_eval_vec(R, coeffs, e) == R.zero) & (pi.mapping == alpha)]
        unique = roots.tolist() == [x]
    return HenselResult(x, steps, newton_bound(L.nilpotency), unique)


def _hensel_rational(L, coeffs, x0):
    R = L.ring
    dcoeffs = [R.scale(i, c) for i, c in enumerate(coeffs)][1:]

    def ev(cs, x):
        acc = R.zero
        for c in reversed(cs):
            acc = R.add(R.mul(acc, x), c)
        return acc

    if not L.maximal.contains(ev(coeffs, x0)):
        raise LRUError("x0 is not a root of f modulo M")
    if R.inverse(ev(dcoeffs, x0)) is None:
        raise InseparableError("f'(x0) is not a unit; the residue root is not simple")
    cap = ceil(log2(L.nilpotency)) + 2 if L.nilpotency > 1 else 2
    x, steps = x0, 0
    while any(ev(coeffs, x)):
        if steps >= cap:
            raise ConvergenceError("Newton iteration exceeded its bound")
        x = R.sub(x, R.mul(ev(coeffs, x), R.inverse(ev(dcoeffs, x))))
        steps += 1
    return HenselResult(x, steps, newton_bound(L.nilpotency), None)


# -- ring sections -----------------------------------------------------------------

def _mismatch(L):
    return {"reason": "characteristic mismatch", "char_R": L.char_ring, "char_k": L.char_residue,
            "message": f"char(R)={L.char_ring} ≠ char(k)={L.char_residue}"}


def coefficient_section(L):
    """Ring section k -> R, or the characteristic obstruction."""
    if isinstance(L, RationalLocalStructure):
        return _rational_section(L)
    if L.char_ring != L.char_residue:
        return SectionResult("ring-section", False, obstruction=_mismatch(L))
    R, k = L.ring, L.residue
    table, iters = teichmuller_table(L)
    g = RingHom(k, R, table)
    rep = g.verify(exhaustive_bound=PAIR_BOUND)
    tr = {"iterations": iters,
          "projection o section = id": bool((L.projection.mapping[table] == k.elements()).all()),
          "ring homomorphism": rep["ok"], "mode": rep.get("mode", "exhaustive")}
    return SectionResult("ring-section", True, k, R, dict(enumerate(table.tolist())), tr)


def _rational_section(L):
    R, k = L.ring, L.residue
    m = L.minpoly
    if len(m) == 2:
        tr = {"fixes Q": True, "projection o section = id": L.project(R.one) == k.one}
        return SectionResult("ring-section", True, k, R, {k.one: R.one}, tr)
    from sympy import Poly as SymPoly, Rational, gcd as sgcd, symbols
    y = symbols("y")
    f = SymPoly([Rational(c.numerator, c.denominator) for c in reversed(m)], y)
    if sgcd(f, f.diff(y)).degree() > 0:
        raise InseparableError(f"minimal polynomial {f.as_expr()} is not separable")
    coeffs = [R.from_fraction(c) for c in m]
    h = _hensel_rational(L, coeffs, L.generator_lift)
    u = h.root
    tr = {"newton_steps": h.steps, "step_bound": h.step_bound,
          "m(u) = 0": not any(_rat_eval(R, coeffs, u)),
          "projection o section = id": L.project(u) == tuple(L.generator)}
    return SectionResult("ring-section", True, k, R, {L.generator: u}, tr)


def _rat_eval(R, coeffs, x):
    acc = R.zero
    for c in reversed(coeffs):
        acc = R.add(R.mul(acc, x), c)
    return acc


def reduction_map(L, n):
    """R/M^(n+1) -> R/M^n as a RingHom."""
    Rn1, p1 = L.level(n + 1)
    Rn, p0 = L.level(n)
    pre = first_preimages(p1.mapping, Rn1.order)
    return RingHom(Rn1, Rn, p0.mapping[pre])


def tower_lift_section(L):
    """Lift id: k -> R/M through R/M^(n+1) x_{R/M^n} k, one square-zero step at a time."""
    if L.char_ring != L.char_residue:
        return SectionResult("ring-section", False, obstruction=_mismatch(L))
    k = L.residue
    s = k.elements()
    steps = []
    for n in range(1, L.nilpotency):
        rho = reduction_map(L, n)
        g = RingHom(k, rho.codomain, s)
        fp = fiber_product(rho, g)
        A = fp.ring
        sigma, iters = frobenius_fixed(A, fp.to_b, L.q, n + 2)
        ok = bool((fp.to_b.mapping[sigma] == k.elements()).all())
        s = fp.to_a.mapping[sigma]
        steps.append({"level": n + 1, "pullback_order": A.order,
                      "kernel_square_zero": fp.kernel_square_zero, "section_ok": ok,
                      "iterations": iters})
    R = L.ring
    top, proj = L.level(L.nilpotency)
    if top is not R:
        raise TheoremViolation("top of the tower is not R")
    hom = RingHom(k, R, s)
    rep = hom.verify(exhaustive_bound=PAIR_BOUND)
    tr = {"steps": steps, "ring homomorphism": rep["ok"],
          "projection o section = id": bool((L.projection.mapping[s] == k.elements()).all()),
          "all pullback kernels square zero": all(st["kernel_square_zero"] for st in steps),
          "all step sections ok": all(st["section_ok"] for st in steps)}
    return SectionResult("ring-section", True, k, R, dict(enumerate(s.tolist())), tr)


def ring_homs_from_field(L, bound=SEARCH_BOUND):
    """Exhaustive search for ring homs GF(q) -> R over all generator images.

    Independent of characteristic bookkeeping: every candidate is checked
    with the full homomorphism test.
    """
    R = L.ring
    if R.order > bound:
        return None
    F = build_ring(dsl.GF(L.q))
    names = dsl.scope(dsl.GF(L.q))
    candidates = [R.elements().tolist()] * len(names) or [[]]
    found, checked = [], 0
    for images in itertools.product(*candidates):
        checked += 1
        h = hom_from_images(F, R, dict(zip(names, images)))
        if h.verify(exhaustive_bound=F.order)["ok"]:
            found.append(list(images))
    return {"candidates": checked, "homs": len(found), "exhausted": True}


# -- counterexamples -----------------------------------------------------------------

def rational_roots_of_unity(bound, max_exp):
    """All reduced a/b (|a|, b <= bound) with (a/b)^n = 1 for some 1 <= n <= max_exp."""
    from math import gcd as igcd
    out = set()
    for b in range(1, bound + 1):
        for a in range(-bound, bound + 1):
            if a == 0 or igcd(a, b) != 1:
                continue
            x = Fraction(a, b)
            y = x
            for _ in range(max_exp):
                if y == 1:
                    out.add(x)
                    break
                y *= x
    return sorted(out)


RATIONAL_TORSION = (Fraction(1), Fraction(-1))


def _zloc_units(p):
    if not dsl.prime_power(p) or dsl.prime_power(p)[1] != 1:
        raise LRUError("p must be prime")
    data = {"case": "Zloc-units", "p": p, "residue_units_order": p - 1,
            "rational_torsion_units": [str(x) for x in RATIONAL_TORSION]}
    lifts = {}
    for alpha in range(1, p):
        cand = [x for x in RATIONAL_TORSION if (x.numerator * pow(x.denominator, -1, p) - alpha) % p == 0]
        if cand:
            lifts[alpha] = cand[0]
    if len(lifts) == p - 1:
        g = next(a for a in range(1, p) if len({pow(a, i, p) for i in range(p - 1)}) == p - 1)
        ok = all(lifts[a * b % p] == lifts[a] * lifts[b] for a in lifts for b in lifts)
        data["section"] = {str(a): str(v) for a, v in sorted(lifts.items())}
        data["generator"] = [str(g), str(lifts[g])]
        data["multiplicative"] = ok
        return Certificate("Zloc-units", "witness", ok, data)
    data["obstruction"] = (f"a section needs a rational root of unity of order {p - 1}; "
                           f"the torsion of Q* is {{-1, 1}}")
    return Certificate("Zloc-units", "obstruction", True, data)


def _trunc_ring_section(q):
    k = dsl.GF(q)
    s3 = dsl.PolyQuot(k, "t", dsl.parse_poly("t^3"))
    s2 = dsl.PolyQuot(k, "t", dsl.parse_poly("t^2"))
    R3, R2 = build_ring(s3), build_ring(s2)
    names2 = dsl.scope(s2)
    pi = hom_from_images(R3, R2, {n: R2.variables()[n] for n in names2})
    M3 = local_structure(R3).maximal.elements
    base = dsl.scope(k)
    base_cands = [_field_generator_roots(q, R3)] * len(base)
    checked, found = 0, []
    for bimg in itertools.product(*base_cands):
        for y in M3.tolist():
            checked += 1
            images = dict(zip(base, bimg))
            images["t"] = y
            phi = hom_from_images(R2, R3, images)
            if not phi.verify()["ok"]:
                continue
            if (pi.mapping[phi.mapping] == R2.elements()).all():
                found.append(images)
    data = {"case": "trunc-ring-section", "k": f"GF({q})", "domain": dsl.format_spec(s2),
            "codomain": dsl.format_spec(s3), "candidates": checked, "exhausted": True,
            "sections": len(found)}
    if found:
        data["example"] = {n: R3.fmt(v) for n, v in found[0].items()}
        return Certificate("trunc-ring-section", "witness", True, data)
    return Certificate("trunc-ring-section", "obstruction", True, data)


def _field_generator_roots(q, R):
    """Elements of R satisfying the defining polynomial of the generator of GF(q)."""
    from .rings import least_irreducible
    p, d = dsl.prime_power(q)
    coeffs = [R.from_int(c) for c in least_irreducible(p, d)]
    e = R.elements()
    return e[_poly_eval_vec(R, coeffs, e) == R.zero].tolist()


def _padic_unit_section(p, N):
    if N < 2:
        raise LRUError("N must be at least 2")
    big, small = build_ring(f"Z/{p ** N}"), build_ring(f"Z/{p * p}")
    B, A = unit_group(big), unit_group(small)
    reduce = np.arange(p ** N, dtype=np.int64) % (p * p)
    res = hom_search(A, B, section_of=reduce)
    data = {"case": "padic-unit-section", "p": p, "N": N,
            "domain": f"(Z/{p * p})*", "codomain": f"(Z/{p ** N})*",
            **res.to_json()}
    if res.homs:
        return Certificate("padic-unit-section", "witness", True, data)
    return Certificate("padic-unit-section", "obstruction", res.exhausted, data)


CASES = ("Zloc-units", "trunc-ring-section", "padic-unit-section")


def check_counterexample(case, p=None, N=None, q=None):
    if case == "Zloc-units":
        return _zloc_units(p if p is not None else 5)
    if case == "trunc-ring-section":
        return _trunc_ring_section(q if q is not None else (p if p is not None else 2))
    if case == "padic-unit-section":
        return _padic_unit_section(p if p is not None else 3, N if N is not None else 3)
    raise LRUError(f"unknown case '{case}'; expected one of {', '.join(CASES)}")
