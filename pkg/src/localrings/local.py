"""Locality, maximal ideal, M-adic filtration and residue field."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dsl
from .abelian import unit_group
from .certificates import Certificate
from .errors import NotLocalError, TheoremViolation, ZeroRingError
from .rational import (RationalIdeal, RationalRing, ideal_product, nullspace, rational_ideal,
                       row_basis, solve_in_span)
from .rings import (Ideal, RingHom, identity_hom, ideal_generated, minimal_generators, quotient_ring)

RADICAL_BOUND = 4096


@dataclass
class NotLocal:
    """Two non-units whose sum is a unit."""

    witness: tuple

    @property
    def reason(self):
        return f"non-units {self.witness[0]} and {self.witness[1]} sum to a unit"


def units(R):
    if R.kind == "rational":
        raise TypeError("unit enumeration needs a finite ring")
    if R.order == 1:
        raise ZeroRingError()
    return np.nonzero(R.unit_mask())[0].astype(np.int64)


def jacobson_maximal(R):
    """The non-units as an ideal if they are additively closed, else NotLocal."""
    if R.kind == "rational":
        return rational_local_structure(R).maximal
    if R.order == 1:
        raise ZeroRingError()
    mask = ~R.unit_mask()
    nu = np.nonzero(mask)[0]
    sums = R.add_vec(nu[:, None], nu[None, :])
    bad = np.argwhere(~mask[sums])
    if bad.size:
        i, j = bad[0]
        return NotLocal((int(nu[i]), int(nu[j])))
    return minimal_generators(Ideal(R, mask))


def jacobson_radical(R, bound=RADICAL_BOUND):
    """{x : 1 + r x is a unit for every r}; brute force, any finite ring."""
    if R.order > bound:
        from .errors import BoundExceeded
        raise BoundExceeded(f"radical of a general ring only computed up to order {bound}")
    umask = R.unit_mask()
    e = R.elements()
    mask = np.zeros(R.order, dtype=bool)
    for x in e:
        mask[x] = bool(umask[R.add_vec(R.one, R.mul_vec(e, x))].all())
    return minimal_generators(Ideal(R, mask))


def ideal_mul(I, J):
    R = I.ring
    if isinstance(I, RationalIdeal):
        return ideal_product(I, J)
    a = np.array(I.gens or [R.zero], dtype=np.int64)
    b = np.array(J.gens or [R.zero], dtype=np.int64)
    return ideal_generated(R, R.mul_vec(a[:, None], b[None, :]).ravel().tolist())


def ideal_power(M, n):
    if n < 1:
        raise ValueError("ideal power needs n >= 1")
    P = M
    for _ in range(n - 1):
        if P.is_zero():
            break
        P = ideal_mul(P, M)
    return P


@dataclass(eq=False)
class LocalStructure:
    """(R, M, k) together with the filtration and the projection."""

    ring: object
    maximal: Ideal
    filtration: list            # [M^1, M^2, ..., M^e] with M^e = 0
    residue: object
    projection: RingHom
    generator: int              # generator of k*, least index of maximal order
    char_ring: int
    char_residue: int
    levels: dict = field(default_factory=dict)

    @property
    def nilpotency(self):
        return len(self.filtration)

    @property
    def q(self):
        return self.residue.order

    @property
    def p(self):
        return self.char_residue

    def power(self, n):
        """M^n for n >= 1 (zero beyond e)."""
        return self.filtration[min(n, self.nilpotency) - 1]

    def level(self, n):
        """(R/M^n, projection) for 1 <= n <= e."""
        if n not in self.levels:
            if n == 1:
                self.levels[n] = (self.residue, self.projection)
            elif n >= self.nilpotency:
                self.levels[n] = (self.ring, identity_hom(self.ring))
            else:
                self.levels[n] = quotient_ring(self.ring, self.power(n))
        return self.levels[n]

    def project(self, a):
        return self.projection(a)

    def lift(self, alpha):
        """Least-index preimage of a residue element."""
        return int(np.argmax(self.projection.mapping == alpha))

    def summary(self):
        R, k = self.ring, self.residue
        return {"order": R.order, "local": True,
                "maximal_ideal_generators": [R.fmt(g) for g in self.maximal.gens],
                "maximal_ideal_size": self.maximal.size,
                "nilpotency_index": self.nilpotency,
                "residue_field": {"order": k.order, "generator": k.fmt(self.generator)},
                "char_R": self.char_ring, "char_k": self.char_residue}


def _residue_generator(k):
    """Least index among the elements of maximal multiplicative order in k*."""
    orders = unit_group(k).orders()
    elems = unit_group(k).elements
    return int(elems[int(np.argmax(orders))])


def local_structure(R):
    """Full local analysis, cached on the ring; raises NotLocalError."""
    if R.kind == "rational":
        return rational_local_structure(R)
    if "local" in R.cache:
        return R.cache["local"]
    M = jacobson_maximal(R)
    if isinstance(M, NotLocal):
        raise NotLocalError(M.witness, f"ring is not local: {M.reason}")
    filtration = [M]
    while not filtration[-1].is_zero():
        if len(filtration) > R.order:
            raise TheoremViolation("maximal ideal of a finite local ring is not nilpotent")
        filtration.append(ideal_mul(filtration[-1], M))
    if M.is_zero():
        k, pi = R, identity_hom(R)
    else:
        k, pi = quotient_ring(R, M)
    k_units = np.nonzero(k.unit_mask())[0]
    if len(k_units) != k.order - 1:
        raise TheoremViolation("R/M is not a field")
    L = LocalStructure(R, M, filtration, k, pi, _residue_generator(k),
                       R.characteristic, k.characteristic)
    R.cache["local"] = L
    return L


def residue_field(R):
    L = local_structure(R)
    if R.kind == "rational":
        return L.residue, L.project, L.generator
    return L.residue, L.projection, L.generator


def characteristics(R):
    L = local_structure(R)
    return L.char_ring, L.char_residue


def local_order_check(R):
    """|R| = p^a with p = char k."""
    L = local_structure(R)
    pp = dsl.prime_power(R.order)
    if pp is None or pp[0] != L.char_residue:
        raise TheoremViolation(f"finite local ring of order {R.order} with residue characteristic "
                               f"{L.char_residue} is not a power of it")
    return pp


def verify_unit_sequence(R, ideal=None):
    """1 -> 1+I -> R* -> (R/I)* -> 1 for I = M, or a supplied ideal inside the radical."""
    if ideal is None:
        L = local_structure(R)
        I, Q, pi = L.maximal, L.residue, L.projection
        best_effort = False
    else:
        I = ideal
        Q, pi = quotient_ring(R, I)
        best_effort = True
    U = units(R)
    umask = R.unit_mask()
    one_plus = np.unique(R.add_vec(R.one, I.elements))
    op_mask = np.zeros(R.order, dtype=bool)
    op_mask[one_plus] = True
    inv = R.inverse_table()
    in_radical = bool(umask[one_plus].all())
    checks = {"1+I inside R*": in_radical}
    if in_radical:
        closed = True
        for lo in range(0, len(one_plus), 512):
            prods = R.mul_vec(one_plus[lo:lo + 512, None], one_plus[None, :])
            if not op_mask[prods].all():
                closed = False
                break
        checks["1+I closed under products"] = closed
        checks["1+I closed under inverses"] = bool(op_mask[inv[one_plus]].all())
    q_units = np.nonzero(Q.unit_mask())[0]
    images = pi.mapping[U]
    checks["R* maps into (R/I)*"] = bool(Q.unit_mask()[images].all())
    checks["R* -> (R/I)* surjective"] = len(np.unique(images)) == len(q_units)
    kernel = np.sort(U[images == Q.one])
    checks["kernel equals 1+I"] = np.array_equal(kernel, one_plus)
    checks["|R*| = |1+I| |(R/I)*|"] = len(U) == len(one_plus) * len(q_units)
    ok = all(checks.values())
    data = {"units": len(U), "one_plus": len(one_plus), "residue_units": len(q_units),
            "checks": checks, "best_effort": best_effort}
    if not ok:
        data["witness"] = _unit_sequence_witness(R, U, one_plus, op_mask, umask, images, Q)
    return Certificate("unit-sequence", "witness" if ok else "violation", ok, data)


def _unit_sequence_witness(R, U, one_plus, op_mask, umask, images, Q):
    outside = one_plus[~umask[one_plus]]
    if outside.size:
        return {"non-unit in 1+I": R.fmt(int(outside[0]))}
    stray = U[(images == Q.one) & ~op_mask[U]]
    if stray.size:
        return {"kernel element outside 1+I": R.fmt(int(stray[0]))}
    return {}


# -- rational kind -----------------------------------------------------------

@dataclass(eq=False)
class RationalLocalStructure:
    ring: RationalRing
    maximal: RationalIdeal
    filtration: list
    residue: RationalRing
    generator_lift: tuple       # element of R reducing to the residue generator
    generator: tuple            # the generator in k
    minpoly: list               # monic, little-endian Fractions
    char_ring: int = 0
    char_residue: int = 0
    q: object = None

    @property
    def nilpotency(self):
        return len(self.filtration)

    def project(self, a):
        """Coordinates of a modulo M in the power basis of the generator."""
        R, r = self.ring, len(self.minpoly) - 1
        cols = [R.pow(self.generator_lift, i) for i in range(r)] + list(self.maximal.basis)
        sol = solve_in_span(cols, a)
        if sol is None:
            raise TheoremViolation("element not in span of residue basis and M")
        return tuple(sol[:r])

    def summary(self):
        R = self.ring
        return {"dimension": R.dim, "local": True,
                "maximal_ideal_generators": [R.fmt(g) for g in self.maximal.gens],
                "maximal_ideal_dimension": self.maximal.dim,
                "nilpotency_index": self.nilpotency,
                "residue_field": {"dimension": self.residue.dim,
                                  "minimal_polynomial": _fmt_poly(self.minpoly, self.residue.var or "y"),
                                  "generator": R.fmt(self.generator_lift)},
                "char_R": 0, "char_k": 0}


def _fmt_poly(coeffs, var):
    terms = {((var, i),) if i else (): c for i, c in enumerate(coeffs) if c}
    return str(dsl.Poly.from_dict(terms))


def _min_poly_mod(R, u, M, bound):
    """Monic relation of least degree among 1, u, u^2, ... modulo M."""
    powers = [R.one]
    for i in range(1, bound + 1):
        powers.append(R.mul(powers[-1], u))
        sol = solve_in_span(powers[:-1] + list(M.basis), powers[-1])
        if sol is not None:
            return [-c for c in sol[:i]] + [Fraction(1)]
    return None


def _irreducible_over_q(coeffs):
    from sympy import Poly as SymPoly, Rational, symbols
    x = symbols("x")
    f = SymPoly([Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
    return f.is_irreducible, f


def rational_local_structure(R, maximal_gens=None):
    """Local analysis of a Q-algebra tower.

    Without supplied generators M is the nullspace of the trace form, which is
    the nilradical in characteristic 0; either way nilpotency and the field
    property of R/M are verified.
    """
    key = ("local", tuple(maximal_gens or ()))
    if key in R.cache:
        return R.cache[key]
    if maximal_gens is None:
        B = R.basis()
        gram = [[R.trace(R.mul(a, b)) for b in B] for a in B]
        rad = nullspace(gram, R.dim)
        M = RationalIdeal(R, row_basis(rad, R.dim), ())
        M.gens = tuple(_small_generators(R, M))
    else:
        M = rational_ideal(R, list(maximal_gens))
    filtration = [M]
    while not filtration[-1].is_zero():
        if len(filtration) > R.dim:
            raise NotLocalError(tuple(R.fmt(g) for g in M.gens), "supplied ideal is not nilpotent")
        filtration.append(ideal_product(filtration[-1], M))
    r = R.dim - M.dim
    if r == 0:
        raise ZeroRingError()
    env = R.variables()
    candidates = [(None, R.one)] if r == 1 else []
    candidates += list(env.items())
    names = list(env)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            candidates.append((None, R.add(env[a], env[b])))
    for name, u in candidates:
        m = _min_poly_mod(R, u, M, r)
        if m is not None and len(m) - 1 == r:
            break
    else:
        raise NotLocalError((), "no primitive element found for R/M among simple candidates")
    irreducible, f = _irreducible_over_q(m)
    if not irreducible:
        raise NotLocalError((str(f.as_expr()),), f"R/M is not a field: {f.as_expr()} is reducible")
    if r == 1:
        k = RationalRing()
        gen = k.one
        u = R.one
    else:
        var = name or "y"
        k = RationalRing(RationalRing(), var, [(c,) for c in m],
                         spec=dsl.PolyQuot(dsl.QQ(), var, dsl.Poly.from_dict(
                             {((var, i),) if i else (): c for i, c in enumerate(m) if c})))
        gen = k.variables()[var]
    L = RationalLocalStructure(R, M, filtration, k, u, gen, m)
    R.cache[key] = L
    return L


def _small_generators(R, M):
    """Generators of M picked from variables and their products, falling back to the basis."""
    env = list(R.variables().values())
    gens = []
    cur = RationalIdeal(R, (), ())
    pool = [v for v in env] + [R.mul(a, b) for a in env for b in env] + list(M.basis)
    for v in pool:
        if M.contains(v) and any(v) and not cur.contains(v):
            gens.append(v)
            cur = rational_ideal(R, gens)
            if cur.dim == M.dim:
                break
    return gens
