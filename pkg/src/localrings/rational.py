"""Finite-dimensional commutative Q-algebras presented as towers Q[x]/(f)[y]/(g)...

Elements are tuples of Fractions in the monomial basis, little-endian per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix, Rational

from . import dsl
from .errors import LRUError
from .rings import ElementSyntax

F0, F1 = Fraction(0), Fraction(1)


def _sym(x):
    return Rational(x.numerator, x.denominator)


def _frac(x):
    return Fraction(int(x.p), int(x.q))


def row_basis(vectors, dim):
    """Reduced row-echelon basis of the span of vectors (tuple of tuples)."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return ()
    rref, pivots = Matrix([[_sym(x) for x in v] for v in vectors]).rref()
    return tuple(tuple(_frac(rref[i, j]) for j in range(dim)) for i in range(len(pivots)))


def solve_in_span(columns, target):
    """Coefficients c with sum c_i * columns[i] == target, or None."""
    if not columns:
        return [] if not any(target) else None
    A = Matrix([[_sym(col[r]) for col in columns] for r in range(len(target))])
    b = Matrix([_sym(x) for x in target])
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    sol = sol.subs({p: 0 for p in params})
    return [_frac(x) for x in sol]


def nullspace(rows, dim):
    if not rows:
        return [tuple(F1 if i == j else F0 for j in range(dim)) for i in range(dim)]
    M = Matrix([[_sym(x) for x in r] for r in rows])
    return [tuple(_frac(x) for x in v) for v in M.nullspace()]


class RationalRing(ElementSyntax):
    """Q itself (base None) or base[var]/(modulus) with a monic modulus."""

    kind = "rational"
    characteristic = 0

    def __init__(self, base=None, var=None, modulus=None, spec=None):
        self.base, self.var, self.spec = base, var, spec
        self.cache = {}
        if base is None:
            self.degree, self.dim = 1, 1
            self.modulus = None
        else:
            self.modulus = [tuple(c) for c in modulus]
            self.degree = len(self.modulus) - 1
            if self.degree < 1 or self.modulus[-1] != base.one:
                raise LRUError("modulus must be monic of degree >= 1")
            self.dim = base.dim * self.degree
        self.zero = (F0,) * self.dim
        self.one = self.embed(base.one) if base is not None else (F1,)

    @property
    def name(self):
        return dsl.format_spec(self.spec) if self.spec is not None else "Q-algebra"

    @property
    def order(self):
        raise LRUError("rational algebras are infinite")

    def __repr__(self):
        return f"<RationalRing {self.name} dim={self.dim}>"

    def embed(self, c):
        return tuple(c) + (F0,) * (self.dim - len(c))

    def chunks(self, a):
        m = self.base.dim
        return [a[i * m:(i + 1) * m] for i in range(self.degree)]

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, c, a):
        c = Fraction(c)
        return tuple(c * x for x in a)

    def mul(self, a, b):
        if self.base is None:
            return (a[0] * b[0],)
        B, d = self.base, self.degree
        ca, cb = self.chunks(a), self.chunks(b)
        prod = [B.zero] * (2 * d - 1)
        for i in range(d):
            if not any(ca[i]):
                continue
            for j in range(d):
                prod[i + j] = B.add(prod[i + j], B.mul(ca[i], cb[j]))
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if any(c):
                for i in range(d):
                    prod[k - d + i] = B.sub(prod[k - d + i], B.mul(c, self.modulus[i]))
        return tuple(x for chunk in prod[:d] for x in chunk)

    def pow(self, a, k):
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def from_int(self, n):
        return self.scale(n, self.one)

    def from_fraction(self, c):
        return self.scale(c, self.one)

    def is_zero(self, a):
        return not any(a)

    def variables(self):
        if self.base is None:
            return {}
        env = {k: self.embed(v) for k, v in self.base.variables().items()}
        if self.degree == 1:
            env[self.var] = self.embed(self.base.neg(self.modulus[0]))
        else:
            m = self.base.dim
            env[self.var] = self.zero[:m] + self.base.one + self.zero[2 * m:]
        return env

    def basis(self):
        return [tuple(F1 if i == j else F0 for j in range(self.dim)) for i in range(self.dim)]

    def mul_columns(self, a):
        """Columns of the matrix of multiplication by a."""
        return [self.mul(a, b) for b in self.basis()]

    def trace(self, a):
        cols = self.mul_columns(a)
        return sum((cols[i][i] for i in range(self.dim)), F0)

    def inverse(self, a):
        sol = solve_in_span(self.mul_columns(a), self.one)
        return None if sol is None else tuple(sol)

    def fmt(self, a):
        if self.base is None:
            return str(a[0])
        pieces = []
        for i, c in enumerate(self.chunks(a)):
            if not any(c):
                continue
            cs = self.base.fmt(c)
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if not mono:
                pieces.append(cs)
            elif c == self.base.one:
                pieces.append(mono)
            elif c == self.base.neg(self.base.one):
                pieces.append("-" + mono)
            else:
                if any(ch in cs[1:] for ch in "+-"):
                    cs = f"({cs})"
                pieces.append(f"{cs}*{mono}")
        return dsl.join_terms(pieces) if pieces else "0"

    def axioms_check(self):
        """Ring axioms on all basis triples; multilinearity makes this a proof."""
        B = self.basis()
        for x in B:
            if self.mul(self.one, x) != x:
                return {"ok": False, "axiom": "multiplicative identity", "witness": [self.fmt(x)]}
            for y in B:
                if self.mul(x, y) != self.mul(y, x):
                    return {"ok": False, "axiom": "commutativity", "witness": [self.fmt(x), self.fmt(y)]}
                for z in B:
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)):
                        return {"ok": False, "axiom": "associativity",
                                "witness": [self.fmt(x), self.fmt(y), self.fmt(z)]}
        return {"ok": True, "mode": "basis-exhaustive", "checked": self.dim ** 3}


@dataclass(eq=False)
class RationalIdeal:
    ring: RationalRing
    basis: tuple
    gens: tuple = ()

    @property
    def dim(self):
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def contains(self, a):
        return solve_in_span(list(self.basis), a) is not None

    def same_as(self, other):
        return self.basis == other.basis


def rational_ideal(R, gens):
    """Ideal generated by gens: the Q-span of all basis multiples."""
    vecs = [R.mul(g, b) for g in gens for b in R.basis()]
    return RationalIdeal(R, row_basis(vecs, R.dim), tuple(gens))


def ideal_product(I, J):
    R = I.ring
    vecs = [R.mul(a, b) for a in I.basis for b in J.basis]
    return RationalIdeal(R, row_basis(vecs, R.dim), ())


def build_rational(spec):
    if isinstance(spec, dsl.QQ):
        return RationalRing(spec=spec)
    if isinstance(spec, dsl.PolyQuot):
        base = build_rational(spec.base)
        if not isinstance(base, RationalRing):
            raise LRUError("rational towers must start from Q")
        return RationalRing(base, spec.var, base.poly_coefficients(spec.modulus, spec.var), spec)
    raise LRUError(f"unsupported rational construction: {dsl.format_spec(spec)} "
                   "(only Q and polynomial quotients over it)")
