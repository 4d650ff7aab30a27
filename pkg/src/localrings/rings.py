"""Finite commutative rings on canonical indices 0..order-1.

Every carrier exposes vectorized ``add_vec``/``mul_vec``/``neg_vec`` over numpy
index arrays.  Small rings (order <= AUTO_TABLE) materialize their Cayley
tables on first use; larger ones compute structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import dsl
from .errors import BoundExceeded, HomomorphismError, LRUError, NotAnIdealError

AUTO_TABLE = 1024
MATERIALIZE_BOUND = 1 << 20
EXHAUSTIVE_AXIOMS = 256
AXIOM_SAMPLES = 10_000


def rng_for(seed):
    """Counter-based generator (Philox4x64) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))


class ElementSyntax:
    """Evaluation of parsed expressions; needs add/sub/mul/neg/pow/from_fraction/variables."""

    def parse_element(self, text):
        return self.evaluate(dsl.parse_expr(text))

    def evaluate(self, expr):
        tag = expr[0]
        if tag == "num":
            return self.from_fraction(expr[1])
        if tag == "var":
            env = self.variables()
            if expr[1] not in env:
                raise LRUError(f"unknown variable '{expr[1]}' in {self.name}")
            return env[expr[1]]
        if tag == "idx":
            if not 0 <= expr[1] < self.order:
                raise LRUError(f"index #{expr[1]} out of range")
            return expr[1]
        if tag == "add":
            return self.add(self.evaluate(expr[1]), self.evaluate(expr[2]))
        if tag == "sub":
            return self.sub(self.evaluate(expr[1]), self.evaluate(expr[2]))
        if tag == "neg":
            return self.neg(self.evaluate(expr[1]))
        if tag == "mul":
            return self.mul(self.evaluate(expr[1]), self.evaluate(expr[2]))
        if tag == "pow":
            return self.pow(self.evaluate(expr[1]), expr[2])
        if tag == "tuple":
            return self.evaluate_tuple(expr[1], expr[2])
        raise LRUError(f"cannot evaluate {tag}")

    def evaluate_tuple(self, left, right):
        raise LRUError(f"pair literals are not elements of {self.name}")

    def eval_poly(self, poly):
        """Evaluate an AST Poly (variables from this ring's scope) to an element."""
        env = self.variables()
        acc = self.zero
        for mono, c in poly.terms:
            term = self.from_fraction(c)
            for v, e in mono:
                if v not in env:
                    raise LRUError(f"unknown variable '{v}' in {self.name}")
                term = self.mul(term, self.pow(env[v], e))
            acc = self.add(acc, term)
        return acc

    def poly_coefficients(self, poly, var):
        """Coefficient list (little-endian, ring elements) of poly viewed in var."""
        parts = poly.coefficients_in(var)
        deg = max(parts)
        return [self.eval_poly(parts[i]) if i in parts else self.zero for i in range(deg + 1)]


class FiniteRing(ElementSyntax):
    kind = "finite"

    def __init__(self, order, spec=None):
        if order > MATERIALIZE_BOUND:
            raise BoundExceeded(f"ring order {order} exceeds materialization bound {MATERIALIZE_BOUND}")
        self.order = order
        self.spec = spec
        self._add_t = None
        self._mul_t = None
        self._neg_t = None
        self.cache = {}

    # subclasses implement these on int64 arrays
    def _add_raw(self, a, b):
        raise NotImplementedError

    def _mul_raw(self, a, b):
        raise NotImplementedError

    def _neg_raw(self, a):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} order={self.order}>"

    @property
    def name(self):
        return dsl.format_spec(self.spec) if self.spec is not None else f"ring#{id(self):x}"

    def elements(self):
        return np.arange(self.order, dtype=np.int64)

    def _table(self, raw):
        e = self.elements()
        return np.asarray(raw(e[:, None], e[None, :]), dtype=np.int64)

    @property
    def add_table(self):
        if self._add_t is None:
            self._add_t = self._table(self._add_raw)
        return self._add_t

    @property
    def mul_table(self):
        if self._mul_t is None:
            self._mul_t = self._table(self._mul_raw)
        return self._mul_t

    def add_vec(self, a, b):
        if self._add_t is not None or self.order <= AUTO_TABLE:
            return self.add_table[a, b]
        return self._add_raw(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def mul_vec(self, a, b):
        if self._mul_t is not None or self.order <= AUTO_TABLE:
            return self.mul_table[a, b]
        return self._mul_raw(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def neg_vec(self, a):
        if self._neg_t is None and self.order <= AUTO_TABLE:
            self._neg_t = np.asarray(self._neg_raw(self.elements()), dtype=np.int64)
        if self._neg_t is not None:
            return self._neg_t[a]
        return self._neg_raw(np.asarray(a, dtype=np.int64))

    def sub_vec(self, a, b):
        return self.add_vec(a, self.neg_vec(b))

    def pow_vec(self, a, k):
        a = np.asarray(a, dtype=np.int64)
        result = np.full(a.shape, self.one, dtype=np.int64)
        base = a
        while k:
            if k & 1:
                result = self.mul_vec(result, base)
            k >>= 1
            if k:
                base = self.mul_vec(base, base)
        return result

    def add(self, a, b):
        return int(self.add_vec(a, b))

    def mul(self, a, b):
        return int(self.mul_vec(a, b))

    def neg(self, a):
        return int(self.neg_vec(a))

    def sub(self, a, b):
        return int(self.sub_vec(a, b))

    def pow(self, a, k):
        return int(self.pow_vec(a, k))

    def from_int(self, n):
        acc, base, k = self.zero, self.one, abs(n)
        while k:
            if k & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            k >>= 1
        return self.neg(acc) if n < 0 else acc

    def from_fraction(self, c):
        c = Fraction(c)
        num = self.from_int(c.numerator)
        if c.denominator == 1:
            return num
        inv = self.inverse(self.from_int(c.denominator))
        if inv is None:
            raise LRUError(f"{c.denominator} is not invertible in {self.name}")
        return self.mul(num, inv)

    def inverse(self, a):
        inv = self.inverse_table()[a]
        return None if inv < 0 else int(inv)

    def inverse_table(self):
        """inverse[x] for units, -1 elsewhere; computed by row scans."""
        if "inverse" not in self.cache:
            if self.order > 1 << 14:
                raise BoundExceeded("exhaustive unit search limited to order 2^14")
            e = self.elements()
            inv = np.full(self.order, -1, dtype=np.int64)
            step = max(1, (1 << 21) // self.order)
            for lo in range(0, self.order, step):
                rows = self.mul_vec(e[lo:lo + step, None], e[None, :]) == self.one
                hit = rows.any(axis=1)
                inv[lo:lo + step][hit] = rows.argmax(axis=1)[hit]
            self.cache["inverse"] = inv
        return self.cache["inverse"]

    def unit_mask(self):
        return self.inverse_table() >= 0

    @property
    def characteristic(self):
        if "char" not in self.cache:
            n, x = 1, self.one
            while x != self.zero:
                x = self.add(x, self.one)
                n += 1
            self.cache["char"] = n
        return self.cache["char"]

    def variables(self):
        return {}

    def fmt(self, a):
        return f"#{int(a)}"

class ZModRing(FiniteRing):
    def __init__(self, n, spec=None):
        super().__init__(n, spec if spec is not None else dsl.ZMod(n))
        self.n = n
        self.zero = 0
        self.one = 1 % n

    def _add_raw(self, a, b):
        return (a + b) % self.n

    def _mul_raw(self, a, b):
        return (a * b) % self.n

    def _neg_raw(self, a):
        return (-a) % self.n

    def inverse_table(self):
        if "inverse" not in self.cache:
            inv = np.full(self.n, -1, dtype=np.int64)
            for x in range(self.n):
                if gcd(x, self.n) == 1:
                    inv[x] = pow(x, -1, self.n) if self.n > 1 else 0
            self.cache["inverse"] = inv
        return self.cache["inverse"]

    @property
    def characteristic(self):
        return self.n

    def from_int(self, n):
        return n % self.n

    def fmt(self, a):
        return str(int(a))


class PolyQuotRing(FiniteRing):
    """base[var]/(f) with f monic; index = sum of coefficient indices times |base|^i."""

    def __init__(self, base, var, modulus, spec=None):
        self.base = base
        self.var = var
        self.modulus = [int(c) for c in modulus]
        self.degree = len(self.modulus) - 1
        if self.degree < 1 or self.modulus[-1] != base.one:
            raise LRUError("modulus must be monic of degree >= 1")
        if base.order ** self.degree > MATERIALIZE_BOUND:
            raise BoundExceeded(f"ring order {base.order}^{self.degree} exceeds bound {MATERIALIZE_BOUND}")
        super().__init__(base.order ** self.degree, spec)
        self.radix = base.order
        self._place = [base.order ** i for i in range(self.degree)]
        self.zero = self.compose([base.zero] * self.degree)
        self.one = self.compose([base.one] + [base.zero] * (self.degree - 1))

    def digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return [(a // p) % self.radix for p in self._place]

    def compose(self, ds):
        out = 0
        for d, p in zip(ds, self._place):
            out = out + np.asarray(d, dtype=np.int64) * p
        return out if isinstance(out, np.ndarray) and out.ndim else int(out)

    def _add_raw(self, a, b):
        da, db = self.digits(a), self.digits(b)
        return self.compose([self.base.add_vec(x, y) for x, y in zip(da, db)])

    def _neg_raw(self, a):
        return self.compose([self.base.neg_vec(x) for x in self.digits(a)])

    def _mul_raw(self, a, b):
        da, db = self.digits(a), self.digits(b)
        da = np.broadcast_arrays(*da, *db)
        da, db = da[:self.degree], da[self.degree:]
        base, d = self.base, self.degree
        prod = [None] * (2 * d - 1)
        for i in range(d):
            for j in range(d):
                t = base.mul_vec(da[i], db[j])
                prod[i + j] = t if prod[i + j] is None else base.add_vec(prod[i + j], t)
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            for i in range(d):
                if self.modulus[i] != base.zero:
                    prod[k - d + i] = base.sub_vec(prod[k - d + i], base.mul_vec(c, self.modulus[i]))
        return self.compose(prod[:d])

    @property
    def characteristic(self):
        return self.base.characteristic

    def embed(self, c):
        return self.compose([c] + [self.base.zero] * (self.degree - 1))

    def variables(self):
        env = {k: self.embed(v) for k, v in self.base.variables().items()}
        if self.degree == 1:
            env[self.var] = self.embed(self.base.neg(self.modulus[0]))
        else:
            env[self.var] = self.compose([self.base.zero, self.base.one] + [self.base.zero] * (self.degree - 2))
        return env

    def fmt(self, a):
        pieces = []
        for i, c in enumerate(self.digits(int(a))):
            c = int(c)
            if c == self.base.zero:
                continue
            cs = self.base.fmt(c)
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if not mono:
                pieces.append(cs)
            elif c == self.base.one:
                pieces.append(mono)
            else:
                if any(ch in cs[1:] for ch in "+-"):
                    cs = f"({cs})"
                pieces.append(f"{cs}*{mono}")
        return dsl.join_terms(pieces) if pieces else "0"


class ProductRing(FiniteRing):
    def __init__(self, left, right, spec=None):
        super().__init__(left.order * right.order, spec)
        self.left, self.right = left, right
        self.zero = self.pair(left.zero, right.zero)
        self.one = self.pair(left.one, right.one)

    def pair(self, a, b):
        return a + self.left.order * b

    def split(self, x):
        x = np.asarray(x, dtype=np.int64)
        return x % self.left.order, x // self.left.order

    def _add_raw(self, a, b):
        (a1, a2), (b1, b2) = self.split(a), self.split(b)
        return self.pair(self.left.add_vec(a1, b1), self.right.add_vec(a2, b2))

    def _mul_raw(self, a, b):
        (a1, a2), (b1, b2) = self.split(a), self.split(b)
        return self.pair(self.left.mul_vec(a1, b1), self.right.mul_vec(a2, b2))

    def _neg_raw(self, a):
        a1, a2 = self.split(a)
        return self.pair(self.left.neg_vec(a1), self.right.neg_vec(a2))

    @property
    def characteristic(self):
        return lcm(self.left.characteristic, self.right.characteristic)

    def evaluate_tuple(self, left, right):
        return self.pair(self.left.evaluate(left), self.right.evaluate(right))

    def from_int(self, n):
        return self.pair(self.left.from_int(n), self.right.from_int(n))

    def fmt(self, a):
        x, y = self.split(int(a))
        return f"({self.left.fmt(int(x))},{self.right.fmt(int(y))})"


class TableRing(FiniteRing):
    def __init__(self, add, mul, spec=None):
        add = np.asarray(add, dtype=np.int64)
        mul = np.asarray(mul, dtype=np.int64)
        n = add.shape[0]
        if spec is None:
            spec = dsl.Table(n, tuple(map(tuple, add.tolist())), tuple(map(tuple, mul.tolist())))
        super().__init__(n, spec)
        e = np.arange(n)
        zeros = [z for z in range(n) if (add[z] == e).all()]
        ones = [u for u in range(n) if (mul[u] == e).all()]
        if not zeros or not ones:
            raise LRUError("table has no additive or multiplicative identity")
        self.zero, self.one = zeros[0], ones[0]
        self._add_t, self._mul_t = add, mul

    def _add_raw(self, a, b):
        return self._add_t[a, b]

    def _mul_raw(self, a, b):
        return self._mul_t[a, b]

    def _neg_raw(self, a):
        neg = (self._add_t == self.zero).argmax(axis=1)
        return neg[a]


class QuotientRing(FiniteRing):
    """R/I with the least index of each coset as representative."""

    def __init__(self, base, ideal, spec=None):
        self.base = base
        self.ideal = ideal
        members = ideal.elements
        e = base.elements()
        coset_min = np.empty(base.order, dtype=np.int64)
        step = max(1, (1 << 21) // max(1, len(members)))
        for lo in range(0, base.order, step):
            coset_min[lo:lo + step] = base.add_vec(e[lo:lo + step, None], members[None, :]).min(axis=1)
        self.reps = np.unique(coset_min)
        self.index_of = np.searchsorted(self.reps, coset_min)
        super().__init__(len(self.reps), spec)
        self.zero = int(self.index_of[base.zero])
        self.one = int(self.index_of[base.one])

    def _add_raw(self, a, b):
        return self.index_of[self.base.add_vec(self.reps[a], self.reps[b])]

    def _mul_raw(self, a, b):
        return self.index_of[self.base.mul_vec(self.reps[a], self.reps[b])]

    def _neg_raw(self, a):
        return self.index_of[self.base.neg_vec(self.reps[a])]

    def variables(self):
        return {k: int(self.index_of[v]) for k, v in self.base.variables().items()}

    def from_int(self, n):
        return int(self.index_of[self.base.from_int(n)])

    def fmt(self, a):
        return self.base.fmt(int(self.reps[int(a)]))

    def projection(self):
        return RingHom(self.base, self, self.index_of)


class FiberProductRing(FiniteRing):
    """{(a, b) : f(a) = g(b)} indexed in lexicographic order of pairs."""

    def __init__(self, f, g, spec=None):
        if f.codomain is not g.codomain:
            raise HomomorphismError("fiber product needs a common codomain")
        self.f, self.g = f, g
        self.A, self.B = f.domain, g.domain
        ia, ib = np.nonzero(f.mapping[:, None] == g.mapping[None, :])
        self.pa = ia.astype(np.int64)
        self.pb = ib.astype(np.int64)
        self.keys = self.pa * self.B.order + self.pb
        super().__init__(len(self.keys), spec)
        self.zero = self._index(self.A.zero, self.B.zero)
        self.one = self._index(self.A.one, self.B.one)

    def _index(self, a, b):
        return np.searchsorted(self.keys, np.asarray(a, dtype=np.int64) * self.B.order + b)

    def _add_raw(self, x, y):
        return self._index(self.A.add_vec(self.pa[x], self.pa[y]), self.B.add_vec(self.pb[x], self.pb[y]))

    def _mul_raw(self, x, y):
        return self._index(self.A.mul_vec(self.pa[x], self.pa[y]), self.B.mul_vec(self.pb[x], self.pb[y]))

    def _neg_raw(self, x):
        return self._index(self.A.neg_vec(self.pa[x]), self.B.neg_vec(self.pb[x]))

    def evaluate_tuple(self, left, right):
        a, b = self.A.evaluate(left), self.B.evaluate(right)
        if self.f(a) != self.g(b):
            raise LRUError("pair is not in the fiber product")
        return int(self._index(a, b))

    def fmt(self, x):
        x = int(x)
        return f"({self.A.fmt(int(self.pa[x]))},{self.B.fmt(int(self.pb[x]))})"


# -- ideals ------------------------------------------------------------------

@dataclass(eq=False)
class Ideal:
    """Ideal of a finite ring as a membership mask plus a generator list."""

    ring: FiniteRing
    mask: np.ndarray
    gens: tuple = ()

    @property
    def elements(self):
        return np.nonzero(self.mask)[0].astype(np.int64)

    @property
    def size(self):
        return int(self.mask.sum())

    def __contains__(self, x):
        return bool(self.mask[x])

    def is_zero(self):
        return self.size == 1

    def same_as(self, other):
        return bool((self.mask == other.mask).all())


def additive_span(R, seeds):
    """Additive subgroup generated by seeds (finite, so closure under + suffices)."""
    mask = np.zeros(R.order, dtype=bool)
    mask[R.zero] = True
    seeds = np.unique(np.asarray(seeds, dtype=np.int64))
    frontier = np.array([R.zero], dtype=np.int64)
    while frontier.size:
        nxt = np.unique(R.add_vec(frontier[:, None], seeds[None, :]).ravel())
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


def ideal_generated(R, gens, minimize=True):
    gens = [int(g) for g in gens]
    if not gens:
        mask = np.zeros(R.order, dtype=bool)
        mask[R.zero] = True
        return Ideal(R, mask, ())
    prods = R.mul_vec(R.elements()[:, None], np.array(gens, dtype=np.int64)[None, :]).ravel()
    mask = additive_span(R, prods)
    ideal = Ideal(R, mask, tuple(gens))
    return minimal_generators(ideal) if minimize else ideal


def minimal_generators(ideal):
    """Greedy generator list: least-index elements not yet in the generated ideal."""
    R = ideal.ring
    gens = []
    cur = np.zeros(R.order, dtype=bool)
    cur[R.zero] = True
    for x in ideal.elements:
        if not cur[x]:
            gens.append(int(x))
            cur = ideal_generated(R, gens, minimize=False).mask
            if cur.sum() == ideal.size:
                break
    return Ideal(R, ideal.mask, tuple(gens))


def check_ideal(R, elements):
    """Return None if elements form an ideal, else (reason, witness)."""
    elements = np.unique(np.asarray(elements, dtype=np.int64))
    mask = np.zeros(R.order, dtype=bool)
    mask[elements] = True
    if not mask[R.zero]:
        return ("missing zero", (R.zero,))
    sums = R.add_vec(elements[:, None], elements[None, :])
    bad = np.argwhere(~mask[sums])
    if bad.size:
        i, j = bad[0]
        return ("not additively closed", (int(elements[i]), int(elements[j])))
    prods = R.mul_vec(R.elements()[:, None], elements[None, :])
    bad = np.argwhere(~mask[prods])
    if bad.size:
        r, j = bad[0]
        return ("not absorbing", (int(r), int(elements[j])))
    return None


def make_ideal(R, elements):
    problem = check_ideal(R, elements)
    if problem:
        raise NotAnIdealError(problem[1], problem[0])
    mask = np.zeros(R.order, dtype=bool)
    mask[np.asarray(elements, dtype=np.int64)] = True
    return minimal_generators(Ideal(R, mask))


def zero_ideal(R):
    return ideal_generated(R, [])


# -- homomorphisms -------------------------------------------------------------

@dataclass(eq=False)
class RingHom:
    domain: FiniteRing
    codomain: FiniteRing
    mapping: np.ndarray
    images: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mapping = np.asarray(self.mapping, dtype=np.int64)

    def __call__(self, x):
        return int(self.mapping[x])

    def compose(self, inner):
        """self o inner."""
        return RingHom(inner.domain, self.codomain, self.mapping[inner.mapping])

    def is_surjective(self):
        return len(np.unique(self.mapping)) == self.codomain.order

    def kernel_mask(self):
        return self.mapping == self.codomain.zero

    def verify(self, exhaustive_bound=EXHAUSTIVE_AXIOMS, samples=AXIOM_SAMPLES, seed=0):
        """Check 0, 1, + and x are preserved; returns a report dict."""
        D, C, m = self.domain, self.codomain, self.mapping
        if m[D.zero] != C.zero:
            return {"ok": False, "failure": "zero", "witness": [D.zero]}
        if m[D.one] != C.one:
            return {"ok": False, "failure": "one", "witness": [D.one]}
        if D.order <= exhaustive_bound:
            e = D.elements()
            pairs = (e[:, None], e[None, :])
            mode = "exhaustive"
        else:
            r = rng_for(seed)
            a = r.integers(0, D.order, samples)
            b = r.integers(0, D.order, samples)
            gens = np.array(list(D.variables().values()) or [D.one], dtype=np.int64)
            a = np.concatenate([np.repeat(gens, len(gens)), a])
            b = np.concatenate([np.tile(gens, len(gens)), b])
            pairs = (a, b)
            mode = "sampled"
        for op, dop, cop in (("add", D.add_vec, C.add_vec), ("mul", D.mul_vec, C.mul_vec)):
            lhs = m[dop(*pairs)]
            rhs = cop(m[pairs[0]], m[pairs[1]])
            bad = np.argwhere(np.broadcast_to(lhs != rhs, np.broadcast(*pairs).shape))
            if bad.size:
                idx = tuple(bad[0])
                a = int(np.broadcast_to(pairs[0], lhs.shape)[idx])
                b = int(np.broadcast_to(pairs[1], lhs.shape)[idx])
                return {"ok": False, "failure": op, "witness": [a, b], "mode": mode}
        return {"ok": True, "mode": mode}


def identity_hom(R):
    return RingHom(R, R, R.elements())


def hom_from_images(domain, codomain, images):
    """Ring map out of a presented ring, fixed by the images of its variables.

    Works for Z/n, GF(q), towers ``base[x]/(f)`` and their quotients; the
    result still has to pass ``verify`` to be a homomorphism.
    """
    mapping = _images_mapping(domain, codomain, images)
    return RingHom(domain, codomain, mapping, dict(images))


def _images_mapping(D, C, images):
    if isinstance(D, ZModRing):
        out = np.empty(D.order, dtype=np.int64)
        acc = C.zero
        for k in range(D.order):
            out[k] = acc
            acc = C.add(acc, C.one)
        return out
    if isinstance(D, PolyQuotRing):
        base_map = _images_mapping(D.base, C, images)
        if D.var not in images:
            raise HomomorphismError(f"no image given for '{D.var}'")
        y = images[D.var]
        acc = np.full(D.order, C.zero, dtype=np.int64)
        power = C.one
        for digit in D.digits(D.elements()):
            acc = C.add_vec(acc, C.mul_vec(base_map[digit], power))
            power = C.mul(power, y)
        return acc
    if isinstance(D, QuotientRing):
        return _images_mapping(D.base, C, images)[D.reps]
    raise HomomorphismError(f"{type(D).__name__} has no generator presentation")


# -- axioms --------------------------------------------------------------------

@dataclass
class AxiomReport:
    ok: bool
    mode: str
    checked: int
    axiom: str | None = None
    witness: tuple | None = None

    def to_json(self):
        return {"ok": self.ok, "mode": self.mode, "checked": self.checked,
                "axiom": self.axiom, "witness": list(self.witness) if self.witness else None}


def _first(mask_bad, *arrays):
    idx = tuple(np.argwhere(mask_bad)[0])
    return tuple(int(np.broadcast_to(a, mask_bad.shape)[idx]) for a in arrays)


def ring_axioms_check(R, exhaustive_bound=EXHAUSTIVE_AXIOMS, samples=AXIOM_SAMPLES, seed=0):
    """Commutative unital ring axioms; exhaustive up to the bound, sampled above."""
    n = R.order
    e = R.elements()
    z, one = R.zero, R.one
    # unary and binary axioms are always checked on everything
    checks2 = [
        ("additive identity", lambda a: R.add_vec(a, z) != a),
        ("additive inverse", lambda a: R.add_vec(a, R.neg_vec(a)) != z),
        ("multiplicative identity", lambda a: R.mul_vec(a, one) != a),
    ]
    for name, bad_fn in checks2:
        bad = bad_fn(e)
        if bad.any():
            return AxiomReport(False, "exhaustive", n, name, (int(e[bad][0]),))
    triple_checks = [
        ("additive commutativity", lambda a, b, c: R.add_vec(a, b) != R.add_vec(b, a)),
        ("multiplicative commutativity", lambda a, b, c: R.mul_vec(a, b) != R.mul_vec(b, a)),
        ("additive associativity",
         lambda a, b, c: R.add_vec(R.add_vec(a, b), c) != R.add_vec(a, R.add_vec(b, c))),
        ("multiplicative associativity",
         lambda a, b, c: R.mul_vec(R.mul_vec(a, b), c) != R.mul_vec(a, R.mul_vec(b, c))),
        ("distributivity",
         lambda a, b, c: R.mul_vec(a, R.add_vec(b, c)) != R.add_vec(R.mul_vec(a, b), R.mul_vec(a, c))),
    ]
    if n <= exhaustive_bound:
        b = e[:, None]
        c = e[None, :]
        for name, bad_fn in triple_checks:
            for a in range(n):
                bad = np.broadcast_to(bad_fn(np.int64(a), b, c), (n, n))
                if bad.any():
                    j, k = np.argwhere(bad)[0]
                    return AxiomReport(False, "exhaustive", n ** 3, name, (a, int(j), int(k)))
        return AxiomReport(True, "exhaustive", n ** 3)
    r = rng_for(seed)
    a, b, c = (r.integers(0, n, samples) for _ in range(3))
    for name, bad_fn in triple_checks:
        bad = bad_fn(a, b, c)
        if bad.any():
            return AxiomReport(False, "sampled", samples, name, _first(bad, a, b, c))
    return AxiomReport(True, "sampled", samples)


# -- construction ----------------------------------------------------------------

def least_irreducible(p, d):
    """Least (by canonical index) monic irreducible of degree d over Z/p, little-endian."""
    from sympy import GF as SymGF, Poly as SymPoly, symbols
    x = symbols("x")
    for idx in range(p ** d):
        coeffs = [(idx // p ** i) % p for i in range(d)] + [1]
        f = SymPoly(list(reversed(coeffs)), x, domain=SymGF(p))
        if f.is_irreducible:
            return coeffs
    raise LRUError(f"no irreducible polynomial of degree {d} over F_{p}")


def spec_order(spec):
    """Order of the ring a spec builds, without building it (None if unknown)."""
    if isinstance(spec, dsl.ZMod):
        return spec.n
    if isinstance(spec, dsl.GF):
        return spec.q
    if isinstance(spec, dsl.PolyQuot):
        b = spec_order(spec.base)
        return None if b is None else b ** spec.modulus.degree_in(spec.var)
    if isinstance(spec, dsl.Product):
        a, b = spec_order(spec.left), spec_order(spec.right)
        return None if a is None or b is None else a * b
    if isinstance(spec, dsl.Table):
        return spec.order
    return None


def build_ring(spec):
    if isinstance(spec, str):
        spec = dsl.parse_ring_spec(spec)
    if dsl.is_rational(spec):
        from .rational import build_rational
        return build_rational(spec)
    order = spec_order(spec)
    if order is not None and order > MATERIALIZE_BOUND:
        raise BoundExceeded(f"ring order {order} exceeds materialization bound {MATERIALIZE_BOUND}")
    if isinstance(spec, dsl.ZMod):
        return ZModRing(spec.n, spec)
    if isinstance(spec, dsl.GF):
        p, d = dsl.prime_power(spec.q)
        if d == 1:
            return ZModRing(p, spec)
        return PolyQuotRing(ZModRing(p), dsl.GF_GENERATOR, least_irreducible(p, d), spec)
    if isinstance(spec, dsl.PolyQuot):
        base = build_ring(spec.base)
        return PolyQuotRing(base, spec.var, base.poly_coefficients(spec.modulus, spec.var), spec)
    if isinstance(spec, dsl.Product):
        return ProductRing(build_ring(spec.left), build_ring(spec.right), spec)
    if isinstance(spec, dsl.Table):
        return TableRing(spec.add, spec.mul, spec)
    if isinstance(spec, dsl.Quot):
        base = build_ring(spec.base)
        ideal = ideal_generated(base, [base.eval_poly(g) for g in spec.gens])
        ring, _ = quotient_ring(base, ideal, spec)
        return ring
    if isinstance(spec, dsl.Pullback):
        A, B, C = build_ring(spec.a), build_ring(spec.b), build_ring(spec.c)
        f = hom_from_images(A, C, dict(zip(dsl.scope(spec.a), map(C.eval_poly, spec.f_images))))
        g = hom_from_images(B, C, dict(zip(dsl.scope(spec.b), map(C.eval_poly, spec.g_images))))
        for h in (f, g):
            rep = h.verify()
            if not rep["ok"]:
                raise HomomorphismError(f"pullback map does not preserve {rep['failure']}: {rep['witness']}")
        return fiber_product(f, g, spec).ring
    raise TypeError(f"cannot build {spec!r}")


def quotient_ring(R, I, spec=None):
    """(R/I, projection); coset representatives are least indices."""
    problem = check_ideal(R, I.elements)
    if problem:
        raise NotAnIdealError(problem[1], problem[0])
    Q = QuotientRing(R, I, spec)
    return Q, Q.projection()


@dataclass
class FiberProduct:
    ring: FiberProductRing
    to_a: RingHom
    to_b: RingHom
    f_surjective: bool
    kernel_square_zero: bool | None

    def to_json(self):
        return {"order": self.ring.order, "f_surjective": self.f_surjective,
                "projection_to_b_surjective": self.to_b.is_surjective(),
                "kernel_square_zero": self.kernel_square_zero}


def _square_zero(R, mask):
    k = np.nonzero(mask)[0]
    return bool((R.mul_vec(k[:, None], k[None, :]) == R.zero).all())


def fiber_product(f, g, spec=None):
    """Pullback of f: A -> C and g: B -> C with its two projections.

    The square-zero record is only meaningful when f is surjective with
    square-zero kernel; otherwise it is None.
    """
    if f.codomain is not g.codomain:
        raise HomomorphismError("fiber product needs a common codomain")
    P = FiberProductRing(f, g, spec)
    to_a = RingHom(P, f.domain, P.pa)
    to_b = RingHom(P, g.domain, P.pb)
    surj = f.is_surjective()
    sq = None
    if surj and _square_zero(f.domain, f.kernel_mask()):
        sq = _square_zero(P, to_b.kernel_mask())
    return FiberProduct(P, to_a, to_b, surj, sq)


def materialize(R, perm=None, spec=None):
    """Copy R into a TableRing, optionally relabelled by perm (old index -> new)."""
    add, mul = R.add_table, R.mul_table
    if perm is None:
        return TableRing(add, mul, spec)
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.argsort(perm)
    return TableRing(perm[add[inv][:, inv]], perm[mul[inv][:, inv]], spec)


# -- isomorphism (small orders) -----------------------------------------------------

def _subring_closure(R, gens):
    mask = np.zeros(R.order, dtype=bool)
    mask[[R.zero, R.one] + list(gens)] = True
    while True:
        cur = np.nonzero(mask)[0]
        new = np.concatenate([R.add_vec(cur[:, None], cur[None, :]).ravel(),
                              R.mul_vec(cur[:, None], cur[None, :]).ravel()])
        if mask[new].all():
            return mask
        mask[new] = True


def ring_generators(R):
    gens, mask = [], _subring_closure(R, [])
    while not mask.all():
        gens.append(int(np.argmin(mask)))
        mask = _subring_closure(R, gens)
    return gens


def _extend(R, S, assignment):
    m = dict(assignment)
    changed = True
    while changed:
        changed = False
        keys = np.array(list(m.keys()), dtype=np.int64)
        vals = np.array([m[k] for k in keys], dtype=np.int64)
        for rop, sop in ((R.add_vec, S.add_vec), (R.mul_vec, S.mul_vec)):
            src = rop(keys[:, None], keys[None, :]).ravel()
            dst = sop(vals[:, None], vals[None, :]).ravel()
            for a, b in zip(src.tolist(), dst.tolist()):
                if a in m:
                    if m[a] != b:
                        return None
                else:
                    m[a] = b
                    changed = True
    return m


def find_isomorphism(R, S, max_order=64):
    """Ring isomorphism R -> S by generator-image backtracking, or None."""
    if R.order != S.order:
        return None
    if R.order > max_order:
        raise BoundExceeded(f"isomorphism search limited to order {max_order}")
    gens = ring_generators(R)

    def search(i, assignment):
        if i == len(gens):
            m = _extend(R, S, assignment)
            if m is None or len(m) != R.order or len(set(m.values())) != S.order:
                return None
            return np.array([m[x] for x in range(R.order)], dtype=np.int64)
        for y in range(S.order):
            trial = dict(assignment)
            trial[gens[i]] = y
            if _extend(R, S, trial) is None:
                continue
            found = search(i + 1, trial)
            if found is not None:
                return found
        return None

    mapping = search(0, {R.zero: S.zero, R.one: S.one})
    return None if mapping is None else RingHom(R, S, mapping)
