"""Finite abelian groups on integer labels: structure, torsion, coprime splitting, Hom search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

from .errors import BoundExceeded, BudgetExceeded, LRUError

GROUP_BOUND = 1 << 20
HOM_BUDGET = 10 ** 7
EXHAUSTIVE_PAIRS = 4096


class FinAbGroup:
    """A finite abelian group whose elements are labels in range(universe).

    ``op`` must accept numpy arrays and broadcast.
    """

    def __init__(self, elements, op, identity, universe, name=""):
        self.elements = np.unique(np.asarray(elements, dtype=np.int64))
        self.op = op
        self.identity = int(identity)
        self.universe = int(universe)
        self.name = name
        self.mask = np.zeros(self.universe, dtype=bool)
        self.mask[self.elements] = True
        self._structure = None

    def __repr__(self):
        return f"<FinAbGroup {self.name} order={self.order}>"

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, x):
        return bool(self.mask[x])

    def power(self, a, k):
        a = np.asarray(a, dtype=np.int64)
        k %= max(self.order, 1)
        result = np.full(a.shape, self.identity, dtype=np.int64)
        while k:
            if k & 1:
                result = self.op(result, a)
            k >>= 1
            if k:
                a = self.op(a, a)
        return result if result.ndim else int(result)

    def inverse(self, a):
        return self.power(a, self.order - 1)

    def subgroup(self, elements, name=""):
        return FinAbGroup(elements, self.op, self.identity, self.universe, name)

    def orders(self):
        return coset_orders(self, self.subgroup([self.identity]).mask)

    def structure(self):
        if self._structure is None:
            self._structure = group_structure(self)
        return self._structure

    def is_subgroup_of(self, other):
        return bool(other.mask[self.elements].all())


def unit_group(R, units=None):
    if units is None:
        units = np.nonzero(R.unit_mask())[0]
    return FinAbGroup(units, R.mul_vec, R.one, R.order, f"({R.name})*")


def additive_group(R, subset=None):
    elems = R.elements() if subset is None else subset
    return FinAbGroup(elems, R.add_vec, R.zero, R.order, f"({R.name},+)")


def cyclic_product(factors):
    """Z/f1 x Z/f2 x ... on mixed-radix labels."""
    factors = [int(f) for f in factors]
    places = [prod(factors[:i]) for i in range(len(factors))]
    size = prod(factors)

    def op(a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = 0
        for f, p in zip(factors, places):
            out = out + ((a // p % f + b // p % f) % f) * p
        return np.asarray(out, dtype=np.int64)

    name = " x ".join(f"Z/{f}" for f in factors) or "1"
    return FinAbGroup(np.arange(size), op, 0, size, name)


def coset_orders(G, H_mask):
    """For every element x of G, the least d >= 1 with x^d in H."""
    x = G.elements
    res = np.zeros(len(x), dtype=np.int64)
    cur = x.copy()
    d = 1
    while True:
        hit = H_mask[cur] & (res == 0)
        res[hit] = d
        if (res > 0).all():
            return res
        cur = G.op(cur, x)
        d += 1
        if d > G.order + 1:
            raise LRUError("operation is not a finite group law")


@dataclass(eq=False)
class GroupStructure:
    """G presented as Z/d1 x ... x Z/dr (d1 | d2 | ...), with explicit isomorphism."""

    group: FinAbGroup
    invariant_factors: list
    generators: list
    to_group: np.ndarray      # abstract label -> element of G
    from_group: np.ndarray    # element of G -> abstract label (-1 outside G)

    @property
    def abstract(self):
        return cyclic_product(self.invariant_factors)

    def verify(self, exhaustive=EXHAUSTIVE_PAIRS):
        G, A = self.group, self.abstract
        ok_bij = (len(np.unique(self.to_group)) == G.order == A.order
                  and bool(G.mask[self.to_group].all()))
        ok_div = all(b % a == 0 for a, b in zip(self.invariant_factors, self.invariant_factors[1:]))
        ok_order = prod(self.invariant_factors) == G.order
        if A.order <= exhaustive:
            lab = A.elements
            ok_hom = True
            for lo in range(0, len(lab), 256):
                a = lab[lo:lo + 256, None]
                if not (self.to_group[A.op(a, lab[None, :])]
                        == G.op(self.to_group[a], self.to_group[lab][None, :])).all():
                    ok_hom = False
                    break
            mode = "exhaustive"
        else:
            ok_hom = all(G.power(g, d) == G.identity for g, d in zip(self.generators, self.invariant_factors))
            mode = "generators"
        return {"ok": ok_bij and ok_div and ok_order and ok_hom, "bijective": ok_bij,
                "divisibility": ok_div, "order": ok_order, "homomorphism": ok_hom, "mode": mode}


def group_structure(G, bound=GROUP_BOUND):
    """Invariant factors by repeatedly splitting off a cyclic factor of maximal order.

    Each new generator has maximal order modulo the part already split off; it
    is corrected by powers of earlier generators so that its order equals its
    coset order, which makes the sum direct.
    """
    if G.order > bound:
        raise BoundExceeded(f"group order {G.order} exceeds bound {bound}")
    gens, orders = [], []
    h_elems = np.array([G.identity], dtype=np.int64)
    h_coords = np.zeros((1, 0), dtype=np.int64)
    dlog = np.full(G.universe, -1, dtype=np.int64)
    dlog[G.identity] = 0
    h_mask = np.zeros(G.universe, dtype=bool)
    h_mask[G.identity] = True
    while len(h_elems) < G.order:
        d_all = coset_orders(G, h_mask)
        i = int(np.argmax(d_all))
        x, d = int(G.elements[i]), int(d_all[i])
        exps = h_coords[dlog[G.power(x, d)]]
        for g, o, e in zip(gens, orders, exps):
            e = int(e) % o
            if e % d:
                raise LRUError("group law is not abelian or not associative")
            x = int(G.op(x, G.power(g, (-(e // d)) % o)))
        if G.power(x, d) != G.identity:
            raise LRUError("lifted generator has the wrong order")
        pw = [G.identity]
        for _ in range(d - 1):
            pw.append(int(G.op(pw[-1], x)))
        pw = np.array(pw, dtype=np.int64)
        new = G.op(h_elems[:, None], pw[None, :]).ravel()
        coords = np.concatenate([np.repeat(h_coords, d, axis=0),
                                 np.tile(np.arange(d), len(h_elems))[:, None]], axis=1)
        if len(np.unique(new)) != len(new):
            raise LRUError("generator sum is not direct")
        h_elems, h_coords = new, coords
        dlog[new] = np.arange(len(new))
        h_mask[new] = True
        gens.append(x)
        orders.append(d)
    # ascending invariant factors
    gens, orders = gens[::-1], orders[::-1]
    h_coords = h_coords[:, ::-1]
    places = [prod(orders[:i]) for i in range(len(orders))]
    labels = (h_coords * np.array(places, dtype=np.int64)).sum(axis=1) if orders else np.zeros(1, np.int64)
    to_group = np.empty(G.order, dtype=np.int64)
    to_group[labels] = h_elems
    from_group = np.full(G.universe, -1, dtype=np.int64)
    from_group[h_elems] = labels
    return GroupStructure(G, orders, gens, to_group, from_group)


def torsion_subgroup(G, m):
    """{x : x^m = 1} as a subgroup (labels are shared, so inclusion is the identity)."""
    mask = G.power(G.elements, m) == G.identity
    return G.subgroup(G.elements[mask], f"{G.name}[{m}]")


class QuotientGroup(FinAbGroup):
    """G/H labelled by least element of each coset."""

    def __init__(self, G, H):
        cosets = G.op(G.elements[:, None], H.elements[None, :])
        rep = np.full(G.universe, -1, dtype=np.int64)
        rep[G.elements] = cosets.min(axis=1)
        self.rep = rep
        self.parent = G
        super().__init__(np.unique(rep[G.elements]), lambda a, b: rep[G.op(a, b)],
                         rep[G.identity], G.universe, f"{G.name}/{H.name}")


@dataclass(eq=False)
class CoprimeSplit:
    G: FinAbGroup
    H: FinAbGroup
    K: FinAbGroup
    quotient: QuotientGroup
    section: dict            # coset representative -> its K element
    h_part: np.ndarray       # element -> H component
    k_part: np.ndarray       # element -> K component
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())


def coprime_split(G, H, exhaustive=EXHAUSTIVE_PAIRS):
    """Complement K = {x : x^n = 1}, n = [G:H], for a subgroup of coprime order and index."""
    if not H.is_subgroup_of(G):
        raise LRUError("H is not contained in G")
    m = H.order
    if G.order % m:
        raise LRUError("|H| does not divide |G|")
    n = G.order // m
    if gcd(m, n) != 1:
        raise LRUError(f"orders not coprime: |H|={m}, [G:H]={n}")
    K = torsion_subgroup(G, n)
    Q = QuotientGroup(G, H)
    # u*m + v*n = 1  ->  g = g^(v n) * g^(u m) with g^(v n) in H, g^(u m) in K
    u = pow(m, -1, n) if n > 1 else 0
    v = (1 - u * m) // n
    h_part = np.full(G.universe, -1, dtype=np.int64)
    k_part = np.full(G.universe, -1, dtype=np.int64)
    h_part[G.elements] = G.power(G.elements, (v * n) % G.order)
    k_part[G.elements] = G.power(G.elements, (u * m) % G.order)
    section = {int(Q.rep[k]): int(k) for k in K.elements}
    hk_meet = np.intersect1d(H.elements, K.elements)
    checks = {
        "H meets K trivially": hk_meet.tolist() == [G.identity],
        "|H||K| = |G|": H.order * K.order == G.order,
        "section defined on all cosets": sorted(section) == Q.elements.tolist(),
        "section splits projection": all(Q.rep[k] == c for c, k in section.items()),
        "components in H and K": bool(H.mask[h_part[G.elements]].all() and K.mask[k_part[G.elements]].all()),
        "g = h k": bool((G.op(h_part[G.elements], k_part[G.elements]) == G.elements).all()),
    }
    if G.order <= exhaustive:
        e = G.elements
        ok = True
        for lo in range(0, len(e), 256):
            a = e[lo:lo + 256, None]
            prodg = G.op(a, e[None, :])
            ok &= bool((h_part[prodg] == H.op(h_part[a], h_part[e][None, :])).all())
            ok &= bool((k_part[prodg] == K.op(k_part[a], k_part[e][None, :])).all())
        checks["G -> H x K is a homomorphism"] = ok
    return CoprimeSplit(G, H, K, Q, section, h_part, k_part, checks)


@dataclass
class HomSearchResult:
    homs: list               # each: list of generator images, aligned with domain generators
    generators: list
    invariant_factors: list
    candidate_space: int
    checked: int
    exhausted: bool

    def to_json(self, fmt=str):
        return {"generators": [fmt(g) for g in self.generators],
                "invariant_factors": self.invariant_factors,
                "homs": [[fmt(y) for y in h] for h in self.homs],
                "candidate_space": self.candidate_space, "checked": self.checked,
                "exhausted": self.exhausted}


def hom_search(A, B, section_of=None, first=False, budget=HOM_BUDGET):
    """Enumerate homomorphisms A -> B by generator images of order dividing each factor.

    ``section_of`` is a label map B -> A (numpy array over B's universe); when
    given, only homs s with section_of o s = id_A are kept.  A result with
    ``exhausted=True`` and no homs is a proof of non-existence.
    """
    S = A.structure()
    cand = [B.elements[B.power(B.elements, f) == B.identity] for f in S.invariant_factors]
    space = prod(len(c) for c in cand)
    if space > budget:
        raise BudgetExceeded(space, budget)
    if section_of is not None:
        # a section must send each generator to a preimage of itself; this
        # rejects every other tuple without evaluating it
        cand = [c[section_of[c] == g] for c, g in zip(cand, S.generators)]
    survivors = prod(len(c) for c in cand)
    homs, checked = [], space - survivors
    abstract = S.abstract
    for images in itertools.product(*[c.tolist() for c in cand]):
        checked += 1
        if section_of is not None:
            # hom s o (abstract iso)^-1 evaluated on every element of A
            img = _evaluate(B, images, S.invariant_factors, abstract)
            if not (section_of[img[S.from_group[A.elements]]] == A.elements).all():
                continue
        homs.append(list(images))
        if first:
            return HomSearchResult(homs, S.generators, S.invariant_factors, space, checked, False)
    return HomSearchResult(homs, S.generators, S.invariant_factors, space, checked, True)


def _evaluate(B, images, factors, abstract):
    """Image in B of every abstract label under generator images."""
    out = np.full(abstract.order, B.identity, dtype=np.int64)
    places = [prod(factors[:i]) for i in range(len(factors))]
    labels = abstract.elements
    for y, f, p in zip(images, factors, places):
        out = B.op(out, _powers(B, y, f)[labels // p % f])
    return out


def _powers(B, y, f):
    pw = [B.identity]
    for _ in range(f - 1):
        pw.append(int(B.op(pw[-1], y)))
    return np.array(pw, dtype=np.int64)


def format_factors(factors, sep=" × "):
    return sep.join(f"Z/{d}" for d in factors) if factors else "1"
