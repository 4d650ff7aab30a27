"""Pinned corpus, random local table rings and the property suites run over them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from math import gcd

import numpy as np

from . import dsl
from .abelian import coprime_split, unit_group
from .errors import LRUError
from .homological import ext_vanishing_check, ext1, ext1_closed, ext1_snf
from .local import (NotLocal, characteristics, jacobson_maximal, local_order_check, local_structure,
                    verify_unit_sequence)
from .rings import (PolyQuotRing, ZModRing, build_ring, ideal_generated, materialize, quotient_ring,
                    ring_axioms_check, rng_for)
from .splitting import (check_counterexample, coefficient_section, graded_units_iso,
                        ring_homs_from_field, teichmuller_table, teichmuller_uniqueness,
                        tower_lift_section, unit_decomposition)

RANDOM_ORDERS = (4, 8, 9, 16, 25, 27, 32)
RETRIES = 200
SUITES = ("lemma1", "lemma2", "lemma5", "lemma6", "cor1", "cor2", "thm2", "counterexamples",
          "oracle-equivalence")


# -- random local rings ---------------------------------------------------------

def _random_monic(rng, base, degree):
    coeffs = [int(c) for c in rng.integers(0, base.order, degree)] + [base.one]
    return coeffs


def random_local_table_ring(order, seed, retries=RETRIES):
    """A random local quotient of a random polynomial tower, relabelled as a table."""
    if order not in RANDOM_ORDERS:
        raise LRUError(f"order {order} not in {RANDOM_ORDERS}")
    p, a = dsl.prime_power(order)
    rng = rng_for(seed)
    for _ in range(retries):
        j = int(rng.integers(1, a + 1))
        base = ZModRing(p ** j)
        m = int(rng.integers(max(1, -(-a // j)), -(-a // j) + 2))
        if base.order ** m > 1024:
            continue
        R = PolyQuotRing(base, "x", _random_monic(rng, base, m))
        if R.order ** 2 <= 1024 and rng.random() < 0.3:
            M = jacobson_maximal(R)
            if isinstance(M, NotLocal):
                continue
            r = int(rng.choice(M.elements))
            R = PolyQuotRing(R, "y", [R.neg(r), R.zero, R.one])
        M = jacobson_maximal(R)
        if isinstance(M, NotLocal):
            continue
        gens = []
        I = ideal_generated(R, [])
        pool = M.elements[1:]
        while R.order // I.size > order and pool.size:
            g = int(rng.choice(pool))
            J = ideal_generated(R, gens + [g], minimize=False)
            if R.order // J.size >= order:
                gens.append(g)
                I = J
            pool = pool[pool != g]
        if R.order // I.size != order:
            continue
        Q, _ = quotient_ring(R, I)
        perm = np.concatenate([[0], 1 + rng.permutation(order - 1)])
        return materialize(Q, perm)
    raise LRUError(f"no local ring of order {order} found within {retries} attempts")


# -- corpus ---------------------------------------------------------------------------

@dataclass(eq=False)
class CorpusEntry:
    name: str
    spec: str | None = None
    order: int | None = None
    seed: int | None = None
    _ring: object = None

    @property
    def rational(self):
        return self.spec is not None and dsl.is_rational(dsl.parse_ring_spec(self.spec))

    @property
    def ring(self):
        if self._ring is None:
            if self.spec is not None:
                self._ring = build_ring(self.spec)
            else:
                self._ring = random_local_table_ring(self.order, self.seed)
        return self._ring


@dataclass(eq=False)
class Corpus:
    version: int
    seed: int
    entries: list = field(default_factory=list)

    @property
    def finite(self):
        return [e for e in self.entries if not e.rational]

    @property
    def rational(self):
        return [e for e in self.entries if e.rational]


def load_manifest(path=None):
    if path is None:
        text = resources.files("localrings").joinpath("data/corpus.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def load_corpus(path=None, random_count=None):
    m = load_manifest(path)
    entries = [CorpusEntry(x["name"], x["spec"]) for x in m.get("members", [])]
    rt = m.get("random_tables", {})
    count = rt.get("count", 0) if random_count is None else random_count
    orders = rt.get("orders", list(RANDOM_ORDERS))
    seeds = rng_for(m["seed"]).integers(0, 2 ** 63, count) if count else []
    for i in range(count):
        o = orders[i % len(orders)]
        entries.append(CorpusEntry(f"random-{i:03d}-order-{o}", order=o, seed=int(seeds[i])))
    entries += [CorpusEntry(x["name"], x["spec"]) for x in m.get("rational", [])]
    return Corpus(m["version"], m["seed"], entries)


_DEFAULT = {}


def default_corpus():
    if "corpus" not in _DEFAULT:
        _DEFAULT["corpus"] = load_corpus()
    return _DEFAULT["corpus"]


# -- suites -----------------------------------------------------------------------------

def _failed(checks):
    return sorted(k for k, v in checks.items() if v is False)


def _entry(name, checks, **extra):
    out = {"ring": name, "ok": not _failed(checks)}
    if not out["ok"]:
        out["failed"] = _failed(checks)
    out.update(extra)
    return out


def _guarded(e, check):
    """Run a per-ring check; library errors become a failing entry with their witness."""
    try:
        return check(e)
    except LRUError as err:
        out = {"ring": e.name, "ok": False, "failed": ["error"], "error": str(err)}
        if getattr(err, "witness", None) is not None:
            out["witness"] = [int(x) if isinstance(x, (int, np.integer)) else str(x) for x in err.witness]
        return out


def _per_ring(entries, check):
    return [_guarded(e, check) for e in entries]


def suite_unit_sequence(corpus, seed):
    def check(e):
        c = verify_unit_sequence(e.ring)
        return _entry(e.name, c.data["checks"], units=c.data["units"], one_plus=c.data["one_plus"],
                      residue_units=c.data["residue_units"])

    return _per_ring(corpus.finite, check)


def suite_graded_units(corpus, seed):
    def check(e):
        L = local_structure(e.ring)
        levels, checks = [], {}
        for n in range(1, L.nilpotency):
            g = graded_units_iso(L, n)
            levels.append({"level": n, "order": g.domain_order, "invariant_factors": g.invariant_factors})
            checks.update({f"n={n}: {k}": v for k, v in g.checks.items()})
        return _entry(e.name, checks, nilpotency=L.nilpotency, levels=levels)

    return _per_ring(corpus.finite, check)


def suite_coprime_split(corpus, seed):
    def check(e):
        L = local_structure(e.ring)
        R = L.ring
        G = unit_group(R)
        H = G.subgroup(np.unique(R.add_vec(R.one, L.maximal.elements)))
        split = coprime_split(G, H)
        table = teichmuller_table(L)[0]
        kstar = np.nonzero(L.residue.unit_mask())[0]
        checks = dict(split.checks)
        checks["K = Teichmüller image"] = np.array_equal(split.K.elements, np.unique(table[kstar]))
        return _entry(e.name, checks, H=H.order, K=split.K.order)

    return _per_ring(corpus.finite, check)


def suite_unit_decomposition(corpus, seed):
    def check(e):
        d = unit_decomposition(local_structure(e.ring))
        checks = dict(d.checks)
        checks.update({f"section: {k}": v for k, v in d.section.transcript.items() if isinstance(v, bool)})
        return _entry(e.name, checks, one_plus=d.one_plus_factors, residue=d.residue_factors,
                      units=d.unit_factors)

    return _per_ring(corpus.finite, check)


def suite_local_order(corpus, seed):
    def check(e):
        R = e.ring
        cr, ck = characteristics(R)
        p, a = local_order_check(R)
        pk = dsl.prime_power(ck)
        checks = {"axioms": ring_axioms_check(R, seed=seed).ok,
                  "char k divides char R": cr % ck == 0,
                  "char k prime": pk is not None and pk[1] == 1,
                  "order is power of char k": p == ck}
        return _entry(e.name, checks, order=R.order, p=p, exponent=a, char_R=cr, char_k=ck)

    return _per_ring(corpus.finite, check)


def random_ext_pair(rng, max_factor=100, max_rank=3):
    a = [int(x) for x in rng.integers(2, max_factor + 1, int(rng.integers(0, 4)))]
    b = [int(x) for x in rng.integers(2, max_factor + 1, int(rng.integers(0, 4)))]
    return a, b, int(rng.integers(0, max_rank + 1)), int(rng.integers(0, max_rank + 1))


def random_vanishing_triple(rng):
    """(A, B, r) with r regular on A and r B = 0."""
    r = int(rng.choice([2, 3, 5, 7, 11]))
    a = []
    for _ in range(int(rng.integers(0, 4))):
        x = int(rng.integers(2, 101))
        while gcd(x, r) != 1:
            x = int(rng.integers(2, 101))
        a.append(x)
    b = [r] * int(rng.integers(1, 4))
    return a, b, r, int(rng.integers(0, 4))


def suite_ext_vanishing(corpus, seed, count=200):
    rng = rng_for(seed)
    res = []
    ok = True
    for i in range(count):
        a, b, r, f = random_vanishing_triple(rng)
        c = ext_vanishing_check(a, b, r, f=f)
        ok &= c.verdict == "witness" and c.ok
        if not c.ok or c.verdict != "witness":
            res.append(_entry(f"triple-{i}", {"vanishes": False}, **c.data))
    res.insert(0, _entry(f"{count} random triples", {"all vanish": ok}))
    controls = {"Ext(Z/6,Z/4) = Z/2": ext1([6], [4]) == [2], "Ext(Z/3,Z/3) = Z/3": ext1([3], [3]) == [3]}
    res.append(_entry("positive controls", controls))
    return res


def suite_sections(corpus, seed):
    def check(e):
        R = e.ring
        L = local_structure(R)
        s = coefficient_section(L)
        equal = L.char_ring == L.char_residue
        checks = {"section iff equal characteristic": s.found == equal}
        extra = {"char_R": L.char_ring, "char_k": L.char_residue, "section": s.found}
        if s.found:
            checks.update({k: v for k, v in s.transcript.items() if isinstance(v, bool)})
        elif not e.rational:
            search = ring_homs_from_field(L)
            if search is not None:
                checks["exhaustive search finds no ring hom k -> R"] = search["homs"] == 0
                extra["search"] = search
        return _entry(e.name, checks, **extra)

    return _per_ring(corpus.entries, check)


def suite_counterexamples(corpus, seed):
    runs = [("trunc-ring-section", {"q": 2}, "obstruction"), ("trunc-ring-section", {"q": 3}, "obstruction")]
    runs += [("padic-unit-section", {"p": p, "N": n}, "obstruction") for p in (3, 5) for n in (3, 4)]
    runs += [("Zloc-units", {"p": p}, "witness") for p in (2, 3)]
    runs += [("Zloc-units", {"p": p}, "obstruction") for p in (5, 7, 11)]
    res = []
    for case, params, expected in runs:
        c = check_counterexample(case, **params)
        checks = {"verdict": c.verdict == expected, "certificate ok": c.ok}
        if expected == "obstruction" and "exhausted" in c.data:
            checks["exhausted"] = c.data["exhausted"]
        label = case + "(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"
        res.append(_entry(label, checks, certificate=c.to_json()))
    return res


def suite_oracle_equivalence(corpus, seed, ext_pairs=500):
    def check(e):
        L = local_structure(e.ring)
        checks = {}
        counts = teichmuller_uniqueness(L)
        if counts is not None:
            checks["one Teichmüller point per residue"] = bool((counts == 1).all())
        if L.char_ring == L.char_residue:
            c, t = coefficient_section(L), tower_lift_section(L)
            checks["tower route = coefficient section"] = c.table == t.table
            checks["tower steps verified"] = t.ok
        return _entry(e.name, checks)

    res = _per_ring(corpus.finite, check)
    rng = rng_for(seed)
    agree = True
    for _ in range(ext_pairs):
        a, b, f, g = random_ext_pair(rng)
        agree &= ext1_snf(a, f, b, g) == ext1_closed(a, f, b, g)
    res.append(_entry(f"Ext routes on {ext_pairs} random pairs", {"SNF = closed form": agree}))
    return res


SUITE_FUNCS = {
    "lemma1": suite_unit_sequence, "lemma2": suite_graded_units, "lemma5": suite_coprime_split, "lemma6": suite_local_order,
    "cor1": suite_ext_vanishing, "cor2": suite_unit_decomposition, "thm2": suite_sections,
    "counterexamples": suite_counterexamples, "oracle-equivalence": suite_oracle_equivalence,
}


def run_suite(name, corpus=None, seed=42):
    """Deterministic JSON-ready report; no timings are included."""
    corpus = corpus or default_corpus()
    if name == "all":
        reports = [run_suite(s, corpus, seed) for s in SUITES]
        return {"suite": "all", "seed": seed, "corpus_version": corpus.version,
                "ok": all(r["ok"] for r in reports), "suites": reports}
    if name not in SUITE_FUNCS:
        raise LRUError(f"unknown suite '{name}'; expected one of {', '.join(SUITES + ('all',))}")
    results = SUITE_FUNCS[name](corpus, seed)
    failed = [r["ring"] for r in results if not r["ok"]]
    return {"suite": name, "seed": seed, "corpus_version": corpus.version, "ok": not failed,
            "passed": len(results) - len(failed), "failed": failed, "results": results}
