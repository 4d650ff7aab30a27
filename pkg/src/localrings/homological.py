"""Smith normal form over the integers and Ext^1 of finitely generated abelian groups."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint

from .certificates import Certificate


@dataclass
class SNFResult:
    D: list
    U: list
    V: list

    @property
    def diagonal(self):
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    def to_json(self):
        return {"D": self.D, "U": self.U, "V": self.V}


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def smith_normal_form(A):
    """U A V = D with U, V unimodular and d1 | d2 | ..., all d >= 0.

    Pivot: smallest nonzero absolute value in the active block, first in
    row-major order.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        for M in (D, U):
            M[dst] = [x + c * y for x, y in zip(M[dst], M[src])]

    def add_col(dst, src, c):
        for M in (D, V):
            for row in M:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = abs(D[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean &= D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean &= D[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SNFResult(D, U, V)


def _det(M):
    from sympy import Matrix
    return int(Matrix(M).det()) if M else 1


def verify_snf(A, res):
    d = res.diagonal
    n = len(A[0]) if A else 0
    diag_only = all(res.D[i][j] == 0 for i in range(len(A)) for j in range(n) if i != j)
    return {
        "UAV = D": matmul(matmul(res.U, A), res.V) == res.D if A and n else True,
        "U unimodular": abs(_det(res.U)) == 1,
        "V unimodular": abs(_det(res.V)) == 1,
        "diagonal": diag_only,
        "nonnegative": all(x >= 0 for x in d),
        "divisibility": all(b % a == 0 if a else b == 0 for a, b in zip(d, d[1:])),
    }


def invariant_factors(cyclic_orders):
    """Normalize a direct sum of Z/c (c >= 1) to ascending invariant factors."""
    by_prime = {}
    for c in cyclic_orders:
        if c == 0:
            raise ValueError("free summands have no invariant factor")
        for p, e in factorint(c).items():
            by_prime.setdefault(p, []).append(p ** e)
    length = max((len(v) for v in by_prime.values()), default=0)
    out = [1] * length
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            out[length - 1 - i] *= q
    return out


def cokernel(X, rows):
    """Invariant factors and free rank of Z^rows / (column span of X)."""
    if not X or not X[0]:
        return [], rows
    d = [x for x in smith_normal_form(X).diagonal]
    nonzero = [x for x in d if x]
    return [x for x in nonzero if x != 1], rows - len(nonzero)


def _strip(factors):
    factors = [int(a) for a in factors]
    if any(a < 1 for a in factors):
        raise ValueError("torsion factors must be positive")
    return [a for a in factors if a != 1]


def ext1_snf(a, f, b, g):
    """Ext^1(Z^f + sum Z/a_i, Z^g + sum Z/b_j) from the presentation with relation matrix diag(a).

    With relations P (r x n), Ext^1(A, C) is the cokernel of P: C^n -> C^r;
    for C = Z/b that is Z^r / (P Z^n + b Z^r).
    """
    a, b = _strip(a), _strip(b)
    r, n = len(a), len(a) + f
    P = [[a[i] if j == i else 0 for j in range(n)] for i in range(r)]
    summands = []
    if r == 0:
        return []
    for _ in range(g):
        tors, free = cokernel(P, r)
        if free:
            raise ArithmeticError("Ext^1 of a finitely generated group came out infinite")
        summands += tors
    for bj in b:
        X = [row + [bj if k == i else 0 for k in range(r)] for i, row in enumerate(P)]
        tors, free = cokernel(X, r)
        summands += tors
    return invariant_factors(summands)


def ext1_closed(a, f, b, g):
    a, b = _strip(a), _strip(b)
    summands = [gcd(x, y) for x in a for y in b] + [x for x in a for _ in range(g)]
    return invariant_factors([s for s in summands if s != 1])


def ext1(a, b, f=0, g=0):
    """Invariant factors of Ext^1; both routes are computed and must agree."""
    s = ext1_snf(a, f, b, g)
    c = ext1_closed(a, f, b, g)
    if s != c:
        from .errors import TheoremViolation
        raise TheoremViolation(f"Ext routes disagree: SNF {s}, closed form {c}")
    return s


def format_group(factors, sep=" ⊕ "):
    return sep.join(f"Z/{d}" for d in factors) if factors else "0"


def ext_vanishing_check(a, b, r, f=0, g=0):
    """If r is regular on A and kills B then Ext^1(A, B) = 0."""
    if r < 2:
        raise ValueError("r must be at least 2")
    a_s, b_s = _strip(a), _strip(b)
    regular = all(gcd(r, x) == 1 for x in a_s)
    kills = g == 0 and all(r % y == 0 for y in b_s)
    data = {"A": {"torsion": a_s, "free_rank": f}, "B": {"torsion": b_s, "free_rank": g}, "r": r,
            "r_regular_on_A": regular, "r_kills_B": kills}
    if not (regular and kills):
        return Certificate("ext1-vanishing", "skipped", True, data)
    snf, closed = ext1_snf(a, f, b, g), ext1_closed(a, f, b, g)
    data["ext1_snf"] = snf
    data["ext1_closed"] = closed
    ok = snf == closed == []
    return Certificate("ext1-vanishing", "witness" if ok else "violation", ok, data)
