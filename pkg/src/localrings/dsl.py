"""Ring-description language: AST, recursive-descent parser, printer, JSON form.

Grammar (whitespace is insignificant)::

    ring    := primary ( "[" ident "]" "/" "(" expr ")" )*
    primary := "Z" "/" nat | "GF" "(" nat ")" | "Q"
             | "product" "(" ring "," ring ")"
             | "quot" "(" ring ( "," expr )+ ")"
             | "table" "(" nat "," matrix "," matrix ")"
             | "pullback" "(" ring "," ring "," ring "," images "," images ")"
    images  := "[" [ expr ( "," expr )* ] "]"
    expr    := [ "+" | "-" ] term ( ( "+" | "-" ) term )*
    term    := factor ( "*" factor | "/" nat )*
    factor  := atom [ "^" nat ]
    atom    := nat | ident | "#" nat | "(" expr [ "," expr ] ")"

``GF(p^d)`` with ``d > 1`` brings the generator ``a`` into scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint

from .errors import DSLSyntaxError

GF_GENERATOR = "a"


# -- polynomials in the AST -------------------------------------------------

def _mono_mul(m1, m2):
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _pmul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c != 0}


def _padd(p, q, sign=1):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + sign * c
    return {m: c for m, c in out.items() if c != 0}


def _term_key(item):
    mono, _ = item
    return (-sum(e for _, e in mono), mono)


@dataclass(frozen=True)
class Poly:
    """Multivariate polynomial with rational coefficients, kept in canonical order."""

    terms: tuple

    @classmethod
    def from_dict(cls, d):
        items = [(m, Fraction(c)) for m, c in d.items() if c != 0]
        return cls(tuple(sorted(items, key=_term_key)))

    @classmethod
    def from_expr(cls, expr, text=""):
        return cls.from_dict(_expand(expr, text))

    def as_dict(self):
        return dict(self.terms)

    def variables(self):
        return sorted({v for m, _ in self.terms for v, _ in m})

    def degree_in(self, var):
        return max((dict(m).get(var, 0) for m, _ in self.terms), default=-1)

    def coefficients_in(self, var):
        """Split into {exponent of var: Poly in the remaining variables}."""
        parts = {}
        for m, c in self.terms:
            e = dict(m).get(var, 0)
            rest = tuple((v, k) for v, k in m if v != var)
            parts.setdefault(e, {})[rest] = c
        return {e: Poly.from_dict(d) for e, d in parts.items()}

    def is_one(self):
        return self.terms == (((), Fraction(1)),)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.terms:
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not body:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(body)
            elif c == -1:
                pieces.append("-" + body)
            else:
                pieces.append(f"{c}*{body}")
        return join_terms(pieces)


def join_terms(pieces):
    out = pieces[0]
    for p in pieces[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def _expand(expr, text):
    tag = expr[0]
    if tag == "num":
        return {(): expr[1]} if expr[1] != 0 else {}
    if tag == "var":
        return {((expr[1], 1),): Fraction(1)}
    if tag == "add":
        return _padd(_expand(expr[1], text), _expand(expr[2], text))
    if tag == "sub":
        return _padd(_expand(expr[1], text), _expand(expr[2], text), -1)
    if tag == "neg":
        return _padd({}, _expand(expr[1], text), -1)
    if tag == "mul":
        return _pmul(_expand(expr[1], text), _expand(expr[2], text))
    if tag == "pow":
        base = _expand(expr[1], text)
        out = {(): Fraction(1)}
        for _ in range(expr[2]):
            out = _pmul(out, base)
        return out
    raise DSLSyntaxError(f"'{tag}' literal not allowed in a polynomial", expr[-1], text)


# -- ring specs --------------------------------------------------------------

@dataclass(frozen=True)
class ZMod:
    n: int


@dataclass(frozen=True)
class GF:
    q: int


@dataclass(frozen=True)
class QQ:
    pass


@dataclass(frozen=True)
class PolyQuot:
    base: object
    var: str
    modulus: Poly


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class Table:
    order: int
    add: tuple
    mul: tuple


@dataclass(frozen=True)
class Quot:
    base: object
    gens: tuple


@dataclass(frozen=True)
class Pullback:
    a: object
    b: object
    c: object
    f_images: tuple
    g_images: tuple


def prime_power(n):
    """(p, d) with n = p^d, or None."""
    if n < 2:
        return None
    f = factorint(n)
    if len(f) != 1:
        return None
    return next(iter(f.items()))


def scope(spec):
    """Variable names usable in element expressions of the ring built from spec."""
    if isinstance(spec, GF):
        return [GF_GENERATOR] if prime_power(spec.q)[1] > 1 else []
    if isinstance(spec, PolyQuot):
        return scope(spec.base) + [spec.var]
    if isinstance(spec, Quot):
        return scope(spec.base)
    return []


def is_rational(spec):
    if isinstance(spec, QQ):
        return True
    if isinstance(spec, (PolyQuot, Quot)):
        return is_rational(spec.base)
    if isinstance(spec, Product):
        return is_rational(spec.left) or is_rational(spec.right)
    if isinstance(spec, Pullback):
        return any(is_rational(s) for s in (spec.a, spec.b, spec.c))
    return False


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        pos = self.pos if pos is None else pos
        offset = len(self.text[:pos].encode("utf-8"))
        raise DSLSyntaxError(message, offset, self.text)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s):
        self.ws()
        return self.text.startswith(s, self.pos)

    def accept(self, s):
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s):
        if not self.accept(s):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            self.error(f"expected '{s}', found {found!r}")

    def nat(self):
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a natural number")
        return int(self.text[start:self.pos])

    def ident(self):
        self.ws()
        start = self.pos
        if self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_"):
            self.pos += 1
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
        if start == self.pos:
            self.error("expected an identifier")
        return self.text[start:self.pos]

    def end(self):
        self.ws()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")

    # rings
    def ring(self):
        spec = self.primary()
        while self.peek("["):
            self.pos += 1
            var_pos = self.pos
            var = self.ident()
            self.expect("]")
            self.expect("/")
            self.expect("(")
            poly_pos = self.pos
            modulus = Poly.from_expr(self.expr(), self.text)
            self.expect(")")
            in_scope = scope(spec)
            if var in in_scope:
                self.error(f"variable '{var}' already in scope", var_pos)
            unknown = set(modulus.variables()) - set(in_scope) - {var}
            if unknown:
                self.error(f"unknown variable(s) {sorted(unknown)} in modulus", poly_pos)
            deg = modulus.degree_in(var)
            if deg < 1:
                self.error(f"modulus must have degree >= 1 in '{var}'", poly_pos)
            if not modulus.coefficients_in(var)[deg].is_one():
                self.error("modulus is not monic", poly_pos)
            spec = PolyQuot(spec, var, modulus)
        return spec

    def primary(self):
        self.ws()
        start = self.pos
        if self.pos >= len(self.text):
            self.error("expected a ring")
        if not (self.text[self.pos].isalpha() or self.text[self.pos] == "_"):
            self.error("expected a ring")
        word = self.ident()
        if word == "Z":
            self.expect("/")
            n_pos = self.pos
            n = self.nat()
            if n < 2:
                self.error("Z/n needs n >= 2", n_pos)
            return ZMod(n)
        if word == "GF":
            self.expect("(")
            q_pos = self.pos
            q = self.nat()
            if prime_power(q) is None:
                self.error(f"GF({q}): {q} is not a prime power", q_pos)
            self.expect(")")
            return GF(q)
        if word == "Q":
            return QQ()
        if word == "product":
            self.expect("(")
            left = self.ring()
            self.expect(",")
            right = self.ring()
            self.expect(")")
            return Product(left, right)
        if word == "quot":
            self.expect("(")
            base = self.ring()
            gens = []
            while self.accept(","):
                g_pos = self.pos
                g = Poly.from_expr(self.expr(), self.text)
                unknown = set(g.variables()) - set(scope(base))
                if unknown:
                    self.error(f"unknown variable(s) {sorted(unknown)}", g_pos)
                gens.append(g)
            if not gens:
                self.error("quot needs at least one generator")
            self.expect(")")
            return Quot(base, tuple(gens))
        if word == "table":
            self.expect("(")
            n = self.nat()
            self.expect(",")
            add = self.matrix(n)
            self.expect(",")
            mul = self.matrix(n)
            self.expect(")")
            return Table(n, add, mul)
        if word == "pullback":
            self.expect("(")
            a = self.ring()
            self.expect(",")
            b = self.ring()
            self.expect(",")
            c = self.ring()
            self.expect(",")
            fi = self.images(len(scope(a)), scope(c))
            self.expect(",")
            gi = self.images(len(scope(b)), scope(c))
            self.expect(")")
            return Pullback(a, b, c, fi, gi)
        self.error(f"unknown atom '{word}'", start)

    def matrix(self, n):
        start = self.pos
        self.expect("[")
        rows = []
        while True:
            self.expect("[")
            row = [self.nat()]
            while self.accept(","):
                row.append(self.nat())
            self.expect("]")
            rows.append(tuple(row))
            if not self.accept(","):
                break
        self.expect("]")
        if len(rows) != n or any(len(r) != n for r in rows) or any(x >= n for r in rows for x in r):
            self.error(f"table must be {n}x{n} with entries < {n}", start)
        return tuple(rows)

    def images(self, count, target_scope):
        start = self.pos
        self.expect("[")
        out = []
        if not self.peek("]"):
            while True:
                p_pos = self.pos
                p = Poly.from_expr(self.expr(), self.text)
                if set(p.variables()) - set(target_scope):
                    self.error("image uses a variable outside the target ring", p_pos)
                out.append(p)
                if not self.accept(","):
                    break
        self.expect("]")
        if len(out) != count:
            self.error(f"expected {count} generator image(s), got {len(out)}", start)
        return tuple(out)

    # expressions
    def expr(self):
        self.ws()
        start = self.pos
        if self.accept("-"):
            node = ("neg", self.term(), start)
        else:
            self.accept("+")
            node = self.term()
        while True:
            if self.accept("+"):
                node = ("add", node, self.term(), start)
            elif self.accept("-"):
                node = ("sub", node, self.term(), start)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            self.ws()
            start = self.pos
            if self.accept("*"):
                node = ("mul", node, self.factor(), start)
            elif self.peek("/") and not self.peek("/("):
                self.pos += 1
                d = self.nat()
                if d == 0:
                    self.error("division by zero", start)
                node = ("mul", node, ("num", Fraction(1, d), start), start)
            else:
                return node

    def factor(self):
        node = self.atom()
        if self.accept("^"):
            node = ("pow", node, self.nat(), self.pos)
        return node

    def atom(self):
        self.ws()
        start = self.pos
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch.isdigit():
            return ("num", Fraction(self.nat()), start)
        if ch == "#":
            self.pos += 1
            return ("idx", self.nat(), start)
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.accept(","):
                second = self.expr()
                self.expect(")")
                return ("tuple", inner, second, start)
            self.expect(")")
            return inner
        if ch.isalpha() or ch == "_":
            return ("var", self.ident(), start)
        self.error(f"unexpected {ch!r}")


def parse_ring_spec(text):
    if not text or not text.strip():
        raise DSLSyntaxError("empty ring description", 0, text)
    p = _Parser(text)
    spec = p.ring()
    p.end()
    return spec


def parse_expr(text):
    """Parse an element or polynomial expression into a small tuple AST."""
    if not text or not text.strip():
        raise DSLSyntaxError("empty expression", 0, text)
    p = _Parser(text)
    node = p.expr()
    p.end()
    return node


def parse_poly(text):
    return Poly.from_expr(parse_expr(text), text)


# -- printing ----------------------------------------------------------------

def _matrix_str(rows):
    return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in rows) + "]"


def format_spec(spec):
    if isinstance(spec, ZMod):
        return f"Z/{spec.n}"
    if isinstance(spec, GF):
        return f"GF({spec.q})"
    if isinstance(spec, QQ):
        return "Q"
    if isinstance(spec, PolyQuot):
        return f"{format_spec(spec.base)}[{spec.var}]/({spec.modulus})"
    if isinstance(spec, Product):
        return f"product({format_spec(spec.left)},{format_spec(spec.right)})"
    if isinstance(spec, Quot):
        return f"quot({format_spec(spec.base)}," + ",".join(map(str, spec.gens)) + ")"
    if isinstance(spec, Table):
        return f"table({spec.order},{_matrix_str(spec.add)},{_matrix_str(spec.mul)})"
    if isinstance(spec, Pullback):
        fi = ",".join(map(str, spec.f_images))
        gi = ",".join(map(str, spec.g_images))
        return (f"pullback({format_spec(spec.a)},{format_spec(spec.b)},"
                f"{format_spec(spec.c)},[{fi}],[{gi}])")
    raise TypeError(f"not a ring spec: {spec!r}")


# -- JSON --------------------------------------------------------------------

def spec_to_json(spec):
    if isinstance(spec, ZMod):
        return {"type": "ZMOD", "n": spec.n}
    if isinstance(spec, GF):
        return {"type": "GF", "q": spec.q}
    if isinstance(spec, QQ):
        return {"type": "QQ"}
    if isinstance(spec, PolyQuot):
        return {"type": "POLYQUOT", "base": spec_to_json(spec.base), "var": spec.var,
                "modulus": str(spec.modulus)}
    if isinstance(spec, Product):
        return {"type": "PRODUCT", "left": spec_to_json(spec.left), "right": spec_to_json(spec.right)}
    if isinstance(spec, Quot):
        return {"type": "QUOT", "base": spec_to_json(spec.base), "gens": [str(g) for g in spec.gens]}
    if isinstance(spec, Table):
        return {"type": "TABLE", "order": spec.order, "add": [list(r) for r in spec.add],
                "mul": [list(r) for r in spec.mul]}
    if isinstance(spec, Pullback):
        return {"type": "PULLBACK", "a": spec_to_json(spec.a), "b": spec_to_json(spec.b),
                "c": spec_to_json(spec.c), "f_images": [str(p) for p in spec.f_images],
                "g_images": [str(p) for p in spec.g_images]}
    raise TypeError(f"not a ring spec: {spec!r}")


def spec_from_json(obj):
    t = obj["type"]
    if t == "ZMOD":
        return ZMod(obj["n"])
    if t == "GF":
        return GF(obj["q"])
    if t == "QQ":
        return QQ()
    if t == "POLYQUOT":
        return PolyQuot(spec_from_json(obj["base"]), obj["var"], parse_poly(obj["modulus"]))
    if t == "PRODUCT":
        return Product(spec_from_json(obj["left"]), spec_from_json(obj["right"]))
    if t == "QUOT":
        return Quot(spec_from_json(obj["base"]), tuple(parse_poly(g) for g in obj["gens"]))
    if t == "TABLE":
        return Table(obj["order"], tuple(map(tuple, obj["add"])), tuple(map(tuple, obj["mul"])))
    if t == "PULLBACK":
        return Pullback(spec_from_json(obj["a"]), spec_from_json(obj["b"]), spec_from_json(obj["c"]),
                        tuple(parse_poly(p) for p in obj["f_images"]),
                        tuple(parse_poly(p) for p in obj["g_images"]))
    raise ValueError(f"unknown spec type {t!r}")


def canonical_json(obj):
    """Byte-stable JSON used for golden files and reports."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_plain)


def _plain(x):
    """numpy scalars and Fractions as plain JSON values."""
    if isinstance(x, Fraction):
        return str(x)
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"{type(x).__name__} is not JSON serializable")
