"""Command-line interface ``lru``.

Every command builds a JSON payload first; the text output is rendered from
it.  Exit codes: 0 success, 1 domain error or obstruction, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dsl
from .errors import LRUError
from .harness import SUITES, load_corpus, default_corpus, run_suite
from .homological import ext1, format_group, smith_normal_form, verify_snf
from .local import NotLocal, jacobson_maximal, local_structure
from .rings import build_ring, fiber_product, hom_from_images
from .splitting import (CASES, check_counterexample, coefficient_section, graded_units_iso,
                        hensel_lift, unit_decomposition, unit_section)

OK, FAIL, USAGE = 0, 1, 2


def _ints(text):
    text = (text or "").strip()
    return [int(x) for x in text.split(",") if x.strip()] if text else []


# -- commands: each returns (payload, exit code) ----------------------------------

def cmd_info(args):
    R = build_ring(args.ring)
    if R.kind == "rational":
        out = {"ring": R.name, "kind": "rational"}
        out.update(local_structure(R).summary())
        return out, OK
    out = {"ring": R.name, "kind": "finite", "order": R.order}
    M = jacobson_maximal(R)
    if isinstance(M, NotLocal):
        out["local"] = False
        out["witness"] = [R.fmt(x) for x in M.witness]
        return out, OK
    out.update(local_structure(R).summary())
    return out, OK


def render_info(d):
    lines = [f"ring: {d['ring']}"]
    if d["kind"] == "rational":
        lines.append(f"dimension over Q: {d['dimension']}")
    else:
        lines.append(f"order: {d['order']}")
    if not d["local"]:
        a, b = d["witness"]
        lines.append(f"local: no (non-units {a} and {b} sum to a unit)")
        return "\n".join(lines)
    gens = ", ".join(d["maximal_ideal_generators"]) or "0"
    size = (f"{d['maximal_ideal_size']} elements" if "maximal_ideal_size" in d
            else f"dimension {d['maximal_ideal_dimension']}")
    lines += ["local: yes", f"maximal ideal: ({gens}), {size}",
              f"nilpotency index: {d['nilpotency_index']}"]
    k = d["residue_field"]
    if "order" in k:
        lines.append(f"residue field: order {k['order']}, generator {k['generator']}")
    elif k["dimension"] == 1:
        lines.append("residue field: Q")
    else:
        lines.append(f"residue field: Q[{k['generator']}] with minimal polynomial {k['minimal_polynomial']}")
    lines.append(f"char(R) = {d['char_R']}, char(k) = {d['char_k']}")
    return "\n".join(lines)


def cmd_units(args):
    R = build_ring(args.ring)
    dec = unit_decomposition(local_structure(R))
    out = {"ring": R.name, **dec.to_json(), "ok": dec.ok}
    return out, OK if dec.ok else FAIL


def render_units(d):
    factors = d["one_plus_M"]["invariant_factors"] + d["residue_units"]["invariant_factors"]
    group = " × ".join(f"Z/{f}" for f in factors) if factors else "1"
    elems = d["one_plus_M"]["elements"]
    shown = "{" + ",".join(elems) + "}" if len(elems) <= 16 else f"{len(elems)} elements"
    a, b = d["section_generator"]
    return f"R* ≅ {group}; 1+M = {shown}; section: {a} ↦ {b}"


def cmd_section(args):
    R = build_ring(args.ring)
    L = local_structure(R)
    if args.which == "units":
        if R.kind == "rational":
            raise LRUError("unit sections are computed for finite rings only")
        s = unit_section(L)
    else:
        s = coefficient_section(L)
    out = {"ring": R.name, **s.to_json()}
    if not s.found:
        return out, FAIL
    return out, OK if s.ok else FAIL


def render_section(d):
    if not d["found"]:
        return f"OBSTRUCTION: {d['obstruction']['message']} (Theorem: no ring section)"
    head = "ring section k → R" if d["kind"] == "ring-section" else "unit section k* → R*"
    checks = [k for k, v in d["transcript"].items() if isinstance(v, bool)]
    verified = all(d["transcript"][k] for k in checks)
    lines = [f"{head} ({'verified' if verified else 'FAILED'})"]
    lines += [f"  {a} ↦ {b}" for a, b in d["map"]]
    return "\n".join(lines)


def cmd_graded(args):
    R = build_ring(args.ring)
    L = local_structure(R)
    g = graded_units_iso(L, args.level)
    return {"ring": R.name, **g.to_json(R), "ok": g.ok}, OK if g.ok else FAIL


def render_graded(d):
    n = d["level"]
    return (f"level {n}: (1+M^{n})/(1+M^{n + 1}) → M^{n}/M^{n + 1}, 1+x ↦ x; order {d['domain_order']}; "
            f"≅ {format_group(d['invariant_factors'], ' × ') if d['invariant_factors'] else '0'}; "
            + ("verified" if d["ok"] else "FAILED: " + ", ".join(k for k, v in d["checks"].items() if not v)))


def cmd_ext(args):
    a, b = _ints(args.a), _ints(args.b)
    factors = ext1(a, b, f=args.a_free, g=args.b_free)
    return {"A": {"torsion": a, "free_rank": args.a_free}, "B": {"torsion": b, "free_rank": args.b_free},
            "ext1": factors, "group": format_group(factors)}, OK


def render_ext(d):
    return d["group"]


def cmd_snf(args):
    try:
        A = json.loads(args.matrix)
        if not (isinstance(A, list) and A and all(isinstance(r, list) for r in A)
                and len({len(r) for r in A}) == 1 and all(isinstance(x, int) for r in A for x in r)):
            raise ValueError
    except ValueError:
        raise LRUError("matrix must be a non-empty JSON array of equal-length integer rows") from None
    res = smith_normal_form(A)
    checks = verify_snf(A, res)
    return {"matrix": A, **res.to_json(), "diagonal": res.diagonal, "checks": checks}, \
        OK if all(checks.values()) else FAIL


def render_snf(d):
    return "\n".join(f"{k} = {json.dumps(d[k], separators=(',', ':'))}" for k in ("D", "U", "V"))


def cmd_counterexample(args):
    c = check_counterexample(args.case, p=args.p, N=args.level, q=args.q)
    out = c.to_json()
    if not c.ok:
        return out, FAIL
    return out, FAIL if c.verdict == "obstruction" else OK


def render_counterexample(d):
    data = d["data"]
    case = data["case"]
    if case == "Zloc-units":
        head = f"Zloc-units(p={data['p']}): Z_({data['p']})* → F_{data['p']}*"
        if d["verdict"] == "witness":
            m = ", ".join(f"{a} ↦ {b}" for a, b in data["section"].items())
            return f"{head} splits; section: {m}"
        return f"{head}: OBSTRUCTION: {data['obstruction']}"
    if case == "trunc-ring-section":
        head = f"trunc-ring-section({data['k']}): {data['domain']} → {data['codomain']}"
    else:
        head = f"padic-unit-section(p={data['p']}, N={data['N']}): {data['domain']} → {data['codomain']}"
    count = data.get("candidates", data.get("candidate_space"))
    if d["verdict"] == "obstruction":
        return f"{head}: OBSTRUCTION: no section; exhausted {count} candidates"
    return f"{head}: section found among {count} candidates"


def cmd_verify(args):
    corpus = load_corpus(args.corpus) if args.corpus else default_corpus()
    rep = run_suite(args.suite, corpus, args.seed)
    return rep, OK if rep["ok"] else FAIL


def render_verify(d):
    reports = d["suites"] if d["suite"] == "all" else [d]
    lines = []
    for r in reports:
        total = r["passed"] + len(r["failed"])
        lines.append(f"{r['suite']}: {'PASS' if r['ok'] else 'FAIL'} ({r['passed']}/{total})")
        lines += [f"  failed: {name}" for name in r["failed"]]
    if d["suite"] == "all":
        lines.append(f"all: {'PASS' if d['ok'] else 'FAIL'}")
    return "\n".join(lines)


def cmd_hensel(args):
    R = build_ring(args.ring)
    L = local_structure(R)
    poly = dsl.parse_poly(args.poly)
    if args.var in dsl.scope(R.spec):
        raise LRUError(f"polynomial variable '{args.var}' clashes with a ring variable")
    coeffs = R.poly_coefficients(poly, args.var)
    root = R.parse_element(args.root)
    if R.kind == "rational":
        h = hensel_lift(L, coeffs, root)
    else:
        h = hensel_lift(L, coeffs, L.projection(root))
    return {"ring": R.name, "polynomial": str(poly), **h.to_json(R)}, OK


def render_hensel(d):
    steps = d["steps"]
    uniq = {True: ", unique above the residue root", False: ", NOT unique", None: ""}[d["unique"]]
    return f"root: {d['root']} ({steps} Newton step{'s' if steps != 1 else ''}{uniq})"


def cmd_pullback(args):
    A, B, C = (build_ring(s) for s in (args.a, args.b, args.c))
    for X in (A, B, C):
        if X.kind == "rational":
            raise LRUError("pullbacks are built for finite rings only")
    f = hom_from_images(A, C, dict(zip(dsl.scope(A.spec), map(C.parse_element, _exprs(args.f)))))
    g = hom_from_images(B, C, dict(zip(dsl.scope(B.spec), map(C.parse_element, _exprs(args.g)))))
    for name, h in (("f", f), ("g", g)):
        rep = h.verify()
        if not rep["ok"]:
            raise LRUError(f"{name} does not preserve {rep['failure']}")
    fp = fiber_product(f, g)
    P = fp.ring
    out = {"A": A.name, "B": B.name, "C": C.name, **fp.to_json()}
    if P.order <= 64:
        out["elements"] = [P.fmt(x) for x in range(P.order)]
    M = jacobson_maximal(P)
    out["local"] = not isinstance(M, NotLocal)
    return out, OK


def _exprs(text):
    return [t for t in (text or "").split(",") if t.strip()]


def render_pullback(d):
    lines = [f"A ×_C B with A = {d['A']}, B = {d['B']}, C = {d['C']}", f"order: {d['order']}",
             f"local: {'yes' if d['local'] else 'no'}",
             f"f surjective: {'yes' if d['f_surjective'] else 'no'}",
             f"projection to B surjective: {'yes' if d['projection_to_b_surjective'] else 'no'}"]
    sq = d["kernel_square_zero"]
    lines.append("kernel of projection to B square zero: "
                 + ("n/a" if sq is None else "yes" if sq else "no"))
    if "elements" in d:
        lines.append("elements: " + ", ".join(d["elements"]))
    return "\n".join(lines)


COMMANDS = {
    "info": (cmd_info, render_info), "units": (cmd_units, render_units),
    "section": (cmd_section, render_section), "graded": (cmd_graded, render_graded),
    "ext": (cmd_ext, render_ext), "snf": (cmd_snf, render_snf),
    "counterexample": (cmd_counterexample, render_counterexample),
    "verify": (cmd_verify, render_verify), "hensel": (cmd_hensel, render_hensel),
    "pullback": (cmd_pullback, render_pullback),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit canonical JSON")
    common.add_argument("--config", help="JSON file supplying defaults for options")
    p = argparse.ArgumentParser(prog="lru", description="Splittings of finite and Artinian local rings.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", parents=[common], help="order, maximal ideal, residue field")
    s.add_argument("ring")
    s = sub.add_parser("units", parents=[common], help="R* = (1+M) x k* with its section")
    s.add_argument("ring")
    s = sub.add_parser("section", parents=[common], help="ring or unit section of R -> k")
    s.add_argument("which", choices=["ring", "units"])
    s.add_argument("ring")
    s = sub.add_parser("graded", parents=[common], help="(1+M^n)/(1+M^(n+1)) = M^n/M^(n+1)")
    s.add_argument("ring")
    s.add_argument("--level", type=int, default=None)
    s = sub.add_parser("ext", parents=[common], help="Ext^1 over Z of finitely generated groups")
    s.add_argument("--a", default="", help="torsion factors of A, comma separated")
    s.add_argument("--b", default="", help="torsion factors of B, comma separated")
    s.add_argument("--a-free", type=int, default=0, help="free rank of A")
    s.add_argument("--b-free", type=int, default=0, help="free rank of B")
    s = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    s.add_argument("--matrix", required=True, help='JSON array, e.g. "[[2,4],[6,8]]"')
    s = sub.add_parser("counterexample", parents=[common], help="non-splitting certificates")
    s.add_argument("case", choices=CASES)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--level", type=int, default=None, help="exponent N for padic-unit-section")
    s.add_argument("--q", type=int, default=None, help="residue field size for trunc-ring-section")
    s = sub.add_parser("verify", parents=[common], help="run a property suite over the corpus")
    s.add_argument("suite", choices=SUITES + ("all",))
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--corpus", default=None, help="path to a corpus manifest")
    s = sub.add_parser("hensel", parents=[common], help="lift a simple root through M")
    s.add_argument("ring")
    s.add_argument("--poly", required=True, help="monic polynomial in --var with ring coefficients")
    s.add_argument("--root", required=True, help="element of R reducing to the residue root")
    s.add_argument("--var", default="X")
    s = sub.add_parser("pullback", parents=[common], help="fiber product A x_C B")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("c")
    s.add_argument("--f", default="", help="images in C of the variables of A, comma separated")
    s.add_argument("--g", default="", help="images in C of the variables of B, comma separated")
    return p


DEFAULTS = {"seed": 42, "level": None}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                for k, v in json.load(fh).items():
                    if getattr(args, k, None) is None:
                        setattr(args, k, v)
        if getattr(args, "seed", 0) is None:
            args.seed = DEFAULTS["seed"]
        if args.command == "graded" and args.level is None:
            args.level = 1
        run, render = COMMANDS[args.command]
        payload, code = run(args)
    except (LRUError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return FAIL
    if args.json:
        print(dsl.canonical_json(payload), file=stdout)
    else:
        print(render(payload), file=stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
