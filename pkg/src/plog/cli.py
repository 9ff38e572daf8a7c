"""Command-line front end: ``plog query|worlds|check|ground|import-bn|check-bn``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .asp import DEFAULT_NODE_BUDGET
from .bayes import (
    all_interventions, cbn_violations, engine_table, formula_table, load_net, plog_text,
    to_fraction,
)
from .coherency import coherency_verdict
from .errors import (
    ConditionViolation, DuplicateDeclaration, Inconsistent, NetError, PlogError,
    PlogSyntaxError, ProbabilityUndefined, ProgramError, RangeError, SortError, TypeMismatch,
)
from .grounding import DEFAULT_GROUND_CAP, ground
from .parser import parse_program
from .semantics import measures, to_formula
from .tableau import build_tableau
from .translate import dump
from .updates import apply_update, do_update, obs_update

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3
EXIT_UNDEFINED = 4
EXIT_VIOLATION = 5

_INPUT_ERRORS = (PlogSyntaxError, SortError, DuplicateDeclaration, ProgramError, RangeError,
                 TypeMismatch, NetError)


def decimal(x: Fraction) -> str:
    return f"{float(x):.6g}"


def show(x: Fraction) -> str:
    return f"{x} ({decimal(x)})"


def exit_code(e: BaseException) -> int:
    if isinstance(e, Inconsistent):
        return EXIT_INCONSISTENT
    if isinstance(e, ProbabilityUndefined):
        return EXIT_UNDEFINED
    if isinstance(e, ConditionViolation):
        return EXIT_VIOLATION
    if isinstance(e, _INPUT_ERRORS) or isinstance(e, OSError):
        return EXIT_INPUT
    return EXIT_ERROR


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_program(args):
    """Parse the program files and apply the inline updates in command-line order."""
    prog = parse_program(_read(args.files[0]))
    for path in args.files[1:]:
        prog = apply_update(prog, parse_program(_read(path), prog))
    for text in args.add or ():
        prog = apply_update(prog, text)
    if args.obs:
        prog = obs_update(prog, args.obs)
    if args.do:
        prog = do_update(prog, args.do)
    return prog


def _ground(args, prog):
    return ground(prog, args.max_ground)


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


def cmd_query(args) -> int:
    prog = load_program(args)
    gp = _ground(args, prog)
    table = measures(gp, args.max_nodes)
    p = table.prob(to_formula(gp, args.query))
    data = {"query": args.query, "probability": f"{p.numerator}/{p.denominator}",
            "decimal": decimal(p)}
    if args.show_worlds:
        data.update(table.to_dict(args.all_literals))
    text = show(p) + "\n"
    if args.show_worlds:
        text = _world_lines(table, args.all_literals) + text
    _emit(args, data, text)
    return EXIT_OK


def _world_lines(table, all_literals: bool) -> str:
    lines = []
    for k, (w, u, m) in enumerate(table.rows(), 1):
        lines.append(f"W{k}: {w.show(all_literals)}  unnormalized={u}  measure={show(m)}")
    return "\n".join(lines) + "\n"


def cmd_worlds(args) -> int:
    prog = load_program(args)
    gp = _ground(args, prog)
    table = measures(gp, args.max_nodes)
    text = _world_lines(table, args.all_literals) + f"{len(table)} worlds\n"
    _emit(args, table.to_dict(args.all_literals), text)
    return EXIT_OK


def cmd_check(args) -> int:
    prog = load_program(args)
    gp = _ground(args, prog)
    v = coherency_verdict(gp)
    data: dict = {"verdict": v.verdict, "leveling": str(v.leveling)}
    lines = [f"leveling: {v.leveling}"]
    if v.order is not None:
        viol = [str(x) for x in v.order.violations]
        data["causally_ordered"] = v.order.ok
        data["order_violations"] = viol
        lines.append(f"causally ordered: {'yes' if v.order.ok else 'no'}")
        lines.extend(f"  {x}" for x in viol)
    if v.unitary is not None:
        rows = []
        for sel, sc, clause in v.unitary.rows:
            rows.append({"rule": str(sel), "worlds": len(sc.worlds),
                         "assigned": str(sc.total), "clause": clause})
        data["unitary"] = v.unitary.ok
        data["unitary_rows"] = rows
        lines.append(f"unitary: {'yes' if v.unitary.ok else 'no'}")
        for r in rows:
            mark = f"clause {r['clause']}" if r["clause"] else "fails"
            lines.append(f"  {r['rule']}  [{r['worlds']} worlds, assigned {r['assigned']}]: {mark}")
    if v.semantic is not None:
        data["semantic"] = {"status": v.semantic.status, "message": v.semantic.message,
                            "checks": [str(c) for c in v.semantic.checks]}
        lines.append(f"semantic check: {v.semantic.status}"
                     + (f" ({v.semantic.message})" if v.semantic.message else ""))
        lines.extend(f"  {c}" for c in v.semantic.checks)
    lines.append(f"verdict: {v.verdict}")
    text = "\n".join(lines) + "\n"
    if args.tableau:
        lev = v.leveling if getattr(v.leveling, "ok", False) else None
        t = build_tableau(gp, lev)
        rendered = t.dot() if args.tableau == "dot" else t.text()
        data["tableau"] = rendered
        text += rendered
    _emit(args, data, text)
    return EXIT_OK


def cmd_ground(args) -> int:
    prog = load_program(args)
    gp = _ground(args, prog)
    if args.json:
        from .translate import translate
        rules = [str(r) for r in translate(gp).rules]
        _emit(args, {"rules": rules}, "")
    else:
        sys.stdout.write(dump(gp))
    return EXIT_OK


def cmd_import_bn(args) -> int:
    net = load_net(args.net)
    text = plog_text(net)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        _emit(args, {"program": text}, "")
    elif not args.output:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_intervention(text: str, net) -> dict:
    out: dict = {}
    if text.strip() in ("", "{}"):
        return out
    for part in text.split(","):
        if "=" not in part:
            raise NetError(f"intervention {part!r} is not of the form var=value")
        v, x = (s.strip() for s in part.split("=", 1))
        if v not in net.domains:
            raise NetError(f"unknown variable {v}")
        vals = {str(y): y for y in net.domains[v]}
        if x not in vals:
            raise NetError(f"{x} is not a value of {v}")
        out[v] = vals[x]
    return out


def _load_pstar(path: str, net) -> dict:
    """Interventional distribution file: a list of {"do": {...}, "table": {"v1,v2": p}}."""
    data = json.loads(_read(path))
    out = {}
    for entry in data:
        r = _parse_intervention(",".join(f"{k}={x}" for k, x in entry.get("do", {}).items()), net)
        dist = {}
        for key, p in entry["table"].items():
            parts = key.split(",")
            vals = tuple(next(y for y in net.domains[v] if str(y) == s.strip())
                         for v, s in zip(net.domains, parts))
            dist[vals] = to_fraction(p)
        out[tuple(r.items())] = dist
    if () not in out:
        raise NetError("the distribution file lacks the entry without interventions")
    return out


def cmd_check_bn(args) -> int:
    net = load_net(args.net)
    rs = ([_parse_intervention(t, net) for t in args.intervene]
          if args.intervene else all_interventions(net.domains))
    results = []
    lines = []
    ok = True
    for r in rs:
        eng, form = engine_table(net, r), formula_table(net, r)
        same = eng == form
        ok &= same
        name = "{" + ", ".join(f"{v}={x}" for v, x in r.items()) + "}"
        rows = {",".join(map(str, k)): str(p) for k, p in eng.items()}
        results.append({"do": {v: str(x) for v, x in r.items()}, "match": same, "table": rows})
        lines.append(f"do {name}: {'match' if same else 'MISMATCH'}  "
                     + "  ".join(f"{k}={p}" for k, p in rows.items()))
    data: dict = {"interventions": results, "ok": ok}
    if args.pstar:
        pstar = _load_pstar(args.pstar, net)
        viol = cbn_violations(net.domains, net.parents, pstar)
        data["compatible"] = not viol
        data["violations"] = [str(v) for v in viol]
        lines.append(f"graph compatible with the distribution: {'yes' if not viol else 'no'}")
        lines.extend(f"  {v}" for v in viol)
        ok &= not viol
    _emit(args, data, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def _program_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--obs", action="append", metavar="LIT", help="observe a literal (repeatable)")
    p.add_argument("--do", action="append", metavar="ATOM", help="perform an action (repeatable)")
    p.add_argument("--add", action="append", metavar="TEXT",
                   help="add statements given as program text (repeatable)")
    p.add_argument("--max-ground", type=int, default=DEFAULT_GROUND_CAP,
                   help="cap on ground statements")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_NODE_BUDGET,
                   help="search budget of the answer set solver")
    p.add_argument("--all-literals", action="store_true",
                   help="show bookkeeping literals in worlds")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plog", description="P-log interpreter")
    sub = ap.add_subparsers(dest="command", required=True)

    q = sub.add_parser("query", help="probability of a formula")
    q.add_argument("files", nargs="+", help="program files followed by the query formula")
    q.add_argument("--show-worlds", action="store_true")
    _program_args(q)
    q.set_defaults(func=cmd_query, split_query=True)

    w = sub.add_parser("worlds", help="possible worlds with their measures")
    w.add_argument("files", nargs="+")
    _program_args(w)
    w.set_defaults(func=cmd_worlds)

    c = sub.add_parser("check", help="coherency report")
    c.add_argument("files", nargs="+")
    c.add_argument("--tableau", choices=("text", "dot"))
    _program_args(c)
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("ground", help="print the translated ground program")
    g.add_argument("files", nargs="+")
    _program_args(g)
    g.set_defaults(func=cmd_ground)

    i = sub.add_parser("import-bn", help="translate a JSON Bayesian network into P-log")
    i.add_argument("net")
    i.add_argument("-o", "--output")
    i.add_argument("--json", action="store_true")
    i.set_defaults(func=cmd_import_bn)

    b = sub.add_parser("check-bn", help="compare program interventions with the product formula")
    b.add_argument("net")
    b.add_argument("--intervene", action="append", metavar="V=X,...",
                   help="intervention to check (repeatable; default all)")
    b.add_argument("--pstar", metavar="FILE",
                   help="interventional distribution to test the graph against")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_check_bn)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    # positionals may follow options (``query f.plog --obs x "q"``)
    args, extra = ap.parse_known_args(argv)
    if extra:
        if not hasattr(args, "files") or any(e.startswith("-") and len(e) > 1 for e in extra):
            ap.error(f"unrecognized arguments: {' '.join(extra)}")
        args.files.extend(extra)
    if getattr(args, "split_query", False):
        if len(args.files) < 2:
            ap.error("query needs a program file and a formula")
        args.query = args.files.pop()
    try:
        return args.func(args)
    except (PlogError, OSError) as e:
        code = exit_code(e)
        name = type(e).__name__
        if getattr(args, "json", False):
            sys.stdout.write(json.dumps({"error": name, "message": str(e), "exit": code},
                                        indent=2, sort_keys=True) + "\n")
        else:
            sys.stderr.write(f"plog: {name}: {e}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
