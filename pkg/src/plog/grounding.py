"""Grounding: instantiate variables over their sorts and evaluate builtins."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator, Optional

from .errors import (
    BudgetExceeded, ProgramError, SortError, TypeMismatch, UnboundedSort,
)
from .syntax import (
    DoStmt, EnumSpec, ObsStmt, PrAtom, Program, ProgramSpec, RandomSel, RangeSpec,
    Rule, Signature,
)
from .terms import (
    BOOLEAN, FALSE, TRUE, ATerm, BinOp, Cmp, ExtLit, Fn, Lit, SortAtom, Val, Var, term_key,
)

DEFAULT_GROUND_CAP = 1_000_000

_ARITH = {"+", "-", "*", "/", "mod"}
_COMPARE = {"=", "!=", "<", "<=", ">", ">="}


def builtin_eval(op: str, args: tuple) -> Any:
    """Evaluate an arithmetic operator or comparison on ground arguments."""
    a, b = args
    if op in ("=", "!="):
        return (a == b) == (op == "=")
    if not (isinstance(a, int) and isinstance(b, int)):
        raise TypeMismatch(f"{op} needs integer arguments, got {a} and {b}")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op in ("/", "mod"):
        if b == 0:
            raise TypeMismatch(f"{op} by zero")
        return a // b if op == "/" else a % b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise TypeMismatch(f"unknown builtin {op}")


def eval_term(t: Any, env: dict) -> Any:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, BinOp):
        return builtin_eval(t.op, (eval_term(t.left, env), eval_term(t.right, env)))
    if isinstance(t, Fn):
        return Fn(t.name, tuple(eval_term(a, env) for a in t.args))
    return t


def term_vars(t: Any, out: list) -> None:
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, BinOp):
        term_vars(t.left, out)
        term_vars(t.right, out)
    elif isinstance(t, Fn):
        for a in t.args:
            term_vars(a, out)


@dataclass(frozen=True)
class GRule:
    head: Optional[Lit]
    body: tuple
    src: int = field(default=-1, compare=False)

    def __str__(self) -> str:
        body = ", ".join(str(b) for b in self.body)
        if self.head is None:
            return f":- {body}."
        return f"{self.head} :- {body}." if body else f"{self.head}."


@dataclass(frozen=True)
class GRandom:
    name: Any
    aterm: ATerm
    pred: Optional[str]
    body: tuple
    src: int = field(default=-1, compare=False)

    @property
    def label(self) -> str:
        return str(self.name) if self.name is not None else f"random({self.aterm})"

    def __str__(self) -> str:
        prefix = f"[{self.name}] " if self.name is not None else ""
        inner = str(self.aterm) + (f" : {{X : {self.pred}(X)}}" if self.pred else "")
        body = ", ".join(str(b) for b in self.body)
        return f"{prefix}random({inner})" + (f" :- {body}." if body else ".")


@dataclass(frozen=True)
class GPr:
    rule: Any
    head: Lit
    body: tuple
    value: Fraction
    src: int = field(default=-1, compare=False)

    @property
    def aterm(self) -> ATerm:
        return self.head.atom.aterm

    def __str__(self) -> str:
        name = f"[{self.rule}]" if self.rule is not None else ""
        cond = " |c " + ", ".join(str(b) for b in self.body) if self.body else ""
        return f"pr{name}({self.head}{cond}) = {self.value}."


class GroundProgram:
    """A ground P-log program together with its evaluated signature."""

    def __init__(self, sig: Signature, members: dict, sort_facts: list):
        self.sig = sig
        self.members = members
        self.sort_facts = sort_facts
        self.rules: list = []
        self.randoms: list = []
        self.prs: list = []
        self.obs: list = []
        self.dos: list = []
        self.source: Optional[Program] = None

    def copy(self) -> "GroundProgram":
        g = GroundProgram(self.sig, self.members, self.sort_facts)
        g.rules, g.randoms, g.prs = list(self.rules), list(self.randoms), list(self.prs)
        g.obs, g.dos = list(self.obs), list(self.dos)
        return g

    def range_of(self, aterm: ATerm) -> list:
        a = self.sig.attrs[aterm.name]
        if a.is_boolean:
            return [TRUE, FALSE]
        return self.members[_range_key(a)]

    def value_lit(self, aterm: ATerm, value: Any) -> Lit:
        return self.sig.value_lit(aterm, value)

    def value_lits(self, aterm: ATerm) -> list:
        return [self.value_lit(aterm, y) for y in self.range_of(aterm)]

    def sort_member(self, sort: str, value: Any) -> bool:
        return value in self.members_set(sort)

    @lru_cache(maxsize=None)
    def members_set(self, sort: str) -> frozenset:
        return frozenset(self.members[sort])

    def pred_lit(self, pred: str, y: Any) -> Optional[Lit]:
        """Literal ``p(y)`` of a dynamic range, or ``None`` if ``p`` is a sort."""
        if pred in self.sig.sorts:
            return None
        a = self.sig.attrs[pred]
        if y not in self.members_set(a.params[0]):
            return None
        return Lit(Val(ATerm(pred, (y,))), True)

    def pred_holds(self, pred: str, y: Any, world) -> bool:
        if pred in self.sig.sorts:
            return self.sort_member(pred, y)
        lit = self.pred_lit(pred, y)
        return lit is not None and lit in world

    def aterms(self) -> list:
        """Attribute terms occurring in the program, in canonical order."""
        seen = set()

        def add_body(body):
            for e in body:
                seen.add(e.lit.atom.aterm)

        for r in self.rules:
            if r.head is not None:
                seen.add(r.head.atom.aterm)
            add_body(r.body)
        for s in self.randoms:
            seen.add(s.aterm)
            add_body(s.body)
            if s.pred is not None and s.pred not in self.sig.sorts:
                for y in self.range_of(s.aterm):
                    lit = self.pred_lit(s.pred, y)
                    if lit is not None:
                        seen.add(lit.atom.aterm)
        for p in self.prs:
            seen.add(p.aterm)
            add_body(p.body)
        for l, _ in self.obs:
            seen.add(l.atom.aterm)
        for l, _ in self.dos:
            seen.add(l.atom.aterm)
        return sorted(seen, key=lambda a: a.key)

    def selections_for(self, aterm: ATerm) -> list:
        return [s for s in self.randoms if s.aterm == aterm]

    def prs_for(self, sel: GRandom) -> list:
        return [p for p in self.prs if p.aterm == sel.aterm and p.rule == sel.name]

    def random_aterms(self) -> list:
        seen = {}
        for s in self.randoms:
            seen.setdefault(s.aterm, None)
        return list(seen)

    def statements(self) -> Iterator:
        yield from self.rules
        yield from self.randoms
        yield from self.prs

    def __str__(self) -> str:
        lines = [f"{s}({v})." for s, v in self.sort_facts]
        lines += [str(s) for s in self.statements()]
        lines += [f"obs({l})." for l, _ in self.obs]
        lines += [f"do({l})." for l, _ in self.dos]
        return "\n".join(lines) + ("\n" if lines else "")


def _range_key(a) -> str:
    return a.range if isinstance(a.range, str) else f"{a.name}$range"


# Sorts


def _eval_defining_program(name: str, spec: ProgramSpec, cap: int = 10_000) -> list:
    from .asp import GroundAspProgram, enumerate_answer_sets

    def consts(t, out):
        if isinstance(t, Fn):
            for a in t.args:
                consts(a, out)
        elif not isinstance(t, (Var, BinOp)):
            out.add(t)
        elif isinstance(t, BinOp):
            consts(t.left, out)
            consts(t.right, out)

    universe: set = set()
    for r in spec.rules:
        consts(r.head, universe)
        for b in r.body:
            if isinstance(b, Cmp):
                consts(b.left, universe)
                consts(b.right, universe)
            else:
                consts(b[0], universe)
    for _ in range(64):
        prog = GroundAspProgram()
        for r in spec.rules:
            vs: list = []
            term_vars(r.head, vs)
            for b in r.body:
                if isinstance(b, Cmp):
                    term_vars(b.left, vs)
                    term_vars(b.right, vs)
                else:
                    term_vars(b[0], vs)
            dom = sorted(universe, key=term_key)
            for combo in itertools.product(dom, repeat=len(vs)):
                env = dict(zip(vs, combo))
                try:
                    if not all(
                        builtin_eval(b.op, (eval_term(b.left, env), eval_term(b.right, env)))
                        for b in r.body if isinstance(b, Cmp)
                    ):
                        continue
                    head = eval_term(r.head, env)
                    pos = [Lit(eval_term(b[0], env)) for b in r.body if not isinstance(b, Cmp) and not b[1]]
                    neg = [Lit(eval_term(b[0], env)) for b in r.body if not isinstance(b, Cmp) and b[1]]
                except TypeMismatch:
                    continue
                prog.add([Lit(head)], pos, neg)
                if len(prog) > cap:
                    raise UnboundedSort(f"sort {name}: defining program grows beyond {cap} rules")
        answers = enumerate_answer_sets(prog)
        if len(answers) != 1:
            raise UnboundedSort(f"sort {name}: defining program has {len(answers)} answer sets")
        new = set(universe)
        for lit in answers[0]:
            consts(lit.atom, new)
        if new == universe:
            members = [
                l.atom.args[0] for l in answers[0]
                if isinstance(l.atom, Fn) and l.atom.name == name and len(l.atom.args) == 1
            ]
            return sorted(members, key=term_key)
        if len(new) > cap:
            raise UnboundedSort(f"sort {name}: universe exceeds {cap} terms")
        universe = new
    raise UnboundedSort(f"sort {name}: defining program does not stabilise")


def evaluate_sorts(sig: Signature) -> tuple:
    members: dict = {BOOLEAN: [TRUE, FALSE]}
    facts = []
    for name, decl in sig.sorts.items():
        spec = decl.spec
        if isinstance(spec, (EnumSpec, RangeSpec)):
            vals = spec.members()
        else:
            vals = _eval_defining_program(name, spec)
        dedup = list(dict.fromkeys(vals))
        members[name] = dedup
        facts.extend((name, v) for v in dedup)
    for a in sig.attrs.values():
        for p in a.params:
            if p not in members:
                raise SortError(f"attribute {a.name} uses undeclared sort {p}")
        if isinstance(a.range, EnumSpec):
            members[_range_key(a)] = list(dict.fromkeys(a.range.members()))
        elif a.range not in members:
            raise SortError(f"attribute {a.name} uses undeclared sort {a.range}")
    for v, s in sig.domains.items():
        if s not in members:
            raise SortError(f"#domain gives variable {v} the undeclared sort {s}")
    return members, facts


# Statements


class _Grounder:
    def __init__(self, program: Program, cap: int):
        self.program = program
        self.sig = program.signature
        self.members, facts = evaluate_sorts(self.sig)
        self.member_sets = {k: set(v) for k, v in self.members.items()}
        self.gp = GroundProgram(self.sig, self.members, facts)
        self.gp.source = program
        self.cap = cap
        self.count = 0

    def _hint_lit(self, lit: Lit, hints: dict) -> None:
        a = lit.atom
        sig = self.sig.attrs[a.aterm.name]
        for arg, sort in zip(a.aterm.args, sig.params):
            if isinstance(arg, Var):
                hints.setdefault(arg.name, sort)
        if isinstance(a.value, Var):
            hints.setdefault(a.value.name, _range_key(sig) if not sig.is_boolean else BOOLEAN)

    def _collect(self, stmt) -> tuple:
        """Variables in order of first occurrence and sort hints."""
        order: list = []
        hints: dict = {}

        def visit_lit(lit: Lit):
            self._hint_lit(lit, hints)
            for t in lit.atom.aterm.args:
                term_vars(t, order)
            if lit.atom.value is not None:
                term_vars(lit.atom.value, order)

        def visit_body(body):
            for b in body:
                if isinstance(b, ExtLit):
                    visit_lit(b.lit)
                elif isinstance(b, SortAtom):
                    if isinstance(b.arg, Var) and not b.naf:
                        hints.setdefault(b.arg.name, b.sort)
                    term_vars(b.arg, order)
                elif isinstance(b, Cmp):
                    term_vars(b.left, order)
                    term_vars(b.right, order)

        if isinstance(stmt, Rule):
            if stmt.head is not None:
                visit_lit(stmt.head)
            visit_body(stmt.body)
        elif isinstance(stmt, RandomSel):
            visit_lit(Lit(Val(stmt.aterm, None if self.sig.attrs[stmt.aterm.name].is_boolean else Var("$"))))
            visit_body(stmt.body)
            if stmt.name is not None:
                term_vars(stmt.name, order)
        elif isinstance(stmt, PrAtom):
            visit_lit(stmt.head)
            visit_body(stmt.body)
            if stmt.rule is not None:
                term_vars(stmt.rule, order)
        elif isinstance(stmt, (ObsStmt, DoStmt)):
            visit_lit(stmt.lit)
        order = [v for v in order if v != "$"]
        return order, hints

    def _domains(self, order, hints, stmt) -> list:
        doms = []
        for v in order:
            sort = self.sig.domains.get(v) or hints.get(v)
            if sort is None:
                raise SortError(f"cannot determine the sort of variable {v} in: {stmt}")
            doms.append(self.members[sort])
        return doms

    def _conditions(self, body) -> list:
        return [b for b in body if isinstance(b, (Cmp, SortAtom))]

    def _check_condition(self, c, env) -> bool:
        if isinstance(c, Cmp):
            return builtin_eval(c.op, (eval_term(c.left, env), eval_term(c.right, env)))
        inside = eval_term(c.arg, env) in self.member_sets[c.sort]
        return inside != c.naf

    def _substitutions(self, stmt, body) -> Iterator[dict]:
        order, hints = self._collect(stmt)
        doms = self._domains(order, hints, stmt)
        conds = self._conditions(body)
        cond_vars = []
        for c in conds:
            vs: list = []
            if isinstance(c, Cmp):
                term_vars(c.left, vs)
                term_vars(c.right, vs)
            else:
                term_vars(c.arg, vs)
            depth = max((order.index(v) for v in vs), default=-1)
            cond_vars.append(depth)
        by_depth: dict = {}
        for c, d in zip(conds, cond_vars):
            by_depth.setdefault(d, []).append(c)
        env: dict = {}

        for c in by_depth.get(-1, []):
            if not self._check_condition(c, env):
                return

        def rec(k):
            if k == len(order):
                yield dict(env)
                return
            for val in doms[k]:
                env[order[k]] = val
                if all(self._check_condition(c, env) for c in by_depth.get(k, [])):
                    yield from rec(k + 1)
            env.pop(order[k], None)

        yield from rec(0)

    def _tick(self) -> None:
        self.count += 1
        if self.count > self.cap:
            raise BudgetExceeded(f"grounding exceeded {self.cap} statements")

    def _ground_aterm(self, aterm: ATerm, env) -> Optional[ATerm]:
        args = tuple(eval_term(a, env) for a in aterm.args)
        sig = self.sig.attrs[aterm.name]
        for a, s in zip(args, sig.params):
            if a not in self.member_sets[s]:
                return None
        return ATerm(aterm.name, args)

    def _ground_lit(self, lit: Lit, env) -> Optional[Lit]:
        aterm = self._ground_aterm(lit.atom.aterm, env)
        if aterm is None:
            return None
        value = lit.atom.value
        if value is not None:
            value = eval_term(value, env)
            sig = self.sig.attrs[aterm.name]
            if value not in self.member_sets[_range_key(sig)]:
                return None
        return Lit(Val(aterm, value), lit.positive)

    def _ground_body(self, body, env) -> Optional[tuple]:
        out = []
        for b in body:
            if not isinstance(b, ExtLit):
                continue
            lit = self._ground_lit(b.lit, env)
            if lit is None:
                if b.naf:
                    continue
                return None
            out.append(ExtLit(lit, b.naf))
        return tuple(dict.fromkeys(out))

    def run(self) -> GroundProgram:
        gp = self.gp
        pending_prs = []
        for idx, stmt in enumerate(self.program.statements):
            if isinstance(stmt, Rule):
                for env in self._substitutions(stmt, stmt.body):
                    self._tick()
                    head = None
                    if stmt.head is not None:
                        head = self._ground_lit(stmt.head, env)
                        if head is None:
                            continue
                    body = self._ground_body(stmt.body, env)
                    if body is None:
                        continue
                    gp.rules.append(GRule(head, body, idx))
            elif isinstance(stmt, RandomSel):
                for env in self._substitutions(stmt, stmt.body):
                    self._tick()
                    aterm = self._ground_aterm(stmt.aterm, env)
                    body = self._ground_body(stmt.body, env)
                    if aterm is None or body is None:
                        continue
                    name = eval_term(stmt.name, env) if stmt.name is not None else None
                    gp.randoms.append(GRandom(name, aterm, stmt.pred, body, idx))
            elif isinstance(stmt, PrAtom):
                for env in self._substitutions(stmt, stmt.body):
                    self._tick()
                    head = self._ground_lit(stmt.head, env)
                    body = self._ground_body(stmt.body, env)
                    if head is None or body is None:
                        continue
                    name = eval_term(stmt.rule, env) if stmt.rule is not None else None
                    pending_prs.append((name, stmt.rule is not None, head, body, stmt.value, idx))
            elif isinstance(stmt, (ObsStmt, DoStmt)):
                for env in self._substitutions(stmt, ()):
                    self._tick()
                    lit = self._ground_lit(stmt.lit, env)
                    if lit is None:
                        raise SortError(f"ill-sorted literal in {stmt}")
                    target = gp.obs if isinstance(stmt, ObsStmt) else gp.dos
                    if (lit, idx) not in target:
                        target.append((lit, idx))
        gp.randoms = list(dict.fromkeys(gp.randoms))
        self._check_selection_names()
        gp.prs = list(dict.fromkeys(self._resolve_prs(pending_prs)))
        gp.rules = list(dict.fromkeys(gp.rules))
        return gp

    def _check_selection_names(self) -> None:
        by_aterm: dict = {}
        for s in self.gp.randoms:
            by_aterm.setdefault(s.aterm, []).append(s)
        for aterm, sels in by_aterm.items():
            if any(s.name is None for s in sels) and len({s.src for s in sels}) > 1:
                raise ProgramError(
                    f"random selection for {aterm} has no name but is not the only one"
                )

    def _resolve_prs(self, pending) -> list:
        out = []
        for name, explicit, head, body, value, idx in pending:
            aterm = head.atom.aterm
            sels = self.gp.selections_for(aterm)
            if explicit:
                if not any(s.name == name for s in sels):
                    raise ProgramError(f"pr-atom for {head} names unknown selection rule {name}")
            else:
                names = {s.name for s in sels}
                if not names:
                    raise ProgramError(f"pr-atom for {head}: {aterm} has no random selection rule")
                if len(names) > 1:
                    raise ProgramError(f"pr-atom for {head} must name one of several selection rules")
                name = names.pop()
            out.append(GPr(name, head, body, value, idx))
        return out


_CACHE: dict = {}


def ground(program: Program, max_statements: int = DEFAULT_GROUND_CAP) -> GroundProgram:
    key = (program, max_statements)
    gp = _CACHE.get(key)
    if gp is None:
        gp = _Grounder(program, max_statements).run()
        if len(_CACHE) > 256:
            _CACHE.clear()
        _CACHE[key] = gp
    return gp


def instance_count(program: Program, index: int) -> int:
    """Number of well-sorted substitutions for one statement, before builtin filtering."""
    g = _Grounder(program, DEFAULT_GROUND_CAP)
    stmt = program.statements[index]
    order, hints = g._collect(stmt)
    count = 1
    for d in g._domains(order, hints, stmt):
        count *= len(d)
    return count
