"""Finite Bayesian networks: import into P-log and interventional checks."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .errors import NetError
from .parser import parse_program
from .semantics import measures
from .syntax import DoStmt, Program, conj
from .terms import FALSE, TRUE, ATerm

_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def to_fraction(x: Any) -> Fraction:
    """Exact value of ``"n/d"``, a decimal string, an int, or a float (read by its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise NetError(f"not a probability: {x!r}")
    if isinstance(x, float):
        return Fraction(repr(x))
    try:
        return Fraction(x)
    except (TypeError, ValueError):
        raise NetError(f"not a probability: {x!r}") from None


def _key(values) -> str:
    return ",".join(str(v) for v in values)


@dataclass
class BayesNet:
    """Variables with finite domains, parent lists and conditional probability tables.

    ``cpt[v]`` maps a tuple of parent values (in the order of ``parents[v]``)
    to a distribution over ``domains[v]``.
    """

    domains: dict
    parents: dict
    cpt: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    @property
    def variables(self) -> list:
        return list(self.domains)

    def validate(self) -> None:
        for v, dom in self.domains.items():
            if not _NAME.match(v):
                raise NetError(f"variable name {v!r} is not a lower-case identifier")
            if not dom:
                raise NetError(f"variable {v} has an empty domain")
            if len(set(dom)) != len(dom):
                raise NetError(f"variable {v} repeats a value")
            for x in dom:
                if not (isinstance(x, int) and not isinstance(x, bool)) and not (
                        isinstance(x, str) and _NAME.match(x)):
                    raise NetError(f"value {x!r} of {v} is neither an integer nor an identifier")
        for v in self.domains:
            for u in self.parents.get(v, ()):
                if u not in self.domains:
                    raise NetError(f"parent {u} of {v} is not a variable")
        self.order()
        for v in self.domains:
            rows = self.cpt.get(v)
            if rows is None:
                raise NetError(f"no table for {v}")
            for s in self.parent_assignments(v):
                dist = rows.get(s)
                if dist is None:
                    raise NetError(f"table of {v} lacks the row for parents {_key(s) or '()'}")
                if set(dist) - set(self.domains[v]):
                    raise NetError(f"table of {v} mentions values outside its domain")
                if any(p < 0 for p in dist.values()):
                    raise NetError(f"table of {v} has a negative entry")
                if sum(dist.values(), Fraction(0)) != 1:
                    raise NetError(f"row {_key(s) or '()'} of {v} sums to {sum(dist.values())}")

    def order(self) -> list:
        """Variables in a topological order, ties broken by declaration order."""
        out: list = []
        placed: set = set()
        pending = list(self.domains)
        while pending:
            ready = [v for v in pending if all(u in placed for u in self.parents.get(v, ()))]
            if not ready:
                raise NetError(f"the parent graph has a cycle through {', '.join(pending)}")
            v = ready[0]
            out.append(v)
            placed.add(v)
            pending.remove(v)
        return out

    def parent_assignments(self, v: str) -> list:
        pars = self.parents.get(v, ())
        return list(itertools.product(*(self.domains[u] for u in pars)))

    def assignments(self) -> list:
        """All total assignments as dicts, in the product order of the domains."""
        vs = self.variables
        return [dict(zip(vs, xs)) for xs in itertools.product(*(self.domains[v] for v in vs))]

    def cond(self, v: str, x, assignment: dict) -> Fraction:
        s = tuple(assignment[u] for u in self.parents.get(v, ()))
        return self.cpt[v][s].get(x, Fraction(0))

    def joint(self, assignment: dict) -> Fraction:
        out = Fraction(1)
        for v in self.variables:
            out *= self.cond(v, assignment[v], assignment)
        return out

    def is_boolean(self, v: str) -> bool:
        return set(self.domains[v]) == {TRUE, FALSE}

    def reversed(self, cpt: Optional[dict] = None) -> "BayesNet":
        """Same domains with every edge reversed (tables must be supplied)."""
        pars: dict = {v: [] for v in self.domains}
        for v, ps in self.parents.items():
            for u in ps:
                pars[u].append(v)
        return BayesNet(dict(self.domains), pars, cpt or {})


# JSON


def net_from_dict(data: dict) -> BayesNet:
    try:
        domains = {v: list(d) for v, d in data["variables"].items()}
        parents = {v: list(data.get("parents", {}).get(v, [])) for v in domains}
        cpt: dict = {}
        for v, rows in data["cpt"].items():
            if v not in domains:
                raise NetError(f"table for unknown variable {v}")
            table = {}
            lookup = {str(x): x for x in domains[v]}
            pdoms = [{str(x): x for x in domains[u]} for u in parents[v]]
            for key, dist in rows.items():
                parts = key.split(",") if key != "" else []
                if len(parts) != len(pdoms):
                    raise NetError(f"row key {key!r} of {v} does not match its parents")
                try:
                    s = tuple(d[p.strip()] for d, p in zip(pdoms, parts))
                    row = {lookup[str(x)]: to_fraction(p) for x, p in dist.items()}
                except KeyError as e:
                    raise NetError(f"table of {v}: unknown value {e.args[0]!r}") from None
                table[s] = row
            cpt[v] = table
    except (KeyError, AttributeError, TypeError) as e:
        raise NetError(f"malformed network description: {e}") from None
    return BayesNet(domains, parents, cpt)


def net_to_dict(b: BayesNet) -> dict:
    return {
        "variables": {v: list(d) for v, d in b.domains.items()},
        "parents": {v: list(b.parents.get(v, ())) for v in b.domains},
        "cpt": {
            v: {_key(s): {str(x): f"{p.numerator}/{p.denominator}" for x, p in dist.items()}
                for s, dist in b.cpt[v].items()}
            for v in b.domains
        },
    }


def load_net(path: str) -> BayesNet:
    with open(path) as fh:
        return net_from_dict(json.load(fh))


def dump_net(b: BayesNet) -> str:
    return json.dumps(net_to_dict(b), indent=2) + "\n"


# Translation into P-log


def _atom(b: BayesNet, v: str, x) -> str:
    if b.is_boolean(v):
        return v if x == TRUE else f"~{v}"
    return f"{v} = {x}"


def _frac(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def plog_text(b: BayesNet) -> str:
    """P-log source: a sort per domain, a random attribute per variable, a pr-atom per entry."""
    lines = []
    for v in b.order():
        if not b.is_boolean(v):
            lines.append(f"{v}_values = {{{', '.join(str(x) for x in b.domains[v])}}}.")
    for v in b.order():
        rng = "boolean" if b.is_boolean(v) else f"{v}_values"
        lines.append(f"{v} : {rng}.")
    for v in b.order():
        lines.append(f"random({v}).")
    for v in b.order():
        pars = b.parents.get(v, ())
        for s in b.parent_assignments(v):
            cond = ", ".join(_atom(b, u, y) for u, y in zip(pars, s))
            cond = f" |c {cond}" if cond else ""
            for x in b.domains[v]:
                p = b.cpt[v][s].get(x, Fraction(0))
                lines.append(f"pr({_atom(b, v, x)}{cond}) = {_frac(p)}.")
    return "\n".join(lines) + "\n"


def net_to_plog(b: BayesNet) -> Program:
    return parse_program(plog_text(b))


def joint_to_net(domains: dict, joint) -> BayesNet:
    """Full-prefix network of a joint distribution: x_i has parents x_1 .. x_{i-1}.

    ``joint`` maps value tuples (in the order of ``domains``) to probabilities.
    Rows whose prefix has probability 0 get the uniform distribution.
    """
    vs = list(domains)
    joint = {tuple(k): to_fraction(p) for k, p in dict(joint).items()}
    total = sum(joint.values(), Fraction(0))
    if total != 1 or any(p < 0 for p in joint.values()):
        raise NetError(f"joint distribution sums to {total}")
    parents = {v: vs[:i] for i, v in enumerate(vs)}
    cpt: dict = {}
    for i, v in enumerate(vs):
        table = {}
        for s in itertools.product(*(domains[u] for u in vs[:i])):
            mass = {x: Fraction(0) for x in domains[v]}
            for k, p in joint.items():
                if k[:i] == s:
                    mass[k[i]] += p
            z = sum(mass.values(), Fraction(0))
            if z == 0:
                n = len(domains[v])
                table[s] = {x: Fraction(1, n) for x in domains[v]}
            else:
                table[s] = {x: m / z for x, m in mass.items()}
        cpt[v] = table
    return BayesNet(dict(domains), parents, cpt)


# Interventions


def _consistent(r: dict, assignment: dict) -> bool:
    return all(assignment.get(v) == x for v, x in r.items())


def interventional_prob(b: BayesNet, r: dict, assignment: dict) -> Fraction:
    """P_r of a total assignment: the product over unmanipulated variables."""
    for v, x in r.items():
        if v not in b.domains or x not in b.domains[v]:
            raise NetError(f"intervention {v}={x} is outside the network")
    if not _consistent(r, assignment):
        return Fraction(0)
    out = Fraction(1)
    for v in b.variables:
        if v not in r:
            out *= b.cond(v, assignment[v], assignment)
    return out


def intervened_program(b: BayesNet, r: dict) -> Program:
    base = net_to_plog(b)
    sig = base.signature
    acts = tuple(DoStmt(sig.value_lit(ATerm(v), x)) for v, x in r.items())
    return base + Program(acts)


def engine_table(b: BayesNet, r: dict) -> dict:
    """P of every total assignment under the program of ``b`` with do(r)."""
    prog = intervened_program(b, r)
    table = measures(prog)
    sig = prog.signature
    out = {}
    for a in b.assignments():
        lits = [sig.value_lit(ATerm(v), x) for v, x in a.items()]
        out[tuple(a.values())] = table.prob(conj(lits))
    return out


def formula_table(b: BayesNet, r: dict) -> dict:
    return {tuple(a.values()): interventional_prob(b, r, a) for a in b.assignments()}


def check_cbn_theorem(b: BayesNet, r: Optional[dict] = None) -> bool:
    """Whether the program with do(r) reproduces the interventional product formula exactly."""
    r = r or {}
    return engine_table(b, r) == formula_table(b, r)


# Causal compatibility of a DAG with an interventional distribution


@dataclass(frozen=True)
class CbnViolation:
    condition: int
    intervention: tuple
    variable: str
    detail: str
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None

    def __str__(self) -> str:
        r = "{" + ", ".join(f"{v}={x}" for v, x in self.intervention) + "}"
        nums = f" (LHS {self.lhs}, RHS {self.rhs})" if self.lhs is not None else ""
        return f"condition {self.condition} under {r} for {self.variable}: {self.detail}{nums}"


def _marg(dist: dict, vs: list, fixed: dict) -> Fraction:
    idx = {v: i for i, v in enumerate(vs)}
    return sum((p for k, p in dist.items()
                if all(k[idx[u]] == x for u, x in fixed.items())), Fraction(0))


def _descendants(parents: dict, v: str) -> set:
    kids: dict = {u: [] for u in parents}
    for w, ps in parents.items():
        for u in ps:
            kids[u].append(w)
    out, stack = set(), [v]
    while stack:
        for w in kids[stack.pop()]:
            if w not in out:
                out.add(w)
                stack.append(w)
    return out


def cbn_violations(domains: dict, parents: dict, pstar: dict) -> list:
    """Conditions 1-3 for a DAG against an interventional distribution.

    ``pstar`` maps an intervention (a tuple of ``(variable, value)`` pairs,
    ``()`` for none) to a dict from value tuples (in the order of
    ``domains``) to probabilities.  Conditional probabilities whose condition
    has probability 0 are not compared.
    """
    vs = list(domains)
    base = {k: to_fraction(p) for k, p in pstar[()].items()}
    out = []
    for r_items, dist in pstar.items():
        dist = {k: to_fraction(p) for k, p in dist.items()}
        r = dict(r_items)
        for v in vs:
            pa = list(parents.get(v, ()))
            nd = [u for u in vs if u != v and u not in pa and u not in _descendants(parents, v)]
            for s in itertools.product(*(domains[u] for u in pa)):
                fs = dict(zip(pa, s))
                ps = _marg(dist, vs, fs)
                for t in itertools.product(*(domains[u] for u in nd)):
                    ft = dict(zip(nd, t))
                    pst = _marg(dist, vs, {**fs, **ft})
                    for x in domains[v]:
                        lhs = _marg(dist, vs, {**fs, **ft, v: x}) * ps
                        rhs = _marg(dist, vs, {**fs, v: x}) * pst
                        if lhs != rhs:
                            out.append(CbnViolation(
                                1, r_items, v, f"not independent of {', '.join(nd)} given parents"))
                            break
                    else:
                        continue
                    break
        for v, x in r.items():
            got = _marg(dist, vs, {v: x})
            if got != 1:
                out.append(CbnViolation(2, r_items, v, f"P({v}={x}) is {got}", got, Fraction(1)))
        for v in vs:
            if v in r:
                continue
            pa = list(parents.get(v, ()))
            for s in itertools.product(*(domains[u] for u in pa)):
                fs = dict(zip(pa, s))
                if not _consistent({u: r[u] for u in pa if u in r}, fs):
                    continue
                zr, z0 = _marg(dist, vs, fs), _marg(base, vs, fs)
                if zr == 0 or z0 == 0:
                    continue
                for x in domains[v]:
                    lhs = _marg(dist, vs, {**fs, v: x}) / zr
                    rhs = _marg(base, vs, {**fs, v: x}) / z0
                    if lhs != rhs:
                        given = ", ".join(f"{u}={y}" for u, y in fs.items())
                        out.append(CbnViolation(
                            3, r_items, v, f"P({v}={x} | {given}) changes", lhs, rhs))
    return out


def is_causal_network(domains: dict, parents: dict, pstar: dict) -> bool:
    return not cbn_violations(domains, parents, pstar)


def interventional_distribution(b: BayesNet, interventions=None) -> dict:
    """P* of ``b`` restricted to the given interventions (all of them by default)."""
    if interventions is None:
        interventions = all_interventions(b.domains)
    return {tuple(r.items()): formula_table(b, r) for r in map(dict, interventions)}


def all_interventions(domains: dict) -> list:
    vs = list(domains)
    out = []
    for choice in itertools.product(*([None] + list(domains[v]) for v in vs)):
        out.append({v: x for v, x in zip(vs, choice) if x is not None})
    return out
