"""Possible worlds, causal probabilities and the induced measure."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .asp import DEFAULT_NODE_BUDGET, enumerate_answer_sets
from .errors import (
    ConditionViolation, Inconsistent, NegativeDefault, ProbabilityUndefined,
)
from .grounding import GRandom, GroundProgram, ground
from .syntax import FAnd, FLit, FOr, Program
from .terms import FALSE, TRUE, Intervene, Lit, lit_key, satisfies

ProgramLike = Union[Program, GroundProgram]


def as_ground(p: ProgramLike) -> GroundProgram:
    return p if isinstance(p, GroundProgram) else ground(p)


def lit_value(lit: Lit) -> Any:
    """The value ``y`` of an atom literal ``a(t)=y``."""
    v = lit.atom.value
    if v is None:
        return TRUE if lit.positive else FALSE
    return v


@dataclass(frozen=True)
class PossibleWorld:
    literals: frozenset

    def __contains__(self, lit) -> bool:
        return lit in self.literals

    def __iter__(self):
        return iter(self.literals)

    @property
    def sigma(self) -> list:
        """Literals of the signature, without bookkeeping atoms."""
        return sorted((l for l in self.literals if l.is_sigma), key=lit_key)

    def show(self, all_literals: bool = False) -> str:
        lits = sorted(self.literals, key=lit_key) if all_literals else self.sigma
        return "{" + ", ".join(str(l) for l in lits) + "}"


def worlds_of(gp: GroundProgram, budget: int = DEFAULT_NODE_BUDGET) -> list:
    from .translate import translate
    return [PossibleWorld(s) for s in enumerate_answer_sets(translate(gp), budget)]


def possible_worlds(p: ProgramLike, budget: int = DEFAULT_NODE_BUDGET) -> list:
    return worlds_of(as_ground(p), budget)


@dataclass(frozen=True)
class Violation:
    condition: int
    message: str
    world: Optional[PossibleWorld] = None

    def __str__(self) -> str:
        where = f" in world {self.world.show()}" if self.world is not None else ""
        return f"condition {self.condition}: {self.message}{where}"


def check_conditions(p: ProgramLike, worlds: Optional[list] = None) -> list:
    """Violations of the three well-formedness conditions, one per offending pair."""
    gp = as_ground(p)
    if worlds is None:
        worlds = worlds_of(gp)
    out = []
    by_aterm: dict = {}
    for s in gp.randoms:
        by_aterm.setdefault(s.aterm, []).append(s)
    for aterm, sels in by_aterm.items():
        for i in range(len(sels)):
            for j in range(i + 1, len(sels)):
                s1, s2 = sels[i], sels[j]
                for w in worlds:
                    if satisfies(w, s1.body) and satisfies(w, s2.body):
                        out.append(Violation(
                            1, f"selection rules {s1} and {s2} both generate {aterm}", w))
                        break
    by_head: dict = {}
    for pr in gp.prs:
        by_head.setdefault((pr.rule, pr.head), []).append(pr)
    for (rule, head), prs in by_head.items():
        sels = [s for s in gp.selections_for(head.atom.aterm) if s.name == rule]
        for i in range(len(prs)):
            for j in range(i + 1, len(prs)):
                p1, p2 = prs[i], prs[j]
                hit = next((w for w in worlds for s in sels
                            if satisfies(w, s.body) and satisfies(w, p1.body)
                            and satisfies(w, p2.body)), None)
                if hit is not None:
                    out.append(Violation(2, f"{p1} and {p2} apply together", hit))
    for pr in gp.prs:
        y = lit_value(pr.head)
        block = Lit(Intervene(pr.aterm))
        for s in gp.selections_for(pr.aterm):
            if s.name != pr.rule or s.pred is None:
                continue
            hit = next((w for w in worlds
                        if satisfies(w, s.body) and satisfies(w, pr.body) and block not in w
                        and not gp.pred_holds(s.pred, y, w)), None)
            if hit is not None:
                out.append(Violation(3, f"{pr} applies while {s.pred}({y}) fails", hit))
                break
    return out


@dataclass(frozen=True)
class Outcome:
    """Possible values of one attribute term in a world and their probabilities."""

    rule: GRandom
    probs: dict
    assigned: frozenset


def outcomes(gp: GroundProgram, w) -> dict:
    """Map each attribute term active in ``w`` to its :class:`Outcome`."""
    out: dict = {}
    for sel in gp.randoms:
        if not satisfies(w, sel.body):
            continue
        if sel.aterm in out:
            raise ConditionViolation([Violation(1, f"two selection rules generate {sel.aterm}", None)])
        rng = gp.range_of(sel.aterm)
        possible = [y for y in rng if sel.pred is None or gp.pred_holds(sel.pred, y, w)]
        assigned: dict = {}
        if Lit(Intervene(sel.aterm)) not in w:
            for pr in gp.prs_for(sel):
                y = lit_value(pr.head)
                if y in possible and satisfies(w, pr.body):
                    if y in assigned:
                        raise ConditionViolation([Violation(2, f"two pr-atoms apply to {pr.head}", None)])
                    assigned[y] = pr.value
        alpha = sum(assigned.values(), Fraction(0))
        beta = len(possible) - len(assigned)
        if beta and alpha > 1:
            raise NegativeDefault(
                f"pr-atoms for {sel.aterm} sum to {alpha} leaving a negative default")
        default = (1 - alpha) / beta if beta else None
        probs = {y: assigned.get(y, default) for y in possible}
        out[sel.aterm] = Outcome(sel, probs, frozenset(assigned))
    return out


def causal_probability(p: ProgramLike, w, lit: Lit) -> Optional[Fraction]:
    """P(W, a(t)=y); ``None`` when the atom is not possible in ``w``."""
    gp = as_ground(p)
    o = outcomes(gp, w).get(lit.atom.aterm)
    if o is None:
        return None
    return o.probs.get(lit_value(lit))


def unnormalized(gp: GroundProgram, w) -> Fraction:
    m = Fraction(1)
    for aterm, o in outcomes(gp, w).items():
        for y, pv in o.probs.items():
            if gp.value_lit(aterm, y) in w:
                m *= pv
    return m


@dataclass
class WorldTable:
    worlds: list
    unnormalized: list
    total: Fraction
    measures: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.worlds)

    def rows(self):
        return zip(self.worlds, self.unnormalized, self.measures)

    def prob(self, f) -> Fraction:
        return sum((m for w, m in zip(self.worlds, self.measures) if truth(w, f) is True),
                   Fraction(0))

    def measure_of(self, lits) -> Fraction:
        """Measure of the unique world whose signature literals include ``lits``."""
        hits = [m for w, m in zip(self.worlds, self.measures) if all(l in w for l in lits)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} worlds contain {', '.join(map(str, lits))}")
        return hits[0]

    def to_dict(self, all_literals: bool = False) -> dict:
        rows = []
        for w, u, m in self.rows():
            lits = sorted(w.literals, key=lit_key) if all_literals else w.sigma
            rows.append({
                "literals": [str(l) for l in lits],
                "unnormalized": fraction_str(u),
                "measure": fraction_str(m),
            })
        return {"worlds": rows, "total": fraction_str(self.total)}


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


_TABLES: dict = {}


def measures(p: ProgramLike, budget: int = DEFAULT_NODE_BUDGET) -> WorldTable:
    """World table of ``p``; raises on violations, inconsistency or zero mass."""
    key = p if isinstance(p, Program) else None
    if key is not None and key in _TABLES:
        return _TABLES[key]
    gp = as_ground(p)
    worlds = worlds_of(gp, budget)
    if not worlds:
        raise Inconsistent("the program has no possible worlds")
    violations = check_conditions(gp, worlds)
    if violations:
        raise ConditionViolation(violations)
    mu = [unnormalized(gp, w) for w in worlds]
    total = sum(mu, Fraction(0))
    if total == 0:
        raise ProbabilityUndefined("every possible world has measure 0")
    table = WorldTable(worlds, mu, total, [m / total for m in mu])
    if key is not None:
        if len(_TABLES) > 512:
            _TABLES.clear()
        _TABLES[key] = table
    return table


def truth(w, f) -> Optional[bool]:
    """Three-valued truth: True, False, or None when undefined."""
    if isinstance(f, FLit):
        e = f.lit
        if e.naf:
            return e.lit not in w
        if e.lit in w:
            return True
        if e.lit.contrary in w:
            return False
        return None
    if isinstance(f, FAnd):
        vals = [truth(w, g) for g in f.items]
        if any(v is False for v in vals):
            return False
        return True if all(v is True for v in vals) else None
    if isinstance(f, FOr):
        vals = [truth(w, g) for g in f.items]
        if any(v is True for v in vals):
            return True
        return False if all(v is False for v in vals) else None
    raise TypeError(f"not a formula: {f!r}")


def to_formula(p: ProgramLike, f) -> Any:
    if isinstance(f, str):
        from .parser import parse_formula
        sig = p.signature if isinstance(p, Program) else p.sig
        return parse_formula(f, sig)
    if isinstance(f, Lit):
        from .syntax import conj
        return conj([f])
    return f


def prob(p: ProgramLike, f) -> Fraction:
    return measures(p).prob(to_formula(p, f))
