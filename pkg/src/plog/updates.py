"""Updates by program union: observations, actions and new statements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import ProgramError
from .parser import parse_literal, parse_program
from .semantics import prob
from .syntax import DoStmt, ObsStmt, Program
from .terms import Lit, Val

OBS = "obs"
DO = "do"
STATEMENTS = "statements"


@dataclass(frozen=True)
class Update:
    """One of three kinds: an obs-set, a do-set, or a set of statements.

    ``items`` holds literals for the first two kinds and a :class:`Program`
    for the third.
    """

    kind: str
    items: Union[tuple, Program]

    def __post_init__(self):
        if self.kind not in (OBS, DO, STATEMENTS):
            raise ValueError(f"unknown update kind {self.kind!r}")
        if self.kind == DO:
            for lit in self.items:
                _check_atom(lit)

    @classmethod
    def obs(cls, lits: Iterable[Lit]) -> "Update":
        return cls(OBS, tuple(lits))

    @classmethod
    def do(cls, lits: Iterable[Lit]) -> "Update":
        return cls(DO, tuple(lits))

    @classmethod
    def statements(cls, program: Program) -> "Update":
        return cls(STATEMENTS, program)

    def as_program(self) -> Program:
        if self.kind == OBS:
            return Program(tuple(ObsStmt(l) for l in self.items))
        if self.kind == DO:
            return Program(tuple(DoStmt(l) for l in self.items))
        return self.items


def _check_atom(lit: Lit) -> None:
    # a(t)=false is the negative literal of a boolean atom but still an atom of the form a(t)=y
    if not isinstance(lit.atom, Val) or (not lit.positive and lit.atom.value is not None):
        raise ProgramError(f"do() takes atoms a(t)=y, not {lit}")


def apply_update(t: Program, u: Union[Update, Program, str]) -> Program:
    """Union of ``t`` with the update; statements already present are not repeated."""
    if isinstance(u, str):
        extra = parse_program(u, t)
    elif isinstance(u, Update):
        extra = u.as_program()
    else:
        extra = u
    seen = set(t.statements)
    fresh = []
    for s in extra.statements:
        if s not in seen:
            seen.add(s)
            fresh.append(s)
    result = Program(t.statements + tuple(fresh))
    result.signature  # surface DuplicateDeclaration now rather than at grounding
    return result


def _lits(t: Program, lits) -> list:
    return [parse_literal(l, t.signature) if isinstance(l, str) else l for l in lits]


def obs_update(t: Program, lits) -> Program:
    return apply_update(t, Update.obs(_lits(t, lits)))


def do_update(t: Program, atoms) -> Program:
    return apply_update(t, Update.do(_lits(t, atoms)))


def conditional_prob(t: Program, f, b) -> Fraction:
    """P(f | b), computed as the probability of ``f`` after observing ``b``."""
    return prob(obs_update(t, b), f)
