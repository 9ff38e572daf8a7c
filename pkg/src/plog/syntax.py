"""Abstract syntax of P-log programs, signatures and query formulas."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .errors import DuplicateDeclaration, SortError
from .terms import (
    BOOLEAN, FALSE, TRUE, ATerm, Cmp, ExtLit, Lit, SortAtom, Val, Var, term_str,
)


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class EnumSpec:
    """``{e1, ..., en}``; items are ground terms or :class:`IntRange`."""

    items: tuple

    def members(self) -> list:
        out = []
        for it in self.items:
            if isinstance(it, IntRange):
                out.extend(range(it.lo, it.hi + 1))
            else:
                out.append(it)
        return out

    def __str__(self) -> str:
        return "{" + ",".join(term_str(i) for i in self.items) + "}"


@dataclass(frozen=True)
class RangeSpec:
    lo: int
    hi: int

    def members(self) -> list:
        return list(range(self.lo, self.hi + 1))

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class DefRule:
    """Rule of a sort-defining normal program; atoms are plain terms."""

    head: Any
    body: tuple = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{term_str(self.head)}."
        parts = []
        for b in self.body:
            if isinstance(b, Cmp):
                parts.append(str(b))
            else:
                term, naf = b
                parts.append(("not " if naf else "") + term_str(term))
        return f"{term_str(self.head)} :- {', '.join(parts)}."


@dataclass(frozen=True)
class ProgramSpec:
    rules: tuple

    def __str__(self) -> str:
        return "#program { " + " ".join(str(r) for r in self.rules) + " }"


SortSpec = Union[EnumSpec, RangeSpec, ProgramSpec]


@dataclass(frozen=True)
class SortDecl:
    name: str
    spec: Any
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.name} = {self.spec}."


@dataclass(frozen=True)
class AttrDecl:
    names: tuple
    params: tuple
    range: Any
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        rng = str(self.range)
        if self.params:
            return f"{', '.join(self.names)} : {' * '.join(self.params)} -> {rng}."
        return f"{', '.join(self.names)} : {rng}."


@dataclass(frozen=True)
class DomainDecl:
    pairs: tuple
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return "#domain " + ", ".join(f"{s}({v})" for v, s in self.pairs) + "."


def _body_str(body) -> str:
    return ", ".join(str(b) for b in body)


@dataclass(frozen=True)
class Rule:
    head: Optional[Lit]
    body: tuple = ()
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        if self.head is None:
            return f":- {_body_str(self.body)}."
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {_body_str(self.body)}."


@dataclass(frozen=True)
class RandomSel:
    name: Any
    aterm: ATerm
    set_var: Optional[Var] = None
    pred: Optional[str] = None
    body: tuple = ()
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        prefix = f"[{term_str(self.name)}] " if self.name is not None else ""
        inner = str(self.aterm)
        if self.pred is not None:
            v = self.set_var.name if self.set_var else "X"
            inner += f" : {{{v} : {self.pred}({v})}}"
        s = f"{prefix}random({inner})"
        if self.body:
            s += f" :- {_body_str(self.body)}"
        return s + "."


@dataclass(frozen=True)
class PrAtom:
    rule: Any
    head: Lit
    body: tuple
    value: Fraction
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        name = f"[{term_str(self.rule)}]" if self.rule is not None else ""
        cond = f" |c {_body_str(self.body)}" if self.body else ""
        return f"pr{name}({self.head}{cond}) = {self.value}."


@dataclass(frozen=True)
class ObsStmt:
    lit: Lit
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"obs({self.lit})."


@dataclass(frozen=True)
class DoStmt:
    lit: Lit
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"do({self.lit})."


DECLARATIONS = (SortDecl, AttrDecl, DomainDecl)


@dataclass(frozen=True)
class AttrSig:
    name: str
    params: tuple
    range: Any

    @property
    def is_boolean(self) -> bool:
        return self.range == BOOLEAN


class Signature:
    """Sorts, attributes and variable domains collected from declarations."""

    def __init__(self):
        self.sorts: dict = {}
        self.attrs: dict = {}
        self.domains: dict = {}

    def add(self, decl) -> None:
        if isinstance(decl, SortDecl):
            if decl.name == BOOLEAN:
                raise DuplicateDeclaration("sort 'boolean' is builtin")
            old = self.sorts.get(decl.name)
            if old is not None and old.spec != decl.spec:
                raise DuplicateDeclaration(f"sort {decl.name} declared twice")
            self.sorts[decl.name] = decl
        elif isinstance(decl, AttrDecl):
            for n in decl.names:
                new = AttrSig(n, decl.params, decl.range)
                old = self.attrs.get(n)
                if old is not None and old != new:
                    raise DuplicateDeclaration(f"attribute {n} declared twice")
                self.attrs[n] = new
        elif isinstance(decl, DomainDecl):
            for v, s in decl.pairs:
                old = self.domains.get(v)
                if old is not None and old != s:
                    raise DuplicateDeclaration(f"variable {v} given two #domain sorts")
                self.domains[v] = s

    def is_attr(self, name: str, arity: int) -> bool:
        a = self.attrs.get(name)
        if a is None:
            return False
        if len(a.params) != arity:
            raise SortError(f"attribute {name} expects {len(a.params)} arguments, got {arity}")
        return True

    def is_boolean(self, aterm: ATerm) -> bool:
        return self.attrs[aterm.name].is_boolean

    def value_lit(self, aterm: ATerm, value) -> Lit:
        """The normalised literal for ``aterm = value``."""
        if self.is_boolean(aterm):
            if value == TRUE:
                return Lit(Val(aterm), True)
            if value == FALSE:
                return Lit(Val(aterm), False)
            raise SortError(f"boolean attribute {aterm} cannot take value {value}")
        return Lit(Val(aterm, value), True)


@dataclass(frozen=True)
class Program:
    statements: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "_sig", None)

    @property
    def signature(self) -> Signature:
        if self._sig is None:
            sig = Signature()
            for s in self.statements:
                if isinstance(s, DECLARATIONS):
                    sig.add(s)
            object.__setattr__(self, "_sig", sig)
        return self._sig

    def __add__(self, other: "Program") -> "Program":
        return Program(self.statements + tuple(other.statements))

    def without_actions(self) -> "Program":
        return Program(tuple(s for s in self.statements if not isinstance(s, (ObsStmt, DoStmt))))

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.statements) + ("\n" if self.statements else "")


def print_program(p: Program) -> str:
    return str(p)


# Query formulas


@dataclass(frozen=True)
class FLit:
    lit: ExtLit

    def __str__(self) -> str:
        return str(self.lit)


@dataclass(frozen=True)
class FAnd:
    items: tuple

    def __str__(self) -> str:
        return "(" + " & ".join(str(i) for i in self.items) + ")"


@dataclass(frozen=True)
class FOr:
    items: tuple

    def __str__(self) -> str:
        return "(" + " | ".join(str(i) for i in self.items) + ")"


Formula = Union[FLit, FAnd, FOr]


def conj(lits) -> Formula:
    """Conjunction of literals or extended literals; empty means true."""
    items = tuple(FLit(l if isinstance(l, ExtLit) else ExtLit(l)) for l in lits)
    return FAnd(items)


__all__ = [
    "IntRange", "EnumSpec", "RangeSpec", "ProgramSpec", "DefRule", "SortDecl", "AttrDecl",
    "DomainDecl", "Rule", "RandomSel", "PrAtom", "ObsStmt", "DoStmt", "Signature", "AttrSig",
    "Program", "print_program", "FLit", "FAnd", "FOr", "Formula", "conj", "SortAtom", "Cmp",
]
