"""Terms, attribute terms and literals.

Ground terms are plain Python values: ``int`` for integers, ``str`` for
symbolic constants and :class:`Fn` for compound terms.  Non-ground terms may
also contain :class:`Var` and :class:`BinOp` nodes.

A literal is ``Lit(atom, positive)``.  The same class serves P-log literals
and the literals of the translated answer set program, so that possible
worlds can be inspected with P-log literals directly.  Boolean attributes are
normalised at resolution time: ``a(t)=true`` becomes ``Lit(Val(a(t)), True)``
and ``a(t)=false`` becomes ``Lit(Val(a(t)), False)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Hashable, Union

TRUE = "true"
FALSE = "false"
BOOLEAN = "boolean"


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.name}({','.join(term_str(a) for a in self.args)})"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any

    def __str__(self) -> str:
        op = f" {self.op} " if self.op == "mod" else self.op
        return f"({term_str(self.left)}{op}{term_str(self.right)})"


Term = Union[int, str, Fn]


def term_str(t: Any) -> str:
    return str(t)


def term_key(t: Any) -> tuple:
    """Total order on ground terms: integers, then constants, then compounds."""
    if isinstance(t, bool):
        raise TypeError("booleans are not terms")
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, str):
        return (1, t)
    if isinstance(t, Fn):
        return (2, t.name, tuple(term_key(a) for a in t.args))
    return (3, str(t))


def is_ground(t: Any) -> bool:
    if isinstance(t, (Var, BinOp)):
        return False
    if isinstance(t, Fn):
        return all(is_ground(a) for a in t.args)
    return True


@dataclass(frozen=True)
class ATerm:
    """An attribute applied to arguments, ``a(t1,...,tn)``."""

    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(term_str(a) for a in self.args)})"

    @cached_property
    def key(self) -> tuple:
        return (self.name, tuple(term_key(a) for a in self.args))


@dataclass(frozen=True)
class Val:
    """The atom ``a(t)=value``; ``value`` is ``None`` for boolean attributes."""

    aterm: ATerm
    value: Any = None

    def __str__(self) -> str:
        if self.value is None:
            return str(self.aterm)
        return f"{self.aterm}={term_str(self.value)}"

    def asp(self) -> str:
        if self.value is None:
            return str(self.aterm)
        args = [term_str(a) for a in self.aterm.args] + [term_str(self.value)]
        return f"{self.aterm.name}({','.join(args)})"

    @cached_property
    def key(self) -> tuple:
        v = (-1,) if self.value is None else term_key(self.value)
        return (0, self.aterm.key, v)


@dataclass(frozen=True)
class Intervene:
    aterm: ATerm

    def asp(self) -> str:
        return f"intervene({self.aterm})"

    __str__ = asp

    @cached_property
    def key(self) -> tuple:
        return (1, self.aterm.key)


@dataclass(frozen=True)
class Obs:
    lit: "Lit"

    def asp(self) -> str:
        return f"obs({self.lit.asp()})"

    __str__ = asp

    @cached_property
    def key(self) -> tuple:
        return (2, self.lit.key)


@dataclass(frozen=True)
class Do:
    lit: "Lit"

    def asp(self) -> str:
        return f"do({self.lit.asp()})"

    __str__ = asp

    @cached_property
    def key(self) -> tuple:
        return (3, self.lit.key)


@dataclass(frozen=True)
class SortFact:
    sort: str
    value: Any

    def asp(self) -> str:
        return f"{self.sort}({term_str(self.value)})"

    __str__ = asp

    @cached_property
    def key(self) -> tuple:
        return (4, self.sort, term_key(self.value))


def atom_key(a: Hashable) -> tuple:
    key = getattr(a, "key", None)
    if key is not None:
        return key
    return (5, str(a))


def atom_asp(a: Hashable) -> str:
    f = getattr(a, "asp", None)
    return f() if f is not None else str(a)


@dataclass(frozen=True)
class Lit:
    atom: Any
    positive: bool = True

    def __neg__(self) -> "Lit":
        return Lit(self.atom, not self.positive)

    @property
    def contrary(self) -> "Lit":
        return Lit(self.atom, not self.positive)

    def __str__(self) -> str:
        a = self.atom
        if isinstance(a, Val):
            if self.positive:
                return str(a)
            if a.value is None:
                return f"~{a.aterm}"
            return f"{a.aterm}!={term_str(a.value)}"
        return str(a) if self.positive else f"-{a}"

    def asp(self) -> str:
        s = atom_asp(self.atom)
        return s if self.positive else f"-{s}"

    @cached_property
    def key(self) -> tuple:
        return (atom_key(self.atom), not self.positive)

    @property
    def is_sigma(self) -> bool:
        return isinstance(self.atom, Val)


def lit_key(lit: Lit) -> tuple:
    return lit.key


@dataclass(frozen=True)
class ExtLit:
    """A literal or its default negation ``not l``."""

    lit: Lit
    naf: bool = False

    def __str__(self) -> str:
        return f"not {self.lit}" if self.naf else str(self.lit)

    def asp(self) -> str:
        return f"not {self.lit.asp()}" if self.naf else self.lit.asp()


@dataclass(frozen=True)
class Cmp:
    """Builtin comparison, evaluated away during grounding."""

    op: str
    left: Any
    right: Any

    def __str__(self) -> str:
        return f"{term_str(self.left)}{self.op}{term_str(self.right)}"


@dataclass(frozen=True)
class SortAtom:
    """Sort membership test ``c(t)``, evaluated during grounding."""

    sort: str
    arg: Any
    naf: bool = False

    def __str__(self) -> str:
        s = f"{self.sort}({term_str(self.arg)})"
        return f"not {s}" if self.naf else s


def satisfies(world, body) -> bool:
    """Whether a set of literals satisfies a collection of extended literals."""
    for e in body:
        if e.naf:
            if e.lit in world:
                return False
        elif e.lit not in world:
            return False
    return True
