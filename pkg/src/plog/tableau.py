"""Tableaux: unitary trees whose leaves represent the possible worlds.

Each node is labelled with an atom ``a(t)=y`` (the root with ``true``) and
each arc with the causal probability of the atom it leads to.  Compatibility
and guarantee are answered against the answer sets of the translated program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .grounding import GRandom, GroundProgram
from .semantics import (
    ProgramLike, as_ground, fraction_str, lit_value, measures, worlds_of,
)
from .terms import ExtLit, Intervene, Lit, lit_key


class Queries:
    """Compatibility and guarantee of literal sets relative to a program."""

    def __init__(self, worlds):
        self.worlds = [w.literals if hasattr(w, "literals") else frozenset(w) for w in worlds]
        self._memo: dict = {}

    def _containing(self, path: frozenset) -> list:
        key = ("w", path)
        got = self._memo.get(key)
        if got is None:
            got = self._memo[key] = [w for w in self.worlds if path <= w]
        return got

    @staticmethod
    def _holds(w, body) -> bool:
        for e in body:
            lit = e.lit if isinstance(e, ExtLit) else e
            naf = isinstance(e, ExtLit) and e.naf
            if (lit in w) == naf:
                return False
        return True

    def compatible(self, path: frozenset, body) -> bool:
        return any(self._holds(w, body) for w in self._containing(path))

    def guarantees(self, path: frozenset, body) -> bool:
        ws = self._containing(path)
        return bool(ws) and all(self._holds(w, body) for w in ws)

    def decides(self, path: frozenset, body) -> bool:
        return self.guarantees(path, body) or not self.compatible(path, body)

    def guaranteed(self, path: frozenset) -> Optional[frozenset]:
        """All literals guaranteed by ``path``; ``None`` if nothing contains it."""
        ws = self._containing(path)
        if not ws:
            return None
        return frozenset.intersection(*ws)


@dataclass(eq=False)
class Node:
    label: Optional[Lit]
    arc: Optional[Fraction]
    pv: Fraction
    path: frozenset
    parent: Optional["Node"] = None
    children: list = field(default_factory=list)
    branch: Optional[GRandom] = None
    world: Optional[frozenset] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self) -> list:
        return [n for n in self.walk() if n.is_leaf]

    def path_labels(self) -> list:
        """p_T(n): labels from the root to this node, root label ``true`` first."""
        out = []
        n = self
        while n is not None:
            out.append("true" if n.label is None else str(n.label))
            n = n.parent
        return list(reversed(out))

    def __str__(self) -> str:
        return "true" if self.label is None else str(self.label)


def _pred_body(gp: GroundProgram, sel: GRandom, y) -> Optional[tuple]:
    """Condition p(y) as a body; ``()`` when it always holds, ``None`` when never."""
    if sel.pred is None:
        return ()
    if sel.pred in gp.sig.sorts:
        return () if gp.sort_member(sel.pred, y) else None
    lit = gp.pred_lit(sel.pred, y)
    return None if lit is None else (ExtLit(lit),)


def ready_to_branch(gp: GroundProgram, q: Queries, path: frozenset, sel: GRandom) -> bool:
    """Whether a node with path set ``path`` is ready to branch on ``sel.aterm`` via ``sel``."""
    a = sel.aterm
    if any(l.atom.aterm == a for l in path):
        return False
    if not q.guarantees(path, sel.body):
        return False
    for pr in gp.prs_for(sel):
        if not q.decides(path, pr.body):
            return False
    if sel.pred is not None:
        some = False
        for y in gp.range_of(a):
            body = _pred_body(gp, sel, y)
            if body is None:
                continue
            if q.guarantees(path, body):
                some = True
            elif q.compatible(path, body):
                return False
        if not some:
            return False
    return True


def arc_labels(gp: GroundProgram, q: Queries, path: frozenset, sel: GRandom) -> dict:
    """v(n, a(t), y) for every y compatible with the path."""
    a = sel.aterm
    possible = [y for y in gp.range_of(a)
                if (b := _pred_body(gp, sel, y)) is not None and q.guarantees(path, b)]
    block = (ExtLit(Lit(Intervene(a)), True),)
    assigned: dict = {}
    for pr in gp.prs_for(sel):
        y = lit_value(pr.head)
        if y in possible and q.guarantees(path, tuple(pr.body) + block):
            assigned[y] = pr.value
    alpha = sum(assigned.values(), Fraction(0))
    beta = len(possible) - len(assigned)
    default = (1 - alpha) / beta if beta else None
    out = {}
    for y in gp.range_of(a):
        lit = gp.value_lit(a, y)
        if q.compatible(path | {lit}, ()):
            out[y] = assigned.get(y, default)
    return out


@dataclass
class Tableau:
    root: Node
    program: GroundProgram
    order: tuple

    def nodes(self) -> list:
        return list(self.root.walk())

    def leaves(self) -> list:
        return self.root.leaves()

    def is_unitary(self) -> bool:
        return all(sum((c.arc for c in n.children), Fraction(0)) == 1
                   for n in self.root.walk() if n.children)

    def lemma_holds(self) -> bool:
        """Leaf path values below every node sum to that node's path value."""
        return all(sum((l.pv for l in n.leaves()), Fraction(0)) == n.pv
                   for n in self.root.walk())

    def represents(self, worlds) -> bool:
        """Leaves and possible worlds correspond one to one."""
        ws = [w.literals if hasattr(w, "literals") else frozenset(w) for w in worlds]
        got = [l.world for l in self.leaves()]
        return (all(g is not None for g in got) and len(set(got)) == len(got)
                and set(got) == set(ws) and len(ws) == len(got))

    def leaf_table(self) -> dict:
        """Signature literals of each leaf's world mapped to its path value."""
        out = {}
        for l in self.leaves():
            if l.world is None:
                continue
            key = frozenset(x for x in l.world if x.is_sigma)
            out[key] = out.get(key, Fraction(0)) + l.pv
        return out

    def text(self) -> str:
        lines = []

        def rec(n, depth):
            arc = "" if n.arc is None else f"  [{fraction_str(n.arc)}]"
            lines.append(f"{'  ' * depth}{n}{arc}  pv={fraction_str(n.pv)}")
            for c in n.children:
                rec(c, depth + 1)

        rec(self.root, 0)
        return "\n".join(lines) + "\n"

    def dot(self) -> str:
        ids = {id(n): f"n{k}" for k, n in enumerate(self.root.walk())}
        lines = ["digraph tableau {"]
        for n in self.root.walk():
            label = str(n).replace('"', '\\"')
            lines.append(f'  {ids[id(n)]} [label="{label}"];')
        for n in self.root.walk():
            for c in n.children:
                lines.append(f'  {ids[id(n)]} -> {ids[id(c)]} [label="{fraction_str(c.arc)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_tableau(p: ProgramLike, lev=None, worlds=None) -> Tableau:
    """Expand a seed until no leaf is ready to branch.

    Random attribute terms are tried in the order of ``lev`` (or of their
    selection rules when no leveling is given).
    """
    gp = as_ground(p)
    if lev is not None and getattr(lev, "ok", False):
        order = tuple(lev.order)
    else:
        seen: dict = {}
        for s in gp.randoms:
            seen.setdefault(s.aterm, None)
        order = tuple(seen)
    sels: dict = {}
    for s in gp.randoms:
        sels.setdefault(s.aterm, []).append(s)
    q = Queries(worlds if worlds is not None else worlds_of(gp))
    root = Node(None, None, Fraction(1), frozenset())
    stack = [root]
    while stack:
        n = stack.pop()
        chosen = None
        for a in order:
            chosen = next((s for s in sels[a] if ready_to_branch(gp, q, n.path, s)), None)
            if chosen is not None:
                break
        if chosen is None:
            n.world = q.guaranteed(n.path)
            continue
        n.branch = chosen
        for y, v in arc_labels(gp, q, n.path, chosen).items():
            lit = gp.value_lit(chosen.aterm, y)
            child = Node(lit, v, n.pv * v, n.path | {lit}, parent=n)
            n.children.append(child)
        stack.extend(reversed(n.children))
    return Tableau(root, gp, order)


def cross_check(p: ProgramLike, tableau: Optional[Tableau] = None) -> list:
    """Differences between leaf path values and unnormalized world measures; empty when they agree.

    For a unitary tableau the unnormalized measures sum to 1 and are the measures.
    """
    gp = as_ground(p)
    if tableau is None:
        tableau = build_tableau(gp)
    table = measures(gp)
    expected = {frozenset(w.sigma): u for w, u, _ in table.rows()}
    got = tableau.leaf_table()
    problems = []
    for k in sorted(set(expected) | set(got), key=lambda s: sorted(lit_key(l) for l in s)):
        if expected.get(k) != got.get(k):
            shown = "{" + ", ".join(str(l) for l in sorted(k, key=lit_key)) + "}"
            problems.append(f"{shown}: tableau {got.get(k)} vs unnormalized measure {expected.get(k)}")
    if len(tableau.leaves()) != len(table.worlds):
        problems.append(f"{len(tableau.leaves())} leaves for {len(table.worlds)} worlds")
    return problems


__all__ = ["Queries", "Node", "Tableau", "ready_to_branch", "arc_labels", "build_tableau",
           "cross_check"]
