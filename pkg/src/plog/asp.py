"""Answer set kernel for ground disjunctive programs with classical negation.

Enumeration is a backtracking search over literal truth values.  Propagation
uses rule satisfaction, supportedness and consistency; every total candidate
is then verified against the reduct, so propagation only prunes.  An
independent brute-force enumerator is provided for cross-checking.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import BudgetExceeded, PlogSyntaxError, UniverseTooLarge
from .terms import Lit, lit_key

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class AspRule:
    head: tuple = ()
    pos: tuple = ()
    neg: tuple = ()

    def literals(self) -> Iterable[Lit]:
        yield from self.head
        yield from self.pos
        yield from self.neg

    def __str__(self) -> str:
        head = " | ".join(l.asp() for l in self.head)
        body = [l.asp() for l in self.pos] + [f"not {l.asp()}" for l in self.neg]
        if not body:
            return f"{head}."
        if not head:
            return f":- {', '.join(body)}."
        return f"{head} :- {', '.join(body)}."


@dataclass
class GroundAspProgram:
    rules: list = field(default_factory=list)

    def literals(self) -> list:
        seen = set()
        for r in self.rules:
            seen.update(r.literals())
        return sorted(seen, key=lit_key)

    def add(self, head=(), pos=(), neg=()) -> None:
        self.rules.append(AspRule(tuple(head), tuple(pos), tuple(neg)))

    def extended(self, facts: Iterable[Lit]) -> "GroundAspProgram":
        return GroundAspProgram(self.rules + [AspRule((l,)) for l in facts])

    def dump(self) -> str:
        return "\n".join(str(r) for r in self.rules) + ("\n" if self.rules else "")

    def __len__(self) -> int:
        return len(self.rules)


def is_consistent(s) -> bool:
    return not any(l.contrary in s for l in s if l.positive)


def satisfies(p: GroundAspProgram, s) -> bool:
    """Whether ``s`` is closed under every rule of ``p``."""
    for r in p.rules:
        if all(l in s for l in r.pos) and not any(l in s for l in r.neg):
            if not any(l in s for l in r.head):
                return False
    return True


def reduct(p: GroundAspProgram, s) -> GroundAspProgram:
    rules = [AspRule(r.head, r.pos, ()) for r in p.rules if not any(l in s for l in r.neg)]
    return GroundAspProgram(rules)


def _model_within(red, allowed, m) -> bool:
    """Search for a model of positive rules ``red`` containing ``m`` inside ``allowed``."""
    m = set(m)
    changed = True
    while changed:
        changed = False
        for heads, pos in red:
            if all(x in m for x in pos):
                avail = [h for h in heads if h in allowed]
                if any(h in m for h in avail):
                    continue
                if not avail:
                    return False
                if len(avail) == 1:
                    m.add(avail[0])
                    changed = True
    for heads, pos in red:
        if all(x in m for x in pos) and not any(h in m for h in heads):
            avail = [h for h in heads if h in allowed]
            for h in avail:
                if _model_within(red, allowed, m | {h}):
                    return True
            return False
    return True


def _reduct_closure(red, s):
    """Least closure forced inside ``s``; second value tells whether a choice was left open."""
    m = set()
    changed = True
    while changed:
        changed = False
        for heads, pos in red:
            if all(x in m for x in pos):
                avail = [h for h in heads if h in s]
                if any(h in m for h in avail):
                    continue
                if len(avail) == 1:
                    m.add(avail[0])
                    changed = True
    open_choice = any(
        all(x in m for x in pos) and not any(h in m for h in heads) for heads, pos in red
    )
    return m, open_choice


def _is_minimal(rules, s) -> bool:
    """``rules`` are (head, pos, neg) triples and ``s`` is a model of them."""
    red = []
    for head, pos, neg in rules:
        if any(x in s for x in neg) or not all(x in s for x in pos):
            continue
        red.append((tuple(h for h in head if h in s), tuple(pos)))
    m, open_choice = _reduct_closure(red, s)
    if not open_choice:
        return m == s
    for x in s:
        if _model_within(red, s - {x}, ()):
            return False
    return True


def is_answer_set(p: GroundAspProgram, s) -> bool:
    s = frozenset(s)
    if not is_consistent(s) or not satisfies(p, s):
        return False
    return _is_minimal([(r.head, r.pos, r.neg) for r in p.rules], s)


def _sorted_sets(sets) -> list:
    return sorted(sets, key=lambda s: [lit_key(l) for l in sorted(s, key=lit_key)])


class _Solver:
    UNDEF, TRUE, FALSE = 0, 1, 2

    def __init__(self, p: GroundAspProgram, budget: int):
        self.lits = p.literals()
        idx = {l: i for i, l in enumerate(self.lits)}
        n = len(self.lits)
        self.comp = [idx.get(l.contrary, -1) for l in self.lits]
        self.rules = []
        for r in p.rules:
            self.rules.append((
                tuple(idx[l] for l in r.head),
                tuple(idx[l] for l in r.pos),
                tuple(idx[l] for l in r.neg),
            ))
        self.occ = [[] for _ in range(n)]
        self.head_of = [[] for _ in range(n)]
        self.pos_of = [[] for _ in range(n)]
        self.neg_of = [[] for _ in range(n)]
        for ri, (h, pos, neg) in enumerate(self.rules):
            for x in set(h) | set(pos) | set(neg):
                self.occ[x].append(ri)
            for x in set(h):
                self.head_of[x].append(ri)
            for x in set(pos):
                self.pos_of[x].append(ri)
            for x in set(neg):
                self.neg_of[x].append(ri)
        disj = {x for h, _, _ in self.rules if len(h) > 1 for x in h}
        self.order = sorted(range(n), key=lambda i: (i not in disj, i))
        self.val = [0] * n
        self.body_false = [0] * len(self.rules)
        self.heads_true = [0] * len(self.rules)
        self.watch: list = [[] for _ in range(n)]
        self.trail: list = []
        self.queue: list = []
        self.budget = budget
        self.nodes = 0

    def _set(self, x: int, v: int) -> bool:
        cur = self.val[x]
        if cur == v:
            return True
        if cur:
            return False
        self.val[x] = v
        self.trail.append(x)
        self.queue.append(x)
        self._count(x, v, 1)
        return True

    def _count(self, x: int, v: int, d: int) -> None:
        bf = self.body_false
        if v == 2:
            for ri in self.pos_of[x]:
                bf[ri] += d
        else:
            for ri in self.neg_of[x]:
                bf[ri] += d
            ht = self.heads_true
            for ri in self.head_of[x]:
                ht[ri] += d

    def _supports(self, ri: int, x: int) -> bool:
        if self.body_false[ri]:
            return False
        t = self.heads_true[ri]
        return t == 0 or (t == 1 and self.val[x] == 1)

    def _check_rule(self, ri: int) -> bool:
        val = self.val
        head, pos, neg = self.rules[ri]
        undecided = []
        for x in pos:
            v = val[x]
            if v == 2:
                return True
            if v == 0:
                undecided.append((x, 2))
        for x in neg:
            v = val[x]
            if v == 1:
                return True
            if v == 0:
                undecided.append((x, 1))
        open_heads = []
        for x in head:
            v = val[x]
            if v == 1:
                return True
            if v == 0:
                open_heads.append(x)
        if not undecided:
            if not open_heads:
                return False
            if len(open_heads) == 1:
                return self._set(open_heads[0], 1)
            return True
        if not open_heads and len(undecided) == 1:
            x, v = undecided[0]
            return self._set(x, v)
        return True

    def _watched(self, x: int) -> bool:
        """Whether two rules known to support ``x`` still do."""
        w = self.watch[x]
        return len(w) == 2 and self._supports(w[0], x) and self._supports(w[1], x)

    def _check_support(self, x: int) -> bool:
        val = self.val
        candidates = []
        for ri in self.head_of[x]:
            if self._supports(ri, x):
                candidates.append(ri)
                if len(candidates) > 1:
                    self.watch[x] = candidates
                    return True
        self.watch[x] = candidates
        if not candidates:
            if val[x] == 1:
                return False
            return self._set(x, 2)
        if val[x] == 1:
            head, pos, neg = self.rules[candidates[0]]
            for y in pos:
                if not self._set(y, 1):
                    return False
            for y in neg:
                if not self._set(y, 2):
                    return False
            for h in head:
                if h != x and not self._set(h, 2):
                    return False
        return True

    def _propagate(self) -> bool:
        val = self.val
        while self.queue:
            x = self.queue.pop()
            if val[x] == 1:
                c = self.comp[x]
                if c >= 0 and not self._set(c, 2):
                    return False
                if not self._watched(x) and not self._check_support(x):
                    return False
            for ri in self.occ[x]:
                if not self._check_rule(ri):
                    return False
            # support can only be lost where a body became false or another head true
            if val[x] == 2:
                lost = [(ri, -1) for ri in self.pos_of[x]]
            else:
                lost = [(ri, -1) for ri in self.neg_of[x]] + [(ri, x) for ri in self.head_of[x]]
            for ri, keep in lost:
                for h in self.rules[ri][0]:
                    if h == keep or val[h] == 2:
                        continue
                    if ri not in self.watch[h] and self._watched(h):
                        continue
                    if not self._check_support(h):
                        return False
        return True

    def _initial(self) -> bool:
        for ri in range(len(self.rules)):
            if not self._check_rule(ri):
                return False
        for x in range(len(self.lits)):
            if self.val[x] != 2 and not self._check_support(x):
                return False
        return self._propagate()

    def _undo(self, mark: int) -> None:
        for x in self.trail[mark:]:
            self._count(x, self.val[x], -1)
            self.val[x] = 0
        del self.trail[mark:]
        self.queue.clear()

    def _verify(self) -> frozenset | None:
        s = {i for i, v in enumerate(self.val) if v == 1}
        for head, pos, neg in self.rules:
            if all(x in s for x in pos) and not any(x in s for x in neg):
                if not any(x in s for x in head):
                    return None
        if not _is_minimal(self.rules, s):
            return None
        return frozenset(self.lits[i] for i in s)

    def solve(self) -> Iterator[frozenset]:
        ok = self._initial()
        stack: list = []
        while True:
            if ok:
                x = next((i for i in self.order if self.val[i] == 0), None)
                if x is None:
                    found = self._verify()
                    if found is not None:
                        yield found
                    ok = False
                else:
                    self.nodes += 1
                    if self.nodes > self.budget:
                        raise BudgetExceeded(f"answer set search exceeded {self.budget} nodes")
                    stack.append((len(self.trail), x, True))
                    self._set(x, 1)
                    ok = self._propagate()
                    continue
            while stack:
                mark, x, first = stack.pop()
                self._undo(mark)
                if first:
                    stack.append((mark, x, False))
                    self._set(x, 2)
                    ok = self._propagate()
                    break
            else:
                return


def enumerate_answer_sets(p: GroundAspProgram, budget: int = DEFAULT_NODE_BUDGET) -> list:
    """All answer sets of ``p`` as frozensets of literals, in a deterministic order."""
    return _sorted_sets(set(_Solver(p, budget).solve()))


def enumerate_answer_sets_oracle(p: GroundAspProgram, max_literals: int = 20) -> list:
    """Brute force over every consistent subset of the literal universe."""
    universe = p.literals()
    if len(universe) > max_literals:
        raise UniverseTooLarge(f"{len(universe)} literals exceed the oracle cap of {max_literals}")
    by_atom: dict = {}
    for l in universe:
        by_atom.setdefault(l.atom, []).append(l)
    choices = [[()] + [(l,) for l in ls] for ls in by_atom.values()]
    found = []
    for combo in itertools.product(*choices):
        s = frozenset(l for part in combo for l in part)
        if is_answer_set(p, s):
            found.append(s)
    return _sorted_sets(found)


_ASP_TOKEN = re.compile(r"\s*(:-|not\b|[|,.]|-?[a-z_][\w]*(?:\([^()]*(?:\([^()]*\)[^()]*)*\))?)")


def _asp_lit(tok: str) -> Lit:
    if tok.startswith("-"):
        return Lit(tok[1:], False)
    return Lit(tok, True)


def parse_asp(text: str) -> GroundAspProgram:
    """Parse the lparse-like dump format; atoms become plain strings."""
    text = re.sub(r"%[^\n]*", "", text)
    prog = GroundAspProgram()
    pos = 0
    head, body_pos, body_neg = [], [], []
    in_body = False
    negate = False
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _ASP_TOKEN.match(text, pos)
        if not m:
            raise PlogSyntaxError(f"unexpected input {text[pos:pos + 10]!r}")
        tok = m.group(1)
        pos = m.end()
        if tok == ":-":
            in_body = True
        elif tok == "not":
            negate = True
        elif tok in ("|", ","):
            continue
        elif tok == ".":
            prog.add(head, body_pos, body_neg)
            head, body_pos, body_neg, in_body = [], [], [], False
        else:
            lit = _asp_lit(tok)
            if not in_body:
                head.append(lit)
            elif negate:
                body_neg.append(lit)
            else:
                body_pos.append(lit)
            negate = False
    if head or body_pos or body_neg:
        raise PlogSyntaxError("missing final '.'")
    return prog
