"""Static sufficient conditions for coherency and a direct semantic test.

The static route finds a strict probabilistic leveling, checks that the
program is causally ordered under it and that every selection rule is
unitary.  The semantic route compares every pr-atom with the conditional
probability it is supposed to entail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .asp import enumerate_answer_sets
from .errors import PlogError
from .grounding import GPr, GRandom, GroundProgram
from .semantics import (
    PossibleWorld, ProgramLike, as_ground, lit_value, measures, worlds_of,
)
from .syntax import DECLARATIONS, conj
from .terms import ATerm, ExtLit, Lit, satisfies
from .translate import translate

COHERENT_BY_THEOREM = "coherent-by-theorem"
UNKNOWN = "unknown"
INCOHERENT_WITNESS = "incoherent-witness"


# Dependency


def _premise_lits(gp: GroundProgram, sel: GRandom) -> list:
    """The literals p(y) of a dynamic range together with the body literals."""
    out = []
    if sel.pred is not None and sel.pred not in gp.sig.sorts:
        for y in gp.range_of(sel.aterm):
            p = gp.pred_lit(sel.pred, y)
            if p is not None:
                out.append(p)
    out.extend(e.lit for e in sel.body)
    return out


def _sel_lits(gp: GroundProgram, sel: GRandom) -> list:
    """Literals occurring in a selection rule: its values and its premises."""
    return list(gp.value_lits(sel.aterm)) + _premise_lits(gp, sel)


class DependencyGraph:
    """Immediate dependency between literals, lifted to attribute terms."""

    def __init__(self, gp: GroundProgram):
        self.gp = gp
        self.succ: dict = {}
        self._edges: set = set()
        for r in gp.rules:
            if r.head is not None:
                self._link([r.head], [e.lit for e in r.body])
        for s in gp.randoms:
            self._link(gp.value_lits(s.aterm), _premise_lits(gp, s))
        for p in gp.prs:
            self._link([p.head], [e.lit for e in p.body])
        for a in gp.aterms():
            # a(t)!=y is derived from a(t)=y' for y' != y
            if gp.sig.is_boolean(a):
                continue
            lits = gp.value_lits(a)
            for l in lits:
                self._link([l.contrary], [m for m in lits if m != l], record=False)
        self._reach: dict = {}
        self._deps: dict = {}
        self._by_aterm = None

    def _link(self, heads, body, record: bool = True) -> None:
        for h in heads:
            s = self.succ.setdefault(h, set())
            s.update(body)
            for b in body:
                self.succ.setdefault(b, set())
                if record:
                    self._edges.add((h.atom.aterm, b.atom.aterm))

    @property
    def nodes(self) -> list:
        return sorted({l.atom.aterm for l in self.succ}, key=lambda a: a.key)

    @property
    def edges(self) -> list:
        """Immediate dependencies between attribute terms, read off the rules."""
        return sorted(self._edges, key=lambda e: (e[0].key, e[1].key))

    def reach(self, lit: Lit) -> frozenset:
        """All literals ``lit`` depends on, itself included."""
        got = self._reach.get(lit)
        if got is not None:
            return got
        seen = {lit}
        stack = [lit]
        while stack:
            for m in self.succ.get(stack.pop(), ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        got = frozenset(seen)
        self._reach[lit] = got
        return got

    def lit_depends(self, l1: Lit, l2: Lit) -> bool:
        return l2 in self.reach(l1)

    def depends_on(self, a1: ATerm) -> frozenset:
        """Attribute terms ``a1`` depends on (reflexively)."""
        got = self._deps.get(a1)
        if got is None:
            if self._by_aterm is None:
                self._by_aterm = {}
                for l in self.succ:
                    self._by_aterm.setdefault(l.atom.aterm, []).append(l)
            out = {a1}
            for l in self._by_aterm.get(a1, ()):
                out.update(m.atom.aterm for m in self.reach(l))
            got = self._deps[a1] = frozenset(out)
        return got

    def depends(self, a1: ATerm, a2: ATerm) -> bool:
        return a2 in self.depends_on(a1)


def dependency_graph(p: ProgramLike) -> DependencyGraph:
    return DependencyGraph(as_ground(p))


# Leveling


@dataclass(frozen=True)
class Leveling:
    """A strict probabilistic leveling and the ordering of random terms it induces."""

    order: tuple
    ranks: dict = field(hash=False, compare=False)
    ok: bool = field(default=True, init=False)

    def rank(self, x) -> int:
        if isinstance(x, ATerm):
            return self.ranks[x]
        if isinstance(x, ExtLit):
            x = x.lit
        return self.ranks[x.atom.aterm]

    def rank_of_set(self, items) -> int:
        return max((self.rank(i) for i in items), default=-1)

    def __str__(self) -> str:
        return ", ".join(f"|{a}| = {self.ranks[a]}" for a in sorted(
            self.ranks, key=lambda a: (self.ranks[a], a.key)))


@dataclass(frozen=True)
class NoLeveling:
    """No strict probabilistic leveling exists; ``cycle`` is the certificate."""

    cycle: tuple
    reason: str
    ok: bool = field(default=False, init=False)

    def __str__(self) -> str:
        return self.reason


def _random_order(gp: GroundProgram) -> list:
    """Random attribute terms, ordered by the first selection rule generating each."""
    first: dict = {}
    for k, s in enumerate(gp.randoms):
        first.setdefault(s.aterm, (s.src, k))
    return sorted(first, key=lambda a: first[a])


def _precedence(gp: GroundProgram, dg: DependencyGraph, randoms: list) -> dict:
    """For each random term, the random terms that must get a lower rank."""
    rset = set(randoms)
    deps = {a: dg.depends_on(a) for a in gp.aterms()}
    before: dict = {a: set() for a in randoms}

    def add(a, lits):
        for l in lits:
            b = l.atom.aterm
            if b in rset:
                before[a].add(b)
            else:
                before[a].update(d for d in deps.get(b, ()) if d in rset)

    for s in gp.randoms:
        add(s.aterm, _premise_lits(gp, s))
    for p in gp.prs:
        add(p.aterm, [e.lit for e in p.body])
    return before


def _ranks(gp, dg, order, before_lits) -> dict:
    ranks: dict = {}
    rset = set(order)
    deps = {a: dg.depends_on(a) for a in gp.aterms()}
    prev = -1
    for a in order:
        body = before_lits[a]
        body_rank = -1
        for b in body:
            if b in rset:
                body_rank = max(body_rank, ranks[b])
            else:
                body_rank = max(body_rank, max((ranks[d] for d in deps.get(b, ()) if d in rset
                                                and d in ranks), default=0))
        ranks[a] = max(prev + 1, body_rank + 1)
        prev = ranks[a]
    for b in gp.aterms():
        if b not in rset:
            ranks[b] = max((ranks[d] for d in deps[b] if d in rset), default=0)
    return ranks


def _body_aterms(gp: GroundProgram) -> dict:
    out: dict = {}
    for s in gp.randoms:
        bucket = out.setdefault(s.aterm, set())
        bucket.update(l.atom.aterm for l in _premise_lits(gp, s))
    for p in gp.prs:
        out.setdefault(p.aterm, set()).update(e.lit.atom.aterm for e in p.body)
    return out


def _find_cycle(before: dict) -> tuple:
    colour: dict = {}
    for start in before:
        if colour.get(start):
            continue
        stack = [(start, iter(sorted(before[start], key=lambda a: a.key)))]
        path = [start]
        colour[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = 2
                stack.pop()
                path.pop()
                continue
            if colour.get(nxt) == 1:
                return tuple(path[path.index(nxt):]) + (nxt,)
            if not colour.get(nxt):
                colour[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(before[nxt], key=lambda a: a.key))))
    return ()


def iter_levelings(p: ProgramLike, limit: int = 64) -> Iterator[Leveling]:
    """Strict probabilistic levelings, one per admissible ordering of random terms.

    Orderings are topological orders of the precedence forced by clauses 2-4,
    produced with statement order as the tie-break, at most ``limit`` of them.
    """
    gp = as_ground(p)
    dg = DependencyGraph(gp)
    randoms = _random_order(gp)
    pos = {a: i for i, a in enumerate(randoms)}
    before = _precedence(gp, dg, randoms)
    if any(a in before[a] for a in randoms) or _find_cycle(before):
        return
    body = _body_aterms(gp)
    after: dict = {a: [] for a in randoms}
    for a, bs in before.items():
        for b in bs:
            after[b].append(a)
    indeg = {a: len(before[a]) for a in randoms}
    count = 0
    order: list = []

    def rec():
        nonlocal count
        if count >= limit:
            return
        if len(order) == len(randoms):
            count += 1
            yield Leveling(tuple(order), _ranks(gp, dg, order, body))
            return
        ready = sorted((a for a in randoms if indeg[a] == 0 and a not in placed),
                       key=pos.__getitem__)
        for a in ready:
            placed.add(a)
            order.append(a)
            for b in after[a]:
                indeg[b] -= 1
            yield from rec()
            for b in after[a]:
                indeg[b] += 1
            order.pop()
            placed.discard(a)
            if count >= limit:
                return

    placed: set = set()
    yield from rec()


def find_leveling(p: ProgramLike) -> Union[Leveling, NoLeveling]:
    gp = as_ground(p)
    for lev in iter_levelings(gp, limit=1):
        return lev
    dg = DependencyGraph(gp)
    randoms = _random_order(gp)
    before = _precedence(gp, dg, randoms)
    for a in randoms:
        if a in before[a]:
            return NoLeveling((a, a), f"{a} is generated from premises that depend on {a} itself")
    cycle = _find_cycle(before)
    names = " -> ".join(str(a) for a in reversed(cycle))
    return NoLeveling(cycle, f"random terms must precede each other in a cycle: {names}")


def leveling_violations(p: ProgramLike, ranks: dict) -> list:
    """Clauses of the strict probabilistic leveling definition that ``ranks`` breaks."""
    gp = as_ground(p)
    dg = DependencyGraph(gp)
    out = []
    randoms = _random_order(gp)
    seen: dict = {}
    for a in randoms:
        r = ranks[a]
        if r in seen:
            out.append((1, f"{seen[r]} and {a} share level {r}"))
        seen[r] = a

    def rank_set(lits):
        return max((ranks[l.atom.aterm] for l in lits), default=-1)

    for s in gp.randoms:
        if not ranks[s.aterm] > rank_set(_premise_lits(gp, s)):
            out.append((2, f"{s} does not sit above its premises"))
    for p_ in gp.prs:
        if not ranks[p_.aterm] > rank_set([e.lit for e in p_.body]):
            out.append((3, f"{p_} does not sit above its condition"))
    rset = set(randoms)
    for b in gp.aterms():
        if b in rset:
            continue
        for a in dg.depends_on(b):
            if a in rset and ranks[b] < ranks[a]:
                out.append((4, f"non-random {b} depends on {a} but has a lower level"))
    return out


# Induced structure


@dataclass
class InducedStructure:
    leveling: Leveling
    programs: list          # Pi_1 .. Pi_{n+1} as ground programs
    strata: list            # L_1 .. L_{n+1}
    statements: list        # source statement indices of each Pi_i

    def program(self, i: int) -> GroundProgram:
        return self.programs[i - 1]

    def language(self, i: int) -> frozenset:
        return self.strata[i - 1]


def induced_structure(p: ProgramLike, lev: Leveling) -> InducedStructure:
    gp = as_ground(p)
    dg = DependencyGraph(gp)
    index = {a: k + 1 for k, a in enumerate(lev.order)}
    n = len(lev.order)
    cache: dict = {}

    def level(l: Lit) -> int:
        got = cache.get(l)
        if got is None:
            got = 1 + max((index.get(m.atom.aterm, 0) for m in dg.reach(l)), default=0)
            cache[l] = got
        return got

    def stmt_level(lits) -> int:
        return max((level(l) for l in lits), default=1)

    rule_lv = [(r, stmt_level(([r.head] if r.head else []) + [e.lit for e in r.body]))
               for r in gp.rules]
    sel_lv = [(s, stmt_level(_sel_lits(gp, s))) for s in gp.randoms]
    obs_lv = [(o, level(o[0])) for o in gp.obs]
    do_lv = [(d, level(d[0])) for d in gp.dos]
    lits = set(dg.succ)
    for a in gp.aterms():
        lits.update(gp.value_lits(a))
        lits.update(l.contrary for l in gp.value_lits(a))
    decls = set()
    if gp.source is not None:
        decls = {k for k, s in enumerate(gp.source.statements) if isinstance(s, DECLARATIONS)}
    programs, strata, stmts = [], [], []
    for i in range(1, n + 2):
        sub = GroundProgram(gp.sig, gp.members, gp.sort_facts)
        sub.rules = [r for r, lv in rule_lv if lv <= i]
        sub.randoms = [s for s, lv in sel_lv if lv <= i]
        sub.obs = [o for o, lv in obs_lv if lv <= i]
        sub.dos = [d for d, lv in do_lv if lv <= i]
        programs.append(sub)
        strata.append(frozenset(l for l in lits if level(l) <= i))
        srcs = set(decls) | {x.src for x in sub.rules} | {x.src for x in sub.randoms}
        srcs |= {src for _, src in sub.obs} | {src for _, src in sub.dos}
        stmts.append(srcs)
    return InducedStructure(lev, programs, strata, stmts)


# Causal order


@dataclass(frozen=True)
class OrderViolation:
    clause: int
    level: int
    world: Optional[PossibleWorld]
    atom: Optional[Lit]
    count: int

    def __str__(self) -> str:
        where = f" at W = {self.world.show()}" if self.world is not None else ""
        atom = f" with obs({self.atom})" if self.atom is not None else ""
        return f"clause {self.clause}, level {self.level}{where}{atom}: {self.count} worlds instead of 1"


@dataclass
class CausalOrderReport:
    leveling: Leveling
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _answer_sets(gp: GroundProgram, facts=(), obs=None) -> list:
    if obs is not None:
        gp = gp.copy()
        gp.obs.append((obs, -1))
    return enumerate_answer_sets(translate(gp, list(facts)))


def _possible_values(gp: GroundProgram, aterm: ATerm, w) -> list:
    out = []
    for s in gp.selections_for(aterm):
        if not satisfies(w, s.body):
            continue
        for y in gp.range_of(aterm):
            if s.pred is None or gp.pred_holds(s.pred, y, w):
                out.append(y)
    return list(dict.fromkeys(out))


def is_causally_ordered(p: ProgramLike, lev: Optional[Leveling] = None,
                        stop_early: bool = False) -> CausalOrderReport:
    """Check the three causal-order clauses level by level, collecting counterexamples."""
    gp = as_ground(p)
    if lev is None:
        lev = find_leveling(gp)
    if not lev.ok:
        raise PlogError(f"no strict probabilistic leveling: {lev}")
    st = induced_structure(gp, lev)
    violations = []
    first = worlds_of(st.program(1))
    if len(first) != 1:
        violations.append(OrderViolation(1, 1, None, None, len(first)))
        if stop_early:
            return CausalOrderReport(lev, violations)
    current = first
    for i, a in enumerate(lev.order, start=1):
        nxt_prog = st.program(i + 1)
        for w in current:
            facts = [Lit(x.atom, x.positive) for x in w.sigma]
            values = _possible_values(nxt_prog, a, w)
            if values:
                for y in values:
                    atom = nxt_prog.value_lit(a, y)
                    n = len(_answer_sets(nxt_prog, facts, atom))
                    if n != 1:
                        violations.append(OrderViolation(2, i, w, atom, n))
            else:
                n = len(_answer_sets(nxt_prog, facts))
                if n != 1:
                    violations.append(OrderViolation(3, i, w, None, n))
            if violations and stop_early:
                return CausalOrderReport(lev, violations)
        current = worlds_of(nxt_prog)
    return CausalOrderReport(lev, violations)


# Scenarios and the unitary check


@dataclass
class Scenario:
    rule: GRandom
    worlds: list
    range: tuple
    active: list

    @property
    def total(self) -> Fraction:
        return sum((q.value for q in self.active), Fraction(0))

    def covered(self) -> bool:
        heads = {lit_value(q.head) for q in self.active}
        return all(y in heads for y in self.range)

    def unitary_clause(self) -> Optional[int]:
        """1 or 2 when the scenario meets that clause of the unitary definition."""
        if self.covered():
            return 1 if self.total == 1 else None
        return 2 if self.total <= 1 else None


def scenarios(p: ProgramLike, sel: GRandom, worlds: Optional[list] = None) -> list:
    """Partition of the worlds satisfying ``sel``'s premise into scenarios."""
    gp = as_ground(p)
    if worlds is None:
        worlds = worlds_of(gp)
    prs = gp.prs_for(sel)
    groups: dict = {}
    for w in worlds:
        if not satisfies(w, sel.body):
            continue
        pvals = tuple(y for y in gp.range_of(sel.aterm)
                      if sel.pred is None or gp.pred_holds(sel.pred, y, w))
        key = (pvals, tuple(satisfies(w, q.body) for q in prs))
        groups.setdefault(key, []).append(w)
    out = []
    for (pvals, sat), ws in groups.items():
        active = [q for q, ok in zip(prs, sat) if ok]
        out.append(Scenario(sel, ws, pvals, active))
    return out


def at_r(scenario: Scenario) -> list:
    return list(scenario.active)


@dataclass
class UnitaryReport:
    rows: list          # (selection rule, scenario, clause or None)

    @property
    def ok(self) -> bool:
        return all(c is not None for _, _, c in self.rows)

    def failures(self) -> list:
        return [(r, s) for r, s, c in self.rows if c is None]


def is_unitary(p: ProgramLike, worlds: Optional[list] = None) -> UnitaryReport:
    gp = as_ground(p)
    if worlds is None:
        worlds = worlds_of(gp)
    rows = []
    for sel in gp.randoms:
        for s in scenarios(gp, sel, worlds):
            rows.append((sel, s, s.unitary_clause()))
    return UnitaryReport(rows)


# Semantic coherency


@dataclass(frozen=True)
class PrCheck:
    selection: GRandom
    pr: GPr
    status: str                     # "ok", "violated", "skipped" or "uncheckable"
    conditional: Optional[Fraction] = None
    premise_prob: Optional[Fraction] = None

    def __str__(self) -> str:
        if self.status == "uncheckable":
            return f"{self.pr} uncheckable: condition contains default negation"
        if self.status == "skipped":
            return f"{self.pr} not checked: its condition has probability 0"
        return f"{self.pr} {self.status}: conditional probability {self.conditional}"


@dataclass
class SemanticReport:
    status: str                     # coherent, incoherent, uncheckable, inconsistent, undefined
    checks: list
    message: str = ""

    @property
    def witnesses(self) -> list:
        return [c for c in self.checks if c.status == "violated"]


def _strip_actions(gp: GroundProgram) -> GroundProgram:
    g = gp.copy()
    g.obs, g.dos = [], []
    return g


def semantic_coherency(p: ProgramLike) -> SemanticReport:
    """Test every pr-atom against the conditional probability of its head."""
    gp = as_ground(p)
    try:
        measures(gp)
    except PlogError as e:
        kind = "inconsistent" if not worlds_of(gp) else "undefined"
        return SemanticReport(kind, [], str(e))
    core = _strip_actions(gp)
    try:
        table = measures(core)
    except PlogError as e:
        return SemanticReport("undefined", [], f"program without observations and actions: {e}")
    checks = []
    cache: dict = {}
    for sel in gp.randoms:
        for q in gp.prs_for(sel):
            cond = tuple(dict.fromkeys(tuple(sel.body) + tuple(q.body)))
            if any(e.naf for e in cond):
                checks.append(PrCheck(sel, q, "uncheckable"))
                continue
            pc = table.prob(conj(cond))
            if pc == 0:
                checks.append(PrCheck(sel, q, "skipped", premise_prob=pc))
                continue
            key = frozenset(e.lit for e in cond)
            upd = cache.get(key)
            if upd is None:
                g = core.copy()
                g.obs = [(e.lit, -1) for e in cond]
                upd = cache[key] = measures(g)
            got = upd.prob(conj([q.head]))
            status = "ok" if got == q.value else "violated"
            checks.append(PrCheck(sel, q, status, got, pc))
    if any(c.status == "violated" for c in checks):
        status = "incoherent"
    elif any(c.status == "uncheckable" for c in checks):
        status = "uncheckable"
    else:
        status = "coherent"
    return SemanticReport(status, checks)


# Verdict


@dataclass
class CoherencyVerdict:
    verdict: str
    leveling: Union[Leveling, NoLeveling, None]
    order: Optional[CausalOrderReport]
    unitary: Optional[UnitaryReport]
    semantic: Optional[SemanticReport]

    def __str__(self) -> str:
        return self.verdict


def coherency_verdict(p: ProgramLike, max_levelings: int = 16) -> CoherencyVerdict:
    gp = as_ground(p)
    lev = find_leveling(gp)
    order = None
    if lev.ok:
        for cand in iter_levelings(gp, max_levelings):
            rep = is_causally_ordered(gp, cand, stop_early=True)
            if rep.ok:
                lev, order = cand, rep
                break
        if order is None:
            order = is_causally_ordered(gp, lev)
    worlds = worlds_of(gp)
    unitary = is_unitary(gp, worlds) if worlds else None
    try:
        measures(gp)
        defined = True
    except PlogError:
        # the theorem presumes the well-formedness conditions and a defined measure
        defined = False
    if defined and order is not None and order.ok and unitary is not None and unitary.ok:
        return CoherencyVerdict(COHERENT_BY_THEOREM, lev, order, unitary, None)
    sem = semantic_coherency(gp)
    failed = ("incoherent", "undefined", "inconsistent")
    verdict = INCOHERENT_WITNESS if sem.status in failed else UNKNOWN
    return CoherencyVerdict(verdict, lev, order, unitary, sem)
