"""Translation of a ground P-log program into an answer set program.

Boolean attributes are encoded as a single atom whose classical negation
stands for the value ``false``; every other attribute term ``a(t)=y`` becomes
the atom ``a(t,y)``.
"""

from __future__ import annotations

from typing import Optional

from .asp import GroundAspProgram
from .grounding import GroundProgram
from .terms import Do, Intervene, Lit, Obs, SortFact


def _split(body) -> tuple:
    pos = tuple(e.lit for e in body if not e.naf)
    neg = tuple(e.lit for e in body if e.naf)
    return pos, neg


def sigma_literals(gp: GroundProgram, aterms=None) -> list:
    """Both polarities of every value literal of the given attribute terms."""
    out = []
    for a in aterms if aterms is not None else gp.aterms():
        if gp.sig.is_boolean(a):
            lit = gp.value_lit(a, "true")
            out.extend([lit, lit.contrary])
        else:
            for l in gp.value_lits(a):
                out.extend([l, l.contrary])
    return out


def translate(gp: GroundProgram, extra_facts: Optional[list] = None) -> GroundAspProgram:
    prog = GroundAspProgram()
    add = prog.add
    for sort, v in gp.sort_facts:
        add([Lit(SortFact(sort, v))])
    for r in gp.rules:
        pos, neg = _split(r.body)
        add([r.head] if r.head is not None else [], pos, neg)
    aterms = gp.aterms()
    for a in aterms:
        if gp.sig.is_boolean(a):
            continue
        lits = gp.value_lits(a)
        for l1 in lits:
            for l2 in lits:
                if l1 != l2:
                    add([l1.contrary], [l2])
    for a in aterms:
        for l in gp.value_lits(a):
            add([Lit(Intervene(a))], [Lit(Do(l))])
    for s in gp.randoms:
        pos, neg = _split(s.body)
        block = Lit(Intervene(s.aterm))
        add(gp.value_lits(s.aterm), pos, neg + (block,))
        if s.pred is not None:
            for y in gp.range_of(s.aterm):
                value = gp.value_lit(s.aterm, y)
                if s.pred in gp.sig.sorts:
                    if not gp.sort_member(s.pred, y):
                        add([], (value,) + pos, neg + (block,))
                    continue
                p = gp.pred_lit(s.pred, y)
                if p is None:
                    add([], (value,) + pos, neg + (block,))
                else:
                    add([], (value,) + pos, neg + (block, p))
    for l, _ in gp.obs:
        add([Lit(Obs(l))])
    for l, _ in gp.dos:
        add([Lit(Do(l))])
    for l in sigma_literals(gp, aterms):
        add([], [Lit(Obs(l))], [l])
    for a in aterms:
        for l in gp.value_lits(a):
            add([l], [Lit(Do(l))])
    for f in extra_facts or ():
        add([f])
    return prog


def is_bookkeeping(lit: Lit) -> bool:
    return not lit.is_sigma


def dump(gp: GroundProgram) -> str:
    """The translated program in the lparse-like text form."""
    return translate(gp).dump()
