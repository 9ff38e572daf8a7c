"""Hypothesis strategies for small P-log programs, ASP programs and Bayesian networks."""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from plog.asp import GroundAspProgram
from plog.bayes import BayesNet
from plog.terms import Lit

RANDOM = ["x0", "x1", "x2"]
DERIVED = ["y0", "y1"]
ATOMS = RANDOM + ["v=1", "v=2", "v=3"] + DERIVED

probs = st.sampled_from([Fraction(k, d) for d in (2, 3, 4, 5) for k in range(d + 1)])


@st.composite
def literal(draw, atoms=ATOMS):
    a = draw(st.sampled_from(atoms))
    if "=" in a:
        return a if draw(st.booleans()) else a.replace("=", "!=")
    return a if draw(st.booleans()) else "~" + a


@st.composite
def program_text(draw, with_pr=True, with_rules=True, conditional=True):
    """A program over three boolean random terms, one three-valued term and two derived atoms."""
    lines = ["x0, x1, x2, y0, y1 : boolean.", "v : {1,2,3}."]
    randoms = RANDOM + ["v"]
    for i, a in enumerate(randoms):
        earlier = [r for r in RANDOM[:i]]
        if conditional and earlier and draw(st.integers(0, 3)) == 0:
            cond = draw(literal(earlier))
            lines.append(f"random({a}) :- {cond}.")
        else:
            lines.append(f"random({a}).")
        if not with_pr:
            continue
        head = f"{a} = {draw(st.sampled_from([1, 2, 3]))}" if a == "v" else a
        kind = draw(st.integers(0, 2))
        if kind == 1:
            lines.append(f"pr({head}) = {draw(probs)}.")
        elif kind == 2 and earlier:
            c = draw(st.sampled_from(earlier))
            lines.append(f"pr({head} |c {c}) = {draw(probs)}.")
            lines.append(f"pr({head} |c ~{c}) = {draw(probs)}.")
    if with_rules:
        for y in DERIVED:
            for _ in range(draw(st.integers(0, 2))):
                body = draw(st.lists(literal(RANDOM + ["v=1", "v=2", "v=3"]), min_size=1,
                                     max_size=2))
                lines.append(f"{y} :- {', '.join(body)}.")
            if draw(st.booleans()):
                lines.append(f"~{y} :- not {y}.")
        if draw(st.integers(0, 3)) == 0:
            a, b = draw(st.sampled_from(RANDOM)), draw(literal(RANDOM))
            lines.append(f"~{a} :- {b}.")
    return "\n".join(lines) + "\n"


@st.composite
def formula_text(draw):
    parts = draw(st.lists(st.lists(literal(), min_size=1, max_size=2), min_size=1, max_size=3))
    return " | ".join("(" + " & ".join(c) + ")" for c in parts)


@st.composite
def ground_asp(draw, max_atoms=6):
    atoms = [f"p{i}" for i in range(draw(st.integers(1, max_atoms)))]
    lit = st.builds(Lit, st.sampled_from(atoms), st.booleans())
    prog = GroundAspProgram()
    for _ in range(draw(st.integers(1, 8))):
        prog.add(draw(st.lists(lit, max_size=3)), draw(st.lists(lit, max_size=2)),
                 draw(st.lists(lit, max_size=2)))
    return prog


@st.composite
def bayes_net(draw, max_vars=4, max_values=3):
    n = draw(st.integers(1, max_vars))
    vs = [f"x{i}" for i in range(n)]
    domains = {}
    for v in vs:
        k = draw(st.integers(1, max_values))
        domains[v] = ["true", "false"] if k == 2 and draw(st.booleans()) else list(range(k))
    parents = {v: [u for u in vs[:i] if draw(st.booleans())] for i, v in enumerate(vs)}
    cpt = {}
    for v in vs:
        rows = {}
        for s in itertools.product(*(domains[u] for u in parents[v])):
            w = draw(st.lists(st.integers(0, 4), min_size=len(domains[v]),
                              max_size=len(domains[v])))
            if sum(w) == 0:
                w[0] = 1
            rows[s] = {x: Fraction(k, sum(w)) for x, k in zip(domains[v], w)}
        cpt[v] = rows
    return BayesNet(domains, parents, cpt)
