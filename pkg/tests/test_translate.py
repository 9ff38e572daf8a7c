from plog.asp import enumerate_answer_sets
from plog.grounding import ground
from plog.parser import parse_program
from plog.terms import Do, Intervene, Lit, Obs
from plog.translate import dump, translate

from conftest import load


def rules(text_or_prog):
    prog = parse_program(text_or_prog) if isinstance(text_or_prog, str) else text_or_prog
    return dump(ground(prog)).splitlines()


def test_single_boolean_coin_has_seven_rules():
    got = rules("a : boolean. random(a). pr(a) = 1.")
    assert sorted(got) == sorted([
        "intervene(a) :- do(a).",
        "intervene(a) :- do(-a).",
        "a | -a :- not intervene(a).",
        ":- obs(a), not a.",
        ":- obs(-a), not -a.",
        "a :- do(a).",
        "-a :- do(-a).",
    ])


def test_pr_atoms_do_not_change_the_translation():
    assert rules(load("coin")) == rules(load("fair_coin"))


def test_dice_translation_contains_functionality_and_obs_rules():
    got = set(rules(load("dice")))
    assert "-roll(d1,1) :- roll(d1,2)." in got
    assert "-roll(d1,6) :- roll(d1,5)." in got
    assert ":- obs(roll(d2,4)), not roll(d2,4)." in got
    assert ":- obs(-roll(d2,4)), not -roll(d2,4)." in got
    assert "roll(d1,1) | roll(d1,2) | roll(d1,3) | roll(d1,4) | roll(d1,5) | roll(d1,6)" \
        " :- not intervene(roll(d1))." in got


def test_restricted_selection_for_three_doors():
    got = set(rules(load("monty")))
    assert "open(1) | open(2) | open(3) :- not intervene(open)." in got
    for d in (1, 2, 3):
        assert f":- open({d}), not intervene(open), not can_open({d})." in got


def test_do_forces_value_and_disables_selection():
    gp = ground(load("monty", "do(open = 2)."))
    open_ = next(a for a in gp.aterms() if str(a) == "open")
    sets = enumerate_answer_sets(translate(gp))
    assert len(sets) == 9
    for s in sets:
        assert gp.value_lit(open_, 2) in s
        assert Lit(Intervene(open_)) in s


def test_observation_constraint_eliminates_worlds():
    base = ground(load("coin"))
    obs = ground(load("coin", "obs(~a)."))
    assert len(enumerate_answer_sets(translate(base))) == 2
    worlds = enumerate_answer_sets(translate(obs))
    assert len(worlds) == 1
    assert all(any(isinstance(l.atom, Obs) for l in w) for w in worlds)


def test_bookkeeping_atoms_use_dedicated_predicates():
    gp = ground(load("coin", "do(a)."))
    lits = translate(gp).literals()
    assert any(isinstance(l.atom, Do) for l in lits)
    assert any(isinstance(l.atom, Intervene) for l in lits)


def test_extra_facts_are_appended():
    gp = ground(load("coin"))
    a = next(l for l in translate(gp).literals() if str(l) == "a")
    sets = enumerate_answer_sets(translate(gp, [a]))
    assert len(sets) == 1 and a in sets[0]
