from fractions import Fraction as Fr

import pytest

from plog.errors import ConditionViolation, DuplicateDeclaration, Inconsistent, ProgramError
from plog.parser import parse_program
from plog.semantics import measures, prob
from plog.updates import Update, apply_update, conditional_prob, do_update, obs_update

from conftest import load


def test_observation_differs_from_fact():
    t = load("obs_vs_fact_q")
    with pytest.raises(Inconsistent):
        measures(obs_update(t, ["q", "p=y1"]))
    told = apply_update(t, "q. p = y1.")
    assert len(measures(told)) == 1
    assert prob(told, "q") == 1


def test_observed_consequence_versus_asserted_fact():
    t = load("obs_vs_fact_p")
    assert prob(obs_update(t, ["q"]), "p=y1") == 1
    assert prob(apply_update(t, "q."), "p=y1") == Fr(1, 2)


def test_new_attribute_and_rule():
    t = load("dice")
    u = apply_update(t, "max_score : boolean. max_score :- roll(d1) = 6, roll(d2) = 6.")
    assert prob(u, "max_score") == Fr(1, 24)


def test_rules_removing_worlds_renormalize():
    t = load("two_coins")
    assert prob(t, "p(1)") == Fr(1, 2)
    u = apply_update(t, "~p(1) :- p(2). ~p(2) :- p(1).")
    assert prob(u, "p(1)") == Fr(1, 3)


def test_new_selection_rule_weakens_a_default():
    t = load("default_a2")
    assert prob(t, "a1") == 1
    assert prob(apply_update(t, "~a2. random(a1) :- ~a2."), "a1") == Fr(1, 2)


def test_adding_pr_atoms():
    assert prob(apply_update(load("coin"), "pr(a) = 1/3."), "a") == Fr(1, 3)
    with pytest.raises(ConditionViolation) as exc:
        measures(apply_update(load("fair_coin"), "pr(a) = 1/3."))
    assert exc.value.violations[0].condition == 2


def test_conditional_probability():
    assert conditional_prob(load("dice"), "roll(d2)=4", ["even(d2)"]) == Fr(1, 3)
    assert conditional_prob(load("rat"), "arsenic", ["death"]) == Fr(16, 19)
    assert conditional_prob(load("rat"), "arsenic", []) == prob(load("rat"), "arsenic")


def test_do_update():
    assert prob(do_update(load("rat"), ["death"]), "arsenic") == Fr(2, 5)
    assert prob(do_update(load("rat"), ["arsenic"]), "death") == Fr(4, 5)


def test_do_accepts_false_boolean_atoms_only():
    assert prob(do_update(load("simpson"), ["~drug"]), "recover") == Fr(1, 2)
    with pytest.raises(ProgramError):
        do_update(load("monty"), ["open != 2"])


def test_update_objects():
    t = load("rat")
    sig = t.signature
    from plog.parser import parse_literal
    death = parse_literal("death", sig)
    assert apply_update(t, Update.obs([death])) == obs_update(t, ["death"])
    assert apply_update(t, Update.do([death])) == do_update(t, ["death"])
    extra = parse_program("pr(arsenic) = 0.4.", t)
    assert apply_update(t, Update.statements(extra)) == t


def test_original_program_is_unchanged():
    t = load("rat")
    before = t.statements
    obs_update(t, ["death"])
    assert t.statements == before


def test_conflicting_redeclaration():
    with pytest.raises(DuplicateDeclaration):
        apply_update(load("coin"), "a : {1,2}.")


def test_unknown_update_kind():
    with pytest.raises(ValueError):
        Update("assert", ())
