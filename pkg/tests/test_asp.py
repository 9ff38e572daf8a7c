import pytest

from plog.asp import (
    GroundAspProgram, enumerate_answer_sets, enumerate_answer_sets_oracle, is_answer_set,
    parse_asp, reduct,
)
from plog.errors import BudgetExceeded, UniverseTooLarge
from plog.terms import Lit


def sets(text):
    return [{str(l) for l in s} for s in enumerate_answer_sets(parse_asp(text))]


def test_even_loop_has_two_answer_sets():
    assert sets("p :- not q. q :- not p.") == [{"p"}, {"q"}]


def test_odd_loop_has_none():
    assert sets("p :- not p.") == []


def test_disjunction_is_minimal():
    assert sorted(map(sorted, sets("a | b. a :- b."))) == [["a"]]


def test_classical_negation_blocks_inconsistency():
    assert sets("a. -a.") == []
    assert sets("-a. b :- -a.") == [{"-a", "b"}]


def test_constraint_filters():
    assert sets("a | b. :- a.") == [{"b"}]


def test_positive_loop_is_unfounded():
    assert sets("p :- q. q :- p.") == [set()]


def test_reduct_drops_blocked_rules():
    p = parse_asp("p :- not q. r :- s, not p.")
    red = reduct(p, frozenset({Lit("p", True)}))
    assert len(red.rules) == 1


def test_is_answer_set_checks_minimality():
    p = parse_asp("a | b.")
    assert is_answer_set(p, {Lit("a", True)})
    assert not is_answer_set(p, {Lit("a", True), Lit("b", True)})


def test_dump_round_trip():
    text = "a | -b :- c, not d.\n:- a, b.\nc.\n"
    assert parse_asp(text).dump() == text


def test_budget_is_enforced():
    text = " ".join(f"p{i} | q{i}." for i in range(12))
    with pytest.raises(BudgetExceeded):
        enumerate_answer_sets(parse_asp(text), budget=50)


def test_oracle_refuses_large_universes():
    p = GroundAspProgram()
    for i in range(25):
        p.add([Lit(f"p{i}", True)])
    with pytest.raises(UniverseTooLarge):
        enumerate_answer_sets_oracle(p)


def test_kernel_matches_oracle_on_small_cases():
    for text in ["a :- not b. b :- not c. c :- not a.", "a | b | c. :- a, b.",
                 "a :- not -a. -a :- not a. b :- a.", "p | q :- not r. r :- p."]:
        p = parse_asp(text)
        assert enumerate_answer_sets(p) == enumerate_answer_sets_oracle(p)
