import pytest

from plog.errors import (
    DuplicateDeclaration, PlogSyntaxError, ProgramError, RangeError, SortError, TypeMismatch,
)
from plog.grounding import ground, instance_count
from plog.parser import parse_formula, parse_literal, parse_program
from plog.syntax import AttrDecl, PrAtom, RandomSel, SortDecl
from plog.terms import Lit

from conftest import load


def test_declarations_and_statement_kinds():
    p = parse_program("""
        dice = {d1,d2}.
        score = {1..6}.
        roll : dice -> score.
        [r(D)] random(roll(D)).
        pr(roll(D) = 6) = 1/4.
    """)
    kinds = [type(s) for s in p.statements]
    assert kinds == [SortDecl, SortDecl, AttrDecl, RandomSel, PrAtom]
    assert ground(p).members_set("score") == frozenset(range(1, 7))


def test_boolean_literal_forms_coincide():
    sig = parse_program("a : boolean.").signature
    assert parse_literal("a", sig) == parse_literal("a = true", sig)
    assert parse_literal("~a", sig) == parse_literal("a = false", sig)
    assert parse_literal("~a", sig) == -parse_literal("a", sig)


def test_unicode_and_ascii_operators_agree():
    sig = load("monty").signature
    assert parse_literal("prize <> 2", sig) == parse_literal("prize != 2", sig)
    assert parse_literal("prize ≠ 2", sig) == parse_literal("prize != 2", sig)


def test_formula_connectives():
    sig = load("unknown_p").signature
    f = parse_formula("p(c) | ~p(c) & q(c)", sig)
    assert type(f).__name__ == "FOr"


def test_syntax_error_reports_position():
    with pytest.raises(PlogSyntaxError) as exc:
        parse_program("a : boolean.\nrandom(a")
    assert exc.value.line == 2


def test_undeclared_attribute_is_a_sort_error():
    with pytest.raises(SortError):
        parse_program("a : boolean. b.")


def test_probability_outside_unit_interval():
    with pytest.raises(RangeError):
        parse_program("a : boolean. random(a). pr(a) = 3/2.")


def test_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration):
        parse_program("a : boolean. a : {1,2}.").signature


def test_pr_atom_without_selection_rule():
    with pytest.raises(ProgramError):
        ground(parse_program("a : boolean. pr(a) = 1/2."))


def test_arithmetic_on_symbols_is_rejected():
    p = parse_program("s = {x,y}. n : s -> boolean. n(X) :- X + 1 > 2.")
    with pytest.raises(TypeMismatch):
        ground(p)


def test_instance_counts_before_builtin_filtering():
    dice = load("dice")
    idx = next(i for i, s in enumerate(dice.statements) if "mod" in str(s))
    assert instance_count(dice, idx) == 12
    gp = ground(dice)
    even_rules = [r for r in gp.rules if r.head is not None and str(r.head).startswith("even")]
    assert len(even_rules) == 6


def test_ground_program_has_no_variables():
    gp = ground(load("squirrel"))
    text = str(gp)
    assert "P," not in text and "(D)" not in text


def test_ill_sorted_instances_are_dropped():
    p = parse_program("""
        time = {0..2}.
        f : time -> boolean.
        f(T+1) :- f(T).
        f(0).
    """)
    heads = {str(r.head) for r in ground(p).rules if r.head is not None}
    assert heads == {"f(0)", "f(1)", "f(2)"}


def test_literal_printing_round_trips():
    sig = load("dice").signature
    for text in ["roll(d1)=6", "roll(d1)!=6", "even(d2)", "~even(d2)"]:
        lit = parse_literal(text, sig)
        assert isinstance(lit, Lit)
        assert parse_literal(str(lit), sig) == lit
