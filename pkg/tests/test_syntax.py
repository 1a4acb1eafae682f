import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rcteams.intervention import InterventionSpec
from rcteams.model import Signature
from rcteams.syntax import (
    And,
    Atom,
    Box,
    Dia,
    FormulaSyntaxError,
    Implies,
    InconsistentAntecedent,
    Neg,
    NestedModal,
    Neq,
    Or,
    Top,
    UnknownValue,
    UnknownVariable,
    desugar,
    is_core,
    parse,
    random_formula,
    to_text,
)

SIG = Signature.parse("A=0,1; C=heads,tails,none")


def test_precedence_and_associativity():
    assert parse("A=1 -> C=heads -> A=0", SIG) == Implies(Atom("A", "1"), Implies(Atom("C", "heads"), Atom("A", "0")))
    assert parse("~A=1 & C!=tails | A=0", SIG) == Or(And(Neg(Atom("A", "1")), Neq("C", "tails")), Atom("A", "0"))


def test_modal_operand_is_unary():
    phi = parse("[A=1] C=heads & A=0", SIG)
    assert phi == And(Box(InterventionSpec.parse("A=1"), Atom("C", "heads")), Atom("A", "0"))


def test_antecedent_order_is_normalised():
    assert parse("[C=heads, A=1] T", SIG) == parse("[A=1,C=heads] T", SIG)
    assert to_text(parse("[C=heads, A=1] T", SIG)) == "[A=1,C=heads] T"


def test_t_and_f_as_names():
    sig = Signature.parse("T=0,1; F=0,1")
    assert parse("T=1 & F!=0", sig) == And(Atom("T", "1"), Neq("F", "0"))
    assert parse("<> T", sig) == Dia(InterventionSpec(), Top())


@pytest.mark.parametrize(
    "text, error, position",
    [
        ("[A=1] [C=heads] A=1", NestedModal, 6),
        ("B=1", UnknownVariable, 0),
        ("A=3", UnknownValue, 2),
        ("A=1 &", FormulaSyntaxError, 5),
        ("(A=1", FormulaSyntaxError, 4),
        ("A=1 $ A=0", FormulaSyntaxError, 4),
    ],
)
def test_errors_carry_positions(text, error, position):
    with pytest.raises(error) as err:
        parse(text, SIG)
    assert str(position) in str(err.value)


def test_inconsistent_antecedent():
    with pytest.raises(InconsistentAntecedent):
        parse("[A=1, A=0] C=heads", SIG)


def test_box_rejects_modal_body():
    with pytest.raises(NestedModal):
        Box(InterventionSpec(), Dia(InterventionSpec(), Top()))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_print_parse_round_trip(seed, depth):
    phi = random_formula(SIG, random.Random(seed), depth=depth)
    assert parse(to_text(phi), SIG) == phi


@given(st.integers(0, 2**32 - 1))
def test_desugar_yields_core(seed):
    phi = random_formula(SIG, random.Random(seed), depth=3)
    core = desugar(phi, SIG)
    assert is_core(core)
    assert desugar(core, SIG) == core


def test_operator_overloads():
    a, c = Atom("A", "1"), Atom("C", "none")
    assert (a & c) == And(a, c)
    assert (a | c) == Or(a, c)
    assert ~a == Neg(a)
    assert (a >> c) == Implies(a, c)
    assert str(a >> c) == "A=1 -> C=none"
