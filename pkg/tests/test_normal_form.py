import random

from hypothesis import given
from hypothesis import strategies as st

from rcteams.enumeration import ModelClass, sample_models
from rcteams.intervention import InterventionSpec
from rcteams.model import Signature
from rcteams.normal_form import (
    all_might_atoms,
    canonical_bottom,
    dnf,
    expand_negations,
    might_atoms,
    pad,
    remove_redundancy,
    shape_check,
    to_normal_form,
)
from rcteams.semantics import evaluate
from rcteams.syntax import Atom, Dia, desugar, parse, random_formula, to_text

COIN = Signature.parse("A=0,1; C=heads,tails,none")


def test_redundant_antecedent_value_is_dropped():
    nf = to_normal_form(parse("<A=1> (A=1 & C=heads)", COIN), COIN)
    assert to_text(nf) == "<A=1> C=heads"


def test_might_atom_is_a_fixed_point():
    atom = parse("<A=1> C=heads", COIN)
    assert to_normal_form(atom, COIN) == atom


def test_flat_atom_lists_every_might_atom_of_the_empty_antecedent():
    nf = to_normal_form(parse("A=1", COIN), COIN)
    assert shape_check(nf, COIN)
    atoms = {to_text(a) for a in might_atoms(nf)}
    assert atoms == {f"<> (A={a} & C={c})" for a in "01" for c in ("heads", "tails", "none")}


def test_contradictory_diamond_becomes_bottom():
    nf = to_normal_form(parse("<A=1> A=0", COIN), COIN)
    assert nf == canonical_bottom(COIN)


def test_pipeline_steps():
    body = parse("~(A=1 & C!=heads)", COIN)
    clauses = dnf(desugar(body, COIN))
    assert sorted(clauses) == [(("A", "1", False),), (("C", "heads", True),)]
    expanded = expand_negations(clauses, COIN)
    assert (("A", "0", True),) in expanded
    padded = pad([(("A", "0", True),)], COIN, frozenset())
    assert len(padded) == 3
    spec = InterventionSpec.parse("A=1")
    assert remove_redundancy(spec, (("A", "1", True), ("C", "none", True))) == {"C": "none"}
    assert remove_redundancy(spec, (("A", "0", True),)) is None



def test_all_might_atoms_count():
    # per variable: intervened on or described, with one of its values either way
    assert len(all_might_atoms(Signature.uniform(2, 2))) == 4 * 4
    assert len(all_might_atoms(COIN)) == 4 * 6


def test_semantics_preserved_on_every_small_model(models22, sig22):
    rng = random.Random(21)
    for _ in range(40):
        phi = random_formula(sig22, rng, depth=3)
        nf = to_normal_form(phi, sig22)
        assert shape_check(nf, sig22)
        assert all(evaluate(m, phi) == evaluate(m, nf) for m in models22)


three = st.integers(0, 100_000).map(
    lambda seed: next(iter(sample_models(Signature.uniform(3, 2), 1, ModelClass.parse("all"), seed=seed)))
)


@given(three, st.integers(0, 2**32 - 1))
def test_semantics_preserved_on_three_variables(model, seed):
    sig = model.signature
    phi = random_formula(sig, random.Random(seed), depth=3)
    nf = to_normal_form(phi, sig)
    assert shape_check(nf, sig)
    assert evaluate(model, phi) == evaluate(model, nf)


def test_conflicting_value_under_antecedent_is_impossible(models22, sig22):
    # <X0=a, X1=b>(X1=c & chi) and <X0=a, X1=b> F agree whenever b != c
    for chi in ("X0=0", "X0=1", "T"):
        for b, c in (("0", "1"), ("1", "0")):
            lhs = parse(f"<X0=0, X1={b}> (X1={c} & {chi})", sig22)
            rhs = parse(f"<X0=0, X1={b}> F", sig22)
            assert all(evaluate(m, lhs) == evaluate(m, rhs) for m in models22)
            assert all(evaluate(m, to_normal_form(lhs, sig22)) == evaluate(m, lhs) for m in models22)


def test_might_atoms_helper():
    atom = Dia(InterventionSpec.parse("A=0"), Atom("C", "none"))
    assert might_atoms(~atom & atom) == {atom}
