import random

from hypothesis import given
from hypothesis import strategies as st

from oracles import satisfies
from rcteams.enumeration import ModelClass, sample_models
from rcteams.model import Signature, classify
from rcteams.semantics import body_bits, compile_formula, evaluate
from rcteams.syntax import Box, Dia, Neg, parse, random_formula


def test_coin_facts(fixtures):
    coin = fixtures["coin"]
    assert evaluate(coin, parse("A=1 & C=heads", coin.signature))
    assert not evaluate(coin, parse("[A=1] C=heads", coin.signature))
    assert evaluate(coin, parse("<A=1> C=tails", coin.signature))
    assert evaluate(coin, parse("[A=0] C=none", coin.signature))


def test_team_level_inequality_is_negated_atom(fixtures):
    annbob = fixtures["annbob"]
    sig = annbob.signature
    after = parse("[A=1] C!=heads", sig)  # inside a modality: every member differs
    assert not evaluate(annbob, after)
    assert evaluate(annbob, parse("C!=tails", sig))
    # over the two-member team C!=heads means "not all members are heads"
    two = parse("<A=1> C=heads & <A=1> C=tails", sig)
    assert evaluate(annbob, two)


def test_body_bits_match_singleton_semantics():
    sig = Signature.parse("A=0,1; C=h,t,n")
    phi = parse("A=1 -> C!=h", sig)
    bits = body_bits(phi, sig)
    expected = [i for i, s in enumerate(sig.assignments()) if not (s[0] == 1 and s[1] == 0)]
    assert [i for i in range(sig.n_assignments) if bits >> i & 1] == expected


def test_evaluate_matches_set_oracle_on_every_small_model(models22, sig22):
    rng = random.Random(5)
    formulas = [random_formula(sig22, rng, depth=3) for _ in range(25)]
    for model in models22[::7]:
        for phi in formulas:
            assert evaluate(model, phi) == satisfies(model, phi)


three = st.integers(0, 100_000).map(
    lambda seed: next(iter(sample_models(Signature.uniform(3, 2), 1, ModelClass.parse("all"), seed=seed)))
)


@given(three, st.integers(0, 2**32 - 1))
def test_evaluate_matches_set_oracle(model, seed):
    phi = random_formula(model.signature, random.Random(seed), depth=3)
    assert evaluate(model, phi) == satisfies(model, phi)


@given(three, st.integers(0, 2**32 - 1))
def test_diamond_is_dual_of_box(model, seed):
    rng = random.Random(seed)
    sig = model.signature
    box = random_formula(sig, rng, depth=2)
    while not isinstance(box, Box):
        box = random_formula(sig, rng, depth=2)
    assert evaluate(model, Dia(box.spec, box.body)) == (not evaluate(model, Box(box.spec, Neg(box.body))))


def test_flatness_on_nonempty_teams(models22, sig22):
    for model in models22:
        if not model.team:
            continue
        for text in ("X0=0", "X0=1 & X1=0"):
            assert evaluate(model, parse(text, sig22)) == evaluate(model, parse(f"[] ({text})", sig22))


def test_box_and_diamond_coincide_on_deterministic_singletons(models22, sig22):
    rng = random.Random(9)
    bodies = [random_formula(sig22, rng, depth=2, modal=False) for _ in range(10)]
    for model in models22:
        c = classify(model)
        if len(model.team) != 1 or not (c.is_deterministic and c.is_total and c.is_recursive):
            continue
        for spec_text in ("", "X0=0", "X1=1", "X0=1,X1=0"):
            for body in bodies:
                b = parse(f"[{spec_text}] ({body})", sig22)
                assert evaluate(model, b) == evaluate(model, Dia(b.spec, b.body))


def test_compiled_formula_is_pure(fixtures):
    game = fixtures["game"]
    phi = parse("[L=1] (R=1 -> C_R!=n)", game.signature)
    c = compile_formula(phi, game.signature)
    assert {c.on(game) for _ in range(3)} == {True}
    assert ((0,), (1,)) in c.specs
