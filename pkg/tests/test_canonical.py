from rcteams.canonical import (
    TheoryOracle,
    WellDefinednessViolation,
    canonical_law,
    canonical_team,
    model_diff,
    truth_lemma_roundtrip,
)
from rcteams.causes import direct_causes
from rcteams.model import Signature, classify, validate_model
from rcteams.schemas import SCHEMAS
from rcteams.semantics import evaluate
from rcteams.syntax import parse

import pytest


def parents(model, var):
    law = model.law_of(var)
    return frozenset(model.signature.variables[p] for p in law.parents) if law else frozenset()


def test_coin_is_rebuilt_exactly(fixtures):
    coin = fixtures["coin"]
    rebuilt = canonical_team(TheoryOracle(coin))
    assert rebuilt.team == coin.team
    assert model_diff(coin, rebuilt) == []


def test_empty_team_rebuilds_all_exogenous():
    sig = Signature.parse("A=0,1; B=0,1")
    model = validate_model(sig, [], {"B": (["A"], [["0", "0"], ["1", "1"]])})
    rebuilt = canonical_team(TheoryOracle(model))
    assert rebuilt.team == frozenset() and rebuilt.laws == ()
    assert truth_lemma_roundtrip(model, samples=20).ok


def test_twocoin_recovers_dummy_parent(fixtures):
    rebuilt = canonical_team(TheoryOracle(fixtures["twocoin"]))
    assert parents(rebuilt, "O") == {"B"}


def test_annbob_loses_the_non_causal_parent(fixtures):
    annbob = fixtures["annbob"]
    rebuilt = canonical_team(TheoryOracle(annbob))
    assert parents(rebuilt, "C") == {"B"}
    assert model_diff(annbob, rebuilt) == ["~ parents of C: ['A', 'B'] -> ['B']"]
    # intervening on A still re-tosses the coin in the original, so the theories differ
    report = truth_lemma_roundtrip(annbob, samples=0)
    assert {str(a) for a in report.atom_mismatches} == {"<A=0> (B=1 & C=tails)", "<A=1> (B=1 & C=tails)"}
    # and the original falsifies an instance of weak reversibility, so its theory is not closed under the axioms
    assert any(not evaluate(annbob, phi) for phi in SCHEMAS["I6"](annbob.signature))


def test_round_trip_on_every_small_model(models22, sig22):
    for model in models22:
        report = truth_lemma_roundtrip(model, samples=5, seed=1)
        assert report.ok
        assert report.rebuilt.team == model.team
        for v in sig22.variables:
            assert parents(report.rebuilt, v) == direct_causes(model, v)
        if classify(model).is_recursive:
            assert classify(report.rebuilt).is_recursive


def test_round_trip_failures_need_an_unsound_instance(sample32):
    # every mismatch on three variables comes from a model falsifying some I6 or I8 instance
    sig = sample32[0].signature
    suspects = SCHEMAS["I6"](sig) + SCHEMAS["I8"](sig)
    for model in sample32[:150]:
        report = truth_lemma_roundtrip(model, samples=0)
        assert report.rebuilt.team == model.team
        if not report.ok:
            assert any(not evaluate(model, phi) for phi in suspects)


def test_rebuilt_members_satisfy_rebuilt_laws(sample32):
    for model in sample32[:80]:
        rebuilt = canonical_team(TheoryOracle(model))
        for law in rebuilt.laws:
            assert all(law.admits(s) for s in rebuilt.team)


def test_disagreeing_extensions_are_reported(fixtures):
    annbob = fixtures["annbob"]
    # forcing the wrong parent set makes the extensions of a parent value disagree
    with pytest.raises(WellDefinednessViolation):
        canonical_law(TheoryOracle(annbob), annbob.signature, 2, (0,))


def test_oracle_memo_is_transparent(fixtures):
    game = fixtures["game"]
    oracle = TheoryOracle(game)
    phi = parse("<L=1> C_R=h", game.signature)
    assert (phi in oracle) == (phi in oracle) == evaluate(game, phi)
