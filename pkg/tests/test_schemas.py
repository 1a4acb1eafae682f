import pytest

from rcteams.enumeration import axiom_soundness_sweep
from rcteams.model import EmptyParentsWarning, Signature, classify, validate_model
from rcteams.proofs import matches_schema
from rcteams.schemas import PROBES, SCHEMAS
from rcteams.semantics import evaluate
from rcteams.syntax import parse


def test_instance_counts_binary_pair(sig22):
    counts = {name: len(gen(sig22)) for name, gen in SCHEMAS.items()}
    # 9 interventions, two variables with two values each
    assert counts["I1"] == 9 * 2 * 2
    assert counts["I2"] == 9 * 2
    assert counts["I4"] == 2 * 2 * 3
    assert counts["I9"] == 4
    assert counts["R"] == 2


# SR is a derived theorem, not an axiom the checker accepts
@pytest.mark.parametrize("name", [n for n in SCHEMAS if n != "SR"])
def test_every_instance_is_recognised(name, sig22, sig32):
    for sig in (sig22, sig32):
        for phi in SCHEMAS[name](sig)[:300]:
            assert matches_schema(phi, sig, name), phi


def test_small_sweep_matches_frozen_counts(models22, sig22):
    report = axiom_soundness_sweep(sig22, models=models22)
    assert report.models == 1238
    assert report.distinct_profiles == 488
    violations = {name: report.violations(name) for name in SCHEMAS}
    assert violations == {**{name: 0 for name in SCHEMAS}, "I6": 904}
    assert all(report.families[p].violations > 0 for p in PROBES)


def test_weak_reversibility_fails_on_a_single_state():
    sig = Signature.uniform(2, 2)
    model = validate_model(sig, [{"X0": "0", "X1": "0"}], {"X0": (["X1"], [["0", "0"], ["0", "1"]])})
    phi = parse("<X0=1> X1=0 & <X1=0> X0=1 -> <> (X0=1 & X1=0)", sig)
    assert matches_schema(phi, sig, "I6")
    assert evaluate(model, parse("<X0=1> X1=0", sig))
    assert evaluate(model, parse("<X1=0> X0=1", sig))
    assert not evaluate(model, phi)
    c = classify(model)
    assert c.is_recursive and not c.is_total


def test_exogenous_axiom_fails_on_a_total_recursive_model():
    # X2 is a dummy parent of X0, and every context that could expose it also re-draws X0 through X1
    sig = Signature.uniform(3, 2)
    with pytest.warns(EmptyParentsWarning):
        model = validate_model(
            sig,
            [{"X0": "0", "X1": "1", "X2": "0"}],
            {
                "X0": (["X2"], [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]),
                "X1": ([], [["1"]]),
                "X2": (["X1"], [["0", "0"], ["1", "0"]]),
            },
        )
    c = classify(model)
    assert c.is_total and c.is_recursive
    failing = [phi for phi in SCHEMAS["I8"](sig) if not evaluate(model, phi)]
    assert failing
    assert evaluate(model, parse("<X1=1, X2=0> X0=1", sig))
    assert not evaluate(model, parse("<> X0=1", sig))


def test_coin_is_a_composition_counterexample(fixtures):
    coin = fixtures["coin"]
    assert not evaluate(coin, parse("A=1 & C=heads -> [A=1] C=heads", coin.signature))
