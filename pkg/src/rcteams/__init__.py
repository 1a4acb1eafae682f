"""Relational causal teams: counterfactuals over indeterministic causal models."""

from rcteams.canonical import TheoryOracle, canonical_team, truth_lemma_roundtrip
from rcteams.causes import CauseQuery, direct_cause_formula, direct_causes, is_direct_cause
from rcteams.enumeration import (
    ModelClass,
    axiom_soundness_sweep,
    count_models,
    entails,
    enumerate_models,
    is_valid,
    sample_models,
)
from rcteams.intervention import InterventionSpec, intervene, intervene_general, intervene_recursive
from rcteams.io import load, load_fixture, save
from rcteams.model import Law, RelationalCausalTeam, Signature, classify, validate_model
from rcteams.normal_form import shape_check, to_normal_form
from rcteams.proofs import check_proof, discharge, match_axiom, parse_script
from rcteams.semantics import evaluate
from rcteams.syntax import parse, to_text

__version__ = "0.1.0"

__all__ = [
    "CauseQuery",
    "InterventionSpec",
    "Law",
    "ModelClass",
    "RelationalCausalTeam",
    "Signature",
    "TheoryOracle",
    "axiom_soundness_sweep",
    "canonical_team",
    "check_proof",
    "classify",
    "count_models",
    "direct_cause_formula",
    "direct_causes",
    "discharge",
    "entails",
    "enumerate_models",
    "evaluate",
    "intervene",
    "intervene_general",
    "intervene_recursive",
    "is_direct_cause",
    "is_valid",
    "load",
    "load_fixture",
    "match_axiom",
    "parse",
    "parse_script",
    "sample_models",
    "save",
    "shape_check",
    "to_normal_form",
    "to_text",
    "truth_lemma_roundtrip",
    "validate_model",
]
