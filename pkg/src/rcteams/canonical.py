"""Rebuild a model from the might-facts of its own theory.

The theory of a model is queried through ``TheoryOracle``.  The rebuilt team
contains the assignments whose full description might hold; ``X`` is a parent
of ``Y`` when fixing every other variable and then also ``X`` changes whether
some value of ``Y`` might come about; the law of ``Y`` collects the values
that might occur once every other variable is fixed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from rcteams.intervention import InterventionSpec
from rcteams.model import Law, RelationalCausalTeam, Signature, model_from_indices
from rcteams.normal_form import all_might_atoms
from rcteams.semantics import evaluate
from rcteams.syntax import And, Atom, Dia, Formula, Neg, conj, random_formula, to_text


class WellDefinednessViolation(RuntimeError):
    """Two extensions of the same parent values disagree about a law row."""


class TheoryOracle:
    """Membership in the theory of a model, memoised."""

    def __init__(self, model: RelationalCausalTeam):
        self.model = model
        self._memo: dict[Formula, bool] = {}

    def __contains__(self, phi: Formula) -> bool:
        hit = self._memo.get(phi)
        if hit is None:
            hit = self._memo[phi] = evaluate(self.model, phi)
        return hit

    @property
    def signature(self) -> Signature:
        return self.model.signature


def _spec(sig: Signature, pairs) -> InterventionSpec:
    return InterventionSpec(tuple((sig.variables[v], sig.ranges[v][x]) for v, x in pairs))


def _might(sig, pairs, y, yv) -> Dia:
    return Dia(_spec(sig, pairs), Atom(sig.variables[y], sig.ranges[y][yv]))


def _assignments(sig: Signature, cols):
    return itertools.product(*(range(sig.sizes[c]) for c in cols))


def canonical_parents(oracle: TheoryOracle, sig: Signature, y: int) -> tuple[int, ...]:
    out = []
    for x in range(sig.n_vars):
        if x == y:
            continue
        rest = [v for v in range(sig.n_vars) if v not in (x, y)]
        if any(
            And(_might(sig, zip(rest, w), y, yv), Neg(_might(sig, [*zip(rest, w), (x, xv)], y, yv))) in oracle
            or And(_might(sig, [*zip(rest, w), (x, xv)], y, yv), Neg(_might(sig, zip(rest, w), y, yv))) in oracle
            for w in _assignments(sig, rest)
            for xv in range(sig.sizes[x])
            for yv in range(sig.sizes[y])
        ):
            out.append(x)
    return tuple(out)


def canonical_law(oracle: TheoryOracle, sig: Signature, y: int, parents: tuple[int, ...]) -> Law:
    """Rows ``(pa, y)`` such that ``y`` might occur under every extension of ``pa``.

    Every extension is checked; disagreement raises ``WellDefinednessViolation``.
    """
    others = [v for v in range(sig.n_vars) if v != y]
    rows = set()
    for pa in _assignments(sig, parents):
        fixed = dict(zip(parents, pa))
        free = [v for v in others if v not in fixed]
        for yv in range(sig.sizes[y]):
            verdicts = set()
            for rest in _assignments(sig, free):
                w = {**fixed, **dict(zip(free, rest))}
                verdicts.add(_might(sig, sorted(w.items()), y, yv) in oracle)
            if len(verdicts) > 1:
                names = {sig.variables[p]: sig.ranges[p][v] for p, v in fixed.items()}
                raise WellDefinednessViolation(
                    f"{sig.variables[y]}={sig.ranges[y][yv]} under parents {names}: extensions disagree"
                )
            if verdicts.pop():
                rows.add((*pa, yv))
    return Law(y, parents, frozenset(rows))


def canonical_team(oracle: TheoryOracle, sig: Signature | None = None) -> RelationalCausalTeam:
    sig = sig or oracle.signature
    everything = range(sig.n_vars)
    team = []
    for s in sig.assignments():
        full = conj(Atom(sig.variables[v], sig.ranges[v][s[v]]) for v in everything)
        if Dia(InterventionSpec(), full) in oracle:
            team.append(s)
    laws = []
    for y in everything:
        parents = canonical_parents(oracle, sig, y)
        if parents:
            laws.append(canonical_law(oracle, sig, y, parents))
    return model_from_indices(sig, team, laws)


@dataclass
class RoundTrip:
    original: RelationalCausalTeam
    rebuilt: RelationalCausalTeam
    atoms_checked: int = 0
    formulas_checked: int = 0
    atom_mismatches: list[Formula] = field(default_factory=list)
    formula_mismatches: list[Formula] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.atom_mismatches and not self.formula_mismatches

    def lines(self) -> list[str]:
        out = [
            f"might-atoms: {self.atoms_checked} checked, {len(self.atom_mismatches)} mismatches",
            f"random formulas: {self.formulas_checked} checked, {len(self.formula_mismatches)} mismatches",
        ]
        if not self.atom_mismatches:
            out.append("agreement on every might-atom: the two models satisfy the same formulas")
        out += [f"  differs: {to_text(phi)}" for phi in self.atom_mismatches + self.formula_mismatches]
        return out


def truth_lemma_roundtrip(
    model: RelationalCausalTeam,
    samples: int = 50,
    depth: int = 3,
    seed: int = 0,
) -> RoundTrip:
    """Rebuild ``model`` from its theory and compare the two on might-atoms and random formulas."""
    sig = model.signature
    rebuilt = canonical_team(TheoryOracle(model), sig)
    report = RoundTrip(model, rebuilt)
    for atom in all_might_atoms(sig):
        report.atoms_checked += 1
        if evaluate(model, atom) != evaluate(rebuilt, atom):
            report.atom_mismatches.append(atom)
    rng = random.Random(seed)
    for _ in range(samples):
        phi = random_formula(sig, rng, depth=depth)
        report.formulas_checked += 1
        if evaluate(model, phi) != evaluate(rebuilt, phi):
            report.formula_mismatches.append(phi)
    return report


def model_diff(a: RelationalCausalTeam, b: RelationalCausalTeam) -> list[str]:
    """Readable differences in team and laws; empty when identical."""
    sig = a.signature
    out = []
    for s in sorted(a.team - b.team):
        out.append(f"- member {sig.names(s)}")
    for s in sorted(b.team - a.team):
        out.append(f"+ member {sig.names(s)}")
    for v, name in enumerate(sig.variables):
        la, lb = a.law_of(name), b.law_of(name)
        if la == lb:
            continue
        pa = [sig.variables[p] for p in la.parents] if la else None
        pb = [sig.variables[p] for p in lb.parents] if lb else None
        if pa != pb:
            out.append(f"~ parents of {name}: {pa if pa is not None else 'exogenous'} -> {pb if pb is not None else 'exogenous'}")
        else:
            out.append(f"~ law of {name}: {len(la.relation)} rows -> {len(lb.relation)} rows")
    return out

