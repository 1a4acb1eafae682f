"""Direct causation and the notions defined from it."""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from dataclasses import dataclass

from rcteams.intervention import InterventionSpec, intervened_bits
from rcteams.model import ModelError, RelationalCausalTeam, Signature
from rcteams.syntax import Atom, Dia, Formula, Iff, Implies, Neg, conj, disj


@dataclass(frozen=True)
class CauseQuery:
    """Does ``source`` directly cause ``target``?"""

    source: str
    target: str

    def __post_init__(self):
        if self.source == self.target:
            raise ModelError(f"a direct-cause query needs two distinct variables, got {self.source} twice")

    def context(self, sig: Signature) -> tuple[str, ...]:
        sig.index(self.source)
        sig.index(self.target)
        return tuple(v for v in sig.variables if v not in (self.source, self.target))


def direct_cause_disjuncts(q: CauseQuery, sig: Signature) -> Iterator[Formula]:
    """One disjunct per (context values, source value, target value), in signature order."""
    ctx = q.context(sig)
    ranges = [sig.ranges[sig.index(v)] for v in ctx]
    for z in itertools.product(*ranges):
        zpairs = tuple(zip(ctx, z))
        for x in sig.ranges[sig.index(q.source)]:
            for y in sig.ranges[sig.index(q.target)]:
                target = Atom(q.target, y)
                both = Dia(InterventionSpec(zpairs + ((q.source, x),)), target)
                ctx_only = Dia(InterventionSpec(zpairs), target)
                yield Neg(Iff(both, ctx_only))


def direct_cause_formula(q: CauseQuery, sig: Signature) -> Formula:
    return disj(direct_cause_disjuncts(q, sig))


def _might_range(model: RelationalCausalTeam, xcols, xvals, target: int) -> frozenset[int]:
    sig = model.signature
    bits = intervened_bits(model, xcols, xvals)
    return frozenset(y for y in range(sig.sizes[target]) if bits & sig.atom_bits(target, y))


def is_direct_cause(model: RelationalCausalTeam, q: CauseQuery) -> bool:
    """Compare the values the target might take under ``do(Z=z)`` and ``do(Z=z, X=x)``."""
    sig = model.signature
    ctx = [sig.index(v) for v in q.context(sig)]
    src, tgt = sig.index(q.source), sig.index(q.target)
    for z in itertools.product(*(range(sig.sizes[v]) for v in ctx)):
        base = _might_range(model, tuple(ctx), z, tgt)
        for x in range(sig.sizes[src]):
            cols = sorted(zip(ctx + [src], z + (x,)))
            xcols = tuple(c for c, _ in cols)
            xvals = tuple(v for _, v in cols)
            if _might_range(model, xcols, xvals, tgt) != base:
                return True
    return False


def direct_causes(model: RelationalCausalTeam, target: str) -> frozenset[str]:
    return frozenset(
        v for v in model.signature.variables if v != target and is_direct_cause(model, CauseQuery(v, target))
    )


def exo_formula(var: str, sig: Signature) -> Formula:
    """No other variable directly causes ``var`` (``T`` if there are none)."""
    sig.index(var)
    return conj(Neg(direct_cause_formula(CauseQuery(x, var), sig)) for x in sig.variables if x != var)


def end_formula(var: str, sig: Signature) -> Formula:
    return Neg(exo_formula(var, sig))


def recursivity_instances(sig: Signature, n_max: int) -> list[Formula]:
    """``(X1~>X2 & ... & Xn-1~>Xn) -> ~Xn~>X1`` for every chain of distinct variables."""
    if n_max < 2:
        raise ValueError("chains need at least two variables")
    out = []
    for n in range(2, min(n_max, sig.n_vars) + 1):
        for chain in itertools.permutations(sig.variables, n):
            links = conj(direct_cause_formula(CauseQuery(a, b), sig) for a, b in zip(chain, chain[1:]))
            back = direct_cause_formula(CauseQuery(chain[-1], chain[0]), sig)
            out.append(Implies(links, Neg(back)))
    return out


def non_dummy_parents(model: RelationalCausalTeam, var: str) -> frozenset[str]:
    """Declared parents whose value can change the allowed set of ``var``.

    A parent is a dummy argument when, for every choice of the other parents'
    values, the allowed values of ``var`` do not depend on it.
    """
    sig = model.signature
    law = model.law_of(var)
    if law is None:
        return frozenset()
    out = set()
    for k, p in enumerate(law.parents):
        others = [q for j, q in enumerate(law.parents) if j != k]
        for rest in itertools.product(*(range(sig.sizes[q]) for q in others)):
            seen = set()
            for x in range(sig.sizes[p]):
                pa = rest[:k] + (x,) + rest[k:]
                seen.add(law.allowed(pa))
            if len(seen) > 1:
                out.add(sig.variables[p])
                break
    return frozenset(out)


__all__ = [
    "CauseQuery",
    "direct_cause_disjuncts",
    "direct_cause_formula",
    "direct_causes",
    "end_formula",
    "exo_formula",
    "is_direct_cause",
    "non_dummy_parents",
    "recursivity_instances",
]
