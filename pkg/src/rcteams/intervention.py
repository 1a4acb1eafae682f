"""Interventions ``do(X=x)`` on relational causal teams.

Two algorithms with the same result:

* :func:`intervene_general` filters the whole assignment space through the
  declarative clause (restricted laws, forced values, preserved
  nondescendants).  Works for cyclic models.
* :func:`intervene_recursive` walks the variables in topological order,
  keeping each member's values on the nondescendants of ``X`` and branching
  over the allowed values of every other descendant.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from rcteams import _kernels
from rcteams.model import (
    Assignment,
    ModelError,
    NotRecursiveError,
    RangeError,
    RelationalCausalTeam,
    Signature,
    _has_cycle,
)

DEFAULT_MAX_BITS = 20


class InconsistentIntervention(ModelError):
    def __init__(self, variable: str, values: Iterable[str]):
        vals = ", ".join(sorted(values))
        super().__init__(f"inconsistent intervention: {variable} set to {vals}")
        self.variable = variable


class InterventionTooLarge(ModelError):
    def __init__(self, n_assignments: int, max_bits: int):
        super().__init__(
            f"general intervention would scan {n_assignments} assignments "
            f"(limit 2**{max_bits}); use the recursive algorithm or raise max_bits"
        )
        self.n_assignments = n_assignments


@dataclass(frozen=True)
class InterventionSpec:
    """A consistent antecedent ``X=x``, stored as name pairs sorted by variable name.

    Repeated clauses with equal values collapse, so specs compare as multisets.
    """

    clauses: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        seen: dict[str, set[str]] = {}
        for var, val in self.clauses:
            seen.setdefault(str(var), set()).add(str(val))
        for var, vals in seen.items():
            if len(vals) > 1:
                raise InconsistentIntervention(var, vals)
        object.__setattr__(self, "clauses", tuple(sorted((v, next(iter(x))) for v, x in seen.items())))

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, str]] | dict[str, str] = ()) -> InterventionSpec:
        if isinstance(pairs, dict):
            pairs = pairs.items()
        return cls(tuple((str(a), str(b)) for a, b in pairs))

    @classmethod
    def parse(cls, text: str) -> InterventionSpec:
        """Parse ``"X=x, Y=y"``; the empty string is the empty intervention."""
        pairs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            var, sep, val = part.partition("=")
            if not sep or not var.strip() or not val.strip():
                raise ModelError(f"expected VAR=VALUE, got {part!r}")
            pairs.append((var.strip(), val.strip()))
        return cls(tuple(pairs))

    def __bool__(self):
        return bool(self.clauses)

    def __len__(self):
        return len(self.clauses)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.clauses)

    def as_dict(self) -> dict[str, str]:
        return dict(self.clauses)

    def extend(self, other: InterventionSpec) -> InterventionSpec:
        return InterventionSpec(self.clauses + other.clauses)

    def resolve(self, sig: Signature) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Variable and value indices, ordered by variable index."""
        pairs = sorted((sig.index(v), sig.value_index(v, x)) for v, x in self.clauses)
        return tuple(p for p, _ in pairs), tuple(x for _, x in pairs)

    def __str__(self):
        return ",".join(f"{v}={x}" for v, x in self.clauses)


def _restricted_laws(model: RelationalCausalTeam, xs: Iterable[int]):
    xs = set(xs)
    return tuple(law for law in model.laws if law.var not in xs)


def intervened_bits(model: RelationalCausalTeam, xcols: tuple[int, ...], xvals: tuple[int, ...]) -> int:
    """Bitset of the intervened team, memoized on the model.

    Always computed by the general clause through the array kernels; the
    empty intervention returns the team itself.
    """
    if not xcols:
        return model.team_bits
    key = ("iv", xcols, xvals)
    hit = model._memo.get(key)
    if hit is not None:
        return hit
    sig = model.signature
    packed = model.packed
    active = np.array([law.var not in xcols for law in model.laws], dtype=np.bool_)
    nondesc = sorted(set(range(sig.n_vars)) - model.descendant_indices(xcols))
    ncols = np.array(nondesc, dtype=np.int64)
    nradix = np.array([sig.sizes[i] for i in nondesc], dtype=np.int64)
    mask = _kernels.intervened_mask(
        sig.table, packed.var, packed.card, packed.par, packed.npar, packed.stride, packed.off,
        packed.rel, active, np.array(xcols, dtype=np.int64), np.array(xvals, dtype=np.int64),
        ncols, nradix, model.team_indices,
    )
    bits = _kernels.mask_to_bits(mask)
    model._memo[key] = bits
    return bits


def _bits_to_team(sig: Signature, bits: int) -> frozenset[Assignment]:
    return frozenset(sig.decode(i) for i in _kernels.bits_to_indices(bits))


def intervene_general(
    model: RelationalCausalTeam, iv: InterventionSpec, max_bits: int = DEFAULT_MAX_BITS
) -> RelationalCausalTeam:
    """Intervene by filtering every assignment of the signature."""
    sig = model.signature
    xcols, xvals = iv.resolve(sig)
    if not xcols:
        return model
    if sig.n_assignments > 1 << max_bits:
        raise InterventionTooLarge(sig.n_assignments, max_bits)
    bits = intervened_bits(model, xcols, xvals)
    return RelationalCausalTeam(sig, _bits_to_team(sig, bits), _restricted_laws(model, xcols))


def topological_order(model: RelationalCausalTeam) -> tuple[int, ...]:
    n = model.signature.n_vars
    if _has_cycle(n, model.children):
        raise NotRecursiveError("the causal graph has a cycle")
    indeg = [len(model.parents(v)) for v in range(n)]
    ready = [v for v in range(n) if indeg[v] == 0]
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for c in model.children.get(v, ()):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return tuple(out)


def single_assignment_outcome(
    s: Assignment, model: RelationalCausalTeam, iv: InterventionSpec
) -> frozenset[Assignment]:
    """All assignments reachable from ``s`` under ``do(X=x)``.

    The result agrees with ``x`` on ``X`` and with ``s`` on every
    nondescendant of ``X``; the remaining descendants take every value their
    (unsevered) laws allow, parents first.  If ``s`` itself violates a law of a
    nondescendant the outcome is empty.
    """
    order = topological_order(model)
    xcols, xvals = iv.resolve(model.signature)
    forced = dict(zip(xcols, xvals))
    desc = model.descendant_indices(xcols)
    for law in model.laws:
        if law.var not in desc and not law.admits(s):
            return frozenset()
    partial: list[list[int]] = [list(s)]
    for v in order:
        if v in forced:
            for t in partial:
                t[v] = forced[v]
        elif v in desc:
            law = model.law_map[v]
            grown = []
            for t in partial:
                for y in sorted(law.allowed(tuple(t[p] for p in law.parents))):
                    u = list(t)
                    u[v] = y
                    grown.append(u)
            partial = grown
            if not partial:
                break
    return frozenset(tuple(t) for t in partial)


def intervene_recursive(model: RelationalCausalTeam, iv: InterventionSpec) -> RelationalCausalTeam:
    """Intervene member by member; requires an acyclic causal graph."""
    topological_order(model)
    xcols, _ = iv.resolve(model.signature)
    team: set[Assignment] = set()
    for s in model.team:
        team |= single_assignment_outcome(s, model, iv)
    return RelationalCausalTeam(model.signature, frozenset(team), _restricted_laws(model, xcols))


def is_recursive(model: RelationalCausalTeam) -> bool:
    return not _has_cycle(model.signature.n_vars, model.children)


def intervene(
    model: RelationalCausalTeam, iv: InterventionSpec, force_general: bool = False
) -> RelationalCausalTeam:
    """Dispatch to the recursive algorithm when possible."""
    if force_general or not is_recursive(model):
        return intervene_general(model, iv)
    return intervene_recursive(model, iv)


def all_specs(sig: Signature, variables: Iterable[int] | None = None):
    """Every intervention over the given variables (default: all), as index pairs.

    Each variable is either left alone or set to one of its values.
    """
    vs = sorted(range(sig.n_vars) if variables is None else variables)
    choices = [(None,) + tuple(range(sig.sizes[v])) for v in vs]
    for pick in itertools.product(*choices):
        cols = tuple(v for v, x in zip(vs, pick) if x is not None)
        vals = tuple(x for x in pick if x is not None)
        yield cols, vals


__all__ = [
    "DEFAULT_MAX_BITS",
    "InconsistentIntervention",
    "InterventionSpec",
    "InterventionTooLarge",
    "RangeError",
    "all_specs",
    "intervene",
    "intervene_general",
    "intervene_recursive",
    "intervened_bits",
    "is_recursive",
    "single_assignment_outcome",
    "topological_order",
]
