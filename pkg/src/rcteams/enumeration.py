"""Exhaustive and sampled enumeration of models over a small signature.

The raw search space for a signature is::

    prod over V of (1 + sum over P subset of Dom-{V} of 2**(|Ran P| * |Ran V|))
        * 2**|assignments|

(one factor per variable: exogenous, or a parent set and a relation), with
teams bounded by all subsets of the assignment space.  Two binary variables
give 21**2 * 16 = 7056; three give 293**3 * 256, far beyond exhaustive reach,
which is what :func:`sample_models` is for.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from rcteams import _kernels
from rcteams.intervention import all_specs, intervened_bits
from rcteams.model import (
    Law,
    ModelError,
    RelationalCausalTeam,
    Signature,
    _has_cycle,
    classify,
    pack_laws,
)
from rcteams.schemas import CLASS_OF, PROBES, SCHEMAS
from rcteams.semantics import compile_formula
from rcteams.syntax import Formula, to_text

DEFAULT_MAX_SPACE = 1_000_000


class SearchSpaceExceeded(ModelError):
    def __init__(self, size: int, cap: int):
        super().__init__(
            f"search space {size} exceeds the cap {cap}; raise --max-space / RCT_MAX_SPACE or sample instead"
        )
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class ModelClass:
    recursive: bool = False
    total: bool = False
    deterministic: bool = False

    @classmethod
    def parse(cls, text: str) -> ModelClass:
        """``"all"`` or a comma list of ``recursive``, ``total``, ``deterministic``."""
        flags = {p.strip() for p in text.split(",") if p.strip()} - {"all"}
        unknown = flags - {"recursive", "total", "deterministic"}
        if unknown:
            raise ValueError(f"unknown model class {', '.join(sorted(unknown))}")
        return cls("recursive" in flags, "total" in flags, "deterministic" in flags)

    def admits(self, model: RelationalCausalTeam) -> bool:
        c = classify(model)
        return (
            (c.is_recursive or not self.recursive)
            and (c.is_total or not self.total)
            and (c.is_deterministic or not self.deterministic)
        )

    def __str__(self):
        parts = [n for n in ("recursive", "total", "deterministic") if getattr(self, n)]
        return ",".join(parts) or "all"


ALL = ModelClass()


def default_max_space() -> int:
    return int(os.environ.get("RCT_MAX_SPACE", DEFAULT_MAX_SPACE))


@dataclass(frozen=True)
class EnumerationCaps:
    max_search_space: int = field(default_factory=default_max_space)
    progress_every: int = 0

    def __post_init__(self):
        if self.max_search_space <= 0 or self.progress_every < 0:
            raise ValueError("caps must be positive")


def _parent_sets(sig: Signature, v: int) -> list[tuple[int, ...]]:
    others = [u for u in range(sig.n_vars) if u != v]
    return [c for k in range(len(others) + 1) for c in itertools.combinations(others, k)]


def _rows(sig: Signature, parents: Sequence[int]) -> int:
    return int(np.prod([sig.sizes[p] for p in parents], dtype=np.int64)) if parents else 1


def search_space_size(sig: Signature) -> int:
    per_var = 1
    for v in range(sig.n_vars):
        per_var *= 1 + sum(2 ** (_rows(sig, p) * sig.sizes[v]) for p in _parent_sets(sig, v))
    return per_var * 2**sig.n_assignments


def search_space_formula(sig: Signature) -> str:
    factors = []
    for v in range(sig.n_vars):
        terms = " + ".join(f"2^{_rows(sig, p) * sig.sizes[v]}" for p in _parent_sets(sig, v))
        factors.append(f"(1 + {terms})")
    return " * ".join(factors) + f" * 2^{sig.n_assignments}"


def _relations(sig: Signature, v: int, parents: tuple[int, ...], cls: ModelClass) -> Iterator[frozenset]:
    """Relations for ``v`` in bitmask order, filtered row-wise by the class."""
    pas = list(itertools.product(*(range(sig.sizes[p]) for p in parents)))
    k = sig.sizes[v]
    cells = [pa + (y,) for pa in pas for y in range(k)]
    for mask in range(1 << len(cells)):
        ok = True
        if cls.total or cls.deterministic:
            for r in range(len(pas)):
                n = bin((mask >> (r * k)) & ((1 << k) - 1)).count("1")
                if (cls.total and n == 0) or (cls.deterministic and n > 1):
                    ok = False
                    break
        if ok:
            yield frozenset(c for i, c in enumerate(cells) if mask >> i & 1)


def compatible_indices(sig: Signature, laws: Sequence[Law]) -> np.ndarray:
    if not laws:
        return np.arange(sig.n_assignments, dtype=np.int64)
    p = pack_laws(sig, laws)
    active = np.ones(len(laws), dtype=np.bool_)
    mask = _kernels.compat_mask(sig.table, p.var, p.card, p.par, p.npar, p.stride, p.off, p.rel, active)
    return np.flatnonzero(mask).astype(np.int64)


def law_components(sig: Signature, cls: ModelClass = ALL, allow_endogenous: bool = True) -> Iterator[tuple[Law, ...]]:
    """Every law component admitted by the class, in canonical order."""
    n = sig.n_vars
    endo_sets = [()] if not allow_endogenous else [c for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    for endo in endo_sets:
        for parents in itertools.product(*(_parent_sets(sig, v) for v in endo)):
            if cls.recursive:
                children: dict[int, list[int]] = {}
                for v, ps in zip(endo, parents):
                    for p in ps:
                        children.setdefault(p, []).append(v)
                if _has_cycle(n, children):
                    continue
            rels = [list(_relations(sig, v, ps, cls)) for v, ps in zip(endo, parents)]
            for choice in itertools.product(*rels):
                yield tuple(Law(v, ps, r) for v, ps, r in zip(endo, parents, choice))


def enumerate_models(
    sig: Signature,
    cls: ModelClass = ALL,
    caps: EnumerationCaps | None = None,
    include_empty: bool = True,
    allow_endogenous: bool = True,
) -> Iterator[RelationalCausalTeam]:
    """Yield every model of the class exactly once, in canonical order.

    Order: endogenous sets by size then lexicographically, parent functions
    lexicographically, relations by bitmask, teams by bitmask over the
    compatible assignments.
    """
    caps = caps or EnumerationCaps()
    size = search_space_size(sig) if allow_endogenous else 2**sig.n_assignments
    if size > caps.max_search_space:
        raise SearchSpaceExceeded(size, caps.max_search_space)
    for laws in law_components(sig, cls, allow_endogenous):
        compat = [sig.decode(int(i)) for i in compatible_indices(sig, laws)]
        for mask in range(0 if include_empty else 1, 1 << len(compat)):
            team = frozenset(s for i, s in enumerate(compat) if mask >> i & 1)
            yield RelationalCausalTeam(sig, team, laws)


def count_models(sig: Signature, cls: ModelClass = ALL, include_empty: bool = True) -> int:
    """Number of models without materialising them."""
    total = 0
    for laws in law_components(sig, cls):
        m = len(compatible_indices(sig, laws))
        total += 2**m - (0 if include_empty else 1)
    return total


def sample_models(
    sig: Signature,
    n: int,
    cls: ModelClass = ALL,
    seed: int = 0,
    include_empty: bool = True,
) -> Iterator[RelationalCausalTeam]:
    """``n`` seeded random models of the class (with repetition possible).

    Each variable is exogenous with probability 1/3, otherwise gets a uniform
    random parent set and a relation drawn row by row under the class
    constraints.  Cyclic draws are redrawn when the class is recursive.  The
    team is a uniform subset of the compatible assignments.
    """
    rng = random.Random(seed)
    made = 0
    while made < n:
        laws = []
        for v in range(sig.n_vars):
            if rng.random() < 1 / 3:
                continue
            parents = rng.choice(_parent_sets(sig, v))
            rows = []
            for pa in itertools.product(*(range(sig.sizes[p]) for p in parents)):
                k = sig.sizes[v]
                if cls.deterministic:
                    choices = [[y] for y in range(k)] + ([] if cls.total else [[]])
                    ys = rng.choice(choices)
                else:
                    ys = [y for y in range(k) if rng.random() < 0.5]
                    while cls.total and not ys:
                        ys = [y for y in range(k) if rng.random() < 0.5]
                rows.extend(pa + (y,) for y in ys)
            laws.append(Law(v, parents, frozenset(rows)))
        model_laws = tuple(laws)
        if cls.recursive:
            children: dict[int, list[int]] = {}
            for law in model_laws:
                for p in law.parents:
                    children.setdefault(p, []).append(law.var)
            if _has_cycle(sig.n_vars, children):
                continue
        compat = [sig.decode(int(i)) for i in compatible_indices(sig, model_laws)]
        team = frozenset(s for s in compat if rng.random() < 0.5)
        if not team and not include_empty:
            continue
        made += 1
        yield RelationalCausalTeam(sig, team, model_laws)


# -- validity and entailment -------------------------------------------------


@dataclass
class Verdict:
    holds: bool
    counterexample: RelationalCausalTeam | None = None
    models_checked: int = 0

    def __bool__(self):
        return self.holds


def _models(sig, cls, caps, models):
    return models if models is not None else enumerate_models(sig, cls, caps)


def entails(
    gamma: Iterable[Formula],
    phi: Formula,
    sig: Signature,
    cls: ModelClass = ALL,
    caps: EnumerationCaps | None = None,
    models: Iterable[RelationalCausalTeam] | None = None,
) -> Verdict:
    """Does every model of the class that satisfies ``gamma`` satisfy ``phi``?"""
    premises = [compile_formula(g, sig) for g in gamma]
    goal = compile_formula(phi, sig)
    checked = 0
    for model in _models(sig, cls, caps, models):
        checked += 1
        if all(p.on(model) for p in premises) and not goal.on(model):
            return Verdict(False, model, checked)
    return Verdict(True, None, checked)


def is_valid(
    phi: Formula,
    sig: Signature,
    cls: ModelClass = ALL,
    caps: EnumerationCaps | None = None,
    models: Iterable[RelationalCausalTeam] | None = None,
) -> Verdict:
    return entails((), phi, sig, cls, caps, models)


# -- soundness sweep ---------------------------------------------------------


@dataclass
class FamilyReport:
    family: str
    model_class: str
    instances: int
    models: int = 0
    evaluations: int = 0
    violations: int = 0
    witness_formula: str | None = None
    witness_model: RelationalCausalTeam | None = None
    probe: bool = False

    @property
    def ok(self) -> bool:
        return self.violations > 0 if self.probe else self.violations == 0

    def as_dict(self) -> dict:
        from rcteams.io import model_to_document

        return {
            "family": self.family,
            "class": self.model_class,
            "probe": self.probe,
            "instances": self.instances,
            "models": self.models,
            "evaluations": self.evaluations,
            "violations": self.violations,
            "witness_formula": self.witness_formula,
            "witness_model": model_to_document(self.witness_model) if self.witness_model else None,
        }


@dataclass
class SweepReport:
    signature: Signature
    mode: str
    search_space: int
    families: dict[str, FamilyReport]
    models: int = 0
    distinct_profiles: int = 0
    seconds: float = 0.0

    def violations(self, family: str) -> int:
        return self.families[family].violations

    def lines(self) -> list[str]:
        out = [
            f"signature: {self.signature}",
            f"mode: {self.mode}; models: {self.models}; distinct intervention profiles: {self.distinct_profiles}",
            f"search space: {search_space_formula(self.signature)} = {self.search_space}",
        ]
        for f in self.families.values():
            tag = "probe" if f.probe else "axiom"
            status = "ok" if f.ok else ("NO COUNTEREXAMPLE" if f.probe else "VIOLATED")
            out.append(
                f"{f.family:>26} [{tag}, {f.model_class}] {f.instances} instances, "
                f"{f.models} models: {f.violations} violations ({status})"
            )
            if f.witness_formula:
                out.append(f"{'':>28}first: {f.witness_formula}")
        total = sum(f.violations for f in self.families.values() if not f.probe)
        out.append(f"{total} violations")
        return out

    def as_dict(self) -> dict:
        return {
            "signature": str(self.signature),
            "mode": self.mode,
            "search_space": self.search_space,
            "search_space_formula": search_space_formula(self.signature),
            "models": self.models,
            "distinct_profiles": self.distinct_profiles,
            "seconds": round(self.seconds, 3),
            "families": {k: f.as_dict() for k, f in self.families.items()},
            "violations": sum(f.violations for f in self.families.values() if not f.probe),
        }


class _Family:
    """Compiled instances of one family with a per-instance memo.

    An instance's truth value depends only on the intervened teams it reads,
    so results are cached under that tuple of bitsets.
    """

    def __init__(self, name: str, formulas: list[Formula], sig: Signature, spec_index: dict, probe: bool):
        self.name = name
        self.formulas = formulas
        self.compiled = [compile_formula(f, sig) for f in formulas]
        self.keys = [tuple(sorted(spec_index[k] for k in c.specs)) for c in self.compiled]
        self.memo: list[dict] = [{} for _ in formulas]
        self.probe = probe
        self.spec_index = spec_index

    def run(self, profile: tuple[int, ...]) -> int | None:
        """Index of the first falsified instance; ``self.last`` holds the violation count."""
        first = None
        bad = 0
        get = _ProfileLookup(profile, self.spec_index)
        for i, (c, key, memo) in enumerate(zip(self.compiled, self.keys, self.memo)):
            k = tuple(profile[j] for j in key)
            hit = memo.get(k)
            if hit is None:
                hit = memo[k] = c(get)
            if not hit:
                bad += 1
                if first is None:
                    first = i
        self.last = bad
        return first


class _ProfileLookup:
    __slots__ = ("profile", "index")

    def __init__(self, profile, index):
        self.profile = profile
        self.index = index

    def __call__(self, xcols, xvals):
        return self.profile[self.index[(xcols, xvals)]]


def axiom_soundness_sweep(
    sig: Signature,
    models: Iterable[RelationalCausalTeam] | None = None,
    cls: ModelClass = ALL,
    caps: EnumerationCaps | None = None,
    families: Sequence[str] | None = None,
    probes: Sequence[str] | None = None,
    mode: str = "exhaustive",
    progress: Callable[[int], None] | None = None,
) -> SweepReport:
    """Evaluate every schema instance on every model.

    ``R`` is only checked on recursive models and ``SR`` only on total
    recursive ones; everything else on all models supplied.  Probe families
    are expected to have violations.
    """
    start = time.perf_counter()
    families = list(SCHEMAS) if families is None else list(families)
    probes = list(PROBES) if probes is None else list(probes)
    spec_list = list(all_specs(sig))
    spec_index = {k: i for i, k in enumerate(spec_list)}
    fams = [_Family(f, SCHEMAS[f](sig), sig, spec_index, False) for f in families]
    fams += [_Family(p, PROBES[p](sig), sig, spec_index, True) for p in probes]
    reports = {
        f.name: FamilyReport(f.name, CLASS_OF.get(f.name, str(cls)), len(f.formulas), probe=f.probe)
        for f in fams
    }
    wanted = {f.name: ModelClass.parse(CLASS_OF[f.name]) for f in fams if f.name in CLASS_OF}
    source = _models(sig, cls, caps, models)
    seen_profiles: set = set()
    n_models = 0
    for model in source:
        n_models += 1
        if progress and n_models % 1000 == 0:
            progress(n_models)
        c = classify(model)
        profile = tuple(intervened_bits(model, *k) for k in spec_list)
        key = (profile, c.is_recursive, c.is_total)
        seen_profiles.add(key)
        for fam in fams:
            need = wanted.get(fam.name)
            if need and ((need.recursive and not c.is_recursive) or (need.total and not c.is_total)):
                continue
            rep = reports[fam.name]
            rep.models += 1
            rep.evaluations += len(fam.formulas)
            first = fam.run(profile)
            if first is not None:
                rep.violations += fam.last
                if rep.witness_model is None:
                    rep.witness_model = model
                    rep.witness_formula = to_text(fam.formulas[first])
    return SweepReport(
        sig,
        mode,
        search_space_size(sig),
        reports,
        n_models,
        len(seen_profiles),
        time.perf_counter() - start,
    )
