"""Signatures, teams, causal laws and relational causal teams.

Values are stored as indices into each variable's ordered range, so an
assignment is a fixed-width tuple of ints and a team is a frozenset of such
tuples.  Names only appear at the I/O boundary.
"""

from __future__ import annotations

import itertools
import re
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

Assignment = tuple[int, ...]


class ModelError(Exception):
    """Base class for malformed signatures and models."""


class UnknownVariableError(ModelError):
    def __init__(self, name: str):
        super().__init__(f"unknown variable {name!r}")
        self.name = name


class RangeError(ModelError):
    def __init__(self, variable: str, value: object, where: str = ""):
        msg = f"value {value!r} is not in the range of {variable}"
        super().__init__(f"{msg} ({where})" if where else msg)
        self.variable = variable
        self.value = value


class SelfParentError(ModelError):
    def __init__(self, variable: str):
        super().__init__(f"{variable} is declared as its own parent")
        self.variable = variable


class CompatibilityError(ModelError):
    """A team member violates the law of ``variable``."""

    def __init__(self, assignment: Mapping[str, str], variable: str):
        shown = ", ".join(f"{k}={v}" for k, v in assignment.items())
        super().__init__(f"team member ({shown}) violates the law of {variable}")
        self.assignment = dict(assignment)
        self.variable = variable


class ModelValidationError(ModelError):
    """Raised by :func:`validate_model`; ``problems`` lists every violation."""

    def __init__(self, problems: list[ModelError]):
        super().__init__("; ".join(str(p) for p in problems))
        self.problems = problems


class NotRecursiveError(ModelError):
    pass


class EmptyParentsWarning(UserWarning):
    """An endogenous variable was declared with no parents."""


_NAME = re.compile(r"^[A-Za-z0-9_']+$")


@dataclass(frozen=True)
class Signature:
    """Ordered variables, each with an ordered nonempty list of value names."""

    variables: tuple[str, ...]
    ranges: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(str(v) for v in self.variables))
        object.__setattr__(self, "ranges", tuple(tuple(str(x) for x in r) for r in self.ranges))
        if len(self.variables) != len(self.ranges):
            raise ModelError("variables and ranges differ in length")
        if len(set(self.variables)) != len(self.variables):
            raise ModelError("duplicate variable names")
        for v, r in zip(self.variables, self.ranges):
            if not _NAME.match(v):
                raise ModelError(f"bad variable name {v!r}")
            if not r:
                raise ModelError(f"empty range for {v}")
            if len(set(r)) != len(r):
                raise ModelError(f"duplicate values in the range of {v}")
            for x in r:
                if not _NAME.match(x):
                    raise ModelError(f"bad value name {x!r} for {v}")

    @classmethod
    def from_dict(cls, ranges: Mapping[str, Sequence[object]]) -> Signature:
        return cls(tuple(ranges), tuple(tuple(str(x) for x in r) for r in ranges.values()))

    @classmethod
    def parse(cls, text: str) -> Signature:
        """Parse ``"A=0,1; C=heads,tails"``."""
        ranges: dict[str, list[str]] = {}
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            name, sep, vals = part.partition("=")
            if not sep:
                raise ModelError(f"expected NAME=v1,v2,... in {part!r}")
            ranges[name.strip()] = [x.strip() for x in vals.split(",") if x.strip()]
        return cls.from_dict(ranges)

    @classmethod
    def uniform(cls, n_vars: int, n_values: int, prefix: str = "X") -> Signature:
        values = tuple(str(i) for i in range(n_values))
        return cls(tuple(f"{prefix}{i}" for i in range(n_vars)), (values,) * n_vars)

    def __str__(self):
        return "; ".join(f"{v}={','.join(r)}" for v, r in zip(self.variables, self.ranges))

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @cached_property
    def _var_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def _val_index(self) -> tuple[dict[str, int], ...]:
        return tuple({x: i for i, x in enumerate(r)} for r in self.ranges)

    def index(self, var: str) -> int:
        try:
            return self._var_index[var]
        except KeyError:
            raise UnknownVariableError(var) from None

    def value_index(self, var: str | int, value: str) -> int:
        vi = var if isinstance(var, int) else self.index(var)
        try:
            return self._val_index[vi][str(value)]
        except KeyError:
            raise RangeError(self.variables[vi], value) from None

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.ranges)

    @cached_property
    def n_assignments(self) -> int:
        return int(np.prod(self.sizes, dtype=np.int64))

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = [1] * self.n_vars
        for i in range(self.n_vars - 2, -1, -1):
            out[i] = out[i + 1] * self.sizes[i + 1]
        return tuple(out)

    @cached_property
    def table(self) -> np.ndarray:
        """All assignments in lexicographic order, one row each."""
        if self.n_vars == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.sizes, dtype=np.int64)
        return grids.reshape(self.n_vars, -1).T.copy()

    def encode(self, s: Assignment) -> int:
        return sum(v * k for v, k in zip(s, self.strides))

    def decode(self, i: int) -> Assignment:
        return tuple(int(v) for v in self.table[i])

    def assignments(self) -> Iterable[Assignment]:
        return itertools.product(*(range(k) for k in self.sizes))

    @cached_property
    def full_bits(self) -> int:
        return (1 << self.n_assignments) - 1

    @cached_property
    def _atom_bits(self) -> dict[tuple[int, int], int]:
        from rcteams._kernels import mask_to_bits

        table = self.table
        return {
            (vi, xi): mask_to_bits(table[:, vi] == xi)
            for vi in range(self.n_vars)
            for xi in range(self.sizes[vi])
        }

    def atom_bits(self, vi: int, xi: int) -> int:
        """Bitset of the assignments giving variable ``vi`` the value ``xi``."""
        return self._atom_bits[(vi, xi)]

    def names(self, s: Assignment) -> dict[str, str]:
        return {v: r[x] for v, r, x in zip(self.variables, self.ranges, s)}

    def check_assignment(self, s: Assignment) -> None:
        if len(s) != self.n_vars:
            raise ModelError(f"assignment {s!r} has the wrong width")
        for vi, x in enumerate(s):
            if not 0 <= x < self.sizes[vi]:
                raise RangeError(self.variables[vi], x)


@dataclass(frozen=True)
class Law:
    """Declared parents of ``var`` and its generating relation.

    ``parents`` is ascending in signature order; each relation tuple lists the
    parent values in that order followed by the value of ``var``.
    """

    var: int
    parents: tuple[int, ...]
    relation: frozenset[tuple[int, ...]]

    @cached_property
    def image(self) -> dict[tuple[int, ...], frozenset[int]]:
        out: dict[tuple[int, ...], set[int]] = {}
        for row in self.relation:
            out.setdefault(row[:-1], set()).add(row[-1])
        return {k: frozenset(v) for k, v in out.items()}

    def allowed(self, pa: tuple[int, ...]) -> frozenset[int]:
        return self.image.get(pa, frozenset())

    def admits(self, s: Assignment) -> bool:
        return tuple(s[p] for p in self.parents) + (s[self.var],) in self.relation


class PackedLaws(NamedTuple):
    var: np.ndarray
    card: np.ndarray
    par: np.ndarray
    npar: np.ndarray
    stride: np.ndarray
    off: np.ndarray
    rel: np.ndarray


def pack_laws(sig: Signature, laws: Sequence[Law]) -> PackedLaws:
    m, k = len(laws), max(sig.n_vars, 1)
    var = np.zeros(m, dtype=np.int64)
    card = np.zeros(m, dtype=np.int64)
    par = np.zeros((m, k), dtype=np.int64)
    npar = np.zeros(m, dtype=np.int64)
    stride = np.zeros((m, k), dtype=np.int64)
    off = np.zeros(m, dtype=np.int64)
    chunks = []
    pos = 0
    for j, law in enumerate(laws):
        var[j] = law.var
        card[j] = sig.sizes[law.var]
        npar[j] = len(law.parents)
        s = 1
        for p in range(len(law.parents) - 1, -1, -1):
            par[j, p] = law.parents[p]
            stride[j, p] = s
            s *= sig.sizes[law.parents[p]]
        rows = s
        block = np.zeros(rows * card[j], dtype=np.bool_)
        for row in law.relation:
            idx = sum(v * stride[j, p] for p, v in enumerate(row[:-1]))
            block[idx * card[j] + row[-1]] = True
        off[j] = pos
        pos += block.shape[0]
        chunks.append(block)
    rel = np.concatenate(chunks) if chunks else np.zeros(1, dtype=np.bool_)
    return PackedLaws(var, card, par, npar, stride, off, rel)


def _closure(children: Mapping[int, Iterable[int]], start: Iterable[int]) -> frozenset[int]:
    seen = set(start)
    stack = list(seen)
    while stack:
        for c in children.get(stack.pop(), ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def _has_cycle(n: int, children: Mapping[int, Iterable[int]]) -> bool:
    # iterative three-colour DFS
    colour = [0] * n
    for root in range(n):
        if colour[root]:
            continue
        colour[root] = 1
        stack = [(root, iter(children.get(root, ())))]
        while stack:
            node, it = stack[-1]
            for c in it:
                if colour[c] == 1:
                    return True
                if colour[c] == 0:
                    colour[c] = 1
                    stack.append((c, iter(children.get(c, ()))))
                    break
            else:
                colour[node] = 2
                stack.pop()
    return False


@dataclass(frozen=True)
class CausalGraph:
    """Vertices are variable names; an edge ``(X, V)`` means X is a declared parent of V."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    @cached_property
    def _children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for p, c in sorted(self.edges):
            out.setdefault(p, []).append(c)
        return out

    def is_acyclic(self) -> bool:
        idx = {v: i for i, v in enumerate(self.vertices)}
        children = {idx[p]: [idx[c] for c in cs] for p, cs in self._children.items()}
        return not _has_cycle(len(self.vertices), children)

    def to_dot(self, styles: Mapping[tuple[str, str], str] | None = None) -> str:
        lines = ["digraph causal {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for p, c in sorted(self.edges):
            style = (styles or {}).get((p, c))
            attr = f" [{style}]" if style else ""
            lines.append(f'  "{p}" -> "{c}"{attr};')
        lines.append("}")
        return "\n".join(lines)


def descendants(graph: CausalGraph, xs: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of the edge relation from ``xs``."""
    xs = list(xs)
    for x in xs:
        if x not in graph.vertices:
            raise UnknownVariableError(x)
    return _closure(graph._children, xs)


def nondescendants(graph: CausalGraph, xs: Iterable[str]) -> frozenset[str]:
    return frozenset(graph.vertices) - descendants(graph, xs)


class Classification(NamedTuple):
    is_total: bool
    is_deterministic: bool
    is_recursive: bool


@dataclass(frozen=True)
class RelationalCausalTeam:
    """A team plus a law component; build validated instances with :func:`validate_model`.

    The constructor trusts its arguments.  ``laws`` is sorted by variable and
    variables without an entry are exogenous.
    """

    signature: Signature
    team: frozenset[Assignment]
    laws: tuple[Law, ...] = ()
    _memo: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @cached_property
    def law_map(self) -> dict[int, Law]:
        return {law.var: law for law in self.laws}

    def law_of(self, var: str | int) -> Law | None:
        vi = var if isinstance(var, int) else self.signature.index(var)
        return self.law_map.get(vi)

    @cached_property
    def endogenous(self) -> frozenset[int]:
        return frozenset(self.law_map)

    @cached_property
    def exogenous(self) -> frozenset[int]:
        return frozenset(range(self.signature.n_vars)) - self.endogenous

    def parents(self, var: str | int) -> tuple[int, ...]:
        law = self.law_of(var)
        return law.parents if law else ()

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for law in self.laws:
            for p in law.parents:
                out.setdefault(p, []).append(law.var)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def graph(self) -> CausalGraph:
        names = self.signature.variables
        return CausalGraph(
            names, frozenset((names[p], names[law.var]) for law in self.laws for p in law.parents)
        )

    def descendant_indices(self, xs: Iterable[int]) -> frozenset[int]:
        key = ("desc", frozenset(xs))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = _closure(self.children, key[1])
        return hit

    @cached_property
    def packed(self) -> PackedLaws:
        return pack_laws(self.signature, self.laws)

    @cached_property
    def team_indices(self) -> np.ndarray:
        enc = self.signature.encode
        return np.array(sorted(enc(s) for s in self.team), dtype=np.int64)

    @cached_property
    def team_bits(self) -> int:
        bits = 0
        for i in self.team_indices:
            bits |= 1 << int(i)
        return bits

    def named_team(self) -> list[dict[str, str]]:
        return [self.signature.names(s) for s in sorted(self.team)]

    def is_compatible(self, s: Assignment, skip: Iterable[int] = ()) -> bool:
        skip = set(skip)
        return all(law.admits(s) for law in self.laws if law.var not in skip)


def classify(model: RelationalCausalTeam) -> Classification:
    total = True
    deterministic = True
    sizes = model.signature.sizes
    for law in model.laws:
        for pa in itertools.product(*(range(sizes[p]) for p in law.parents)):
            n = len(law.allowed(pa))
            total &= n >= 1
            deterministic &= n <= 1
    recursive = not _has_cycle(model.signature.n_vars, model.children)
    return Classification(total, deterministic, recursive)


# -- validation from named input ---------------------------------------------


def _named_assignment(sig: Signature, raw, problems: list[ModelError]) -> Assignment | None:
    if isinstance(raw, Mapping):
        missing = [v for v in sig.variables if v not in raw]
        extra = [k for k in raw if k not in sig.variables]
        for k in extra:
            problems.append(UnknownVariableError(str(k)))
        if missing:
            problems.append(ModelError(f"assignment {dict(raw)!r} misses {', '.join(missing)}"))
        if missing or extra:
            return None
        values = [raw[v] for v in sig.variables]
    else:
        values = list(raw)
        if len(values) != sig.n_vars:
            problems.append(ModelError(f"assignment {values!r} has the wrong width"))
            return None
    out = []
    for vi, x in enumerate(values):
        try:
            out.append(sig.value_index(vi, str(x)))
        except RangeError as e:
            problems.append(RangeError(e.variable, x, "team member"))
            return None
    return tuple(out)


def _named_law(sig: Signature, var: str, raw, problems: list[ModelError]) -> Law | None:
    if isinstance(raw, Mapping):
        parents, relation = raw.get("parents", ()), raw.get("relation", ())
    else:
        parents, relation = raw
    try:
        vi = sig.index(var)
    except UnknownVariableError as e:
        problems.append(e)
        return None
    parents = [str(p) for p in parents]
    pidx = []
    ok = True
    for p in parents:
        if p == var:
            problems.append(SelfParentError(var))
            ok = False
            continue
        try:
            pidx.append(sig.index(p))
        except UnknownVariableError as e:
            problems.append(e)
            ok = False
    if len(set(parents)) != len(parents):
        problems.append(ModelError(f"duplicate parents for {var}"))
        ok = False
    if not ok:
        return None
    order = sorted(range(len(pidx)), key=lambda i: pidx[i])
    rows = set()
    for row in relation:
        row = [str(x) for x in row]
        if len(row) != len(pidx) + 1:
            problems.append(ModelError(f"relation tuple {row!r} for {var} has the wrong width"))
            ok = False
            continue
        try:
            vals = [sig.value_index(pidx[i], row[i]) for i in range(len(pidx))]
            child = sig.value_index(vi, row[-1])
        except RangeError as e:
            problems.append(RangeError(e.variable, e.value, f"law of {var}"))
            ok = False
            continue
        rows.add(tuple(vals[i] for i in order) + (child,))
    if not ok:
        return None
    if not pidx:
        warnings.warn(f"{var} is endogenous with an empty parent set", EmptyParentsWarning, stacklevel=3)
    return Law(vi, tuple(sorted(pidx)), frozenset(rows))


def validate_model(signature: Signature, team: Iterable = (), laws: Mapping | None = None) -> RelationalCausalTeam:
    """Build a model from named input, collecting every violated constraint.

    ``team`` holds assignments as ``{var: value}`` maps or value sequences in
    signature order.  ``laws`` maps each endogenous variable to
    ``(parents, relation)`` (or a mapping with those keys), where relation rows
    list parent values in the *declared* parent order and then the child
    value.  Duplicate team members collapse.
    """
    problems: list[ModelError] = []
    members = set()
    for raw in team:
        s = _named_assignment(signature, raw, problems)
        if s is not None:
            members.add(s)
    built = []
    for var, raw in (laws or {}).items():
        law = _named_law(signature, str(var), raw, problems)
        if law is not None:
            built.append(law)
    if not problems:
        for law in built:
            name = signature.variables[law.var]
            for s in sorted(members):
                if not law.admits(s):
                    problems.append(CompatibilityError(signature.names(s), name))
    if problems:
        raise ModelValidationError(problems)
    return RelationalCausalTeam(signature, frozenset(members), tuple(sorted(built, key=lambda l: l.var)))


def model_from_indices(
    signature: Signature, team: Iterable[Assignment], laws: Iterable[Law]
) -> RelationalCausalTeam:
    """Index-level constructor that checks range and compatibility but never warns."""
    laws = tuple(sorted(laws, key=lambda l: l.var))
    members = frozenset(tuple(s) for s in team)
    problems: list[ModelError] = []
    for s in members:
        try:
            signature.check_assignment(s)
        except ModelError as e:
            problems.append(e)
    for law in laws:
        if law.var in law.parents:
            problems.append(SelfParentError(signature.variables[law.var]))
    if not problems:
        for law in laws:
            for s in sorted(members):
                if not law.admits(s):
                    problems.append(CompatibilityError(signature.names(s), signature.variables[law.var]))
    if problems:
        raise ModelValidationError(problems)
    return RelationalCausalTeam(signature, members, laws)
