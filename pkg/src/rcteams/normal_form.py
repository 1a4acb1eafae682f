"""Rewrite any formula into a Boolean combination of might-atoms.

A might-atom is ``<X=x> Y=y`` where ``Y`` lists every variable outside ``X``
in signature order (``<X=x> T`` when ``X`` is everything).  The pipeline:

1. every maximal conjunction of atoms outside a modality ``C`` becomes
   ``<> T -> [] C``;
2. ``[X=x] body`` becomes ``~<X=x> ~body``;
3. each diamond body is put in disjunctive normal form;
4. a negated atom ``~Y=y`` becomes the disjunction of the other values of Y;
5. variables outside ``X`` missing from a disjunct are padded with the
   disjunction of their values;
6. the diamond is distributed over the disjuncts;
7. conjuncts repeating an antecedent value are dropped, and disjuncts that
   contradict the antecedent (or themselves) are removed.

Disjunctions are emitted as ``~(~a & ~b)``; an empty disjunction becomes
``M & ~M`` with ``M`` the might-atom forcing every variable to its first
value.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable

from rcteams.intervention import InterventionSpec
from rcteams.model import Signature
from rcteams.syntax import (
    And,
    Atom,
    Box,
    Dia,
    Formula,
    Implies,
    Neg,
    Top,
    check_formula,
    conj,
    desugar,
)

Literal = tuple[str, str, bool]  # variable, value, positive
Clause = tuple[Literal, ...]


def _is_basic_conjunction(phi: Formula) -> bool:
    if isinstance(phi, Atom):
        return True
    return isinstance(phi, And) and _is_basic_conjunction(phi.left) and _is_basic_conjunction(phi.right)


def guard_flat_conjunctions(phi: Formula, sig: Signature) -> Formula:
    """Step 1 on a core formula."""
    if _is_basic_conjunction(phi):
        empty = InterventionSpec()
        return desugar(Implies(Dia(empty, Top()), Box(empty, phi)), sig)
    if isinstance(phi, Neg):
        return Neg(guard_flat_conjunctions(phi.sub, sig))
    if isinstance(phi, And):
        return And(guard_flat_conjunctions(phi.left, sig), guard_flat_conjunctions(phi.right, sig))
    return phi


def boxes_to_diamonds(phi: Formula) -> Formula:
    """Step 2: ``[S]b`` to ``~<S>~b``; other nodes untouched.

    ``~[S]~b`` is the definition of ``<S>b`` and is folded back directly.
    """
    if isinstance(phi, Neg) and isinstance(phi.sub, Box) and isinstance(phi.sub.body, Neg):
        return Dia(phi.sub.spec, phi.sub.body.sub)
    if isinstance(phi, Box):
        return Neg(Dia(phi.spec, Neg(phi.body)))
    if isinstance(phi, Neg):
        return Neg(boxes_to_diamonds(phi.sub))
    if isinstance(phi, And):
        return And(boxes_to_diamonds(phi.left), boxes_to_diamonds(phi.right))
    return phi


def dnf(body: Formula, positive: bool = True) -> list[Clause]:
    """Step 3 on a core modal-free body: a list of literal conjunctions."""
    if isinstance(body, Atom):
        return [((body.var, body.val, positive),)]
    if isinstance(body, Neg):
        return dnf(body.sub, not positive)
    if isinstance(body, And):
        left, right = dnf(body.left, positive), dnf(body.right, positive)
        if positive:
            return [a + b for a in left for b in right]
        return left + right
    raise TypeError(f"not a core body: {body!r}")


def expand_negations(clauses: Iterable[Clause], sig: Signature) -> list[Clause]:
    """Step 4: distribute each negated atom into the other values of its variable."""
    out = []
    for clause in clauses:
        options = []
        for var, val, pos in clause:
            if pos:
                options.append([(var, val, True)])
            else:
                others = [x for x in sig.ranges[sig.index(var)] if x != val]
                options.append([(var, x, True) for x in others])
        out.extend(tuple(pick) for pick in itertools.product(*options))
    return out


def pad(clauses: Iterable[Clause], sig: Signature, fixed: frozenset[str]) -> list[Clause]:
    """Step 5: every variable outside ``fixed`` gets a value in every disjunct."""
    out = []
    for clause in clauses:
        present = {v for v, _, _ in clause}
        missing = [v for v in sig.variables if v not in fixed and v not in present]
        ranges = [sig.ranges[sig.index(v)] for v in missing]
        for vals in itertools.product(*ranges):
            out.append(clause + tuple((v, x, True) for v, x in zip(missing, vals)))
    return out


def remove_redundancy(spec: InterventionSpec, clause: Clause) -> dict[str, str] | None:
    """Step 7 for one disjunct; ``None`` when the disjunct is contradictory."""
    forced = spec.as_dict()
    kept: dict[str, str] = {}
    for var, val, _ in clause:
        if var in forced:
            if forced[var] != val:
                return None
            continue
        if kept.setdefault(var, val) != val:
            return None
    return kept


def might_atom(spec: InterventionSpec, valuation: dict[str, str], sig: Signature) -> Dia:
    body = conj((Atom(v, valuation[v]) for v in sig.variables if v in valuation), empty=Top())
    return Dia(spec, body)


def _or(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Neg(And(Neg(out), Neg(p)))
    return out


def canonical_bottom(sig: Signature) -> Formula:
    m = Dia(InterventionSpec(tuple((v, r[0]) for v, r in zip(sig.variables, sig.ranges))), Top())
    return And(m, Neg(m))


def normalize_diamond(spec: InterventionSpec, body: Formula, sig: Signature) -> Formula:
    """Steps 3 to 7 for ``<spec> body``."""
    clauses = dnf(body)
    clauses = expand_negations(clauses, sig)
    clauses = pad(clauses, sig, spec.variables)
    atoms: list[Formula] = []
    seen = set()
    for clause in clauses:  # step 6: one diamond per disjunct
        kept = remove_redundancy(spec, clause)
        if kept is None:
            continue
        atom = might_atom(spec, kept, sig)
        if atom not in seen:
            seen.add(atom)
            atoms.append(atom)
    return _or(atoms) if atoms else canonical_bottom(sig)


def _normalize_modal(phi: Formula, sig: Signature) -> Formula:
    if isinstance(phi, Dia):
        return normalize_diamond(phi.spec, phi.body, sig)
    if isinstance(phi, Neg):
        return Neg(_normalize_modal(phi.sub, sig))
    if isinstance(phi, And):
        return And(_normalize_modal(phi.left, sig), _normalize_modal(phi.right, sig))
    raise TypeError(f"unexpected node after step 2: {phi!r}")


def to_normal_form(phi: Formula, sig: Signature) -> Formula:
    check_formula(phi, sig)
    core = desugar(phi, sig)
    core = guard_flat_conjunctions(core, sig)
    core = boxes_to_diamonds(core)
    return _normalize_modal(core, sig)


def _is_might_atom(phi: Formula, sig: Signature) -> bool:
    if not isinstance(phi, Dia):
        return False
    rest = [v for v in sig.variables if v not in phi.spec.variables]
    if any(v not in sig.variables for v in phi.spec.variables):
        return False
    if not rest:
        return isinstance(phi.body, Top)
    leaves = []

    def collect(node) -> bool:
        if isinstance(node, Atom):
            leaves.append(node.var)
            return True
        return isinstance(node, And) and collect(node.left) and collect(node.right)

    return collect(phi.body) and sorted(leaves) == sorted(rest)


def shape_check(phi: Formula, sig: Signature) -> bool:
    """Built from might-atoms by ``~`` and ``&`` only?"""
    if isinstance(phi, Neg):
        return shape_check(phi.sub, sig)
    if isinstance(phi, And):
        return shape_check(phi.left, sig) and shape_check(phi.right, sig)
    return _is_might_atom(phi, sig)


def might_atoms(phi: Formula) -> set[Dia]:
    if isinstance(phi, Dia):
        return {phi}
    if isinstance(phi, Neg):
        return might_atoms(phi.sub)
    if isinstance(phi, And):
        return might_atoms(phi.left) | might_atoms(phi.right)
    return set()


def all_might_atoms(sig: Signature) -> list[Dia]:
    """Every might-atom of the signature, antecedent variables in subset order."""
    out = []
    n = sig.n_vars
    for k in range(n + 1):
        for xs in itertools.combinations(range(n), k):
            ys = [v for v in range(n) if v not in xs]
            for xv in itertools.product(*(sig.ranges[v] for v in xs)):
                spec = InterventionSpec(tuple((sig.variables[v], x) for v, x in zip(xs, xv)))
                for yv in itertools.product(*(sig.ranges[v] for v in ys)):
                    out.append(might_atom(spec, {sig.variables[v]: y for v, y in zip(ys, yv)}, sig))
    return out
