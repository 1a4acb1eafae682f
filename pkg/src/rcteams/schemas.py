"""Finite instance sets of the axiom schemas over a signature.

Every generator returns a list of formulas.  ``SCHEMAS`` maps the schema id
to its generator; ``PROBES`` holds principles that are known to fail and are
swept to make sure the enumerator can find counterexamples.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable, Iterable

from rcteams.causes import exo_formula, recursivity_instances
from rcteams.intervention import InterventionSpec, all_specs
from rcteams.model import Signature
from rcteams.syntax import (
    Atom,
    Box,
    Dia,
    Formula,
    Iff,
    Implies,
    Neg,
    Neq,
    Top,
    conj,
    disj,
)

NAMES = {
    "I0": "tautology",
    "I1": "uniqueness",
    "I2": "definiteness",
    "I3": "weak composition",
    "I4": "effectiveness",
    "I5": "K axiom",
    "I6": "weak reversibility",
    "I7": "flatness",
    "I8": "exogenous variables",
    "I9": "nonemptiness",
    "R": "generalized recursivity",
    "SR": "strong reversibility",
}


def _spec(sig: Signature, cols, vals) -> InterventionSpec:
    return InterventionSpec(tuple((sig.variables[c], sig.ranges[c][x]) for c, x in zip(cols, vals)))


def specs(sig: Signature, variables: Iterable[int] | None = None) -> list[InterventionSpec]:
    return [_spec(sig, c, v) for c, v in all_specs(sig, variables)]


def _atom(sig: Signature, v: int, x: int) -> Atom:
    return Atom(sig.variables[v], sig.ranges[v][x])


def _valuations(sig: Signature, vs: Iterable[int]):
    vs = list(vs)
    for xs in itertools.product(*(range(sig.sizes[v]) for v in vs)):
        yield [(v, x) for v, x in zip(vs, xs)]


def _conj_atoms(sig: Signature, pairs) -> Formula:
    return conj((_atom(sig, v, x) for v, x in pairs), empty=Top())


def _subsets(items, min_size: int = 0):
    items = list(items)
    for k in range(min_size, len(items) + 1):
        yield from itertools.combinations(items, k)


# -- I0 ----------------------------------------------------------------------

SKELETONS: tuple[tuple[int, Callable[..., Formula]], ...] = (
    (1, lambda p: Implies(p, p)),
    (1, lambda p: Neg(conj([p, Neg(p)]))),
    (1, lambda p: Implies(Neg(Neg(p)), p)),
    (2, lambda p, q: Implies(conj([p, q]), p)),
    (2, lambda p, q: Implies(p, Implies(q, p))),
    (2, lambda p, q: Implies(conj([p, q]), conj([q, p]))),
    (3, lambda p, q, r: Implies(Implies(p, q), Implies(Implies(q, r), Implies(p, r)))),
)


def _tautologies(pool: list[Formula], rng: random.Random, per_skeleton: int) -> list[Formula]:
    out = []
    for arity, make in SKELETONS:
        combos = list(itertools.product(pool, repeat=arity))
        if len(combos) > per_skeleton:
            combos = rng.sample(combos, per_skeleton)
        out.extend(make(*c) for c in combos)
    return out


def i0_instances(sig: Signature, per_skeleton: int = 6, seed: int = 0) -> list[Formula]:
    rng = random.Random(seed)
    body_pool = [_atom(sig, v, x) for v in range(sig.n_vars) for x in range(sig.sizes[v])]
    out = []
    for s in specs(sig):
        out.extend(Box(s, t) for t in _tautologies(body_pool, rng, per_skeleton))
    # operator absent: tautologies over team-level formulas, modal ones included
    a = body_pool[0]
    free_pool = body_pool[:3] + [Box(InterventionSpec(), a), Dia(specs(sig)[-1], a)]
    out.extend(_tautologies(free_pool, rng, 4 * per_skeleton))
    return out


# -- I1 .. I9 ----------------------------------------------------------------


def i1_instances(sig: Signature) -> list[Formula]:
    out = []
    for s in specs(sig):
        for y, name in enumerate(sig.variables):
            for a, b in itertools.permutations(sig.ranges[y], 2):
                out.append(Implies(Box(s, Atom(name, a)), Box(s, Neq(name, b))))
    return out


def i2_instances(sig: Signature) -> list[Formula]:
    return [
        Box(s, disj(Atom(name, x) for x in sig.ranges[y]))
        for s in specs(sig)
        for y, name in enumerate(sig.variables)
    ]


def weak_composition(sig: Signature, s: InterventionSpec, z: tuple[int, int], ys) -> Formula:
    body = conj([_atom(sig, *z)] + [_atom(sig, v, x) for v, x in ys])
    return Implies(Dia(s, body), Dia(s.extend(_spec(sig, (z[0],), (z[1],))), _conj_atoms(sig, ys)))


def i3_instances(sig: Signature) -> list[Formula]:
    """Antecedent X, extra variable Z and consequent tuple Y pairwise disjoint, Y nonempty."""
    out = []
    n = sig.n_vars
    for cols, vals in all_specs(sig):
        s = _spec(sig, cols, vals)
        rest = [v for v in range(n) if v not in cols]
        for zv in rest:
            others = [v for v in rest if v != zv]
            for ys in _subsets(others, 1):
                for zx in range(sig.sizes[zv]):
                    for yval in _valuations(sig, ys):
                        out.append(weak_composition(sig, s, (zv, zx), yval))
    return out


def i4_instances(sig: Signature) -> list[Formula]:
    out = []
    for y, name in enumerate(sig.variables):
        others = [v for v in range(sig.n_vars) if v != y]
        for cols, vals in all_specs(sig, others):
            for x in sig.ranges[y]:
                s = _spec(sig, cols, vals).extend(InterventionSpec(((name, x),)))
                out.append(Box(s, Atom(name, x)))
    return out


def k_axiom(s: InterventionSpec | None, psi: Formula, chi: Formula) -> Formula:
    if s is None:
        return Implies(conj([psi, Implies(psi, chi)]), chi)
    return Implies(conj([Box(s, psi), Box(s, Implies(psi, chi))]), Box(s, chi))


def i5_instances(sig: Signature, seed: int = 0, pairs_per_spec: int = 12) -> list[Formula]:
    rng = random.Random(seed)
    atoms = [_atom(sig, v, x) for v in range(sig.n_vars) for x in range(sig.sizes[v])]
    pool = atoms + [Neg(a) for a in atoms] + [conj([atoms[0], atoms[-1]])]
    pairs = list(itertools.product(pool, repeat=2))
    out = []
    for s in specs(sig):
        for psi, chi in rng.sample(pairs, min(pairs_per_spec, len(pairs))):
            out.append(k_axiom(s, psi, chi))
    for psi, chi in rng.sample(pairs, min(pairs_per_spec, len(pairs))):
        out.append(k_axiom(None, Box(InterventionSpec(), psi), Dia(InterventionSpec(), chi)))
    return out


def weak_reversibility(sig, s: InterventionSpec, v: tuple[int, int], y: tuple[int, int], zs) -> Formula:
    va, ya = _atom(sig, *v), _atom(sig, *y)
    zatoms = [_atom(sig, c, x) for c, x in zs]
    sv = s.extend(_spec(sig, (v[0],), (v[1],)))
    sy = s.extend(_spec(sig, (y[0],), (y[1],)))
    left = conj([Dia(sv, conj([ya] + zatoms)), Dia(sy, conj([va] + zatoms))])
    return Implies(left, Dia(s, conj([va, ya] + zatoms)))


def i6_instances(sig: Signature) -> list[Formula]:
    """V and Y distinct and outside X; Z covers every remaining variable."""
    out = []
    for cols, vals in all_specs(sig):
        s = _spec(sig, cols, vals)
        rest = [c for c in range(sig.n_vars) if c not in cols]
        for vv, yv in itertools.permutations(rest, 2):
            zs = [c for c in rest if c not in (vv, yv)]
            for vx in range(sig.sizes[vv]):
                for yx in range(sig.sizes[yv]):
                    for zval in _valuations(sig, zs):
                        out.append(weak_reversibility(sig, s, (vv, vx), (yv, yx), zval))
    return out


def flatness(c: Formula) -> Formula:
    empty = InterventionSpec()
    return Implies(Dia(empty, Top()), Iff(c, Box(empty, c)))


def i7_instances(sig: Signature) -> list[Formula]:
    return [
        flatness(_conj_atoms(sig, val))
        for ys in _subsets(range(sig.n_vars), 1)
        for val in _valuations(sig, ys)
    ]


def exogenous_axiom(sig: Signature, y: int, w, yx: int) -> Formula:
    ya = _atom(sig, y, yx)
    return Implies(
        exo_formula(sig.variables[y], sig),
        Iff(Dia(_spec(sig, *zip(*w)) if w else InterventionSpec(), ya), Dia(InterventionSpec(), ya)),
    )


def i8_instances(sig: Signature) -> list[Formula]:
    out = []
    for y in range(sig.n_vars):
        others = [v for v in range(sig.n_vars) if v != y]
        for w in _valuations(sig, others):
            for yx in range(sig.sizes[y]):
                out.append(exogenous_axiom(sig, y, w, yx))
    return out


def nonemptiness(sig: Signature, w) -> Formula:
    return Iff(Dia(InterventionSpec(), Top()), Dia(_spec(sig, *zip(*w)), Top()))


def i9_instances(sig: Signature) -> list[Formula]:
    return [nonemptiness(sig, w) for w in _valuations(sig, range(sig.n_vars))]


# -- recursive and total-recursive classes -------------------------------------


def r_instances(sig: Signature, n_max: int | None = None) -> list[Formula]:
    return recursivity_instances(sig, n_max or sig.n_vars)


def strong_reversibility(sig, s: InterventionSpec, w: tuple[int, int], y: tuple[int, int]) -> Formula:
    wa, ya = _atom(sig, *w), _atom(sig, *y)
    sw = s.extend(_spec(sig, (w[0],), (w[1],)))
    sy = s.extend(_spec(sig, (y[0],), (y[1],)))
    return Implies(conj([Box(sw, ya), Box(sy, wa)]), Box(s, ya))


def sr_instances(sig: Signature) -> list[Formula]:
    out = []
    for wv, yv in itertools.permutations(range(sig.n_vars), 2):
        others = [c for c in range(sig.n_vars) if c not in (wv, yv)]
        for cols, vals in all_specs(sig, others):
            s = _spec(sig, cols, vals)
            for wx in range(sig.sizes[wv]):
                for yx in range(sig.sizes[yv]):
                    out.append(strong_reversibility(sig, s, (wv, wx), (yv, yx)))
    return out


# -- known-failing probes ----------------------------------------------------


def composition_instances(sig: Signature) -> list[Formula]:
    """``([X=x]W=w & [X=x]Y=y) -> [X=x,W=w]Y=y``."""
    out = []
    for wv, yv in itertools.permutations(range(sig.n_vars), 2):
        others = [c for c in range(sig.n_vars) if c not in (wv, yv)]
        for cols, vals in all_specs(sig, others):
            s = _spec(sig, cols, vals)
            for wx in range(sig.sizes[wv]):
                for yx in range(sig.sizes[yv]):
                    wa, ya = _atom(sig, wv, wx), _atom(sig, yv, yx)
                    sw = s.extend(_spec(sig, (wv,), (wx,)))
                    out.append(Implies(conj([Box(s, wa), Box(s, ya)]), Box(sw, ya)))
    return out


def factual_composition_instances(sig: Signature) -> list[Formula]:
    """``(W=w & Y=y) -> [W=w]Y=y`` with no intervention on the left."""
    out = []
    for wv, yv in itertools.permutations(range(sig.n_vars), 2):
        for wx in range(sig.sizes[wv]):
            for yx in range(sig.sizes[yv]):
                wa, ya = _atom(sig, wv, wx), _atom(sig, yv, yx)
                out.append(Implies(conj([wa, ya]), Box(_spec(sig, (wv,), (wx,)), ya)))
    return out


def unboxed_definiteness_instances(sig: Signature) -> list[Formula]:
    return [disj(Atom(name, x) for x in sig.ranges[y]) for y, name in enumerate(sig.variables)]


def unboxed_weak_composition_instances(sig: Signature) -> list[Formula]:
    """``(Z=z & Y=y) -> <Z=z>Y=y``: fails on the empty team."""
    out = []
    for zv, yv in itertools.permutations(range(sig.n_vars), 2):
        for zx in range(sig.sizes[zv]):
            for yx in range(sig.sizes[yv]):
                za, ya = _atom(sig, zv, zx), _atom(sig, yv, yx)
                out.append(Implies(conj([za, ya]), Dia(_spec(sig, (zv,), (zx,)), ya)))
    return out


SCHEMAS: dict[str, Callable[[Signature], list[Formula]]] = {
    "I0": i0_instances,
    "I1": i1_instances,
    "I2": i2_instances,
    "I3": i3_instances,
    "I4": i4_instances,
    "I5": i5_instances,
    "I6": i6_instances,
    "I7": i7_instances,
    "I8": i8_instances,
    "I9": i9_instances,
    "R": r_instances,
    "SR": sr_instances,
}

PROBES: dict[str, Callable[[Signature], list[Formula]]] = {
    "composition": composition_instances,
    "factual-composition": factual_composition_instances,
    "unboxed-definiteness": unboxed_definiteness_instances,
    "unboxed-weak-composition": unboxed_weak_composition_instances,
}

# which model class each family is swept over
CLASS_OF = {"R": "recursive", "SR": "total,recursive"}
