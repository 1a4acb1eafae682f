"""Team semantics.

A modal-free body is compiled to the bitset of assignments that satisfy it as
singleton teams.  A team-level formula is compiled to a predicate over a
lookup ``bits(xcols, xvals)`` that returns the intervened team as a bitset,
so the same compiled formula can run against a model or a cached profile.
"""

from __future__ import annotations

from collections.abc import Callable
from functools import lru_cache

from rcteams.intervention import intervened_bits
from rcteams.model import RelationalCausalTeam, Signature
from rcteams.syntax import (
    And,
    Atom,
    Bottom,
    Box,
    Dia,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Neg,
    Neq,
    Or,
    Top,
    check_formula,
)

SpecKey = tuple[tuple[int, ...], tuple[int, ...]]
Lookup = Callable[[tuple[int, ...], tuple[int, ...]], int]


class SignatureMismatch(FormulaError):
    pass


def body_bits(phi: Formula, sig: Signature) -> int:
    """Assignments satisfying a modal-free formula as singleton teams."""
    full = sig.full_bits
    if isinstance(phi, Atom):
        return sig.atom_bits(sig.index(phi.var), sig.value_index(phi.var, phi.val))
    if isinstance(phi, Neq):
        return full & ~body_bits(Atom(phi.var, phi.val), sig)
    if isinstance(phi, Top):
        return full
    if isinstance(phi, Bottom):
        return 0
    if isinstance(phi, Neg):
        return full & ~body_bits(phi.sub, sig)
    if isinstance(phi, And):
        return body_bits(phi.left, sig) & body_bits(phi.right, sig)
    if isinstance(phi, Or):
        return body_bits(phi.left, sig) | body_bits(phi.right, sig)
    if isinstance(phi, Implies):
        return (full & ~body_bits(phi.left, sig)) | body_bits(phi.right, sig)
    if isinstance(phi, Iff):
        a, b = body_bits(phi.left, sig), body_bits(phi.right, sig)
        return full & ~(a ^ b)
    raise FormulaError(f"modal operator inside an intervention body: {phi}")


class Compiled:
    """A formula compiled against one signature.

    ``specs`` lists every intervention the formula consults (empty included
    when some subformula reads the team itself).
    """

    def __init__(self, phi: Formula, sig: Signature):
        check_formula(phi, sig)
        self.formula = phi
        self.signature = sig
        self.specs: set[SpecKey] = set()
        self._fn = self._build(phi)

    def _build(self, phi: Formula) -> Callable[[Lookup], bool]:
        sig = self.signature
        if isinstance(phi, Atom):
            self.specs.add(((), ()))
            miss = sig.full_bits & ~body_bits(phi, sig)
            return lambda get: not (get((), ()) & miss)
        if isinstance(phi, Neq):
            # team-level sugar for ~X=x, not "every member differs"
            return self._build(Neg(Atom(phi.var, phi.val)))
        if isinstance(phi, Top):
            return lambda get: True
        if isinstance(phi, Bottom):
            return lambda get: False
        if isinstance(phi, Neg):
            f = self._build(phi.sub)
            return lambda get: not f(get)
        if isinstance(phi, (And, Or, Implies, Iff)):
            f, g = self._build(phi.left), self._build(phi.right)
            if isinstance(phi, And):
                return lambda get: f(get) and g(get)
            if isinstance(phi, Or):
                return lambda get: f(get) or g(get)
            if isinstance(phi, Implies):
                return lambda get: (not f(get)) or g(get)
            return lambda get: f(get) == g(get)
        if isinstance(phi, (Box, Dia)):
            key = phi.spec.resolve(sig)
            self.specs.add(key)
            bits = body_bits(phi.body, sig)
            if isinstance(phi, Box):
                miss = sig.full_bits & ~bits
                return lambda get: not (get(*key) & miss)
            return lambda get: bool(get(*key) & bits)
        raise TypeError(f"not a formula: {phi!r}")

    def __call__(self, get: Lookup) -> bool:
        return self._fn(get)

    def on(self, model: RelationalCausalTeam) -> bool:
        if model.signature != self.signature:
            raise SignatureMismatch("formula compiled for a different signature")
        return self._fn(lambda xc, xv: intervened_bits(model, xc, xv))


@lru_cache(maxsize=65536)
def compile_formula(phi: Formula, sig: Signature) -> Compiled:
    return Compiled(phi, sig)


def evaluate(model: RelationalCausalTeam, phi: Formula) -> bool:
    """Does the model satisfy ``phi``?"""
    return compile_formula(phi, model.signature).on(model)
