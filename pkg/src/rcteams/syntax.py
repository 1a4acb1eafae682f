"""Formula AST, parser, printer and desugaring.

Core connectives are :class:`Atom`, :class:`Neg` (team-level negation),
:class:`And` and :class:`Box` (``[X=x] body`` with a modal-free body).  The
remaining node classes are abbreviations that :func:`desugar` removes.

ASCII grammar, loosest binding first::

    formula := impl ("<->" impl)*
    impl    := disj ("->" impl)?          right associative
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "~" unary | "[" clauses? "]" unary | "<" clauses? ">" unary
             | "(" formula ")" | atom
    atom    := IDENT "=" IDENT | IDENT "!=" IDENT | "T" | "F"
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import reduce

from rcteams.intervention import InconsistentIntervention, InterventionSpec
from rcteams.model import Signature


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariable(FormulaError):
    def __init__(self, name: str, position: int | None = None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown variable {name!r}{where}")
        self.name = name
        self.position = position


class UnknownValue(FormulaError):
    def __init__(self, variable: str, value: str, position: int | None = None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{value!r} is not a value of {variable}{where}")
        self.variable = variable
        self.value = value
        self.position = position


class NestedModal(FormulaError):
    def __init__(self, position: int | None = None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"intervention operators cannot be nested{where}")
        self.position = position


class InconsistentAntecedent(FormulaError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


# -- AST ---------------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Neg(self)

    def __rshift__(self, other):
        return Implies(self, other)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    var: str
    val: str


@dataclass(frozen=True, slots=True)
class Neq(Formula):
    var: str
    val: str


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


def _check_body(body: Formula) -> None:
    if not is_modal_free(body):
        raise NestedModal()


@dataclass(frozen=True, slots=True)
class Box(Formula):
    spec: InterventionSpec
    body: Formula

    def __post_init__(self):
        _check_body(self.body)


@dataclass(frozen=True, slots=True)
class Dia(Formula):
    spec: InterventionSpec
    body: Formula

    def __post_init__(self):
        _check_body(self.body)


BINARY = (And, Or, Implies, Iff)
MODAL = (Box, Dia)


def is_modal_free(phi: Formula) -> bool:
    if isinstance(phi, MODAL):
        return False
    if isinstance(phi, Neg):
        return is_modal_free(phi.sub)
    if isinstance(phi, BINARY):
        return is_modal_free(phi.left) and is_modal_free(phi.right)
    return True


def is_core(phi: Formula) -> bool:
    """True iff only Atom, Neg, And and Box occur."""
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Neg):
        return is_core(phi.sub)
    if isinstance(phi, And):
        return is_core(phi.left) and is_core(phi.right)
    if isinstance(phi, Box):
        return is_core(phi.body)
    return False


def box(spec, body: Formula) -> Box:
    return Box(spec if isinstance(spec, InterventionSpec) else InterventionSpec.of(spec), body)


def dia(spec, body: Formula) -> Dia:
    return Dia(spec if isinstance(spec, InterventionSpec) else InterventionSpec.of(spec), body)


def conj(parts, empty: Formula | None = None) -> Formula:
    """Left-nested conjunction; ``empty`` (default ``Top()``) for no parts."""
    parts = list(parts)
    if not parts:
        return Top() if empty is None else empty
    return reduce(And, parts)


def disj(parts, empty: Formula | None = None) -> Formula:
    parts = list(parts)
    if not parts:
        return Bottom() if empty is None else empty
    return reduce(Or, parts)


def valuation(pairs) -> Formula:
    """Conjunction of atoms ``V=v`` (``Top()`` when empty)."""
    return conj(Atom(v, x) for v, x in pairs)


def atoms_of(phi: Formula) -> set[tuple[str, str]]:
    if isinstance(phi, (Atom, Neq)):
        return {(phi.var, phi.val)}
    if isinstance(phi, Neg):
        return atoms_of(phi.sub)
    if isinstance(phi, BINARY):
        return atoms_of(phi.left) | atoms_of(phi.right)
    if isinstance(phi, MODAL):
        return atoms_of(phi.body) | set(phi.spec.clauses)
    return set()


# -- desugaring --------------------------------------------------------------


def bottom_for(sig: Signature) -> Formula:
    a = Atom(sig.variables[0], sig.ranges[0][0])
    return And(a, Neg(a))


def desugar(phi: Formula, sig: Signature | None = None) -> Formula:
    """Rewrite into Atom/Neg/And/Box only.  ``sig`` is needed for T and F."""
    if isinstance(phi, Atom):
        return phi
    if isinstance(phi, Neq):
        return Neg(Atom(phi.var, phi.val))
    if isinstance(phi, (Top, Bottom)):
        if sig is None:
            raise FormulaError("desugaring T or F needs a signature")
        b = bottom_for(sig)
        return b if isinstance(phi, Bottom) else Neg(b)
    if isinstance(phi, Neg):
        return Neg(desugar(phi.sub, sig))
    if isinstance(phi, And):
        return And(desugar(phi.left, sig), desugar(phi.right, sig))
    if isinstance(phi, Or):
        return Neg(And(Neg(desugar(phi.left, sig)), Neg(desugar(phi.right, sig))))
    if isinstance(phi, Implies):
        return Neg(And(Neg(Neg(desugar(phi.left, sig))), Neg(desugar(phi.right, sig))))
    if isinstance(phi, Iff):
        return And(desugar(Implies(phi.left, phi.right), sig), desugar(Implies(phi.right, phi.left), sig))
    if isinstance(phi, Box):
        return Box(phi.spec, desugar(phi.body, sig))
    if isinstance(phi, Dia):
        return Neg(Box(phi.spec, Neg(desugar(phi.body, sig))))
    raise TypeError(f"not a formula: {phi!r}")


# -- printing ----------------------------------------------------------------

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OP = {Iff: " <-> ", Implies: " -> ", Or: " | ", And: " & "}


def _level(phi: Formula) -> int:
    return _LEVEL.get(type(phi), 5)


def to_text(phi: Formula) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""
    if isinstance(phi, Atom):
        return f"{phi.var}={phi.val}"
    if isinstance(phi, Neq):
        return f"{phi.var}!={phi.val}"
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bottom):
        return "F"
    if isinstance(phi, Neg):
        return "~" + _wrap(phi.sub, 5)
    if isinstance(phi, Box):
        return f"[{phi.spec}] " + _wrap(phi.body, 5)
    if isinstance(phi, Dia):
        return f"<{phi.spec}> " + _wrap(phi.body, 5)
    lvl = _level(phi)
    if isinstance(phi, Implies):
        left, right = _wrap(phi.left, lvl + 1), _wrap(phi.right, lvl)
    else:
        left, right = _wrap(phi.left, lvl), _wrap(phi.right, lvl + 1)
    return left + _OP[type(phi)] + right


def _wrap(phi: Formula, min_level: int) -> str:
    text = to_text(phi)
    return f"({text})" if _level(phi) < min_level else text


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(<->|->|!=|[<>\[\]()~&|=,])|([A-Za-z0-9_']+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            out.append(("op", m.group(1), start))
        else:
            out.append(("id", m.group(2), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            shown = repr(val) if kind != "end" else "end of input"
            raise FormulaSyntaxError(f"expected {value!r}, found {shown}", pos)

    def accept(self, value: str) -> bool:
        kind, val, _ = self.peek()
        if kind == "op" and val == value:
            self.i += 1
            return True
        return False

    def parse(self) -> Formula:
        phi = self.iff()
        kind, val, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        return phi

    def iff(self) -> Formula:
        phi = self.impl()
        while self.accept("<->"):
            phi = Iff(phi, self.impl())
        return phi

    def impl(self) -> Formula:
        phi = self.disj()
        if self.accept("->"):
            return Implies(phi, self.impl())
        return phi

    def disj(self) -> Formula:
        phi = self.conj()
        while self.accept("|"):
            phi = Or(phi, self.conj())
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.accept("&"):
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "~":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val in "[<":
            self.take()
            close = "]" if val == "[" else ">"
            spec = self.clauses(close, pos)
            body_pos = self.peek()[2]
            body = self.unary()
            if not is_modal_free(body):
                raise NestedModal(body_pos)
            return (Box if val == "[" else Dia)(spec, body)
        if kind == "op" and val == "(":
            self.take()
            phi = self.iff()
            self.expect(")")
            return phi
        return self.atom()

    def clauses(self, close: str, open_pos: int) -> InterventionSpec:
        pairs = []
        if not self.accept(close):
            while True:
                var, vpos = self.ident()
                self.expect("=")
                val, xpos = self.ident()
                self.resolve(var, val, vpos, xpos)
                pairs.append((var, val))
                if self.accept(close):
                    break
                self.expect(",")
        try:
            return InterventionSpec(tuple(pairs))
        except InconsistentIntervention as e:
            raise InconsistentAntecedent(str(e), open_pos) from None

    def ident(self) -> tuple[str, int]:
        kind, val, pos = self.take()
        if kind != "id":
            shown = repr(val) if kind != "end" else "end of input"
            raise FormulaSyntaxError(f"expected a name, found {shown}", pos)
        return val, pos

    def resolve(self, var: str, val: str, vpos: int, xpos: int) -> None:
        if self.sig is None:
            return
        if var not in self.sig.variables:
            raise UnknownVariable(var, vpos)
        if val not in self.sig.ranges[self.sig.index(var)]:
            raise UnknownValue(var, val, xpos)

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        nxt = self.peek(1)
        if kind == "id" and val in ("T", "F") and not (nxt[0] == "op" and nxt[1] in ("=", "!=")):
            self.take()
            return Top() if val == "T" else Bottom()
        var, vpos = self.ident()
        kind, op, opos = self.take()
        if op not in ("=", "!=") or kind != "op":
            shown = repr(op) if kind != "end" else "end of input"
            raise FormulaSyntaxError(f"expected '=' or '!=', found {shown}", opos)
        value, xpos = self.ident()
        self.resolve(var, value, vpos, xpos)
        return Atom(var, value) if op == "=" else Neq(var, value)


def parse(text: str, sig: Signature | None = None) -> Formula:
    """Parse a formula; names are checked against ``sig`` when given."""
    return _Parser(text, sig).parse()


def check_formula(phi: Formula, sig: Signature) -> None:
    """Raise if ``phi`` mentions a name outside ``sig``."""
    for var, val in atoms_of(phi):
        if var not in sig.variables:
            raise UnknownVariable(var)
        if val not in sig.ranges[sig.index(var)]:
            raise UnknownValue(var, val)


# -- random formulas ---------------------------------------------------------


def random_spec(sig: Signature, rng: random.Random, max_size: int | None = None) -> InterventionSpec:
    k = rng.randint(0, sig.n_vars if max_size is None else min(max_size, sig.n_vars))
    chosen = sorted(rng.sample(range(sig.n_vars), k))
    return InterventionSpec(tuple((sig.variables[v], rng.choice(sig.ranges[v])) for v in chosen))


def random_formula(
    sig: Signature, rng: random.Random, depth: int = 3, modal: bool = True, sugar: bool = True
) -> Formula:
    """A random well-formed formula of bounded depth over ``sig``."""

    def leaf():
        v = rng.randrange(sig.n_vars)
        x = rng.choice(sig.ranges[v])
        r = rng.random()
        if sugar and r < 0.08:
            return rng.choice((Top(), Bottom()))
        if sugar and r < 0.2:
            return Neq(sig.variables[v], x)
        return Atom(sig.variables[v], x)

    def gen(d: int, allow_modal: bool) -> Formula:
        if d <= 0:
            return leaf()
        kinds = ["leaf", "neg", "and"]
        if sugar:
            kinds += ["or", "implies", "iff"]
        if allow_modal:
            kinds += ["box", "box"] + (["dia", "dia"] if sugar else [])
        kind = rng.choice(kinds)
        if kind == "leaf":
            return leaf()
        if kind == "neg":
            return Neg(gen(d - 1, allow_modal))
        if kind in ("box", "dia"):
            body = gen(rng.randint(0, max(d - 1, 0)), False)
            return (Box if kind == "box" else Dia)(random_spec(sig, rng), body)
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
        return cls(gen(d - 1, allow_modal), gen(d - 1, allow_modal))

    return gen(depth, modal)
