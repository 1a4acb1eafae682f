"""Hilbert-style proof checking for the axiom systems A and A^R.

Axiom recognition works on desugared formulas, so a proof line may use any
abbreviation.  Script format, one step per line::

    @sig A=0,1; C=h,t
    1. [A=1] A=1 ; AXIOM I4
    2. [A=1] A=1 -> [A=1] A=1 ; AXIOM I0
    3. [A=1] A=1 ; MP 1 2
    4. ... ; ASSUME
    5. ... ; NEC 3

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from rcteams.causes import exo_formula, recursivity_instances
from rcteams.intervention import InterventionSpec
from rcteams.model import Signature
from rcteams.syntax import (
    And,
    Atom,
    Box,
    Dia,
    Formula,
    FormulaError,
    Implies,
    Neg,
    Top,
    desugar,
    parse,
    to_text,
)

DEFAULT_MAX_ATOMS = 16
AXIOMS_A = ("I0", "I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9")


class ProofError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
        self.detail = message


class BadCitation(ProofError):
    pass


class NotImplication(ProofError):
    pass


class MPMismatch(ProofError):
    pass


class NECMismatch(ProofError):
    pass


class NECOnAssumption(ProofError):
    pass


class UnrecognizedAxiom(ProofError):
    pass


class UnlistedAssumption(ProofError):
    pass


class AbstractionTooLarge(ProofError):
    pass


class ProofSyntaxError(ProofError):
    pass


# -- shapes of desugared formulas --------------------------------------------


def un_implies(phi: Formula):
    """``~(~~a & ~b)`` to ``(a, b)``."""
    if (
        isinstance(phi, Neg)
        and isinstance(phi.sub, And)
        and isinstance(phi.sub.left, Neg)
        and isinstance(phi.sub.left.sub, Neg)
        and isinstance(phi.sub.right, Neg)
    ):
        return phi.sub.left.sub.sub, phi.sub.right.sub
    return None


def un_or(phi: Formula):
    if isinstance(phi, Neg) and isinstance(phi.sub, And):
        a, b = phi.sub.left, phi.sub.right
        if isinstance(a, Neg) and isinstance(b, Neg):
            return a.sub, b.sub
    return None


def un_iff(phi: Formula):
    if isinstance(phi, And):
        ab, ba = un_implies(phi.left), un_implies(phi.right)
        if ab and ba and ab == (ba[1], ba[0]):
            return ab
    return None


def un_dia(phi: Formula):
    """``~[S]~b`` to ``(S, b)``."""
    if isinstance(phi, Neg) and isinstance(phi.sub, Box) and isinstance(phi.sub.body, Neg):
        return phi.sub.spec, phi.sub.body.sub
    return None


def atom_list(phi: Formula) -> list[tuple[str, str]] | None:
    if isinstance(phi, Atom):
        return [(phi.var, phi.val)]
    if isinstance(phi, And):
        a, b = atom_list(phi.left), atom_list(phi.right)
        if a is not None and b is not None:
            return a + b
    return None


def _valuation(phi: Formula) -> dict[str, str] | None:
    """A conjunction of atoms with each variable once, as a map."""
    atoms = atom_list(phi)
    if atoms is None:
        return None
    out = dict(atoms)
    return out if len(out) == len(atoms) else None


# -- tautology instances -----------------------------------------------------


def abstraction(phi: Formula) -> tuple[list[Formula], Formula]:
    """Atoms of the finest Boolean abstraction of a core formula."""
    atoms: list[Formula] = []
    index: dict[Formula, int] = {}

    def walk(node):
        if isinstance(node, Neg):
            walk(node.sub)
        elif isinstance(node, And):
            walk(node.left)
            walk(node.right)
        elif node not in index:
            index[node] = len(atoms)
            atoms.append(node)

    walk(phi)
    return atoms, phi


def is_tautology_instance(phi: Formula, sig: Signature | None = None, max_atoms: int = DEFAULT_MAX_ATOMS) -> bool:
    """Truth-table the finest abstraction of ``phi`` over ``~`` and ``&``.

    Every row is evaluated at once: atom ``i`` is the int whose bit ``r`` is
    bit ``i`` of row ``r``.
    """
    core = desugar(phi, sig)
    atoms, _ = abstraction(core)
    n = len(atoms)
    if n > max_atoms:
        raise AbstractionTooLarge(f"{n} distinct atoms (limit {max_atoms})")
    rows = 1 << n
    full = (1 << rows) - 1
    columns = {}
    for i, a in enumerate(atoms):
        block = (1 << (1 << i)) - 1  # 2**i ones then 2**i zeros, repeated
        pattern = 0
        period = 1 << (i + 1)
        for start in range(0, rows, period):
            pattern |= block << (start + (1 << i))
        columns[a] = pattern

    def ev(node) -> int:
        if isinstance(node, Neg):
            return full & ~ev(node.sub)
        if isinstance(node, And):
            return ev(node.left) & ev(node.right)
        return columns[node]

    return ev(core) == full


# -- schema recognisers (all take desugared formulas) ---------------------------


def _top(sig):
    return desugar(Top(), sig)


def _i0(phi, sig):
    if isinstance(phi, Box) and is_tautology_instance(phi.body, sig):
        return True
    return is_tautology_instance(phi, sig)


def _i1(phi, sig):
    m = un_implies(phi)
    if not m or not isinstance(m[0], Box) or not isinstance(m[1], Box):
        return False
    a, b = m
    return (
        a.spec == b.spec
        and isinstance(a.body, Atom)
        and isinstance(b.body, Neg)
        and isinstance(b.body.sub, Atom)
        and a.body.var == b.body.sub.var
        and a.body.val != b.body.sub.val
    )


def _flat_or(phi):
    if isinstance(phi, Atom):
        return [phi]
    m = un_or(phi)
    if not m:
        return None
    a, b = _flat_or(m[0]), _flat_or(m[1])
    return a + b if a is not None and b is not None else None


def _i2(phi, sig):
    if not isinstance(phi, Box):
        return False
    leaves = _flat_or(phi.body)
    if not leaves:
        return False
    var = leaves[0].var
    if var not in sig.variables:
        return False
    vals = [a.val for a in leaves if a.var == var]
    return len(vals) == len(leaves) and sorted(vals) == sorted(sig.ranges[sig.index(var)])


def _i3(phi, sig):
    m = un_implies(phi)
    if not m:
        return False
    left, right = un_dia(m[0]), un_dia(m[1])
    if not left or not right:
        return False
    (s, body), (s2, cons) = left, right
    extra = set(s2.clauses) - set(s.clauses)
    if len(extra) != 1 or not set(s.clauses) <= set(s2.clauses):
        return False
    (z, zval), = extra
    if z in s.variables:
        return False
    bodyv, consv = _valuation(body), _valuation(cons)
    if bodyv is None or consv is None or not consv:
        return False
    if z in consv or set(consv) & s.variables:
        return False
    return bodyv == {**consv, z: zval}


def _i4(phi, sig):
    return isinstance(phi, Box) and isinstance(phi.body, Atom) and (phi.body.var, phi.body.val) in phi.spec.clauses


def _i5(phi, sig):
    m = un_implies(phi)
    if not m or not isinstance(m[0], And):
        return False
    first, second, concl = m[0].left, m[0].right, m[1]
    if isinstance(first, Box) and isinstance(second, Box) and isinstance(concl, Box):
        if not first.spec == second.spec == concl.spec:
            return False
        inner = un_implies(second.body)
        return bool(inner) and inner == (first.body, concl.body)
    inner = un_implies(second)
    return bool(inner) and inner == (first, concl)


def _i6(phi, sig):
    m = un_implies(phi)
    if not m or not isinstance(m[0], And):
        return False
    d1, d2, d3 = un_dia(m[0].left), un_dia(m[0].right), un_dia(m[1])
    if not d1 or not d2 or not d3:
        return False
    (s1, b1), (s2, b2), (s, b3) = d1, d2, d3
    e1, e2 = set(s1.clauses) - set(s.clauses), set(s2.clauses) - set(s.clauses)
    if len(e1) != 1 or len(e2) != 1 or not set(s.clauses) <= set(s1.clauses) & set(s2.clauses):
        return False
    (v, vv), = e1
    (y, yv), = e2
    if v == y or v in s.variables or y in s.variables:
        return False
    v1, v2, v3 = _valuation(b1), _valuation(b2), _valuation(b3)
    if v1 is None or v2 is None or v3 is None:
        return False
    zs = {k: x for k, x in v3.items() if k not in (v, y)}
    if set(zs) != set(sig.variables) - s.variables - {v, y}:
        return False
    return v1 == {y: yv, **zs} and v2 == {v: vv, **zs} and v3 == {v: vv, y: yv, **zs}


def _i7(phi, sig):
    m = un_implies(phi)
    if not m:
        return False
    if m[0] != desugar(Dia(InterventionSpec(), Top()), sig):
        return False
    inner = un_iff(m[1])
    if not inner:
        return False
    c, boxed = inner
    return atom_list(c) is not None and boxed == Box(InterventionSpec(), c)


def _i8(phi, sig):
    m = un_implies(phi)
    if not m:
        return False
    inner = un_iff(m[1])
    if not inner:
        return False
    p, q = un_dia(inner[0]), un_dia(inner[1])
    if not p or not q or q[0] or not isinstance(q[1], Atom) or p[1] != q[1]:
        return False
    y = q[1].var
    if p[0].variables != set(sig.variables) - {y}:
        return False
    return m[0] == _exo_core(y, sig)


def _i9(phi, sig):
    inner = un_iff(phi)
    if not inner:
        return False
    top = _top(sig)
    if inner[0] != desugar(Dia(InterventionSpec(), Top()), sig):
        return False
    q = un_dia(inner[1])
    return bool(q) and q[1] == top and q[0].variables == set(sig.variables)


@lru_cache(maxsize=256)
def _exo_core(var: str, sig: Signature) -> Formula:
    return desugar(exo_formula(var, sig), sig)


@lru_cache(maxsize=16)
def _r_core(sig: Signature) -> frozenset[Formula]:
    return frozenset(desugar(f, sig) for f in recursivity_instances(sig, sig.n_vars))


def _r(phi, sig):
    return phi in _r_core(sig)


RECOGNISERS = {
    "I0": _i0,
    "I1": _i1,
    "I2": _i2,
    "I3": _i3,
    "I4": _i4,
    "I5": _i5,
    "I6": _i6,
    "I7": _i7,
    "I8": _i8,
    "I9": _i9,
    "R": _r,
}


def matches_schema(phi: Formula, sig: Signature, schema: str) -> bool:
    try:
        return RECOGNISERS[schema](desugar(phi, sig), sig)
    except AbstractionTooLarge:
        return False


def match_axiom(phi: Formula, sig: Signature, system: str = "AR") -> str | None:
    """First schema (I0..I9, then R in A^R) that ``phi`` instantiates."""
    core = desugar(phi, sig)
    for name in AXIOMS_A + (("R",) if system == "AR" else ()):
        try:
            if RECOGNISERS[name](core, sig):
                return name
        except AbstractionTooLarge:
            continue
    return None


# -- proofs ------------------------------------------------------------------


@dataclass(frozen=True)
class Justification:
    kind: str  # "axiom" | "assume" | "mp" | "nec"
    schema: str | None = None
    refs: tuple[int, ...] = ()

    def __str__(self):
        if self.kind == "axiom":
            return f"AXIOM {self.schema}"
        if self.kind == "assume":
            return "ASSUME"
        return f"{self.kind.upper()} " + " ".join(map(str, self.refs))


@dataclass(frozen=True)
class ProofLine:
    number: int
    formula: Formula
    justification: Justification

    def __str__(self):
        return f"{self.number}. {to_text(self.formula)} ; {self.justification}"


@dataclass
class LineVerdict:
    number: int
    ok: bool
    assumption_free: bool
    error: ProofError | None = None


@dataclass
class ProofVerdict:
    lines: list[LineVerdict]
    conclusion: Formula | None
    assumptions: list[Formula] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.lines) and self.conclusion is not None

    @property
    def errors(self) -> list[ProofError]:
        return [v.error for v in self.lines if v.error is not None]

    @property
    def theorem(self) -> bool:
        """The last line is derivable without assumptions."""
        return self.ok and self.lines[-1].assumption_free

    def statement(self) -> str:
        if not self.ok:
            return "proof rejected: " + "; ".join(str(e) for e in self.errors)
        concl = to_text(self.conclusion)
        if self.theorem:
            return f"|- {concl}"
        gamma = ", ".join(to_text(a) for a in self.assumptions)
        return f"{gamma} |- {concl}"


def check_proof(
    lines: list[ProofLine],
    sig: Signature,
    gamma: list[Formula] | None = None,
    system: str = "A",
) -> ProofVerdict:
    """Check every line; derivation errors are reported per line."""
    allowed = None if gamma is None else {desugar(g, sig) for g in gamma}
    cores: dict[int, Formula | None] = {}
    free: dict[int, bool] = {}
    accepted: dict[int, bool] = {}
    verdicts = []
    used: list[Formula] = []
    for line in lines:
        n = line.number
        j = line.justification
        try:
            if n in cores:
                raise BadCitation(f"duplicate line number {n}", n)
            core = desugar(line.formula, sig)
            for r in j.refs:
                if r not in cores or r >= n:
                    raise BadCitation(f"line {r} is not an earlier line", n)
                if not accepted[r]:
                    raise BadCitation(f"line {r} is itself rejected", n)
            if j.kind == "axiom":
                if j.schema not in RECOGNISERS or (j.schema == "R" and system != "AR"):
                    raise UnrecognizedAxiom(f"no axiom {j.schema} in system {system}", n)
                if not matches_schema(line.formula, sig, j.schema):
                    raise UnrecognizedAxiom(f"not an instance of {j.schema}", n)
                is_free = True
            elif j.kind == "assume":
                if allowed is not None and core not in allowed:
                    raise UnlistedAssumption("assumption not in the premise set", n)
                if line.formula not in used:
                    used.append(line.formula)
                is_free = False
            elif j.kind == "mp":
                if len(j.refs) != 2:
                    raise BadCitation("MP cites two lines", n)
                i, k = j.refs
                imp = un_implies(cores[k])
                if imp is None:
                    raise NotImplication(f"line {k} is not an implication", n)
                if imp[0] != cores[i]:
                    raise MPMismatch(f"the antecedent of line {k} is not line {i}", n)
                if imp[1] != core:
                    raise MPMismatch(f"the consequent of line {k} is not this formula", n)
                is_free = free[i] and free[k]
            elif j.kind == "nec":
                if len(j.refs) != 1:
                    raise BadCitation("NEC cites one line", n)
                (i,) = j.refs
                if not free[i]:
                    raise NECOnAssumption(f"line {i} depends on an assumption", n)
                if not isinstance(core, Box) or core.body != cores[i]:
                    raise NECMismatch(f"this line is not an intervention applied to line {i}", n)
                is_free = True
            else:
                raise ProofSyntaxError(f"unknown rule {j.kind}", n)
        except (ProofError, FormulaError) as e:
            if not isinstance(e, ProofError):
                e = ProofError(str(e), n)
            cores.setdefault(n, None)
            free.setdefault(n, False)
            accepted.setdefault(n, False)
            verdicts.append(LineVerdict(n, False, False, e))
            continue
        cores[n] = core
        free[n] = is_free
        accepted[n] = True
        verdicts.append(LineVerdict(n, True, is_free))
    conclusion = lines[-1].formula if lines else None
    return ProofVerdict(verdicts, conclusion, used)


# -- scripts -----------------------------------------------------------------

_STEP = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.*?)\s*$")


def parse_justification(text: str, line: int) -> Justification:
    parts = text.split()
    if not parts:
        raise ProofSyntaxError("missing justification", line)
    head = parts[0].upper()
    try:
        if head == "AXIOM" and len(parts) == 2:
            return Justification("axiom", parts[1].upper())
        if head == "ASSUME" and len(parts) == 1:
            return Justification("assume")
        if head == "MP" and len(parts) == 3:
            return Justification("mp", refs=(int(parts[1]), int(parts[2])))
        if head == "NEC" and len(parts) == 2:
            return Justification("nec", refs=(int(parts[1]),))
    except ValueError:
        pass
    raise ProofSyntaxError(f"bad justification {text!r}", line)


@dataclass
class ProofScript:
    lines: list[ProofLine]
    signature: Signature | None


def parse_script(text: str, sig: Signature | None = None) -> ProofScript:
    """Parse a proof script; an ``@sig`` directive supplies the signature unless ``sig`` is given."""
    raw: list[tuple[int, str, str]] = []
    for k, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("@sig"):
            if sig is None:
                sig = Signature.parse(stripped[4:])
            continue
        m = _STEP.match(line)
        if not m:
            raise ProofSyntaxError(f"expected 'N. FORMULA ; RULE' on script line {k}")
        raw.append((int(m.group(1)), m.group(2), m.group(3)))
    if sig is None:
        raise ProofSyntaxError("no signature: add an @sig line or pass one")
    lines = []
    for n, formula, just in raw:
        try:
            phi = parse(formula, sig)
        except FormulaError as e:
            raise ProofSyntaxError(str(e), n) from None
        lines.append(ProofLine(n, phi, parse_justification(just, n)))
    return ProofScript(lines, sig)


def format_script(lines: list[ProofLine], sig: Signature) -> str:
    return "\n".join([f"@sig {sig}"] + [str(line) for line in lines]) + "\n"


# -- deduction theorem -------------------------------------------------------


def discharge(lines: list[ProofLine], assumption: Formula, sig: Signature) -> list[ProofLine]:
    """Turn a proof from premises including ``assumption`` into one of ``assumption -> last``.

    Follows the induction of the deduction theorem: assumption-free lines are
    copied (so NEC premises stay available), and each line ``t`` is turned
    into ``assumption -> t`` using the tautologies ``t -> (a -> t)``,
    ``a -> a`` and ``(a -> p) -> ((a -> (p -> t)) -> (a -> t))``.  The input
    proof must check.
    """
    verdict = check_proof(lines, sig)
    if not verdict.ok:
        raise ProofError("cannot discharge from a rejected proof")
    psi = desugar(assumption, sig)
    free = {v.number: v.assumption_free for v in verdict.lines}
    out: list[ProofLine] = []
    copied: dict[int, int] = {}  # original line -> new line holding it
    implied: dict[int, int] = {}  # original line -> new line holding psi -> it

    def emit(formula, just):
        out.append(ProofLine(len(out) + 1, formula, just))
        return len(out)

    for line in lines:
        j = line.justification
        if free[line.number]:
            refs = tuple(copied[r] for r in j.refs)
            copied[line.number] = emit(line.formula, Justification(j.kind, j.schema, refs))
    by_number = {line.number: line for line in lines}
    for line in lines:
        theta = line.formula
        j = line.justification
        target = Implies(assumption, theta)
        if free[line.number] or (j.kind == "assume" and desugar(theta, sig) != psi):
            held = copied.get(line.number)
            if held is None:
                held = emit(theta, Justification("assume"))
            weaken = emit(Implies(theta, target), Justification("axiom", "I0"))
            implied[line.number] = emit(target, Justification("mp", refs=(held, weaken)))
        elif j.kind == "assume":
            implied[line.number] = emit(target, Justification("axiom", "I0"))
        else:  # MP with at least one premise depending on assumptions
            i, k = j.refs
            p = by_number[i].formula
            a_p = Implies(assumption, p)
            a_pt = Implies(assumption, Implies(p, theta))
            taut = emit(Implies(a_p, Implies(a_pt, target)), Justification("axiom", "I0"))
            step = emit(Implies(a_pt, target), Justification("mp", refs=(implied[i], taut)))
            # the implication line k is psi -> (p -> theta) only up to desugaring
            implied[line.number] = emit(target, Justification("mp", refs=(implied[k], step)))
    return out
