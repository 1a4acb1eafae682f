"""``rct`` command line.

Exit status: 0 for success or a true verdict, 1 for a false verdict or a
counterexample, 2 for usage and validation errors.  MODEL arguments are
paths to ``rct/1`` documents or names of bundled fixtures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from rcteams import io
from rcteams.canonical import TheoryOracle, canonical_team, model_diff, truth_lemma_roundtrip
from rcteams.causes import direct_causes, non_dummy_parents
from rcteams.enumeration import (
    EnumerationCaps,
    ModelClass,
    axiom_soundness_sweep,
    default_max_space,
    entails,
    sample_models,
)
from rcteams.intervention import InterventionSpec, intervene
from rcteams.model import ModelError, Signature, classify
from rcteams.normal_form import might_atoms, to_normal_form
from rcteams.proofs import ProofError, check_proof, discharge, format_script, parse_script
from rcteams.semantics import evaluate
from rcteams.syntax import FormulaError, FormulaSyntaxError, parse, to_text

OK, FALSE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_model(ref: str):
    path = Path(ref)
    if path.exists():
        return io.load(path)
    if io.fixture_path(ref).exists():
        return io.load_fixture(ref)
    raise UsageError(f"no model file or fixture named {ref!r}")


def signature_arg(args) -> Signature:
    if getattr(args, "sig", None):
        return Signature.parse(args.sig)
    if getattr(args, "model", None):
        return load_model(args.model).signature
    if getattr(args, "vars", None):
        return Signature.uniform(args.vars, args.range)
    raise UsageError("give a signature with --sig, --model or --vars/--range")


def _models(args, sig):
    cls = ModelClass.parse(args.model_class)
    if args.sample:
        return cls, sample_models(sig, args.sample, cls, seed=args.seed)
    return cls, None


def _caps(args) -> EnumerationCaps:
    return EnumerationCaps(max_search_space=args.max_space or default_max_space())


def _formula_error(text: str, err: FormulaError) -> str:
    if isinstance(err, FormulaSyntaxError):
        return f"{err}\n  {text}\n  {' ' * err.position}^"
    return str(err)


def _parse(text: str, sig: Signature):
    try:
        return parse(text, sig)
    except FormulaError as e:
        raise UsageError(_formula_error(text, e)) from None


# -- subcommands -------------------------------------------------------------


def cmd_eval(args) -> int:
    model = load_model(args.model)
    verdict = evaluate(model, _parse(args.formula, model.signature))
    print("true" if verdict else "false")
    return OK if verdict else FALSE


def cmd_intervene(args) -> int:
    model = load_model(args.model)
    spec = InterventionSpec.parse(args.spec)
    if args.recursive and not classify(model).is_recursive:
        raise UsageError("--recursive needs an acyclic causal graph")
    print(io.dumps(intervene(model, spec, force_general=args.general)))
    return OK


def cmd_normal_form(args) -> int:
    sig = signature_arg(args)
    nf = to_normal_form(_parse(args.formula, sig), sig)
    print(to_text(nf))
    if args.atoms:
        for atom in sorted(might_atoms(nf), key=to_text):
            print(f"  {to_text(atom)}")
    return OK


def _report_verdict(verdict, label_true: str, label_false: str) -> int:
    if verdict.holds:
        print(f"{label_true} ({verdict.models_checked} models checked)")
        return OK
    print(f"{label_false}; counterexample after {verdict.models_checked} models:")
    print(io.dumps(verdict.counterexample))
    return FALSE


def cmd_valid(args) -> int:
    sig = signature_arg(args)
    cls, models = _models(args, sig)
    verdict = entails((), _parse(args.formula, sig), sig, cls, _caps(args), models)
    return _report_verdict(verdict, "valid", "not valid")


def cmd_entail(args) -> int:
    sig = signature_arg(args)
    cls, models = _models(args, sig)
    gamma = [_parse(p, sig) for p in args.premise]
    verdict = entails(gamma, _parse(args.formula, sig), sig, cls, _caps(args), models)
    return _report_verdict(verdict, "entailed", "not entailed")


def cmd_sweep(args) -> int:
    sig = signature_arg(args)
    cls, models = _models(args, sig)
    families = args.families.split(",") if args.families else None
    probes = [] if args.no_probes else None

    def progress(n):
        print(f"  ... {n} models", file=sys.stderr)

    report = axiom_soundness_sweep(
        sig,
        models=models,
        cls=cls,
        caps=_caps(args),
        families=families,
        probes=probes,
        mode=f"sampled ({args.sample}, seed {args.seed})" if args.sample else "exhaustive",
        progress=progress if args.progress else None,
    )
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print("\n".join(report.lines()))
    return OK if all(f.ok for f in report.families.values()) else FALSE


def cmd_direct_causes(args) -> int:
    model = load_model(args.model)
    sig = model.signature
    for v in [args.variable] if args.variable else sig.variables:
        law = model.law_of(v)
        declared = sorted(sig.variables[p] for p in law.parents) if law else []
        print(
            f"{v}: direct causes {sorted(direct_causes(model, v))}; "
            f"declared parents {declared}; non-dummy {sorted(non_dummy_parents(model, v))}"
        )
    return OK


def cmd_canonical(args) -> int:
    model = load_model(args.model)
    rebuilt = canonical_team(TheoryOracle(model), model.signature)
    print(io.dumps(rebuilt))
    diff = model_diff(model, rebuilt)
    print("diff against input:" if diff else "diff against input: none")
    for line in diff:
        print(f"  {line}")
    report = truth_lemma_roundtrip(model, samples=args.samples, seed=args.seed)
    print("\n".join(report.lines()))
    return OK if report.ok else FALSE


def cmd_check_proof(args) -> int:
    sig = None
    if args.with_:
        ref = args.with_
        sig = load_model(ref).signature if (Path(ref).exists() or io.fixture_path(ref).exists()) else Signature.parse(ref)
    script = parse_script(Path(args.proof).read_text(), sig)
    lines, sig = script.lines, script.signature
    if args.discharge is not None:
        target = next((ln for ln in lines if ln.number == args.discharge), None)
        if target is None or target.justification.kind != "assume":
            raise UsageError(f"line {args.discharge} is not an assumption")
        lines = discharge(lines, target.formula, sig)
        if args.print:
            print(format_script(lines, sig), end="")
    verdict = check_proof(lines, sig, system=args.system)
    for v in verdict.lines:
        if v.error is not None:
            print(f"{type(v.error).__name__}: {v.error}")
    print(verdict.statement())
    return OK if verdict.ok else FALSE


def cmd_classify(args) -> int:
    c = classify(load_model(args.model))
    for name in ("total", "deterministic", "recursive"):
        print(f"{name}: {'yes' if getattr(c, 'is_' + name) else 'no'}")
    return OK


def cmd_graph(args) -> int:
    model = load_model(args.model)
    graph = model.graph
    if args.dot:
        styles = {}
        for p, c in graph.edges:
            if p not in direct_causes(model, c):
                styles[(p, c)] = "style=dashed"
        print(graph.to_dot(styles))
    else:
        for p, c in sorted(graph.edges):
            print(f"{p} -> {c}")
    return OK


# -- parser ------------------------------------------------------------------


def _enumeration_options(p: argparse.ArgumentParser, signature: bool = True) -> None:
    if signature:
        g = p.add_argument_group("signature")
        g.add_argument("--sig", help="e.g. 'A=0,1; C=h,t'")
        g.add_argument("--model", help="take the signature of this model")
        g.add_argument("--vars", type=int, help="uniform signature with this many variables")
        g.add_argument("--range", type=int, default=2, help="values per variable with --vars")
    p.add_argument("--class", dest="model_class", default="all", help="all, or a comma list of total,deterministic,recursive")
    p.add_argument("--max-space", type=int, help="cap on the search space (default RCT_MAX_SPACE or 1000000)")
    p.add_argument("--sample", type=int, help="check this many random models instead of enumerating")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rct", description="Relational causal teams")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula on a model")
    p.add_argument("model")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("intervene", help="print the model after an intervention")
    p.add_argument("model")
    p.add_argument("spec", help="e.g. 'X=x, Y=y'")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--general", action="store_true", help="use the general definition")
    mode.add_argument("--recursive", action="store_true", help="use the per-assignment algorithm (default when acyclic)")
    p.set_defaults(fn=cmd_intervene)

    p = sub.add_parser("normal-form", help="rewrite a formula into might-atoms")
    p.add_argument("formula")
    p.add_argument("--sig")
    p.add_argument("--model")
    p.add_argument("--atoms", action="store_true", help="also list the might-atoms")
    p.set_defaults(fn=cmd_normal_form)

    p = sub.add_parser("valid", help="check validity by enumerating models")
    p.add_argument("formula")
    _enumeration_options(p)
    p.set_defaults(fn=cmd_valid)

    p = sub.add_parser("entail", help="check entailment by enumerating models")
    p.add_argument("formula")
    p.add_argument("--premise", "-p", action="append", default=[])
    _enumeration_options(p)
    p.set_defaults(fn=cmd_entail)

    p = sub.add_parser("sweep", help="evaluate every axiom instance on every model")
    _enumeration_options(p)
    p.add_argument("--families", help="comma list of schemas (default: all)")
    p.add_argument("--no-probes", action="store_true", help="skip the known-invalid probe families")
    p.add_argument("--json", action="store_true")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("direct-causes", help="semantic direct causes of each variable")
    p.add_argument("model")
    p.add_argument("variable", nargs="?")
    p.set_defaults(fn=cmd_direct_causes)

    p = sub.add_parser("canonical", help="rebuild a model from its theory and compare")
    p.add_argument("model")
    p.add_argument("--samples", type=int, default=50, help="random formulas compared")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_canonical)

    p = sub.add_parser("check-proof", help="check a proof script")
    p.add_argument("proof")
    p.add_argument("--with", dest="with_", metavar="MODEL-SIG", help="model or signature string to check against")
    p.add_argument("--system", choices=("A", "AR"), default="A")
    p.add_argument("--discharge", type=int, metavar="LINE", help="apply the deduction theorem to this assumption")
    p.add_argument("--print", action="store_true", help="print the discharged proof")
    p.set_defaults(fn=cmd_check_proof)

    p = sub.add_parser("classify", help="total / deterministic / recursive")
    p.add_argument("model")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("graph", help="causal graph")
    p.add_argument("model")
    p.add_argument("--dot", action="store_true", help="DOT output; dashed edges are parents that are not direct causes")
    p.set_defaults(fn=cmd_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except (UsageError, ModelError, FormulaError, ProofError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
