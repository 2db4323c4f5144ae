"""Command-line entry point.

    slicegm verify problem.toml
    slicegm linearize problem.toml
    slicegm kernel problem.toml --degree 4 [--ideal]
    slicegm corpus run|list

Output is a human-readable report followed by a fenced JSON document.
Exit codes: 0 all checks pass, 1 some check failed or is unknown,
2 the input could not be used, 3 an internal consistency check tripped.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import checks, corpus
from .deriv import Derivation
from .errors import InternalVerificationError, NotInverse, ParseError, ProblemError, SliceGmError
from .morph import AutomorphismPair, Endomorphism
from .parse import ProblemSpec, parse_problem

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageProblem(Exception):
    """Input is unusable for the requested command (exit code 2)."""


def _load(path: str) -> ProblemSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageProblem(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise UsageProblem(f"{path} is not valid UTF-8") from None
    return parse_problem(text)


def _bound(spec: ProblemSpec, args) -> int:
    return args.bound if args.bound is not None else spec.nilpotency_bound


def cmd_verify(args) -> checks.Report:
    spec = _load(args.file)
    D = Derivation(spec.context, spec.derivation_images)
    title = f"verify {spec.name or args.file}"
    return checks.verify_suite(D, spec.slice, spec.N, spec.kernel_generators, _bound(spec, args), title)


def cmd_linearize(args) -> checks.Report:
    spec = _load(args.file)
    if spec.phi_images is None:
        raise UsageProblem("linearize needs [phi] and [phi_inv] tables")
    if spec.slice is None:
        raise UsageProblem("linearize needs a slice")
    ctx = spec.context
    D = Derivation(ctx, spec.derivation_images)
    title = f"linearize {spec.name or args.file}"
    try:
        phi = AutomorphismPair(Endomorphism(ctx, spec.phi_images), Endomorphism(ctx, spec.phi_inverse_images))
    except NotInverse as exc:
        rep = checks.Report(title)
        rep.add("phi and phi_inv are inverse", checks.FAIL, str(exc), exc.residual)
        return rep
    return checks.linearize_suite(D, spec.slice, spec.N, phi, spec.kernel_generators, title)


def cmd_kernel(args) -> checks.Report:
    spec = _load(args.file)
    d = args.degree if args.degree is not None else spec.degree_bound
    if d < 0:
        raise UsageProblem("--degree must be non-negative")
    ctx = spec.context
    Ds = [Derivation(ctx, spec.derivation_images)] + [Derivation(ctx, imgs) for imgs in spec.family]
    title = f"kernel {spec.name or args.file} (degree <= {d})"
    if args.ideal:
        if not spec.ideal_generators:
            raise UsageProblem("--ideal needs an [ideal] table with generators")
        return checks.quotient_suite(Ds, spec.ideal_generators, d, title=title)
    return checks.kernel_suite(Ds, d, title)


def cmd_corpus(args) -> checks.Report:
    entries = corpus.entries()
    if args.action == "list":
        rep = checks.Report("corpus list")
        rep.notes = [f"{e.name:24} {e.provenance}" for e in entries]
        rep.data = {"entries": [{"name": e.name, "provenance": e.provenance, "n": e.ctx.n} for e in entries]}
        return rep
    bound = args.bound if args.bound is not None else 64
    return checks.corpus_suite(entries, bound)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=None, help="nilpotency search bound (overrides the file)")
    common.add_argument("--json-only", action="store_true", help="print only the JSON document")
    common.add_argument("--quiet", action="store_true", help="hide passing and skipped lines")

    parser = argparse.ArgumentParser(
        prog="slicegm",
        description="Gm-actions from locally nilpotent derivations with a slice.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check LND, slice and the action identities")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("linearize", parents=[common], help="build and re-verify a linearizing automorphism")
    p.add_argument("file")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("kernel", parents=[common], help="degree-bounded kernels and ML obstruction report")
    p.add_argument("file")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--ideal", action="store_true", help="work in k[x]/I using the [ideal] table")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("corpus", parents=[common], help="built-in examples")
    p.add_argument("action", choices=["run", "list"])
    p.set_defaults(func=cmd_corpus)
    return parser


def _merge_globals(args, argv) -> None:
    # flags may appear before or after the subcommand; subparser defaults would
    # otherwise clobber values given before it
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--bound", type=int, default=None)
    pre.add_argument("--json-only", action="store_true")
    pre.add_argument("--quiet", action="store_true")
    known, _ = pre.parse_known_args(argv)
    if args.bound is None:
        args.bound = known.bound
    args.json_only = args.json_only or known.json_only
    args.quiet = args.quiet or known.quiet


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_globals(args, argv)
    if args.bound is not None and args.bound <= 0:
        parser.error("--bound must be positive")

    try:
        report = args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ProblemError, UsageProblem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalVerificationError as exc:
        print(f"internal verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SliceGmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    sys.stdout.write(report.render(quiet=args.quiet, json_only=args.json_only) + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
