"""
Command-line interface: classify, witness, verify and corpus subcommands.

Reports go to stdout as canonical JSON; diagnostics go to stderr through logging.
Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 inapplicable witness,
5 failed claim or corpus check, 6 inconclusive claim under --strict.
"""

import argparse
import logging
import sys
from pathlib import Path

from .classifier import classify
from .config import Budget, Config, budget_from_env, configure_logging
from .configuration import Alphabet, Configuration
from .corpus import run_corpus
from .documents import MapDocument, dumps_report, load_configuration, load_map_document
from .dynamics_lab import ClaimStatus, distance_series, verify_profile
from .dyadic import Dyadic
from .errors import EXIT_CLAIM_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, GShiftError
from .index_map import (
    core_bound,
    escape_bound,
    least_escaping_point,
    periodic_points,
    tail_kind,
)
from .witnesses import (
    dense_chaos_refutation,
    li_yorke_witness,
    non_sensitivity_certificate,
    scrambled_pair,
    sensitivity_witness,
)

WITNESS_KINDS = ("scrambled", "sensitivity", "li-yorke", "non-sensitivity", "dense-refute")


def _add_budget_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--horizon", type=int, help="Last time step simulated.")
    parser.add_argument("--depth", type=int, help="Truncation depth of the metric.")
    parser.add_argument("--window", type=int, help="Start of the liminf/limsup window.")
    parser.add_argument("--samples", type=int, help="Random pairs drawn per claim.")
    parser.add_argument("--seed", type=int, help="Seed of the sampling generator.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gshift",
        description="Classify and verify chaos of generalized shifts on X^N.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose logging."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    classify_parser = subparsers.add_parser("classify", help="Print the chaos profile.")
    classify_parser.add_argument("input_file", type=Path, help="Map document (JSON).")

    witness_parser = subparsers.add_parser("witness", help="Construct one witness.")
    witness_parser.add_argument("input_file", type=Path, help="Map document (JSON).")
    witness_parser.add_argument("--kind", choices=WITNESS_KINDS, required=True)
    witness_parser.add_argument(
        "--epsilon",
        type=Dyadic.parse,
        help="Dyadic epsilon for certificates, e.g. 1/8, 2^-3 or 0.125.",
    )
    witness_parser.add_argument(
        "--prefix",
        type=int,
        help="Coordinates 1..n on which the witness agrees with the base point.",
    )
    witness_parser.add_argument(
        "--configuration",
        type=Path,
        help="Configuration document for the base point (default: all 0).",
    )
    witness_parser.add_argument(
        "--series",
        action="store_true",
        help="Attach the distance series of the witness pair.",
    )
    _add_budget_arguments(witness_parser)

    verify_parser = subparsers.add_parser("verify", help="Cross-check the profile.")
    verify_parser.add_argument("input_file", type=Path, help="Map document (JSON).")
    _add_budget_arguments(verify_parser)
    verify_parser.add_argument(
        "--strict", action="store_true", help="Exit 6 on inconclusive claims."
    )

    corpus_parser = subparsers.add_parser("corpus", help="Check a random corpus.")
    corpus_parser.add_argument("--count", type=int, required=True)
    _add_budget_arguments(corpus_parser)
    return parser


def _budget(args: argparse.Namespace) -> Budget:
    """Environment defaults with command-line flags on top."""
    overrides = {
        name: getattr(args, name, None)
        for name in ("horizon", "depth", "window", "samples", "seed", "epsilon", "prefix")
    }
    return budget_from_env(**overrides)


def _report(command: str, document: MapDocument | None = None) -> dict:
    report = {
        "schema_version": Config.SCHEMA_VERSION,
        "tool_version": Config.TOOL_VERSION,
        "command": command,
    }
    if document is not None:
        report["map"] = document.to_json()
    return report


def _orbit_structure(document: MapDocument) -> dict:
    spec = document.spec
    return {
        "tail_kind": tail_kind(spec).value,
        "escape_bound": escape_bound(spec),
        "core_bound": core_bound(spec),
        "periodic_points": list(periodic_points(spec)),
        "least_escaping_point": least_escaping_point(spec),
    }


def cmd_classify(args: argparse.Namespace) -> tuple[dict, int]:
    document = load_map_document(args.input_file)
    report = _report("classify", document)
    report["orbit_structure"] = _orbit_structure(document)
    report["profile"] = classify(document.spec, document.alphabet_size).to_json()
    return report, EXIT_OK


def cmd_witness(args: argparse.Namespace) -> tuple[dict, int]:
    document = load_map_document(args.input_file)
    budget = _budget(args)
    spec, alphabet = document.spec, Alphabet(document.alphabet_size)
    if args.configuration is not None:
        x = load_configuration(args.configuration, spec)
    else:
        x = Configuration.constant(alphabet, 0)
    logging.info(f"Building {args.kind} witness for {document.name}")

    pair = None
    if args.kind == "scrambled":
        witness = scrambled_pair(spec, alphabet)
        pair = (witness.x, witness.y)
    elif args.kind == "sensitivity":
        witness = sensitivity_witness(spec, alphabet, x, range(1, budget.prefix + 1))
        pair = (x, witness.z)
    elif args.kind == "li-yorke":
        witness = li_yorke_witness(spec, alphabet, x, budget.prefix, budget)
        pair = (x, witness.y)
    elif args.kind == "non-sensitivity":
        witness = non_sensitivity_certificate(spec, budget.epsilon)
    else:
        witness = dense_chaos_refutation(spec, alphabet)

    report = _report("witness", document)
    report["profile"] = classify(spec, document.alphabet_size).to_json()
    report["witness"] = witness.to_json()
    report["budget"] = budget.to_json()
    if args.series and pair is not None:
        series = distance_series(spec, *pair, budget.horizon, budget.depth)
        report["series"] = series.to_json()
    return report, EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    document = load_map_document(args.input_file)
    budget = _budget(args)
    profile = classify(document.spec, document.alphabet_size)
    verification = verify_profile(
        document.spec, Alphabet(document.alphabet_size), budget, profile
    )
    report = _report("verify", document)
    report["profile"] = profile.to_json()
    report["budget"] = budget.to_json()
    report["verification"] = verification.to_json()

    status = verification.status
    if status is ClaimStatus.FAIL:
        failed = [c.name for c in verification.claims if c.status is ClaimStatus.FAIL]
        logging.error(f"Claims failed for {document.name}: {', '.join(failed)}")
        return report, EXIT_CLAIM_FAILED
    if status is ClaimStatus.INCONCLUSIVE and args.strict:
        logging.error(f"Inconclusive claims for {document.name} under --strict")
        return report, EXIT_INCONCLUSIVE
    return report, EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> tuple[dict, int]:
    budget = _budget(args)
    result = run_corpus(args.count, budget.seed, budget)
    report = _report("corpus")
    report["budget"] = budget.to_json()
    report["corpus"] = result.to_json()
    offender = result.first_offender
    if offender is not None:
        logging.error(
            f"Corpus check failed on {offender.document.name}: "
            f"{offender.document.spec.describe()} ({'; '.join(offender.violations)})"
        )
        return report, EXIT_CLAIM_FAILED
    return report, EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "witness": cmd_witness,
    "verify": cmd_verify,
    "corpus": cmd_corpus,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.verbose)
    try:
        report, code = COMMANDS[args.command](args)
    except GShiftError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    sys.stdout.write(dumps_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
