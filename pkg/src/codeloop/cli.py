"""Command line entry point: ``codeloop check-code|constants|verify|export-table``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import moufang, triality
from .codes import DoublyEvenCode, builtin, parse_code, validate_doubly_even
from .cubic import CubicSpace, from_code, parse_cubic, serialize_cubic, validate_axioms
from .errors import CapacityError, CodeLoopError, ParseError, StructuralError
from .report import Report

EXIT_OK, EXIT_ERROR, EXIT_INVALID = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 100_000
    exhaustive_limit: int = 1 << 14
    format: str = "text"
    parker_samples: int = 1000


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def load_code(args) -> DoublyEvenCode:
    if args.builtin:
        return builtin(args.builtin)
    if args.code:
        text = _read(args.code)
        try:
            return parse_code(text, name=Path(args.code).stem)
        except ParseError as exc:
            raise InputError(f"{args.code}: {exc}") from None
    raise InputError("this command needs --builtin or --code")


def load_space(args) -> CubicSpace:
    if args.cubic:
        text = _read(args.cubic)
        try:
            return parse_cubic(text, name=Path(args.cubic).stem)
        except ParseError as exc:
            raise InputError(f"{args.cubic}: {exc}") from None
    return from_code(load_code(args))


def _emit(reports: list[Report], fmt: str, out) -> None:
    for r in reports:
        print(r.to_json() if fmt == "jsonl" else r.to_text(), file=out)


# --------------------------------------------------------------------------
# commands


def cmd_check_code(args, config: RunConfig, out) -> int:
    try:
        code = load_code(args)
    except CodeLoopError as exc:
        # well-formed input that fails validation
        if getattr(exc, "witness", None) is not None:
            w = exc.witness
            report = Report("check-code")
            report.add("doubly even", False, str(w))
            report.data.update({"reason": str(exc), "witness_weight": w.weight})
            _emit([report], config.format, out)
            return EXIT_INVALID
        raise
    v = validate_doubly_even(code.basis, exhaustive_limit=config.exhaustive_limit)
    report = Report("check-code", v.mode)
    report.add("doubly even", v.valid, None if v.witness is None else str(v.witness))
    report.data.update({"length": code.length, "dimension": code.dim})
    if code.dim <= 30 and (1 << code.dim) <= config.exhaustive_limit:
        report.data["weight_distribution"] = code.weight_distribution()
    else:
        report.notes.append("weight distribution skipped: span exceeds the exhaustive limit")
    _emit([report], config.format, out)
    return EXIT_OK if v.valid else EXIT_INVALID


def cmd_constants(args, config: RunConfig, out) -> int:
    out.write(serialize_cubic(load_space(args)))
    return EXIT_OK


def _suites(space: CubicSpace, config: RunConfig, group_factory=None) -> list[tuple[str, Callable[[], Report]]]:
    G = (group_factory or triality.TrialityGroup)(space)
    L = moufang.CodeLoop(G)
    seed, samples, limit = config.seed, config.samples, config.exhaustive_limit
    n = space.n

    def axioms():
        if (1 << 3 * n) * max(n, 1) <= limit * 128:
            return validate_axioms(space, "exhaustive", limit=limit * 128)
        return validate_axioms(space, "sampled", count=samples, seed=seed)

    suites = [
        ("cubic-axioms", axioms),
        ("presentation", lambda: triality.verify_presentation(G, samples=samples, seed=seed)),
        ("triality", lambda: triality.triality_report(G, limit=limit, samples=samples, seed=seed)),
        ("parker", lambda: triality.parker_check(G, samples=config.parker_samples, seed=seed)),
        ("index", lambda: triality.index_check(G)),
        ("centralizer", lambda: triality.centralizer_check(G, limit=limit, samples=samples, seed=seed)),
        ("loop-axioms", lambda: moufang.loop_axioms_report(L, samples=samples, seed=seed)),
        ("structure", lambda: moufang.structure_report(L, samples=samples, seed=seed)),
        ("small-frattini", lambda: moufang.small_frattini_check(L, samples=samples, seed=seed)),
        ("mult-identities", lambda: moufang.mult_identities_report(L, samples=min(samples, 10_000), seed=seed)),
        ("recovery", lambda: moufang.recovery_report(L)),
    ]
    if n <= 3:
        suites.append(("dual-construction", lambda: moufang.dual_construction_report(L)))
        suites.append(("mlt-bound", lambda: moufang.mlt_bound_check(L)))
    return suites


def run_verify(space: CubicSpace, config: RunConfig, group_factory=None) -> list[Report]:
    """Run every suite; ``group_factory`` swaps in another multiplication (negative controls)."""
    reports = []
    for name, run in _suites(space, config, group_factory):
        try:
            reports.append(run())
        except CapacityError as exc:
            r = Report(name, "skipped")
            r.notes.append(f"capacity: {exc}")
            reports.append(r)
        except StructuralError as exc:
            r = Report(name, "aborted")
            r.add("structure", False, str(exc))
            reports.append(r)
    return reports


def cmd_verify(args, config: RunConfig, out) -> int:
    space = load_space(args)
    reports = run_verify(space, config)
    _emit(reports, config.format, out)
    passed = all(r.passed for r in reports)
    summary = {"input": space.name, "n": space.n, "passed": passed, "seed": config.seed,
               "suites": {r.suite: r.passed for r in reports}}
    if config.format == "jsonl":
        print(json.dumps(summary, sort_keys=True), file=out)
    else:
        print(f"{'ALL PASS' if passed else 'FAILED'}: {sum(r.passed for r in reports)}/{len(reports)} suites", file=out)
    return EXIT_OK if passed else EXIT_ERROR


def cmd_export_table(args, config: RunConfig, out) -> int:
    L = moufang.CodeLoop.from_space(load_space(args))
    limit = moufang.FORCE_TABLE_LIMIT if args.force else moufang.TABLE_LIMIT
    if L.order > limit:
        hint = "" if args.force else "; pass --force to raise the limit"
        print(f"refusing to export a table of order {L.order} (limit {limit}){hint}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        try:
            with open(args.out, "w") as fh:
                moufang.export_cayley(L, fh, force=args.force)
        except OSError as exc:
            raise InputError(f"{args.out}: {exc.strerror or exc}") from None
        print(f"order {L.order} -> {args.out}", file=out)
    else:
        moufang.export_cayley(L, out, force=args.force)
    return EXIT_OK


COMMANDS = {
    "check-code": cmd_check_code,
    "constants": cmd_constants,
    "verify": cmd_verify,
    "export-table": cmd_export_table,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codeloop", description="Code loops from doubly even codes via groups with triality.")
    parser.add_argument("command", choices=list(COMMANDS))
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--builtin", metavar="NAME", help="hamming8, hamming8_sub3, golay24 or zero_<k>")
    src.add_argument("--code", metavar="FILE", help="generator rows, one 0/1 string per line")
    src.add_argument("--cubic", metavar="FILE", help="structure constants in the cubic text format")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=100_000, help="draws per sampled suite")
    parser.add_argument("--parker-samples", type=int, default=1000)
    parser.add_argument("--exhaustive-limit", type=int, default=1 << 14, help="largest set enumerated exhaustively")
    parser.add_argument("--format", choices=("text", "jsonl"), default="text")
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--force", action="store_true", help="allow large Cayley tables")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(args.seed, args.samples, args.exhaustive_limit, args.format, args.parker_samples)
    try:
        return COMMANDS[args.command](args, config, sys.stdout)
    except (InputError, CodeLoopError, LookupError) as exc:
        msg = exc.args[0] if isinstance(exc, LookupError) and exc.args else exc
        print(f"codeloop: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
