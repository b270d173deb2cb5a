"""Command-line entry point: ``posmaps {zoo verify, scan, tightness, falsify}``.

Exit codes: 0 when every expectation is met, 1 on an inequality violation or
example mismatch, 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import (
    DEFAULT_ALPHA_GRID,
    UsageError,
    falsify_file,
    manifest,
    parse_inequalities,
    run_scan,
    tightness_report,
    verify_zoo,
    write_scan,
)
from .positivity import EnsembleConfig, parse_ensemble
from .serialize import ParseError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posmaps", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    zoo = sub.add_parser("zoo", help="closed-form example maps")
    zoo_sub = zoo.add_subparsers(dest="zoo_command", required=True)
    verify = zoo_sub.add_parser("verify", help="check every worked example; JSON manifest")
    verify.add_argument("--alpha-grid", type=_floats, default=list(DEFAULT_ALPHA_GRID))
    verify.add_argument("--seed", type=int, default=2025)
    verify.add_argument("--restarts", type=int, default=50)
    verify.add_argument("--out", type=Path, default=None, help="also write the manifest here")

    scan = sub.add_parser("scan", help="seeded ensemble scan")
    scan.add_argument("--ensemble", default="cptp",
                      help="cptp | decomposable | unitary | cp | generators")
    scan.add_argument("--d", type=int, default=None)
    scan.add_argument("--n", type=int, default=None)
    scan.add_argument("--seed", type=int, default=None)
    scan.add_argument("--kraus-rank", type=int, default=None)
    scan.add_argument("--transpose-rank", type=int, default=None)
    scan.add_argument("--config", type=Path, default=None, help="JSON or TOML ensemble config")
    scan.add_argument("--inequalities", default=None,
                      help="comma-separated, e.g. MAP_BOUND,LEMMA_TG")
    scan.add_argument("--bases", type=int, default=1, help="random bases per sample for LEMMA_TG")
    scan.add_argument("--workers", type=int, default=None)
    scan.add_argument("--out", type=Path, default=None,
                      help="output prefix; writes <out>.csv and <out>.json")

    tight = sub.add_parser("tightness", help="optimality construction for c > d")
    tight.add_argument("--d", type=int, required=True)
    tight.add_argument("--c", type=float, required=True)

    fal = sub.add_parser("falsify", help="seesaw search for k-positivity witnesses")
    fal.add_argument("choi_file", type=Path)
    fal.add_argument("--k", type=int, choices=(1, 2), action="append", default=None)
    fal.add_argument("--restarts", type=int, default=50)
    fal.add_argument("--seed", type=int, default=0)
    expect = fal.add_mutually_exclusive_group()
    expect.add_argument("--expect-falsify", action="store_true")
    expect.add_argument("--expect-pass", action="store_true")
    return parser


def _print(obj) -> None:
    print(json.dumps(obj, indent=2, default=float))


def _cmd_zoo_verify(args) -> int:
    doc = manifest(verify_zoo(alpha_grid=args.alpha_grid, seed=args.seed, restarts=args.restarts))
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(doc, indent=2) + "\n")
    _print(doc)
    return EXIT_OK if doc["all_pass"] else EXIT_FAIL


def _scan_config(args) -> EnsembleConfig:
    base = EnsembleConfig.from_file(args.config).to_dict() if args.config else {}
    overrides = {
        "dim": args.d, "count": args.n, "seed": args.seed,
        "kraus_rank": args.kraus_rank, "transpose_rank": args.transpose_rank,
    }
    data = {k: v for k, v in base.items() if k != "rng"}
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.config is None or args.ensemble != "cptp":
        data["ensemble_id"] = parse_ensemble(args.ensemble)
    data.setdefault("count", 100)
    data.setdefault("seed", 0)
    if "dim" not in data:
        raise UsageError("--d is required")
    return EnsembleConfig.from_dict(data)


def _cmd_scan(args) -> int:
    config = _scan_config(args)
    ineqs = parse_inequalities(args.inequalities, config.ensemble_id)
    result = run_scan(config, ineqs, bases=args.bases, workers=args.workers)
    prefix = args.out or Path("out") / f"scan-{config.seed}"
    csv_path, json_path = prefix.with_suffix(".csv"), prefix.with_suffix(".json")
    write_scan(result, csv_path, json_path)
    summary = {k: v for k, v in result.summary.items()}
    summary["csv"], summary["json"] = str(csv_path), str(json_path)
    _print(summary)
    return EXIT_OK if result.count_violated == 0 else EXIT_FAIL


def _cmd_tightness(args) -> int:
    report = tightness_report(args.d, args.c)
    _print(report)
    ok = report["optimality"]["satisfied"] and report["map_bound"]["satisfied"]
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_falsify(args) -> int:
    ks = tuple(sorted(set(args.k))) if args.k else (1, 2)
    verdict = falsify_file(args.choi_file, ks, args.restarts, args.seed)
    _print(verdict.to_dict())
    found = any(getattr(verdict, f"k{k}_witness") is not None for k in ks)
    if args.expect_falsify:
        return EXIT_OK if found else EXIT_FAIL
    if args.expect_pass:
        return EXIT_FAIL if found else EXIT_OK
    return EXIT_OK


COMMANDS = {
    "scan": _cmd_scan,
    "tightness": _cmd_tightness,
    "falsify": _cmd_falsify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = _cmd_zoo_verify if args.command == "zoo" else COMMANDS[args.command]
    try:
        return handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
