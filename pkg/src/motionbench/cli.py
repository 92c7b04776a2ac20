"""``bench`` command line: run detectors over datasets, synthetic clips, or
replay stored score tables.

Parameter overrides use ``--set method.param=value`` (repeatable) or a plain
key=value config file with the same keys, one per line.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import BUNDLED_TABLES, RunManifest, replay_tables, run_benchmark
from .dataset import SyntheticSpec
from .detectors import available_methods, get_detector_class


def _parse_assignment(text: str) -> tuple[str, str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected method.param=value, got {text!r}")
    key, value = text.split("=", 1)
    if "." not in key:
        raise argparse.ArgumentTypeError(f"expected method.param=value, got {text!r}")
    method, param = key.split(".", 1)
    return method.strip(), param.strip(), value.strip()


def _collect_overrides(args: argparse.Namespace) -> dict[str, dict[str, str]]:
    overrides: dict[str, dict[str, str]] = {}
    assignments: list[str] = []
    if args.config:
        for line in Path(args.config).read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                assignments.append(line)
    assignments.extend(args.set or [])
    for text in assignments:
        method, param, value = _parse_assignment(text)
        get_detector_class(method)  # fail fast on typos
        overrides.setdefault(method, {})[param] = value
    return overrides


def _parse_methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    for method in methods:
        get_detector_class(method)
    return methods


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--methods",
        default=",".join(available_methods()),
        help="comma-separated method list (default: all twelve)",
    )
    parser.add_argument("--out", required=True, type=Path, help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="parallel (method, video) workers")
    parser.add_argument(
        "--set",
        action="append",
        metavar="METHOD.PARAM=VALUE",
        help="override one detector parameter (repeatable)",
    )
    parser.add_argument("--config", type=Path, help="key=value file with the same keys as --set")
    parser.add_argument("--save-masks", action="store_true", help="save binary masks as PNGs")
    parser.add_argument(
        "--include-warmup-in-timing",
        action="store_true",
        help="count warm-up frames in the throughput numbers",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark methods over a dataset tree")
    run.add_argument("--dataset", required=True, type=Path, help="dataset root directory")
    _add_run_options(run)

    synth = sub.add_parser("synth", help="benchmark methods over a synthetic sequence")
    synth.add_argument("--spec", required=True, type=Path, help="JSON synthetic-sequence spec")
    _add_run_options(synth)

    replay = sub.add_parser("replay", help="recompute ranks from stored metric tables")
    replay.add_argument(
        "--fixtures",
        type=Path,
        default=BUNDLED_TABLES,
        help="directory with overall.csv and per-category CSVs (default: bundled tables)",
    )
    return parser


def _load_synthetic_spec(path: Path) -> SyntheticSpec:
    payload = json.loads(path.read_text())
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    for key in ("start", "velocity"):
        if key in payload:
            payload[key] = tuple(payload[key])
    if "positions" in payload and payload["positions"] is not None:
        payload["positions"] = [tuple(p) for p in payload["positions"]]
    return SyntheticSpec(**payload)


def _run_command(args: argparse.Namespace) -> int:
    manifest = RunManifest(
        out_dir=args.out,
        methods=_parse_methods(args.methods),
        dataset_root=getattr(args, "dataset", None),
        synthetic=_load_synthetic_spec(args.spec) if getattr(args, "spec", None) else None,
        overrides=_collect_overrides(args),
        workers=args.workers,
        save_masks=args.save_masks,
        include_warmup_in_timing=args.include_warmup_in_timing,
    )
    result = run_benchmark(manifest)
    print(f"wrote score tables to {args.out}")
    for failure in result.failures:
        print(
            f"FAILED {failure.method} on {failure.category}/{failure.video} "
            f"at frame {failure.frame_index}: {failure.error}",
            file=sys.stderr,
        )
    return 0 if result.ok else 1


def _replay_command(args: argparse.Namespace) -> int:
    result = replay_tables(args.fixtures)
    print(f"replayed {len(result.categories)} category tables, {len(result.methods)} methods")
    header = f"{'method':<12}{'R':>10}{'RC':>10}"
    print(header)
    for method in sorted(result.methods, key=lambda m: result.across_ranks[m]):
        print(
            f"{method:<12}{result.overall_ranks[method]:>10.5f}"
            f"{result.across_ranks[method]:>10.5f}"
        )
    deviations = []
    for category, ranks in result.category_ranks.items():
        for method, published in result.published_category_ranks[category].items():
            deviations.append(abs(ranks[method] - published))
    for method, published in result.published_overall_ranks.items():
        deviations.append(abs(result.overall_ranks[method] - published))
    if deviations:
        print(f"max deviation from published rank columns: {max(deviations):.5f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return _replay_command(args)
    return _run_command(args)


if __name__ == "__main__":
    sys.exit(main())
