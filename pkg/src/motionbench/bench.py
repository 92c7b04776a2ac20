"""Benchmark harness: stream videos through detectors and emit score tables.

Each (method, video) pair owns one detector instance.  Counts accumulate
over the video's temporal region of interest, skipping warm-up frames and
honoring per-method output latency.  Failures are isolated per pair.  The
score CSVs and saved masks are byte-identical across reruns on the same
inputs; the timing CSV is wall-clock and therefore not.
"""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path
from typing import Any, Iterator

import numpy as np
from PIL import Image

from .dataset import (
    SyntheticSpec,
    VideoEntry,
    decode_groundtruth,
    generate_synthetic,
    load_frame,
    scan_dataset,
)
from .detectors import DetectorConfig, available_methods, create_detector, get_detector_class
from .evaluation import (
    METRIC_COLUMNS,
    ConfusionCounts,
    MetricVector,
    ScoreTable,
    accumulate,
    assemble_score_table,
    average_rank,
    metrics,
)
from .frames import Frame, convert

log = logging.getLogger(__name__)

BUNDLED_TABLES = Path(str(files("motionbench") / "tables"))
_FLOAT_FORMAT = "{:.5f}"


@dataclass
class RunManifest:
    """Everything one benchmark invocation needs."""

    out_dir: Path
    methods: list[str] = field(default_factory=lambda: list(available_methods()))
    dataset_root: Path | None = None
    synthetic: SyntheticSpec | None = None
    overrides: dict[str, dict[str, Any]] = field(default_factory=dict)
    workers: int = 1
    save_masks: bool = False
    include_warmup_in_timing: bool = False

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("need at least one method")
        if (self.dataset_root is None) == (self.synthetic is None):
            raise ValueError("exactly one of dataset_root or synthetic must be set")
        for method in self.methods:
            get_detector_class(method)  # unknown names fail before any work
        unknown = set(self.overrides) - set(self.methods)
        if unknown:
            raise ValueError(f"overrides for methods not in the run: {sorted(unknown)}")
        for method, params in self.overrides.items():
            DetectorConfig(method, params).resolve()  # bad overrides fail fast


@dataclass
class TimingRecord:
    """Throughput of one (method, video) pair, decode time excluded."""

    method: str
    category: str
    video: str
    frames: int
    seconds: float

    @property
    def fps(self) -> float:
        return self.frames / self.seconds


@dataclass
class PairFailure:
    method: str
    category: str
    video: str
    frame_index: int  # 1-based frame at which the pair failed, 0 if setup
    error: str


@dataclass
class BenchmarkResult:
    table: ScoreTable
    timings: list[TimingRecord]
    failures: list[PairFailure]

    @property
    def ok(self) -> bool:
        return not self.failures


def _iter_source(
    entry: VideoEntry | None, spec: SyntheticSpec | None
) -> Iterator[tuple[Frame, Any]]:
    """Yield (frame, lazy ground-truth handle) pairs in temporal order."""
    if entry is not None:
        for frame_path, gt_path in zip(entry.input_paths, entry.groundtruth_paths):
            yield load_frame(frame_path), gt_path
    else:
        assert spec is not None
        frames, truths = generate_synthetic(spec)
        for frame, truth in zip(frames, truths):
            yield frame, truth


def _run_pair(payload: dict) -> dict:
    """Worker body for one (method, video) pair; must stay picklable."""
    method: str = payload["method"]
    params: dict = payload["params"]
    entry: VideoEntry | None = payload.get("entry")
    spec: SyntheticSpec | None = payload.get("spec")
    include_warmup: bool = payload["include_warmup_in_timing"]
    mask_dir: Path | None = payload.get("mask_dir")

    if entry is not None:
        category, video = entry.category, entry.name
        first, last = entry.temporal_roi
        roi = entry.load_roi()
    else:
        assert spec is not None
        category, video = "synthetic", spec.name
        first, last = 1, spec.frame_count
        roi = None

    frame_index = 0
    try:
        detector = create_detector(method, **params)
        counts = ConfusionCounts()
        timed_frames = 0
        timed_seconds = 0.0
        buffered: list[Any] = []  # ground-truth handles, by 0-based frame index
        if mask_dir is not None:
            mask_dir.mkdir(parents=True, exist_ok=True)
        for index0, (frame, gt_handle) in enumerate(_iter_source(entry, spec)):
            frame_index = index0 + 1
            buffered.append(gt_handle)
            view = convert(frame, detector.input_model)
            start = time.perf_counter()
            mask = detector.step(view)
            elapsed = time.perf_counter() - start
            if include_warmup or not mask.warmup:
                timed_frames += 1
                timed_seconds += elapsed
            if mask.warmup:
                continue
            target0 = index0 - detector.latency
            if target0 < 0:
                continue
            frame_no = target0 + 1
            if not first <= frame_no <= last:
                continue
            handle = buffered[target0]
            truth = handle if not isinstance(handle, (str, Path)) else decode_groundtruth(handle)
            counts = accumulate(counts, mask, truth.codes, roi)
            if mask_dir is not None:
                Image.fromarray(mask.labels * np.uint8(255)).save(
                    mask_dir / f"bin{frame_no:06d}.png"
                )
        vector = metrics(counts)
    except Exception as exc:  # noqa: BLE001 - pair isolation is the contract
        return {
            "method": method,
            "category": category,
            "video": video,
            "error": f"{type(exc).__name__}: {exc}",
            "frame_index": frame_index,
        }
    return {
        "method": method,
        "category": category,
        "video": video,
        "vector": vector,
        "frames": timed_frames,
        "seconds": timed_seconds,
    }


def run_benchmark(manifest: RunManifest) -> BenchmarkResult:
    """Run every (method, video) pair, aggregate, and write the CSVs."""
    if manifest.dataset_root is not None:
        entries = scan_dataset(manifest.dataset_root)
        if not entries:
            raise ValueError(f"no videos found under {manifest.dataset_root}")
    else:
        entries = [None]

    payloads = []
    for method in manifest.methods:
        for entry in entries:
            payload: dict[str, Any] = {
                "method": method,
                "params": dict(manifest.overrides.get(method, {})),
                "include_warmup_in_timing": manifest.include_warmup_in_timing,
            }
            if entry is not None:
                payload["entry"] = entry
                pair_name = (entry.category, entry.name)
            else:
                payload["spec"] = manifest.synthetic
                pair_name = ("synthetic", manifest.synthetic.name)
            if manifest.save_masks:
                payload["mask_dir"] = manifest.out_dir / "masks" / method / pair_name[0] / pair_name[1]
            payloads.append(payload)

    if manifest.workers > 1:
        with ProcessPoolExecutor(max_workers=manifest.workers) as pool:
            raw = list(pool.map(_run_pair, payloads))
    else:
        raw = [_run_pair(p) for p in payloads]

    per_video: dict[tuple[str, str, str], MetricVector] = {}
    timings: list[TimingRecord] = []
    failures: list[PairFailure] = []
    for item in raw:
        key = (item["method"], item["category"], item["video"])
        if "error" in item:
            failures.append(PairFailure(*key, item["frame_index"], item["error"]))
            log.error(
                "%s on %s/%s failed at frame %d: %s",
                key[0], key[1], key[2], item["frame_index"], item["error"],
            )
            continue
        per_video[key] = item["vector"]
        if item["frames"] > 0 and item["seconds"] > 0:
            timings.append(TimingRecord(*key, item["frames"], item["seconds"]))

    table = assemble_score_table(per_video)
    write_score_csvs(table, manifest.out_dir)
    write_timing_csv(timings, manifest.out_dir / "timing.csv")
    if failures:
        _write_failures(failures, manifest.out_dir / "failures.csv")
    return BenchmarkResult(table, timings, failures)


def _fmt(value: float) -> str:
    return _FLOAT_FORMAT.format(value)


def write_score_csvs(table: ScoreTable, out_dir: Path) -> None:
    """per_video.csv, per_category/<category>.csv, and overall.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metric_headers = [header for _, header, _ in METRIC_COLUMNS]

    with (out_dir / "per_video.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Method", "Category", "Video", *metric_headers])
        for (method, category, video), vec in sorted(table.per_video.items()):
            row = [_fmt(getattr(vec, name)) if vec.defined else "" for name, _, _ in METRIC_COLUMNS]
            writer.writerow([method, category, video, *row])

    category_dir = out_dir / "per_category"
    category_dir.mkdir(exist_ok=True)
    for category in table.categories():
        rows = []
        for method in table.methods():
            vec = table.per_category.get((method, category))
            if vec is None:
                continue
            rank = table.category_rank.get((method, category))
            rows.append((method, vec, rank))
        rows.sort(key=lambda r: (r[2] if r[2] is not None else 0.0, r[0]))
        with (category_dir / f"{category}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["Method", *metric_headers, "RM_c"])
            for method, vec, rank in rows:
                writer.writerow(
                    [
                        method,
                        *[_fmt(getattr(vec, name)) for name, _, _ in METRIC_COLUMNS],
                        _fmt(rank) if rank is not None else "",
                    ]
                )

    with (out_dir / "overall.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Method", *metric_headers, "R", "RC"])
        rows2 = []
        for method, vec in table.overall.items():
            r = table.overall_rank.get(method)
            rc = table.across_rank.get(method)
            rows2.append((method, vec, r, rc))
        rows2.sort(key=lambda r: (r[3] if r[3] is not None else 0.0, r[0]))
        for method, vec, r, rc in rows2:
            writer.writerow(
                [
                    method,
                    *[_fmt(getattr(vec, name)) for name, _, _ in METRIC_COLUMNS],
                    _fmt(r) if r is not None else "",
                    _fmt(rc) if rc is not None else "",
                ]
            )


def write_timing_csv(timings: list[TimingRecord], path: Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Method", "Category", "Video", "Frames", "Seconds", "FPS"])
        for record in sorted(timings, key=lambda t: (t.method, t.category, t.video)):
            writer.writerow(
                [
                    record.method,
                    record.category,
                    record.video,
                    record.frames,
                    f"{record.seconds:.6f}",
                    f"{record.fps:.2f}",
                ]
            )


def _write_failures(failures: list[PairFailure], path: Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Method", "Category", "Video", "Frame", "Error"])
        for f in sorted(failures, key=lambda f: (f.method, f.category, f.video)):
            writer.writerow([f.method, f.category, f.video, f.frame_index, f.error])


@dataclass
class ReplayResult:
    """Ranks recomputed from stored metric tables, next to published ones."""

    methods: list[str]
    categories: list[str]
    category_ranks: dict[str, dict[str, float]]  # category -> method -> RM_c
    published_category_ranks: dict[str, dict[str, float]]
    across_ranks: dict[str, float]  # method -> RC
    published_across_ranks: dict[str, float]
    overall_ranks: dict[str, float]  # method -> R
    published_overall_ranks: dict[str, float]


def _read_metric_csv(path: Path, rank_column: str) -> tuple[dict[str, MetricVector], dict[str, float], dict[str, float]]:
    vectors: dict[str, MetricVector] = {}
    published: dict[str, float] = {}
    extra: dict[str, float] = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "Method" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a Method column")
        for row in reader:
            method = row["Method"]
            try:
                values = {name: float(row[header]) for name, header, _ in METRIC_COLUMNS}
            except (KeyError, TypeError, ValueError):
                raise ValueError(f"{path}: row {method!r} is missing metric values") from None
            vectors[method] = MetricVector(**values)
            if row.get(rank_column):
                published[method] = float(row[rank_column])
            if rank_column == "R" and row.get("RC"):
                extra[method] = float(row["RC"])
    return vectors, published, extra


def replay_tables(fixtures_dir: Path | None = None) -> ReplayResult:
    """Recompute the three rank levels from stored metric tables.

    ``fixtures_dir`` must hold overall.csv plus one CSV per category; the
    bundled published tables are used when it is omitted.  Every category
    table must cover the same method set.
    """
    fixtures_dir = Path(fixtures_dir) if fixtures_dir is not None else BUNDLED_TABLES
    overall_path = fixtures_dir / "overall.csv"
    if not overall_path.is_file():
        raise ValueError(f"{fixtures_dir}: missing overall.csv")
    overall_vectors, published_r, published_rc = _read_metric_csv(overall_path, "R")
    methods = sorted(overall_vectors)

    category_paths = sorted(
        p for p in fixtures_dir.glob("*.csv") if p.name != "overall.csv"
    )
    if not category_paths:
        raise ValueError(f"{fixtures_dir}: no category tables found")

    category_ranks: dict[str, dict[str, float]] = {}
    published_category: dict[str, dict[str, float]] = {}
    for path in category_paths:
        vectors, published, _ = _read_metric_csv(path, "RM_c")
        if sorted(vectors) != methods:
            raise ValueError(
                f"{path}: method set differs from overall.csv "
                f"({sorted(set(methods) ^ set(vectors))})"
            )
        category = path.stem
        category_ranks[category] = average_rank(vectors)
        published_category[category] = published

    across = {
        method: float(np.mean([category_ranks[c][method] for c in category_ranks]))
        for method in methods
    }
    return ReplayResult(
        methods=methods,
        categories=sorted(category_ranks),
        category_ranks=category_ranks,
        published_category_ranks=published_category,
        across_ranks=across,
        published_across_ranks=published_rc,
        overall_ranks=average_rank(overall_vectors),
        published_overall_ranks=published_r,
    )
