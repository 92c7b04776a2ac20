"""motionbench: streaming motion detectors plus a pixel-level benchmark.

Twelve classical background-subtraction and temporal-differencing methods
behind one streaming contract, the seven-metric evaluation protocol with
three-level ranking, a dataset loader for the change-detection benchmark
layout, a synthetic oracle generator, and the ``bench`` command line.
"""

from .bench import (
    BUNDLED_TABLES,
    BenchmarkResult,
    ReplayResult,
    RunManifest,
    TimingRecord,
    replay_tables,
    run_benchmark,
)
from .dataset import (
    DatasetError,
    GroundTruthFrame,
    SyntheticSpec,
    VideoEntry,
    decode_groundtruth,
    encode_groundtruth,
    generate_synthetic,
    load_frame,
    scan_dataset,
)
from .detectors import (
    ConfigError,
    Detector,
    DetectorConfig,
    InputMismatchError,
    available_methods,
    create_detector,
)
from .evaluation import (
    ConfusionCounts,
    MetricVector,
    ScoreTable,
    accumulate,
    assemble_score_table,
    average_rank,
    category_average,
    metrics,
    overall_average,
    rank_methods,
)
from .frames import (
    ColorModel,
    Frame,
    FrameError,
    ForegroundMask,
    convert,
    to_grayscale,
    to_hsv,
    to_rgb,
)
from .thresholding import (
    Histogram256,
    StructuringElement,
    binarize,
    morph_close_open,
    otsu_binarize,
    otsu_threshold,
    quantize_response,
    sobel_gradient_magnitude,
)

__version__ = "0.1.0"

__all__ = [
    "BUNDLED_TABLES",
    "BenchmarkResult",
    "ColorModel",
    "ConfigError",
    "ConfusionCounts",
    "DatasetError",
    "Detector",
    "DetectorConfig",
    "Frame",
    "FrameError",
    "ForegroundMask",
    "GroundTruthFrame",
    "Histogram256",
    "InputMismatchError",
    "MetricVector",
    "ReplayResult",
    "RunManifest",
    "ScoreTable",
    "StructuringElement",
    "SyntheticSpec",
    "TimingRecord",
    "VideoEntry",
    "accumulate",
    "assemble_score_table",
    "available_methods",
    "average_rank",
    "binarize",
    "category_average",
    "convert",
    "create_detector",
    "decode_groundtruth",
    "encode_groundtruth",
    "generate_synthetic",
    "load_frame",
    "metrics",
    "morph_close_open",
    "otsu_binarize",
    "otsu_threshold",
    "overall_average",
    "quantize_response",
    "rank_methods",
    "replay_tables",
    "run_benchmark",
    "scan_dataset",
    "sobel_gradient_magnitude",
    "to_grayscale",
    "to_hsv",
    "to_rgb",
    "__version__",
]
