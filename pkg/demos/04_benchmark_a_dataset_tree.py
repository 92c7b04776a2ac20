"""Build a small benchmark-layout dataset on disk and run the full harness.

The tree follows the standard change-detection layout (input/, groundtruth/,
ROI, temporalROI.txt).  The harness streams every (method, video) pair,
pools counts over each video's temporal region of interest, aggregates per
category and overall, and writes the score CSVs.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from motionbench import RunManifest, SyntheticSpec, generate_synthetic, run_benchmark

workdir = Path(tempfile.mkdtemp(prefix="motionbench_demo_"))
root = workdir / "dataset"

for category, video, seed in [
    ("indoor", "hallway", 1),
    ("indoor", "lobby", 2),
    ("outdoor", "yard", 3),
]:
    spec = SyntheticSpec(
        width=48, height=36, frame_count=60, object_width=7, object_height=7,
        start=(-8, 10), velocity=(2, 0), noise=3, seed=seed,
    )
    frames, truths = generate_synthetic(spec)
    video_dir = root / category / video
    (video_dir / "input").mkdir(parents=True)
    (video_dir / "groundtruth").mkdir(parents=True)
    for i, (frame, truth) in enumerate(zip(frames, truths), start=1):
        Image.fromarray(frame.data).save(video_dir / "input" / f"in{i:06d}.jpg")
        Image.fromarray(truth.codes).save(video_dir / "groundtruth" / f"gt{i:06d}.png")
    (video_dir / "temporalROI.txt").write_text("10 60")
    Image.fromarray(np.full((36, 48), 255, np.uint8)).save(video_dir / "ROI.bmp")

out = workdir / "results"
manifest = RunManifest(
    out_dir=out,
    methods=["fd", "raf", "rga", "mog"],
    dataset_root=root,
    overrides={"rga": {"alpha": 0.02}},
    save_masks=True,
)
result = run_benchmark(manifest)

print("completed without failures:", result.ok)
print("outputs under:", out)
for name in ("per_video.csv", "overall.csv", "timing.csv"):
    print(f"\n--- {name} ---")
    print((out / name).read_text().strip())
print("\nper-category tables:", sorted(p.name for p in (out / "per_category").iterdir()))
print("saved masks:", len(list((out / "masks").rglob("*.png"))))
