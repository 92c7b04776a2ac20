from __future__ import annotations

import numpy as np
import pytest

from motionbench import ColorModel, Frame, create_detector
from motionbench.detectors import (
    PixelMixture,
    mog_background_count,
    mog_match,
    mog_update,
)


def gray(values) -> Frame:
    return Frame(np.asarray(values, dtype=np.uint8), ColorModel.GRAY8)


def gray1x1(value) -> Frame:
    return gray([[value]])


class TestRunningGaussianAverage:
    def test_mean_update_arithmetic(self):
        detector = create_detector("rga", alpha=0.01)
        detector.step(gray1x1(100))
        detector.step(gray1x1(200))
        assert detector.mean[0, 0] == pytest.approx(101.0)

    def test_variance_decay_with_zero_residual(self):
        detector = create_detector("rga", alpha=0.01)
        detector.step(gray1x1(100))
        detector._variance[:] = 100.0
        detector.step(gray1x1(100))
        assert detector.variance[0, 0] == pytest.approx(99.0)

    def test_strict_deviation_band(self):
        for value, expected in ((126, 1), (125, 0)):
            detector = create_detector("rga", D=2.5)
            detector.step(gray1x1(100))
            detector._variance[:] = 100.0
            mask = detector.step(gray1x1(value))
            assert mask.labels[0, 0] == expected

    def test_variance_stays_positive(self):
        rng = np.random.default_rng(3)
        detector = create_detector("rga")
        for _ in range(100):
            detector.step(gray(rng.integers(0, 256, (4, 4))))
            assert detector.variance.min() > 0.0


def mixture(weights, means, variances) -> PixelMixture:
    mix = PixelMixture(np.array(weights, float), np.array(means, float), np.array(variances, float))
    mix.sort()
    return mix


class TestMogMatch:
    def test_matches_within_band(self):
        mix = mixture([0.6, 0.4], [100.0, 50.0], [100.0, 100.0])
        assert mog_match(mix, 105.0) == 0

    def test_first_match_wins_on_overlap(self):
        mix = mixture([0.6, 0.4], [100.0, 110.0], [100.0, 100.0])
        assert mog_match(mix, 105.0) == 0

    def test_no_match_outside_all_bands(self):
        mix = mixture([0.5, 0.5], [0.0, 10.0], [100.0, 100.0])
        assert mog_match(mix, 255.0) is None


class TestMogBackgroundCount:
    def test_dominant_weight(self):
        mix = mixture([0.6, 0.3, 0.1], [0, 50, 100], [1, 1, 1])
        assert mog_background_count(mix, 0.25) == 1

    def test_two_needed(self):
        mix = mixture([0.6, 0.3, 0.1], [0, 50, 100], [1, 1, 1])
        assert mog_background_count(mix, 0.7) == 2

    def test_zero_threshold(self):
        mix = mixture([0.6, 0.3, 0.1], [0, 50, 100], [1, 1, 1])
        assert mog_background_count(mix, 0.0) == 1

    def test_matches_prefix_sum_definition(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            k = rng.integers(1, 6)
            w = rng.dirichlet(np.ones(k))
            mix = mixture(w, rng.uniform(0, 255, k), rng.uniform(1, 400, k))
            t = float(rng.uniform(0, 1))
            b = mog_background_count(mix, t)
            cumulative = np.cumsum(mix.weights)
            candidates = np.nonzero(cumulative > t)[0]
            expected = candidates[0] + 1 if candidates.size else k
            assert b == expected


class TestMogUpdate:
    def test_learning_rate_ratio(self):
        # rho = alpha / omega: matched mean moves by exactly rho toward x
        mix = mixture([0.5, 0.5], [0.0, 200.0], [100.0, 100.0])
        out = mog_update(mix, 1.0, 0, alpha=0.01)
        moved = out.means[np.argmin(np.abs(out.means - 0.02))]
        assert moved == pytest.approx(0.02)

    def test_matched_weight_update(self):
        mix = mixture([0.5, 0.3, 0.2], [0.0, 100.0, 200.0], [100.0] * 3)
        out = mog_update(mix, 0.0, 0, alpha=0.01)
        assert out.weights.max() == pytest.approx(0.505)
        assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_replacement_takes_smallest_weight(self):
        mix = mixture([0.7, 0.2, 0.1], [0.0, 100.0, 200.0], [100.0] * 3)
        out = mog_update(mix, 42.0, None, alpha=0.01, sigma_init=20.0)
        replaced = int(np.argmin(np.abs(out.means - 42.0)))
        assert out.variances[replaced] == pytest.approx(400.0)
        assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_random_stream_preserves_normalization_and_order(self):
        rng = np.random.default_rng(7)
        mix = mixture([1.0, 0.0, 0.0], [100.0, 0.0, 255.0], [400.0] * 3)
        for _ in range(2000):
            x = float(rng.uniform(0, 255))
            mix = mog_update(mix, x, mog_match(mix, x))
            assert mix.weights.sum() == pytest.approx(1.0, abs=1e-9)
            ratio = mix.weights / np.sqrt(mix.variances)
            assert np.all(np.diff(ratio) <= 1e-12)


def reference_mog_run(frames, k=3, alpha=0.01, portion=0.25, deviation=2.5, sigma_init=20.0):
    """Per-pixel reference of the full step semantics, built on the helpers."""
    height, width = frames[0].shape
    labels_out = []
    mixtures = {}
    var0 = max(sigma_init**2, 1e-4)
    spread = np.linspace(0.0, 255.0, k - 1) if k > 2 else [0.0]
    for t, frame in enumerate(frames):
        labels = np.zeros((height, width), dtype=np.uint8)
        for y in range(height):
            for x in range(width):
                value = float(frame[y, x])
                if t == 0:
                    w = np.zeros(k)
                    mu = np.zeros(k)
                    w[0] = 1.0
                    mu[0] = value
                    for i, center in enumerate(spread, start=1):
                        if i < k:
                            mu[i] = center
                    mix = PixelMixture(w, mu, np.full(k, var0))
                    mix.sort()
                    mixtures[y, x] = mix
                    continue
                mix = mixtures[y, x]
                b = mog_background_count(mix, portion)
                hits = np.abs(mix.means - value) <= deviation * np.sqrt(mix.variances)
                labels[y, x] = 0 if hits[:b].any() else 1
                matched = mog_match(mix, value, deviation)
                mixtures[y, x] = mog_update(mix, value, matched, alpha, sigma_init)
        labels_out.append(labels)
    return labels_out, mixtures


class TestGaussianMixtureDetector:
    def test_vectorized_step_matches_per_pixel_reference(self):
        rng = np.random.default_rng(21)
        frames = [rng.integers(0, 256, (4, 5)).astype(np.uint8) for _ in range(25)]
        detector = create_detector("mog")
        masks = [detector.step(gray(f)).labels for f in frames]
        expected, mixes = reference_mog_run(frames)
        for got, want in zip(masks, expected):
            assert np.array_equal(got, want)
        for y in range(4):
            for x in range(5):
                mix = detector.mixture_at(y, x)
                ref = mixes[y, x]
                assert np.allclose(mix.weights, ref.weights, atol=1e-12)
                assert np.allclose(mix.means, ref.means, atol=1e-9)
                assert np.allclose(mix.variances, ref.variances, atol=1e-9)

    def test_single_dominant_gaussian_keeps_background(self):
        detector = create_detector("mog")
        detector.step(gray1x1(100))
        assert detector.step(gray1x1(100)).labels[0, 0] == 0

    def test_far_value_flags_foreground_and_replaces(self):
        detector = create_detector("mog")
        detector.step(gray1x1(100))
        mask = detector.step(gray1x1(250))
        assert mask.labels[0, 0] == 1
        mix = detector.mixture_at(0, 0)
        assert np.any(np.abs(mix.means - 250.0) < 1e-9)

    def test_constant_sequence_settles_to_background(self):
        detector = create_detector("mog")
        frame = gray(np.full((6, 6), 80))
        for _ in range(100):
            mask = detector.step(frame)
        assert mask.foreground_count() == 0
        mix = detector.mixture_at(0, 0)
        assert mix.weights[0] > 0.99

    def test_weight_normalization_over_stream(self):
        rng = np.random.default_rng(9)
        detector = create_detector("mog")
        for _ in range(60):
            detector.step(gray(rng.integers(0, 256, (5, 5))))
            total = detector._weights.sum(axis=0)
            assert np.allclose(total, 1.0, atol=1e-9)


class TestGaussianAgreement:
    def test_rga_and_mog_flag_step_frame(self):
        constant = gray(np.full((6, 6), 100))
        stepped = gray(np.full((6, 6), 220))
        for method in ("rga", "mog"):
            detector = create_detector(method)
            for _ in range(50):
                detector.step(constant)
            mask = detector.step(stepped)
            assert mask.labels.all(), method
