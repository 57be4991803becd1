"""Filtering, epoching and label-sequence tests for dyadbci.signal_core."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadbci import signal_core as sc
from dyadbci.errors import (
    IncompleteMontageError,
    InsufficientSamplesError,
    InvalidBandError,
    InvalidRateError,
    TruncatedTrialError,
    UnsupportedRatioError,
)


def sine(freq, fs, seconds, amp=1.0):
    t = np.arange(int(seconds * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t)


def mid_rms(x, frac=0.5):
    """RMS of the middle section, away from filter edge effects."""
    n = x.shape[-1]
    lo = int(n * (1 - frac) / 2)
    return float(np.sqrt(np.mean(x[..., lo : n - lo] ** 2)))


class TestBands:
    def test_canonical_edges(self):
        assert sc.band("delta").low == 0.5 and sc.band("delta").high == 4.0
        assert sc.band("theta").low == 4.0 and sc.band("theta").high == 8.0
        assert sc.band("alpha").low == 8.0 and sc.band("alpha").high == 13.0
        assert sc.band("beta").low == 13.0 and sc.band("beta").high == 30.0
        assert sc.band("gamma").low == 30.0 and sc.band("gamma").high == 60.0

    def test_band_names_cover_table(self):
        assert set(sc.BAND_NAMES) == {"delta", "theta", "alpha", "beta", "gamma"}

    def test_unknown_band(self):
        with pytest.raises(InvalidBandError):
            sc.band("mu")

    def test_canonical_name_with_wrong_edges(self):
        with pytest.raises(InvalidBandError):
            sc.FrequencyBand("alpha", 7.0, 12.0)

    def test_ad_hoc_band_allowed(self):
        fb = sc.FrequencyBand("narrow", 9.0, 11.0)
        assert fb.low == 9.0

    def test_degenerate_edges(self):
        with pytest.raises(InvalidBandError):
            sc.FrequencyBand("bad", 10.0, 10.0)
        with pytest.raises(InvalidBandError):
            sc.FrequencyBand("bad", -1.0, 5.0)


class TestMontage:
    def test_roi_partition(self):
        assert sc.roi_of("Fp1") == "prefrontal"
        assert sc.roi_of("C4") == "central"
        assert sc.roi_of("Pz") == "parietal"
        covered = [e for elecs in sc.ROIS.values() for e in elecs]
        assert sorted(covered) == sorted(sc.ELECTRODES)

    def test_unknown_electrode(self):
        with pytest.raises(IncompleteMontageError):
            sc.roi_of("Oz")

    def test_cooperative_labels(self):
        assert sc.is_cooperative("left_hand+tongue")
        assert not sc.is_cooperative("left_hand")
        assert sc.split_cooperative("right_hand+foot") == ("right_hand", "foot")
        assert len(sc.COOPERATIVE_CLASSES) == 4

    def test_split_rejects_single(self):
        with pytest.raises(ValueError):
            sc.split_cooperative("tongue")


class TestBandpass:
    def test_passband_and_stopband(self):
        fs = 250.0
        coeffs = sc.design_bandpass(sc.band("alpha"), fs)
        inband = sc.apply_filter_zero_phase(coeffs, sine(10.0, fs, 8.0))
        outband = sc.apply_filter_zero_phase(coeffs, sine(25.0, fs, 8.0))
        ref = mid_rms(sine(10.0, fs, 8.0))
        assert mid_rms(inband) / ref > 0.95
        assert mid_rms(outband) / ref < 0.05

    def test_edge_gain_is_squared_half_power(self):
        # forward-backward application squares the magnitude response,
        # so the half-power edge sits at amplitude 0.5
        fs = 250.0
        coeffs = sc.design_bandpass(sc.band("alpha"), fs)
        edge = sc.apply_filter_zero_phase(coeffs, sine(13.0, fs, 20.0))
        ratio = mid_rms(edge) / mid_rms(sine(13.0, fs, 20.0))
        assert ratio == pytest.approx(0.5, abs=0.05)

    def test_zero_phase_lag(self):
        fs = 250.0
        x = sine(10.0, fs, 8.0)
        y = sc.apply_filter_zero_phase(sc.design_bandpass(sc.band("alpha"), fs), x)
        n = x.size
        sl = slice(n // 4, 3 * n // 4)
        lags = range(-10, 11)
        corr = [np.dot(x[sl], np.roll(y, lag)[sl]) for lag in lags]
        assert lags[int(np.argmax(corr))] == 0

    def test_band_above_nyquist(self):
        with pytest.raises(InvalidBandError):
            sc.design_bandpass(sc.band("gamma"), 100.0)

    def test_bad_rate(self):
        with pytest.raises(InvalidRateError):
            sc.design_bandpass(sc.band("alpha"), 0.0)

    def test_short_input_raises(self):
        coeffs = sc.design_bandpass(sc.band("alpha"), 250.0)
        need = coeffs.min_samples()
        with pytest.raises(InsufficientSamplesError):
            sc.apply_filter_zero_phase(coeffs, np.zeros(need - 1))
        out = sc.apply_filter_zero_phase(coeffs, np.zeros(need))
        assert out.shape == (need,)

    def test_matrix_input_filters_rows(self):
        fs = 250.0
        x = np.stack([sine(10.0, fs, 4.0), sine(25.0, fs, 4.0)])
        y = sc.apply_filter_zero_phase(sc.design_bandpass(sc.band("alpha"), fs), x)
        assert y.shape == x.shape
        assert mid_rms(y[0]) > 10 * mid_rms(y[1])


class TestNotch:
    def test_depth_and_neighbors(self):
        fs = 250.0
        ratio_50 = mid_rms(sc.notch_50hz(sine(50.0, fs, 10.0), fs)) / mid_rms(
            sine(50.0, fs, 10.0)
        )
        assert 20 * np.log10(ratio_50) < -30.0
        for f in (40.0, 60.0):
            ratio = mid_rms(sc.notch_50hz(sine(f, fs, 10.0), fs)) / mid_rms(
                sine(f, fs, 10.0)
            )
            assert ratio > 0.9

    def test_rate_guard(self):
        with pytest.raises(InvalidRateError):
            sc.notch_50hz(np.zeros(1000), 100.0)


class TestDownsample:
    def test_length_and_content(self):
        fs = 1000.0
        x = sine(10.0, fs, 4.0)
        y = sc.downsample(x, fs, 250.0)
        assert y.size == x.size // 4
        t = np.arange(y.size) / 250.0
        expected = np.sin(2 * np.pi * 10.0 * t)
        n = y.size
        sl = slice(n // 4, 3 * n // 4)
        assert np.corrcoef(y[sl], expected[sl])[0, 1] > 0.999

    def test_alias_band_is_suppressed(self):
        # 150 Hz would fold onto 100 Hz at 250 Hz; the anti-alias lowpass
        # (cutoff 100 Hz) must remove it first
        fs = 1000.0
        y = sc.downsample(sine(150.0, fs, 4.0), fs, 250.0)
        assert mid_rms(y) < 0.1

    def test_gamma_survives(self):
        fs = 1000.0
        y = sc.downsample(sine(55.0, fs, 4.0), fs, 250.0)
        assert mid_rms(y) > 0.9 * mid_rms(sine(55.0, fs, 4.0))

    def test_identity_factor_copies(self):
        x = np.arange(100.0)
        y = sc.downsample(x, 250.0, 250.0)
        y[0] = -1.0
        assert x[0] == 0.0

    def test_non_integer_ratio(self):
        with pytest.raises(UnsupportedRatioError):
            sc.downsample(np.zeros(1000), 1000.0, 400.0)

    def test_bad_rates(self):
        with pytest.raises(InvalidRateError):
            sc.downsample(np.zeros(10), -1.0, 250.0)


class TestEpoching:
    def test_cut_positions_and_labels(self):
        fs = 250.0
        n_epoch = int(sc.EPOCH_SECONDS * fs)
        data = np.arange(3 * n_epoch, dtype=float)[None, :].repeat(2, axis=0)
        rec = sc.Recording("s1", ("C3", "C4"), fs, data)
        onsets = [0, n_epoch, 2 * n_epoch]
        epochs = sc.epoch_recording(rec, onsets, ["a", "b", "a"])
        assert [e.condition for e in epochs] == ["a", "b", "a"]
        assert [e.trial_index for e in epochs] == [0, 1, 2]
        assert epochs[1].data[0, 0] == n_epoch
        assert epochs[2].data.shape == (2, n_epoch)

    def test_truncated_trial(self):
        fs = 250.0
        rec = sc.Recording("s1", ("C3",), fs, np.zeros((1, 3000)))
        with pytest.raises(TruncatedTrialError):
            sc.epoch_recording(rec, [1000], ["a"])

    def test_label_count_mismatch(self):
        fs = 250.0
        rec = sc.Recording("s1", ("C3",), fs, np.zeros((1, 5000)))
        with pytest.raises(ValueError):
            sc.epoch_recording(rec, [0], ["a", "b"])

    def test_state_windows_at_250(self):
        rest, task = sc.state_slices(250.0)
        assert (rest.start, rest.stop) == (0, 1000)
        assert (task.start, task.stop) == (1250, 2500)

    def test_split_states_shapes(self):
        fs = 250.0
        e = sc.Epoch(0, "a", fs, np.zeros((8, 2500)), sc.ELECTRODES)
        rest, task = sc.split_states(e)
        assert rest.shape == (8, 1000)
        assert task.shape == (8, 1250)


class TestArtifactRejection:
    def test_threshold_is_strict(self):
        fs = 10.0  # keeps the mandatory 10 s epoch small
        ok = sc.Epoch(0, "a", fs, np.full((1, 100), 100.0), ("C3",))
        bad = sc.Epoch(1, "a", fs, np.full((1, 100), 100.5), ("C3",))
        kept, rejected = sc.artifact_reject([ok, bad])
        assert [e.trial_index for e in kept] == [0]
        assert rejected == [1]

    def test_negative_excursion_counts(self):
        fs = 10.0
        e = sc.Epoch(0, "a", fs, np.array([[-150.0] + [0.0] * 99]), ("C3",))
        kept, rejected = sc.artifact_reject([e])
        assert not kept and rejected == [0]

    def test_bad_limit(self):
        with pytest.raises(ValueError):
            sc.artifact_reject([], amplitude_limit=0.0)


class TestPreprocess:
    def test_pipeline_shapes_and_rejection(self):
        fs = 1000.0
        n_epoch = int(sc.EPOCH_SECONDS * fs)
        rng = np.random.default_rng(3)
        data = rng.normal(0, 5.0, size=(8, 2 * n_epoch))
        # a 50 ms 500 uV excursion survives the anti-alias lowpass,
        # unlike a single-sample spike
        data[0, n_epoch + 500 : n_epoch + 550] = 500.0
        rec = sc.Recording("s1", sc.ELECTRODES, fs, data)
        kept, rejected = sc.preprocess_recording(rec, [0, n_epoch], ["a", "b"])
        assert [e.trial_index for e in kept] == [0]
        assert rejected == [1]
        assert kept[0].sample_rate == 250.0
        assert kept[0].data.shape == (8, 2500)

    def test_notch_removes_line_noise_before_epoching(self):
        fs = 1000.0
        n_epoch = int(sc.EPOCH_SECONDS * fs)
        t = np.arange(n_epoch) / fs
        line = 50.0 * np.sin(2 * np.pi * 50.0 * t)
        rec = sc.Recording("s1", ("C3",), fs, line[None, :])
        kept, _ = sc.preprocess_recording(rec, [0], ["a"])
        assert mid_rms(kept[0].data[0]) < 2.0


class TestBalancedLabels:
    def test_exact_balance(self):
        rng = np.random.default_rng(0)
        seq = sc.balanced_label_sequence(["x", "y"], 3, 20, rng)
        assert len(seq) == 60
        for b in range(3):
            block = seq[b * 20 : (b + 1) * 20]
            assert block.count("x") == 10 and block.count("y") == 10

    def test_remainder_spread(self):
        rng = np.random.default_rng(1)
        seq = sc.balanced_label_sequence(["x", "y", "z"], 1, 5, rng)
        counts = sorted(seq.count(c) for c in "xyz")
        assert counts in ([1, 2, 2], [1, 1, 3]) or max(counts) - min(counts) <= 1

    def test_deterministic_for_seeded_rng(self):
        a = sc.balanced_label_sequence(["x", "y"], 2, 10, np.random.default_rng(5))
        b = sc.balanced_label_sequence(["x", "y"], 2, 10, np.random.default_rng(5))
        assert a == b

    def test_empty_classes(self):
        with pytest.raises(ValueError):
            sc.balanced_label_sequence([], 1, 10, np.random.default_rng(0))

    @given(
        k=st.integers(min_value=1, max_value=5),
        blocks=st.integers(min_value=1, max_value=4),
        tpb=st.integers(min_value=1, max_value=25),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_per_block_counts_differ_by_at_most_one(self, k, blocks, tpb, seed):
        classes = [f"c{i}" for i in range(k)]
        seq = sc.balanced_label_sequence(classes, blocks, tpb, np.random.default_rng(seed))
        assert len(seq) == blocks * tpb
        for b in range(blocks):
            block = seq[b * tpb : (b + 1) * tpb]
            counts = [block.count(c) for c in classes]
            assert max(counts) - min(counts) <= 1
