"""Phase extraction and phase-locking value (PLV) estimation.

The PLV between two phase series at sample ``t`` is the modulus of the
across-trial mean unit phasor of the phase difference::

    PLV(t) = (1/N) | sum_n exp(j (phi_x[n, t] - phi_y[n, t])) |

which is 1 for a perfectly consistent phase relation and concentrates
around ``sqrt(pi/4) / sqrt(N)`` for independent uniform phases.  Windowed
estimates average PLV(t) over short consecutive windows (100 ms by
default), and inter-brain synchrony (IBS) tables hold one such estimate
per pair of electrodes across two subjects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from . import signal_core as sc
from . import stats
from .errors import (
    AlignmentError,
    EmptyResultError,
    IncompleteMontageError,
    InsufficientSamplesError,
)

STATES = ("rest", "task")

DEFAULT_WINDOW_S = 0.1
DEFAULT_STEP_S = 0.1


def expected_null_plv(n_trials: int) -> float:
    """Expected PLV for independent uniform phases over ``n_trials``."""
    return math.sqrt(math.pi / 4.0) / math.sqrt(n_trials)


def analytic_signal(x) -> np.ndarray:
    """Analytic signal via the frequency-domain Hilbert construction.

    Accepts a real series (or stack of series along the last axis) of at
    least 8 samples.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 8:
        raise InsufficientSamplesError(
            f"analytic signal needs at least 8 samples, got {x.shape[-1]}"
        )
    return sps.hilbert(x, axis=-1)


def instantaneous_phase(analytic) -> np.ndarray:
    """Principal-value phase in (-pi, pi] of an analytic signal.

    Samples with zero modulus have no phase; they come back as NaN and
    downstream window averages skip them.
    """
    analytic = np.asarray(analytic)
    phase = np.angle(analytic)
    zero = np.abs(analytic) == 0.0
    if np.any(zero):
        phase = np.where(zero, np.nan, phase)
    return phase


@dataclass
class PhaseSeries:
    """Instantaneous phase per trial, ``(n_trials, n_samples)``."""

    phases: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        if self.phases.ndim != 2:
            raise ValueError(f"phases must be (n_trials, n_samples), got {self.phases.shape}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        finite = self.phases[np.isfinite(self.phases)]
        if finite.size and (np.min(finite) <= -np.pi or np.max(finite) > np.pi):
            raise ValueError("phases must lie in the principal interval (-pi, pi]")

    @property
    def n_trials(self) -> int:
        return self.phases.shape[0]

    @property
    def n_samples(self) -> int:
        return self.phases.shape[1]


def _check_pair(phx: PhaseSeries, phy: PhaseSeries):
    if phx.phases.shape != phy.phases.shape:
        raise ValueError(
            f"phase series shapes differ: {phx.phases.shape} vs {phy.phases.shape}"
        )
    if phx.sample_rate != phy.sample_rate:
        raise ValueError(
            f"sample rates differ: {phx.sample_rate} vs {phy.sample_rate}"
        )


def plv_sample_series(phx: PhaseSeries, phy: PhaseSeries) -> np.ndarray:
    """Across-trial PLV at every sample; NaN where any trial is degenerate."""
    _check_pair(phx, phy)
    diff = phx.phases - phy.phases
    return np.abs(np.mean(np.exp(1j * diff), axis=0))


def plv_across_trials(phx: PhaseSeries, phy: PhaseSeries, t: int) -> float:
    """Across-trial PLV at one sample index."""
    series = plv_sample_series(phx, phy)
    if not 0 <= t < series.size:
        raise IndexError(f"sample {t} outside series of length {series.size}")
    return float(series[t])


@dataclass
class PLVSeries:
    """Windowed PLV estimates; one value per complete window."""

    window_centers: np.ndarray
    values: np.ndarray
    window_s: float
    step_s: float
    n_trials: int


def _window_starts(n_samples: int, win: int, step: int) -> np.ndarray:
    return np.arange(0, n_samples - win + 1, step)


def windowed_plv(
    phx: PhaseSeries,
    phy: PhaseSeries,
    window_s: float = DEFAULT_WINDOW_S,
    step_s: float = DEFAULT_STEP_S,
    t_offset: float = 0.0,
) -> PLVSeries:
    """Average the per-sample PLV over consecutive windows.

    Parameters
    ----------
    phx, phy : PhaseSeries
        Same shape and rate.
    window_s, step_s : float
        Window length and hop in seconds (both 0.1 by default, so windows
        tile the series).  A trailing partial window is discarded.
    t_offset : float
        Added to the reported window centers, handy when the series is a
        cut-out state window of a longer epoch.

    Raises
    ------
    EmptyResultError
        When not even one window fits.
    """
    _check_pair(phx, phy)
    if window_s <= 0 or step_s <= 0:
        raise ValueError(f"window and step must be positive, got {window_s}, {step_s}")
    fs = phx.sample_rate
    win = int(round(window_s * fs))
    step = int(round(step_s * fs))
    if win < 1 or step < 1:
        raise ValueError(f"window and step must span at least one sample at fs={fs}")
    n = phx.n_samples
    if win > n:
        raise EmptyResultError(
            f"window of {win} samples does not fit a series of {n}"
        )
    per_sample = plv_sample_series(phx, phy)
    starts = _window_starts(n, win, step)
    values = np.empty(starts.size)
    for i, s in enumerate(starts):
        chunk = per_sample[s : s + win]
        good = np.isfinite(chunk)
        values[i] = np.mean(chunk[good]) if np.any(good) else np.nan
    centers = t_offset + (starts + win / 2.0) / fs
    return PLVSeries(centers, values, window_s, step_s, phx.n_trials)


def per_trial_plv(phx: PhaseSeries, phy: PhaseSeries) -> np.ndarray:
    """Time-averaged PLV of each trial over the whole series.

    Collapses time instead of trials: for trial ``n`` this is
    ``| mean_t exp(j (phi_x[n, t] - phi_y[n, t])) |``, one number per
    trial.  Useful as the paired sample for task-versus-rest contrasts.
    """
    _check_pair(phx, phy)
    z = np.exp(1j * (phx.phases - phy.phases))
    out = np.empty(phx.n_trials)
    for n in range(phx.n_trials):
        zn = z[n][np.isfinite(z[n])]
        out[n] = np.abs(np.mean(zn)) if zn.size else np.nan
    return out


def state_contrast(task_values, rest_values) -> stats.TestResult:
    """Paired two-sided t-test of task versus rest synchrony values."""
    return stats.paired_t_test(task_values, rest_values)


def _sorted_by_trial(epochs):
    by_index = {}
    for e in epochs:
        if e.trial_index in by_index:
            raise AlignmentError(f"duplicate trial index {e.trial_index}")
        by_index[e.trial_index] = e
    return [by_index[i] for i in sorted(by_index)]


def _check_montage(epochs, who: str):
    for e in epochs:
        missing = [c for c in sc.ELECTRODES if c not in e.channels]
        if missing:
            raise IncompleteMontageError(
                f"{who} trial {e.trial_index} is missing electrodes {missing}"
            )


def phase_stack(epochs, fband: sc.FrequencyBand, state: str) -> tuple[np.ndarray, float]:
    """Band-limited phases for every electrode over one state window.

    Each full 10 s epoch is bandpass filtered and Hilbert transformed
    before the state window is cut out, so filter and transform edge
    effects land outside the analysed span.

    Returns
    -------
    phases : ndarray
        ``(n_electrodes, n_trials, n_state_samples)`` in montage order.
    sample_rate : float
    """
    if state not in STATES:
        raise ValueError(f"state must be one of {STATES}, got {state!r}")
    epochs = list(epochs)
    if not epochs:
        raise ValueError("no epochs given")
    _check_montage(epochs, "input")
    fs = epochs[0].sample_rate
    if any(e.sample_rate != fs for e in epochs):
        raise ValueError("epochs mix sample rates")
    stack = np.stack(
        [e.data[[e.channels.index(c) for c in sc.ELECTRODES]] for e in epochs]
    )  # trials x elec x samples
    coeffs = sc.design_bandpass(fband, fs)
    filtered = sc.apply_filter_zero_phase(coeffs, stack)
    phases = instantaneous_phase(analytic_signal(filtered))
    rest, task = sc.state_slices(fs)
    window = rest if state == "rest" else task
    return np.transpose(phases[:, :, window], (1, 0, 2)), fs


@dataclass
class IBSWindowedResult:
    """Windowed inter-brain PLV for all electrode pairs of a dyad.

    ``values[i, j, w]`` is the PLV between electrode ``i`` of subject A and
    electrode ``j`` of subject B in window ``w``; electrode order follows
    the montage.
    """

    band: str
    state: str
    window_centers: np.ndarray
    values: np.ndarray
    trial_count: int
    channels: tuple[str, ...] = sc.ELECTRODES


@dataclass
class IBSMatrix:
    """Window-averaged inter-brain PLV, ``(n_electrodes, n_electrodes)``."""

    band: str
    state: str
    values: np.ndarray
    trial_count: int
    channels: tuple[str, ...] = sc.ELECTRODES


def _aligned_dyad(epochs_a, epochs_b):
    a = _sorted_by_trial(epochs_a)
    b = _sorted_by_trial(epochs_b)
    idx_a = [e.trial_index for e in a]
    idx_b = [e.trial_index for e in b]
    if idx_a != idx_b:
        raise AlignmentError(
            f"trial indices differ between subjects: {idx_a[:5]}... vs {idx_b[:5]}..."
        )
    if not a:
        raise ValueError("no epochs given")
    return a, b


def ibs_windowed(
    epochs_a,
    epochs_b,
    fband: sc.FrequencyBand,
    state: str,
    window_s: float = DEFAULT_WINDOW_S,
    step_s: float = DEFAULT_STEP_S,
) -> IBSWindowedResult:
    """Windowed PLV between every electrode pair across two subjects.

    Epochs are matched one-to-one by trial index; both subjects must carry
    the full montage and identical trial sets.
    """
    a, b = _aligned_dyad(epochs_a, epochs_b)
    ph_a, fs = phase_stack(a, fband, state)
    ph_b, _ = phase_stack(b, fband, state)
    win = int(round(window_s * fs))
    step = int(round(step_s * fs))
    if window_s <= 0 or step_s <= 0 or win < 1 or step < 1:
        raise ValueError(f"window and step must be positive, got {window_s}, {step_s}")
    n_samples = ph_a.shape[2]
    if win > n_samples:
        raise EmptyResultError(f"window of {win} samples does not fit {n_samples}")
    n_trials = ph_a.shape[1]
    za = np.exp(1j * ph_a)
    zb = np.exp(1j * ph_b)
    # per-sample PLV for all pairs: mean over trials of za * conj(zb)
    per_sample = np.abs(np.einsum("int,jnt->ijt", za, np.conj(zb))) / n_trials
    starts = _window_starts(n_samples, win, step)
    values = np.empty((len(sc.ELECTRODES), len(sc.ELECTRODES), starts.size))
    for w, s in enumerate(starts):
        chunk = per_sample[:, :, s : s + win]
        values[:, :, w] = np.nanmean(chunk, axis=2)
    state_start = sc.REST_WINDOW[0] if state == "rest" else sc.TASK_WINDOW[0]
    centers = state_start + (starts + win / 2.0) / fs
    return IBSWindowedResult(fband.name, state, centers, values, n_trials)


def ibs_matrix(
    epochs_a,
    epochs_b,
    fband: sc.FrequencyBand,
    state: str,
    window_s: float = DEFAULT_WINDOW_S,
    step_s: float = DEFAULT_STEP_S,
) -> IBSMatrix:
    """Window-averaged inter-brain PLV per electrode pair."""
    windowed = ibs_windowed(epochs_a, epochs_b, fband, state, window_s, step_s)
    return IBSMatrix(
        band=windowed.band,
        state=windowed.state,
        values=np.nanmean(windowed.values, axis=2),
        trial_count=windowed.trial_count,
        channels=windowed.channels,
    )


def per_trial_pair_plv(ph_a: np.ndarray, ph_b: np.ndarray) -> np.ndarray:
    """Per-trial time-averaged PLV for every electrode pair.

    ``ph_a`` and ``ph_b`` are phase stacks shaped
    ``(n_electrodes, n_trials, n_samples)``.  Returns an
    ``(n_electrodes, n_electrodes, n_trials)`` array where entry
    ``[i, j, n]`` collapses time for trial ``n`` of the pair
    ``(a_i, b_j)``.  Non-finite phase samples are excluded per pair.
    """
    if ph_a.shape != ph_b.shape or ph_a.ndim != 3:
        raise AlignmentError("phase stacks must share an (elec, trial, t) shape")
    za = np.exp(1j * ph_a)
    zb = np.exp(1j * ph_b)
    za = np.where(np.isfinite(ph_a), za, 0)
    zb = np.where(np.isfinite(ph_b), zb, 0)
    counts = np.einsum(
        "int,jnt->ijn",
        np.isfinite(ph_a).astype(float),
        np.isfinite(ph_b).astype(float),
    )
    sums = np.einsum("int,jnt->ijn", za, np.conj(zb))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.abs(sums) / counts
    out[counts == 0] = np.nan
    return out


def per_trial_state_plv(
    epochs_a,
    epochs_b,
    fband: sc.FrequencyBand,
    electrode_a: str,
    electrode_b: str,
) -> dict:
    """Per-trial PLV of one electrode pair for both states.

    Returns a dict with ``rest`` and ``task`` arrays of one time-averaged
    PLV per trial, aligned for paired testing.
    """
    a, b = _aligned_dyad(epochs_a, epochs_b)
    ia = sc.ELECTRODES.index(electrode_a)
    ib = sc.ELECTRODES.index(electrode_b)
    out = {}
    for state in STATES:
        ph_a, fs = phase_stack(a, fband, state)
        ph_b, _ = phase_stack(b, fband, state)
        out[state] = per_trial_plv(
            PhaseSeries(ph_a[ia], fs), PhaseSeries(ph_b[ib], fs)
        )
    return out
