"""Electrode montage, frequency bands, filtering and epoching primitives.

Conventions used throughout the package:

* Multichannel data is ``(n_channels, n_samples)`` float64, amplitudes in
  microvolts.
* Epochs are exactly 10 s long.  Within an epoch, samples in ``[0, 4)`` s
  form the rest state and samples in ``[5, 10)`` s form the task state;
  the second 4 to 5 is a transition gap and is never analysed.
* All filtering is zero phase (forward-backward), so band limited
  oscillations keep their timing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps

from .errors import (
    IncompleteMontageError,
    InsufficientSamplesError,
    InvalidBandError,
    InvalidRateError,
    TruncatedTrialError,
    UnsupportedRatioError,
)

# Fixed eight-electrode montage and its region-of-interest grouping.
ELECTRODES = ("Fp1", "Fp2", "C3", "C4", "Cz", "P3", "P4", "Pz")

ROIS = {
    "prefrontal": ("Fp1", "Fp2"),
    "central": ("C3", "C4", "Cz"),
    "parietal": ("P3", "P4", "Pz"),
}

_ROI_OF = {e: roi for roi, elecs in ROIS.items() for e in elecs}

# Canonical analysis bands in Hz.
BAND_TABLE = {
    "delta": (0.5, 4.0),
    "theta": (4.0, 8.0),
    "alpha": (8.0, 13.0),
    "beta": (13.0, 30.0),
    "gamma": (30.0, 60.0),
}

BAND_NAMES = tuple(BAND_TABLE)

EPOCH_SECONDS = 10.0
REST_WINDOW = (0.0, 4.0)
TASK_WINDOW = (5.0, 10.0)

# Motor imagery class labels.  Single-task labels are atomic; cooperative
# labels pair one hand class with one head class, written "hand+head".
HAND_CLASSES = ("left_hand", "right_hand")
HEAD_CLASSES = ("tongue", "foot")
SINGLE_CLASSES = HAND_CLASSES + HEAD_CLASSES
COOPERATIVE_CLASSES = tuple(f"{h}+{g}" for h in HAND_CLASSES for g in HEAD_CLASSES)


def roi_of(electrode: str) -> str:
    """Return the region-of-interest name for an electrode label."""
    try:
        return _ROI_OF[electrode]
    except KeyError:
        raise IncompleteMontageError(f"unknown electrode {electrode!r}") from None


def is_cooperative(label: str) -> bool:
    return "+" in label


def split_cooperative(label: str) -> tuple[str, str]:
    """Split a cooperative label into its (hand, head) components."""
    hand, _, head = label.partition("+")
    if hand not in HAND_CLASSES or head not in HEAD_CLASSES:
        raise ValueError(f"not a cooperative class label: {label!r}")
    return hand, head


@dataclass(frozen=True)
class FrequencyBand:
    """A closed frequency interval in Hz.

    Named bands must match :data:`BAND_TABLE` exactly; ad hoc bands may use
    any other name.
    """

    name: str
    low: float
    high: float

    def __post_init__(self):
        if not (0.0 < self.low < self.high):
            raise InvalidBandError(
                f"band edges must satisfy 0 < low < high, got ({self.low}, {self.high})"
            )
        canonical = BAND_TABLE.get(self.name)
        if canonical is not None and (self.low, self.high) != canonical:
            raise InvalidBandError(
                f"band {self.name!r} is defined as {canonical}, got ({self.low}, {self.high})"
            )


def band(name: str) -> FrequencyBand:
    """Return one of the five canonical bands by name."""
    try:
        low, high = BAND_TABLE[name]
    except KeyError:
        raise InvalidBandError(
            f"unknown band {name!r}; expected one of {sorted(BAND_TABLE)}"
        ) from None
    return FrequencyBand(name, low, high)


def _as_channel_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected (n_channels, n_samples) data, got shape {arr.shape}")
    return arr


@dataclass
class Recording:
    """A continuous multichannel recording for one subject."""

    subject_id: str
    channels: tuple[str, ...]
    sample_rate: float
    data: np.ndarray

    def __post_init__(self):
        self.channels = tuple(self.channels)
        self.data = _as_channel_matrix(self.data)
        if self.sample_rate <= 0:
            raise InvalidRateError(f"sample_rate must be positive, got {self.sample_rate}")
        if len(self.channels) != self.data.shape[0]:
            raise ValueError(
                f"{len(self.channels)} channel labels for {self.data.shape[0]} data rows"
            )
        if len(set(self.channels)) != len(self.channels):
            raise ValueError("duplicate channel labels")

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def channel(self, label: str) -> np.ndarray:
        try:
            return self.data[self.channels.index(label)]
        except ValueError:
            raise KeyError(f"channel {label!r} not in recording") from None


@dataclass
class Epoch:
    """One 10 s trial segment.

    ``condition`` is a class label (single or cooperative) or an arbitrary
    condition tag for unlabeled data.
    """

    trial_index: int
    condition: str
    sample_rate: float
    data: np.ndarray
    channels: tuple[str, ...] = field(default=ELECTRODES)

    def __post_init__(self):
        self.channels = tuple(self.channels)
        self.data = _as_channel_matrix(self.data)
        if self.sample_rate <= 0:
            raise InvalidRateError(f"sample_rate must be positive, got {self.sample_rate}")
        if len(self.channels) != self.data.shape[0]:
            raise ValueError(
                f"{len(self.channels)} channel labels for {self.data.shape[0]} data rows"
            )
        expected = int(round(EPOCH_SECONDS * self.sample_rate))
        if self.data.shape[1] != expected:
            raise ValueError(
                f"epoch must span exactly {EPOCH_SECONDS} s "
                f"({expected} samples at {self.sample_rate} Hz), got {self.data.shape[1]}"
            )

    def channel(self, label: str) -> np.ndarray:
        try:
            return self.data[self.channels.index(label)]
        except ValueError:
            raise KeyError(f"channel {label!r} not in epoch") from None


@dataclass(frozen=True)
class FilterCoefficients:
    """Second-order-section coefficients plus the design context."""

    sos: np.ndarray
    sample_rate: float
    order: int
    label: str = ""

    def min_samples(self) -> int:
        """Shortest input length the zero-phase application accepts."""
        sos = self.sos
        n_sections = sos.shape[0]
        ntaps = 2 * n_sections + 1
        ntaps -= min((sos[:, 2] == 0).sum(), (sos[:, 5] == 0).sum())
        return 3 * ntaps + 1


def design_bandpass(fband: FrequencyBand, fs: float, order: int = 4) -> FilterCoefficients:
    """Design a zero-phase Butterworth bandpass for one analysis band.

    Parameters
    ----------
    fband : FrequencyBand
        Passband edges in Hz.
    fs : float
        Sample rate of the data the filter will run on.
    order : int
        Butterworth design order (per edge), default 4.

    Returns
    -------
    FilterCoefficients
        Stable second-order sections; apply with
        :func:`apply_filter_zero_phase`.
    """
    if fs <= 0:
        raise InvalidRateError(f"sample_rate must be positive, got {fs}")
    if fband.high >= fs / 2:
        raise InvalidBandError(
            f"band edge {fband.high} Hz reaches Nyquist ({fs / 2} Hz at fs={fs})"
        )
    sos = sps.butter(order, [fband.low, fband.high], btype="bandpass", fs=fs, output="sos")
    return FilterCoefficients(sos=sos, sample_rate=fs, order=order, label=fband.name)


def apply_filter_zero_phase(coeffs: FilterCoefficients, x) -> np.ndarray:
    """Apply second-order sections forward and backward (zero phase).

    Works on a 1-D series or on ``(n_channels, n_samples)`` along the last
    axis.  Raises InsufficientSamplesError when the series is too short for
    the edge padding the backward pass needs.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < coeffs.min_samples():
        raise InsufficientSamplesError(
            f"need more than {coeffs.min_samples() - 1} samples for zero-phase "
            f"filtering, got {x.shape[-1]}"
        )
    return sps.sosfiltfilt(coeffs.sos, x, axis=-1)


def notch_50hz(x, fs: float, q: float = 30.0) -> np.ndarray:
    """Remove 50 Hz line interference with a zero-phase IIR notch.

    The quality factor 30 gives a stopband a couple of Hz wide: at least
    30 dB down at 50 Hz while 40 and 60 Hz pass essentially unattenuated.
    """
    if fs <= 100:
        raise InvalidRateError(f"50 Hz notch needs fs > 100 Hz, got {fs}")
    b, a = sps.iirnotch(50.0, q, fs=fs)
    x = np.asarray(x, dtype=float)
    padlen = 3 * max(len(a), len(b))
    if x.shape[-1] <= padlen:
        raise InsufficientSamplesError(
            f"need more than {padlen} samples for the notch, got {x.shape[-1]}"
        )
    return sps.filtfilt(b, a, x, axis=-1)


def downsample(x, from_fs: float, to_fs: float) -> np.ndarray:
    """Reduce the sample rate by an integer factor with anti-alias filtering.

    An eighth-order Butterworth lowpass with cutoff ``0.4 * to_fs`` (80 % of
    the target Nyquist frequency) runs zero phase before decimation, so
    content up to and including the gamma band survives a 1000 to 250 Hz
    reduction while nothing aliases into it.

    Output length is ``floor(n_samples * to_fs / from_fs)``.
    """
    if from_fs <= 0 or to_fs <= 0:
        raise InvalidRateError(f"rates must be positive, got {from_fs} -> {to_fs}")
    ratio = from_fs / to_fs
    factor = int(round(ratio))
    if abs(ratio - factor) > 1e-9 or factor < 1:
        raise UnsupportedRatioError(
            f"downsampling {from_fs} -> {to_fs} Hz is not an integer factor"
        )
    x = np.asarray(x, dtype=float)
    if factor == 1:
        return x.copy()
    sos = sps.butter(8, 0.4 * to_fs, btype="lowpass", fs=from_fs, output="sos")
    coeffs = FilterCoefficients(sos=sos, sample_rate=from_fs, order=8, label="antialias")
    filtered = apply_filter_zero_phase(coeffs, x)
    out = filtered[..., ::factor]
    n_out = int(x.shape[-1] * to_fs // from_fs)
    return out[..., :n_out]


def epoch_recording(rec: Recording, trial_onsets, labels) -> list[Epoch]:
    """Cut a recording into labeled 10 s epochs.

    Parameters
    ----------
    rec : Recording
    trial_onsets : sequence of int
        Trial start sample indices, one per trial.
    labels : sequence of str
        Condition label per trial, same length as ``trial_onsets``.
    """
    trial_onsets = list(trial_onsets)
    labels = list(labels)
    if len(trial_onsets) != len(labels):
        raise ValueError(
            f"{len(trial_onsets)} onsets for {len(labels)} labels"
        )
    n_epoch = int(round(EPOCH_SECONDS * rec.sample_rate))
    epochs = []
    for trial_index, (onset, label) in enumerate(zip(trial_onsets, labels)):
        onset = int(onset)
        if onset < 0 or onset + n_epoch > rec.n_samples:
            raise TruncatedTrialError(
                f"trial {trial_index} at sample {onset} does not fit a "
                f"{n_epoch}-sample epoch in {rec.n_samples} samples"
            )
        epochs.append(
            Epoch(
                trial_index=trial_index,
                condition=label,
                sample_rate=rec.sample_rate,
                data=rec.data[:, onset : onset + n_epoch].copy(),
                channels=rec.channels,
            )
        )
    return epochs


def state_slices(sample_rate: float) -> tuple[slice, slice]:
    """Sample index slices for the rest and task windows of one epoch."""
    rest = slice(int(REST_WINDOW[0] * sample_rate), int(REST_WINDOW[1] * sample_rate))
    task = slice(int(TASK_WINDOW[0] * sample_rate), int(TASK_WINDOW[1] * sample_rate))
    return rest, task


def split_states(epoch: Epoch) -> tuple[np.ndarray, np.ndarray]:
    """Return the (rest, task) data blocks of an epoch.

    Rest covers [0, 4) s and task [5, 10) s; the 4 to 5 s gap is dropped.
    """
    rest, task = state_slices(epoch.sample_rate)
    return epoch.data[:, rest], epoch.data[:, task]


def artifact_reject(epochs, amplitude_limit: float = 100.0):
    """Drop epochs whose absolute amplitude exceeds the limit on any channel.

    Parameters
    ----------
    epochs : sequence of Epoch
    amplitude_limit : float
        Peak threshold in microvolts, default 100.

    Returns
    -------
    kept : list of Epoch
    rejected : list of int
        Trial indices of the rejected epochs.
    """
    if amplitude_limit <= 0:
        raise ValueError(f"amplitude_limit must be positive, got {amplitude_limit}")
    kept, rejected = [], []
    for e in epochs:
        if np.max(np.abs(e.data)) > amplitude_limit:
            rejected.append(e.trial_index)
        else:
            kept.append(e)
    return kept, rejected


def preprocess_recording(
    rec: Recording,
    trial_onsets,
    labels,
    target_fs: float = 250.0,
    amplitude_limit: float = 100.0,
):
    """Standard path from raw recording to clean epochs.

    Notch at the native rate, downsample to ``target_fs``, cut 10 s epochs
    (onsets are rescaled by the rate ratio) and reject by amplitude.

    Returns
    -------
    kept : list of Epoch
    rejected : list of int
    """
    cleaned = notch_50hz(rec.data, rec.sample_rate)
    reduced = downsample(cleaned, rec.sample_rate, target_fs)
    factor = int(round(rec.sample_rate / target_fs))
    scaled_onsets = [int(o) // factor for o in trial_onsets]
    out = Recording(rec.subject_id, rec.channels, target_fs, reduced)
    epochs = epoch_recording(out, scaled_onsets, labels)
    return artifact_reject(epochs, amplitude_limit)


def balanced_label_sequence(classes, n_blocks: int, trials_per_block: int, rng) -> list[str]:
    """Draw a label sequence balanced within each block.

    Within every block each class appears ``trials_per_block // k`` times,
    remainders spread by draw without replacement, order shuffled.  Counts
    for any two classes in a block differ by at most one.
    """
    classes = list(classes)
    if not classes:
        raise ValueError("need at least one class")
    seq: list[str] = []
    for _ in range(n_blocks):
        reps, extra = divmod(trials_per_block, len(classes))
        block = classes * reps
        if extra:
            block += [classes[i] for i in rng.choice(len(classes), size=extra, replace=False)]
        block = list(block)
        rng.shuffle(block)
        seq.extend(block)
    return seq
