"""Deterministic synthetic dyad EEG with controllable coupling and ERD.

Stands in for human recordings.  Each channel of each 10 s trial is a sum
of one narrowband oscillator per analysis band plus 1/f background noise.
Phase structure:

* Within a subject, channel phases hang off a per-trial subject driver
  through two von-Mises stages (region offset, then channel jitter), which
  gives intra-brain networks realistic same-region > cross-region
  connectivity.  All channels of one subject share that subject's rhythm
  frequency, drawn per segment near the band center.
* Across subjects, rhythm frequencies differ (uniform detune around the
  center), so independent brains drift against each other within a trial.
  Electrode pairs named in a CouplingSpec instead entrain to a shared dyad
  driver during the task segment: subject A's electrode carries the driver
  rhythm, subject B's follows at the driver frequency with von-Mises phase
  jitter of concentration ``kappa``.  kappa 0 is independence, large kappa
  locks the pair.
* Motor-imagery classes modulate alpha/beta oscillator power on the motor
  channels during the task segment only (event-related desynchronization).

Phase and amplitude switches happen at 4.5 s, inside the 4 to 5 s gap that
analysis never looks at.  Every trial draws from its own random stream
keyed by (seed, trial index), so generation is reproducible bit for bit
and parallelizable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import signal_core as sc

SAMPLE_RATE = 1000.0
TRIAL_SAMPLES = int(sc.EPOCH_SECONDS * SAMPLE_RATE)
SEGMENT_SPLIT_S = 4.5

MODES = ("single_hand", "single_headfoot", "cooperative")

# Intra-brain phase hierarchy (region offset around the subject driver,
# channel jitter around the region offset).
INTRA_ROI_KAPPA = 2.0
INTRA_CHANNEL_KAPPA = 8.0

# Each subject's band rhythm sits at the nominal center plus a uniform
# per-segment detune, so two uncoupled brains drift against each other
# within a trial while one brain's channels stay mutually locked.
FREQ_JITTER_HZ = 0.5

DEFAULT_NOISE_RMS = 2.0  # microvolts, broadband

_LABEL_STREAM = 1
_COMPANION_STREAM = 2
_TRIAL_STREAM = 0


@dataclass(frozen=True)
class OscillatorSpec:
    """One narrowband component: band, amplitude (uV) and center frequency."""

    band: sc.FrequencyBand
    amplitude: float
    center_freq: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")
        if not self.band.low <= self.center_freq <= self.band.high:
            raise ValueError(
                f"center {self.center_freq} Hz outside band "
                f"[{self.band.low}, {self.band.high}]"
            )


def default_oscillators() -> tuple[OscillatorSpec, ...]:
    amplitudes = {"delta": 4.0, "theta": 4.0, "alpha": 8.0, "beta": 4.0, "gamma": 1.5}
    centers = {"delta": 2.0, "theta": 6.0, "alpha": 10.0, "beta": 20.0, "gamma": 40.0}
    return tuple(
        OscillatorSpec(sc.band(name), amplitudes[name], centers[name])
        for name in sc.BAND_NAMES
    )


@dataclass(frozen=True)
class CouplingSpec:
    """Inter-brain task-segment phase coupling.

    ``coupled_pairs`` lists (electrode of A, electrode of B) pairs whose
    oscillator in ``band`` entrains to a shared driver rhythm during the
    task segment: A's electrode carries the driver rhythm, B's runs at the
    driver's trial frequency with von-Mises phase jitter of concentration
    ``kappa`` around the driver phase.  kappa 0 disables the coupling
    entirely (independent rhythms).
    """

    kappa: float
    coupled_pairs: tuple[tuple[str, str], ...] = ()
    band: sc.FrequencyBand = field(default_factory=lambda: sc.band("alpha"))

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
        object.__setattr__(self, "coupled_pairs", tuple(tuple(p) for p in self.coupled_pairs))
        for a, b in self.coupled_pairs:
            if a not in sc.ELECTRODES or b not in sc.ELECTRODES:
                raise ValueError(f"unknown electrode in coupled pair ({a}, {b})")


def central_coupling(kappa: float, band_name: str = "alpha") -> CouplingSpec:
    """Coupling over the three homologous central electrode pairs."""
    pairs = tuple((e, e) for e in sc.ROIS["central"])
    return CouplingSpec(kappa=kappa, coupled_pairs=pairs, band=sc.band(band_name))


NO_COUPLING = CouplingSpec(kappa=0.0)


@dataclass(frozen=True)
class ErdSpec:
    """Task-segment alpha/beta power gains per electrode for one class.

    ``gains`` maps electrode label to (alpha gain, beta gain); a gain of
    0.5 halves that band's oscillator power during the task segment.
    """

    label: str
    gains: dict

    def __post_init__(self):
        for elec, (ga, gb) in self.gains.items():
            if elec not in sc.ELECTRODES:
                raise ValueError(f"unknown electrode {elec!r} in ERD gains")
            if ga <= 0 or gb <= 0:
                raise ValueError(f"gains must be positive, got ({ga}, {gb}) for {elec}")


def default_erd_map(gain: float = 0.5) -> dict[str, ErdSpec]:
    """Conventional contralateral/midline ERD pattern for the four classes.

    Hand imagery attenuates the contralateral central channel in both
    bands; tongue attenuates alpha and foot attenuates beta on Cz, which
    keeps the two head classes separable from the same three electrodes.
    """
    return {
        "left_hand": ErdSpec("left_hand", {"C4": (gain, gain)}),
        "right_hand": ErdSpec("right_hand", {"C3": (gain, gain)}),
        "tongue": ErdSpec("tongue", {"Cz": (gain, 1.0)}),
        "foot": ErdSpec("foot", {"Cz": (1.0, gain)}),
    }


@dataclass
class SessionPlan:
    """Block structure, timing and label sequence of one session.

    Trials last idle 3 s + ready 1 s + task 6 s = 10 s.  Labels balance
    within each block (counts differ at most by one) with seeded order;
    pass an explicit ``labels`` sequence to override.
    """

    mode: str
    blocks: int = 3
    trials_per_block: int = 20
    timing: tuple[float, float, float] = (3.0, 1.0, 6.0)
    labels: list[str] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.blocks < 1 or self.trials_per_block < 1:
            raise ValueError("blocks and trials_per_block must be positive")
        if abs(sum(self.timing) - sc.EPOCH_SECONDS) > 1e-9:
            raise ValueError(
                f"timing must sum to an epoch of {sc.EPOCH_SECONDS} s, got {self.timing}"
            )
        if self.labels is None:
            rng = np.random.default_rng([self.seed, _LABEL_STREAM])
            self.labels = sc.balanced_label_sequence(
                self.class_set(), self.blocks, self.trials_per_block, rng
            )
        self.labels = list(self.labels)
        if len(self.labels) != self.n_trials:
            raise ValueError(
                f"{len(self.labels)} labels for {self.n_trials} trials"
            )
        bad = [l for l in self.labels if l not in self.class_set()]
        if bad:
            raise ValueError(f"labels {bad[:3]} not in the {self.mode} class set")

    def class_set(self) -> tuple[str, ...]:
        if self.mode == "single_hand":
            return sc.HAND_CLASSES
        if self.mode == "single_headfoot":
            return sc.HEAD_CLASSES
        return sc.COOPERATIVE_CLASSES

    @property
    def n_trials(self) -> int:
        return self.blocks * self.trials_per_block


def _pink_noise(rng, n: int, fs: float) -> np.ndarray:
    """Unit-RMS noise with 1/f amplitude shaping above 1 Hz."""
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    scale = 1.0 / np.sqrt(np.maximum(freqs, 1.0))
    scale[0] = 0.0
    shaped = np.fft.irfft(spectrum * scale, n)
    rms = np.sqrt(np.mean(shaped**2))
    return shaped / rms if rms > 0 else shaped


def _segment_rhythms(
    rng,
    coupled_elecs,
    coupling,
    drivers,
    driver_freqs,
    centers,
    coupled_band_idx,
    is_task,
    is_driver_side,
):
    """Phases and frequencies, each (n_electrodes, n_bands), for one segment.

    Every channel of a subject shares the subject's per-band rhythm
    frequency.  During the task segment, coupled electrodes switch to the
    dyad driver's frequency; the driver side carries the driver phase
    itself, the other side a von-Mises phase of concentration ``kappa``
    around it.
    """
    subject_driver = rng.uniform(-np.pi, np.pi, size=len(centers))
    roi_offsets = {
        roi: rng.vonmises(subject_driver, INTRA_ROI_KAPPA) for roi in sc.ROIS
    }
    phases = np.empty((len(sc.ELECTRODES), len(centers)))
    for i, elec in enumerate(sc.ELECTRODES):
        phases[i] = rng.vonmises(roi_offsets[sc.roi_of(elec)], INTRA_CHANNEL_KAPPA)
    subject_freqs = centers + rng.uniform(-FREQ_JITTER_HZ, FREQ_JITTER_HZ, size=len(centers))
    freqs = np.tile(subject_freqs, (len(sc.ELECTRODES), 1))
    if is_task and coupled_elecs and coupling.kappa > 0 and coupled_band_idx >= 0:
        for elec in coupled_elecs:
            i = sc.ELECTRODES.index(elec)
            if is_driver_side:
                phases[i, coupled_band_idx] = drivers[coupled_band_idx]
            else:
                phases[i, coupled_band_idx] = rng.vonmises(
                    drivers[coupled_band_idx], coupling.kappa
                )
            freqs[i, coupled_band_idx] = driver_freqs[coupled_band_idx]
    return phases, freqs


def _erd_amplitude_factors(erd: ErdSpec | None, n_bands: int, band_names) -> np.ndarray:
    """Task-segment amplitude multipliers (n_electrodes, n_bands)."""
    factors = np.ones((len(sc.ELECTRODES), n_bands))
    if erd is None:
        return factors
    alpha_idx = band_names.index("alpha")
    beta_idx = band_names.index("beta")
    for elec, (ga, gb) in erd.gains.items():
        i = sc.ELECTRODES.index(elec)
        factors[i, alpha_idx] = np.sqrt(ga)
        factors[i, beta_idx] = np.sqrt(gb)
    return factors


def generate_trial(
    plan: SessionPlan,
    trial_index: int,
    coupling: CouplingSpec = NO_COUPLING,
    erd_a: ErdSpec | None = None,
    erd_b: ErdSpec | None = None,
    oscillators: tuple[OscillatorSpec, ...] | None = None,
    noise_rms: float = DEFAULT_NOISE_RMS,
) -> tuple[np.ndarray, np.ndarray]:
    """One 10 s dyad trial at 1000 Hz.

    Returns the raw sample blocks ``(A, B)``, each
    ``(n_electrodes, 10000)`` in microvolts.  All randomness comes from a
    stream keyed by (plan.seed, trial_index), so repeated calls are
    bit-identical and trials are independent.
    """
    if oscillators is None:
        oscillators = default_oscillators()
    band_names = [o.band.name for o in oscillators]
    n_bands = len(oscillators)
    coupled_band_idx = (
        band_names.index(coupling.band.name) if coupling.band.name in band_names else -1
    )
    rng = np.random.default_rng([plan.seed, _TRIAL_STREAM, trial_index])

    t = np.arange(TRIAL_SAMPLES) / SAMPLE_RATE
    split = int(SEGMENT_SPLIT_S * SAMPLE_RATE)
    segments = (slice(0, split), slice(split, TRIAL_SAMPLES))

    centers = np.array([o.center_freq for o in oscillators])
    drivers = rng.uniform(-np.pi, np.pi, size=n_bands)
    driver_freqs = centers + rng.uniform(-FREQ_JITTER_HZ, FREQ_JITTER_HZ, size=n_bands)
    out = []
    for side, erd in (("a", erd_a), ("b", erd_b)):
        coupled = tuple(
            pair[0] if side == "a" else pair[1] for pair in coupling.coupled_pairs
        )
        erd_factors = _erd_amplitude_factors(erd, n_bands, band_names)
        data = np.zeros((len(sc.ELECTRODES), TRIAL_SAMPLES))
        for seg_idx, seg in enumerate(segments):
            is_task = seg_idx == 1
            phases, freqs = _segment_rhythms(
                rng, coupled, coupling, drivers, driver_freqs, centers,
                coupled_band_idx, is_task, side == "a",
            )
            ones = np.ones(len(sc.ELECTRODES))
            for b, osc in enumerate(oscillators):
                amp = osc.amplitude * (erd_factors[:, b] if is_task else ones)
                wave = np.cos(
                    2.0 * np.pi * freqs[:, b][:, None] * t[seg][None, :]
                    + phases[:, b][:, None]
                )
                data[:, seg] += amp[:, None] * wave
        for i in range(len(sc.ELECTRODES)):
            data[i] += noise_rms * _pink_noise(rng, TRIAL_SAMPLES, SAMPLE_RATE)
        out.append(data)
    return out[0], out[1]


@dataclass
class DyadSession:
    """Generated recordings for one dyad over one session."""

    plan: SessionPlan
    recording_a: sc.Recording
    recording_b: sc.Recording
    trial_onsets: list[int]
    labels: list[str]
    labels_a: list[str]
    labels_b: list[str]


def _companion_labels(plan: SessionPlan) -> list[str]:
    """Other subject's single-task sequence in a single-mode session."""
    classes = sc.HEAD_CLASSES if plan.mode == "single_hand" else sc.HAND_CLASSES
    rng = np.random.default_rng([plan.seed, _COMPANION_STREAM])
    return sc.balanced_label_sequence(classes, plan.blocks, plan.trials_per_block, rng)


def per_subject_labels(plan: SessionPlan) -> tuple[list[str], list[str]]:
    """Resolve the plan's labels into per-subject class sequences.

    Subject A is the hand performer and subject B the head performer in
    every mode; cooperative labels split into their components, single
    plans pair the planned sequence with a seeded companion sequence for
    the other subject.
    """
    if plan.mode == "cooperative":
        parts = [sc.split_cooperative(l) for l in plan.labels]
        return [p[0] for p in parts], [p[1] for p in parts]
    if plan.mode == "single_hand":
        return list(plan.labels), _companion_labels(plan)
    return _companion_labels(plan), list(plan.labels)


def generate_session(
    plan: SessionPlan,
    coupling: CouplingSpec = NO_COUPLING,
    erd_map: dict[str, ErdSpec] | None = None,
    subject_ids: tuple[str, str] = ("A", "B"),
    oscillators: tuple[OscillatorSpec, ...] | None = None,
    noise_rms: float = DEFAULT_NOISE_RMS,
) -> DyadSession:
    """Generate every trial of one session for a dyad.

    Trials are concatenated back to back (block rest periods are schedule
    bookkeeping, not recorded dead time), so onset ``i`` is at sample
    ``i * 10000``.
    """
    if erd_map is None:
        erd_map = default_erd_map()
    labels_a, labels_b = per_subject_labels(plan)
    blocks_a = []
    blocks_b = []
    for i in range(plan.n_trials):
        a, b = generate_trial(
            plan,
            i,
            coupling=coupling,
            erd_a=erd_map.get(labels_a[i]),
            erd_b=erd_map.get(labels_b[i]),
            oscillators=oscillators,
            noise_rms=noise_rms,
        )
        blocks_a.append(a)
        blocks_b.append(b)
    data_a = np.concatenate(blocks_a, axis=1)
    data_b = np.concatenate(blocks_b, axis=1)
    onsets = [i * TRIAL_SAMPLES for i in range(plan.n_trials)]
    return DyadSession(
        plan=plan,
        recording_a=sc.Recording(subject_ids[0], sc.ELECTRODES, SAMPLE_RATE, data_a),
        recording_b=sc.Recording(subject_ids[1], sc.ELECTRODES, SAMPLE_RATE, data_b),
        trial_onsets=onsets,
        labels=list(plan.labels),
        labels_a=labels_a,
        labels_b=labels_b,
    )


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@dataclass(frozen=True)
class PhaseSettings:
    """Coupling strength and ERD gain for one experiment phase."""

    coupling_kappa: float = 0.0
    erd_gain: float = 0.5


DEFAULT_PHASE_SETTINGS = {
    1: PhaseSettings(coupling_kappa=0.0, erd_gain=0.5),
    2: PhaseSettings(coupling_kappa=5.0, erd_gain=0.5),
    3: PhaseSettings(coupling_kappa=0.0, erd_gain=0.5),
}


def generate_experiment(
    dyad_id: str,
    seed: int,
    blocks: int = 3,
    trials_per_block: int = 20,
    phase_settings: dict[int, PhaseSettings] | None = None,
    noise_rms: float = DEFAULT_NOISE_RMS,
) -> dict[int, DyadSession]:
    """Full three-phase dataset for one dyad.

    Phase 1 and 3 are simultaneous single tasks (subject A hand, subject B
    head), phase 2 is the cooperative task with inter-brain coupling on
    the central electrode pairs.
    """
    if phase_settings is None:
        phase_settings = DEFAULT_PHASE_SETTINGS
    sessions = {}
    for phase in (1, 2, 3):
        settings = phase_settings.get(phase, PhaseSettings())
        mode = "cooperative" if phase == 2 else "single_hand"
        plan = SessionPlan(
            mode=mode,
            blocks=blocks,
            trials_per_block=trials_per_block,
            seed=_derived_seed(seed, phase),
        )
        coupling = (
            central_coupling(settings.coupling_kappa)
            if settings.coupling_kappa > 0
            else NO_COUPLING
        )
        sessions[phase] = generate_session(
            plan,
            coupling=coupling,
            erd_map=default_erd_map(settings.erd_gain),
            subject_ids=(f"{dyad_id}A", f"{dyad_id}B"),
            noise_rms=noise_rms,
        )
    return sessions
