"""Session schedule: phases, blocks, cues and logical trial clocks.

The default session mirrors the experimental paradigm: three phases of
three blocks, twenty 10 s trials per block (idle 3 s, ready 1 s, task
6 s) and 180 s of rest between blocks.  Phases 1 and 3 are simultaneous
single tasks (slot 0 performs hand imagery, slot 1 head imagery); phase 2
is cooperative, one shared cue per trial.

All times are logical seconds derived from this arithmetic; nothing here
consults a wall clock.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import signal_core as sc
from ..synth_eeg import DyadSession, SessionPlan, per_subject_labels

TRIAL_TIMING = (3.0, 1.0, 6.0)
INTER_BLOCK_REST_S = 180.0

DEFAULT_PHASES = ((1, "single", 3), (2, "cooperative", 3), (3, "single", 3))


@dataclass(frozen=True)
class ScheduledTrial:
    """One trial slot in the session timeline.

    ``cue_a`` / ``cue_b`` are the per-subject class labels (components of
    the cooperative cue in phase 2).  ``cue_label`` is the cooperative
    pair label for cooperative trials, None otherwise.
    """

    trial_index: int
    phase: int
    block: int
    mode: str
    cue_a: str
    cue_b: str
    cue_label: str | None
    t_start_s: float


@dataclass
class TrialSchedule:
    phases: tuple[tuple[int, str, int], ...]
    trials_per_block: int
    trials: list[ScheduledTrial]
    timing: tuple[float, float, float] = TRIAL_TIMING
    inter_block_rest_s: float = INTER_BLOCK_REST_S
    seed: int | None = None

    @property
    def n_trials(self) -> int:
        return len(self.trials)

    def phase_trials(self, phase: int) -> list[ScheduledTrial]:
        return [t for t in self.trials if t.phase == phase]


def schedule_session(
    seed: int,
    phases: tuple[tuple[int, str, int], ...] = DEFAULT_PHASES,
    trials_per_block: int = 20,
    timing: tuple[float, float, float] = TRIAL_TIMING,
    inter_block_rest_s: float = INTER_BLOCK_REST_S,
) -> TrialSchedule:
    """Build the full session schedule with seeded, block-balanced cues.

    ``phases`` lists (phase_id, mode, blocks) with mode ``single`` or
    ``cooperative``.  The same seed reproduces the same cue sequence.
    """
    if abs(sum(timing) - sc.EPOCH_SECONDS) > 1e-9:
        raise ValueError(f"trial timing must sum to {sc.EPOCH_SECONDS} s, got {timing}")
    trials: list[ScheduledTrial] = []
    trial_index = 0
    t = 0.0
    n_blocks_total = sum(b for _, _, b in phases)
    block_counter = 0
    for phase_id, mode, blocks in phases:
        if mode not in ("single", "cooperative"):
            raise ValueError(f"mode must be single or cooperative, got {mode!r}")
        rng = np.random.default_rng([seed, phase_id])
        if mode == "cooperative":
            labels = sc.balanced_label_sequence(
                sc.COOPERATIVE_CLASSES, blocks, trials_per_block, rng
            )
            cues = [(lab,) + sc.split_cooperative(lab) for lab in labels]
        else:
            hands = sc.balanced_label_sequence(sc.HAND_CLASSES, blocks, trials_per_block, rng)
            heads = sc.balanced_label_sequence(sc.HEAD_CLASSES, blocks, trials_per_block, rng)
            cues = [(None, h, g) for h, g in zip(hands, heads)]
        i = 0
        for block in range(blocks):
            for _ in range(trials_per_block):
                cue_label, cue_a, cue_b = cues[i]
                trials.append(
                    ScheduledTrial(
                        trial_index=trial_index,
                        phase=phase_id,
                        block=block,
                        mode=mode,
                        cue_a=cue_a,
                        cue_b=cue_b,
                        cue_label=cue_label,
                        t_start_s=t,
                    )
                )
                trial_index += 1
                i += 1
                t += sc.EPOCH_SECONDS
            block_counter += 1
            if block_counter < n_blocks_total:
                t += inter_block_rest_s
    return TrialSchedule(
        phases=tuple(phases),
        trials_per_block=trials_per_block,
        trials=trials,
        timing=timing,
        inter_block_rest_s=inter_block_rest_s,
        seed=seed,
    )


def schedule_from_plans(plans: dict[int, SessionPlan]) -> TrialSchedule:
    """Schedule whose cues replay the labels of session plans.

    Trials are numbered globally in phase order, so the hub's cue for
    trial ``i`` matches the data the clients will stream for trial ``i``.
    """
    trials: list[ScheduledTrial] = []
    phases = []
    trial_index = 0
    t = 0.0
    items = sorted(plans.items())
    n_blocks_total = sum(p.blocks for _, p in items)
    block_counter = 0
    tpb = items[0][1].trials_per_block if items else 0
    for phase_id, plan in items:
        mode = "cooperative" if plan.mode == "cooperative" else "single"
        phases.append((phase_id, mode, plan.blocks))
        labels_a, labels_b = per_subject_labels(plan)
        i = 0
        for block in range(plan.blocks):
            for _ in range(plan.trials_per_block):
                cue_label = plan.labels[i] if mode == "cooperative" else None
                trials.append(
                    ScheduledTrial(
                        trial_index=trial_index,
                        phase=phase_id,
                        block=block,
                        mode=mode,
                        cue_a=labels_a[i],
                        cue_b=labels_b[i],
                        cue_label=cue_label,
                        t_start_s=t,
                    )
                )
                trial_index += 1
                i += 1
                t += sc.EPOCH_SECONDS
            block_counter += 1
            if block_counter < n_blocks_total:
                t += INTER_BLOCK_REST_S
    return TrialSchedule(
        phases=tuple(phases),
        trials_per_block=tpb,
        trials=trials,
    )


def schedule_from_sessions(sessions: dict[int, DyadSession]) -> TrialSchedule:
    """Schedule replaying the labels of generated sessions."""
    return schedule_from_plans({p: s.plan for p, s in sessions.items()})
