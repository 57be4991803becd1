"""Shared fixtures: a small on-disk dataset reused by the CLI tests."""

from __future__ import annotations

import numpy as np
import pytest

from dyadbci import cli
from dyadbci import signal_core as sc


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """One dyad, one block of 8 trials per phase, written by the CLI."""
    root = tmp_path_factory.mktemp("dataset")
    rc = cli.main(
        [
            "synth",
            "--out",
            str(root),
            "--seed",
            "7",
            "--dyads",
            "1",
            "--blocks",
            "1",
            "--trials-per-block",
            "8",
        ]
    )
    assert rc == 0
    return root / "manifest.json"


def make_epochs(trial_arrays, fs=250.0, condition="task", channels=sc.ELECTRODES):
    """Wrap per-trial (n_channels, n_samples) arrays as full-montage epochs."""
    return [
        sc.Epoch(
            trial_index=i,
            condition=condition,
            sample_rate=fs,
            data=np.asarray(arr, dtype=float),
            channels=tuple(channels),
        )
        for i, arr in enumerate(trial_arrays)
    ]
