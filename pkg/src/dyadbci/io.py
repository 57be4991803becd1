"""On-disk formats: recordings, epoch archives, manifests and tables.

A recording is a plain CSV (header row of electrode labels, one row per
sample, microvolts) with a JSON sidecar of the same stem carrying
subject id, sample rate, trial onsets and labels.  An epoch archive is
the same container with ``trial_index`` and ``condition`` columns
prepended.  Everything else is ordinary CSV/JSON written deterministically
so reruns with the same seed produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pandas as pd

from . import signal_core as sc

FLOAT_FMT = "%.6f"


def _sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json")


def write_recording(path, rec: sc.Recording, trial_onsets, labels) -> Path:
    """Write one recording CSV plus its JSON sidecar; returns the CSV path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ",".join(rec.channels)
    np.savetxt(path, rec.data.T, fmt=FLOAT_FMT, delimiter=",", header=header, comments="")
    sidecar = {
        "subject_id": rec.subject_id,
        "sample_rate": rec.sample_rate,
        "trial_onsets": [int(o) for o in trial_onsets],
        "labels": list(labels),
    }
    _sidecar_path(path).write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    return path


def read_recording(path) -> tuple[sc.Recording, list[int], list[str]]:
    """Read a recording CSV + sidecar back into memory."""
    path = Path(path)
    frame = pd.read_csv(path)
    sidecar = json.loads(_sidecar_path(path).read_text())
    rec = sc.Recording(
        subject_id=sidecar["subject_id"],
        channels=tuple(frame.columns),
        sample_rate=float(sidecar["sample_rate"]),
        data=frame.to_numpy(dtype=float).T,
    )
    return rec, [int(o) for o in sidecar["trial_onsets"]], list(sidecar["labels"])


def write_epochs(path, epochs, subject_id: str) -> Path:
    """Write an epoch archive: per-sample rows tagged with trial and label."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    epochs = list(epochs)
    if not epochs:
        raise ValueError("no epochs to write")
    channels = epochs[0].channels
    fs = epochs[0].sample_rate
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_index", "condition", *channels])
        for e in epochs:
            if e.channels != channels or e.sample_rate != fs:
                raise ValueError("epochs mix channel sets or sample rates")
            for col in range(e.data.shape[1]):
                writer.writerow(
                    [e.trial_index, e.condition]
                    + [FLOAT_FMT % v for v in e.data[:, col]]
                )
    sidecar = {"subject_id": subject_id, "sample_rate": fs}
    _sidecar_path(path).write_text(json.dumps(sidecar, indent=2, sort_keys=True))
    return path


def read_epochs(path) -> tuple[list[sc.Epoch], str]:
    """Read an epoch archive; returns (epochs, subject_id)."""
    path = Path(path)
    sidecar = json.loads(_sidecar_path(path).read_text())
    fs = float(sidecar["sample_rate"])
    frame = pd.read_csv(path)
    channels = tuple(frame.columns[2:])
    epochs = []
    for idx, chunk in frame.groupby("trial_index", sort=True):
        epochs.append(
            sc.Epoch(
                trial_index=int(idx),
                condition=str(chunk["condition"].iloc[0]),
                sample_rate=fs,
                data=chunk[list(channels)].to_numpy(dtype=float).T,
                channels=channels,
            )
        )
    return epochs, sidecar["subject_id"]


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())


def write_table(path, header, rows) -> Path:
    """Small CSV writer for result tables; floats rendered repr-exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    return path
