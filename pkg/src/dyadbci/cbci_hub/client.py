"""Playback client: streams prepared epochs to the hub on cue.

The client is single threaded and purely reactive: HELLO once, then for
every TRIAL_START it answers with the matching trial's task window
(feature channels only, 250 Hz, float32) and records every RESULT and
FEEDBACK until the hub says BYE.
"""

from __future__ import annotations

import socket
import time

import numpy as np

from .. import signal_core as sc
from ..classifier import FEATURE_CHANNELS
from ..errors import ProtocolError
from . import protocol as proto

CONNECT_RETRY_S = 0.1
CONNECT_ATTEMPTS = 50


def prepare_client_epochs(recording: sc.Recording, trial_onsets, labels) -> list[sc.Epoch]:
    """Standard preprocessing for playback: notch, 250 Hz, 10 s epochs.

    No amplitude rejection; a playback client streams whatever the dataset
    holds and leaves validity decisions to the hub.
    """
    kept, _ = sc.preprocess_recording(
        recording, trial_onsets, labels, target_fs=250.0, amplitude_limit=float("inf")
    )
    return kept


def _task_window_f32(epoch: sc.Epoch) -> np.ndarray:
    _, task = sc.split_states(epoch)
    rows = [epoch.channels.index(c) for c in FEATURE_CHANNELS]
    return np.ascontiguousarray(task[rows], dtype=np.float32)


def _connect(addr) -> socket.socket:
    last = None
    for _ in range(CONNECT_ATTEMPTS):
        try:
            return socket.create_connection(addr, timeout=30.0)
        except OSError as exc:
            last = exc
            time.sleep(CONNECT_RETRY_S)
    raise ConnectionError(f"could not reach hub at {addr}: {last}")


def run_client(
    hub_addr: tuple[str, int],
    subject_slot: int,
    epochs,
    skip_trials=(),
) -> list[dict]:
    """Play one subject's dataset against a running hub.

    Parameters
    ----------
    hub_addr : (host, port)
    subject_slot : int
        0 or 1, must be unique across the dyad.
    epochs : sequence of Epoch
        Preprocessed 10 s epochs whose ``trial_index`` values cover the
        hub's schedule.
    skip_trials : collection of int
        Trial indices to silently not answer (fault injection for
        timeout handling).

    Returns
    -------
    list of dict
        Transcript: one entry per sent epoch, received result, feedback
        and the closing bye.
    """
    by_index = {e.trial_index: e for e in epochs}
    missing = [c for c in FEATURE_CHANNELS if epochs and c not in epochs[0].channels]
    if missing:
        raise ProtocolError(f"dataset lacks feature channels {missing}")
    skip = set(skip_trials)
    transcript: list[dict] = []
    sock = _connect(hub_addr)
    try:
        proto.send_message(sock, proto.Hello(subject_slot))
        while True:
            msg = proto.read_message(sock)
            if msg is None:
                transcript.append({"type": "eof"})
                break
            if isinstance(msg, proto.TrialStart):
                if msg.trial_index in skip:
                    transcript.append({"type": "skipped", "trial_index": msg.trial_index})
                    continue
                epoch = by_index.get(msg.trial_index)
                if epoch is None:
                    raise ProtocolError(
                        f"hub cued trial {msg.trial_index} which is not in the dataset"
                    )
                window = _task_window_f32(epoch)
                proto.send_message(
                    sock,
                    proto.EpochData(
                        trial_index=msg.trial_index,
                        subject_slot=subject_slot,
                        sample_rate=int(epoch.sample_rate),
                        samples=window,
                    ),
                )
                transcript.append(
                    {
                        "type": "epoch_sent",
                        "trial_index": msg.trial_index,
                        "cue": proto.code_to_class(msg.cue_code),
                        "phase": msg.phase,
                    }
                )
            elif isinstance(msg, proto.Result):
                transcript.append(
                    {
                        "type": "result",
                        "trial_index": msg.trial_index,
                        "predicted": proto.code_to_class(msg.predicted_class),
                        "probability": msg.probability,
                    }
                )
            elif isinstance(msg, proto.Feedback):
                transcript.append(
                    {
                        "type": "feedback",
                        "trial_index": msg.trial_index,
                        "success": bool(msg.fused_outcome),
                        "pred_a": proto.code_to_class(msg.pred_a),
                        "pred_b": proto.code_to_class(msg.pred_b),
                    }
                )
            elif isinstance(msg, proto.Bye):
                transcript.append({"type": "bye", "reason": msg.reason_code})
                break
    finally:
        sock.close()
    return transcript
