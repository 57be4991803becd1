"""Session hub: accepts two playback clients, aligns trials, classifies,
fuses and feeds back.

Concurrency model: one acceptor thread and one reader thread per
connection push events into a queue; a single coordinator (the caller's
thread) owns all session state and is the only writer to the sockets.
Trial timing is logical (taken from the schedule) unless ``real_time`` is
set, in which case trial starts are paced by wall-clock sleeps; the
timeout while waiting for epoch frames is always a wall bound.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import classifier
from .. import signal_core as sc
from ..errors import ProtocolError
from . import protocol as proto
from .schedule import TrialSchedule

DEFAULT_TIMEOUT_S = 30.0


def fuse_results(pred_a: str, pred_b: str, cue: str, free_assignment: bool = False) -> str:
    """Cooperative fusion: success only when the dyad covers the cue.

    Under the default fixed assignment, subject A must produce the hand
    component and subject B the head component.  With ``free_assignment``
    the swapped pairing also counts.
    """
    hand, head = sc.split_cooperative(cue)
    strict = pred_a == hand and pred_b == head
    swapped = free_assignment and pred_a == head and pred_b == hand
    return "success" if strict or swapped else "failure"


@dataclass
class FeedbackRecord:
    """Per-trial outcome as logged and fed back to the dyad."""

    trial_index: int
    cue_label: str | None
    pred_a: str
    prob_a: float
    pred_b: str
    prob_b: float
    fused: str


class _Connection:
    def __init__(self, cid: int, sock: socket.socket):
        self.cid = cid
        self.sock = sock
        self.slot: int | None = None
        self.alive = True

    def send(self, msg):
        try:
            proto.send_message(self.sock, msg)
        except OSError:
            self.alive = False

    def close(self):
        self.alive = False
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


def _reader(conn: _Connection, events: queue.Queue):
    try:
        while True:
            msg = proto.read_message(conn.sock)
            if msg is None:
                events.put(("gone", conn.cid, None))
                return
            events.put(("msg", conn.cid, msg))
    except ProtocolError as exc:
        events.put(("bad", conn.cid, str(exc)))
    except OSError:
        events.put(("gone", conn.cid, None))


def _acceptor(listener: socket.socket, events: queue.Queue, stop: threading.Event):
    cid = 0
    while not stop.is_set():
        try:
            sock, _addr = listener.accept()
        except OSError:
            return
        events.put(("conn", cid, sock))
        cid += 1


class _Coordinator:
    """Owner of all session state; consumes the serialized event queue."""

    def __init__(self, models, timeout_s, free_assignment):
        self.models = models
        self.timeout_s = timeout_s
        self.free_assignment = free_assignment
        self.events: queue.Queue = queue.Queue()
        self.conns: dict[int, _Connection] = {}
        self.slot_conn: dict[int, _Connection] = {}

    def _drop(self, conn: _Connection, bye_code: int | None):
        if bye_code is not None and conn.alive:
            conn.send(proto.Bye(bye_code))
        conn.close()
        if conn.slot is not None and self.slot_conn.get(conn.slot) is conn:
            del self.slot_conn[conn.slot]

    def _handle_control(self, kind, cid, payload) -> None:
        if kind == "conn":
            conn = _Connection(cid, payload)
            self.conns[cid] = conn
            threading.Thread(target=_reader, args=(conn, self.events), daemon=True).start()
            return
        conn = self.conns.get(cid)
        if conn is None:
            return
        if kind == "gone":
            self._drop(conn, None)
        elif kind == "bad":
            self._drop(conn, proto.BYE_PROTOCOL_ERROR)
        elif kind == "msg" and isinstance(payload, proto.Hello):
            if payload.protocol_version != proto.PROTOCOL_VERSION:
                self._drop(conn, proto.BYE_PROTOCOL_ERROR)
            elif payload.subject_slot not in (0, 1) or payload.subject_slot in self.slot_conn:
                self._drop(conn, proto.BYE_REJECTED)
            else:
                conn.slot = payload.subject_slot
                self.slot_conn[payload.subject_slot] = conn

    def wait_for_clients(self, deadline: float):
        while len(self.slot_conn) < 2:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeoutError("both subject slots must connect before the session")
            try:
                kind, cid, payload = self.events.get(timeout=remaining)
            except queue.Empty:
                continue
            self._handle_control(kind, cid, payload)

    def _classify(self, slot: int, epoch: proto.EpochData):
        if epoch.samples.shape[0] != len(classifier.FEATURE_CHANNELS):
            raise ProtocolError(
                f"hub expects {len(classifier.FEATURE_CHANNELS)} channels "
                f"{classifier.FEATURE_CHANNELS}, got {epoch.samples.shape[0]}"
            )
        features = classifier.task_window_features(
            np.asarray(epoch.samples, dtype=float),
            classifier.FEATURE_CHANNELS,
            float(epoch.sample_rate),
        )
        label, probs = classifier.predict(self.models[slot], features)
        return label, float(np.max(probs))

    def run_trial(self, trial) -> dict:
        record = {
            "trial_index": trial.trial_index,
            "phase": trial.phase,
            "block": trial.block,
            "mode": trial.mode,
            "cue_a": trial.cue_a,
            "cue_b": trial.cue_b,
            "cue_label": trial.cue_label,
            "t_start_s": trial.t_start_s,
            "valid": False,
            "pred_a": None,
            "prob_a": None,
            "pred_b": None,
            "prob_b": None,
            "fused": None,
            "note": "",
        }
        for slot in (0, 1):
            conn = self.slot_conn.get(slot)
            if conn is None or not conn.alive:
                continue
            if trial.mode == "cooperative":
                cue_code = proto.class_to_code(trial.cue_label)
            else:
                cue_code = proto.class_to_code(trial.cue_a if slot == 0 else trial.cue_b)
            conn.send(proto.TrialStart(trial.trial_index, trial.phase, cue_code))
        pending = {s for s in (0, 1) if s in self.slot_conn and self.slot_conn[s].alive}
        epochs: dict[int, proto.EpochData] = {}
        deadline = time.monotonic() + self.timeout_s
        while pending:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                record["note"] = "timeout"
                break
            try:
                kind, cid, payload = self.events.get(timeout=remaining)
            except queue.Empty:
                record["note"] = "timeout"
                break
            if kind == "msg" and isinstance(payload, proto.EpochData):
                conn = self.conns.get(cid)
                slot = conn.slot if conn else None
                if (
                    slot in pending
                    and payload.trial_index == trial.trial_index
                    and payload.subject_slot == slot
                ):
                    try:
                        epochs[slot] = payload
                    finally:
                        pending.discard(slot)
                # anything else is a stale frame from a skipped trial; drop it
            else:
                self._handle_control(kind, cid, payload)
                pending = {s for s in pending if s in self.slot_conn}
                if not record["note"] and len(self.slot_conn) < 2:
                    record["note"] = "client_gone"
        if set(epochs) != {0, 1}:
            if not record["note"]:
                record["note"] = "client_gone" if len(self.slot_conn) < 2 else "timeout"
            return record
        pred_a, prob_a = self._classify(0, epochs[0])
        pred_b, prob_b = self._classify(1, epochs[1])
        if trial.mode == "cooperative":
            fused = fuse_results(pred_a, pred_b, trial.cue_label, self.free_assignment)
        else:
            ok = pred_a == trial.cue_a and pred_b == trial.cue_b
            fused = "success" if ok else "failure"
        record.update(
            valid=True,
            pred_a=pred_a,
            prob_a=prob_a,
            pred_b=pred_b,
            prob_b=prob_b,
            fused=fused,
        )
        for slot, (pred, prob) in ((0, (pred_a, prob_a)), (1, (pred_b, prob_b))):
            conn = self.slot_conn.get(slot)
            if conn is not None:
                conn.send(proto.Result(trial.trial_index, proto.class_to_code(pred), prob))
        feedback = proto.Feedback(
            trial.trial_index,
            1 if fused == "success" else 0,
            proto.class_to_code(pred_a),
            proto.class_to_code(pred_b),
        )
        for conn in list(self.slot_conn.values()):
            conn.send(feedback)
        return record

    def shutdown(self):
        for conn in list(self.conns.values()):
            if conn.alive:
                conn.send(proto.Bye(proto.BYE_SESSION_COMPLETE))
            conn.close()


def run_hub(
    listen_addr: tuple[str, int],
    schedule: TrialSchedule,
    models: dict[int, classifier.Model],
    timeout_s: float = DEFAULT_TIMEOUT_S,
    connect_timeout_s: float = 60.0,
    real_time: bool = False,
    free_assignment: bool = False,
    log_path=None,
    ready_callback=None,
) -> list[dict]:
    """Serve one full session and return the per-trial log.

    Parameters
    ----------
    listen_addr : (host, port)
        Port 0 binds an ephemeral port; ``ready_callback`` (if given)
        receives the bound address once listening.
    schedule : TrialSchedule
    models : dict
        Subject slot (0, 1) to trained classifier model.
    timeout_s : float
        Wall-clock bound per trial while waiting for epoch frames; an
        incomplete trial is logged invalid and the session continues.
    real_time : bool
        Pace trial starts by their logical schedule times instead of
        running back to back.
    log_path : path, optional
        Write the log as JSON lines, one trial per line.
    """
    if set(models) != {0, 1}:
        raise ValueError("models must map both subject slots 0 and 1")
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    listener.bind(listen_addr)
    listener.listen(4)
    stop = threading.Event()
    coord = _Coordinator(models, timeout_s, free_assignment)
    acceptor = threading.Thread(
        target=_acceptor, args=(listener, coord.events, stop), daemon=True
    )
    acceptor.start()
    if ready_callback is not None:
        ready_callback(listener.getsockname())
    records: list[dict] = []
    try:
        coord.wait_for_clients(time.monotonic() + connect_timeout_s)
        prev_start = 0.0
        for trial in schedule.trials:
            if real_time:
                time.sleep(max(0.0, trial.t_start_s - prev_start))
                prev_start = trial.t_start_s
            records.append(coord.run_trial(trial))
    finally:
        coord.shutdown()
        stop.set()
        listener.close()
    if log_path is not None:
        lines = [json.dumps(r, sort_keys=True) for r in records]
        Path(log_path).write_text("\n".join(lines) + "\n" if lines else "")
    return records
