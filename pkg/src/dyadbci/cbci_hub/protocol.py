"""Byte-exact TCP message protocol between playback clients and the hub.

Frame layout (all integers little-endian)::

    u32 payload_length | u8 message_type | payload

``payload_length`` counts the payload bytes only, excluding the length
and type fields.  Message payloads:

    HELLO       (0x01)  u8 subject_slot (0 or 1) | u16 protocol_version (=1)
    TRIAL_START (0x02)  u32 trial_index | u8 phase | u8 cue_code
    EPOCH_DATA  (0x03)  u32 trial_index | u8 subject_slot | u8 channel_count
                        | u32 samples_per_channel | u16 sample_rate
                        | f32 samples, channel-major
    RESULT      (0x04)  u32 trial_index | u8 predicted_class | f32 probability
    FEEDBACK    (0x05)  u32 trial_index | u8 fused_outcome (1=success)
                        | u8 pred_a | u8 pred_b
    BYE         (0x06)  u8 reason_code

Class and cue codes: 0=left_hand, 1=right_hand, 2=tongue, 3=foot; a
cooperative cue packs both components as ``4 + 2*hand + head_offset``
with hand 0=left/1=right and head_offset 0=tongue/1=foot.

Epoch samples travel as float32 in the sender's channel order; the hub's
classification convention is exactly the three feature channels
(C3, C4, Cz) in that order at 250 Hz.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .. import signal_core as sc
from ..errors import ProtocolError

PROTOCOL_VERSION = 1

MSG_HELLO = 0x01
MSG_TRIAL_START = 0x02
MSG_EPOCH_DATA = 0x03
MSG_RESULT = 0x04
MSG_FEEDBACK = 0x05
MSG_BYE = 0x06

BYE_SESSION_COMPLETE = 0
BYE_REJECTED = 1
BYE_PROTOCOL_ERROR = 2

FRAME_HEADER = struct.Struct("<IB")
MAX_PAYLOAD = 1 << 24  # generous bound; a 10 s 8-channel epoch is ~320 kB

CLASS_CODES = {"left_hand": 0, "right_hand": 1, "tongue": 2, "foot": 3}
_CODE_CLASSES = {v: k for k, v in CLASS_CODES.items()}


def class_to_code(label: str) -> int:
    """Wire code for a single or cooperative class label."""
    if label in CLASS_CODES:
        return CLASS_CODES[label]
    hand, head = sc.split_cooperative(label)
    return 4 + 2 * CLASS_CODES[hand] + (CLASS_CODES[head] - 2)


def code_to_class(code: int) -> str:
    """Inverse of :func:`class_to_code`."""
    if code in _CODE_CLASSES:
        return _CODE_CLASSES[code]
    if 4 <= code <= 7:
        hand = _CODE_CLASSES[(code - 4) >> 1]
        head = _CODE_CLASSES[2 + ((code - 4) & 1)]
        return f"{hand}+{head}"
    raise ProtocolError(f"unknown class code {code}")


@dataclass(frozen=True)
class Hello:
    subject_slot: int
    protocol_version: int = PROTOCOL_VERSION


@dataclass(frozen=True)
class TrialStart:
    trial_index: int
    phase: int
    cue_code: int


@dataclass
class EpochData:
    trial_index: int
    subject_slot: int
    sample_rate: int
    samples: np.ndarray  # (channel_count, samples_per_channel) float32

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 2:
            raise ValueError(f"samples must be 2-D, got shape {self.samples.shape}")

    def __eq__(self, other):
        if not isinstance(other, EpochData):
            return NotImplemented
        return (
            self.trial_index == other.trial_index
            and self.subject_slot == other.subject_slot
            and self.sample_rate == other.sample_rate
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )


@dataclass(frozen=True)
class Result:
    trial_index: int
    predicted_class: int
    probability: float


@dataclass(frozen=True)
class Feedback:
    trial_index: int
    fused_outcome: int
    pred_a: int
    pred_b: int


@dataclass(frozen=True)
class Bye:
    reason_code: int


_HELLO = struct.Struct("<BH")
_TRIAL_START = struct.Struct("<IBB")
_EPOCH_HEADER = struct.Struct("<IBBIH")
_RESULT = struct.Struct("<IBf")
_FEEDBACK = struct.Struct("<IBBB")
_BYE = struct.Struct("<B")


def _payload(msg) -> tuple[int, bytes]:
    if isinstance(msg, Hello):
        return MSG_HELLO, _HELLO.pack(msg.subject_slot, msg.protocol_version)
    if isinstance(msg, TrialStart):
        return MSG_TRIAL_START, _TRIAL_START.pack(msg.trial_index, msg.phase, msg.cue_code)
    if isinstance(msg, EpochData):
        channels, per_channel = msg.samples.shape
        header = _EPOCH_HEADER.pack(
            msg.trial_index, msg.subject_slot, channels, per_channel, msg.sample_rate
        )
        return MSG_EPOCH_DATA, header + msg.samples.astype("<f4").tobytes(order="C")
    if isinstance(msg, Result):
        return MSG_RESULT, _RESULT.pack(msg.trial_index, msg.predicted_class, msg.probability)
    if isinstance(msg, Feedback):
        return MSG_FEEDBACK, _FEEDBACK.pack(
            msg.trial_index, msg.fused_outcome, msg.pred_a, msg.pred_b
        )
    if isinstance(msg, Bye):
        return MSG_BYE, _BYE.pack(msg.reason_code)
    raise TypeError(f"not a protocol message: {type(msg).__name__}")


def encode_message(msg) -> bytes:
    """Serialize a message into one complete frame."""
    msg_type, payload = _payload(msg)
    return FRAME_HEADER.pack(len(payload), msg_type) + payload


def decode_payload(msg_type: int, payload: bytes):
    """Decode one payload; raises ProtocolError on any size or type fault."""
    try:
        if msg_type == MSG_HELLO:
            slot, version = _HELLO.unpack(payload)
            return Hello(slot, version)
        if msg_type == MSG_TRIAL_START:
            return TrialStart(*_TRIAL_START.unpack(payload))
        if msg_type == MSG_EPOCH_DATA:
            if len(payload) < _EPOCH_HEADER.size:
                raise struct.error("short epoch header")
            trial, slot, channels, per_channel, rate = _EPOCH_HEADER.unpack_from(payload)
            expected = _EPOCH_HEADER.size + 4 * channels * per_channel
            if len(payload) != expected:
                raise ProtocolError(
                    f"epoch payload is {len(payload)} bytes, expected {expected}"
                )
            flat = np.frombuffer(payload, dtype="<f4", offset=_EPOCH_HEADER.size)
            return EpochData(trial, slot, rate, flat.reshape(channels, per_channel).copy())
        if msg_type == MSG_RESULT:
            return Result(*_RESULT.unpack(payload))
        if msg_type == MSG_FEEDBACK:
            return Feedback(*_FEEDBACK.unpack(payload))
        if msg_type == MSG_BYE:
            return Bye(*_BYE.unpack(payload))
    except struct.error as exc:
        raise ProtocolError(f"malformed payload for type 0x{msg_type:02x}: {exc}") from None
    raise ProtocolError(f"unknown message type 0x{msg_type:02x}")


def decode_frame(buffer: bytes):
    """Decode the first frame in ``buffer``.

    Returns (message, bytes_consumed); (None, 0) when the buffer does not
    yet hold a complete frame.
    """
    if len(buffer) < FRAME_HEADER.size:
        return None, 0
    length, msg_type = FRAME_HEADER.unpack_from(buffer)
    if length > MAX_PAYLOAD:
        raise ProtocolError(f"payload of {length} bytes exceeds the {MAX_PAYLOAD} limit")
    end = FRAME_HEADER.size + length
    if len(buffer) < end:
        return None, 0
    return decode_payload(msg_type, buffer[FRAME_HEADER.size : end]), end


def _recv_exact(sock, n: int) -> bytes | None:
    chunks = []
    remaining = n
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            return None
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_message(sock):
    """Blocking read of one message from a socket; None on clean EOF."""
    header = _recv_exact(sock, FRAME_HEADER.size)
    if header is None:
        return None
    length, msg_type = FRAME_HEADER.unpack(header)
    if length > MAX_PAYLOAD:
        raise ProtocolError(f"payload of {length} bytes exceeds the {MAX_PAYLOAD} limit")
    payload = _recv_exact(sock, length) if length else b""
    if payload is None:
        raise ProtocolError("connection closed mid-frame")
    return decode_payload(msg_type, payload)


def send_message(sock, msg):
    sock.sendall(encode_message(msg))
