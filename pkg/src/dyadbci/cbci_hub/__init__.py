"""Collaborative BCI session simulation: protocol, schedule, hub, client."""

from .client import prepare_client_epochs, run_client
from .hub import FeedbackRecord, fuse_results, run_hub
from .protocol import (
    BYE_PROTOCOL_ERROR,
    BYE_REJECTED,
    BYE_SESSION_COMPLETE,
    CLASS_CODES,
    PROTOCOL_VERSION,
    Bye,
    EpochData,
    Feedback,
    Hello,
    Result,
    TrialStart,
    class_to_code,
    code_to_class,
    decode_frame,
    encode_message,
    read_message,
    send_message,
)
from .schedule import (
    DEFAULT_PHASES,
    INTER_BLOCK_REST_S,
    TRIAL_TIMING,
    ScheduledTrial,
    TrialSchedule,
    schedule_from_plans,
    schedule_from_sessions,
    schedule_session,
)

__all__ = [
    "BYE_PROTOCOL_ERROR",
    "BYE_REJECTED",
    "BYE_SESSION_COMPLETE",
    "CLASS_CODES",
    "DEFAULT_PHASES",
    "INTER_BLOCK_REST_S",
    "PROTOCOL_VERSION",
    "TRIAL_TIMING",
    "Bye",
    "EpochData",
    "Feedback",
    "FeedbackRecord",
    "Hello",
    "Result",
    "ScheduledTrial",
    "TrialSchedule",
    "TrialStart",
    "class_to_code",
    "code_to_class",
    "decode_frame",
    "encode_message",
    "fuse_results",
    "prepare_client_epochs",
    "read_message",
    "run_client",
    "run_hub",
    "schedule_from_plans",
    "schedule_from_sessions",
    "schedule_session",
    "send_message",
]
