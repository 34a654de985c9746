"""Detection buffer, persistence, and the local HTTP API."""

from ..records import DetectionRecord, now_ms
from .http import DetectionService
from .store import (
    DEFAULT_CAPACITY,
    DEFAULT_POLL_INTERVAL_MS,
    DetectionStore,
    SystemStatus,
    load_history,
)

__all__ = [
    "DEFAULT_CAPACITY",
    "DEFAULT_POLL_INTERVAL_MS",
    "DetectionRecord",
    "DetectionService",
    "DetectionStore",
    "SystemStatus",
    "load_history",
    "now_ms",
]
