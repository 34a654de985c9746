"""Shared detection buffer with append-only persistence.

The buffer is a bounded ring fed by both pipelines and read by HTTP
handlers; appends are atomic with respect to queries and status snapshots.
Persistence is one JSON object per line, written (and by default fsynced)
before the append is acknowledged, so an acknowledged record survives a
crash; a torn final line is truncated on recovery.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from collections import deque
from dataclasses import dataclass, field, replace

from ..errors import LogCorruptionError
from ..records import DetectionRecord

log = logging.getLogger(__name__)

DEFAULT_CAPACITY = 1000
DEFAULT_POLL_INTERVAL_MS = 2000


@dataclass
class SystemStatus:
    uptime_seconds: float
    counts: dict
    buffer_len: int
    buffer_capacity: int
    last_detection_timestamp: int | None
    backend_identities: list = field(default_factory=list)
    duty_cycle: dict | None = None
    persist_failures: int = 0
    poll_interval_ms: int = DEFAULT_POLL_INTERVAL_MS

    def to_wire(self) -> dict:
        return {
            "uptime_seconds": self.uptime_seconds,
            "counts": dict(self.counts),
            "buffer_len": self.buffer_len,
            "buffer_capacity": self.buffer_capacity,
            "last_detection_timestamp": self.last_detection_timestamp,
            "backend_identities": list(self.backend_identities),
            "duty_cycle": self.duty_cycle,
            "persist_failures": self.persist_failures,
            "poll_interval_ms": self.poll_interval_ms,
        }


def load_history(log_path) -> tuple[list[DetectionRecord], str | None]:
    """Parse the persistence log; tolerate (and report) a torn final line.

    Corruption anywhere before the final line raises LogCorruptionError with
    the line number. A missing file is an empty history.
    """
    if not os.path.exists(log_path):
        return [], None
    with open(log_path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    records: list[DetectionRecord] = []
    for line_no, line in enumerate(lines, start=1):
        try:
            records.append(DetectionRecord.from_wire(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            if line_no == len(lines):
                warning = f"truncated corrupt final log line {line_no}: {exc}"
                log.warning("%s", warning)
                return records, warning
            raise LogCorruptionError(str(exc), line_number=line_no) from exc
    return records, None


class DetectionStore:
    """Bounded ring of DetectionRecords with seq assignment and persistence."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY, log_path=None,
                 fsync: bool = True, poll_interval_ms: int = DEFAULT_POLL_INTERVAL_MS):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self._ring: deque[DetectionRecord] = deque(maxlen=capacity)
        self._lock = threading.Lock()
        self._next_seq = 1
        self._counts = {"audio": 0, "image": 0}
        self._persist_failures = 0
        self._started = time.monotonic()
        self._log_path = log_path
        self._fsync = fsync
        self._log_file = None
        self._backend_identities: list[str] = []
        self._duty_cycle: dict | None = None
        self.poll_interval_ms = poll_interval_ms
        if log_path is not None:
            self._resume_from_log()

    def _resume_from_log(self):
        history, warning = load_history(self._log_path)
        for record in history:
            self._ring.append(record)
            if record.modality in self._counts:
                self._counts[record.modality] += 1
        if history:
            self._next_seq = max(r.seq for r in history) + 1
        if warning is not None and os.path.exists(self._log_path):
            # rewrite only the valid prefix so appends continue on a clean line
            with open(self._log_path, "w", encoding="utf-8") as fh:
                for record in history:
                    fh.write(json.dumps(record.to_wire()) + "\n")
        self._log_file = open(self._log_path, "a", encoding="utf-8")

    def close(self):
        with self._lock:
            if self._log_file is not None:
                self._log_file.flush()
                os.fsync(self._log_file.fileno())
                self._log_file.close()
                self._log_file = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- write side -----------------------------------------------------

    def append(self, record: DetectionRecord) -> int:
        """Assign the next seq, persist, and insert; returns the seq."""
        with self._lock:
            seq = self._next_seq
            self._next_seq += 1
            stamped = replace(record, seq=seq)
            if self._log_file is not None:
                try:
                    self._log_file.write(json.dumps(stamped.to_wire()) + "\n")
                    self._log_file.flush()
                    if self._fsync:
                        os.fsync(self._log_file.fileno())
                except OSError as exc:
                    self._persist_failures += 1
                    log.error("persistence write failed for seq %d: %s", seq, exc)
            self._ring.append(stamped)
            if stamped.modality in self._counts:
                self._counts[stamped.modality] += 1
            return seq

    def set_backend_identities(self, identities):
        with self._lock:
            self._backend_identities = list(identities)

    def set_duty_cycle(self, duty_cycle: dict | None):
        with self._lock:
            self._duty_cycle = dict(duty_cycle) if duty_cycle else None

    # -- read side ------------------------------------------------------

    def query_since(self, after_seq: int, limit: int | None = None) -> list[DetectionRecord]:
        """Records with seq > after_seq, ascending, at most limit."""
        if after_seq < 0:
            raise ValueError("after_seq must be >= 0")
        with self._lock:
            out = [r for r in self._ring if r.seq > after_seq]
        if limit is not None:
            out = out[:limit]
        return out

    def latest_seq(self) -> int:
        with self._lock:
            return self._next_seq - 1

    def evicted_before(self) -> int:
        """Smallest seq still in the ring; older records live only in the log."""
        with self._lock:
            return self._ring[0].seq if self._ring else self._next_seq

    def snapshot(self) -> tuple[list[DetectionRecord], int, int]:
        """(records, latest_seq, evicted_before) from one consistent instant."""
        with self._lock:
            records = list(self._ring)
            return records, self._next_seq - 1, (records[0].seq if records else self._next_seq)

    def status(self) -> SystemStatus:
        with self._lock:
            last = max((r.timestamp_ms for r in self._ring), default=None)
            return SystemStatus(
                uptime_seconds=time.monotonic() - self._started,
                counts=dict(self._counts),
                buffer_len=len(self._ring),
                buffer_capacity=self._ring.maxlen,
                last_detection_timestamp=last,
                backend_identities=list(self._backend_identities),
                duty_cycle=dict(self._duty_cycle) if self._duty_cycle else None,
                persist_failures=self._persist_failures,
                poll_interval_ms=self.poll_interval_ms,
            )
