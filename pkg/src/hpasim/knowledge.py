"""Append-only event log shared by the manager and exchange tiers.

Events are kept in memory per run and can be exported as CSV (one row per
snapshot sample and service, fixed column order) or as JSON lines (every
event kind).  Appends are thread-safe because the per-service managers may
run in parallel; exports are meant to happen after a run is closed.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import threading
from dataclasses import dataclass
from typing import Any, Iterable

CSV_COLUMNS = [
    "time",
    "service",
    "cmv",
    "cr",
    "dr",
    "max_r",
    "sd",
    "res_sd",
    "res_dr",
    "supply",
    "demand",
    "capacity",
]


class EventKind(enum.Enum):
    VERDICT = "verdict"
    ARM_TRACE = "arm_trace"
    PLAN = "plan"
    SNAPSHOT = "snapshot"


# Ordering rank used for the total order within a tick.
_KIND_RANK = {
    EventKind.VERDICT: 0,
    EventKind.ARM_TRACE: 1,
    EventKind.PLAN: 2,
    EventKind.SNAPSHOT: 3,
}


@dataclass(frozen=True)
class KbEvent:
    """One knowledge-base record: (tick, kind, service payload, run id)."""

    tick: int
    kind: EventKind
    payload: dict[str, Any]
    run_id: str

    def sort_key(self) -> tuple:
        return (self.tick, _KIND_RANK[self.kind], self.payload.get("service", ""))


class KnowledgeBase:
    """In-memory, append-only store of run events with deterministic export."""

    def __init__(self):
        self._lock = threading.Lock()
        self._runs: dict[str, list[KbEvent]] = {}
        self._closed: set[str] = set()

    def register_run(self, run_id: str) -> None:
        with self._lock:
            if run_id in self._runs:
                raise ValueError(f"run {run_id!r} already registered")
            self._runs[run_id] = []

    def close_run(self, run_id: str) -> None:
        with self._lock:
            self._require_run(run_id)
            self._closed.add(run_id)

    def append(self, event: KbEvent) -> None:
        with self._lock:
            self._require_run(event.run_id)
            if event.run_id in self._closed:
                raise ValueError(f"run {event.run_id!r} is closed")
            self._runs[event.run_id].append(event)

    def events(self, run_id: str, kind: EventKind | None = None) -> list[KbEvent]:
        with self._lock:
            self._require_run(run_id)
            selected = [
                e for e in self._runs[run_id] if kind is None or e.kind == kind
            ]
        return sorted(selected, key=KbEvent.sort_key)

    def query(self, run_id: str, tick: int) -> list[KbEvent]:
        return [e for e in self.events(run_id) if e.tick == tick]

    def export(self, run_id: str, format: str = "csv") -> bytes:
        if format == "csv":
            return self._export_csv(run_id)
        if format == "jsonlines":
            return self._export_jsonlines(run_id)
        raise ValueError(f"unknown export format {format!r}")

    def _export_csv(self, run_id: str) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for event in self.events(run_id, EventKind.SNAPSHOT):
            row = event.payload
            writer.writerow([_format_cell(row.get(c, "")) for c in CSV_COLUMNS])
        return buf.getvalue().encode("utf-8")

    def _export_jsonlines(self, run_id: str) -> bytes:
        lines = []
        for event in self.events(run_id):
            record = {
                "tick": event.tick,
                "kind": event.kind.value,
                "run_id": event.run_id,
                "payload": event.payload,
            }
            lines.append(json.dumps(record, sort_keys=True))
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")

    def _require_run(self, run_id: str) -> None:
        if run_id not in self._runs:
            raise KeyError(f"unknown run {run_id!r}")


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def write_export(kb: KnowledgeBase, run_id: str, path, format: str = "csv") -> None:
    data = kb.export(run_id, format)
    with open(path, "wb") as fh:
        fh.write(data)


def iter_csv_rows(data: bytes) -> Iterable[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    yield from reader
