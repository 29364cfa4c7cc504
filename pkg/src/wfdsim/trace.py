"""Trace records and their on-disk format.

Each delivered (frame, receiver) pair yields one tab-separated line:

    #<event-id>\t<time>\t<src> --> <receiver>\t<frame-name>

A frame delivered to several hosts therefore appears as consecutive lines
sharing one event id and timestamp.  Frame names come from a fixed
vocabulary; data frames are named by their payload tag (``ping3``,
``ping3-reply``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

from .medium import Frame, FrameKind
from .simtime import format_time

FRAME_NAMES = {
    FrameKind.BEACON: "Beacon",
    FrameKind.PROBE_REQUEST: "Probe Request",
    FrameKind.PROBE_RESPONSE: "Probe Response",
    FrameKind.GO_NEG_REQUEST: "GO Negotiation Request Frame",
    FrameKind.GO_NEG_RESPONSE: "GO Negotiation Response Frame",
    FrameKind.GO_NEG_CONFIRMATION: "GO Negotiation Confirmation Frame",
    FrameKind.PROVISION_DISCOVERY_REQUEST: "Provision Request",
    FrameKind.PROVISION_DISCOVERY_RESPONSE: "Provision discovery Response",
    FrameKind.AUTH: "Authentication",
    FrameKind.ACK: "ACK",
}

_NAME_TO_KIND = {name: kind for kind, name in FRAME_NAMES.items()}

TRACE_LINE_RE = re.compile(
    r"^#(?P<id>\d+)\t(?P<time>\d+\.\d{11,})\t(?P<src>\S+) --> (?P<dst>\S+)\t(?P<name>.+)$")

_PING_NAME_RE = re.compile(r"^(?P<prefix>[A-Za-z]+)(?P<seq>\d+)(?P<reply>-reply)?$")


def frame_name(frame: Frame) -> str:
    if frame.kind is FrameKind.DATA:
        if not frame.payload_tag:
            raise ValueError("data frame without payload tag")
        return frame.payload_tag
    return FRAME_NAMES[frame.kind]


def kind_for_name(name: str) -> FrameKind:
    """Map a trace frame name back to its kind (ping tags map to DATA)."""
    kind = _NAME_TO_KIND.get(name)
    if kind is not None:
        return kind
    if _PING_NAME_RE.match(name):
        return FrameKind.DATA
    raise ValueError(f"unknown frame name {name!r}")


@dataclass(frozen=True)
class TraceRecord:
    """One delivered-frame observation."""

    event_id: int
    time: int  # picoseconds
    src: str
    dst: str
    frame_name: str

    def line(self) -> str:
        return f"#{self.event_id}\t{format_time(self.time)}\t{self.src} --> {self.dst}\t{self.frame_name}"


def parse_trace_line(line: str) -> TraceRecord:
    m = TRACE_LINE_RE.match(line)
    if m is None:
        raise ValueError(f"malformed trace line: {line!r}")
    from .simtime import parse_time

    return TraceRecord(
        event_id=int(m.group("id")),
        time=parse_time(m.group("time")),
        src=m.group("src"),
        dst=m.group("dst"),
        frame_name=m.group("name"),
    )


def parse_trace_text(text: str) -> list[TraceRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_trace_line(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return records


class TraceCollector:
    """Accumulates records in firing order; optionally mirrors to a stream."""

    def __init__(self, stream: Optional[TextIO] = None):
        self.records: list[TraceRecord] = []
        self._stream = stream

    def on_delivery(self, event_id: int, time: int, frame: Frame, receiver: str) -> None:
        record = TraceRecord(event_id, time, frame.src, receiver, frame_name(frame))
        self.records.append(record)
        if self._stream is not None:
            self._stream.write(record.line() + "\n")

    def text(self) -> str:
        return "".join(record.line() + "\n" for record in self.records)


def write_trace(records: Iterable[TraceRecord], stream: TextIO) -> None:
    for record in records:
        stream.write(record.line() + "\n")
