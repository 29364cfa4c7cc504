"""Run history: everything a finished simulation exposes besides the trace.

Peers and the traffic layer append observations here; metrics collection and
the invariant checkers read them back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional


@dataclass
class StateTransition:
    time: int
    host: str
    old: str
    new: str


@dataclass
class NegotiationOutcome:
    time: int
    initiator: str
    initiator_intent: int
    responder: str
    responder_intent: int
    winner: str


@dataclass
class History:
    transitions: list[StateTransition] = field(default_factory=list)
    negotiations: list[NegotiationOutcome] = field(default_factory=list)
    go_events: list[tuple[int, str, str]] = field(default_factory=list)  # time, host, ssid
    memberships: list[tuple[int, str, str, str]] = field(default_factory=list)  # time, ssid, go, member
    associations: list[tuple[int, str, str, str]] = field(default_factory=list)  # time, host, go, ssid
    relay_drops: list[tuple[int, str, str]] = field(default_factory=list)  # time, go, tag
    transition_watcher: Optional[Callable[[StateTransition], None]] = None

    def transition(self, time: int, host: str, old: str, new: str) -> None:
        record = StateTransition(time, host, old, new)
        self.transitions.append(record)
        if self.transition_watcher is not None:
            self.transition_watcher(record)

    def negotiation(self, time: int, initiator: str, initiator_intent: int,
                    responder: str, responder_intent: int, winner: str) -> None:
        self.negotiations.append(NegotiationOutcome(
            time, initiator, initiator_intent, responder, responder_intent, winner))

    def go_established(self, time: int, host: str, ssid: str) -> None:
        self.go_events.append((time, host, ssid))

    def member_added(self, time: int, ssid: str, go: str, member: str) -> None:
        self.memberships.append((time, ssid, go, member))

    def association(self, time: int, host: str, go: str, ssid: str) -> None:
        self.associations.append((time, host, go, ssid))

    def relay_drop(self, time: int, go: str, tag: str) -> None:
        self.relay_drops.append((time, go, tag))
