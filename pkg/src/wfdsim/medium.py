"""Multi-channel broadcast medium with a stop-and-wait acknowledgment layer.

A transmitted frame is delivered after a fixed airtime to every other device
tuned to the transmission channel at transmit time.  All deliveries of one
transmission share a single engine event, so they carry the same event id in
the trace.  Unicast frames addressed to a device are acknowledged by that
device's link layer after a turnaround delay; :meth:`Medium.send_with_ack`
retransmits on ACK timeout and reports failure to the caller after the retry
budget is exhausted.  Receivers dispatch each unicast frame to the protocol
layer at most once (retransmitted duplicates are re-acknowledged but not
re-dispatched).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .engine import Engine, Event, Rng, SimulationError
from .simtime import MICROSECOND, MILLISECOND

BROADCAST = "*"


class FrameKind(Enum):
    BEACON = "Beacon"
    PROBE_REQUEST = "ProbeRequest"
    PROBE_RESPONSE = "ProbeResponse"
    GO_NEG_REQUEST = "GoNegRequest"
    GO_NEG_RESPONSE = "GoNegResponse"
    GO_NEG_CONFIRMATION = "GoNegConfirmation"
    PROVISION_DISCOVERY_REQUEST = "ProvisionDiscoveryRequest"
    PROVISION_DISCOVERY_RESPONSE = "ProvisionDiscoveryResponse"
    AUTH = "Auth"
    DATA = "Data"
    ACK = "Ack"


BROADCAST_KINDS = frozenset({FrameKind.BEACON, FrameKind.PROBE_REQUEST})
GO_NEG_KINDS = frozenset({
    FrameKind.GO_NEG_REQUEST,
    FrameKind.GO_NEG_RESPONSE,
    FrameKind.GO_NEG_CONFIRMATION,
})


@dataclass
class Frame:
    """A simulated management or data frame.

    ``go_intent``/``tiebreak`` ride only on GO negotiation request/response
    frames; ``auth_seq`` only on authentication frames; ``payload_tag``,
    ``final_dst`` and ``orig_src`` only on data frames (hop destination in
    ``dst``, end-to-end addresses alongside).  ``from_go`` marks a probe
    response sent by an operating group owner, ``persistent_role`` the stored
    role a device advertises when it recognizes a persistent peer.
    """

    kind: FrameKind
    src: str
    dst: str
    channel: int
    group_ssid: Optional[str] = None
    go_intent: Optional[int] = None
    tiebreak: Optional[int] = None
    persistent_flag: bool = False
    auth_seq: Optional[int] = None
    payload_tag: Optional[str] = None
    final_dst: Optional[str] = None
    orig_src: Optional[str] = None
    from_go: bool = False
    persistent_role: Optional[str] = None
    lseq: Optional[int] = None      # link sequence, stamped by the medium
    ack_lseq: Optional[int] = None  # on ACK frames: lseq being acknowledged

    def __post_init__(self):
        if self.kind in BROADCAST_KINDS:
            if self.dst != BROADCAST:
                raise ValueError(f"{self.kind.value} must be broadcast")
        elif self.dst == BROADCAST:
            raise ValueError(f"{self.kind.value} must be unicast")
        has_intent = self.go_intent is not None
        needs_intent = self.kind in (FrameKind.GO_NEG_REQUEST, FrameKind.GO_NEG_RESPONSE)
        if has_intent != needs_intent:
            raise ValueError("go_intent present iff GO negotiation request/response")
        if has_intent and not 0 <= self.go_intent <= 15:
            raise ValueError("go_intent out of range 0..15")

    @property
    def is_broadcast(self) -> bool:
        return self.dst == BROADCAST


@dataclass
class MediumParams:
    frame_airtime: int = 314 * MICROSECOND
    ack_turnaround: int = 40 * MICROSECOND
    loss_probability: float = 0.0
    ack_timeout: int = 2 * MILLISECOND
    max_retries: int = 3
    channel_count: int = 11

    def __post_init__(self):
        if self.frame_airtime <= 0 or self.ack_turnaround <= 0 or self.ack_timeout <= 0:
            raise ValueError("medium durations must be positive")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError("loss_probability must lie in [0, 1]")


class _Pending:
    __slots__ = ("frame", "retries_left", "on_result", "timeout_event")

    def __init__(self, frame: Frame, retries_left: int, on_result):
        self.frame = frame
        self.retries_left = retries_left
        self.on_result = on_result
        self.timeout_event: Optional[Event] = None


class Medium:
    """Broadcast medium shared by every device of one simulation run."""

    def __init__(self, engine: Engine, params: MediumParams, rng: Rng,
                 on_delivery: Optional[Callable] = None):
        self.engine = engine
        self.params = params
        self.rng = rng
        # on_delivery(event_id, time_ps, frame, receiver) observes every
        # delivered (frame, receiver) pair; the trace writer hooks in here.
        self.on_delivery = on_delivery
        self.drop_filter: Optional[Callable[[Frame, str], bool]] = None
        self._tuned: dict[str, int] = {}
        self._handlers: dict[str, Callable[[Frame], None]] = {}
        self._order: list[str] = []
        self._lseq_counters: dict[str, int] = {}
        self._last_dispatched: dict[tuple[str, str], int] = {}
        self._pending: dict[str, deque[_Pending]] = {}

    # -- registration / tuning -------------------------------------------

    def register(self, device: str, handler: Callable[[Frame], None],
                 channel: int = 0) -> None:
        if device in self._tuned:
            raise ValueError(f"device {device!r} already registered")
        self._check_channel(channel)
        self._tuned[device] = channel
        self._handlers[device] = handler
        self._order.append(device)
        self._lseq_counters[device] = 0

    def tune(self, device: str, channel: int) -> None:
        if device not in self._tuned:
            raise ValueError(f"unknown device {device!r}")
        self._check_channel(channel)
        self._tuned[device] = channel

    def channel_of(self, device: str) -> int:
        return self._tuned[device]

    def _check_channel(self, channel: int) -> None:
        if not 0 <= channel < self.params.channel_count:
            raise ValueError(
                f"channel {channel} out of range [0, {self.params.channel_count})")

    # -- transmission ------------------------------------------------------

    def transmit(self, frame: Frame) -> None:
        """Schedule delivery of *frame* to every other device tuned to its
        channel right now.  Losses are drawn independently per receiver."""
        if frame.src not in self._tuned:
            raise ValueError(f"unregistered sender {frame.src!r}")
        if self._tuned[frame.src] != frame.channel:
            raise SimulationError(
                f"{frame.src} transmitting on channel {frame.channel} "
                f"while tuned to {self._tuned[frame.src]}")
        if frame.lseq is None:
            self._lseq_counters[frame.src] += 1
            frame.lseq = self._lseq_counters[frame.src]
        receivers = [d for d in self._order
                     if d != frame.src and self._tuned[d] == frame.channel]
        self.engine.after(
            self.params.frame_airtime,
            lambda: self._deliver(frame, receivers),
            tag=f"deliver:{frame.kind.value}",
            target=frame.src,
        )

    def _deliver(self, frame: Frame, receivers: list[str]) -> None:
        # all rows of one transmission share the id of this delivery event
        event_id = self.engine.current_event.id
        for receiver in receivers:
            if self._dropped(frame, receiver):
                continue
            if self.on_delivery is not None:
                self.on_delivery(event_id, self.engine.now, frame, receiver)
            self._receive(frame, receiver)

    def _dropped(self, frame: Frame, receiver: str) -> bool:
        if self.drop_filter is not None and self.drop_filter(frame, receiver):
            return True
        p = self.params.loss_probability
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return self.rng.random() < p

    # -- link layer ---------------------------------------------------------

    def _receive(self, frame: Frame, receiver: str) -> None:
        if frame.kind is FrameKind.ACK:
            if frame.dst == receiver:
                self._ack_received(frame)
            return
        if not frame.is_broadcast and frame.dst == receiver:
            self._schedule_ack(frame, receiver)
            key = (receiver, frame.src)
            last = self._last_dispatched.get(key, 0)
            if frame.lseq is not None and frame.lseq <= last:
                return  # duplicate of an already dispatched frame
            self._last_dispatched[key] = frame.lseq
        self._handlers[receiver](frame)

    def _schedule_ack(self, frame: Frame, receiver: str) -> None:
        ack = Frame(kind=FrameKind.ACK, src=receiver, dst=frame.src,
                    channel=frame.channel, ack_lseq=frame.lseq)
        self.engine.after(self.params.ack_turnaround,
                          lambda: self.transmit(ack),
                          tag="ack", target=receiver)

    # -- acknowledged unicast ------------------------------------------------

    def send_with_ack(self, frame: Frame,
                      on_result: Callable[[str], None]) -> None:
        """Transmit a unicast frame and report ``"acked"`` or ``"failed"``
        to *on_result* once the exchange settles.

        Each sender runs stop-and-wait: one acknowledged frame in flight at a
        time, later frames queue in FIFO order behind it.  A lossless trace
        therefore pairs every unicast non-ACK frame with exactly one ACK
        before the same sender's next one.
        """
        if frame.is_broadcast or frame.kind is FrameKind.ACK:
            raise ValueError("send_with_ack requires a unicast non-ACK frame")
        queue = self._pending.setdefault(frame.src, deque())
        queue.append(_Pending(frame, self.params.max_retries, on_result))
        if len(queue) == 1:
            self._attempt(frame.src)

    def _attempt(self, sender: str) -> None:
        pending = self._pending[sender][0]
        self.transmit(pending.frame)
        pending.timeout_event = self.engine.after(
            self.params.ack_timeout,
            lambda: self._ack_timeout(sender, pending),
            tag="ack-timeout", target=sender,
        )

    def _ack_timeout(self, sender: str, pending: _Pending) -> None:
        queue = self._pending.get(sender)
        if not queue or queue[0] is not pending:
            return
        if pending.retries_left == 0:
            self._settle(sender, "failed")
            return
        pending.retries_left -= 1
        self._attempt(sender)

    def _ack_received(self, ack: Frame) -> None:
        queue = self._pending.get(ack.dst)
        if not queue:
            return  # stray or duplicate ACK
        head = queue[0]
        if head.frame.dst != ack.src or head.frame.lseq != ack.ack_lseq:
            return  # duplicate ACK for an exchange that already settled
        self.engine.cancel(head.timeout_event)
        self._settle(ack.dst, "acked")

    def _settle(self, sender: str, outcome: str) -> None:
        queue = self._pending[sender]
        pending = queue.popleft()
        if not queue:
            del self._pending[sender]
        else:
            self._attempt(sender)
        pending.on_result(outcome)

    def cancel_pending(self, src: str, dst: str) -> bool:
        """Silently drop queued acknowledged sends from *src* to *dst*."""
        queue = self._pending.get(src)
        if not queue:
            return False
        head = queue[0]
        kept = deque(p for p in queue if p.frame.dst != dst)
        if len(kept) == len(queue):
            return False
        queue.clear()
        queue.extend(kept)
        if head.frame.dst == dst:
            self.engine.cancel(head.timeout_event)
            if queue:
                self._attempt(src)
        if not queue:
            del self._pending[src]
        return True

    def has_pending(self, src: str, dst: str) -> bool:
        queue = self._pending.get(src)
        return bool(queue) and any(p.frame.dst == dst for p in queue)
