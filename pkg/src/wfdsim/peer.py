"""Wi-Fi Direct peer state machine.

A peer walks through scan, find (listen/search alternation), group-owner
negotiation, provisioning and finally group operation, either as group owner
or as associated client.  Late devices join an operating group through the
provision-discovery exchange; devices holding a persistent record for a
rediscovered peer skip negotiation and run the shortened phase-2 exchange.

All behaviour is event-driven: the peer reacts to delivered frames and to its
own timers, and never blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .engine import Engine, Event, Rng
from .history import History
from .medium import BROADCAST, Frame, FrameKind, Medium
from .simtime import SECOND

GO = "GO"
CLIENT = "Client"

SOCIAL_CHANNELS = (0, 5, 10)

# Liveness guard for protocol waits (peer answered/asked and the counterpart
# never follows up, which only happens under loss).
PROTOCOL_GUARD = 1 * SECOND


class PeerState(Enum):
    IDLE = "Idle"
    SCAN = "Scan"
    FIND_LISTEN = "FindListen"
    FIND_SEARCH = "FindSearch"
    NEGOTIATING = "Negotiating"
    PROVISIONING_PHASE1 = "ProvisioningPhase1"
    PROVISIONING_PHASE2 = "ProvisioningPhase2"
    GO_OPERATING = "GoOperating"
    CLIENT_ASSOCIATED = "ClientAssociated"
    JOINING = "Joining"


_S = PeerState

#: Legal state transitions.  Failure recovery drops back to FindListen after
#: a broken negotiation and to Scan after a broken join or provisioning run.
LEGAL_TRANSITIONS = frozenset({
    (_S.IDLE, _S.SCAN),
    (_S.IDLE, _S.GO_OPERATING),                 # autonomous group owner
    (_S.SCAN, _S.FIND_LISTEN),
    (_S.SCAN, _S.FIND_SEARCH),
    (_S.SCAN, _S.JOINING),
    (_S.FIND_LISTEN, _S.FIND_SEARCH),
    (_S.FIND_SEARCH, _S.FIND_LISTEN),
    (_S.FIND_LISTEN, _S.NEGOTIATING),
    (_S.FIND_SEARCH, _S.NEGOTIATING),
    (_S.FIND_LISTEN, _S.JOINING),
    (_S.FIND_SEARCH, _S.JOINING),
    (_S.FIND_LISTEN, _S.GO_OPERATING),          # persistent role restored
    (_S.FIND_SEARCH, _S.GO_OPERATING),          # persistent role restored
    (_S.NEGOTIATING, _S.PROVISIONING_PHASE1),   # negotiation loser
    (_S.NEGOTIATING, _S.GO_OPERATING),          # negotiation winner
    (_S.NEGOTIATING, _S.FIND_LISTEN),           # negotiation failure
    (_S.JOINING, _S.PROVISIONING_PHASE1),
    (_S.JOINING, _S.PROVISIONING_PHASE2),       # persistent fast path
    (_S.JOINING, _S.SCAN),                      # join failure
    (_S.JOINING, _S.FIND_LISTEN),
    (_S.PROVISIONING_PHASE1, _S.PROVISIONING_PHASE2),
    (_S.PROVISIONING_PHASE1, _S.SCAN),          # provisioning failure
    (_S.PROVISIONING_PHASE2, _S.SCAN),          # provisioning failure
    (_S.PROVISIONING_PHASE2, _S.CLIENT_ASSOCIATED),
    (_S.PROVISIONING_PHASE2, _S.GO_OPERATING),
})


def decide_go_role(my_intent: int, peer_intent: int, my_addr: str,
                   peer_addr: str, my_tiebreak: int = 0) -> str:
    """Pick this device's role from both declared intents.

    The higher intent wins group ownership; equal intents fall back to the
    lexicographically smaller address, so both sides always agree and no
    negotiation can deadlock.  The tie-break bit is carried in the frames but
    does not participate in the decision.
    """
    if not (0 <= my_intent <= 15 and 0 <= peer_intent <= 15):
        raise ValueError("GO intent out of range 0..15")
    if my_intent != peer_intent:
        return GO if my_intent > peer_intent else CLIENT
    return GO if my_addr < peer_addr else CLIENT


@dataclass
class PeerConfig:
    """Per-device protocol configuration."""

    address: str = ""
    wifi_direct_used: bool = True
    autonomous_go: bool = False
    group_ssid: str = ""
    go_intent: int = 7
    persistent: bool = False
    join_only: bool = False
    listen_dwell_choices: tuple[int, ...] = (
        SECOND // 10, 2 * SECOND // 10, 3 * SECOND // 10)
    search_probe_gap: int = SECOND // 100
    scan_duration: int = 2 * SECOND
    provisioning_frames: int = 20
    beacon_interval: int = SECOND // 10
    beacon_start_offset: int = SECOND // 10
    social_channels_only: bool = False

    def __post_init__(self):
        if not 0 <= self.go_intent <= 15:
            raise ValueError("go_intent must lie in 0..15")
        if self.provisioning_frames < 1:
            raise ValueError("provisioning_frames must be >= 1")
        if self.beacon_interval <= 0:
            raise ValueError("beacon_interval must be positive")
        if not self.listen_dwell_choices:
            raise ValueError("listen_dwell_choices must not be empty")


@dataclass(frozen=True)
class PersistentGroupRecord:
    """Stored credentials and negotiated role for a persistent group."""

    peer: str
    ssid: str
    my_role: str               # GO or Client
    credential_token: str


@dataclass
class GroupView:
    ssid: str
    go: str
    members: set[str]
    formed_at: int


@dataclass
class _Negotiation:
    peer: str
    role: str                  # "initiator" or "responder"
    my_tiebreak: int
    persistent: bool = False
    peer_intent: Optional[int] = None
    peer_tiebreak: Optional[int] = None
    action_timer: Optional[Event] = None


@dataclass
class _JoinAttempt:
    go: str
    ssid: str
    persistent_fast: bool


@dataclass
class _ClientProvisioning:
    go: str
    ssid: str
    total: int
    done: int = 0
    persistent: bool = False
    phase2_only: bool = False
    awaiting_beacon: bool = False


@dataclass
class _GoSideProvisioning:
    total: int
    done: int = 0
    persistent: bool = False


def phase2_frames(n: int) -> int:
    """Auth frames in provisioning phase 2 alone (phases 1 + 2 use n)."""
    return (n + 1) // 2


class Peer:
    """One Wi-Fi Direct device attached to an engine and a medium."""

    def __init__(self, index: int, config: PeerConfig, engine: Engine,
                 medium: Medium, rng: Rng, history: Optional[History] = None,
                 traffic=None):
        self.index = index
        self.config = config
        self.address = config.address or f"host[{index}]"
        self.engine = engine
        self.medium = medium
        self.rng = rng
        self.history = history if history is not None else History()
        self.traffic = traffic

        self.state = PeerState.IDLE
        self.group: Optional[GroupView] = None
        self.group_persistent = False
        self.go_address: Optional[str] = None
        self.go_ssid: Optional[str] = None
        self.records: dict[tuple[str, str], PersistentGroupRecord] = {}

        self._announced = False
        self._neg: Optional[_Negotiation] = None
        self._join: Optional[_JoinAttempt] = None
        self._prov: Optional[_ClientProvisioning] = None
        self._go_sessions: dict[str, _GoSideProvisioning] = {}

        self._scan_timer: Optional[Event] = None
        self._scan_index = 0
        self._find_timer: Optional[Event] = None
        self._search_index = 0
        self._guard_timer: Optional[Event] = None
        self._beacon_timer: Optional[Event] = None

        medium.register(self.address, self.on_frame)

    # -- small helpers -----------------------------------------------------

    @property
    def _reply_delay(self) -> int:
        # a protocol reply goes on air after the link-level ACK of the frame
        # that triggered it has left the sender
        return self.medium.params.ack_turnaround + self.medium.params.frame_airtime

    @property
    def _find_channels(self) -> tuple[int, ...]:
        if self.config.social_channels_only:
            return SOCIAL_CHANNELS
        return tuple(range(self.medium.params.channel_count))

    def _set_state(self, new: PeerState) -> None:
        if new is self.state:
            return
        old = self.state
        self.state = new
        self.history.transition(self.engine.now, self.address, old.value, new.value)

    def _cancel(self, attr: str) -> None:
        timer = getattr(self, attr)
        if timer is not None:
            self.engine.cancel(timer)
            setattr(self, attr, None)

    def _cancel_activity_timers(self) -> None:
        self._cancel("_scan_timer")
        self._cancel("_find_timer")
        self._cancel("_guard_timer")
        if self._neg is not None and self._neg.action_timer is not None:
            self.engine.cancel(self._neg.action_timer)
            self._neg.action_timer = None

    def _arm_guard(self, action, tag: str) -> None:
        self._cancel("_guard_timer")
        self._guard_timer = self.engine.after(PROTOCOL_GUARD, action,
                                              tag=tag, target=self.address)

    def _ssid_acceptable(self, ssid: Optional[str]) -> bool:
        if not self.config.group_ssid:
            return True
        return ssid == self.config.group_ssid

    def lookup_record(self, peer: str, ssid: Optional[str] = None
                      ) -> Optional[PersistentGroupRecord]:
        if ssid:
            return self.records.get((peer, ssid))
        matches = sorted(k for k in self.records if k[0] == peer)
        return self.records[matches[0]] if matches else None

    def store_record(self, peer: str, ssid: str, my_role: str) -> None:
        token = f"cred:{ssid}:{min(self.address, peer)}:{max(self.address, peer)}"
        self.records[(peer, ssid)] = PersistentGroupRecord(peer, ssid, my_role, token)

    def discard_record(self, peer: str) -> None:
        for key in [k for k in self.records if k[0] == peer]:
            del self.records[key]

    # -- startup -----------------------------------------------------------

    def start(self) -> None:
        """Bring the device up: autonomous owners create their group at once,
        everyone else begins with a full scan."""
        if not self.config.wifi_direct_used:
            return  # stays Idle, transmits nothing
        if self.config.autonomous_go:
            channel = self.rng.randrange(self.medium.params.channel_count)
            self.medium.tune(self.address, channel)
            self._become_go(
                ssid=self.config.group_ssid or f"DIRECT-{self.address}",
                persistent=self.config.persistent,
                first_beacon_at=self.engine.now + self.config.beacon_start_offset,
                announce_immediately=False,
            )
        else:
            self._begin_scan()

    # -- scan ----------------------------------------------------------------

    def _begin_scan(self) -> None:
        self._cancel_activity_timers()
        self._neg = None
        self._join = None
        self._prov = None
        self._set_state(PeerState.SCAN)
        self._scan_index = 0
        self._scan_step()

    def _scan_step(self) -> None:
        channels = self.medium.params.channel_count
        if self._scan_index >= channels:
            self._enter_find()
            return
        channel = self._scan_index
        self._scan_index += 1
        self.medium.tune(self.address, channel)
        self.medium.transmit(Frame(
            kind=FrameKind.PROBE_REQUEST, src=self.address, dst=BROADCAST,
            channel=channel, group_ssid=self.config.group_ssid or None,
            persistent_flag=self.config.persistent or bool(self.records)))
        dwell = self.config.scan_duration // channels
        self._scan_timer = self.engine.after(dwell, self._scan_step,
                                             tag="scan-dwell", target=self.address)

    # -- find ------------------------------------------------------------------

    def _enter_find(self) -> None:
        if self.rng.bit():
            self._enter_find_search()
        else:
            self._enter_find_listen()

    def _enter_find_listen(self) -> None:
        self._cancel("_find_timer")
        self._set_state(PeerState.FIND_LISTEN)
        channel = self.rng.choice(self._find_channels)
        self.medium.tune(self.address, channel)
        dwell = self.rng.choice(self.config.listen_dwell_choices)
        self._find_timer = self.engine.after(dwell, self._enter_find_search,
                                             tag="listen-dwell", target=self.address)

    def _enter_find_search(self) -> None:
        self._cancel("_find_timer")
        self._set_state(PeerState.FIND_SEARCH)
        self._search_index = 0
        self._search_step()

    def _search_step(self) -> None:
        channels = self._find_channels
        if self._search_index >= len(channels):
            self._enter_find_listen()
            return
        channel = channels[self._search_index]
        self._search_index += 1
        self.medium.tune(self.address, channel)
        self.medium.transmit(Frame(
            kind=FrameKind.PROBE_REQUEST, src=self.address, dst=BROADCAST,
            channel=channel, group_ssid=self.config.group_ssid or None,
            persistent_flag=self.config.persistent or bool(self.records)))
        wait = self.medium.params.frame_airtime + self.config.search_probe_gap
        self._find_timer = self.engine.after(wait, self._search_step,
                                             tag="search-gap", target=self.address)

    def _fail_to_find(self) -> None:
        self._cancel_activity_timers()
        self._neg = None
        self._join = None
        self._prov = None
        self._enter_find_listen()

    def _fail_to_scan(self) -> None:
        self._begin_scan()

    def _resume_find_after_guard(self) -> None:
        self._guard_timer = None
        if self.state is PeerState.FIND_LISTEN:
            self._enter_find_listen()

    # -- frame dispatch ----------------------------------------------------------

    def on_frame(self, frame: Frame) -> None:
        if not self.config.wifi_direct_used:
            return
        kind = frame.kind
        mine = frame.dst == self.address
        if kind is FrameKind.BEACON:
            self._on_beacon(frame)
        elif kind is FrameKind.PROBE_REQUEST:
            self._on_probe_request(frame)
        elif kind is FrameKind.PROBE_RESPONSE and mine:
            self._on_probe_response(frame)
        elif kind is FrameKind.GO_NEG_REQUEST and mine:
            self._on_goneg_request(frame)
        elif kind is FrameKind.GO_NEG_RESPONSE and mine:
            self._on_goneg_response(frame)
        elif kind is FrameKind.GO_NEG_CONFIRMATION and mine:
            self._on_goneg_confirmation(frame)
        elif kind is FrameKind.PROVISION_DISCOVERY_REQUEST and mine:
            self._on_pd_request(frame)
        elif kind is FrameKind.PROVISION_DISCOVERY_RESPONSE and mine:
            self._on_pd_response(frame)
        elif kind is FrameKind.AUTH and mine:
            self._on_auth(frame)
        elif kind is FrameKind.DATA and mine:
            if self.traffic is not None:
                self.traffic.on_data(self, frame)
        # foreign unicast frames are observed and ignored

    # -- discovery handlers ---------------------------------------------------------

    def _on_beacon(self, frame: Frame) -> None:
        if self.state in (PeerState.SCAN, PeerState.FIND_LISTEN, PeerState.FIND_SEARCH):
            if not self._ssid_acceptable(frame.group_ssid):
                return
            record = self.lookup_record(frame.src, frame.group_ssid)
            fast = (frame.persistent_flag and record is not None
                    and record.my_role == CLIENT)
            self._start_joining(frame.src, frame.group_ssid or "", frame.channel, fast)
        elif self.state in (PeerState.PROVISIONING_PHASE1, PeerState.PROVISIONING_PHASE2):
            prov = self._prov
            if prov is not None and prov.awaiting_beacon and frame.src == prov.go:
                prov.awaiting_beacon = False
                if frame.group_ssid:
                    prov.ssid = frame.group_ssid
                self.engine.after(self._reply_delay,
                                  lambda: self._send_client_auth(prov.done + 1),
                                  tag="auth-start", target=self.address)

    def _on_probe_request(self, frame: Frame) -> None:
        if self.state is PeerState.GO_OPERATING:
            if not self._announced or self.group is None:
                return
            if frame.group_ssid and frame.group_ssid != self.group.ssid:
                return
            if self.medium.has_pending(self.address, frame.src):
                return
            self.medium.send_with_ack(Frame(
                kind=FrameKind.PROBE_RESPONSE, src=self.address, dst=frame.src,
                channel=frame.channel, group_ssid=self.group.ssid,
                persistent_flag=self.group_persistent, from_go=True),
                lambda outcome: None)
        elif self.state is PeerState.FIND_LISTEN:
            if self.config.join_only:
                return
            record = self.lookup_record(frame.src)
            self._cancel("_find_timer")
            self.medium.send_with_ack(Frame(
                kind=FrameKind.PROBE_RESPONSE, src=self.address, dst=frame.src,
                channel=frame.channel, group_ssid=self.config.group_ssid or None,
                persistent_flag=self.config.persistent or record is not None,
                persistent_role=record.my_role if record else None),
                self._probe_answer_settled)

    def _probe_answer_settled(self, outcome: str) -> None:
        if self.state is not PeerState.FIND_LISTEN:
            return
        if outcome == "acked":
            # stay parked on this channel for the peer's follow-up
            self._arm_guard(self._resume_find_after_guard, "rendezvous-guard")
        else:
            self._enter_find_listen()

    def _on_probe_response(self, frame: Frame) -> None:
        if self.state is PeerState.SCAN:
            if frame.from_go and self._ssid_acceptable(frame.group_ssid):
                record = self.lookup_record(frame.src, frame.group_ssid)
                fast = (frame.persistent_flag and record is not None
                        and record.my_role == CLIENT)
                self._start_joining(frame.src, frame.group_ssid or "",
                                    frame.channel, fast)
            return
        if self.state is not PeerState.FIND_SEARCH:
            return
        if frame.from_go:
            if self._ssid_acceptable(frame.group_ssid):
                record = self.lookup_record(frame.src, frame.group_ssid)
                fast = (frame.persistent_flag and record is not None
                        and record.my_role == CLIENT)
                self._start_joining(frame.src, frame.group_ssid or "",
                                    frame.channel, fast)
            return
        if self.config.join_only:
            return
        if frame.group_ssid and self.config.group_ssid and \
                frame.group_ssid != self.config.group_ssid:
            return
        record = self.lookup_record(frame.src)
        if record is not None and frame.persistent_role is not None:
            if record.my_role == CLIENT and frame.persistent_role == GO:
                self._start_joining(frame.src, record.ssid, frame.channel,
                                    persistent_fast=True)
                return
            if record.my_role == GO and frame.persistent_role == CLIENT:
                self._cancel_activity_timers()
                self._become_go(record.ssid, persistent=True,
                                first_beacon_at=self.engine.now
                                + self.config.beacon_interval // 4)
                return
            # conflicting stored roles: fall back to a standard formation
            self.discard_record(frame.src)
        elif record is not None and frame.persistent_role is None:
            self.discard_record(frame.src)
        self._begin_negotiation(frame.src)

    # -- group-owner negotiation -------------------------------------------------------

    def _begin_negotiation(self, peer: str) -> None:
        self._cancel_activity_timers()
        self._set_state(PeerState.NEGOTIATING)
        neg = _Negotiation(peer=peer, role="initiator", my_tiebreak=self.rng.bit())
        self._neg = neg
        neg.action_timer = self.engine.after(
            self._reply_delay, lambda: self._send_goneg_request(neg),
            tag="goneg-request", target=self.address)

    def _send_goneg_request(self, neg: _Negotiation) -> None:
        neg.action_timer = None
        if self._neg is not neg or neg.role != "initiator":
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.GO_NEG_REQUEST, src=self.address, dst=neg.peer,
            channel=self.medium.channel_of(self.address),
            go_intent=self.config.go_intent, tiebreak=neg.my_tiebreak,
            persistent_flag=self.config.persistent),
            lambda outcome: self._goneg_request_settled(neg, outcome))

    def _goneg_request_settled(self, neg: _Negotiation, outcome: str) -> None:
        if self._neg is not neg:
            return
        if outcome == "failed":
            self._fail_to_find()
        else:
            self._arm_guard(self._negotiation_guard_expired, "response-guard")

    def _negotiation_guard_expired(self) -> None:
        self._guard_timer = None
        if self.state is PeerState.NEGOTIATING:
            self._fail_to_find()

    def _on_goneg_request(self, frame: Frame) -> None:
        if self.config.join_only:
            return
        if self.state is PeerState.FIND_LISTEN:
            self._respond_to_negotiation(frame)
        elif (self.state is PeerState.NEGOTIATING and self._neg is not None
              and self._neg.role == "initiator" and frame.src == self._neg.peer):
            # crossed requests: the lower address keeps the initiator role
            if self.address < frame.src:
                return
            if self._neg.action_timer is not None:
                self.engine.cancel(self._neg.action_timer)
            self.medium.cancel_pending(self.address, frame.src)
            self._cancel("_guard_timer")
            self._respond_to_negotiation(frame)

    def _respond_to_negotiation(self, frame: Frame) -> None:
        self._cancel_activity_timers()
        self._set_state(PeerState.NEGOTIATING)
        neg = _Negotiation(peer=frame.src, role="responder",
                           my_tiebreak=self.rng.bit(),
                           persistent=frame.persistent_flag and self.config.persistent,
                           peer_intent=frame.go_intent,
                           peer_tiebreak=frame.tiebreak)
        self._neg = neg
        neg.action_timer = self.engine.after(
            self._reply_delay, lambda: self._send_goneg_response(neg),
            tag="goneg-response", target=self.address)

    def _send_goneg_response(self, neg: _Negotiation) -> None:
        neg.action_timer = None
        if self._neg is not neg:
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.GO_NEG_RESPONSE, src=self.address, dst=neg.peer,
            channel=self.medium.channel_of(self.address),
            go_intent=self.config.go_intent, tiebreak=neg.my_tiebreak,
            persistent_flag=self.config.persistent),
            lambda outcome: self._goneg_response_settled(neg, outcome))

    def _goneg_response_settled(self, neg: _Negotiation, outcome: str) -> None:
        if self._neg is not neg:
            return
        if outcome == "failed":
            self._fail_to_find()
        else:
            self._arm_guard(self._negotiation_guard_expired, "confirmation-guard")

    def _on_goneg_response(self, frame: Frame) -> None:
        neg = self._neg
        if (self.state is not PeerState.NEGOTIATING or neg is None
                or neg.role != "initiator" or frame.src != neg.peer):
            return
        self._cancel("_guard_timer")
        neg.peer_intent = frame.go_intent
        neg.peer_tiebreak = frame.tiebreak
        neg.persistent = self.config.persistent and frame.persistent_flag
        self.engine.after(self._reply_delay,
                          lambda: self._send_goneg_confirmation(neg),
                          tag="goneg-confirmation", target=self.address)

    def _send_goneg_confirmation(self, neg: _Negotiation) -> None:
        if self._neg is not neg:
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.GO_NEG_CONFIRMATION, src=self.address, dst=neg.peer,
            channel=self.medium.channel_of(self.address),
            persistent_flag=neg.persistent),
            lambda outcome: self._confirmation_settled(neg, outcome))

    def _confirmation_settled(self, neg: _Negotiation, outcome: str) -> None:
        if self._neg is not neg:
            return
        if outcome == "failed":
            self._fail_to_find()
        else:
            self._negotiation_complete(neg)

    def _on_goneg_confirmation(self, frame: Frame) -> None:
        neg = self._neg
        if (self.state is not PeerState.NEGOTIATING or neg is None
                or neg.role != "responder" or frame.src != neg.peer):
            return
        self._cancel("_guard_timer")
        neg.persistent = neg.persistent and frame.persistent_flag
        self._negotiation_complete(neg)

    def _negotiation_complete(self, neg: _Negotiation) -> None:
        role = decide_go_role(self.config.go_intent, neg.peer_intent,
                              self.address, neg.peer, neg.my_tiebreak)
        if neg.role == "initiator":
            self.history.negotiation(
                self.engine.now, self.address, self.config.go_intent,
                neg.peer, neg.peer_intent,
                self.address if role == GO else neg.peer)
        self._neg = None
        if role == GO:
            ssid = self.config.group_ssid or f"DIRECT-{self.address}"
            self._become_go(ssid, persistent=neg.persistent,
                            first_beacon_at=self.engine.now
                            + self.config.beacon_interval // 4)
            self._go_sessions[neg.peer] = _GoSideProvisioning(
                total=self.config.provisioning_frames, persistent=neg.persistent)
        else:
            self._set_state(PeerState.PROVISIONING_PHASE1)
            self._prov = _ClientProvisioning(
                go=neg.peer, ssid=self.config.group_ssid or "",
                total=self.config.provisioning_frames,
                persistent=neg.persistent, awaiting_beacon=True)
            self._update_provisioning_phase()

    # -- group owner operation ------------------------------------------------------

    def _become_go(self, ssid: str, persistent: bool, first_beacon_at: int,
                   announce_immediately: bool = True) -> None:
        self._cancel_activity_timers()
        self._neg = None
        self._join = None
        self._prov = None
        self._set_state(PeerState.GO_OPERATING)
        self.group = GroupView(ssid=ssid, go=self.address,
                               members={self.address}, formed_at=self.engine.now)
        self.group_persistent = persistent
        self._announced = announce_immediately
        self.history.go_established(self.engine.now, self.address, ssid)
        self._beacon_timer = self.engine.schedule(
            first_beacon_at, self._beacon_tick, tag="beacon", target=self.address)

    def _beacon_tick(self) -> None:
        if self.state is not PeerState.GO_OPERATING or self.group is None:
            return
        self._announced = True
        self.medium.transmit(Frame(
            kind=FrameKind.BEACON, src=self.address, dst=BROADCAST,
            channel=self.medium.channel_of(self.address),
            group_ssid=self.group.ssid, persistent_flag=self.group_persistent))
        self._beacon_timer = self.engine.after(
            self.config.beacon_interval, self._beacon_tick,
            tag="beacon", target=self.address)

    def _member_joined(self, client: str, session: _GoSideProvisioning) -> None:
        assert self.group is not None
        self.group.members.add(client)
        self.history.member_added(self.engine.now, self.group.ssid,
                                  self.address, client)
        if session.persistent:
            self.store_record(client, self.group.ssid, GO)
        self._go_sessions.pop(client, None)

    # -- joining ------------------------------------------------------------------

    def _start_joining(self, go: str, ssid: str, channel: int,
                       persistent_fast: bool = False) -> None:
        self._cancel_activity_timers()
        self._set_state(PeerState.JOINING)
        join = _JoinAttempt(go=go, ssid=ssid, persistent_fast=persistent_fast)
        self._join = join
        self.medium.tune(self.address, channel)
        self.engine.after(self._reply_delay, lambda: self._send_pd_request(join),
                          tag="pd-request", target=self.address)

    def _send_pd_request(self, join: _JoinAttempt) -> None:
        if self._join is not join or self.state is not PeerState.JOINING:
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.PROVISION_DISCOVERY_REQUEST, src=self.address,
            dst=join.go, channel=self.medium.channel_of(self.address),
            group_ssid=join.ssid or None,
            persistent_flag=join.persistent_fast or self.config.persistent),
            lambda outcome: self._pd_request_settled(join, outcome))

    def _pd_request_settled(self, join: _JoinAttempt, outcome: str) -> None:
        if self._join is not join or self.state is not PeerState.JOINING:
            return
        if outcome == "failed":
            self._fail_to_scan()
        else:
            self._arm_guard(self._join_guard_expired, "pd-guard")

    def _join_guard_expired(self) -> None:
        self._guard_timer = None
        if self.state is PeerState.JOINING:
            self._fail_to_scan()

    def _on_pd_request(self, frame: Frame) -> None:
        if self.state is PeerState.GO_OPERATING and self.group is not None:
            if frame.group_ssid and frame.group_ssid != self.group.ssid:
                return
            record = self.lookup_record(frame.src, self.group.ssid)
            phase2_only = (frame.persistent_flag and record is not None
                           and record.my_role == GO)
            total = phase2_frames(self.config.provisioning_frames) \
                if phase2_only else self.config.provisioning_frames
            self._go_sessions[frame.src] = _GoSideProvisioning(
                total=total,
                persistent=phase2_only
                or (frame.persistent_flag and self.group_persistent))
            self.engine.after(self._reply_delay,
                              lambda: self._send_pd_response(frame.src),
                              tag="pd-response", target=self.address)
        elif self.state is PeerState.FIND_LISTEN and frame.persistent_flag:
            record = self.lookup_record(frame.src, frame.group_ssid)
            if record is None or record.my_role != GO:
                return
            self._cancel_activity_timers()
            self._become_go(record.ssid, persistent=True,
                            first_beacon_at=self.engine.now
                            + self.config.beacon_interval // 4)
            self._go_sessions[frame.src] = _GoSideProvisioning(
                total=phase2_frames(self.config.provisioning_frames),
                persistent=True)
            self.engine.after(self._reply_delay,
                              lambda: self._send_pd_response(frame.src),
                              tag="pd-response", target=self.address)

    def _send_pd_response(self, client: str) -> None:
        if self.state is not PeerState.GO_OPERATING or self.group is None:
            return
        if client not in self._go_sessions:
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.PROVISION_DISCOVERY_RESPONSE, src=self.address,
            dst=client, channel=self.medium.channel_of(self.address),
            group_ssid=self.group.ssid,
            persistent_flag=self._go_sessions[client].persistent),
            lambda outcome: self._pd_response_settled(client, outcome))

    def _pd_response_settled(self, client: str, outcome: str) -> None:
        if outcome == "failed":
            self._go_sessions.pop(client, None)

    def _on_pd_response(self, frame: Frame) -> None:
        join = self._join
        if (self.state is not PeerState.JOINING or join is None
                or frame.src != join.go):
            return
        self._cancel("_guard_timer")
        self._join = None
        total = self.config.provisioning_frames
        if join.persistent_fast:
            total = phase2_frames(total)
        prov = _ClientProvisioning(
            go=frame.src, ssid=frame.group_ssid or join.ssid, total=total,
            persistent=join.persistent_fast
            or (self.config.persistent and frame.persistent_flag),
            phase2_only=join.persistent_fast)
        self._prov = prov
        if join.persistent_fast:
            self._set_state(PeerState.PROVISIONING_PHASE2)
        else:
            self._set_state(PeerState.PROVISIONING_PHASE1)
            self._update_provisioning_phase()
        self.engine.after(self._reply_delay,
                          lambda: self._send_client_auth(1),
                          tag="auth-start", target=self.address)

    # -- provisioning -----------------------------------------------------------

    def _update_provisioning_phase(self) -> None:
        prov = self._prov
        if prov is None or prov.phase2_only:
            return
        if (self.state is PeerState.PROVISIONING_PHASE1
                and prov.done >= prov.total // 2):
            self._set_state(PeerState.PROVISIONING_PHASE2)

    def _send_client_auth(self, seq: int) -> None:
        prov = self._prov
        if prov is None or self.state not in (PeerState.PROVISIONING_PHASE1,
                                              PeerState.PROVISIONING_PHASE2):
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.AUTH, src=self.address, dst=prov.go,
            channel=self.medium.channel_of(self.address), auth_seq=seq),
            lambda outcome: self._client_auth_settled(prov, seq, outcome))

    def _client_auth_settled(self, prov: _ClientProvisioning, seq: int,
                             outcome: str) -> None:
        if self._prov is not prov:
            return
        if outcome == "failed":
            self._fail_to_scan()
            return
        prov.done = seq
        self._update_provisioning_phase()
        if prov.done >= prov.total:
            self._complete_association()
        else:
            self._arm_guard(self._provisioning_guard_expired, "auth-guard")

    def _provisioning_guard_expired(self) -> None:
        self._guard_timer = None
        if self.state in (PeerState.PROVISIONING_PHASE1,
                          PeerState.PROVISIONING_PHASE2):
            self._fail_to_scan()

    def _on_auth(self, frame: Frame) -> None:
        if self.state is PeerState.GO_OPERATING:
            session = self._go_sessions.get(frame.src)
            if session is None or frame.auth_seq != session.done + 1:
                return
            session.done = frame.auth_seq
            if session.done >= session.total:
                self._member_joined(frame.src, session)
            else:
                next_seq = session.done + 1
                self.engine.after(
                    self._reply_delay,
                    lambda: self._send_go_auth(frame.src, next_seq),
                    tag="auth", target=self.address)
            return
        prov = self._prov
        if (prov is None or frame.src != prov.go
                or self.state not in (PeerState.PROVISIONING_PHASE1,
                                      PeerState.PROVISIONING_PHASE2)):
            return
        if frame.auth_seq != prov.done + 1:
            return
        self._cancel("_guard_timer")
        prov.done = frame.auth_seq
        self._update_provisioning_phase()
        if prov.done >= prov.total:
            self._complete_association()
        else:
            self.engine.after(self._reply_delay,
                              lambda: self._send_client_auth(prov.done + 1),
                              tag="auth", target=self.address)

    def _send_go_auth(self, client: str, seq: int) -> None:
        session = self._go_sessions.get(client)
        if session is None or self.state is not PeerState.GO_OPERATING:
            return
        self.medium.send_with_ack(Frame(
            kind=FrameKind.AUTH, src=self.address, dst=client,
            channel=self.medium.channel_of(self.address), auth_seq=seq),
            lambda outcome: self._go_auth_settled(client, session, seq, outcome))

    def _go_auth_settled(self, client: str, session: _GoSideProvisioning,
                         seq: int, outcome: str) -> None:
        if self._go_sessions.get(client) is not session:
            return
        if outcome == "failed":
            self._go_sessions.pop(client, None)
            return
        session.done = seq
        if session.done >= session.total:
            self._member_joined(client, session)

    def _complete_association(self) -> None:
        prov = self._prov
        assert prov is not None
        self._cancel("_guard_timer")
        self._set_state(PeerState.CLIENT_ASSOCIATED)
        self.go_address = prov.go
        self.go_ssid = prov.ssid
        if prov.persistent and prov.ssid:
            self.store_record(prov.go, prov.ssid, CLIENT)
        self.history.association(self.engine.now, self.address, prov.go, prov.ssid)
        self._prov = None

    # -- data-plane helpers used by the traffic layer ---------------------------

    @property
    def associated(self) -> bool:
        return self.state is PeerState.CLIENT_ASSOCIATED

    @property
    def is_go(self) -> bool:
        return self.state is PeerState.GO_OPERATING

    def in_group_with(self, other: str) -> bool:
        if self.is_go and self.group is not None:
            return other in self.group.members
        return self.associated and self.go_address == other
