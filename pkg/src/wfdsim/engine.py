"""Deterministic discrete-event core.

A single :class:`Engine` owns the virtual clock and the event queue.  Events
fire in non-decreasing time order; events scheduled for the same instant fire
in insertion order.  Event ids are assigned when an event fires, so ids are
dense and strictly increasing in firing order.

Randomness comes from :class:`Rng`, an xorshift64* generator.  Substreams for
independent actors are derived as ``seed XOR actor_index`` so that adding an
actor never perturbs the draws of the others.
"""

from __future__ import annotations

import heapq
from typing import Callable, Optional


class SimulationError(Exception):
    """A precondition of the simulation core was violated."""


class Event:
    """One queued action.  Returned by :meth:`Engine.schedule` as the handle
    used for cancellation."""

    __slots__ = ("fire_time", "seq", "action", "tag", "target", "id", "cancelled", "fired")

    def __init__(self, fire_time: int, seq: int, action: Callable[[], None],
                 tag: str, target: str):
        self.fire_time = fire_time
        self.seq = seq
        self.action = action
        self.tag = tag
        self.target = target
        self.id: Optional[int] = None  # assigned when fired
        self.cancelled = False
        self.fired = False

    def __lt__(self, other: "Event") -> bool:
        return (self.fire_time, self.seq) < (other.fire_time, other.seq)

    def __repr__(self) -> str:
        return f"Event(t={self.fire_time}, seq={self.seq}, tag={self.tag!r}, target={self.target!r})"


class Engine:
    """Virtual clock plus ordered event queue."""

    def __init__(self):
        self.now: int = 0
        self._queue: list[Event] = []
        self._seq = 0
        self._next_id = 1
        self.scheduled_count = 0
        self.fired_count = 0
        self.cancelled_count = 0
        self.current_event: Optional[Event] = None
        self._stop_requested = False

    # -- scheduling ------------------------------------------------------

    def schedule(self, fire_time: int, action: Callable[[], None],
                 tag: str = "", target: str = "") -> Event:
        """Enqueue *action* to run at *fire_time* (picoseconds).

        Scheduling in the past is a logic bug and raises.
        """
        if fire_time < self.now:
            raise SimulationError(
                f"past event: fire_time {fire_time} < now {self.now} (tag={tag!r})")
        event = Event(fire_time, self._seq, action, tag, target)
        self._seq += 1
        self.scheduled_count += 1
        heapq.heappush(self._queue, event)
        return event

    def after(self, delay: int, action: Callable[[], None],
              tag: str = "", target: str = "") -> Event:
        return self.schedule(self.now + delay, action, tag, target)

    def cancel(self, event: Optional[Event]) -> bool:
        """Cancel a pending event.  Returns False if it already fired or was
        already cancelled (idempotent)."""
        if event is None or event.fired or event.cancelled:
            return False
        event.cancelled = True
        self.cancelled_count += 1
        return True

    # -- run loop --------------------------------------------------------

    def request_stop(self) -> None:
        """Stop the run loop after the event currently being processed."""
        self._stop_requested = True

    def run_until(self, stop: int) -> int:
        """Fire every event with fire_time <= stop, in order.

        Advances the clock to *stop* (even with an empty queue) and returns
        the number of events fired.
        """
        if stop < self.now:
            raise SimulationError(f"run_until into the past: {stop} < {self.now}")
        fired = 0
        self._stop_requested = False
        while self._queue and self._queue[0].fire_time <= stop:
            event = heapq.heappop(self._queue)
            if event.cancelled:
                continue
            self.now = event.fire_time
            event.fired = True
            event.id = self._next_id
            self._next_id += 1
            self.fired_count += 1
            fired += 1
            self.current_event = event
            event.action()
            self.current_event = None
            if self._stop_requested:
                return fired
        self.now = stop
        return fired

    @property
    def pending_count(self) -> int:
        return sum(1 for e in self._queue if not e.cancelled)


# -- pseudo-randomness ----------------------------------------------------

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    """One splitmix64 step, used to scramble seeds before use."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class Rng:
    """xorshift64* pseudo-random generator.

    The 64-bit state is the splitmix64 scramble of the seed (mapped to a
    fixed nonzero constant if the scramble yields zero).  Each call to
    :meth:`next_u64` applies the xorshift64 triplet (12, 25, 27) and returns
    the state multiplied by 0x2545F4914F6CDD1D.  Identical seeds therefore
    give identical draw sequences on every platform.
    """

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._state = _splitmix64(self.seed) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def random(self) -> float:
        """Float in [0, 1) built from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def bit(self) -> int:
        return self.next_u64() & 1


def substream(seed: int, index: int) -> Rng:
    """Derive the deterministic substream ``seed XOR index``."""
    return Rng(seed ^ index)
