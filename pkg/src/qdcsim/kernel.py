"""Discrete-event kernel: virtual clock, future-event list, named random streams.

Events at equal timestamps fire in insertion order (FIFO tie-break), so a run is
a pure function of its configuration and master seed. Cancelled events stay in
the heap and are skipped on pop (lazy deletion).
"""
from __future__ import annotations

import heapq
import math
import random
from typing import Callable

from .errors import ParameterError, SchedulingError


class EventHandle:
    """Ticket for one scheduled callback; cancellable until it fires."""

    __slots__ = ("id", "fire_time", "fn", "args", "cancelled", "fired")

    def __init__(self, event_id: int, fire_time: float, fn: Callable, args: tuple):
        self.id = event_id
        self.fire_time = fire_time
        self.fn = fn
        self.args = args
        self.cancelled = False
        self.fired = False

    def __repr__(self):
        state = "fired" if self.fired else ("cancelled" if self.cancelled else "pending")
        return f"<EventHandle #{self.id} t={self.fire_time} {state}>"


class Kernel:
    """Single-run event loop. Not shareable across concurrent runs."""

    def __init__(self):
        self.now: float = 0.0
        self._heap: list[tuple[float, int, EventHandle]] = []
        self._next_id = 0

    def schedule(self, time: float, fn: Callable, *args) -> EventHandle:
        """Schedule fn(*args) at the given simulation time."""
        if time < self.now:
            raise SchedulingError(f"cannot schedule at t={time} < now={self.now}")
        handle = EventHandle(self._next_id, time, fn, args)
        self._next_id += 1
        heapq.heappush(self._heap, (time, handle.id, handle))
        return handle

    def cancel(self, handle: EventHandle) -> bool:
        """Revoke a pending event. True iff it had not fired and now never will."""
        if handle.fired or handle.cancelled:
            return False
        handle.cancelled = True
        return True

    def run_until(self, t_end: float) -> int:
        """Execute every pending event with fire_time <= t_end; returns the count.

        The clock lands exactly on t_end, and events falling exactly on t_end
        do fire (deadlines at the horizon are counted).
        """
        if t_end < self.now:
            raise SchedulingError(f"cannot run to t={t_end} < now={self.now}")
        heap = self._heap
        pop = heapq.heappop
        executed = 0
        while heap:
            entry = heap[0]
            if entry[0] > t_end:
                break
            pop(heap)
            handle = entry[2]
            if handle.cancelled:
                continue
            self.now = entry[0]
            handle.fired = True
            handle.fn(*handle.args)
            executed += 1
        self.now = t_end
        return executed

    def pending(self) -> int:
        return sum(1 for _, _, h in self._heap if not h.cancelled)


class RngStream:
    """Deterministic random stream; (seed material, name) fixes the draw sequence.

    Seeding goes through random.Random's string path (sha512 of the bytes), so the
    sequence is stable across processes and platforms regardless of hash
    randomization.
    """

    __slots__ = ("name", "_rng", "random", "randrange")

    def __init__(self, name: str, seed_material: str):
        self.name = name
        rng = random.Random(f"{seed_material}\x1f{name}")
        self._rng = rng
        self.random = rng.random
        self.randrange = rng.randrange

    def exponential(self, rate: float) -> float:
        # strictly positive: -log(u) with u in (0, 1)
        u = self.random()
        while u <= 0.0:
            u = self.random()
        return -math.log(u) / rate

    def bernoulli(self, p: float) -> bool:
        return self.random() < p


class StreamFactory:
    """Hands out named streams derived from (master seed, replication index).

    Identical (seed, replication, name) always yields the identical sequence;
    distinct names yield independent streams. Sweeps reuse the same replication
    index across points, giving common random numbers for coupled comparisons.
    """

    def __init__(self, master_seed: int, replication: int = 0):
        self.master_seed = master_seed
        self.replication = replication
        self._material = f"{master_seed}/{replication}"

    def stream(self, name: str) -> RngStream:
        return RngStream(name, self._material)


def sample_exponential(stream: RngStream, rate: float) -> float:
    """One draw from Exp(rate), mean 1/rate. Always strictly positive."""
    if rate <= 0:
        raise ParameterError(f"exponential rate must be > 0, got {rate}")
    return stream.exponential(rate)


def sample_bernoulli(stream: RngStream, p: float) -> bool:
    """True with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"probability must be in [0, 1], got {p}")
    return stream.random() < p
