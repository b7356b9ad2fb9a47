"""Leaf switch: Poisson ebit generation into a bounded memory with decoherence reneging.

The memory is the queue and freshly generated ebits are its customers; host
requests act as servers, consuming one stored ebit instantly or being lost when
the memory is empty. Every admitted ebit carries a renege deadline (storage time
T, after which its fidelity would fall below the delivery threshold); an eager
timer removes it at exactly that instant.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import ParameterError, SimulationError
from .kernel import EventHandle, Kernel, RngStream
from .metrics import LeafStats
from .physics import fidelity_at, renege_time

# terminal states of an ebit; exactly one applies once it leaves the memory
IN_MEMORY = "in-memory"
DELIVERED = "delivered"
RENEGED = "reneged"
BLOCKED = "blocked"
DISPLACED = "displaced"
DISCARDED = "discarded-by-failed-swap"

FULL_POLICIES = ("block-new", "drop-oldest")
POP_POLICIES = ("oldest-first", "youngest-first")
RENEGE_DISTS = ("deterministic", "exponential")


class Ebit:
    """One entangled pair stored at a leaf, tracked from creation to a terminal state."""

    __slots__ = ("id", "created_at", "expires_at", "renege_handle", "state")

    def __init__(self, ebit_id: int, created_at: float, expires_at: float):
        self.id = ebit_id
        self.created_at = created_at
        self.expires_at = expires_at
        self.renege_handle: EventHandle | None = None
        self.state = IN_MEMORY


@dataclass(frozen=True)
class LeafConfig:
    lambda_gen: float
    capacity: int
    full_policy: str = "block-new"
    pop_policy: str = "oldest-first"
    renege_dist: str = "deterministic"

    def __post_init__(self):
        if self.lambda_gen <= 0:
            raise ParameterError(f"ebit generation rate must be > 0, got {self.lambda_gen}")
        if self.capacity < 1:
            raise ParameterError(f"memory capacity must be >= 1, got {self.capacity}")
        if self.full_policy not in FULL_POLICIES:
            raise ParameterError(f"full_policy must be one of {FULL_POLICIES}, got {self.full_policy!r}")
        if self.pop_policy not in POP_POLICIES:
            raise ParameterError(f"pop_policy must be one of {POP_POLICIES}, got {self.pop_policy!r}")
        if self.renege_dist not in RENEGE_DISTS:
            raise ParameterError(f"renege_dist must be one of {RENEGE_DISTS}, got {self.renege_dist!r}")


class EbitMemory:
    """Bounded FCFS store ordered by creation time, with occupancy accounting."""

    __slots__ = ("capacity", "entries", "len_integral", "time_in_state", "_last_t")

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.entries: deque[Ebit] = deque()
        self.len_integral = 0.0
        self.time_in_state = [0.0] * (capacity + 1)
        self._last_t = 0.0

    def __len__(self):
        return len(self.entries)

    def _advance(self, now: float):
        dt = now - self._last_t
        if dt > 0.0:
            n = len(self.entries)
            self.len_integral += n * dt
            self.time_in_state[n] += dt
            self._last_t = now

    def push_tail(self, ebit: Ebit, now: float):
        self._advance(now)
        self.entries.append(ebit)

    def push_head(self, ebit: Ebit, now: float):
        self._advance(now)
        self.entries.appendleft(ebit)

    def pop_head(self, now: float) -> Ebit:
        self._advance(now)
        return self.entries.popleft()

    def pop_tail(self, now: float) -> Ebit:
        self._advance(now)
        return self.entries.pop()

    def remove(self, ebit: Ebit, now: float):
        self._advance(now)
        if self.entries and self.entries[0] is ebit:
            self.entries.popleft()
        else:
            self.entries.remove(ebit)

    def reset_window(self, now: float):
        self._advance(now)
        self.len_integral = 0.0
        self.time_in_state = [0.0] * (self.capacity + 1)
        self._last_t = now

    def close(self, now: float):
        self._advance(now)


class LeafSwitch:
    """One cluster switch: generates, stores, reneges, and dispatches ebits."""

    def __init__(self, kernel: Kernel, leaf_id: int, cfg: LeafConfig, gamma: float,
                 f_threshold: float, gen_stream: RngStream, renege_stream: RngStream,
                 stats: LeafStats):
        self.kernel = kernel
        self.leaf_id = leaf_id
        self.cfg = cfg
        self.gamma = gamma
        self.renege_T = renege_time(f_threshold, gamma)
        self.memory = EbitMemory(cfg.capacity)
        self.stats = stats
        self._gen_stream = gen_stream
        self._renege_stream = renege_stream
        self._renege_rate = 0.0 if math.isinf(self.renege_T) or self.renege_T <= 0.0 \
            else 1.0 / self.renege_T
        self._next_ebit_id = 0
        self._pop_youngest = cfg.pop_policy == "youngest-first"

    def start(self):
        self._schedule_generation()

    # -- generation -------------------------------------------------------

    def _schedule_generation(self):
        dt = self._gen_stream.exponential(self.cfg.lambda_gen)
        self.kernel.schedule(self.kernel.now + dt, self._on_generate)

    def _on_generate(self):
        now = self.kernel.now
        stats = self.stats
        stats.generated += 1
        if len(self.memory) >= self.cfg.capacity:
            if self.cfg.full_policy == "block-new":
                stats.not_joined += 1
                self._schedule_generation()
                return
            # drop-oldest: displace the head to make room
            victim = self.memory.pop_head(now)
            if victim.renege_handle is not None:
                self.kernel.cancel(victim.renege_handle)
            victim.state = DISPLACED
            stats.displaced += 1
            self._note_removed(victim, now)
        self._admit(now)
        self._schedule_generation()

    def _admit(self, now: float):
        if math.isinf(self.renege_T):
            expires = math.inf
        elif self.cfg.renege_dist == "deterministic":
            expires = now + self.renege_T
        else:  # exponential with mean T, i.e. Markovian reneging at rate 1/T
            expires = now + self._renege_stream.exponential(self._renege_rate) \
                if self._renege_rate > 0.0 else now
        ebit = Ebit(self._next_ebit_id, now, expires)
        self._next_ebit_id += 1
        if expires != math.inf:
            ebit.renege_handle = self.kernel.schedule(expires, self._on_renege, ebit)
        self.memory.push_tail(ebit, now)
        self.stats.admitted += 1

    # -- reneging ---------------------------------------------------------

    def _on_renege(self, ebit: Ebit):
        # consumption cancels the timer, so the ebit is always still stored here
        if ebit.state != IN_MEMORY:
            raise SimulationError(f"renege fired for ebit {ebit.id} in state {ebit.state}")
        now = self.kernel.now
        self.memory.remove(ebit, now)
        ebit.state = RENEGED
        self.stats.reneged += 1
        self._note_removed(ebit, now)

    def _purge(self, ebit: Ebit, now: float):
        """Remove an entry whose deadline coincides with the current instant."""
        if ebit.renege_handle is not None:
            self.kernel.cancel(ebit.renege_handle)
        ebit.state = RENEGED
        self.stats.reneged += 1
        self._note_removed(ebit, now)

    # -- dispatch ---------------------------------------------------------

    def pop_ebit(self, now: float) -> Ebit | None:
        """Take one stored ebit per the pop policy; never returns an expired one.

        Entries whose deadline lands exactly on `now` are reneged here (their
        timers fire within this same timestamp), so a delivered ebit always has
        strictly positive remaining tolerance.
        """
        entries = self.memory.entries
        while entries:
            ebit = entries[-1] if self._pop_youngest else entries[0]
            if ebit.expires_at <= now:
                if self._pop_youngest:
                    self.memory.pop_tail(now)
                else:
                    self.memory.pop_head(now)
                self._purge(ebit, now)
                continue
            if self._pop_youngest:
                self.memory.pop_tail(now)
            else:
                self.memory.pop_head(now)
            if ebit.renege_handle is not None:
                self.kernel.cancel(ebit.renege_handle)
            self._note_removed(ebit, now)
            return ebit
        return None

    def return_ebit(self, ebit: Ebit, now: float):
        """Put an orphan popped ebit back at the head with its original deadline."""
        if ebit.expires_at != math.inf:
            ebit.renege_handle = self.kernel.schedule(ebit.expires_at, self._on_renege, ebit)
        ebit.state = IN_MEMORY
        self.memory.push_head(ebit, now)
        # undo the sojourn closed out by pop_ebit; it will close again for real
        self.stats.sojourn_sum -= now - ebit.created_at
        self.stats.sojourn_count -= 1

    def serve_intra(self, now: float) -> float | None:
        """Serve an intra-cluster request: delivered fidelity, or None if empty."""
        ebit = self.pop_ebit(now)
        if ebit is None:
            self.stats.unserved_empty += 1
            return None
        ebit.state = DELIVERED
        self.stats.delivered_intra += 1
        return fidelity_at(now - ebit.created_at, self.gamma)

    # -- bookkeeping ------------------------------------------------------

    def _note_removed(self, ebit: Ebit, now: float):
        self.stats.sojourn_sum += now - ebit.created_at
        self.stats.sojourn_count += 1

    def finalize(self, horizon: float):
        self.memory.close(horizon)
        self.stats.in_memory_final = len(self.memory)
        self.stats.len_integral = self.memory.len_integral
        self.stats.time_in_state = list(self.memory.time_in_state)
