"""Spine switch: two-input assembly station performing probabilistic entanglement swaps.

Serving an inter-cluster request pops one ebit from each leaf and attempts a
Bell-state measurement; a failure discards both ebits and immediately retries
with the next stored pair. Retries take zero simulated time. If one side runs
dry the orphan popped ebit goes back to the head of its memory.
"""
from __future__ import annotations

from dataclasses import dataclass

from .kernel import RngStream
from .leaf import DELIVERED, DISCARDED, LeafSwitch
from .metrics import RunStats, SpineStats
from .physics import compose_swap_fidelity

EMPTY_A = "empty-a"
EMPTY_B = "empty-b"
BOTH_EMPTY = "both-empty"


@dataclass(frozen=True)
class SwapOutcome:
    delivered: bool
    fidelity: float | None
    reason: str | None
    attempts: int
    ebits_consumed: int
    returned: int


class SpineSwitch:
    """Swap-only switch; holds no quantum memory of its own."""

    def __init__(self, spine_id: int, q_success: float, bsm_stream: RngStream,
                 stats: SpineStats):
        self.spine_id = spine_id
        self.q_success = q_success
        self.stats = stats
        self._bsm = bsm_stream

    def serve_inter(self, leaf_a: LeafSwitch, leaf_b: LeafSwitch, now: float) -> SwapOutcome:
        stats = self.stats
        attempts = 0
        consumed = 0
        while True:
            ea = leaf_a.pop_ebit(now)
            eb = leaf_b.pop_ebit(now)
            if ea is None or eb is None:
                returned = 0
                if ea is None and eb is None:
                    reason = BOTH_EMPTY
                elif ea is None:
                    leaf_b.return_ebit(eb, now)
                    returned = 1
                    reason = EMPTY_A
                else:
                    leaf_a.return_ebit(ea, now)
                    returned = 1
                    reason = EMPTY_B
                return SwapOutcome(False, None, reason, attempts, consumed, returned)
            attempts += 1
            consumed += 2
            stats.swap_attempts += 1
            leaf_a.stats.sent_to_swap += 1
            leaf_b.stats.sent_to_swap += 1
            if self._bsm.random() < self.q_success:
                stats.swap_successes += 1
                ea.state = eb.state = DELIVERED
                fidelity = compose_swap_fidelity(
                    now - ea.created_at, now - eb.created_at,
                    leaf_a.gamma, leaf_b.gamma,
                )
                return SwapOutcome(True, fidelity, None, attempts, consumed, 0)
            stats.swap_failures += 1
            ea.state = eb.state = DISCARDED


def successful_assembly_rate(stats: RunStats) -> float | None:
    """Swap-delivered requests / inter-cluster requests; None before any inter demand."""
    if stats.requests_inter == 0:
        return None
    return stats.delivered_inter / stats.requests_inter
