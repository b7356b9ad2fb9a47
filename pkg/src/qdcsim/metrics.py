"""Run statistics: event counters, time-weighted occupancy, fidelity records, ratios.

Counters restart at the warmup cut: ebits sitting in memory at that instant are
carried over as generated+admitted so the conservation identities stay exact over
the measurement window.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import ParameterError, SimulationError

FIDELITY_BIN_WIDTH = 0.01
FIDELITY_RANGE = (0.5, 1.0)


class LeafStats:
    """Per-leaf counters plus occupancy integrals (filled at finalization)."""

    __slots__ = (
        "generated", "not_joined", "displaced", "admitted", "reneged",
        "delivered_intra", "sent_to_swap", "unserved_empty", "in_memory_final",
        "sojourn_sum", "sojourn_count", "len_integral", "time_in_state",
    )

    def __init__(self):
        self.generated = 0
        self.not_joined = 0
        self.displaced = 0
        self.admitted = 0
        self.reneged = 0
        self.delivered_intra = 0
        self.sent_to_swap = 0
        self.unserved_empty = 0
        self.in_memory_final = 0
        self.sojourn_sum = 0.0
        self.sojourn_count = 0
        self.len_integral = 0.0
        self.time_in_state: list[float] = []

    def reset_window(self, carryover: int):
        """Restart counting with `carryover` ebits already in memory."""
        self.generated = carryover
        self.admitted = carryover
        self.not_joined = 0
        self.displaced = 0
        self.reneged = 0
        self.delivered_intra = 0
        self.sent_to_swap = 0
        self.unserved_empty = 0
        self.sojourn_sum = 0.0
        self.sojourn_count = 0


class SpineStats:
    """Per-spine swap counters."""

    __slots__ = ("swap_attempts", "swap_failures", "swap_successes")

    def __init__(self):
        self.swap_attempts = 0
        self.swap_failures = 0
        self.swap_successes = 0

    def reset_window(self):
        self.swap_attempts = 0
        self.swap_failures = 0
        self.swap_successes = 0


@dataclass
class RunStats:
    """Everything measured in one simulation run."""

    horizon: float = 0.0
    warmup_time: float = 0.0
    events_executed: int = 0
    renege_dist: str = "deterministic"
    gammas: tuple[float, ...] = ()
    leaves: list[LeafStats] = field(default_factory=list)
    spines: list[SpineStats] = field(default_factory=list)
    requests_total: int = 0
    requests_inter: int = 0
    delivered_inter: int = 0
    unserved_inter: dict[str, int] = field(default_factory=dict)
    fidelity_intra: list[float] = field(default_factory=list)
    fidelity_inter: list[float] = field(default_factory=list)

    @property
    def requests_intra(self) -> int:
        return self.requests_total - self.requests_inter

    @property
    def window(self) -> float:
        return self.horizon - self.warmup_time

    def leaf_sum(self, name: str) -> int:
        return sum(getattr(l, name) for l in self.leaves)

    def spine_sum(self, name: str) -> int:
        return sum(getattr(s, name) for s in self.spines)

    @property
    def delivered_total(self) -> int:
        return self.leaf_sum("delivered_intra") + self.delivered_inter

    @property
    def unserved_inter_total(self) -> int:
        return sum(self.unserved_inter.values())

    def reset_window(self, now: float, carryovers: list[int]):
        self.warmup_time = now
        for leaf, carry in zip(self.leaves, carryovers):
            leaf.reset_window(carry)
        for spine in self.spines:
            spine.reset_window()
        self.requests_total = 0
        self.requests_inter = 0
        self.delivered_inter = 0
        self.unserved_inter = {}
        self.fidelity_intra = []
        self.fidelity_inter = []


def check_conservation(stats: RunStats):
    """Assert the exact bookkeeping identities; raises on any violation."""
    problems = []
    for i, l in enumerate(stats.leaves):
        if l.generated != l.admitted + l.not_joined:
            problems.append(f"leaf {i}: generated {l.generated} != admitted {l.admitted} + not_joined {l.not_joined}")
        accounted = l.delivered_intra + l.sent_to_swap + l.reneged + l.displaced + l.in_memory_final
        if l.admitted != accounted:
            problems.append(f"leaf {i}: admitted {l.admitted} != terminal states {accounted}")
    for i, s in enumerate(stats.spines):
        if s.swap_attempts != s.swap_successes + s.swap_failures:
            problems.append(f"spine {i}: attempts {s.swap_attempts} != successes + failures")
    if stats.leaf_sum("sent_to_swap") != 2 * stats.spine_sum("swap_attempts"):
        problems.append("ebits sent to swap != 2 x swap attempts")
    if stats.requests_intra != stats.leaf_sum("delivered_intra") + stats.leaf_sum("unserved_empty"):
        problems.append("intra requests != delivered_intra + unserved_empty")
    if stats.requests_inter != stats.delivered_inter + stats.unserved_inter_total:
        problems.append("inter requests != delivered_inter + unserved_inter")
    if len(stats.fidelity_intra) != stats.leaf_sum("delivered_intra"):
        problems.append("intra fidelity samples != delivered_intra")
    if len(stats.fidelity_inter) != stats.delivered_inter:
        problems.append("inter fidelity samples != delivered_inter")
    if problems:
        raise SimulationError("conservation violated: " + "; ".join(problems))


def throughput(stats: RunStats) -> float:
    """Deliveries (intra + swap) per time unit over the measurement window."""
    if stats.window <= 0:
        raise ParameterError("horizon must exceed warmup")
    return stats.delivered_total / stats.window


def capacity(stats: RunStats) -> float:
    """Network-wide delivered entanglements per time unit (same window as throughput)."""
    return throughput(stats)


def reneging_ratio(stats: RunStats) -> float | None:
    """Reneged / admitted. Blocked ebits never joined, so they are excluded here."""
    admitted = stats.leaf_sum("admitted")
    if admitted == 0:
        return None
    return stats.leaf_sum("reneged") / admitted


def not_joined_ratio(stats: RunStats) -> float | None:
    """Arrivals lost to a full memory (blocked or displaced) / all arrivals."""
    generated = stats.leaf_sum("generated")
    if generated == 0:
        return None
    return (stats.leaf_sum("not_joined") + stats.leaf_sum("displaced")) / generated


def avg_queue_len(stats: RunStats) -> float:
    """Time-averaged ebits in memory, mean across leaves."""
    if stats.window <= 0:
        raise ParameterError("horizon must exceed warmup")
    total = sum(l.len_integral for l in stats.leaves)
    return total / (stats.window * len(stats.leaves))


@dataclass(frozen=True)
class FidelitySummary:
    count: int
    mean: float
    min: float
    max: float
    histogram: tuple[int, ...]  # 50 bins of width 0.01 over [0.5, 1.0]


def fidelity_summary(stats: RunStats, cls: str | None = None) -> FidelitySummary | None:
    """Summary of delivered fidelities; cls picks 'intra', 'inter', or pooled (None)."""
    if cls == "intra":
        samples = stats.fidelity_intra
    elif cls == "inter":
        samples = stats.fidelity_inter
    elif cls is None:
        samples = stats.fidelity_intra + stats.fidelity_inter
    else:
        raise ParameterError(f"class must be 'intra', 'inter', or None, got {cls!r}")
    if not samples:
        return None
    lo, hi = FIDELITY_RANGE
    n_bins = round((hi - lo) / FIDELITY_BIN_WIDTH)
    hist = [0] * n_bins
    for f in samples:
        idx = int((f - lo) / FIDELITY_BIN_WIDTH)
        if idx >= n_bins:  # f == 1.0 lands in the last bin
            idx = n_bins - 1
        hist[idx] += 1
    return FidelitySummary(
        count=len(samples),
        mean=math.fsum(samples) / len(samples),
        min=min(samples),
        max=max(samples),
        histogram=tuple(hist),
    )


# Long-form CSV schema: one row per (sweep point, replication). Config columns
# first, then raw counters, then derived metrics. The leaf buffer size is
# exported as queue_capacity; the capacity column is the network delivery rate.
CSV_COLUMNS = [
    "point", "replication", "master_seed",
    "spines", "leaves", "hosts_per_leaf",
    "gamma", "f_threshold", "q_bsm",
    "lambda_gen", "queue_capacity", "full_policy", "pop_policy", "renege_dist",
    "workload_mode", "mu_pair", "mu_total", "p_inter",
    "horizon", "warmup_fraction",
    "generated", "not_joined", "displaced", "admitted", "reneged",
    "delivered_intra", "sent_to_swap", "in_memory_final",
    "requests_total", "requests_inter", "delivered_inter",
    "unserved_intra", "unserved_inter",
    "swap_attempts", "swap_failures", "swap_successes",
    "throughput", "capacity", "avg_queue_len",
    "reneging_ratio", "not_joined_ratio", "assembly_rate",
    "fidelity_mean", "fidelity_min", "fidelity_max",
    "fidelity_mean_intra", "fidelity_min_intra", "fidelity_max_intra",
    "fidelity_mean_inter", "fidelity_min_inter", "fidelity_max_inter",
]


def export_csv(rows: Iterable[dict], dest: str | IO[str]):
    """Write long-form rows with the fixed documented header. Missing values -> empty."""
    rows = list(rows)

    def write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(["" if row.get(c) is None else str(row.get(c)) for c in CSV_COLUMNS])

    if isinstance(dest, str):
        try:
            with open(dest, "w", newline="") as fh:
                write(fh)
        except OSError as exc:
            raise SimulationError(f"cannot write CSV to {dest}: {exc}") from exc
    else:
        write(dest)
