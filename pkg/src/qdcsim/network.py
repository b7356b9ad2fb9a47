"""Spine-leaf topology, request classification/routing, and workload generation.

Hosts are identified as (leaf, slot) pairs; leaf l carries hosts (l, 0)..(l, H-1).
Every leaf links to every spine; construction is deterministic in (S, L, H).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import ParameterError, RoutingError
from .kernel import Kernel, RngStream, StreamFactory

HostId = tuple[int, int]

INTRA = "intra"
INTER = "inter"


@dataclass(frozen=True)
class Topology:
    spines: int
    leaves: int
    hosts_per_leaf: int

    @property
    def n_hosts(self) -> int:
        return self.leaves * self.hosts_per_leaf

    @property
    def host_links(self) -> list[tuple[HostId, int]]:
        """Star edges host <-> its leaf."""
        return [((l, h), l) for l in range(self.leaves) for h in range(self.hosts_per_leaf)]

    @property
    def spine_links(self) -> list[tuple[int, int]]:
        """Full bipartite edges leaf <-> spine."""
        return [(l, s) for l in range(self.leaves) for s in range(self.spines)]

    @property
    def n_intra_pairs(self) -> int:
        h = self.hosts_per_leaf
        return self.leaves * (h * (h - 1) // 2)

    @property
    def n_inter_pairs(self) -> int:
        return (self.leaves * (self.leaves - 1) // 2) * self.hosts_per_leaf ** 2

    @property
    def n_pairs(self) -> int:
        n = self.n_hosts
        return n * (n - 1) // 2

    def host_ids(self) -> list[HostId]:
        return [(l, h) for l in range(self.leaves) for h in range(self.hosts_per_leaf)]


def build_topology(spines: int, leaves: int, hosts_per_leaf: int) -> Topology:
    if leaves < 1:
        raise ParameterError(f"need at least 1 leaf, got {leaves}")
    if hosts_per_leaf < 2:
        raise ParameterError(f"need at least 2 hosts per leaf (no host pair otherwise), got {hosts_per_leaf}")
    if spines < 0:
        raise ParameterError(f"spine count must be >= 0, got {spines}")
    return Topology(spines, leaves, hosts_per_leaf)


@dataclass(frozen=True)
class Request:
    """A host-pair entanglement demand. cls is 'intra' iff both hosts share a leaf."""

    src: HostId
    dst: HostId
    arrival_time: float
    cls: str

    @staticmethod
    def make(src: HostId, dst: HostId, arrival_time: float) -> "Request":
        if src == dst:
            raise ParameterError(f"request endpoints must differ, got {src} twice")
        cls = INTRA if src[0] == dst[0] else INTER
        return Request(src, dst, arrival_time, cls)


@dataclass(frozen=True)
class IntraRoute:
    leaf: int


@dataclass(frozen=True)
class InterRoute:
    leaf_a: int
    spine: int
    leaf_b: int


def classify_route(top: Topology, req: Request, spine_picker: RngStream):
    """Route a request: shared leaf for intra, (leafA, random spine, leafB) for inter."""
    la, lb = req.src[0], req.dst[0]
    for host in (req.src, req.dst):
        if not (0 <= host[0] < top.leaves and 0 <= host[1] < top.hosts_per_leaf):
            raise RoutingError(f"host {host} not in topology")
    if la == lb:
        return IntraRoute(la)
    if top.spines == 0:
        raise RoutingError("inter-cluster request but topology has no spine")
    return InterRoute(la, spine_picker.randrange(top.spines), lb)


@dataclass(frozen=True)
class Workload:
    """Request demand model.

    per-pair mode: every unordered host pair receives an independent Poisson
    stream at rate mu_pair (realized as one marked Poisson process at the
    aggregate rate, which is equivalent in law).

    aggregate mode: one Poisson stream at mu_total; each arrival is tagged
    inter-cluster with probability p_inter, then a uniformly random host pair of
    that class is drawn.
    """

    mode: str
    mu_pair: float | None = None
    mu_total: float | None = None
    p_inter: float | None = None

    def __post_init__(self):
        if self.mode == "per-pair":
            if self.mu_pair is None or self.mu_pair <= 0:
                raise ParameterError(f"per-pair workload needs mu_pair > 0, got {self.mu_pair}")
        elif self.mode == "aggregate":
            if self.mu_total is None or self.mu_total <= 0:
                raise ParameterError(f"aggregate workload needs mu_total > 0, got {self.mu_total}")
            if self.p_inter is None or not 0.0 <= self.p_inter <= 1.0:
                raise ParameterError(f"aggregate workload needs p_inter in [0, 1], got {self.p_inter}")
        else:
            raise ParameterError(f"workload mode must be 'per-pair' or 'aggregate', got {self.mode!r}")

    def aggregate_rate(self, top: Topology) -> float:
        if self.mode == "per-pair":
            return self.mu_pair * top.n_pairs
        return self.mu_total


def natural_inter_fraction(top: Topology) -> float:
    """Inter-cluster share of uniformly random host pairs on this topology."""
    return top.n_inter_pairs / top.n_pairs


class RequestSampler:
    """Draws arrival gaps and request endpoints from named streams.

    Draw counts per arrival are fixed per mode, so sequences stay aligned across
    sweep points sharing a replication index (common random numbers).
    """

    def __init__(self, top: Topology, workload: Workload, factory: StreamFactory):
        self.top = top
        self.workload = workload
        self.rate = workload.aggregate_rate(top)
        self._iat = factory.stream("requests")
        self._cls = factory.stream("request-class")
        self._any = factory.stream("request-pairs")
        self._intra = factory.stream("request-pairs-intra")
        self._inter = factory.stream("request-pairs-inter")
        if workload.mode == "aggregate":
            if workload.p_inter > 0 and top.leaves < 2:
                raise ParameterError("p_inter > 0 requires at least 2 leaves")

    def interarrival(self) -> float:
        return self._iat.exponential(self.rate)

    def next_request(self, now: float) -> Request:
        top = self.top
        h = top.hosts_per_leaf
        if self.workload.mode == "per-pair":
            n = top.n_hosts
            u = self._any.randrange(n)
            v = self._any.randrange(n - 1)
            if v >= u:
                v += 1
            src = (u // h, u % h)
            dst = (v // h, v % h)
        elif self._cls.random() < self.workload.p_inter:
            la = self._inter.randrange(top.leaves)
            lb = self._inter.randrange(top.leaves - 1)
            if lb >= la:
                lb += 1
            src = (la, self._inter.randrange(h))
            dst = (lb, self._inter.randrange(h))
        else:
            leaf = self._intra.randrange(top.leaves)
            i = self._intra.randrange(h)
            j = self._intra.randrange(h - 1)
            if j >= i:
                j += 1
            src = (leaf, i)
            dst = (leaf, j)
        return Request.make(src, dst, now)


class RequestGenerator:
    """Kernel-driven Poisson request source feeding a sink callback."""

    def __init__(self, kernel: Kernel, top: Topology, workload: Workload,
                 factory: StreamFactory, sink: Callable[[Request], None]):
        self.kernel = kernel
        self.sampler = RequestSampler(top, workload, factory)
        self.sink = sink

    def start(self):
        self.kernel.schedule(self.kernel.now + self.sampler.interarrival(), self._fire)

    def _fire(self):
        now = self.kernel.now
        self.sink(self.sampler.next_request(now))
        self.kernel.schedule(now + self.sampler.interarrival(), self._fire)


def iter_requests(workload: Workload, top: Topology, factory: StreamFactory,
                  horizon: float) -> Iterator[Request]:
    """Kernel-free request stream up to the horizon; for tests and inspection."""
    sampler = RequestSampler(top, workload, factory)
    t = sampler.interarrival()
    while t <= horizon:
        yield sampler.next_request(t)
        t += sampler.interarrival()
