"""Wiring of one simulation run: kernel, topology, switches, workload, stats.

Each run owns an isolated kernel and RNG state; replications differ only in the
replication index mixed into every stream seed.
"""
from __future__ import annotations

from .config import ScenarioConfig
from .kernel import Kernel, StreamFactory
from .leaf import LeafSwitch
from .metrics import LeafStats, RunStats, SpineStats, check_conservation
from .network import (IntraRoute, Request, RequestGenerator, build_topology,
                      classify_route)
from .spine import SpineSwitch


class Simulation:
    def __init__(self, cfg: ScenarioConfig, replication: int = 0):
        self.cfg = cfg
        self.kernel = Kernel()
        self.factory = StreamFactory(cfg.sim.master_seed, replication)
        self.topology = build_topology(
            cfg.topology.spines, cfg.topology.leaves, cfg.topology.hosts_per_leaf)

        gammas = cfg.physics.gammas(self.topology.leaves)
        self.stats = RunStats(
            horizon=cfg.sim.horizon,
            warmup_time=0.0,
            renege_dist=cfg.leaf.renege_dist,
            gammas=gammas,
        )
        self.leaves = []
        for l in range(self.topology.leaves):
            stats = LeafStats()
            self.stats.leaves.append(stats)
            self.leaves.append(LeafSwitch(
                self.kernel, l, cfg.leaf, gammas[l], cfg.physics.f_threshold,
                gen_stream=self.factory.stream(f"ebit-arrivals-leaf-{l}"),
                renege_stream=self.factory.stream(f"renege-leaf-{l}"),
                stats=stats,
            ))
        self.spines = []
        bsm_stream = self.factory.stream("bsm")
        for s in range(self.topology.spines):
            stats = SpineStats()
            self.stats.spines.append(stats)
            self.spines.append(SpineSwitch(s, cfg.physics.q_bsm, bsm_stream, stats))
        self._spine_picker = self.factory.stream("spine-pick")
        self.generator = RequestGenerator(
            self.kernel, self.topology, cfg.workload, self.factory, self._handle_request)

    def _handle_request(self, req: Request):
        now = self.kernel.now
        stats = self.stats
        stats.requests_total += 1
        route = classify_route(self.topology, req, self._spine_picker)
        if isinstance(route, IntraRoute):
            fidelity = self.leaves[route.leaf].serve_intra(now)
            if fidelity is not None:
                stats.fidelity_intra.append(fidelity)
        else:
            stats.requests_inter += 1
            outcome = self.spines[route.spine].serve_inter(
                self.leaves[route.leaf_a], self.leaves[route.leaf_b], now)
            if outcome.delivered:
                stats.delivered_inter += 1
                stats.fidelity_inter.append(outcome.fidelity)
            else:
                stats.unserved_inter[outcome.reason] = \
                    stats.unserved_inter.get(outcome.reason, 0) + 1

    def _warmup_cut(self):
        carryovers = [len(leaf.memory) for leaf in self.leaves]
        self.stats.reset_window(self.kernel.now, carryovers)
        for leaf in self.leaves:
            leaf.memory.reset_window(self.kernel.now)

    def run(self) -> RunStats:
        cfg = self.cfg
        warmup = cfg.sim.warmup_fraction * cfg.sim.horizon
        if warmup > 0:
            self.kernel.schedule(warmup, self._warmup_cut)
        for leaf in self.leaves:
            leaf.start()
        self.generator.start()
        self.stats.events_executed = self.kernel.run_until(cfg.sim.horizon)
        for leaf in self.leaves:
            leaf.finalize(cfg.sim.horizon)
        check_conservation(self.stats)
        return self.stats


def run_once(cfg: ScenarioConfig, replication: int = 0) -> RunStats:
    return Simulation(cfg, replication).run()
