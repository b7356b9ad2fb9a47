import pytest

from qdcsim.config import PhysicsConfig, ScenarioConfig, SimConfig, TopologyConfig
from qdcsim.kernel import Kernel, StreamFactory
from qdcsim.leaf import LeafConfig, LeafSwitch
from qdcsim.metrics import LeafStats
from qdcsim.network import Workload


def make_leaf(kernel=None, *, lambda_gen=30.0, capacity=10, gamma=0.05,
              f_threshold=0.7, full_policy="block-new", pop_policy="oldest-first",
              renege_dist="deterministic", seed=1, leaf_id=0):
    kernel = kernel or Kernel()
    factory = StreamFactory(seed)
    leaf = LeafSwitch(
        kernel, leaf_id,
        LeafConfig(lambda_gen=lambda_gen, capacity=capacity, full_policy=full_policy,
                   pop_policy=pop_policy, renege_dist=renege_dist),
        gamma, f_threshold,
        gen_stream=factory.stream(f"ebit-arrivals-leaf-{leaf_id}"),
        renege_stream=factory.stream(f"renege-leaf-{leaf_id}"),
        stats=LeafStats(),
    )
    return kernel, leaf


def scenario(*, spines=0, leaves=1, hosts=3, gamma=0.05, f_threshold=0.7, q_bsm=1.0,
             lambda_gen=30.0, capacity=10, full_policy="block-new",
             pop_policy="oldest-first", renege_dist="deterministic",
             mode="aggregate", mu_pair=None, mu_total=4.0, p_inter=0.0,
             horizon=200.0, warmup_fraction=0.1, master_seed=1, replications=1,
             sweep=None):
    if mode == "per-pair":
        workload = Workload(mode=mode, mu_pair=mu_pair)
    else:
        workload = Workload(mode=mode, mu_total=mu_total, p_inter=p_inter)
    return ScenarioConfig(
        topology=TopologyConfig(spines, leaves, hosts),
        physics=PhysicsConfig(gamma=gamma, f_threshold=f_threshold, q_bsm=q_bsm),
        leaf=LeafConfig(lambda_gen=lambda_gen, capacity=capacity,
                        full_policy=full_policy, pop_policy=pop_policy,
                        renege_dist=renege_dist),
        workload=workload,
        sim=SimConfig(horizon=horizon, warmup_fraction=warmup_fraction,
                      master_seed=master_seed, replications=replications),
        sweep=sweep,
    )


@pytest.fixture
def leaf_factory():
    return make_leaf


@pytest.fixture
def scenario_factory():
    return scenario
