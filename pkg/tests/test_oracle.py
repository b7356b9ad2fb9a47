import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdcsim.errors import OracleModeError, ParameterError
from qdcsim.oracle import (BirthDeathChain, compare, estimates_from_run,
                           leaf_metrics, stationary_distribution)
from qdcsim.physics import renege_time
from qdcsim.sim import run_once

from conftest import scenario


def linear_solve_stationary(chain: BirthDeathChain) -> np.ndarray:
    """Independent oracle: null space of the CTMC generator, solved directly."""
    k = chain.capacity
    q = np.zeros((k + 1, k + 1))
    for n in range(k + 1):
        b, d = chain.birth(n), chain.death(n)
        if n < k:
            q[n, n + 1] = b
        if n > 0:
            q[n, n - 1] = d
        q[n, n] = -(b * (n < k) + d * (n > 0))
    a = np.vstack([q.T, np.ones(k + 1)])
    rhs = np.zeros(k + 2)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return pi


def test_hand_solved_chain():
    chain = BirthDeathChain(2.0, 1.0, 0.0, 2)
    pi = stationary_distribution(chain)
    np.testing.assert_allclose(pi, [1 / 7, 2 / 7, 4 / 7], atol=1e-14)


def test_no_arrivals_pins_empty_state():
    pi = stationary_distribution(BirthDeathChain(0.0, 1.0, 0.1, 4))
    np.testing.assert_allclose(pi, [1, 0, 0, 0, 0], atol=0)


def test_balanced_walk_is_uniform():
    for k in (1, 2, 7):
        pi = stationary_distribution(BirthDeathChain(3.0, 3.0, 0.0, k))
        np.testing.assert_allclose(pi, np.full(k + 1, 1 / (k + 1)), atol=1e-14)


def test_dead_chain_rejected():
    with pytest.raises(ParameterError):
        stationary_distribution(BirthDeathChain(1.0, 0.0, 0.0, 3))
    with pytest.raises(ParameterError):
        BirthDeathChain(1.0, 1.0, 0.0, 0)
    with pytest.raises(ParameterError):
        BirthDeathChain(-1.0, 1.0, 0.0, 3)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.01, 50.0), st.floats(0.01, 20.0),
    st.floats(0.0, 2.0), st.integers(1, 90),
)
def test_matches_linear_algebra_oracle(lam, mu, theta, k):
    chain = BirthDeathChain(lam, mu, theta, k)
    pi = stationary_distribution(chain)
    assert abs(pi.sum() - 1.0) < 1e-12
    assert (pi >= 0).all()
    np.testing.assert_allclose(pi, linear_solve_stationary(chain), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.01, 50.0), st.floats(0.01, 20.0),
    st.floats(0.0, 2.0), st.integers(1, 90),
)
def test_global_balance_residual(lam, mu, theta, k):
    chain = BirthDeathChain(lam, mu, theta, k)
    pi = stationary_distribution(chain)
    for n in range(k):
        assert abs(lam * pi[n] - chain.death(n + 1) * pi[n + 1]) < 1e-10


def test_extreme_capacity_no_underflow():
    # strongly loaded chain at K=90: plain products would overflow/underflow
    chain = BirthDeathChain(30.0, 0.5, 0.0, 90)
    pi = stationary_distribution(chain)
    assert abs(pi.sum() - 1.0) < 1e-12
    assert pi[-1] > 0.9  # mass piles at K under heavy load
    drained = BirthDeathChain(0.5, 30.0, 2.0, 90)
    pi2 = stationary_distribution(drained)
    assert abs(pi2.sum() - 1.0) < 1e-12
    assert pi2[0] > 0.9


def test_leaf_metrics_hand_values():
    m = leaf_metrics(BirthDeathChain(2.0, 1.0, 0.0, 2))
    assert m.throughput == pytest.approx(6 / 7, abs=1e-14)
    assert m.p_full == pytest.approx(4 / 7, abs=1e-14)
    assert m.mean_queue_len == pytest.approx(10 / 7, abs=1e-14)
    assert m.p_empty == pytest.approx(1 / 7, abs=1e-14)
    assert m.renege_flow == 0.0


def test_leaf_metrics_limits():
    # overwhelming reneging: nothing is ever served
    m = leaf_metrics(BirthDeathChain(2.0, 1.0, 1e9, 5))
    assert m.throughput < 1e-6
    assert m.renege_flow == pytest.approx(2.0 * (1.0 - m.p_full), rel=1e-6)
    # overwhelming service: every arrival consumed instantly
    m = leaf_metrics(BirthDeathChain(2.0, 1e9, 0.0, 5))
    assert m.throughput == pytest.approx(2.0, rel=1e-6)
    assert m.mean_queue_len < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 40.0), st.floats(0.1, 10.0), st.floats(0.0, 1.0), st.integers(1, 60))
def test_flow_balance_identity(lam, mu, theta, k):
    m = leaf_metrics(BirthDeathChain(lam, mu, theta, k))
    chain_in = lam * (1.0 - m.p_full)
    assert abs(chain_in - (m.throughput + m.renege_flow)) < 1e-10 * max(1.0, chain_in)


def _validation_cfg(**kw):
    # ~7000 renege events in the window puts the noisiest metric near 1.2%
    # standard error, so the 5% band sits beyond 4 sigma
    defaults = dict(lambda_gen=6.0, capacity=4, gamma=0.06, mu_total=3.0,
                    renege_dist="exponential", horizon=20000.0,
                    warmup_fraction=0.1, master_seed=17)
    defaults.update(kw)
    return scenario(**defaults)


def test_compare_matched_run_passes():
    cfg = _validation_cfg()
    stats = run_once(cfg)
    theta = 1.0 / renege_time(0.7, 0.06)
    chain = BirthDeathChain(6.0, 3.0, theta, 4)
    report = compare(chain, stats, tolerance=0.05)
    assert report.passed, report


def test_compare_mismatched_capacity_names_divergence():
    stats = run_once(_validation_cfg())
    theta = 1.0 / renege_time(0.7, 0.06)
    wrong = BirthDeathChain(6.0, 3.0, theta, 8)
    report = compare(wrong, stats, tolerance=0.05)
    assert not report.passed
    assert "p_full" in report.failures() or "mean_queue_len" in report.failures()


def test_compare_refuses_deterministic_mode():
    stats = run_once(_validation_cfg(renege_dist="deterministic"))
    chain = BirthDeathChain(6.0, 3.0, 0.1, 4)
    with pytest.raises(OracleModeError):
        compare(chain, stats, tolerance=0.05)


def test_compare_allows_deterministic_without_decay():
    stats = run_once(_validation_cfg(renege_dist="deterministic", gamma=0.0))
    chain = BirthDeathChain(6.0, 3.0, 0.0, 4)
    report = compare(chain, stats, tolerance=0.05)
    assert report.passed, report


def test_compare_requires_single_leaf():
    cfg = scenario(spines=1, leaves=2, hosts=3, mu_total=3.0, p_inter=0.4,
                   renege_dist="exponential", horizon=100.0)
    stats = run_once(cfg)
    with pytest.raises(OracleModeError):
        estimates_from_run(stats)
