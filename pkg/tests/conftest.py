import numpy as np
import pytest

from relsched import (
    Allocation,
    NodeParams,
    SchedulerParams,
    build_config,
    preset,
)


@pytest.fixture
def two_node_config():
    """Single scheduler at rate 0.005 over nodes with rates 0.02 and 0.04."""
    return build_config(
        nodes=[NodeParams.from_rate(0.02), NodeParams.from_rate(0.04)],
        schedulers=[SchedulerParams(phi=1.0, lam=0.005)],
        rho=0.5,
    )


@pytest.fixture
def twin_node_config():
    """Single scheduler over two identical 0.02-rate nodes."""
    return build_config(
        nodes=[NodeParams.from_rate(0.02), NodeParams.from_rate(0.02)],
        schedulers=[SchedulerParams(phi=1.0, lam=0.005)],
        rho=0.5,
    )


@pytest.fixture
def even_split():
    return Allocation(np.array([[0.5, 0.5]]))


@pytest.fixture
def table12():
    return preset("table1-table2")


@pytest.fixture
def table13():
    return preset("table1-table3")


def feasible_random_allocation(rng, config, min_availability=0.2):
    """Dirichlet rows resampled until every node keeps clear headroom."""
    weights = config.load_weights()
    lam = config.arrival_rates()
    n, m = config.n_schedulers, config.n_nodes
    for _ in range(1000):
        entries = rng.dirichlet(np.ones(m), size=n)
        avail = 1.0 - (entries.T @ lam) * weights
        if avail.min() >= min_availability:
            return Allocation(entries)
    raise AssertionError("could not sample a feasible allocation")
