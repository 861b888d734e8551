"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from unimodal_bandits import (
    BanditConfig,
    Bernoulli,
    Exponential,
    Gaussian,
    PullStats,
    line_graph,
)

# nine-arm hill over a path: single peak at arm 4, symmetric slopes
HILL_MEANS = (0.05, 0.10, 0.15, 0.20, 0.25, 0.20, 0.15, 0.10, 0.05)

FAMILIES = [Bernoulli(), Gaussian(0.25), Exponential()]


def make_stats(counts, means):
    """PullStats with the given per-arm counts and empirical means."""
    stats = PullStats(len(counts))
    stats.counts = [int(c) for c in counts]
    stats.means = [float(m) for m in means]
    stats.sums = [c * m for c, m in zip(stats.counts, stats.means)]
    stats.t = sum(stats.counts)
    return stats


@pytest.fixture
def hill_bernoulli():
    return BanditConfig(Bernoulli(), HILL_MEANS, line_graph(9))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
