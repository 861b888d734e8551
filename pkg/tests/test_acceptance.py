"""Acceptance suite: every shipping criterion, at its stated tolerance,
printing one PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
complete; the heavyweight Monte Carlo fixtures take a few minutes on one
core. The Monte Carlo criteria pin master seed 20260810; they are
deterministic end to end.
"""

import itertools
import math
import time
from contextlib import contextmanager

import mpmath
import numpy as np
import pytest

from unimodal_bandits import (
    BanditConfig,
    Bernoulli,
    Exponential,
    Gaussian,
    PolicySpec,
    UnimodalGraph,
    emit_outputs,
    line_graph,
    lower_bound_constant,
    parse_config,
    run_experiment,
    seed_sequence,
    simulate_policy_run,
    validate_unimodal,
)

from conftest import HILL_MEANS
from test_expfam import kl_oracle
from test_graph import unimodal_oracle
from test_theory import mp_lower_bound

MASTER_SEED = 20260810
THREE_FAMILIES = [Bernoulli(), Gaussian(0.25), Exponential()]


@contextmanager
def criterion(cid, desc):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[criterion {cid}] FAIL: {desc} ({time.perf_counter() - start:.1f}s)")
        raise
    print(f"[criterion {cid}] PASS: {desc} ({time.perf_counter() - start:.1f}s)")


def hill_config(policies, runs, horizon, grid=None, seed=MASTER_SEED):
    return parse_config(
        {
            "family": "bernoulli",
            "means": list(HILL_MEANS),
            "graph": "line",
            "policies": policies,
            "horizon": horizon,
            "runs": runs,
            "seed": seed,
            "grid": grid,
        }
    )


@pytest.fixture(scope="module")
def hill_monte_carlo():
    """500 seeded runs of the hill instance at T=20000 for all policies."""
    cfg = hill_config(["imed-ub", "uts", "osub"], 500, 20000, grid=[5000, 10000, 20000])
    start = time.perf_counter()
    curves = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    return cfg, curves, elapsed


# ---------------------------------------------------------------------------
# 1. deterministic lemma suite


def test_criterion_1_invariants_hold_everywhere():
    runs, horizon = 100, 10000
    with criterion("1", f"zero invariant violations, {runs} runs x T={horizon} x 3 families"):
        for family in THREE_FAMILIES:
            graph = line_graph(9)
            for run in range(runs):
                res = simulate_policy_run(
                    family,
                    HILL_MEANS,
                    graph,
                    PolicySpec("imed-ub"),
                    seed_sequence(MASTER_SEED, run, 0),
                    horizon,
                    check=True,
                    run_id=f"{family.name}/run{run}",
                )
                assert res.violation_count == 0, res.violations[:3]


# ---------------------------------------------------------------------------
# 2. structured and unstructured rules coincide on two arms


def test_criterion_2_imed_imedub_identical_on_two_arms():
    with criterion("2", "IMED == IMED-UB arm sequences, 2 arms, 50 seeds, T=5000"):
        fam = Bernoulli()
        graph = line_graph(2)
        means = (0.4, 0.6)
        for run in range(50):
            seeded = lambda: seed_sequence(MASTER_SEED, run, 0)
            a = simulate_policy_run(
                fam, means, graph, PolicySpec("imed-ub"), seeded(), 5000, record_actions=True
            )
            b = simulate_policy_run(
                fam, means, graph, PolicySpec("imed"), seeded(), 5000, record_actions=True
            )
            assert a.actions == b.actions


# ---------------------------------------------------------------------------
# 3. divergence oracle agreement and Pinsker


def acceptance_grid(family):
    if family.name == "bernoulli":
        return np.linspace(0.01, 0.99, 50)
    if family.name == "gaussian":
        return np.linspace(-2.0, 2.0, 50)
    return np.linspace(0.05, 5.0, 50)


def test_criterion_3_kl_oracle_and_pinsker():
    with criterion("3", "closed-form KL within 1e-8 of numeric oracle; Pinsker slack >= -1e-12"):
        for family in THREE_FAMILIES:
            grid = acceptance_grid(family)
            for mu in grid:
                for mu_prime in grid:
                    closed = family.kl(mu, mu_prime)
                    assert closed == pytest.approx(
                        kl_oracle(family, mu, mu_prime), abs=1e-8
                    ), (family.name, mu, mu_prime)
                    if mu < mu_prime:
                        pinsker = (mu_prime - mu) ** 2 / (
                            2.0 * family.variance_sup(mu, mu_prime)
                        )
                        assert closed - pinsker >= -1e-12, (family.name, mu, mu_prime)


# ---------------------------------------------------------------------------
# 4. lower-bound constants


def test_criterion_4_lower_bound_constants():
    quoted = {"bernoulli": 14.2855, "gaussian": 20.0, "exponential": 4.3213}
    with criterion("4", "c(nu) matches high-precision oracle (1e-9) and quoted values (1e-3)"):
        mpmath.mp.dps = 50
        for family in THREE_FAMILIES:
            cfg = BanditConfig(family, HILL_MEANS, line_graph(9))
            got = lower_bound_constant(cfg).c_nu
            oracle = float(mp_lower_bound(family, HILL_MEANS, line_graph(9)))
            assert got == pytest.approx(oracle, rel=1e-9)
            assert got == pytest.approx(quoted[family.name], rel=1e-3)
        exact = lower_bound_constant(
            BanditConfig(Gaussian(0.25), HILL_MEANS, line_graph(9))
        ).c_nu
        assert exact == pytest.approx(20.0, abs=1e-9)


# ---------------------------------------------------------------------------
# 5. regret scaling of the structured rule


def test_criterion_5a_normalized_regret_nonincreasing(hill_monte_carlo):
    cfg, curves, elapsed = hill_monte_carlo
    m = curves.mean["imed-ub"]
    ratios = [float(m[i]) / math.log(t) for i, t in enumerate(curves.grid)]
    shown = [round(r, 3) for r in ratios]
    with criterion("5a", f"R(T)/log T nonincreasing over {list(curves.grid)}: {shown}"):
        assert ratios[0] >= ratios[1] >= ratios[2]


def test_criterion_5b_final_regret_near_constant(hill_monte_carlo):
    cfg, curves, elapsed = hill_monte_carlo
    c_nu = lower_bound_constant(cfg.bandit_config()).c_nu
    ratio = float(curves.mean["imed-ub"][-1]) / (c_nu * math.log(20000))
    with criterion("5b", f"R(20000)/(c(nu) log 20000) = {ratio:.3f} in [0.3, 5]"):
        assert 0.3 <= ratio <= 5.0


def test_criterion_5c_distant_arms_rarely_pulled(hill_monte_carlo):
    cfg, curves, elapsed = hill_monte_carlo
    pulls = curves.final_pulls_mean["imed-ub"]
    neighbors = (3, 5)
    distant = (0, 1, 2, 6, 7, 8)
    worst = max(
        float(pulls[a]) / float(pulls[b]) for a in distant for b in neighbors
    )
    with criterion(
        "5c", f"mean pulls at distance >= 2 below 10% of every neighbor (worst {worst:.3f})"
    ):
        for a in distant:
            for b in neighbors:
                assert pulls[a] < 0.1 * pulls[b], (a, b, pulls[a], pulls[b])


# ---------------------------------------------------------------------------
# 6. baseline sanity


def test_criterion_6_baselines_within_factor_two(hill_monte_carlo):
    cfg, curves, elapsed = hill_monte_carlo
    final = {label: float(curves.mean[label][-1]) for label in curves.policies}
    ratios = {
        other: final["imed-ub"] / final[other] for other in ("uts", "osub")
    }
    shown = {k: round(v, 3) for k, v in ratios.items()}
    with criterion(
        "6",
        f"final regret ratio vs baselines in [0.5, 2]: {shown} "
        f"(500-run fixture took {elapsed:.0f}s)",
    ):
        for other, ratio in ratios.items():
            assert 0.5 <= ratio <= 2.0, (other, final)


# ---------------------------------------------------------------------------
# 7. determinism across worker counts


def test_criterion_7_worker_count_independence(tmp_path):
    with criterion("7", "regret.csv byte-identical for 1 vs 3 workers"):
        cfg = hill_config(["imed-ub", "uts"], 8, 1500, grid=[100, 700, 1500])
        report = lower_bound_constant(cfg.bandit_config())
        one = run_experiment(cfg, workers=1)
        three = run_experiment(cfg, workers=3)
        emit_outputs(one, report, tmp_path / "w1")
        emit_outputs(three, report, tmp_path / "w3")
        a = (tmp_path / "w1" / "regret.csv").read_bytes()
        b = (tmp_path / "w3" / "regret.csv").read_bytes()
        assert a == b


# ---------------------------------------------------------------------------
# 8. unimodality validator vs path-enumeration oracle


def connected_edge_sets(n):
    """Every connected labeled graph on n nodes, as edge lists."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(2 ** len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edges:
            parent[find(a)] = find(b)
        if len({find(v) for v in range(n)}) == 1:
            yield edges


def test_criterion_8_validator_matches_oracle_exhaustively():
    rng = np.random.default_rng(MASTER_SEED)
    cases = 0
    with criterion("8", "validator == path oracle on all connected graphs with <= 6 nodes"):
        for n in range(2, 7):
            per_graph = 3 if n <= 5 else 1
            for edges in connected_edge_sets(n):
                graph = UnimodalGraph(n, edges)
                for k in range(per_graph):
                    means = rng.uniform(0.0, 1.0, n)
                    if k % 2 == 1:
                        means = np.round(means, 1)  # exercise ties
                    got = validate_unimodal(graph, means).ok
                    want = unimodal_oracle(graph, means)
                    assert got == want, (n, edges, means.tolist())
                    cases += 1
        assert cases >= 1000
    print(f"  criterion 8 covered {cases} (graph, means) cases")
