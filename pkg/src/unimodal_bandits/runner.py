"""Seeded Monte Carlo harness: policy x run grids, regret aggregation,
CSV/trace outputs.

Each (policy, run) pair owns an independent random stream derived from the
master seed with splittable-generator mixing, so results are a pure
function of (config, master seed) regardless of how many workers execute
the grid or in which order.
"""

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from hashlib import sha256
from itertools import repeat
from pathlib import Path

import numpy as np

from .env import BanditConfig, BanditEnv, StepRecord
from .errors import ConfigError, ParameterError
from .expfam import make_family
from .graph import UnimodalGraph, line_graph
from .invariants import check_step
from .policies import PolicySpec, make_policy, needs_rng
from .theory import lower_bound_constant

DEFAULT_GRID_POINTS = 200
_VIOLATION_SAMPLE_CAP = 20


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description; picklable primitives only."""

    kind: str
    variance: float | None
    means: tuple
    graph_kind: str                      # "line" or "edges"
    graph_edges: tuple | None
    policies: tuple
    horizon: int
    runs: int
    seed: int
    grid: tuple
    traces: bool = False
    out_dir: str = "out"
    workers: int = 1

    def family(self):
        return make_family(self.kind, self.variance)

    def graph(self):
        if self.graph_kind == "line":
            return line_graph(len(self.means))
        return UnimodalGraph(len(self.means), self.graph_edges)

    def bandit_config(self):
        return BanditConfig(self.family(), self.means, self.graph())

    def labels(self):
        return tuple(spec.display() for spec in self.policies)

    def digest(self):
        """Hex digest of everything that determines the results."""
        payload = {
            "family": self.kind,
            "variance": self.variance,
            "means": list(self.means),
            "graph": {
                "kind": self.graph_kind,
                "edges": None if self.graph_edges is None else sorted(self.graph_edges),
            },
            "policies": [
                {"name": s.name, "gamma": s.gamma, "c": s.c, "label": s.display()}
                for s in self.policies
            ],
            "horizon": self.horizon,
            "runs": self.runs,
            "seed": self.seed,
            "grid": list(self.grid),
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return sha256(blob.encode()).hexdigest()

    def as_dict(self):
        return {
            "family": {"kind": self.kind, "variance": self.variance},
            "means": list(self.means),
            "graph": (
                {"type": "line"}
                if self.graph_kind == "line"
                else {"type": "edges", "edges": [list(e) for e in sorted(self.graph_edges)]}
            ),
            "policies": [
                {"name": s.name, "gamma": s.gamma, "c": s.c, "label": s.display()}
                for s in self.policies
            ],
            "horizon": self.horizon,
            "runs": self.runs,
            "seed": self.seed,
            "grid": list(self.grid),
            "traces": self.traces,
            "out": self.out_dir,
            "workers": self.workers,
        }


def log_grid(horizon, points=DEFAULT_GRID_POINTS):
    """Logarithmically spaced integer sampling times in [1, horizon]."""
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    pts = np.unique(
        np.rint(np.logspace(0.0, math.log10(horizon), int(points))).astype(np.int64)
    )
    pts = pts[(pts >= 1) & (pts <= horizon)]
    out = [int(p) for p in pts]
    if out[-1] != horizon:
        out.append(horizon)
    return tuple(out)


def _want(data, key, types, path, default=None, required=False):
    val = data.get(key)
    if val is None:
        if required:
            raise ConfigError(f"{path}{key}: missing required field")
        return default
    if types is not None and not isinstance(val, types):
        raise ConfigError(f"{path}{key}: expected {types}, got {type(val).__name__}")
    return val


def _parse_policy(entry, path):
    if isinstance(entry, str):
        entry = {"name": entry}
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: expected policy name or object")
    name = _want(entry, "name", str, path + ".", required=True)
    known = {"imed-ub", "imed", "osub", "uts"}
    if name.lower() not in known:
        raise ConfigError(f"{path}.name: unknown policy {name!r} (choose from {sorted(known)})")
    gamma = entry.get("gamma")
    if gamma is not None and (not isinstance(gamma, int) or isinstance(gamma, bool) or gamma < 0):
        raise ConfigError(f"{path}.gamma: must be a nonnegative integer")
    c = entry.get("c", 0.0)
    if not isinstance(c, (int, float)) or isinstance(c, bool):
        raise ConfigError(f"{path}.c: must be a number")
    label = entry.get("label", "")
    if not isinstance(label, str):
        raise ConfigError(f"{path}.label: must be a string")
    return PolicySpec(name=name.lower(), gamma=gamma, c=float(c), label=label)


def parse_config(data):
    """Validate a raw config mapping into an ExperimentConfig.

    Errors report the offending field path. The resolved bandit instance
    itself (domains, unimodality) is validated as well.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root: expected an object")

    fam = _want(data, "family", (dict, str), "", required=True)
    if isinstance(fam, str):
        fam = {"kind": fam}
    kind = _want(fam, "kind", str, "family.", required=True)
    variance = _want(fam, "variance", (int, float), "family.")
    if variance is not None:
        variance = float(variance)

    means = _want(data, "means", list, "", required=True)
    if len(means) < 2:
        raise ConfigError("means: need at least 2 arms")
    for i, m in enumerate(means):
        if not isinstance(m, (int, float)) or isinstance(m, bool):
            raise ConfigError(f"means[{i}]: must be a number")
    means = tuple(float(m) for m in means)

    graph = _want(data, "graph", (dict, str), "", default="line")
    if isinstance(graph, str):
        graph = {"type": graph}
    gtype = _want(graph, "type", str, "graph.", default="line")
    if gtype == "line":
        graph_kind, graph_edges = "line", None
    elif gtype == "edges":
        raw = _want(graph, "edges", list, "graph.", required=True)
        edges = []
        for i, e in enumerate(raw):
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise ConfigError(f"graph.edges[{i}]: expected a pair of arm indices")
            a, b = e
            if not isinstance(a, int) or not isinstance(b, int):
                raise ConfigError(f"graph.edges[{i}]: arm indices must be integers")
            edges.append((min(a, b), max(a, b)))
        graph_kind, graph_edges = "edges", tuple(sorted(set(edges)))
    else:
        raise ConfigError(f"graph.type: expected 'line' or 'edges', got {gtype!r}")

    raw_policies = _want(data, "policies", list, "", required=True)
    if not raw_policies:
        raise ConfigError("policies: need at least one policy")
    policies = [_parse_policy(p, f"policies[{i}]") for i, p in enumerate(raw_policies)]
    seen = {}
    labeled = []
    for spec in policies:
        label = spec.display()
        seen[label] = seen.get(label, 0) + 1
        if seen[label] > 1:
            label = f"{label}-{seen[label]}"
        labeled.append(replace(spec, label=label))
    policies = tuple(labeled)

    horizon = _want(data, "horizon", int, "", required=True)
    if isinstance(horizon, bool) or horizon < len(means):
        raise ConfigError(f"horizon: must be an integer >= arm count {len(means)}")
    runs = _want(data, "runs", int, "", default=1)
    if isinstance(runs, bool) or runs < 1:
        raise ConfigError("runs: must be an integer >= 1")
    seed = _want(data, "seed", int, "", default=0)
    if isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed: must be a nonnegative integer")

    grid_raw = _want(data, "grid", (list, dict), "")
    if grid_raw is None:
        grid = log_grid(horizon)
    elif isinstance(grid_raw, dict):
        points = _want(grid_raw, "points", int, "grid.", default=DEFAULT_GRID_POINTS)
        if isinstance(points, bool) or points < 1:
            raise ConfigError("grid.points: must be an integer >= 1")
        grid = log_grid(horizon, points)
    else:
        grid = []
        prev = 0
        for i, p in enumerate(grid_raw):
            if not isinstance(p, int) or isinstance(p, bool) or not (1 <= p <= horizon):
                raise ConfigError(f"grid[{i}]: must be an integer in [1, horizon]")
            if p <= prev:
                raise ConfigError(f"grid[{i}]: grid must be strictly increasing")
            prev = p
            grid.append(p)
        grid = tuple(grid)
    if not grid:
        raise ConfigError("grid: must contain at least one sampling time")

    traces = _want(data, "traces", bool, "", default=False)
    out_dir = _want(data, "out", str, "", default="out")
    workers = _want(data, "workers", int, "", default=1)
    if isinstance(workers, bool) or workers < 1:
        raise ConfigError("workers: must be an integer >= 1")

    cfg = ExperimentConfig(
        kind=kind.lower(),
        variance=variance,
        means=means,
        graph_kind=graph_kind,
        graph_edges=graph_edges,
        policies=policies,
        horizon=horizon,
        runs=runs,
        seed=seed,
        grid=tuple(grid),
        traces=traces,
        out_dir=out_dir,
        workers=workers,
    )
    try:
        cfg.bandit_config()
    except (ConfigError, ParameterError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)


# ---------------------------------------------------------------------------
# seeding

def seed_sequence(master_seed, run_index, policy_id):
    """Independent SeedSequence for one (policy, run) cell of the grid."""
    if master_seed < 0 or run_index < 0 or policy_id < 0:
        raise ParameterError("seed components must be nonnegative")
    return np.random.SeedSequence(master_seed, spawn_key=(policy_id, run_index))


def derive_run_seed(master_seed, run_index, policy_id):
    """Collision-resistant 128-bit stream seed for a (policy, run) pair."""
    state = seed_sequence(master_seed, run_index, policy_id).generate_state(4, np.uint32)
    return int.from_bytes(state.tobytes(), "little")


# ---------------------------------------------------------------------------
# single-run simulation

@dataclass
class RunResult:
    regret: np.ndarray
    reward_regret: float
    final_counts: tuple
    violation_count: int = 0
    violations: tuple = ()
    actions: tuple | None = None
    records: list | None = None
    rewards: list | None = None
    init_rewards: tuple | None = None


def simulate_policy_run(
    family,
    means,
    graph,
    spec,
    seed_seq,
    horizon,
    grid=(),
    capture=False,
    check=False,
    record_actions=False,
    run_id="",
):
    """One full run: forced initialization then the policy loop to horizon.

    Every arm gets its own child stream of seed_seq (the policy gets one
    more for its own randomness), so the rewards an arm yields do not
    depend on the interleaving the policy produces.
    """
    n = len(means)
    if horizon < n:
        raise ParameterError(f"horizon {horizon} below arm count {n}")
    children = seed_seq.spawn(n + 1)
    rngs = [np.random.default_rng(c) for c in children[:n]]
    config = BanditConfig(family, means, graph)
    env = BanditEnv(config, rngs)
    policy = make_policy(
        spec, family, graph, rng=np.random.default_rng(children[n]) if needs_rng(spec) else None
    )
    stats = env.stats
    grid = tuple(grid)
    glen = len(grid)
    gi = 0
    samples = np.zeros(glen)
    trace_mode = capture or check
    records = [] if capture else None
    rewards = [] if capture else None
    actions = [] if record_actions else None
    violations = []
    violation_count = 0

    init_rewards = []
    for a in range(n):
        x = env.pull(a)
        init_rewards.append(x)
        if record_actions:
            actions.append(a)
        if gi < glen and stats.t == grid[gi]:
            samples[gi] = env.pseudo_regret()
            gi += 1

    for _ in range(horizon - n):
        if trace_mode:
            rec = policy.decide(stats)
            arm = rec.chosen
            if check:
                bad = check_step(rec, graph, family, run_id)
                if bad:
                    violation_count += len(bad)
                    if len(violations) < _VIOLATION_SAMPLE_CAP:
                        violations.extend(bad[: _VIOLATION_SAMPLE_CAP - len(violations)])
            if capture:
                records.append(rec)
        else:
            arm = policy.select(stats)
        x = env.pull(arm)
        if capture:
            rewards.append(x)
        if record_actions:
            actions.append(arm)
        if gi < glen and stats.t == grid[gi]:
            samples[gi] = env.pseudo_regret()
            gi += 1

    return RunResult(
        regret=samples,
        reward_regret=env.reward_regret,
        final_counts=tuple(stats.counts),
        violation_count=violation_count,
        violations=tuple(violations),
        actions=None if actions is None else tuple(actions),
        records=records,
        rewards=rewards,
        init_rewards=tuple(init_rewards) if capture else None,
    )


# ---------------------------------------------------------------------------
# experiment grid

def _trace_path(out_dir, label, run_index):
    return Path(out_dir) / "traces" / f"{label}__run{run_index:05d}.jsonl"


def _run_pair(cfg, policy_idx, run_idx, check):
    family = cfg.family()
    graph = cfg.graph()
    spec = cfg.policies[policy_idx]
    label = spec.display()
    run_id = f"{label}/run{run_idx}"
    res = simulate_policy_run(
        family,
        cfg.means,
        graph,
        spec,
        seed_sequence(cfg.seed, run_idx, policy_idx),
        cfg.horizon,
        cfg.grid,
        capture=cfg.traces,
        # the per-step inequalities are guarantees of the structured
        # minimum-index rule only; baselines do not promise them
        check=check and spec.name == "imed-ub",
        run_id=run_id,
    )
    if cfg.traces:
        write_trace(
            _trace_path(cfg.out_dir, label, run_idx),
            {
                "policy": label,
                "rule": spec.name,
                "run": run_idx,
                "init_rewards": list(res.init_rewards),
            },
            res.records,
            res.rewards,
        )
    return (
        policy_idx,
        run_idx,
        res.regret,
        res.final_counts,
        res.reward_regret,
        res.violation_count,
        res.violations,
    )


@dataclass
class RegretCurves:
    """Aggregated pseudo-regret over runs, per policy and grid time."""

    policies: tuple
    grid: tuple
    mean: dict
    std: dict
    q10: dict
    q90: dict
    final_pulls_mean: dict
    run_count: int
    config_digest: str
    violation_count: int = 0
    violations: tuple = ()


def run_experiment(cfg, workers=None, check_invariants=False):
    """Execute the full policy x run grid and aggregate regret curves.

    The aggregation is a deterministic reduction ordered by (policy, run),
    so the result does not depend on the worker count.
    """
    workers = cfg.workers if workers is None else workers
    if workers < 1:
        raise ConfigError("workers: must be >= 1")
    n_pol = len(cfg.policies)
    n_arms = len(cfg.means)
    glen = len(cfg.grid)
    regret = np.zeros((n_pol, cfg.runs, glen))
    counts = np.zeros((n_pol, cfg.runs, n_arms))
    violation_count = 0
    violation_sample = []

    if cfg.traces:
        (Path(cfg.out_dir) / "traces").mkdir(parents=True, exist_ok=True)

    jobs = [(p, r) for p in range(n_pol) for r in range(cfg.runs)]
    if workers == 1:
        results = (_run_pair(cfg, p, r, check_invariants) for p, r in jobs)
        for item in results:
            p, r, reg, cnt, _, vc, vs = item
            regret[p, r] = reg
            counts[p, r] = cnt
            violation_count += vc
            if vs and len(violation_sample) < _VIOLATION_SAMPLE_CAP:
                violation_sample.extend(vs[: _VIOLATION_SAMPLE_CAP - len(violation_sample)])
    else:
        ps = [p for p, _ in jobs]
        rs = [r for _, r in jobs]
        chunk = max(1, len(jobs) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for item in pool.map(
                _run_pair, repeat(cfg), ps, rs, repeat(check_invariants), chunksize=chunk
            ):
                p, r, reg, cnt, _, vc, vs = item
                regret[p, r] = reg
                counts[p, r] = cnt
                violation_count += vc
                if vs and len(violation_sample) < _VIOLATION_SAMPLE_CAP:
                    violation_sample.extend(vs[: _VIOLATION_SAMPLE_CAP - len(violation_sample)])

    labels = cfg.labels()
    mean, std, q10, q90, pulls = {}, {}, {}, {}, {}
    for p, label in enumerate(labels):
        block = regret[p]
        mean[label] = block.mean(axis=0)
        std[label] = block.std(axis=0)
        q10[label] = np.percentile(block, 10.0, axis=0)
        q90[label] = np.percentile(block, 90.0, axis=0)
        pulls[label] = counts[p].mean(axis=0)

    return RegretCurves(
        policies=labels,
        grid=cfg.grid,
        mean=mean,
        std=std,
        q10=q10,
        q90=q90,
        final_pulls_mean=pulls,
        run_count=cfg.runs,
        config_digest=cfg.digest(),
        violation_count=violation_count,
        violations=tuple(violation_sample),
    )


# ---------------------------------------------------------------------------
# outputs

def _fmt(x):
    return repr(float(x))

PLOT_SCRIPT = '''#!/usr/bin/env python3
"""Plot mean cumulative regret with 10-90% bands from regret.csv."""
import collections
import csv
import os

import matplotlib
matplotlib.use(os.environ.get("MPLBACKEND", "Agg"))
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
series = collections.defaultdict(list)
with open(os.path.join(here, "regret.csv"), newline="") as fh:
    for row in csv.DictReader(fh):
        series[row["policy"]].append(
            (int(row["t"]), float(row["mean"]), float(row["q10"]), float(row["q90"]))
        )

fig, ax = plt.subplots(figsize=(7.0, 4.5))
for policy, pts in series.items():
    pts.sort()
    ts = [p[0] for p in pts]
    ax.plot(ts, [p[1] for p in pts], label=policy)
    ax.fill_between(ts, [p[2] for p in pts], [p[3] for p in pts], alpha=0.2)
ax.set_xscale("log")
ax.set_xlabel("time step")
ax.set_ylabel("cumulative regret")
ax.legend()
fig.tight_layout()
target = os.path.join(here, "regret.png")
fig.savefig(target, dpi=150)
print(target)
'''


def emit_outputs(curves, theory, out_dir):
    """Write regret.csv, theory.json and a standalone plot script.

    Returns the paths written. Rows are ordered by (policy, grid time) and
    floats are serialized with shortest round-trip repr, so re-emitting the
    same curves is byte-identical.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    csv_path = out / "regret.csv"
    lines = ["policy,t,mean,std,q10,q90"]
    for label in curves.policies:
        m, s = curves.mean[label], curves.std[label]
        lo, hi = curves.q10[label], curves.q90[label]
        for i, t in enumerate(curves.grid):
            lines.append(
                f"{label},{t},{_fmt(m[i])},{_fmt(s[i])},{_fmt(lo[i])},{_fmt(hi[i])}"
            )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    theory_path = out / "theory.json"
    payload = theory.as_dict()
    payload["config_digest"] = curves.config_digest
    theory_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    plot_path = out / "plot_regret.py"
    plot_path.write_text(PLOT_SCRIPT, encoding="utf-8")

    return {"regret": csv_path, "theory": theory_path, "plot": plot_path}


def write_config(cfg, out_dir):
    """Persist the resolved config next to the outputs (used by `check`)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "config.json"
    path.write_text(
        json.dumps(cfg.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


# ---------------------------------------------------------------------------
# trace files

def write_trace(path, meta, records, rewards):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(meta) + "\n")
        for rec, reward in zip(records, rewards):
            row = {
                "t": rec.t,
                "chosen": rec.chosen,
                "leader": rec.leader,
                "mu_star": rec.mu_star,
                "candidates": list(rec.candidates),
                "indexes": list(rec.indexes),
                "counts": list(rec.counts),
                "means": list(rec.means),
                "reward": reward,
            }
            fh.write(json.dumps(row) + "\n")


def read_trace(path):
    """Load one trace file back into (meta, [(StepRecord, reward), ...])."""
    steps = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise ParameterError(f"{path}: empty trace file")
        meta = json.loads(first)
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            rec = StepRecord(
                t=row["t"],
                chosen=row["chosen"],
                leader=row["leader"],
                mu_star=row["mu_star"],
                candidates=tuple(row["candidates"]),
                indexes=tuple(row["indexes"]),
                counts=tuple(row["counts"]),
                means=tuple(row["means"]),
            )
            steps.append((rec, row["reward"]))
    return meta, steps


def check_trace_dir(path):
    """Run the invariant checker over the structured-rule traces below path.

    path must hold a config.json (written by the run command) plus trace
    files, either directly or in a traces/ subdirectory. Traces written by
    other decision rules are skipped: the per-step inequalities are
    guarantees of the structured minimum-index rule only. Returns the
    violation list and the number of records checked.
    """
    root = Path(path)
    config_path = root / "config.json"
    if not config_path.exists():
        config_path = root.parent / "config.json"
    if not config_path.exists():
        raise ConfigError(f"{path}: no config.json found next to the traces")
    cfg = load_config(config_path)
    family = cfg.family()
    graph = cfg.graph()

    trace_dir = root / "traces" if (root / "traces").is_dir() else root
    files = sorted(trace_dir.glob("*.jsonl"))
    if not files:
        raise ConfigError(f"{trace_dir}: no trace files (*.jsonl) found")

    violations = []
    checked = 0
    checkable = 0
    for f in files:
        meta, steps = read_trace(f)
        if meta.get("rule", meta.get("policy")) != "imed-ub":
            continue
        checkable += 1
        for rec, _ in steps:
            violations.extend(check_step(rec, graph, family, run_id=f.stem))
            checked += 1
    if not checkable:
        raise ConfigError(
            f"{trace_dir}: no imed-ub traces to check ({len(files)} files skipped)"
        )
    return violations, checked
