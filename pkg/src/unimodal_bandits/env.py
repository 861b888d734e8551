"""Simulation environment: true configuration, reward serving, pull statistics."""

from dataclasses import dataclass

from .errors import ConfigError, ParameterError, StateError
from .graph import validate_unimodal

_BLOCK = 512


class BanditConfig:
    """A bandit instance: reward family, true means, and the arm graph."""

    def __init__(self, family, means, graph):
        means = tuple(float(m) for m in means)
        if len(means) != graph.arm_count:
            raise ConfigError(
                f"means: length {len(means)} != graph arm_count {graph.arm_count}"
            )
        for i, m in enumerate(means):
            try:
                family.require_mean(m)
            except ParameterError as exc:
                raise ConfigError(f"means[{i}]: {exc}") from exc
        report = validate_unimodal(graph, means)
        if not report.ok:
            raise ConfigError(
                f"means: not unimodal on the graph ({report.reason}; arms {list(report.offending)})"
            )
        self.family = family
        self.means = means
        self.graph = graph
        self.optimal_arm = max(range(len(means)), key=means.__getitem__)
        self.optimal_mean = means[self.optimal_arm]
        self.gaps = tuple(self.optimal_mean - m for m in means)

    @property
    def arm_count(self):
        return len(self.means)

    def __repr__(self):
        return (
            f"BanditConfig(family={self.family!r}, means={self.means}, "
            f"graph={self.graph!r})"
        )


class PullStats:
    """Per-arm pull counts, reward sums and empirical means.

    Unpulled arms report an empirical mean of 0 by convention; selection
    rules call require_initialized() so they never actually read it.
    """

    __slots__ = ("arm_count", "counts", "sums", "means", "t")

    def __init__(self, arm_count):
        if arm_count < 1:
            raise ParameterError(f"arm_count must be >= 1, got {arm_count}")
        self.arm_count = arm_count
        self.counts = [0] * arm_count
        self.sums = [0.0] * arm_count
        self.means = [0.0] * arm_count
        self.t = 0

    def record(self, arm, reward):
        n = self.counts[arm] + 1
        s = self.sums[arm] + reward
        self.counts[arm] = n
        self.sums[arm] = s
        self.means[arm] = s / n
        self.t += 1

    def require_initialized(self):
        if self.t < self.arm_count or 0 in self.counts:
            raise StateError("every arm must be pulled once before selection")

    def copy(self):
        dup = PullStats(self.arm_count)
        dup.counts = list(self.counts)
        dup.sums = list(self.sums)
        dup.means = list(self.means)
        dup.t = self.t
        return dup


def empirical_best_set(stats):
    """Arms achieving the maximal empirical mean."""
    stats.require_initialized()
    means = stats.means
    best = max(means)
    return {a for a, m in enumerate(means) if m == best}


def leader(stats):
    """Empirically best arm, preferring fewer pulls, then the lowest index."""
    stats.require_initialized()
    means = stats.means
    counts = stats.counts
    lead = 0
    best_m = means[0]
    best_c = counts[0]
    for a in range(1, stats.arm_count):
        m = means[a]
        if m > best_m or (m == best_m and counts[a] < best_c):
            lead = a
            best_m = m
            best_c = counts[a]
    return lead


@dataclass(frozen=True)
class StepRecord:
    """One decision instant: who led, who was eligible, and the pick.

    counts/means snapshot the pre-pull statistics of the arms listed in
    candidates (aligned by position); mu_star is the best empirical mean
    over all arms at the same instant; indexes holds the per-candidate
    decision values of the policy that produced the record.
    """

    t: int
    chosen: int
    leader: int
    mu_star: float
    candidates: tuple
    indexes: tuple
    counts: tuple
    means: tuple


class _ArmStream:
    """Buffered i.i.d. draws for one arm; refills in blocks for speed."""

    __slots__ = ("_family", "_mu", "_rng", "_buf", "_i")

    def __init__(self, family, mu, rng):
        self._family = family
        self._mu = mu
        self._rng = rng
        self._buf = []
        self._i = 0

    def next(self):
        i = self._i
        if i >= len(self._buf):
            self._buf = self._family.sample_many(self._mu, self._rng, _BLOCK).tolist()
            i = 0
        self._i = i + 1
        return self._buf[i]


class BanditEnv:
    """Serves rewards for one run and tracks statistics and regret.

    Each arm owns one of the supplied random generators, so the reward
    sequence an arm produces depends only on its own stream, not on the
    policy's interleaving.
    """

    def __init__(self, config, rngs):
        if len(rngs) != config.arm_count:
            raise ParameterError(
                f"need {config.arm_count} generators, got {len(rngs)}"
            )
        self.config = config
        self.stats = PullStats(config.arm_count)
        self.reward_regret = 0.0
        self._streams = [
            _ArmStream(config.family, mu, rng) for mu, rng in zip(config.means, rngs)
        ]
        self._mu_star = config.optimal_mean
        self._gaps = config.gaps

    def pull(self, arm):
        """Draw one reward from arm, updating statistics and regret."""
        if not 0 <= arm < self.stats.arm_count:
            raise ParameterError(f"arm {arm} outside [0, {self.stats.arm_count})")
        x = self._streams[arm].next()
        self.stats.record(arm, x)
        self.reward_regret += self._mu_star - x
        return x

    def initialize(self):
        """Pull each arm once, in arm-index order."""
        if self.stats.t != 0:
            raise StateError("initialize() must run on a fresh environment")
        for a in range(self.stats.arm_count):
            self.pull(a)

    def pseudo_regret(self):
        """sum_a gap_a * N_a(t); evaluated from counts, so the pull-count
        identity holds exactly at every step."""
        gaps = self._gaps
        counts = self.stats.counts
        return sum(gaps[a] * counts[a] for a in range(len(gaps)))
