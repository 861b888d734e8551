"""Decision rules: IMED-UB and the IMED, OSUB, UTS baselines.

All policies read shared PullStats and return the arm to pull next.
select() is the fast path; decide() returns a full StepRecord (leader,
eligible set, per-candidate values) for tracing and invariant checking.
Exactly one of the two should be called per time step, since OSUB keeps
leader-round counters that advance on every call.
"""

import math
from dataclasses import dataclass

from .env import StepRecord, leader
from .errors import ParameterError, StateError


def transport_kl(family, mu_hat, target):
    """Divergence cost of lifting mu_hat up to target; zero at or above it."""
    if mu_hat >= target:
        return 0.0
    return family.kl(mu_hat, target)


def imed_index(stats, family, arm):
    """pulls * KL(empirical mean -> best empirical mean) + log(pulls).

    The divergence term vanishes for empirically best arms, leaving the
    pure exploration part log(pulls).
    """
    if not 0 <= arm < stats.arm_count:
        raise ParameterError(f"arm {arm} outside [0, {stats.arm_count})")
    n = stats.counts[arm]
    if n < 1:
        raise StateError(f"arm {arm} has not been pulled yet")
    mu_star = max(stats.means)
    return n * transport_kl(family, stats.means[arm], mu_star) + math.log(n)


def _index_argmin(stats, family, cands, mu_star):
    """Minimum-index arm among cands (lowest index on ties) plus all values."""
    counts = stats.counts
    means = stats.means
    kl = family.kl
    log = math.log
    best = cands[0]
    best_val = math.inf
    vals = []
    for a in cands:
        n = counts[a]
        x = means[a]
        v = log(n)
        if x < mu_star:
            v += n * kl(x, mu_star)
        vals.append(v)
        if v < best_val:
            best_val = v
            best = a
    return best, vals


def _argmax_lowest(stats):
    """Arm of maximal empirical mean, lowest index on ties."""
    means = stats.means
    lead = 0
    best = means[0]
    for a in range(1, stats.arm_count):
        if means[a] > best:
            best = means[a]
            lead = a
    return lead


class Policy:
    """One decision rule on top of shared pull statistics."""

    name = ""

    def select(self, stats):
        raise NotImplementedError

    def decide(self, stats):
        raise NotImplementedError


class ImedUB(Policy):
    """Minimum-index rule restricted to the leader and its graph neighbors.

    The leader is an empirically best arm with the fewest pulls (lowest
    index on remaining ties); each step pulls the index-minimizing arm
    among the leader and its neighborhood.
    """

    name = "imed-ub"

    def __init__(self, family, graph):
        self.family = family
        self.graph = graph
        self._cands = tuple(graph.candidates(a) for a in range(graph.arm_count))

    def select(self, stats):
        stats.require_initialized()
        lead = leader(stats)
        arm, _ = _index_argmin(stats, self.family, self._cands[lead], stats.means[lead])
        return arm

    def decide(self, stats):
        stats.require_initialized()
        lead = leader(stats)
        cands = self._cands[lead]
        mu_star = stats.means[lead]
        arm, vals = _index_argmin(stats, self.family, cands, mu_star)
        return StepRecord(
            t=stats.t,
            chosen=arm,
            leader=lead,
            mu_star=mu_star,
            candidates=cands,
            indexes=tuple(vals),
            counts=tuple(stats.counts[a] for a in cands),
            means=tuple(stats.means[a] for a in cands),
        )


class Imed(Policy):
    """Unstructured minimum-index rule over all arms."""

    name = "imed"

    def __init__(self, family, arm_count):
        self.family = family
        self._cands = tuple(range(arm_count))

    def select(self, stats):
        stats.require_initialized()
        mu_star = max(stats.means)
        arm, _ = _index_argmin(stats, self.family, self._cands, mu_star)
        return arm

    def decide(self, stats):
        stats.require_initialized()
        # leader recorded the same way as the structured rule computes it,
        # so checkers can evaluate neighborhood membership on these traces
        lead = leader(stats)
        mu_star = stats.means[lead]
        arm, vals = _index_argmin(stats, self.family, self._cands, mu_star)
        return StepRecord(
            t=stats.t,
            chosen=arm,
            leader=lead,
            mu_star=mu_star,
            candidates=self._cands,
            indexes=tuple(vals),
            counts=tuple(stats.counts),
            means=tuple(stats.means),
        )


class Osub(Policy):
    """KL upper confidence bounds over the leader's neighborhood with a
    leader-round exploitation schedule.

    The leader is the arm of maximal empirical mean (lowest index on ties)
    and l counts the rounds it has led so far. Every (gamma+1)-th leader
    round the leader itself is pulled; otherwise the eligible arm with the
    largest KL upper inverse at budget (log l + c*loglog max(l, e))/pulls
    is pulled, largest value winning and ties going to the lowest index.
    """

    name = "osub"

    def __init__(self, family, graph, gamma=None, c=0.0):
        if gamma is None:
            gamma = graph.max_degree()
        if int(gamma) != gamma or gamma < 0:
            raise ParameterError(f"gamma must be a nonnegative integer, got {gamma!r}")
        if not math.isfinite(c):
            raise ParameterError(f"c must be finite, got {c!r}")
        self.family = family
        self.graph = graph
        self.gamma = int(gamma)
        self.c = float(c)
        self._cands = tuple(graph.candidates(a) for a in range(graph.arm_count))
        self.leader_rounds = [0] * graph.arm_count

    def _bonus(self, rounds):
        b = math.log(rounds)
        if self.c != 0.0:
            b += self.c * math.log(math.log(max(rounds, math.e)))
        return b

    def _decide_full(self, stats):
        stats.require_initialized()
        lead = _argmax_lowest(stats)
        self.leader_rounds[lead] += 1
        rounds = self.leader_rounds[lead]
        cands = self._cands[lead]
        if (rounds - 1) % (self.gamma + 1) == 0:
            return lead, lead, cands, None
        bonus = self._bonus(rounds)
        inverse = self.family.kl_upper_inverse
        counts = stats.counts
        means = stats.means
        best = cands[0]
        best_val = -math.inf
        vals = []
        for a in cands:
            v = inverse(means[a], bonus / counts[a])
            vals.append(v)
            if v > best_val:
                best_val = v
                best = a
        return best, lead, cands, vals

    def select(self, stats):
        return self._decide_full(stats)[0]

    def decide(self, stats):
        arm, lead, cands, vals = self._decide_full(stats)
        return StepRecord(
            t=stats.t,
            chosen=arm,
            leader=lead,
            mu_star=max(stats.means),
            candidates=cands,
            indexes=() if vals is None else tuple(vals),
            counts=tuple(stats.counts[a] for a in cands),
            means=tuple(stats.means[a] for a in cands),
        )


class Uts(Policy):
    """Thompson sampling over the leader's neighborhood.

    Half the time the leader (arm of maximal empirical mean, lowest index
    on ties) is replayed; otherwise one conjugate posterior draw per
    eligible arm decides, largest sample winning.
    """

    name = "uts"

    def __init__(self, family, graph, rng):
        if rng is None:
            raise ParameterError("uts requires a random generator")
        self.family = family
        self.graph = graph
        self.rng = rng
        self._cands = tuple(graph.candidates(a) for a in range(graph.arm_count))

    def _decide_full(self, stats):
        stats.require_initialized()
        lead = _argmax_lowest(stats)
        cands = self._cands[lead]
        if self.rng.random() < 0.5:
            return lead, lead, cands, None
        draw = self.family.posterior_mean_sample
        counts = stats.counts
        sums = stats.sums
        rng = self.rng
        best = cands[0]
        best_val = -math.inf
        vals = []
        for a in cands:
            v = draw(counts[a], sums[a], rng)
            vals.append(v)
            if v > best_val:
                best_val = v
                best = a
        return best, lead, cands, vals

    def select(self, stats):
        return self._decide_full(stats)[0]

    def decide(self, stats):
        arm, lead, cands, vals = self._decide_full(stats)
        return StepRecord(
            t=stats.t,
            chosen=arm,
            leader=lead,
            mu_star=max(stats.means),
            candidates=cands,
            indexes=() if vals is None else tuple(vals),
            counts=tuple(stats.counts[a] for a in cands),
            means=tuple(stats.means[a] for a in cands),
        )


@dataclass(frozen=True)
class PolicySpec:
    """Config-level policy selection with hyperparameters."""

    name: str
    gamma: int | None = None
    c: float = 0.0
    label: str = ""

    def display(self):
        return self.label or self.name


def needs_rng(spec):
    return spec.name.lower() == "uts"


def make_policy(spec, family, graph, rng=None):
    """Instantiate the policy a PolicySpec names."""
    key = spec.name.lower()
    if key == "imed-ub":
        return ImedUB(family, graph)
    if key == "imed":
        return Imed(family, graph.arm_count)
    if key == "osub":
        return Osub(family, graph, gamma=spec.gamma, c=spec.c)
    if key == "uts":
        return Uts(family, graph, rng)
    raise ParameterError(f"unknown policy {spec.name!r}")
