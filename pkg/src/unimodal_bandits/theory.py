"""Instance-dependent constants: the asymptotic lower-bound constant, the
minimum half-gap between distinct means, and the divergence distortion
factor used in pull-count upper bounds."""

import math
from dataclasses import dataclass, field

from .errors import ParameterError


@dataclass(frozen=True)
class TheoryReport:
    """Computable constants of one bandit instance.

    c_nu sums gap/KL over the strictly suboptimal neighbors of the optimal
    arm only; arms further away do not contribute.
    """

    c_nu: float
    epsilon_nu: float
    optimal_arm: int
    optimal_mean: float
    neighbors: tuple
    gaps: tuple
    neighbor_kl: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "c_nu": self.c_nu,
            "epsilon_nu": self.epsilon_nu,
            "optimal_arm": self.optimal_arm,
            "optimal_mean": self.optimal_mean,
            "neighbors": list(self.neighbors),
            "gaps": list(self.gaps),
            "neighbor_kl": {str(a): v for a, v in sorted(self.neighbor_kl.items())},
        }


def lower_bound_constant(cfg):
    """Evaluate sum over the optimal arm's suboptimal neighbors of
    gap / KL(neighbor mean, optimal mean), with the rest of the report."""
    a_star = cfg.optimal_arm
    mu_star = cfg.optimal_mean
    neigh = cfg.graph.neighbors(a_star)
    kl = {}
    c = 0.0
    for a in neigh:
        gap = cfg.gaps[a]
        if gap <= 0.0:
            continue
        div = cfg.family.kl(cfg.means[a], mu_star)
        kl[a] = div
        c += gap / div
    return TheoryReport(
        c_nu=c,
        epsilon_nu=epsilon_nu(cfg),
        optimal_arm=a_star,
        optimal_mean=mu_star,
        neighbors=neigh,
        gaps=cfg.gaps,
        neighbor_kl=kl,
    )


def epsilon_nu(cfg):
    """Half the minimum pairwise absolute difference of the true means.

    Zero when two arms share a mean; callers that need it positive should
    treat that configuration as degenerate.
    """
    means = cfg.means
    n = len(means)
    best = float("inf")
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(means[i] - means[j])
            if d < best:
                best = d
    return best / 2.0 if n > 1 else 0.0


def alpha_nu(cfg, eps):
    """Smallest distortion alpha such that, for every suboptimal arm,
    KL(mean+eps, best-eps) >= KL(mean, best) / (1 + alpha).

    Computed as the tight maximum ratio minus one; tends to 0 with eps.
    """
    e_nu = epsilon_nu(cfg)
    if not (0.0 < eps < e_nu):
        raise ParameterError(
            f"eps must satisfy 0 < eps < epsilon_nu = {e_nu!r}, got {eps!r}"
        )
    family = cfg.family
    mu_star = cfg.optimal_mean
    family.require_mean(mu_star - eps)
    worst = 0.0
    for a in range(cfg.arm_count):
        if a == cfg.optimal_arm:
            continue
        mu = cfg.means[a]
        family.require_mean(mu + eps)
        ratio = family.kl(mu, mu_star) / family.kl(mu + eps, mu_star - eps)
        if ratio - 1.0 > worst:
            worst = ratio - 1.0
    return worst


def pull_count_leading_term(cfg, eps, horizon):
    """Computable leading term of the pull-count upper bound for each
    strictly suboptimal neighbor of the optimal arm at the given horizon:
    (1 + alpha(eps)) * log(horizon) / KL(neighbor mean, optimal mean).

    The bound's residual terms involve constants with no closed form, so
    only this dominant part is evaluated.
    """
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon!r}")
    alpha = alpha_nu(cfg, eps)
    out = {}
    for a in cfg.graph.neighbors(cfg.optimal_arm):
        if cfg.gaps[a] > 0.0:
            out[a] = (
                (1.0 + alpha)
                * math.log(horizon)
                / cfg.family.kl(cfg.means[a], cfg.optimal_mean)
            )
    return out
