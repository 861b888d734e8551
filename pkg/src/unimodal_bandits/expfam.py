"""One-dimensional exponential-family reward models identified by their mean.

Three families are supported: Bernoulli, Gaussian with a known shared
variance, and Exponential. Each provides exact Kullback-Leibler divergence
between two members (parameterized by mean), reward sampling, a variance
envelope over a mean interval, and the KL upper inverse used by
confidence-bound style baselines.

True means live in an open domain; empirical means can hit its boundary
(a Bernoulli arm that has only produced zeros, say), so divergence and the
derived helpers accept the closed domain by continuous extension.
"""

import math

import numpy as np

from .errors import ParameterError

BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200


class Family:
    """Base reward family. Subclasses fix the law and its mean domain."""

    name = ""
    mean_lo = -math.inf
    mean_hi = math.inf

    def require_mean(self, mu):
        """Raise ParameterError unless mu lies in the open mean domain."""
        if not (self.mean_lo < mu < self.mean_hi):
            raise ParameterError(
                f"{self.name} mean {mu!r} outside open domain "
                f"({self.mean_lo}, {self.mean_hi})"
            )

    def require_mean_closure(self, mu):
        """Like require_mean but admits the domain boundary (empirical means)."""
        if not (self.mean_lo <= mu <= self.mean_hi) or math.isinf(mu):
            raise ParameterError(
                f"{self.name} mean {mu!r} outside closed domain "
                f"[{self.mean_lo}, {self.mean_hi}]"
            )

    def kl(self, mu, mu_prime):
        """KL divergence from the member with mean mu to the one with mu_prime.

        Zero iff the means are equal; nondecreasing in mu_prime above mu.
        Boundary means are handled by continuous extension and may give inf.
        """
        raise NotImplementedError

    def sample(self, mu, rng):
        """One reward draw from the member with mean mu."""
        raise NotImplementedError

    def sample_many(self, mu, rng, size):
        """Vectorized draws; same law as sample()."""
        raise NotImplementedError

    def variance(self, mu):
        """Variance of the member with mean mu."""
        raise NotImplementedError

    def variance_sup(self, lo, hi):
        """Supremum of the member variance as the mean ranges over [lo, hi]."""
        raise NotImplementedError

    def posterior_mean_sample(self, count, total, rng):
        """One posterior draw of the mean given count pulls summing to total.

        Uses the family's standard conjugate recipe with an uninformative
        prior; consumed by the Thompson-sampling baseline.
        """
        raise NotImplementedError

    def _check_interval(self, lo, hi):
        self.require_mean_closure(lo)
        self.require_mean_closure(hi)
        if lo > hi:
            raise ParameterError(f"empty mean interval [{lo}, {hi}]")

    def kl_upper_inverse(self, mu_hat, budget):
        """Largest mean mu' >= mu_hat with kl(mu_hat, mu') <= budget.

        Bisection to absolute tolerance 1e-10 on mu'; a finite upper domain
        boundary caps the result, otherwise the bracket is grown by doubling
        first. budget == 0 returns mu_hat exactly.
        """
        if math.isnan(budget) or budget < 0.0:
            raise ParameterError(f"budget must be >= 0, got {budget!r}")
        self.require_mean_closure(mu_hat)
        if budget == 0.0 or mu_hat >= self.mean_hi:
            return mu_hat
        kl = self.kl
        lo = mu_hat
        if math.isfinite(self.mean_hi):
            hi = self.mean_hi
            if kl(mu_hat, hi) <= budget:
                return hi
        else:
            step = 1.0 + abs(mu_hat)
            hi = mu_hat + step
            for _ in range(BISECT_MAX_ITER):
                if kl(mu_hat, hi) > budget:
                    break
                lo = hi
                step *= 2.0
                hi = mu_hat + step
            else:
                return hi
        for _ in range(BISECT_MAX_ITER):
            if hi - lo <= BISECT_TOL:
                break
            mid = 0.5 * (lo + hi)
            if kl(mu_hat, mid) <= budget:
                lo = mid
            else:
                hi = mid
        return lo

    def __repr__(self):
        return f"{type(self).__name__}()"


class Bernoulli(Family):
    """Rewards on {0, 1}; the mean is the success probability."""

    name = "bernoulli"
    mean_lo = 0.0
    mean_hi = 1.0

    def kl(self, mu, mu_prime):
        if not (0.0 <= mu <= 1.0 and 0.0 <= mu_prime <= 1.0):
            raise ParameterError(f"bernoulli means must lie in [0, 1]: {mu!r}, {mu_prime!r}")
        if mu == mu_prime:
            return 0.0
        if mu_prime <= 0.0 or mu_prime >= 1.0:
            return math.inf
        # log1p keeps the complement term accurate when the means nearly
        # cancel; true divergences below float resolution clamp to 0
        div = 0.0
        if mu > 0.0:
            div += mu * math.log(mu / mu_prime)
        if mu < 1.0:
            div += (1.0 - mu) * math.log1p((mu_prime - mu) / (1.0 - mu_prime))
        return div if div > 0.0 else 0.0

    def sample(self, mu, rng):
        self.require_mean(mu)
        return 1.0 if rng.random() < mu else 0.0

    def sample_many(self, mu, rng, size):
        self.require_mean(mu)
        return (rng.random(size) < mu).astype(np.float64)

    def variance(self, mu):
        self.require_mean_closure(mu)
        return mu * (1.0 - mu)

    def variance_sup(self, lo, hi):
        self._check_interval(lo, hi)
        if lo <= 0.5 <= hi:
            return 0.25
        # variance is unimodal in the mean with peak at 1/2
        return max(lo * (1.0 - lo), hi * (1.0 - hi))

    def posterior_mean_sample(self, count, total, rng):
        return rng.beta(1.0 + total, 1.0 + count - total)

    def kl_upper_inverse(self, mu_hat, budget):
        # same bisection as the base class with the divergence inlined;
        # this sits on the hot path of confidence-bound baselines
        if math.isnan(budget) or budget < 0.0:
            raise ParameterError(f"budget must be >= 0, got {budget!r}")
        if not 0.0 <= mu_hat <= 1.0:
            raise ParameterError(f"bernoulli mean {mu_hat!r} outside [0, 1]")
        if budget == 0.0 or mu_hat >= 1.0:
            return mu_hat
        if budget == math.inf:
            return 1.0
        log = math.log
        log1p = math.log1p
        x = mu_hat
        cx = 1.0 - x
        lo = x
        hi = 1.0
        for _ in range(BISECT_MAX_ITER):
            if hi - lo <= BISECT_TOL:
                break
            mid = 0.5 * (lo + hi)
            div = cx * log1p((mid - x) / (1.0 - mid))
            if x > 0.0:
                div += x * log(x / mid)
            if div <= budget:
                lo = mid
            else:
                hi = mid
        return lo


class Gaussian(Family):
    """Normal rewards with a known variance shared by all members."""

    name = "gaussian"

    def __init__(self, variance=1.0):
        if not (variance > 0.0 and math.isfinite(variance)):
            raise ParameterError(f"gaussian variance must be positive, got {variance!r}")
        self.sigma2 = float(variance)
        self.sigma = math.sqrt(self.sigma2)

    def kl(self, mu, mu_prime):
        if not (math.isfinite(mu) and math.isfinite(mu_prime)):
            raise ParameterError(f"gaussian means must be finite: {mu!r}, {mu_prime!r}")
        d = mu_prime - mu
        return d * d / (2.0 * self.sigma2)

    def sample(self, mu, rng):
        self.require_mean(mu)
        return rng.normal(mu, self.sigma)

    def sample_many(self, mu, rng, size):
        self.require_mean(mu)
        return rng.normal(mu, self.sigma, size)

    def variance(self, mu):
        self.require_mean_closure(mu)
        return self.sigma2

    def variance_sup(self, lo, hi):
        self._check_interval(lo, hi)
        return self.sigma2

    def posterior_mean_sample(self, count, total, rng):
        return rng.normal(total / count, math.sqrt(self.sigma2 / count))

    def __repr__(self):
        return f"Gaussian(variance={self.sigma2!r})"


class Exponential(Family):
    """Exponential rewards on (0, inf); the mean is the scale."""

    name = "exponential"
    mean_lo = 0.0
    mean_hi = math.inf

    def kl(self, mu, mu_prime):
        if not (0.0 <= mu and 0.0 <= mu_prime) or math.isinf(mu) or math.isinf(mu_prime):
            raise ParameterError(f"exponential means must lie in [0, inf): {mu!r}, {mu_prime!r}")
        if mu == mu_prime:
            return 0.0
        if mu <= 0.0 or mu_prime <= 0.0:
            return math.inf
        # log(mu'/mu) + mu/mu' - 1 arranged so nearby means do not cancel
        d = mu_prime - mu
        div = math.log1p(d / mu) - d / mu_prime
        return div if div > 0.0 else 0.0

    def sample(self, mu, rng):
        self.require_mean(mu)
        return rng.exponential(mu)

    def sample_many(self, mu, rng, size):
        self.require_mean(mu)
        return rng.exponential(mu, size)

    def variance(self, mu):
        self.require_mean_closure(mu)
        return mu * mu

    def variance_sup(self, lo, hi):
        self._check_interval(lo, hi)
        return hi * hi

    def posterior_mean_sample(self, count, total, rng):
        # conjugate Gamma posterior on the rate; invert one rate draw
        return 1.0 / rng.gamma(1.0 + count, 1.0 / (1.0 + total))


def make_family(kind, variance=None):
    """Build a family from its config name; variance applies to gaussian only."""
    key = str(kind).strip().lower()
    if key == "bernoulli":
        if variance is not None:
            raise ParameterError("variance is only configurable for the gaussian family")
        return Bernoulli()
    if key == "gaussian":
        return Gaussian(1.0 if variance is None else variance)
    if key == "exponential":
        if variance is not None:
            raise ParameterError("variance is only configurable for the gaussian family")
        return Exponential()
    raise ParameterError(f"unknown family kind {kind!r}")
