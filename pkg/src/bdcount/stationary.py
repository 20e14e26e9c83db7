"""Stationary laws of birth-death processes on the non-negative integers.

A birth-death process with birth rates gamma_n and death rates mu_n is
summarised by the ratio sequence

    lambda_n = gamma_n / mu_{n+1},  n = 0, 1, 2, ...

A stationary distribution exists iff the series

    z = 1 + sum_{i >= 0} lambda_0 * lambda_1 * ... * lambda_i

is finite, in which case p_0 = 1/z and p_n = lambda_0 * ... * lambda_{n-1} * p_0.
Consequently lambda_n = p_{n+1}/p_n for every stationary law, and any positive
weighting w(n) of a base law b(n) is again stationary for the modified ratios
w(n+1)/w(n) * lambda_n.

This module provides the ratio sequences and closed-form PMFs of six base
families (geometric, Poisson, Poisson-Lindley, negative binomial,
hyper-Poisson, Conway-Maxwell-Poisson), the generic ratio-to-PMF construction,
a catalogue of relative weight functions between the families, and weighted
PMFs p(n) proportional to w(n) * b(n).

All series work is done in log space with a geometric tail bound controlled by
a SeriesPolicy.
"""

import functools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DivergenceError, DomainError, SeriesCapError

KINDS = (
    "geometric",
    "poisson",
    "poisson_lindley",
    "negative_binomial",
    "hyper_poisson",
    "cmp",
)

## Width of the sliding window used to flag a divergent ratio sequence.
_PROBE_WINDOW = 64


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation control for all infinite series in the package.

    rel_tol bounds the relative tail mass left unsummed; max_terms is a hard
    cap on the number of terms inspected before giving up.
    """

    rel_tol: float = 1e-10
    max_terms: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1000:
            raise DomainError(f"max_terms must be an integer >= 1000, got {self.max_terms}")


DEFAULT_POLICY = SeriesPolicy()


@dataclass(frozen=True, eq=False)
class RatioSequence:
    """Ratio sequence n -> lambda_n = gamma_n / mu_{n+1} of a birth-death process.

    eval maps a non-negative integer to a positive real.  limit_hint, when
    known, is the limit of the sequence and sharpens both the tail bound and
    divergence detection.  probe_start is the first index at which divergence
    probing and early stopping are allowed; sequences whose first few ratios
    are perturbed (inflated or deflated) should set it past the perturbation.
    """

    eval: callable
    limit_hint: float | None = None
    probe_start: int = 0

    def __post_init__(self):
        if self.limit_hint is not None and not math.isfinite(self.limit_hint):
            raise DomainError(f"limit_hint must be finite, got {self.limit_hint}")
        if self.probe_start < 0:
            raise DomainError(f"probe_start must be non-negative, got {self.probe_start}")


def _ratio_at(ratio, n):
    lam = float(ratio.eval(n))
    if not (lam > 0.0 and math.isfinite(lam)):
        raise DomainError(f"ratio at index {n} must be a positive finite real, got {lam}")
    return lam


def log_ratio_series_sum(ratio, policy=DEFAULT_POLICY):
    """log of z = 1 + sum_{i>=0} lambda_0*...*lambda_i for a ratio sequence.

    Stops once a geometric bound on the remaining tail drops below
    policy.rel_tol of the running sum.  Raises DivergenceError when the
    ratios stay at or above 1 over a whole probe window without decreasing
    (the series then cannot converge), and SeriesCapError when max_terms is
    exhausted while the ratios still look convergent.
    """
    if ratio.limit_hint is not None and ratio.limit_hint >= 1.0:
        raise DivergenceError(
            f"ratio sequence tends to {ratio.limit_hint} >= 1; the stationary series diverges"
        )
    log_tol = math.log(policy.rel_tol)
    log_sum = 0.0  # log of the partial sum, seeded with the leading 1
    log_term = 0.0  # log of lambda_0*...*lambda_{i-1}
    window = deque(maxlen=_PROBE_WINDOW)
    lam = 1.0
    for i in range(policy.max_terms):
        lam = _ratio_at(ratio, i)
        log_term += math.log(lam)
        log_sum = np.logaddexp(log_sum, log_term)
        if i < ratio.probe_start:
            continue
        window.append(lam)
        if len(window) == _PROBE_WINDOW and min(window) >= 1.0 and window[-1] >= window[0]:
            raise DivergenceError(
                f"ratios stayed >= 1 over {_PROBE_WINDOW} consecutive indices ending at {i}; "
                "the stationary series diverges"
            )
        rho = lam if ratio.limit_hint is None else max(lam, ratio.limit_hint)
        if rho < 1.0:
            ## Remaining tail <= current term * rho / (1 - rho).
            log_tail = log_term + math.log(rho) - math.log1p(-rho)
            if log_tail < log_tol + log_sum:
                return float(log_sum)
    if lam >= 1.0:
        raise DivergenceError(
            f"series still growing after {policy.max_terms} terms (last ratio {lam}); "
            "treating it as divergent"
        )
    raise SeriesCapError(
        f"series did not meet rel_tol={policy.rel_tol} within max_terms={policy.max_terms}"
    )


def as_support(n):
    """Validate and convert support points to an int64 array."""
    ns = np.asarray(n)
    if ns.dtype.kind == "f":
        if np.any(ns != np.floor(ns)):
            raise DomainError("pmf support is the non-negative integers")
        ns = ns.astype(np.int64)
    elif ns.dtype.kind not in "iu":
        raise DomainError("pmf support is the non-negative integers")
    if np.any(ns < 0):
        raise DomainError("pmf support is the non-negative integers")
    return ns


class StationaryPMF:
    """Stationary law built from a ratio sequence, evaluated lazily in log space."""

    def __init__(self, ratio, policy=DEFAULT_POLICY):
        self.ratio = ratio
        self.policy = policy
        self.log_z = log_ratio_series_sum(ratio, policy)
        self._log_prefix = [0.0]  # log lambda_0*...*lambda_{n-1}, indexed by n

    def _extend(self, n):
        pre = self._log_prefix
        while len(pre) <= n:
            pre.append(pre[-1] + math.log(_ratio_at(self.ratio, len(pre) - 1)))

    def logpmf(self, n):
        ns = as_support(n)
        self._extend(int(ns.max()))
        out = np.asarray(self._log_prefix)[ns] - self.log_z
        return float(out) if np.ndim(n) == 0 else out

    def pmf(self, n):
        return np.exp(self.logpmf(n))


def stationary_pmf_from_ratios(ratio, policy=DEFAULT_POLICY):
    """Construct the stationary PMF of a ratio sequence; errors if none exists."""
    return StationaryPMF(ratio, policy)


@dataclass(frozen=True)
class BaseDistribution:
    """One of the six base count families, identified by kind.

    lam is the rate/shape parameter shared by every family.  r (negative
    binomial), tau (hyper-Poisson) and nu (Conway-Maxwell-Poisson) are the
    extra shape parameters of their respective kinds and must be left None
    elsewhere.
    """

    kind: str
    lam: float
    r: float | None = None
    tau: float | None = None
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown base kind {self.kind!r}; expected one of {KINDS}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise DomainError(f"lam must be a positive finite real, got {self.lam}")
        needed = {"negative_binomial": "r", "hyper_poisson": "tau", "cmp": "nu"}.get(self.kind)
        for name in ("r", "tau", "nu"):
            val = getattr(self, name)
            if name == needed:
                if val is None or not (math.isfinite(val) and val > 0.0):
                    raise DomainError(f"{self.kind} requires {name} > 0, got {val}")
            elif val is not None:
                raise DomainError(f"{self.kind} does not take parameter {name}")
        if self.kind in ("geometric", "poisson_lindley") and not self.lam < 1.0:
            raise DomainError(f"{self.kind} requires lam < 1, got {self.lam}")
        if self.kind == "negative_binomial" and not self.lam < self.r:
            raise DomainError(f"negative_binomial requires lam/r < 1, got lam={self.lam}, r={self.r}")


def base_ratio(base, n):
    """lambda_n of a base family; n may be a scalar or integer array."""
    ns = np.asarray(n, dtype=float)
    lam = base.lam
    if base.kind == "geometric":
        out = np.full_like(ns, lam)
    elif base.kind == "poisson":
        out = lam / (ns + 1.0)
    elif base.kind == "poisson_lindley":
        out = (1.0 + (ns + 2.0) * lam) * lam / (1.0 + (ns + 1.0) * lam)
    elif base.kind == "negative_binomial":
        out = (ns / base.r + 1.0) * lam / (ns + 1.0)
    elif base.kind == "hyper_poisson":
        out = lam / (base.tau + ns)
    else:  # cmp
        out = lam / (ns + 1.0) ** base.nu
    return float(out) if np.ndim(n) == 0 else out


def base_ratio_sequence(base):
    """Base-family ratios packaged with their limit for series control."""
    hint = {
        "geometric": base.lam,
        "poisson": 0.0,
        "poisson_lindley": base.lam,
        "negative_binomial": base.lam / base.r if base.r else None,
        "hyper_poisson": 0.0,
        "cmp": 0.0,
    }[base.kind]
    return RatioSequence(eval=lambda n: base_ratio(base, n), limit_hint=hint)


@functools.lru_cache(maxsize=None)
def _log_base_norm(base, policy):
    """log of the normalizing series for families without a closed-form constant."""
    return log_ratio_series_sum(base_ratio_sequence(base), policy)


def base_logpmf(base, n, policy=DEFAULT_POLICY):
    """Closed-form log PMF of a base family; n may be a scalar or integer array."""
    ns = np.asarray(n, dtype=float)
    if np.any(ns < 0) or np.any(ns != np.floor(ns)):
        raise DomainError("pmf support is the non-negative integers")
    lam = base.lam
    log_lam = math.log(lam)
    if base.kind == "geometric":
        out = math.log1p(-lam) + ns * log_lam
    elif base.kind == "poisson":
        out = ns * log_lam - lam - gammaln(ns + 1.0)
    elif base.kind == "poisson_lindley":
        out = 2.0 * math.log1p(-lam) + np.log(1.0 + lam + ns * lam) + ns * log_lam
    elif base.kind == "negative_binomial":
        r = base.r
        out = (
            gammaln(r + ns)
            - gammaln(r)
            - gammaln(ns + 1.0)
            + ns * (log_lam - math.log(r))
            + r * math.log1p(-lam / r)
        )
    elif base.kind == "hyper_poisson":
        tau = base.tau
        out = ns * log_lam - (gammaln(tau + ns) - gammaln(tau)) - _log_base_norm(base, policy)
    else:  # cmp
        out = ns * log_lam - base.nu * gammaln(ns + 1.0) - _log_base_norm(base, policy)
    return float(out) if np.ndim(n) == 0 else out


def base_pmf(base, n, policy=DEFAULT_POLICY):
    return np.exp(base_logpmf(base, n, policy))


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A positive weight n -> w(n) applied multiplicatively to a base PMF.

    log_eval is the primary representation; eval is derived from it.  The
    induced ratio modifier is g(n) = w(n+1)/w(n).
    """

    name: str
    log_eval: callable
    params: dict = field(default_factory=dict)

    def eval(self, n):
        return np.exp(self.log_eval(n))

    def log_g(self, n):
        ns = np.asarray(n, dtype=float)
        return self.log_eval(ns + 1.0) - self.log_eval(ns)

    def g(self, n):
        return np.exp(self.log_g(n))


def _need(params, name, target):
    val = params.get(name)
    if val is None or not (math.isfinite(val) and val > 0.0):
        raise DomainError(f"weight {target!r} requires parameter {name} > 0")
    return float(val)


def catalogue_weight(name, against="poisson", **params):
    """Relative weight w with target(n) proportional to w(n) * reference(n).

    name picks the target family: one of KINDS plus "weighted_poisson",
    "squared_exponential" (a Gaussian-damped Poisson) and "damped_cmp" (the
    same damping on a CMP body).  against picks the reference family and must
    be "geometric" or "poisson".  Shape parameters of the target (lam, r,
    tau, nu) are passed as keyword arguments.
    """
    if against not in ("geometric", "poisson"):
        raise DomainError(f"against must be 'geometric' or 'poisson', got {against!r}")
    vs_poisson = against == "poisson"

    if name == "geometric":
        log_f = (lambda ns: gammaln(np.asarray(ns, dtype=float) + 1.0)) if vs_poisson else (
            lambda ns: np.zeros_like(np.asarray(ns, dtype=float))
        )
    elif name == "poisson":
        log_f = (lambda ns: np.zeros_like(np.asarray(ns, dtype=float))) if vs_poisson else (
            lambda ns: -gammaln(np.asarray(ns, dtype=float) + 1.0)
        )
    elif name == "poisson_lindley":
        lam = _need(params, "lam", name)

        def log_f(ns, lam=lam):
            ns = np.asarray(ns, dtype=float)
            body = np.log(1.0 + (ns + 1.0) * lam)
            return body + gammaln(ns + 1.0) if vs_poisson else body

    elif name == "negative_binomial":
        r = _need(params, "r", name)

        def log_f(ns, r=r):
            ns = np.asarray(ns, dtype=float)
            body = gammaln(r + ns) - gammaln(r) - ns * math.log(r)
            return body if vs_poisson else body - gammaln(ns + 1.0)

    elif name == "hyper_poisson":
        tau = _need(params, "tau", name)

        def log_f(ns, tau=tau):
            ns = np.asarray(ns, dtype=float)
            body = -(gammaln(tau + ns) - gammaln(tau))
            return body + gammaln(ns + 1.0) if vs_poisson else body

    elif name == "cmp":
        nu = _need(params, "nu", name)

        def log_f(ns, nu=nu):
            ns = np.asarray(ns, dtype=float)
            return (1.0 - nu) * gammaln(ns + 1.0) if vs_poisson else -nu * gammaln(ns + 1.0)

    elif name == "weighted_poisson":
        ## Poisson body tilted by (n + tau)^r.
        r = _need(params, "r", name)
        tau = _need(params, "tau", name)

        def log_f(ns, r=r, tau=tau):
            ns = np.asarray(ns, dtype=float)
            body = r * np.log(ns + tau)
            return body if vs_poisson else body - gammaln(ns + 1.0)

    elif name == "squared_exponential":
        ## Poisson body damped by exp(-n^2 tau).
        tau = _need(params, "tau", name)

        def log_f(ns, tau=tau):
            ns = np.asarray(ns, dtype=float)
            body = -(ns * ns) * tau
            return body if vs_poisson else body - gammaln(ns + 1.0)

    elif name == "damped_cmp":
        ## CMP body damped by exp(-n^2 tau).
        tau = _need(params, "tau", name)
        nu = _need(params, "nu", name)

        def log_f(ns, tau=tau, nu=nu):
            ns = np.asarray(ns, dtype=float)
            body = -(ns * ns) * tau
            return body - (nu - 1.0) * gammaln(ns + 1.0) if vs_poisson else body - nu * gammaln(ns + 1.0)

    else:
        raise DomainError(f"unknown weight name {name!r}")

    return WeightFunction(name=f"{name}/{against}", log_eval=log_f, params=dict(params))


class WeightedPMF:
    """Law p(n) proportional to w(n) * b(n), normalized by series summation."""

    def __init__(self, base, weight, policy=DEFAULT_POLICY):
        self.base = base
        self.weight = weight
        self.policy = policy

        def term_ratio(n, base=base, weight=weight):
            return math.exp(weight.log_g(n)) * base_ratio(base, n)

        ## z / (w(0) b(0)) summed as a ratio series, then shifted back.
        log_first = float(weight.log_eval(0)) + base_logpmf(base, 0, policy)
        ratio = RatioSequence(eval=term_ratio, limit_hint=None)
        self.log_norm = log_first + log_ratio_series_sum(ratio, policy)

    def logpmf(self, n):
        ns = np.asarray(n, dtype=float)
        if np.any(ns < 0) or np.any(ns != np.floor(ns)):
            raise DomainError("pmf support is the non-negative integers")
        out = self.weight.log_eval(ns) + base_logpmf(self.base, ns, self.policy) - self.log_norm
        return float(out) if np.ndim(n) == 0 else out

    def pmf(self, n):
        return np.exp(self.logpmf(n))


def weighted_pmf(base, weight, policy=DEFAULT_POLICY):
    """Normalize w(n) * b(n) into a PMF; errors if the weighted series diverges."""
    return WeightedPMF(base, weight, policy)
