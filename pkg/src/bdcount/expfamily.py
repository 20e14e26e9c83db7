"""Canonical exponential-family form of the stationary count families.

Every family here can be written as

    q(n, eta) = h(n) * exp(T(n) . eta - A(eta)),

with carrier h, sufficient statistic T, natural parameter eta in an open box
E, and log-partition A.  The base families contribute one coordinate
(log lam; log(lam/r) for the negative binomial) plus a second coordinate
(-nu) for the Conway-Maxwell-Poisson.  Perturbing a base at points
F = {n_0, ..., n_m} appends one coordinate per point: log alpha_i with
indicator statistics 1{n = n_i} for type 1, log phi_i with lower-tail
statistics 1{n <= n_i} for type 2.  The Poisson-Lindley family admits no such
form (its log PMF has a log(1 + lam + n lam) term that is not linear in any
finite statistic) and is rejected.

A is evaluated from eta alone, so the same CanonicalForm can be re-evaluated
along an optimizer path.  The gradient and Hessian of A are the mean and
covariance of T(N) and are computed by truncated series summation.

For any of these laws the stationary construction gives the identity

    A(eta) - log h(0) - T(0) . eta = log(1 + sum_{i>=0} lambda_0*...*lambda_i),

which ties the log-partition to the birth-death normalizer and is exposed as
a residual for testing.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, SeriesCapError, UnsupportedFamilyError
from .models import InfDefDistribution, InflationSpec, infdef_log_z
from .stationary import (
    DEFAULT_POLICY,
    BaseDistribution,
    _log_base_norm,
    as_support,
    log_ratio_series_sum,
)

## Coordinates with an upper bound at 0 (open), per base kind.
_BASE_SPACE = {
    "geometric": ((-math.inf, 0.0),),
    "poisson": ((-math.inf, math.inf),),
    "negative_binomial": ((-math.inf, 0.0),),
    "hyper_poisson": ((-math.inf, math.inf),),
    "cmp": ((-math.inf, math.inf), (-math.inf, 0.0)),
}


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Exponential-family representation q(n, eta) = h(n) exp(T(n).eta - A(eta)).

    kind/r/tau fix the carrier; points/family describe an optional
    perturbation block appended to the statistic.  eta holds the canonical
    coordinates of the model the form was built from; every method accepts an
    alternative eta inside space.
    """

    kind: str
    eta: np.ndarray
    space: tuple
    policy: object
    r: float | None = None
    tau: float | None = None
    points: tuple = ()
    family: str | None = None

    @property
    def dim(self):
        return len(self.space)

    def _check_eta(self, eta):
        eta = self.eta if eta is None else np.asarray(eta, dtype=float)
        if eta.shape != (self.dim,):
            raise DomainError(f"eta must have shape ({self.dim},), got {eta.shape}")
        for j, (lo, hi) in enumerate(self.space):
            if not (lo < eta[j] < hi):
                raise DomainError(f"eta[{j}]={eta[j]} outside the open interval ({lo}, {hi})")
        return eta

    def log_h(self, n):
        ns = as_support(n).astype(float)
        if self.kind in ("geometric", "cmp"):
            out = np.zeros_like(ns)
        elif self.kind == "poisson":
            out = -gammaln(ns + 1.0)
        elif self.kind == "negative_binomial":
            out = gammaln(self.r + ns) - gammaln(self.r) - gammaln(ns + 1.0)
        else:  # hyper_poisson
            out = -(gammaln(self.tau + ns) - gammaln(self.tau))
        return float(out) if np.ndim(n) == 0 else out

    def h(self, n):
        return np.exp(self.log_h(n))

    def T(self, n):
        """Sufficient statistic; shape (d,) for scalar n, (len(n), d) for arrays."""
        ns = as_support(n).astype(float)
        flat = np.atleast_1d(ns)
        cols = [flat]
        if self.kind == "cmp":
            cols.append(gammaln(flat + 1.0))
        for p in self.points:
            if self.family == "type1":
                cols.append((flat == p).astype(float))
            else:
                cols.append((flat <= p).astype(float))
        out = np.stack(cols, axis=-1)
        return out[0] if np.ndim(n) == 0 else out

    def _base_at(self, eta):
        if self.kind == "geometric":
            return BaseDistribution(kind="geometric", lam=math.exp(eta[0]))
        if self.kind == "poisson":
            return BaseDistribution(kind="poisson", lam=math.exp(eta[0]))
        if self.kind == "negative_binomial":
            return BaseDistribution(kind="negative_binomial", lam=self.r * math.exp(eta[0]), r=self.r)
        if self.kind == "hyper_poisson":
            return BaseDistribution(kind="hyper_poisson", lam=math.exp(eta[0]), tau=self.tau)
        return BaseDistribution(kind="cmp", lam=math.exp(eta[0]), nu=-eta[1])

    def model_at(self, eta=None):
        """Rebuild the distribution object whose canonical coordinates are eta."""
        eta = self._check_eta(eta)
        base = self._base_at(eta)
        if not self.points:
            return base
        k = len(_BASE_SPACE[self.kind])
        spec = InflationSpec(
            family=self.family,
            points=self.points,
            factors=tuple(np.exp(eta[k:])),
        )
        return InfDefDistribution(base, spec, self.policy)

    def A(self, eta=None):
        """Log-partition A(eta), finite on all of space."""
        eta = self._check_eta(eta)
        if self.kind == "geometric":
            out = -math.log1p(-math.exp(eta[0]))
        elif self.kind == "poisson":
            out = math.exp(eta[0])
        elif self.kind == "negative_binomial":
            out = -self.r * math.log1p(-math.exp(eta[0]))
        else:
            out = _log_base_norm(self._base_at(eta), self.policy)
        if self.points:
            k = len(_BASE_SPACE[self.kind])
            spec = InflationSpec(
                family=self.family, points=self.points, factors=tuple(np.exp(eta[k:]))
            )
            out += infdef_log_z(self._base_at(eta), spec, self.policy)
        return out

    def logpmf(self, n, eta=None):
        eta = self._check_eta(eta)
        out = self.log_h(n) + self.T(n) @ eta - self.A(eta)
        return float(out) if np.ndim(n) == 0 else out


def canonicalize(model, policy=None):
    """Canonical form of a base or perturbed model; Poisson-Lindley is rejected."""
    if isinstance(model, BaseDistribution):
        base, points, family, pol = model, (), None, policy or DEFAULT_POLICY
        factors = ()
    elif isinstance(model, InfDefDistribution):
        base, points, family = model.base, model.spec.points, model.spec.family
        factors = model.spec.factors
        pol = policy or model.policy
    else:
        raise DomainError(f"cannot canonicalize {type(model).__name__}")
    if base.kind == "poisson_lindley":
        raise UnsupportedFamilyError(
            "the Poisson-Lindley family admits no canonical exponential-family form"
        )
    if base.kind == "negative_binomial":
        eta_base = [math.log(base.lam / base.r)]
    else:
        eta_base = [math.log(base.lam)]
    if base.kind == "cmp":
        eta_base.append(-base.nu)
    eta = np.array(eta_base + [math.log(a) for a in factors])
    space = _BASE_SPACE[base.kind] + ((-math.inf, math.inf),) * len(points)
    return CanonicalForm(
        kind=base.kind,
        eta=eta,
        space=space,
        policy=pol,
        r=base.r,
        tau=base.tau,
        points=points,
        family=family,
    )


def _moment_block_sums(cf, eta):
    """Accumulate sum q, sum q*T, sum q*T T' over the support by blocks."""
    eta = cf._check_eta(eta)
    a_val = cf.A(eta)
    d = cf.dim
    policy = cf.policy
    block = 128
    mass = 0.0
    s1 = np.zeros(d)
    s2 = np.zeros((d, d))
    sn = 0.0
    sn2 = 0.0
    start = 0
    min_top = (max(cf.points) + 1) if cf.points else 0
    while start <= policy.max_terms:
        ns = np.arange(start, start + block)
        t_mat = cf.T(ns)
        logq = cf.log_h(ns) + t_mat @ eta - a_val
        q = np.exp(logq)
        bmass = float(q.sum())
        mass += bmass
        s1 += q @ t_mat
        s2 += t_mat.T @ (t_mat * q[:, None])
        sn += float(q @ ns)
        sn2 += float(q @ (ns.astype(float) ** 2))
        mu = sn / mass
        sd = math.sqrt(max(sn2 / mass - mu * mu, 0.0))
        top = start + block
        if bmass < policy.rel_tol * mass and top > mu + 12.0 * sd and top > min_top:
            return mass, s1, s2
        start += block
    raise SeriesCapError(
        f"moment series did not settle within max_terms={policy.max_terms}"
    )


def grad_A(cf, eta=None):
    """Gradient of A at eta: the mean of T(N)."""
    mass, s1, _ = _moment_block_sums(cf, eta)
    return s1 / mass


def hess_A(cf, eta=None):
    """Hessian of A at eta: the covariance of T(N); symmetric PSD."""
    mass, s1, s2 = _moment_block_sums(cf, eta)
    mean = s1 / mass
    hess = s2 / mass - np.outer(mean, mean)
    return (hess + hess.T) / 2.0


def cumulant_identity_residual(cf, ratio, policy=None):
    """A(eta) - log h(0) - T(0).eta minus the log stationary normalizer.

    ratio must be the birth-death ratio sequence of the same model; the
    residual is zero (to series tolerance) for every family here.
    """
    policy = policy or cf.policy
    lhs = cf.A() - cf.log_h(0) - float(cf.T(0) @ cf.eta)
    rhs = log_ratio_series_sum(ratio, policy)
    return lhs - rhs
