"""Maximum-likelihood fitting of the canonical count families.

For an exponential-family model the average log-likelihood is
T_bar . eta - A(eta) + const, so the score is T_bar - grad A(eta) and the
observed information per observation is hess A(eta).  fit_mle runs a damped
Newton ascent on eta (with log reparameterization of the coordinates bounded
above by 0), which is globally concave.  Shape parameters held inside the
carrier h (r of the negative binomial, tau of the hyper-Poisson) are not
canonical coordinates; profile_fit maximizes over them on a grid refined by
golden-section search.
"""

import math
import warnings
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .expfamily import canonicalize, grad_A, hess_A
from .models import (
    InfDefDistribution,
    InflationSpec,
    MixtureModel,
    model_logpmf,
    omega_from_alpha,
)
from .stationary import DEFAULT_POLICY, BaseDistribution, base_pmf

_GRAD_TOL = 1e-8
_MAX_ITER = 500
_ARMIJO = 1e-4
_SE_COND_LIMIT = 1e10


@dataclass(frozen=True)
class CountSample:
    """Observed counts as a frequency table over distinct values."""

    values: tuple
    freqs: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if any(v != w for v, w in zip(vals, self.values)) or any(v < 0 for v in vals):
            raise DomainError("sample values must be non-negative integers")
        if len(set(vals)) != len(vals):
            raise DomainError("sample values must be distinct; aggregate the frequencies")
        freqs = tuple(float(f) for f in self.freqs)
        if len(freqs) != len(vals):
            raise DomainError("values and freqs must have equal length")
        if any(not (math.isfinite(f) and f >= 0.0) for f in freqs):
            raise DomainError("frequencies must be non-negative finite reals")
        if not sum(freqs) > 0.0:
            raise DomainError("total frequency must be positive")
        order = np.argsort(vals)
        object.__setattr__(self, "values", tuple(vals[i] for i in order))
        object.__setattr__(self, "freqs", tuple(freqs[i] for i in order))

    @property
    def size(self):
        return sum(self.freqs)

    @property
    def mean(self):
        return sum(v * f for v, f in zip(self.values, self.freqs)) / self.size

    @classmethod
    def from_counts(cls, counts):
        table = Counter(int(c) for c in counts)
        vals = sorted(table)
        return cls(values=tuple(vals), freqs=tuple(float(table[v]) for v in vals))

    @classmethod
    def from_frequencies(cls, pairs):
        pairs = dict(pairs)
        vals = sorted(pairs)
        return cls(values=tuple(vals), freqs=tuple(float(pairs[v]) for v in vals))


def loglik(model, sample, policy=DEFAULT_POLICY):
    """Total log-likelihood sum_j freq_j log p(v_j); -inf when support is missed."""
    lp = np.atleast_1d(model_logpmf(model, np.asarray(sample.values), policy))
    freqs = np.asarray(sample.freqs)
    hit = freqs > 0.0
    if np.any(np.isneginf(lp[hit])):
        dead = [v for v, bad in zip(sample.values, np.isneginf(lp) & hit) if bad]
        warnings.warn(f"model assigns zero probability to observed values {dead}; log-likelihood is -inf")
        return -math.inf
    return float(freqs @ lp)


@dataclass
class FitResult:
    model: object
    eta_hat: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    standard_errors: np.ndarray | None
    se_unstable: bool
    aic: float
    bic: float
    nuisance: tuple | None = None


def _start_base(kind, mean, r=None, tau=None, nu=None):
    """Mean-matched starting parameters for each base kind."""
    mean = max(mean, 1e-3)
    if kind == "geometric":
        return BaseDistribution(kind=kind, lam=mean / (1.0 + mean))
    if kind == "poisson":
        return BaseDistribution(kind=kind, lam=mean)
    if kind == "negative_binomial":
        return BaseDistribution(kind=kind, lam=r * mean / (r + mean), r=r)
    if kind == "hyper_poisson":
        return BaseDistribution(kind=kind, lam=mean, tau=tau)
    return BaseDistribution(kind=kind, lam=mean, nu=nu)


def _start_factors(template, base0, sample, policy):
    """Factor starts from the empirical masses at the perturbed points.

    Empirical cell probabilities get a 0.5/size floor so that unobserved
    points still produce a usable (deflating) start.
    """
    spec = template.spec
    pts = np.asarray(spec.points)
    n_tot = sample.size
    freq_map = dict(zip(sample.values, sample.freqs))
    p_hat = np.array([max(freq_map.get(int(p), 0.0), 0.5) / n_tot for p in pts])
    b_pts = base_pmf(base0, pts, policy)
    mass_hat = min(float(p_hat.sum()), 0.9)
    mass_base = min(float(b_pts.sum()), 0.9)
    alpha = (p_hat / (1.0 - mass_hat)) / (b_pts / (1.0 - mass_base))
    alpha = np.clip(alpha, 1e-6, 1e6)
    if spec.family == "type1":
        return tuple(alpha)
    ## Convert point targets f(n_i) = alpha_i into step factors.
    phi = []
    for i in range(len(pts)):
        target = alpha[i] if i + 1 == len(pts) else alpha[i] / alpha[i + 1]
        phi.append(float(np.clip(target, 1e-6, 1e6)))
    return tuple(phi)


def _initial_model(template, sample, policy):
    if isinstance(template, BaseDistribution):
        return _start_base(template.kind, sample.mean, r=template.r, tau=template.tau, nu=template.nu)
    base0 = _start_base(
        template.base.kind, sample.mean, r=template.base.r, tau=template.base.tau, nu=template.base.nu
    )
    factors = _start_factors(template, base0, sample, policy)
    return InfDefDistribution(base0, replace(template.spec, factors=factors), policy)


def _sample_stat_mean(cf, sample):
    t_mat = cf.T(np.asarray(sample.values))
    freqs = np.asarray(sample.freqs)
    return freqs @ t_mat / freqs.sum()


def fit_mle(template, sample, policy=DEFAULT_POLICY, max_iter=_MAX_ITER, grad_tol=_GRAD_TOL):
    """Newton MLE over the canonical coordinates of the template's family.

    template fixes the structure (kind, carrier shapes, perturbation points
    and family); its parameter values are ignored except as defaults.  A
    MixtureModel template with point masses is fitted through the equivalent
    type 1 parameterization and mapped back.
    """
    if len(sample.values) < 2:
        raise DomainError(
            "degenerate sample: every observation equals "
            f"{sample.values[0]}; the likelihood is maximized on the parameter-space boundary"
        )
    if isinstance(template, MixtureModel):
        if template.variant not in ("zero_inflated", "multiple_inflation"):
            raise DomainError(f"fitting is not defined for the {template.variant!r} variant")
        spec_template = InfDefDistribution(
            template.base,
            InflationSpec(family="type1", points=template.points, factors=(2.0,) * len(template.points)),
            policy,
        )
        inner = fit_mle(spec_template, sample, policy, max_iter, grad_tol)
        omegas = omega_from_alpha(inner.model.base, inner.model.spec, policy)
        mapped = MixtureModel(
            base=inner.model.base, variant=template.variant, points=template.points, omegas=omegas
        )
        return replace(inner, model=mapped)

    model0 = _initial_model(template, sample, policy)
    cf = canonicalize(model0, policy)
    t_bar = _sample_stat_mean(cf, sample)
    bounded = np.array([hi == 0.0 for (_, hi) in cf.space])

    def to_eta(x):
        return np.where(bounded, -np.exp(x), x)

    def to_x(eta):
        return np.where(bounded, np.log(-np.minimum(eta, -1e-300)), eta)

    def avg_loglik(x):
        eta = to_eta(x)
        try:
            return float(t_bar @ eta - cf.A(eta))
        except (DomainError, OverflowError):
            return -math.inf

    x = to_x(cf.eta)
    converged = False
    iterations = 0
    g_eta = t_bar - grad_A(cf, to_eta(x))
    for iterations in range(1, max_iter + 1):
        eta = to_eta(x)
        if float(np.max(np.abs(g_eta))) < grad_tol:
            converged = True
            iterations -= 1
            break
        h_eta = hess_A(cf, eta)
        jac = np.where(bounded, eta, 1.0)
        g_x = g_eta * jac
        ## Hessian of the avg log-likelihood in x (chain rule through eta = -e^x).
        h_x = -(jac[:, None] * h_eta * jac[None, :]) + np.diag(np.where(bounded, g_eta * eta, 0.0))
        try:
            direction = np.linalg.solve(h_x, -g_x)
        except np.linalg.LinAlgError:
            direction = g_x
        if float(direction @ g_x) <= 0.0:
            direction = g_x
        base_val = avg_loglik(x)
        slope = float(g_x @ direction)
        step = 1.0
        while step > 1e-14:
            if avg_loglik(x + step * direction) >= base_val + _ARMIJO * step * slope:
                break
            step *= 0.5
        else:
            break
        x = x + step * direction
        g_eta = t_bar - grad_A(cf, to_eta(x))
    else:
        iterations = max_iter
    if not converged and float(np.max(np.abs(g_eta))) < grad_tol:
        converged = True

    eta_hat = to_eta(x)
    fitted = cf.model_at(eta_hat)
    ll = loglik(fitted, sample, policy)
    n_tot = sample.size
    k = cf.dim
    info = n_tot * hess_A(cf, eta_hat)
    se = None
    se_unstable = True
    cond = np.linalg.cond(info)
    if np.isfinite(cond) and cond < _SE_COND_LIMIT:
        se = np.sqrt(np.diag(np.linalg.inv(info)))
        se_unstable = False
    return FitResult(
        model=fitted,
        eta_hat=eta_hat,
        loglik=ll,
        iterations=iterations,
        converged=converged,
        standard_errors=se,
        se_unstable=se_unstable,
        aic=2.0 * k - 2.0 * ll,
        bic=k * math.log(n_tot) - 2.0 * ll,
    )


def _with_nuisance(template, name, value):
    base = template if isinstance(template, BaseDistribution) else template.base
    fields = {name: value}
    ## keep the placeholder lam admissible when the grid drops r below it
    if name == "r" and base.lam >= value:
        fields["lam"] = value / 2.0
    if isinstance(template, BaseDistribution):
        return replace(template, **fields)
    return replace(template, base=replace(template.base, **fields))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def profile_fit(template, sample, grid, nuisance=None, policy=DEFAULT_POLICY, xtol=1e-4):
    """Maximize the likelihood over a carrier shape parameter (r or tau).

    Fits the canonical coordinates at every grid value of the nuisance, then
    refines around the best grid point by golden-section search to xtol.  A
    single-point grid reduces to fit_mle with the nuisance held fixed.
    """
    base = template if isinstance(template, BaseDistribution) else template.base
    if nuisance is None:
        nuisance = {"negative_binomial": "r", "hyper_poisson": "tau"}.get(base.kind)
    if nuisance not in ("r", "tau"):
        raise DomainError(f"nuisance must be 'r' or 'tau', got {nuisance!r}")
    grid = sorted(float(g) for g in grid)
    if not grid or any(not (math.isfinite(g) and g > 0.0) for g in grid):
        raise DomainError(f"grid must hold positive finite reals, got {grid}")

    cache = {}

    def fit_at(val):
        if val not in cache:
            cache[val] = fit_mle(_with_nuisance(template, nuisance, val), sample, policy)
        return cache[val]

    best_idx = int(np.argmax([fit_at(g).loglik for g in grid]))
    if len(grid) == 1:
        best_val = grid[0]
    else:
        lo = grid[max(best_idx - 1, 0)]
        hi = grid[min(best_idx + 1, len(grid) - 1)]
        a, b = lo, hi
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        while b - a > xtol:
            if fit_at(c).loglik >= fit_at(d).loglik:
                b, d = d, c
                c = b - _GOLDEN * (b - a)
            else:
                a, c = c, d
                d = a + _GOLDEN * (b - a)
        candidates = [grid[best_idx], (a + b) / 2.0]
        best_val = max(candidates, key=lambda v: fit_at(v).loglik)
    result = fit_at(best_val)
    k = len(result.eta_hat) + 1
    n_tot = sample.size
    return replace(
        result,
        nuisance=(nuisance, best_val),
        aic=2.0 * k - 2.0 * result.loglik,
        bic=k * math.log(n_tot) - 2.0 * result.loglik,
    )


def sample_counts(model, size, rng, policy=DEFAULT_POLICY, tail_tol=1e-12):
    """Draw iid counts from any model by inversion of the cumulative PMF."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    probs = []
    total = 0.0
    n = 0
    block = 256
    while total < 1.0 - tail_tol:
        p = np.exp(np.atleast_1d(model_logpmf(model, np.arange(n, n + block), policy)))
        probs.append(p)
        total += float(p.sum())
        n += block
        if n > policy.max_terms:
            break
    cdf = np.cumsum(np.concatenate(probs))
    u = rng.random(size) * min(cdf[-1], 1.0)
    return np.searchsorted(cdf, u, side="left")
