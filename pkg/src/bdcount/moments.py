"""Moments, dispersion analysis, and equidispersion geometry.

Closed mean/variance corrections for the perturbed families: with base mean
and variance E_b, V_b and normalizer z, a type 1 model satisfies

    E[N] = E_b + z^-1 sum_i (alpha_i - 1) b(n_i) (n_i - E_b)
    V[N] = V_b - (E[N] - E_b)^2
           + z^-1 sum_i (alpha_i - 1) b(n_i) ((n_i - E_b)^2 - V_b)

and a type 2 model the same with (alpha_i - 1) b(n_i) replaced by
(prod_{j>=i} phi_j - 1) sum over the block n_{i-1} < k <= n_i of b(k).

Direct summation provides the full MomentSummary (including skewness,
kurtosis, and the central-band kurtosis contribution restricted to
|n - mean| <= sd) and the fallback for the Poisson-Lindley base.

A Poisson base perturbed at the single point q with

    phi = 1 + (lam - q) / sum_{k<q} (q - k) lam^k e^-lam / k!

has mean and variance both equal to q, which yields dispersion surfaces over
(lam, phi) grids and equidispersion contours in lam.

Dispersion direction is read off the sequence a_n = (n+1) lambda_n: increasing
means overdispersed, decreasing underdispersed, constant equidispersed.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DivergenceError, DomainError, SeriesCapError
from .models import (
    InfDefDistribution,
    InflationSpec,
    model_logpmf,
    model_ratio,
)
from .stationary import DEFAULT_POLICY, BaseDistribution, base_logpmf, base_pmf


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    dispersion_index: float
    skewness: float
    kurtosis: float
    kurtosis_central_band: float


@dataclass(frozen=True)
class ClosedMoments:
    mean: float
    variance: float
    used_direct_fallback: bool = False


def _support_cutoff(logpmf_fn, policy, min_top=0):
    """Smallest block-aligned top with tail mass < rel_tol and top > mean + 12 sd."""
    block = 64
    mass = sn = sn2 = 0.0
    start = 0
    while start <= policy.max_terms:
        ns = np.arange(start, start + block)
        p = np.exp(logpmf_fn(ns))
        bmass = float(p.sum())
        mass += bmass
        sn += float(p @ ns)
        sn2 += float(p @ (ns.astype(float) ** 2))
        top = start + block
        mu = sn / mass if mass > 0.0 else 0.0
        sd = math.sqrt(max(sn2 / mass - mu * mu, 0.0)) if mass > 0.0 else 0.0
        if mass > 0.0 and bmass < policy.rel_tol * mass and top > mu + 12.0 * sd and top > min_top:
            return top
        start += block
    raise SeriesCapError(f"support scan did not settle within max_terms={policy.max_terms}")


def moments_direct(model, policy=DEFAULT_POLICY):
    """MomentSummary by direct summation over the (truncated) support."""
    logpmf_fn = lambda ns: model_logpmf(model, ns, policy)
    min_top = 0
    if isinstance(model, InfDefDistribution):
        min_top = max(model.spec.points) + 1
    top = _support_cutoff(logpmf_fn, policy, min_top)
    ns = np.arange(top, dtype=float)
    p = np.exp(logpmf_fn(np.arange(top)))
    mass = float(p.sum())
    p = p / mass
    mean = float(p @ ns)
    dev = ns - mean
    variance = float(p @ dev**2)
    sd = math.sqrt(variance)
    skewness = float(p @ dev**3) / sd**3
    kurtosis = float(p @ dev**4) / sd**4
    band = np.abs(dev) <= sd
    band_kurt = float(p[band] @ dev[band] ** 4) / sd**4
    return MomentSummary(
        mean=mean,
        variance=variance,
        dispersion_index=variance / mean,
        skewness=skewness,
        kurtosis=kurtosis,
        kurtosis_central_band=band_kurt,
    )


def _base_mean_var(base, policy):
    if base.kind == "geometric":
        lam = base.lam
        return lam / (1.0 - lam), lam / (1.0 - lam) ** 2
    if base.kind == "poisson":
        return base.lam, base.lam
    if base.kind == "negative_binomial":
        p = base.lam / base.r
        return base.r * p / (1.0 - p), base.r * p / (1.0 - p) ** 2
    ## Hyper-Poisson and CMP moments come from their normalizing series.
    top = _support_cutoff(lambda ns: base_logpmf(base, ns, policy), policy)
    ns = np.arange(top, dtype=float)
    p = base_pmf(base, np.arange(top), policy)
    mass = float(p.sum())
    mean = float(p @ ns) / mass
    var = float(p @ (ns - mean) ** 2) / mass
    return mean, var


def moments_closed(model, policy=DEFAULT_POLICY):
    """Mean and variance via the finite perturbation corrections.

    The Poisson-Lindley base carries no usable moment decomposition here and
    falls back to direct summation, reported through used_direct_fallback.
    """
    if isinstance(model, BaseDistribution):
        if model.kind == "poisson_lindley":
            summ = moments_direct(model, policy)
            return ClosedMoments(summ.mean, summ.variance, used_direct_fallback=True)
        mean, var = _base_mean_var(model, policy)
        return ClosedMoments(mean, var)
    if not isinstance(model, InfDefDistribution):
        raise DomainError(f"moments_closed expects a base or perturbed model, got {type(model).__name__}")
    if model.base.kind == "poisson_lindley":
        summ = moments_direct(model, policy)
        return ClosedMoments(summ.mean, summ.variance, used_direct_fallback=True)
    e_b, v_b = _base_mean_var(model.base, policy)
    z = math.exp(model.log_z)
    spec = model.spec
    if spec.family == "type1":
        b_pts = base_pmf(model.base, np.asarray(spec.points), policy)
        coef = (np.asarray(spec.factors) - 1.0) * b_pts
        devs = np.asarray(spec.points, dtype=float) - e_b
        s1 = float(coef @ devs)
        s2 = float(coef @ (devs**2 - v_b))
    else:
        suffix = np.concatenate([np.cumsum(np.log(spec.factors[::-1]))[::-1], [0.0]])
        s1 = s2 = 0.0
        lo = 0
        for i, pt in enumerate(spec.points):
            ks = np.arange(lo, pt + 1, dtype=float)
            bk = base_pmf(model.base, np.arange(lo, pt + 1), policy)
            c = math.exp(suffix[i]) - 1.0
            s1 += c * float(bk @ (ks - e_b))
            s2 += c * float(bk @ ((ks - e_b) ** 2 - v_b))
            lo = pt + 1
    mean = e_b + s1 / z
    var = v_b - (mean - e_b) ** 2 + s2 / z
    return ClosedMoments(mean, var)


def equidispersion_phi(lam, q):
    """Factor phi making a Poisson(lam) perturbed at the single point q equidispersed.

    The resulting law has mean and variance both equal to q.  The value is
    strictly positive (the denominator exceeds q - lam) but approaches 0 as
    lam does, so rounding can land on 0 for extreme inputs.
    """
    if int(q) != q or q < 1:
        raise DomainError(f"q must be a positive integer, got {q}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError(f"lam must be a positive finite real, got {lam}")
    q = int(q)
    ks = np.arange(q, dtype=float)
    ## denominator: sum_{k<q} (q - k) lam^k e^-lam / k!
    log_terms = ks * math.log(lam) - lam - gammaln(ks + 1.0)
    denom = float((q - ks) @ np.exp(log_terms))
    return 1.0 + (lam - q) / denom


def _shape_kwargs(kind, r, tau, nu):
    if kind == "negative_binomial":
        return {"r": r}
    if kind == "hyper_poisson":
        return {"tau": tau}
    if kind == "cmp":
        return {"nu": nu}
    return {}


def dispersion_index_at(kind, q, lam, phi, family="type2", r=None, tau=None, nu=None, policy=DEFAULT_POLICY):
    """Variance-to-mean ratio of a single-point perturbation at q."""
    base = BaseDistribution(kind=kind, lam=lam, **_shape_kwargs(kind, r, tau, nu))
    spec = InflationSpec(family=family, points=(int(q),), factors=(phi,))
    mom = moments_closed(InfDefDistribution(base, spec, policy), policy)
    return mom.variance / mom.mean


def dispersion_surface(kind, q, lambda_grid, phi_grid, family="type2", r=None, tau=None, nu=None, policy=DEFAULT_POLICY):
    """Dispersion index over a (lam, phi) grid; inadmissible nodes are NaN.

    Returns an array of shape (len(lambda_grid), len(phi_grid)).
    """
    lams = np.asarray(lambda_grid, dtype=float)
    phis = np.asarray(phi_grid, dtype=float)
    out = np.full((len(lams), len(phis)), np.nan)
    for i, lam in enumerate(lams):
        for j, phi in enumerate(phis):
            try:
                out[i, j] = dispersion_index_at(
                    kind, q, lam, phi, family=family, r=r, tau=tau, nu=nu, policy=policy
                )
            except (DomainError, DivergenceError, SeriesCapError, ArithmeticError):
                pass
    return out


@dataclass(frozen=True)
class ContourResult:
    roots: tuple
    degenerate: bool


def equidispersion_contour(
    kind,
    q,
    phi,
    lambda_lo,
    lambda_hi,
    family="type2",
    r=None,
    tau=None,
    nu=None,
    policy=DEFAULT_POLICY,
    subintervals=400,
    xtol=1e-6,
):
    """Roots in lam of dispersion_index(lam) = 1 at fixed phi.

    Scans subintervals for sign changes of index - 1, then bisects each
    bracket to xtol.  When the index is 1 everywhere on the scan (the phi = 1
    Poisson line), returns degenerate=True and no roots.
    """
    if not (0.0 < lambda_lo < lambda_hi):
        raise DomainError(f"need 0 < lambda_lo < lambda_hi, got ({lambda_lo}, {lambda_hi})")
    xs = np.linspace(lambda_lo, lambda_hi, subintervals + 1)

    def f(lam):
        try:
            return dispersion_index_at(
                kind, q, lam, phi, family=family, r=r, tau=tau, nu=nu, policy=policy
            ) - 1.0
        except (DomainError, DivergenceError, SeriesCapError, ArithmeticError):
            return math.nan

    vals = np.array([f(x) for x in xs])
    finite = vals[np.isfinite(vals)]
    if len(finite) > 0 and np.max(np.abs(finite)) < 1e-9:
        return ContourResult(roots=(), degenerate=True)
    roots = []
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            roots.append(float(a))
            continue
        if fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            while hi - lo > xtol:
                mid = (lo + hi) / 2.0
                fm = f(mid)
                if not np.isfinite(fm):
                    break
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append((lo + hi) / 2.0)
    if np.isfinite(vals[-1]) and vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    dedup = []
    for root in roots:
        if not dedup or abs(root - dedup[-1]) > 10.0 * xtol:
            dedup.append(root)
    return ContourResult(roots=tuple(dedup), degenerate=False)


@dataclass(frozen=True)
class SequenceClass:
    verdict: str
    dispersion: str | None


def classify_sequence(model, horizon=200, tol=1e-9):
    """Monotonicity of a_n = (n+1) lambda_n and the implied dispersion direction."""
    ns = np.arange(horizon + 1)
    a = (ns + 1.0) * model_ratio(model, ns)
    diffs = np.diff(a)
    scale = max(1.0, float(np.max(np.abs(a))))
    has_inc = bool(np.any(diffs > tol * scale))
    has_dec = bool(np.any(diffs < -tol * scale))
    if has_inc and has_dec:
        return SequenceClass(verdict="non_monotonic", dispersion=None)
    if has_inc:
        return SequenceClass(verdict="increasing", dispersion="overdispersed")
    if has_dec:
        return SequenceClass(verdict="decreasing", dispersion="underdispersed")
    return SequenceClass(verdict="constant", dispersion="equidispersed")
