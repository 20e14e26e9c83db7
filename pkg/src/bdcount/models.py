"""Inflation-deflation count families and their equivalent mixture models.

Both families reweight a base PMF b(n, theta) at a finite set of support
points F = {n_0 < ... < n_m} by positive factors and renormalize:

    p(n) = f(n) * b(n) / z.

Type 1 perturbs each point individually, f(n) = alpha_i when n = n_i and 1
elsewhere, so z = 1 + sum_i (alpha_i - 1) b(n_i).  Type 2 applies each factor
to the whole lower tail, f(n) = prod over {i : n <= n_i} of phi_i, so f is a
step function constant on the blocks (n_{i-1}, n_i].  Factors above 1 inflate,
factors in (0, 1) deflate, and the modified birth-death ratios differ from the
base only at finitely many indices:

    lambda_n = f(n+1)/f(n) * lambda_n_base.

The same shapes arise from classical mixtures: a point-mass mixture
p(n) = omega_n + (1 - sum omega) b(n) on F (zero-inflation when F = {0}), the
hurdle model and the exponential-tilt zero-perturbation model.  The maps
between (alpha, theta) and (omega, theta) are bijective on the open
admissible region bounded by the mixing-mass line l1: 1 - sum omega = 0 and
the per-point lines l_{i+2}: omega_i + (1 - sum omega) b(n_i) = 0; these
names are used in the error messages.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError
from .stationary import (
    DEFAULT_POLICY,
    BaseDistribution,
    RatioSequence,
    SeriesPolicy,
    as_support,
    base_logpmf,
    base_pmf,
    base_ratio,
    base_ratio_sequence,
)

FAMILIES = ("type1", "type2")
MIXTURE_VARIANTS = ("zero_inflated", "multiple_inflation", "hurdle", "haslett")


def _check_points(points):
    pts = tuple(int(p) for p in points)
    if len(pts) == 0:
        raise DomainError("points must be non-empty")
    if any(p < 0 for p in pts) or any(p != q for p, q in zip(pts, points)):
        raise DomainError(f"points must be non-negative integers, got {points}")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise DomainError(f"points must be strictly increasing, got {points}")
    return pts


@dataclass(frozen=True)
class InflationSpec:
    """Perturbation of a base law: family, support points, positive factors."""

    family: str
    points: tuple
    factors: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}, got {self.family!r}")
        object.__setattr__(self, "points", _check_points(self.points))
        facs = tuple(float(a) for a in self.factors)
        if len(facs) != len(self.points):
            raise DomainError(
                f"factors and points must have equal length, got {len(facs)} and {len(self.points)}"
            )
        if any(not (math.isfinite(a) and a > 0.0) for a in facs):
            raise DomainError(f"factors must be positive finite reals, got {self.factors}")
        object.__setattr__(self, "factors", facs)


def log_weight_f(spec, n):
    """log f(n) for a perturbation spec; n may be a scalar or integer array."""
    ns = as_support(n)
    pts = np.asarray(spec.points)
    logfac = np.log(np.asarray(spec.factors))
    idx = np.searchsorted(pts, ns)
    if spec.family == "type1":
        safe = np.minimum(idx, len(pts) - 1)
        out = np.where((idx < len(pts)) & (pts[safe] == ns), logfac[safe], 0.0)
    else:
        ## suffix[i] = sum of log factors j >= i; f(n) multiplies every factor
        ## whose point is >= n.
        suffix = np.concatenate([np.cumsum(logfac[::-1])[::-1], [0.0]])
        out = suffix[idx]
    return float(out) if np.ndim(n) == 0 else out


def weight_f(spec, n):
    return np.exp(log_weight_f(spec, n))


def infdef_log_z(base, spec, policy=DEFAULT_POLICY):
    """log of z = sum_n f(n) b(n), via the closed finite corrections."""
    b_pts = base_pmf(base, np.asarray(spec.points), policy)
    if spec.family == "type1":
        z = 1.0 + float(np.sum((np.asarray(spec.factors) - 1.0) * b_pts))
    else:
        pts = spec.points
        suffix = np.concatenate([np.cumsum(np.log(spec.factors[::-1]))[::-1], [0.0]])
        z = 1.0
        lo = 0
        for i, p in enumerate(pts):
            block = np.arange(lo, p + 1)
            z += (math.exp(suffix[i]) - 1.0) * float(np.sum(base_pmf(base, block, policy)))
            lo = p + 1
    if not z > 0.0:
        raise ArithmeticError(f"perturbation normalizer must be positive, got {z}")
    return math.log(z)


@dataclass(frozen=True, eq=False)
class InfDefDistribution:
    """Inflated/deflated law p(n) = f(n) b(n) / z over a base distribution."""

    base: BaseDistribution
    spec: InflationSpec
    policy: SeriesPolicy = DEFAULT_POLICY

    @cached_property
    def log_z(self):
        return infdef_log_z(self.base, self.spec, self.policy)

    def logpmf(self, n):
        out = log_weight_f(self.spec, n) + base_logpmf(self.base, n, self.policy) - self.log_z
        return out

    def pmf(self, n):
        return np.exp(self.logpmf(n))

    def ratio_sequence(self):
        hint = base_ratio_sequence(self.base).limit_hint
        return RatioSequence(
            eval=lambda n: modified_ratio(self, n),
            limit_hint=hint,
            probe_start=max(self.spec.points) + 1,
        )


def modified_ratio(dist, n):
    """lambda_n of the perturbed law: g(n) * lambda_n of the base."""
    ns = as_support(n)
    log_g = log_weight_f(dist.spec, ns + 1) - log_weight_f(dist.spec, ns)
    out = np.exp(log_g) * base_ratio(dist.base, ns)
    return float(out) if np.ndim(n) == 0 else out


def infdef_pmf(base, spec, n, policy=DEFAULT_POLICY):
    """PMF of the perturbed law without keeping the distribution object."""
    return InfDefDistribution(base, spec, policy).pmf(n)


@dataclass(frozen=True)
class MixtureModel:
    """Classical mixture/perturbation forms sharing base shapes.

    variant selects the parameterization: "zero_inflated" (omega at 0,
    possibly negative inside the deflation region), "multiple_inflation"
    (one omega per point in points), "hurdle" (pi = total mass at 0), or
    "haslett" (exponential tilt exp(psi) of the zero cell).
    """

    base: BaseDistribution
    variant: str
    points: tuple = (0,)
    omegas: tuple = ()
    pi: float | None = None
    psi: float | None = None

    def __post_init__(self):
        if self.variant not in MIXTURE_VARIANTS:
            raise DomainError(f"variant must be one of {MIXTURE_VARIANTS}, got {self.variant!r}")
        object.__setattr__(self, "points", _check_points(self.points))
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if self.variant in ("zero_inflated", "multiple_inflation"):
            if self.variant == "zero_inflated" and self.points != (0,):
                raise DomainError("zero_inflated perturbs the zero cell only; points must be (0,)")
            if len(self.omegas) != len(self.points):
                raise DomainError(
                    f"omegas and points must have equal length, got {len(self.omegas)} and {len(self.points)}"
                )
            if any(not math.isfinite(w) for w in self.omegas):
                raise DomainError(f"omegas must be finite reals, got {self.omegas}")
            if not 1.0 - sum(self.omegas) > 0.0:
                raise DomainError(
                    f"boundary l1 violated: 1 - sum(omegas) must be positive, got {1.0 - sum(self.omegas)}"
                )
        elif self.variant == "hurdle":
            if self.pi is None or not (0.0 < self.pi < 1.0):
                raise DomainError(f"hurdle requires 0 < pi < 1, got {self.pi}")
            if self.points != (0,):
                raise DomainError("hurdle perturbs the zero cell only; points must be (0,)")
        else:  # haslett
            if self.psi is None or not math.isfinite(self.psi):
                raise DomainError(f"haslett requires a finite psi, got {self.psi}")
            if self.points != (0,):
                raise DomainError("haslett perturbs the zero cell only; points must be (0,)")


def _check_pointwise_mass(points, omegas, b_pts):
    rest = 1.0 - sum(omegas)
    for i, (w, b) in enumerate(zip(omegas, b_pts)):
        if not w + rest * b > 0.0:
            raise DomainError(
                f"boundary l{i + 2} violated: omega + (1 - sum(omegas)) * b(n_i) must be "
                f"positive at point {points[i]}, got {w + rest * b}"
            )


def mixture_logpmf(mix, n, policy=DEFAULT_POLICY):
    """log PMF of a mixture model; n may be a scalar or integer array."""
    ns = as_support(n)
    log_b = base_logpmf(mix.base, ns, policy)
    pts = np.asarray(mix.points)
    if mix.variant in ("zero_inflated", "multiple_inflation"):
        b_pts = base_pmf(mix.base, pts, policy)
        _check_pointwise_mass(mix.points, mix.omegas, b_pts)
        rest = 1.0 - sum(mix.omegas)
        idx = np.searchsorted(pts, ns)
        safe = np.minimum(idx, len(pts) - 1)
        hit = (idx < len(pts)) & (pts[safe] == ns)
        omega_at = np.where(hit, np.asarray(mix.omegas)[safe], 0.0)
        out = np.where(
            hit,
            np.log(np.maximum(omega_at + rest * np.exp(log_b), 1e-300)),
            math.log(rest) + log_b,
        )
    elif mix.variant == "hurdle":
        log_b0 = base_logpmf(mix.base, 0, policy)
        out = np.where(
            ns == 0,
            math.log(mix.pi),
            math.log1p(-mix.pi) + log_b - math.log1p(-math.exp(log_b0)),
        )
    else:  # haslett
        b0 = base_pmf(mix.base, 0, policy)
        log_norm = math.log1p(math.expm1(mix.psi) * b0)
        out = np.where(ns == 0, mix.psi + log_b, log_b) - log_norm
    return float(out) if np.ndim(n) == 0 else out


def mixture_pmf(mix, n, policy=DEFAULT_POLICY):
    return np.exp(mixture_logpmf(mix, n, policy))


def omega_from_alpha(base, spec, policy=DEFAULT_POLICY):
    """Point masses omega of the mixture equal to a type 1 perturbation."""
    if spec.family != "type1":
        raise DomainError(f"the mixture map is defined for type1 specs, got {spec.family!r}")
    b_pts = base_pmf(base, np.asarray(spec.points), policy)
    z = math.exp(infdef_log_z(base, spec, policy))
    return tuple((a - 1.0) * b / z for a, b in zip(spec.factors, b_pts))


def alpha_from_omega(base, points, omegas, policy=DEFAULT_POLICY):
    """Type 1 factors alpha of the perturbation equal to a point-mass mixture."""
    pts = _check_points(points)
    omegas = tuple(float(w) for w in omegas)
    if len(omegas) != len(pts):
        raise DomainError(f"omegas and points must have equal length, got {len(omegas)} and {len(pts)}")
    rest = 1.0 - sum(omegas)
    if not rest > 0.0:
        raise DomainError(f"boundary l1 violated: 1 - sum(omegas) must be positive, got {rest}")
    b_pts = base_pmf(base, np.asarray(pts), policy)
    _check_pointwise_mass(pts, omegas, b_pts)
    return tuple((w + rest * b) / (rest * b) for w, b in zip(omegas, b_pts))


def psi_link(base, points, omegas, policy=DEFAULT_POLICY):
    """Log-scale factors psi_i = log(alpha_i) of the equivalent perturbation."""
    return tuple(math.log(a) for a in alpha_from_omega(base, points, omegas, policy))


def omega_from_psi(base, points, psi, policy=DEFAULT_POLICY):
    """Inverse of psi_link: point masses omega from log-scale factors."""
    pts = _check_points(points)
    psi = tuple(float(s) for s in psi)
    if len(psi) != len(pts):
        raise DomainError(f"psi and points must have equal length, got {len(psi)} and {len(pts)}")
    if any(not math.isfinite(s) for s in psi):
        raise DomainError(f"psi must be finite reals, got {psi}")
    spec = InflationSpec(family="type1", points=pts, factors=tuple(math.exp(s) for s in psi))
    return omega_from_alpha(base, spec, policy)


def model_logpmf(model, n, policy=DEFAULT_POLICY):
    """log PMF dispatcher over base, perturbed, and mixture models."""
    if isinstance(model, BaseDistribution):
        return base_logpmf(model, n, policy)
    if isinstance(model, InfDefDistribution):
        return model.logpmf(n)
    if isinstance(model, MixtureModel):
        return mixture_logpmf(model, n, policy)
    if hasattr(model, "logpmf"):
        return model.logpmf(n)
    raise DomainError(f"cannot evaluate log pmf of {type(model).__name__}")


def model_pmf(model, n, policy=DEFAULT_POLICY):
    return np.exp(model_logpmf(model, n, policy))


def model_ratio(model, n):
    """Birth-death ratio dispatcher over base and perturbed models."""
    if isinstance(model, BaseDistribution):
        return base_ratio(model, n)
    if isinstance(model, InfDefDistribution):
        return modified_ratio(model, n)
    raise DomainError(f"cannot evaluate ratios of {type(model).__name__}")


def model_ratio_sequence(model):
    if isinstance(model, BaseDistribution):
        return base_ratio_sequence(model)
    if isinstance(model, InfDefDistribution):
        return model.ratio_sequence()
    raise DomainError(f"cannot build a ratio sequence for {type(model).__name__}")


## JSON document field names are fixed by the command-line interface.

_BASE_PARAM_KEYS = {"lambda": "lam", "r": "r", "tau": "tau", "nu": "nu"}


def base_from_document(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise DomainError("base document must be an object with a 'kind' field")
    extra = set(doc) - {"kind"} - set(_BASE_PARAM_KEYS)
    if extra:
        raise DomainError(f"unknown base parameter fields {sorted(extra)}")
    kwargs = {attr: doc[key] for key, attr in _BASE_PARAM_KEYS.items() if key in doc}
    if "lam" not in kwargs:
        raise DomainError("base document must carry a 'lambda' field")
    return BaseDistribution(kind=doc["kind"], **kwargs)


def base_to_document(base):
    doc = {"kind": base.kind, "lambda": base.lam}
    for key, attr in _BASE_PARAM_KEYS.items():
        val = getattr(base, attr)
        if key != "lambda" and val is not None:
            doc[key] = val
    return doc


def model_from_document(doc, policy=DEFAULT_POLICY):
    """Build a model from {"family", "base", ...} with exact field names.

    family "base" takes just the base object; "type1"/"type2" add "points"
    and "factors"; "mixture" adds "variant" plus the variant's parameters
    ("points"/"omegas", "pi", or "psi").
    """
    if not isinstance(doc, dict):
        raise DomainError("model document must be a JSON object")
    family = doc.get("family")
    known = {"family", "base", "points", "factors", "variant", "omegas", "pi", "psi"}
    extra = set(doc) - known
    if extra:
        raise DomainError(f"unknown model fields {sorted(extra)}")
    base = base_from_document(doc.get("base"))
    if family == "base":
        return base
    if family in FAMILIES:
        if "points" not in doc or "factors" not in doc:
            raise DomainError(f"family {family!r} requires 'points' and 'factors'")
        spec = InflationSpec(family=family, points=doc["points"], factors=doc["factors"])
        return InfDefDistribution(base, spec, policy)
    if family == "mixture":
        variant = doc.get("variant")
        if variant in ("zero_inflated", "multiple_inflation"):
            return MixtureModel(
                base=base,
                variant=variant,
                points=tuple(doc.get("points", (0,))),
                omegas=tuple(doc.get("omegas", ())),
            )
        if variant == "hurdle":
            return MixtureModel(base=base, variant="hurdle", pi=doc.get("pi"))
        if variant == "haslett":
            return MixtureModel(base=base, variant="haslett", psi=doc.get("psi"))
        raise DomainError(f"unknown mixture variant {variant!r}")
    raise DomainError(f"unknown family {family!r}; expected 'base', 'type1', 'type2', or 'mixture'")


def model_to_document(model):
    if isinstance(model, BaseDistribution):
        return {"family": "base", "base": base_to_document(model)}
    if isinstance(model, InfDefDistribution):
        return {
            "family": model.spec.family,
            "base": base_to_document(model.base),
            "points": list(model.spec.points),
            "factors": list(model.spec.factors),
        }
    if isinstance(model, MixtureModel):
        doc = {"family": "mixture", "variant": model.variant, "base": base_to_document(model.base)}
        if model.variant in ("zero_inflated", "multiple_inflation"):
            doc["points"] = list(model.points)
            doc["omegas"] = list(model.omegas)
        elif model.variant == "hurdle":
            doc["pi"] = model.pi
        else:
            doc["psi"] = model.psi
        return doc
    raise DomainError(f"cannot serialize {type(model).__name__}")
