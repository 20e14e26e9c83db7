"""Inflation-deflation laws, mixture equivalences, and JSON documents."""

import math

import numpy as np
import pytest

from bdcount import (
    BaseDistribution,
    DomainError,
    InfDefDistribution,
    InflationSpec,
    MixtureModel,
    alpha_from_omega,
    base_pmf,
    infdef_pmf,
    mixture_pmf,
    model_from_document,
    model_pmf,
    model_to_document,
    modified_ratio,
    omega_from_alpha,
    omega_from_psi,
    psi_link,
    weight_f,
)
from conftest import random_admissible_omegas, random_base, random_spec

POISSON = BaseDistribution(kind="poisson", lam=2.6)


def test_weight_patterns():
    s2 = InflationSpec(family="type2", points=(0, 2), factors=(1.3, 1.5))
    assert np.allclose(weight_f(s2, np.arange(5)), [1.95, 1.5, 1.5, 1.0, 1.0], rtol=1e-12)
    s1 = InflationSpec(family="type1", points=(2,), factors=(2.0,))
    assert np.allclose(weight_f(s1, np.arange(5)), [1.0, 1.0, 2.0, 1.0, 1.0], rtol=1e-12)


def test_spec_validation():
    with pytest.raises(DomainError):
        InflationSpec(family="type3", points=(0,), factors=(1.5,))
    with pytest.raises(DomainError):
        InflationSpec(family="type1", points=(2, 1), factors=(1.5, 1.5))
    with pytest.raises(DomainError):
        InflationSpec(family="type1", points=(0, 0), factors=(1.5, 1.5))
    with pytest.raises(DomainError):
        InflationSpec(family="type1", points=(0,), factors=(0.0,))
    with pytest.raises(DomainError):
        InflationSpec(family="type1", points=(-1,), factors=(1.5,))
    with pytest.raises(DomainError):
        InflationSpec(family="type1", points=(0, 2), factors=(1.5,))


@pytest.mark.parametrize("family", ["type1", "type2"])
def test_pmf_matches_brute_force(rng, family):
    ## Oracle: normalize f(n) b(n) by direct summation over a long support.
    for _ in range(20):
        base = random_base(rng, kinds=("geometric", "poisson", "negative_binomial"))
        spec = random_spec(rng, family=family)
        dist = InfDefDistribution(base, spec)
        ns = np.arange(600)
        raw = weight_f(spec, ns) * base_pmf(base, ns)
        expected = raw / raw.sum()
        assert np.max(np.abs(dist.pmf(ns[:100]) - expected[:100])) < 1e-12


@pytest.mark.parametrize("family", ["type1", "type2"])
def test_modified_ratio_is_pmf_ratio(rng, family):
    for _ in range(10):
        base = random_base(rng)
        spec = random_spec(rng, family=family)
        dist = InfDefDistribution(base, spec)
        ns = np.arange(30)
        p = dist.pmf(np.arange(31))
        assert np.max(np.abs(modified_ratio(dist, ns) - p[1:] / p[:-1])) < 1e-10


def test_ratio_localization():
    ## type 1 at F={2} touches lambda_1 and lambda_2; type 2 only lambda_2.
    base = POISSON
    d1 = InfDefDistribution(base, InflationSpec(family="type1", points=(2,), factors=(3.0,)))
    d2 = InfDefDistribution(base, InflationSpec(family="type2", points=(2,), factors=(3.0,)))
    ns = np.arange(10)
    from bdcount import base_ratio

    r_base = base_ratio(base, ns)
    r1 = modified_ratio(d1, ns)
    r2 = modified_ratio(d2, ns)
    assert np.allclose(r1[[0, 3, 4, 5]], r_base[[0, 3, 4, 5]], rtol=1e-14)
    assert np.isclose(r1[1], 3.0 * r_base[1]) and np.isclose(r1[2], r_base[2] / 3.0)
    assert np.allclose(r2[[0, 1, 3, 4, 5]], r_base[[0, 1, 3, 4, 5]], rtol=1e-14)
    assert np.isclose(r2[2], r_base[2] / 3.0)


def test_type1_type2_same_law_on_full_prefix():
    ## Matching f on F = {0,...,q} makes the two families coincide.
    phis = (1.3, 0.7, 2.1)
    spec2 = InflationSpec(family="type2", points=(0, 1, 2), factors=phis)
    f_vals = weight_f(spec2, np.arange(3))
    spec1 = InflationSpec(family="type1", points=(0, 1, 2), factors=tuple(f_vals))
    ns = np.arange(50)
    assert np.max(np.abs(infdef_pmf(POISSON, spec1, ns) - infdef_pmf(POISSON, spec2, ns))) < 1e-14


@pytest.mark.parametrize("psi", [0.7, -1.1])
def test_zero_cell_tilt_coincidence(psi):
    base = BaseDistribution(kind="poisson", lam=1.7)
    t1 = InfDefDistribution(base, InflationSpec(family="type1", points=(0,), factors=(math.exp(psi),)))
    t2 = InfDefDistribution(base, InflationSpec(family="type2", points=(0,), factors=(math.exp(psi),)))
    hs = MixtureModel(base=base, variant="haslett", psi=psi)
    ns = np.arange(60)
    assert np.max(np.abs(t1.pmf(ns) - t2.pmf(ns))) < 1e-14
    assert np.max(np.abs(t1.pmf(ns) - mixture_pmf(hs, ns))) < 1e-14


def test_hurdle_pmf():
    mix = MixtureModel(base=POISSON, variant="hurdle", pi=0.35)
    p = mixture_pmf(mix, np.arange(40))
    b = base_pmf(POISSON, np.arange(40))
    assert np.isclose(p[0], 0.35)
    assert np.allclose(p[1:], 0.65 * b[1:] / (1.0 - b[0]), rtol=1e-12)
    assert abs(p.sum() - 1.0) < 1e-10


def test_zero_inflated_pmf_and_deflation():
    b0 = base_pmf(POISSON, 0)
    for omega in (0.25, -0.05):
        mix = MixtureModel(base=POISSON, variant="zero_inflated", points=(0,), omegas=(omega,))
        p = mixture_pmf(mix, np.arange(50))
        assert np.isclose(p[0], omega + (1.0 - omega) * b0)
        assert abs(p.sum() - 1.0) < 1e-10


def test_multiple_inflation_mass():
    mix = MixtureModel(
        base=POISSON, variant="multiple_inflation", points=(0, 3), omegas=(0.1, 0.2)
    )
    p = mixture_pmf(mix, np.arange(60))
    assert abs(p.sum() - 1.0) < 1e-10
    b = base_pmf(POISSON, np.arange(60))
    assert np.isclose(p[3], 0.2 + 0.7 * b[3])
    assert np.allclose(p[1:3], 0.7 * b[1:3])


def test_zero_cell_map_frozen_value():
    ## Poisson(2), alpha_0 = 2: omega_0 = e^-2 / (1 + e^-2).
    base = BaseDistribution(kind="poisson", lam=2.0)
    spec = InflationSpec(family="type1", points=(0,), factors=(2.0,))
    om = omega_from_alpha(base, spec)
    assert abs(om[0] - 0.11920292202211755) < 1e-15


def test_map_roundtrips_random(rng):
    for _ in range(40):
        base = random_base(rng, kinds=("geometric", "poisson", "negative_binomial", "hyper_poisson"))
        points = tuple(sorted(rng.choice(6, size=rng.integers(1, 4), replace=False).tolist()))
        omegas = random_admissible_omegas(rng, base, points)
        alphas = alpha_from_omega(base, points, omegas)
        spec = InflationSpec(family="type1", points=points, factors=alphas)
        back = omega_from_alpha(base, spec)
        assert np.max(np.abs(np.asarray(back) - np.asarray(omegas))) < 1e-12
        ## the mixture and the perturbation are the same law
        mix = MixtureModel(base=base, variant="multiple_inflation", points=points, omegas=omegas)
        ns = np.arange(80)
        assert np.max(np.abs(mixture_pmf(mix, ns) - infdef_pmf(base, spec, ns))) < 1e-12


def test_psi_link_roundtrip(rng):
    base = BaseDistribution(kind="poisson", lam=3.0)
    points = (0, 2)
    omegas = (0.15, -0.02)
    psi = psi_link(base, points, omegas)
    back = omega_from_psi(base, points, psi)
    assert np.max(np.abs(np.asarray(back) - np.asarray(omegas))) < 1e-14
    alphas = alpha_from_omega(base, points, omegas)
    assert np.allclose(np.exp(psi), alphas, rtol=1e-14)


def test_boundary_lines_named_in_errors():
    base = BaseDistribution(kind="poisson", lam=2.0)
    with pytest.raises(DomainError, match="l1"):
        alpha_from_omega(base, (0, 4), (0.6, 0.4))
    with pytest.raises(DomainError, match="l2"):
        alpha_from_omega(base, (0, 4), (-0.5, 0.1))
    with pytest.raises(DomainError, match="l3"):
        alpha_from_omega(base, (0, 4), (0.1, -0.2))


def test_mixture_validation():
    with pytest.raises(DomainError):
        MixtureModel(base=POISSON, variant="zero_inflated", points=(1,), omegas=(0.2,))
    with pytest.raises(DomainError, match="l1"):
        MixtureModel(base=POISSON, variant="multiple_inflation", points=(0,), omegas=(1.0,))
    with pytest.raises(DomainError):
        MixtureModel(base=POISSON, variant="hurdle", pi=1.0)
    with pytest.raises(DomainError):
        MixtureModel(base=POISSON, variant="haslett", psi=math.inf)
    with pytest.raises(DomainError):
        MixtureModel(base=POISSON, variant="spike", pi=0.5)


def test_json_document_roundtrip():
    models = [
        POISSON,
        BaseDistribution(kind="negative_binomial", lam=1.2, r=4.0),
        InfDefDistribution(POISSON, InflationSpec(family="type2", points=(1, 3), factors=(0.4, 2.0))),
        MixtureModel(base=POISSON, variant="multiple_inflation", points=(0, 2), omegas=(0.1, 0.05)),
        MixtureModel(base=POISSON, variant="hurdle", pi=0.4),
        MixtureModel(base=POISSON, variant="haslett", psi=-0.8),
    ]
    for model in models:
        doc = model_to_document(model)
        rebuilt = model_from_document(doc)
        ns = np.arange(40)
        assert np.allclose(model_pmf(rebuilt, ns), model_pmf(model, ns), rtol=1e-14)


@pytest.mark.parametrize(
    "doc",
    [
        {"family": "base"},
        {"family": "base", "base": {"kind": "poisson"}},
        {"family": "base", "base": {"kind": "poisson", "lambda": 1.0, "mu": 2.0}},
        {"family": "type1", "base": {"kind": "poisson", "lambda": 1.0}},
        {"family": "gamma", "base": {"kind": "poisson", "lambda": 1.0}},
        {"family": "mixture", "variant": "spike", "base": {"kind": "poisson", "lambda": 1.0}},
        {"family": "base", "base": {"kind": "poisson", "lambda": 1.0}, "extra": 1},
        [1, 2, 3],
    ],
)
def test_bad_documents_rejected(doc):
    with pytest.raises(DomainError):
        model_from_document(doc)


def test_strict_open_region_enforced_at_eval():
    ## omegas pass the structural check but land exactly on l2 for this base.
    base = BaseDistribution(kind="poisson", lam=2.0)
    b0 = base_pmf(base, 0)
    omega = -b0 / (1.0 - b0)  # omega + (1 - omega) b0 == 0
    mix = MixtureModel(base=base, variant="zero_inflated", points=(0,), omegas=(omega,))
    with pytest.raises(DomainError, match="l2"):
        mixture_pmf(mix, np.arange(5))
