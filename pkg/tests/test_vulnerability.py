import math

import numpy as np
import pytest

from qifkit.alpha import arimoto_mi, renyi_entropy
from qifkit.core import Channel, Prior, compose, ni_channel, push
from qifkit.errors import ParameterError, ValidationError
from qifkit.fmeans import (
    FMeanValidityWarning,
    custom_fmean,
    ell_alpha,
    f_alpha,
    h_alpha_beta,
    identity_fmean,
)
from qifkit.gains import FiniteMatrixGain, IdentityGain, PointwiseInfoGain, SimplexGain
from qifkit.simplex import simplex_grid
from qifkit.vulnerability import (
    ADDITIVE,
    MULTIPLICATIVE,
    LeakageReport,
    argmax_action,
    gen_posterior_vulnerability_avg,
    gen_posterior_vulnerability_max,
    gen_prior_vulnerability,
    leakage,
    posterior_vulnerability_avg,
    posterior_vulnerability_max,
    prior_vulnerability,
)

from conftest import bsc, random_channel, random_prior


def _safe_log(t):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(t, dtype=float))


def test_prior_vulnerability_examples():
    for n in (2, 3, 5):
        assert prior_vulnerability(Prior.uniform(n), IdentityGain()) == pytest.approx(1.0 / n)
    assert prior_vulnerability(Prior([0.7, 0.3]), IdentityGain()) == pytest.approx(0.7)
    gain = FiniteMatrixGain([[2.0, 0.0], [0.0, 1.0]])
    assert prior_vulnerability(Prior.uniform(2), gain) == pytest.approx(1.0)


def test_argmax_tie_break_lowest_index():
    gain = FiniteMatrixGain([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    _, action = argmax_action(Prior.uniform(2), gain)
    assert action == 0
    value, witness = argmax_action(Prior([0.3, 0.7]), SimplexGain())
    assert value == pytest.approx(0.7)
    assert witness.tolist() == [0.0, 1.0]


def test_negative_expected_gain_rejected():
    gain = FiniteMatrixGain([[-1.0, -2.0], [-3.0, 0.5]])
    with pytest.raises(ValidationError):
        prior_vulnerability(Prior([0.9, 0.1]), gain)


def test_pointwise_gain_prior_vulnerability_is_kl():
    prior = Prior([0.8, 0.2])
    reference = Prior([0.5, 0.5])
    expected = 0.8 * math.log(0.8 / 0.5) + 0.2 * math.log(0.2 / 0.5)
    assert prior_vulnerability(prior, PointwiseInfoGain(reference)) == pytest.approx(expected)


def test_posterior_vulnerability_examples():
    uniform = Prior.uniform(2)
    ident = push(uniform, Channel.identity(2))
    assert posterior_vulnerability_avg(ident, IdentityGain()) == pytest.approx(1.0)
    assert posterior_vulnerability_max(ident, IdentityGain()) == pytest.approx(1.0)
    point = push(Prior([0.7, 0.3]), ni_channel(2))
    assert posterior_vulnerability_avg(point, IdentityGain()) == pytest.approx(0.7)
    noisy = push(uniform, bsc(0.1))
    assert posterior_vulnerability_avg(noisy, IdentityGain()) == pytest.approx(0.9)
    assert posterior_vulnerability_max(noisy, IdentityGain()) == pytest.approx(0.9)


def test_gen_prior_affine_reduces_exactly(rng):
    for _ in range(20):
        dim = int(rng.integers(2, 5))
        prior = random_prior(rng, dim)
        gain = FiniteMatrixGain(rng.uniform(0.0, 2.0, size=(3, dim)))
        assert gen_prior_vulnerability(prior, gain, identity_fmean()) == prior_vulnerability(
            prior, gain
        )


def test_gen_prior_simplex_closed_forms():
    assert gen_prior_vulnerability(
        Prior.uniform(2), SimplexGain(), f_alpha(2.0)
    ) == pytest.approx(0.5)
    assert gen_prior_vulnerability(
        Prior([0.7, 0.3]), SimplexGain(), f_alpha(math.inf)
    ) == pytest.approx(0.7)
    # order 0 counts the support
    assert gen_prior_vulnerability(
        Prior([0.6, 0.4, 0.0]), SimplexGain(), f_alpha(0.0)
    ) == pytest.approx(0.5)


def test_gen_prior_matches_exp_renyi(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 6))
        prior = random_prior(rng, dim)
        for a in (0.0, 0.5, 1.0, 2.0, 10.0, math.inf):
            closed = gen_prior_vulnerability(prior, SimplexGain(), f_alpha(a))
            assert closed == pytest.approx(math.exp(-renyi_entropy(prior, a)), abs=1e-9)


def test_gen_prior_simplex_beats_grid(rng):
    # the closed form must dominate any feasible guess, and a fine grid must
    # come resolution-close to it
    for dim in (2, 3):
        grid = simplex_grid(dim, 200)
        for a in (0.5, 2.0, 10.0):
            f = f_alpha(a)
            fw = np.asarray(f.forward(grid), dtype=float)
            for _ in range(10):
                prior = random_prior(rng, dim)
                closed = gen_prior_vulnerability(prior, SimplexGain(), f)
                means = np.where(prior.probs[None, :] > 0, fw, 0.0) @ prior.probs
                best = means.max() if f.increasing else means.min()
                gridded = float(f.inverse(best))
                assert gridded <= closed + 1e-12
                assert closed - gridded <= 5e-3


def test_gen_prior_rejects_bad_inputs():
    with pytest.raises(ParameterError):
        # concave inverse is not allowed for prior vulnerability
        gen_prior_vulnerability(Prior.uniform(2), SimplexGain(), ell_alpha(2.0))
    with pytest.raises(ParameterError):
        gen_prior_vulnerability(
            Prior.uniform(2), FiniteMatrixGain([[1.0, -0.5]]), f_alpha(2.0)
        )
    with pytest.raises(ParameterError):
        gen_prior_vulnerability(Prior.uniform(2), IdentityGain(), f_alpha(0.0))


def test_gen_prior_decreasing_f_with_zero_gain_hits_zero():
    # f below order 1 maps zero gain to +inf, collapsing the mean's inverse
    value = gen_prior_vulnerability(Prior.uniform(2), IdentityGain(), f_alpha(0.5))
    assert value == pytest.approx(0.0, abs=1e-12)


def test_gen_prior_custom_fallback_matches_log_route(rng):
    # -log is an affine reparameterization of the order-1 mean, so the
    # heuristic ascent must land on the same value as the closed form
    neglog = custom_fmean(
        lambda t: -_safe_log(t),
        lambda s: np.exp(-np.asarray(s, dtype=float)),
        "decreasing",
        "convex",
        name="neglog",
    )
    for _ in range(5):
        prior = random_prior(rng, 3)
        via_fallback = gen_prior_vulnerability(prior, SimplexGain(), neglog)
        via_closed = gen_prior_vulnerability(prior, SimplexGain(), f_alpha(1.0))
        assert via_fallback == pytest.approx(via_closed, abs=1e-6)


def test_gen_posterior_examples():
    uniform = Prior.uniform(2)
    f2 = f_alpha(2.0)
    ident = push(uniform, Channel.identity(2))
    assert gen_posterior_vulnerability_avg(ident, SimplexGain(), f2, f2) == pytest.approx(1.0)
    point = push(Prior([0.3, 0.7]), ni_channel(2))
    for f, h in ((f2, f2), (f_alpha(0.5), f_alpha(0.5)), (identity_fmean(), identity_fmean())):
        assert gen_posterior_vulnerability_avg(point, SimplexGain(), f, h) == pytest.approx(
            gen_prior_vulnerability(Prior([0.3, 0.7]), SimplexGain(), f), abs=1e-9
        )
    noisy = push(uniform, bsc(0.1))
    assert gen_posterior_vulnerability_max(
        noisy, SimplexGain(), f_alpha(math.inf)
    ) == pytest.approx(0.9)


def test_gen_posterior_avg_equals_exp_neg_arimoto(rng):
    # cross-check against the independent Arimoto-entropy formula
    for _ in range(50):
        nx, ny = rng.integers(2, 5, size=2)
        prior = random_prior(rng, nx)
        channel = random_channel(rng, nx, ny)
        hyper = push(prior, channel)
        for a in (0.5, 1.0, 2.0, 10.0):
            f = f_alpha(a)
            post = gen_posterior_vulnerability_avg(hyper, SimplexGain(), f, f)
            mult = leakage(gen_prior_vulnerability(prior, SimplexGain(), f), post)
            assert mult == pytest.approx(arimoto_mi(hyper, a), abs=1e-9)


def test_gen_posterior_h_limit_is_max_case(rng):
    hyper = push(Prior([0.3, 0.7]), bsc(0.2))
    f = f_alpha(2.0)
    h_inf = h_alpha_beta(2.0, math.inf)
    assert gen_posterior_vulnerability_avg(hyper, SimplexGain(), f, h_inf) == pytest.approx(
        gen_posterior_vulnerability_max(hyper, SimplexGain(), f)
    )


def test_gen_posterior_invalid_h_rejected_and_bypassable():
    hyper = push(Prior([0.3, 0.7]), bsc(0.2))
    bad_h = custom_fmean(
        lambda t: 1.0 / np.asarray(t, dtype=float),
        lambda s: 1.0 / np.asarray(s, dtype=float),
        "decreasing",
        "convex",
        domain=(1e-9, math.inf),
        name="reciprocal",
    )
    with pytest.raises(ParameterError):
        gen_posterior_vulnerability_avg(hyper, IdentityGain(), identity_fmean(), bad_h)
    value = gen_posterior_vulnerability_avg(
        hyper, IdentityGain(), identity_fmean(), bad_h, enforce_h_class=False
    )
    assert 0.0 < value <= 1.0


def test_axiom_samples(rng):
    # light-weight spot checks; the full suites live in the verify module
    families = [
        (identity_fmean(), identity_fmean(), IdentityGain()),
        (f_alpha(0.5), f_alpha(0.5), SimplexGain()),
        (f_alpha(2.0), f_alpha(2.0), SimplexGain()),
    ]
    for _ in range(40):
        nx, ny, nz = (int(v) for v in rng.integers(2, 5, size=3))
        prior = random_prior(rng, nx)
        channel = random_channel(rng, nx, ny)
        refine = random_channel(rng, ny, nz)
        for f, h, gain in families:
            v_prior = gen_prior_vulnerability(prior, gain, f)
            hyper = push(prior, channel)
            avg = gen_posterior_vulnerability_avg(hyper, gain, f, h)
            mx = gen_posterior_vulnerability_max(hyper, gain, f)
            coarser = push(prior, compose(channel, refine))
            avg_post = gen_posterior_vulnerability_avg(coarser, gain, f, h)
            mx_post = gen_posterior_vulnerability_max(coarser, gain, f)
            assert avg >= v_prior - 1e-9          # MONO
            assert avg_post <= avg + 1e-9         # DPI (average)
            assert mx_post <= mx + 1e-9           # DPI (max-case)
            assert avg <= mx + 1e-9               # AVG <= MAX
        # convexity of the generalized prior vulnerability
        parts = [random_prior(rng, nx) for _ in range(2)]
        weights = rng.dirichlet(np.ones(2))
        mixed = Prior(weights[0] * parts[0].probs + weights[1] * parts[1].probs)
        for f, _, gain in families:
            v_mixed = gen_prior_vulnerability(mixed, gain, f)
            bound = sum(
                w * gen_prior_vulnerability(p, gain, f) for w, p in zip(weights, parts)
            )
            assert v_mixed <= bound + 1e-9


def test_alpha_beta_posterior_warns_for_concave_exponent():
    hyper = push(Prior([0.4, 0.6]), bsc(0.25))
    with pytest.warns(FMeanValidityWarning):
        h = h_alpha_beta(1.5, 2.0)
    value = gen_posterior_vulnerability_avg(hyper, SimplexGain(), f_alpha(1.5), h)
    assert math.isfinite(value)


def test_leakage_examples():
    assert leakage(0.5, 0.5, MULTIPLICATIVE) == pytest.approx(0.0)
    assert leakage(0.5, 0.5, ADDITIVE) == pytest.approx(0.0)
    assert leakage(0.5, 0.9, MULTIPLICATIVE) == pytest.approx(math.log(1.8))
    assert leakage(0.5, 0.9, ADDITIVE) == pytest.approx(0.4)
    assert leakage(0.0, 0.9, MULTIPLICATIVE) == math.inf
    with pytest.raises(ParameterError):
        leakage(0.5, 0.9, "geometric")


def test_leakage_report_requires_reason_for_infinities():
    with pytest.raises(ValidationError):
        LeakageReport("ldp", math.inf)
    report = LeakageReport("ldp", math.inf, reason="zero_channel_entry")
    assert report.reason == "zero_channel_entry"
