"""Classical and Kolmogorov-Nagumo-generalized vulnerabilities and leakage.

The generalized prior vulnerability is the optimal f-mean of the gain under
the prior; posterior variants aggregate per-output vulnerabilities with a
second mean h.  When h equals f the computation uses the collapsed form
(the outer inverse cancels against the inner mean), which is both what the
theory manipulates and the numerically stable route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Hyper, Prior
from .errors import ParameterError, ValidationError
from .fmeans import AFFINE, CONCAVE, CONVEX, FMeanSpec, fmeans_equal
from .gains import (
    FiniteMatrixGain,
    GainSpec,
    IdentityGain,
    PointwiseInfoGain,
    SimplexGain,
    gain_matrix_for,
)
from .simplex import projected_ascent

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"

# Multi-start budget for the heuristic simplex-gain fallback used when f is
# not a recognized power/log mean.  Deterministic.
_FALLBACK_RESTARTS = 8
_FALLBACK_SEED = 20240615


@dataclass(frozen=True)
class LeakageReport:
    """A named measure value with its parameters and optimizer diagnostics."""

    measure_name: str
    value: float
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    log_base: str = "natural"
    reason: str | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) and self.reason is None:
            raise ValidationError(
                f"non-finite {self.measure_name} value needs a reason code"
            )


def _check_gain_domain(matrix: np.ndarray, f: FMeanSpec) -> None:
    lo, hi = f.domain
    if matrix.min() < lo or matrix.max() > hi:
        raise ParameterError(
            f"gain values [{matrix.min():g}, {matrix.max():g}] fall outside "
            f"the domain [{lo:g}, {hi:g}] of {f.name}"
        )


def _masked_expectation(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """sum_x weights_x * values[..., x] with the 0 * inf = 0 convention."""
    safe = np.where(weights > 0.0, values, 0.0)
    return safe @ weights


def argmax_action(prior: Prior, gain: GainSpec):
    """Classical prior vulnerability together with its optimal action.

    Finite gains return the lowest-index maximizing row; the simplex gain
    returns the optimal point-mass distribution; the identity gain returns
    the most likely secret.
    """
    p = prior.probs
    if isinstance(gain, (FiniteMatrixGain, IdentityGain)):
        matrix = gain_matrix_for(gain, prior.dim)
        scores = matrix @ p
        best = int(np.argmax(scores))
        return float(scores[best]), best
    if isinstance(gain, SimplexGain):
        best = int(np.argmax(p))
        witness = np.zeros(prior.dim)
        witness[best] = 1.0
        return float(p[best]), witness
    if isinstance(gain, PointwiseInfoGain):
        ref = gain.reference
        if ref.dim != prior.dim:
            raise ValidationError("pointwise gain reference has wrong dimension")
        sup = prior.support
        if np.any(ref.probs[sup] == 0.0):
            return math.inf, prior.probs
        val = float((p[sup] * np.log(p[sup] / ref.probs[sup])).sum())
        return val, prior.probs
    raise ParameterError(f"unsupported gain {type(gain).__name__}")


def prior_vulnerability(prior: Prior, gain: GainSpec) -> float:
    """Classical prior g-vulnerability: the optimal expected gain."""
    value, _ = argmax_action(prior, gain)
    if value < 0:
        raise ValidationError(
            f"expected gain {value:g} is negative; vulnerabilities must be "
            "non-negative"
        )
    return value


def posterior_vulnerability_avg(hyper: Hyper, gain: GainSpec) -> float:
    """Output-averaged posterior g-vulnerability."""
    vals = [prior_vulnerability(hyper.inner(i), gain) for i in range(hyper.n_outputs)]
    return float((hyper.outer * np.array(vals)).sum())


def posterior_vulnerability_max(hyper: Hyper, gain: GainSpec) -> float:
    """Worst-case (max over outputs) posterior g-vulnerability."""
    return max(
        prior_vulnerability(hyper.inner(i), gain) for i in range(hyper.n_outputs)
    )


def _simplex_closed_form_mean(probs: np.ndarray, f: FMeanSpec) -> float:
    """Optimal value of sum_x p_x f(w_x) over distributions w, for the
    order-alpha power/log means: evaluates the mean at the tilted optimizer
    w*_x = p_x^alpha / sum p^alpha.
    """
    sup = probs > 0.0
    p = probs[sup]
    if f.kind == "log":
        return float((p * np.log(p)).sum())
    alpha = f.alpha
    log_p = np.log(p)
    log_w = alpha * log_p
    m = log_w.max()
    log_w = log_w - (m + math.log(float(np.exp(log_w - m).sum())))
    # mean = sum_x p_x * (w*_x)^power, evaluated in the log domain
    terms = log_p + f.power * log_w
    t = terms.max()
    return float(math.exp(t) * np.exp(terms - t).sum())


def _simplex_fallback_mean(probs: np.ndarray, f: FMeanSpec) -> float:
    """Heuristic multi-start ascent for simplex-gain means with a generic f.
    Maximizes the mean for increasing f, minimizes it for decreasing f.
    """
    sign = 1.0 if f.increasing else -1.0

    def objective(w: np.ndarray) -> float:
        vals = np.asarray(f.forward(w), dtype=float)
        return sign * float(_masked_expectation(probs, vals))

    rng = np.random.default_rng(_FALLBACK_SEED)
    dim = probs.size
    starts = [probs.copy(), np.full(dim, 1.0 / dim)]
    starts.extend(rng.dirichlet(np.ones(dim), size=_FALLBACK_RESTARTS))
    best = -math.inf
    for s in starts:
        val, _ = projected_ascent(objective, s)
        best = max(best, val)
    return sign * best


def _optimal_gain_mean(probs: np.ndarray, gain: GainSpec, f: FMeanSpec) -> float:
    """opt_w sum_x probs_x f(g(w, x)): sup for increasing f, inf for
    decreasing f (the pre-inverse inner optimum of the generalized
    vulnerability)."""
    if isinstance(gain, (FiniteMatrixGain, IdentityGain)):
        matrix = gain_matrix_for(gain, probs.size)
        _check_gain_domain(matrix, f)
        values = np.asarray(f.forward(matrix), dtype=float)
        means = _masked_expectation(probs, values)
        return float(means.max() if f.increasing else means.min())
    if isinstance(gain, SimplexGain):
        if f.alpha is not None and f.kind in ("power", "log"):
            return _simplex_closed_form_mean(probs, f)
        return _simplex_fallback_mean(probs, f)
    raise ParameterError(
        f"generalized vulnerability does not support {type(gain).__name__}"
    )


def gen_prior_vulnerability(prior: Prior, gain: GainSpec, f: FMeanSpec) -> float:
    """Generalized prior vulnerability: sup_w f^-1(sum_x pi_x f(g(w, x))).

    Requires a convex (or affine) inverse.  Affine f reduces exactly to the
    classical prior vulnerability.
    """
    if f.inverse_convexity not in (CONVEX, AFFINE):
        raise ParameterError(
            f"{f.name} has a {f.inverse_convexity} inverse; prior "
            "vulnerability needs a convex or affine one"
        )
    if f.is_affine:
        return prior_vulnerability(prior, gain)
    if f.kind == "limit":
        if f.alpha == 0.0 and isinstance(gain, SimplexGain):
            # order-0 closed form: reciprocal of the support size
            return 1.0 / prior.support.size
        raise ParameterError(f"{f.name} is usable only via its closed-form branch")
    mean = _optimal_gain_mean(prior.probs, gain, f)
    return float(f.inverse(mean))


def _validate_h_class(h: FMeanSpec) -> None:
    # h convex increasing or concave decreasing <=> h^-1 concave (or affine).
    # Increasing power means outside that range (exponent < 1) stay usable:
    # they are the two-parameter posterior family, which already warns at
    # construction time that the posterior axioms are not guaranteed.
    if h.inverse_convexity in (CONCAVE, AFFINE):
        return
    if h.kind == "power" and h.power is not None and h.power > 0:
        return
    raise ParameterError(
        f"h = {h.name} must be convex increasing or concave decreasing "
        "when it differs from f"
    )


def gen_posterior_vulnerability_avg(
    hyper: Hyper,
    gain: GainSpec,
    f: FMeanSpec,
    h: FMeanSpec,
    enforce_h_class: bool = True,
) -> float:
    """Generalized average posterior vulnerability
    h^-1(sum_y p(y) h(V_{f,g}(delta^y))).

    h = f uses the collapsed form (inner optimum moved inside, sup for
    increasing f and inf for decreasing f); affine h averages plainly; a
    tagged max-limit h (posterior exponent -> infinity) degenerates to the
    max-case posterior vulnerability.  ``enforce_h_class=False`` disables
    the convex-increasing / concave-decreasing requirement on a distinct h;
    the verification harness uses it to run negative controls.
    """
    if h.kind == "limit":
        if h.power == math.inf:
            return gen_posterior_vulnerability_max(hyper, gain, f)
        if h.exp_rate == -math.inf:
            return min(
                gen_prior_vulnerability(hyper.inner(i), gain, f)
                for i in range(hyper.n_outputs)
            )
        raise ParameterError(f"unsupported limit mean {h.name} for h")
    if fmeans_equal(h, f) and not f.is_affine:
        if f.kind == "limit":
            raise ParameterError(f"{f.name} is usable only via its closed-form branch")
        means = np.array(
            [_optimal_gain_mean(d, gain, f) for d in hyper.inners]
        )
        total = float((hyper.outer * means).sum())
        return float(f.inverse(total))
    values = np.array(
        [gen_prior_vulnerability(hyper.inner(i), gain, f) for i in range(hyper.n_outputs)]
    )
    if h.is_affine:
        return float((hyper.outer * values).sum())
    if enforce_h_class:
        _validate_h_class(h)
    transformed = np.asarray(h.forward(values), dtype=float)
    return float(h.inverse(float((hyper.outer * transformed).sum())))


def gen_posterior_vulnerability_max(hyper: Hyper, gain: GainSpec, f: FMeanSpec) -> float:
    """Generalized worst-case posterior vulnerability: max over outputs."""
    return max(
        gen_prior_vulnerability(hyper.inner(i), gain, f)
        for i in range(hyper.n_outputs)
    )


def leakage(prior_v: float, post_v: float, kind: str = MULTIPLICATIVE) -> float:
    """Additive or multiplicative leakage between two vulnerabilities.

    Multiplicative leakage of a zero prior vulnerability is +inf (callers
    attach the reason code when reporting).
    """
    if kind == ADDITIVE:
        return post_v - prior_v
    if kind == MULTIPLICATIVE:
        if prior_v == 0.0:
            return math.inf
        with np.errstate(divide="ignore"):
            return float(np.log(post_v / prior_v))
    raise ParameterError(f"unknown leakage kind {kind!r}")
