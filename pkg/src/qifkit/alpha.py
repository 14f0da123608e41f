"""Closed-form order-alpha information measures.

The order is carried as an :class:`AlphaOrder` with an exact branch tag so
that the removable singularities at 0, 1 and infinity never reach the
generic formulas.  Sums of powers are evaluated in the log domain, which
keeps the generic branches stable up to orders around 1e6 (used by the
limit-continuity tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Channel, Hyper, Prior, push
from .errors import DimensionMismatch, ParameterError

INF = math.inf

ZERO = "zero"
OPEN_UNIT = "open_unit"
ONE = "one"
FINITE_GT1 = "finite_gt1"
INFINITY = "infinity"


@dataclass(frozen=True)
class AlphaOrder:
    """An order alpha in [0, inf] with its exact branch tag."""

    value: float
    branch: str

    @staticmethod
    def of(x) -> "AlphaOrder":
        if isinstance(x, AlphaOrder):
            return x
        v = float(x)
        if math.isnan(v) or v < 0.0:
            raise ParameterError(f"alpha must lie in [0, inf], got {x}")
        if v == 0.0:
            return AlphaOrder(0.0, ZERO)
        if v == 1.0:
            return AlphaOrder(1.0, ONE)
        if math.isinf(v):
            return AlphaOrder(INF, INFINITY)
        return AlphaOrder(v, OPEN_UNIT if v < 1.0 else FINITE_GT1)


def _logsumexp(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=float)
    v = v[~np.isneginf(v)]
    if v.size == 0:
        return -INF
    m = float(v.max())
    if math.isinf(m):
        return INF
    return m + math.log(float(np.exp(v - m).sum()))


def _shannon(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def renyi_entropy(prior: Prior, alpha) -> float:
    """Renyi entropy of the given order, in nats."""
    a = AlphaOrder.of(alpha)
    p = prior.probs[prior.probs > 0]
    if a.branch == ZERO:
        return math.log(p.size)
    if a.branch == ONE:
        return _shannon(p)
    if a.branch == INFINITY:
        return -math.log(float(p.max()))
    return _logsumexp(a.value * np.log(p)) / (1.0 - a.value)


def renyi_divergence(mu: Prior, pi: Prior, alpha) -> float:
    """Renyi divergence D_alpha(mu || pi) in nats.

    For every positive order the result is +inf when mu puts mass outside
    the support of pi; order 0 uses -log of pi's mass on mu's support.
    """
    if mu.dim != pi.dim:
        raise DimensionMismatch("distributions have different alphabet sizes")
    a = AlphaOrder.of(alpha)
    m, p = mu.probs, pi.probs
    on = m > 0
    if a.branch == ZERO:
        mass = float(p[on].sum())
        return -math.log(mass) if mass > 0 else INF
    if np.any(p[on] == 0.0):
        return INF
    mm, pp = m[on], p[on]
    if a.branch == ONE:
        return float((mm * np.log(mm / pp)).sum())
    if a.branch == INFINITY:
        return math.log(float((mm / pp).max()))
    s = _logsumexp(a.value * np.log(mm) - (a.value - 1.0) * np.log(pp))
    return s / (a.value - 1.0)


def arimoto_conditional_entropy(hyper: Hyper, alpha) -> float:
    """Arimoto conditional entropy H_alpha(X | Y) of a hyper, in nats."""
    a = AlphaOrder.of(alpha)
    outer, inners = hyper.outer, hyper.inners
    if a.branch == ONE:
        return float(sum(w * _shannon(d[d > 0]) for w, d in zip(outer, inners)))
    if a.branch == INFINITY:
        return -math.log(float((outer * inners.max(axis=1)).sum()))
    if a.branch == ZERO:
        return math.log(int((inners > 0).sum(axis=1).max()))
    log_norms = np.array(
        [_logsumexp(a.value * np.log(d[d > 0])) / a.value for d in inners]
    )
    return _logsumexp(np.log(outer) + log_norms) * a.value / (1.0 - a.value)


def arimoto_mi(hyper: Hyper, alpha) -> float:
    """Arimoto mutual information of order alpha: H_alpha(X) - H_alpha(X|Y)."""
    a = AlphaOrder.of(alpha)
    prior = hyper.reconstruct_prior()
    return renyi_entropy(prior, a) - arimoto_conditional_entropy(hyper, a)


def sibson_mi(prior: Prior, channel: Channel, alpha) -> float:
    """Sibson mutual information of order alpha, in nats.

    At order infinity this is log of the summed column maxima over the
    prior's support (maximal leakage at full support); order 1 is Shannon
    mutual information; order 0 is the continuous limit
    -log max_y pi(supp(posterior_y)).
    """
    if prior.dim != channel.n_inputs:
        raise DimensionMismatch("prior/channel dimensions disagree")
    a = AlphaOrder.of(alpha)
    sup = prior.support
    p = prior.probs[sup]
    C = channel.matrix[sup]
    if a.branch == INFINITY:
        return math.log(float(C.max(axis=0).sum()))
    if a.branch == ONE:
        hyper = push(prior, channel)
        return float(
            sum(
                w * renyi_divergence(hyper.inner(i), prior, a)
                for i, w in enumerate(hyper.outer)
            )
        )
    if a.branch == ZERO:
        hyper = push(prior, channel)
        best = max(float(prior.probs[d > 0].sum()) for d in hyper.inners)
        return -math.log(best)
    log_p = np.log(p)
    with np.errstate(divide="ignore"):
        log_C = np.log(C)
    per_output = np.array(
        [_logsumexp(log_p + a.value * log_C[:, y]) / a.value for y in range(C.shape[1])]
    )
    return _logsumexp(per_output) * a.value / (a.value - 1.0)


def alpha_loss(p_hat: float, alpha) -> float:
    """Loss of reporting probability p_hat for the realized secret."""
    a = AlphaOrder.of(alpha)
    if a.branch == ZERO:
        raise ParameterError("alpha-loss is not defined at alpha = 0")
    if not 0.0 <= p_hat <= 1.0:
        raise ParameterError(f"p_hat must lie in [0, 1], got {p_hat}")
    if a.branch == ONE:
        return math.log(1.0 / p_hat) if p_hat > 0 else INF
    if a.branch == INFINITY:
        return 1.0 - p_hat
    coeff = a.value / (a.value - 1.0)
    with np.errstate(divide="ignore"):
        powered = float(np.power(p_hat, (a.value - 1.0) / a.value))
    return coeff * (1.0 - powered)


def min_expected_alpha_loss(prior: Prior, alpha) -> tuple[float, Prior]:
    """Minimum of the expected alpha-loss over probabilistic estimators,
    with the optimal estimator (the alpha-scaled/tilted prior).
    """
    a = AlphaOrder.of(alpha)
    if a.branch == ZERO:
        raise ParameterError("alpha-loss is not defined at alpha = 0")
    if a.branch == ONE:
        return _shannon(prior.probs[prior.probs > 0]), prior
    if a.branch == INFINITY:
        best = int(np.argmax(prior.probs))
        return 1.0 - float(prior.probs[best]), Prior.point_mass(best, prior.dim)
    entropy = renyi_entropy(prior, a)
    coeff = a.value / (a.value - 1.0)
    value = coeff * (1.0 - math.exp((1.0 - a.value) / a.value * entropy))
    log_p = np.full(prior.dim, -INF)
    sup = prior.support
    log_p[sup] = a.value * np.log(prior.probs[sup])
    tilted = np.exp(log_p - _logsumexp(log_p))
    return value, Prior(tilted)


def pointwise_alpha_leakage(prior: Prior, posterior: Prior, alpha) -> float:
    """Pointwise leakage of a single observed output: the Renyi divergence
    of the posterior from the prior (+inf on a support violation)."""
    return renyi_divergence(posterior, prior, alpha)


def sibson_via_pointwise(hyper: Hyper, prior: Prior, alpha) -> float:
    """Exponential-mean aggregation of the pointwise alpha-leakages over
    outputs.  Agrees with :func:`sibson_mi` when the hyper was pushed from
    the given prior.
    """
    a = AlphaOrder.of(alpha)
    gains = np.array(
        [renyi_divergence(hyper.inner(i), prior, a) for i in range(hyper.n_outputs)]
    )
    if a.branch == ONE:
        return float((hyper.outer * gains).sum())
    if a.branch == ZERO:
        return float(gains.min())
    rate = 1.0 if a.branch == INFINITY else (a.value - 1.0) / a.value
    return _logsumexp(np.log(hyper.outer) + rate * gains) / rate
