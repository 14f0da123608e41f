"""Finite probability primitives: priors, channels and hyper-distributions.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.  Logarithms
throughout the package are natural; unit conversion happens only at the
reporting layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ValidationError

# Inputs whose mass is off by no more than this are renormalized; anything
# further off is rejected.
INPUT_TOL = 1e-9
# Tolerance for identities the library itself guarantees (e.g. hyper
# reconstruction).
INTERNAL_TOL = 1e-10


def _clean_distribution(vec, what: str) -> np.ndarray:
    arr = np.asarray(vec, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError(f"{what} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite entries")
    if np.any(arr < -INPUT_TOL):
        raise ValidationError(f"{what} has negative entries")
    arr = np.maximum(arr, 0.0)
    total = arr.sum()
    if abs(total - 1.0) > INPUT_TOL:
        raise ValidationError(f"{what} sums to {total}, not 1")
    arr = arr / total
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Prior:
    """Probability distribution over a finite secret alphabet."""

    probs: np.ndarray

    def __init__(self, probs) -> None:
        object.__setattr__(self, "probs", _clean_distribution(probs, "prior"))

    @property
    def dim(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        """Indices x with strictly positive mass."""
        return np.flatnonzero(self.probs > 0.0)

    @staticmethod
    def uniform(n: int) -> "Prior":
        return Prior(np.full(n, 1.0 / n))

    @staticmethod
    def point_mass(index: int, n: int) -> "Prior":
        p = np.zeros(n)
        p[index] = 1.0
        return Prior(p)

    def __eq__(self, other) -> bool:
        return isinstance(other, Prior) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix C with C[x, y] = P(Y=y | X=x)."""

    matrix: np.ndarray

    def __init__(self, matrix) -> None:
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError("channel must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("channel contains non-finite entries")
        if np.any(arr < -INPUT_TOL):
            raise ValidationError("channel has negative entries")
        arr = np.maximum(arr, 0.0)
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > INPUT_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValidationError(f"channel row {bad} sums to {sums[bad]}, not 1")
        arr = arr / sums[:, None]
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def n_inputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.matrix.shape[1]

    @staticmethod
    def identity(n: int) -> "Channel":
        return Channel(np.eye(n))

    def __eq__(self, other) -> bool:
        return isinstance(other, Channel) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.matrix.shape, self.matrix.tobytes()))


@dataclass(frozen=True)
class Hyper:
    """Hyper-distribution: outer weights p(y) over retained outputs plus one
    inner posterior per retained output.

    Outputs with zero outer probability are dropped at construction;
    ``retained_outputs`` records the surviving original column indices.
    ``inners`` is a matrix whose row i is the posterior over X given the
    i-th retained output.
    """

    outer: np.ndarray
    inners: np.ndarray
    retained_outputs: tuple = field(default=())

    def __init__(self, outer, inners, retained_outputs=None) -> None:
        out = _clean_distribution(outer, "outer distribution")
        inn = np.asarray(inners, dtype=float)
        if inn.ndim != 2 or inn.shape[0] != out.size:
            raise ValidationError("inners must have one row per retained output")
        rows = []
        for i in range(inn.shape[0]):
            rows.append(_clean_distribution(inn[i], f"inner {i}"))
        inn = np.array(rows)
        inn.flags.writeable = False
        if retained_outputs is None:
            retained_outputs = tuple(range(out.size))
        object.__setattr__(self, "outer", out)
        object.__setattr__(self, "inners", inn)
        object.__setattr__(self, "retained_outputs", tuple(retained_outputs))

    @property
    def n_outputs(self) -> int:
        return self.outer.size

    @property
    def secret_dim(self) -> int:
        return self.inners.shape[1]

    def reconstruct_prior(self) -> Prior:
        """Average of the inners under the outer: recovers the pushed prior."""
        return Prior(self.outer @ self.inners)

    def inner(self, i: int) -> Prior:
        return Prior(self.inners[i])


def push(prior: Prior, channel: Channel) -> Hyper:
    """Push a prior through a channel, producing the hyper [prior, channel].

    Outer weights are p(y) = sum_x pi_x C[x, y]; each inner is the Bayes
    posterior over X given y.  Outputs with p(y) = 0 are removed.
    """
    if prior.dim != channel.n_inputs:
        raise DimensionMismatch(
            f"prior has {prior.dim} symbols but channel has {channel.n_inputs} rows"
        )
    joint = prior.probs[:, None] * channel.matrix
    p_y = joint.sum(axis=0)
    keep = np.flatnonzero(p_y > 0.0)
    outer = p_y[keep]
    inners = (joint[:, keep] / outer).T
    hyper = Hyper(outer, inners, retained_outputs=tuple(int(k) for k in keep))
    recon = hyper.outer @ hyper.inners
    if np.max(np.abs(recon - prior.probs)) > INTERNAL_TOL:
        raise ValidationError("hyper reconstruction drifted beyond tolerance")
    return hyper


def compose(first: Channel, second: Channel) -> Channel:
    """Sequential (cascade) composition: the channel X -> Z through Y."""
    if first.n_outputs != second.n_inputs:
        raise DimensionMismatch(
            f"cannot compose {first.n_outputs}-output channel with "
            f"{second.n_inputs}-input channel"
        )
    return Channel(first.matrix @ second.matrix)


def ni_channel(n_rows: int) -> Channel:
    """Non-interfering channel: a single output reached with probability 1."""
    if n_rows < 1:
        raise ValidationError("ni_channel needs at least one row")
    return Channel(np.ones((n_rows, 1)))
