"""Adversary gain functions.

Four variants: an explicit action-by-secret matrix, the identity guess,
the simplex-valued gain g(w, x) = w_x whose actions are distributions over
the secrets, and the pointwise information gain log(w_x / pi_x) measured
against a reference prior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Prior
from .errors import ValidationError


@dataclass(frozen=True)
class FiniteMatrixGain:
    """Explicit gain matrix G[w, x]; rows are actions.  Negative entries are
    allowed (losses), but at least one entry must be strictly positive so a
    zero vulnerability remains meaningful.
    """

    matrix: np.ndarray

    def __init__(self, matrix) -> None:
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError("gain matrix must be non-empty and 2-D")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("gain matrix contains non-finite entries")
        if not np.any(arr > 0):
            raise ValidationError("gain matrix needs at least one positive entry")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def n_actions(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_secrets(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class IdentityGain:
    """g(w, x) = 1 iff w = x: the Bayes-vulnerability gain, valid over any
    alphabet size."""


@dataclass(frozen=True)
class SimplexGain:
    """g(w, x) = w_x with actions ranging over all distributions on the
    secret alphabet."""


@dataclass(frozen=True)
class PointwiseInfoGain:
    """gamma(w, x) = log(w_x / pi_x) against the reference prior pi; actions
    range over distributions on the secrets.  The reference must cover every
    secret the gain is evaluated on.
    """

    reference: Prior


GainSpec = FiniteMatrixGain | IdentityGain | SimplexGain | PointwiseInfoGain


def gain_matrix_for(gain: GainSpec, n_secrets: int) -> np.ndarray:
    """Materialize a finite action set for the gain, as a matrix.

    Simplex-valued gains have no finite action set and are rejected here;
    their optimizations use closed forms or grid oracles instead.
    """
    if isinstance(gain, FiniteMatrixGain):
        if gain.n_secrets != n_secrets:
            raise ValidationError(
                f"gain is over {gain.n_secrets} secrets, expected {n_secrets}"
            )
        return gain.matrix
    if isinstance(gain, IdentityGain):
        return np.eye(n_secrets)
    raise ValidationError(f"{type(gain).__name__} has no finite action matrix")
