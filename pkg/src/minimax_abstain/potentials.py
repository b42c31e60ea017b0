"""Potential wells for classification error: the pointwise convex functions
whose average over unlabeled examples (minus the bound term) forms every
training objective in the 0-1 regimes.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "predict_potential",
    "abstain_potential",
    "abstain_potential_subgrad",
    "abstain_probability",
]

# Abstain costs above 1/2 make abstaining dominated by a coin flip, so the
# learning problem collapses to the no-abstain case; reject them.
MAX_COST = 0.5


def _check_cost(c: float) -> float:
    c = float(c)
    if not (0.0 < c <= MAX_COST):
        raise ValueError(
            f"abstain cost must lie in (0, {MAX_COST}]; for c > {MAX_COST} use "
            "the no-abstain potential (abstaining is never optimal there)"
        )
    return c


def _maybe_scalar(x: np.ndarray, scalar_in: bool):
    return float(x) if scalar_in else x


def predict_potential(m):
    """No-abstain potential well: max(|m|, 1).  Even, convex, 1-Lipschitz."""
    m = np.asarray(m, dtype=float)
    return _maybe_scalar(np.maximum(np.abs(m), 1.0), m.ndim == 0)


def abstain_potential(m, c: float):
    """Abstaining potential well at cost c in (0, 1/2]:

        |m| + 2c(1 - |m|)   for |m| <= 1
        |m|                 for |m| >  1

    Continuous, convex, even, 1-Lipschitz, and increasing in c.  At c = 1/2 it
    coincides with the no-abstain well.
    """
    c = _check_cost(c)
    m = np.asarray(m, dtype=float)
    return _maybe_scalar(_lambda_potential(m, 2.0 * c), m.ndim == 0)


def _lambda_potential(m: np.ndarray, lam: float) -> np.ndarray:
    # Internal form parameterized by lam = 2c; admits lam = 0 as the limit
    # used by the frontier sweep.
    am = np.abs(m)
    return am + lam * np.maximum(0.0, 1.0 - am)


def abstain_potential_subgrad(m, c: float):
    """A fixed subgradient selection for the abstaining well.

    Selection convention (reproducibility, not optimality, is at stake):
    0 at m = 0; sign(m)*(1 - 2c) on the interior 0 < |m| < 1; the
    subdifferential midpoint sign(m)*(1 - c) at |m| = 1; sign(m) outside.
    """
    c = _check_cost(c)
    m = np.asarray(m, dtype=float)
    return _maybe_scalar(_lambda_potential_subgrad(m, 2.0 * c), m.ndim == 0)


def _lambda_potential_subgrad(m: np.ndarray, lam: float) -> np.ndarray:
    am = np.abs(m)
    s = np.sign(m)
    return s * np.where(am > 1.0, 1.0, np.where(am == 1.0, 1.0 - 0.5 * lam, 1.0 - lam))


def abstain_probability(m):
    """max(0, 1 - |m|): the probability of abstaining at score m under the
    optimal abstaining strategy.  It is simultaneously the derivative of the
    abstaining well in the cost parameterization lam = 2c, which is what ties
    the multiplier to the realized abstain rate.
    """
    m = np.asarray(m, dtype=float)
    return _maybe_scalar(np.maximum(0.0, 1.0 - np.abs(m)), m.ndim == 0)
