"""General loss framework: partial losses, the monotone score (link) function
and its inverse, the induced potential well, and the machinery that turns a
fixed abstaining cost into per-example prediction probabilities.

A loss is described by its two partial losses: the loss against a true +1
label and against a true -1 label, each a function of the prediction
g in [-1, 1].  The score function (their difference) is the monotone link
between predictions and margin-space scores; the potential well is the convex
pointwise objective the link induces.

The smooth engine (tangent intercepts, marginal costs, the abstaining
potential) requires twice-differentiable partial losses with a strictly convex
well; the 0-1 family is piecewise linear and is served by the closed forms in
`potentials` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "LossSpec",
    "LossNotSmoothError",
    "zero_one_loss",
    "asymmetric_loss",
    "log_loss",
    "loss_by_name",
    "score_function",
    "score_inverse",
    "potential",
    "potential_slope",
    "tangent_intercept",
    "tangent_intercept_inverse",
    "prob_marginal_cost",
    "prob_for_marginal_cost",
    "abstaining_potential",
    "abstaining_potential_subgrad",
]

_BISECT_STEPS = 100


class LossNotSmoothError(TypeError):
    """Raised when the smooth general-loss engine is asked to handle a loss
    with a piecewise-linear potential well (tangent inversion is not
    meaningful there)."""


@dataclass(frozen=True)
class LossSpec:
    """Partial losses, their derivatives, and the score range endpoints.

    ``loss_plus`` must be decreasing and ``loss_minus`` increasing on (-1, 1)
    (sampled at construction), and the induced well must be convex.  All four
    callables must broadcast over numpy arrays.
    """

    name: str
    loss_plus: Callable
    loss_minus: Callable
    dloss_plus: Callable
    dloss_minus: Callable
    gamma_lo: float  # score at g = -1 (may be -inf)
    gamma_hi: float  # score at g = +1 (may be +inf)
    smooth: bool = True
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        g = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, 1001)
        lp = np.asarray(self.loss_plus(g), dtype=float)
        lm = np.asarray(self.loss_minus(g), dtype=float)
        if np.any(np.diff(lp) > 1e-12):
            raise ValueError(f"loss {self.name!r}: loss_plus must be decreasing on (-1, 1)")
        if np.any(np.diff(lm) < -1e-12):
            raise ValueError(f"loss {self.name!r}: loss_minus must be increasing on (-1, 1)")
        m = np.linspace(-6.0, 6.0, 401)
        w = potential(self, m)
        mid = 0.5 * (w[:-1] + w[1:])
        inner = potential(self, 0.5 * (m[:-1] + m[1:]))
        if np.any(inner > mid + 1e-9):
            raise ValueError(f"loss {self.name!r}: induced potential well is not convex")


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _maybe_scalar(x: np.ndarray, scalar_in: bool):
    return float(x) if scalar_in else x


def score_function(loss: LossSpec, g):
    """Score of a prediction: loss against -1 minus loss against +1.
    Increasing in g; the monotone link between predictions and scores."""
    g = _as_float_array(g)
    with np.errstate(divide="ignore"):
        out = loss.loss_minus(g) - loss.loss_plus(g)
    return _maybe_scalar(np.asarray(out, dtype=float), g.ndim == 0)


def score_inverse(loss: LossSpec, m):
    """The prediction whose score equals m, by monotone bisection (clamped to
    -1 below the score range and +1 above it).

    Residual target |score(g) - m| <= 1e-10 whenever a float prediction can
    realize it; for scores beyond float resolution of the link the nearest
    representable bracket endpoint is returned.
    """
    m = _as_float_array(m)
    scalar_in = m.ndim == 0
    m = np.atleast_1d(m)
    lo = np.full(m.shape, -1.0)
    hi = np.full(m.shape, 1.0)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        below = score_function(loss, mid) < m
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    res_lo = np.abs(score_function(loss, lo) - m)
    res_hi = np.abs(score_function(loss, hi) - m)
    out = np.where(np.isnan(res_hi) | (res_lo <= res_hi), lo, hi)
    out = np.where(m <= loss.gamma_lo, -1.0, out)
    out = np.where(m >= loss.gamma_hi, 1.0, out)
    return _maybe_scalar(out if not scalar_in else out[()], scalar_in)


def _slope_at_prediction(loss: LossSpec, g):
    """d(potential)/dm expressed through the prediction g on the middle
    branch: (l+' + l-') / (l-' - l+') evaluated at g."""
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = _as_float_array(loss.dloss_plus(g))
        dm = _as_float_array(loss.dloss_minus(g))
        out = (dp + dm) / (dm - dp)
    return np.clip(np.nan_to_num(out, nan=0.0, posinf=1.0, neginf=-1.0), -1.0, 1.0)


def potential(loss: LossSpec, m):
    """The loss-induced potential well: outer branches with slopes -1/+1
    beyond the score range, and the sum of partial losses at the inverse link
    in between.  Continuous, convex, 1-Lipschitz.
    """
    m = _as_float_array(m)
    scalar_in = m.ndim == 0
    m = np.atleast_1d(m)
    g = score_inverse(loss, m)
    with np.errstate(divide="ignore"):
        mid = loss.loss_plus(g) + loss.loss_minus(g)
    # Tangent lower bound m * slope(m): rescues float saturation of the
    # inverse link at extreme scores (never binds where `mid` is accurate).
    mid = np.maximum(mid, m * _slope_at_prediction(loss, g))
    out = np.asarray(mid, dtype=float)
    if np.isfinite(loss.gamma_lo):
        low = -m + 2.0 * float(loss.loss_minus(-1.0))
        out = np.where(m <= loss.gamma_lo, low, out)
    if np.isfinite(loss.gamma_hi):
        high = m + 2.0 * float(loss.loss_plus(1.0))
        out = np.where(m >= loss.gamma_hi, high, out)
    return _maybe_scalar(out if not scalar_in else out[()], scalar_in)


def potential_slope(loss: LossSpec, m):
    """Derivative of the potential well in the score (subgradient selection on
    the piecewise-linear family): -1/+1 on the outer branches, the chain-rule
    ratio through the inverse link in between."""
    m = _as_float_array(m)
    scalar_in = m.ndim == 0
    m = np.atleast_1d(m)
    g = score_inverse(loss, m)
    out = _slope_at_prediction(loss, g)
    if np.isfinite(loss.gamma_lo):
        out = np.where(m <= loss.gamma_lo, -1.0, out)
    if np.isfinite(loss.gamma_hi):
        out = np.where(m >= loss.gamma_hi, 1.0, out)
    return _maybe_scalar(out if not scalar_in else out[()], scalar_in)


def _require_smooth(loss: LossSpec):
    if not loss.smooth:
        raise LossNotSmoothError(
            f"loss {loss.name!r} has a piecewise-linear potential well; "
            "use the closed-form 0-1 machinery instead of the smooth engine"
        )


def tangent_intercept(loss: LossSpec, x):
    """The value at 0 of the well's tangent at x: potential(x) - x * slope(x).
    Nonnegative; decreasing for x >= 0 and increasing for x < 0."""
    _require_smooth(loss)
    x = _as_float_array(x)
    return _maybe_scalar(
        np.asarray(potential(loss, x) - x * potential_slope(loss, x), dtype=float),
        x.ndim == 0,
    )


def tangent_intercept_inverse(loss: LossSpec, lam: float, branch: int) -> float:
    """The point on the requested side of the well (branch >= 0: x >= 0,
    branch < 0: x < 0) whose tangent intercept equals lam, by monotone
    bisection with an expanding bracket.  Requires 0 < lam <= intercept at 0.
    """
    _require_smooth(loss)
    lam = float(lam)
    phi0 = tangent_intercept(loss, 0.0)
    if not (0.0 < lam <= phi0):
        raise ValueError(
            f"tangent intercept value {lam:g} outside (0, {phi0:g}]; no solution "
            "on either branch"
        )
    sign = 1.0 if branch >= 0 else -1.0
    hi = sign  # |x| upper end, expanded until the intercept falls below lam
    for _ in range(300):
        if tangent_intercept(loss, hi) <= lam:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tangent_intercept(loss, mid) > lam:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= 1e-13 * max(1.0, abs(hi)):
            break
    mid = 0.5 * (lo + hi)
    return float(mid)


def prob_marginal_cost(loss: LossSpec, m: float, p: float) -> float:
    """Marginal cost (in potential units) of raising the prediction
    probability at score m: the tangent intercept at m/p.  Increasing in p,
    and vanishing as p -> 0."""
    _require_smooth(loss)
    p = float(p)
    if p <= 0.0:
        raise ValueError("prediction probability must be positive")
    return float(tangent_intercept(loss, float(m) / p))


def prob_for_marginal_cost(loss: LossSpec, m: float, lam: float) -> float:
    """Inverse of the marginal cost in p, clamped to (0, 1]: the prediction
    probability at which the marginal cost reaches lam.  Returns 1 when even
    full prediction costs less than lam at the margin, and 0 in the
    zero-score limit when lam is below the intercept at 0."""
    _require_smooth(loss)
    lam = float(lam)
    m = float(m)
    if lam <= 0.0:
        raise ValueError("marginal cost must be positive")
    if lam >= prob_marginal_cost(loss, m, 1.0):
        return 1.0
    if m == 0.0:
        # limit of |m| / |x*| as m -> 0 with x* bounded away from 0
        return 0.0
    x_star = tangent_intercept_inverse(loss, lam, 1 if m > 0 else -1)
    return abs(m) / abs(x_star)


def abstaining_potential(loss: LossSpec, m: float, lam: float) -> float:
    """Potential well of the fixed-cost abstaining game at cost lam/2:

        m * slope(x*(lam))    while lam is below the full-prediction marginal
                              cost at m (the classifier abstains with some
                              probability), where x* inverts the tangent
                              intercept on m's side of the well;
        potential(m) - lam    otherwise (full prediction).

    Convex in m; concave and nonincreasing in lam, with d/d(lam) equal to the
    negated optimal prediction probability.
    """
    _require_smooth(loss)
    m = float(m)
    lam = float(lam)
    if lam < 0.0:
        raise ValueError("abstain multiplier must be nonnegative")
    if lam == 0.0:
        return abs(m)
    if lam <= prob_marginal_cost(loss, m, 1.0):
        if m == 0.0:
            return 0.0
        x_star = tangent_intercept_inverse(loss, lam, 1 if m > 0 else -1)
        return m * float(potential_slope(loss, x_star))
    return float(potential(loss, m)) - lam


def abstaining_potential_subgrad(loss: LossSpec, m, lam: float):
    """Subgradient in m of the abstaining potential, with the selection 0 at
    m = 0.  Constant on each side while abstention is active (the tangent
    slope at the intercept inverse), and the well's own slope beyond."""
    _require_smooth(loss)
    lam = float(lam)
    if lam < 0.0:
        raise ValueError("abstain multiplier must be nonnegative")
    m = _as_float_array(m)
    scalar_in = m.ndim == 0
    m = np.atleast_1d(m)
    out = np.empty(m.shape)
    if lam == 0.0:
        out = np.sign(m)
        return _maybe_scalar(out if not scalar_in else out[()], scalar_in)
    slope_pos = None
    slope_neg = None
    full = lam > tangent_intercept(loss, m)  # beyond: predicts with p = 1
    out[full] = potential_slope(loss, m[full])
    for idx in np.nonzero(~full)[0]:
        mi = m[idx]
        if mi == 0.0:
            out[idx] = 0.0
        elif mi > 0.0:
            if slope_pos is None:
                slope_pos = float(
                    potential_slope(loss, tangent_intercept_inverse(loss, lam, 1))
                )
            out[idx] = slope_pos
        else:
            if slope_neg is None:
                slope_neg = float(
                    potential_slope(loss, tangent_intercept_inverse(loss, lam, -1))
                )
            out[idx] = slope_neg
    return _maybe_scalar(out if not scalar_in else out[()], scalar_in)


# ---------------------------------------------------------------------------
# Built-in losses


def zero_one_loss() -> LossSpec:
    """Plain classification error: partial losses (1 -+ g)/2.  The induced
    well is piecewise linear, so the smooth engine rejects it; the closed
    forms in `potentials` cover this loss."""
    return LossSpec(
        name="zero_one",
        loss_plus=lambda g: 0.5 * (1.0 - np.asarray(g, dtype=float)),
        loss_minus=lambda g: 0.5 * (1.0 + np.asarray(g, dtype=float)),
        dloss_plus=lambda g: np.full_like(np.asarray(g, dtype=float), -0.5),
        dloss_minus=lambda g: np.full_like(np.asarray(g, dtype=float), 0.5),
        gamma_lo=-1.0,
        gamma_hi=1.0,
        smooth=False,
    )


def asymmetric_loss(cost_fn: float, cost_fp: float) -> LossSpec:
    """Classification error with unequal false-negative / false-positive
    costs.  With both costs 1 this is exactly the plain 0-1 loss."""
    cfn = float(cost_fn)
    cfp = float(cost_fp)
    if cfn <= 0.0 or cfp <= 0.0:
        raise ValueError("misclassification costs must be positive")
    return LossSpec(
        name="asymmetric_cost",
        loss_plus=lambda g: 0.5 * cfn * (1.0 - np.asarray(g, dtype=float)),
        loss_minus=lambda g: 0.5 * cfp * (1.0 + np.asarray(g, dtype=float)),
        dloss_plus=lambda g: np.full_like(np.asarray(g, dtype=float), -0.5 * cfn),
        dloss_minus=lambda g: np.full_like(np.asarray(g, dtype=float), 0.5 * cfp),
        gamma_lo=-cfn,
        gamma_hi=cfp,
        smooth=False,
        params=(cfn, cfp),
    )


def log_loss() -> LossSpec:
    """Logarithmic loss on probability-style predictions: -ln((1 +- g)/2).
    The score range is all of R, so the well's outer branches never
    activate."""

    def lp(g):
        g = np.asarray(g, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log(0.5 * (1.0 + g))

    def lm(g):
        g = np.asarray(g, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log(0.5 * (1.0 - g))

    def dlp(g):
        g = np.asarray(g, dtype=float)
        with np.errstate(divide="ignore"):
            return -1.0 / (1.0 + g)

    def dlm(g):
        g = np.asarray(g, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 / (1.0 - g)

    return LossSpec(
        name="log_loss",
        loss_plus=lp,
        loss_minus=lm,
        dloss_plus=dlp,
        dloss_minus=dlm,
        gamma_lo=-np.inf,
        gamma_hi=np.inf,
        smooth=True,
    )


def loss_by_name(spec: str) -> LossSpec:
    """Parse a loss selector: ``zero_one``, ``log_loss``, or
    ``asymmetric_cost:CFN,CFP``."""
    name, _, argtext = spec.partition(":")
    name = name.strip()
    if name == "zero_one":
        return zero_one_loss()
    if name == "log_loss":
        return log_loss()
    if name == "asymmetric_cost":
        try:
            cfn, cfp = (float(v) for v in argtext.split(","))
        except ValueError:
            raise ValueError(
                f"asymmetric_cost needs two parameters, e.g. 'asymmetric_cost:1.5,0.7'; got {spec!r}"
            ) from None
        return asymmetric_loss(cfn, cfp)
    raise ValueError(f"unknown loss {name!r} (choose zero_one, log_loss, or asymmetric_cost:CFN,CFP)")
