"""Core data model: prediction matrices, correlation bounds, weights, decisions.

All types are immutable after construction (arrays are copied and frozen), so
instances are safe to share across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EnsembleMatrix",
    "CorrelationVector",
    "WeightVector",
    "Decision",
    "TrueLabeling",
    "scores",
    "validate_instance",
]


def _frozen_array(values, dtype=float, ndim=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class EnsembleMatrix:
    """Ensemble predictions on the unlabeled set: one row per member, one
    column per example.  Entries live in [-1, 1] unless the matrix came out of
    the specialist reweighting, which can scale them outside that range
    (``reweighted=True`` relaxes the range check).
    """

    entries: np.ndarray
    reweighted: bool = False
    member_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = _frozen_array(self.entries, ndim=2)
        object.__setattr__(self, "entries", arr)
        p, n = arr.shape
        if p < 1 or n < 1:
            raise ValueError("need at least one ensemble member and one example")
        if not self.reweighted and (np.any(arr > 1.0) or np.any(arr < -1.0)):
            raise ValueError("prediction entries must lie in [-1, 1]")
        if self.member_names is not None:
            names = tuple(self.member_names)
            if len(names) != p:
                raise ValueError("member_names length must match the number of rows")
            object.__setattr__(self, "member_names", names)

    @property
    def n_members(self) -> int:
        return self.entries.shape[0]

    @property
    def n_examples(self) -> int:
        return self.entries.shape[1]

    def example(self, j: int) -> np.ndarray:
        """Column j: the vector of all members' predictions on example j."""
        return self.entries[:, j]

    def member(self, i: int) -> np.ndarray:
        """Row i: member i's predictions across all examples."""
        return self.entries[i, :]


@dataclass(frozen=True)
class CorrelationVector:
    """Per-member lower bounds on the average agreement between the member's
    predictions and the true labels.  A correlation against labels in
    [-1, 1]^n cannot exceed 1, so entries above 1 are rejected; entries at or
    below 0 are kept (conservative corrections can produce them, and the
    optimizer simply ignores such members).
    """

    b: np.ndarray
    allow_infeasible: bool = False

    def __post_init__(self):
        arr = _frozen_array(self.b, ndim=1)
        object.__setattr__(self, "b", arr)
        if arr.size < 1:
            raise ValueError("need at least one bound")
        if np.any(arr > 1.0 + 1e-12):
            if self.allow_infeasible:
                warnings.warn(
                    "correlation bound above 1 is unattainable; the constraint "
                    "set is empty unless it is loosened",
                    stacklevel=2,
                )
            else:
                raise ValueError("correlation bounds cannot exceed 1")

    def __len__(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class WeightVector:
    """Dual weights over ensemble members.  The games with per-member
    inequality constraints require nonnegative weights; the L1-regularized
    form works over all of R^p (``orthant_constrained=False``).
    """

    sigma: np.ndarray
    orthant_constrained: bool = True

    def __post_init__(self):
        arr = _frozen_array(self.sigma, ndim=1)
        object.__setattr__(self, "sigma", arr)
        if self.orthant_constrained and np.any(arr < 0.0):
            raise ValueError("orthant-constrained weights must be nonnegative")

    def __len__(self) -> int:
        return self.sigma.size


@dataclass(frozen=True)
class Decision:
    """Per-example output: predict with probability ``predict_prob``, and when
    predicting, emit the (possibly randomized) label ``prediction``.
    """

    score: float
    predict_prob: float
    prediction: float

    def __post_init__(self):
        if not (0.0 <= self.predict_prob <= 1.0):
            raise ValueError("predict_prob must lie in [0, 1]")
        if not (-1.0 <= self.prediction <= 1.0):
            raise ValueError("prediction must lie in [-1, 1]")

    @property
    def abstain_prob(self) -> float:
        return 1.0 - self.predict_prob


@dataclass(frozen=True)
class TrueLabeling:
    """A (randomized) labeling of the unlabeled set, used on the oracle side
    of tests.  Values in [-1, 1] encode label probabilities.
    """

    z: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.z, ndim=1)
        object.__setattr__(self, "z", arr)
        if np.any(np.abs(arr) > 1.0 + 1e-12):
            raise ValueError("labels must lie in [-1, 1]")

    def feasible_for(self, F: EnsembleMatrix, b: CorrelationVector, tol: float = 1e-9) -> bool:
        """Whether this labeling satisfies every correlation constraint."""
        avg = F.entries @ self.z / F.n_examples
        return bool(np.all(avg >= b.b - tol))


def scores(F: EnsembleMatrix, sigma: WeightVector | np.ndarray) -> np.ndarray:
    """Weighted ensemble score of every example: entry j is the weight vector
    dotted with example j's prediction column.

    Accumulation is compensated (Neumaier) over members so the result does not
    depend on evaluation order beyond ~1e-12.
    """
    w = sigma.sigma if isinstance(sigma, WeightVector) else np.asarray(sigma, dtype=float)
    if w.ndim != 1 or w.size != F.n_members:
        raise ValueError(
            f"weight length {w.size} does not match ensemble size {F.n_members}"
        )
    total = np.zeros(F.n_examples)
    comp = np.zeros(F.n_examples)
    for i in range(F.n_members):
        term = w[i] * F.entries[i]
        summed = total + term
        comp += np.where(
            np.abs(total) >= np.abs(term),
            (total - summed) + term,
            (term - summed) + total,
        )
        total = summed
    return total + comp


def validate_instance(
    F_entries,
    b_values,
    check_feasibility: bool = False,
) -> tuple[str, ...]:
    """Check raw instance data before constructing the typed objects.

    Returns a tuple of human-readable diagnostics; empty means the instance is
    well formed.  With ``check_feasibility`` (supported for n <= 3), the label
    polytope is additionally checked for nonemptiness by exact vertex
    enumeration--an empty polytope signals an inconsistent bound vector.
    """
    problems: list[str] = []
    F = np.asarray(F_entries, dtype=float)
    b = np.asarray(b_values, dtype=float)
    if F.ndim != 2:
        problems.append(f"prediction matrix must be 2-dimensional, got shape {F.shape}")
        return tuple(problems)
    if b.ndim != 1:
        problems.append(f"bound vector must be 1-dimensional, got shape {b.shape}")
        return tuple(problems)
    if not np.all(np.isfinite(F)):
        problems.append("prediction matrix has non-finite entries")
    if not np.all(np.isfinite(b)):
        problems.append("bound vector has non-finite entries")
    if problems:
        return tuple(problems)
    if np.any(np.abs(F) > 1.0):
        bad = np.argwhere(np.abs(F) > 1.0)[0]
        problems.append(
            f"prediction entry at row {bad[0]}, column {bad[1]} lies outside [-1, 1]"
        )
    if F.shape[0] != b.size:
        problems.append(
            f"bound vector length {b.size} does not match ensemble size {F.shape[0]}"
        )
    if np.any(b > 1.0 + 1e-12):
        i = int(np.argmax(b))
        problems.append(f"bound {b[i]:g} for member {i} exceeds 1 (infeasible)")
    if check_feasibility and not problems:
        if F.shape[1] > 3:
            problems.append("feasibility check supported only for n <= 3")
        else:
            from .oracle import TinyInstance, polytope_vertices

            inst = TinyInstance(
                EnsembleMatrix(F),
                CorrelationVector(b),
            )
            if len(polytope_vertices(inst)) == 0:
                problems.append("no labeling satisfies the correlation bounds (empty polytope)")
    return tuple(problems)
