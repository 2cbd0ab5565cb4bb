"""Second-order KL risk expansions ``a/n + b/n**2`` for the MLE.

Covers the unrestricted multinomial, a two-stage model with a full first
stage and caller-described second stages, the same model with the group
sums known, and the full-minus-submodel difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .table import ProbTable


@dataclass(frozen=True)
class RiskExpansion:
    """Risk approximated as ``a/n + b/n**2``; the remainder is dropped."""

    a: float
    b: float

    def __call__(self, n: float) -> float:
        return self.a / n + self.b / (n * n)

    def __sub__(self, other: "RiskExpansion") -> "RiskExpansion":
        return RiskExpansion(self.a - other.a, self.b - other.b)

    def __add__(self, other: "RiskExpansion") -> "RiskExpansion":
        return RiskExpansion(self.a + other.a, self.b + other.b)


def eval_risk(e: RiskExpansion, n: int) -> float:
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    return e(n)


def harmonic_sum(m: ProbTable) -> float:
    """Sum of reciprocal cell probabilities."""
    return float(np.sum(1.0 / m.probs))


def group_harmonic_sum(m: ProbTable) -> float:
    """Sum of reciprocal group probabilities; never below ``I**2``."""
    return float(np.sum(1.0 / m.group_sums))


def full_expansion(m: ProbTable) -> RiskExpansion:
    p = m.n_cells - 1
    return RiskExpansion(p / 2, (harmonic_sum(m) - 1) / 12)


def second_stage_A(m: ProbTable, i: int) -> float:
    """Second-order coefficient (times 24) of a full within-group model."""
    g = m.group_probs(i)
    return 2.0 * (float(g.sum()) * float(np.sum(1.0 / g)) - 1.0)


def full_second_stages(m: ProbTable) -> tuple[np.ndarray, np.ndarray]:
    """Per-group dimensions and A-coefficients when no group is restricted internally."""
    s = m.group_sizes - 1
    A = np.array([second_stage_A(m, i) for i in range(m.n_groups)])
    return s, A


def _stage_args(m: ProbTable, s, A) -> tuple[np.ndarray, np.ndarray]:
    if s is None and A is None:
        return full_second_stages(m)
    if s is None or A is None:
        raise ValidationError("give both per-group dimensions and coefficients, or neither")
    s = np.asarray(s, dtype=np.float64).ravel()
    A = np.asarray(A, dtype=np.float64).ravel()
    if s.size != m.n_groups or A.size != m.n_groups:
        raise ValidationError(f"expected {m.n_groups} per-group values")
    if np.any(s < 0) or not np.all(np.isfinite(A)):
        raise ValidationError("dimensions must be >= 0 and coefficients finite")
    return s, A


def _require_two_stage(m: ProbTable) -> None:
    if m.n_groups < 2:
        raise ValidationError("a two-stage model needs at least two groups")


def two_stage_expansion(
    m: ProbTable, s: Sequence[float] | None = None, A: Sequence[float] | None = None
) -> RiskExpansion:
    """Risk of the MLE when the group probabilities are estimated too."""
    _require_two_stage(m)
    s, A = _stage_args(m, s, A)
    inv = 1.0 / m.group_sums
    p_prime = m.n_groups - 1 + float(s.sum())
    return RiskExpansion(p_prime / 2, (float(np.sum(inv * (A + 2))) - 2) / 24)


def submodel_expansion(
    m: ProbTable, s: Sequence[float] | None = None, A: Sequence[float] | None = None
) -> RiskExpansion:
    """Risk of the MLE when every group probability is known."""
    _require_two_stage(m)
    s, A = _stage_args(m, s, A)
    ms = m.group_sums
    b = float(np.sum((A + 12 * (1 - ms) * s) / ms)) / 24
    return RiskExpansion(float(s.sum()) / 2, b)


def submodel_expansion_full(m: ProbTable) -> RiskExpansion:
    """Known-group-sums risk written directly in the cell probabilities.

    Algebraically the same as :func:`submodel_expansion` with full second
    stages; kept separate as an independent check.
    """
    _require_two_stage(m)
    I = m.n_groups
    J = m.group_sizes
    p_prime = m.n_cells - 1
    b = (harmonic_sum(m) + float(np.sum((6 * J - 7) / m.group_sums)) - 6 * (p_prime + 1 - I)) / 12
    return RiskExpansion((p_prime - (I - 1)) / 2, b)


def risk_difference(m: ProbTable, s: Sequence[float] | None = None) -> RiskExpansion:
    """Full-model risk minus known-sums risk.

    Without ``s`` every second stage is taken as full. With ``s`` the general
    form is used; the within-group coefficients cancel so only the
    dimensions matter.
    """
    _require_two_stage(m)
    I = m.n_groups
    inv = 1.0 / m.group_sums
    if s is None:
        J = m.group_sizes
        p_prime = m.n_cells - 1
        b = (-float(np.sum(inv * (6 * J - 7))) + 6 * (p_prime - I) + 5) / 12
    else:
        s = np.asarray(s, dtype=np.float64).ravel()
        b = (group_harmonic_sum(m) - 1 - 6 * float(np.sum((inv - 1) * s))) / 12
    return RiskExpansion((I - 1) / 2, b)


def negativity_threshold(m: ProbTable) -> int:
    """Largest ``n`` at which the expansion says the known sums hurt.

    Solved in exact rational arithmetic on the float inputs so an integer
    root is excluded (the difference is zero there, not negative).
    Returns 0 when the difference is never negative.
    """
    _require_two_stage(m)
    I = m.n_groups
    J = m.group_sizes
    p_prime = m.n_cells - 1
    acc = Fraction(6 * (p_prime - I) + 5)
    for Ji, mi in zip(J, m.group_sums):
        acc -= Fraction(int(6 * Ji - 7)) / Fraction(float(mi))
    b = acc / 12
    a = Fraction(I - 1, 2)
    if b >= 0:
        return 0
    root = -b / a
    return max(math.ceil(root) - 1, 0)


def dimension_ratio(m: ProbTable) -> float:
    """Large-sample limit of submodel risk over full-model risk."""
    p = m.n_cells - 1
    return (p - (m.n_groups - 1)) / p
