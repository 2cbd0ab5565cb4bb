"""Grouped probability tables, KL divergence and the two MLEs.

Cells are stored flat (row-major for 2-D input). A grouping is a partition
of the flat cell indices; the known-group-sums submodel fixes the total
probability of every group and leaves the within-group split free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    EmptySampleError,
    NonPositiveCellError,
    OverlappingGroupsError,
    ShapeMismatchError,
    SumNotOneError,
    ValidationError,
    ZeroGroupCountError,
    ZeroGroupMassError,
)

SUM_TOL = 1e-9
RENORMALIZE_TOL = 1e-3

GroupSpec = Union[None, str, Sequence[Sequence[int]]]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _partition(spec: GroupSpec, shape: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    size = int(np.prod(shape))
    if spec is None:
        return (tuple(range(size)),)
    if isinstance(spec, str):
        key = spec.strip().lower()
        if len(shape) != 2:
            raise ValidationError(f"grouping {spec!r} needs a 2-D table, got shape {shape}")
        idx = np.arange(size).reshape(shape)
        if key in ("cols", "col", "columns", "by-column"):
            return tuple(tuple(int(v) for v in idx[:, j]) for j in range(shape[1]))
        if key in ("rows", "row", "by-row"):
            return tuple(tuple(int(v) for v in idx[i, :]) for i in range(shape[0]))
        raise ValidationError(f"unknown grouping {spec!r}")

    groups: list[tuple[int, ...]] = []
    seen: dict[int, int] = {}
    for gi, grp in enumerate(spec):
        cells = tuple(int(c) for c in grp)
        if not cells:
            raise ValidationError(f"group {gi} is empty")
        for c in cells:
            if not 0 <= c < size:
                raise ValidationError(f"cell index {c} in group {gi} outside 0..{size - 1}")
            if c in seen:
                raise OverlappingGroupsError(
                    f"cell {c} appears in groups {seen[c]} and {gi}"
                )
            seen[c] = gi
        groups.append(cells)
    # cells named in no restriction form one residual group
    rest = tuple(c for c in range(size) if c not in seen)
    if rest:
        groups.append(rest)
    return tuple(groups)


@dataclass(frozen=True, eq=False)
class ProbTable:
    """Strictly positive cell probabilities with a partition into groups.

    Build instances through :func:`validate_table` or :meth:`from_groups`;
    the constructor trusts its arguments.
    """

    probs: np.ndarray
    groups: tuple[tuple[int, ...], ...]
    shape: tuple[int, ...]
    group_of: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        g = np.empty(self.probs.size, dtype=np.int64)
        for i, cells in enumerate(self.groups):
            g[list(cells)] = i
        object.__setattr__(self, "group_of", _readonly(g))

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[float]], renormalize: bool = False) -> "ProbTable":
        """Table whose cells are listed group by group, e.g. ``[[.25, .25], [.5]]``."""
        flat: list[float] = []
        index: list[list[int]] = []
        for grp in groups:
            index.append(list(range(len(flat), len(flat) + len(grp))))
            flat.extend(float(v) for v in grp)
        return validate_table(flat, index, renormalize=renormalize)

    @property
    def n_cells(self) -> int:
        return int(self.probs.size)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def group_sizes(self) -> np.ndarray:
        return np.array([len(g) for g in self.groups], dtype=np.int64)

    @property
    def group_sums(self) -> np.ndarray:
        return np.bincount(self.group_of, weights=self.probs, minlength=self.n_groups)

    def group_probs(self, i: int) -> np.ndarray:
        return self.probs[list(self.groups[i])]

    def conditional(self, i: int) -> np.ndarray:
        """Within-group distribution of group ``i``."""
        g = self.group_probs(i)
        return g / g.sum()

    def matrix(self) -> np.ndarray:
        return self.probs.reshape(self.shape)

    def regroup(self, groups: GroupSpec) -> "ProbTable":
        return ProbTable(self.probs, _partition(groups, self.shape), self.shape)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbTable):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.groups == other.groups
            and np.array_equal(self.probs, other.probs)
        )

    __hash__ = None  # type: ignore[assignment]


def validate_table(
    raw,
    groups: GroupSpec = None,
    renormalize: bool = False,
) -> ProbTable:
    """Check ``raw`` and return it as a :class:`ProbTable`.

    ``groups`` is ``None`` (one group), ``"cols"``/``"rows"`` for a 2-D
    table, or explicit lists of flat (row-major) cell indices. Cells left out
    of an explicit partition form a trailing residual group.

    A total within 1e-9 of one is accepted (and rescaled if it is off by
    more than 1e-12). With ``renormalize`` a total within 1e-3 is rescaled
    proportionally, which is what rounded published tables need.
    """
    arr = np.array(raw, dtype=np.float64)
    if arr.ndim == 0 or arr.size == 0:
        raise ValidationError("table must contain at least one cell")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("table entries must be finite")
    shape = tuple(int(s) for s in arr.shape)
    flat = arr.ravel()
    bad = np.flatnonzero(flat <= 0)
    if bad.size:
        pos = np.unravel_index(int(bad[0]), shape)
        raise NonPositiveCellError(
            f"cell {tuple(int(p) for p in pos)} has probability {flat[bad[0]]!r}; all cells must be > 0"
        )
    total = float(flat.sum())
    err = abs(total - 1.0)
    if err > SUM_TOL and not (renormalize and err <= RENORMALIZE_TOL):
        hint = "" if renormalize else " (pass renormalize=True for rounded tables)"
        raise SumNotOneError(f"cells sum to {total!r}{hint}")
    if err > 1e-12:
        flat = flat / total
    return ProbTable(_readonly(flat), _partition(groups, shape), shape)


@dataclass(frozen=True, eq=False)
class Counts:
    """Cell counts sharing the flat layout and grouping of a table."""

    values: np.ndarray
    groups: tuple[tuple[int, ...], ...]

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]]) -> "Counts":
        flat: list[int] = []
        index: list[tuple[int, ...]] = []
        for grp in groups:
            index.append(tuple(range(len(flat), len(flat) + len(grp))))
            flat.extend(int(v) for v in grp)
        return cls(_counts_array(flat), tuple(index))

    @classmethod
    def for_table(cls, x, table: ProbTable) -> "Counts":
        v = _counts_array(x)
        if v.size != table.n_cells:
            raise ShapeMismatchError(f"{v.size} counts for {table.n_cells} cells")
        return cls(v, table.groups)

    @property
    def n(self) -> int:
        return int(self.values.sum())

    @property
    def group_totals(self) -> np.ndarray:
        return np.array([self.values[list(g)].sum() for g in self.groups], dtype=np.int64)


def _counts_array(x) -> np.ndarray:
    v = np.asarray(x)
    if v.dtype.kind == "f":
        if not np.all(v == np.round(v)):
            raise ValidationError("counts must be integers")
    v = v.astype(np.int64).ravel()
    if np.any(v < 0):
        raise ValidationError("counts must be nonnegative")
    return _readonly(v)


def _values(x) -> np.ndarray:
    if isinstance(x, Counts):
        return x.values
    return _counts_array(x)


def _probs(m) -> np.ndarray:
    if isinstance(m, ProbTable):
        return m.probs
    return np.asarray(m, dtype=np.float64).ravel()


def kl_divergence(q, m) -> float:
    """``sum q log(q/m)`` with the estimate first and ``0 log 0 = 0``."""
    qv = np.asarray(q, dtype=np.float64).ravel()
    mv = _probs(m)
    if qv.shape != mv.shape:
        raise ShapeMismatchError(f"estimate has {qv.size} cells, table has {mv.size}")
    pos = qv > 0
    return float(np.sum(qv[pos] * np.log(qv[pos] / mv[pos])))


class ChainDecomposition(NamedTuple):
    first_stage: float
    per_group: tuple[float, ...]
    total: float


def chain_decompose(q, m: ProbTable) -> ChainDecomposition:
    """Split KL(q : m) into a group-sum term and weighted within-group terms."""
    qv = np.asarray(q, dtype=np.float64).ravel()
    if qv.shape != m.probs.shape:
        raise ShapeMismatchError(f"estimate has {qv.size} cells, table has {m.n_cells}")
    q_sums = np.bincount(m.group_of, weights=qv, minlength=m.n_groups)
    empty = np.flatnonzero(q_sums <= 0)
    if empty.size:
        raise ZeroGroupMassError(f"estimate puts no mass on group {int(empty[0])}")
    first = kl_divergence(q_sums, m.group_sums)
    per_group = tuple(
        float(q_sums[i]) * kl_divergence(qv[list(g)] / q_sums[i], m.conditional(i))
        for i, g in enumerate(m.groups)
    )
    return ChainDecomposition(first, per_group, first + sum(per_group))


def mle_full(x) -> np.ndarray:
    """Relative frequencies."""
    v = _values(x)
    n = int(v.sum())
    if n == 0:
        raise EmptySampleError("sample is empty")
    return v / n


def mle_submodel(x: Counts, known_sums) -> np.ndarray:
    """MLE when every group total is known: ``c_i * x_ij / x_i.``."""
    c = np.asarray(known_sums, dtype=np.float64).ravel()
    if c.size != len(x.groups):
        raise ShapeMismatchError(f"{c.size} known sums for {len(x.groups)} groups")
    if np.any(c <= 0) or abs(c.sum() - 1.0) > SUM_TOL:
        raise ValidationError("known sums must be positive and add to one")
    tot = x.group_totals
    zero = np.flatnonzero(tot == 0)
    if zero.size:
        raise ZeroGroupCountError(
            f"group {int(zero[0])} has no observations; discard this sample"
        )
    est = np.empty(x.values.size, dtype=np.float64)
    for i, g in enumerate(x.groups):
        idx = list(g)
        est[idx] = c[i] * x.values[idx] / tot[i]
    return est
