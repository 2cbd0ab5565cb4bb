"""Monte Carlo and exact evaluation of the KL risk of the two MLEs.

Randomness comes from numpy's Philox generator keyed by ``(seed, block)``.
Replicates are cut into fixed-size blocks whose boundaries do not depend on
the worker count, and block results are reduced in block order, so the
output is identical for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels
from .errors import AllDiscardedError, TooLargeError, ValidationError
from .table import ProbTable

ENUMERATION_LIMIT = 10**7
_MAX_ROWS_PER_DRAW = 1 << 18
PATH_BLOCK = 256


class Model(str, Enum):
    FULL = "full"
    SUBMODEL = "submodel"


class DiscardPolicy(str, Enum):
    SUBMODEL_GROUPS = "submodel-groups"
    ALL_CELLS = "all-cells"
    NONE = "none"


_POLICY_CODE = {DiscardPolicy.NONE: 0, DiscardPolicy.SUBMODEL_GROUPS: 1, DiscardPolicy.ALL_CELLS: 2}


def default_policy(model: Model | str) -> DiscardPolicy:
    """Group-count rule for the submodel; no conditioning for the full model."""
    return DiscardPolicy.SUBMODEL_GROUPS if Model(model) is Model.SUBMODEL else DiscardPolicy.NONE


def _resolve(model, policy) -> tuple[Model, DiscardPolicy]:
    model = Model(model)
    policy = default_policy(model) if policy is None else DiscardPolicy(policy)
    if model is Model.SUBMODEL and policy is DiscardPolicy.NONE:
        raise ValidationError("the submodel MLE needs every group observed; use a discarding policy")
    return model, policy


@dataclass(frozen=True)
class SimConfig:
    replicates: int = 10_000
    seed: int = 0
    # None picks the model's default (see default_policy)
    discard_policy: DiscardPolicy | str | None = None
    workers: int = 1
    block_size: int = 1024
    max_draw_factor: int = 1000
    backend: str | None = None

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if self.block_size < 1:
            raise ValidationError("block_size must be >= 1")


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    std_error: float
    kept: int
    discarded: int

    @property
    def draws(self) -> int:
        return self.kept + self.discarded


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block of replicates."""
    key = np.array([seed % (1 << 64), block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _known(m: ProbTable, known_sums) -> np.ndarray:
    if known_sums is None:
        return np.ascontiguousarray(m.group_sums)
    c = np.asarray(known_sums, dtype=np.float64).ravel()
    if c.size != m.n_groups:
        raise ValidationError(f"{c.size} known sums for {m.n_groups} groups")
    if np.any(c <= 0) or abs(c.sum() - 1) > 1e-9:
        raise ValidationError("known sums must be positive and add to one")
    return c


def _blocks(total: int, size: int) -> list[int]:
    return [min(size, total - start) for start in range(0, total, size)]


def _map(fn, items, workers: int) -> list:
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _summarise(values: np.ndarray, discarded: int) -> RiskEstimate:
    kept = values.size
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(kept)) if kept > 1 else math.nan
    return RiskEstimate(mean, se, kept, discarded)


def simulate_risk(
    m: ProbTable,
    model: Model | str,
    n: int,
    cfg: SimConfig = SimConfig(),
    known_sums=None,
) -> RiskEstimate:
    """Average KL of the MLE over ``cfg.replicates`` kept multinomial draws.

    Draws that violate the discard policy are replaced from the same block
    stream until the block quota is met; the number replaced is reported.
    """
    model, policy = _resolve(model, cfg.discard_policy)
    if n < 1:
        raise ValidationError("sample size must be >= 1")
    k = kernels.get(cfg.backend)
    probs = m.probs
    logm = np.log(probs)
    group_of = np.ascontiguousarray(m.group_of)
    known = _known(m, known_sums)
    code = _POLICY_CODE[policy]
    model_code = 0 if model is Model.FULL else 1
    quotas = _blocks(cfg.replicates, cfg.block_size)

    def run(b: int) -> tuple[np.ndarray, int]:
        quota = quotas[b]
        rng = block_generator(cfg.seed, b)
        kept_rows: list[np.ndarray] = []
        have = discarded = drawn = 0
        cap = cfg.max_draw_factor * quota
        rate = 1.0
        while have < quota:
            if drawn >= cap:
                raise AllDiscardedError(
                    f"only {have} of {quota} draws kept after {drawn} attempts at n={n}; "
                    f"the discard policy {policy.value!r} rejects nearly every sample"
                )
            need = quota - have
            size = min(max(need, math.ceil(1.2 * need / rate)), _MAX_ROWS_PER_DRAW, cap - drawn)
            counts = rng.multinomial(n, probs, size=size)
            drawn += size
            ok = k.keep_mask(counts, group_of, known.size, code)
            idx = np.flatnonzero(ok)
            if idx.size >= need:
                # stop the accounting at the last draw actually used
                last = idx[need - 1]
                discarded += int(last + 1 - need)
                kept_rows.append(counts[idx[:need]])
                have = quota
                break
            discarded += size - idx.size
            kept_rows.append(counts[idx])
            have += idx.size
            rate = max(idx.size / size, 1.0 / cfg.max_draw_factor)
        rows = np.ascontiguousarray(np.concatenate(kept_rows))
        return k.kl_rows(rows, logm, group_of, known, model_code), discarded

    results = _map(run, list(range(len(quotas))), cfg.workers)
    values = np.concatenate([r[0] for r in results])
    return _summarise(values, sum(r[1] for r in results))


def outcome_count(n: int, cells: int) -> int:
    return math.comb(n + cells - 1, cells - 1)


def exact_risk(
    m: ProbTable,
    model: Model | str,
    n: int,
    condition: DiscardPolicy | str | None = None,
    known_sums=None,
    backend: str | None = None,
) -> float:
    """Risk by summing over every outcome, conditioned on the kept event."""
    model, policy = _resolve(model, condition)
    if n < 1:
        raise ValidationError("sample size must be >= 1")
    size = outcome_count(n, m.n_cells)
    if size > ENUMERATION_LIMIT:
        raise TooLargeError(f"{size} outcomes exceeds the enumeration limit {ENUMERATION_LIMIT}")
    k = kernels.get(backend)
    acc, kept_mass, _ = k.exact_sums(
        n,
        np.log(m.probs),
        np.ascontiguousarray(m.group_of),
        _known(m, known_sums),
        0 if model is Model.FULL else 1,
        _POLICY_CODE[policy],
    )
    if kept_mass <= 0:
        raise AllDiscardedError(f"no outcome of size {n} survives the {policy.value!r} policy")
    return acc / kept_mass


def _event_probs(m: ProbTable, policy: DiscardPolicy) -> np.ndarray:
    if policy is DiscardPolicy.SUBMODEL_GROUPS:
        return m.group_sums
    if policy is DiscardPolicy.ALL_CELLS:
        return m.probs
    return np.zeros(0)


def discard_probability_bound(m: ProbTable, n: int, policy: DiscardPolicy | str) -> float:
    """Union bound on the chance that a draw is discarded.

    Sums ``(1 - p)**n`` over the events the policy requires to be observed;
    it can exceed one for small ``n``.
    """
    p = _event_probs(m, DiscardPolicy(policy))
    p = p[p < 1.0]
    return float(np.sum(np.exp(n * np.log1p(-p))))


@dataclass(frozen=True)
class PathEstimate:
    """Risk estimates at every ``n`` in ``n_values`` from nested samples."""

    n_values: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    kept: np.ndarray

    def at(self, n: int) -> float:
        return float(self.mean[n - int(self.n_values[0])])


@dataclass(frozen=True)
class PathRequest:
    model: Model | str
    n_lo: int
    n_hi: int
    discard_policy: DiscardPolicy | str | None = None


def simulate_paths(
    m: ProbTable,
    requests: Sequence[PathRequest],
    cfg: SimConfig = SimConfig(),
    known_sums=None,
) -> list[PathEstimate]:
    """Risk curves from samples grown one observation at a time.

    Each replicate is a single sequence of observations; the sample of size
    ``n`` is its first ``n`` entries. All requests share the sequences, so
    they are evaluated under common random numbers. Discarding is decided
    separately at every ``n`` and nothing is redrawn.
    """
    if not requests:
        return []
    resolved = []
    for req in requests:
        model, policy = _resolve(req.model, req.discard_policy)
        if not 1 <= req.n_lo <= req.n_hi:
            raise ValidationError(f"bad sample-size range {req.n_lo}..{req.n_hi}")
        resolved.append((0 if model is Model.FULL else 1, _POLICY_CODE[policy], req.n_lo, req.n_hi))
    n_max = max(r[3] for r in resolved)
    k = kernels.get(cfg.backend)
    cum = np.cumsum(m.probs)
    logm = np.log(m.probs)
    group_of = np.ascontiguousarray(m.group_of)
    known = _known(m, known_sums)
    quotas = _blocks(cfg.replicates, PATH_BLOCK)

    def run(b: int):
        rng = block_generator(cfg.seed, b)
        u = rng.random((quotas[b], n_max))
        labels = np.minimum(np.searchsorted(cum, u, side="right"), m.n_cells - 1)
        out = []
        for model_code, code, lo, hi in resolved:
            lab = np.ascontiguousarray(labels[:, :hi])
            out.append(k.path_curves(lab, logm, group_of, known, model_code, code, lo))
        return out

    per_block = _map(run, list(range(len(quotas))), cfg.workers)
    estimates = []
    for i, (_, _, lo, hi) in enumerate(resolved):
        s1 = np.zeros(hi - lo + 1)
        s2 = np.zeros(hi - lo + 1)
        kept = np.zeros(hi - lo + 1, dtype=np.int64)
        for blk in per_block:
            s1 += blk[i][0]
            s2 += blk[i][1]
            kept += blk[i][2]
        with np.errstate(invalid="ignore", divide="ignore"):
            mean = s1 / kept
            var = (s2 - kept * mean * mean) / (kept - 1)
            se = np.sqrt(np.maximum(var, 0.0) / kept)
        estimates.append(PathEstimate(np.arange(lo, hi + 1), mean, se, kept))
    return estimates
