"""Vectorised numpy versions of the kernels.

Signatures mirror :mod:`subrisk.kernels.numba_impl` exactly. ``model`` is 0
for the full MLE and 1 for the known-sums MLE; ``policy`` is 0 (keep all),
1 (every group observed) or 2 (every cell observed).
"""

from __future__ import annotations

from math import comb

import numpy as np
from scipy.special import gammaln

_BLOCK = 200_000


def _group_totals(counts: np.ndarray, group_of: np.ndarray, n_groups: int) -> np.ndarray:
    onehot = np.zeros((group_of.size, n_groups), dtype=np.int64)
    onehot[np.arange(group_of.size), group_of] = 1
    return counts @ onehot


def keep_mask(counts, group_of, n_groups, policy):
    if policy == 0:
        return np.ones(counts.shape[0], dtype=np.bool_)
    if policy == 1:
        return np.all(_group_totals(counts, group_of, n_groups) > 0, axis=1)
    return np.all(counts > 0, axis=1)


def kl_rows(counts, logm, group_of, known, model):
    """KL of the MLE from the truth for each row of ``counts``.

    Rows whose submodel MLE is undefined come back as NaN.
    """
    x = counts.astype(np.float64)
    pos = x > 0
    logx = np.log(np.where(pos, x, 1.0))
    if model == 0:
        n = x.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(pos, (x / n) * (logx - np.log(n) - logm), 0.0)
        return term.sum(axis=1)
    tot = _group_totals(counts, group_of, known.size).astype(np.float64)
    t = tot[:, group_of]
    c = known[group_of]
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(pos, (c * x / t) * (np.log(c) + logx - np.log(t) - logm), 0.0)
    out = term.sum(axis=1)
    out[np.any(tot == 0, axis=1)] = np.nan
    return out


def path_curves(labels, logm, group_of, known, model, policy, n_lo):
    """Accumulate KL along nested samples built one observation at a time.

    ``labels[r, t]`` is the cell of observation ``t`` in replicate ``r``.
    Returns per-``n`` sums of KL, of KL squared and of kept replicates for
    ``n = n_lo .. labels.shape[1]``.
    """
    R, N = labels.shape
    k = logm.size
    I = known.size
    width = N - n_lo + 1
    s1 = np.zeros(width)
    s2 = np.zeros(width)
    kept = np.zeros(width, dtype=np.int64)

    xlogx = np.zeros(N + 1)
    xlogx[1:] = np.arange(1, N + 1) * np.log(np.arange(1, N + 1))
    logc = np.log(known)

    counts = np.zeros((R, k), dtype=np.int64)
    rows = np.arange(R)
    # within-group sums of x log x and x log m, and group totals
    S = np.zeros((R, I))
    T = np.zeros((R, I))
    tot = np.zeros((R, I), dtype=np.int64)
    nonzero_cells = np.zeros(R, dtype=np.int64)
    for step in range(N):
        cell = labels[:, step]
        g = group_of[cell]
        x_old = counts[rows, cell]
        nonzero_cells += x_old == 0
        counts[rows, cell] = x_old + 1
        S[rows, g] += xlogx[x_old + 1] - xlogx[x_old]
        T[rows, g] += logm[cell]
        tot[rows, g] += 1
        n = step + 1
        if n < n_lo:
            continue
        if model == 0:
            kl = S.sum(axis=1) / n - np.log(n) - T.sum(axis=1) / n
        else:
            tf = tot.astype(np.float64)
            with np.errstate(divide="ignore", invalid="ignore"):
                part = known * (logc + S / tf - np.log(tf) - T / tf)
            kl = np.where(tot > 0, part, 0.0).sum(axis=1)
        if policy == 0:
            ok = np.ones(R, dtype=np.bool_)
        elif policy == 1:
            ok = np.all(tot > 0, axis=1)
        else:
            ok = nonzero_cells == k
        if model == 1:
            ok &= np.all(tot > 0, axis=1)
        v = kl[ok]
        j = n - n_lo
        s1[j] = v.sum()
        s2[j] = (v * v).sum()
        kept[j] = v.size
    return s1, s2, kept


def _composition_blocks(n, k):
    if k == 1:
        yield np.array([[n]], dtype=np.int64)
        return
    if comb(n + k - 1, k - 1) <= _BLOCK:
        yield _compositions(n, k)
        return
    for a in range(n, -1, -1):
        for blk in _composition_blocks(n - a, k - 1):
            head = np.full((blk.shape[0], 1), a, dtype=np.int64)
            yield np.hstack([head, blk])


def _compositions(n, k):
    rows = np.zeros((1, 0), dtype=np.int64)
    left = np.array([n], dtype=np.int64)
    for _ in range(k - 1):
        reps = left + 1
        new_rows = np.repeat(rows, reps, axis=0)
        offs = np.concatenate([np.arange(r) for r in reps])
        col = offs
        rows = np.hstack([new_rows, col[:, None]])
        left = np.repeat(left, reps) - col
    return np.hstack([rows, left[:, None]])


def exact_sums(n, logm, group_of, known, model, policy):
    """Enumerate every outcome of a size-``n`` sample.

    Returns (sum of pmf*KL over kept, pmf mass kept, pmf mass total).
    """
    k = logm.size
    lg_n = gammaln(n + 1.0)
    acc = kept_mass = total = 0.0
    for blk in _composition_blocks(n, k):
        x = blk.astype(np.float64)
        with np.errstate(invalid="ignore"):
            logp = lg_n - gammaln(x + 1.0).sum(axis=1) + np.where(x > 0, x * logm, 0.0).sum(axis=1)
        p = np.exp(logp)
        total += p.sum()
        ok = keep_mask(blk, group_of, known.size, policy)
        if model == 1:
            ok &= keep_mask(blk, group_of, known.size, 1)
        kl = kl_rows(blk[ok], logm, group_of, known, model)
        acc += float(np.dot(p[ok], kl))
        kept_mass += float(p[ok].sum())
    return acc, kept_mass, total
