"""Loop kernels compiled with numba; same contracts as ``numpy_impl``."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def keep_mask(counts, group_of, n_groups, policy):
    R, k = counts.shape
    out = np.ones(R, dtype=np.bool_)
    if policy == 0:
        return out
    tot = np.zeros(n_groups, dtype=np.int64)
    for r in range(R):
        if policy == 1:
            tot[:] = 0
            for j in range(k):
                tot[group_of[j]] += counts[r, j]
            for i in range(n_groups):
                if tot[i] == 0:
                    out[r] = False
                    break
        else:
            for j in range(k):
                if counts[r, j] == 0:
                    out[r] = False
                    break
    return out


@njit(**_opts)
def _kl_one(x, logm, group_of, known, model, tot):
    k = x.size
    acc = 0.0
    if model == 0:
        n = 0
        for j in range(k):
            n += x[j]
        logn = math.log(n)
        for j in range(k):
            if x[j] > 0:
                xj = float(x[j])
                acc += (xj / n) * (math.log(xj) - logn - logm[j])
        return acc
    tot[:] = 0
    for j in range(k):
        tot[group_of[j]] += x[j]
    for i in range(known.size):
        if tot[i] == 0:
            return np.nan
    for j in range(k):
        if x[j] > 0:
            g = group_of[j]
            c = known[g]
            t = float(tot[g])
            xj = float(x[j])
            acc += (c * xj / t) * (math.log(c) + math.log(xj) - math.log(t) - logm[j])
    return acc


@njit(**_opts)
def kl_rows(counts, logm, group_of, known, model):
    R = counts.shape[0]
    out = np.empty(R)
    tot = np.zeros(known.size, dtype=np.int64)
    for r in range(R):
        out[r] = _kl_one(counts[r], logm, group_of, known, model, tot)
    return out


@njit(**_opts)
def path_curves(labels, logm, group_of, known, model, policy, n_lo):
    R, N = labels.shape
    k = logm.size
    I = known.size
    width = N - n_lo + 1
    s1 = np.zeros(width)
    s2 = np.zeros(width)
    kept = np.zeros(width, dtype=np.int64)

    xlogx = np.zeros(N + 1)
    for v in range(1, N + 1):
        xlogx[v] = v * math.log(v)
    logc = np.log(known)

    counts = np.zeros(k, dtype=np.int64)
    S = np.zeros(I)
    T = np.zeros(I)
    tot = np.zeros(I, dtype=np.int64)
    for r in range(R):
        counts[:] = 0
        S[:] = 0.0
        T[:] = 0.0
        tot[:] = 0
        nonzero_cells = 0
        groups_seen = 0
        for step in range(N):
            cell = labels[r, step]
            g = group_of[cell]
            x_old = counts[cell]
            if x_old == 0:
                nonzero_cells += 1
            if tot[g] == 0:
                groups_seen += 1
            counts[cell] = x_old + 1
            S[g] += xlogx[x_old + 1] - xlogx[x_old]
            T[g] += logm[cell]
            tot[g] += 1
            n = step + 1
            if n < n_lo:
                continue
            j = n - n_lo
            if model == 0:
                s_all = 0.0
                t_all = 0.0
                for i in range(I):
                    s_all += S[i]
                for i in range(I):
                    t_all += T[i]
                kl = s_all / n - math.log(n) - t_all / n
            else:
                kl = 0.0
                for i in range(I):
                    if tot[i] > 0:
                        tf = float(tot[i])
                        kl += known[i] * (logc[i] + S[i] / tf - math.log(tf) - T[i] / tf)
            if policy == 0:
                good = True
            elif policy == 1:
                good = groups_seen == I
            else:
                good = nonzero_cells == k
            if model == 1 and groups_seen < I:
                good = False
            if good:
                s1[j] += kl
                s2[j] += kl * kl
                kept[j] += 1
    return s1, s2, kept


@njit(**_opts)
def exact_sums(n, logm, group_of, known, model, policy):
    k = logm.size
    I = known.size
    x = np.zeros(k, dtype=np.int64)
    x[0] = n
    tot = np.zeros(I, dtype=np.int64)
    lg_n = math.lgamma(n + 1.0)
    acc = 0.0
    kept_mass = 0.0
    total = 0.0
    while True:
        logp = lg_n
        for j in range(k):
            if x[j] > 0:
                logp += x[j] * logm[j] - math.lgamma(x[j] + 1.0)
        p = math.exp(logp)
        total += p
        tot[:] = 0
        for j in range(k):
            tot[group_of[j]] += x[j]
        good = True
        if policy == 2:
            for j in range(k):
                if x[j] == 0:
                    good = False
        if policy == 1 or model == 1:
            for i in range(I):
                if tot[i] == 0:
                    good = False
        if good:
            acc += p * _kl_one(x, logm, group_of, known, model, tot)
            kept_mass += p
        if x[k - 1] == n:
            break
        i = k - 2
        while x[i] == 0:
            i -= 1
        x[i] -= 1
        t = x[k - 1]
        x[k - 1] = 0
        x[i + 1] = t + 1
    return acc, kept_mass, total
