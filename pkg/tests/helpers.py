import numpy as np

from subrisk import DiscardPolicy, Model, ProbTable


def random_table(rng: np.random.Generator, n_groups: int, max_size: int = 8):
    """Random strictly positive table with groups of size 1..max_size."""
    sizes = rng.integers(1, max_size + 1, size=n_groups)
    cells = [rng.uniform(0.05, 1.0, size=s) for s in sizes]
    total = sum(c.sum() for c in cells)
    return ProbTable.from_groups([c / total for c in cells])


def compositions(n: int, k: int):
    """Every vector of k nonnegative integers summing to n."""
    import itertools

    for bars in itertools.combinations(range(n + k - 1), k - 1):
        prev = -1
        out = []
        for b in (*bars, n + k - 1):
            out.append(b - prev - 1)
            prev = b
        yield out


def oracle_exact_risk(probs, groups, n, submodel, policy):
    """Plain-python conditional expected KL; policy is 'none', 'groups' or 'cells'."""
    import math

    k = len(probs)
    sums = [sum(probs[c] for c in g) for g in groups]
    acc = kept = 0.0
    for x in compositions(n, k):
        if policy == "cells" and min(x) == 0:
            continue
        tots = [sum(x[c] for c in g) for g in groups]
        if policy == "groups" and min(tots) == 0:
            continue
        logp = math.lgamma(n + 1) + sum(xi * math.log(p) - math.lgamma(xi + 1) for xi, p in zip(x, probs))
        w = math.exp(logp)
        d = 0.0
        for gi, g in enumerate(groups):
            for c in g:
                if x[c] == 0:
                    continue
                q = sums[gi] * x[c] / tots[gi] if submodel else x[c] / n
                d += q * math.log(q / probs[c])
        acc += w * d
        kept += w
    return acc / kept


SMALL = [
    ProbTable.from_groups([[0.5, 0.5]]),
    ProbTable.from_groups([[0.2], [0.8]]),
    ProbTable.from_groups([[0.1, 0.3], [0.6]]),
    ProbTable.from_groups([[0.25, 0.25], [0.25, 0.25]]),
    ProbTable.from_groups([[0.05, 0.15, 0.3], [0.5]]),
]
POLICY_NAMES = {DiscardPolicy.NONE: "none", DiscardPolicy.SUBMODEL_GROUPS: "groups", DiscardPolicy.ALL_CELLS: "cells"}


def small_cases():
    for ti, m in enumerate(SMALL):
        for model in Model:
            if model is Model.SUBMODEL and m.n_groups < 2:
                continue
            for policy in DiscardPolicy:
                if model is Model.SUBMODEL and policy is DiscardPolicy.NONE:
                    continue
                yield ti, model, policy
