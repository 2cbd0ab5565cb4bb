"""Required sample size: the ``n*`` at which one model's risk matches another's at ``n0``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .asymptotics import RiskExpansion, full_expansion, submodel_expansion
from .errors import DegenerateSubmodelError, NonMonotoneEstimateError, ValidationError
from .montecarlo import Model, PathRequest, SimConfig, simulate_paths
from .table import ProbTable

_MAX_EXPANSIONS = 12


@dataclass(frozen=True)
class RssQuery:
    table: ProbTable
    n0: int
    method: str = "approx"
    sim: SimConfig = field(default_factory=SimConfig)
    reference: Model | str = Model.FULL
    candidate: Model | str = Model.SUBMODEL

    def __post_init__(self) -> None:
        if self.n0 < 1:
            raise ValidationError("n0 must be >= 1")
        if self.method not in ("approx", "sim"):
            raise ValidationError(f"method must be 'approx' or 'sim', got {self.method!r}")


@dataclass(frozen=True)
class RssResult:
    n_star: int
    root: float
    method: str
    target: float
    iterations: int = 0
    bracket: tuple[int, int] | None = None


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def expansion_for(m: ProbTable, model: Model | str) -> RiskExpansion:
    return full_expansion(m) if Model(model) is Model.FULL else submodel_expansion(m)


def solve_rss(reference: RiskExpansion, candidate: RiskExpansion, n0: int) -> RssResult:
    """Positive root of ``candidate(n) = reference(n0)`` in ``x = 1/n``."""
    a, b = candidate.a, candidate.b
    if a == 0 and b == 0:
        raise DegenerateSubmodelError("candidate risk is identically zero; every restriction is solid")
    t = reference(n0)
    disc = a * a + 4 * b * t
    if disc < 0 or t <= 0:
        raise ValidationError(f"no positive sample size reaches target risk {t!r}")
    # cancellation-free form of (-a + sqrt(disc)) / (2b); also valid for b == 0
    x = 2 * t / (a + math.sqrt(disc))
    root = 1.0 / x
    return RssResult(round_half_up(root), root, "approx", t)


def rss_approx(q: RssQuery) -> RssResult:
    return solve_rss(expansion_for(q.table, q.reference), expansion_for(q.table, q.candidate), q.n0)


def _initial_guess(q: RssQuery) -> float:
    try:
        return rss_approx(q).root
    except (DegenerateSubmodelError, ValidationError):
        return float(q.n0)


def rss_sim(q: RssQuery) -> RssResult:
    """Simulated r.s.s. by bisection over ``n`` on a common-random-number curve.

    The reference risk at ``n0`` and the candidate risk for every ``n`` in a
    bracket come from the same nested observation sequences. The candidate
    curve is assumed decreasing; a probe that contradicts this raises
    :class:`NonMonotoneEstimateError`.
    """
    guess = max(_initial_guess(q), 1.0)
    lo = max(1, math.floor(0.8 * guess) - 5)
    hi = math.ceil(1.25 * guess) + 5
    for _ in range(_MAX_EXPANSIONS):
        ref, cand = simulate_paths(
            q.table,
            [PathRequest(q.reference, q.n0, q.n0), PathRequest(q.candidate, lo, hi)],
            q.sim,
        )
        target = ref.at(q.n0)
        if math.isnan(target):
            raise NonMonotoneEstimateError(f"no replicate kept for the reference model at n0={q.n0}")
        s_lo, s_hi = cand.at(lo), cand.at(hi)
        if not math.isnan(s_lo) and s_lo >= target and s_hi < target:
            break
        if math.isnan(s_lo) or s_lo < target:
            if lo == 1:
                raise NonMonotoneEstimateError(
                    f"candidate risk at n=1 is already below the target {target:.6g}"
                )
            lo = max(1, lo // 2)
        if s_hi >= target:
            hi *= 2
    else:
        raise NonMonotoneEstimateError(f"could not bracket the target risk {target:.6g}")

    a, b = lo, hi
    fa, fb = s_lo, s_hi
    iterations = 0
    while b - a > 1:
        mid = (a + b) // 2
        fm = cand.at(mid)
        iterations += 1
        if math.isnan(fm) or fm > fa or fm < fb:
            raise NonMonotoneEstimateError(
                f"simulated risk is not decreasing on [{a}, {b}] (value {fm!r} at n={mid}); "
                "increase replicates"
            )
        if fm >= target:
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    root = a + (fa - target) / (fa - fb) if fa != fb else float(a)
    return RssResult(round_half_up(root), root, "sim", target, iterations, (a, b))


def required_sample_size(q: RssQuery) -> RssResult:
    return rss_approx(q) if q.method == "approx" else rss_sim(q)
