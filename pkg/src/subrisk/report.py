"""Rows and text layouts for risk/r.s.s. comparison tables."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal
from dataclasses import astuple, dataclass, replace
from typing import Iterable, Sequence

from .asymptotics import full_expansion, submodel_expansion
from .montecarlo import Model, SimConfig, simulate_risk
from .rss import RssQuery, rss_approx, rss_sim
from .table import ProbTable

COLUMNS = (
    "n",
    "f.risk.app",
    "s.risk.app",
    "ratio.app",
    "r.s.s.app",
    "f.risk.sim",
    "s.risk.sim",
    "ratio.sim",
    "r.s.s.sim",
)
RISK_DIGITS = 4


@dataclass
class ReportRow:
    n: int
    f_risk_app: float | None = None
    s_risk_app: float | None = None
    ratio_app: float | None = None
    rss_app: int | None = None
    f_risk_sim: float | None = None
    s_risk_sim: float | None = None
    ratio_sim: float | None = None
    rss_sim: int | None = None


def approx_columns(m: ProbTable, n: int) -> dict:
    f = full_expansion(m)(n)
    s = submodel_expansion(m)(n)
    return dict(
        f_risk_app=f,
        s_risk_app=s,
        ratio_app=s / f,
        rss_app=rss_approx(RssQuery(m, n)).n_star,
    )


def sim_columns(m: ProbTable, n: int, cfg: SimConfig) -> dict:
    # each model uses its own default discard policy
    cfg = replace(cfg, discard_policy=None)
    f = simulate_risk(m, Model.FULL, n, cfg).mean
    s = simulate_risk(m, Model.SUBMODEL, n, cfg).mean
    return dict(
        f_risk_sim=f,
        s_risk_sim=s,
        ratio_sim=s / f,
        rss_sim=rss_sim(RssQuery(m, n, "sim", cfg)).n_star,
    )


def build_rows(m: ProbTable, n_values: Iterable[int], mode: str = "approx", cfg: SimConfig | None = None) -> list[ReportRow]:
    if mode not in ("approx", "sim", "both"):
        raise ValueError(f"mode must be approx, sim or both, got {mode!r}")
    cfg = cfg or SimConfig()
    rows = []
    for n in n_values:
        cols: dict = {}
        if mode in ("approx", "both"):
            cols.update(approx_columns(m, n))
        if mode in ("sim", "both"):
            cols.update(sim_columns(m, n, cfg))
        rows.append(ReportRow(n, **cols))
    return rows


def round_display(v: float, digits: int) -> str:
    """Half-up rounding after trimming float noise to 12 significant digits."""
    q = Decimal(1).scaleb(-digits)
    return str(Decimal(f"{float(v):.12g}").quantize(q, rounding=ROUND_HALF_UP))


def _fmt(v, digits: int | None) -> str:
    if v is None:
        return ""
    if digits is None:
        return str(int(v))
    return round_display(v, digits)


def _digits(ratio_digits: int) -> tuple:
    r = RISK_DIGITS
    return (None, r, r, ratio_digits, None, r, r, ratio_digits, None)


def format_cells(row: ReportRow, ratio_digits: int = 3) -> list[str]:
    return [_fmt(v, d) for v, d in zip(astuple(row), _digits(ratio_digits))]


def to_csv(rows: Sequence[ReportRow], ratio_digits: int = 3) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(format_cells(row, ratio_digits))
    return buf.getvalue()


def _grid(header: Sequence[str], body: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(header, widths))]
    lines += ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"


def format_wide(rows: Sequence[ReportRow], ratio_digits: int = 4) -> str:
    """One line per sample size, every column side by side."""
    keep = [i for i in range(len(COLUMNS)) if any(astuple(r)[i] is not None for r in rows)]
    body = [[format_cells(r, ratio_digits)[i] for i in keep] for r in rows]
    return _grid([COLUMNS[i] for i in keep], body)


def format_transposed(rows: Sequence[ReportRow], ratio_digits: int = 3) -> str:
    """One column per sample size; simulated values in parentheses."""

    def pair(app, sim, digits):
        if app is None:
            return _fmt(sim, digits)
        a = _fmt(app, digits)
        return f"{a}({_fmt(sim, digits)})" if sim is not None else a

    layout = [
        ("Full Model", lambda r: pair(r.f_risk_app, r.f_risk_sim, RISK_DIGITS)),
        ("Submodel", lambda r: pair(r.s_risk_app, r.s_risk_sim, RISK_DIGITS)),
        ("Risk Ratio", lambda r: pair(r.ratio_app, r.ratio_sim, ratio_digits)),
        ("R.S.S.", lambda r: pair(r.rss_app, r.rss_sim, None)),
        (
            "R.S.S./n",
            lambda r: pair(
                None if r.rss_app is None else r.rss_app / r.n,
                None if r.rss_sim is None else r.rss_sim / r.n,
                3,
            ),
        ),
    ]
    header = [""] + [f"n={r.n}" for r in rows]
    body = [[label] + [fn(r) for r in rows] for label, fn in layout]
    return _grid(header, body)
