"""Command-line interface: ``subrisk expand|simulate|report``."""

from __future__ import annotations

import argparse
import csv
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .asymptotics import full_expansion, negativity_threshold, risk_difference, submodel_expansion
from .datasets import load_example
from .errors import DegenerateSubmodelError, ParseError, SimulationError, SubriskError, ValidationError
from .montecarlo import Model, SimConfig, default_policy, discard_probability_bound, simulate_risk
from .report import round_display, build_rows, format_transposed, format_wide, to_csv
from .rss import RssQuery, rss_approx
from .tablefile import parse_groups, read_table_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_SIMULATION = 5


def _n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("sample sizes must be positive integers")
    return values


def _load(args):
    tf = read_table_file(args.table)
    groups = parse_groups(args.groups) if args.groups is not None else None
    if groups is None and tf.groups is None:
        groups = "cols" if np.ndim(tf.values) == 2 else None
    m = tf.to_table(groups, renormalize=args.renormalize)
    sums = tf.sums
    if sums is not None:
        if sums.size != m.n_groups:
            raise ValidationError(f"@sums lists {sums.size} values for {m.n_groups} groups")
        if not np.allclose(sums, m.group_sums, atol=1e-6):
            print(
                "warning: @sums differs from the table's group sums; "
                "simulation uses @sums, expansions assume they are correct",
                file=sys.stderr,
            )
    return m, sums


def _emit(header: Sequence[str], rows: Sequence[Sequence[str]], as_csv: bool) -> None:
    if as_csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    for r in [header, *rows]:
        print("  ".join(str(c).rjust(w) for c, w in zip(r, widths)))


def cmd_expand(args) -> int:
    m, _ = _load(args)
    f, s, d = full_expansion(m), submodel_expansion(m), risk_difference(m)
    thr = negativity_threshold(m)
    rows = []
    for n in args.n:
        fr, sr = f(n), s(n)
        try:
            rss = rss_approx(RssQuery(m, n)).n_star
        except DegenerateSubmodelError:
            rss = "NA"  # every group is a single cell
        rows.append([n, round_display(fr, 4), round_display(sr, 4), round_display(sr / fr, args.ratio_digits),
                     rss, f"{d(n):.6f}"])
    _emit(["n", "f.risk.app", "s.risk.app", "ratio.app", "r.s.s.app", "diff.app"], rows, args.csv)
    print(f"negativity threshold: {thr}", file=sys.stderr)
    if any(n <= thr for n in args.n):
        print(
            f"warning: n <= {thr} is in the small-sample range where the known sums are "
            "predicted to increase the risk; be cautious about using the submodel",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    m, sums = _load(args)
    status = EXIT_OK
    rows = []
    for n in args.n:
        row: list = [n]
        for model in (Model.FULL, Model.SUBMODEL):
            cfg = SimConfig(args.reps, args.seed, None, args.workers)
            try:
                est = simulate_risk(m, model, n, cfg, known_sums=sums)
            except SimulationError as exc:
                bound = discard_probability_bound(m, n, default_policy(model))
                print(f"n={n} {model.value}: {exc} (discard probability bound {bound:.3g})", file=sys.stderr)
                row += ["NA", "NA", "NA"]
                status = EXIT_SIMULATION
                continue
            row += [f"{est.mean:.4f}", f"{est.std_error:.2e}", est.discarded]
        try:
            row.append(f"{float(row[4]) / float(row[1]):.4f}")
        except ValueError:
            row.append("NA")
        rows.append(row)
    header = ["n", "f.risk.sim", "f.se", "f.discarded", "s.risk.sim", "s.se", "s.discarded", "ratio.sim"]
    _emit(header, rows, args.csv)
    return status


def cmd_report(args) -> int:
    ex = load_example(args.example)
    cfg = SimConfig(args.reps, args.seed, None, args.workers)
    rows = build_rows(ex.table, ex.n_values, args.mode, cfg)
    if args.csv:
        sys.stdout.write(to_csv(rows, ex.ratio_digits))
    elif ex.id == 1:
        sys.stdout.write(format_wide(rows, ex.ratio_digits))
    else:
        sys.stdout.write(format_transposed(rows, ex.ratio_digits))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subrisk", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def table_opts(sp):
        sp.add_argument("--table", required=True, help="table file")
        sp.add_argument("--groups", help="rows | cols | i,j;k,l (overrides @groups)")
        sp.add_argument("--n", type=_n_list, required=True, help="comma-separated sample sizes")
        sp.add_argument("--renormalize", action="store_true", help="rescale tables summing to within 1e-3 of one")
        sp.add_argument("--csv", action="store_true")

    def sim_opts(sp, reps=10_000):
        sp.add_argument("--reps", type=int, default=reps)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)

    e = sub.add_parser("expand", help="second-order risk approximations")
    table_opts(e)
    e.add_argument("--ratio-digits", type=int, default=4)
    e.set_defaults(func=cmd_expand)

    s = sub.add_parser("simulate", help="Monte Carlo risks")
    table_opts(s)
    sim_opts(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", help="reproduce a bundled example table")
    r.add_argument("--example", type=int, choices=(1, 2, 3), required=True)
    r.add_argument("--mode", choices=("approx", "sim", "both"), default="approx")
    r.add_argument("--csv", action="store_true")
    sim_opts(r)
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except SubriskError as exc:  # pragma: no cover - every error belongs to a family above
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
