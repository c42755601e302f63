"""Command-line entry point: ``creditcycle <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import cycle as cyc
from .figures import FIGURES, emit_figure_series, herding_series
from .params import PRIMER, ParameterError, characteristic_roots, load_params, validate_params
from .report import Report, csv_text, format_number, write_csv
from .simulation import SimConfig, SimulationError, cycle_passage_stats, simulate_money_path, terminal_statistics
from .temporal import temporal_series, zero_money_singularity_report
from .valuation import SNAPSHOT_FIELDS, snapshot_grid

log = logging.getLogger("creditcycle")

OUT_ENV = "CREDITCYCLE_OUT"

EXIT_OK = 0
EXIT_PARAMS = 3
EXIT_IO = 4
EXIT_SIM = 5

SUBCOMMANDS = ("validate", "points", "table", "snapshot-grid", "simulate", "herding", "temporal",
               "ledger", "figures")


def table_csv(rows, mode: str) -> str:
    """Full mode keeps full precision; rounded mode prints at the published precision."""
    if mode == "paper":
        header = ("label", "s", "D", "B", "f", "P", "p")
        body = [[r.label, *("" if v is None else f"{v:.1f}" for v in (r.s, r.D, r.B, r.f, r.P)), f"{r.p:.3f}"]
                for r in rows]
        return csv_text(header, body, formatter=str)
    return csv_text(cyc.TABLE_FIELDS, [[getattr(r, k) for k in cyc.TABLE_FIELDS] for r in rows])


def _base_report(params, mode: str) -> Report:
    roots = characteristic_roots(params)
    rep = Report()
    rep.sections["params"] = params.to_dict()
    rep.sections["mode"] = mode
    rep.sections["roots"] = asdict(roots)
    return rep


def cmd_validate(args, params, out: Path) -> int:
    report = validate_params(params)
    rep = _base_report(params, args.mode)
    rep.sections["validation"] = report.to_dict()
    rep.diagnostics.extend(report.diagnostics)
    rep.write(out / "validate.json")
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: measured={c.measured!r} expected={c.expected!r}")
    for d in report.diagnostics:
        print(d)
    return EXIT_OK


def cmd_points(args, params, out: Path) -> int:
    pts = cyc.cycle_points(params, args.mode)
    rows = [(k, v) for k, v in pts.to_dict().items() if k != "mode"]
    rows.append(("divergence_scale", cyc.divergence_scale(pts.beta)))
    rows.append(("excess_money", cyc.excess_money(params, pts.beta)))
    write_csv(out / "points.csv", ("name", "value"), rows)
    rep = _base_report(params, args.mode)
    rep.sections["points"] = pts.to_dict()
    risk = cyc.default_probabilities(params, pts)
    rep.sections["default_risk"] = risk.to_dict()
    nat = cyc.natural_cycle_check(risk)
    rep.sections["natural_cycle"] = nat.to_dict()
    rep.diagnostics.extend(nat.diagnostics)
    rep.diagnostics.extend(validate_params(params).diagnostics)
    rep.write(out / "points.json")
    for name, value in rows:
        print(f"{name:>18s}  {format_number(value)}")
    for d in rep.diagnostics:
        print(d)
    return EXIT_OK


def cmd_table(args, params, out: Path) -> int:
    rows = cyc.cycle_table(params, args.mode)
    text = table_csv(rows, args.mode)
    (out / "table.csv").write_text(text, encoding="utf-8", newline="")
    rep = _base_report(params, args.mode)
    rep.sections["table"] = [asdict(r) for r in rows]
    rep.diagnostics.extend(cyc.table_diagnostics(params, args.mode))
    rep.write(out / "table.json")
    sys.stdout.write(text)
    for d in rep.diagnostics:
        print(d)
    return EXIT_OK


def cmd_snapshot_grid(args, params, out: Path) -> int:
    pts = cyc.cycle_points(params, args.mode)
    s = np.linspace(0.0, pts.s_tilde, args.grid)
    snaps = snapshot_grid(params, pts, s)
    write_csv(out / "snapshots.csv", SNAPSHOT_FIELDS, [[getattr(x, k) if k != "phase" else str(x.phase)
                                                         for k in SNAPSHOT_FIELDS] for x in snaps])
    print(f"wrote {len(snaps)} snapshots to {out / 'snapshots.csv'}")
    return EXIT_OK


def cmd_simulate(args, params, out: Path) -> int:
    cfg = SimConfig(horizon=args.horizon, dt=args.dt, n_paths=args.paths, seed=args.seed, scheme=args.scheme)
    pts = cyc.cycle_points(params, "full")
    levels = None
    if args.levels:
        levels = {f"L{i}": float(v) for i, v in enumerate(args.levels.split(","))}
    stats = cycle_passage_stats(params, pts, cfg, levels)
    header = ("name", "level", "hit_fraction", "mean_time", "median_time", "q05_time", "q95_time",
              "analytic_mean_time", "analytic_hit_probability")
    write_csv(out / "passage.csv", header, [[getattr(lv, k) for k in header] for lv in stats.levels])
    rep = _base_report(params, "full")
    rep.sections["simulation"] = {"config": asdict(cfg), "passage": stats.to_dict(),
                                  "terminal": terminal_statistics(params, cfg).to_dict()}
    rep.write(out / "simulate.json")
    if args.sample_paths:
        rows = []
        for p in range(args.sample_paths):
            path = simulate_money_path(params, cfg, p)
            step = max(1, args.sample_stride)
            rows.extend((p, t, s) for t, s in zip(path.times[::step], path.s[::step]))
        write_csv(out / "paths.csv", ("path", "t", "s"), rows)
    for lv in stats.levels:
        print(f"{lv.name:>8s} level={lv.level:.4f} hit={lv.hit_fraction:.4f} "
              f"mean={lv.mean_time:.3f}y analytic={lv.analytic_mean_time:.3f}y")
    print(f"ordering violations: {stats.ordering_violations}")
    return EXIT_OK


def cmd_herding(args, params, out: Path) -> int:
    header, rows = herding_series(params, args.mode, args.grid)
    write_csv(out / "herding.csv", header, rows)
    print(f"wrote {len(rows)} rows to {out / 'herding.csv'}")
    return EXIT_OK


def cmd_temporal(args, params, out: Path) -> int:
    pts = cyc.cycle_points(params, args.mode)
    data = temporal_series(params, np.linspace(0.0, args.t_max, args.grid))
    write_csv(out / "temporal.csv", ("t", "M", "B", "A"), data.tolist())
    rep = _base_report(params, args.mode)
    zm = zero_money_singularity_report(params, pts)
    rep.sections["zero_money"] = zm.to_dict()
    rep.diagnostics.append(zm.note)
    rep.write(out / "temporal.json")
    print(f"wrote {len(data)} rows to {out / 'temporal.csv'}")
    print(zm.note)
    return EXIT_OK


def cmd_ledger(args, params, out: Path) -> int:
    pts = cyc.cycle_points(params, args.mode)
    rows = []
    for which in cyc.LEDGERS:
        led = cyc.balance_sheet(params, pts, which)
        rows += [(which, "asset", k, v) for k, v in led.assets]
        rows += [(which, "liability", k, v) for k, v in led.liabilities]
        print(f"{which:>18s} assets={led.total_assets:.4f} liabilities={led.total_liabilities:.4f} "
              f"balanced={led.balanced()}")
    write_csv(out / "ledgers.csv", ("point", "side", "line", "value"), rows)
    return EXIT_OK


def cmd_figures(args, params, out: Path) -> int:
    which = FIGURES if args.figure == "all" else (args.figure,)
    for name in which:
        header, rows = emit_figure_series(name, params, args.mode, args.grid)
        write_csv(out / f"{name}.csv", header, rows)
        print(f"wrote {out / (name + '.csv')}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "points": cmd_points,
    "table": cmd_table,
    "snapshot-grid": cmd_snapshot_grid,
    "simulate": cmd_simulate,
    "herding": cmd_herding,
    "temporal": cmd_temporal,
    "ledger": cmd_ledger,
    "figures": cmd_figures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", type=Path, help="JSON file with r, delta, a, sigma, F, s0 (default: primer)")
    common.add_argument("--mode", choices=cyc.MODES, default="full",
                        help="full precision or the rounded primer constants")
    common.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default: ${OUT_ENV} or ./out)")
    common.add_argument("--grid", type=int, default=401, help="points per emitted series")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="creditcycle", description="Credit-expansion cycle analytics")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "simulate":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--paths", type=int, default=100_000)
            p.add_argument("--dt", type=float, default=1e-3)
            p.add_argument("--horizon", type=float, default=200.0)
            p.add_argument("--scheme", choices=("exact", "euler"), default="exact")
            p.add_argument("--levels", default=None, help="comma-separated issuance levels (default: cycle points)")
            p.add_argument("--sample-paths", type=int, default=0, help="write the first k raw paths")
            p.add_argument("--sample-stride", type=int, default=100, help="keep every n-th grid point of raw paths")
        elif name == "temporal":
            p.add_argument("--t-max", type=float, default=100.0)
        elif name == "figures":
            p.add_argument("--figure", choices=FIGURES + ("all",), default="all")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = args.out or Path(os.environ.get(OUT_ENV, "out"))
    try:
        params = load_params(args.params) if args.params else PRIMER
    except ParameterError as exc:
        field = f" (field: {exc.field_name})" if exc.field_name else ""
        print(f"validation error{field}: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, params, out)
    except ParameterError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIM
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
