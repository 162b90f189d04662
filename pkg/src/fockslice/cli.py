"""Command line entry point: ``fockslice {run,fig1,steady,validate,sweep}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from . import experiments as ex


def _table(rows: list[dict], cols: tuple[str, ...]) -> str:
    fmt = lambda v: f"{v:.6g}" if isinstance(v, float) else str(v)
    cells = [[fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


SUMMARY_COLS = ("name", "plateau_fidelity", "final_fidelity", "steady_mandel_q", "rate_ratio")


def _run_and_write(cfg, outdir):
    traj = ex.run_scenario(cfg)
    traj.write(outdir)
    return traj.summary()


def cmd_run(args):
    s = _run_and_write(ex.load_config(args.config), args.out)
    print(_table([s], SUMMARY_COLS))
    return 0


def cmd_fig1(args):
    cfgs = ex.fig1_configs()
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            summaries = list(pool.map(_run_and_write, cfgs, [args.out] * len(cfgs)))
    else:
        summaries = [_run_and_write(c, args.out) for c in cfgs]
    path = ex.output_dir(args.out) / "fig1_summary.json"
    path.write_text(json.dumps(ex._jsonable(summaries), indent=2))
    print(_table(summaries, SUMMARY_COLS))
    return 0


def cmd_steady(args):
    cfg = ex.load_config(args.config)
    s = ex.steady(cfg)
    (ex.output_dir(args.out) / f"{cfg.name}_steady.json").write_text(
        json.dumps(ex._jsonable(s), indent=2))
    print(_table([s], ("name", "fidelity", "mandel_q", "mean_n", "degeneracy", "residual")))
    return 0


def cmd_validate(args):
    rep = ex.run_validation_suite()
    (ex.output_dir(args.out) / "validation.json").write_text(json.dumps(ex._jsonable(rep), indent=2))
    for r in rep:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}  value={r['value']}  threshold={r['threshold']}")
    return 0 if all(r["passed"] for r in rep) else 1


def cmd_sweep(args):
    cfg = ex.load_config(args.config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    rows = ex.sweep(cfg, args.param, values)
    path = ex.output_dir(args.out) / f"{cfg.name}_sweep_{args.param}.json"
    path.write_text(json.dumps(ex._jsonable(rows), indent=2))
    for r in rows:
        r[args.param] = r["sweep"]["value"]
    print(_table(rows, (args.param, *SUMMARY_COLS[1:])))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fockslice", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--out", default=None,
                   help=f"output directory (default ${ex.OUT_ENV} or ./out)")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("run", help="run one scenario config")
    s.add_argument("config")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("fig1", help="run the four packaged protection scenarios")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_fig1)

    s = sub.add_parser("steady", help="steady state of a scenario Liouvillian")
    s.add_argument("config")
    s.set_defaults(func=cmd_steady)

    s = sub.add_parser("validate", help="run the invariant suite; exit 1 on failure")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("sweep", help="re-run a scenario over values of one parameter")
    s.add_argument("config")
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma-separated list")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ex.ConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
