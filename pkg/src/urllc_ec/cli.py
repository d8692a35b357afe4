"""Command-line front-end.

Exit codes: 0 success, 1 input error, 2 reliability threshold not attainable
(the region is still reported).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import finite_blocklength as fbl
from .effective_capacity import ec
from .operating_region import solve_region
from .oracle_sim import mc_reliability
from .reliability import dvp, reliability
from .scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2
SWEEP_COLUMNS = ("theta", "n", "ec_bpcu", "reliability", "unreliability", "dvp_first_attempt")
TABLE_COLUMNS = (
    "use_case", "d_max", "r_th", "n", "theta_min", "theta_max",
    "achievable_reliability", "ec_bpcu",
)


def fmt(x) -> str:
    """12 significant digits, '.' decimal, no grouping."""
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def parse_grid(text: str) -> list[float]:
    """``MIN:MAX:POINTS`` as a log-spaced, strictly increasing grid."""
    try:
        lo_s, hi_s, pts_s = text.split(":")
        lo, hi, pts = float(lo_s), float(hi_s), int(pts_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be MIN:MAX:POINTS, got {text!r}") from exc
    if not (0 < lo < hi) or pts < 2:
        raise argparse.ArgumentTypeError("grid needs 0 < MIN < MAX and POINTS >= 2")
    a, b = math.log10(lo), math.log10(hi)
    return [10 ** (a + (b - a) * i / (pts - 1)) for i in range(pts)]


def parse_n_list(text: str) -> list[int]:
    try:
        out = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad attempt list {text!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError("empty attempt list")
    return out


def _render_table(header, rows) -> str:
    cells = [list(header)] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_region(args) -> int:
    s = load_scenario(args.scenario)
    n = args.n or s.n_max
    if not 1 <= n <= s.n_max:
        raise ScenarioError(f"--n {n} outside [1, n_max={s.n_max}]")
    region = solve_region(s, n)
    report = {"scenario": s.name or str(args.scenario), "r_th": s.r_th, "d_max": s.d_max}
    report.update(region.as_dict())
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        keys = list(report)
        text = _render_table(("field", "value"), [(k, report[k]) for k in keys])
    _emit(text, args.out)
    return EXIT_OK if region.feasible else EXIT_INFEASIBLE


def sweep_rows(s, grid, n_list):
    rows = []
    for n in n_list:
        if not 1 <= n <= s.n_max:
            raise ScenarioError(f"attempt count {n} outside [1, n_max={s.n_max}]")
    for theta in grid:
        first_slack = s.d_max - s.budget.per_attempt
        for n in n_list:
            res = reliability(s, theta, n)
            rows.append((theta, n, ec(s, theta, n), res.value, res.unreliability, dvp(theta, first_slack)))
    return rows


def cmd_sweep(args) -> int:
    s = load_scenario(args.scenario)
    rows = sweep_rows(s, args.grid, args.n or list(range(1, s.n_max + 1)))
    if args.format == "json":
        text = json.dumps([dict(zip(SWEEP_COLUMNS, r)) for r in rows], indent=2) + "\n"
    elif args.format == "table":
        text = _render_table(SWEEP_COLUMNS, rows)
    else:
        text = _render_csv(SWEEP_COLUMNS, rows)
    _emit(text, args.out)
    return EXIT_OK


def table_rows(directory: Path):
    rows, errors = [], []
    for path in sorted(directory.glob("*.json")):
        try:
            s = load_scenario(path)
            region = solve_region(s, s.n_max)
        except (ScenarioError, ValueError) as exc:
            errors.append(f"{path.name}: {exc}")
            continue
        rows.append((
            s.name or path.stem, s.d_max, s.r_th, region.n, region.theta_min,
            region.theta_max, region.achievable_reliability, region.ec_at_max,
        ))
    # rows by delay bound, then attempts, then reliability requirement
    rows.sort(key=lambda r: (r[1], r[3], r[2]))
    return rows, errors


def default_usecase_dir() -> Path:
    return Path(str(resources.files("urllc_ec") / "data" / "usecases"))


def cmd_table(args) -> int:
    directory = Path(args.dir) if args.dir else default_usecase_dir()
    if not directory.is_dir():
        raise ScenarioError(f"{directory} is not a directory")
    rows, errors = table_rows(directory)
    for e in errors:
        print(f"error: {e}", file=sys.stderr)
    if args.format == "json":
        text = json.dumps([dict(zip(TABLE_COLUMNS, r)) for r in rows], indent=2) + "\n"
    elif args.format == "csv":
        text = _render_csv(TABLE_COLUMNS, rows)
    else:
        text = _render_table(TABLE_COLUMNS, rows)
    _emit(text, args.out)
    return EXIT_INPUT if errors else EXIT_OK


def cmd_fbl(args) -> int:
    try:
        r = fbl.required_blocklength(args.snr, args.payload, args.epsilon)
        if args.ceil:
            r = float(math.ceil(r))
        report = {
            "snr": args.snr,
            "capacity_C": fbl.capacity(args.snr),
            "dispersion_V": fbl.dispersion(args.snr),
            "blocklength_r": r,
            "rate_S": fbl.achievable_rate(args.snr, r, args.epsilon),
            "t_tx_ms": fbl.transmission_time(r, args.bandwidth),
        }
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = _render_table(("quantity", "value"), list(report.items()))
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = load_scenario(args.scenario)
    n = args.n or s.n_max
    if not 1 <= n <= s.n_max:
        raise ScenarioError(f"--n {n} outside [1, n_max={s.n_max}]")
    if args.trials < 1 or not args.theta > 0:
        raise ScenarioError("need --trials >= 1 and --theta > 0")
    est = mc_reliability(s, args.theta, n, args.trials, args.seed)
    analytic = reliability(s, args.theta, n).value
    report = {
        "estimate": est.mean,
        "standard_error": est.standard_error,
        "trials": est.trials,
        "seed": est.rng_seed,
        "analytic_value": analytic,
        "z_score": est.z_score(analytic),
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit status 2 is reserved for infeasibility
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="urllc-ec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", help="solve the [theta_min, theta_max] operating region")
    r.add_argument("--scenario", required=True)
    r.add_argument("--n", type=int)
    r.add_argument("--format", choices=("json", "table"), default="json")
    r.add_argument("--out")
    r.set_defaults(func=cmd_region)

    sw = sub.add_parser("sweep", help="EC and reliability over a theta grid")
    sw.add_argument("--scenario", required=True)
    sw.add_argument("--grid", type=parse_grid, default=parse_grid("0.1:10:41"))
    sw.add_argument("--n", type=parse_n_list, help="comma-separated attempt counts")
    sw.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    t = sub.add_parser("table", help="operating conditions for a directory of use cases")
    t.add_argument("dir", nargs="?", help="scenario directory (default: shipped use cases)")
    t.add_argument("--format", choices=("table", "json", "csv"), default="table")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)

    f = sub.add_parser("fbl", help="finite-blocklength channel quantities")
    f.add_argument("--snr", type=float, required=True, help="linear SNR")
    f.add_argument("--payload", type=float, default=256.0, help="bits")
    f.add_argument("--epsilon", type=float, default=1e-5)
    f.add_argument("--bandwidth", type=float, default=20e6, help="Hz")
    f.add_argument("--ceil", action="store_true", help="round the blocklength up")
    f.add_argument("--format", choices=("json", "table"), default="table")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fbl)

    m = sub.add_parser("simulate", help="Monte-Carlo reliability vs the analytic value")
    m.add_argument("--scenario", required=True)
    m.add_argument("--theta", type=float, required=True)
    m.add_argument("--n", type=int)
    m.add_argument("--trials", type=int, default=1_000_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
