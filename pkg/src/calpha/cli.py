"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 a method failed, 4 methods disagree, 5 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass

from calpha import green, lsq, ode, toeplitz, wirtinger
from calpha.verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_METHOD, EXIT_CONSISTENCY, EXIT_IO = 0, 2, 3, 4, 5

METHODS = ("toeplitz", "nystrom", "ode", "lsq")
MAX_TABLE_ALPHA = 8


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: int | None = None
    alpha_min: int = 1
    alpha_max: int | None = None
    method: str = "nystrom"
    nystrom_nodes: int | None = None
    n_grid: tuple | None = None
    scan_points: int = 2000
    consistency_tol: float = 1e-4
    suite: str = "all"
    trials: int = 1000
    seed: int = 0
    grid: int = 33
    fmt: str = "text"
    out: str | None = None

    def alphas(self) -> list:
        if self.alpha is not None:
            return [self.alpha]
        hi = self.alpha_max if self.alpha_max is not None else 3
        return list(range(self.alpha_min, hi + 1))


def paper_format(x: float) -> str:
    """4 decimals below 10^4, nearest integer up to 10^12, scientific beyond."""
    if abs(x) < 1e4:
        return f"{x:.4f}"
    if abs(x) < 1e12:
        return f"{x:.0f}"
    return f"{x:.6e}"


def default_nodes(alpha: int) -> int:
    return 300 if alpha >= 3 else 200


def run_method(method: str, alpha: int, cfg: RunConfig):
    if method == "nystrom":
        return green.c_alpha_by_nystrom(alpha, cfg.nystrom_nodes or default_nodes(alpha))
    if method == "ode":
        return ode.c_alpha_by_ode(alpha, scan_points=cfg.scan_points)
    if method == "toeplitz":
        return toeplitz.c_alpha_by_extrapolation(alpha, cfg.n_grid)
    if method == "lsq":
        return lsq.c_alpha_by_lsq(alpha, cfg.n_grid)
    raise UsageError(f"unknown method {method}")


def bounds_json(alpha: int) -> dict:
    return {
        "lower": wirtinger.bound_lower(alpha).to_json(),
        "upper": wirtinger.bound_upper(alpha).to_json(),
        "asymptotic": wirtinger.asymptotic_c(alpha).to_json(),
        "conjecture": wirtinger.conjecture_value(alpha).to_json(),
    }


def _emit(text: str, cfg: RunConfig) -> int:
    if cfg.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_compute(cfg: RunConfig) -> int:
    alpha = cfg.alpha
    methods = METHODS if cfg.method == "all" else (cfg.method,)
    if cfg.method == "all" and alpha > 4:
        methods = ("nystrom", "ode")
    estimates, failures, timings = [], [], {}
    for m in methods:
        t0 = time.perf_counter()
        try:
            estimates.append(run_method(m, alpha, cfg))
        except Exception as exc:  # reported with its method tag
            failures.append((m, f"{type(exc).__name__}: {exc}"))
        timings[m] = time.perf_counter() - t0
    discrepancy = None
    if len(estimates) > 1:
        vals = [e.c for e in estimates]
        discrepancy = max(abs(a - b) / min(abs(a), abs(b)) for a in vals for b in vals)

    if cfg.fmt == "json":
        doc = {"alpha": alpha, "estimates": [e.to_json() for e in estimates],
               "bounds": bounds_json(alpha)}
        if failures:
            doc["failures"] = [{"method": m, "error": msg} for m, msg in failures]
        if discrepancy is not None:
            doc["max_relative_discrepancy"] = discrepancy
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "method", "value", "error_estimate", "params"])
        for e in estimates:
            w.writerow([alpha, e.method.value, repr(e.c), repr(e.error_estimate),
                        json.dumps(e.params, sort_keys=True)])
        text = buf.getvalue()
    else:
        lines = [f"alpha = {alpha}"]
        for e in estimates:
            key = next(m for m in methods if run_key(m) == e.method.value)
            lines.append(f"  {e.method.value:<24} {e.c:.12g}  (rel. err. est. {e.error_estimate:.1e}, "
                         f"{timings[key]:.2f} s)")
        for m, msg in failures:
            lines.append(f"  {m:<24} FAILED: {msg}")
        if discrepancy is not None:
            lines.append(f"  max relative discrepancy {discrepancy:.2e}")
        text = "\n".join(lines) + "\n"
    code = _emit(text, cfg)
    if code:
        return code
    if failures:
        return EXIT_METHOD
    if discrepancy is not None and discrepancy > cfg.consistency_tol:
        return EXIT_CONSISTENCY
    return EXIT_OK


def run_key(method: str) -> str:
    return {"toeplitz": "toeplitz-extrapolation", "nystrom": "nystrom",
            "ode": "ode-determinant", "lsq": "lsq-conditioning"}[method]


TABLE_COLUMNS = ("alpha", "c", "lower", "upper", "asymptotic", "conjecture", "c/asymptotic")


def table_rows(cfg: RunConfig):
    rows, failed = [], False
    for a in cfg.alphas():
        try:
            c = run_method(cfg.method if cfg.method in METHODS else "nystrom", a, cfg).c
        except Exception as exc:
            rows.append({"alpha": a, "error": f"{type(exc).__name__}: {exc}"})
            failed = True
            continue
        asym = wirtinger.asymptotic_c(a).to_float()
        rows.append({
            "alpha": a,
            "c": c,
            "lower": wirtinger.bound_lower(a).to_float(),
            "upper": wirtinger.bound_upper(a).to_float(),
            "asymptotic": asym,
            "conjecture": wirtinger.conjecture_value(a).to_float(),
            "c/asymptotic": c / asym,
        })
    return rows, failed


def cmd_table(cfg: RunConfig) -> int:
    rows, failed = table_rows(cfg)
    if cfg.fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in rows:
            w.writerow([r["alpha"]] + [repr(r[k]) if k in r else "" for k in TABLE_COLUMNS[1:]])
        text = buf.getvalue()
    else:
        widths = (5, 16, 16, 16, 16, 16, 13)
        lines = ["".join(h.rjust(w) for h, w in zip(TABLE_COLUMNS, widths))]
        for r in rows:
            if "error" in r:
                lines.append(f"{r['alpha']:>5}  FAILED: {r['error']}")
                continue
            cells = [str(r["alpha"])] + [paper_format(r[k]) for k in TABLE_COLUMNS[1:6]]
            cells.append(f"{r['c/asymptotic']:.4f}")
            lines.append("".join(c.rjust(w) for c, w in zip(cells, widths)))
        text = "\n".join(lines) + "\n"
    code = _emit(text, cfg)
    return code or (EXIT_METHOD if failed else EXIT_OK)


def cmd_verify(cfg: RunConfig) -> int:
    kwargs = {"trials": cfg.trials, "seed": cfg.seed}
    if cfg.alpha_max is not None:
        kwargs["alpha_max"] = cfg.alpha_max
    rows = run_suite(cfg.suite, **kwargs)
    if cfg.fmt == "json":
        text = json.dumps([r._asdict() for r in rows], indent=2) + "\n"
    else:
        text = "".join(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.observed}\n" for r in rows)
        text += f"{sum(r.passed for r in rows)}/{len(rows)} checks passed\n"
    code = _emit(text, cfg)
    return code or (EXIT_OK if all(r.passed for r in rows) else EXIT_METHOD)


def kernel_csv(alpha: int, m: int) -> str:
    nodes, g = green.kernel_grid(alpha, m)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x\\y"] + [repr(float(y)) for y in nodes])
    for x, row in zip(nodes, g):
        w.writerow([repr(float(x))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def cmd_kernel(cfg: RunConfig) -> int:
    return _emit(kernel_csv(cfg.alpha, cfg.grid), cfg)


def cmd_export(cfg: RunConfig) -> int:
    """Convergence data: Nystrom c(m) for halving m, and the Toeplitz scaled sequence."""
    alpha = cfg.alpha
    finest = cfg.nystrom_nodes or default_nodes(alpha)
    m_list = sorted({max(8, finest >> k) for k in range(4)})
    rows = [("nystrom", m, c) for m, c in green.nystrom_convergence_table(alpha, m_list)]
    if alpha <= 4:
        est = toeplitz.c_alpha_by_extrapolation(alpha, cfg.n_grid)
        rows += [("toeplitz-scaled", n, s) for n, s in zip(est.params["n_grid"], est.params["scaled"])]
    if cfg.fmt == "json":
        text = json.dumps({"alpha": alpha, "rows": [
            {"series": s, "size": m, "value": v} for s, m, v in rows]}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "series", "size", "value"])
        for s, m, v in rows:
            w.writerow([alpha, s, m, repr(float(v))])
        text = buf.getvalue()
    return _emit(text, cfg)


COMMANDS = {"compute": cmd_compute, "table": cmd_table, "verify": cmd_verify,
            "kernel": cmd_kernel, "export": cmd_export}


def _int_list(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="calpha", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("compute", help="compute c_alpha by one or all methods")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--method", choices=METHODS + ("all",), default="nystrom")
    sp.add_argument("--nystrom-nodes", type=int)
    sp.add_argument("--n-grid", type=_int_list)
    sp.add_argument("--scan-points", type=int, default=2000)
    sp.add_argument("--consistency-tol", type=float, default=1e-4)
    common(sp)

    sp = sub.add_parser("table", help="c_alpha next to bounds, asymptotics and the conjecture")
    sp.add_argument("--alpha", type=int)
    sp.add_argument("--alpha-min", type=int, default=1)
    sp.add_argument("--alpha-max", type=int)
    sp.add_argument("--method", choices=METHODS, default="nystrom")
    sp.add_argument("--nystrom-nodes", type=int)
    sp.add_argument("--n-grid", type=_int_list)
    sp.add_argument("--scan-points", type=int, default=2000)
    common(sp)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    sp.add_argument("--alpha-max", type=int)
    sp.add_argument("--trials", type=int, default=1000)
    common(sp)

    sp = sub.add_parser("kernel", help="G_alpha on an m x m grid as CSV")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--grid", type=int, default=33)
    common(sp)

    sp = sub.add_parser("export", help="quadrature and Toeplitz convergence data")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--nystrom-nodes", type=int)
    sp.add_argument("--n-grid", type=_int_list)
    common(sp)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for key, value in vars(ns).items():
        if key != "command" and value is not None and hasattr(cfg, key):
            setattr(cfg, key, value)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.alpha is not None and cfg.alpha < 1:
        raise UsageError("--alpha must be at least 1")
    if cfg.command == "table":
        if cfg.alpha is not None and cfg.alpha_max is not None:
            raise UsageError("give either --alpha or --alpha-max, not both")
        alphas = cfg.alphas()
        if not alphas or alphas[0] < 1:
            raise UsageError("empty or invalid alpha range")
        if alphas[-1] > MAX_TABLE_ALPHA:
            raise UsageError(f"table supports alpha up to {MAX_TABLE_ALPHA}")
    if cfg.command == "verify" and cfg.alpha_max is not None and cfg.alpha_max < 1:
        raise UsageError("--alpha-max must be at least 1")
    if cfg.method == "toeplitz" and cfg.alpha is not None and cfg.alpha > 4:
        raise UsageError("the toeplitz method supports alpha <= 4")
    if cfg.nystrom_nodes is not None and not 8 <= cfg.nystrom_nodes <= 1024:
        raise UsageError("--nystrom-nodes must be in 8..1024")
    if cfg.command == "kernel" and not 1 <= cfg.grid <= 1024:
        raise UsageError("--grid must be in 1..1024")
    if cfg.scan_points < 2:
        raise UsageError("--scan-points must be at least 2")
    if cfg.trials < 1:
        raise UsageError("--trials must be positive")
    if cfg.command in ("kernel", "export") and cfg.fmt == "text":
        cfg.fmt = "csv"


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
