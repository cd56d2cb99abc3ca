"""Command-line interface: ``sparseq {estimate,simulate,rate-check,selftest}``.

Exit codes: 0 success, 1 selftest failure, 2 usage or input error, 3 empty data.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from .estimator import estimate
from .simlab import (
    DEFAULT_METHODS,
    EXPERIMENTS,
    METHODS,
    ExperimentConfig,
    grid,
    minimax_rate,
    benchmark_hyper,
    parse_config_text,
    render_table,
    results_to_csv,
    run_experiment,
)
from .vbdp import Hyperparams

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE, EXIT_EMPTY = 0, 1, 2, 3

RATE_CONFIGS = ((200, 10), (500, 25), (1000, 100))

# flag name -> (Hyperparams field, type)
HYPER_FLAGS = {
    "T": ("T", int),
    "alpha0": ("alpha0", float),
    "w0": ("w0", float),
    "sigma0": ("sigma0_sq", float),
    "kappa": ("kappa", float),
    "tol": ("tol", float),
    "max_iter": ("max_iter", int),
}


class UsageError(Exception):
    pass


class EmptyInput(Exception):
    pass


def _add_hyper_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("hyperparameters")
    g.add_argument("--T", type=int, help="truncation level (default 10)")
    g.add_argument("--alpha0", type=float, help="DP concentration (default 1)")
    g.add_argument("--w0", type=float, help="prior spike weight (default 0.01)")
    g.add_argument("--sigma0", type=float, help="slab standard deviation, squared internally")
    g.add_argument("--kappa", type=float, help="fractional likelihood power (default 0.99)")
    g.add_argument("--tol", type=float, help="convergence tolerance on max |dphi| (default 1e-6)")
    g.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap (default 500)")
    g.add_argument("--seed", type=int, help="random seed; falls back to $SPARSEQ_SEED, then 0")


def _resolve_seed(flag: Optional[int], fallback: Optional[str] = None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("SPARSEQ_SEED")
    for value, source in ((fallback, "config seed"), (env, "SPARSEQ_SEED")):
        if value not in (None, ""):
            try:
                return int(value)
            except ValueError:
                raise UsageError(f"{source} must be an integer, got {value!r}") from None
    return 0


def _hyper_overrides(args, config: Optional[dict] = None) -> dict:
    """Hyperparameter overrides from the config file, then flags (flags win)."""
    out = {}
    for flag, (name, typ) in HYPER_FLAGS.items():
        value = getattr(args, flag)
        if value is None and config is not None:
            raw = config.get(flag, config.get(flag.replace("_", "-")))
            if raw is not None:
                try:
                    value = typ(raw)
                except ValueError:
                    raise UsageError(f"config: bad value for {flag}: {raw!r}") from None
        if value is not None:
            out[name] = value ** 2 if flag == "sigma0" else value
    return out


def _make_hyper(base: Hyperparams, overrides: dict, seed: int) -> Hyperparams:
    try:
        return replace(base, seed=seed, **overrides)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid hyperparameters: {exc}") from None


def read_values(text: str) -> list[float]:
    """One number per line, or a single-column CSV with an optional ``x`` header."""
    values = []
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        fields = next(csv.reader([line]))
        if len(fields) != 1:
            raise UsageError(f"line {lineno}: expected a single column, got {len(fields)} fields")
        token = fields[0].strip()
        if not seen_data and token.lower() == "x":
            seen_data = True
            continue
        seen_data = True
        try:
            v = float(token)
        except ValueError:
            raise UsageError(f"line {lineno}: cannot parse {token!r} as a number") from None
        if not math.isfinite(v):
            raise UsageError(f"line {lineno}: value {token!r} is not finite")
        values.append(v)
    return values


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_estimate(args) -> int:
    try:
        with open(args.input, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    x = read_values(text)
    if not x:
        raise EmptyInput(f"{args.input}: no data")
    h = _make_hyper(Hyperparams(), _hyper_overrides(args), _resolve_seed(args.seed))
    est = estimate(x, h, keep_posteriors=args.json is not None)
    _write_text(args.output, est.to_csv())
    if args.json is not None:
        with open(args.json, "w") as fh:
            fh.write(est.to_json(include_posteriors=True))
    g = est.prior
    print(
        f"n={len(x)} atoms={g.support_size()} zero_weight={g.zero_weight:.4f} "
        f"iterations={est.n_iter} converged={str(est.converged).lower()}",
        file=sys.stderr,
    )
    return EXIT_OK


def parse_cell(text: str, exp_id: str) -> tuple:
    """``s_n=10,mu0=7`` for exp1-3, ``A=7`` for exp4."""
    want = ("A",) if exp_id == "exp4" else ("s_n", "mu0")
    kv = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"bad cell {text!r}: expected key=value pairs")
        k, v = (s.strip() for s in part.split("=", 1))
        kv[k] = v
    if set(kv) != set(want):
        raise UsageError(f"bad cell {text!r}: {exp_id} cells need {','.join(k + '=...' for k in want)}")
    try:
        if exp_id == "exp4":
            cell = (float(kv["A"]),)
        else:
            s_n = float(kv["s_n"])
            if s_n != int(s_n):
                raise ValueError
            cell = (int(s_n), float(kv["mu0"]))
    except ValueError:
        raise UsageError(f"bad cell {text!r}: non-numeric value") from None
    if not all(math.isfinite(v) for v in cell):
        raise UsageError(f"bad cell {text!r}: values must be finite")
    if exp_id != "exp4" and not 0 <= cell[0] <= EXPERIMENTS[exp_id].n:
        raise UsageError(f"bad cell {text!r}: s_n must lie in [0, {EXPERIMENTS[exp_id].n}]")
    return cell


def _parse_methods(text: Optional[str]) -> tuple:
    if text is None:
        return DEFAULT_METHODS
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise UsageError(f"unknown method(s) {unknown or text!r}; choose from {', '.join(sorted(METHODS))}")
    return methods


def _parse_positive(value, name: str, source: str = "") -> int:
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{source}{name} must be an integer, got {value!r}") from None
    if v < 1:
        raise UsageError(f"{source}{name} must be >= 1, got {v}")
    return v


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"config {path}: {exc}") from None


def cmd_simulate(args) -> int:
    exp_id = args.experiment
    cfg = _load_config(args.config)
    reps = _parse_positive(args.reps if args.reps is not None else cfg.get("reps", 200), "reps")
    jobs = _parse_positive(args.jobs if args.jobs is not None else cfg.get("jobs", 1), "jobs")
    methods = _parse_methods(args.methods if args.methods is not None else cfg.get("methods"))
    cell_texts = args.cell or [c for c in cfg.get("cells", "").split(";") if c.strip()]
    cells = [parse_cell(c, exp_id) for c in cell_texts] or None
    seed = _resolve_seed(args.seed, cfg.get("seed"))
    hyper = _make_hyper(benchmark_hyper(exp_id), _hyper_overrides(args, cfg), seed)
    configs = grid(exp_id, reps=reps, seed=seed, hyper=hyper, methods=methods, cells=cells)

    results = []
    t0 = time.perf_counter()
    for c in configs:
        results.append(run_experiment(c, jobs=jobs))
        print(f"{c.exp_id} cell {c.cell_key()} done ({time.perf_counter() - t0:.1f}s)", file=sys.stderr)

    csv_text = results_to_csv(results)
    tables = "\n".join(
        f"{metric.upper()} (published in parentheses)\n{render_table(results, metric, with_reference=True)}\n"
        for metric in ("mse", "mae")
    )
    if args.output:
        _write_text(args.output, csv_text)
        sys.stdout.write(tables)
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(tables)
    return EXIT_OK


def _read_rate_csv(path: str, method: str) -> list[tuple[int, int, float]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    for k, row in enumerate(rows, 2):
        if row.get("method") != method:
            continue
        try:
            out.append((int(row["n"]), int(row["s_n"]), float(row["mse"])))
        except (KeyError, TypeError, ValueError):
            raise UsageError(f"{path} line {k}: expected n, s_n, mse columns") from None
    if not out:
        raise EmptyInput(f"{path}: no rows for method {method!r}")
    return out


def _rate_experiment(n: int) -> str:
    for exp_id in ("exp1", "exp2"):
        if EXPERIMENTS[exp_id].n == n:
            return exp_id
    return "exp2"


def rate_rows(mu0: float = 5.0, reps: int = 50, seed: int = 0, jobs: int = 1,
              configs: Sequence[tuple[int, int]] = RATE_CONFIGS, method: str = "dp") -> list[tuple[int, int, float]]:
    """Run the fixed-signal benchmark at each (n, s_n) and collect (n, s_n, mse)."""
    out = []
    for n, s_n in configs:
        exp_id = _rate_experiment(n)
        c = ExperimentConfig(exp_id, n, s_n=s_n, mu0=mu0, reps=reps, hyper=benchmark_hyper(exp_id, seed=seed),
                             methods=(method,), seed=seed)
        out.append((n, s_n, run_experiment(c, jobs=jobs)[method].mse))
    return out


def cmd_rate_check(args) -> int:
    if args.from_csv:
        rows = _read_rate_csv(args.from_csv, args.method)
    else:
        reps = _parse_positive(args.reps, "reps")
        jobs = _parse_positive(args.jobs, "jobs")
        rows = rate_rows(args.mu0, reps, _resolve_seed(args.seed), jobs, method=args.method)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "s_n", "mse", "rate", "ratio"))
    worst = 0.0
    for n, s_n, mse in rows:
        if not 0 < s_n < n:
            raise UsageError(f"rate undefined for n={n}, s_n={s_n}")
        rate = minimax_rate(n, s_n)
        worst = max(worst, mse / rate)
        w.writerow((n, s_n, f"{mse:.4f}", f"{rate:.4f}", f"{mse / rate:.4f}"))
    _write_text(args.output, buf.getvalue())
    print(f"max ratio mse / (s_n log(n/s_n)) = {worst:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args, digamma=None) -> int:
    from .selftest import run_selftest

    results = run_selftest(digamma)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sparseq", description="Sparse normal-means estimation with a truncated DP mixture prior.")
    p.add_argument("-v", "--verbose", action="store_true", help="log fitting diagnostics")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", help="estimate means for observations in a file")
    e.add_argument("input", help="one number per line, or single-column CSV with optional header 'x'")
    e.add_argument("-o", "--output", help="output CSV (default: stdout)")
    e.add_argument("--json", metavar="PATH", help="also write prior and per-coordinate posteriors as JSON")
    _add_hyper_flags(e)

    s = sub.add_parser("simulate", help="run a benchmark experiment")
    s.add_argument("experiment", choices=sorted(EXPERIMENTS))
    s.add_argument("--cell", action="append", help="grid cell, e.g. s_n=10,mu0=7 or A=7 (repeatable)")
    s.add_argument("--reps", type=int, help="replications per cell (default 200)")
    s.add_argument("--methods", help=f"comma-separated, default {','.join(DEFAULT_METHODS)}")
    s.add_argument("--jobs", type=int, help="worker processes (default 1)")
    s.add_argument("--config", help="key = value file; flags take precedence")
    s.add_argument("-o", "--output", help="results CSV (default: stdout, table goes to stderr)")
    _add_hyper_flags(s)

    r = sub.add_parser("rate-check", help="compare risk to s_n log(n/s_n)")
    r.add_argument("--mu0", type=float, default=5.0)
    r.add_argument("--reps", type=int, default=50)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--seed", type=int)
    r.add_argument("--method", default="dp")
    r.add_argument("--from-csv", help="use mse values from a simulate CSV instead of running")
    r.add_argument("-o", "--output", help="output CSV (default: stdout)")

    sub.add_parser("selftest", help="run embedded invariant checks")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"sparseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"estimate": cmd_estimate, "simulate": cmd_simulate,
                "rate-check": cmd_rate_check, "selftest": cmd_selftest}
    try:
        return handlers[args.verb](args)
    except UsageError as exc:
        print(f"sparseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptyInput as exc:
        print(f"sparseq: error: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
