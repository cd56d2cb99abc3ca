"""Simulation harness for the four sparse-means benchmarks.

Random streams: every replication draws from its own PCG64 generator seeded by
``SeedSequence(seed, spawn_key=(experiment number, rep))``. Results therefore
do not depend on how replications are scheduled across workers. Changing this
scheme changes every golden number, so it is versioned as ``RNG_SCHEME``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import baselines
from .estimator import estimate
from .reference import REFERENCE
from .vbdp import Hyperparams

logger = logging.getLogger(__name__)

RNG_SCHEME = "pcg64-seedseq-v1"


@dataclass(frozen=True)
class ExperimentSpec:
    exp_id: str
    n: int
    sigma0: float
    cells: tuple  # (s_n, mu0) for exp1-3, (A,) for exp4
    description: str


EXPERIMENTS = {
    "exp1": ExperimentSpec(
        "exp1", 200, 4.0,
        tuple((s, mu) for s in (10, 20, 40, 80) for mu in (1.0, 3.0, 5.0, 7.0)),
        "n=200, s_n nonzero means fixed at mu0",
    ),
    "exp2": ExperimentSpec(
        "exp2", 500, 6.0,
        tuple((s, mu) for s in (25, 50, 100) for mu in (3.0, 4.0, 5.0)),
        "n=500, s_n nonzero means fixed at mu0",
    ),
    "exp3": ExperimentSpec(
        "exp3", 500, 6.0,
        tuple((s, mu) for s in (25, 50, 100) for mu in (3.0, 4.0, 5.0)),
        "n=500, s_n nonzero means drawn N(mu0, 1) per replication",
    ),
    "exp4": ExperimentSpec(
        "exp4", 1000, 6.0,
        tuple((a,) for a in (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)),
        "n=1000, ten means at 10, ninety at A, rest 0",
    ),
}

DEFAULT_METHODS = ("dp", "soft", "hard", "sure", "fdr0.01", "fdr0.1", "fdr0.4")


@dataclass(frozen=True)
class ExperimentConfig:
    exp_id: str
    n: int
    s_n: int = 0
    mu0: float = 0.0
    A: float = 0.0
    reps: int = 200
    hyper: Hyperparams = field(default_factory=Hyperparams)
    methods: tuple = DEFAULT_METHODS
    seed: int = 0
    signal_sd: float = 1.0  # exp3 spread of nonzero means

    def __post_init__(self):
        if self.exp_id not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.exp_id!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.exp_id == "exp4":
            if self.n < 100:
                raise ValueError("exp4 needs n >= 100")
        elif not 0 <= self.s_n <= self.n:
            raise ValueError("need 0 <= s_n <= n")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        object.__setattr__(self, "methods", tuple(self.methods))

    @property
    def exp_number(self) -> int:
        return int(self.exp_id[3:])

    @property
    def level(self) -> float:
        """The swept signal level: mu0 for exp1-3, A for exp4."""
        return self.A if self.exp_id == "exp4" else self.mu0

    @property
    def sparsity(self) -> int:
        return 100 if self.exp_id == "exp4" else self.s_n

    def cell_key(self) -> tuple:
        return (self.A,) if self.exp_id == "exp4" else (self.s_n, self.mu0)


def benchmark_hyper(exp_id: str, **overrides) -> Hyperparams:
    """Benchmark hyperparameters: T=10, alpha0=1, w0=0.01, kappa=0.99, per-experiment sigma0."""
    base = Hyperparams(sigma0_sq=EXPERIMENTS[exp_id].sigma0 ** 2)
    return replace(base, **overrides) if overrides else base


def grid(exp_id: str, reps: int = 200, seed: int = 0, hyper: Optional[Hyperparams] = None,
         methods: Sequence[str] = DEFAULT_METHODS, cells: Optional[Iterable[tuple]] = None):
    """Configs for the benchmark grid of one experiment (or the given cells)."""
    spec = EXPERIMENTS[exp_id]
    hyper = hyper or benchmark_hyper(exp_id)
    cells = spec.cells if cells is None else tuple(cells)
    out = []
    for cell in cells:
        if exp_id == "exp4":
            kw = dict(A=float(cell[0]))
        else:
            kw = dict(s_n=int(cell[0]), mu0=float(cell[1]))
        out.append(ExperimentConfig(exp_id, spec.n, reps=reps, hyper=hyper,
                                    methods=tuple(methods), seed=seed, **kw))
    return out


@dataclass(frozen=True)
class TrueMeans:
    theta_star: np.ndarray
    support: np.ndarray

    @property
    def s_n(self) -> int:
        return int(self.support.size)


def rep_rng(config: ExperimentConfig, rep: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(config.seed), spawn_key=(config.exp_number, int(rep)))
    return np.random.Generator(np.random.PCG64(ss))


def gen_theta(config: ExperimentConfig, rng: np.random.Generator) -> TrueMeans:
    n = config.n
    theta = np.zeros(n)
    if config.exp_id == "exp4":
        theta[:10] = 10.0
        theta[10:100] = config.A
    elif config.exp_id == "exp3":
        theta[: config.s_n] = config.mu0 + config.signal_sd * rng.standard_normal(config.s_n)
    else:
        theta[: config.s_n] = config.mu0
    return TrueMeans(theta, np.flatnonzero(theta))


def gen_data(truth: TrueMeans, rng: np.random.Generator) -> np.ndarray:
    return truth.theta_star + rng.standard_normal(truth.theta_star.size)


def draw_replicate(config: ExperimentConfig, rep: int):
    """(truth, x) for replication ``rep``; reproducible in isolation."""
    rng = rep_rng(config, rep)
    truth = gen_theta(config, rng)
    return truth, gen_data(truth, rng)


# method(x, hyper, truth) -> theta_hat
MethodFn = Callable[[np.ndarray, Hyperparams, TrueMeans], np.ndarray]


def _dp(x, h, truth):
    return estimate(x, h).theta_hat


METHODS: dict[str, MethodFn] = {
    "dp": _dp,
    "soft": lambda x, h, t: baselines.soft_threshold(x, baselines.universal_lambda(x.size)),
    "hard": lambda x, h, t: baselines.hard_threshold(x, baselines.universal_lambda(x.size)),
    "sure": lambda x, h, t: baselines.sure_estimate(x),
    "fdr0.01": lambda x, h, t: baselines.fdr_estimate(x, 0.01),
    "fdr0.1": lambda x, h, t: baselines.fdr_estimate(x, 0.1),
    "fdr0.4": lambda x, h, t: baselines.fdr_estimate(x, 0.4),
    # calibration-only
    "oracle": lambda x, h, t: t.theta_star.copy(),
    "identity": lambda x, h, t: x.copy(),
}


def run_replicate(config: ExperimentConfig, rep: int) -> dict:
    """Total squared and absolute error of each method on one replication.

    A method that raises is recorded as ``None`` instead of aborting the run.
    """
    truth, x = draw_replicate(config, rep)
    out = {}
    for name in config.methods:
        try:
            est = np.asarray(METHODS[name](x, config.hyper, truth), dtype=float)
            if est.shape != x.shape or not np.all(np.isfinite(est)):
                raise ValueError(f"method {name} returned an invalid estimate")
            err = est - truth.theta_star
            out[name] = (float(np.sum(err * err)), float(np.sum(np.abs(err))))
        except Exception as exc:  # noqa: BLE001 - one bad method must not sink the run
            logger.warning("method %s failed on rep %d: %s", name, rep, exc)
            out[name] = None
    return out


@dataclass
class MethodResult:
    method: str
    mse: float
    mse_se: float
    mae: float
    mae_se: float
    reps: int
    failures: int
    sse: np.ndarray = field(repr=False)
    sae: np.ndarray = field(repr=False)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    methods: dict[str, MethodResult]

    def __getitem__(self, method: str) -> MethodResult:
        return self.methods[method]


def _mean_se(v: np.ndarray) -> tuple[float, float]:
    if v.size == 0:
        return float("nan"), float("nan")
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(np.mean(v)), se


def aggregate(config: ExperimentConfig, per_rep: Sequence[tuple[int, dict]]) -> ExperimentResult:
    per_rep = sorted(per_rep, key=lambda r: r[0])
    results = {}
    for name in config.methods:
        vals = [r[name] for _, r in per_rep if r.get(name) is not None]
        failures = len(per_rep) - len(vals)
        sse = np.array([v[0] for v in vals])
        sae = np.array([v[1] for v in vals])
        mse, mse_se = _mean_se(sse)
        mae, mae_se = _mean_se(sae)
        results[name] = MethodResult(name, mse, mse_se, mae, mae_se, len(per_rep), failures, sse, sae)
    return ExperimentResult(config, results)


def _run_chunk(args):
    config, reps = args
    return [(rep, run_replicate(config, rep)) for rep in reps]


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run every configured method over ``config.reps`` replications."""
    if not config.methods:
        return ExperimentResult(config, {})
    unknown = [m for m in config.methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")
    reps = list(range(config.reps))
    if jobs <= 1:
        per_rep = _run_chunk((config, reps))
    else:
        chunks = [(config, reps[k::jobs]) for k in range(jobs) if reps[k::jobs]]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_rep = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    return aggregate(config, per_rep)


def minimax_rate(n: int, s_n: int) -> float:
    if not 0 < s_n < n:
        raise ValueError("minimax rate needs 0 < s_n < n")
    return s_n * math.log(n / s_n)


def rate_check(rows: Iterable[tuple[int, int, float]]) -> list[dict]:
    """Ratio mse / (s_n log(n / s_n)) for each (n, s_n, mse)."""
    out = []
    for n, s_n, mse in rows:
        rate = minimax_rate(n, s_n)
        out.append({"n": n, "s_n": s_n, "mse": mse, "rate": rate, "ratio": mse / rate})
    return out


CSV_COLUMNS = ("experiment", "n", "s_n", "mu0_or_A", "method", "mse", "mse_se",
               "mae", "mae_se", "reps", "failures")


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def results_to_rows(results: Iterable[ExperimentResult]) -> list[list[str]]:
    rows = []
    for res in results:
        c = res.config
        for name, r in res.methods.items():
            rows.append([c.exp_id, str(c.n), str(c.sparsity), f"{c.level:g}", name,
                         _fmt(r.mse), _fmt(r.mse_se), _fmt(r.mae), _fmt(r.mae_se),
                         str(r.reps), str(r.failures)])
    return rows


def results_to_csv(results: Iterable[ExperimentResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(results_to_rows(results))
    return buf.getvalue()


def _reference_value(c: ExperimentConfig, metric: str, method: str) -> Optional[int]:
    ref = REFERENCE.get(c.exp_id, {}).get(metric, {}).get(method)
    cells = EXPERIMENTS[c.exp_id].cells
    if ref is None or c.n != EXPERIMENTS[c.exp_id].n or c.cell_key() not in cells:
        return None
    return ref[cells.index(c.cell_key())]


def render_table(results: Sequence[ExperimentResult], metric: str = "mse",
                 with_reference: bool = False) -> str:
    """Aligned table: one row per method, one column per grid cell.

    With ``with_reference`` each entry reads ``ours (published)``.
    """
    if not results:
        return ""
    exp4 = results[0].config.exp_id == "exp4"
    head1 = ["A" if exp4 else "s_n"] + [f"{r.config.level:g}" if exp4 else str(r.config.s_n) for r in results]
    head2 = ["" if exp4 else "mu0"] + ["" if exp4 else f"{r.config.mu0:g}" for r in results]
    methods = []
    for r in results:
        methods += [m for m in r.methods if m not in methods]
    body = []
    for m in methods:
        row = [m]
        for r in results:
            mr = r.methods.get(m)
            cell = "-" if mr is None else f"{getattr(mr, metric):.0f}"
            if with_reference:
                ref = _reference_value(r.config, metric, m)
                if ref is not None:
                    cell += f" ({ref})"
            row.append(cell)
        body.append(row)
    lines = [head1] + ([] if exp4 else [head2]) + body
    widths = [max(len(line[k]) for line in lines) for k in range(len(head1))]
    fmt = lambda line: "  ".join(s.rjust(w) for s, w in zip(line, widths))
    rule = "-" * len(fmt(head1))
    text = [rule, fmt(head1)] + ([] if exp4 else [fmt(head2)]) + [rule] + [fmt(b) for b in body] + [rule]
    return "\n".join(text)


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out[key] = value
    return out
