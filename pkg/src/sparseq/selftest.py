"""Embedded invariant checks, runnable from the command line.

Each check compares a fast path against an independent slow reference
(brute-force scans, extended-precision enumeration, identities).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import numerics
from .baselines import fdr_threshold, sure_lambda
from .estimator import posterior_weights
from .prior_map import ZERO, MapPrior, atom_posterior, map_assign
from .vbdp import Hyperparams, fit

EULER_GAMMA = 0.57721566490153286061


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def sure_lambda_scan(x) -> float:
    """O(n^2) SURE scan over {0} U {|x_i|}; ties to the smaller threshold."""
    a = [abs(float(v)) for v in x]
    n = len(a)
    best_lam, best = None, None
    for lam in sorted({0.0, *a}):
        risk = n - 2 * sum(1 for v in a if v <= lam) + math.fsum(min(v * v, lam * lam) for v in a)
        if best is None or risk < best:
            best_lam, best = lam, risk
    return best_lam


def fdr_threshold_scan(x, q: float) -> float:
    a = sorted((abs(float(v)) for v in x), reverse=True)
    n = len(a)
    kstar = 0
    for k in range(1, n + 1):
        if math.erfc(a[k - 1] / math.sqrt(2.0)) <= q * k / n:
            kstar = k
    return math.inf if kstar == 0 else a[kstar - 1]


def enumerate_posterior(x: float, g: MapPrior, kappa: float, digits: int = 40) -> list[float]:
    """Posterior atom weights with every term evaluated in decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = digits
        k, xd = Decimal(kappa), Decimal(x)
        terms = [Decimal(g.zero_weight) * (-k * xd * xd / 2).exp()]
        for loc, w in g.atoms:
            d = xd - Decimal(loc)
            terms.append(Decimal(w) * (-k * d * d / 2).exp())
        z = sum(terms)
        return [float(t / z) for t in terms]


def enumerate_assignment(phi_row, p, m) -> int:
    """Exact-arithmetic MAP atom with the zero-first tie rule."""
    phi_row = [Fraction(float(v)) for v in phi_row]
    p = [Fraction(float(v)) for v in p]
    best, key = ZERO, (sum(a * b for a, b in zip(phi_row, p)), 1, 0, 0)
    for t in range(len(m)):
        cand = (phi_row[t] * (1 - p[t]), 0, -abs(float(m[t])), -t)
        if cand > key:
            best, key = t, cand
    return best


def _check_digamma(digamma: Callable) -> CheckResult:
    rng = np.random.default_rng(0)
    errs = [
        abs(digamma(1.0) + EULER_GAMMA),
        abs(digamma(2.0) - 1 + EULER_GAMMA),
        abs(digamma(0.5) + EULER_GAMMA + 2 * math.log(2)),
    ]
    xs = np.exp(rng.uniform(math.log(0.01), math.log(1e4), 500))
    rec = max(abs(digamma(x + 1) - digamma(x) - 1 / x) for x in xs)
    ok = bool(max(errs) <= 1e-10 and rec <= 1e-12)
    return CheckResult("digamma values and recurrence", ok, f"value err {max(errs):.1e}, recurrence err {rec:.1e}")


def _check_reductions() -> CheckResult:
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        v = rng.normal(0, 20, rng.integers(1, 20))
        c = rng.uniform(-1e6, 1e6)
        worst = max(worst, abs(numerics.log_sum_exp(v + c) - numerics.log_sum_exp(v) - c) / max(1.0, abs(c)))
    xs = rng.uniform(-700, 700, 500)
    sym = float(np.max(np.abs(numerics.sigmoid(xs) + numerics.sigmoid(-xs) - 1)))
    return CheckResult("log_sum_exp shift / sigmoid symmetry", worst <= 1e-12 and sym <= 1e-15,
                       f"shift err {worst:.1e}, symmetry err {sym:.1e}")


def _check_fits() -> CheckResult:
    rng = np.random.default_rng(2)
    bad = []
    for k in range(8):
        n = int(rng.integers(1, 200))
        x = rng.normal(size=n) + np.where(rng.uniform(size=n) < 0.1, rng.choice([-5.0, 4.0]), 0.0)
        h = Hyperparams(sigma0_sq=float(rng.choice([16.0, 36.0])), seed=k, max_iter=100)

        def check(s, h=h):
            if np.max(np.abs(s.phi.sum(axis=1) - 1)) > 1e-10:
                bad.append("phi rows")
            if not (np.all(s.tau_sq > 0) and np.all(s.tau_sq <= h.sigma0_sq)):
                bad.append("tau_sq")
            if not (np.all(s.p > 0) and np.all(s.p < 1)):
                bad.append("p")
            if not (np.all(s.gamma1 >= 1) and np.all(s.gamma2 >= h.alpha0)):
                bad.append("gamma")

        fit(x, h, callback=check)
    return CheckResult("variational invariants per sweep", not bad, ", ".join(sorted(set(bad))) or "8 fits")


def _check_posterior() -> CheckResult:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(1, 6))
        counts = rng.integers(0, 10, k + 1)
        counts[0] += 1
        n = counts.sum()
        g = MapPrior(counts[0] / n, rng.uniform(-10, 10, k), counts[1:] / n)
        x, kappa = rng.uniform(-15, 15), rng.uniform(0.1, 1.0)
        got = posterior_weights([x], g, kappa)[0]
        for a, b in zip(got, enumerate_posterior(x, g, kappa)):
            if b > 1e-300:
                worst = max(worst, abs(a - b) / b)
    return CheckResult("coordinate posterior vs enumeration", bool(worst <= 1e-12), f"max rel err {worst:.1e}")


def _check_thresholds() -> CheckResult:
    rng = np.random.default_rng(4)
    mism = 0
    for _ in range(100):
        x = rng.normal(size=int(rng.integers(2, 120))) * rng.uniform(0.5, 4)
        mism += sure_lambda(x) != sure_lambda_scan(x)
        for q in (0.01, 0.1, 0.4):
            mism += fdr_threshold(x, q) != fdr_threshold_scan(x, q)
    return CheckResult("SURE / FDR thresholds vs brute force", mism == 0, f"{mism} mismatches")


def _check_assignments() -> CheckResult:
    rng = np.random.default_rng(5)
    mism = 0
    for _ in range(300):
        T = int(rng.integers(2, 11))
        phi = rng.dirichlet(np.ones(T))
        p, m = rng.uniform(size=T), rng.normal(0, 5, T)
        z, a = atom_posterior(phi, p, m)
        mism += map_assign(z, a, m) != enumerate_assignment(phi, p, m)
    return CheckResult("MAP assignment vs enumeration", mism == 0, f"{mism} mismatches")


def run_selftest(digamma: Optional[Callable] = None) -> list[CheckResult]:
    digamma = digamma or numerics.digamma
    checks = [
        lambda: _check_digamma(digamma),
        _check_reductions,
        _check_fits,
        _check_posterior,
        _check_thresholds,
        _check_assignments,
    ]
    out = []
    for chk in checks:
        t0 = time.perf_counter()
        try:
            res = chk()
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            res = CheckResult(getattr(chk, "__name__", "check"), False, f"raised {exc!r}")
        res.detail += f" [{time.perf_counter() - t0:.2f}s]"
        out.append(res)
    return out
