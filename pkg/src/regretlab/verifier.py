"""Numerical verification sweeps for the inequalities behind the learners.

Each sweep evaluates one standalone inequality over a stated grid (or seeded
random scan), records the worst margin (minimum of LHS - RHS in the
inequality's orientation), and lists violations below the floating-point
tolerance.  Sweeps are deterministic: grids are fixed and random scans are
counter-seeded.

Deep-tail grid points push exp arguments beyond 1e7, far outside double
range, so margins there are formed from (sign, log|value|) representations
with the common factor extracted; see :func:`_combined_margin`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _rng, specfun
from .engine import run_continuous_batch, run_discrete_batch, sample_schedule, slack
from .environments import BrownianPathConfig, CovarianceSpec
from .learners import LearnerConfig, potential_half, sbht_batch

__all__ = [
    "SweepReport",
    "SWEEPS",
    "run_sweeps",
    "check_discrete_bhe",
    "check_m0_convolution",
    "check_expx2",
    "check_lambdabound",
    "check_erfi_bound",
    "check_continuous_bhe",
    "check_discrete_ito_lower_bound",
    "check_potential_monotone_in_games",
    "check_covariance_identity",
    "check_sbht_bound",
    "check_specfun_lemmas",
]

_SWEEP_SEED = 20240917
_CLIP_LOG = 700.0


@dataclass
class SweepReport:
    """Outcome of one inequality sweep."""

    lemma_id: str
    points_checked: int
    worst_margin: float
    tolerance: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "lemma_id": self.lemma_id,
            "points_checked": self.points_checked,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "violations": [list(v) for v in self.violations[:100]],
            "violation_count": len(self.violations),
            "passed": self.passed,
        }


def _report(lemma_id: str, margins: np.ndarray, points, tolerance: float) -> SweepReport:
    """Build a report from per-point margins.

    ``points`` labels each margin: either an indexable sequence or a
    callable on the flat index (so large sweeps label only violations).
    """
    margins = np.asarray(margins, dtype=np.float64)
    bad = np.nonzero(margins < -tolerance)[0]
    label = points if callable(points) else points.__getitem__
    violations = [(label(int(i)), float(margins[i])) for i in bad[:1000]]
    worst = float(margins.min()) if margins.size else math.inf
    return SweepReport(lemma_id, int(margins.size), worst, tolerance, violations)


def _combined_margin(terms) -> np.ndarray:
    """Sum of coef * sign * exp(log) terms, overflow-safe.

    Each term is (coef, sign_array, log_array).  The largest log is factored
    out, so sign and near-zero comparisons stay exact even when individual
    terms are e^(1e7)-sized; the returned float is clipped to ~1e304.
    """
    logs = []
    signs = []
    for coef, s, lg in terms:
        logs.append(lg + math.log(abs(coef)))
        signs.append(np.asarray(s) * np.sign(coef))
    L = np.stack(np.broadcast_arrays(*logs))
    S = np.stack(np.broadcast_arrays(*signs))
    lmax = L.max(axis=0)
    with np.errstate(invalid="ignore"):
        w = np.where(np.isneginf(L), 0.0, np.exp(L - lmax))
    total = (S * w).sum(axis=0)
    with np.errstate(over="ignore"):
        out = total * np.exp(np.minimum(lmax, _CLIP_LOG))
    return np.where(np.isneginf(lmax), 0.0, out)


def _margin_with_tail(linear, terms) -> np.ndarray:
    """Per-point margins: direct linear arithmetic where it stays finite
    (so exact cancellations like the z = 0 equality survive), the log-space
    combination of ``terms`` where the linear path overflowed."""
    lin = np.asarray(linear, dtype=np.float64)
    bad = ~np.isfinite(lin)
    if not np.any(bad):
        return lin
    return np.where(bad, _combined_margin(terms), lin)


# --------------------------------------------------------------------------
# potential-function lemmas


def check_discrete_bhe() -> SweepReport:
    """Unit-step backwards-heat inequality for the truncated potential:
    phi(t, x+1) + phi(t, x-1) >= 2 phi(t-1, x) for t > 1, all x.

    Sweeps 500 times in (1, 1000] (log-spaced offsets from 1, so t = 1+1e-6
    is probed) by 2000 x-values spanning [-10 sqrt(t), 10 sqrt(t)] plus the
    case-boundary points {-1, 0, 1}.
    """
    t = 1.0 + np.geomspace(1e-6, 999.0, 500)
    unit = np.linspace(-10.0, 10.0, 1997)
    xs = np.concatenate([np.sqrt(t)[:, None] * unit[None, :],
                         np.broadcast_to([-1.0, 0.0, 1.0], (t.size, 3))], axis=1)
    tcol = t[:, None]
    linear = (specfun.phi(tcol, xs + 1.0) + specfun.phi(tcol, xs - 1.0)
              - 2.0 * specfun.phi(tcol - 1.0, xs))
    s1, l1 = specfun.phi_signed_log(tcol, xs + 1.0)
    s2, l2 = specfun.phi_signed_log(tcol, xs - 1.0)
    s3, l3 = specfun.phi_signed_log(tcol - 1.0, xs)
    margins = _margin_with_tail(
        linear, [(1.0, s1, l1), (1.0, s2, l2), (-2.0, s3, l3)])
    cols = xs.shape[1]

    def label(i):
        return (float(t[i // cols]), float(xs[i // cols, i % cols]))

    return _report("discrete-bhe", margins.ravel(), label, 1e-10)


def check_m0_convolution() -> SweepReport:
    """Two-point convolution bound for M0: for z in [0, 1),
    M0((x+z)^2/2) + M0((x-z)^2/2) >= 2 sqrt(1-z^2) M0(x^2 / (2(1-z^2))).
    Large-|x|, large-z cells are checked in log-safe form.
    """
    zs = np.array([0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99])
    x = np.linspace(-6.0, 6.0, 1201)
    margins = []
    for z in zs:
        a1 = (x + z) ** 2 / 2.0
        a2 = (x - z) ** 2 / 2.0
        a3 = x * x / (2.0 * (1.0 - z * z))
        coef = 2.0 * math.sqrt(1.0 - z * z)
        linear = specfun.m0(a1) + specfun.m0(a2) - coef * specfun.m0(a3)
        s1, l1 = specfun.m0_signed_log(a1)
        s2, l2 = specfun.m0_signed_log(a2)
        s3, l3 = specfun.m0_signed_log(a3)
        margins.append(_margin_with_tail(
            linear, [(1.0, s1, l1), (1.0, s2, l2), (-coef, s3, l3)]))

    def label(i):
        return (float(zs[i // x.size]), float(x[i % x.size]))

    return _report("m0-ineq", np.concatenate(margins), label, 1e-10)


def check_expx2() -> SweepReport:
    """Growth bound 1 - M0(x^2/2) >= exp(x^2/2) / (x^2 + 1 + 2/x^2) on (0, 10]."""
    x = np.geomspace(1e-3, 10.0, 2000)
    lhs = 1.0 - specfun.m0(x * x / 2.0)
    rhs = np.exp(x * x / 2.0) / (x * x + 1.0 + 2.0 / (x * x))
    margins = lhs - rhs
    return _report("expx2", margins, [float(v) for v in x], 1e-12)


def check_lambdabound() -> SweepReport:
    """lambda(alpha) <= 3 + sqrt(2 ln(alpha+1)) on a 1000-point log grid of
    [0, 1e6], plus the asymptotic trend: lambda(alpha)/sqrt(2 ln alpha) is
    decreasing along alpha = 1e2..1e6 and <= 1.35 at 1e6."""
    alphas = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 999)])
    lam = specfun.lambda_inv(alphas, tolerance=1e-8)
    margins = list(specfun.lambda_upper_bound(alphas) - lam)
    pts = [("bound", float(a)) for a in alphas]
    trend_alphas = np.array([1e2, 1e3, 1e4, 1e5, 1e6])
    ratios = specfun.lambda_inv(trend_alphas, tolerance=1e-8) / np.sqrt(
        2.0 * np.log(trend_alphas))
    margins.extend(-np.diff(ratios))
    pts.extend(("trend-decreasing", float(a)) for a in trend_alphas[1:])
    margins.append(1.35 - float(ratios[-1]))
    pts.append(("trend-limit", 1e6))
    return _report("lambdabound", np.array(margins), pts, 1e-12)


def check_erfi_bound() -> SweepReport:
    """Classical strict bound (sqrt(pi)/2) erfi(z) < (exp(z^2) - 1)/z on (0, 6]."""
    z = np.geomspace(1e-3, 6.0, 1000)
    lhs = 0.5 * math.sqrt(math.pi) * specfun.erfi(z)
    rhs = np.expm1(z * z) / z
    margins = rhs - lhs
    return _report("erfi-bound", margins, [float(v) for v in z], 0.0)


def check_continuous_bhe() -> SweepReport:
    """Backwards-heat identity for the closed-form derivatives:
    d/dt phi + (1/2) d2/dx2 phi == 0 for x > 0 (to 1e-10) and >= 0 for x < 0."""
    margins = []
    pts = []
    for t in (0.5, 1.0, 10.0):
        xpos = np.geomspace(1e-4, 5.0 * math.sqrt(t), 700)
        resid = specfun.phi_dt(t, xpos) + 0.5 * specfun.phi_dxx(t, xpos)
        margins.append(1e-10 - np.abs(resid))          # |resid| <= 1e-10
        pts.extend((t, float(v)) for v in xpos)
        xneg = -np.geomspace(1e-4, 5.0 * math.sqrt(t), 300)
        margins.append(specfun.phi_dt(t, xneg) + 0.5 * specfun.phi_dxx(t, xneg))
        pts.extend((t, float(v)) for v in xneg)
    return _report("continuous-bhe", np.concatenate(margins), pts, 0.0)


# --------------------------------------------------------------------------
# discrete-trajectory lemmas


def _f_half(t, x):
    """f(t, x) = phi(t, x/2), the per-expert potential on regret scale."""
    return specfun.phi(t, 0.5 * np.asarray(x, dtype=np.float64))


def _sequence_margins(x: np.ndarray):
    """For one trajectory with steps |dx| <= 1: (concavity-inequality margin,
    telescoping-identity residual) of the unit-step expansion of f(t, x_t)."""
    T = x.size
    t = np.arange(2.0, T + 1.0)
    xprev = x[:-1]
    xcur = x[1:]
    f_prev_p1 = _f_half(t, xprev + 1.0)
    f_prev_m1 = _f_half(t, xprev - 1.0)
    f_prev = _f_half(t, xprev)
    fx = 0.5 * (f_prev_p1 - f_prev_m1)
    fxx = f_prev_p1 + f_prev_m1 - 2.0 * f_prev
    ft = f_prev - _f_half(t - 1.0, xprev)
    lhs = _f_half(float(T), x[-1]) - _f_half(1.0, x[0])
    rhs_ito = float((fx * (xcur - xprev)).sum() + (0.5 * fxx + ft).sum())
    exact = float((_f_half(t, xcur) - 0.5 * (f_prev_p1 + f_prev_m1)).sum()
                  + (0.5 * fxx + ft).sum())
    return lhs - rhs_ito, lhs - exact


def check_discrete_ito_lower_bound() -> SweepReport:
    """Unit-step stochastic-expansion inequality along bounded-step paths.

    For f concave in x and any path with |x_t - x_{t-1}| <= 1:
    f(T, x_T) - f(1, x_1) >= sum f_x dx + sum (f_xx/2 + f_t), with equality
    for +-1 steps; the companion telescoping identity is exact for any f.
    1000 random uniform-step paths plus 200 +-1-step and 50 constant paths.
    """
    key = _rng.derive_key(_SWEEP_SEED, 7)
    margins = []
    pts = []
    for i in range(1250):
        u = _rng.uniform_matrix(_rng.derive_key(key, i), 0, 201)
        T = 2 + int(u[0] * 199)
        x0 = 4.0 * (u[1] - 0.5)
        if i < 1000:
            steps = 2.0 * u[2:2 + T - 1] - 1.0
            kind = "uniform"
        elif i < 1200:
            steps = np.where(u[2:2 + T - 1] < 0.5, -1.0, 1.0)
            kind = "pm1"
        else:
            steps = np.zeros(T - 1)
            kind = "constant"
        x = np.concatenate([[x0], x0 + np.cumsum(steps)])
        ineq, ident = _sequence_margins(x)
        margins.append(ineq)
        pts.append((kind, i, "inequality"))
        margins.append(1e-9 - abs(ident))
        pts.append((kind, i, "identity"))
        if kind == "pm1":
            # stated equality case: the inequality is tight
            margins.append(1e-9 - abs(ineq))
            pts.append((kind, i, "equality-case"))
    return _report("discrete-ito", np.array(margins), pts, 1e-9)


def check_potential_monotone_in_games() -> SweepReport:
    """Along any play of the quantile-potential learner, the potential
    sum_i phi(t, R_i/2) never drops below its round-1 value (and that value
    is non-negative).  Swept over the built-in adversaries, n in {2, 8, 32},
    T = 2000, 50 seeds for the stochastic kinds; plus Euler-discretized
    continuous runs where the potential stays above -slack(dt)."""
    horizon = 2000
    margins = []
    pts = []
    for n in (2, 8, 32):
        cfg = LearnerConfig("quantile-potential", n)
        for adv_kind, trials in (("uniform-random", 50), ("_pm1-stream", 50),
                                 ("single-leader", 1), ("alternating", 1)):
            keys = np.array([_rng.derive_key(_SWEEP_SEED, n, adv_kind, j)
                             for j in range(trials)], dtype=np.uint64)
            res = run_discrete_batch(cfg, adv_kind, keys, horizon,
                                     schedule=list(range(1, horizon + 1)))
            t_col = np.arange(1.0, horizon + 1.0)[:, None, None]
            pot = np.asarray(specfun.phi(t_col, 0.5 * res["samples"])).sum(axis=-1)
            base = pot[0]
            worst_rel = (pot - base[None, :]).min(axis=0)
            margins.extend(worst_rel)
            pts.extend((n, adv_kind, int(j), "vs-round-1") for j in range(trials))
            margins.extend(base)
            pts.extend((n, adv_kind, int(j), "round-1-nonneg") for j in range(trials))
    # continuous leg
    n = 8
    cfg = LearnerConfig("quantile-potential", n)
    path = BrownianPathConfig(CovarianceSpec.identity(n), dt=1e-3, horizon=5.0)
    schedule = sample_schedule(path.steps)
    keys = np.array([_rng.derive_key(_SWEEP_SEED, "cts", j) for j in range(20)],
                    dtype=np.uint64)
    res = run_continuous_batch(cfg, path, keys, schedule)
    for i, k in enumerate(schedule):
        t_k = k * path.dt
        pot = potential_half(t_k, res["samples"][i])
        allowance = float(slack(path.dt, n, t_k))
        margins.extend(pot + allowance)
        pts.extend((n, "brownian", int(j), f"t={t_k!r}") for j in range(20))
    return _report("potential-monotone", np.array(margins), pts, 1e-6)


# --------------------------------------------------------------------------
# covariance and heat-term checks


def check_covariance_identity() -> SweepReport:
    """Quadratic covariation of the regret coordinates matches
    (e_i - p)^T Sigma (e_j - p) per unit time, for a constant-p strategy on
    a correlated 3-expert weight matrix, within 3 Monte Carlo standard
    errors over 1e6 Euler steps."""
    n = 3
    cov = CovarianceSpec.equicorrelated(n, 0.5)
    p = np.array([0.5, 0.3, 0.2])
    dt = 1e-3
    steps = 1_000_000
    key = _rng.derive_key(_SWEEP_SEED, "covariation")
    cols = np.eye(n) - p[:, None]            # column i is e_i - p
    mix = cov.weight_matrix @ cols           # dR = dB^T mix
    sums = np.zeros((n, n))
    sqsums = np.zeros((n, n))
    chunk = 200_000
    for lo in range(0, steps, chunk):
        hi = min(lo + chunk, steps)
        # one key per step; the per-step lane hashing matches the engine's
        step_keys = np.uint64(key) ^ np.arange(lo + 1, hi + 1, dtype=np.uint64)
        db = _rng.normal_matrix(step_keys, 0, n)
        dr = (db * math.sqrt(dt)) @ mix
        sums += np.einsum("ki,kj->ij", dr, dr)
        sqsums += np.einsum("ki,kj->ij", dr * dr, dr * dr)
    predicted = (cols.T @ cov.sigma @ cols) * (steps * dt)
    se = np.sqrt(np.maximum(sqsums - sums * sums / steps, 0.0))
    margins = []
    pts = []
    for i in range(n):
        for j in range(i, n):
            gap = abs(sums[i, j] - predicted[i, j])
            margins.append(3.0 * se[i, j] - gap)
            pts.append((i, j, float(sums[i, j]), float(predicted[i, j])))
    return _report("covariance-identity", np.array(margins), pts, 0.0)


def check_sbht_bound() -> SweepReport:
    """Random scan of the backwards-heat term's lower bound.

    Asserts the bound the induction actually yields, (2 - n) / (2 sqrt(t)),
    for every n in 1..16 (it is tight: x = (eps, 0, ..., 0) approaches it),
    and additionally the looser stated form (2 - n) / sqrt(t) for n >= 2.
    At n = 1 the looser form is provably false (the term equals
    exp(x^2/2t) / (2 sqrt(t)), which undercuts 1/sqrt(t) whenever
    x < sqrt(2 t ln 2)), so only the tight form applies there.
    10^4 points per (n, t) cell with coordinates uniform in [0, 5 sqrt(t)].
    """
    margins = []
    segments = []
    rows = 10_000
    for n in range(1, 17):
        for t in (0.25, 1.0, 4.0, 100.0):
            key = _rng.derive_key(_SWEEP_SEED, "sbht", n, int(t * 4))
            x = np.vstack([
                _rng.uniform_matrix(_rng.derive_key(key, block), 0, n * 1000).reshape(1000, n)
                for block in range(rows // 1000)
            ]) * (5.0 * math.sqrt(t))
            vals = sbht_batch(t, x)
            tight = (2.0 - n) / (2.0 * math.sqrt(t))
            margins.append(vals - tight)
            segments.append((n, t, "tight"))
            if n >= 2:
                stated = (2.0 - n) / math.sqrt(t)
                margins.append(vals - stated)
                segments.append((n, t, "stated"))

    def label(i):
        n_, t_, kind = segments[i // rows]
        return (n_, t_, i % rows, kind)

    return _report("sbht-bound", np.concatenate(margins), label, 1e-9)


def check_specfun_lemmas() -> SweepReport:
    """Aggregate of the three special-function sweeps (growth bound, lambda
    upper bound with its asymptotic trend, and the strict erfi bound)."""
    parts = [check_expx2(), check_lambdabound(), check_erfi_bound()]
    return SweepReport(
        "specfun-lemmas",
        sum(p.points_checked for p in parts),
        min(p.worst_margin for p in parts),
        max(p.tolerance for p in parts),
        [v for p in parts for v in p.violations],
    )


# --------------------------------------------------------------------------
# registry

SWEEPS = {
    "discrete-bhe": check_discrete_bhe,
    "m0-ineq": check_m0_convolution,
    "expx2": check_expx2,
    "lambdabound": check_lambdabound,
    "erfi-bound": check_erfi_bound,
    "continuous-bhe": check_continuous_bhe,
    "discrete-ito": check_discrete_ito_lower_bound,
    "potential-monotone": check_potential_monotone_in_games,
    "covariance-identity": check_covariance_identity,
    "sbht-bound": check_sbht_bound,
}


def run_sweeps(names=None, threads: int = 1) -> list:
    """Run the named sweeps (all by default) and return their reports.

    Sweeps are independent; with threads > 1 they run concurrently.  Results
    are returned in the requested order regardless of thread count.
    """
    if names is None:
        names = list(SWEEPS)
    unknown = [nm for nm in names if nm not in SWEEPS]
    if unknown:
        raise ValueError(f"unknown lemma ids {unknown}; known: {sorted(SWEEPS)}")
    if threads <= 1 or len(names) == 1:
        return [SWEEPS[nm]() for nm in names]
    with ThreadPoolExecutor(max_workers=min(threads, len(names))) as pool:
        return list(pool.map(lambda nm: SWEEPS[nm](), names))
