"""Game loops, Monte Carlo harness, bound curves, and report writers.

Discrete games run rounds t = 1..T: the learner predicts from the state
through round t-1, the adversary picks gains (seeing the prediction), and
the regret vector advances by g - <p, g> * 1.  Continuous games run the
Euler discretization of the Brownian gain process with the left-limit
convention: the prediction for step k uses the regret after step k-1 and
the time stamp k * dt.

Monte Carlo trials are batched: per-trial randomness is counter-seeded, so
a batch of trials is bit-identical to the trials run one at a time, and
results do not depend on how trials are chunked across workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _rng, specfun
from .core import (
    CONTINUOUS_INCREMENT,
    GainVector,
    RegretState,
    SimplexDistribution,
    quantile_rank,
)
from .environments import (
    ADVERSARY_KINDS,
    AdversarySpec,
    BrownianPathConfig,
    CovarianceSpec,
    next_gain,
)
from .learners import (
    LEARNER_KINDS,
    LearnerConfig,
    independent_potential_weights,
    mwu_eta,
    mwu_weights,
    quantile_potential_weights,
)

__all__ = [
    "SpecError",
    "GameTranscript",
    "ExperimentSpec",
    "ExperimentSummary",
    "sample_schedule",
    "run_discrete_game",
    "run_continuous_game",
    "monte_carlo",
    "slack",
    "reaction_allowance",
    "regret_bound_curve",
    "quantile_bound_coefficient",
    "sample_max_gaussians",
    "write_summary_csv",
    "write_summary_json",
    "CSV_HEADER",
]

CSV_HEADER = "t,trial,regret,quantile_eps,quantile_value,bound_kind,bound_value,violation"

# Extra allowance on discrete bound checks; pure floating-point headroom.
DISCRETE_BOUND_TOL = 1e-6

# Internal batch adversary: i.i.d. uniform [-1, 1] gains, used to realize
# families of random fixed sequences without materializing them.
_PM1_STREAM = "_pm1-stream"


class SpecError(ValueError):
    """An experiment spec failed validation; message names the field."""


# --------------------------------------------------------------------------
# sampling schedules and bound curves


def sample_schedule(horizon: int, stride: int | None = None) -> list[int]:
    """Rounds (or step indices) at which state is recorded.

    Default is geometric: 1, 2, 4, ... plus the final round, which keeps
    anytime-bound checks dense early where the bounds are tightest relative
    to noise.  A positive integer stride gives arithmetic sampling instead,
    always including the final round.
    """
    if horizon < 1:
        raise SpecError("horizon must be >= 1")
    if stride is None or stride == 0:
        out = []
        k = 1
        while k < horizon:
            out.append(k)
            k *= 2
        out.append(horizon)
        return out
    if stride < 0:
        raise SpecError("stride must be positive")
    out = list(range(stride, horizon + 1, stride))
    if not out or out[-1] != horizon:
        out.append(horizon)
    return out


def slack(dt: float, n: int, t) -> np.ndarray:
    """Discretization allowance added to continuous-time bound checks:
    5 sqrt(dt) sqrt(ln n + 1) sqrt(t).  Reported alongside every continuous
    assertion so a failure is interpretable."""
    return 5.0 * math.sqrt(dt) * math.sqrt(math.log(n) + 1.0) * np.sqrt(np.asarray(t, float))


def reaction_allowance(dt: float, n: int, steps: int, trials: int) -> float:
    """One-increment allowance for Euler-discretized pathwise bound checks.

    Within a single Euler step the player cannot react, so the discretized
    regret can overshoot a continuous-time pathwise bound by one raw
    increment; the worst increment across n coordinates, all steps, and all
    trials is below sqrt(2 dt ln(2 n steps trials)) with high probability
    (Gaussian max envelope).  Without this term a bound check at t = dt
    measures Gaussian tails rather than the algorithm: the sqrt(t)-scaled
    slack is O(dt) there while one increment is O(sqrt(dt))."""
    return math.sqrt(2.0 * dt * math.log(2.0 * n * max(steps, 1) * max(trials, 1)))


def quantile_bound_coefficient(epsilon: float, n: int) -> float:
    """Coefficient c with quantile(eps, R_t) <= c sqrt(t): c = 2 lambda(gamma)
    for gamma = (1 - eps) / eps."""
    gamma = (1.0 - epsilon) / epsilon
    return 2.0 * specfun.lambda_inv(specfun.LambdaQuery(gamma, 1e-10))


def regret_bound_curve(kind: str, n: int, t, horizon=None) -> np.ndarray:
    """Max-regret bound at the sampled times for a learner kind.

    mwu-fixed's guarantee is terminal-only: entries before the horizon are
    NaN.  independent-potential's continuous bound is lambda(3n - 1) sqrt(t)
    (slack is added by the caller for discretized runs).
    """
    tt = np.asarray(t, dtype=np.float64)
    if kind == "mwu-fixed":
        out = np.full(tt.shape, np.nan)
        out[tt == float(horizon)] = math.sqrt(2.0 * float(horizon) * math.log(n))
        return out
    if kind == "mwu-anytime":
        return 2.0 * np.sqrt(tt * math.log(n))
    if kind == "independent-potential":
        lam = specfun.lambda_inv(specfun.LambdaQuery(3.0 * n - 1.0, 1e-10))
        return lam * np.sqrt(tt)
    if kind == "quantile-potential":
        # max regret equals the eps = 1/n quantile
        return quantile_bound_coefficient(1.0 / n, n) * np.sqrt(tt)
    raise SpecError(f"no regret bound for learner kind {kind!r}")


# --------------------------------------------------------------------------
# single-game reference loops


@dataclass(frozen=True)
class GameTranscript:
    """A single game's sampled states plus provenance."""

    states: tuple
    final: RegretState
    learner_kind: str
    adversary_kind: str
    seed: int
    max_abs_p_dot_r: float
    note: str = ""

    def __post_init__(self):
        ts = [s.t for s in self.states]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sampled states must be strictly increasing in t")


def _predict_weights(cfg: LearnerConfig, round_index: int, state_regret, state_gain) -> np.ndarray:
    """Prediction for the discrete round about to be played, from the state
    through the previous round."""
    if cfg.kind == "quantile-potential":
        return quantile_potential_weights(round_index, state_regret)
    if cfg.kind == "independent-potential":
        return independent_potential_weights(float(round_index), state_regret)
    # MWU kinds step from the previous round's clock (uniform at zero).
    eta = mwu_eta(cfg, round_index - 1)
    if eta == 0.0:
        return np.full(cfg.n, 1.0 / cfg.n)
    return mwu_weights(eta, state_gain)


def run_discrete_game(learner: LearnerConfig, adversary: AdversarySpec, horizon: int,
                      stride: int | None = None) -> GameTranscript:
    """Play rounds 1..horizon and record sampled states.

    Deterministic given the adversary seed.  Raises with round context if a
    learner or adversary error surfaces mid-game.
    """
    if horizon < 1:
        raise SpecError("horizon must be >= 1")
    schedule = sample_schedule(horizon, stride)
    state = RegretState.initial(learner.n)
    states = []
    max_pr = 0.0
    sched = set(schedule)
    for t in range(1, horizon + 1):
        try:
            p = SimplexDistribution(_predict_weights(learner, t, state.regret,
                                                     state.cumulative_gain))
            g = next_gain(adversary, t, p)
            r = g.gains - float((p.weights * g.gains).sum())
            max_pr = max(max_pr, abs(float((p.weights * r).sum())))
            state = state.advance(p, g)
        except Exception as exc:
            exc.args = (f"round {t}: {exc}",)
            raise
        if t in sched:
            states.append(state)
    note = "experimental: discrete play of the continuous-time design" \
        if learner.kind == "independent-potential" else ""
    return GameTranscript(tuple(states), state, learner.kind, adversary.kind,
                          adversary.seed, max_pr, note)


def run_continuous_game(learner: LearnerConfig, path: BrownianPathConfig,
                        stride: int | None = None) -> GameTranscript:
    """Euler loop for the continuous game; time stamps are k * dt.

    Runs the batched kernel with a single trial, so a standalone game is
    bit-identical to the same trial inside a Monte Carlo batch.
    """
    if path.cov.n != learner.n:
        raise SpecError(f"covariance is {path.cov.n}-dimensional, learner has n={learner.n}")
    schedule = sample_schedule(path.steps, stride)
    res = run_continuous_batch(learner, path, [_rng.derive_key(path.seed)], schedule)
    states = tuple(
        RegretState(k * path.dt, res["samples"][i, 0], res["G_samples"][i, 0],
                    float(res["A_samples"][i, 0]))
        for i, k in enumerate(schedule))
    return GameTranscript(states, states[-1], learner.kind, "brownian",
                          path.seed, res["max_pr"])


# --------------------------------------------------------------------------
# batched trial runners (bit-identical to looping single games)


def _batch_gains(adv_kind: str, keys, t: int, n: int, p: np.ndarray,
                 sequence=None, leader: int = 0) -> np.ndarray:
    if adv_kind == "uniform-random":
        return _rng.sign_matrix(keys, t, n)
    if adv_kind == _PM1_STREAM:
        return _rng.pm1_matrix(keys, t, n)
    if adv_kind == "single-leader":
        g = np.zeros((p.shape[0], n))
        g[:, leader] = 1.0
        return g
    if adv_kind == "alternating":
        g = np.zeros((p.shape[0], n))
        g[np.arange(p.shape[0]), np.argmin(p, axis=1)] = 1.0
        return g
    if adv_kind == "fixed-sequence":
        if t > sequence.shape[0]:
            from .environments import SequenceExhausted

            raise SequenceExhausted(
                f"fixed sequence has {sequence.shape[0]} rounds, round {t} requested")
        return np.broadcast_to(sequence[t - 1], (p.shape[0], n))
    raise SpecError(f"unknown adversary kind {adv_kind!r}")


def _predict_batch(cfg: LearnerConfig, t: int, R: np.ndarray, G: np.ndarray) -> np.ndarray:
    if cfg.kind == "quantile-potential":
        return quantile_potential_weights(t, R)
    if cfg.kind == "independent-potential":
        return independent_potential_weights(float(t), R)
    eta = mwu_eta(cfg, t - 1)
    if eta == 0.0:
        return np.full(R.shape, 1.0 / cfg.n)
    return mwu_weights(eta, G)


def run_discrete_batch(learner: LearnerConfig, adv_kind: str, trial_keys,
                       horizon: int, schedule: list[int], sequence=None,
                       leader: int = 0) -> dict:
    """Run a batch of trials of one discrete matchup.

    Returns sampled regret ``(S, trials, n)``, final state arrays, and the
    worst per-round |<p, r>| seen (an exact-zero identity up to rounding).
    """
    keys = np.asarray(trial_keys, dtype=np.uint64)
    trials = keys.size
    n = learner.n
    R = np.zeros((trials, n))
    G = np.zeros((trials, n))
    A = np.zeros(trials)
    samples = np.empty((len(schedule), trials, n))
    g_samples = np.empty_like(samples)
    a_samples = np.empty((len(schedule), trials))
    sched = {t: i for i, t in enumerate(schedule)}
    max_pr = 0.0
    for t in range(1, horizon + 1):
        P = _predict_batch(learner, t, R, G)
        g = _batch_gains(adv_kind, keys, t, n, P, sequence, leader)
        earned = (P * g).sum(axis=1, keepdims=True)
        r = g - earned
        max_pr = max(max_pr, float(np.abs((P * r).sum(axis=1)).max()))
        R += r
        G += g
        A += earned[:, 0]
        i = sched.get(t)
        if i is not None:
            samples[i] = R
            g_samples[i] = G
            a_samples[i] = A
    return {"samples": samples, "G_samples": g_samples, "A_samples": a_samples,
            "R": R, "G": G, "A": A, "max_pr": max_pr}


def run_continuous_batch(learner: LearnerConfig, path: BrownianPathConfig,
                         trial_keys, schedule: list[int]) -> dict:
    """Euler-discretized continuous trials, batched; sampled at step indices."""
    from .environments import brownian_increment_matrix

    keys = np.asarray(trial_keys, dtype=np.uint64)
    trials = keys.size
    n = learner.n
    R = np.zeros((trials, n))
    G = np.zeros((trials, n))
    A = np.zeros(trials)
    samples = np.empty((len(schedule), trials, n))
    g_samples = np.empty_like(samples)
    a_samples = np.empty((len(schedule), trials))
    sched = {k: i for i, k in enumerate(schedule)}
    max_pr = 0.0
    for k in range(1, path.steps + 1):
        t_k = k * path.dt
        if learner.kind == "quantile-potential":
            # halved potential: gradient magnitude erfi(max(R/2, 0)/sqrt(2t))
            P = independent_potential_weights(t_k, R * 0.5)
        elif learner.kind == "independent-potential":
            P = independent_potential_weights(t_k, R)
        else:
            prev_t = (k - 1) * path.dt
            if learner.kind == "mwu-anytime":
                c = learner.eta_override if learner.eta_override is not None \
                    else math.sqrt(math.log(n))
                eta = 0.0 if prev_t <= 0 else c / math.sqrt(prev_t)
            else:
                eta = mwu_eta(learner, 1)
            P = np.full((trials, n), 1.0 / n) if eta == 0.0 else mwu_weights(eta, G)
        dg = brownian_increment_matrix(keys, k, path)
        earned = (P * dg).sum(axis=1, keepdims=True)
        r = dg - earned
        max_pr = max(max_pr, float(np.abs((P * r).sum(axis=1)).max()))
        R += r
        G += dg
        A += earned[:, 0]
        i = sched.get(k)
        if i is not None:
            samples[i] = R
            g_samples[i] = G
            a_samples[i] = A
    return {"samples": samples, "G_samples": g_samples, "A_samples": a_samples,
            "R": R, "G": G, "A": A, "max_pr": max_pr}


# --------------------------------------------------------------------------
# experiment spec and Monte Carlo harness


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment description (see README for the JSON form)."""

    learner: LearnerConfig
    adversary: AdversarySpec | None = None
    path: BrownianPathConfig | None = None
    horizon: int | None = None
    trials: int = 1
    epsilons: tuple = ()
    base_seed: int = 0
    seeds: tuple | None = None
    stride: int | None = None

    def __post_init__(self):
        if (self.adversary is None) == (self.path is None):
            raise SpecError("exactly one of adversary or path must be given")
        if self.adversary is not None and (self.horizon is None or self.horizon < 1):
            raise SpecError("horizon: discrete experiments need a positive horizon")
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        for e in self.epsilons:
            if not (0.0 < e <= 1.0):
                raise SpecError(f"epsilons: {e} outside (0, 1]")
        if self.seeds is not None and len(self.seeds) != self.trials:
            raise SpecError(f"seeds: expected {self.trials} entries, got {len(self.seeds)}")

    @property
    def continuous(self) -> bool:
        return self.path is not None

    def trial_seed(self, trial: int) -> int:
        if self.seeds is not None:
            return int(self.seeds[trial])
        return _rng.derive_key(self.base_seed, trial)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        if not isinstance(d, dict):
            raise SpecError("spec must be a JSON object")
        known = {"learner", "adversary", "path", "n", "horizon", "dt", "trials",
                 "epsilons", "base_seed", "seeds", "stride"}
        for k in d:
            if k not in known:
                raise SpecError(f"unknown spec field {k!r}")
        try:
            n = int(d["n"])
        except KeyError:
            raise SpecError("n: missing") from None
        ldict = d.get("learner")
        if not isinstance(ldict, dict) or "kind" not in ldict:
            raise SpecError("learner: must be an object with a 'kind'")
        if ldict["kind"] not in LEARNER_KINDS:
            raise SpecError(f"learner.kind: {ldict['kind']!r} not one of {LEARNER_KINDS}")
        horizon = d.get("horizon")
        try:
            learner = LearnerConfig(
                kind=ldict["kind"], n=n,
                horizon=int(ldict.get("horizon", horizon)) if ldict.get("horizon", horizon)
                is not None else None,
                eta_override=ldict.get("eta_override"))
        except ValueError as exc:
            raise SpecError(f"learner: {exc}") from None
        adversary = None
        path = None
        if "adversary" in d and d["adversary"] is not None:
            adict = d["adversary"]
            if not isinstance(adict, dict) or "kind" not in adict:
                raise SpecError("adversary: must be an object with a 'kind'")
            if adict["kind"] not in ADVERSARY_KINDS:
                raise SpecError(f"adversary.kind: {adict['kind']!r} not one of {ADVERSARY_KINDS}")
            try:
                adversary = AdversarySpec(
                    kind=adict["kind"], seed=int(adict.get("seed", 0)),
                    sequence_path=adict.get("sequence_path"),
                    leader=int(adict.get("leader", 0)))
            except ValueError as exc:
                raise SpecError(f"adversary: {exc}") from None
        if "path" in d and d["path"] is not None:
            pdict = d["path"]
            if not isinstance(pdict, dict):
                raise SpecError("path: must be an object")
            rho = pdict.get("rho")
            try:
                cov = CovarianceSpec.identity(n) if rho in (None, 0) \
                    else CovarianceSpec.equicorrelated(n, float(rho))
                path = BrownianPathConfig(
                    cov=cov, dt=float(pdict.get("dt", d.get("dt", 1e-3))),
                    horizon=float(pdict["horizon"]), seed=int(pdict.get("seed", 0)))
            except KeyError as exc:
                raise SpecError(f"path.{exc.args[0]}: missing") from None
            except ValueError as exc:
                raise SpecError(f"path: {exc}") from None
        try:
            return cls(
                learner=learner, adversary=adversary, path=path,
                horizon=int(horizon) if horizon is not None else None,
                trials=int(d.get("trials", 1)),
                epsilons=tuple(float(e) for e in d.get("epsilons", ())),
                base_seed=int(d.get("base_seed", 0)),
                seeds=tuple(int(s) for s in d["seeds"]) if d.get("seeds") is not None else None,
                stride=int(d["stride"]) if d.get("stride") is not None else None,
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(str(exc)) from None


@dataclass
class ExperimentSummary:
    """Per-trial sampled regret/quantile values, bound curves, violations."""

    meta: dict
    t_values: np.ndarray                 # (S,)
    regret: np.ndarray                   # (S, trials) max_i R_i
    quantiles: np.ndarray                # (S, trials, E)
    epsilons: tuple
    regret_bound: np.ndarray             # (S,), NaN where no bound applies
    quantile_bound: np.ndarray           # (S, E), NaN where no bound applies
    tolerance: np.ndarray                # (S,)
    violations: list = field(default_factory=list)
    max_abs_p_dot_r: float = 0.0

    @property
    def trials(self) -> int:
        return self.regret.shape[1]

    @property
    def violation_count(self) -> int:
        return len(self.violations)

    def rows(self) -> list:
        """Aggregate per-time rows for the JSON summary."""
        out = []
        for s, t in enumerate(self.t_values):
            row = {
                "t": float(t),
                "mean_regret": float(self.regret[s].mean()),
                "max_regret": float(self.regret[s].max()),
                "mean_quantile_regret": {
                    repr(e): float(self.quantiles[s, :, j].mean())
                    for j, e in enumerate(self.epsilons)},
                "bounds": {},
            }
            if np.isfinite(self.regret_bound[s]):
                row["bounds"][self.meta["regret_bound_kind"]] = float(self.regret_bound[s])
            for j, e in enumerate(self.epsilons):
                if np.isfinite(self.quantile_bound[s, j]):
                    row["bounds"][f"quantile[{e!r}]"] = float(self.quantile_bound[s, j])
            out.append(row)
        return out

    def to_json_dict(self) -> dict:
        return {
            "meta": self.meta,
            "trials": self.trials,
            "rows": self.rows(),
            "violations": self.violations,
            "violation_count": self.violation_count,
            "max_abs_p_dot_r": self.max_abs_p_dot_r,
        }


def _scan_violations(summary: ExperimentSummary) -> None:
    """Populate the violations list: rows where measured > bound + tolerance."""
    kind = summary.meta["regret_bound_kind"]
    for s, t in enumerate(summary.t_values):
        tol = summary.tolerance[s]
        rb = summary.regret_bound[s]
        if np.isfinite(rb):
            for j in np.nonzero(summary.regret[s] > rb + tol)[0]:
                summary.violations.append({
                    "t": float(t), "trial": int(j), "bound_kind": kind,
                    "epsilon": None, "value": float(summary.regret[s, j]),
                    "bound": float(rb)})
        for je, e in enumerate(summary.epsilons):
            qb = summary.quantile_bound[s, je]
            if np.isfinite(qb):
                for j in np.nonzero(summary.quantiles[s, :, je] > qb + tol)[0]:
                    summary.violations.append({
                        "t": float(t), "trial": int(j), "bound_kind": "quantile",
                        "epsilon": float(e), "value": float(summary.quantiles[s, j, je]),
                        "bound": float(qb)})


def _mc_chunk(spec: ExperimentSpec, trial_lo: int, trial_hi: int, schedule: list[int]) -> dict:
    """Run trials [trial_lo, trial_hi) of the experiment; picklable worker."""
    keys = np.array([_rng.derive_key(spec.trial_seed(j)) for j in range(trial_lo, trial_hi)],
                    dtype=np.uint64)
    if spec.continuous:
        return run_continuous_batch(spec.learner, spec.path, keys, schedule)
    adv = spec.adversary
    return run_discrete_batch(spec.learner, adv.kind, keys, spec.horizon, schedule,
                              sequence=adv.sequence, leader=adv.leader)


def monte_carlo(spec: ExperimentSpec, threads: int = 1) -> ExperimentSummary:
    """Run independent seeded trials and aggregate regret, quantile regret,
    bound curves, and bound violations.

    Aggregation merges chunks by trial index, so the result is identical for
    any thread count.
    """
    if spec.continuous:
        steps = spec.path.steps
        schedule = sample_schedule(steps, spec.stride)
        t_values = np.array([k * spec.path.dt for k in schedule])
    else:
        schedule = sample_schedule(spec.horizon, spec.stride)
        t_values = np.array(schedule, dtype=np.float64)

    trials = spec.trials
    threads = max(1, int(threads))
    if threads == 1 or trials < 2 * threads:
        parts = [_mc_chunk(spec, 0, trials, schedule)]
    else:
        cuts = np.linspace(0, trials, threads + 1).astype(int)
        spans = [(int(a), int(b)) for a, b in zip(cuts, cuts[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(_mc_chunk, [spec] * len(spans),
                                  [a for a, _ in spans], [b for _, b in spans],
                                  [schedule] * len(spans)))
    samples = np.concatenate([p["samples"] for p in parts], axis=1)
    max_pr = max(p["max_pr"] for p in parts)

    regret = samples.max(axis=2)
    eps = spec.epsilons
    n = spec.learner.n
    sorted_desc = -np.sort(-samples, axis=2)
    quantiles = np.empty(samples.shape[:2] + (len(eps),))
    for j, e in enumerate(eps):
        quantiles[:, :, j] = sorted_desc[:, :, quantile_rank(e, n) - 1]

    kind = spec.learner.kind
    bound_applies = kind != "independent-potential" or spec.continuous
    regret_bound = regret_bound_curve(kind, n, t_values, horizon=spec.horizon) \
        if bound_applies else np.full(t_values.shape, np.nan)
    quantile_bound = np.full((len(t_values), len(eps)), np.nan)
    if kind == "quantile-potential":
        for j, e in enumerate(eps):
            quantile_bound[:, j] = quantile_bound_coefficient(e, n) * np.sqrt(t_values)
    if spec.continuous:
        extra = slack(spec.path.dt, n, t_values) + reaction_allowance(
            spec.path.dt, n, spec.path.steps, trials)
        regret_bound = regret_bound + extra
        quantile_bound = quantile_bound + extra[:, None]
    tolerance = DISCRETE_BOUND_TOL * np.sqrt(t_values)

    meta = {
        "learner": kind,
        "n": n,
        "adversary": spec.adversary.kind if spec.adversary else "brownian",
        "horizon": spec.horizon if not spec.continuous else spec.path.horizon,
        "dt": spec.path.dt if spec.continuous else None,
        "trials": trials,
        "base_seed": spec.base_seed,
        "epsilons": list(eps),
        "stride": spec.stride,
        "regret_bound_kind": kind if bound_applies else "none",
        "slack_formula": "5*sqrt(dt)*sqrt(ln(n)+1)*sqrt(t)" if spec.continuous else None,
        "reaction_allowance": reaction_allowance(spec.path.dt, n, spec.path.steps, trials)
        if spec.continuous else None,
        "note": ("experimental: discrete play of the continuous-time design"
                 if kind == "independent-potential" and not spec.continuous else ""),
    }
    summary = ExperimentSummary(
        meta=meta, t_values=t_values, regret=regret, quantiles=quantiles,
        epsilons=eps, regret_bound=regret_bound, quantile_bound=quantile_bound,
        tolerance=tolerance, max_abs_p_dot_r=max_pr)
    _scan_violations(summary)
    return summary


# --------------------------------------------------------------------------
# learner-independent expected-regret reference sampler


def sample_max_gaussians(n: int, t: float, trials: int, seed: int = 0,
                         chunk: int = 100) -> np.ndarray:
    """Maxima of n i.i.d. N(0, t) per trial (the expected regret of any
    player against independent experts equals the mean of this statistic).
    Counter-seeded and chunked over trials to bound memory."""
    out = np.empty(trials)
    scale = math.sqrt(t)
    for lo in range(0, trials, chunk):
        hi = min(lo + chunk, trials)
        keys = np.array([_rng.derive_key(seed, j) for j in range(lo, hi)], dtype=np.uint64)
        z = _rng.normal_matrix(keys, 0, n)
        out[lo:hi] = z.max(axis=1) * scale
    return out


# --------------------------------------------------------------------------
# report writers


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_summary_csv(summary: ExperimentSummary, path) -> None:
    """Write the per-trial CSV: one row per (t, trial) for the max regret and
    one per (t, trial, epsilon) for each quantile; schema is CSV_HEADER."""
    kind = summary.meta["regret_bound_kind"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for s, t in enumerate(summary.t_values):
            tol = summary.tolerance[s]
            rb = summary.regret_bound[s]
            for j in range(summary.trials):
                v = summary.regret[s, j]
                viol = int(np.isfinite(rb) and v > rb + tol)
                fh.write(",".join([
                    _fmt(float(t)), str(j), _fmt(float(v)), "", "",
                    kind if np.isfinite(rb) else "",
                    _fmt(float(rb) if np.isfinite(rb) else None), str(viol)]) + "\n")
                for je, e in enumerate(summary.epsilons):
                    qv = summary.quantiles[s, j, je]
                    qb = summary.quantile_bound[s, je]
                    qviol = int(np.isfinite(qb) and qv > qb + tol)
                    fh.write(",".join([
                        _fmt(float(t)), str(j), "", _fmt(float(e)), _fmt(float(qv)),
                        "quantile" if np.isfinite(qb) else "",
                        _fmt(float(qb) if np.isfinite(qb) else None), str(qviol)]) + "\n")


def write_summary_json(summary: ExperimentSummary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
