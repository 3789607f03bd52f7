"""Player strategies behind one online-learner interface.

Four strategies:

* ``mwu-fixed`` -- multiplicative weights with the horizon-tuned constant
  step sqrt(2 ln n / T).
* ``mwu-anytime`` -- multiplicative weights with the decreasing step
  sqrt(ln n / t), uniform on the first round.
* ``quantile-potential`` -- parameter-free player whose weights are the
  (negated) unit-step discrete gradient of the separable potential
  Phi(t, x) = sum_i phi(t, x_i / 2), evaluated at the previous round's
  regret vector.
* ``independent-potential`` -- the same construction on the undivided
  potential Phi(t, x) = sum_i phi(t, x_i), designed for continuous play
  against independent Brownian gains; discrete play is supported but
  experimental.

The ``*_weights`` kernels operate on arrays whose last axis indexes experts
(so a batch of Monte Carlo trials is one call); the ``*_distribution``
wrappers return validated :class:`~regretlab.core.SimplexDistribution`
values for single games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import specfun
from .core import RegretState, SimplexDistribution

__all__ = [
    "LearnerConfig",
    "LEARNER_KINDS",
    "mwu_distribution",
    "mwu_weights",
    "quantile_potential_distribution",
    "quantile_potential_weights",
    "independent_potential_distribution",
    "independent_potential_weights",
    "potential_half",
    "potential_full",
    "SbhtPoint",
    "sbht",
]

LEARNER_KINDS = ("mwu-fixed", "mwu-anytime", "quantile-potential", "independent-potential")

# Gradient sums smaller than this are treated as exactly zero (uniform play).
_ZERO_GRADIENT = 1e-300

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class LearnerConfig:
    """Which strategy to play, over how many experts.

    ``horizon`` is required by (and only by) ``mwu-fixed``.  ``eta_override``
    replaces the default step size: the constant step for ``mwu-fixed``, the
    numerator c of c / sqrt(t) for ``mwu-anytime``.
    """

    kind: str
    n: int
    horizon: int | None = None
    eta_override: float | None = None

    def __post_init__(self):
        if self.kind not in LEARNER_KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}; expected one of {LEARNER_KINDS}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "mwu-fixed":
            if self.horizon is None or self.horizon < 1:
                raise ValueError("mwu-fixed requires a positive horizon")
        if self.eta_override is not None and self.eta_override <= 0:
            raise ValueError("eta_override must be positive")


def _normalize(raw: np.ndarray) -> np.ndarray:
    """Normalize non-negative weights along the last axis, with a uniform
    fallback on rows whose total is numerically zero."""
    total = raw.sum(axis=-1, keepdims=True)
    n = raw.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        p = raw / total
    return np.where(total > _ZERO_GRADIENT, p, 1.0 / n)


def mwu_weights(eta: float, cumulative_gain: np.ndarray) -> np.ndarray:
    """Softmax of eta * G along the last axis, computed with max subtraction
    so |eta * G| up to ~700 cannot overflow."""
    z = eta * np.asarray(cumulative_gain, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    w = np.exp(z)
    return w / w.sum(axis=-1, keepdims=True)


def mwu_eta(cfg: LearnerConfig, round_index: int) -> float:
    """Step size used when predicting from a state after ``round_index`` rounds.

    Fixed-horizon: sqrt(2 ln n / T) (the regret-optimizing constant).
    Anytime: sqrt(ln n / round_index) for round_index >= 1; the first
    prediction (round_index = 0) is uniform, encoded as eta = 0.
    """
    if cfg.kind == "mwu-fixed":
        if cfg.eta_override is not None:
            return cfg.eta_override
        return math.sqrt(2.0 * math.log(cfg.n) / cfg.horizon)
    if cfg.kind == "mwu-anytime":
        if round_index <= 0:
            return 0.0
        c = cfg.eta_override if cfg.eta_override is not None else math.sqrt(math.log(cfg.n))
        return c / math.sqrt(round_index)
    raise ValueError(f"{cfg.kind!r} is not an MWU learner")


def mwu_distribution(cfg: LearnerConfig, state: RegretState) -> SimplexDistribution:
    """MWU probability vector p_i proportional to exp(eta * G_i)."""
    eta = mwu_eta(cfg, state.round)
    if eta == 0.0:
        return SimplexDistribution.uniform(cfg.n)
    return SimplexDistribution(mwu_weights(eta, state.cumulative_gain))


def quantile_potential_weights(round_index, prev_regret: np.ndarray) -> np.ndarray:
    """Weights of the quantile-potential player for the given round.

    Each entry is the negated discrete gradient
    [phi(t, R_i/2 - 1) - phi(t, R_i/2 + 1)] / 2 >= 0 (phi is non-increasing),
    normalized to the simplex; rows whose gradient vanishes (all regrets
    deep in the truncated region) fall back to uniform.
    """
    if np.any(np.asarray(round_index) < 1):
        raise ValueError("round_index must be >= 1")
    y = 0.5 * np.asarray(prev_regret, dtype=np.float64)
    t = float(round_index)
    raw = 0.5 * (specfun.phi(t, y - 1.0) - specfun.phi(t, y + 1.0))
    return _normalize(np.atleast_1d(raw))


def quantile_potential_distribution(round_index: int, prev_regret) -> SimplexDistribution:
    return SimplexDistribution(quantile_potential_weights(round_index, prev_regret))


def independent_potential_weights(t, regret: np.ndarray) -> np.ndarray:
    """Weights proportional to erfi(max(R_i, 0) / sqrt(2t)) (the magnitude of
    the potential gradient for the undivided potential); uniform when every
    regret is <= 0."""
    tf = float(t)
    if not (tf > 0.0):
        raise ValueError("t must be positive")
    x = np.maximum(np.asarray(regret, dtype=np.float64), 0.0)
    raw = specfun.erfi(x / math.sqrt(2.0 * tf))
    return _normalize(np.atleast_1d(np.asarray(raw)))


def independent_potential_distribution(t: float, regret) -> SimplexDistribution:
    return SimplexDistribution(independent_potential_weights(t, regret))


def potential_half(t, regret: np.ndarray) -> np.ndarray:
    """Potential value sum_i phi(t, R_i / 2) along the last axis."""
    r = np.asarray(regret, dtype=np.float64)
    return np.asarray(specfun.phi(float(t), 0.5 * r)).sum(axis=-1)


def potential_full(t, regret: np.ndarray) -> np.ndarray:
    """Potential value sum_i phi(t, R_i) along the last axis."""
    r = np.asarray(regret, dtype=np.float64)
    return np.asarray(specfun.phi(float(t), r)).sum(axis=-1)


@dataclass(frozen=True)
class SbhtPoint:
    """Evaluation point for the backwards-heat term: a time t > 0 and a
    non-negative coordinate vector.  Negative coordinates contribute nothing
    to the term's second-derivative part and only increase it, so they are
    zeroed on construction."""

    t: float
    x: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t > 0.0):
            raise ValueError("t must be positive and finite")
        arr = np.maximum(np.array(self.x, dtype=np.float64), 0.0)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("x must be a non-empty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("x must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "x", arr)

    @property
    def n(self) -> int:
        return self.x.size


def sbht_batch(t, x: np.ndarray) -> np.ndarray:
    """Vectorized backwards-heat term over rows of non-negative points.

    With q_i = exp(x_i^2 / 2t), Q_i = erfi(x_i / sqrt(2t)), Theta = sum Q_j:

        sbht = sum_i q_i (2 Theta Q_i - Q.Q) / (2 Theta^2 sqrt(t)),

    which equals dPhi/dt + (1/2) sum_i d2Phi/dx_i^2 * |e_i - p|^2 for the
    undivided potential and its induced player p_i = Q_i / Theta.  Rows with
    Theta = 0 (all coordinates zero) reduce to the time-derivative alone,
    n / (2 sqrt(t)).

    The largest exponent is factored out, so intermediates stay finite
    whenever the result is representable.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    tf = float(t)
    a = x * x / (2.0 * tf)
    amax = a.max(axis=-1, keepdims=True)
    scale = np.exp(a - amax)                       # q_i * e^{-amax}
    q_scaled = scale
    with np.errstate(over="ignore"):
        d = _sp.dawsn(x / math.sqrt(2.0 * tf))
    big_q = _TWO_OVER_SQRT_PI * d * scale          # Q_i * e^{-amax}
    theta = big_q.sum(axis=-1, keepdims=True)
    qq = (big_q * big_q).sum(axis=-1, keepdims=True)
    inner = (q_scaled * (2.0 * theta * big_q - qq)).sum(axis=-1)
    n = x.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        value = np.exp(amax[..., 0]) * inner / (2.0 * theta[..., 0] ** 2 * math.sqrt(tf))
    return np.where(theta[..., 0] > 0.0, value, n / (2.0 * math.sqrt(tf)))


def sbht(point: SbhtPoint) -> float:
    """Backwards-heat term at a single point; see :func:`sbht_batch`."""
    return float(sbht_batch(point.t, point.x[None, :])[0])
