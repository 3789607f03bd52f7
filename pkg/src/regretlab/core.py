"""Domain types and bookkeeping shared by learners, environments, and engines.

Holds the probability vector over experts, one round's gain vector, the
cumulative regret state, the quantile order statistic, and the unit-step
discrete derivatives used by the discrete learner analysis.

All types are immutable values; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SimplexDistribution",
    "GainVector",
    "RegretState",
    "QuantileQuery",
    "quantile",
    "instantaneous_regret",
    "discrete_deriv_t",
    "discrete_deriv_x",
    "discrete_deriv_xx",
]

_SIMPLEX_TOL = 1e-9
_GAIN_TOL = 1e-12

DISCRETE = "discrete"
CONTINUOUS_INCREMENT = "continuous-increment"


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SimplexDistribution:
    """A probability vector over n experts: entries >= 0 summing to 1."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.weights, "weights")
        object.__setattr__(self, "weights", arr)
        if not np.all(np.isfinite(arr)):
            raise ValueError("weights must be finite")
        if np.any(arr < 0.0):
            raise ValueError(f"weights must be non-negative, got min {arr.min()}")
        total = float(arr.sum())
        if abs(total - 1.0) > _SIMPLEX_TOL:
            raise ValueError(f"weights must sum to 1 within {_SIMPLEX_TOL}, got {total}")

    @classmethod
    def uniform(cls, n: int) -> "SimplexDistribution":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class GainVector:
    """One round's gains: bounded in [-1, 1] for discrete play, any finite
    reals for continuous Brownian increments."""

    gains: np.ndarray
    kind: str = DISCRETE

    def __post_init__(self):
        arr = _frozen_array(self.gains, "gains")
        object.__setattr__(self, "gains", arr)
        if self.kind not in (DISCRETE, CONTINUOUS_INCREMENT):
            raise ValueError(f"unknown gain kind {self.kind!r}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("gains must be finite")
        if self.kind == DISCRETE and np.any(np.abs(arr) > 1.0 + _GAIN_TOL):
            raise ValueError(f"discrete gains must lie in [-1, 1], got max |g| = {np.abs(arr).max()}")

    @property
    def n(self) -> int:
        return self.gains.size


@dataclass(frozen=True)
class RegretState:
    """Cumulative state after some number of rounds (or elapsed time).

    ``regret[i] == cumulative_gain[i] - player_gain`` holds by construction;
    regret is the source of truth for learners, the gains are kept for
    diagnostics.  ``t`` is the round index in discrete games and the elapsed
    time in continuous ones.
    """

    t: float
    regret: np.ndarray
    cumulative_gain: np.ndarray
    player_gain: float

    def __post_init__(self):
        object.__setattr__(self, "regret", _frozen_array(self.regret, "regret"))
        object.__setattr__(self, "cumulative_gain",
                           _frozen_array(self.cumulative_gain, "cumulative_gain"))
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.regret.size != self.cumulative_gain.size:
            raise ValueError("regret and cumulative_gain must have equal length")
        tol = _SIMPLEX_TOL * max(1.0, self.t)
        gap = np.abs(self.regret - (self.cumulative_gain - self.player_gain))
        if gap.max() > tol:
            raise ValueError(f"regret identity violated by {gap.max()} (tol {tol})")
        if self.t == 0 and (np.any(self.regret != 0.0) or np.any(self.cumulative_gain != 0.0)
                            or self.player_gain != 0.0):
            raise ValueError("state at t = 0 must be all zeros")

    @classmethod
    def initial(cls, n: int) -> "RegretState":
        z = np.zeros(n)
        return cls(0.0, z, z.copy(), 0.0)

    @property
    def n(self) -> int:
        return self.regret.size

    @property
    def round(self) -> int:
        """Round index for discrete games (t is integral there)."""
        return int(self.t)

    def advance(self, p: SimplexDistribution, g: GainVector, dt: float = 1.0) -> "RegretState":
        """State after one more round (discrete) or Euler step (continuous).

        The expected gain reduces via multiply-then-sum so that a game
        replayed inside a vectorized trial batch is bit-identical.
        """
        if p.n != self.n or g.n != self.n:
            raise ValueError("dimension mismatch")
        earned = float((p.weights * g.gains).sum())
        return RegretState(
            self.t + dt,
            self.regret + (g.gains - earned),
            self.cumulative_gain + g.gains,
            self.player_gain + earned,
        )


@dataclass(frozen=True)
class QuantileQuery:
    """Quantile level: 0 < epsilon <= 1 selects the ceil(eps*n)-th best expert."""

    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")


def quantile_rank(epsilon: float, n: int) -> int:
    """ceil(eps * n) with a guard for products within 1e-12 of an integer,
    so e.g. eps = 0.1, n = 10 selects rank 1 rather than rank 2."""
    m = epsilon * n
    r = round(m)
    k = r if abs(m - r) < 1e-12 else math.ceil(m)
    return int(min(max(k, 1), n))


def quantile(query, x) -> float:
    """The ceil(eps*n)-th largest entry of x.

    Ties are broken by sorting, but the selected value is the same for any
    valid tie-breaking permutation.  Accepts a :class:`QuantileQuery` or a
    bare epsilon.
    """
    eps = query.epsilon if isinstance(query, QuantileQuery) else float(query)
    QuantileQuery(eps)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("x must be a non-empty vector")
    k = quantile_rank(eps, arr.size)
    return float(np.sort(arr)[::-1][k - 1])


def instantaneous_regret(p: SimplexDistribution, g: GainVector) -> np.ndarray:
    """One-round regret vector r = g - <p, g> * 1; satisfies <p, r> = 0."""
    if p.n != g.n:
        raise ValueError(f"dimension mismatch: p has {p.n} experts, g has {g.n}")
    return g.gains - float(p.weights @ g.gains)


def discrete_deriv_t(f, t, x):
    """Unit-step time difference f(t, x) - f(t - 1, x)."""
    return f(t, x) - f(t - 1, x)


def discrete_deriv_x(f, t, x):
    """Unit-step central difference (f(t, x+1) - f(t, x-1)) / 2."""
    return 0.5 * (f(t, x + 1) - f(t, x - 1))


def discrete_deriv_xx(f, t, x):
    """Unit-step second difference f(t, x+1) + f(t, x-1) - 2 f(t, x)."""
    return f(t, x + 1) + f(t, x - 1) - 2.0 * f(t, x)
