"""Gain generators: discrete adversaries and Brownian-driven gain processes.

Discrete adversaries emit one gain vector in [-1, 1]^n per round and are
pure functions of (seed, round, kind), so any round can be regenerated
without replaying the stream.  The continuous generator emits Gaussian
increments dG = W dB where the columns of W are unit vectors, giving an
instantaneous covariance Sigma = W^T W with unit diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .core import CONTINUOUS_INCREMENT, GainVector, SimplexDistribution

__all__ = [
    "ADVERSARY_KINDS",
    "AdversarySpec",
    "SequenceExhausted",
    "next_gain",
    "load_gain_sequence",
    "write_gain_sequence",
    "CovarianceSpec",
    "BrownianPathConfig",
    "brownian_gain_increments",
]

ADVERSARY_KINDS = ("uniform-random", "fixed-sequence", "single-leader", "alternating")

_UNIT_NORM_TOL = 1e-10


class SequenceExhausted(RuntimeError):
    """A fixed-sequence adversary was asked for a round beyond its data."""


@dataclass(frozen=True)
class AdversarySpec:
    """A discrete adversary.

    * ``uniform-random``: i.i.d. +-1 per coordinate, counter-seeded.
    * ``fixed-sequence``: rows of a preloaded array (or CSV at
      ``sequence_path``), echoed per round.
    * ``single-leader``: gain 1 for expert ``leader``, 0 elsewhere.
    * ``alternating``: adaptive stress case, gain 1 for the currently
      least-weighted expert (lowest index on ties), 0 elsewhere.
    """

    kind: str
    seed: int = 0
    sequence: np.ndarray | None = None
    sequence_path: str | None = None
    leader: int = 0

    def __post_init__(self):
        if self.kind not in ADVERSARY_KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}; expected one of {ADVERSARY_KINDS}")
        if self.kind == "fixed-sequence":
            seq = self.sequence
            if seq is None:
                if self.sequence_path is None:
                    raise ValueError("fixed-sequence adversary needs sequence or sequence_path")
                seq = load_gain_sequence(self.sequence_path)
            seq = np.array(seq, dtype=np.float64)
            if seq.ndim != 2 or seq.size == 0:
                raise ValueError("gain sequence must be a non-empty 2-D array (rounds x experts)")
            if np.any(np.abs(seq) > 1.0):
                raise ValueError("gain sequence entries must lie in [-1, 1]")
            seq.setflags(write=False)
            object.__setattr__(self, "sequence", seq)

    def with_seed(self, seed: int) -> "AdversarySpec":
        return AdversarySpec(self.kind, seed, self.sequence, None, self.leader)


def next_gain(adv: AdversarySpec, round_index: int, player_dist: SimplexDistribution) -> GainVector:
    """The adversary's gain vector for a 1-based round.

    Adaptive kinds may read ``player_dist`` (which the protocol reveals
    before gains are chosen); the others ignore it.
    """
    if round_index < 1:
        raise ValueError("round_index must be >= 1")
    n = player_dist.n
    if adv.kind == "uniform-random":
        g = _rng.sign_matrix(_rng.derive_key(adv.seed), round_index, n)
    elif adv.kind == "single-leader":
        if not (0 <= adv.leader < n):
            raise ValueError(f"leader index {adv.leader} out of range for n={n}")
        g = np.zeros(n)
        g[adv.leader] = 1.0
    elif adv.kind == "alternating":
        g = np.zeros(n)
        g[int(np.argmin(player_dist.weights))] = 1.0
    else:  # fixed-sequence
        seq = adv.sequence
        if round_index > seq.shape[0]:
            raise SequenceExhausted(
                f"fixed sequence has {seq.shape[0]} rounds, round {round_index} requested")
        if seq.shape[1] != n:
            raise ValueError(f"sequence has {seq.shape[1]} experts, game has {n}")
        g = seq[round_index - 1]
    return GainVector(g)


def load_gain_sequence(path) -> np.ndarray:
    """Read a gain sequence CSV: header ``g1,...,gn``, one row per round,
    every entry in [-1, 1].  Violations are reported with their line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        n = len(cols)
        if cols != [f"g{i + 1}" for i in range(n)]:
            raise ValueError(f"{path}:1: expected header g1,...,g{n}, got {header!r}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n:
                raise ValueError(f"{path}:{lineno}: expected {n} columns, got {len(parts)}")
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            for j, v in enumerate(vals):
                if not (math.isfinite(v) and -1.0 <= v <= 1.0):
                    raise ValueError(
                        f"{path}:{lineno}: g{j + 1} = {v} outside [-1, 1]")
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no gain rows")
    return np.array(rows, dtype=np.float64)


def write_gain_sequence(path, gains: np.ndarray) -> None:
    """Write a gain sequence in the CSV format read by :func:`load_gain_sequence`."""
    arr = np.asarray(gains, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(f"g{i + 1}" for i in range(arr.shape[1])) + "\n")
        for row in arr:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


@dataclass(frozen=True)
class CovarianceSpec:
    """Mixing weights for the continuous gain process.

    Column i of ``weight_matrix`` is the unit vector w_i mixing the driving
    Brownian coordinates into expert i's gains; the induced instantaneous
    covariance Sigma = W^T W is positive semi-definite with unit diagonal.
    """

    n: int
    weight_matrix: np.ndarray

    def __post_init__(self):
        w = np.array(self.weight_matrix, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weight_matrix must be {self.n}x{self.n}, got {w.shape}")
        norms = np.linalg.norm(w, axis=0)
        if np.any(np.abs(norms - 1.0) > _UNIT_NORM_TOL):
            raise ValueError(
                f"every column of W must have unit norm within {_UNIT_NORM_TOL}; "
                f"got norms {norms}")
        w.setflags(write=False)
        object.__setattr__(self, "weight_matrix", w)

    @property
    def sigma(self) -> np.ndarray:
        return self.weight_matrix.T @ self.weight_matrix

    @classmethod
    def identity(cls, n: int) -> "CovarianceSpec":
        return cls(n, np.eye(n))

    @classmethod
    def from_correlation(cls, sigma: np.ndarray) -> "CovarianceSpec":
        """Build W from a unit-diagonal PSD matrix via Cholesky, so that
        W^T W reproduces it (columns of W are the Cholesky rows)."""
        s = np.asarray(sigma, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("sigma must be square")
        if np.any(np.abs(np.diag(s) - 1.0) > _UNIT_NORM_TOL):
            raise ValueError("sigma must have unit diagonal")
        try:
            chol = np.linalg.cholesky(s)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"sigma is not positive definite: {exc}") from None
        return cls(s.shape[0], chol.T)

    @classmethod
    def equicorrelated(cls, n: int, rho: float) -> "CovarianceSpec":
        """All pairwise correlations equal to rho (must keep Sigma PSD)."""
        return cls.from_correlation(np.full((n, n), rho) + (1.0 - rho) * np.eye(n))


@dataclass(frozen=True)
class BrownianPathConfig:
    """Euler discretization of the continuous gain process."""

    cov: CovarianceSpec
    dt: float
    horizon: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be positive")
        if not (np.isfinite(self.horizon) and self.horizon >= self.dt):
            raise ValueError("horizon must be >= dt")

    @property
    def steps(self) -> int:
        return int(math.ceil(self.horizon / self.dt - 1e-12))

    def with_seed(self, seed: int) -> "BrownianPathConfig":
        return BrownianPathConfig(self.cov, self.dt, self.horizon, seed)


def brownian_increment_matrix(keys, step: int, cfg: BrownianPathConfig) -> np.ndarray:
    """Increments dG_i = <w_i, dB> for one step across a batch of trial keys;
    shape (trials, n).  dB entries are N(0, dt), indexed (key, step, coord);
    right-multiplying by W takes the inner product with each unit column, so
    the increment covariance is dt * W^T W."""
    db = _rng.normal_matrix(keys, step, cfg.cov.n) * math.sqrt(cfg.dt)
    return db @ cfg.cov.weight_matrix


def brownian_gain_increments(cfg: BrownianPathConfig):
    """Stream of per-step Gaussian gain increments (continuous-increment kind).

    Deterministic given the seed; yields ceil(horizon / dt) vectors.
    """
    key = _rng.derive_key(cfg.seed)
    for step in range(1, cfg.steps + 1):
        dg = brownian_increment_matrix(key, step, cfg)
        yield GainVector(dg, kind=CONTINUOUS_INCREMENT)
