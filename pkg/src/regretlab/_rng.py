"""Counter-based random number generation.

Every random quantity in the package is a pure function of integer
coordinates ``(seed, trial, step, lane/coordinate)`` hashed through the
splitmix64 finalizer.  This gives random access (any step of any trial can
be regenerated without replaying the stream), bit-identical results whether
trials are run one at a time or as a vectorized batch, and embarrassingly
parallel Monte Carlo with no shared state.

Gaussians use Box-Muller on two hashed uniforms; the uniforms live in the
open interval (0, 1) so the log never sees zero.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S63 = np.uint64(63)

_INV53 = 2.0 ** -53
_TWO_PI = 2.0 * np.pi


def _finalize(x):
    """splitmix64 finalizer; accepts uint64 scalars or arrays."""
    with np.errstate(over="ignore"):
        x = (x + _GAMMA) & np.uint64(_MASK) if np.isscalar(x) else x + _GAMMA
        x ^= x >> _S30
        x *= _M1
        x ^= x >> _S27
        x *= _M2
        x ^= x >> _S31
    return x


def derive_key(*parts) -> int:
    """Fold integers (and string tags) into a single 64-bit stream key.

    Used to give each (experiment, trial) pair its own independent stream,
    e.g. ``derive_key(base_seed, trial_index)``.  Strings hash through
    blake2b, so keys are stable across processes and platforms.
    """
    import hashlib

    h = np.uint64(0)
    for p in parts:
        if isinstance(p, str):
            p = int.from_bytes(hashlib.blake2b(p.encode(), digest_size=8).digest(), "big")
        h = _finalize(h ^ np.uint64(int(p) & _MASK))
    return int(h)


def _step_keys(keys, step: int):
    """Per-(trial, step) intermediate hash; `keys` is scalar int or uint64 array."""
    k = np.asarray(keys, dtype=np.uint64)
    return _finalize(k ^ np.uint64(int(step) & _MASK))


def _element_hash(step_key, lanes):
    """Hash per (trial, step, lane); broadcasts (trials, 1) against (1, lanes)."""
    return _finalize(step_key[..., None] ^ lanes)


def _to_unit(bits) -> np.ndarray:
    """Top 53 bits -> double in the open interval (0, 1)."""
    return ((bits >> _S11).astype(np.float64) + 0.5) * _INV53


def uniform_matrix(keys, step: int, n: int) -> np.ndarray:
    """Uniforms in (0, 1), shape ``(len(keys), n)`` (or ``(n,)`` for scalar key)."""
    scalar = np.isscalar(keys)
    sk = np.atleast_1d(_step_keys(keys, step))
    lanes = np.arange(n, dtype=np.uint64)
    u = _to_unit(_element_hash(sk, lanes))
    return u[0] if scalar else u


def pm1_matrix(keys, step: int, n: int) -> np.ndarray:
    """Uniform reals in [-1, 1], same indexing as :func:`uniform_matrix`."""
    return 2.0 * uniform_matrix(keys, step, n) - 1.0


def sign_matrix(keys, step: int, n: int) -> np.ndarray:
    """Independent fair signs (+1.0 / -1.0) per (trial, step, coordinate)."""
    scalar = np.isscalar(keys)
    sk = np.atleast_1d(_step_keys(keys, step))
    lanes = np.arange(n, dtype=np.uint64)
    bits = _element_hash(sk, lanes) >> _S63
    out = np.where(bits == 1, 1.0, -1.0)
    return out[0] if scalar else out


def normal_matrix(keys, step: int, n: int) -> np.ndarray:
    """Standard normals per (trial, step, coordinate) via Box-Muller.

    Two hash lanes per coordinate (2*i and 2*i + 1); the sine half of the
    Box-Muller pair is discarded to keep indexing one-normal-per-lane-pair.
    """
    scalar = np.isscalar(keys)
    sk = np.atleast_1d(_step_keys(keys, step))
    lanes = np.arange(2 * n, dtype=np.uint64)
    u = _to_unit(_element_hash(sk, lanes))
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
    return z[0] if scalar else z
