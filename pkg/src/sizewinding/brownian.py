"""Size dynamics of the 2-local Brownian circuit at infinite temperature.

The Pauli-string probabilities of ``O(t)`` evolve under a continuous-time
Markov chain: every 2-local Pauli ``v`` that anticommutes with the current
string ``u`` sends ``u -> u v`` at rate ``1 / (2n)``.  Binned by size this
gives the master equation implemented by :func:`master_rhs`, with up-rate
``3 l (n - l) / n`` and down-rate ``l (l - 1) / n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from . import kernels
from .errors import MalformedInputError, ResourceLimitError, SolverError
from .rng import stream

__all__ = [
    "SizeTrajectory",
    "StepSizeError",
    "master_rhs",
    "integrate",
    "stochastic_oracle",
    "continuum_step",
    "stationary_distribution",
    "delta_distribution",
    "total_variation",
    "ORACLE_QUBIT_LIMIT",
]

ORACLE_QUBIT_LIMIT = 16
_CONSERVATION_TOL = 1e-8
_POSITIVITY_TOL = 1e-12
_TRIAL_CHUNK = 8192


class StepSizeError(SolverError):
    """RK4 step too large: conservation or positivity monitor tripped."""


@dataclass
class SizeTrajectory:
    """Size distributions ``q[t_index, l]`` for ``l = 0..n`` on a time grid."""

    n: int
    times: np.ndarray
    q: np.ndarray

    def mean(self) -> np.ndarray:
        return self.q @ np.arange(self.n + 1)

    def std(self) -> np.ndarray:
        ell = np.arange(self.n + 1)
        mu = self.mean()
        return np.sqrt(np.maximum(self.q @ ell**2 - mu**2, 0.0))

    def at(self, t: float) -> np.ndarray:
        """Distribution at a grid time (exact match required)."""
        idx = np.flatnonzero(np.isclose(self.times, t, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise MalformedInputError(f"time {t} is not on the trajectory grid")
        return self.q[idx[0]]

    def rows(self):
        """CSV rows ``(time, l, q_l)``."""
        for ti, t in enumerate(self.times):
            for l in range(self.n + 1):
                yield float(t), l, float(self.q[ti, l])


def _check_distribution(q, n: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (n + 1,):
        raise MalformedInputError(f"distribution must have length n + 1 = {n + 1}")
    return q


def master_rhs(q: Sequence[float], n: int) -> np.ndarray:
    """Right-hand side ``dq_l/dt`` of the size master equation.

    Parameters
    ----------
    q : sequence of float, length n + 1
        Size distribution.
    n : int
        Number of qubits.
    """
    return kernels.master_rhs(_check_distribution(q, n), int(n))


def delta_distribution(n: int, l0: int) -> np.ndarray:
    if not 0 <= l0 <= n:
        raise MalformedInputError("initial size out of range")
    q = np.zeros(n + 1)
    q[l0] = 1.0
    return q


def stationary_distribution(n: int) -> np.ndarray:
    """Uniform distribution over non-identity strings, ``3^l C(n, l) / (4^n - 1)``."""
    ell = np.arange(n + 1)
    # log-space so that n in the hundreds does not overflow
    from scipy.special import gammaln

    logw = ell * np.log(3.0) + gammaln(n + 1) - gammaln(ell + 1) - gammaln(n - ell + 1)
    logw[0] = -np.inf
    w = np.exp(logw - logw[1:].max())
    return w / w.sum()


def integrate(
    q0: Sequence[float],
    n: int,
    t_end: float | Sequence[float],
    dt: float | None = None,
) -> SizeTrajectory:
    """Integrate the master equation with classic fourth-order Runge-Kutta.

    Parameters
    ----------
    q0 : sequence of float
        Normalized initial size distribution.
    n : int
        Number of qubits.
    t_end : float or sequence of float
        Final time, or an increasing list of output times.  A scalar yields
        the grid ``[0, t_end]``.
    dt : float, optional
        Maximum step, default ``0.25 / n``.  Each output interval is split
        into equal steps no longer than ``dt``.

    Raises
    ------
    StepSizeError
        If probability drifts by more than 1e-8 or any entry drops below
        -1e-12.
    """
    q0 = _check_distribution(q0, n)
    if abs(q0.sum() - 1.0) > _CONSERVATION_TOL or np.any(q0 < -_POSITIVITY_TOL):
        raise MalformedInputError("initial distribution must be normalized and non-negative")
    times = np.atleast_1d(np.asarray(t_end, dtype=float))
    if times.size == 1:
        times = np.array([0.0, float(times[0])])
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise MalformedInputError("output times must be non-negative and increasing")
    h_max = 0.25 / n if dt is None else float(dt)
    if h_max <= 0:
        raise MalformedInputError("dt must be positive")
    edges = np.concatenate([[0.0], times])
    spans = np.diff(edges)
    steps = np.where(spans > 0, np.ceil(spans / h_max - 1e-9), 0).astype(np.int64)
    sizes = np.where(steps > 0, spans / np.maximum(steps, 1), 0.0)
    q = kernels.rk4_integrate(q0, int(n), steps, sizes)
    drift = np.abs(q.sum(axis=1) - 1.0).max()
    if not np.all(np.isfinite(q)) or drift > _CONSERVATION_TOL or q.min() < -_POSITIVITY_TOL:
        raise StepSizeError(f"step {h_max:g} unstable: drift {drift:.3g}, min entry {np.nanmin(q):.3g}")
    return SizeTrajectory(n=int(n), times=times, q=q)


def _initial_string(n: int, l0: int) -> tuple[int, int]:
    # X on the first l0 qubits; any size-l0 string is equivalent by symmetry
    q = 0
    for j in range(l0):
        q |= 1 << (n - 1 - j)
    return 0, q


def stochastic_oracle(
    n: int,
    l0: int,
    t_end: float | Sequence[float],
    trials: int,
    seed: int = 0,
) -> np.ndarray:
    """Empirical size histograms from exact Pauli-string jump trajectories.

    Uses uniformization: proposals arrive at total rate ``9 C(n,2) / (2n)``,
    each proposal picks a 2-local Pauli uniformly and is accepted only if it
    anticommutes with the current string.  Trials are processed in fixed
    chunks with independent counter-based streams, so results depend only on
    ``(seed, trials)``.

    Returns
    -------
    ndarray
        Shape ``(len(times), n + 1)`` (or ``(n + 1,)`` for a scalar time) of
        empirical probabilities.
    """
    if n > ORACLE_QUBIT_LIMIT:
        raise ResourceLimitError(f"string-resolved oracle limited to n <= {ORACLE_QUBIT_LIMIT}")
    if n < 2:
        raise MalformedInputError("need at least two qubits")
    if not 0 <= l0 <= n:
        raise MalformedInputError("initial size out of range")
    if trials < 1:
        raise MalformedInputError("need at least one trial")
    scalar = np.ndim(t_end) == 0
    times = np.atleast_1d(np.asarray(t_end, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise MalformedInputError("times must be non-negative and increasing")
    n_local = 9 * comb(n, 2)
    rate = n_local / (2.0 * n)
    p0, q0 = _initial_string(n, l0)
    counts = np.zeros((times.size, n + 1), dtype=np.int64)
    t_max = float(times[-1])
    for chunk, start in enumerate(range(0, trials, _TRIAL_CHUNK)):
        size = min(_TRIAL_CHUNK, trials - start)
        rng = stream(seed, chunk)
        totals = rng.poisson(rate * t_max, size=size)
        # proposals before each checkpoint: nested binomial thinning of the totals
        checkpoints = np.empty((size, times.size), dtype=np.int64)
        remaining = totals.copy()
        upper = t_max
        for k in range(times.size - 1, -1, -1):
            frac = times[k] / upper if upper > 0 else 0.0
            remaining = rng.binomial(remaining, min(frac, 1.0))
            checkpoints[:, k] = remaining
            upper = times[k]
        offsets = np.concatenate([[0], np.cumsum(totals)]).astype(np.int64)
        choices = rng.integers(0, n_local, size=int(offsets[-1]), dtype=np.int64)
        sizes = kernels.pauli_jump_sizes(p0, q0, n, choices, offsets, checkpoints)
        for k in range(times.size):
            counts[k] += np.bincount(sizes[:, k], minlength=n + 1)
    hist = counts / float(trials)
    return hist[0] if scalar else hist


def continuum_step(phi: Sequence[float], dx: float, n: int) -> np.ndarray:
    """Finite-difference time derivative of ``Phi(x, t)`` on ``x = 0, dx, ..., 1``.

    ``dPhi(x)/dt = [3(x - dx)(1 - x + dx) Phi(x - dx) + x(x + dx) Phi(x + dx)
    - (3x(1 - x) + x(x - dx)) Phi(x)] / dx``.
    """
    phi = _check_distribution(phi, n)
    if not np.isclose(dx * n, 1.0, rtol=1e-12):
        raise MalformedInputError("grid spacing must be 1/n")
    x = np.arange(n + 1) * dx
    out = -(3 * x * (1 - x) + x * (x - dx)) * phi
    xm = x[1:] - dx
    out[1:] += 3 * xm * (1 - xm) * phi[:-1]
    xp = x[:-1] + dx
    out[:-1] += xp * (xp - dx) * phi[1:]
    return out / dx


def total_variation(a: Sequence[float], b: Sequence[float]) -> float:
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())
