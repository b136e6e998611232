"""Seeded Monte-Carlo sweeps over ensemble samples.

Every sample ``i`` is drawn from the counter-based stream ``(seed, i)`` and
processed independently; results are gathered in sample order, so the
worker count never changes a number.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np

from .ensembles import EnsembleSpec, sample
from .errors import MalformedInputError
from .exact_sim import CouplingSpec, Evolver, state_transfer_channel, two_point
from .pauli import PauliString
from .winding import distributions_from_coefficients, pauli_coefficients_of_matrix

__all__ = [
    "WORKERS_ENV",
    "default_workers",
    "map_ordered",
    "SampleStatistics",
    "coupling_for",
    "lambda_monte_carlo",
    "twopoint_monte_carlo",
    "winding_monte_carlo",
]

WORKERS_ENV = "SIZEWINDING_WORKERS"


def default_workers() -> int:
    """Worker count from ``SIZEWINDING_WORKERS`` (default 1)."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise MalformedInputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise MalformedInputError(f"{WORKERS_ENV} must be positive")
    return value


def map_ordered(fn: Callable, items: Iterable, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, optionally spread over processes."""
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass
class SampleStatistics:
    """Per-sample values with mean and standard error along axis 0."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @property
    def stderr(self) -> np.ndarray:
        m = self.values.shape[0]
        if m < 2:
            return np.full(self.values.shape[1:], np.nan)
        if np.iscomplexobj(self.values):
            re = self.values.real.std(axis=0, ddof=1)
            im = self.values.imag.std(axis=0, ddof=1)
            return np.hypot(re, im) / np.sqrt(m)
        return self.values.std(axis=0, ddof=1) / np.sqrt(m)


def coupling_for(n: int, carriers: str = "all") -> CouplingSpec:
    """``"all"`` couples every qubit (k = n); ``"exclude"`` skips the message qubit."""
    if carriers == "all":
        return CouplingSpec.all_sites(n)
    if carriers == "exclude":
        return CouplingSpec.excluding_messages(n, (0,))
    raise MalformedInputError("carriers must be 'all' or 'exclude'")


def _lambda_one(index: int, spec: EnsembleSpec, beta: float, times: np.ndarray, g: float, carriers: str) -> np.ndarray:
    ev = Evolver(sample(spec, index))
    coupling = coupling_for(spec.n, carriers)
    return np.array([state_transfer_channel(ev.h, beta, t, t, g, coupling, evolver=ev).lam for t in times])


def lambda_monte_carlo(
    spec: EnsembleSpec,
    beta: float,
    times: Sequence[float],
    g: float,
    carriers: str = "all",
    workers: int | None = None,
) -> SampleStatistics:
    """Depolarizing parameter at ``t_L = t_R = t`` for every sample and time."""
    times = np.asarray(times, dtype=float)
    fn = partial(_lambda_one, spec=spec, beta=beta, times=times, g=g, carriers=carriers)
    return SampleStatistics(np.array(map_ordered(fn, range(spec.samples), workers)))


def _twopoint_one(
    index: int, spec: EnsembleSpec, beta: float, t: float, grid: np.ndarray, form: str, carriers: str, label: str
) -> np.ndarray:
    ev = Evolver(sample(spec, index))
    coupling = coupling_for(spec.n, carriers)
    p = PauliString.from_label(label)
    return np.array([np.exp(-1j * g) * two_point(ev.h, beta, t, t, g, coupling, p, form=form, evolver=ev) for g in grid])


def twopoint_monte_carlo(
    spec: EnsembleSpec,
    beta: float,
    t: float,
    g_grid: Sequence[float],
    form: str = "I",
    carriers: str = "all",
    pauli: str | None = None,
    workers: int | None = None,
) -> SampleStatistics:
    """Dressed ``q~(g) = e^{-ig} <P_R(t) e^{igV} P_L^T(-t)>`` per sample.

    The default Pauli is ``Z`` on the first qubit.
    """
    label = pauli or "Z" + "I" * (spec.n - 1)
    if len(label) != spec.n:
        raise MalformedInputError("Pauli label length must equal n")
    grid = np.asarray(g_grid, dtype=float)
    fn = partial(_twopoint_one, spec=spec, beta=beta, t=t, grid=grid, form=form, carriers=carriers, label=label)
    return SampleStatistics(np.array(map_ordered(fn, range(spec.samples), workers)))


def _winding_one(index: int, spec: EnsembleSpec, beta: float, t: float, label: str) -> np.ndarray:
    # the winding branch of two_point form I expands rho^{1/2} O(t) under H^T
    ev = Evolver(sample(spec, index).T)
    op = PauliString.from_label(label).to_dense()
    x = ev.sqrt_thermal(beta) @ ev.heisenberg(op, t)
    dist = distributions_from_coefficients(pauli_coefficients_of_matrix(x))
    return np.concatenate([dist.q, dist.p.astype(complex)])


def winding_monte_carlo(
    spec: EnsembleSpec,
    beta: float,
    t: float,
    pauli: str | None = None,
    workers: int | None = None,
) -> tuple[SampleStatistics, SampleStatistics]:
    """Exact size-resolved winding and conventional distributions per sample.

    The default operator is ``X`` on the first qubit.  Returns ``(q, p)``
    statistics, each with values of shape ``(samples, n + 1)``.
    """
    label = pauli or "X" + "I" * (spec.n - 1)
    if len(label) != spec.n:
        raise MalformedInputError("Pauli label length must equal n")
    fn = partial(_winding_one, spec=spec, beta=beta, t=t, label=label)
    vals = np.array(map_ordered(fn, range(spec.samples), workers))
    n1 = spec.n + 1
    return SampleStatistics(vals[:, :n1], {"pauli": label}), SampleStatistics(vals[:, n1:].real, {"pauli": label})
