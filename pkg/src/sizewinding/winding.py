"""Conventional and winding size distributions of thermal operators.

For ``rho^{1/2} O(t) = 2^{-n/2} sum_P c_P P`` the winding distribution is
``q(l) = sum_{|P|=l} c_P^2`` and the conventional one is
``p(l) = sum_{|P|=l} |c_P|^2``.  Perfect size winding means
``c_P = e^{i alpha |P| / n} r_P`` with real ``r_P``, equivalently
``q(l) = p(l) e^{2 i alpha l / n}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.stats import binom

from . import kernels
from .errors import IllConditionedError, MalformedInputError, ResourceLimitError, UndefinedFitError
from .pauli import PauliString

__all__ = [
    "WindingDistribution",
    "PauliCoefficients",
    "PerfectWindingResult",
    "pauli_coefficients",
    "pauli_coefficients_of_matrix",
    "distributions_from_coefficients",
    "fourier_distribution",
    "fourier_grid",
    "check_perfect_winding",
    "xy_weight_to_size",
    "COEFFICIENT_QUBIT_LIMIT",
]

COEFFICIENT_QUBIT_LIMIT = 7


@dataclass
class WindingDistribution:
    """Winding (complex) and conventional (real) distributions on ``l = 0..n``.

    Attributes
    ----------
    n : int
        Largest size (number of qubits or carriers).
    q : ndarray of complex
        Winding distribution.
    p : ndarray of float
        Conventional distribution.
    axis : str
        ``"size"`` or ``"xy_weight"``: what ``l`` counts.
    norm : float
        Total conventional weight before normalization.
    """

    n: int
    q: np.ndarray
    p: np.ndarray
    axis: str = "size"
    norm: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=complex)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != (self.n + 1,) or self.p.shape != (self.n + 1,):
            raise MalformedInputError("distributions must have length n + 1")

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(self.n + 1)

    def mean(self) -> float:
        return float(np.sum(self.sizes * self.p) / np.sum(self.p))

    def std(self) -> float:
        mu = self.mean()
        return float(np.sqrt(np.sum((self.sizes - mu) ** 2 * self.p) / np.sum(self.p)))

    def rows(self) -> Iterator[tuple[int, float, float, float]]:
        """CSV rows ``(l, Re q, Im q, p)``."""
        for l in range(self.n + 1):
            yield l, float(self.q[l].real), float(self.q[l].imag), float(self.p[l])


@dataclass
class PauliCoefficients:
    """Dense table of Pauli coefficients indexed by :attr:`PauliString.index`."""

    n: int
    values: np.ndarray

    def __getitem__(self, pauli: PauliString) -> complex:
        return complex(self.values[pauli.index])

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        n = self.n
        mask = (1 << n) - 1
        for idx, val in enumerate(self.values):
            yield PauliString(n, idx >> n, idx & mask), complex(val)

    def sizes(self) -> np.ndarray:
        """Size of every Pauli in index order."""
        idx = np.arange(self.values.size, dtype=np.int64)
        p, q = idx >> self.n, idx & ((1 << self.n) - 1)
        return np.bitwise_count(p | q).astype(np.int64)

    def xy_weights(self, mask: int | None = None) -> np.ndarray:
        idx = np.arange(self.values.size, dtype=np.int64)
        q = idx & ((1 << self.n) - 1)
        if mask is not None:
            q = q & mask
        return np.bitwise_count(q).astype(np.int64)

    def to_matrix(self) -> np.ndarray:
        """Resynthesize ``2^{-n/2} sum_P c_P P``."""
        return kernels.matrix_from_pauli_coefficients(self.values, self.n)


def pauli_coefficients_of_matrix(x: np.ndarray) -> PauliCoefficients:
    """Expand a ``2^n x 2^n`` matrix as ``2^{-n/2} sum_P c_P P``."""
    x = np.asarray(x, dtype=complex)
    d = x.shape[0]
    n = d.bit_length() - 1
    if x.shape != (d, d) or (1 << n) != d:
        raise MalformedInputError("matrix must be 2^n x 2^n")
    if n > COEFFICIENT_QUBIT_LIMIT:
        raise ResourceLimitError(
            f"{n} qubits exceeds the 4^n expansion limit of {COEFFICIENT_QUBIT_LIMIT}; use fourier_distribution"
        )
    return PauliCoefficients(n, kernels.pauli_coefficients(x, n))


def pauli_coefficients(h: np.ndarray, beta: float, op, t: float) -> PauliCoefficients:
    """Pauli coefficients of ``rho^{1/2} O(t)`` with ``O(t) = e^{iHt} O e^{-iHt}``.

    Parseval gives ``sum_P |c_P|^2 = Tr[O(t)^dag rho O(t)]``.
    """
    from .exact_sim import Evolver, _as_matrix

    ev = Evolver(h)
    if ev.n > COEFFICIENT_QUBIT_LIMIT:
        raise ResourceLimitError(
            f"{ev.n} qubits exceeds the 4^n expansion limit of {COEFFICIENT_QUBIT_LIMIT}; use fourier_distribution"
        )
    x = ev.sqrt_thermal(beta) @ ev.heisenberg(_as_matrix(op, ev.n), t)
    return pauli_coefficients_of_matrix(x)


def distributions_from_coefficients(
    coeffs: PauliCoefficients, axis: str = "size", carrier_mask: int | None = None
) -> WindingDistribution:
    """Bin ``c_P^2`` and ``|c_P|^2`` by size (or by X/Y carrier weight).

    Both sequences are divided by the total conventional weight so that
    ``sum p = 1``; the divisor is stored in ``norm``.
    """
    n = coeffs.n
    if axis == "size":
        labels = coeffs.sizes()
    elif axis == "xy_weight":
        labels = coeffs.xy_weights(carrier_mask)
    else:
        raise MalformedInputError("axis must be 'size' or 'xy_weight'")
    c = coeffs.values
    q = np.bincount(labels, weights=(c * c).real, minlength=n + 1) + 1j * np.bincount(
        labels, weights=(c * c).imag, minlength=n + 1
    )
    p = np.bincount(labels, weights=np.abs(c) ** 2, minlength=n + 1)
    total = float(p.sum())
    if total <= 0:
        raise MalformedInputError("all coefficients vanish")
    return WindingDistribution(n=n, q=q / total, p=p / total, axis=axis, norm=total)


def fourier_grid(k: int, points: int | None = None) -> np.ndarray:
    """Coupling values ``g_j = pi k j / N`` that make the inversion a DFT."""
    npts = points or (k + 1)
    return np.pi * k * np.arange(npts) / npts


def fourier_distribution(
    h: np.ndarray,
    beta: float,
    op,
    t: float,
    g_grid: Sequence[float] | None = None,
    spec=None,
    max_condition: float = 1e8,
) -> WindingDistribution:
    """Recover the X/Y-weight winding distribution from coupling-grid data.

    The dressed two-point function ``G(g) = sum_w q(w) e^{ig(k - 2w)/k}`` is
    evaluated by dense simulation for every ``g`` in ``g_grid`` and inverted
    by least squares.  ``p`` is obtained the same way from the conventional
    generating function.

    Raises
    ------
    IllConditionedError
        If the design matrix condition number exceeds ``max_condition``.
    """
    from .exact_sim import CouplingSpec, Evolver, size_generating_function

    ev = Evolver(h)
    spec = spec or CouplingSpec.all_sites(ev.n)
    k = spec.k
    grid = fourier_grid(k) if g_grid is None else np.asarray(g_grid, dtype=float)
    if grid.size < k + 1:
        raise MalformedInputError(f"need at least {k + 1} grid points")
    w = np.arange(k + 1)
    design = np.exp(1j * np.outer(grid, (k - 2 * w) / k))
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedError("coupling grid cannot resolve every weight", float(cond))
    g_wind = np.array([size_generating_function(h, beta, op, t, g, spec, True, ev) for g in grid])
    g_conv = np.array([size_generating_function(h, beta, op, t, g, spec, False, ev) for g in grid])
    q = np.linalg.lstsq(design, g_wind, rcond=None)[0]
    p = np.linalg.lstsq(design, g_conv, rcond=None)[0].real
    total = float(p.sum())
    return WindingDistribution(
        n=k, q=q / total, p=p / total, axis="xy_weight", norm=total, meta={"condition_number": float(cond)}
    )


def xy_weight_to_size(dist: WindingDistribution, n: int | None = None) -> WindingDistribution:
    """Map an X/Y-weight distribution to a size distribution.

    Assumes every site without an X or Y factor carries I or Z with equal
    probability, so ``size = w + Binomial(n - w, 1/2)``.  This is exact for
    ensembles that are invariant under local Z-type relabelling and a
    model otherwise.
    """
    if dist.axis != "xy_weight":
        raise MalformedInputError("input must be an xy_weight distribution")
    n = dist.n if n is None else n
    q = np.zeros(n + 1, complex)
    p = np.zeros(n + 1)
    for w in range(dist.n + 1):
        extra = binom.pmf(np.arange(n - w + 1), n - w, 0.5)
        q[w:] += dist.q[w] * extra
        p[w:] += dist.p[w] * extra
    return WindingDistribution(n=n, q=q, p=p, axis="size", norm=dist.norm, meta=dict(dist.meta))


@dataclass(frozen=True)
class PerfectWindingResult:
    """Outcome of :func:`check_perfect_winding`.

    Attributes
    ----------
    is_perfect : bool
        Coherence and linear-phase tests both pass.
    alpha_fit : float
        Winding rate in ``q(l) = p(l) e^{2 i alpha l / n}``.
    residual : float
        Weighted RMS deviation of the unwrapped phase from the linear fit.
    min_coherence : float
        Smallest ``|q(l)| / p(l)`` over weighted bins.
    windings_per_sigma : float
        Standard deviation of ``p`` divided by the winding wavelength.
    """

    is_perfect: bool
    alpha_fit: float
    residual: float
    min_coherence: float
    windings_per_sigma: float


def check_perfect_winding(
    dist: WindingDistribution, tol: float = 1e-6, phase_tol: float = 1e-3, floor: float = 1e-6
) -> PerfectWindingResult:
    """Test the perfect-size-winding criterion on a distribution.

    Bins with ``p(l) <= floor * max p`` are ignored.  The phase of ``q`` is
    unwrapped along increasing ``l`` and fitted by weighted least squares.
    """
    p = dist.p
    if p.max() <= 0:
        raise UndefinedFitError("distribution carries no weight")
    keep = p > floor * p.max()
    if not np.any(keep):
        raise UndefinedFitError("no bin above the weight floor")
    ls = dist.sizes[keep]
    weights = p[keep]
    coherence = np.abs(dist.q[keep]) / weights
    phase = np.unwrap(np.angle(dist.q[keep]))
    if ls.size == 1:
        slope, intercept = 0.0, phase[0]
    else:
        a = np.vstack([ls, np.ones_like(ls)]).T * np.sqrt(weights)[:, None]
        slope, intercept = np.linalg.lstsq(a, phase * np.sqrt(weights), rcond=None)[0]
    resid = phase - (slope * ls + intercept)
    residual = float(np.sqrt(np.sum(weights * resid**2) / np.sum(weights)))
    alpha = float(slope * dist.n / 2)
    wavelength = 2 * np.pi / abs(slope) if abs(slope) > 1e-300 else np.inf
    wps = float(dist.std() / wavelength) if np.isfinite(wavelength) else 0.0
    min_coh = float(coherence.min())
    ok = bool(min_coh >= 1 - tol and residual <= phase_tol)
    return PerfectWindingResult(ok, alpha, residual, min_coh, wps)
