"""Gaussian random-matrix ensembles and their closed-form averages.

All closed forms are leading order in ``1/d`` and use the semicircle
transform ``f`` from :mod:`sizewinding.special`.  Samples are scaled so the
semicircle edges sit at -1 and +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import MalformedInputError
from .rng import stream
from .special import f_semicircle as f
from .winding import WindingDistribution

__all__ = [
    "Kind",
    "EnsembleSpec",
    "sample",
    "iter_samples",
    "lambda_master",
    "lambda_infT",
    "lambda_sametime",
    "finite_n_lambda",
    "plateau_onset",
    "twopoint_I_gue",
    "twopoint_II_goe",
    "PauliClass",
    "classify_pair",
    "s_function",
    "s_function_for",
    "bulk_sigma",
    "winding_size_gue",
]


class Kind(str, Enum):
    GUE = "gue"
    GOE = "goe"


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of a random-Hamiltonian ensemble.

    Attributes
    ----------
    kind : Kind
        ``GUE`` (complex Hermitian) or ``GOE`` (real symmetric).
    n : int
        Qubits per side; the matrix dimension is ``2**n``.
    samples : int
        Number of independent draws.
    seed : int
        64-bit master seed.
    """

    kind: Kind
    n: int
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n < 1 or self.samples < 1:
            raise MalformedInputError("n and samples must be positive")

    @property
    def dim(self) -> int:
        return 1 << self.n


def sample(spec: EnsembleSpec, index: int = 0) -> np.ndarray:
    """Draw sample ``index`` of the ensemble.

    Off-diagonal entries have standard deviation ``1 / (2 sqrt(d))`` so the
    spectral edge is at 1.
    """
    d = spec.dim
    rng = stream(spec.seed, index)
    scale = 1.0 / (2.0 * np.sqrt(d))
    if spec.kind is Kind.GUE:
        a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
        h = (a + a.conj().T) / np.sqrt(2.0)
    else:
        a = rng.standard_normal((d, d))
        h = (a + a.T) / np.sqrt(2.0)
    return h * scale


def iter_samples(spec: EnsembleSpec) -> Iterator[np.ndarray]:
    for i in range(spec.samples):
        yield sample(spec, i)


# teleportation channel --------------------------------------------------


def _lambda_general(beta, t_left, t_right, one_minus_phase, one_minus_cos):
    b2 = -beta / 2.0
    dt = t_right - t_left
    first = 0.5 * one_minus_phase * f(b2 + 1j * dt) * f(1j * dt) * f(b2)
    bracket = (
        0.5 * one_minus_phase * f(b2 + 1j * t_right)
        + one_minus_phase * f(1j * t_left) * f(1j * t_right) * f(b2 - 1j * t_left)
        - one_minus_phase * f(1j * t_left) * f(b2 + 1j * dt)
        - one_minus_cos * f(1j * t_right) * f(b2)
    )
    second = f(1j * t_left) * f(1j * t_right) * f(b2 + 1j * t_left) * bracket
    return np.real(first + second) / np.real(f(-beta))


def lambda_master(beta, t_left, t_right, g):
    """Depolarizing parameter of the averaged GOE channel, large-n limit."""
    return _lambda_general(beta, t_left, t_right, 1 - np.exp(1j * g), 1 - np.cos(g))


def finite_n_lambda(beta, t_left, t_right, g, n):
    """Leading finite-n correction to :func:`lambda_master`.

    The g-dependent coefficients become ``c^n (c^n - e^{ig})`` and
    ``c^n (c^n - cos g)`` with ``c = cos(g / n)``, the binomial average of the
    coupling phase over a random string.
    """
    if n < 1:
        raise MalformedInputError("n must be positive")
    cn = np.cos(g / n) ** n
    return _lambda_general(beta, t_left, t_right, cn * (cn - np.exp(1j * g)), cn * (cn - np.cos(g)))


def lambda_infT(t_left, t_right, g):
    """Infinite-temperature reduction of :func:`lambda_master`."""
    fl, fr, fd = f(1j * t_left), f(1j * t_right), f(1j * (t_left - t_right))
    val = fd**2 + 2 * fl**4 * fr**2 - fl**2 * fr**2 - 2 * fl**3 * fr * fd
    return (1 - np.cos(g)) / 2 * np.real(val)


def lambda_sametime(t, g):
    """``lambda(t, t)`` at infinite temperature."""
    ft = np.real(f(1j * np.asarray(t)))
    return (1 - np.cos(g)) / 2 * (1 + 2 * ft**6 - 3 * ft**4)


def plateau_onset(g: float = np.pi, tol: float = 0.02, t_max: float = 10.0, step: float = 1e-3) -> float:
    """First time at which ``lambda_sametime`` stays within ``tol`` of its plateau.

    The plateau is ``(1 - cos g) / 2``.  "Stays" means every later grid point
    up to ``t_max`` also lies within tolerance.
    """
    plateau = (1 - np.cos(g)) / 2
    ts = np.arange(0.0, t_max + step / 2, step)
    inside = np.abs(lambda_sametime(ts, g) - plateau) <= tol * abs(plateau)
    outside = np.flatnonzero(~inside)
    if outside.size == 0:
        return 0.0
    if outside[-1] + 1 >= ts.size:
        raise MalformedInputError("no plateau reached before t_max")
    return float(ts[outside[-1] + 1])


# two-point functions ---------------------------------------------------


def twopoint_I_gue(beta, t, g):
    """Averaged ``<T| P_R(t) e^{igV} P_L(-t) |T>`` for a single-qubit Pauli."""
    b2 = -beta / 2.0
    delta = f(1j * t + b2) ** 2 * f(-1j * t) ** 2
    return (np.exp(1j * g) * delta + (f(b2) ** 2 - delta)) / f(-beta)


def twopoint_II_goe(beta, t_left, t_right, g):
    """Averaged ``<T| e^{-igV} P_R(t_R) e^{igV} P_L(-t_L) |T>`` for GOE."""
    b2 = -beta / 2.0
    tl, tr = t_left, t_right
    eg, emg = np.exp(1j * g), np.exp(-1j * g)
    left = f(b2 + 1j * tl) * f(-1j * tl)
    right_free = f(1j * tr) * f(-1j * tr)
    right_th = f(b2 + 1j * tr) * f(-1j * tr)
    cross = f(b2 - 1j * tr + 1j * tl) * f(b2) * f(1j * tr - 1j * tl)
    cross2 = f(b2 - 1j * tr + 1j * tl) * f(b2 + 1j * tr - 1j * tl)
    total = (
        2 * left * right_free * f(b2)
        - cross
        - left * right_th
        + cross2
        - eg * left * right_free * f(b2)
        + eg * left * right_th
        - emg * left * right_free * f(b2)
        + emg * cross
    )
    return total / f(-beta)


# s-function -------------------------------------------------------------


class PauliClass(str, Enum):
    """Relation between the two Pauli labels ``u`` and ``v``."""

    BOTH_ZERO = "zero"
    EQUAL_NONZERO = "equal-nonzero"
    ONE_ZERO = "one-zero"
    DISTINCT_COMMUTING = "distinct-commuting"
    DISTINCT_ANTICOMMUTING = "distinct-anticommuting"


def classify_pair(u, v) -> PauliClass:
    """Classify a pair of :class:`~sizewinding.pauli.PauliString` labels."""
    from .pauli import commutes

    u0 = u.p == 0 and u.q == 0
    v0 = v.p == 0 and v.q == 0
    if u0 and v0:
        return PauliClass.BOTH_ZERO
    if u0 or v0:
        return PauliClass.ONE_ZERO
    if (u.p, u.q) == (v.p, v.q):
        return PauliClass.EQUAL_NONZERO
    return PauliClass.DISTINCT_ANTICOMMUTING if commutes(u, v) else PauliClass.DISTINCT_COMMUTING


def s_function(alpha, beta, relation, d: int | None = None):
    """Leading-order ``E[(tr e^{aH} P_u e^{bH} P_v)^2] / d^2`` for GUE.

    Parameters
    ----------
    alpha, beta : complex
        Exponents multiplying ``H``.
    relation : PauliClass or str
        How ``u`` and ``v`` are related (see :func:`classify_pair`).
    d : int, optional
        Hilbert-space dimension; required for the three ``1/d^2`` cases.
    """
    try:
        cls = PauliClass(relation)
    except ValueError:
        raise MalformedInputError(f"invalid Pauli relation {relation!r}") from None
    fa, fb, fab = f(alpha), f(beta), f(alpha + beta)
    if cls is PauliClass.BOTH_ZERO:
        return fab**2
    if cls is PauliClass.EQUAL_NONZERO:
        return fa**2 * fb**2
    if d is None:
        raise MalformedInputError("dimension d is required for this relation")
    inv = 1.0 / float(d) ** 2
    if cls is PauliClass.ONE_ZERO:
        return inv * (f(2 * alpha + 2 * beta) - fab**2)
    f2a, f2b = f(2 * alpha), f(2 * beta)
    if cls is PauliClass.DISTINCT_COMMUTING:
        return inv * (f2a * fb**2 + f2b * fa**2 + fab**2 - 3 * fa**2 * fb**2)
    return inv * (fa**2 * fb**2 + fab**2 - f2a * fb**2 - f2b * fa**2)


def s_function_for(alpha, beta, u, v):
    """:func:`s_function` for two concrete Pauli strings on ``u.n`` qubits."""
    return s_function(alpha, beta, classify_pair(u, v), 1 << u.n)


# winding size distribution ----------------------------------------------

_SIGMA_RULES = {
    "binomial": lambda n: np.sqrt(3 * n) / 4,
    "sqrt-2n-over-3": lambda n: np.sqrt(2 * n) / 3,
    "sqrt-3n-over-4": lambda n: np.sqrt(3 * n / 4),
}


def bulk_sigma(n: int, rule: str = "binomial") -> float:
    """Width of the scrambled branch.

    ``"binomial"`` is the spread of the size of a uniformly random string,
    ``sqrt(3n)/4``; ``"sqrt-2n-over-3"`` gives ``sqrt(2n)/3`` and ``"sqrt-3n-over-4"``
    gives ``sqrt(3n/4)``.
    """
    try:
        return float(_SIGMA_RULES[rule](n))
    except KeyError:
        raise MalformedInputError(f"unknown sigma rule {rule!r}") from None


def _bulk_profile(n: int, rule: str) -> np.ndarray:
    sizes = np.arange(n + 1)
    sig = bulk_sigma(n, rule)
    prof = np.exp(-0.5 * ((sizes - 0.75 * n) / sig) ** 2)
    return prof / prof.sum()


def winding_size_gue(l0: int, n: int, beta: float, t: float, sigma_rule: str = "binomial") -> WindingDistribution:
    """Two-branch winding size distribution of a GUE-evolved Pauli.

    The winding distribution is

        q(l) = [delta_{l,l0} D + N(l) (f(-beta/2)^2 - D)] / f(-beta),
        D    = f(it - beta/2)^2 f(-it)^2,

    with ``N`` a Gaussian of mean ``3n/4`` discretized on ``l = 0..n``.  The
    conventional distribution uses the factorized leading-order weight
    ``|f(it - beta/2) f(it)|^2 / f(-beta)`` on the delta branch and puts the
    remaining probability on the same Gaussian.
    """
    if not 0 <= l0 <= n:
        raise MalformedInputError("l0 must lie in [0, n]")
    if l0 == 0:
        q = np.zeros(n + 1, complex)
        q[0] = f(-beta / 2) ** 2 / f(-beta) if beta else 1.0
        p = np.zeros(n + 1)
        p[0] = 1.0
        return WindingDistribution(n=n, q=q, p=p)
    b2 = -beta / 2.0
    delta = f(1j * t + b2) ** 2 * f(-1j * t) ** 2
    norm = np.real(f(-beta))
    prof = _bulk_profile(n, sigma_rule)
    q = prof * (f(b2) ** 2 - delta) / norm
    q = q.astype(complex)
    q[l0] += delta / norm
    delta_p = float(np.abs(f(1j * t + b2) * f(1j * t)) ** 2 / norm)
    p = prof * (1.0 - delta_p)
    p[l0] += delta_p
    return WindingDistribution(n=n, q=q, p=p)
