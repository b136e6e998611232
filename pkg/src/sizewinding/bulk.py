"""Nearly-AdS2 bulk picture of size winding and AdS2 interval entropies.

Times are in units of ``beta / 2 pi`` inside the momentum integrals
(``tau = 2 pi t / beta``).  With ``u = -p_+ > 0`` the boundary correlator is

    C(t_L, t_R) = e^{Delta (t_L - t_R)} int_0^inf du u^{2 Delta - 1} e^{-A u},
    A = -2i (e^{t_L} + e^{-t_R}) + 4 epsilon e^{-Re(t_R - t_L)/2} + i g~,

where the ``epsilon`` term is the explicit UV regulator.  The overall
prefactor is not fixed by the bulk argument, so :func:`correlator_C`
returns the ratio to its ``g~ = 0`` value.

The winding branch uses ``t_L = -t``, ``t_R = t`` and the conventional
branch ``t_L = -t + i pi``: their integrands differ only by the phase
``e^{4 i u e^{-tau}}``, which is perfect size winding with a rate
``proportional to e^{-tau}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DivergenceError, MalformedInputError
from .special import power_fourier_integral

__all__ = [
    "BulkParams",
    "BulkWindingFit",
    "delta_beta_mu",
    "winding_wavefunction",
    "branch_integrands",
    "correlator_C",
    "correlator_closed_form",
    "bulk_perfect_winding_fit",
    "average_thermal_size",
    "ads2_interval_entropy",
    "fermion_two_interval_entropy",
    "ads2_fermion_interval_entropy",
    "fermion_entropy_small_sigma1",
]


@dataclass(frozen=True)
class BulkParams:
    """Bulk parameters.

    Attributes
    ----------
    Delta : float
        Operator dimension (``1/q`` for an SYK fermion).
    beta : float
        Inverse temperature.
    t_L, t_R : complex
        Boundary times in units of ``beta / 2 pi``.
    g_tilde : float
        Rescaled coupling.
    epsilon : float
        UV regulator.
    alpha_S, J : float
        Schwarzian coefficient and coupling, used for ``delta_beta mu``.
    mean_size_offset : float
        ``<V>`` in ``s = <V> - 2 p_+ / mu``.
    """

    Delta: float
    beta: float = 2 * np.pi
    t_L: complex = 0.0
    t_R: complex = 0.0
    g_tilde: float = 0.0
    epsilon: float = 0.1
    alpha_S: float = 1.0
    J: float = 1.0
    mean_size_offset: float = 0.0

    def __post_init__(self):
        if not self.Delta > 0:
            raise MalformedInputError("Delta must be positive")
        if not self.epsilon > 0:
            raise MalformedInputError("epsilon must be positive")
        if not self.beta > 0:
            raise MalformedInputError("beta must be positive")

    @property
    def deltabeta_mu(self) -> float:
        return delta_beta_mu(self.alpha_S, self.J, self.beta, self.Delta)


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise MalformedInputError(f"{name} must be positive")


def delta_beta_mu(alpha_S: float, J: float, beta: float, Delta: float) -> float:
    """``delta_beta mu = (2 alpha_S J / Delta) (2 pi / (beta J))^2``."""
    return float(2 * alpha_S * J / Delta * (2 * np.pi / (beta * J)) ** 2)


def winding_wavefunction(
    s_grid: Sequence[float], t: float, beta: float, Delta: float, mu: float = 1.0, mean_size_offset: float = 0.0
) -> np.ndarray:
    """``q(s, t) ~ (-p_+)^{2 Delta - 1} exp(-4 i p_+ e^{-2 pi t / beta})`` on a size grid.

    Sizes map to momenta by ``s = <V> - 2 p_+ / mu``; points with
    ``p_+ >= 0`` carry no weight.  The result is normalized so that
    ``sum |q| = 1``.
    """
    _require_positive(beta=beta, Delta=Delta, mu=mu)
    s = np.asarray(s_grid, dtype=float)
    p = -(s - mean_size_offset) * mu / 2
    out = np.zeros(s.shape, dtype=complex)
    neg = p < 0
    if not np.any(neg):
        raise MalformedInputError("size grid contains no point with p_+ < 0")
    u = -p[neg]
    out[neg] = u ** (2 * Delta - 1) * np.exp(4j * u * np.exp(-2 * np.pi * t / beta))
    return out / np.abs(out).sum()


def _exponent(t_L: complex, t_R: complex, g_tilde: float, epsilon: float) -> complex:
    reg = 4 * epsilon * np.exp(-np.real(t_R - t_L) / 2)
    return complex(-2j * (np.exp(t_L) + np.exp(-t_R)) + reg + 1j * g_tilde)


def correlator_closed_form(t_L: complex, t_R: complex, g_tilde: float, Delta: float, epsilon: float = 0.0) -> complex:
    """``(A(g~) / A(0))^{-2 Delta}``.

    At ``epsilon = 0`` this equals
    ``[(2 cosh((t_L + t_R)/2) - (g~/2) e^{(t_R - t_L)/2}) / (2 cosh((t_L + t_R)/2))]^{-2 Delta}``.
    """
    a0 = _exponent(t_L, t_R, 0.0, epsilon)
    a = _exponent(t_L, t_R, g_tilde, epsilon)
    if abs(a0) <= 1e-12 * (abs(np.exp(t_L)) + abs(np.exp(-t_R))):
        raise DivergenceError("unregulated correlator diverges at these times")
    return complex((a / a0) ** (-2 * Delta))


def correlator_C(
    t_L: complex, t_R: complex, g_tilde: float, Delta: float, epsilon: float, method: str = "quadrature"
) -> complex:
    """Normalized boundary correlator ``C(g~) / C(0)``.

    Parameters
    ----------
    method : str
        ``"quadrature"`` integrates over ``p_+ < 0`` numerically;
        ``"closed"`` uses :func:`correlator_closed_form`.
    """
    if not Delta > 0:
        raise MalformedInputError("Delta must be positive")
    if method == "closed":
        return correlator_closed_form(t_L, t_R, g_tilde, Delta, epsilon)
    if method != "quadrature":
        raise MalformedInputError("method must be 'quadrature' or 'closed'")
    power = 2 * Delta - 1
    # int u^{power} e^{-A u} = int u^{power} e^{i (iA) u}
    num = power_fourier_integral(power, 1j * _exponent(t_L, t_R, g_tilde, epsilon))
    den = power_fourier_integral(power, 1j * _exponent(t_L, t_R, 0.0, epsilon))
    return complex(num / den)


def branch_integrands(u: Sequence[float], t: float, beta: float, Delta: float, epsilon: float):
    """Winding and conventional integrands over ``u = -p_+``, each normalized.

    Returns ``(q_branch, p_branch)``; the moduli agree pointwise and the
    ratio is ``exp(4 i u e^{-2 pi t / beta})``.
    """
    _require_positive(beta=beta, Delta=Delta, epsilon=epsilon)
    u = np.asarray(u, dtype=float)
    tau = 2 * np.pi * t / beta
    base = u ** (2 * Delta - 1) * np.exp(-4 * epsilon * u * np.exp(-tau))
    q_branch = base * np.exp(4j * u * np.exp(-tau))
    p_branch = base.astype(complex)
    norm = np.abs(p_branch).sum()
    return q_branch / norm, p_branch / norm


@dataclass
class BulkWindingFit:
    """Fitted winding rate per unit ``-p_+`` at each time.

    Attributes
    ----------
    t : ndarray
    alpha : ndarray
        Slope of the unwrapped branch-ratio phase.
    magnitude_mismatch : ndarray
        ``max | |q_branch| - |p_branch| |`` on the grid.
    phase_residual : ndarray
        RMS deviation of the phase from the linear fit.
    regime_ok : ndarray of bool
        ``t > beta``.
    """

    t: np.ndarray
    alpha: np.ndarray
    magnitude_mismatch: np.ndarray
    phase_residual: np.ndarray
    regime_ok: np.ndarray
    meta: dict = field(default_factory=dict)

    def ratio(self, shift_index: int = 1) -> np.ndarray:
        return self.alpha[shift_index:] / self.alpha[:-shift_index]


def bulk_perfect_winding_fit(
    t_values: Sequence[float], Delta: float, beta: float, epsilon: float, points: int = 4001
) -> BulkWindingFit:
    """Extract ``alpha(t)`` from the two branch integrands by a linear phase fit.

    The grid covers ``u`` up to ten decay lengths of the regulated
    conventional branch, with at least eight samples per phase turn.
    """
    _require_positive(Delta=Delta, beta=beta, epsilon=epsilon)
    ts = np.asarray(t_values, dtype=float)
    alphas, mism, resid = [], [], []
    for t in ts:
        tau = 2 * np.pi * t / beta
        u_max = 10.0 * np.exp(tau) / (4 * epsilon)
        turns = 4 * u_max * np.exp(-tau) / (2 * np.pi)
        npts = max(points, int(8 * turns) + 1)
        u = np.linspace(u_max / npts, u_max, npts)
        qb, pb = branch_integrands(u, t, beta, Delta, epsilon)
        mask = np.abs(pb) > 0
        phase = np.unwrap(np.angle(qb[mask] / pb[mask]))
        w = np.abs(pb[mask])
        a = np.vstack([u[mask], np.ones(mask.sum())]).T * np.sqrt(w)[:, None]
        slope, intercept = np.linalg.lstsq(a, phase * np.sqrt(w), rcond=None)[0]
        fit = slope * u[mask] + intercept
        alphas.append(slope)
        mism.append(float(np.max(np.abs(np.abs(qb) - np.abs(pb)))))
        resid.append(float(np.sqrt(np.sum(w * (phase - fit) ** 2) / w.sum())))
    return BulkWindingFit(
        t=ts,
        alpha=np.array(alphas),
        magnitude_mismatch=np.array(mism),
        phase_residual=np.array(resid),
        regime_ok=ts > beta,
        meta={"Delta": Delta, "beta": beta, "epsilon": epsilon},
    )


def average_thermal_size(
    t: float, beta: float, Delta: float, epsilon: float, alpha_S: float = 1.0, J: float = 1.0
) -> float:
    """``<size> = 2i (mu delta_beta)^{-1} d/dg~ log C(-t + i pi, t)`` at ``g~ = 0``.

    The derivative of the closed form is analytic:
    ``d log C / dg~ = -2 Delta i / A(0)`` with ``A(0) = 4 epsilon e^{-tau}``,
    so ``<size> = Delta e^{2 pi t / beta} / (epsilon mu delta_beta)``.
    """
    _require_positive(beta=beta, Delta=Delta, epsilon=epsilon, alpha_S=alpha_S, J=J)
    tau = 2 * np.pi * t / beta
    a0 = _exponent(-tau + 1j * np.pi, tau, 0.0, epsilon)
    dlog = -2 * Delta * 1j / a0
    value = 2j * dlog / delta_beta_mu(alpha_S, J, beta, Delta)
    return float(value.real)


# ---------------------------------------------------------------------------
# AdS2 entropies (conformal matter, reflecting boundaries, doubling trick)


def _sin_half(a: float, b: float) -> float:
    s = np.sin((a - b) / 2)
    if abs(s) < 1e-15:
        raise DivergenceError("coincident endpoints")
    return float(s)


def ads2_interval_entropy(
    theta1: float, theta2: float, c: float, omega1: float | None = None, omega2: float | None = None
) -> float:
    """Single interval on the cylinder, ``(c/6) log[sin^2((t1 - t2)/2) / (O1 O2)]``.

    The warp factors default to ``|sin theta|`` (global AdS2); the additive
    regulator constant is dropped.
    """
    o1 = abs(np.sin(theta1)) if omega1 is None else omega1
    o2 = abs(np.sin(theta2)) if omega2 is None else omega2
    if o1 <= 0 or o2 <= 0:
        raise DivergenceError("warp factor vanishes at an endpoint")
    s = _sin_half(theta1, theta2)
    return float(c / 6 * np.log(s * s / (o1 * o2)))


def fermion_two_interval_entropy(thetas: Sequence[float], sigmas: Sequence[float], c: float) -> float:
    """Free-fermion entropy of ``[x1, x2] U [x3, x4]`` on the cylinder.

    ``(c/6) log[s12^2 s23^2 s14^2 s34^2 / (s24^2 s13^2 O1 O2 O3 O4)]`` with
    ``s_ij = sin((theta_i - theta_j)/2)`` and warp factors
    ``O_i = sin(sigma_i)``.
    """
    th = [float(x) for x in thetas]
    sg = [float(x) for x in sigmas]
    if len(th) != 4 or len(sg) != 4:
        raise MalformedInputError("need four angles and four warp-factor angles")
    omegas = np.abs(np.sin(sg))
    if np.any(omegas <= 0):
        raise DivergenceError("warp factor vanishes at an endpoint")
    s = {(i, j): _sin_half(th[i], th[j]) ** 2 for i in range(4) for j in range(4) if i != j}
    num = s[(1, 0)] * s[(2, 1)] * s[(3, 0)] * s[(3, 2)]
    den = s[(2, 0)] * s[(3, 1)] * np.prod(omegas)
    return float(c / 6 * np.log(num / den))


def ads2_fermion_interval_entropy(sigma1: float, sigma2: float, c: float) -> float:
    """AdS2 interval ``[sigma1, sigma2]`` for chiral-doubled fermions.

    ``(c/6) log[sin^2((s1 - s2)/2) / sin^2((s1 + s2)/2)]``.  This is half of
    :func:`fermion_two_interval_entropy` at ``thetas = (s1, s2, -s2, -s1)``
    because the doubled strip carries one chirality per image.
    """
    a = _sin_half(sigma1, sigma2)
    b = np.sin((sigma1 + sigma2) / 2)
    if abs(b) < 1e-15:
        raise DivergenceError("interval closes on the boundary")
    return float(c / 6 * np.log(a * a / (b * b)))


def fermion_entropy_small_sigma1(sigma1: float, sigma2: float, c: float) -> float:
    """Leading term near the boundary, ``-c sigma1 / (3 tan(sigma2 / 2))``."""
    return float(-c * sigma1 / (3 * np.tan(sigma2 / 2)))
