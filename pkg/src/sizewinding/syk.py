"""Large-q SYK size winding and its stringy finite-temperature extension.

Units: ``J = 1`` unless given, times in ``1/J``.  The chaos exponent
``alpha`` and angle ``gamma`` solve

    alpha = J sin(gamma),   sin(alpha beta / 2 + 2 gamma) = e^{-x} sin(alpha beta / 2),

with ``x = 0`` for the thermal problem.  At ``x = 0`` the non-trivial root
satisfies ``alpha beta / 2 + gamma = pi / 2``; writing ``alpha = pi v / beta``
this is ``beta J cos(pi v / 2) = pi v``.

Sizes live on the lattice ``l = delta_beta (1 + q m)`` with
``delta_beta = (alpha / J)^{2/q}``.  The thermal two-point normalization is
fixed by ``G(beta/2)^{q/2} = alpha / J``, so ``G(beta/2) = delta_beta``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import gammaln, loggamma
from scipy.stats import nbinom

from .errors import MalformedInputError, ResourceLimitError, SaturationError, SolverError
from .special import power_fourier_integral

__all__ = [
    "SykParams",
    "AlphaGamma",
    "RegimeFlags",
    "SizeSeries",
    "WindingDiagnostics",
    "PoleWarning",
    "RegimeWarning",
    "solve_alpha_gamma",
    "growth_parameter",
    "mean_size",
    "h0",
    "growth_distribution",
    "winding_growth_distribution",
    "winding_diagnostics",
    "stringy_twopoint",
    "stringy_twopoint_large_t",
    "stringy_alpha",
    "probe_a_plus",
    "probe_correlator",
    "probe_validity_ratio",
    "stringy_probe_closed_form",
    "stringy_probe_integral",
]

ROOT_TOL = 1e-12
TAIL_TOL = 1e-12
GROWTH_THRESHOLD = 10.0
WIDTH_FRACTION = 0.1
COUPLING_LIMIT = 0.1
POLE_TOL = 1e-6
MAX_LATTICE_POINTS = 200_000


class PoleWarning(UserWarning):
    """A two-point denominator is within ``POLE_TOL`` of zero."""


class RegimeWarning(UserWarning):
    """A regime-limited formula is evaluated outside its regime."""


@dataclass(frozen=True)
class SykParams:
    """Large-q SYK parameters.

    Attributes
    ----------
    betaJ : float
        Inverse temperature times coupling.
    q : int
        Interaction locality, even and at least 4.
    t : float
        Time in units of ``1/J``.
    N : float, optional
        Number of fermions; enables the width and coupling regime checks.
    g : float
        Two-sided coupling.
    J : float
        Coupling scale.
    reverse_time : bool
        Evaluate the winding generating function at ``-t``; see
        :func:`h0`.
    """

    betaJ: float
    q: int = 4
    t: float = 0.0
    N: float | None = None
    g: float = 0.0
    J: float = 1.0
    reverse_time: bool = True

    def __post_init__(self):
        if not self.betaJ > 0:
            raise MalformedInputError("betaJ must be positive")
        if self.q < 4 or self.q % 2:
            raise MalformedInputError("q must be even and at least 4")
        if self.J <= 0:
            raise MalformedInputError("J must be positive")
        if self.N is not None and self.N <= 0:
            raise MalformedInputError("N must be positive")

    @property
    def beta(self) -> float:
        return self.betaJ / self.J


@dataclass(frozen=True)
class AlphaGamma:
    """Root of the boundary-condition system.

    ``v = alpha beta / pi`` is the fraction of the maximal chaos exponent.
    """

    alpha: complex
    gamma: complex
    betaJ: float
    J: float = 1.0
    residual: float = 0.0

    @property
    def v(self) -> complex:
        return self.alpha * (self.betaJ / self.J) / np.pi


@dataclass(frozen=True)
class RegimeFlags:
    """Validity flags attached to every regime-limited output."""

    growth: bool
    width: bool | None
    coupling: bool | None
    e_alpha_t: float

    @property
    def ok(self) -> bool:
        return self.growth and self.width is not False and self.coupling is not False

    def as_dict(self) -> dict:
        return {"growth": self.growth, "width": self.width, "coupling": self.coupling, "e_alpha_t": self.e_alpha_t}


@dataclass
class SizeSeries:
    """Distribution on the lattice ``l = delta_beta (1 + q m)``.

    ``m`` may be strided when the support is longer than
    ``MAX_LATTICE_POINTS``; ``stride`` records the spacing.
    """

    m: np.ndarray
    sizes: np.ndarray
    values: np.ndarray
    stride: int
    regime: RegimeFlags
    meta: dict = field(default_factory=dict)


def _system(gamma, beta, J, x):
    alpha = J * np.sin(gamma)
    return np.sin(alpha * beta / 2 + 2 * gamma) - np.exp(-x) * np.sin(alpha * beta / 2)


def _system_prime(gamma, beta, J, x):
    alpha = J * np.sin(gamma)
    da = J * np.cos(gamma)
    return np.cos(alpha * beta / 2 + 2 * gamma) * (beta * da / 2 + 2) - np.exp(-x) * np.cos(alpha * beta / 2) * (
        beta * da / 2
    )


def solve_alpha_gamma(betaJ: float, mu_exponent: complex = 0.0, J: float = 1.0, steps: int = 16) -> AlphaGamma:
    """Smallest positive root ``(alpha, gamma)`` of the boundary conditions.

    Parameters
    ----------
    betaJ : float
        Inverse temperature times ``J``.
    mu_exponent : complex
        ``x`` in ``e^{-x}`` multiplying the right-hand side: ``mu delta_beta q``
        for the size generating function, ``-i g / N`` for the coupled
        wormhole.
    J : float
        Coupling scale.
    steps : int
        Homotopy steps from ``x = 0`` to ``mu_exponent``.

    Raises
    ------
    SolverError
        If the bracket fails or Newton does not reach 1e-12.
    """
    if not betaJ > 0:
        raise MalformedInputError("betaJ must be positive")
    beta = betaJ / J

    # at x = 0: F(gamma) = 2 cos(alpha beta/2 + gamma) sin(gamma), so bracket the cosine factor
    def reduced(g):
        return beta * J * np.sin(g) / 2 + g - np.pi / 2

    lo, hi = 0.0, np.pi / 2
    if not reduced(lo) < 0 < reduced(hi):
        raise SolverError(f"no sign change on (0, pi/2) for betaJ={betaJ}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if reduced(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    gamma = 0.5 * (lo + hi)
    x_target = complex(mu_exponent)
    path = [0.0] if x_target == 0 else np.linspace(0, 1, steps + 1)[1:]
    for s in path:
        x = s * x_target
        if x == 0:
            gamma = float(optimize.newton(_system, gamma, fprime=_system_prime, args=(beta, J, 0.0), tol=1e-15))
            continue
        try:
            gamma = complex(
                optimize.newton(_system, complex(gamma), fprime=_system_prime, args=(beta, J, x), tol=1e-15, maxiter=100)
            )
        except RuntimeError as exc:
            raise SolverError(f"homotopy failed at step {s:.3f}: {exc}") from exc
    res = abs(_system(gamma, beta, J, x_target))
    if res > ROOT_TOL:
        raise SolverError(f"root residual {res:.3e} exceeds {ROOT_TOL}")
    if x_target == 0 and not 0 < gamma < np.pi / 2:
        raise SolverError("root left the bracket during polishing")
    return AlphaGamma(alpha=J * np.sin(gamma), gamma=gamma, betaJ=float(betaJ), J=J, residual=float(res))


def _real_root(params: SykParams) -> AlphaGamma:
    return solve_alpha_gamma(params.betaJ, 0.0, params.J)


def _regime(params: SykParams, alpha: float, width: float) -> RegimeFlags:
    e_at = float(np.exp(alpha * params.t))
    width_ok = None if params.N is None else bool(width <= WIDTH_FRACTION * params.N)
    coupling_ok = None if params.N is None else bool(abs(params.g) / params.N <= COUPLING_LIMIT)
    return RegimeFlags(growth=bool(e_at >= GROWTH_THRESHOLD), width=width_ok, coupling=coupling_ok, e_alpha_t=e_at)


def growth_parameter(params: SykParams, root: AlphaGamma | None = None) -> float:
    """NB success parameter ``s^2 / (1 + s^2)`` with ``s = (J/alpha) sinh(alpha t)``."""
    root = root or _real_root(params)
    s = params.J / root.alpha * np.sinh(root.alpha * params.t)
    return float(s * s / (1 + s * s))


def mean_size(params: SykParams, root: AlphaGamma | None = None) -> float:
    """``Delta n = delta_beta (1 + 2 [(J/alpha) sinh(alpha t)]^2)``."""
    root = root or _real_root(params)
    delta = (root.alpha / params.J) ** (2 / params.q)
    s = params.J / root.alpha * np.sinh(root.alpha * params.t)
    return float(delta * (1 + 2 * s * s))


def h0(params: SykParams, root: AlphaGamma | None = None) -> complex:
    """``h_0(t) = sin(i t alpha) sin(alpha beta/2 + i t alpha) / (sin gamma sin(alpha beta/2 + gamma))``.

    With ``reverse_time`` the expression is evaluated at ``-t``, i.e. it is
    complex conjugated.  That convention gives the origin phase ``-pi/q``
    and a phase that advances with size.
    """
    root = root or _real_root(params)
    a, g, beta = root.alpha, root.gamma, params.beta
    t = -params.t if params.reverse_time else params.t
    num = np.sin(1j * t * a) * np.sin(a * beta / 2 + 1j * t * a)
    den = np.sin(g) * np.sin(a * beta / 2 + g)
    return complex(num / den)


def _lattice(r: float, one_minus_p: float, max_points: int) -> tuple[np.ndarray, int]:
    if one_minus_p >= 1:
        return np.zeros(1, dtype=np.int64), 1
    m_float = nbinom.isf(TAIL_TOL, r, one_minus_p)
    if not m_float < 2.0**53:
        raise ResourceLimitError("size support exceeds exact integer resolution; reduce t")
    m_max = int(m_float) + 1
    stride = max(1, int(np.ceil((m_max + 1) / max_points)))
    return np.arange(0, m_max + 1, stride, dtype=np.int64), stride


def _log_binom(m: np.ndarray, r: float) -> np.ndarray:
    # log C(m + r - 1, m)
    return gammaln(m + r) - gammaln(r) - gammaln(m + 1)


def growth_distribution(params: SykParams, max_points: int = MAX_LATTICE_POINTS) -> SizeSeries:
    """Growth distribution ``K`` as ``NB(m; 2/q, s^2/(1+s^2))``.

    The lattice is truncated where the NB tail drops below 1e-12.
    """
    root = _real_root(params)
    q = params.q
    r = 2.0 / q
    s2 = (params.J / root.alpha * np.sinh(root.alpha * params.t)) ** 2
    one_minus_p = 1.0 / (1.0 + s2)
    m, stride = _lattice(r, one_minus_p, max_points)
    if s2 == 0:
        values = np.ones(1)
    else:
        logp = np.log(s2) - np.log1p(s2)
        values = np.exp(r * np.log(one_minus_p) + _log_binom(m, r) + m * logp)
    delta = (root.alpha / params.J) ** (2 / q)
    dn = delta * (1 + 2 * s2)
    return SizeSeries(
        m=m,
        sizes=delta * (1 + q * m),
        values=values,
        stride=stride,
        regime=_regime(params, root.alpha, np.sqrt(q / 2) * dn),
        meta={"alpha": root.alpha, "gamma": root.gamma, "delta_beta": delta, "mean_size": dn, "p": 1 - one_minus_p},
    )


def winding_growth_distribution(params: SykParams, max_points: int = MAX_LATTICE_POINTS) -> SizeSeries:
    """Winding growth distribution ``delta_beta NB(m; 2/q, h_0/(h_0 - 1))``.

    Evaluated on the same lattice as :func:`growth_distribution`.  A
    :class:`RegimeWarning` is issued outside ``1 << e^{alpha t}`` or when the
    width is not small against ``N``.
    """
    base = growth_distribution(params, max_points)
    root = _real_root(params)
    h = h0(params, root)
    r = 2.0 / params.q
    delta = base.meta["delta_beta"]
    m = base.m
    if h == 0:
        values = np.full(m.shape, delta, dtype=complex)
    else:
        log_ratio = np.log(h) - np.log(h - 1)
        values = np.exp(np.log(delta) - r * np.log(1 - h) + _log_binom(m, r) + m * log_ratio)
    if not base.regime.ok:
        warnings.warn(f"winding distribution outside its regime: {base.regime.as_dict()}", RegimeWarning, stacklevel=2)
    meta = dict(base.meta)
    meta["h0"] = h
    return SizeSeries(m=m, sizes=base.sizes, values=values, stride=base.stride, regime=base.regime, meta=meta)


@dataclass(frozen=True)
class WindingDiagnostics:
    """Winding wavelength and windings per size scale.

    ``windings_per_sigma`` is ``Delta n / lambda_s`` with ``lambda_s`` the
    size advance per full turn of the phase (measured from the exact
    generating function).  ``sigma_over_wavelength`` uses the NB standard
    deviation instead of the mean.
    """

    wavelength: float
    windings_per_sigma: float
    sigma_over_wavelength: float
    phase_per_step: float
    predicted_phase_per_step: float
    predicted_windings_per_sigma: float
    origin_phase: float
    regime: RegimeFlags


def winding_diagnostics(params: SykParams) -> WindingDiagnostics:
    root = _real_root(params)
    h = h0(params, root)
    if h == 0:
        raise MalformedInputError("no winding at t = 0")
    q = params.q
    r = 2.0 / q
    delta = (root.alpha / params.J) ** (2 / q)
    # arg(h / (h - 1)) = -arg(1 - 1/h), kept accurate for |h| >> 1
    step = float(-np.imag(np.log1p(-1 / h)))
    p = growth_parameter(params, root)
    if step == 0 or not 1 - p > 0:
        raise SaturationError("winding phase per step underflows; reduce t")
    wavelength = 2 * np.pi * delta * q / abs(step)
    dn = mean_size(params, root)
    sigma = delta * q * np.sqrt(p * r) / (1 - p)
    origin = float(np.angle(np.exp(-r * np.log(1 - h))))
    return WindingDiagnostics(
        wavelength=float(wavelength),
        windings_per_sigma=float(dn / wavelength),
        sigma_over_wavelength=float(sigma / wavelength),
        phase_per_step=step,
        predicted_phase_per_step=float(4 * root.alpha / params.J * np.exp(-2 * root.alpha * params.t)),
        predicted_windings_per_sigma=float(params.betaJ / (np.pi**2 * q)),
        origin_phase=origin,
        regime=_regime(params, root.alpha, np.sqrt(q / 2) * dn),
    )


# ---------------------------------------------------------------------------
# stringy two-point function


def stringy_alpha(betaJ: float, g_over_N: float, mode: str = "real", J: float = 1.0) -> complex:
    """Chaos exponent for the coupled problem.

    ``mode`` is ``"real"`` (the ``g = 0`` root, leading order),
    ``"complex"`` (root of the boundary conditions with ``e^{i g/N}``,
    continued from ``g = 0``) or ``"perturbative"`` (``pi/beta - i g/(pi N)``).
    """
    if mode == "real":
        return complex(solve_alpha_gamma(betaJ, 0.0, J).alpha)
    if mode == "complex":
        return complex(solve_alpha_gamma(betaJ, -1j * g_over_N, J).alpha)
    if mode == "perturbative":
        return complex(np.pi * J / betaJ - 1j * g_over_N / np.pi)
    raise MalformedInputError("mode must be 'real', 'complex' or 'perturbative'")


def _check_pole(den: complex, t: float) -> None:
    if abs(den) < POLE_TOL:
        warnings.warn(f"two-point denominator {abs(den):.2e} near a pole at t={t:.6g}", PoleWarning, stacklevel=3)


def _stringy_pieces(betaJ, g_over_N, q, J, alpha_mode):
    if abs(g_over_N) > COUPLING_LIMIT:
        warnings.warn(f"g/N = {g_over_N} exceeds {COUPLING_LIMIT}", RegimeWarning, stacklevel=3)
    alpha = stringy_alpha(betaJ, g_over_N, alpha_mode, J)
    g_half = (alpha / J) ** (2 / q)  # G(beta/2)
    z = -(1 - np.exp(1j * g_over_N)) / (alpha / J) ** 2 * g_half ** (q / 2)
    return alpha, g_half, z


def stringy_twopoint(
    t: float, betaJ: float, g_over_N: float, q: int = 4, J: float = 1.0, alpha_mode: str = "real"
) -> complex:
    """Twisted two-point function at ``t_l = -t_r = t``.

    ``G = e^{ig/N} G(beta/2) / [1 - z sinh(alpha t) sinh(alpha t - i alpha beta/2)]^{2/q}``
    with ``z = -(1 - e^{ig/N}) G(beta/2)^{q/2} / (alpha/J)^2``.
    """
    beta = betaJ / J
    alpha, g_half, z = _stringy_pieces(betaJ, g_over_N, q, J, alpha_mode)
    den = 1 - z * np.sinh(alpha * t) * np.sinh(alpha * t - 1j * alpha * beta / 2)
    _check_pole(den, t)
    return complex(np.exp(1j * g_over_N) * g_half / den ** (2 / q))


def stringy_twopoint_large_t(
    t: float, betaJ: float, g_over_N: float, q: int = 4, J: float = 1.0, alpha_mode: str = "real"
) -> complex:
    """Large ``alpha t`` form with ``z~ = (z/4) e^{-i alpha beta/2}``."""
    beta = betaJ / J
    alpha, g_half, z = _stringy_pieces(betaJ, g_over_N, q, J, alpha_mode)
    z_tilde = z / 4 * np.exp(-1j * alpha * beta / 2)
    den = 1 - z_tilde * np.exp(2 * alpha * t)
    _check_pole(den, t)
    return complex(np.exp(1j * g_over_N) * g_half / den ** (2 / q))


# ---------------------------------------------------------------------------
# probe-particle formulas


def probe_a_plus(g: float, G_N: float, t: float, Delta: float, v: float = 1.0) -> float:
    """``a^+ = -Delta g G_N e^{v t} / 2^{2 Delta + 1}``."""
    return float(-Delta * g * G_N * np.exp(v * t) / 2 ** (2 * Delta + 1))


def probe_correlator(a_plus: complex, Delta: float) -> complex:
    """``(2 + a^+/2)^{-2 Delta}``."""
    if Delta <= 0:
        raise MalformedInputError("Delta must be positive")
    return complex((2 + a_plus / 2) ** (-2 * Delta))


def probe_validity_ratio(t: float, G_N: float, Delta: float, q: int, g_hat: float) -> float:
    """``Delta g_hat G_N e^t / g_hat^{1/2 + q/4}``; the probe formulas need it small.

    ``g_hat`` is not derived here and must be supplied by the caller.
    """
    if not g_hat > 0:
        raise MalformedInputError("g_hat must be positive")
    return float(Delta * G_N * np.exp(t) * g_hat ** (0.5 - q / 4))


def stringy_probe_closed_form(t: float, v: float, g: float, G_N: float, Delta: float) -> complex:
    """``(2 + a^+ e^{i pi (1 - v)/2} / 2)^{-2 Delta}`` with ``a^+`` at exponent ``v t``."""
    a = probe_a_plus(g, G_N, t, Delta, v)
    return probe_correlator(a * np.exp(1j * np.pi * (1 - v) / 2), Delta)


def _wavefunction_integral(a: complex, Delta: float) -> complex:
    # int dp psi*psi(p) e^{-i a p} with psi*psi = (2ip)^{2D} e^{-4ip} / (Gamma(2D) (-p)), p = -u
    prefactor = 2 ** (2 * Delta) * np.exp(-1j * np.pi * Delta) / np.exp(loggamma(2 * Delta)).real
    return complex(prefactor * power_fourier_integral(2 * Delta - 1, 4 + a))


def _mean_momentum(Delta: float) -> complex:
    # <q> = int dq q psi*psi(q); the u^{2D} moment is reduced by parts to the u^{2D-1} one
    prefactor = 2 ** (2 * Delta) * np.exp(-1j * np.pi * Delta) / np.exp(loggamma(2 * Delta)).real
    base = power_fourier_integral(2 * Delta - 1, 4.0 + 0j)
    moment = -(2 * Delta) / (4j) * base
    return complex(-prefactor * moment)


def stringy_probe_integral(t: float, v: float, g: float, G_N: float, Delta: float) -> complex:
    """Stringy probe correlator by quadrature over the null momenta.

    ``C = int dp psi*psi(p) exp[-i g G_N p e^{v(t - i pi/2)} <q>]`` with the
    conformal wavefunctions and the stringy measure ``p -> p^v``.  Valid for
    ``0 < Delta < 1/2`` where the wavefunction integrals converge at the
    origin without further subtraction.
    """
    if not 0 < Delta < 0.5:
        raise MalformedInputError("quadrature requires 0 < Delta < 1/2")
    if not 0 < v <= 1:
        raise MalformedInputError("v must lie in (0, 1]")
    a = g * G_N * np.exp(v * (t - 1j * np.pi / 2)) * _mean_momentum(Delta)
    return _wavefunction_integral(a, Delta)
