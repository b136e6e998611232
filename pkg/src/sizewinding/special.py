"""Semicircle transform ``f(z) = 2 I_1(z) / z`` and related helpers.

``f(z)`` is the normalized trace ``E[Tr e^{zH}] / d`` of a random matrix whose
spectrum follows the semicircle law on [-1, 1].
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate, special

from .errors import SaturationError, SolverError

__all__ = [
    "f_semicircle",
    "semicircle_density",
    "f_semicircle_quadrature",
    "power_fourier_integral",
    "REAL_PART_BOUND",
]

# exp(700) is close to the largest finite double
REAL_PART_BOUND = 700.0


def f_semicircle(z, bound: float = REAL_PART_BOUND):
    """Laplace transform of the unit semicircle law, ``2 I_1(z) / z``.

    Parameters
    ----------
    z : complex or array_like
        Argument; any finite complex number.
    bound : float
        Largest allowed ``|Re z|``.

    Returns
    -------
    complex or ndarray
        ``f(z)``, with ``f(0) = 1``.

    Raises
    ------
    SaturationError
        If ``|Re z|`` exceeds ``bound``.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz.real) > bound):
        raise SaturationError(f"|Re z| exceeds {bound}")
    small = np.abs(zz) < 1e-6
    safe = np.where(small, 1.0, zz)
    # ive(1, z) = I_1(z) exp(-|Re z|)
    out = 2.0 * special.ive(1, safe) * np.exp(np.abs(safe.real)) / safe
    series = 1.0 + zz**2 / 8.0 + zz**4 / 192.0
    out = np.where(small, series, out)
    # f is even with real Taylor coefficients: real on both axes
    on_axis = (zz.real == 0) | (zz.imag == 0)
    out = np.where(on_axis, out.real + 0j, out)
    if np.ndim(z) == 0:
        return complex(out)
    return out


def semicircle_density(energy):
    """Density ``(2/pi) sqrt(1 - E^2)`` on [-1, 1]."""
    e = np.asarray(energy, dtype=float)
    return np.where(np.abs(e) <= 1, (2 / np.pi) * np.sqrt(np.clip(1 - e**2, 0, None)), 0.0)


def f_semicircle_quadrature(z: complex) -> complex:
    """Independent evaluation of ``f(z)`` by quadrature over the semicircle.

    Uses ``E = cos(theta)`` so the integrand is smooth:
    ``f(z) = (2/pi) int_0^pi sin^2(theta) exp(z cos theta) d theta``.
    """
    z = complex(z)

    def part(fn):
        val, _ = integrate.quad(
            lambda th: fn(np.sin(th) ** 2 * np.exp(z * np.cos(th))), 0.0, np.pi, limit=400, epsabs=0, epsrel=1e-12
        )
        return val

    return (2 / np.pi) * complex(part(np.real), part(np.imag))


def power_fourier_integral(power: float, c: complex) -> complex:
    """``int_0^inf u^power e^{i c u} du`` for ``power > -1``.

    Defined for ``c`` off the non-positive real axis by analytic
    continuation.  The contour is rotated to ``u = e^{i theta} s`` with
    ``arg(c e^{i theta}) = pi/4`` so that the integrand both oscillates and
    decays; the oscillation is handled by Fourier-weighted quadrature on
    ``[1, inf)`` and the endpoint singularity by algebraic-weight quadrature
    on ``[0, 1]``.
    """
    c = complex(c)
    if power <= -1:
        raise SolverError("integral diverges at the origin for power <= -1")
    if c.imag == 0 and c.real <= 0:
        raise SolverError("frequency on the non-positive real axis: the integral has a pole or branch cut")
    theta = np.pi / 4 - np.angle(c)
    omega = kappa = abs(c) / np.sqrt(2)

    def amp(u):
        return np.exp(-kappa * u)

    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
    head_re = integrate.quad(lambda u: amp(u) * np.cos(omega * u), 0, 1, weight="alg", wvar=(power, 0), **opts)[0]
    head_im = integrate.quad(lambda u: amp(u) * np.sin(omega * u), 0, 1, weight="alg", wvar=(power, 0), **opts)[0]
    tail = dict(limlst=200, limit=400, epsabs=1e-14)
    # QAWF flags cycles where the tiny absolute target is unreachable; judge by the error estimate instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail_re, err_re = integrate.quad(lambda u: amp(u) * u**power, 1, np.inf, weight="cos", wvar=omega, **tail)
        tail_im, err_im = integrate.quad(lambda u: amp(u) * u**power, 1, np.inf, weight="sin", wvar=omega, **tail)
    scale = abs(complex(head_re + tail_re, head_im + tail_im))
    if max(err_re, err_im) > 1e-8 * max(scale, 1e-300):
        raise SolverError(f"oscillatory tail did not converge (error estimate {max(err_re, err_im):.2g})")
    return complex(np.exp(1j * (power + 1) * theta) * complex(head_re + tail_re, head_im + tail_im))
