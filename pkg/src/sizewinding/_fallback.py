"""Pure numpy implementations of the hot kernels.

These are used when the compiled extension is unavailable and serve as the
reference for it.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def fwht(x: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis (copy)."""
    y = np.array(x, dtype=complex, copy=True)
    d = y.shape[-1]
    lead = y.shape[:-1]
    h = 1
    while h < d:
        y = y.reshape(lead + (d // (2 * h), 2, h))
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] += b
        y[..., 1, :] = a - b
        y = y.reshape(lead + (d,))
        h *= 2
    return y


def pauli_coefficients(x: np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``c`` with ``x = 2^{-n/2} sum c_P P``, index ``(p << n) | q``."""
    d = 1 << n
    a = np.arange(d, dtype=np.int64)
    q = a[:, None]
    # gathered[q, a] = x[a ^ q, a]
    gathered = x[a[None, :] ^ q, a[None, :]]
    spectrum = fwht(gathered)  # [q, p] = sum_a (-1)^{p.a} x[a^q, a]
    coeff = spectrum.T  # [p, q]
    pq = np.bitwise_count(a[:, None] & a[None, :]).astype(np.int64) % 4
    coeff = coeff * (1j ** ((-pq) % 4))
    return coeff.reshape(-1) / np.sqrt(d)


def matrix_from_pauli_coefficients(c: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pauli_coefficients`."""
    d = 1 << n
    a = np.arange(d, dtype=np.int64)
    coeff = np.asarray(c, dtype=complex).reshape(d, d)  # [p, q]
    pq = np.bitwise_count(a[:, None] & a[None, :]).astype(np.int64) % 4
    coeff = coeff * (1j ** ((-pq) % 4))  # P = i^{-p.q} Z^p X^q
    # sum_p coeff[p, q] (-1)^{p.r} for each row r
    summed = fwht(coeff.T)  # [q, r]
    out = np.zeros((d, d), dtype=complex)
    rows = a[None, :]
    out[rows, rows ^ a[:, None]] = summed
    return out / np.sqrt(d)


def master_rhs(q: np.ndarray, n: int) -> np.ndarray:
    """Size-resolved Brownian master equation right-hand side."""
    q = np.asarray(q, dtype=float)
    ell = np.arange(n + 1, dtype=float)
    out = -((3 * ell * (n - ell) + ell * (ell - 1)) / n) * q
    out[1:] += (3 * ell[:-1] * (n - ell[:-1]) / n) * q[:-1]
    out[:-1] += (ell[1:] * (ell[1:] - 1) / n) * q[1:]
    return out


def rk4_integrate(q0: np.ndarray, n: int, step_counts: np.ndarray, step_sizes: np.ndarray) -> np.ndarray:
    """Classic RK4 over consecutive segments; returns the state after each."""
    q = np.array(q0, dtype=float, copy=True)
    out = np.empty((len(step_counts), n + 1))
    for seg, (steps, h) in enumerate(zip(step_counts, step_sizes)):
        for _ in range(int(steps)):
            k1 = master_rhs(q, n)
            k2 = master_rhs(q + 0.5 * h * k1, n)
            k3 = master_rhs(q + 0.5 * h * k2, n)
            k4 = master_rhs(q + h * k3, n)
            q = q + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[seg] = q
    return out


def pauli_jump_sizes(
    start_p: int,
    start_q: int,
    n: int,
    choices: np.ndarray,
    offsets: np.ndarray,
    checkpoints: np.ndarray,
) -> np.ndarray:
    """Apply uniformized 2-local Pauli jumps and record sizes at checkpoints.

    ``choices[offsets[i]:offsets[i+1]]`` are the proposed jumps of trial ``i``
    encoded as ``9 * pair + (3 * (a - 1) + (b - 1))`` with letters ``a, b`` in
    {1: Z, 2: X, 3: Y}.  A proposal is applied only if it anticommutes with
    the current string.  ``checkpoints[i, k]`` is the number of proposals made
    before checkpoint ``k``.
    """
    trials, ncheck = checkpoints.shape
    pairs_i, pairs_j = np.triu_indices(n, 1)
    bit_i = (1 << (n - 1 - pairs_i)).astype(np.int64)
    bit_j = (1 << (n - 1 - pairs_j)).astype(np.int64)
    up = np.full(trials, start_p, dtype=np.int64)
    uq = np.full(trials, start_q, dtype=np.int64)
    sizes = np.empty((trials, ncheck), dtype=np.int64)
    done = np.zeros(trials, dtype=np.int64)
    letter_p = np.array([0, 1, 0, 1], dtype=np.int64)  # I, Z, X, Y
    letter_q = np.array([0, 0, 1, 1], dtype=np.int64)
    for k in range(ncheck):
        target = checkpoints[:, k]
        while True:
            active = np.flatnonzero(done < target)
            if active.size == 0:
                break
            e = choices[offsets[active] + done[active]]
            pair, code = e // 9, e % 9
            a, b = code // 3 + 1, code % 3 + 1
            bi, bj = bit_i[pair], bit_j[pair]
            vp = np.where(letter_p[a] == 1, bi, 0) | np.where(letter_p[b] == 1, bj, 0)
            vq = np.where(letter_q[a] == 1, bi, 0) | np.where(letter_q[b] == 1, bj, 0)
            par = (np.bitwise_count(up[active] & vq) + np.bitwise_count(uq[active] & vp)) & 1
            flip = par.astype(bool)
            idx = active[flip]
            up[idx] ^= vp[flip]
            uq[idx] ^= vq[flip]
            done[active] += 1
        sizes[:, k] = np.bitwise_count(up | uq)
    return sizes
