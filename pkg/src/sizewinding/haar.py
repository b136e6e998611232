"""Permutations, Moebius and Weingarten weights, and Haar moments.

Permutations act on tensor slots.  ``R_sigma`` satisfies

    Tr[(A_1 (x) ... (x) A_r) R_sigma] = prod over cycles (k, sigma(k), ...) of
                                        tr(A_k A_sigma(k) A_sigma^2(k) ...),

and the Haar twirl is the Hilbert-Schmidt projection onto span{R_tau}:

    E[Tr(U^r A U^{dag r} B)] = sum_{sigma,tau} Wg(sigma^{-1} tau, d)
                               Tr[A R_{sigma^{-1}}] Tr[B R_tau].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import MalformedInputError

__all__ = [
    "Permutation",
    "catalan",
    "mobius",
    "wg_leading",
    "distance",
    "trace_with_permutation",
    "haar_moment",
    "haar_moment_mc",
    "haar_unitary",
    "MAX_MOMENT_DEGREE",
]

MAX_MOMENT_DEGREE = 4
MAX_MOBIUS_DEGREE = 6


@dataclass(frozen=True, slots=True)
class Permutation:
    """A permutation of ``{0, ..., r-1}`` in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise MalformedInputError(f"{imgs} is not a permutation")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, r: int) -> Permutation:
        return cls(tuple(range(r)))

    @classmethod
    def from_cycles(cls, r: int, cycles: Sequence[Sequence[int]]) -> Permutation:
        imgs = list(range(r))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                imgs[a] = b
        return cls(tuple(imgs))

    @property
    def r(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k]

    def compose(self, other: Permutation) -> Permutation:
        """``(self * other)(k) = self(other(k))``."""
        return Permutation(tuple(self.images[i] for i in other.images))

    __mul__ = compose

    def inverse(self) -> Permutation:
        inv = [0] * self.r
        for k, img in enumerate(self.images):
            inv[img] = k
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.r
        out = []
        for start in range(self.r):
            if seen[start]:
                continue
            cyc = []
            k = start
            while not seen[k]:
                seen[k] = True
                cyc.append(k)
                k = self.images[k]
            out.append(tuple(cyc))
        return out

    @property
    def num_cycles(self) -> int:
        return len(self.cycles())

    @property
    def length(self) -> int:
        """Minimum number of transpositions, ``r - num_cycles``."""
        return self.r - self.num_cycles


def all_permutations(r: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(r))]


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def distance(a: Permutation, b: Permutation) -> int:
    """Cayley distance ``|a b^{-1}|``."""
    return a.compose(b.inverse()).length


def mobius(pi: Permutation) -> int:
    """Moebius function ``(-1)^{|pi|} prod_i c_{|C_i| - 1}`` over cycles."""
    if pi.r > MAX_MOBIUS_DEGREE:
        raise MalformedInputError(f"degree {pi.r} exceeds {MAX_MOBIUS_DEGREE}")
    sign = -1 if pi.length % 2 else 1
    prod = 1
    for cyc in pi.cycles():
        prod *= catalan(len(cyc) - 1)
    return sign * prod


def wg_leading(pi: Permutation, d: int) -> float:
    """Leading large-``d`` Weingarten weight ``Moeb(pi) / d^{r + |pi|}``."""
    return mobius(pi) / float(d) ** (pi.r + pi.length)


def _wg_exact_r2(pi: Permutation, d: int) -> float:
    if pi.length == 0:
        return 1.0 / (d * d - 1.0)
    return -1.0 / (d * (d * d - 1.0))


def trace_with_permutation(slots: Sequence[np.ndarray], pi: Permutation) -> complex:
    """``Tr[(A_1 (x) ... (x) A_r) R_pi]`` from cycle traces."""
    total = 1.0 + 0j
    for cyc in pi.cycles():
        prod = slots[cyc[0]]
        for k in cyc[1:]:
            prod = prod @ slots[k]
        total *= np.trace(prod)
    return complex(total)


@lru_cache(maxsize=None)
def _perm_table(r: int) -> tuple[Permutation, ...]:
    return tuple(all_permutations(r))


def haar_moment(a_slots: Sequence[np.ndarray], b_slots: Sequence[np.ndarray], r: int, d: int) -> complex:
    """Haar average ``E[Tr(U^{(x)r} A U^{dag (x)r} B)]``.

    Parameters
    ----------
    a_slots, b_slots : sequence of (d, d) arrays
        Tensor factors of ``A`` and ``B``, one per slot.
    r : int
        Number of tensor copies, at most 4.
    d : int
        Local dimension.

    Returns
    -------
    complex
        Exact for ``r <= 2``; leading order in ``1/d`` for ``r = 3, 4``.
    """
    if r < 1 or r > MAX_MOMENT_DEGREE:
        raise MalformedInputError(f"moment degree {r} outside [1, {MAX_MOMENT_DEGREE}]")
    if len(a_slots) != r or len(b_slots) != r:
        raise MalformedInputError("need exactly r tensor factors for A and B")
    for m in itertools.chain(a_slots, b_slots):
        if np.shape(m) != (d, d):
            raise MalformedInputError("tensor factors must be d x d")
    if r == 1:
        return complex(np.trace(a_slots[0]) * np.trace(b_slots[0]) / d)
    perms = _perm_table(r)
    tr_a = {s: trace_with_permutation(a_slots, s.inverse()) for s in perms}
    tr_b = {t: trace_with_permutation(b_slots, t) for t in perms}
    weight = _wg_exact_r2 if r == 2 else wg_leading
    total = 0j
    for s in perms:
        s_inv = s.inverse()
        for t in perms:
            total += weight(s_inv.compose(t), d) * tr_a[s] * tr_b[t]
    return complex(total)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    return unitary_group.rvs(d, random_state=rng)


def haar_moment_mc(
    a_slots: Sequence[np.ndarray], b_slots: Sequence[np.ndarray], d: int, samples: int, rng: np.random.Generator
) -> tuple[complex, complex]:
    """Monte-Carlo estimate of :func:`haar_moment` with its standard error.

    Uses ``Tr(U^{(x)r} A U^{dag (x)r} B) = prod_k tr(U A_k U^dag B_k)`` for
    product operators.
    """
    vals = np.empty(samples, dtype=complex)
    for s in range(samples):
        u = haar_unitary(d, rng)
        ud = u.conj().T
        v = 1.0 + 0j
        for a, b in zip(a_slots, b_slots):
            v *= np.trace(u @ a @ ud @ b)
        vals[s] = v
    mean = vals.mean()
    err = complex(vals.real.std(ddof=1), vals.imag.std(ddof=1)) / np.sqrt(samples)
    return complex(mean), err
