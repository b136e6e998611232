"""Exact n-qubit Pauli (Weyl) operators in the symplectic representation.

A Pauli string is stored as a pair of packed bit masks ``(p, q)`` and a
phase exponent ``k`` so that the operator equals ``i**k * P_v`` with

    P_v = i^{-p.q} Z^{p_1} X^{q_1} (x) ... (x) Z^{p_n} X^{q_n}.

Every ``P_v`` with ``p, q`` in {0, 1} is Hermitian and is one of I, X, Y, Z on
each site (``Z X = iY`` so ``i^{-1} Z X = Y``).

Bit ``n - 1 - j`` of a mask refers to qubit ``j``.  Qubit 0 is therefore the
leftmost tensor factor and the most significant bit of a computational basis
index, which lets a mask act directly on basis indices: ``Z^p |a> =
(-1)^{popcount(p & a)} |a>`` and ``X^q |a> = |a ^ q>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, MalformedInputError, ResourceLimitError

__all__ = [
    "DENSE_QUBIT_LIMIT",
    "PauliString",
    "canonicalize",
    "multiply",
    "commutes",
    "transpose_sign",
    "size",
    "xy_weight",
    "y_conjugation_sign",
    "dense",
    "all_paulis",
    "random_pauli",
    "symplectic_form",
    "check_against_dense",
]

DENSE_QUBIT_LIMIT = 12

_LETTERS = "IZXY"  # index = p + 2 q on a single site


def _popcount(x: int) -> int:
    return int(x).bit_count()


@dataclass(frozen=True, slots=True)
class PauliString:
    """An n-qubit Pauli operator ``i**phase_exp * P_v``.

    Parameters
    ----------
    n : int
        Number of qubits.
    p, q : int
        Packed Z-part and X-part bit masks (bit ``n-1-j`` is qubit ``j``).
    phase_exp : int
        Power of ``i`` multiplying the Hermitian Weyl operator, reduced mod 4.
    """

    n: int
    p: int
    q: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise MalformedInputError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.p & ~full or self.q & ~full or self.p < 0 or self.q < 0:
            raise MalformedInputError("bit masks exceed the qubit count")
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % 4)

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str, phase_exp: int = 0) -> PauliString:
        """Build from a string such as ``"XIZY"`` (qubit 0 first)."""
        n = len(label)
        p = q = 0
        for j, ch in enumerate(label.upper()):
            if ch not in _LETTERS:
                raise MalformedInputError(f"unknown Pauli letter {ch!r}")
            code = _LETTERS.index(ch)
            bit = 1 << (n - 1 - j)
            if code & 1:
                p |= bit
            if code & 2:
                q |= bit
        return cls(n, p, q, phase_exp)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> PauliString:
        """A single-site Pauli ``letter`` on qubit ``site``."""
        if not 0 <= site < n:
            raise MalformedInputError("site out of range")
        chars = ["I"] * n
        chars[site] = letter
        return cls.from_label("".join(chars))

    @classmethod
    def from_bits(cls, p_bits: Sequence[int], q_bits: Sequence[int], phase_exp: int = 0) -> PauliString:
        """Build from explicit 0/1 sequences of length n."""
        return canonicalize(np.concatenate([np.asarray(p_bits), np.asarray(q_bits)])).with_phase(phase_exp)

    # views ------------------------------------------------------------
    def with_phase(self, extra: int) -> PauliString:
        return PauliString(self.n, self.p, self.q, self.phase_exp + extra)

    def hermitian_part(self) -> PauliString:
        """The same string with phase exponent 0."""
        return PauliString(self.n, self.p, self.q, 0)

    def bits(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(p, q)`` as 0/1 integer arrays indexed by qubit."""
        shifts = np.arange(self.n - 1, -1, -1)
        return (self.p >> shifts) & 1, (self.q >> shifts) & 1

    def to_vector(self) -> np.ndarray:
        p, q = self.bits()
        return np.concatenate([p, q]).astype(np.int64)

    @property
    def label(self) -> str:
        p, q = self.bits()
        return "".join(_LETTERS[a + 2 * b] for a, b in zip(p, q))

    @property
    def index(self) -> int:
        """Dense index ``(p << n) | q`` in the ``4**n`` enumeration."""
        return (self.p << self.n) | self.q

    def __str__(self) -> str:
        return f"i^{self.phase_exp} · {self.label}"

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def inverse(self) -> PauliString:
        # P_v is an involution, so (i^k P)^{-1} = i^{-k} P
        return PauliString(self.n, self.p, self.q, -self.phase_exp)

    def to_dense(self) -> np.ndarray:
        return dense(self)


def symplectic_form(a: PauliString, b: PauliString) -> int:
    """Integer symplectic product ``p_a.q_b - q_a.p_b`` (not reduced)."""
    return _popcount(a.p & b.q) - _popcount(a.q & b.p)


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def canonicalize(v) -> PauliString:
    """Reduce an integer vector ``(p, q)`` to a canonical Pauli string.

    Writing ``v = r + 2 w`` with ``r`` in {0, 1}, the operator satisfies
    ``P_v = (-1)^{[r, w]} P_r``; the sign is absorbed into ``phase_exp``.

    Parameters
    ----------
    v : array_like of int, length 2n
        Z-exponents followed by X-exponents; any integer residues allowed.

    Returns
    -------
    PauliString
    """
    arr = np.asarray(v)
    if arr.ndim != 1 or arr.size % 2:
        raise MalformedInputError("vector length must be even")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise MalformedInputError("vector entries must be integers")
        arr = arr.astype(np.int64)
    n = arr.size // 2
    pv, qv = arr[:n].astype(np.int64), arr[n:].astype(np.int64)
    pr, qr = np.mod(pv, 2), np.mod(qv, 2)
    pw, qw = (pv - pr) // 2, (qv - qr) // 2
    form = int(pr @ qw - qr @ pw)
    weights = 1 << np.arange(n - 1, -1, -1, dtype=object) if n else np.zeros(0, dtype=object)
    p = int(np.sum(pr.astype(object) * weights)) if n else 0
    q = int(np.sum(qr.astype(object) * weights)) if n else 0
    return PauliString(n, p, q, 2 * (form % 2))


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a @ b`` with the phase tracked modulo 4."""
    _check_same_n(a, b)
    # P_v P_w = i^{[v,w]} P_{v+w}; v + w has entries in {0,1,2}
    phase = a.phase_exp + b.phase_exp + symplectic_form(a, b)
    rp, rq = a.p ^ b.p, a.q ^ b.q
    cp, cq = a.p & b.p, a.q & b.q
    phase += 2 * (_popcount(rp & cq) - _popcount(rq & cp))
    return PauliString(a.n, rp, rq, phase)


def commutes(a: PauliString, b: PauliString) -> int:
    """Return 0 if ``a`` and ``b`` commute and 1 if they anticommute."""
    _check_same_n(a, b)
    return (_popcount(a.p & b.q) + _popcount(a.q & b.p)) & 1


def transpose_sign(a: PauliString) -> int:
    """Sign ``s`` with ``a.T == s * a``; only Y factors flip."""
    return -1 if _popcount(a.p & a.q) & 1 else 1


def size(a: PauliString) -> int:
    """Number of qubits on which ``a`` acts non-trivially."""
    return _popcount(a.p | a.q)


def xy_weight(a: PauliString, mask: int | None = None) -> int:
    """Number of X or Y factors, optionally restricted to a site mask."""
    w = a.q if mask is None else a.q & mask
    return _popcount(w)


def y_conjugation_sign(a: PauliString) -> int:
    """Sign ``s`` with ``Y^n a.T Y^n == s * a``, equal to ``(-1)**size(a)``."""
    return -1 if size(a) & 1 else 1


def dense(a: PauliString, limit: int = DENSE_QUBIT_LIMIT) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of ``a``."""
    if a.n > limit:
        raise ResourceLimitError(f"{a.n} qubits exceeds the dense limit of {limit}")
    d = 1 << a.n
    rows = np.arange(d, dtype=np.int64)
    cols = rows ^ a.q
    signs = 1 - 2 * (np.bitwise_count(rows & a.p).astype(np.int64) & 1)
    # (Z^p X^q)_{a, a^q} = (-1)^{p.a}
    phase = 1j ** ((a.phase_exp - _popcount(a.p & a.q)) % 4)
    out = np.zeros((d, d), dtype=complex)
    out[rows, cols] = phase * signs
    return out


def all_paulis(n: int) -> Iterator[PauliString]:
    """All ``4**n`` Hermitian Pauli strings, ordered by :attr:`PauliString.index`."""
    for p in range(1 << n):
        for q in range(1 << n):
            yield PauliString(n, p, q, 0)


def random_pauli(n: int, rng: np.random.Generator, with_phase: bool = False) -> PauliString:
    p = int(rng.integers(0, 1 << n)) if n else 0
    q = int(rng.integers(0, 1 << n)) if n else 0
    k = int(rng.integers(0, 4)) if with_phase else 0
    return PauliString(n, p, q, k)


def check_against_dense(n: int, samples: int | None = None, seed: int = 0) -> dict[str, tuple[int, int]]:
    """Compare the symbolic rules with dense matrices.

    Runs over all pairs of Hermitian strings when ``samples`` is None,
    otherwise over ``samples`` random pairs with random phases.  Returns
    ``{check: (cases, failures)}`` for the group law, commutation, transpose
    and Y-conjugation rules.
    """
    from .rng import stream

    if n < 0 or (samples is not None and samples < 0):
        raise MalformedInputError("n and samples must be non-negative")
    if samples is None:
        everything = list(all_paulis(n))
        pairs: Iterator = ((a, b) for a in everything for b in everything)
    else:
        rng = stream(seed, n)
        pairs = ((random_pauli(n, rng, True), random_pauli(n, rng, True)) for _ in range(samples))
    y_all = dense(PauliString(n, (1 << n) - 1, (1 << n) - 1, 0))
    counts = {"group_law": [0, 0], "commutation": [0, 0], "transpose": [0, 0], "y_conjugation": [0, 0]}

    def record(name: str, ok: bool) -> None:
        counts[name][0] += 1
        counts[name][1] += not ok

    seen: set[tuple[int, int, int]] = set()
    for a, b in pairs:
        da, db = dense(a), dense(b)
        record("group_law", np.allclose(dense(multiply(a, b)), da @ db, atol=1e-12))
        sign = -1 if commutes(a, b) else 1
        record("commutation", np.allclose(da @ db, sign * db @ da, atol=1e-12))
        key = (a.p, a.q, a.phase_exp % 4)
        if key not in seen:
            seen.add(key)
            hermitian = a.hermitian_part()
            dh = dense(hermitian)
            record("transpose", np.allclose(dh.T, transpose_sign(hermitian) * dh, atol=1e-12))
            record("y_conjugation", np.allclose(y_all @ dh.T @ y_all, y_conjugation_sign(hermitian) * dh, atol=1e-12))
    return {k: (v[0], v[1]) for k, v in counts.items()}
