"""Brickwork random circuits on an open chain.

Layer ``s`` applies independent Haar-random two-qubit gates on the pairs
``(j, j + 1)`` with ``j = s mod 2``.  An operator front therefore moves one
site per layer in each direction (``v_B = 1``), and a Pauli started on one
site fills a light cone of ``2 t + 1`` sites after ``t`` layers (clipped at
the chain ends).

At infinite temperature a random string inside a light cone of ``L`` sites
has size about ``3L/4`` and X/Y weight about ``L/2``.  The coupling
``V = (1/n) sum_j Z_j^L Z_j^R`` then imprints the phase ``e^{-2igw/n}``, so
choosing ``g L / n = pi`` aligns the phases of all growing operators.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MalformedInputError, ResourceLimitError
from .exact_sim import CouplingSpec, coupling_phases, transfer_channel_from_unitaries
from .haar import haar_unitary
from .rng import stream
from .winding import WindingDistribution

__all__ = [
    "BrickworkSpec",
    "BrickworkCircuit",
    "ChainTransferResult",
    "SeparationWarning",
    "V_BUTTERFLY",
    "lightcone_size_prediction",
    "predicted_twopoint",
    "lightcone_sites",
    "phase_matched_coupling",
    "simulate_chain_transfer",
    "empirical_size_distribution",
    "CHAIN_TRANSFER_QUBIT_LIMIT",
    "SIZE_DISTRIBUTION_QUBIT_LIMIT",
]

V_BUTTERFLY = 1.0
CHAIN_TRANSFER_QUBIT_LIMIT = 11
SIZE_DISTRIBUTION_QUBIT_LIMIT = 12


class SeparationWarning(UserWarning):
    """Message light cones overlap, so transfer fidelity degrades."""


@dataclass(frozen=True)
class BrickworkSpec:
    """Brickwork circuit ensemble.

    Attributes
    ----------
    n : int
        Number of sites.
    depth : int
        Number of layers.
    seed : int
        Master seed; circuit ``i`` uses stream ``(seed, i)``.
    samples : int
        Number of independent circuits averaged over.
    """

    n: int
    depth: int
    seed: int = 0
    samples: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise MalformedInputError("a brickwork chain needs at least two sites")
        if self.depth < 0:
            raise MalformedInputError("depth must be non-negative")
        if self.samples < 1:
            raise MalformedInputError("need at least one sample")

    @property
    def v_b(self) -> float:
        return V_BUTTERFLY


def _layer_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    return [(j, j + 1) for j in range(layer % 2, n - 1, 2)]


@dataclass
class BrickworkCircuit:
    """One sampled circuit: a list of ``(site, 4x4 gate)`` in time order."""

    n: int
    gates: list[tuple[int, np.ndarray]]

    @classmethod
    def sample(cls, spec: BrickworkSpec, index: int = 0, depth: int | None = None) -> BrickworkCircuit:
        rng = stream(spec.seed, index)
        depth = spec.depth if depth is None else depth
        gates = []
        for layer in range(depth):
            for a, _ in _layer_pairs(spec.n, layer):
                gates.append((a, haar_unitary(4, rng)))
        return cls(spec.n, gates)


# ---------------------------------------------------------------------------
# gate application on two-sided state matrices


def _apply_left(x: np.ndarray, gate: np.ndarray, site: int, n: int) -> np.ndarray:
    """``G_{site,site+1}`` acting on the row (left) index of ``x[..., d, d]``."""
    d = 1 << n
    lead = x.shape[:-2]
    t = x.reshape(lead + (1 << site, 4, (d >> (site + 2)) * d))
    return np.matmul(gate, t).reshape(x.shape)


def _apply_right(x: np.ndarray, gate: np.ndarray, site: int, n: int) -> np.ndarray:
    """``G_{site,site+1}`` acting on the column (right) index of ``x[..., d, d]``."""
    d = 1 << n
    lead = x.shape[:-2]
    t = x.reshape(lead + (d << site, 4, d >> (site + 2)))
    return np.matmul(gate, t).reshape(x.shape)


def _left_map(circuit: BrickworkCircuit, inverse: bool):
    gates = circuit.gates[::-1] if inverse else circuit.gates
    n = circuit.n

    def apply(x: np.ndarray) -> np.ndarray:
        for site, g in gates:
            x = _apply_left(x, g.conj().T if inverse else g, site, n)
        return x

    return apply


def _right_transpose_map(circuit: BrickworkCircuit):
    # right-side evolution by W^T = G_1^T ... G_L^T: last gate acts first
    n = circuit.n

    def apply(x: np.ndarray) -> np.ndarray:
        for site, g in circuit.gates[::-1]:
            x = _apply_right(x, g.T, site, n)
        return x

    return apply


# ---------------------------------------------------------------------------
# light-cone predictions


def lightcone_sites(n: int, sites: Sequence[int], depth: int) -> frozenset[int]:
    """Exact causal support of an operator on ``sites`` after ``depth`` layers."""
    support = set(int(s) for s in sites)
    if any(s < 0 or s >= n for s in support):
        raise MalformedInputError("site outside the chain")
    for layer in range(depth):
        for a, b in _layer_pairs(n, layer):
            if a in support or b in support:
                support.update((a, b))
    return frozenset(support)


def lightcone_size_prediction(l0: int, v_b: float, t: float, n: int | None = None) -> WindingDistribution:
    """Delta distribution at ``l = (3/2) l0 v_B t`` (rounded to a size bin).

    Valid when ``v_B t >> 1`` and the light cones of the ``l0`` factors do not
    overlap or hit the chain ends.
    """
    if l0 < 0 or v_b <= 0 or t < 0:
        raise MalformedInputError("need l0 >= 0, v_B > 0 and t >= 0")
    centre = 1.5 * l0 * v_b * t if l0 else 0.0
    size = int(round(centre)) if t > 0 else l0
    n = max(size, l0) if n is None else n
    if size > n:
        raise MalformedInputError("predicted size exceeds the chain length")
    q = np.zeros(n + 1)
    q[size] = 1.0
    meta = {"predicted_size": centre, "regime_ok": bool(v_b * t >= 3)}
    return WindingDistribution(n=n, q=q.astype(complex), p=q, meta=meta)


def predicted_twopoint(l0: int, g: float, n: int, v_b: float, t: float) -> complex:
    """Dressed two-point prediction ``exp(-i l0 (g/n) 2 v_B t)``."""
    return complex(np.exp(-1j * l0 * (g / n) * 2 * v_b * t))


def phase_matched_coupling(n: int, cone_size: float, charge: float = np.pi) -> float:
    """Coupling ``g`` with total light-cone charge ``g L / n`` equal to ``charge``."""
    if cone_size <= 0:
        raise MalformedInputError("light cone must contain at least one site")
    return float(charge * n / cone_size)


# ---------------------------------------------------------------------------
# state transfer


@dataclass
class ChainTransferResult:
    """Per-message output of :func:`simulate_chain_transfer`.

    Attributes
    ----------
    fidelities : ndarray
        Y-corrected entanglement fidelity of each message qubit, averaged
        over circuit samples.
    standard_errors : ndarray
        Sample standard error (zero for a single sample).
    lam : ndarray
        Depolarizing parameter of each message channel.
    g : float
        Coupling used.
    message_sites : tuple of int
    cone_sizes : tuple of int
        Light-cone width of each message after ``t`` layers.
    separated : bool
        Whether every pair of messages is farther apart than ``2 v_B t``.
    """

    fidelities: np.ndarray
    standard_errors: np.ndarray
    lam: np.ndarray
    g: float
    message_sites: tuple[int, ...]
    cone_sizes: tuple[int, ...]
    separated: bool
    meta: dict = field(default_factory=dict)

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))


def _spread_sites(n: int, m: int) -> tuple[int, ...]:
    # centres of m equal blocks
    return tuple(int((2 * i + 1) * n // (2 * m)) for i in range(m))


def simulate_chain_transfer(
    spec: BrickworkSpec,
    m: int = 1,
    g: float | None = None,
    t: int | None = None,
    message_sites: Sequence[int] | None = None,
) -> ChainTransferResult:
    """Teleport ``m`` qubits through a brickwork-scrambled TFD at ``beta = 0``.

    The left side runs ``W^dag``, swaps the messages in, runs ``W``; the
    coupling ``e^{igV}`` with ``V = (1/n) sum_j Z_j^L Z_j^R`` is applied and the
    right side runs ``W^T``.  Each message is tomographed with the others
    replaced by maximally mixed inputs.

    Parameters
    ----------
    spec : BrickworkSpec
    m : int
        Number of message qubits.
    g : float, optional
        Coupling; default is the phase-matched value for the first message.
    t : int, optional
        Number of layers, default ``spec.depth``.
    message_sites : sequence of int, optional
        Default spreads the messages evenly over the chain.
    """
    n = spec.n
    if n > CHAIN_TRANSFER_QUBIT_LIMIT:
        raise ResourceLimitError(f"dense chain transfer limited to n <= {CHAIN_TRANSFER_QUBIT_LIMIT}")
    if m < 1:
        raise MalformedInputError("need at least one message")
    depth = spec.depth if t is None else int(t)
    sites = _spread_sites(n, m) if message_sites is None else tuple(int(s) for s in message_sites)
    if len(sites) != m or len(set(sites)) != m or any(s < 0 or s >= n for s in sites):
        raise MalformedInputError("need m distinct message sites inside the chain")
    cones = tuple(len(lightcone_sites(n, [s], depth)) for s in sites)
    separated = all(abs(a - b) > 2 * V_BUTTERFLY * depth for i, a in enumerate(sites) for b in sites[i + 1 :])
    if not separated:
        warnings.warn("message light cones overlap; fidelity will degrade", SeparationWarning, stacklevel=2)
    if g is None:
        g = phase_matched_coupling(n, cones[0])
    phases = coupling_phases(CouplingSpec.all_sites(n), g)
    d = 1 << n
    fids = np.zeros((spec.samples, m))
    lams = np.zeros((spec.samples, m))
    for s in range(spec.samples):
        circuit = BrickworkCircuit.sample(spec, s, depth)
        backward = _left_map(circuit, inverse=True)
        forward = _left_map(circuit, inverse=False)
        right = _right_transpose_map(circuit)
        m0 = np.eye(d, dtype=complex) / np.sqrt(d)
        for i, site in enumerate(sites):
            est = transfer_channel_from_unitaries(
                m0,
                n,
                backward,
                forward,
                right,
                phases,
                message_site=site,
                other_messages=[o for o in sites if o != site],
            )
            fids[s, i] = est.fidelities["entanglement"]
            lams[s, i] = est.lam
    err = fids.std(axis=0, ddof=1) / np.sqrt(spec.samples) if spec.samples > 1 else np.zeros(m)
    return ChainTransferResult(
        fidelities=fids.mean(axis=0),
        standard_errors=err,
        lam=lams.mean(axis=0),
        g=float(g),
        message_sites=sites,
        cone_sizes=cones,
        separated=separated,
        meta={"depth": depth, "samples": spec.samples},
    )


# ---------------------------------------------------------------------------
# size distributions in the Pauli basis

_SINGLE = [
    np.eye(2, dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),  # Z
    np.array([[0, 1], [1, 0]], dtype=complex),  # X
    np.array([[0, -1j], [1j, 0]], dtype=complex),  # Y
]
# letter order I, Z, X, Y matches PauliString labels (code = p + 2q)
_TWO_SITE = [np.kron(a, b) for a in _SINGLE for b in _SINGLE]
_SIZE_OF_LETTER = np.array([0, 1, 1, 1])


def _pauli_transfer_matrix(gate: np.ndarray) -> np.ndarray:
    """Real orthogonal ``R[a, b] = Tr(s_a G s_b G^dag) / 4`` on two sites."""
    conj = [gate @ s @ gate.conj().T for s in _TWO_SITE]
    return np.array([[np.real(np.trace(sa @ cb)) / 4 for cb in conj] for sa in _TWO_SITE])


def _evolve_pauli_vector(vec: np.ndarray, circuit: BrickworkCircuit) -> np.ndarray:
    n = circuit.n
    for site, gate in circuit.gates:
        r = _pauli_transfer_matrix(gate)
        t = vec.reshape(4**site, 16, 4 ** (n - site - 2))
        vec = np.matmul(r, t).reshape(-1)
    return vec


def _size_table(n: int) -> np.ndarray:
    sizes = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        sizes = (sizes[:, None] + _SIZE_OF_LETTER[None, :]).reshape(-1)
    return sizes


def empirical_size_distribution(
    spec: BrickworkSpec, l0: int = 1, t: int | None = None, start: int | None = None
) -> WindingDistribution:
    """Circuit-averaged size distribution of an evolved Pauli at ``beta = 0``.

    The operator ``X`` on ``l0`` consecutive sites beginning at ``start``
    (default: centred) is conjugated by the circuit in the Pauli basis.  At
    infinite temperature the coefficients are real, so ``q = p``.

    The light-cone support of each sample is recorded in ``meta`` together
    with the largest coefficient weight found outside it.
    """
    n = spec.n
    if n > SIZE_DISTRIBUTION_QUBIT_LIMIT:
        raise ResourceLimitError(f"Pauli-basis evolution limited to n <= {SIZE_DISTRIBUTION_QUBIT_LIMIT}")
    if not 1 <= l0 <= n:
        raise MalformedInputError("l0 must lie in [1, n]")
    depth = spec.depth if t is None else int(t)
    first = (n - l0) // 2 if start is None else int(start)
    if first < 0 or first + l0 > n:
        raise MalformedInputError("initial string does not fit in the chain")
    letters = [0] * n
    for j in range(first, first + l0):
        letters[j] = 2  # X
    index = 0
    for c in letters:
        index = 4 * index + c
    cone = lightcone_sites(n, range(first, first + l0), depth)
    outside_mask = np.ones(4**n, dtype=bool)
    outside_sites = [j for j in range(n) if j not in cone]
    site_letter = np.arange(4**n, dtype=np.int64)
    for j in outside_sites:
        outside_mask &= ((site_letter // 4 ** (n - 1 - j)) % 4) == 0
    # outside_mask now marks strings that are identity outside the cone
    sizes = _size_table(n)
    p = np.zeros(n + 1)
    leak = 0.0
    for s in range(spec.samples):
        vec = np.zeros(4**n)
        vec[index] = 1.0
        vec = _evolve_pauli_vector(vec, BrickworkCircuit.sample(spec, s, depth))
        w = vec**2
        leak = max(leak, float(w[~outside_mask].sum()))
        p += np.bincount(sizes, weights=w, minlength=n + 1)
    p /= spec.samples
    meta = {"lightcone": sorted(cone), "weight_outside_lightcone": leak, "depth": depth, "l0": l0}
    return WindingDistribution(n=n, q=p.astype(complex), p=p, meta=meta)
