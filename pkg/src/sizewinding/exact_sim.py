"""Dense simulation of the two-sided teleportation circuits.

Two-sided pure states on ``L (x) R`` are held as ``d x d`` matrices ``M`` with
``|psi> = sum_ab M[a, b] |a>_L |b>_R``.  In this picture ``A_L B_R |psi>``
is ``A @ M @ B.T`` and the ZZ coupling is an elementwise phase, which keeps
every protocol at ``O(d^3)`` cost instead of ``O(d^4)``.

The left Hamiltonian is ``H`` and the right one is ``H.T``, so the
thermofield double is ``M = rho^{1/2}`` with ``rho = e^{-beta H} / Z``.
Forward evolution on the left is ``e^{-iHt}`` and on the right
``e^{-iH^T t}``; backward evolution uses the adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, MalformedInputError, ResourceLimitError, ValidationError
from .pauli import DENSE_QUBIT_LIMIT, PauliString, dense, transpose_sign

__all__ = [
    "DenseState",
    "CouplingSpec",
    "ChannelEstimate",
    "Evolver",
    "thermofield_double",
    "coupling_phases",
    "coupling_unitary",
    "state_transfer_channel",
    "transfer_channel_from_unitaries",
    "operator_transfer_response",
    "commutator_response",
    "two_point",
    "size_generating_function",
    "measurement_based_transfer",
    "measurement_signal",
    "MeasurementOutcome",
]

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class DenseState:
    """Pure state of ``n_total`` qubits.

    For two-sided states the left qubits are the most significant, so
    ``amplitudes.reshape(d, d)`` recovers the ``M[a, b]`` matrix.
    """

    n_total: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_total,):
            raise DimensionError("amplitude vector length must be 2**n_total")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self, n_left: int) -> np.ndarray:
        d_left = 1 << n_left
        return self.amplitudes.reshape(d_left, -1)


@dataclass(frozen=True)
class CouplingSpec:
    """ZZ coupling ``V = (1/k) sum_{j in carriers} Z_j^L Z_j^R``.

    Attributes
    ----------
    n : int
        Qubits per side.
    carriers : tuple of int
        Coupled sites; ``k = len(carriers)``.
    """

    n: int
    carriers: tuple[int, ...]

    def __post_init__(self):
        carriers = tuple(sorted(set(int(c) for c in self.carriers)))
        if not carriers:
            raise MalformedInputError("carrier set is empty")
        if carriers[0] < 0 or carriers[-1] >= self.n:
            raise MalformedInputError("carrier index outside [0, n)")
        object.__setattr__(self, "carriers", carriers)

    @classmethod
    def excluding_messages(cls, n: int, message_sites: Sequence[int] = (0,)) -> CouplingSpec:
        """Couple every site except the message sites (``k = n - m``)."""
        excluded = set(message_sites)
        return cls(n, tuple(j for j in range(n) if j not in excluded))

    @classmethod
    def all_sites(cls, n: int) -> CouplingSpec:
        """Couple every site (``k = n``)."""
        return cls(n, tuple(range(n)))

    @property
    def k(self) -> int:
        return len(self.carriers)

    @property
    def mask(self) -> int:
        m = 0
        for j in self.carriers:
            m |= 1 << (self.n - 1 - j)
        return m

    def phase_of(self, pauli: PauliString, g: float) -> complex:
        """Eigenphase of ``e^{igV}`` on ``P_L |EPR>``: ``e^{ig(k - 2w)/k}``."""
        w = (pauli.q & self.mask).bit_count()
        return complex(np.exp(1j * g * (self.k - 2 * w) / self.k))


@dataclass
class ChannelEstimate:
    """Single-qubit channel recovered by process tomography.

    Attributes
    ----------
    lam : float
        Depolarizing parameter in ``Psi -> (1 - lam) tau + lam Y Psi Y``.
    pauli_transfer : ndarray, shape (3, 3)
        ``T[i, j] = Tr[s_i E(s_j)] / 2`` over ``(X, Y, Z)``.
    fidelities : dict
        ``"entanglement"`` (Y-corrected) and ``"average"`` fidelities.
    residual : float
        Frobenius distance of the Pauli transfer data from the ideal form.
    trace_error : float
        ``max |Tr E(rho) - Tr rho|`` over the basis inputs.
    cp_residual : float
        Most negative Choi eigenvalue (0 if completely positive).
    """

    lam: float
    pauli_transfer: np.ndarray
    fidelities: dict = field(default_factory=dict)
    residual: float = 0.0
    trace_error: float = 0.0
    cp_residual: float = 0.0
    choi: np.ndarray | None = None


_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_Y_FRAME = np.diag([-1.0, 1.0, -1.0])


def _check_hermitian(h: np.ndarray) -> None:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError("Hamiltonian must be square")
    d = h.shape[0]
    if d & (d - 1):
        raise DimensionError("dimension must be a power of two")
    if d.bit_length() - 1 > DENSE_QUBIT_LIMIT:
        raise ResourceLimitError("Hamiltonian exceeds the dense qubit cap")
    if not np.allclose(h, h.conj().T, atol=HERMITIAN_TOL * max(1.0, np.abs(h).max())):
        raise ValidationError("Hamiltonian is not Hermitian")


def _qubits(d: int) -> int:
    return d.bit_length() - 1


class Evolver:
    """Cached eigendecomposition of a Hermitian ``H`` for exact propagators."""

    def __init__(self, h: np.ndarray):
        _check_hermitian(h)
        self.h = np.asarray(h, dtype=complex)
        self.energies, self.vectors = np.linalg.eigh(self.h)
        self.dim = self.h.shape[0]
        self.n = _qubits(self.dim)

    def propagator(self, t: float) -> np.ndarray:
        """``e^{-iHt}``."""
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def function(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return (self.vectors * fn(self.energies)) @ self.vectors.conj().T

    def sqrt_thermal(self, beta: float) -> np.ndarray:
        """``rho^{1/2} = e^{-beta H / 2} / sqrt(Z)``, computed stably."""
        shifted = self.energies - self.energies.min()
        w = np.exp(-beta * shifted / 2)
        w = w / np.sqrt(np.sum(w**2))
        return (self.vectors * w) @ self.vectors.conj().T

    def heisenberg(self, op: np.ndarray, t: float) -> np.ndarray:
        """``e^{iHt} op e^{-iHt}``."""
        u = self.propagator(t)
        return u.conj().T @ op @ u


def thermofield_double(h: np.ndarray, beta: float) -> DenseState:
    """Thermofield double ``sum_E e^{-beta E/2} |E>_L |E*>_R`` normalized.

    The left reduced state is thermal for ``H`` and the right one is thermal
    for ``H.T``.
    """
    ev = Evolver(h)
    m = ev.sqrt_thermal(beta)
    return DenseState(2 * ev.n, m.reshape(-1))


def coupling_phases(spec: CouplingSpec, g: float) -> np.ndarray:
    """``d x d`` array of eigenphases of ``e^{igV}`` on ``|a>_L |b>_R``."""
    d = 1 << spec.n
    a = np.arange(d, dtype=np.int64)
    diff = (a[:, None] ^ a[None, :]) & spec.mask
    w = np.bitwise_count(diff).astype(np.int64)
    return np.exp(1j * g * (spec.k - 2 * w) / spec.k)


def coupling_unitary(spec: CouplingSpec, g: float, n: int | None = None) -> np.ndarray:
    """Diagonal of ``e^{igV}`` over the ``2n``-qubit basis (index ``a d + b``)."""
    if n is not None and n != spec.n:
        raise DimensionError("qubit count does not match the coupling spec")
    return coupling_phases(spec, g).reshape(-1)


# ---------------------------------------------------------------------------
# state transfer


def _left_apply(u: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: u @ x


def _right_apply(u: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    ut = u.T
    return lambda x: x @ ut


def transfer_channel_from_unitaries(
    m0: np.ndarray,
    n: int,
    left_backward: Callable[[np.ndarray], np.ndarray],
    left_forward: Callable[[np.ndarray], np.ndarray],
    right_forward: Callable[[np.ndarray], np.ndarray],
    phases: np.ndarray,
    message_site: int = 0,
    other_messages: Sequence[int] = (),
) -> ChannelEstimate:
    """Run the state-transfer circuit and tomograph the one-qubit channel.

    Parameters
    ----------
    m0 : ndarray, shape (d, d)
        Initial two-sided state matrix.
    n : int
        Qubits per side.
    left_backward, left_forward, right_forward : callable
        Maps acting on arrays of shape ``(..., d, d)``; left maps act on the
        second-to-last axis, right maps on the last axis.
    phases : ndarray, shape (d, d)
        Coupling eigenphases.
    message_site : int
        Left qubit replaced by the message and read out on the right.
    other_messages : sequence of int
        Further left qubits replaced by maximally mixed inputs.
    """
    d = 1 << n
    # 1. backward evolution on the left
    x = left_backward(m0)
    # 2. move the message qubit content into an environment register E and
    #    insert half of a Bell pair with a reference register
    x = _swap_in_message(x, n, message_site)  # shape (2_ref, 2_env, d, d)
    branches = [x]
    for site in other_messages:
        branches = [_depolarize_left(b, n, site, k) for b in branches for k in range(4)]
    weight = 1.0 / len(branches)
    choi = np.zeros((4, 4), dtype=complex)
    for b in branches:
        y = left_forward(b)
        y = y * phases
        y = right_forward(y)
        choi += weight * _reduced_ref_output(y, n, message_site)
    return _channel_from_choi(choi)


def _swap_in_message(m: np.ndarray, n: int, site: int) -> np.ndarray:
    d = 1 << n
    t = m.reshape((2,) * n + (d,))
    t = np.moveaxis(t, site, 0)  # (env, other left..., R)
    out = np.zeros((2, 2, 2) + t.shape[1:], dtype=complex)  # ref, env, msg, rest..., R
    inv = 1.0 / np.sqrt(2.0)
    out[0, :, 0] = t * inv
    out[1, :, 1] = t * inv
    # msg axis back to position `site` among the left qubits
    out = np.moveaxis(out, 2, 2 + site)
    return out.reshape(2, 2, d, d)


def _depolarize_left(x: np.ndarray, n: int, site: int, which: int) -> np.ndarray:
    # one of the four Pauli branches of a full depolarization, normalized later
    if which == 0:
        return x
    p = PauliString.single(n, site, "XYZ"[which - 1])
    return dense(p) @ x


def _reduced_ref_output(y: np.ndarray, n: int, site: int) -> np.ndarray:
    d = 1 << n
    t = y.reshape((2, 2, d) + (2,) * n)
    t = np.moveaxis(t, 3 + site, 3)  # ref, env, L, out, rest...
    t = t.reshape(2, 2, d, 2, -1)
    # rho[(r,o),(r',o')] = sum over env, left and the rest of R
    flat = np.moveaxis(t, 3, 1).reshape(4, -1)  # (ref,out) x rest
    rho = flat @ flat.conj().T
    return rho


def _channel_from_choi(choi: np.ndarray) -> ChannelEstimate:
    # choi indexed (ref, out); E(P) = 2 Tr_ref[(P^T (x) I) choi]
    c = choi.reshape(2, 2, 2, 2)
    labels = ("X", "Y", "Z")

    def apply(p: np.ndarray) -> np.ndarray:
        return 2.0 * np.einsum("ab,bjak->jk", p.T, c)

    outputs = {s: apply(_PAULI_1Q[s]) for s in ("I",) + labels}
    transfer = np.array(
        [[0.5 * np.real(np.trace(_PAULI_1Q[a] @ outputs[b])) for b in labels] for a in labels]
    )
    lam = float(np.trace(_Y_FRAME @ transfer) / 3.0)
    residual = float(np.linalg.norm(transfer - lam * _Y_FRAME))
    trace_err = max(
        abs(np.trace(outputs["I"]) - 2.0), *(abs(np.trace(outputs[s])) for s in labels)
    )
    cp = float(min(0.0, np.linalg.eigvalsh((choi + choi.conj().T) / 2).min()))
    y = _PAULI_1Q["Y"]
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0)
    corr = np.kron(np.eye(2), y)
    ent = float(np.real(bell.conj() @ corr @ choi @ corr.conj().T @ bell))
    fid = {"entanglement": ent, "average": (2 * ent + 1) / 3}
    return ChannelEstimate(
        lam=lam,
        pauli_transfer=transfer,
        fidelities=fid,
        residual=residual,
        trace_error=float(trace_err),
        cp_residual=cp,
        choi=choi,
    )


def state_transfer_channel(
    h: np.ndarray,
    beta: float,
    t_left: float,
    t_right: float,
    g: float,
    spec: CouplingSpec,
    m: int = 1,
    evolver: Evolver | None = None,
) -> ChannelEstimate:
    """Teleport one qubit through the coupled thermofield double.

    The circuit evolves the left side backward by ``t_left``, swaps the
    message into qubit 0, evolves forward, applies ``e^{igV}`` and evolves the
    right side by ``t_right``.  ``lam`` is ``(1/6) sum_P Tr[(Y P Y) E(P)]``.
    """
    if m != 1:
        raise MalformedInputError("only single-qubit tomography (m = 1) is supported")
    ev = evolver or Evolver(h)
    if spec.n != ev.n:
        raise DimensionError("coupling spec does not match the Hamiltonian")
    m0 = ev.sqrt_thermal(beta)
    u_left = ev.propagator(t_left)
    u_right = ev.propagator(t_right).T  # e^{-i H^T t} = (e^{-iHt})^T
    return transfer_channel_from_unitaries(
        m0,
        ev.n,
        _left_apply(u_left.conj().T),
        _left_apply(u_left),
        _right_apply(u_right),
        coupling_phases(spec, g),
    )


# ---------------------------------------------------------------------------
# two-point functions and operator transfer


def _as_matrix(op, n: int) -> np.ndarray:
    if isinstance(op, PauliString):
        if op.n != n:
            raise DimensionError("operator qubit count does not match")
        return dense(op)
    arr = np.asarray(op, dtype=complex)
    if arr.shape != (1 << n, 1 << n):
        raise DimensionError("operator shape does not match")
    return arr


def _transpose_of(op, n: int) -> np.ndarray:
    if isinstance(op, PauliString):
        return transpose_sign(op) * dense(op)
    return _as_matrix(op, n).T


def _left_heisenberg(ev: Evolver, op: np.ndarray, t: float) -> np.ndarray:
    # O_L(-t) = e^{-iHt} O e^{iHt}
    u = ev.propagator(t)
    return u @ op @ u.conj().T


def _right_heisenberg(ev: Evolver, op: np.ndarray, t: float) -> np.ndarray:
    # O_R(t) = e^{iH^T t} O e^{-iH^T t}
    u = ev.propagator(t).T
    return u.conj().T @ op @ u


def two_point(
    h: np.ndarray,
    beta: float,
    t_left: float,
    t_right: float,
    g: float,
    spec: CouplingSpec,
    pauli: PauliString,
    form: str = "I",
    transpose_left: bool = True,
    evolver: Evolver | None = None,
) -> complex:
    """Exact dressed two-point function.

    ``form="I"`` gives ``<T| P_R(t_R) e^{igV} P'_L(-t_L) |T>`` and
    ``form="II"`` gives ``<T| e^{-igV} P_R(t_R) e^{igV} P'_L(-t_L) |T>``,
    where ``P' = P^T`` when ``transpose_left`` (the default) and ``P``
    otherwise.  With the transpose both forms equal 1 at ``g = t = beta = 0``.
    """
    ev = evolver or Evolver(h)
    n = ev.n
    m = ev.sqrt_thermal(beta)
    p_left = _transpose_of(pauli, n) if transpose_left else _as_matrix(pauli, n)
    p_right = _as_matrix(pauli, n)
    a = _left_heisenberg(ev, p_left, t_left)
    b = _right_heisenberg(ev, p_right, t_right)
    phases = coupling_phases(spec, g)
    ket = (a @ m) * phases
    if form == "I":
        # <T| B_R is the conjugate of (B^dag)_R |T>, whose matrix is M B^*
        return complex(np.vdot(m @ b.conj(), ket))
    if form == "II":
        ket = (ket @ b.T) * phases.conj()
        return complex(np.vdot(m, ket))
    raise MalformedInputError("form must be 'I' or 'II'")


def size_generating_function(
    h: np.ndarray,
    beta: float,
    op,
    t: float,
    g: float,
    spec: CouplingSpec,
    winding: bool = True,
    evolver: Evolver | None = None,
) -> complex:
    """Coupling-grid transform of the size distribution of ``rho^{1/2} O(t)``.

    With ``X = rho^{1/2} O(t) = d^{-1/2} sum_P c_P P`` this returns
    ``sum_P c_P^2 e^{i g phi_P}`` when ``winding`` and
    ``sum_P |c_P|^2 e^{i g phi_P}`` otherwise, where ``e^{i g phi_P}`` is the
    coupling eigenphase of ``P``.  The winding form equals :func:`two_point`
    (form I) evaluated with left Hamiltonian ``H.T``.
    """
    ev = evolver or Evolver(h)
    x = ev.sqrt_thermal(beta) @ ev.heisenberg(_as_matrix(op, ev.n), t)
    phases = coupling_phases(spec, g)
    # |X>> has matrix X; <<A|B>> = sum conj(A) B
    left = x.conj().T if winding else x
    return complex(np.vdot(left, x * phases))


def commutator_response(
    h: np.ndarray, beta: float, t: float, g: float, spec: CouplingSpec, phi: PauliString, evolver: Evolver | None = None
) -> float:
    """Direct evaluation of ``Im <[phi_L(-t), e^{-igV} phi_R(t) e^{igV}]>``.

    This is the first-order response of ``<phi_R(t)>`` to inserting
    ``e^{i eps phi}`` on the left at time ``-t``.
    """
    ev = evolver or Evolver(h)
    n = ev.n
    m = ev.sqrt_thermal(beta)
    a = _left_heisenberg(ev, _as_matrix(phi, n), t)
    b = _right_heisenberg(ev, _as_matrix(phi, n), t)
    phases = coupling_phases(spec, g)
    # v1 = phi_L |T>, v2 = X |T> with X = e^{-igV} b_R e^{igV}
    v1 = a @ m
    v2 = ((m * phases) @ b.T) * phases.conj()
    # <phi_L X> = <v1|v2>, <X phi_L> = conj
    z = np.vdot(v1, v2)
    return float(np.imag(z - np.conj(z)))


def operator_transfer_response(
    h: np.ndarray,
    beta: float,
    t: float,
    g: float,
    spec: CouplingSpec,
    phi: PauliString,
    epsilon: float = 1e-3,
    evolver: Evolver | None = None,
) -> float:
    """Response of ``<phi_R(t)>`` to the left insertion ``O = e^{i eps phi}``.

    The protocol is simulated for ``+eps`` and ``-eps`` and the symmetric
    difference quotient is returned; it agrees with
    :func:`commutator_response` up to ``O(eps^2)``.
    """
    ev = evolver or Evolver(h)
    n = ev.n
    m = ev.sqrt_thermal(beta)
    phi_m = _as_matrix(phi, n)
    u_left = ev.propagator(t)
    b = _right_heisenberg(ev, phi_m, t)
    phases = coupling_phases(spec, g)
    evals, evecs = np.linalg.eigh(phi_m)

    def expect(eps: float) -> float:
        o = (evecs * np.exp(1j * eps * evals)) @ evecs.conj().T
        state = u_left @ o @ u_left.conj().T @ m
        state = state * phases
        return float(np.real(np.vdot(state, state @ b.T)))

    return (expect(epsilon) - expect(-epsilon)) / (2 * epsilon)


# ---------------------------------------------------------------------------
# measurement-based protocol


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of projecting the left side onto a computational string.

    Attributes
    ----------
    outcome : int
        Measured left basis index (qubit 0 most significant).
    probability : float
        Born probability of ``outcome``.
    right_state : DenseState
        Normalized right state after the one-sided evolution.
    """

    outcome: int
    probability: float
    right_state: DenseState


def _z_signs(n: int, outcome: int) -> np.ndarray:
    bits = (outcome >> np.arange(n - 1, -1, -1)) & 1
    return 1 - 2 * bits


def _conditional_hamiltonian(h_right: np.ndarray, mu: float, n: int, outcome: int) -> np.ndarray:
    d = 1 << n
    z = _z_signs(n, outcome)
    a = np.arange(d)
    diag = np.zeros(d)
    for j in range(n):
        zj = 1 - 2 * ((a >> (n - 1 - j)) & 1)
        diag += z[j] * zj
    return h_right + np.diag(mu / 2 * diag)


def _prepared_left_state(ev: Evolver, beta: float, message, t_insert: float) -> np.ndarray:
    m = ev.sqrt_thermal(beta)
    if message is None:
        return m
    o = _as_matrix(message, ev.n)
    u = ev.propagator(t_insert)
    return u @ o @ u.conj().T @ m


def measurement_based_transfer(
    h: np.ndarray,
    beta: float,
    mu: float,
    t: float,
    message=None,
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
    t_insert: float = 0.0,
    evolver: Evolver | None = None,
) -> MeasurementOutcome:
    """Measure every left qubit in Z and evolve the right side one-sidedly.

    Parameters
    ----------
    message : PauliString or ndarray, optional
        Left unitary inserted at time ``-t_insert`` before the measurement.
    outcome : int, optional
        Force a measurement outcome instead of sampling it.

    Returns
    -------
    MeasurementOutcome
        Right state evolved by ``H^T + (mu/2) sum_i z_i Z_i^R`` for time ``t``.
    """
    ev = evolver or Evolver(h)
    n = ev.n
    state = _prepared_left_state(ev, beta, message, t_insert)
    probs = np.sum(np.abs(state) ** 2, axis=1)
    probs = probs / probs.sum()
    if outcome is None:
        rng = rng or np.random.default_rng()
        outcome = int(rng.choice(probs.size, p=probs))
    row = state[outcome]
    row = row / np.linalg.norm(row)
    h_cond = _conditional_hamiltonian(ev.h.T, mu, n, outcome)
    e, v = np.linalg.eigh(h_cond)
    psi = v @ (np.exp(-1j * e * t) * (v.conj().T @ row))
    return MeasurementOutcome(outcome, float(probs[outcome]), DenseState(n, psi))


def measurement_signal(
    h: np.ndarray,
    beta: float,
    mu: float,
    t: float,
    observable,
    message=None,
    t_insert: float = 0.0,
    evolver: Evolver | None = None,
) -> float:
    """Outcome-averaged ``<observable>_R`` after the measurement protocol.

    The difference between runs with and without ``message`` is the signal
    transmitted from left to right; it vanishes identically at ``mu = 0``.
    """
    ev = evolver or Evolver(h)
    n = ev.n
    obs = _as_matrix(observable, n)
    state = _prepared_left_state(ev, beta, message, t_insert)
    total = 0.0
    for z in range(1 << n):
        row = state[z]
        weight = float(np.vdot(row, row).real)
        if weight < 1e-300:
            continue
        h_cond = _conditional_hamiltonian(ev.h.T, mu, n, z)
        e, v = np.linalg.eigh(h_cond)
        psi = v @ (np.exp(-1j * e * t) * (v.conj().T @ row))
        total += float(np.real(np.vdot(psi, obs @ psi)))
    return total
