"""Gate construction from Hermitian generators and the entangling-gate test.

A gate is the unitary e^{-i K t*} generated by a Hermitian K over its
operating duration t* (hbar = 1, t0 = 0). Physical gate equality is always
judged up to a global phase: the evolution generated by X over t* = pi/2
realizes the spin-flip only up to the unobservable factor -i.

Whether a two-qubit unitary factors into local operations is decided by
its operator Schmidt rank: reshuffling the 4x4 matrix so that row/column
indices pair per qubit turns tensor-product structure into rank-1
structure, and the singular values of the reshuffled matrix count the
terms of the operator Schmidt expansion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .states import DensityMatrix, PureState
from .tolerances import DEFAULT

__all__ = [
    "Gate",
    "gate_from_generator",
    "generator_from_unitary",
    "c_phase",
    "local_phase",
    "x_gate",
    "hadamard",
    "swap_gate",
    "identity_gate",
    "apply",
    "is_entangling",
    "operator_schmidt_values",
    "equal_up_to_phase",
]

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary together with the Hermitian generator and duration behind it."""

    n_qubits: int
    generator: np.ndarray
    duration: float
    unitary: np.ndarray

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise ValueError("gates act on 1 or 2 qubits")
        if self.duration <= 0.0:
            raise ValueError("gate duration must be positive")
        if linalg.unitarity_defect(self.unitary) > DEFAULT.unitarity:
            raise ValueError("cached gate matrix is not unitary")
        rebuilt = linalg.matexp_hermitian(self.generator, self.duration)
        if float(np.max(np.abs(rebuilt - self.unitary))) > DEFAULT.reconstruction:
            raise ValueError("gate matrix does not match exp(-i K t*)")


def gate_from_generator(k, t_star: float) -> Gate:
    """Gate driven by Hermitian k for duration t_star."""
    k = linalg.as_matrix(k)
    if k.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"generator must be 2x2 or 4x4, got {k.shape}")
    u = linalg.matexp_hermitian(k, t_star)
    return Gate(1 if k.shape[0] == 2 else 2, k, float(t_star), u)


def generator_from_unitary(u, t_star: float) -> np.ndarray:
    """Principal-branch Hermitian K with e^{-i K t*} = u.

    The eigenphases of K*t* are taken in (-pi, pi]; the branch boundary is
    folded to +pi so that e.g. controlled-Z yields K = pi |11><11|.
    Round-trips through gate_from_generator by construction.
    """
    u = linalg.as_matrix(u)
    if t_star <= 0.0:
        raise ValueError("duration must be positive")
    if linalg.unitarity_defect(u) > DEFAULT.unitarity:
        raise ValueError("generator_from_unitary requires a unitary matrix")
    # complex Schur of a normal matrix = unitary eigendecomposition
    tri, z = scipy.linalg.schur(u, output="complex")
    phases = -np.angle(np.diag(tri))
    phases[phases <= -np.pi + 1e-12] = np.pi
    k = (z * (phases / float(t_star))) @ z.conj().T
    return (k + k.conj().T) / 2.0


def c_phase(phi: float, t_star: float = 1.0) -> Gate:
    """Controlled-phase gate diag(1, 1, 1, e^{i phi}).

    The generator is the minimal diagonal one consistent with the
    exponential convention: (theta / t*) |11><11| with theta the principal
    representative of -phi (boundary folded to +pi, so phi = pi gives the
    generator pi |11><11|). Symmetric under control/target exchange.
    """
    unitary = np.diag([1.0, 1.0, 1.0, np.exp(1j * float(phi))]).astype(complex)
    theta = -float(np.angle(np.exp(1j * float(phi))))
    if theta <= -np.pi + 1e-12:
        theta = np.pi
    gen = np.zeros((4, 4), dtype=complex)
    gen[3, 3] = theta / float(t_star)
    return Gate(2, gen, float(t_star), unitary)


def local_phase(phi: float, t_star: float = 1.0) -> Gate:
    """The local counterpart 1 (x) diag(1, e^{i phi}): a phase on the target only."""
    unitary = np.diag([1.0, np.exp(1j * float(phi)), 1.0, np.exp(1j * float(phi))])
    return Gate(2, generator_from_unitary(unitary, t_star), float(t_star), unitary.astype(complex))


def x_gate(t_star: float = 1.0) -> Gate:
    """Spin-flip gate with matrix exactly X."""
    return Gate(1, generator_from_unitary(X, t_star), float(t_star), X.copy())


def hadamard(t_star: float = 1.0) -> Gate:
    return Gate(1, generator_from_unitary(H, t_star), float(t_star), H.copy())


def swap_gate(t_star: float = 1.0) -> Gate:
    return Gate(2, generator_from_unitary(SWAP, t_star), float(t_star), SWAP.copy())


def identity_gate(n_qubits: int = 2, t_star: float = 1.0) -> Gate:
    dim = 2**n_qubits
    return Gate(n_qubits, np.zeros((dim, dim), dtype=complex), float(t_star), np.eye(dim, dtype=complex))


def apply(g: Gate, state):
    """Run the gate on a PureState (U|psi>) or DensityMatrix (U rho U^dag)."""
    if isinstance(state, PureState):
        if state.n_qubits != g.n_qubits:
            raise ValueError(f"gate acts on {g.n_qubits} qubits, state has {state.n_qubits}")
        return PureState(g.unitary @ state.amplitudes)
    if isinstance(state, DensityMatrix):
        if state.n_qubits != g.n_qubits:
            raise ValueError(f"gate acts on {g.n_qubits} qubits, state has {state.n_qubits}")
        return DensityMatrix(g.unitary @ state.matrix @ g.unitary.conj().T)
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def operator_schmidt_values(u) -> np.ndarray:
    """Singular values of the qubit-pairing reshuffle of a 4x4 operator."""
    u = linalg.as_matrix(u)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got {u.shape}")
    reshuffled = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(reshuffled, compute_uv=False)


def is_entangling(g: Gate, tol: float = DEFAULT.separability) -> tuple[bool, int]:
    """Decide whether a two-qubit gate factors into local operations.

    Returns (verdict, operator Schmidt rank); rank 1 means the gate is a
    tensor product of single-qubit unitaries, anything higher certifies
    that no such factorization exists.
    """
    if g.n_qubits != 2:
        raise ValueError("is_entangling applies to 2-qubit gates")
    s = operator_schmidt_values(g.unitary)
    rank = int(np.count_nonzero(s > tol * s[0]))
    return rank > 1, rank


def equal_up_to_phase(a, b, tol: float = DEFAULT.reconstruction) -> bool:
    """True iff a = c * b for some unit-modulus c, within tol in Frobenius norm.

    c is estimated from the largest-magnitude entry of b.
    """
    a = linalg.as_matrix(a)
    b = linalg.as_matrix(b)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < 1e-15:
        return float(np.linalg.norm(a)) <= tol
    c = a[idx] / b[idx]
    if abs(c) < 1e-15:
        c = 1.0
    c = c / abs(c)
    return float(np.linalg.norm(a - c * b)) <= tol
