"""Quantum state types and two-qubit entanglement diagnostics.

Convention used throughout the package: qubit 1 is the left (most
significant) tensor factor, so the amplitude vector of a two-qubit state
is ordered (g00, g01, g10, g11).

States are normalized on construction. Separability of a pure two-qubit
state is decided through the determinant |g00*g11 - g01*g10| of the
coefficient matrix, which is the ratio condition g00/g01 = g10/g11 made
total (no division by vanishing coefficients). For mixed states the
partial-transpose criterion is exact at this dimension.
"""
from __future__ import annotations

import numpy as np

from . import linalg
from .tolerances import DEFAULT

__all__ = [
    "PureState",
    "DensityMatrix",
    "named_state",
    "product_state",
    "densify",
    "pure_entanglement",
    "schmidt_coefficients",
    "negativity",
    "is_separable_pure",
    "trace_distance",
]

NAMED_AMPLITUDES = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
    "+i": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
    "-i": np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0),
}


class PureState:
    """Pure state of n qubits; amplitudes are normalized on construction."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes):
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("amplitudes contain non-finite entries")
        n = int(np.log2(a.size)) if a.size else 0
        if a.size < 2 or 2**n != a.size:
            raise ValueError(f"amplitude length {a.size} is not 2^n for n >= 1")
        norm = float(np.linalg.norm(a))
        if norm < 1e-12:
            raise ValueError("cannot normalize the zero vector")
        self.amplitudes = a / norm
        self.n_qubits = n

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


class DensityMatrix:
    """Density matrix of n qubits; validates Hermiticity, trace and positivity."""

    __slots__ = ("matrix", "n_qubits")

    def __init__(self, matrix):
        m = linalg.as_matrix(matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        n = int(np.log2(m.shape[0]))
        if 2**n != m.shape[0] or n < 1:
            raise ValueError(f"dimension {m.shape[0]} is not 2^n for n >= 1")
        if linalg.hermiticity_defect(m) > DEFAULT.hermiticity:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > DEFAULT.hermiticity:
            raise ValueError(f"density matrix trace {tr} is not 1")
        w = np.linalg.eigvalsh(m)
        if w[0] < -DEFAULT.positivity:
            raise ValueError(f"density matrix has negative eigenvalue {w[0]}")
        self.matrix = m
        self.n_qubits = n

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits})"


def named_state(name: str) -> PureState:
    """One of the six single-qubit stabilizer states: 0 1 + - +i -i."""
    try:
        return PureState(NAMED_AMPLITUDES[name])
    except KeyError:
        raise ValueError(
            f"unknown state name {name!r}; expected one of {sorted(NAMED_AMPLITUDES)}"
        ) from None


def product_state(factors) -> PureState:
    """Tensor product of single-qubit states given as names or PureStates."""
    amps = np.array([1.0], dtype=complex)
    for f in factors:
        psi = named_state(f) if isinstance(f, str) else f
        amps = np.kron(amps, psi.amplitudes)
    return PureState(amps)


def densify(psi: PureState) -> DensityMatrix:
    """|psi><psi| as a DensityMatrix."""
    a = psi.amplitudes
    if abs(np.linalg.norm(a) - 1.0) > DEFAULT.hermiticity:
        raise ValueError("state is not normalized")
    return DensityMatrix(np.outer(a, a.conj()))


def _require_two_qubits(psi: PureState):
    if psi.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit state, got {psi.n_qubits} qubits")


def pure_entanglement(psi: PureState) -> float:
    """Determinant diagnostic tau = |g00*g11 - g01*g10| of a 2-qubit pure state.

    tau vanishes exactly on separable states, ranges up to 1/2, and equals
    half the concurrence.
    """
    _require_two_qubits(psi)
    g = psi.amplitudes
    return float(abs(g[0] * g[3] - g[1] * g[2]))


def schmidt_coefficients(psi: PureState) -> np.ndarray:
    """Descending singular values of the reshaped 2x2 coefficient matrix.

    Equivalent diagnostic to the determinant condition: the second
    coefficient vanishes iff the state is separable, and the pair is
    normalized (s1^2 + s2^2 = 1).
    """
    _require_two_qubits(psi)
    return np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False)


def negativity(rho: DensityMatrix) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over qubit 2.

    Positive iff entangled for two qubits (the partial-transpose criterion
    is exact at dimension 2x2), which covers the mixed inputs that pure
    state diagnostics cannot.
    """
    if rho.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit density matrix, got {rho.n_qubits} qubits")
    pt = rho.matrix.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    w = np.linalg.eigvalsh(pt)
    return float(np.abs(w[w < 0.0]).sum())


def is_separable_pure(psi: PureState, tol: float = DEFAULT.separability) -> bool:
    """True iff the determinant diagnostic is at most tol."""
    return pure_entanglement(psi) <= tol


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) tr|a - b|: operational distinguishability of two states."""
    if a.dim != b.dim:
        raise ValueError("trace_distance requires equal dimensions")
    w = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.sum(np.abs(w)))
