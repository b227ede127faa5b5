"""Multi-qubit circuits, the QFT builder, and per-gate block audits.

Qubit indices are 1-based with qubit 1 the most significant tensor factor,
matching the state-vector ordering of the states module. Every two-qubit
gate in a circuit is treated as one indivisible block: the audit records
the bipartite entanglement across exactly the pair the block touches,
immediately before and after it, with spectator qubits traced out (the
reduced pair state may be mixed when spectators are entangled with it,
so the mixed-state negativity is the diagnostic). SWAPs are placed and
audited as single atomic gates, not decomposed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import H, SWAP, X
from .states import DensityMatrix, PureState, negativity
from .tolerances import DEFAULT

__all__ = [
    "PlacedGate",
    "Circuit",
    "AuditRecord",
    "BlockAudit",
    "build_qft",
    "run_circuit",
    "circuit_unitary",
    "dft_matrix",
    "circuit_to_dict",
    "circuit_from_dict",
]

GATE_ARITY = {"H": 1, "X": 1, "CPHASE": 2, "SWAP": 2}

MIN_QUBITS = 2
MAX_QUBITS = 8


@dataclass(frozen=True)
class PlacedGate:
    name: str
    qubits: tuple[int, ...]
    phi: float | None = None

    def __post_init__(self):
        if self.name not in GATE_ARITY:
            raise ValueError(f"unknown gate {self.name!r}; expected one of {sorted(GATE_ARITY)}")
        if len(self.qubits) != GATE_ARITY[self.name]:
            raise ValueError(f"{self.name} takes {GATE_ARITY[self.name]} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} qubits must be distinct, got {self.qubits}")
        if (self.name == "CPHASE") != (self.phi is not None):
            raise ValueError("phi is required for CPHASE and only for CPHASE")

    def matrix(self) -> np.ndarray:
        if self.name == "H":
            return H
        if self.name == "X":
            return X
        if self.name == "SWAP":
            return SWAP
        return np.diag([1.0, 1.0, 1.0, np.exp(1j * self.phi)]).astype(complex)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence; list position stands for the circuit time slot."""

    n_qubits: int
    gates: tuple[PlacedGate, ...]

    def __post_init__(self):
        if not MIN_QUBITS <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {self.n_qubits}")
        for g in self.gates:
            for q in g.qubits:
                if not 1 <= q <= self.n_qubits:
                    raise ValueError(f"qubit index {q} out of range 1..{self.n_qubits}")


@dataclass(frozen=True)
class AuditRecord:
    """Entanglement across a 2-qubit gate's pair, just before and after it."""

    position: int  # 1-based slot of the gate in the circuit
    name: str
    qubits: tuple[int, int]
    negativity_in: float
    negativity_out: float
    separable_in: bool
    separable_out: bool


@dataclass(frozen=True)
class BlockAudit:
    records: tuple[AuditRecord, ...]

    def all_separable(self) -> bool:
        return all(r.separable_in and r.separable_out for r in self.records)


def build_qft(n: int) -> Circuit:
    """Standard QFT layout on n qubits (2 <= n <= 8).

    Per qubit j: a Hadamard followed by controlled phases pi/2^(k-j) from
    each later qubit k; a tail of SWAPs reverses the qubit order. Gate
    count: n Hadamards, n(n-1)/2 controlled phases, floor(n/2) SWAPs.
    """
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise ValueError(f"QFT size must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {n}")
    placed = []
    for j in range(1, n + 1):
        placed.append(PlacedGate("H", (j,)))
        for k in range(j + 1, n + 1):
            placed.append(PlacedGate("CPHASE", (j, k), phi=np.pi / 2 ** (k - j)))
    for i in range(1, n // 2 + 1):
        placed.append(PlacedGate("SWAP", (i, n + 1 - i)))
    return Circuit(n, tuple(placed))


def _embed(u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Lift a small gate matrix to the full 2^n-dimensional register."""
    axes = [q - 1 for q in qubits]
    rest = [a for a in range(n) if a not in axes]
    perm = axes + rest
    inv = list(np.argsort(perm))
    full = np.kron(u, np.eye(2 ** (n - len(qubits)), dtype=complex))
    t = full.reshape([2] * (2 * n))
    return t.transpose(inv + [n + i for i in inv]).reshape(2**n, 2**n)


def _pair_density(amps: np.ndarray, n: int, q1: int, q2: int) -> DensityMatrix:
    """Reduced density matrix of the ordered pair (q1, q2), spectators traced out."""
    t = amps.reshape([2] * n)
    rest = [a for a in range(n) if a not in (q1 - 1, q2 - 1)]
    m = t.transpose([q1 - 1, q2 - 1] + rest).reshape(4, -1)
    return DensityMatrix(m @ m.conj().T)


def run_circuit(
    circuit: Circuit, input_state: PureState, tol: float = DEFAULT.separability
) -> tuple[PureState, BlockAudit]:
    """Apply the gates in sequence, auditing every two-qubit block.

    Returns the output state and one audit record per two-qubit gate with
    the pair's negativity and separability verdict at the block boundary.
    """
    if input_state.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits, input has {input_state.n_qubits}"
        )
    n = circuit.n_qubits
    amps = input_state.amplitudes.copy()
    records = []
    for pos, g in enumerate(circuit.gates, start=1):
        if len(g.qubits) == 2:
            q1, q2 = g.qubits
            neg_in = negativity(_pair_density(amps, n, q1, q2))
            amps = _embed(g.matrix(), g.qubits, n) @ amps
            neg_out = negativity(_pair_density(amps, n, q1, q2))
            records.append(
                AuditRecord(
                    pos, g.name, (q1, q2), neg_in, neg_out,
                    separable_in=neg_in <= tol, separable_out=neg_out <= tol,
                )
            )
        else:
            amps = _embed(g.matrix(), g.qubits, n) @ amps
    return PureState(amps), BlockAudit(tuple(records))


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Ordered product of the embedded gate unitaries."""
    dim = 2**circuit.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        u = _embed(g.matrix(), g.qubits, circuit.n_qubits) @ u
    return u


def dft_matrix(n: int) -> np.ndarray:
    """DFT matrix on 2^n amplitudes: entries e^{2 pi i jk / 2^n} / 2^(n/2)."""
    dim = 2**n
    jk = np.outer(np.arange(dim), np.arange(dim))
    return np.exp(2j * np.pi * jk / dim) / np.sqrt(dim)


def circuit_to_dict(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        entry: dict = {"name": g.name, "qubits": list(g.qubits)}
        if g.phi is not None:
            entry["phi"] = float(g.phi)
        gates.append(entry)
    return {"n_qubits": circuit.n_qubits, "gates": gates}


def circuit_from_dict(data: dict) -> Circuit:
    try:
        n = int(data["n_qubits"])
        gates = tuple(
            PlacedGate(
                str(g["name"]),
                tuple(int(q) for q in g["qubits"]),
                phi=float(g["phi"]) if "phi" in g else None,
            )
            for g in data["gates"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit description: {exc}") from exc
    return Circuit(n, gates)
