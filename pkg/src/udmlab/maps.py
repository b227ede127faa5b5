"""Reduced dynamical maps of a single qubit coupled to a one-qubit environment.

Conventions (used everywhere, all reported numbers assume them):

* vec is column-stacking, so the superoperator of rho -> A rho B^dag is
  kron(conj(B), A), and a map is the 4x4 matrix acting on vectorized 2x2
  density matrices.
* The Choi matrix is the map applied to half of an unnormalized maximally
  entangled pair, sum_ij E(|i><j|) (x) |i><j|; it is obtained from the
  superoperator by an index reshuffle, its trace is the input dimension 2
  for trace-preserving maps, and the map is completely positive iff it is
  positive semidefinite.

A map induced from a product initial condition with a fixed environment
state is reconstructed tomographically: the four physical probe inputs
|0><0|, |1><1|, |+><+|, |+i><+i| span the 2x2 operator space, each is
evolved jointly with the environment and reduced, and the linear system
pins the superoperator. Such maps are state-independent and CPTP by
construction; both properties are verified, not assumed.

Two certificates operationalize the failure of a state-independent
description on a sub-interval that starts from a correlated joint state:

* ``intermediate_map`` composes the long map with the pseudo-inverse of
  the short one and checks complete positivity of the candidate (the
  divisibility route; its failure is non-Markovianity).
* ``udm_witness_subinterval`` prepares two joint states with identical
  marginals at the cut time, one true and one with correlations erased,
  and reports the trace distance between the reduced outputs. A positive
  distance shows no map on the qubit's state alone can reproduce the true
  dynamics, whatever its form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .states import DensityMatrix
from .tolerances import DEFAULT

__all__ = [
    "DynamicalMap",
    "ChoiMatrix",
    "KrausSet",
    "IntermediateMapResult",
    "WitnessReport",
    "vec",
    "unvec",
    "unitary_superoperator",
    "induced_map",
    "apply_map",
    "choi",
    "is_cptp",
    "kraus_decompose",
    "intermediate_map",
    "udm_witness_subinterval",
    "local_pair_maps",
]

# probe inputs |0><0|, |1><1|, |+><+|, |+i><+i|: physical states spanning
# the Hermitian 2x2 operator space
_PROBES = [
    np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
    np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
    np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=complex),
]


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of vec for square matrices."""
    v = np.asarray(v).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> u rho u^dag."""
    u = linalg.as_matrix(u)
    return np.kron(u.conj(), u)


@dataclass(frozen=True, eq=False)
class DynamicalMap:
    """Linear map on single-qubit states, held as a 4x4 superoperator.

    ``environment_state`` is the fixed environment the map was induced
    from (None for composed candidates, which have no inducing state);
    ``interval`` is the (t_a, t_b) stretch of the evolution it describes;
    ``which_qubit`` says whether the described qubit is the left (1) or
    right (2) tensor factor.
    """

    superoperator: np.ndarray
    environment_state: DensityMatrix | None
    interval: tuple[float, float]
    which_qubit: int

    def __post_init__(self):
        s = linalg.as_matrix(self.superoperator)
        if s.shape != (4, 4):
            raise ValueError(f"superoperator must be 4x4, got {s.shape}")
        if self.which_qubit not in (1, 2):
            raise ValueError("which_qubit must be 1 or 2")


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi matrix of a map together with its (descending) eigenvalues."""

    matrix: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators K_a with their Choi-eigenvalue weights."""

    operators: tuple[np.ndarray, ...]
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class IntermediateMapResult:
    """Outcome of the divisibility check through an intermediate time."""

    candidate: DynamicalMap
    cp: bool
    min_choi_eigenvalue: float
    short_map_rank: int
    indeterminate: bool

    @property
    def verdict(self) -> str:
        if self.indeterminate:
            return "indeterminate"
        return "cp" if self.cp else "not_cp"


@dataclass(frozen=True)
class WitnessReport:
    """Same-marginal, different-outcome witness for a sub-interval."""

    t1: float
    t_star: float
    trace_distance: float
    # Frobenius distance between the true joint state at t1 and the
    # product of its marginals: how correlated the cut state is
    correlation_at_t1: float


def _joint(rho_sys: np.ndarray, env: np.ndarray, which: int) -> np.ndarray:
    return np.kron(rho_sys, env) if which == 1 else np.kron(env, rho_sys)


def induced_map(k, env: DensityMatrix, t: float, which: int = 1) -> DynamicalMap:
    """Tomographic reconstruction of the map induced on one qubit.

    The qubit ``which`` starts in each probe state, jointly evolves with
    the fixed environment ``env`` under e^{-i k t}, and is reduced back;
    solving the resulting linear system gives the superoperator. The
    output is checked to be CPTP, which maps induced this way always are.
    """
    k = linalg.as_matrix(k)
    if k.shape != (4, 4):
        raise ValueError(f"generator must be 4x4, got {k.shape}")
    if env.dim != 2:
        raise ValueError("environment must be a single-qubit state")
    if t <= 0.0:
        raise ValueError("evolution time must be positive")
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    u = linalg.matexp_hermitian(k, t)
    ins, outs = [], []
    for probe in _PROBES:
        evolved = u @ _joint(probe, env.matrix, which) @ u.conj().T
        outs.append(vec(linalg.partial_trace(evolved, keep=which)))
        ins.append(vec(probe))
    superop = np.column_stack(outs) @ np.linalg.inv(np.column_stack(ins))
    m = DynamicalMap(superop, env, (0.0, float(t)), which)
    cp, tp, min_eig = is_cptp(m, tol=DEFAULT.cp)
    if not (cp and tp):
        raise RuntimeError(
            f"induced map failed the CPTP check (cp={cp}, tp={tp}, min eig={min_eig})"
        )
    return m


def apply_map(m: DynamicalMap, rho: DensityMatrix) -> DensityMatrix:
    """Evaluate the map on a state.

    The result is validated as a density matrix; a non-CP map can push the
    output outside the state space, in which case the validation error is
    the report (outputs are never clamped).
    """
    if rho.dim != 2:
        raise ValueError("apply_map expects a single-qubit state")
    return DensityMatrix(unvec(m.superoperator @ vec(rho.matrix)))


def choi(m: DynamicalMap) -> ChoiMatrix:
    """Choi matrix sum_ij E(|i><j|) (x) |i><j|, by index reshuffle.

    With column-stacking vec, the superoperator as a 4-tensor carries axes
    (out-col, out-row, in-col, in-row); the Choi index order is
    ((out-row, in-row), (out-col, in-col)).
    """
    c = np.reshape(m.superoperator, (2, 2, 2, 2)).transpose(1, 3, 0, 2).reshape(4, 4)
    c = (c + c.conj().T) / 2.0  # Hermitian up to roundoff for any map
    w = np.linalg.eigvalsh(c)[::-1]
    return ChoiMatrix(c, w)


def is_cptp(m: DynamicalMap, tol: float = DEFAULT.cp) -> tuple[bool, bool, float]:
    """(cp, tp, min Choi eigenvalue) of a map.

    cp iff the Choi matrix is positive semidefinite within tol; tp iff the
    dual map preserves the identity within tol.
    """
    min_eig = float(choi(m).eigenvalues[-1])
    cp = min_eig >= -tol
    ident = vec(np.eye(2, dtype=complex))
    tp = float(np.max(np.abs(m.superoperator.conj().T @ ident - ident))) <= tol
    return cp, tp, min_eig


def kraus_decompose(c: ChoiMatrix) -> KrausSet:
    """Kraus operators from the Choi eigendecomposition.

    Only defined for completely positive maps; a negative Choi eigenvalue
    beyond tolerance means no Kraus form exists and is an error here.
    Kraus operators are unique only up to unitary mixing, so nothing
    beyond the eigenvalue ordering is canonicalized.
    """
    w = np.asarray(c.eigenvalues, dtype=float)
    if w[-1] < -DEFAULT.cp:
        raise ValueError(
            f"Choi matrix has negative eigenvalue {w[-1]}: the map is not "
            "completely positive and admits no Kraus form"
        )
    evals, evecs = np.linalg.eigh(c.matrix)
    ops, weights = [], []
    for i in range(evals.size - 1, -1, -1):  # descending
        lam = float(evals[i])
        if lam > 1e-10:
            # Choi row index is (output, input), row-major over the pair
            ops.append(np.sqrt(lam) * evecs[:, i].reshape(2, 2))
            weights.append(lam)
    if len(ops) > 4:
        raise RuntimeError("more than 4 Kraus operators for a qubit map")
    completeness = sum(op.conj().T @ op for op in ops)
    if float(np.max(np.abs(completeness - np.eye(2)))) > 1e-8:
        raise RuntimeError("Kraus completeness sum deviates from identity")
    return KrausSet(tuple(ops), np.array(weights))


def intermediate_map(
    e_short: DynamicalMap,
    e_long: DynamicalMap,
    cutoff: float = DEFAULT.pinv_cutoff,
    cp_tol: float = DEFAULT.cp,
) -> IntermediateMapResult:
    """Divisibility check: is (long map) o (short map)^-1 completely positive?

    Both maps must describe the same qubit from the same start time with
    the same environment. A CP candidate means the evolution through the
    intermediate time is divisible there; a negative Choi eigenvalue
    certifies that the family is not CP-divisible, i.e. non-Markovian. If
    the short map is singular beyond the pseudo-inverse cutoff the
    composition is not trustworthy and the verdict is indeterminate.
    """
    if e_short.which_qubit != e_long.which_qubit:
        raise ValueError("maps describe different qubits")
    t0s, t1 = e_short.interval
    t0l, t_star = e_long.interval
    if abs(t0s - t0l) > 1e-12:
        raise ValueError("maps must share the start time")
    if not t0s < t1 < t_star:
        raise ValueError(f"need t0 < t1 < t*, got t0={t0s}, t1={t1}, t*={t_star}")
    if e_short.environment_state is not None and e_long.environment_state is not None:
        dev = np.max(
            np.abs(e_short.environment_state.matrix - e_long.environment_state.matrix)
        )
        if dev > 1e-9:
            raise ValueError("maps were induced from different environment states")
    pinv, rank = linalg.pseudo_inverse(e_short.superoperator, cutoff=cutoff)
    candidate = DynamicalMap(
        e_long.superoperator @ pinv, None, (t1, t_star), e_long.which_qubit
    )
    min_eig = float(choi(candidate).eigenvalues[-1])
    cp = min_eig >= -cp_tol
    return IntermediateMapResult(candidate, cp, min_eig, rank, indeterminate=rank < 4)


def udm_witness_subinterval(
    k, rho_in: DensityMatrix, t1: float, t_star: float
) -> WitnessReport:
    """Witness that no state-independent map covers [t1, t*].

    The product input evolves to t1, giving the true joint state sigma;
    a second joint state with the same marginals but erased correlations,
    Tr_2(sigma) (x) Tr_1(sigma), evolves alongside it to t*. The trace
    distance between the two reduced outputs of qubit 1 is zero whenever a
    map of the qubit's state alone could describe the stretch, so a
    positive distance is the operational content of "no such map exists".
    """
    k = linalg.as_matrix(k)
    if linalg.hermiticity_defect(k) > DEFAULT.hermiticity:
        raise ValueError("generator must be Hermitian")
    if rho_in.dim != 4:
        raise ValueError("witness needs a 2-qubit input state")
    if not 0.0 < t1 < t_star:
        raise ValueError(f"need 0 < t1 < t*, got t1={t1}, t*={t_star}")
    marg1 = linalg.partial_trace(rho_in.matrix, keep=1)
    marg2 = linalg.partial_trace(rho_in.matrix, keep=2)
    if float(np.linalg.norm(rho_in.matrix - np.kron(marg1, marg2))) > 1e-9:
        raise ValueError(
            "witness input must be a product state rho_1 (x) rho_2: the "
            "state-independent description being tested exists only for "
            "product initial conditions with a fixed environment"
        )
    u1 = linalg.matexp_hermitian(k, t1)
    sigma = u1 @ rho_in.matrix @ u1.conj().T
    sigma_product = np.kron(
        linalg.partial_trace(sigma, keep=1), linalg.partial_trace(sigma, keep=2)
    )
    correlation = float(np.linalg.norm(sigma - sigma_product))
    u2 = linalg.matexp_hermitian(k, t_star - t1)
    out_true = linalg.partial_trace(u2 @ sigma @ u2.conj().T, keep=1)
    out_erased = linalg.partial_trace(u2 @ sigma_product @ u2.conj().T, keep=1)
    dist = float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(out_true - out_erased))))
    return WitnessReport(float(t1), float(t_star), dist, correlation)


def local_pair_maps(
    k, rho1: DensityMatrix, rho2: DensityMatrix, t: float
) -> tuple[DynamicalMap, DynamicalMap]:
    """The two simultaneous maps of a pair entering the same gate.

    Each qubit gets its own map, with the companion's initial state as the
    fixed environment; one map cannot serve both qubits unless the setup
    is symmetric.
    """
    e1 = induced_map(k, rho2, t, which=1)
    e2 = induced_map(k, rho1, t, which=2)
    return e1, e2
