import numpy as np
import pytest

from udmlab import (
    DensityMatrix,
    DynamicalMap,
    apply_map,
    choi,
    densify,
    induced_map,
    intermediate_map,
    is_cptp,
    kraus_decompose,
    local_pair_maps,
    named_state,
    partial_trace,
    product_state,
    udm_witness_subinterval,
    unitary_superoperator,
)
from udmlab import maps as maps_mod
from udmlab.gates import equal_up_to_phase
from conftest import random_density, random_hermitian, reduced_evolution

Z = np.diag([1.0, -1.0]).astype(complex)
K_CPI = np.diag([0.0, 0.0, 0.0, np.pi]).astype(complex)
ENV_PLUS = densify(named_state("+"))
ENV_ONE = densify(named_state("1"))


def _dm(superop, which=1, interval=(0.0, 1.0)):
    return DynamicalMap(superop, None, interval, which)


def test_vec_unvec_roundtrip(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    np.testing.assert_array_equal(maps_mod.unvec(maps_mod.vec(m)), m)
    # column stacking: [[a,b],[c,d]] -> (a, c, b, d)
    np.testing.assert_array_equal(
        maps_mod.vec(np.array([[1, 2], [3, 4]])), [1, 3, 2, 4]
    )


def test_induced_map_identity():
    m = induced_map(np.zeros((4, 4)), ENV_PLUS, 1.0)
    np.testing.assert_allclose(m.superoperator, np.eye(4), atol=1e-12)


def test_induced_map_env_one_is_phase_flip():
    # with the companion fixed in |1>, the control coherence picks up e^{i pi}
    m = induced_map(K_CPI, ENV_ONE, 1.0, which=1)
    np.testing.assert_allclose(m.superoperator, unitary_superoperator(Z), atol=1e-12)


def test_induced_map_env_plus_is_dephasing():
    m = induced_map(K_CPI, ENV_PLUS, 1.0, which=1)
    out = apply_map(m, densify(named_state("+")))
    assert out.purity() < 1.0 - 1e-6
    np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_induced_map_matches_joint_evolution_oracle(rng):
    for _ in range(30):
        k = random_hermitian(rng, 4)
        env = DensityMatrix(random_density(rng, 2))
        t = rng.uniform(0.05, 3.0)
        which = int(rng.integers(1, 3))
        m = induced_map(k, env, t, which=which)
        for _ in range(5):
            rho = DensityMatrix(random_density(rng, 2))
            expected = reduced_evolution(k, rho.matrix, env.matrix, t, which)
            np.testing.assert_allclose(apply_map(m, rho).matrix, expected, atol=1e-10)


def test_induced_maps_are_cptp(rng):
    for _ in range(30):
        k = random_hermitian(rng, 4)
        env = DensityMatrix(random_density(rng, 2))
        m = induced_map(k, env, rng.uniform(0.05, 3.0), which=1)
        cp, tp, min_eig = is_cptp(m, tol=1e-8)
        assert cp and tp
        assert min_eig >= -1e-9


def test_apply_map_identity_and_consistency(rng):
    ident = _dm(np.eye(4, dtype=complex))
    rho = DensityMatrix(random_density(rng, 2))
    np.testing.assert_allclose(apply_map(ident, rho).matrix, rho.matrix, atol=1e-15)


def test_choi_of_identity():
    c = choi(_dm(np.eye(4, dtype=complex)))
    np.testing.assert_allclose(c.eigenvalues, [2, 0, 0, 0], atol=1e-12)
    omega = np.zeros((4, 4))
    omega[np.ix_([0, 3], [0, 3])] = 1.0  # 2 |Omega><Omega|
    np.testing.assert_allclose(c.matrix, omega, atol=1e-12)


def test_choi_of_unitary_map_is_rank_one():
    c = choi(_dm(unitary_superoperator(Z)))
    np.testing.assert_allclose(c.eigenvalues, [2, 0, 0, 0], atol=1e-12)


def test_choi_of_depolarizing_map():
    # rho -> tr(rho) * I/2: columns are vec(I/2) against vec of each basis op
    s = np.outer(maps_mod.vec(np.eye(2) / 2), [1, 0, 0, 1])
    c = choi(_dm(s.astype(complex)))
    np.testing.assert_allclose(c.matrix, np.eye(4) / 2, atol=1e-12)


def test_is_cptp_flags_transpose_map():
    # transpose swaps the middle vec components; its Choi is the SWAP matrix
    transpose = np.eye(4)[[0, 2, 1, 3]].astype(complex)
    cp, tp, min_eig = is_cptp(_dm(transpose), tol=1e-7)
    assert not cp
    assert tp
    assert abs(min_eig + 1.0) < 1e-12


def test_kraus_of_identity_map():
    ks = kraus_decompose(choi(_dm(np.eye(4, dtype=complex))))
    assert len(ks.operators) == 1
    assert equal_up_to_phase(ks.operators[0], np.eye(2), tol=1e-10)


def test_kraus_of_dephasing_map_is_diagonal_pair():
    m = induced_map(K_CPI, ENV_PLUS, 1.0)
    ks = kraus_decompose(choi(m))
    assert len(ks.operators) == 2
    for op in ks.operators:
        assert abs(op[0, 1]) < 1e-10 and abs(op[1, 0]) < 1e-10


def test_kraus_of_depolarizing_has_four_operators(rng):
    s = np.outer(maps_mod.vec(np.eye(2) / 2), [1, 0, 0, 1]).astype(complex)
    m = _dm(s)
    ks = kraus_decompose(choi(m))
    assert len(ks.operators) == 4
    np.testing.assert_allclose(ks.weights, [0.5, 0.5, 0.5, 0.5], atol=1e-12)
    rho = DensityMatrix(random_density(rng, 2))
    rebuilt = sum(op @ rho.matrix @ op.conj().T for op in ks.operators)
    np.testing.assert_allclose(rebuilt, np.eye(2) / 2, atol=1e-10)


def test_kraus_reconstruction_and_completeness(rng):
    for _ in range(20):
        k = random_hermitian(rng, 4)
        env = DensityMatrix(random_density(rng, 2))
        m = induced_map(k, env, rng.uniform(0.1, 3.0))
        ks = kraus_decompose(choi(m))
        assert len(ks.operators) <= 4
        completeness = sum(op.conj().T @ op for op in ks.operators)
        assert np.max(np.abs(completeness - np.eye(2))) < 1e-8
        for _ in range(3):
            rho = DensityMatrix(random_density(rng, 2))
            rebuilt = sum(op @ rho.matrix @ op.conj().T for op in ks.operators)
            np.testing.assert_allclose(rebuilt, apply_map(m, rho).matrix, atol=1e-8)


def test_kraus_refuses_non_cp_choi():
    transpose = np.eye(4)[[0, 2, 1, 3]].astype(complex)
    with pytest.raises(ValueError):
        kraus_decompose(choi(_dm(transpose)))


def test_intermediate_map_identity_dynamics():
    e_s = induced_map(np.zeros((4, 4)), ENV_PLUS, 0.5)
    e_l = induced_map(np.zeros((4, 4)), ENV_PLUS, 1.0)
    res = intermediate_map(e_s, e_l)
    assert res.cp and not res.indeterminate
    np.testing.assert_allclose(res.candidate.superoperator, np.eye(4), atol=1e-10)


def test_intermediate_map_local_generator_is_divisible(rng):
    # factorized evolution never couples the qubits: always Markovian
    k = np.kron(Z, np.eye(2)) + np.kron(np.eye(2), random_hermitian(rng, 2))
    for t1, t2 in [(0.3, 0.8), (0.5, 1.0), (0.2, 1.7)]:
        e_s = induced_map(k, ENV_PLUS, t1)
        e_l = induced_map(k, ENV_PLUS, t2)
        res = intermediate_map(e_s, e_l)
        assert res.cp and res.short_map_rank == 4


def test_intermediate_map_inside_gate_interval_is_cp():
    # Monotone dephasing: under K = pi|11><11| the coherence factor
    # |cos(pi t / 2)| only shrinks on [0, 1], so dividing the gate interval
    # anywhere keeps the candidate CP (the oracle-computed value; the
    # non-CP regime needs the interval to cross the revival at t = 1).
    e_s = induced_map(K_CPI, ENV_PLUS, 0.5)
    e_l = induced_map(K_CPI, ENV_PLUS, 1.0)
    res = intermediate_map(e_s, e_l)
    assert res.cp
    assert res.min_choi_eigenvalue > -1e-12
    assert res.short_map_rank == 4


def test_intermediate_map_detects_dephasing_revival():
    # crossing the zero of the coherence factor makes the candidate non-CP:
    # the reduced dynamics is not CP-divisible once coherence flows back
    e_s = induced_map(K_CPI, ENV_PLUS, 0.5)
    e_l = induced_map(K_CPI, ENV_PLUS, 1.6)
    res = intermediate_map(e_s, e_l)
    assert not res.cp
    assert res.min_choi_eigenvalue < -1e-3
    assert res.verdict == "not_cp"
    # and the Kraus form does not exist in this regime
    with pytest.raises(ValueError):
        kraus_decompose(choi(res.candidate))
    # the non-CP candidate pushes |+><+| outside the state space; the
    # output validation reports it rather than clamping
    with pytest.raises(ValueError):
        apply_map(res.candidate, densify(named_state("+")))


def test_intermediate_map_reports_rank_deficiency():
    # at t = 1 the dephasing map kills the coherence subspace: rank 2
    e_s = induced_map(K_CPI, ENV_PLUS, 1.0)
    e_l = induced_map(K_CPI, ENV_PLUS, 1.5)
    res = intermediate_map(e_s, e_l)
    assert res.indeterminate
    assert res.short_map_rank == 2
    assert res.verdict == "indeterminate"


def test_dual_certificates_agree_past_the_revival():
    # divisibility failure and the same-marginal witness flag the same window
    res = intermediate_map(
        induced_map(K_CPI, ENV_PLUS, 0.5), induced_map(K_CPI, ENV_PLUS, 1.6)
    )
    w = udm_witness_subinterval(
        K_CPI, densify(product_state(["+", "+"])), 0.5, 1.6
    )
    assert not res.cp
    assert w.trace_distance > 0.1


def test_witness_zero_for_local_generator():
    k = np.kron(Z, np.eye(2))
    w = udm_witness_subinterval(k, densify(product_state(["+", "+"])), 0.5, 1.0)
    assert w.trace_distance < 1e-12
    assert w.correlation_at_t1 < 1e-12


def test_witness_on_cpi_frozen_value():
    # evolved |++> at t=0.5 has marginal coherence (1+i)/4; erasing the
    # correlations and finishing the gate leaves the erased branch with
    # coherence i/4 while the true branch fully dephases: D = 1/4
    w = udm_witness_subinterval(K_CPI, densify(product_state(["+", "+"])), 0.5, 1.0)
    assert abs(w.trace_distance - 0.25) < 1e-12
    assert w.trace_distance > 0.1
    assert w.correlation_at_t1 > 0.1


def test_witness_vanishes_continuously_at_t1_zero():
    rho = densify(product_state(["+", "+"]))
    previous = 0.0
    for t1 in (1e-3, 1e-2, 1e-1):
        d = udm_witness_subinterval(K_CPI, rho, t1, 1.0).trace_distance
        assert d < 0.1
        assert d > previous
        previous = d
    assert udm_witness_subinterval(K_CPI, rho, 1e-3, 1.0).trace_distance < 1e-2


def test_witness_rejects_entangled_input_and_empty_interval():
    bell = np.zeros((4, 4), dtype=complex)
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    with pytest.raises(ValueError):
        udm_witness_subinterval(K_CPI, DensityMatrix(bell), 0.5, 1.0)
    product = densify(product_state(["0", "0"]))
    with pytest.raises(ValueError):
        udm_witness_subinterval(K_CPI, product, 1.0, 0.5)  # empty interval


def test_local_pair_maps_symmetric_inputs_coincide():
    e1, e2 = local_pair_maps(K_CPI, ENV_PLUS, ENV_PLUS, 1.0)
    np.testing.assert_allclose(e1.superoperator, e2.superoperator, atol=1e-10)


def test_local_pair_maps_asymmetric_inputs_differ():
    e1, e2 = local_pair_maps(K_CPI, densify(named_state("+")), ENV_ONE, 1.0)
    np.testing.assert_allclose(e1.superoperator, unitary_superoperator(Z), atol=1e-12)
    dist = float(np.linalg.norm(e1.superoperator - e2.superoperator))
    assert dist > 1e-3


def test_local_pair_maps_reproduce_reduced_dynamics(rng):
    for _ in range(10):
        k = random_hermitian(rng, 4)
        rho1 = DensityMatrix(random_density(rng, 2))
        rho2 = DensityMatrix(random_density(rng, 2))
        t = rng.uniform(0.1, 2.0)
        e1, e2 = local_pair_maps(k, rho1, rho2, t)
        r1 = reduced_evolution(k, rho1.matrix, rho2.matrix, t, which=1)
        r2 = reduced_evolution(k, rho2.matrix, rho1.matrix, t, which=2)
        np.testing.assert_allclose(apply_map(e1, rho1).matrix, r1, atol=1e-10)
        np.testing.assert_allclose(apply_map(e2, rho2).matrix, r2, atol=1e-10)


def test_generic_pair_maps_differ(rng):
    hits = 0
    for _ in range(10):
        k = random_hermitian(rng, 4)
        e1, e2 = local_pair_maps(
            k,
            DensityMatrix(random_density(rng, 2)),
            DensityMatrix(random_density(rng, 2)),
            1.0,
        )
        if np.linalg.norm(e1.superoperator - e2.superoperator) > 1e-3:
            hits += 1
    assert hits >= 9  # one map cannot serve both qubits in general
