"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own code paths: partial
traces are explicit double sums, reduced maps are evaluated by evolving
the full joint state, and series expansions are summed term by term.
Frozen expected values in the tests were computed with these.
"""
import numpy as np
import pytest

from udmlab import linalg


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2.0


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return m / np.trace(m).real


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# oracles


def partial_trace_by_sums(rho, keep):
    """Explicit <a s|rho|b s> double sum, no reshapes."""
    out = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            for s in range(2):
                if keep == 1:
                    out[a, b] += rho[2 * a + s, 2 * b + s]
                else:
                    out[a, b] += rho[2 * s + a, 2 * s + b]
    return out


def evolve_joint(k, rho, t):
    """U rho U^dag with U = exp(-i k t), straight through the library kernel."""
    u = linalg.matexp_hermitian(k, t)
    return u @ rho @ u.conj().T


def reduced_evolution(k, rho_sys, env, t, which):
    """Joint evolution + partial trace: the tomography-free reference."""
    joint = np.kron(rho_sys, env) if which == 1 else np.kron(env, rho_sys)
    return partial_trace_by_sums(evolve_joint(k, joint, t), keep=which)


def series_matexp(m, t, terms):
    """Truncated power series of exp(-i m t)."""
    acc = np.zeros_like(np.asarray(m, dtype=complex))
    power = np.eye(m.shape[0], dtype=complex)
    coeff = 1.0 + 0.0j
    for n in range(terms):
        acc = acc + coeff * power
        power = power @ m
        coeff = coeff * (-1j * t) / (n + 1)
    return acc
