import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from procmat.cj import (
    CPMapCJ,
    Instrument,
    apply_inverse_cj,
    cj_from_kraus,
    compose,
    identity_channel,
    is_cp_trace_nonincreasing,
    is_cptp,
    measure_reprepare,
    mixture,
    povm_element,
)
from procmat.game import basis_switch_strategy
from procmat.sampling import random_cptp, random_instrument, random_state
from procmat.tensor import PAULI_I, PAULI_X, PAULI_Z, DimensionError, kron

from conftest import random_matrix


def cj_by_definition(kraus, d_in):
    """[ (id (x) M)(|phi+><phi+|) ]^T assembled block by block."""
    d_out = kraus[0].shape[0]
    blocks = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            e = np.zeros((d_in, d_in))
            e[i, j] = 1
            out = sum(k @ e @ k.conj().T for k in kraus)
            blocks += np.kron(e, out)
    return blocks.T


def test_identity_channel_cj():
    cj = identity_channel(2).cj
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 1
    assert np.array_equal(cj, expected)


def test_measure_reprepare_is_product():
    psi = np.array([1, 1]) / np.sqrt(2)
    phi = np.array([0, 1])
    m = cj_from_kraus([np.outer(phi, psi.conj())])
    assert np.allclose(m.cj, kron(np.outer(psi, psi), np.outer(phi, phi)))


def test_measure_reprepare_complex_target_conjugates():
    psi = np.array([1, 0])
    phi = np.array([1, 1j]) / np.sqrt(2)
    m = measure_reprepare(psi, phi)
    assert np.allclose(m.cj, kron(np.outer(psi, psi), np.outer(phi.conj(), phi)))


def test_bit_flip_cj_matches_definition():
    m = cj_from_kraus([PAULI_X])
    assert np.allclose(m.cj, cj_by_definition([PAULI_X], 2))
    assert np.allclose(m.marginal_in(), np.eye(2))


def test_inverse_cj_examples():
    rho = random_state(2, 7)
    assert np.allclose(apply_inverse_cj(identity_channel(2), rho), rho)
    psi, phi = np.array([0.6, 0.8]), np.array([1, 0])
    out = apply_inverse_cj(measure_reprepare(psi, phi), rho)
    assert np.allclose(out, (psi @ rho @ psi) * np.outer(phi, phi))
    flipped = apply_inverse_cj(cj_from_kraus([PAULI_X]), np.diag([1, 0]))
    assert np.allclose(flipped, np.diag([0, 1]))


def test_inverse_cj_dimension_check():
    with pytest.raises(DimensionError):
        apply_inverse_cj(identity_channel(2), np.eye(3))


def test_cptp_verdicts():
    assert is_cptp(identity_channel(3))
    mr = measure_reprepare([1, 0], [0, 1])
    check = is_cptp(mr)
    assert not check
    assert abs(check.trace_residual - 1.0) < 1e-12
    assert is_cp_trace_nonincreasing(mr)
    assert not is_cptp(CPMapCJ(2, 2, -np.eye(4) / 2))


def test_basis_switch_alice_sum_is_cptp():
    alice = basis_switch_strategy().alice
    for a in (0, 1):
        total = alice[a].total()
        assert is_cptp(total)
        assert np.allclose(total.cj, 0.5 * kron(PAULI_I, PAULI_I + (-1) ** a * PAULI_Z))


def test_povm_element_is_its_own_cj():
    e = np.diag([0.3, 0.7])
    m = povm_element(e)
    assert (m.d_in, m.d_out) == (2, 1)
    assert np.allclose(m.cj, e)
    assert np.allclose(cj_from_kraus([np.sqrt(e)[[0]], np.sqrt(e)[[1]]]).cj, e)


def test_kraus_shape_mismatch():
    with pytest.raises(DimensionError):
        cj_from_kraus([np.eye(2), np.eye(3)])


def test_instrument_must_sum_to_cptp():
    with pytest.raises(ValueError):
        Instrument((measure_reprepare([1, 0], [1, 0]),))
    ins = Instrument((measure_reprepare([1, 0], [1, 0]), measure_reprepare([0, 1], [1, 0])))
    assert is_cptp(ins.total())


def test_compose_matches_sequential_action(rng):
    f, g = random_cptp(2, 3, rng), random_cptp(3, 2, rng)
    rho = random_state(2, rng)
    assert np.allclose(apply_inverse_cj(compose(g, f), rho), apply_inverse_cj(g, apply_inverse_cj(f, rho)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_cj_roundtrip_on_basis(d_in, d_out, n_kraus, seed):
    rng = np.random.default_rng(seed)
    kraus = [random_matrix(rng, d_out, d_in) for _ in range(n_kraus)]
    m = cj_from_kraus(kraus)
    assert np.allclose(m.cj, cj_by_definition(kraus, d_in), atol=1e-10)
    for i in range(d_in):
        for j in range(d_in):
            e = np.zeros((d_in, d_in))
            e[i, j] = 1
            direct = sum(k @ e @ k.conj().T for k in kraus)
            assert np.allclose(apply_inverse_cj(m, e), direct, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_instruments_sum_to_cptp(d_in, d_out, n, seed):
    ins = random_instrument(d_in, d_out, n, seed)
    assert len(ins) == n
    assert is_cptp(ins.total())
    assert all(is_cp_trace_nonincreasing(m) for m in ins.maps)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_mixture_is_linear(p, seed):
    rng = np.random.default_rng(seed)
    k1 = [random_matrix(rng, 2, 2)]
    k2 = [random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)]
    m1, m2 = cj_from_kraus(k1), cj_from_kraus(k2)
    mixed = mixture(p, m1, m2)
    assert np.array_equal(mixed.cj, CPMapCJ(2, 2, p * m1.cj + (1 - p) * m2.cj).cj)
    rho = random_state(2, rng)
    lhs = apply_inverse_cj(mixed, rho)
    rhs = p * apply_inverse_cj(m1, rho) + (1 - p) * apply_inverse_cj(m2, rho)
    assert np.allclose(lhs, rhs, atol=1e-12)
