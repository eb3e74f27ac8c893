import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depolcap import core
from depolcap.core import (
    BipartiteState,
    Channel,
    DensityMatrix,
    InvalidChannelError,
    InvalidStateError,
    PureState,
    apply_channel,
    basis_state,
    choi_matrix,
    identity_channel,
    kraus_superoperator,
    maximally_mixed,
    min_choi_eigenvalue,
    nats_to_bits,
    p_norm_derivative_at_1,
    partial_trace,
    ptrace_matrix,
    random_channel,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    relative_entropy,
    schatten_p_norm,
    spawn_rngs,
    superoperator_from_action,
    tensor_channel,
    von_neumann_entropy,
)

LN2 = math.log(2.0)

# Frozen reference values for the diag(3/4, 1/4) state.
ENTROPY_75_25 = 0.5623351446188083
PNORM2_75_25 = 0.7905694150420949
RELENT_75_25_VS_MIXED = 0.13081203594113697


def diag_state(*probs):
    return DensityMatrix(np.diag(np.asarray(probs, dtype=complex)))


class TestDensityMatrix:
    def test_valid(self):
        rho = diag_state(0.75, 0.25)
        assert rho.dim == 2
        assert np.allclose(np.asarray(rho), np.diag([0.75, 0.25]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidStateError, match="Hermitian"):
            DensityMatrix([[0.5, 1e-6], [0.0, 0.5]])

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidStateError, match="trace"):
            DensityMatrix(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidStateError, match="PSD"):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_accepts_rounding_level_negativity(self):
        rho = DensityMatrix(np.diag([1.0 + 1e-12, -1e-12]))
        assert rho.eigenvalues()[0] == 0.0

    def test_buffer_is_frozen(self):
        rho = diag_state(0.5, 0.5)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 2.0

    def test_rejects_non_square(self):
        with pytest.raises(InvalidStateError, match="square"):
            DensityMatrix(np.ones((2, 3)))


class TestPureState:
    def test_valid_and_projector(self):
        psi = PureState([1 / math.sqrt(2), 1j / math.sqrt(2)])
        rho = psi.projector()
        assert rho.dim == 2
        assert von_neumann_entropy(rho) < 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidStateError, match="norm"):
            PureState([1.0, 1.0])

    def test_buffer_is_frozen(self):
        psi = basis_state(3, 0)
        with pytest.raises(ValueError):
            psi.amplitudes[1] = 1.0


class TestChannel:
    def test_identity(self):
        ch = identity_channel(3)
        rho = random_density_matrix(3, seed=0)
        out = ch(rho)
        assert np.allclose(np.asarray(out), np.asarray(rho))

    def test_rejects_non_trace_preserving(self):
        with pytest.raises(InvalidChannelError, match="trace preserving"):
            Channel([np.eye(2) * 0.5])

    def test_rejects_mixed_shapes(self):
        with pytest.raises(InvalidChannelError, match="shape"):
            Channel([np.eye(2), np.eye(3)])

    def test_output_is_valid_state(self):
        ch = random_channel(3, 3, 4, seed=7)
        rho = random_density_matrix(3, seed=8)
        out = apply_channel(ch, rho)
        assert isinstance(out, DensityMatrix)
        assert abs(np.trace(np.asarray(out)) - 1.0) < 1e-12

    def test_dimension_mismatch(self):
        ch = identity_channel(2)
        with pytest.raises(InvalidChannelError, match="dim"):
            apply_channel(ch, random_density_matrix(3, seed=1))

    def test_superoperator_matches_action(self):
        ch = random_channel(3, 3, 2, seed=11)
        rho = np.asarray(random_density_matrix(3, seed=12))
        via_super = (ch.superoperator @ rho.reshape(-1)).reshape(3, 3)
        assert np.allclose(via_super, ch.apply_matrix(rho), atol=1e-13)

    def test_adjoint_is_unital_map_adjoint(self):
        ch = random_channel(3, 3, 3, seed=13)
        a = np.asarray(random_density_matrix(3, seed=14))
        b = np.asarray(random_density_matrix(3, seed=15))
        lhs = np.trace(a.conj().T @ ch.apply_matrix(b))
        rhs = np.trace(ch.adjoint_apply_matrix(a).conj().T @ b)
        assert abs(lhs - rhs) < 1e-12


class TestEntropy:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(basis_state(4, 2).projector()) == 0.0

    def test_maximally_mixed(self):
        for d in (2, 3, 5):
            assert abs(von_neumann_entropy(maximally_mixed(d)) - math.log(d)) < 1e-14

    def test_frozen_value(self):
        assert abs(von_neumann_entropy(diag_state(0.75, 0.25)) - ENTROPY_75_25) < 1e-15

    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 10**6))
    def test_unitary_invariance(self, seed):
        rho = np.asarray(random_density_matrix(4, seed=seed))
        u = random_unitary(4, seed=seed + 1)
        rotated = u @ rho @ u.conj().T
        assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-10

    def test_nats_to_bits(self):
        assert abs(nats_to_bits(LN2) - 1.0) < 1e-15


class TestSchattenNorm:
    def test_trace_norm_of_state_is_one(self):
        assert abs(schatten_p_norm(random_density_matrix(5, seed=3), 1.0) - 1.0) < 1e-12

    def test_frozen_value(self):
        assert abs(schatten_p_norm(diag_state(0.75, 0.25), 2.0) - PNORM2_75_25) < 1e-15

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError, match="p must be >= 1"):
            schatten_p_norm(maximally_mixed(2), 0.5)

    def test_monotone_nonincreasing_in_p(self):
        rho = random_density_matrix(4, seed=9)
        values = [schatten_p_norm(rho, p) for p in (1.0, 1.5, 2.0, 3.0, 10.0)]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))

    def test_derivative_at_one_gives_negative_entropy(self):
        rho = random_density_matrix(4, seed=21)
        assert abs(p_norm_derivative_at_1(np.asarray(rho))
                   + von_neumann_entropy(rho)) < 1e-6


class TestRelativeEntropy:
    def test_frozen_value(self):
        val = relative_entropy(diag_state(0.75, 0.25), maximally_mixed(2))
        assert abs(val - RELENT_75_25_VS_MIXED) < 1e-15

    def test_zero_on_identical_states(self):
        rho = random_density_matrix(3, seed=5)
        assert relative_entropy(rho, rho) == 0.0

    def test_infinite_on_support_violation(self):
        rho = basis_state(2, 0).projector()
        omega = basis_state(2, 1).projector()
        assert relative_entropy(rho, omega) == math.inf

    def test_mixed_vs_pure_reference_infinite(self):
        assert relative_entropy(maximally_mixed(2), basis_state(2, 0).projector()) == math.inf

    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 10**6))
    def test_nonnegative(self, seed):
        rho = random_density_matrix(3, seed=seed)
        omega = random_density_matrix(3, seed=seed + 1)
        assert relative_entropy(rho, omega) >= 0.0

    def test_vs_mixed_reference_identity(self):
        # S(rho, I/d) = ln d - S(rho)
        rho = random_density_matrix(4, seed=30)
        lhs = relative_entropy(rho, maximally_mixed(4))
        rhs = math.log(4) - von_neumann_entropy(rho)
        assert abs(lhs - rhs) < 1e-12


class TestPartialTrace:
    def test_product_state_factors(self):
        a = np.asarray(random_density_matrix(2, seed=41))
        b = np.asarray(random_density_matrix(3, seed=42))
        rho12 = BipartiteState(2, 3, DensityMatrix(np.kron(a, b)))
        assert np.allclose(np.asarray(partial_trace(rho12, 1)), a, atol=1e-13)
        assert np.allclose(np.asarray(partial_trace(rho12, 2)), b, atol=1e-13)

    def test_maximally_entangled_reduces_to_mixed(self):
        d = 3
        v = np.zeros(d * d, dtype=complex)
        for i in range(d):
            v[i * d + i] = 1.0 / math.sqrt(d)
        rho12 = BipartiteState(d, d, PureState(v).projector())
        for keep in (1, 2):
            assert np.allclose(np.asarray(partial_trace(rho12, keep)),
                               np.eye(d) / d, atol=1e-14)

    def test_ptrace_matrix_general_blocks(self):
        m = np.arange(36, dtype=complex).reshape(6, 6)
        left = ptrace_matrix(m, 2, 3, keep=1)
        manual = np.array([[np.trace(m[:3, :3]), np.trace(m[:3, 3:])],
                           [np.trace(m[3:, :3]), np.trace(m[3:, 3:])]])
        assert np.allclose(left, manual)

    def test_keep_argument_validation(self):
        with pytest.raises(ValueError, match="keep"):
            ptrace_matrix(np.eye(4), 2, 2, keep=3)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidStateError, match="factor dims"):
            BipartiteState(2, 2, random_density_matrix(6, seed=1))


class TestTensorChannel:
    def test_acts_factorwise_on_product_states(self):
        phi = random_channel(2, 2, 2, seed=50)
        psi = random_channel(3, 3, 2, seed=51)
        a = np.asarray(random_density_matrix(2, seed=52))
        b = np.asarray(random_density_matrix(3, seed=53))
        joint = tensor_channel(phi, psi).apply_matrix(np.kron(a, b))
        expected = np.kron(phi.apply_matrix(a), psi.apply_matrix(b))
        assert np.allclose(joint, expected, atol=1e-13)

    def test_kraus_count_multiplies(self):
        phi = random_channel(2, 2, 3, seed=54)
        psi = random_channel(2, 2, 4, seed=55)
        assert len(tensor_channel(phi, psi).kraus_ops) == 12


class TestSuperoperatorsAndChoi:
    def test_action_superoperator_matches_kraus(self):
        ch = random_channel(3, 3, 2, seed=60)
        s = superoperator_from_action(ch.apply_matrix, 3)
        assert np.allclose(s, kraus_superoperator(ch.kraus_ops), atol=1e-13)

    def test_choi_of_channel_is_psd_unit_trace(self):
        ch = random_channel(3, 3, 3, seed=61)
        j = ch.choi()
        assert np.linalg.eigvalsh(j)[0] > -1e-12
        assert abs(np.trace(j) - 1.0) < 1e-12

    def test_transpose_map_is_not_cp(self):
        assert min_choi_eigenvalue(lambda m: m.T, 2) < -0.1

    def test_identity_choi_is_maximally_entangled(self):
        d = 2
        j = choi_matrix(lambda m: m, d)
        v = np.zeros(d * d, dtype=complex)
        v[0], v[3] = 1 / math.sqrt(2), 1 / math.sqrt(2)
        assert np.allclose(j, np.outer(v, v.conj()), atol=1e-14)


class TestRandomGeneration:
    def test_density_matrix_deterministic(self):
        a = np.asarray(random_density_matrix(4, seed=123))
        b = np.asarray(random_density_matrix(4, seed=123))
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        a = np.asarray(random_density_matrix(4, seed=123))
        b = np.asarray(random_density_matrix(4, seed=124))
        assert not np.allclose(a, b)

    def test_rank_control(self):
        rho = random_density_matrix(4, seed=5, rank=2)
        assert np.sum(rho.eigenvalues() > 1e-12) == 2

    def test_unitary_is_unitary(self):
        u = random_unitary(5, seed=6)
        assert np.allclose(u @ u.conj().T, np.eye(5), atol=1e-12)

    def test_channel_deterministic_and_tp(self):
        ch1 = random_channel(3, 3, 4, seed=77)
        ch2 = random_channel(3, 3, 4, seed=77)
        for k1, k2 in zip(ch1.kraus_ops, ch2.kraus_ops):
            assert np.array_equal(k1, k2)
        tp = sum(k.conj().T @ k for k in ch1.kraus_ops)
        assert np.allclose(tp, np.eye(3), atol=1e-12)

    def test_pure_state_normalized(self):
        psi = random_pure_state(6, seed=8)
        assert abs(np.linalg.norm(np.asarray(psi)) - 1.0) < 1e-13

    def test_spawned_streams_are_independent(self):
        rngs = spawn_rngs(99, 3)
        draws = [r.standard_normal(4) for r in rngs]
        assert not np.allclose(draws[0], draws[1])
        again = spawn_rngs(99, 3)
        assert np.array_equal(draws[2], again[2].standard_normal(4))
