import numpy as np
import pytest

from gibbslab.geometry import Region, chain, region
from gibbslab.operators import (
    DenseCapError, DensityMatrix, LocalOperator, PAULI_X, PAULI_Y, PAULI_Z,
    cond_expectation, embed, herm_exp, herm_fn, herm_log, identity, mul,
    op_norm, partial_trace, pauli_on, random_hermitian, trace, trace_norm,
)


def two_site():
    return chain(2)


def test_embed_identity():
    Y = chain(3)
    one = identity(region([0]))
    assert np.allclose(embed(one, Y).matrix, np.eye(8))


def test_embed_preserves_norm():
    rng = np.random.default_rng(0)
    Y = chain(3)
    Q = LocalOperator(region([1]), random_hermitian(rng, 2), 2)
    assert op_norm(embed(Q, Y)) == pytest.approx(op_norm(Q))


def test_embed_pauli_z_ordering():
    # site 0 is the outer (slowest) tensor leg
    Z0 = pauli_on("Z", 0, two_site())
    assert np.allclose(Z0.matrix, np.diag([1, 1, -1, -1]))
    Z1 = pauli_on("Z", 1, two_site())
    assert np.allclose(Z1.matrix, np.diag([1, -1, 1, -1]))


def test_embed_permutes_legs():
    # embedding an operator given on {1} into {0,1} must land on the inner leg
    rng = np.random.default_rng(1)
    M = random_hermitian(rng, 2)
    Q = LocalOperator(region([1]), M, 2)
    assert np.allclose(embed(Q, two_site()).matrix, np.kron(np.eye(2), M))


def test_embed_support_violation():
    with pytest.raises(ValueError, match="not contained"):
        embed(identity(region([5])), chain(2))


def test_mul_disjoint_is_tensor_product():
    rng = np.random.default_rng(2)
    A = LocalOperator(region([0]), random_hermitian(rng, 2), 2)
    B = LocalOperator(region([1]), random_hermitian(rng, 2), 2)
    assert np.allclose(mul(A, B).matrix, np.kron(A.matrix, B.matrix))


def test_pauli_commutators():
    Y = two_site()
    Z0, Z1 = pauli_on("Z", 0, Y), pauli_on("Z", 1, Y)
    assert np.allclose(mul(Z0, Z1).matrix, mul(Z1, Z0).matrix)
    X0 = pauli_on("X", 0, Y)
    comm = mul(X0, Z0).sub(mul(Z0, X0))
    assert np.allclose(comm.matrix, -2j * pauli_on("Y", 0, Y).matrix)


def test_partial_trace_tensor_factor():
    rng = np.random.default_rng(3)
    A = LocalOperator(region([0]), random_hermitian(rng, 2), 2)
    B = LocalOperator(region([1]), random_hermitian(rng, 2), 2)
    AB = mul(A, B)
    red = partial_trace(AB, region([1]))
    assert np.allclose(red.matrix, np.trace(B.matrix) * A.matrix)


def test_partial_trace_all_sites_scalar():
    rng = np.random.default_rng(4)
    Q = LocalOperator(two_site(), random_hermitian(rng, 4), 2)
    full = partial_trace(Q, two_site())
    assert full.matrix.shape == (1, 1)
    assert full.matrix[0, 0] == pytest.approx(np.trace(Q.matrix))


def test_partial_trace_bell_state():
    bell = np.zeros((4, 4), dtype=complex)
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(v, v.conj())
    Q = LocalOperator(two_site(), bell, 2)
    red = partial_trace(Q, region([1]))
    assert np.allclose(red.matrix, np.eye(2) / 2)


def test_partial_trace_duality_random():
    # Tr[tr_X(Q) R] = Tr[Q (R ox 1_X)] for R supported off X
    rng = np.random.default_rng(5)
    Y = chain(3)
    X = region([2])
    for _ in range(10):
        Q = LocalOperator(Y, random_hermitian(rng, 8), 2)
        R = LocalOperator(region([0, 1]), random_hermitian(rng, 4), 2)
        lhs = trace(mul(partial_trace(Q, X), R))
        rhs = trace(mul(Q, embed(R, Y)))
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_embed_then_trace_recovers_scaled():
    rng = np.random.default_rng(6)
    Q = LocalOperator(region([0]), random_hermitian(rng, 2), 2)
    big = embed(Q, chain(3))
    back = partial_trace(big, region([1, 2]))
    assert np.allclose(back.matrix, 4 * Q.matrix)


def test_cond_expectation_unital_idempotent():
    rng = np.random.default_rng(7)
    Y = chain(3)
    keep = region([0, 1])
    assert np.allclose(cond_expectation(identity(Y), keep).matrix, np.eye(4))
    Q = LocalOperator(Y, random_hermitian(rng, 8), 2)
    once = cond_expectation(Q, keep)
    twice = cond_expectation(once, keep)
    assert np.allclose(once.matrix, twice.matrix)


def test_cond_expectation_empty_keep():
    rng = np.random.default_rng(8)
    Q = LocalOperator(two_site(), random_hermitian(rng, 4), 2)
    out = cond_expectation(Q, Region((), 1))
    assert out.matrix.shape == (1, 1)
    assert out.matrix[0, 0] == pytest.approx(np.trace(Q.matrix) / 4)


def test_herm_fn_exp_log_roundtrip():
    rng = np.random.default_rng(9)
    H = LocalOperator(two_site(), random_hermitian(rng, 4), 2)
    back = herm_log(herm_exp(H))
    assert np.max(np.abs(back.matrix - H.matrix)) <= 1e-9


def test_herm_fn_diagonal():
    Q = LocalOperator(region([0]), np.diag([1.0, -2.0]), 2)
    E = herm_exp(Q)
    assert np.allclose(sorted(np.diag(E.matrix).real), sorted([np.e, np.exp(-2)]))


def test_herm_fn_spectrum_mapping():
    rng = np.random.default_rng(10)
    H = LocalOperator(two_site(), random_hermitian(rng, 4), 2)
    w = np.linalg.eigvalsh(H.matrix)
    we = np.linalg.eigvalsh(herm_exp(H).matrix)
    assert np.allclose(np.sort(np.exp(w)), np.sort(we))


def test_herm_fn_rejects_non_hermitian():
    Q = LocalOperator(region([0]), np.array([[0, 1], [0, 0]]), 2)
    with pytest.raises(ValueError, match="Hermitian"):
        herm_fn(Q, np.exp)


def test_herm_log_rejects_non_pd():
    Q = LocalOperator(region([0]), np.diag([1.0, -0.5]), 2)
    with pytest.raises(ValueError, match="positive definite"):
        herm_log(Q)


def test_norms_identity_and_pauli():
    one = identity(chain(3))
    assert op_norm(one) == pytest.approx(1.0)
    assert trace_norm(one) == pytest.approx(8.0)
    X = LocalOperator(region([0]), PAULI_X, 2)
    assert op_norm(X) == pytest.approx(1.0)
    assert trace_norm(X) == pytest.approx(2.0)


def test_op_norm_le_trace_norm_random():
    rng = np.random.default_rng(11)
    for _ in range(10):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        Q = LocalOperator(two_site(), m, 2)
        assert op_norm(Q) <= trace_norm(Q) + 1e-12


def test_dense_cap_enforced():
    with pytest.raises(DenseCapError, match="dense cap"):
        identity(chain(15))


def test_density_matrix_validation():
    good = DensityMatrix(LocalOperator(region([0]), np.diag([0.5, 0.5]), 2))
    assert good.eigvals() == pytest.approx([0.5, 0.5])
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(LocalOperator(region([0]), np.diag([1.0, 1.0]), 2))
    with pytest.raises(ValueError, match="eigenvalue"):
        DensityMatrix(LocalOperator(region([0]), np.diag([1.5, -0.5]), 2))
