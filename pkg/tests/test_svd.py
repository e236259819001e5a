import numpy as np
import pytest

from hwmem import (
    EmptyModuleError,
    EmptyStreamError,
    ExactModule,
    OjaLearner,
    RawUnavailableError,
    SvdModule,
    normalize,
    oja_module,
    oja_train,
    truncated_factors,
)
from hwmem.svd import fix_column_signs

from oracles import jacobi_svd, top_eigvecs


def test_insert_into_empty_rank1():
    m = SvdModule(3, rank=1)
    t = normalize([1.0, 2.0, 2.0])
    m.insert(t)
    assert m.projected.shape == (1, 1)
    assert abs(abs(m.projected[0, 0]) - 1.0) < 1e-12
    assert np.allclose(np.abs(m.basis[:, 0]), np.abs(t), atol=1e-12)


def test_rank_one_data_any_rank_matches_exact():
    rng = np.random.default_rng(0)
    t = normalize(rng.normal(size=5))
    copies = [t] * 4
    exact = ExactModule.from_templates(copies, dim=5)
    for rank in (1, 2, 3):
        m = SvdModule.from_templates(copies, rank, dim=5)
        for _ in range(10):
            x = rng.normal(size=5)
            assert m.query(x) == pytest.approx(exact.query(x), abs=1e-10)
            assert m.query(x, "sum") == pytest.approx(exact.query(x, "sum"), abs=1e-10)


def test_factors_match_jacobi_oracle():
    rng = np.random.default_rng(1)
    templates = np.vstack([normalize(v) for v in rng.normal(size=(6, 4))])
    m = SvdModule.from_templates(templates, rank=2, dim=4)
    _, s_oracle, v_oracle = jacobi_svd(templates)
    basis_oracle = fix_column_signs(v_oracle[:, :2])
    assert np.allclose(m.basis, basis_oracle, atol=1e-9)
    assert np.allclose(m.projected, templates @ basis_oracle, atol=1e-9)
    err_oracle = np.sqrt(np.sum(s_oracle[2:] ** 2))
    assert m.reconstruction_error() == pytest.approx(err_oracle, abs=1e-9)


def test_full_rank_matches_exact():
    rng = np.random.default_rng(2)
    for n, d in ((6, 4), (5, 8), (7, 7)):
        templates = rng.normal(size=(n, d))
        exact = ExactModule.from_templates(templates, dim=d)
        m = SvdModule.from_templates(templates, rank=min(n, d), dim=d)
        for _ in range(10):
            x = rng.normal(size=d)
            assert m.query(x) == pytest.approx(exact.query(x), abs=1e-9)


def test_query_orthogonal_to_basis_is_zero():
    # Templates confined to the first two coordinates; a query in the
    # orthogonal complement projects to nothing.
    templates = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    m = SvdModule.from_templates(templates, rank=2, dim=4)
    assert m.query([0.0, 0.0, 1.0, 1.0]) == pytest.approx(0.0, abs=1e-15)


def test_query_matches_dense_product_oracle():
    rng = np.random.default_rng(3)
    templates = np.vstack([normalize(v) for v in rng.normal(size=(10, 8))])
    m = SvdModule.from_templates(templates, rank=3, dim=8)
    for _ in range(20):
        x = rng.normal(size=8)
        xhat = x / np.linalg.norm(x)
        dense = templates @ m.basis @ m.basis.T @ xhat
        assert m.query(x) == pytest.approx(np.max(dense), abs=1e-10)
        assert m.query(x, "sum") == pytest.approx(np.sum(dense), abs=1e-10)


def test_eckart_young_on_random_instances():
    rng = np.random.default_rng(4)
    for n, d in ((8, 5), (12, 12), (20, 32)):
        templates = np.vstack([normalize(v) for v in rng.normal(size=(n, d))])
        _, s_oracle, _ = jacobi_svd(templates)
        for rank in (1, 2, min(n, d) // 2):
            m = SvdModule.from_templates(templates, rank, dim=d)
            tail = np.sqrt(np.sum(s_oracle[min(rank, n, d):] ** 2))
            assert m.reconstruction_error() ** 2 == pytest.approx(tail ** 2, abs=1e-8)


def test_query_error_bounded_by_tail():
    rng = np.random.default_rng(5)
    templates = np.vstack([normalize(v) for v in rng.normal(size=(12, 10))])
    exact = ExactModule.from_templates(templates, dim=10)
    _, s_oracle, _ = jacobi_svd(templates)
    n = len(templates)
    for rank in (1, 3, 5, 8):
        m = SvdModule.from_templates(templates, rank, dim=10)
        tail = s_oracle[rank] if rank < len(s_oracle) else 0.0
        for _ in range(10):
            x = rng.normal(size=10)
            gap = abs(m.query(x) - exact.query(x))
            assert gap <= 2.0 * tail * np.sqrt(n) + 1e-12


def test_reconstruction_error_monotone_in_rank():
    rng = np.random.default_rng(6)
    templates = np.vstack([normalize(v) for v in rng.normal(size=(9, 7))])
    errors = [
        SvdModule.from_templates(templates, r, dim=7).reconstruction_error()
        for r in range(1, 8)
    ]
    for lo, hi in zip(errors[1:], errors[:-1]):
        assert lo <= hi + 1e-12


def test_insert_equals_batch_build():
    rng = np.random.default_rng(7)
    templates = rng.normal(size=(6, 5))
    incremental = SvdModule(5, rank=3)
    for t in templates:
        incremental.insert(t)
    batch = SvdModule.from_templates(templates, rank=3, dim=5)
    assert np.allclose(incremental.basis, batch.basis, atol=1e-10)
    assert np.allclose(incremental.projected, batch.projected, atol=1e-10)


def test_compressed_module_refuses_insert():
    rng = np.random.default_rng(8)
    m = SvdModule.from_templates(rng.normal(size=(4, 4)), rank=2, dim=4, keep_raw=False)
    x = rng.normal(size=4)
    m.query(x)  # queries still fine
    with pytest.raises(RawUnavailableError):
        m.insert(x)
    with pytest.raises(RawUnavailableError):
        m.reconstruction_error()


def test_invariants_of_factors():
    rng = np.random.default_rng(9)
    m = SvdModule.from_templates(rng.normal(size=(10, 6)), rank=4, dim=6)
    gram = m.basis.T @ m.basis
    assert np.allclose(gram, np.eye(4), atol=1e-10)
    assert np.allclose(m.projected, m.raw.matrix @ m.basis, atol=1e-10)


def test_empty_module_query_rejected():
    with pytest.raises(EmptyModuleError):
        SvdModule(4, rank=2).query([1.0, 0.0, 0.0, 0.0])


def test_truncated_factors_sign_convention():
    rng = np.random.default_rng(10)
    _, basis, _ = truncated_factors(rng.normal(size=(8, 6)), 3)
    for j in range(basis.shape[1]):
        first_nonzero = basis[np.abs(basis[:, j]) > 1e-12, j][0]
        assert first_nonzero > 0


# --- Oja learner -----------------------------------------------------------


def test_oja_fixed_point_aligned():
    learner = OjaLearner(2, 1, init=np.array([[1.0], [0.0]]))
    learner.update([1.0, 0.0])
    assert np.array_equal(learner.weights, [[1.0], [0.0]])


def test_oja_fixed_point_orthogonal():
    learner = OjaLearner(2, 1, init=np.array([[0.0], [1.0]]))
    learner.update([1.0, 0.0])
    assert np.array_equal(learner.weights, [[0.0], [1.0]])


def test_oja_recovers_top_eigenvector_from_stream():
    rng = np.random.default_rng(11)
    # Anisotropic gaussian: top eigenvalue 1.0, second 0.25 (gap 4x >= 2x).
    scales = np.array([1.0, 0.5, 0.3, 0.3, 0.2, 0.2])
    data = rng.normal(size=(10_000, 6)) * scales
    learner = OjaLearner(6, 1, seed=0)
    for x in data:
        learner.update(x)
    top = top_eigvecs(data, 1)[:, 0]
    w = learner.weights[:, 0]
    assert abs(w @ top) / np.linalg.norm(w) >= 0.99


def test_oja_weight_norms_near_one_after_convergence():
    rng = np.random.default_rng(12)
    scales = np.array([1.0, 0.4, 0.2, 0.1])
    data = rng.normal(size=(4000, 4)) * scales
    learner = OjaLearner(4, 2, seed=1)
    for x in data:
        learner.update(x)
    norms = np.linalg.norm(learner.weights, axis=0)
    assert np.all(np.abs(norms - 1.0) < 0.01)


def test_oja_train_constant_stream():
    t = normalize([1.0, 2.0, -1.0, 0.5])
    basis = oja_train([t] * 200, 1, epochs=5, seed=0)
    assert np.allclose(np.abs(basis[:, 0]), np.abs(t), atol=1e-3)


def test_oja_train_full_rank_spans_space():
    rng = np.random.default_rng(13)
    data = rng.normal(size=(300, 4))
    basis = oja_train(data, 4, epochs=3, seed=0)
    projector = basis @ basis.T
    assert np.allclose(projector, np.eye(4), atol=1e-3)


def test_oja_train_principal_angles_against_eigh_oracle():
    from scipy.linalg import subspace_angles

    rng = np.random.default_rng(14)
    scales = np.linspace(1.0, 0.1, 16)
    data = rng.normal(size=(1000, 16)) * scales
    basis = oja_train(data, 3, epochs=50, seed=2)
    oracle = top_eigvecs(data, 3)
    assert subspace_angles(basis, oracle).max() <= 0.1


def test_oja_train_basis_orthonormal():
    rng = np.random.default_rng(15)
    basis = oja_train(rng.normal(size=(200, 8)), 3, epochs=2, seed=0)
    assert np.allclose(basis.T @ basis, np.eye(3), atol=1e-6)


def test_oja_train_empty_stream():
    with pytest.raises(EmptyStreamError):
        oja_train([], 1)


def test_oja_learning_rate_schedule():
    learner = OjaLearner(3, 1, eta0=0.1, tau=1000.0, seed=0)
    assert learner.learning_rate == pytest.approx(0.1)
    for _ in range(1000):
        learner.update([0.0, 0.0, 0.0])
    assert learner.learning_rate == pytest.approx(0.05)


def test_oja_module_matches_svd_module_loosely():
    # An Oja-trained basis should approximate the batch factors well enough
    # that queries agree to a few percent where the spectrum is unambiguous
    # (rank 1 on clustered data: the leading direction has a wide gap).
    rng = np.random.default_rng(16)
    base = normalize(rng.normal(size=8))
    templates = [normalize(base + 0.2 * rng.normal(size=8)) for _ in range(20)]
    batch = SvdModule.from_templates(templates, rank=1, dim=8)
    streaming = oja_module(templates, rank=1, dim=8, epochs=40, seed=3)
    for _ in range(10):
        x = rng.normal(size=8)
        assert streaming.query(x) == pytest.approx(batch.query(x), abs=0.02)
