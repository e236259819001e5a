import numpy as np
import pytest
from sklearn.base import clone
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import Pipeline

from hwmem import NearestTemplateClassifier, OjaPCA, SignatureTransformer, build_layer

from oracles import top_eigvecs


def labeled_blobs(rng, n_classes=3, per_class=8, dim=6, spread=0.3):
    X, y = [], []
    for c in range(n_classes):
        center = rng.normal(size=dim)
        center /= np.linalg.norm(center)
        for _ in range(per_class):
            v = center + spread * rng.normal(size=dim)
            X.append(v / np.linalg.norm(v))
            y.append(c)
    return np.array(X), np.array(y)


def test_transformer_signature_matches_layer():
    rng = np.random.default_rng(0)
    X, y = labeled_blobs(rng)
    enc = SignatureTransformer(backend="exact").fit(X, y)
    layer = build_layer([X[y == c] for c in np.unique(y)], "exact")
    out = enc.transform(X[:5])
    assert out.shape == (5, 3)
    for row, x in zip(out, X[:5]):
        assert np.allclose(row, layer.signature(x), atol=1e-15)


def test_transformer_get_set_params_roundtrip():
    enc = SignatureTransformer(backend="svd", rank=3, pooling="sum")
    params = enc.get_params()
    assert params["rank"] == 3
    other = SignatureTransformer().set_params(**params)
    assert other.get_params() == params


def test_transformer_clone_and_refit():
    rng = np.random.default_rng(1)
    X, y = labeled_blobs(rng)
    enc = SignatureTransformer(backend="wta", window=3, seed=4)
    cloned = clone(enc)
    a = enc.fit(X, y).transform(X)
    b = cloned.fit(X, y).transform(X)
    assert np.array_equal(a, b)


def test_classifier_recovers_blob_labels():
    rng = np.random.default_rng(2)
    X, y = labeled_blobs(rng, spread=0.15)
    clf = NearestTemplateClassifier(backend="exact").fit(X, y)
    assert (clf.predict(X) == y).all()
    probes = X + 0.05 * rng.normal(size=X.shape)
    assert (clf.predict(probes) == y).mean() >= 0.9


def test_classifier_is_argmax_of_decision_function():
    rng = np.random.default_rng(3)
    X, y = labeled_blobs(rng)
    clf = NearestTemplateClassifier(backend="svd", rank=2).fit(X, y)
    scores = clf.decision_function(X[:7])
    preds = clf.predict(X[:7])
    assert (preds == clf.classes_[np.argmax(scores, axis=1)]).all()


def test_classifier_string_labels():
    rng = np.random.default_rng(4)
    X, y = labeled_blobs(rng, n_classes=2)
    names = np.array(["cat", "dog"])[y]
    clf = NearestTemplateClassifier().fit(X, names)
    assert set(clf.predict(X)) <= {"cat", "dog"}


def test_pipeline_composition():
    rng = np.random.default_rng(5)
    X, y = labeled_blobs(rng, n_classes=2, per_class=12)
    pipe = Pipeline([
        ("signatures", SignatureTransformer(backend="svd", rank=2)),
        ("logit", LogisticRegression(max_iter=500)),
    ])
    pipe.fit(X, y)
    assert pipe.score(X, y) >= 0.9


def test_oja_pca_recovers_leading_subspace():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(1500, 10)) * np.linspace(1.0, 0.1, 10)
    pca = OjaPCA(n_components=2, epochs=30, seed=0).fit(data)
    oracle = top_eigvecs(data, 2)
    overlap = np.abs(pca.components_ @ oracle)
    # each learned row concentrates on the matching oracle column
    assert overlap[0, 0] > 0.98 and overlap[1, 1] > 0.95


def test_oja_pca_partial_fit_streaming():
    rng = np.random.default_rng(7)
    data = rng.normal(size=(2000, 6)) * np.array([1.0, 0.4, 0.2, 0.1, 0.1, 0.1])
    pca = OjaPCA(n_components=1, seed=1)
    for chunk in np.array_split(data, 10):
        pca.partial_fit(chunk)
    top = top_eigvecs(data, 1)[:, 0]
    assert abs(pca.components_[0] @ top) > 0.98


def test_oja_pca_transform_shapes_and_orthonormality():
    rng = np.random.default_rng(8)
    data = rng.normal(size=(300, 8))
    pca = OjaPCA(n_components=3, epochs=5, seed=2).fit(data)
    assert pca.components_.shape == (3, 8)
    assert np.allclose(pca.components_ @ pca.components_.T, np.eye(3), atol=1e-10)
    assert pca.transform(data[:4]).shape == (4, 3)
