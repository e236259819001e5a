"""Scikit-learn style wrappers so the modules compose with the wider ecosystem.

The estimators build one module per class label from (X, y) training data
and expose the pooled-similarity machinery through fit/transform/predict.
Hyperparameters follow the usual flat-constructor convention, so
``get_params``/``set_params``, pipelines, and grid search all work.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .core import classify
from .exceptions import InvalidParamsError
from .hierarchy import BACKENDS, build_layer
from .svd import OjaLearner
from .validation import as_matrix


class SignatureTransformer(BaseEstimator, TransformerMixin):
    """Encode samples as signatures against per-class template books.

    ``fit(X, y)`` groups the rows of X by label into template books and
    builds one module per class with the configured backend; ``transform``
    maps each sample to its signature (one pooled similarity per class, in
    sorted label order).
    """

    def __init__(self, backend="exact", pooling="max", similarity="dot",
                 sigmoid_gain=1.0, rank=8, rp_dim=16, rp_eps=0.25,
                 rp_augment="never", n_hashes=8, bands_per_hash=2, window=4,
                 oja_epochs=5, seed=0):
        self.backend = backend
        self.pooling = pooling
        self.similarity = similarity
        self.sigmoid_gain = sigmoid_gain
        self.rank = rank
        self.rp_dim = rp_dim
        self.rp_eps = rp_eps
        self.rp_augment = rp_augment
        self.n_hashes = n_hashes
        self.bands_per_hash = bands_per_hash
        self.window = window
        self.oja_epochs = oja_epochs
        self.seed = seed

    def fit(self, X, y):
        X = as_matrix(X, name="X")
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise InvalidParamsError("y must be 1-D with one label per row of X")
        if self.backend not in BACKENDS:
            raise InvalidParamsError(f"backend must be one of {BACKENDS}")
        self.classes_ = np.unique(y)
        books = [X[y == label] for label in self.classes_]
        self.layer_ = build_layer(
            books, self.backend, pooling=self.pooling, similarity=self.similarity,
            sigmoid_gain=self.sigmoid_gain, rank=self.rank, rp_dim=self.rp_dim,
            rp_eps=self.rp_eps, rp_augment=self.rp_augment, n_hashes=self.n_hashes,
            bands_per_hash=self.bands_per_hash, window=self.window,
            oja_epochs=self.oja_epochs, seed=self.seed,
        )
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = as_matrix(X, self.n_features_in_, name="X")
        return np.vstack([self.layer_.signature(row) for row in X])


class NearestTemplateClassifier(BaseEstimator, ClassifierMixin):
    """Pooled-similarity nearest-template classifier.

    With the exact backend and max pooling this is a 1-nearest-neighbor
    rule under cosine similarity, organized as one template book per class;
    approximate backends trade accuracy for insert/query cost.
    """

    def __init__(self, backend="exact", pooling="max", similarity="dot",
                 sigmoid_gain=1.0, rank=8, rp_dim=16, rp_eps=0.25,
                 rp_augment="never", n_hashes=8, bands_per_hash=2, window=4,
                 oja_epochs=5, seed=0):
        self.backend = backend
        self.pooling = pooling
        self.similarity = similarity
        self.sigmoid_gain = sigmoid_gain
        self.rank = rank
        self.rp_dim = rp_dim
        self.rp_eps = rp_eps
        self.rp_augment = rp_augment
        self.n_hashes = n_hashes
        self.bands_per_hash = bands_per_hash
        self.window = window
        self.oja_epochs = oja_epochs
        self.seed = seed

    def fit(self, X, y):
        self.encoder_ = SignatureTransformer(**self.get_params()).fit(X, y)
        self.classes_ = self.encoder_.classes_
        self.n_features_in_ = self.encoder_.n_features_in_
        return self

    def decision_function(self, X):
        return self.encoder_.transform(X)

    def predict(self, X):
        signatures = self.decision_function(X)
        return self.classes_[[classify(sig) for sig in signatures]]


class OjaPCA(BaseEstimator, TransformerMixin):
    """Streaming PCA via the Oja/Sanger update, with an sklearn face.

    ``partial_fit`` consumes batches sample by sample; ``fit`` loops over
    the data for ``epochs`` passes.  ``components_`` holds the
    orthonormalized estimates as rows, like sklearn's PCA.
    """

    def __init__(self, n_components=1, eta0=0.1, tau=1000.0, epochs=5,
                 shuffle=True, seed=0):
        self.n_components = n_components
        self.eta0 = eta0
        self.tau = tau
        self.epochs = epochs
        self.shuffle = shuffle
        self.seed = seed

    def _init_learner(self, dim):
        self.learner_ = OjaLearner(dim, self.n_components, eta0=self.eta0,
                                   tau=self.tau, seed=self.seed)
        self.n_features_in_ = dim

    def partial_fit(self, X, y=None):
        X = as_matrix(X, name="X")
        if not hasattr(self, "learner_"):
            self._init_learner(X.shape[1])
        for row in X:
            self.learner_.update(row)
        self.components_ = self.learner_.basis().T
        return self

    def fit(self, X, y=None):
        X = as_matrix(X, name="X")
        self._init_learner(X.shape[1])
        rng = np.random.default_rng((self.seed, 1))
        for _ in range(int(self.epochs)):
            order = rng.permutation(X.shape[0]) if self.shuffle else range(X.shape[0])
            for i in order:
                self.learner_.update(X[i])
        self.components_ = self.learner_.basis().T
        return self

    def transform(self, X):
        X = as_matrix(X, self.n_features_in_, name="X")
        return X @ self.components_.T

    def inverse_transform(self, X):
        return np.asarray(X, dtype=np.float64) @ self.components_


__all__ = ["SignatureTransformer", "NearestTemplateClassifier", "OjaPCA"]
