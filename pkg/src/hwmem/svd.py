"""Rank-r truncated-SVD module and streaming Hebbian (Oja / Sanger) PCA.

The SVD module stores templates in factored form: a column-orthonormal
basis (top right singular vectors of the stored-template matrix) and the
templates projected onto it.  Queries project the input onto the basis
before scoring, so a rank-r module answers with the best rank-r
approximation of the exact pooled similarity.

The Oja learner is the incremental alternative: a Hebbian update that
converges to the same leading principal directions after several passes
over the data, suitable when recomputing a dense SVD on every insert is
off the table.
"""

from __future__ import annotations

import numpy as np

from .core import TemplateBook, normalize, pool
from .exceptions import (
    EmptyModuleError,
    EmptyStreamError,
    InvalidParamsError,
    RawUnavailableError,
)
from .validation import as_matrix, as_vector, nonzero_norm

_SIGN_EPS = 1e-12


def fix_column_signs(basis: np.ndarray, *companions: np.ndarray):
    """Force each basis column's first non-negligible entry non-negative.

    SVD factors are only defined up to per-column sign; pinning the sign
    makes serialized modules reproducible.  Companion matrices (projected
    coordinates) get the same flips so products are unchanged.
    """
    basis = basis.copy()
    companions = tuple(c.copy() for c in companions)
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.nonzero(np.abs(col) > _SIGN_EPS)[0]
        if nz.size and col[nz[0]] < 0:
            basis[:, j] = -col
            for c in companions:
                c[:, j] = -c[:, j]
    if companions:
        return (basis, *companions)
    return basis


def truncated_factors(matrix: np.ndarray, rank: int):
    """Best rank-r factors of a template matrix.

    Returns ``(projected, basis, singular_values)`` where ``basis`` holds the
    top-r right singular vectors as columns (sign-fixed) and
    ``projected = matrix @ basis``.  The effective rank is capped at
    ``min(rank, n, d)``.
    """
    matrix = as_matrix(matrix, name="matrix")
    n, d = matrix.shape
    r = min(int(rank), n, d)
    if n == 0:
        return np.zeros((0, 0)), np.zeros((d, 0)), np.zeros(0)
    _, s, vt = np.linalg.svd(matrix, full_matrices=False)
    basis = fix_column_signs(vt[:r].T)
    return matrix @ basis, basis, s


class SvdModule:
    """Rank-r module: templates compressed onto their top singular subspace.

    With ``keep_raw=True`` (default) the original templates are retained so
    that each insert can recompute exact factors of the grown matrix.  A
    compressed module (``compress()`` or ``keep_raw=False`` in the builders)
    drops the raw book; queries still work but insert raises
    RawUnavailableError.
    """

    backend = "svd"

    def __init__(self, dim: int, rank: int, keep_raw: bool = True, label=None):
        if rank < 1:
            raise InvalidParamsError(f"rank must be >= 1, got {rank}")
        self.dim = int(dim)
        self.rank = int(rank)
        self.label = label
        self.raw: TemplateBook | None = TemplateBook(dim, label=label) if keep_raw else None
        self.basis = np.zeros((dim, 0))
        self.projected = np.zeros((0, 0))
        self.singular_values = np.zeros(0)
        self._n = 0

    @classmethod
    def from_templates(cls, templates, rank: int, dim: int | None = None,
                       keep_raw: bool = True, label=None) -> "SvdModule":
        """Build a module from an iterable of templates with one SVD pass."""
        rows = [normalize(t) for t in templates]
        if dim is None:
            if not rows:
                raise InvalidParamsError("need dim when templates are empty")
            dim = rows[0].size
        module = cls(dim, rank, keep_raw=True, label=label)
        for row in rows:
            module.raw.insert(row)
        module._refit()
        if not keep_raw:
            module.compress()
        return module

    @classmethod
    def from_basis(cls, basis, templates, rank: int | None = None,
                   keep_raw: bool = True, label=None) -> "SvdModule":
        """Build a module around an externally learned basis (e.g. Oja).

        The basis is used as-is; templates are projected onto it.  A later
        insert recomputes batch-SVD factors and replaces the given basis.
        """
        basis = as_matrix(basis, name="basis")
        dim, r = basis.shape
        module = cls(dim, rank if rank is not None else max(r, 1),
                     keep_raw=True, label=label)
        for t in templates:
            module.raw.insert(t)
        module.basis = basis.copy()
        module.projected = module.raw.matrix @ basis
        module.singular_values = np.zeros(0)
        module._n = len(module.raw)
        if not keep_raw:
            module.compress()
        return module

    def compress(self) -> None:
        """Drop the raw templates; models a store that keeps factors only."""
        self.raw = None

    def insert(self, t) -> None:
        """Add a template and recompute the rank-r factors of the grown book."""
        if self.raw is None:
            raise RawUnavailableError(
                "module was compressed; cannot insert without raw templates"
            )
        self.raw.insert(t)
        self._refit()

    def _refit(self) -> None:
        self.projected, self.basis, self.singular_values = truncated_factors(
            self.raw.matrix, self.rank
        )
        self._n = len(self.raw)

    def query(self, x, pooling: str = "max") -> float:
        """Pool the rank-r approximate similarities of ``x`` to stored templates.

        Computes ``projected @ (basis.T @ x / ||x||)``; the input is
        normalized so the result stays on the same scale as the exact
        dot-similarity query.
        """
        if self._n == 0:
            raise EmptyModuleError("cannot query an empty module")
        x = as_vector(x, self.dim, "x")
        y = self.basis.T @ (x / nonzero_norm(x, "x"))
        return pool(self.projected @ y, pooling)

    def reconstruction_error(self) -> float:
        """Frobenius error of the rank-r reconstruction of the raw book."""
        if self.raw is None:
            raise RawUnavailableError("reconstruction error needs raw templates")
        t = self.raw.matrix
        return float(np.linalg.norm(t - (t @ self.basis) @ self.basis.T))

    def __len__(self) -> int:
        return self._n


class OjaLearner:
    """Streaming principal-direction estimator (Oja's rule).

    One component follows ``w <- w + eta * y * (x - y * w)`` with
    ``y = w . x``; multiple components use Sanger's deflation so component j
    sees the input with components 1..j stripped out.  Learning rate decays
    as ``eta0 / (1 + t / tau)`` over the global update count t.
    """

    def __init__(self, dim: int, n_components: int = 1, eta0: float = 0.1,
                 tau: float = 1000.0, seed: int = 0, init=None):
        if n_components < 1 or n_components > dim:
            raise InvalidParamsError(
                f"n_components must be in [1, {dim}], got {n_components}"
            )
        self.dim = int(dim)
        self.n_components = int(n_components)
        self.eta0 = float(eta0)
        self.tau = float(tau)
        self.step = 0
        if init is not None:
            w = as_matrix(init, name="init")
            if w.shape != (dim, n_components):
                raise InvalidParamsError(
                    f"init must have shape {(dim, n_components)}, got {w.shape}"
                )
            self.weights = w.copy()
        else:
            rng = np.random.default_rng(seed)
            w = rng.normal(size=(dim, n_components))
            self.weights = w / np.linalg.norm(w, axis=0)

    @property
    def learning_rate(self) -> float:
        return self.eta0 / (1.0 + self.step / self.tau)

    def update(self, x) -> None:
        """One Hebbian step on a single sample."""
        x = as_vector(x, self.dim, "x")
        eta = self.learning_rate
        y = self.weights.T @ x
        # Sanger form: component j is corrected by components i <= j only.
        self.weights += eta * (np.outer(x, y) - self.weights @ np.triu(np.outer(y, y)))
        self.step += 1

    def basis(self) -> np.ndarray:
        """Orthonormalized copy of the current weight columns, sign-fixed."""
        q, _ = np.linalg.qr(self.weights)
        return fix_column_signs(q[:, : self.n_components])


def oja_train(stream, n_components: int, epochs: int = 1, eta0: float = 0.1,
              tau: float = 1000.0, seed: int = 0, shuffle: bool = True) -> np.ndarray:
    """Run Oja/Sanger updates over a data stream and return an orthonormal basis.

    ``stream`` is any iterable of vectors (or an (n, d) array); it is
    materialized once and looped over for the requested number of epochs,
    reshuffled each epoch when ``shuffle`` is set.
    """
    data = np.asarray(list(stream), dtype=np.float64)
    if data.ndim == 1 and data.size > 0:
        data = data[None, :]
    if data.size == 0 or data.shape[0] == 0:
        raise EmptyStreamError("training stream is empty")
    n, d = data.shape
    if n_components > d:
        raise InvalidParamsError(f"n_components {n_components} exceeds dim {d}")
    learner = OjaLearner(d, n_components, eta0=eta0, tau=tau, seed=seed)
    order_rng = np.random.default_rng((seed, 1))
    for _ in range(int(epochs)):
        order = order_rng.permutation(n) if shuffle else np.arange(n)
        for i in order:
            learner.update(data[i])
    return learner.basis()


def oja_module(templates, rank: int, dim: int | None = None, epochs: int = 5,
               eta0: float = 0.1, tau: float = 1000.0, seed: int = 0,
               keep_raw: bool = True, label=None) -> SvdModule:
    """Build an SvdModule whose basis comes from Oja training on the templates."""
    rows = [normalize(t) for t in templates]
    if dim is None:
        if not rows:
            raise InvalidParamsError("need dim when templates are empty")
        dim = rows[0].size
    r = min(int(rank), len(rows), dim)
    basis = oja_train(rows, r, epochs=epochs, eta0=eta0, tau=tau, seed=seed)
    return SvdModule.from_basis(basis, rows, rank=rank, keep_raw=keep_raw, label=label)
