"""Template books, similarity and pooling primitives, and the exact module.

A module is a bag of stored unit-norm templates together with two
operations: ``insert`` (store a new template) and ``query`` (pool the
similarities between an input and everything stored).  The exact module
implemented here evaluates the pooled similarity by a full scan; the other
backends in this package approximate it.

Books and modules follow a single-writer / multi-reader contract: queries
never mutate, so any number of them may run concurrently on a frozen
module, while an insert requires exclusive access.
"""

from __future__ import annotations

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    EmptyModuleError,
    EmptySignatureError,
    InvalidParamsError,
    ZeroVectorError,
)
from .validation import as_vector, nonzero_norm

POOLINGS = ("max", "sum")
SIMILARITIES = ("dot", "sigmoid")


def normalize(v) -> np.ndarray:
    """Return ``v`` scaled to unit Euclidean norm.

    Raises ZeroVectorError for an all-zero input, which signals a degenerate
    template or stimulus rather than silently propagating NaNs.
    """
    v = as_vector(v, name="v")
    return v / nonzero_norm(v, "v")


def similarity(x, t, kind: str = "dot", gain: float = 1.0) -> float:
    """Similarity between an input ``x`` and a unit-norm template ``t``.

    ``kind="dot"`` is the norm-invariant dot product ``(x . t) / ||x||``;
    on unit-norm inputs it is the cosine and lies in [-1, 1].
    ``kind="sigmoid"`` is ``logistic(gain * (x . t))``.
    """
    x = as_vector(x, name="x")
    t = as_vector(t, name="t")
    if x.size != t.size:
        raise DimensionMismatchError(
            f"x has dimension {x.size}, t has dimension {t.size}"
        )
    norm = nonzero_norm(x, "x")
    dot = float(x @ t)
    if kind == "dot":
        return dot / norm
    if kind == "sigmoid":
        return float(1.0 / (1.0 + np.exp(-gain * dot)))
    raise InvalidParamsError(f"unknown similarity kind {kind!r}")


def pool(values, kind: str = "max") -> float:
    """Permutation-invariant reduction of a similarity multiset."""
    values = np.asarray(values, dtype=np.float64)
    if kind == "max":
        return float(np.max(values))
    if kind == "sum":
        return float(np.sum(values))
    raise InvalidParamsError(f"unknown pooling kind {kind!r}")


class TemplateBook:
    """Ordered multiset of unit-norm templates sharing one dimension.

    Duplicates are kept: max pooling ignores them but sum pooling reflects
    multiplicity, so the stored collection is a multiset, not a set.
    Templates are normalized on insert instead of rejecting non-unit input.
    """

    def __init__(self, dim: int, templates=None, label=None):
        if dim < 1:
            raise InvalidParamsError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.label = label
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        if templates is not None:
            for t in templates:
                self.insert(t)

    def insert(self, t) -> None:
        """Normalize ``t`` and append it, preserving insertion order."""
        row = normalize(as_vector(t, self.dim, "t"))
        self._rows.append(row)
        self._matrix = None

    @property
    def matrix(self) -> np.ndarray:
        """Stored templates stacked as rows, shape (n, dim)."""
        if self._matrix is None:
            if self._rows:
                self._matrix = np.vstack(self._rows)
            else:
                self._matrix = np.zeros((0, self.dim))
        return self._matrix

    def copy(self) -> "TemplateBook":
        out = TemplateBook(self.dim, label=self.label)
        out._rows = [row.copy() for row in self._rows]
        return out

    def __len__(self) -> int:
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __getitem__(self, i) -> np.ndarray:
        return self._rows[i]

    def __repr__(self) -> str:
        return f"TemplateBook(dim={self.dim}, n={len(self)}, label={self.label!r})"


def exact_insert(book: TemplateBook, t) -> TemplateBook:
    """Insert ``t`` into ``book`` (normalized, appended) and return the book."""
    book.insert(t)
    return book


def exact_query(
    book: TemplateBook,
    x,
    pooling: str = "max",
    kind: str = "dot",
    gain: float = 1.0,
) -> float:
    """Pooled similarity of ``x`` against every template in ``book``.

    With max pooling and the dot similarity this is the similarity of ``x``
    to the most similar stored template.
    """
    if len(book) == 0:
        raise EmptyModuleError("cannot query an empty template book")
    x = as_vector(x, book.dim, "x")
    if kind == "dot":
        sims = book.matrix @ (x / nonzero_norm(x, "x"))
    elif kind == "sigmoid":
        nonzero_norm(x, "x")
        sims = 1.0 / (1.0 + np.exp(-gain * (book.matrix @ x)))
    else:
        raise InvalidParamsError(f"unknown similarity kind {kind!r}")
    return pool(sims, pooling)


def classify(signature) -> int:
    """Index of the largest signature entry; ties break to the lowest index."""
    sig = np.asarray(signature, dtype=np.float64)
    if sig.ndim != 1 or sig.size == 0:
        raise EmptySignatureError("signature must be a nonempty 1-D vector")
    if not np.all(np.isfinite(sig)):
        raise ValueError("signature contains non-finite entries")
    return int(np.argmax(sig))


class ExactModule:
    """Exact backend: stores templates verbatim, answers queries by full scan."""

    backend = "exact"

    def __init__(self, dim: int, label=None):
        self.book = TemplateBook(dim, label=label)

    @classmethod
    def from_templates(cls, templates, dim: int | None = None, label=None):
        templates = list(templates)
        if dim is None:
            if not templates:
                raise InvalidParamsError("need dim when templates are empty")
            dim = as_vector(templates[0], name="t").size
        module = cls(dim, label=label)
        for t in templates:
            module.insert(t)
        return module

    @property
    def dim(self) -> int:
        return self.book.dim

    @property
    def label(self):
        return self.book.label

    def insert(self, t) -> None:
        self.book.insert(t)

    def query(self, x, pooling: str = "max", kind: str = "dot", gain: float = 1.0) -> float:
        return exact_query(self.book, x, pooling, kind, gain)

    def __len__(self) -> int:
        return len(self.book)
