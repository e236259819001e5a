"""Random-projection module with orthogonal augmentation of the projection.

Templates are stored as their images under a shared column-orthonormal
random matrix R (d x s).  Insertion is cheap: project the one new row.
When a store grows past what dimension s can carry at a given distortion
(the classic Johnson-Lindenstrauss bound), the projection can be augmented
with a fresh random direction orthogonal to the existing columns; every
module sharing the projection back-fills the new column from its retained
raw templates.
"""

from __future__ import annotations

import math

import numpy as np

from .core import TemplateBook, pool
from .exceptions import (
    DimensionExhaustedError,
    EmptyModuleError,
    InvalidEpsError,
    InvalidParamsError,
)
from .validation import as_vector, nonzero_norm

AUGMENT_POLICIES = ("never", "always", "jl")

DEFAULT_EPS = 0.25
DEFAULT_JL_CONSTANT = 8.0


def jl_bound(n: int, eps: float, constant: float = DEFAULT_JL_CONSTANT) -> int:
    """Minimum projection dimension advised for n stored items at distortion eps."""
    if not 0.0 < eps < 1.0:
        raise InvalidEpsError(f"eps must be in (0, 1), got {eps}")
    if n < 0:
        raise InvalidParamsError(f"n must be >= 0, got {n}")
    return math.ceil(constant * math.log(max(n, 2)) / (eps * eps))


def jl_bound_check(n: int, s: int, eps: float,
                   constant: float = DEFAULT_JL_CONSTANT) -> bool:
    """True when the current dimension s sits below the advised bound."""
    return s < jl_bound(n, eps, constant)


class RpProjection:
    """Seeded column-orthonormal random projection, extendable one column at a time.

    Column j is drawn from an independent generator keyed by (seed, j), so a
    projection built at s columns and later extended is identical to one
    built at the larger size directly.  All modules of a layer share one
    projection; ``extend()`` is a stop-the-world event for them (no queries
    or inserts may run concurrently with it).
    """

    def __init__(self, dim: int, n_components: int, seed: int = 0):
        if dim < 1:
            raise InvalidParamsError(f"dim must be >= 1, got {dim}")
        if not 1 <= n_components <= dim:
            raise InvalidParamsError(
                f"n_components must be in [1, {dim}], got {n_components}"
            )
        self.dim = int(dim)
        self.seed = int(seed)
        self._columns: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._draws = 0
        self._modules: list["RpModule"] = []
        for _ in range(n_components):
            self._append_fresh_column()

    @property
    def s(self) -> int:
        return len(self._columns)

    @property
    def matrix(self) -> np.ndarray:
        """Projection matrix R, shape (dim, s), orthonormal columns."""
        if self._matrix is None:
            self._matrix = np.column_stack(self._columns)
        return self._matrix

    def _append_fresh_column(self) -> None:
        # Gaussian draw, then twice-iterated Gram-Schmidt against the
        # existing columns; redraw on the (measure-zero) degenerate case.
        while True:
            rng = np.random.default_rng((self.seed, self._draws))
            self._draws += 1
            v = rng.normal(size=self.dim)
            for _ in range(2):
                for col in self._columns:
                    v = v - (col @ v) * col
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                break
        self._columns.append(v / norm)
        self._matrix = None

    def extend(self) -> int:
        """Append one fresh orthonormal column; back-fill attached modules.

        Returns the new dimension.  Raises DimensionExhaustedError once the
        projection already spans the full space.
        """
        if self.s >= self.dim:
            raise DimensionExhaustedError(
                f"projection already spans all {self.dim} dimensions"
            )
        self._append_fresh_column()
        for module in self._modules:
            module._append_column(self._columns[-1])
        return self.s

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.matrix.T @ x

    def _attach(self, module: "RpModule") -> None:
        self._modules.append(module)


class RpModule:
    """Module storing projected templates; raw templates are always retained.

    Raw retention is mandatory here because augmentation must recompute the
    new projection column for rows that were inserted earlier.
    """

    backend = "rp"

    def __init__(self, projection: RpProjection, label=None,
                 augment: str = "never", eps: float = DEFAULT_EPS,
                 jl_constant: float = DEFAULT_JL_CONSTANT):
        if augment not in AUGMENT_POLICIES:
            raise InvalidParamsError(
                f"augment must be one of {AUGMENT_POLICIES}, got {augment!r}"
            )
        self.projection = projection
        self.label = label
        self.augment = augment
        self.eps = float(eps)
        self.jl_constant = float(jl_constant)
        self.raw = TemplateBook(projection.dim, label=label)
        self._rows: list[np.ndarray] = []
        self._projected: np.ndarray | None = None
        projection._attach(self)

    @property
    def dim(self) -> int:
        return self.projection.dim

    @property
    def projected(self) -> np.ndarray:
        """Projected templates stacked as rows, shape (n, s)."""
        if self._projected is None:
            if self._rows:
                self._projected = np.vstack(self._rows)
            else:
                self._projected = np.zeros((0, self.projection.s))
        return self._projected

    @projected.setter
    def projected(self, matrix: np.ndarray) -> None:
        self._rows = [row.copy() for row in np.asarray(matrix, dtype=np.float64)]
        self._projected = None

    def _append_column(self, column: np.ndarray) -> None:
        # Called by the shared projection during augmentation: back-fill the
        # new coordinate of every already-projected row from the raw store.
        new_coords = self.raw.matrix @ column
        self._rows = [np.append(row, c) for row, c in zip(self._rows, new_coords)]
        self._projected = None

    def _policy_fires(self, n_after: int, policy: str) -> bool:
        if policy == "never":
            return False
        if policy == "always":
            return True
        return jl_bound_check(n_after, self.projection.s, self.eps, self.jl_constant)

    def insert(self, t, augment: str | None = None) -> None:
        """Store ``t``: maybe augment the shared projection, then project the row.

        The augmentation decision counts the incoming template (n + 1 stored
        items against the current s).  Augmentation happens before the new
        row is projected, so the row always carries the full column set.
        """
        policy = self.augment if augment is None else augment
        if policy not in AUGMENT_POLICIES:
            raise InvalidParamsError(
                f"augment must be one of {AUGMENT_POLICIES}, got {policy!r}"
            )
        t = as_vector(t, self.dim, "t")
        nonzero_norm(t, "t")
        if self._policy_fires(len(self.raw) + 1, policy):
            if self.projection.s >= self.dim:
                raise DimensionExhaustedError(
                    "augmentation demanded but projection already spans the space"
                )
            self.projection.extend()
        self.raw.insert(t)
        self._rows.append(self.projection.project(self.raw[-1]))
        self._projected = None

    def query(self, x, pooling: str = "max") -> float:
        """Pool projected similarities: ``projected @ (R.T @ x / ||x||)``."""
        if len(self.raw) == 0:
            raise EmptyModuleError("cannot query an empty module")
        x = as_vector(x, self.dim, "x")
        z = self.projection.project(x / nonzero_norm(x, "x"))
        return pool(self.projected @ z, pooling)

    def __len__(self) -> int:
        return len(self.raw)
