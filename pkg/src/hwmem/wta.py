"""Winner-take-all rank hashing and the hash-filtered pooling module.

A WTA hash code depends only on the ordering of coordinates, never their
magnitudes, so it is invariant to any strictly increasing transform of the
input.  Each hash function concatenates W band codes; a band permutes the
coordinates, keeps the first `window` of them, and emits the argmax
position.  L hash functions are OR-amplified at query time: a stored
template is a candidate if it matches the query on the full W-band code of
at least one hash function.  Candidates are found by a linear scan over the
precomputed integer codes.
"""

from __future__ import annotations

import numpy as np

from .core import TemplateBook, pool
from .exceptions import EmptyModuleError, InvalidParamsError
from .validation import as_vector, nonzero_norm

# Pooled score reported when no stored template shares a hash code with the
# query: the floor of the cosine range, so an empty candidate set loses
# every argmax competition without poisoning signature arithmetic.
EMPTY_QUERY_SCORE = -1.0


class WtaHashFamily:
    """L hash functions of W rank-order bands each, over dimension-d inputs.

    The permutation for hash i, band b is generated by seeded Fisher-Yates
    keyed on (seed, i, b): families that share a seed agree on their common
    prefix of hashes and bands, which is what makes recall monotone in L and
    selectivity monotone in W.
    """

    def __init__(self, dim: int, n_hashes: int = 8, bands_per_hash: int = 2,
                 window: int = 4, seed: int = 0):
        if not 2 <= window <= dim:
            raise InvalidParamsError(f"window must be in [2, {dim}], got {window}")
        if n_hashes < 1:
            raise InvalidParamsError(f"n_hashes must be >= 1, got {n_hashes}")
        if bands_per_hash < 1:
            raise InvalidParamsError(f"bands_per_hash must be >= 1, got {bands_per_hash}")
        self.dim = int(dim)
        self.n_hashes = int(n_hashes)
        self.bands_per_hash = int(bands_per_hash)
        self.window = int(window)
        self.seed = int(seed)
        perms = np.empty((n_hashes, bands_per_hash, dim), dtype=np.int64)
        for i in range(n_hashes):
            for b in range(bands_per_hash):
                rng = np.random.default_rng((seed, i, b))
                perms[i, b] = rng.permutation(dim)
        self.permutations = perms
        # Only the leading `window` positions of each permutation are read.
        self._windows = np.ascontiguousarray(perms[:, :, :window])

    def hash_one(self, i: int, x) -> np.ndarray:
        """Code of hash function i for input x: W band argmax positions."""
        if not 0 <= i < self.n_hashes:
            raise InvalidParamsError(f"hash index {i} out of range [0, {self.n_hashes})")
        x = as_vector(x, self.dim, "x")
        return np.argmax(x[self._windows[i]], axis=1)

    def hash_all(self, x) -> np.ndarray:
        """Codes of all L hash functions, shape (L, W)."""
        x = as_vector(x, self.dim, "x")
        return np.argmax(x[self._windows], axis=2)


class LshModule:
    """Module coupling stored templates with their precomputed hash codes."""

    backend = "wta"

    def __init__(self, family: WtaHashFamily, label=None):
        self.family = family
        self.label = label
        self.book = TemplateBook(family.dim, label=label)
        self._codes: list[np.ndarray] = []
        self._code_stack: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.family.dim

    @property
    def codes(self) -> np.ndarray:
        """Stored codes, shape (n, L, W), aligned index-wise with the book."""
        if self._code_stack is None:
            if self._codes:
                self._code_stack = np.stack(self._codes)
            else:
                self._code_stack = np.zeros(
                    (0, self.family.n_hashes, self.family.bands_per_hash),
                    dtype=np.int64,
                )
        return self._code_stack

    def insert(self, t) -> None:
        """Normalize and store ``t`` together with its L hash codes."""
        self.book.insert(t)
        self._codes.append(self.family.hash_all(self.book[-1]))
        self._code_stack = None

    def candidates(self, x) -> np.ndarray:
        """Indices of stored templates matching the query under any hash function.

        A match requires equality of the full W-band code of one hash
        function; matches of the L functions are unioned.
        """
        if len(self.book) == 0:
            return np.zeros(0, dtype=np.int64)
        query = self.family.hash_all(x)
        hit = (self.codes == query).all(axis=2).any(axis=1)
        return np.nonzero(hit)[0]

    def query(self, x, pooling: str = "max") -> float:
        """Pool dot similarities over the candidate set only.

        Returns EMPTY_QUERY_SCORE when no stored template shares a code with
        the query; a max-pooled result therefore never exceeds the exact
        full-scan answer.
        """
        x = as_vector(x, self.dim, "x")
        norm = nonzero_norm(x, "x")
        idx = self.candidates(x)
        if idx.size == 0:
            return EMPTY_QUERY_SCORE
        sims = self.book.matrix[idx] @ (x / norm)
        return pool(sims, pooling)

    def __len__(self) -> int:
        return len(self.book)
