"""Synthetic group-orbit data and naive reference oracles for testing.

Identities are random unit vectors; their "views" are orbits under cyclic
coordinate shifts, a genuine finite group acting on the feature space, so
pooled-similarity invariance holds exactly for full orbits and can be
tested to machine precision.  Noise, when present, is added after the
shift and followed by renormalization so templates stay unit norm.

The word-area analog models two-factor variation: typeface as a per-
identity random perturbation of the base vector, retinal position as the
cyclic shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TemplateBook, normalize
from .exceptions import InvalidParamsError, ZeroVectorError
from .validation import as_vector

GROUP_KINDS = ("cyclic", "signed-permutation")


@dataclass(frozen=True)
class GroupSpec:
    """Finite group (or sampled subset) used to generate template orbits.

    ``degree`` limits the orbit to that many elements; None means the full
    group for the cyclic case.  Signed permutations are sampled (seeded), so
    a degree is required there.
    """

    kind: str = "cyclic"
    degree: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GROUP_KINDS:
            raise InvalidParamsError(f"kind must be one of {GROUP_KINDS}, got {self.kind!r}")
        if self.kind == "signed-permutation" and self.degree is None:
            raise InvalidParamsError("signed-permutation orbits need an explicit degree")
        if self.degree is not None and self.degree < 1:
            raise InvalidParamsError(f"degree must be >= 1, got {self.degree}")


def shift(v: np.ndarray, j: int) -> np.ndarray:
    """Cyclic coordinate shift by j positions."""
    return np.roll(v, j)


def generate_orbit(base, group: GroupSpec = GroupSpec()) -> TemplateBook:
    """Template book holding the orbit of ``normalize(base)`` under the group."""
    base = normalize(as_vector(base, name="base"))
    d = base.size
    book = TemplateBook(d)
    if group.kind == "cyclic":
        degree = d if group.degree is None else group.degree
        if degree > d:
            raise InvalidParamsError(f"cyclic group on dimension {d} has {d} elements")
        for j in range(degree):
            book.insert(shift(base, j))
    else:
        rng = np.random.default_rng(group.seed)
        for _ in range(group.degree):
            perm = rng.permutation(d)
            signs = rng.choice((-1.0, 1.0), size=d)
            book.insert(signs * base[perm])
    return book


@dataclass
class Identity:
    """One synthetic individual: a base vector and its observed views."""

    base: np.ndarray
    frames: list = field(default_factory=list)


@dataclass
class IdentityDataset:
    """Disjoint train/test identity pools with per-identity view sequences."""

    train: list
    test: list
    dim: int
    orbit_degree: int
    noise: float
    seed: int


def orbit_frames(base: np.ndarray, shifts, noise: float, rng) -> list:
    """Views of ``base``: shifted, optionally noised, renormalized."""
    frames = []
    for j in shifts:
        frame = shift(base, int(j))
        if noise > 0.0:
            frame = frame + noise * rng.normal(size=base.size)
        frames.append(normalize(frame))
    return frames


def _random_unit(rng, dim: int, smoothness: float = 0.0) -> np.ndarray:
    """Random unit vector, optionally spectrally smoothed.

    ``smoothness`` > 0 scales the k-th Fourier coefficient of a white draw
    by (1 + k)^-smoothness.  Smooth bases behave like frames of a slowly
    varying signal: nearby cyclic shifts stay correlated (video-like
    sequences) and shift-orbit matrices get decaying spectra, which is what
    makes low-rank compression of an orbit book meaningful.  Zero keeps the
    draw white.
    """
    while True:
        v = rng.normal(size=dim)
        if smoothness > 0.0:
            coeffs = np.fft.rfft(v)
            k = np.arange(coeffs.size, dtype=np.float64)
            v = np.fft.irfft(coeffs * (1.0 + k) ** -smoothness, n=dim)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def generate_identity_dataset(n_train: int, n_test: int, dim: int,
                              orbit_degree: int | None = None, noise: float = 0.0,
                              seed: int = 0, smoothness: float = 0.0) -> IdentityDataset:
    """Random identities with cyclic-orbit view sequences, split train/test.

    Each identity is an independent random unit base; its sequence covers
    shifts 0..orbit_degree-1 (the full orbit when orbit_degree is None).
    Train and test pools are disjoint by construction.  Deterministic under
    the seed.
    """
    if n_train < 1 or n_test < 0:
        raise InvalidParamsError("need n_train >= 1 and n_test >= 0")
    if dim < 1:
        raise InvalidParamsError(f"dim must be >= 1, got {dim}")
    degree = dim if orbit_degree is None else int(orbit_degree)
    if not 1 <= degree <= dim:
        raise InvalidParamsError(f"orbit_degree must be in [1, {dim}], got {degree}")
    if noise < 0.0:
        raise InvalidParamsError(f"noise must be >= 0, got {noise}")
    if smoothness < 0.0:
        raise InvalidParamsError(f"smoothness must be >= 0, got {smoothness}")
    rng = np.random.default_rng(seed)
    shifts = range(degree)

    def make_pool(count):
        pool = []
        for _ in range(count):
            base = _random_unit(rng, dim, smoothness)
            pool.append(Identity(base=base, frames=orbit_frames(base, shifts, noise, rng)))
        return pool

    return IdentityDataset(train=make_pool(n_train), test=make_pool(n_test),
                           dim=dim, orbit_degree=degree, noise=noise, seed=seed)


def word_frames(base: np.ndarray, n_fonts: int, font_scale: float, shifts,
                noise: float, rng) -> list:
    """Two-factor views: per-font perturbed bases, each swept over positions.

    Returns a flat list ordered font-major; entry (f, j) is the f-th font
    base shifted by the j-th position.
    """
    frames = []
    for _ in range(n_fonts):
        font_base = normalize(base + font_scale * rng.normal(size=base.size))
        frames.extend(orbit_frames(font_base, shifts, noise, rng))
    return frames


def generate_word_dataset(n_train: int, n_test: int, dim: int, n_fonts: int = 2,
                          font_scale: float = 0.3, orbit_degree: int | None = None,
                          noise: float = 0.0, seed: int = 0,
                          smoothness: float = 0.0) -> IdentityDataset:
    """Word-area analog of generate_identity_dataset: font x position views."""
    if n_fonts < 1:
        raise InvalidParamsError(f"n_fonts must be >= 1, got {n_fonts}")
    base_ds = generate_identity_dataset(n_train, n_test, dim, orbit_degree, 0.0, seed,
                                        smoothness)
    rng = np.random.default_rng((seed, 2))
    shifts = range(base_ds.orbit_degree)
    for pool in (base_ds.train, base_ds.test):
        for ident in pool:
            ident.frames = word_frames(ident.base, n_fonts, font_scale, shifts, noise, rng)
    base_ds.noise = noise
    return base_ds


@dataclass
class AssociationIndividual:
    """Study-phase individual: paired two-modality views plus held-out views.

    Study item i concatenates ``a_views[i]`` with ``b_views[i]`` (pairing is
    a bijection).  Held-out views reuse the same typefaces at positions
    never studied, so with zero noise and full-orbit cortical books they are
    semantically equivalent to studied items.
    """

    a_base: np.ndarray
    b_base: np.ndarray
    a_views: list
    b_views: list
    a_heldout: list
    b_heldout: list

    def study_items(self) -> list:
        return [np.concatenate([a, b]) for a, b in zip(self.a_views, self.b_views)]

    def heldout_items(self) -> list:
        return [np.concatenate([a, b]) for a, b in zip(self.a_heldout, self.b_heldout)]


@dataclass
class AssociationDataset:
    individuals: list
    dim_a: int
    dim_b: int
    noise: float
    seed: int


def generate_association_dataset(n_individuals: int, dim_a: int, dim_b: int,
                                 n_study: int = 4, n_heldout: int = 2,
                                 n_fonts: int = 2, font_scale: float = 0.3,
                                 noise: float = 0.0, seed: int = 0,
                                 smoothness: float = 0.0) -> AssociationDataset:
    """Paired two-modality individuals for study/recall runs.

    Per individual, modality-A views are noisy shifts of one base at
    ``n_study`` study positions plus ``n_heldout`` disjoint held-out
    positions; modality-B views vary in both typeface (cycling through
    ``n_fonts`` perturbed bases) and position, with held-out views drawn
    from the same typefaces at the held-out positions.
    """
    if n_individuals < 1:
        raise InvalidParamsError(f"n_individuals must be >= 1, got {n_individuals}")
    if dim_a < 1 or dim_b < 1:
        raise InvalidParamsError("modality dimensions must be >= 1")
    if n_study < 1 or n_heldout < 0:
        raise InvalidParamsError("need n_study >= 1 and n_heldout >= 0")
    min_dim = min(dim_a, dim_b)
    if n_study + n_heldout > min_dim:
        raise InvalidParamsError(
            f"n_study + n_heldout must fit in {min_dim} distinct positions"
        )
    if n_fonts < 1:
        raise InvalidParamsError(f"n_fonts must be >= 1, got {n_fonts}")
    rng = np.random.default_rng(seed)
    individuals = []
    for _ in range(n_individuals):
        a_base = _random_unit(rng, dim_a, smoothness)
        b_base = _random_unit(rng, dim_b, smoothness)
        fonts = [normalize(b_base + font_scale * rng.normal(size=dim_b))
                 for _ in range(n_fonts)]
        a_positions = rng.choice(dim_a, size=n_study + n_heldout, replace=False)
        b_positions = rng.choice(dim_b, size=n_study + n_heldout, replace=False)
        a_views = orbit_frames(a_base, a_positions[:n_study], noise, rng)
        a_heldout = orbit_frames(a_base, a_positions[n_study:], noise, rng)
        b_views = [orbit_frames(fonts[i % n_fonts], [b_positions[i]], noise, rng)[0]
                   for i in range(n_study)]
        # Held-out typefaces cycle through the studied ones only, so a
        # held-out view always has a studied counterpart at another position.
        n_studied_fonts = min(n_fonts, n_study)
        b_heldout = [orbit_frames(fonts[i % n_studied_fonts], [b_positions[n_study + i]],
                                  noise, rng)[0]
                     for i in range(n_heldout)]
        individuals.append(AssociationIndividual(
            a_base=a_base, b_base=b_base, a_views=a_views, b_views=b_views,
            a_heldout=a_heldout, b_heldout=b_heldout,
        ))
    return AssociationDataset(individuals=individuals, dim_a=dim_a, dim_b=dim_b,
                              noise=noise, seed=seed)


def oracle_exact_query(book, x, pooling: str = "max", kind: str = "dot",
                       gain: float = 1.0) -> float:
    """Naive double-loop reference for the exact pooled-similarity query.

    Deliberately written term by term in plain Python, independent of the
    vectorized implementation it is used to check.
    """
    templates = [[float(v) for v in t] for t in book]
    if not templates:
        raise InvalidParamsError("oracle needs a nonempty book")
    xs = [float(v) for v in x]
    norm = math.sqrt(sum(v * v for v in xs))
    if norm == 0.0:
        raise ZeroVectorError("x has zero norm")
    sims = []
    for t in templates:
        if len(t) != len(xs):
            raise InvalidParamsError("dimension mismatch in oracle")
        dot = 0.0
        for a, b in zip(xs, t):
            dot += a * b
        if kind == "dot":
            sims.append(dot / norm)
        elif kind == "sigmoid":
            sims.append(1.0 / (1.0 + math.exp(-gain * dot)))
        else:
            raise InvalidParamsError(f"unknown similarity kind {kind!r}")
    if pooling == "max":
        return max(sims)
    if pooling == "sum":
        return sum(sims)
    raise InvalidParamsError(f"unknown pooling kind {pooling!r}")
