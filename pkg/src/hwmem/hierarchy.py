"""Layers of modules, stacked architectures, and the two-store memory model.

A layer maps an input vector to its signature: one pooled-similarity entry
per module.  An architecture cascades layers, each consuming the signature
of the one below.  The two-store model composes a slow cortex (SVD/Oja
layers, trained once and frozen) with a fast hippocampus (hash-filtered or
exact modules, one per studied episode) whose inputs are the concatenated
cortical signatures.
"""

from __future__ import annotations

import numpy as np

from .core import ExactModule, TemplateBook, classify, normalize
from .exceptions import (
    DegenerateLabelsError,
    DimensionMismatchError,
    EmptyLayerError,
    InvalidParamsError,
    NotStudiedError,
    UnknownModuleError,
    ZeroVectorError,
)
from .rp import RpModule, RpProjection
from .svd import SvdModule, oja_module
from .validation import as_vector
from .wta import LshModule, WtaHashFamily

BACKENDS = ("exact", "svd", "oja", "rp", "wta")


class HwLayer:
    """Ordered modules of one backend sharing pooling and similarity settings."""

    def __init__(self, modules, pooling: str = "max", similarity: str = "dot",
                 sigmoid_gain: float = 1.0, projection: RpProjection | None = None,
                 hash_family: WtaHashFamily | None = None):
        self.modules = list(modules)
        self.pooling = pooling
        self.similarity = similarity
        self.sigmoid_gain = float(sigmoid_gain)
        self.projection = projection
        self.hash_family = hash_family
        dims = {m.dim for m in self.modules}
        if projection is not None:
            dims.add(projection.dim)
        if hash_family is not None:
            dims.add(hash_family.dim)
        if len(dims) > 1:
            raise DimensionMismatchError(f"modules disagree on input dimension: {dims}")
        self._dim = dims.pop() if dims else None

    @property
    def input_dim(self) -> int | None:
        return self._dim

    @property
    def n_modules(self) -> int:
        return len(self.modules)

    def signature(self, x) -> np.ndarray:
        """Per-module query results for x, in module order."""
        if not self.modules:
            raise EmptyLayerError("layer holds no modules")
        x = as_vector(x, self._dim, "x")
        out = np.empty(len(self.modules))
        for k, module in enumerate(self.modules):
            if module.backend == "exact":
                out[k] = module.query(x, self.pooling, self.similarity, self.sigmoid_gain)
            else:
                out[k] = module.query(x, self.pooling)
        return out

    def add_module(self, module) -> None:
        if self._dim is not None and module.dim != self._dim:
            raise DimensionMismatchError(
                f"module dimension {module.dim} != layer dimension {self._dim}"
            )
        self.modules.append(module)
        if self._dim is None:
            self._dim = module.dim


def build_layer(books, backend: str = "exact", *, pooling: str = "max",
                similarity: str = "dot", sigmoid_gain: float = 1.0,
                rank: int = 8, keep_raw: bool = True,
                oja_epochs: int = 5, oja_eta0: float = 0.1, oja_tau: float = 1000.0,
                rp_dim: int = 16, rp_eps: float = 0.25, rp_constant: float = 8.0,
                rp_augment: str = "never", share_projection: bool = True,
                n_hashes: int = 8, bands_per_hash: int = 2, window: int = 4,
                seed: int = 0) -> HwLayer:
    """Build one layer from template books, one module per book.

    ``books`` is a list of TemplateBook instances or per-book template
    iterables.  ``backend="oja"`` builds SVD-form modules whose bases come
    from streaming Oja training instead of a batch decomposition.
    """
    if backend not in BACKENDS:
        raise InvalidParamsError(f"backend must be one of {BACKENDS}, got {backend!r}")
    prepared = []
    dim = None
    for k, book in enumerate(books):
        if isinstance(book, TemplateBook):
            prepared.append((book.label if book.label is not None else k, list(book)))
            dim = book.dim
        else:
            prepared.append((k, [normalize(t) for t in book]))
            if prepared[-1][1]:
                dim = prepared[-1][1][0].size
    if not prepared:
        raise InvalidParamsError("need at least one template book")
    if dim is None:
        raise InvalidParamsError("cannot infer dimension from empty books")

    projection = None
    family = None
    modules = []
    if backend == "wta":
        family = WtaHashFamily(dim, n_hashes=n_hashes, bands_per_hash=bands_per_hash,
                               window=window, seed=seed)
    if backend == "rp" and share_projection:
        projection = RpProjection(dim, rp_dim, seed=seed)

    for k, (label, templates) in enumerate(prepared):
        if backend == "exact":
            module = ExactModule.from_templates(templates, dim=dim, label=label)
        elif backend == "svd":
            module = SvdModule.from_templates(templates, rank, dim=dim,
                                              keep_raw=keep_raw, label=label)
        elif backend == "oja":
            module = oja_module(templates, rank, dim=dim, epochs=oja_epochs,
                                eta0=oja_eta0, tau=oja_tau, seed=seed,
                                keep_raw=keep_raw, label=label)
        elif backend == "rp":
            if share_projection:
                proj = projection
            else:
                module_seed = int(np.random.SeedSequence([seed, k]).generate_state(1)[0])
                proj = RpProjection(dim, rp_dim, seed=module_seed)
            module = RpModule(proj, label=label, augment=rp_augment,
                              eps=rp_eps, jl_constant=rp_constant)
            for t in templates:
                module.insert(t)
        else:
            module = LshModule(family, label=label)
            for t in templates:
                module.insert(t)
        modules.append(module)

    return HwLayer(modules, pooling=pooling, similarity=similarity,
                   sigmoid_gain=sigmoid_gain, projection=projection,
                   hash_family=family)


class HwArchitecture:
    """Stack of layers; each layer consumes the signature of the one below."""

    def __init__(self, layers):
        self.layers = list(layers)
        if not self.layers:
            raise InvalidParamsError("architecture needs at least one layer")
        for i in range(1, len(self.layers)):
            below, above = self.layers[i - 1], self.layers[i]
            if above.input_dim is not None and above.input_dim != below.n_modules:
                raise DimensionMismatchError(
                    f"layer {i} expects dimension {above.input_dim}, "
                    f"layer {i - 1} emits {below.n_modules}"
                )

    @property
    def input_dim(self) -> int | None:
        return self.layers[0].input_dim

    def signature(self, x) -> np.ndarray:
        """Cascade of per-layer signatures; returns the top layer's output."""
        current = np.asarray(x, dtype=np.float64)
        for i, layer in enumerate(self.layers):
            if layer.input_dim is not None and current.size != layer.input_dim:
                raise DimensionMismatchError(
                    f"stage {i}: input has dimension {current.size}, "
                    f"expected {layer.input_dim}"
                )
            current = layer.signature(current)
        return current


def cosine(u, v) -> float:
    """Cosine similarity; raises ZeroVectorError when either side vanishes."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero vectors")
    return float((u @ v) / (nu * nv))


def calibrate_threshold(values, labels) -> float:
    """Decision threshold maximizing balanced accuracy of ``value >= theta``.

    ``values`` are similarity scores, ``labels`` truthy for same-pairs.  The
    score function is piecewise constant in theta; among thresholds
    achieving the best balanced accuracy the midpoint of the first optimal
    interval is returned, so perfectly separated classes yield the midpoint
    between them.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if values.shape != labels.shape or values.ndim != 1 or values.size == 0:
        raise InvalidParamsError("values and labels must be matching nonempty 1-D arrays")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("need at least one same and one different pair")

    uniq = np.unique(values)
    lo_bound = min(-1.0, float(uniq[0]))
    hi_bound = max(1.0, float(uniq[-1]))
    # Candidate cut i predicts "same" iff value >= uniq[i]; cut m predicts
    # nothing same.  Cut i is realized by any theta in (uniq[i-1], uniq[i]].
    edges = np.concatenate([[lo_bound], uniq, [hi_bound]])
    scores = np.empty(uniq.size + 1)
    for i in range(uniq.size + 1):
        pred = values >= uniq[i] if i < uniq.size else np.zeros_like(labels)
        tpr = float(np.sum(pred & labels)) / n_pos
        tnr = float(np.sum(~pred & ~labels)) / n_neg
        scores[i] = 0.5 * (tpr + tnr)

    best = scores.max()
    optimal = np.nonzero(scores >= best - 1e-15)[0]
    # First maximal contiguous run of optimal cuts.
    end = start = optimal[0]
    for i in optimal[1:]:
        if i == end + 1:
            end = i
        else:
            break
    return float((edges[start] + edges[end + 1]) / 2.0)


def balanced_accuracy(values, labels, theta: float) -> float:
    """Balanced accuracy of the rule ``value >= theta``."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    pred = values >= theta
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("need both classes to score")
    tpr = float(np.sum(pred & labels)) / n_pos
    tnr = float(np.sum(~pred & ~labels)) / n_neg
    return 0.5 * (tpr + tnr)


class CortexHippocampusModel:
    """Frozen cortical layers feeding a fast episodic store.

    ``cortex1`` (and optionally ``cortex2``) encode an input into
    concatenated signatures; studied episodes are inserted into one
    hippocampal module per episode id, allocated lazily at study time.  The
    cortical layers are never touched by study.
    """

    def __init__(self, cortex1: HwLayer, cortex2: HwLayer | None = None, *,
                 hippocampus_backend: str = "wta", pooling: str = "max",
                 n_hashes: int = 8, bands_per_hash: int = 2, window: int = 4,
                 rp_dim: int = 16, rp_augment: str = "never", rp_eps: float = 0.25,
                 seed: int = 0):
        if hippocampus_backend not in ("exact", "wta", "rp"):
            raise InvalidParamsError(
                f"hippocampus backend must be exact, wta, or rp, got {hippocampus_backend!r}"
            )
        self.cortex1 = cortex1
        self.cortex2 = cortex2
        self.hippocampus_backend = hippocampus_backend
        enc_dim = cortex1.n_modules + (cortex2.n_modules if cortex2 is not None else 0)
        family = None
        projection = None
        if hippocampus_backend == "wta":
            family = WtaHashFamily(enc_dim, n_hashes=n_hashes,
                                   bands_per_hash=bands_per_hash,
                                   window=min(window, enc_dim), seed=seed)
        elif hippocampus_backend == "rp":
            projection = RpProjection(enc_dim, min(rp_dim, enc_dim), seed=seed)
        self._rp_augment = rp_augment
        self._rp_eps = rp_eps
        self.hippocampus = HwLayer([], pooling=pooling, projection=projection,
                                   hash_family=family)
        self.module_ids: list = []
        self._by_id: dict = {}

    @property
    def encoded_dim(self) -> int:
        return self.cortex1.n_modules + (
            self.cortex2.n_modules if self.cortex2 is not None else 0
        )

    @property
    def input_dim(self) -> int:
        d1 = self.cortex1.input_dim
        d2 = self.cortex2.input_dim if self.cortex2 is not None else 0
        return d1 + d2

    def encode(self, x) -> np.ndarray:
        """Concatenated cortical signatures of a raw (possibly blanked) input.

        A modality whose slice is identically zero stands for an absent
        stimulus: its signature block is emitted as zeros so the decision is
        carried entirely by the present modality.
        """
        x = as_vector(x, self.input_dim, "x")
        if self.cortex2 is None:
            return self.cortex1.signature(x)
        d1 = self.cortex1.input_dim
        parts = []
        for layer, piece in ((self.cortex1, x[:d1]), (self.cortex2, x[d1:])):
            if np.any(piece):
                parts.append(layer.signature(piece))
            else:
                parts.append(np.zeros(layer.n_modules))
        return np.concatenate(parts)

    def _new_module(self, module_id):
        if self.hippocampus_backend == "wta":
            return LshModule(self.hippocampus.hash_family, label=module_id)
        if self.hippocampus_backend == "rp":
            return RpModule(self.hippocampus.projection, label=module_id,
                            augment=self._rp_augment, eps=self._rp_eps)
        return ExactModule(self.encoded_dim, label=module_id)

    def study_item(self, module_id, item, create: bool = True) -> None:
        """Encode one raw item and insert it into the module for ``module_id``."""
        if module_id not in self._by_id:
            if not create:
                raise UnknownModuleError(module_id)
            module = self._new_module(module_id)
            self.hippocampus.add_module(module)
            self.module_ids.append(module_id)
            self._by_id[module_id] = module
        self._by_id[module_id].insert(self.encode(item))

    def study(self, episodes) -> "CortexHippocampusModel":
        """Study episodes given as (items, module_id) pairs; cortex stays frozen."""
        for items, module_id in episodes:
            for item in items:
                self.study_item(module_id, item)
        return self

    def hippocampal_signature(self, probe) -> np.ndarray:
        if not self.module_ids:
            raise NotStudiedError("no episodes studied yet")
        return self.hippocampus.signature(self.encode(probe))

    def recall(self, probe):
        """Id of the maximally activated hippocampal module for a raw probe."""
        return self.module_ids[classify(self.hippocampal_signature(probe))]

    def same_different(self, x1, x2, theta: float) -> bool:
        """Threshold the cosine of the two cortex-1 signatures.

        This path deliberately uses cortex-1 only; inputs are cortex-1-sized
        vectors, not concatenated multimodal ones.
        """
        s1 = self.cortex1.signature(as_vector(x1, self.cortex1.input_dim, "x1"))
        s2 = self.cortex1.signature(as_vector(x2, self.cortex1.input_dim, "x2"))
        return cosine(s1, s2) >= theta
