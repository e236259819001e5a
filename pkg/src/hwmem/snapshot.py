"""Versioned binary snapshots of modules, layers, and architectures.

Container layout (all integers little-endian):

    bytes 0..7    magic  b"HWMSNAP\\x00"
    bytes 8..11   format version, uint32
    bytes 12..19  payload length in bytes, uint64
    payload       UTF-8 JSON document
    last 4 bytes  CRC32 of everything before it, uint32

Numeric arrays inside the JSON document are encoded as raw little-endian
bytes (base64), so a loaded model reproduces every query output
bit-exactly.  Scalars survive JSON round-trips exactly as well (shortest
float repr).  Loading refuses unknown future versions and any file whose
structure or checksum does not validate.
"""

from __future__ import annotations

import base64
import json
import struct
import zlib

import numpy as np

from .core import ExactModule, TemplateBook
from .exceptions import CorruptSnapshotError, InvalidParamsError, VersionError
from .hierarchy import CortexHippocampusModel, HwArchitecture, HwLayer
from .rp import RpModule, RpProjection
from .svd import SvdModule
from .wta import LshModule, WtaHashFamily

MAGIC = b"HWMSNAP\x00"
VERSION = 1
_HEADER = struct.Struct("<8sIQ")


def _plain(v):
    """Convert numpy scalars to plain Python so labels survive JSON."""
    return v.item() if isinstance(v, np.generic) else v


def _enc_array(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a)
    le = a.astype(a.dtype.newbyteorder("<"), copy=False)
    return {
        "dtype": le.dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(le.tobytes()).decode("ascii"),
    }


def _dec_array(doc: dict) -> np.ndarray:
    try:
        raw = base64.b64decode(doc["data"].encode("ascii"))
        arr = np.frombuffer(raw, dtype=np.dtype(doc["dtype"]))
        return arr.reshape(doc["shape"]).copy()
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSnapshotError(f"bad array record: {exc}") from exc


def _enc_book(book: TemplateBook) -> dict:
    return {"dim": book.dim, "label": _plain(book.label), "matrix": _enc_array(book.matrix)}


def _dec_book(doc: dict) -> TemplateBook:
    book = TemplateBook(doc["dim"], label=doc["label"])
    matrix = _dec_array(doc["matrix"])
    book._rows = [row.copy() for row in matrix]
    return book


def _enc_projection(p: RpProjection) -> dict:
    return {"dim": p.dim, "seed": p.seed, "draws": p._draws,
            "matrix": _enc_array(p.matrix)}


def _dec_projection(doc: dict) -> RpProjection:
    p = RpProjection.__new__(RpProjection)
    p.dim = doc["dim"]
    p.seed = doc["seed"]
    p._draws = doc["draws"]
    matrix = _dec_array(doc["matrix"])
    p._columns = [matrix[:, j].copy() for j in range(matrix.shape[1])]
    p._matrix = None
    p._modules = []
    return p


def _enc_family(f: WtaHashFamily) -> dict:
    return {"dim": f.dim, "n_hashes": f.n_hashes, "bands_per_hash": f.bands_per_hash,
            "window": f.window, "seed": f.seed,
            "permutations": _enc_array(f.permutations)}


def _dec_family(doc: dict) -> WtaHashFamily:
    f = WtaHashFamily.__new__(WtaHashFamily)
    f.dim = doc["dim"]
    f.n_hashes = doc["n_hashes"]
    f.bands_per_hash = doc["bands_per_hash"]
    f.window = doc["window"]
    f.seed = doc["seed"]
    f.permutations = _dec_array(doc["permutations"])
    f._windows = np.ascontiguousarray(f.permutations[:, :, : f.window])
    return f


def _enc_module(m, shared: bool = False) -> dict:
    """Encode one module; with ``shared`` the owning layer stores the
    projection or hash family once and the module document omits it."""
    if isinstance(m, ExactModule):
        return {"tag": "exact", "book": _enc_book(m.book)}
    if isinstance(m, SvdModule):
        return {
            "tag": "svd", "dim": m.dim, "rank": m.rank, "label": _plain(m.label),
            "raw": None if m.raw is None else _enc_book(m.raw),
            "basis": _enc_array(m.basis), "projected": _enc_array(m.projected),
            "singular_values": _enc_array(m.singular_values), "n": len(m),
        }
    if isinstance(m, RpModule):
        return {
            "tag": "rp", "label": _plain(m.label), "augment": m.augment, "eps": m.eps,
            "jl_constant": m.jl_constant, "raw": _enc_book(m.raw),
            "projected": _enc_array(m.projected),
            "projection": None if shared else _enc_projection(m.projection),
        }
    if isinstance(m, LshModule):
        return {
            "tag": "wta", "label": _plain(m.label), "book": _enc_book(m.book),
            "codes": _enc_array(m.codes),
            "family": None if shared else _enc_family(m.family),
        }
    raise InvalidParamsError(f"cannot snapshot object of type {type(m).__name__}")


def _dec_module(doc: dict, projection=None, family=None):
    tag = doc["tag"]
    if tag == "exact":
        book = _dec_book(doc["book"])
        m = ExactModule(book.dim, label=book.label)
        m.book = book
        return m
    if tag == "svd":
        m = SvdModule(doc["dim"], doc["rank"], keep_raw=False, label=doc["label"])
        m.raw = None if doc["raw"] is None else _dec_book(doc["raw"])
        m.basis = _dec_array(doc["basis"])
        m.projected = _dec_array(doc["projected"])
        m.singular_values = _dec_array(doc["singular_values"])
        m._n = doc["n"]
        return m
    if tag == "rp":
        proj = projection if doc["projection"] is None else _dec_projection(doc["projection"])
        if proj is None:
            raise CorruptSnapshotError("rp module lacks a projection")
        m = RpModule(proj, label=doc["label"], augment=doc["augment"],
                     eps=doc["eps"], jl_constant=doc["jl_constant"])
        m.raw = _dec_book(doc["raw"])
        m.projected = _dec_array(doc["projected"])
        return m
    if tag == "wta":
        fam = family if doc["family"] is None else _dec_family(doc["family"])
        if fam is None:
            raise CorruptSnapshotError("wta module lacks a hash family")
        m = LshModule(fam, label=doc["label"])
        m.book = _dec_book(doc["book"])
        codes = _dec_array(doc["codes"])
        m._codes = [codes[i].copy() for i in range(codes.shape[0])]
        m._code_stack = None
        return m
    raise CorruptSnapshotError(f"unknown module tag {tag!r}")


def _enc_layer(layer: HwLayer) -> dict:
    return {
        "tag": "layer",
        "pooling": layer.pooling,
        "similarity": layer.similarity,
        "sigmoid_gain": layer.sigmoid_gain,
        "projection": None if layer.projection is None else _enc_projection(layer.projection),
        "hash_family": None if layer.hash_family is None else _enc_family(layer.hash_family),
        "modules": [
            _enc_module(
                m,
                shared=(isinstance(m, RpModule) and m.projection is layer.projection)
                or (isinstance(m, LshModule) and m.family is layer.hash_family),
            )
            for m in layer.modules
        ],
    }


def _dec_layer(doc: dict) -> HwLayer:
    projection = None if doc["projection"] is None else _dec_projection(doc["projection"])
    family = None if doc["hash_family"] is None else _dec_family(doc["hash_family"])
    modules = [_dec_module(m, projection=projection, family=family)
               for m in doc["modules"]]
    return HwLayer(modules, pooling=doc["pooling"], similarity=doc["similarity"],
                   sigmoid_gain=doc["sigmoid_gain"], projection=projection,
                   hash_family=family)


def encode_model(model) -> dict:
    """Encode any supported model object into a JSON-able document."""
    if isinstance(model, HwLayer):
        return _enc_layer(model)
    if isinstance(model, HwArchitecture):
        return {"tag": "architecture", "layers": [_enc_layer(l) for l in model.layers]}
    if isinstance(model, CortexHippocampusModel):
        return {
            "tag": "two-store",
            "cortex1": _enc_layer(model.cortex1),
            "cortex2": None if model.cortex2 is None else _enc_layer(model.cortex2),
            "hippocampus": _enc_layer(model.hippocampus),
            "hippocampus_backend": model.hippocampus_backend,
            "rp_augment": model._rp_augment,
            "rp_eps": model._rp_eps,
            "module_ids": [_plain(i) for i in model.module_ids],
        }
    if isinstance(model, TemplateBook):
        return {"tag": "book", "book": _enc_book(model)}
    return _enc_module(model)


def decode_model(doc: dict):
    tag = doc.get("tag")
    if tag == "layer":
        return _dec_layer(doc)
    if tag == "architecture":
        return HwArchitecture([_dec_layer(l) for l in doc["layers"]])
    if tag == "two-store":
        model = CortexHippocampusModel.__new__(CortexHippocampusModel)
        model.cortex1 = _dec_layer(doc["cortex1"])
        model.cortex2 = None if doc["cortex2"] is None else _dec_layer(doc["cortex2"])
        model.hippocampus = _dec_layer(doc["hippocampus"])
        model.hippocampus_backend = doc["hippocampus_backend"]
        model._rp_augment = doc["rp_augment"]
        model._rp_eps = doc["rp_eps"]
        model.module_ids = list(doc["module_ids"])
        model._by_id = {mid: m for mid, m in zip(model.module_ids, model.hippocampus.modules)}
        return model
    if tag == "book":
        return _dec_book(doc["book"])
    if tag in ("exact", "svd", "rp", "wta"):
        return _dec_module(doc)
    raise CorruptSnapshotError(f"unknown snapshot tag {tag!r}")


def dumps(model) -> bytes:
    """Serialize a model to the framed binary container."""
    payload = json.dumps(encode_model(model), separators=(",", ":")).encode("utf-8")
    head = _HEADER.pack(MAGIC, VERSION, len(payload))
    body = head + payload
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def loads(blob: bytes):
    """Deserialize a container produced by :func:`dumps`, validating it fully."""
    if len(blob) < _HEADER.size + 4:
        raise CorruptSnapshotError("snapshot shorter than its fixed header")
    magic, version, length = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise CorruptSnapshotError("bad magic bytes; not a model snapshot")
    if version > VERSION:
        raise VersionError(f"snapshot version {version} is newer than supported {VERSION}")
    expected = _HEADER.size + length + 4
    if len(blob) != expected:
        raise CorruptSnapshotError(
            f"snapshot length {len(blob)} does not match framed size {expected}"
        )
    body, (crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CorruptSnapshotError("checksum mismatch")
    try:
        doc = json.loads(body[_HEADER.size:].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptSnapshotError(f"payload is not valid JSON: {exc}") from exc
    return decode_model(doc)


def save_model(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(model))


def load_model(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
