"""Template-pooling memory modules with exact and approximate backends.

Modules store unit-norm templates and answer pooled-similarity queries;
layers of modules map inputs to signatures; stacked layers and the
two-store (cortex + hippocampus) composition reproduce invariance and
episodic-recall behaviors on synthetic group-orbit data.
"""

from .core import (
    ExactModule,
    TemplateBook,
    classify,
    exact_insert,
    exact_query,
    normalize,
    pool,
    similarity,
)
from .estimators import NearestTemplateClassifier, OjaPCA, SignatureTransformer
from .exceptions import (
    ConfigError,
    CorruptSnapshotError,
    DegenerateLabelsError,
    DimensionExhaustedError,
    DimensionMismatchError,
    EmptyLayerError,
    EmptyModuleError,
    EmptySignatureError,
    EmptyStreamError,
    HwmemError,
    InvalidEpsError,
    InvalidParamsError,
    NotStudiedError,
    RawUnavailableError,
    SnapshotError,
    UnknownModuleError,
    VersionError,
    ZeroVectorError,
)
from .hierarchy import (
    CortexHippocampusModel,
    HwArchitecture,
    HwLayer,
    build_layer,
    calibrate_threshold,
    cosine,
)
from .rp import RpModule, RpProjection, jl_bound, jl_bound_check
from .snapshot import load_model, save_model
from .svd import OjaLearner, SvdModule, oja_module, oja_train, truncated_factors
from .synth import (
    AssociationDataset,
    GroupSpec,
    IdentityDataset,
    generate_association_dataset,
    generate_identity_dataset,
    generate_orbit,
    generate_word_dataset,
    oracle_exact_query,
    shift,
)
from .wta import EMPTY_QUERY_SCORE, LshModule, WtaHashFamily

__version__ = "0.1.0"

__all__ = [
    "AssociationDataset",
    "ConfigError",
    "CortexHippocampusModel",
    "CorruptSnapshotError",
    "DegenerateLabelsError",
    "DimensionExhaustedError",
    "DimensionMismatchError",
    "EMPTY_QUERY_SCORE",
    "EmptyLayerError",
    "EmptyModuleError",
    "EmptySignatureError",
    "EmptyStreamError",
    "ExactModule",
    "GroupSpec",
    "HwArchitecture",
    "HwLayer",
    "HwmemError",
    "IdentityDataset",
    "InvalidEpsError",
    "InvalidParamsError",
    "LshModule",
    "NearestTemplateClassifier",
    "NotStudiedError",
    "OjaLearner",
    "OjaPCA",
    "RawUnavailableError",
    "RpModule",
    "RpProjection",
    "SignatureTransformer",
    "SnapshotError",
    "SvdModule",
    "TemplateBook",
    "UnknownModuleError",
    "VersionError",
    "WtaHashFamily",
    "ZeroVectorError",
    "build_layer",
    "calibrate_threshold",
    "classify",
    "cosine",
    "exact_insert",
    "exact_query",
    "generate_association_dataset",
    "generate_identity_dataset",
    "generate_orbit",
    "generate_word_dataset",
    "jl_bound",
    "jl_bound_check",
    "load_model",
    "normalize",
    "oja_module",
    "oja_train",
    "oracle_exact_query",
    "pool",
    "save_model",
    "shift",
    "similarity",
    "truncated_factors",
]
