"""Experiment drivers: same-different matching, study/recall, backend checks.

Each driver expands the config's sweep axes into cells, runs every cell for
the configured number of repetitions with a per-(cell, rep) derived seed,
and emits flat result records plus 25/50/75-percentile summary rows.  A
record can be reproduced in isolation by re-running its cell with the seed
it carries.
"""

from __future__ import annotations

import itertools

import numpy as np

from .config import ExperimentConfig, ResultRecord, summarize
from .core import ExactModule
from .exceptions import ConfigError
from .hierarchy import CortexHippocampusModel, balanced_accuracy, build_layer, calibrate_threshold, cosine
from .rp import RpModule, RpProjection
from .svd import SvdModule
from .synth import generate_association_dataset, generate_identity_dataset, generate_word_dataset
from .wta import LshModule, WtaHashFamily


def derive_seed(base_seed: int, cell_index: int, rep: int) -> int:
    """Stable per-run seed from the top-level seed and the (cell, rep) key."""
    return int(np.random.SeedSequence([base_seed, cell_index, rep]).generate_state(1)[0])


def _sub_seed(run_seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([run_seed, stream]).generate_state(1)[0])


def sweep_cells(cfg: ExperimentConfig) -> list:
    """Cartesian product of the sweep axes, as override dicts."""
    if not cfg.sweep:
        return [{}]
    names = list(cfg.sweep)
    cells = []
    for combo in itertools.product(*(cfg.sweep[n] for n in names)):
        cells.append(dict(zip(names, combo)))
    return cells


def _layer_kwargs(cfg: ExperimentConfig, seed: int) -> dict:
    return dict(
        pooling=cfg.pooling, similarity=cfg.similarity, sigmoid_gain=cfg.sigmoid_gain,
        rank=cfg.rank, oja_epochs=cfg.oja_epochs, oja_eta0=cfg.oja_eta0,
        oja_tau=cfg.oja_tau, rp_dim=min(cfg.rp_dim, cfg.dim), rp_eps=cfg.rp_eps,
        rp_constant=cfg.rp_constant, rp_augment=cfg.rp_augment,
        share_projection=cfg.share_projection, n_hashes=cfg.n_hashes,
        bands_per_hash=cfg.bands_per_hash, window=cfg.window, seed=seed,
    )


def _sample_pairs(pool, n_pairs: int, rng) -> list:
    """Balanced same/different pairs as ((identity, frame), (identity, frame), label)."""
    n_same = n_pairs // 2
    pairs = []
    multi_frame = [i for i, ident in enumerate(pool) if len(ident.frames) >= 2]
    for _ in range(n_same):
        if multi_frame:
            i = int(rng.choice(multi_frame))
            a, b = (int(v) for v in rng.choice(len(pool[i].frames), size=2, replace=False))
        else:
            # Single-frame identities: a same-pair degenerates to a repeat.
            i, a, b = int(rng.integers(len(pool))), 0, 0
        pairs.append(((i, a), (i, b), True))
    for _ in range(n_pairs - n_same):
        i, j = rng.choice(len(pool), size=2, replace=False)
        a = int(rng.integers(len(pool[int(i)].frames)))
        b = int(rng.integers(len(pool[int(j)].frames)))
        pairs.append(((int(i), a), (int(j), b), False))
    return pairs


def _pair_scores(pool, pairs, encode) -> tuple:
    cache: dict = {}

    def rep_of(key):
        if key not in cache:
            i, a = key
            cache[key] = encode(pool[i].frames[a])
        return cache[key]

    values = np.array([cosine(rep_of(p), rep_of(q)) for p, q, _ in pairs])
    labels = np.array([lab for _, _, lab in pairs], dtype=bool)
    return values, labels


def _run_ventral_once(cfg: ExperimentConfig, run_seed: int) -> list:
    """One repetition of the same-different run; returns (metric, value, params) rows.

    The task concerns unfamiliar faces, so the decision threshold is tuned
    on pairs of held-out calibration identities (as many as the test pool),
    disjoint from both the developmental identities the layer was trained
    on and the identities the accuracy is reported on.
    """
    ds = generate_identity_dataset(cfg.n_train, 2 * cfg.n_test, cfg.dim,
                                   cfg.orbit_degree, cfg.noise,
                                   seed=_sub_seed(run_seed, 0),
                                   smoothness=cfg.smoothness)
    calib_pool = ds.test[: cfg.n_test]
    test_pool = ds.test[cfg.n_test:]
    layer = build_layer([ident.frames for ident in ds.train], cfg.backend,
                        **_layer_kwargs(cfg, _sub_seed(run_seed, 1)))
    pair_rng = np.random.default_rng(_sub_seed(run_seed, 2))
    calib_pairs = _sample_pairs(calib_pool, cfg.n_calib_pairs, pair_rng)
    test_pairs = _sample_pairs(test_pool, cfg.n_test_pairs, pair_rng)

    results = []
    for name, encode in (("hw", layer.signature), ("baseline", lambda x: x)):
        calib_values, calib_labels = _pair_scores(calib_pool, calib_pairs, encode)
        theta = calibrate_threshold(calib_values, calib_labels)
        test_values, test_labels = _pair_scores(test_pool, test_pairs, encode)
        acc = balanced_accuracy(test_values, test_labels, theta)
        results.append((f"accuracy_{name}", acc, {}))
        results.append((f"threshold_{name}", theta, {}))
    gap = results[0][1] - results[2][1]
    results.append(("accuracy_gap", gap, {}))
    return results


def _run_mtl_once(cfg: ExperimentConfig, run_seed: int) -> list:
    """One repetition of the study/recall run."""
    dev_faces = generate_identity_dataset(cfg.n_dev, 0, cfg.dim_a, None,
                                          cfg.dev_noise, seed=_sub_seed(run_seed, 0),
                                          smoothness=cfg.smoothness)
    dev_words = generate_word_dataset(cfg.n_dev, 0, cfg.dim_b, cfg.n_fonts,
                                      cfg.font_scale, None, cfg.dev_noise,
                                      seed=_sub_seed(run_seed, 1),
                                      smoothness=cfg.smoothness)
    cortical_backend = cfg.backend if cfg.backend in ("exact", "svd", "oja") else "svd"
    kwargs = _layer_kwargs(cfg, _sub_seed(run_seed, 2))
    cortex1 = build_layer([i.frames for i in dev_faces.train], cortical_backend, **kwargs)
    cortex2 = build_layer([i.frames for i in dev_words.train], cortical_backend, **kwargs)

    assoc = generate_association_dataset(
        cfg.n_study, cfg.dim_a, cfg.dim_b, cfg.study_views, cfg.heldout_views,
        cfg.n_fonts, cfg.font_scale, cfg.noise, seed=_sub_seed(run_seed, 3),
        smoothness=cfg.smoothness,
    )
    model = CortexHippocampusModel(
        cortex1, cortex2, hippocampus_backend=cfg.hippocampus_backend,
        pooling=cfg.pooling, n_hashes=cfg.n_hashes, bands_per_hash=cfg.bands_per_hash,
        window=cfg.window, rp_dim=cfg.rp_dim, rp_augment=cfg.rp_augment,
        rp_eps=cfg.rp_eps, seed=_sub_seed(run_seed, 4),
    )
    model.study((ind.study_items(), k) for k, ind in enumerate(assoc.individuals))

    def recall_rate(probe_lists):
        hits = total = 0
        for k, probes in probe_lists:
            for probe in probes:
                hits += int(model.recall(probe) == k)
                total += 1
        return hits / total if total else None

    studied = [(k, ind.study_items()) for k, ind in enumerate(assoc.individuals)]
    heldout = [(k, ind.heldout_items()) for k, ind in enumerate(assoc.individuals)]
    face_only = [
        (k, [np.concatenate([a, np.zeros(cfg.dim_b)]) for a in ind.a_heldout])
        for k, ind in enumerate(assoc.individuals)
    ]
    rows = [("recall_studied", recall_rate(studied), {})]
    for metric, rate in (("recall_heldout", recall_rate(heldout)),
                         ("recall_face_probe", recall_rate(face_only))):
        if rate is not None:
            rows.append((metric, rate, {}))
    return rows


def _unit_rows(rng, n: int, dim: int) -> np.ndarray:
    m = rng.normal(size=(n, dim))
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def _run_equiv_once(cfg: ExperimentConfig, run_seed: int) -> list:
    """Max deviation of each approximate backend from the exact scan."""
    rows = []
    for di, dim in enumerate(cfg.equiv_dims):
        rng = np.random.default_rng(_sub_seed(run_seed, di))
        templates = _unit_rows(rng, cfg.equiv_n_templates, dim)
        queries = _unit_rows(rng, cfg.equiv_n_queries, dim)
        exact = ExactModule.from_templates(templates, dim=dim)
        exact_scores = np.array([exact.query(q, cfg.pooling) for q in queries])

        full_rank = min(cfg.equiv_n_templates, dim)
        for rank in dict.fromkeys([*cfg.equiv_ranks, full_rank]):
            if rank > full_rank:
                continue
            module = SvdModule.from_templates(templates, rank, dim=dim)
            scores = np.array([module.query(q, cfg.pooling) for q in queries])
            rows.append(("max_abs_deviation", float(np.max(np.abs(scores - exact_scores))),
                         {"approx": "svd", "dim": dim, "rank": int(rank)}))

        for s in dict.fromkeys([*cfg.equiv_rp_dims, dim]):
            if s > dim:
                continue
            projection = RpProjection(dim, s, seed=_sub_seed(run_seed, 100 + di))
            module = RpModule(projection)
            for t in templates:
                module.insert(t)
            scores = np.array([module.query(q, cfg.pooling) for q in queries])
            rows.append(("max_abs_deviation", float(np.max(np.abs(scores - exact_scores))),
                         {"approx": "rp", "dim": dim, "rp_dim": int(s)}))

        for n_hashes, bands, window in cfg.equiv_hash_grid:
            if window > dim:
                continue
            family = WtaHashFamily(dim, n_hashes=n_hashes, bands_per_hash=bands,
                                   window=window, seed=_sub_seed(run_seed, 200 + di))
            module = LshModule(family)
            for t in templates:
                module.insert(t)
            scores = np.array([module.query(q, cfg.pooling) for q in queries])
            params = {"approx": "wta", "dim": dim, "n_hashes": int(n_hashes),
                      "bands_per_hash": int(bands), "window": int(window)}
            rows.append(("max_abs_deviation", float(np.max(np.abs(scores - exact_scores))),
                         params))
            rows.append(("max_excess", float(np.max(scores - exact_scores)), params))
            rows.append(("agreement_rate", float(np.mean(np.abs(scores - exact_scores) < 1e-12)),
                         params))
    return rows


_RUNNERS = {
    "ventral": _run_ventral_once,
    "mtl": _run_mtl_once,
    "equiv": _run_equiv_once,
}


def run_cell(cfg: ExperimentConfig, run_seed: int) -> list:
    """Run one already-resolved cell once; used for record replay."""
    return _RUNNERS[cfg.experiment](cfg, run_seed)


def run_experiment(cfg: ExperimentConfig) -> list:
    """Expand sweeps, run all (cell, rep) pairs in order, append summaries."""
    cfg.validate()
    records = []
    for cell_index, cell in enumerate(sweep_cells(cfg)):
        sub = cfg.replaced(**cell) if cell else cfg
        sub.validate()
        for rep in range(cfg.reps):
            run_seed = derive_seed(cfg.seed, cell_index, rep)
            for metric, value, extra in run_cell(sub, run_seed):
                params = {**cell, **extra}
                records.append(ResultRecord(
                    experiment=cfg.experiment, metric=metric, value=float(value),
                    rep=rep, seed=run_seed, params=params,
                ))
    records.extend(summarize(records, cfg.experiment))
    return records


def run_ventral_experiment(cfg: ExperimentConfig) -> list:
    if cfg.experiment != "ventral":
        raise ConfigError(f"expected a ventral config, got {cfg.experiment!r}")
    return run_experiment(cfg)


def run_mtl_experiment(cfg: ExperimentConfig) -> list:
    if cfg.experiment != "mtl":
        raise ConfigError(f"expected an mtl config, got {cfg.experiment!r}")
    return run_experiment(cfg)


def run_backend_equivalence(cfg: ExperimentConfig) -> list:
    if cfg.experiment != "equiv":
        raise ConfigError(f"expected an equiv config, got {cfg.experiment!r}")
    return run_experiment(cfg)
