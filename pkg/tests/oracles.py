"""Independent reference implementations used only by the tests.

These deliberately avoid the code paths they are meant to check: the SVD
oracle is a hand-rolled one-sided Jacobi instead of LAPACK, hash oracles
re-derive codes with plain Python loops, and the threshold oracle scans
every candidate cut exhaustively.
"""

import math

import numpy as np


def jacobi_svd(a, max_sweeps=60, tol=1e-14):
    """One-sided (Hestenes) Jacobi SVD: returns (u, s, v), singular values
    descending, with a = u @ diag(s) @ v.T."""
    a = np.array(a, dtype=np.float64)
    m, n = a.shape
    transposed = m < n
    if transposed:
        a = a.T
        m, n = n, m
    w = a.copy()
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = w[:, p] @ w[:, p]
                beta = w[:, q] @ w[:, q]
                gamma = w[:, p] @ w[:, q]
                if abs(gamma) <= tol * math.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wp, wq = w[:, p].copy(), w[:, q].copy()
                w[:, p] = c * wp - s * wq
                w[:, q] = s * wp + c * wq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma)
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros_like(w)
    for j in range(n):
        if sigma[j] > 1e-300:
            u[:, j] = w[:, j] / sigma[j]
    if transposed:
        return v, sigma, u
    return u, sigma, v


def wta_codes_loopy(family, x):
    """Recompute all (hash, band) codes of x with explicit permuted copies."""
    x = np.asarray(x, dtype=np.float64)
    codes = []
    for i in range(family.n_hashes):
        bands = []
        for b in range(family.bands_per_hash):
            permuted = [x[j] for j in family.permutations[i, b]]
            window = permuted[: family.window]
            best = 0
            for pos in range(1, len(window)):
                if window[pos] > window[best]:
                    best = pos
            bands.append(best)
        codes.append(bands)
    return np.array(codes, dtype=np.int64)


def candidate_set_loopy(module, x):
    """Brute-force all-pairs hash comparison for the candidate set."""
    query = wta_codes_loopy(module.family, x)
    out = set()
    for j in range(len(module.book)):
        stored = wta_codes_loopy(module.family, module.book[j])
        for i in range(module.family.n_hashes):
            if all(stored[i, b] == query[i, b] for b in range(module.family.bands_per_hash)):
                out.add(j)
                break
    return out


def top_eigvecs(data, r):
    """Top-r eigenvectors of the sample covariance (columns, descending)."""
    data = np.asarray(data, dtype=np.float64)
    cov = data.T @ data / data.shape[0]
    vals, vecs = np.linalg.eigh(cov)
    return vecs[:, ::-1][:, :r]


def jl_crossover(s, eps, constant=8.0):
    """Smallest n at which the dimension advisory flips to True."""
    n = math.floor(math.exp(s * eps * eps / constant)) + 1
    return max(n, 1)


def scan_threshold(values, labels):
    """Exhaustive-scan balanced-accuracy maximizer over midpoint candidates."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    uniq = np.unique(values)
    candidates = [uniq[0] - 1.0, uniq[-1] + 1.0]
    candidates += [(uniq[i] + uniq[i + 1]) / 2.0 for i in range(len(uniq) - 1)]
    best_theta, best_score = None, -1.0
    for theta in sorted(candidates):
        pred = values >= theta
        tpr = np.sum(pred & labels) / labels.sum()
        tnr = np.sum(~pred & ~labels) / (~labels).sum()
        score = 0.5 * (tpr + tnr)
        if score > best_score:
            best_theta, best_score = theta, score
    return best_theta, best_score
