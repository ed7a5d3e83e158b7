"""Network- and node-level comparison statistics.

Network measures: relative graphlet frequency distance, orbit degree
distribution agreement, orbit correlation matrices/distances, plus the
two baselines (degree-distribution distance and spectral distance).
Node measure: log-scaled signature similarity.

Each measure has a `*_from_*` variant operating on precomputed summaries
so that all-pairs comparisons can cache per-graph work.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .catalog import N_ORBITS, get_catalog
from .counting import count_frequencies, count_signatures
from .graph import DirectedGraph


@dataclass(frozen=True)
class DistanceReport:
    measure: str
    value: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"measure": self.measure, "value": self.value, "metadata": self.metadata}


# -- graphlet frequency distance ----------------------------------------------


def frequency_profile(g: DirectedGraph, log_scale: bool = False) -> np.ndarray:
    """Normalized 40-graphlet frequency vector F_i = N_i / sum_j N_j.

    With log_scale, returns T_i = -log(F_i) with empty classes mapped to 0
    (the classic relative-frequency variant).
    """
    freqs = count_frequencies(g).astype(np.float64)
    total = freqs.sum()
    if total == 0:
        raise ValueError("graph has no graphlet occurrences")
    rel = freqs / total
    if not log_scale:
        return rel
    out = np.zeros_like(rel)
    nz = rel > 0
    out[nz] = -np.log(rel[nz])
    return out


def drgf_from_profiles(p1: np.ndarray, p2: np.ndarray) -> float:
    return float(np.abs(p1 - p2).sum())


def drgf(g1: DirectedGraph, g2: DirectedGraph, log_scale: bool = False) -> float:
    """Sum of absolute differences between normalized graphlet frequencies."""
    return drgf_from_profiles(
        frequency_profile(g1, log_scale), frequency_profile(g2, log_scale)
    )


# -- orbit degree distribution agreement --------------------------------------


def degree_distributions(signatures: np.ndarray) -> list[dict[int, float]]:
    """Per-orbit scaled, normalized degree distributions N_j(k) over k >= 1.

    For orbit j, d_j(k) counts nodes touching the orbit exactly k times;
    the scaled form S_j(k) = d_j(k) / k is normalized to sum 1.  An orbit
    nobody touches yields an empty mapping.
    """
    out = []
    for j in range(signatures.shape[1]):
        col = signatures[:, j]
        col = col[col > 0]
        if col.size == 0:
            out.append({})
            continue
        ks, d = np.unique(col, return_counts=True)
        scaled = d / ks
        scaled /= scaled.sum()
        out.append({int(k): float(s) for k, s in zip(ks, scaled)})
    return out


def dgdda_from_distributions(
    n1: list[dict[int, float]], n2: list[dict[int, float]], geometric: bool = False
) -> float:
    agreements = np.empty(len(n1))
    for j, (a, b) in enumerate(zip(n1, n2)):
        if not a and not b:
            agreements[j] = 1.0  # orbit absent from both networks
        elif not a or not b:
            agreements[j] = 0.0
        else:
            ks = set(a) | set(b)
            sq = sum((a.get(k, 0.0) - b.get(k, 0.0)) ** 2 for k in ks)
            agreements[j] = 1.0 - np.sqrt(sq) / np.sqrt(2.0)
    if geometric:
        if np.any(agreements <= 0.0):
            return 0.0
        return float(np.exp(np.log(agreements).mean()))
    return float(agreements.mean())


def dgdda(g1: DirectedGraph, g2: DirectedGraph, geometric: bool = False) -> float:
    """Mean per-orbit agreement between scaled orbit degree distributions, in [0, 1]."""
    d1 = degree_distributions(count_signatures(g1))
    d2 = degree_distributions(count_signatures(g2))
    return dgdda_from_distributions(d1, d2, geometric=geometric)


# -- orbit correlation matrix and distance ------------------------------------


@dataclass(frozen=True)
class CorrelationMatrix:
    orbit_ids: np.ndarray
    entries: np.ndarray

    @property
    def k(self) -> int:
        return len(self.orbit_ids)


def orbit_subset(k: int) -> np.ndarray:
    """Orbit ids for the 13- (sizes 2-3) or 129-orbit (all sizes) variants."""
    if k == 13:
        return get_catalog().orbits_for_max_size(3)
    if k == 129:
        return np.arange(N_ORBITS, dtype=np.int64)
    raise ValueError("orbit subset must be 13 or 129")


def dgcm_from_signatures(signatures: np.ndarray, orbit_ids: np.ndarray) -> CorrelationMatrix:
    """Spearman correlations between orbit degree columns, over all nodes.

    A synthetic all-ones row is appended so an all-zero orbit column still
    has rank variation.  Any residual constant-column pair is defined as
    correlation 1 if the columns are identical and 0 otherwise, keeping
    every entry finite.
    """
    cols = signatures[:, orbit_ids].astype(np.float64)
    k = cols.shape[1]
    data = np.vstack([cols, np.ones((1, k))])
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = stats.spearmanr(data).statistic
    corr = np.asarray(corr, dtype=np.float64)
    if corr.ndim == 0:  # scipy collapses the 2-column case to a scalar
        corr = np.array([[1.0, float(corr)], [float(corr), 1.0]])
    bad = ~np.isfinite(corr)
    if bad.any():
        for i, j in zip(*np.nonzero(bad)):
            corr[i, j] = 1.0 if np.array_equal(data[:, i], data[:, j]) else 0.0
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    np.clip(corr, -1.0, 1.0, out=corr)
    return CorrelationMatrix(orbit_ids=np.asarray(orbit_ids), entries=corr)


def dgcm(g: DirectedGraph, orbits: int = 129) -> CorrelationMatrix:
    if g.n < 2:
        raise ValueError("correlation matrix needs at least 2 nodes")
    return dgcm_from_signatures(count_signatures(g), orbit_subset(orbits))


def dgcd_from_matrices(m1: CorrelationMatrix, m2: CorrelationMatrix) -> float:
    if m1.k != m2.k:
        raise ValueError("correlation matrices have different orbit sets")
    iu = np.triu_indices(m1.k, k=1)
    return float(np.linalg.norm(m1.entries[iu] - m2.entries[iu]))


def dgcd(g1: DirectedGraph, g2: DirectedGraph, variant: int = 13) -> float:
    """Euclidean distance between the strict upper triangles of the two DGCMs."""
    return dgcd_from_matrices(dgcm(g1, variant), dgcm(g2, variant))


# -- node signature similarity -------------------------------------------------


def dgdvs(s1: np.ndarray, s2: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Log-scaled similarity between two signature vectors, in [0, 1].

    Per orbit i: D_i = w_i * |log(s1_i + 1) - log(s2_i + 1)| / log(max(s1_i, s2_i) + 2);
    similarity = 1 - sum(D_i) / sum(w_i).  Weights default to 1; a custom
    vector (e.g. dependency-based) can be injected.
    """
    s1 = np.asarray(s1, dtype=np.float64)
    s2 = np.asarray(s2, dtype=np.float64)
    if s1.shape != s2.shape:
        raise ValueError("signatures have different lengths")
    w = np.ones_like(s1) if weights is None else np.asarray(weights, dtype=np.float64)
    num = np.abs(np.log(s1 + 1.0) - np.log(s2 + 1.0))
    den = np.log(np.maximum(s1, s2) + 2.0)
    return float(1.0 - (w * num / den).sum() / w.sum())


def dgdvs_matrix(signatures: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """All-pairs signature similarity for one network; shape (n, n)."""
    s = np.asarray(signatures, dtype=np.float64)
    w = np.ones(s.shape[1]) if weights is None else np.asarray(weights, dtype=np.float64)
    logs = np.log(s + 1.0)
    out = np.empty((s.shape[0], s.shape[0]))
    for i in range(s.shape[0]):
        num = np.abs(logs[i] - logs)
        den = np.log(np.maximum(s[i], s) + 2.0)
        out[i] = 1.0 - (w * num / den).sum(axis=1) / w.sum()
    return out


# -- baselines -----------------------------------------------------------------


def degree_histogram(g: DirectedGraph, side: str) -> np.ndarray:
    if side == "in":
        deg = g.in_degrees
    elif side == "out":
        deg = g.out_degrees
    else:
        raise ValueError("side must be 'in' or 'out'")
    hist = np.bincount(deg, minlength=1).astype(np.float64)
    return hist / hist.sum()


def histogram_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    width = max(len(h1), len(h2))
    a = np.zeros(width)
    b = np.zeros(width)
    a[: len(h1)] = h1
    b[: len(h2)] = h2
    return float(np.linalg.norm(a - b))


def degree_distribution_distance(g1: DirectedGraph, g2: DirectedGraph, side: str) -> float:
    """Euclidean distance between normalized in- or out-degree distributions."""
    return histogram_distance(degree_histogram(g1, side), degree_histogram(g2, side))


def singular_values(g: DirectedGraph) -> np.ndarray:
    """Singular values of the dense adjacency matrix, descending."""
    adj = np.zeros((g.n, g.n))
    e = g.edges()
    if e.size:
        adj[e[:, 0], e[:, 1]] = 1.0
    return np.linalg.svd(adj, compute_uv=False)


def spectral_distance_from_values(s1: np.ndarray, s2: np.ndarray) -> float:
    width = max(len(s1), len(s2))
    a = np.zeros(width)
    b = np.zeros(width)
    a[: len(s1)] = s1
    b[: len(s2)] = s2
    return float(np.linalg.norm(a - b))


def spectral_distance(g1: DirectedGraph, g2: DirectedGraph) -> float:
    """Euclidean distance between zero-padded sorted singular value lists."""
    return spectral_distance_from_values(singular_values(g1), singular_values(g2))
