"""Hypergeometric enrichment of annotation terms in node clusters.

For a cluster with N annotated members, X of which carry a term held by K
of the M annotated entities network-wide, the enrichment p-value is the
upper tail of the hypergeometric distribution:

    p = 1 - sum_{i=0}^{X-1} C(K, i) * C(M-K, N-i) / C(M, N)

computed in log-space as the upper-tail sum so tiny p-values keep full
relative precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def hypergeom_pvalue(x: int, n: int, k: int, m: int) -> float:
    """Probability of drawing >= x marked items in n draws from m items, k marked.

    Arguments mirror the enrichment setting: x = in-cluster term carriers,
    n = annotated cluster size, k = term carriers network-wide, m = annotated
    entities network-wide.
    """
    if min(x, n, k, m) < 0:
        raise ValueError("arguments must be non-negative")
    if x > n or n > m or x > k or k > m:
        raise ValueError(f"need x <= n <= m and x <= k <= m, got x={x} n={n} k={k} m={m}")
    lo = max(0, n - (m - k))
    hi = min(n, k)
    if x <= lo:
        return 1.0
    if x > hi:
        return 0.0
    i = np.arange(x, hi + 1)
    log_terms = _log_binom(k, i) + _log_binom(m - k, n - i) - _log_binom(m, n)
    return float(min(1.0, np.exp(logsumexp(log_terms))))


def benjamini_hochberg(pvals, q: float = 0.05) -> np.ndarray:
    """Step-up FDR control: reject the j smallest p-values where j is the
    largest rank with p_(j) <= j * q / m.  Returns a boolean mask."""
    p = np.asarray(pvals, dtype=np.float64)
    m = p.size
    if m == 0:
        return np.zeros(0, dtype=bool)
    order = np.argsort(p, kind="stable")
    ranked = p[order]
    thresh = (np.arange(1, m + 1) / m) * q
    passing = np.nonzero(ranked <= thresh)[0]
    out = np.zeros(m, dtype=bool)
    if passing.size:
        out[order[: passing[-1] + 1]] = True
    return out


@dataclass(frozen=True)
class AnnotationTable:
    entities: list[str]
    terms: list[str]
    matrix: np.ndarray  # binary, entities x terms

    def __post_init__(self):
        mat = np.asarray(self.matrix)
        if not np.isin(mat, (0, 1)).all():
            raise ValueError("annotation entries must be 0 or 1")
        if mat.shape != (len(self.entities), len(self.terms)):
            raise ValueError("annotation matrix shape does not match names")
        object.__setattr__(self, "matrix", mat.astype(np.uint8))


@dataclass(frozen=True)
class EnrichmentRecord:
    cluster: str
    term: str
    x: int
    n: int
    k: int
    m: int
    p_value: float
    significant: bool


def enrich(
    clustering: dict,
    annotations: AnnotationTable,
    alpha: float = 0.01,
    correct: bool = False,
) -> list[EnrichmentRecord]:
    """Per-(cluster, term) hypergeometric enrichment.

    `clustering` maps entity label -> cluster id over the network's nodes.
    Only annotated entities (>= 1 term) enter the counts; the universe M is
    the annotated entities present in the clustering.  Significance is raw
    p <= alpha by default, or Benjamini-Hochberg at level alpha with
    `correct=True`.
    """
    if not clustering:
        raise ValueError("empty clustering")
    row_of = {e: i for i, e in enumerate(annotations.entities)}
    annotated = [e for e in clustering if e in row_of and annotations.matrix[row_of[e]].any()]
    m_universe = len(annotated)
    if m_universe == 0:
        return []
    term_carriers = np.zeros(len(annotations.terms), dtype=np.int64)
    members: dict = {}
    for e in annotated:
        term_carriers += annotations.matrix[row_of[e]]
        members.setdefault(clustering[e], []).append(e)

    records = []
    for cluster_id in sorted(members, key=str):
        rows = np.array([row_of[e] for e in members[cluster_id]])
        n_cluster = len(rows)
        in_cluster = annotations.matrix[rows].sum(axis=0)
        for j, term in enumerate(annotations.terms):
            k = int(term_carriers[j])
            if k == 0:
                continue
            x = int(in_cluster[j])
            p = hypergeom_pvalue(x, n_cluster, k, m_universe)
            records.append(
                EnrichmentRecord(
                    cluster=str(cluster_id),
                    term=term,
                    x=x,
                    n=n_cluster,
                    k=k,
                    m=m_universe,
                    p_value=p,
                    significant=p <= alpha,
                )
            )
    if correct:
        mask = benjamini_hochberg([r.p_value for r in records], alpha)
        records = [
            EnrichmentRecord(
                cluster=r.cluster,
                term=r.term,
                x=r.x,
                n=r.n,
                k=r.k,
                m=r.m,
                p_value=r.p_value,
                significant=bool(s),
            )
            for r, s in zip(records, mask)
        ]
    return records


def cluster_signatures(signatures: np.ndarray, n_clusters: int) -> np.ndarray:
    """Convenience average-linkage clustering over 1 - signature similarity.

    Plain agglomerative plumbing for callers without an external clustering
    tool; any externally produced clustering can be fed to `enrich` instead.
    """
    from scipy.cluster.hierarchy import fcluster, linkage
    from scipy.spatial.distance import squareform

    from .distances import dgdvs_matrix

    sim = dgdvs_matrix(signatures)
    d = 1.0 - sim
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0
    z = linkage(squareform(d, checks=False), method="average")
    return fcluster(z, t=n_clusters, criterion="maxclust")
