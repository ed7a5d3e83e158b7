"""Directed graph representation, file I/O, domain builders, and perturbations.

Graphs are simple directed graphs: no self-loops, no duplicate directed
edges.  Reciprocal pairs (both u->v and v->u) are allowed.  Instances are
immutable after construction; every operation that changes structure
returns a new graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError, GraphFormatError

logger = logging.getLogger(__name__)


def _csr_from_pairs(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Build (indptr, indices) with sorted neighbor lists from edge endpoints."""
    order = np.lexsort((dst, src))
    indices = np.ascontiguousarray(dst[order], dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, indices


class DirectedGraph:
    """Immutable simple directed graph with sorted CSR adjacency.

    Parameters
    ----------
    edges:
        Array-like of shape (m, 2) with integer endpoints in [0, n).
        Self-loops are dropped (with a counted warning) and duplicate
        directed edges collapsed.
    n:
        Node count.  Defaults to max endpoint + 1 (0 for an empty edge set).
    labels:
        Optional per-node string labels; defaults to str(node id).
    """

    __slots__ = (
        "n",
        "m",
        "labels",
        "out_indptr",
        "out_indices",
        "in_indptr",
        "in_indices",
        "dropped_self_loops",
        "_und_indptr",
        "_und_indices",
        "_label_to_id",
    )

    def __init__(self, edges, n: int | None = None, labels: list[str] | None = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(edges.max()) + 1 if edges.size else 0
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError(f"edge endpoints must lie in [0, {n})")
        if labels is not None and len(labels) != n:
            raise ValueError("labels length must equal node count")

        loops = edges[:, 0] == edges[:, 1]
        self.dropped_self_loops = int(loops.sum())
        if self.dropped_self_loops:
            logger.warning("dropped %d self-loop(s)", self.dropped_self_loops)
            edges = edges[~loops]
        if edges.size:
            codes = np.unique(edges[:, 0] * n + edges[:, 1])
            src, dst = codes // n, codes % n
        else:
            src = dst = np.empty(0, dtype=np.int64)

        self.n = n
        self.m = int(src.size)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self.out_indptr, self.out_indices = _csr_from_pairs(src, dst, n)
        self.in_indptr, self.in_indices = _csr_from_pairs(dst, src, n)
        for arr in (self.out_indptr, self.out_indices, self.in_indptr, self.in_indices):
            arr.flags.writeable = False
        self._und_indptr = None
        self._und_indices = None
        self._label_to_id = None

    # -- accessors -----------------------------------------------------------

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[u] : self.out_indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[u] : self.in_indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.size and nbrs[i] == v)

    def edges(self) -> np.ndarray:
        """All directed edges as an (m, 2) array sorted by (src, dst)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.out_indptr))
        return np.column_stack((src, self.out_indices))

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def underlying_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the underlying undirected graph (union of both directions)."""
        if self._und_indptr is None:
            e = self.edges()
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            codes = np.unique(lo * self.n + hi)
            a, b = codes // self.n, codes % self.n
            indptr, indices = _csr_from_pairs(
                np.concatenate((a, b)), np.concatenate((b, a)), self.n
            )
            indptr.flags.writeable = False
            indices.flags.writeable = False
            self._und_indptr, self._und_indices = indptr, indices
        return self._und_indptr, self._und_indices

    def reciprocal_pair_count(self) -> int:
        e = self.edges()
        if not e.size:
            return 0
        fwd = e[:, 0] * self.n + e[:, 1]
        rev = e[:, 1] * self.n + e[:, 0]
        return int(np.isin(fwd, rev).sum()) // 2

    def id_of(self, label: str) -> int:
        if self._label_to_id is None:
            self._label_to_id = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_to_id[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def metadata(self) -> dict:
        return {"n": self.n, "m": self.m, "reciprocal_pairs": self.reciprocal_pair_count()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirectedGraph)
            and self.n == other.n
            and np.array_equal(self.edges(), other.edges())
        )

    def __hash__(self):  # identity hashing; equality is structural
        return id(self)

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, m={self.m})"


# -- file I/O ----------------------------------------------------------------


def load_edge_list(path) -> DirectedGraph:
    """Read a "src dst" whitespace-separated edge list.

    Lines starting with '#' and blank lines are skipped.  Node labels are
    arbitrary UTF-8 tokens, mapped to dense ids in order of first appearance.
    """
    labels: list[str] = []
    ids: dict[str, int] = {}
    src, dst = [], []

    def intern(tok: str) -> int:
        i = ids.get(tok)
        if i is None:
            i = len(labels)
            ids[tok] = i
            labels.append(tok)
        return i

    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise GraphFormatError(
                        f"{path}:{lineno}: expected 'src dst', got {line!r}"
                    )
                src.append(intern(parts[0]))
                dst.append(intern(parts[1]))
    except OSError as exc:
        raise GraphFormatError(f"cannot read edge list {path}: {exc}") from exc
    edges = np.column_stack((src, dst)) if src else np.empty((0, 2), dtype=np.int64)
    return DirectedGraph(edges, n=len(labels), labels=labels)


def save_edge_list(g: DirectedGraph, path) -> None:
    """Write the graph in the same "src dst" text format read by load_edge_list."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{g.labels[u]} {g.labels[v]}\n")


# -- domain builders ---------------------------------------------------------


@dataclass(frozen=True)
class TradeRecord:
    exporter: str
    importer: str
    value: float


@dataclass(frozen=True)
class Reaction:
    enzyme: str
    substrates: frozenset = field(default_factory=frozenset)
    products: frozenset = field(default_factory=frozenset)


def build_trade_network(records, coverage: float = 0.90) -> DirectedGraph:
    """Keep the largest trades covering `coverage` of total value; one edge each.

    Values of duplicate (exporter, importer) pairs are summed before
    filtering.  Records are ranked by summed value descending, ties broken
    by first appearance, and the minimal prefix whose cumulative value
    reaches coverage * total is kept.  Nodes are the countries touched by a
    kept trade (the edge-list text format cannot carry isolated nodes, so
    fully filtered countries are dropped with a log note).
    """
    records = list(records)
    if not records:
        raise ValueError("empty trade record list")
    if not 0.0 < coverage <= 1.0:
        raise ValueError("coverage must lie in (0, 1]")

    labels: list[str] = []
    ids: dict[str, int] = {}

    def intern(tok: str) -> int:
        i = ids.get(tok)
        if i is None:
            i = len(labels)
            ids[tok] = i
            labels.append(tok)
        return i

    totals: dict[tuple[int, int], float] = {}
    for rec in records:
        if rec.value < 0:
            raise ValueError(f"negative trade value for {rec.exporter}->{rec.importer}")
        key = (intern(rec.exporter), intern(rec.importer))
        totals[key] = totals.get(key, 0.0) + rec.value

    pairs = list(totals.items())  # insertion order = first appearance
    pairs.sort(key=lambda kv: -kv[1])  # stable: ties keep appearance order
    values = np.array([v for _, v in pairs], dtype=np.float64)
    total = values.sum()
    # relative epsilon so a prefix hitting the target exactly is kept minimal
    target = coverage * total - 1e-9 * total
    keep = int(np.searchsorted(np.cumsum(values), target)) + 1
    keep = min(keep, len(pairs))
    kept_pairs = [key for key, _ in pairs[:keep]]
    touched = sorted({c for pair in kept_pairs for c in pair})
    if len(touched) < len(labels):
        logger.info(
            "coverage filter dropped %d country(ies) with no kept trades",
            len(labels) - len(touched),
        )
    remap = {old: new for new, old in enumerate(touched)}
    edges = np.array([(remap[a], remap[b]) for a, b in kept_pairs], dtype=np.int64)
    return DirectedGraph(edges, n=len(touched), labels=[labels[i] for i in touched])


def build_enzyme_network(reactions) -> DirectedGraph:
    """Enzyme-enzyme network: e1 -> e2 iff some product of e1 is a substrate of e2."""
    reactions = list(reactions)
    if not reactions:
        raise ValueError("empty reaction list")

    labels: list[str] = []
    ids: dict[str, int] = {}
    for r in reactions:
        if r.enzyme not in ids:
            ids[r.enzyme] = len(labels)
            labels.append(r.enzyme)

    consumers: dict[str, set[int]] = {}
    for r in reactions:
        e = ids[r.enzyme]
        for s in r.substrates:
            consumers.setdefault(s, set()).add(e)

    edges = set()
    for r in reactions:
        e1 = ids[r.enzyme]
        for p in r.products:
            for e2 in consumers.get(p, ()):
                if e1 != e2:
                    edges.add((e1, e2))
    arr = np.array(sorted(edges), dtype=np.int64) if edges else np.empty((0, 2), dtype=np.int64)
    return DirectedGraph(arr, n=len(labels), labels=labels)


# -- perturbation ------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str  # "rewire" or "remove"
    fraction: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("rewire", "remove"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if not 0.0 <= self.fraction <= 0.9:
            raise ValueError("fraction must lie in [0, 0.9]")


def perturb(g: DirectedGraph, spec: PerturbationSpec) -> DirectedGraph:
    """Remove or rewire floor(fraction * m) directed edges.

    remove: the chosen edges are deleted.
    rewire: the chosen edges are deleted and the same number of new directed
    edges is inserted between uniformly chosen node pairs, rejecting
    self-loops and duplicates, so m is preserved exactly.
    """
    k = int(spec.fraction * g.m)
    if k == 0:
        return DirectedGraph(g.edges(), n=g.n, labels=g.labels)
    rng = np.random.default_rng(spec.seed)
    edges = g.edges()
    doomed = rng.choice(g.m, size=k, replace=False)
    kept_mask = np.ones(g.m, dtype=bool)
    kept_mask[doomed] = False
    kept = edges[kept_mask]

    if spec.kind == "remove":
        return DirectedGraph(kept, n=g.n, labels=g.labels)

    present = set(map(tuple, kept))
    new_edges = []
    budget = 100 * g.m
    while len(new_edges) < k:
        if budget <= 0:
            raise GenerationError(
                f"rewiring stalled after 100*m rejections ({len(new_edges)}/{k} inserted)"
            )
        u = int(rng.integers(g.n))
        v = int(rng.integers(g.n))
        budget -= 1
        if u == v or (u, v) in present:
            continue
        present.add((u, v))
        new_edges.append((u, v))
    out = np.vstack((kept, np.array(new_edges, dtype=np.int64)))
    return DirectedGraph(out, n=g.n, labels=g.labels)


def degree_preserving_rewire(g: DirectedGraph, fraction: float, seed: int = 0) -> DirectedGraph:
    """Alternative noise model for sensitivity checks: directed double-edge swaps.

    Performs floor(fraction * m) successful swaps (a->b, c->d) => (a->d, c->b),
    preserving every node's in- and out-degree.
    """
    if not 0.0 <= fraction <= 0.9:
        raise ValueError("fraction must lie in [0, 0.9]")
    target = int(fraction * g.m)
    if target == 0 or g.m < 2:
        return DirectedGraph(g.edges(), n=g.n, labels=g.labels)
    rng = np.random.default_rng(seed)
    edges = [tuple(e) for e in g.edges()]
    present = set(edges)
    done = 0
    budget = 100 * g.m
    while done < target and budget > 0:
        budget -= 1
        i, j = rng.integers(len(edges), size=2)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if a == d or c == b or (a, d) in present or (c, b) in present:
            continue
        present.discard((a, b))
        present.discard((c, d))
        present.add((a, d))
        present.add((c, b))
        edges[i] = (a, d)
        edges[j] = (c, b)
        done += 1
    if done < target:
        raise GenerationError(f"degree-preserving rewire stalled at {done}/{target} swaps")
    return DirectedGraph(np.array(edges, dtype=np.int64), n=g.n, labels=g.labels)
