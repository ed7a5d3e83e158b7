"""Per-node directed graphlet degree vectors and graphlet frequencies.

Two interchangeable backends compute the same census:

* "numba": JIT-compiled kernels in `_kernels`, parallel over root nodes
  (default when numba is importable).
* "python": a pure-Python mirror of the same enumeration, kept as a
  dependency-free fallback.

Selection: the `backend` argument wins, then the DIGRAPHLETS_BACKEND
environment variable ("numba" or "python"), then availability.  Worker
count for the numba path comes from the `threads` argument or
DIGRAPHLETS_THREADS; results are identical for any worker count.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels
from .catalog import N_GRAPHLETS, N_ORBITS, get_catalog
from .graph import DirectedGraph

BACKEND_ENV = "DIGRAPHLETS_BACKEND"
THREADS_ENV = "DIGRAPHLETS_THREADS"

_kernel_tables = None


def _get_kernel_tables():
    """Catalog lookup tables remapped to the kernel's fixed 4x4 bit layout."""
    global _kernel_tables
    if _kernel_tables is None:
        cat = get_catalog()
        tables = []
        for k in (2, 3, 4):
            src_orb = cat.orbit_tables[k]
            src_gid = cat.graphlet_tables[k]
            orb = np.full((1 << 16, 4), -1, dtype=np.int16)
            gid = np.full(1 << 16, -1, dtype=np.int16)
            for mask_k in np.nonzero(src_gid >= 0)[0]:
                mask44 = 0
                for a in range(k):
                    for b in range(k):
                        if a != b and (int(mask_k) >> (a * k + b)) & 1:
                            mask44 |= 1 << (a * 4 + b)
                gid[mask44] = src_gid[mask_k]
                orb[mask44, :k] = src_orb[mask_k, :k]
            orb.flags.writeable = False
            gid.flags.writeable = False
            tables.extend((orb, gid))
        _kernel_tables = tuple(tables)
    return _kernel_tables


def active_backend(backend: str | None = None) -> str:
    """Resolve the census backend ("numba" or "python")."""
    choice = backend or os.environ.get(BACKEND_ENV, "").lower() or None
    if choice is None:
        return "numba" if _kernels.NUMBA_AVAILABLE else "python"
    if choice not in ("numba", "python"):
        raise ValueError(f"unknown census backend {choice!r}")
    if choice == "numba" and not _kernels.NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not importable")
    return choice


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            threads = int(env)
        elif _kernels.NUMBA_AVAILABLE:
            threads = _kernels.numba.get_num_threads()
        else:
            threads = 1
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def census(
    g: DirectedGraph, backend: str | None = None, threads: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Count orbit touches per node and occurrences per graphlet.

    Returns (signatures, frequencies): an (n, 129) int64 matrix whose row v
    counts how often node v sits at each orbit, and a length-40 int64 vector
    of graphlet occurrence totals.  Every connected induced 2-4-node subset
    contributes once per single-direction resolution of its reciprocal pairs.
    """
    cat = get_catalog()
    n = g.n
    counts = np.zeros((n, N_ORBITS), dtype=np.int64)
    freqs = np.zeros(N_GRAPHLETS, dtype=np.int64)
    if n < 2 or g.m == 0:
        return counts, freqs

    und_indptr, und_indices = g.underlying_csr()
    if active_backend(backend) == "numba":
        nworkers = _resolve_threads(threads)
        orb2, gid2, orb3, gid3, orb4, gid4 = _get_kernel_tables()
        per_worker_counts, per_worker_freqs = _kernels.census_kernel(
            n,
            g.out_indptr,
            g.out_indices,
            und_indptr,
            und_indices,
            orb2,
            gid2,
            orb3,
            gid3,
            orb4,
            gid4,
            N_ORBITS,
            N_GRAPHLETS,
            nworkers,
        )
        counts = per_worker_counts.sum(axis=0)
        freqs = per_worker_freqs.sum(axis=0)
    else:
        _census_python(g, und_indptr, und_indices, cat, counts, freqs)
    return counts, freqs


def count_signatures(
    g: DirectedGraph, backend: str | None = None, threads: int | None = None
) -> np.ndarray:
    """Directed graphlet degree vector of every node; shape (n, 129)."""
    return census(g, backend=backend, threads=threads)[0]


def count_frequencies(
    g: DirectedGraph, backend: str | None = None, threads: int | None = None
) -> np.ndarray:
    """Occurrence totals of the 40 graphlets; shape (40,)."""
    return census(g, backend=backend, threads=threads)[1]


def _census_python(g, und_indptr, und_indices, cat, counts, freqs):
    """Pure-Python mirror of the ESU census in `_kernels`."""
    out_sets = [set(map(int, g.out_neighbors(u))) for u in range(g.n)]
    und = [und_indices[und_indptr[v] : und_indptr[v + 1]].tolist() for v in range(g.n)]
    tables = {
        k: (cat.orbit_tables[k], cat.graphlet_tables[k]) for k in (2, 3, 4)
    }

    def emit(sub):
        size = len(sub)
        base = 0
        recip = []
        for a in range(size):
            for b in range(a + 1, size):
                fwd = sub[b] in out_sets[sub[a]]
                rev = sub[a] in out_sets[sub[b]]
                if fwd and rev:
                    recip.append((a * size + b, b * size + a))
                elif fwd:
                    base |= 1 << (a * size + b)
                elif rev:
                    base |= 1 << (b * size + a)
        orb, gid = tables[size]
        for sel in range(1 << len(recip)):
            mask = base
            for t, (fbit, rbit) in enumerate(recip):
                mask |= 1 << (fbit if (sel >> t) & 1 else rbit)
            row = orb[mask]
            for i in range(size):
                counts[sub[i], row[i]] += 1
            freqs[gid[mask]] += 1

    mark = bytearray(g.n)
    for v in range(g.n):
        mark[v] = 1
        for u in und[v]:
            mark[u] = 1
        ext1 = [u for u in und[v] if u > v]
        for i1, w1 in enumerate(ext1):
            emit((v, w1))
            ext2 = ext1[i1 + 1 :]
            newly2 = []
            for u in und[w1]:
                if not mark[u]:
                    mark[u] = 1
                    newly2.append(u)
                    if u > v:
                        ext2.append(u)
            for i2, w2 in enumerate(ext2):
                emit((v, w1, w2))
                ext3 = ext2[i2 + 1 :]
                newly3 = []
                for u in und[w2]:
                    if not mark[u]:
                        mark[u] = 1
                        newly3.append(u)
                        if u > v:
                            ext3.append(u)
                for w3 in ext3:
                    emit((v, w1, w2, w3))
                for u in newly3:
                    mark[u] = 0
            for u in newly2:
                mark[u] = 0
        mark[v] = 0
        for u in und[v]:
            mark[u] = 0
