"""Numba kernels for the connected-subset census.

Enumeration is ESU-style: every connected induced subset of 2-4 nodes of
the underlying undirected graph is visited exactly once, rooted at its
minimum-id node.  For each subset, every single-direction resolution of
its internal reciprocal pairs is classified through the catalog lookup
tables and counted as a full occurrence.

All subset masks use a fixed 4x4 row-major bit layout (bit a*4+b for an
edge from position a to position b) regardless of subset size, so the
partial mask built at depth d is reused by every extension at depth d+1;
each pair relation costs its two adjacency probes exactly once per ESU
tree node.

Import of this module must succeed without numba; counting falls back to
the pure-Python implementation in `counting` when numba is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        return deco

    prange = range


@njit(cache=True, inline="always")
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == v


@njit(cache=True, inline="always")
def _add_relation(out_indptr, out_indices, sub, a, b, base, recf, recb, nrec):
    # classify the (a, b) position pair: single direction goes into the base
    # mask, a reciprocal pair becomes a pending direction choice
    ua = sub[a]
    ub = sub[b]
    fwd = _has_edge(out_indptr, out_indices, ua, ub)
    rev = _has_edge(out_indptr, out_indices, ub, ua)
    if fwd and rev:
        recf[nrec] = (a << 2) + b
        recb[nrec] = (b << 2) + a
        nrec += 1
    elif fwd:
        base |= 1 << ((a << 2) + b)
    elif rev:
        base |= 1 << ((b << 2) + a)
    return base, nrec


@njit(cache=True, inline="always")
def _emit(base, nrec, recf, recb, sub, size, orb, gid, counts, freqs):
    for sel in range(1 << nrec):
        mask = base
        for t in range(nrec):
            if (sel >> t) & 1:
                mask |= 1 << recf[t]
            else:
                mask |= 1 << recb[t]
        for i in range(size):
            counts[sub[i], orb[mask, i]] += 1
        freqs[gid[mask]] += 1


@njit(cache=True)
def _census_from_root(
    v,
    out_indptr,
    out_indices,
    und_indptr,
    und_indices,
    orb2,
    gid2,
    orb3,
    gid3,
    orb4,
    gid4,
    mark,
    ext2,
    ext3,
    undo2,
    undo3,
    sub,
    recf,
    recb,
    counts,
    freqs,
):
    u_lo = und_indptr[v]
    u_hi = und_indptr[v + 1]
    mark[v] = 1
    for t in range(u_lo, u_hi):
        mark[und_indices[t]] = 1
    sub[0] = v
    # extension candidates at depth 1: neighbors of v with larger id
    e1_lo = u_lo
    while e1_lo < u_hi and und_indices[e1_lo] < v:
        e1_lo += 1
    for i1 in range(e1_lo, u_hi):
        w1 = und_indices[i1]
        sub[1] = w1
        base2, nrec2 = _add_relation(out_indptr, out_indices, sub, 0, 1, 0, recf, recb, 0)
        _emit(base2, nrec2, recf, recb, sub, 2, orb2, gid2, counts, freqs)
        n2 = 0
        for t in range(i1 + 1, u_hi):
            ext2[n2] = und_indices[t]
            n2 += 1
        nund2 = 0
        for t in range(und_indptr[w1], und_indptr[w1 + 1]):
            u = und_indices[t]
            if mark[u] == 0:  # exclusive neighbor of w1
                mark[u] = 1
                undo2[nund2] = u
                nund2 += 1
                if u > v:
                    ext2[n2] = u
                    n2 += 1
        for i2 in range(n2):
            w2 = ext2[i2]
            sub[2] = w2
            base3, nrec3 = _add_relation(
                out_indptr, out_indices, sub, 0, 2, base2, recf, recb, nrec2
            )
            base3, nrec3 = _add_relation(
                out_indptr, out_indices, sub, 1, 2, base3, recf, recb, nrec3
            )
            _emit(base3, nrec3, recf, recb, sub, 3, orb3, gid3, counts, freqs)
            n3 = 0
            for t in range(i2 + 1, n2):
                ext3[n3] = ext2[t]
                n3 += 1
            nund3 = 0
            for t in range(und_indptr[w2], und_indptr[w2 + 1]):
                u = und_indices[t]
                if mark[u] == 0:
                    mark[u] = 1
                    undo3[nund3] = u
                    nund3 += 1
                    if u > v:
                        ext3[n3] = u
                        n3 += 1
            for i3 in range(n3):
                sub[3] = ext3[i3]
                base4, nrec4 = _add_relation(
                    out_indptr, out_indices, sub, 0, 3, base3, recf, recb, nrec3
                )
                base4, nrec4 = _add_relation(
                    out_indptr, out_indices, sub, 1, 3, base4, recf, recb, nrec4
                )
                base4, nrec4 = _add_relation(
                    out_indptr, out_indices, sub, 2, 3, base4, recf, recb, nrec4
                )
                _emit(base4, nrec4, recf, recb, sub, 4, orb4, gid4, counts, freqs)
            for t in range(nund3):
                mark[undo3[t]] = 0
        for t in range(nund2):
            mark[undo2[t]] = 0
    mark[v] = 0
    for t in range(u_lo, u_hi):
        mark[und_indices[t]] = 0


@njit(cache=True, parallel=True)
def census_kernel(
    n,
    out_indptr,
    out_indices,
    und_indptr,
    und_indices,
    orb2,
    gid2,
    orb3,
    gid3,
    orb4,
    gid4,
    n_orbits,
    n_graphlets,
    nworkers,
):
    counts = np.zeros((nworkers, n, n_orbits), dtype=np.int64)
    freqs = np.zeros((nworkers, n_graphlets), dtype=np.int64)
    maxdeg = 1
    for v in range(n):
        d = und_indptr[v + 1] - und_indptr[v]
        if d > maxdeg:
            maxdeg = d
    for w in prange(nworkers):
        ext2 = np.empty(2 * maxdeg + 2, dtype=np.int64)
        ext3 = np.empty(3 * maxdeg + 3, dtype=np.int64)
        undo2 = np.empty(maxdeg + 1, dtype=np.int64)
        undo3 = np.empty(maxdeg + 1, dtype=np.int64)
        mark = np.zeros(n, dtype=np.uint8)
        sub = np.empty(4, dtype=np.int64)
        recf = np.empty(6, dtype=np.int64)
        recb = np.empty(6, dtype=np.int64)
        for v in range(w, n, nworkers):
            _census_from_root(
                v,
                out_indptr,
                out_indices,
                und_indptr,
                und_indices,
                orb2,
                gid2,
                orb3,
                gid3,
                orb4,
                gid4,
                mark,
                ext2,
                ext3,
                undo2,
                undo3,
                sub,
                recf,
                recb,
                counts[w],
                freqs[w],
            )
    return counts, freqs
