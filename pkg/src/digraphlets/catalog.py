"""Catalog of 2-4-node directed graphlets and their automorphism orbits.

A directed graphlet is a weakly connected oriented digraph on 2-4 nodes
(no pair of nodes carries edges in both directions).  The catalog is
derived once by brute force rather than transcribed from a figure:

* A labeled digraph on k nodes is encoded as a row-major adjacency
  bitmask (bit i*k+j set iff edge i->j exists).
* Its canonical code is the minimum bitmask over all k! relabelings.
* Graphlets are the canonical codes of all weakly connected oriented
  labeled digraphs, numbered by (size, edge count, canonical code).
* Orbits (automorphism classes of node positions) are numbered by
  (graphlet id, minimal position in the canonical labeling).

This yields 1 + 5 + 34 = 40 graphlets and 2 + 11 + 116 = 129 orbits.
The deterministic numbering is the package-wide contract; named orbit
groups (broker, peripheral, ...) are resolved structurally from graphlet
shape, never by literal index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

GRAPHLET_SIZES = (2, 3, 4)
N_GRAPHLETS = 40
N_ORBITS = 129


def mask_from_edges(edges, k: int) -> int:
    m = 0
    for i, j in edges:
        if i == j:
            raise ValueError("self-loop in graphlet edge list")
        m |= 1 << (i * k + j)
    return m


def edges_from_mask(mask: int, k: int) -> tuple[tuple[int, int], ...]:
    return tuple(
        (i, j) for i in range(k) for j in range(k) if i != j and (mask >> (i * k + j)) & 1
    )


def permute_mask(mask: int, perm, k: int) -> int:
    out = 0
    for i, j in edges_from_mask(mask, k):
        out |= 1 << (perm[i] * k + perm[j])
    return out


def is_weakly_connected(mask: int, k: int) -> bool:
    adj = [0] * k
    for i, j in edges_from_mask(mask, k):
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for i in range(k):
            if (frontier >> i) & 1:
                nxt |= adj[i]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << k) - 1


def has_reciprocal_pair(mask: int, k: int) -> bool:
    for i in range(k):
        for j in range(i + 1, k):
            if (mask >> (i * k + j)) & 1 and (mask >> (j * k + i)) & 1:
                return True
    return False


@dataclass(frozen=True)
class Graphlet:
    id: int
    size: int
    edges: tuple[tuple[int, int], ...]  # canonical labeling
    orbit_of_position: tuple[int, ...]  # position -> global orbit id

    @property
    def canonical_mask(self) -> int:
        return mask_from_edges(self.edges, self.size)


@dataclass(frozen=True)
class GraphletCatalog:
    graphlets: tuple[Graphlet, ...]
    orbit_count: int
    orbit_graphlet: np.ndarray  # orbit id -> graphlet id
    orbit_class_size: np.ndarray  # orbit id -> number of positions in its class
    # per-size lookup tables over all 2**(k*k) masks; -1 marks invalid masks
    orbit_tables: dict  # k -> int16 array (2**(k*k), k): mask, position -> orbit
    graphlet_tables: dict  # k -> int16 array (2**(k*k),): mask -> graphlet id

    def orbits_for_max_size(self, max_size: int) -> np.ndarray:
        """Orbit ids of all graphlets with size <= max_size (ascending)."""
        keep = [
            o
            for o in range(self.orbit_count)
            if self.graphlets[self.orbit_graphlet[o]].size <= max_size
        ]
        return np.array(keep, dtype=np.int64)


def _all_oriented_masks(k: int):
    """All labeled oriented digraphs on k nodes (each pair: none / i->j / j->i)."""
    pairs = list(combinations(range(k), 2))
    masks = [0]
    for i, j in pairs:
        nxt = []
        fwd = 1 << (i * k + j)
        rev = 1 << (j * k + i)
        for m in masks:
            nxt.append(m)
            nxt.append(m | fwd)
            nxt.append(m | rev)
        masks = nxt
    return masks


@lru_cache(maxsize=1)
def get_catalog() -> GraphletCatalog:
    """Build the catalog (pure, deterministic; cached after the first call)."""
    classes = []  # (size, edge_count, canonical_mask)
    members: dict[tuple[int, int], list[int]] = {}  # (k, canon) -> labeled masks
    for k in GRAPHLET_SIZES:
        perms = list(permutations(range(k)))
        for m in _all_oriented_masks(k):
            if m == 0 or not is_weakly_connected(m, k):
                continue
            canon = min(permute_mask(m, p, k) for p in perms)
            key = (k, canon)
            if key not in members:
                members[key] = []
                classes.append((k, bin(canon).count("1"), canon))
            members[key].append(m)
    classes.sort()

    graphlets = []
    orbit_graphlet: list[int] = []
    orbit_class_size: list[int] = []
    orbit_tables = {k: np.full((1 << (k * k), k), -1, dtype=np.int16) for k in GRAPHLET_SIZES}
    graphlet_tables = {k: np.full(1 << (k * k), -1, dtype=np.int16) for k in GRAPHLET_SIZES}

    for gid, (k, _ec, canon) in enumerate(classes):
        perms = list(permutations(range(k)))
        autos = [p for p in perms if permute_mask(canon, p, k) == canon]
        # orbit representative = minimal automorphic image of the position
        rep = [min(p[pos] for p in autos) for pos in range(k)]
        orbit_id_of_rep: dict[int, int] = {}
        for r in sorted(set(rep)):
            orbit_id_of_rep[r] = len(orbit_graphlet)
            orbit_graphlet.append(gid)
            orbit_class_size.append(rep.count(r))
        orbit_of_position = tuple(orbit_id_of_rep[r] for r in rep)
        graphlets.append(
            Graphlet(id=gid, size=k, edges=edges_from_mask(canon, k), orbit_of_position=orbit_of_position)
        )
        # fill lookup rows for every labeled isomorph of this class
        otab, gtab = orbit_tables[k], graphlet_tables[k]
        for labeled in members[(k, canon)]:
            # find one relabeling carrying the labeled mask onto the canon
            for p in perms:
                if permute_mask(labeled, p, k) == canon:
                    gtab[labeled] = gid
                    for pos in range(k):
                        otab[labeled, pos] = orbit_of_position[p[pos]]
                    break

    for arr in list(orbit_tables.values()) + list(graphlet_tables.values()):
        arr.flags.writeable = False
    return GraphletCatalog(
        graphlets=tuple(graphlets),
        orbit_count=len(orbit_graphlet),
        orbit_graphlet=np.array(orbit_graphlet, dtype=np.int64),
        orbit_class_size=np.array(orbit_class_size, dtype=np.int64),
        orbit_tables=orbit_tables,
        graphlet_tables=graphlet_tables,
    )


def classify(size: int, edges) -> tuple[int, tuple[int, ...]]:
    """Classify a labeled oriented digraph on positions 0..size-1.

    Returns (graphlet id, orbit id per position).  Raises ValueError for
    sizes outside 2..4, reciprocal pairs, or disconnected inputs.
    """
    if size not in GRAPHLET_SIZES:
        raise ValueError(f"graphlet size must be one of {GRAPHLET_SIZES}, got {size}")
    mask = mask_from_edges(edges, size)
    if has_reciprocal_pair(mask, size):
        raise ValueError("input contains a reciprocal edge pair")
    if not is_weakly_connected(mask, size):
        raise ValueError("input is not weakly connected")
    cat = get_catalog()
    gid = int(cat.graphlet_tables[size][mask])
    orbits = tuple(int(o) for o in cat.orbit_tables[size][mask])
    return gid, orbits


@dataclass(frozen=True)
class RoleOrbitSets:
    """Orbit groups on the eight triangle-plus-pendant graphlets.

    The pendant node is the peripheral position, its attachment node on the
    triangle is the broker position, and the two remaining triangle nodes
    are core non-broker positions.  Import/export variants split by the
    direction of the pendant edge: toward the pendant node (the periphery
    imports) or away from it (the periphery exports).
    """

    peripheral_import: frozenset
    peripheral_export: frozenset
    broker_import: frozenset
    broker_export: frozenset
    core_nonbroker: frozenset

    @property
    def peripheral(self) -> frozenset:
        return self.peripheral_import | self.peripheral_export

    @property
    def broker(self) -> frozenset:
        return self.broker_import | self.broker_export


def role_orbit_sets(catalog: GraphletCatalog | None = None) -> RoleOrbitSets:
    """Identify broker / peripheral / core orbit groups structurally."""
    cat = catalog or get_catalog()
    peri_imp, peri_exp, brok_imp, brok_exp, core = set(), set(), set(), set(), set()
    for g in cat.graphlets:
        if g.size != 4:
            continue
        und = {frozenset(e) for e in g.edges}
        if len(und) != 4:
            continue
        deg = [0, 0, 0, 0]
        for e in und:
            for node in e:
                deg[node] += 1
        if sorted(deg) != [1, 2, 2, 3]:
            continue
        pendant = deg.index(1)
        attach = next(iter(next(e for e in und if pendant in e) - {pendant}))
        tri = [p for p in range(4) if p != pendant]
        if not all(frozenset((a, b)) in und for a, b in combinations(tri, 2)):
            continue
        toward_pendant = (attach, pendant) in g.edges
        orb = g.orbit_of_position
        if toward_pendant:
            peri_imp.add(orb[pendant])
            brok_imp.add(orb[attach])
        else:
            peri_exp.add(orb[pendant])
            brok_exp.add(orb[attach])
        core.update(orb[p] for p in tri if p != attach)
    return RoleOrbitSets(
        peripheral_import=frozenset(peri_imp),
        peripheral_export=frozenset(peri_exp),
        broker_import=frozenset(brok_imp),
        broker_export=frozenset(brok_exp),
        core_nonbroker=frozenset(core),
    )
