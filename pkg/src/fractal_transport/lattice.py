"""Lattice constructions: Sierpinski gasket and carpet, regular triangular and
square patches, and the gasket-in-triangle interpolating lattice.

All lattices use the lattice constant ``a = 1``.  Triangular geometries are
built on integer coordinates ``(i, j)`` of the triangular Bravais lattice and
mapped to Euclidean coordinates ``x = i + j/2``, ``y = j*sqrt(3)/2``, so the
lower-left corner sits at the origin.  Sites are ordered lexicographically by
``(y, x)`` (rounded to 1e-9); edges are stored once as ``(i, j)`` with
``i < j`` and sorted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import BoundsError, DomainError

SQRT3_2 = np.sqrt(3.0) / 2.0
COORD_DECIMALS = 9
GEOMETRY_TOL = 1e-9

MAX_GASKET_GENERATION = 9
MAX_CARPET_GENERATION = 6

# triangular-lattice nearest-neighbour offsets in (i, j), one per undirected bond
_TRI_OFFSETS = ((1, 0), (0, 1), (-1, 1))


class CouplingClass(enum.IntEnum):
    FRACTAL = 0
    COMPLEMENT = 1


class LatticeKind(str, enum.Enum):
    GASKET = "gasket"
    CARPET = "carpet"
    TRIANGULAR = "triangular"
    SQUARE = "square"
    INTERPOLATING = "interpolating"

    @property
    def is_triangular(self):
        return self in (LatticeKind.GASKET, LatticeKind.TRIANGULAR, LatticeKind.INTERPOLATING)


@dataclass(frozen=True)
class RegionSpec:
    """Closed sub-triangle of side ``2**generation`` anchored at a host corner.

    ``corner`` is one of ``"lower-left"``, ``"lower-right"``, ``"top"``.
    """

    generation: int
    corner: str = "lower-left"


@dataclass(frozen=True, eq=False)
class LatticeGraph:
    """Sites with Euclidean coordinates and labelled nearest-neighbour edges.

    Attributes
    ----------
    kind : LatticeKind
    generation : int
        Fractal generation; 0 for regular lattices.
    side_length : float
        Corner-to-corner side ``L`` in units of the lattice constant.
    coords : (N, 2) ndarray
    edges : (M, 2) ndarray of int
        Undirected bonds ``(i, j)`` with ``i < j``, sorted.
    edge_classes : (M,) ndarray of int8
        :class:`CouplingClass` value of each bond.
    """

    kind: LatticeKind
    generation: int
    side_length: float
    coords: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    edge_classes: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.coords, self.edges, self.edge_classes):
            arr.setflags(write=False)

    @property
    def n_sites(self):
        return len(self.coords)

    @property
    def n_edges(self):
        return len(self.edges)

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.n_sites)

    def adjacency(self):
        """Symmetric 0/1 adjacency matrix in CSR format."""
        n = self.n_sites
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(i))
        return sp.csr_matrix((data, (np.r_[i, j], np.r_[j, i])), shape=(n, n))

    def neighbors(self, site):
        e = self.edges[(self.edges[:, 0] == site) | (self.edges[:, 1] == site)]
        return np.sort(np.where(e[:, 0] == site, e[:, 1], e[:, 0]))

    def is_connected(self):
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def __eq__(self, other):
        if not isinstance(other, LatticeGraph):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.generation == other.generation
            and self.side_length == other.side_length
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.edge_classes, other.edge_classes)
        )

    __hash__ = None

    def validate(self):
        """Check the structural invariants; raise :class:`DomainError` on failure."""
        tree = cKDTree(self.coords)
        if tree.query_pairs(1.0 - GEOMETRY_TOL):
            raise DomainError("sites closer than one lattice constant")
        if self.n_edges:
            d = np.linalg.norm(self.coords[self.edges[:, 0]] - self.coords[self.edges[:, 1]], axis=1)
            if np.max(np.abs(d - 1.0)) > GEOMETRY_TOL:
                raise DomainError("edge length differs from the lattice constant")
            if np.any(self.edges[:, 0] >= self.edges[:, 1]):
                raise DomainError("edges must be stored as (i, j) with i < j")
            if len(np.unique(self.edges, axis=0)) != self.n_edges:
                raise DomainError("duplicate edge")
        if not self.is_connected():
            raise DomainError("lattice is not connected")
        if self.kind != LatticeKind.INTERPOLATING and np.any(
            self.edge_classes == CouplingClass.COMPLEMENT
        ):
            raise DomainError("complement bonds outside an interpolating lattice")


# --------------------------------------------------------------------------
# integer-coordinate constructions


def _tri_xy(ij):
    ij = np.asarray(ij, dtype=float).reshape(-1, 2)
    return np.column_stack((ij[:, 0] + 0.5 * ij[:, 1], SQRT3_2 * ij[:, 1]))


def _gasket_cells(generation):
    """Site and bond sets of the gasket in triangular integer coordinates."""
    sites = {(0, 0), (1, 0), (0, 1)}
    bonds = {((0, 0), (1, 0)), ((0, 0), (0, 1)), ((0, 1), (1, 0))}
    for k in range(1, generation + 1):
        h = 2 ** (k - 1)
        new_sites, new_bonds = set(), set()
        for di, dj in ((0, 0), (h, 0), (0, h)):
            new_sites.update((i + di, j + dj) for i, j in sites)
            new_bonds.update(
                tuple(sorted(((a[0] + di, a[1] + dj), (b[0] + di, b[1] + dj)))) for a, b in bonds
            )
        sites, bonds = new_sites, new_bonds
    return sites, bonds


def _triangle_cells(n):
    sites = {(i, j) for j in range(n) for i in range(n - j)}
    bonds = set()
    for i, j in sites:
        for di, dj in _TRI_OFFSETS:
            b = (i + di, j + dj)
            if b in sites:
                bonds.add(tuple(sorted(((i, j), b))))
    return sites, bonds


def _carpet_cell_kept(cx, cy):
    while cx or cy:
        if cx % 3 == 1 and cy % 3 == 1:
            return False
        cx //= 3
        cy //= 3
    return True


def _finalize(kind, generation, side_length, sites, bonds, to_xy, complement=frozenset()):
    order = sorted(sites)
    xy = to_xy(order)
    keys = np.round(xy, COORD_DECIMALS)
    perm = np.lexsort((keys[:, 0], keys[:, 1]))
    index = {order[p]: k for k, p in enumerate(perm)}
    coords = xy[perm]
    coords[np.abs(coords) < GEOMETRY_TOL] = 0.0

    edges = np.array(
        sorted(tuple(sorted((index[a], index[b]))) for a, b in bonds), dtype=np.int64
    ).reshape(-1, 2)
    comp_idx = {tuple(sorted((index[a], index[b]))) for a, b in complement}
    classes = np.array(
        [CouplingClass.COMPLEMENT if tuple(e) in comp_idx else CouplingClass.FRACTAL for e in edges],
        dtype=np.int8,
    )
    return LatticeGraph(LatticeKind(kind), generation, float(side_length), coords, edges, classes)


def _check_int(name, value, lo, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise BoundsError(f"{name} must be an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        rng = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise BoundsError(f"{name}={value} outside {rng}")
    return int(value)


def build_gasket(generation):
    """Sierpinski gasket G(X) with side ``L = 2**X``.

    G(X) is made of three copies of G(X-1) sharing three vertices, starting
    from a single triangle as G(0).  It has ``3 (3**X + 1) / 2`` sites and
    ``3**(X+1)`` bonds.
    """
    generation = _check_int("generation", generation, 1, MAX_GASKET_GENERATION)
    sites, bonds = _gasket_cells(generation)
    return _finalize("gasket", generation, 2**generation, sites, bonds, _tri_xy)


def build_carpet(generation):
    """Sierpinski carpet on a square of ``3**(generation-1)`` unit cells per side.

    A vertex is kept if it touches a retained cell, and an edge if it bounds one,
    so the perimeters of the holes are connected paths.
    """
    generation = _check_int("generation", generation, 1, MAX_CARPET_GENERATION)
    n = 3 ** (generation - 1)
    sites, bonds = set(), set()
    for cx in range(n):
        for cy in range(n):
            if not _carpet_cell_kept(cx, cy):
                continue
            corners = ((cx, cy), (cx + 1, cy), (cx + 1, cy + 1), (cx, cy + 1))
            sites.update(corners)
            for k in range(4):
                bonds.add(tuple(sorted((corners[k], corners[(k + 1) % 4]))))
    return _finalize("carpet", generation, n, sites, bonds, lambda c: np.asarray(c, dtype=float))


def build_triangular(side_vertices):
    """Triangular patch with ``side_vertices`` sites along every edge."""
    n = _check_int("side_vertices", side_vertices, 2)
    sites, bonds = _triangle_cells(n)
    return _finalize("triangular", 0, n - 1, sites, bonds, _tri_xy)


def build_square(side_vertices):
    n = _check_int("side_vertices", side_vertices, 2)
    sites = {(i, j) for i in range(n) for j in range(n)}
    bonds = {((i, j), (i + 1, j)) for i in range(n - 1) for j in range(n)}
    bonds |= {((i, j), (i, j + 1)) for i in range(n) for j in range(n - 1)}
    return _finalize("square", 0, n - 1, sites, bonds, lambda c: np.asarray(c, dtype=float))


def build_interpolating(generation):
    """Regular triangle of side ``2**generation`` with the embedded gasket labelled.

    Bonds of the embedded G(generation) are :attr:`CouplingClass.FRACTAL`, all
    remaining nearest-neighbour bonds :attr:`CouplingClass.COMPLEMENT`.
    """
    generation = _check_int("generation", generation, 1, MAX_GASKET_GENERATION)
    _, gasket_bonds = _gasket_cells(generation)
    sites, bonds = _triangle_cells(2**generation + 1)
    complement = bonds - gasket_bonds
    return _finalize("interpolating", generation, 2**generation, sites, bonds, _tri_xy, complement)


def build_lattice(kind, generation=None, side_vertices=None):
    """Dispatch on ``kind``; fractal kinds take ``generation``, regular ones ``side_vertices``."""
    kind = LatticeKind(kind)
    if kind == LatticeKind.GASKET:
        return build_gasket(generation)
    if kind == LatticeKind.CARPET:
        return build_carpet(generation)
    if kind == LatticeKind.INTERPOLATING:
        return build_interpolating(generation)
    if kind == LatticeKind.TRIANGULAR:
        return build_triangular(side_vertices)
    return build_square(side_vertices)


def predicted_site_count(kind, generation=None, side_vertices=None):
    """Site count of a lattice without building it (used by resource guards)."""
    kind = LatticeKind(kind)
    if kind == LatticeKind.GASKET:
        return 3 * (3**generation + 1) // 2
    if kind == LatticeKind.INTERPOLATING:
        n = 2**generation + 1
        return n * (n + 1) // 2
    if kind == LatticeKind.TRIANGULAR:
        return side_vertices * (side_vertices + 1) // 2
    if kind == LatticeKind.SQUARE:
        return side_vertices**2
    n = 3 ** (generation - 1)
    cells = [(cx, cy) for cx in range(n) for cy in range(n) if _carpet_cell_kept(cx, cy)]
    return len({(cx + dx, cy + dy) for cx, cy in cells for dx in (0, 1) for dy in (0, 1)})


# --------------------------------------------------------------------------
# geometric queries


def _corner_points(lattice):
    L = lattice.side_length
    if lattice.kind.is_triangular:
        return {
            "lower-left": (0.0, 0.0),
            "lower-right": (L, 0.0),
            "top": (0.5 * L, SQRT3_2 * L),
        }
    return {
        "lower-left": (0.0, 0.0),
        "lower-right": (L, 0.0),
        "upper-left": (0.0, L),
        "upper-right": (L, L),
    }


def _site_at(lattice, point):
    d = np.linalg.norm(lattice.coords - np.asarray(point), axis=1)
    k = int(np.argmin(d))
    if d[k] > GEOMETRY_TOL * max(1.0, lattice.side_length):
        raise DomainError(f"no site at {point}")
    return k


def corner_sites(lattice):
    """Indices of the extremal vertices, ordered lexicographically by ``(x, y)``."""
    if lattice.n_sites == 0:
        raise DomainError("empty lattice")
    idx = [_site_at(lattice, p) for p in _corner_points(lattice).values()]
    return sorted(idx, key=lambda k: (round(lattice.coords[k, 0], COORD_DECIMALS),
                                      round(lattice.coords[k, 1], COORD_DECIMALS)))


def corner_site(lattice, corner="lower-left"):
    points = _corner_points(lattice)
    if corner not in points:
        raise DomainError(f"unknown corner {corner!r}; expected one of {sorted(points)}")
    return _site_at(lattice, points[corner])


def corner_neighbor(lattice, corner="lower-left"):
    """Neighbour of ``corner`` along the bottom edge (same ``y``), lowest index first.

    Corners without a neighbour at the same height (the top corner) fall back to
    the lowest-index neighbour.
    """
    c = corner_site(lattice, corner)
    nbrs = lattice.neighbors(c)
    same_row = [k for k in nbrs if abs(lattice.coords[k, 1] - lattice.coords[c, 1]) < GEOMETRY_TOL]
    return int(min(same_row) if same_row else nbrs[0])


def region_sites(lattice, region):
    """Sites inside the closed sub-triangle of side ``2**region.generation``.

    The sub-triangle is the host triangle shrunk towards ``region.corner``.
    """
    if not lattice.kind.is_triangular:
        raise DomainError(f"regions are defined on triangular geometries, not {lattice.kind.value}")
    i = region.generation
    L = lattice.side_length
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or i < 0 or 2**i > L + GEOMETRY_TOL:
        raise BoundsError(f"region generation {i!r} outside [0, log2(L)] for L={L}")
    points = _corner_points(lattice)
    if region.corner not in points:
        raise BoundsError(f"unknown corner {region.corner!r}")
    anchor = np.asarray(points[region.corner])
    scale = L / 2**i
    q = anchor + scale * (lattice.coords - anchor)
    # host triangle: y >= 0, y <= sqrt3 x, y <= sqrt3 (L - x)
    tol = GEOMETRY_TOL * max(1.0, L) * scale
    s3 = np.sqrt(3.0)
    inside = (
        (q[:, 1] >= -tol)
        & (q[:, 1] <= s3 * q[:, 0] + tol)
        & (q[:, 1] <= s3 * (L - q[:, 0]) + tol)
    )
    return set(np.flatnonzero(inside).tolist())
