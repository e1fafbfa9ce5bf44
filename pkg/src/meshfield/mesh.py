"""In-memory mesh container: coordinates, connectivity, named regions.

Connectivity is stored 1-based in a rectangular, zero-padded integer
array: entry 0 marks an unused slot. Node and element ids in regions are
1-based and strictly increasing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .elements import ElementType, check_codes, corner_counts, dimensions, node_counts


@dataclass
class Region:
    """Named subset of mesh nodes/elements.

    Parameters
    ----------
    name : str
        Unique, non-empty region name.
    dimension : int
        Topological dimension of the region's elements.
    node_ids, element_ids : ndarray
        1-based global ids, strictly increasing.
    is_group : bool
        Marks node/element groups as opposed to regions proper.
    """

    name: str
    dimension: int
    node_ids: np.ndarray
    element_ids: np.ndarray
    is_group: bool = False

    def __post_init__(self):
        self.node_ids = np.asarray(self.node_ids, dtype=np.int64).ravel()
        self.element_ids = np.asarray(self.element_ids, dtype=np.int64).ravel()
        if not self.name:
            raise ValueError("region name must be non-empty")
        for ids, what in ((self.node_ids, "node_ids"), (self.element_ids, "element_ids")):
            if ids.size and np.any(np.diff(ids) <= 0):
                raise ValueError(f"region '{self.name}': {what} must be strictly increasing")

    @property
    def num_nodes(self) -> int:
        return int(self.node_ids.size)

    @property
    def num_elements(self) -> int:
        return int(self.element_ids.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region):
            return NotImplemented
        return (
            self.name == other.name
            and self.dimension == other.dimension
            and bool(self.is_group) == bool(other.is_group)
            and np.array_equal(self.node_ids, other.node_ids)
            and np.array_equal(self.element_ids, other.element_ids)
        )


@dataclass
class MeshInfo:
    """Aggregate mesh counters derived from the raw arrays."""

    num_nodes: int
    num_elements: int
    dimension: int
    type_counts: dict[ElementType, int] = field(default_factory=dict)

    @classmethod
    def from_arrays(cls, coordinates: np.ndarray, element_types: np.ndarray) -> "MeshInfo":
        codes, counts = np.unique(np.asarray(element_types, dtype=np.int64), return_counts=True)
        type_counts = {ElementType(int(c)): int(n) for c, n in zip(codes, counts)}
        dim = int(dimensions(element_types).max()) if len(element_types) else 0
        return cls(
            num_nodes=int(len(coordinates)),
            num_elements=int(len(element_types)),
            dimension=dim,
            type_counts=type_counts,
        )


class Mesh:
    """Finite-element mesh: node coordinates plus typed connectivity.

    Parameters
    ----------
    coordinates : (num_nodes, 3) float array
    element_types : (num_elements,) int array of :class:`ElementType` codes
    connectivity : (num_elements, max_nodes) int array
        1-based node ids, zero-padded on the right.
    regions : list of :class:`Region`
    """

    def __init__(self, coordinates, element_types, connectivity, regions=None):
        self.coordinates = np.ascontiguousarray(coordinates, dtype=np.float64)
        self.element_types = np.asarray(element_types, dtype=np.int64).ravel()
        connectivity = np.asarray(connectivity, dtype=np.int64)
        if connectivity.ndim == 1:
            connectivity = connectivity.reshape(len(self.element_types), -1)
        self.connectivity = connectivity
        self.regions: list[Region] = list(regions) if regions is not None else []

    @property
    def num_nodes(self) -> int:
        return int(self.coordinates.shape[0])

    @property
    def num_elements(self) -> int:
        return int(self.element_types.size)

    @property
    def info(self) -> MeshInfo:
        """Counters recomputed from the current arrays."""
        return MeshInfo.from_arrays(self.coordinates, self.element_types)

    def region(self, name: str) -> Region:
        for reg in self.regions:
            if reg.name == name:
                return reg
        raise KeyError(f"unknown region '{name}'; available: {[r.name for r in self.regions]}")

    def validate(self) -> None:
        """Check the structural invariants, raising ``ValueError`` on the first violation."""
        if self.coordinates.ndim != 2 or self.coordinates.shape[1] != 3:
            raise ValueError(f"coordinates must have shape (num_nodes, 3), got {self.coordinates.shape}")
        check_codes(self.element_types)
        n_el = self.num_elements
        if self.connectivity.shape[0] != n_el:
            raise ValueError("connectivity row count does not match number of elements")
        conn = self.connectivity
        if conn.size:
            if conn.min() < 0 or conn.max() > self.num_nodes:
                raise ValueError(
                    f"connectivity ids must lie in [1, {self.num_nodes}] (0 pads)"
                )
            counts = node_counts(self.element_types)
            used = (conn > 0).sum(axis=1)
            if np.any(used != counts):
                bad = int(np.nonzero(used != counts)[0][0])
                raise ValueError(
                    f"element {bad + 1} has {used[bad]} nodes, "
                    f"expected {counts[bad]} for {ElementType(int(self.element_types[bad])).name}"
                )
            # pads must trail the node block
            order = np.argsort(conn == 0, axis=1, kind="stable")
            if np.any(order != np.arange(conn.shape[1])):
                raise ValueError("connectivity padding must be trailing zeros")
        names = [r.name for r in self.regions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate region names: {names}")
        for reg in self.regions:
            if reg.node_ids.size and (reg.node_ids[0] < 1 or reg.node_ids[-1] > self.num_nodes):
                raise ValueError(f"region '{reg.name}' references invalid node ids")
            if reg.element_ids.size and (
                reg.element_ids[0] < 1 or reg.element_ids[-1] > self.num_elements
            ):
                raise ValueError(f"region '{reg.name}' references invalid element ids")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            np.array_equal(self.coordinates, other.coordinates)
            and np.array_equal(self.element_types, other.element_types)
            and _conn_equal(self.connectivity, other.connectivity)
            and sorted(self.regions, key=lambda r: r.name)
            == sorted(other.regions, key=lambda r: r.name)
        )


def _conn_equal(a: np.ndarray, b: np.ndarray) -> bool:
    """Connectivity equality up to the amount of trailing zero padding."""
    width = max(a.shape[1] if a.size else 0, b.shape[1] if b.size else 0)
    if a.shape[0] != b.shape[0]:
        return False
    pa = np.zeros((a.shape[0], width), dtype=np.int64)
    pb = np.zeros((b.shape[0], width), dtype=np.int64)
    if a.size:
        pa[:, : a.shape[1]] = a
    if b.size:
        pb[:, : b.shape[1]] = b
    return np.array_equal(pa, pb)


def compute_centroids(mesh: Mesh, region: Region | str) -> np.ndarray:
    """Arithmetic-mean centroid of every element in a region.

    Returns a ``(region.num_elements, 3)`` array ordered like
    ``region.element_ids``.
    """
    if isinstance(region, str):
        region = mesh.region(region)
    eids = region.element_ids - 1
    codes = mesh.element_types[eids]
    counts = node_counts(codes)
    if np.any(counts == 0):
        raise ValueError("region contains elements with zero nodes")
    conn = mesh.connectivity[eids]
    padded = np.vstack([np.zeros(3), mesh.coordinates])
    sums = padded[conn].sum(axis=1)
    return sums / counts[:, None]


def element_normals(mesh: Mesh, region: Region | str) -> np.ndarray:
    """Unit normal of every 2D element in a region (right-hand winding).

    Uses Newell's method on the corner loop, which is exact for planar
    polygons and robust for mildly warped quads. Degenerate (zero-area)
    elements yield a zero row and a warning.
    """
    if isinstance(region, str):
        region = mesh.region(region)
    eids = region.element_ids - 1
    codes = mesh.element_types[eids]
    if np.any(dimensions(codes) != 2):
        raise ValueError(f"region '{region.name}' contains non-surface elements")
    conn = mesh.connectivity[eids]
    corners = corner_counts(codes)
    normals = np.zeros((len(eids), 3))
    for nc in np.unique(corners):
        rows = np.nonzero(corners == nc)[0]
        loop = conn[rows, :nc] - 1
        pts = mesh.coordinates[loop]  # (k, nc, 3)
        nxt = np.roll(pts, -1, axis=1)
        # Newell: n = sum over edges of (p_i - p_j) x (p_i + p_j) / 2
        normals[rows] = 0.5 * np.cross(pts, nxt).sum(axis=1)
    norms = np.linalg.norm(normals, axis=1)
    degenerate = norms < 1e-300
    if np.any(degenerate):
        warnings.warn(
            f"{int(degenerate.sum())} degenerate (zero-area) element(s) in "
            f"region '{region.name}' skipped for normal computation"
        )
        norms[degenerate] = 1.0
    return normals / norms[:, None]


def compute_node_normals(mesh: Mesh, region: Region | str) -> np.ndarray:
    """Per-node normals as the normalized average of adjacent element unit normals.

    The region must consist of 2D surface elements; orientation follows
    each element's winding (no global reorientation). Rows for nodes
    whose averaged normal vanishes are returned as zeros.
    """
    if isinstance(region, str):
        region = mesh.region(region)
    el_normals = element_normals(mesh, region)
    eids = region.element_ids - 1
    conn = mesh.connectivity[eids]
    acc = np.zeros((mesh.num_nodes + 1, 3))
    cnt = np.zeros(mesh.num_nodes + 1)
    keep = np.linalg.norm(el_normals, axis=1) > 0.5  # excludes degenerate rows
    for k in np.nonzero(keep)[0]:
        nodes = conn[k][conn[k] > 0]
        acc[nodes] += el_normals[k]
        cnt[nodes] += 1.0
    out = np.zeros((region.num_nodes, 3))
    sel = region.node_ids
    have = cnt[sel] > 0
    out[have] = acc[sel[have]] / cnt[sel[have], None]
    norms = np.linalg.norm(out, axis=1)
    ok = norms > 1e-12
    out[ok] /= norms[ok, None]
    out[~ok] = 0.0
    if np.any(~ok):
        warnings.warn(
            f"{int((~ok).sum())} node(s) in region '{region.name}' have a "
            "degenerate averaged normal"
        )
    return out


def extract_region(mesh: Mesh, region_name: str):
    """Copy one region out as a standalone, compactly renumbered mesh.

    Returns
    -------
    sub : Mesh
        Mesh holding only the region's nodes/elements, ids renumbered
        from 1, with a single region of the same name spanning it.
    node_map : ndarray
        1-based parent node id of each new node (new id ``i+1`` maps to
        parent id ``node_map[i]``).
    element_map : ndarray
        Same for elements.
    """
    region = mesh.region(region_name)
    node_map = region.node_ids.copy()
    element_map = region.element_ids.copy()
    coords = mesh.coordinates[node_map - 1]
    codes = mesh.element_types[element_map - 1]
    conn = mesh.connectivity[element_map - 1].copy()
    # global 1-based id -> new 1-based id
    lookup = np.zeros(mesh.num_nodes + 1, dtype=np.int64)
    lookup[node_map] = np.arange(1, node_map.size + 1)
    used = conn > 0
    if used.size and np.any(lookup[conn[used]] == 0):
        raise ValueError(
            f"region '{region_name}' elements reference nodes outside the region"
        )
    conn[used] = lookup[conn[used]]
    width = int(node_counts(codes).max()) if codes.size else 0
    conn = conn[:, :max(width, 1)] if conn.size else conn
    sub = Mesh(
        coords,
        codes,
        conn,
        regions=[
            Region(
                name=region.name,
                dimension=region.dimension,
                node_ids=np.arange(1, node_map.size + 1),
                element_ids=np.arange(1, element_map.size + 1),
                is_group=region.is_group,
            )
        ],
    )
    return sub, node_map, element_map
