"""Mesh sweeps, rigid-body transforms, and rigid registration.

Euler angles follow the intrinsic Z-Y'-X'' convention throughout: alpha
rotates about z, beta about the new y, gamma about the newest x, i.e.
``R = Rz(alpha) @ Ry(beta) @ Rx(gamma)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .config import worker_count
from .elements import ElementType
from .mesh import Mesh, Region
from .results import ResultArray

_EULER_ORDER = "ZYX"  # intrinsic: alpha about Z, beta about Y', gamma about X''


@dataclass
class RigidTransform:
    """Rotation-plus-translation map ``x' = R x + t``.

    ``euler_angles`` are (alpha, beta, gamma) in radians, intrinsic
    Z-Y'-X''. Vectors transform with the rotation only.
    """

    translation: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(3))
    euler_angles: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.translation = np.asarray(self.translation, dtype=float).reshape(3)
        self.euler_angles = np.asarray(self.euler_angles, dtype=float).reshape(3)

    @property
    def rotation_matrix(self) -> np.ndarray:
        return Rotation.from_euler(_EULER_ORDER, self.euler_angles).as_matrix()

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.rotation_matrix.T + self.translation

    def apply_vectors(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors) @ self.rotation_matrix.T

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Transform applying ``other`` first, then ``self``."""
        rot = Rotation.from_matrix(self.rotation_matrix @ other.rotation_matrix)
        t = self.rotation_matrix @ other.translation + self.translation
        return RigidTransform(t, rot.as_euler(_EULER_ORDER))

    def inverse(self) -> "RigidTransform":
        rinv = self.rotation_matrix.T
        rot = Rotation.from_matrix(rinv)
        return RigidTransform(-rinv @ self.translation, rot.as_euler(_EULER_ORDER))


def _region_of(mesh: Mesh, region: Region | str) -> Region:
    return mesh.region(region) if isinstance(region, str) else region


def _local_ids(mesh: Mesh, region: Region) -> np.ndarray:
    lookup = np.full(mesh.num_nodes + 1, -1, dtype=np.int64)
    lookup[region.node_ids] = np.arange(region.num_nodes)
    return lookup


_SWEPT_TYPE = {
    ElementType.LINE2: ElementType.QUAD4,
    ElementType.TRIA3: ElementType.WEDGE6,
    ElementType.QUAD4: ElementType.HEXA8,
}


def _swept_connectivity(code: int, bottom: np.ndarray, top: np.ndarray) -> np.ndarray:
    if code == ElementType.LINE2:
        return np.array([bottom[0], bottom[1], top[1], top[0]])
    return np.concatenate([bottom, top])


def extrude_mesh_region(mesh: Mesh, region: Region | str, path) -> Mesh:
    """Sweep a 1D or 2D region along a piecewise-linear path of offsets.

    Base nodes are copied at the cumulative offsets; LINE2 becomes
    QUAD4, TRIA3 becomes WEDGE6, QUAD4 becomes HEXA8. The result has
    ``len(path)`` element layers in a single region named after the
    base region.
    """
    region = _region_of(mesh, region)
    path = np.atleast_2d(np.asarray(path, dtype=float))
    if path.shape[1] != 3 or len(path) < 1:
        raise ValueError("path must be a list of offset 3-vectors")
    seg_len = np.linalg.norm(path, axis=1)
    if np.any(seg_len == 0):
        raise ValueError("zero-length path segment")
    if np.linalg.norm(path.sum(axis=0)) == 0:
        raise ValueError("extrusion path has zero total offset")
    if region.dimension not in (1, 2):
        raise ValueError(
            f"region '{region.name}' has dimension {region.dimension}; "
            "extrusion needs a 1D or 2D base"
        )
    codes = mesh.element_types[region.element_ids - 1]
    for code in np.unique(codes):
        if ElementType(code) not in _SWEPT_TYPE:
            raise ValueError(
                f"unsupported base element type {ElementType(code).name}"
            )

    offsets = np.vstack([np.zeros(3), np.cumsum(path, axis=0)])
    n_layers = len(offsets)
    base = mesh.coordinates[region.node_ids - 1]
    n_base = len(base)
    coords = (base[None, :, :] + offsets[:, None, :]).reshape(-1, 3)

    lookup = _local_ids(mesh, region)
    conn_in = mesh.connectivity[region.element_ids - 1]
    new_types, new_conn = [], []
    for e, code in enumerate(codes):
        et = ElementType(code)
        local = lookup[conn_in[e][: et.node_count]]
        for k in range(n_layers - 1):
            bottom = k * n_base + local + 1
            top = (k + 1) * n_base + local + 1
            new_types.append(int(_SWEPT_TYPE[et]))
            new_conn.append(_swept_connectivity(code, bottom, top))
    return _assemble(coords, new_types, new_conn, region.name, region.dimension + 1)


def revolve_mesh_region(
    mesh: Mesh,
    region: Region | str,
    axis_point,
    axis_dir,
    angle: float,
    num_segments: int,
) -> Mesh:
    """Sweep a region around an axis in ``num_segments`` rotation steps.

    Nodes on the axis are shared between layers rather than duplicated,
    collapsing swept elements to lower types (HEXA8 with an on-axis
    edge to WEDGE6, QUAD4 with an on-axis node to TRIA3, WEDGE6 to
    PYRA5 or TET4). A full revolution merges the last node layer into
    the first.
    """
    region = _region_of(mesh, region)
    if angle == 0:
        raise ValueError("revolution angle must be nonzero")
    if num_segments < 1:
        raise ValueError("num_segments must be >= 1")
    axis_point = np.asarray(axis_point, dtype=float).reshape(3)
    axis_dir = np.asarray(axis_dir, dtype=float).reshape(3)
    norm = np.linalg.norm(axis_dir)
    if norm == 0:
        raise ValueError("axis direction must be nonzero")
    axis_dir = axis_dir / norm

    base = mesh.coordinates[region.node_ids - 1]
    n_base = len(base)
    diag = np.linalg.norm(base.max(axis=0) - base.min(axis=0)) if n_base > 1 else 0.0
    tol = 1e-10 * diag if diag > 0 else 1e-10

    rel = base - axis_point
    radial = rel - np.outer(rel @ axis_dir, axis_dir)
    on_axis = np.linalg.norm(radial, axis=1) < tol

    closed = _is_closed_revolution(base, axis_point, axis_dir, angle, tol)
    n_layers = num_segments if closed else num_segments + 1

    # Node numbering: layer 0 holds every base node; later layers hold
    # only off-axis nodes. node_id[k, i] is the 1-based output id.
    off_axis = np.nonzero(~on_axis)[0]
    node_id = np.zeros((num_segments + 1, n_base), dtype=np.int64)
    node_id[:, :] = np.arange(1, n_base + 1)  # on-axis nodes stay shared
    coords = [base]
    next_id = n_base + 1
    for k in range(1, n_layers):
        rot = Rotation.from_rotvec(axis_dir * (k * angle / num_segments))
        layer = axis_point + rot.apply(base[off_axis] - axis_point)
        node_id[k, off_axis] = np.arange(next_id, next_id + len(off_axis))
        next_id += len(off_axis)
        coords.append(layer)
    if closed:
        node_id[num_segments] = node_id[0]
    coords = np.vstack(coords)

    lookup = _local_ids(mesh, region)
    conn_in = mesh.connectivity[region.element_ids - 1]
    codes = mesh.element_types[region.element_ids - 1]
    new_types, new_conn = [], []
    for e, code in enumerate(codes):
        et = ElementType(code)
        if et not in _SWEPT_TYPE:
            raise ValueError(f"unsupported base element type {et.name}")
        local = lookup[conn_in[e][: et.node_count]]
        elem_on_axis = on_axis[local]
        if elem_on_axis.all():
            raise ValueError(
                f"element {region.element_ids[e]} lies fully on the "
                "revolution axis"
            )
        for k in range(num_segments):
            bottom = node_id[k, local]
            top = node_id[k + 1, local]
            etype, conn = _revolved_element(et, bottom, top, elem_on_axis)
            new_types.append(int(etype))
            new_conn.append(conn)
    return _assemble(coords, new_types, new_conn, region.name, region.dimension + 1)


def _is_closed_revolution(base, axis_point, axis_dir, angle, tol) -> bool:
    if abs(angle) <= np.pi:  # a full turn is the only way to close the sweep
        return False
    rot = Rotation.from_rotvec(axis_dir * angle)
    final = axis_point + rot.apply(base - axis_point)
    return bool(np.all(np.linalg.norm(final - base, axis=1) < tol))


def _revolved_element(et, bottom, top, on_axis):
    """Element type and connectivity for one swept copy, collapsing
    on-axis degeneracies."""
    n_on = int(on_axis.sum())
    if et is ElementType.LINE2:
        if n_on == 0:
            return ElementType.QUAD4, np.array(
                [bottom[0], bottom[1], top[1], top[0]]
            )
        # rotate so the axis node is first
        a = int(np.nonzero(on_axis)[0][0])
        b = 1 - a
        return ElementType.TRIA3, np.array([bottom[a], bottom[b], top[b]])
    if et is ElementType.TRIA3:
        if n_on == 0:
            return ElementType.WEDGE6, np.concatenate([bottom, top])
        if n_on == 1:
            a = int(np.nonzero(on_axis)[0][0])
            b, c = (a + 1) % 3, (a + 2) % 3
            return ElementType.PYRA5, np.array(
                [bottom[b], bottom[c], top[c], top[b], bottom[a]]
            )
        # two nodes on the axis: swept wedge collapses to a tetrahedron
        c = int(np.nonzero(~on_axis)[0][0])
        a, b = [i for i in range(3) if i != c]
        return ElementType.TET4, np.array(
            [bottom[a], bottom[b], bottom[c], top[c]]
        )
    if et is ElementType.QUAD4:
        if n_on == 0:
            return ElementType.HEXA8, np.concatenate([bottom, top])
        if n_on == 2:
            # the on-axis pair must form an element edge
            for shift in range(4):
                order = (np.arange(4) + shift) % 4
                if on_axis[order[0]] and on_axis[order[1]]:
                    a, b, c, d = order
                    return ElementType.WEDGE6, np.array(
                        [bottom[a], bottom[d], top[d],
                         bottom[b], bottom[c], top[c]]
                    )
            raise ValueError(
                "quadrilateral touches the axis at opposite corners; "
                "cannot collapse the swept element"
            )
        raise ValueError(
            f"quadrilateral with {n_on} node(s) on the axis cannot be "
            "collapsed to a standard element"
        )
    raise ValueError(f"unsupported base element type {et.name}")


def _assemble(coords, types, conn_rows, region_name, dimension) -> Mesh:
    if not conn_rows:
        raise ValueError("region has no elements to sweep")
    types = np.asarray(types, dtype=np.int64)
    width = max(len(c) for c in conn_rows)
    conn = np.zeros((len(conn_rows), width), dtype=np.int64)
    for i, row in enumerate(conn_rows):
        conn[i, : len(row)] = row
    regions = [
        Region(
            region_name,
            dimension,
            np.arange(1, len(coords) + 1, dtype=np.int64),
            np.arange(1, len(types) + 1, dtype=np.int64),
        )
    ]
    out = Mesh(coords, types, conn, regions)
    out.validate()
    return out


def transform_mesh_data(
    mesh: Mesh,
    regions,
    transform: RigidTransform,
    vector_arrays=(),
) -> tuple[Mesh, list[ResultArray]]:
    """Rigidly transform mesh coordinates and associated vector data.

    Coordinates map as ``x' = R x + t``; vector data rotates without
    translation. ``regions`` limits the moved nodes (None moves the
    whole mesh); every array must be a 3-component field on one of the
    moved regions. Scalar data needs no transformation and is rejected
    here.
    """
    if regions is None:
        node_mask = np.ones(mesh.num_nodes, dtype=bool)
        region_names = {r.name for r in mesh.regions}
    else:
        node_mask = np.zeros(mesh.num_nodes, dtype=bool)
        region_names = set()
        for r in regions:
            r = _region_of(mesh, r)
            node_mask[r.node_ids - 1] = True
            region_names.add(r.name)

    coords = mesh.coordinates.copy()
    coords[node_mask] = transform.apply(coords[node_mask])
    out_mesh = Mesh(
        coords,
        mesh.element_types.copy(),
        mesh.connectivity.copy(),
        [
            Region(r.name, r.dimension, r.node_ids.copy(), r.element_ids.copy(),
                   r.is_group)
            for r in mesh.regions
        ],
    )

    out_arrays = []
    for arr in vector_arrays:
        if not arr.res_type.is_field or arr.num_dims != 3:
            raise ValueError(
                f"'{arr.quantity}' is not a 3-component vector field; "
                "only vector data transforms"
            )
        if arr.region not in region_names:
            raise ValueError(
                f"'{arr.quantity}' lives on region '{arr.region}' which is "
                "not being transformed"
            )
        rot = transform.rotation_matrix
        data = np.einsum("ij,nmj->nmi", rot, arr.data)
        out_arrays.append(arr.with_data(data))
    return out_mesh, out_arrays


@dataclass
class FitResult:
    """Outcome of a rigid registration.

    ``history`` records the best objective value at each optimizer
    iteration of the winning run (non-increasing).
    """

    transform: RigidTransform
    objective: float
    history: np.ndarray


def fit_mesh(
    source_mesh: Mesh,
    source_region: Region | str,
    target_mesh: Mesh,
    target_region: Region | str,
    init: RigidTransform | None = None,
) -> FitResult:
    """Rigidly register a source region onto a target region.

    Minimizes the sum of squared distances from the transformed source
    nodes to each one's nearest target node (nearest neighbors are
    recomputed at every objective evaluation). Derivative-free simplex
    search with seeded random restarts; translations are scaled by the
    bounding-box diagonal.
    """
    source_region = _region_of(source_mesh, source_region)
    target_region = _region_of(target_mesh, target_region)
    src = source_mesh.coordinates[source_region.node_ids - 1]
    tgt = target_mesh.coordinates[target_region.node_ids - 1]
    if len(src) == 0 or len(tgt) == 0:
        raise ValueError("fit_mesh needs non-empty source and target regions")
    if len(np.unique(tgt, axis=0)) < 2:
        raise ValueError(
            "target region is a single point; the registration is degenerate"
        )

    tree = cKDTree(tgt)
    pts = np.vstack([src, tgt])
    diag = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
    scale = diag if diag > 0 else 1.0
    workers = worker_count()

    def unpack(p):
        rot = Rotation.from_euler(_EULER_ORDER, p[3:]).as_matrix()
        return p[:3] * scale, rot

    def objective(p):
        t, rot = unpack(p)
        moved = src @ rot.T + t
        d, _ = tree.query(moved, workers=workers)
        return float(d @ d)

    if init is None:
        p0 = np.zeros(6)
    else:
        p0 = np.concatenate([init.translation / scale, init.euler_angles])

    rng = np.random.default_rng(0)
    spread = np.array([0.05, 0.05, 0.05, 0.1, 0.1, 0.1])
    starts = [p0] + [p0 + rng.uniform(-1, 1, 6) * spread for _ in range(3)]

    best = None
    for start in starts:
        history = [objective(start)]
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            callback=lambda xk: history.append(objective(xk)),
            options={"fatol": 1e-12, "xatol": 1e-8, "maxiter": 500},
        )
        if best is None or res.fun < best[0]:
            best = (res.fun, res.x, np.minimum.accumulate(history))
        if best[0] < 1e-24:
            break

    fun, p, history = best
    t, _ = unpack(p)
    return FitResult(RigidTransform(t, p[3:]), fun, history)
