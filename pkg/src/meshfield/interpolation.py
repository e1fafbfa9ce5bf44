"""Linear interpolation operators between meshes and discretizations.

Every operator here is linear in the source values, so it is built once
as a sparse matrix and applied to any number of steps and dimensions.
Rows of averaging-type operators sum to one; target DOFs that could not
be matched are flagged and produce zero rows.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .config import worker_count
from .elements import corner_counts
from .mesh import Mesh, Region, compute_centroids, compute_node_normals, element_normals
from .results import ResType, ResultArray


@dataclass
class InterpolationMatrix:
    """Sparse target-by-source operator with endpoint descriptors.

    ``unmatched`` holds the (0-based) target rows that found no source
    support; those rows are all zero.
    """

    matrix: sparse.csr_matrix
    source_region: str
    target_region: str
    source_res_type: ResType
    target_res_type: ResType
    unmatched: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def apply(self, values: ResultArray) -> ResultArray:
        return apply(self, values)


def apply(op: InterpolationMatrix, values: ResultArray) -> ResultArray:
    """Apply an interpolation operator to every step and dimension.

    Metadata is carried over with the target region and result type
    substituted.
    """
    if not values.res_type.is_field:
        raise ValueError("interpolation operators act on field data only")
    n_steps, m, d = values.data.shape
    if m != op.shape[1]:
        raise ValueError(
            f"operator expects {op.shape[1]} source DOFs, data has {m}"
        )
    flat = values.data.transpose(1, 0, 2).reshape(m, n_steps * d)
    out = op.matrix @ flat
    out = out.reshape(op.shape[0], n_steps, d).transpose(1, 0, 2)
    return values.with_data(
        out, region=op.target_region, res_type=op.target_res_type
    )


def _region_local_node_index(mesh: Mesh, region: Region) -> np.ndarray:
    """Map global node id -> 0-based position in the region's node list."""
    lookup = np.full(mesh.num_nodes + 1, -1, dtype=np.int64)
    lookup[region.node_ids] = np.arange(region.num_nodes)
    return lookup


def build_node2cell(mesh: Mesh, region: Region | str) -> InterpolationMatrix:
    """Averaging operator from region nodes onto region element centers.

    Each element receives the arithmetic mean of its node values.
    """
    if isinstance(region, str):
        region = mesh.region(region)
    lookup = _region_local_node_index(mesh, region)
    conn = mesh.connectivity[region.element_ids - 1]
    rows, cols, vals = [], [], []
    for k in range(region.num_elements):
        nodes = conn[k][conn[k] > 0]
        if nodes.size == 0:
            raise ValueError("element with zero nodes in region")
        local = lookup[nodes]
        if np.any(local < 0):
            raise ValueError(
                f"element {region.element_ids[k]} references nodes outside "
                f"region '{region.name}'"
            )
        rows.append(np.full(nodes.size, k))
        cols.append(local)
        vals.append(np.full(nodes.size, 1.0 / nodes.size))
    mat = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(region.num_elements, region.num_nodes),
    )
    return InterpolationMatrix(
        mat, region.name, region.name, ResType.NODE, ResType.ELEMENT
    )


def build_cell2node(mesh: Mesh, region: Region | str) -> InterpolationMatrix:
    """Averaging operator from region elements onto region nodes.

    Each node receives the mean over its adjacent elements; nodes with
    no adjacent element in the region become unmatched zero rows.
    """
    if isinstance(region, str):
        region = mesh.region(region)
    lookup = _region_local_node_index(mesh, region)
    conn = mesh.connectivity[region.element_ids - 1]
    rows, cols = [], []
    for k in range(region.num_elements):
        nodes = conn[k][conn[k] > 0]
        local = lookup[nodes]
        local = local[local >= 0]
        rows.append(local)
        cols.append(np.full(local.size, k))
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    counts = np.bincount(rows, minlength=region.num_nodes).astype(float)
    unmatched = np.nonzero(counts == 0)[0]
    if unmatched.size:
        warnings.warn(
            f"{unmatched.size} node(s) in region '{region.name}' have no "
            "adjacent element; their rows are zero"
        )
    safe = np.where(counts > 0, counts, 1.0)
    vals = 1.0 / safe[rows]
    mat = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(region.num_nodes, region.num_elements)
    )
    return InterpolationMatrix(
        mat, region.name, region.name, ResType.ELEMENT, ResType.NODE,
        unmatched=unmatched,
    )


def node2cell(mesh: Mesh, region: Region | str, values: ResultArray) -> ResultArray:
    """Interpolate nodal values to element centers (per step and dimension)."""
    op = build_node2cell(mesh, region)
    if values.res_type is not ResType.NODE:
        raise ValueError("node2cell expects NODE data")
    return apply(op, values)


def cell2node(mesh: Mesh, region: Region | str, values: ResultArray) -> ResultArray:
    """Interpolate element values to nodes (per step and dimension)."""
    op = build_cell2node(mesh, region)
    if values.res_type is not ResType.ELEMENT:
        raise ValueError("cell2node expects ELEMENT data")
    return apply(op, values)


# ---------------------------------------------------------------------------
# Inverse distance weighting (Shepard)

@dataclass
class IDWConfig:
    """Shepard interpolation parameters.

    ``num_neighbors`` nearest points are weighted by
    ``w_i = ((R_max - r_i) / (R_max * r_i)) ** exponent`` with
    ``R_max = 1.01 * max_i(r_i)``; classic guidance keeps the exponent
    in [1, 3]. ``direction`` selects whether neighbors are searched from
    the target ('forward') or from the source ('backward') side; 'auto'
    picks forward iff there are no more targets than sources.
    """

    num_neighbors: int = 20
    exponent: float = 2.0
    direction: str = "auto"

    def __post_init__(self):
        if self.num_neighbors < 1:
            raise ValueError("num_neighbors must be >= 1")
        if self.exponent <= 0:
            raise ValueError("exponent must be > 0")
        if self.direction not in ("forward", "backward", "auto"):
            raise ValueError("direction must be 'forward', 'backward' or 'auto'")


_EXACT_MATCH_REL = 1e-12


def _idw_weights(r: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray | None]:
    """Shepard weights for one neighbor-distance row; None marks exact hits."""
    r_max = r.max()
    exact = r < _EXACT_MATCH_REL * 1.01 * r_max if r_max > 0 else np.ones_like(r, bool)
    if exact.any():
        return np.zeros_like(r), exact
    big_r = 1.01 * r_max
    w = ((big_r - r) / (big_r * r)) ** p
    return w, None


def build_idw(
    source_points: np.ndarray,
    target_points: np.ndarray,
    cfg: IDWConfig | None = None,
) -> InterpolationMatrix:
    """Build a Shepard inverse-distance-weighting operator.

    Exact matches (distance below 1e-12 of the neighborhood radius) snap
    to the coinciding source value. Ties in the neighbor search are
    broken toward the lowest source index.
    """
    cfg = cfg or IDWConfig()
    source_points = np.atleast_2d(np.asarray(source_points, dtype=float))
    target_points = np.atleast_2d(np.asarray(target_points, dtype=float))
    n_src, n_tgt = len(source_points), len(target_points)
    if n_src == 0:
        raise ValueError("no source points")
    direction = cfg.direction
    if direction == "auto":
        direction = "forward" if n_tgt <= n_src else "backward"
    n = cfg.num_neighbors
    pool = n_src if direction == "forward" else n_tgt
    if n > pool:
        raise ValueError(
            f"num_neighbors={n} exceeds the {pool} available "
            f"{'source' if direction == 'forward' else 'target'} points"
        )

    if direction == "forward":
        tree = cKDTree(source_points)
        dist, idx = tree.query(target_points, k=n, workers=worker_count())
        dist = dist.reshape(n_tgt, n)
        idx = idx.reshape(n_tgt, n)
        dist, idx = _sort_neighbors(dist, idx)
        rows, cols, vals = [], [], []
        for t in range(n_tgt):
            w, exact = _idw_weights(dist[t], cfg.exponent)
            if exact is not None:
                first = idx[t][exact].min()
                rows.append([t])
                cols.append([first])
                vals.append([1.0])
            else:
                rows.append(np.full(n, t))
                cols.append(idx[t])
                vals.append(w / w.sum())
        mat = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_tgt, n_src),
        )
        unmatched = np.zeros(0, dtype=np.int64)
    else:
        tree = cKDTree(target_points)
        dist, idx = tree.query(source_points, k=n, workers=worker_count())
        dist = dist.reshape(n_src, n)
        idx = idx.reshape(n_src, n)
        dist, idx = _sort_neighbors(dist, idx)
        rows, cols, vals = [], [], []
        exact_pairs = []
        for s in range(n_src):
            w, exact = _idw_weights(dist[s], cfg.exponent)
            if exact is not None:
                for t in idx[s][exact]:
                    exact_pairs.append((int(t), s))
                continue
            rows.append(idx[s])
            cols.append(np.full(n, s))
            vals.append(w)
        if rows:
            mat = sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(n_tgt, n_src),
            ).tolil()
        else:
            mat = sparse.lil_matrix((n_tgt, n_src))
        for t, s in exact_pairs:
            mat.rows[t], mat.data[t] = [], []
        for t, s in exact_pairs:
            mat[t, s] = 1.0
        mat = mat.tocsr()
        sums = np.asarray(mat.sum(axis=1)).ravel()
        unmatched = np.nonzero(sums == 0)[0]
        if unmatched.size:
            warnings.warn(
                f"{unmatched.size} target point(s) received no backward "
                "IDW contribution; their rows are zero"
            )
        scale = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), 0.0)
        mat = sparse.diags(scale) @ mat
    return InterpolationMatrix(
        mat.tocsr(), "", "", ResType.NODE, ResType.NODE, unmatched=unmatched
    )


def _sort_neighbors(dist, idx):
    """Order each neighbor row by (distance, source index) for determinism."""
    order = np.lexsort((idx, dist), axis=1)
    return np.take_along_axis(dist, order, 1), np.take_along_axis(idx, order, 1)


# ---------------------------------------------------------------------------
# Projection onto a source surface with linear shape functions

@dataclass
class ProjectionConfig:
    """Projection interpolation parameters.

    ``proj_direction`` is a constant 3-vector or a per-target-node array;
    by default the averaged node normals of the target region are used.
    ``search_radius`` limits candidate source elements to those whose
    centroid lies within the radius of the target node (None: twice the
    largest source element circumradius). Hits farther than
    ``max_distance`` along the projection line are rejected.
    """

    proj_direction: np.ndarray | None = None
    max_distance: float = np.inf
    search_radius: float | None = None

    def __post_init__(self):
        if self.max_distance <= 0:
            raise ValueError("max_distance must be > 0")
        if self.search_radius is not None and self.search_radius <= 0:
            raise ValueError("search_radius must be > 0")


_INSIDE_TOL = 1e-8  # reference-coordinate inside test
_NEWTON_TOL = 1e-10
_NEWTON_MAXIT = 20


def _hit_triangle(p0, e1, e2, x, d):
    """Ray/triangle-plane intersection; returns (t, shape values) or None."""
    mat = np.column_stack([e1, e2, -d])
    det = np.linalg.det(mat)
    if abs(det) < 1e-14 * max(np.linalg.norm(e1) * np.linalg.norm(e2), 1e-300):
        return None
    a, b, t = np.linalg.solve(mat, x - p0)
    if a < -_INSIDE_TOL or b < -_INSIDE_TOL or a + b > 1 + _INSIDE_TOL:
        return None
    return t, np.array([1.0 - a - b, a, b])


def _hit_quad(pts, x, d):
    """Ray/bilinear-patch intersection via Newton; (t, shape values) or None."""
    xi = np.zeros(3)  # (xi, eta, t)
    for _ in range(_NEWTON_MAXIT):
        s, e = xi[0], xi[1]
        shp = 0.25 * np.array(
            [(1 - s) * (1 - e), (1 + s) * (1 - e), (1 + s) * (1 + e), (1 - s) * (1 + e)]
        )
        dshp_ds = 0.25 * np.array([-(1 - e), (1 - e), (1 + e), -(1 + e)])
        dshp_de = 0.25 * np.array([-(1 - s), -(1 + s), (1 + s), (1 - s)])
        res = shp @ pts - x - xi[2] * d
        jac = np.column_stack([dshp_ds @ pts, dshp_de @ pts, -d])
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            return None
        xi -= step
        if np.linalg.norm(step) < _NEWTON_TOL:
            break
    else:
        return None
    s, e = xi[0], xi[1]
    if abs(s) > 1 + _INSIDE_TOL or abs(e) > 1 + _INSIDE_TOL:
        return None
    shp = 0.25 * np.array(
        [(1 - s) * (1 - e), (1 + s) * (1 - e), (1 + s) * (1 + e), (1 - s) * (1 + e)]
    )
    return xi[2], shp


def build_projection(
    source_mesh: Mesh,
    source_region: Region | str,
    target_mesh: Mesh,
    target_region: Region | str,
    cfg: ProjectionConfig | None = None,
) -> InterpolationMatrix:
    """Project target nodes onto a source surface and take shape-function weights.

    Every target node is cast along its direction vector (both ways)
    onto the candidate source elements; the nearest valid hit within
    ``max_distance`` supplies linear shape-function weights at the hit's
    reference coordinates. Quadratic source elements are linearized via
    their corner nodes. Misses become unmatched zero rows.
    """
    cfg = cfg or ProjectionConfig()
    if isinstance(source_region, str):
        source_region = source_mesh.region(source_region)
    if isinstance(target_region, str):
        target_region = target_mesh.region(target_region)

    src_eids = source_region.element_ids - 1
    codes = source_mesh.element_types[src_eids]
    corners = corner_counts(codes)
    if np.any((corners != 3) & (corners != 4)):
        raise ValueError(
            f"source region '{source_region.name}' must contain surface "
            "elements (triangles or quadrilaterals)"
        )
    conn = source_mesh.connectivity[src_eids]
    coords = source_mesh.coordinates
    centroids = compute_centroids(source_mesh, source_region)
    circum = np.zeros(len(src_eids))
    for k in range(len(src_eids)):
        pts = coords[conn[k][: corners[k]] - 1]
        circum[k] = np.linalg.norm(pts - centroids[k], axis=1).max()
    radius = cfg.search_radius
    if radius is None:
        radius = 2.0 * circum.max() if circum.size else 1.0

    targets = target_mesh.coordinates[target_region.node_ids - 1]
    directions = _projection_directions(
        cfg, target_mesh, target_region, targets, source_mesh, source_region, centroids
    )

    tree = cKDTree(centroids)
    candidates = tree.query_ball_point(targets, r=radius, workers=worker_count())
    if all(len(c) == 0 for c in candidates):
        raise ValueError(
            "no candidate source elements within the search radius of any "
            "target node; increase search_radius"
        )

    lookup = _region_local_node_index(source_mesh, source_region)
    rows, cols, vals = [], [], []
    unmatched = []
    for t, cand in enumerate(candidates):
        best = None
        d = directions[t]
        for k in sorted(cand):
            nc = corners[k]
            node_ids = conn[k][:nc]
            pts = coords[node_ids - 1]
            if nc == 3:
                hit = _hit_triangle(pts[0], pts[1] - pts[0], pts[2] - pts[0], targets[t], d)
            else:
                hit = _hit_quad(pts, targets[t], d)
            if hit is None:
                continue
            t_par, shp = hit
            distance = abs(t_par)
            if distance > cfg.max_distance:
                continue
            if best is None or distance < best[0]:
                best = (distance, node_ids, shp)
        if best is None:
            unmatched.append(t)
            continue
        _, node_ids, shp = best
        local = lookup[node_ids]
        if np.any(local < 0):
            raise ValueError(
                f"source region '{source_region.name}' elements reference "
                "nodes outside the region"
            )
        rows.append(np.full(len(local), t))
        cols.append(local)
        vals.append(shp)
    if unmatched:
        warnings.warn(
            f"{len(unmatched)} of {len(targets)} target node(s) found no "
            f"projection hit within max_distance={cfg.max_distance}"
        )
    if rows:
        mat = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(len(targets), source_region.num_nodes),
        )
    else:
        mat = sparse.csr_matrix((len(targets), source_region.num_nodes))
    return InterpolationMatrix(
        mat,
        source_region.name,
        target_region.name,
        ResType.NODE,
        ResType.NODE,
        unmatched=np.asarray(unmatched, dtype=np.int64),
    )


def _projection_directions(cfg, target_mesh, target_region, targets,
                           source_mesh, source_region, src_centroids):
    """Per-target unit direction vectors, with degenerate-normal fallback."""
    if cfg.proj_direction is not None:
        d = np.asarray(cfg.proj_direction, dtype=float)
        if d.ndim == 1:
            d = np.broadcast_to(d, (len(targets), 3)).copy()
        if d.shape != (len(targets), 3):
            raise ValueError(
                f"proj_direction must be a 3-vector or ({len(targets)}, 3) array"
            )
    else:
        try:
            d = compute_node_normals(target_mesh, target_region)
        except ValueError as exc:
            raise ValueError(
                "target region has no usable surface normals; pass "
                "proj_direction explicitly"
            ) from exc
    norms = np.linalg.norm(d, axis=1)
    bad = norms < 1e-12
    if np.any(bad):
        warnings.warn(
            f"{int(bad.sum())} target node(s) have a degenerate projection "
            "direction; falling back to the nearest source element normal"
        )
        src_normals = element_normals(source_mesh, source_region)
        tree = cKDTree(src_centroids)
        _, nearest = tree.query(targets[bad], k=1)
        d[bad] = src_normals[np.atleast_1d(nearest)]
        norms = np.linalg.norm(d, axis=1)
        if np.any(norms < 1e-12):
            raise ValueError("could not determine projection directions")
    return d / norms[:, None]
