"""Mesh-to-mesh operators: averaging, Shepard weighting, surface projection."""

import numpy as np
import pytest

from meshfield.elements import ElementType
from meshfield.interpolation import (
    IDWConfig,
    ProjectionConfig,
    apply,
    build_cell2node,
    build_idw,
    build_node2cell,
    build_projection,
    cell2node,
    node2cell,
)
from meshfield.mesh import Mesh, Region
from meshfield.results import AnalysisType, ResType, ResultArray

from _factories import grid_mesh, random_mesh


def _node_array(mesh, region="surf", d=1, steps=(0.0, 0.1), rng=None):
    region = mesh.region(region)
    rng = rng or np.random.default_rng(0)
    data = rng.standard_normal((len(steps), region.num_nodes, d))
    return ResultArray(
        data,
        quantity="acouPressure",
        region=region.name,
        res_type=ResType.NODE,
        step_values=np.asarray(steps),
        analysis_type=AnalysisType.TRANSIENT,
    )


# ---------------------------------------------------------------------------
# node2cell / cell2node
# ---------------------------------------------------------------------------


def test_node2cell_matches_per_element_mean(rng):
    for _ in range(8):
        mesh = random_mesh(rng)
        region = mesh.regions[0]
        op = build_node2cell(mesh, region)
        assert op.shape == (region.num_elements, region.num_nodes)
        values = _node_array(mesh, region.name, d=3, rng=rng)
        out = apply(op, values)
        assert out.res_type is ResType.ELEMENT
        assert out.data.shape == (2, region.num_elements, 3)
        lookup = np.full(mesh.num_nodes + 1, -1)
        lookup[region.node_ids] = np.arange(region.num_nodes)
        for k, eid in enumerate(region.element_ids):
            nodes = mesh.connectivity[eid - 1]
            nodes = nodes[nodes > 0]
            expected = values.data[:, lookup[nodes], :].mean(axis=1)
            assert np.allclose(out.data[:, k, :], expected, atol=1e-12, rtol=0)


def test_cell2node_matches_adjacent_element_mean(rng):
    for _ in range(8):
        mesh = random_mesh(rng)
        region = mesh.regions[0]
        op = build_cell2node(mesh, region)
        assert op.shape == (region.num_nodes, region.num_elements)
        data = rng.standard_normal((1, region.num_elements, 1))
        values = ResultArray(
            data, quantity="acouPressure", region=region.name,
            res_type=ResType.ELEMENT, step_values=[0.0],
            analysis_type=AnalysisType.TRANSIENT,
        )
        out = apply(op, values)
        lookup = np.full(mesh.num_nodes + 1, -1)
        lookup[region.node_ids] = np.arange(region.num_nodes)
        sums = np.zeros(region.num_nodes)
        counts = np.zeros(region.num_nodes)
        for k, eid in enumerate(region.element_ids):
            nodes = mesh.connectivity[eid - 1]
            nodes = lookup[nodes[nodes > 0]]
            nodes = nodes[nodes >= 0]
            # repeated node references count with their multiplicity
            np.add.at(sums, nodes, data[0, k, 0])
            np.add.at(counts, nodes, 1.0)
        expected = np.where(counts > 0, sums / np.where(counts > 0, counts, 1), 0.0)
        assert np.allclose(out.data[0, :, 0], expected, atol=1e-12, rtol=0)
        assert np.array_equal(op.unmatched, np.nonzero(counts == 0)[0])


def test_averaging_preserves_constants():
    mesh = grid_mesh(4, element="tri")
    values = _node_array(mesh)
    values.data[:] = 3.25
    cells = node2cell(mesh, "surf", values)
    assert np.allclose(cells.data, 3.25, atol=1e-14)
    back = cell2node(mesh, "surf", cells)
    assert np.allclose(back.data, 3.25, atol=1e-14)


def test_cell2node_warns_on_isolated_node():
    mesh = grid_mesh(2)
    # node group with an extra node that no region element touches
    mesh.coordinates = np.vstack([mesh.coordinates, [5.0, 5.0, 5.0]])
    mesh.regions[0] = Region("surf", 2, np.arange(1, 6), np.array([1]))
    with pytest.warns(UserWarning, match="no.*adjacent element"):
        op = build_cell2node(mesh, "surf")
    assert np.array_equal(op.unmatched, [4])
    assert op.matrix[4].nnz == 0


def test_node2cell_rejects_foreign_nodes():
    mesh = grid_mesh(3)
    mesh.regions.append(Region("partial", 2, np.array([1, 2]), np.array([1])))
    with pytest.raises(ValueError, match="outside"):
        build_node2cell(mesh, "partial")


def test_wrappers_check_res_type():
    mesh = grid_mesh(2)
    nodal = _node_array(mesh)
    with pytest.raises(ValueError, match="ELEMENT"):
        cell2node(mesh, "surf", nodal)
    cells = node2cell(mesh, "surf", nodal)
    with pytest.raises(ValueError, match="NODE"):
        node2cell(mesh, "surf", cells)


# ---------------------------------------------------------------------------
# apply()
# ---------------------------------------------------------------------------


def test_apply_rejects_history_data():
    mesh = grid_mesh(2)
    op = build_node2cell(mesh, "surf")
    hist = ResultArray(
        np.zeros((2, 1)), quantity="acouPressure", region="surf",
        res_type=ResType.REGION, step_values=[0.0, 0.1],
        analysis_type=AnalysisType.TRANSIENT,
    )
    with pytest.raises(ValueError, match="field data"):
        apply(op, hist)


def test_apply_rejects_dof_mismatch():
    mesh = grid_mesh(2)
    op = build_node2cell(mesh, "surf")
    bad = ResultArray(
        np.zeros((1, 7, 1)), quantity="acouPressure", region="surf",
        res_type=ResType.NODE, step_values=[0.0],
        analysis_type=AnalysisType.TRANSIENT,
    )
    with pytest.raises(ValueError, match="source DOFs"):
        apply(op, bad)


def test_apply_handles_complex_and_multidim():
    mesh = grid_mesh(3)
    op = build_node2cell(mesh, "surf")
    rng = np.random.default_rng(1)
    data = rng.standard_normal((2, 9, 3)) + 1j * rng.standard_normal((2, 9, 3))
    values = ResultArray(
        data, quantity="acouVelocity", region="surf", res_type=ResType.NODE,
        step_values=[10.0, 20.0], analysis_type=AnalysisType.HARMONIC,
    )
    out = apply(op, values)
    assert out.is_complex
    dense = op.matrix.toarray()
    for n in range(2):
        for d in range(3):
            assert np.allclose(out.data[n, :, d], dense @ data[n, :, d], atol=1e-13)


# ---------------------------------------------------------------------------
# Shepard / IDW
# ---------------------------------------------------------------------------


def test_idw_two_point_hand_value():
    # distances 1 and 2, exponent 1: weights (R-r)/(R r) with R = 1.01*2
    # -> w = [51/101, 1/202], normalized first weight = 102/103
    sources = np.array([[1.0, 0, 0], [2.0, 0, 0]])
    targets = np.array([[0.0, 0, 0]])
    op = build_idw(sources, targets, IDWConfig(num_neighbors=2, exponent=1.0))
    row = op.matrix.toarray()[0]
    assert abs(row[0] - 102.0 / 103.0) < 1e-14
    assert abs(row.sum() - 1.0) < 1e-14


def test_idw_rows_sum_to_one(rng):
    for direction in ("forward", "backward"):
        sources = rng.uniform(-1, 1, (60, 3))
        targets = rng.uniform(-1, 1, (40, 3))
        cfg = IDWConfig(num_neighbors=7, exponent=2.0, direction=direction)
        op = build_idw(sources, targets, cfg)
        sums = np.asarray(op.matrix.sum(axis=1)).ravel()
        matched = np.setdiff1d(np.arange(40), op.unmatched)
        assert np.all(np.abs(sums[matched] - 1.0) <= 1e-12)
        assert np.all(sums[op.unmatched] == 0.0)


def test_idw_single_neighbor_is_nearest_map(rng):
    sources = rng.uniform(-1, 1, (30, 3))
    targets = rng.uniform(-1, 1, (12, 3))
    op = build_idw(sources, targets, IDWConfig(num_neighbors=1))
    from scipy.spatial import cKDTree

    _, nearest = cKDTree(sources).query(targets, k=1)
    dense = op.matrix.toarray()
    for t in range(12):
        assert dense[t, nearest[t]] == 1.0
        assert dense[t].sum() == 1.0


def test_idw_exact_match_snaps(rng):
    sources = rng.uniform(-1, 1, (25, 3))
    targets = np.vstack([sources[13], [[0.3, 0.3, 0.3]]])
    op = build_idw(sources, targets, IDWConfig(num_neighbors=5))
    dense = op.matrix.toarray()
    assert dense[0, 13] == 1.0
    assert np.count_nonzero(dense[0]) == 1


def test_idw_tie_breaks_to_lowest_index():
    sources = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    targets = np.zeros((1, 3))
    op = build_idw(sources, targets, IDWConfig(num_neighbors=1))
    dense = op.matrix.toarray()
    assert dense[0, 0] == 1.0 and dense[0, 1] == 0.0


def test_idw_backward_covers_sources_not_targets(rng):
    sources = np.array([[0.0, 0, 0], [10.0, 0, 0]])
    targets = np.array([[0.5, 0, 0], [9.5, 0, 0], [100.0, 0, 0]])
    cfg = IDWConfig(num_neighbors=1, direction="backward")
    with pytest.warns(UserWarning, match="no backward"):
        op = build_idw(sources, targets, cfg)
    dense = op.matrix.toarray()
    assert dense[0, 0] == 1.0
    assert dense[1, 1] == 1.0
    assert np.array_equal(op.unmatched, [2])
    assert np.all(dense[2] == 0.0)


def test_idw_neighbor_budget_checked_per_direction():
    sources = np.zeros((3, 3)) + np.arange(3)[:, None]
    targets = np.zeros((5, 3)) + np.arange(5)[:, None]
    with pytest.raises(ValueError, match="exceeds the 3 available source"):
        build_idw(sources, targets, IDWConfig(num_neighbors=4, direction="forward"))
    with pytest.raises(ValueError, match="exceeds the 5 available target"):
        build_idw(sources, targets, IDWConfig(num_neighbors=6, direction="backward"))
    # auto picks backward when targets outnumber sources: the coinciding
    # targets snap to their sources and the leftovers go unmatched,
    # which the forward path could never produce
    with pytest.warns(UserWarning, match="no backward"):
        op = build_idw(sources, targets, IDWConfig(num_neighbors=3, direction="auto"))
    assert op.shape == (5, 3)
    assert np.array_equal(op.unmatched, [3, 4])


def test_idw_config_validation():
    with pytest.raises(ValueError, match="num_neighbors"):
        IDWConfig(num_neighbors=0)
    with pytest.raises(ValueError, match="exponent"):
        IDWConfig(exponent=0.0)
    with pytest.raises(ValueError, match="direction"):
        IDWConfig(direction="sideways")
    with pytest.raises(ValueError, match="no source points"):
        build_idw(np.zeros((0, 3)), np.zeros((1, 3)))


def test_idw_is_deterministic(rng):
    sources = rng.uniform(-1, 1, (50, 3))
    targets = rng.uniform(-1, 1, (20, 3))
    a = build_idw(sources, targets, IDWConfig(num_neighbors=6))
    b = build_idw(sources, targets, IDWConfig(num_neighbors=6))
    assert (a.matrix != b.matrix).nnz == 0


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


def _affine(coords):
    return 0.7 + 1.3 * coords[:, 0] - 2.1 * coords[:, 1]


@pytest.mark.parametrize("element", ["quad", "tri"])
def test_projection_reproduces_affine_fields(element, rng):
    source = grid_mesh(8, element=element)
    target = grid_mesh(5, z=0.4, jitter=0.04, rng=rng)  # jitter moves interior nodes only
    op = build_projection(source, "surf", target, "surf",
                          ProjectionConfig(proj_direction=[0.0, 0.0, 1.0], search_radius=1.0))
    assert op.unmatched.size == 0
    src_vals = _affine(source.coordinates)
    expected = _affine(target.coordinates)
    got = op.matrix @ src_vals
    assert np.max(np.abs(got - expected)) <= 1e-10


def test_projection_uses_target_normals_by_default():
    source = grid_mesh(6)
    target = grid_mesh(4, z=-0.1)  # close enough for the automatic search radius
    op = build_projection(source, "surf", target, "surf")  # normals are +z
    assert op.unmatched.size == 0
    src_vals = _affine(source.coordinates)
    got = op.matrix @ src_vals
    assert np.max(np.abs(got - _affine(target.coordinates))) <= 1e-10


def test_projection_source_corner_gives_unit_row():
    source = grid_mesh(4)
    target = grid_mesh(4, z=1.0)  # nodes vertically above the source nodes
    op = build_projection(source, "surf", target, "surf",
                          ProjectionConfig(proj_direction=[0.0, 0.0, 1.0], search_radius=3.0))
    dense = op.matrix.toarray()
    for t in range(16):
        row = dense[t]
        assert abs(row.sum() - 1.0) <= 1e-9
        assert abs(row[t] - 1.0) <= 1e-9  # same grid numbering source side


def test_projection_max_distance_rejects_far_nodes():
    source = grid_mesh(3)
    target = grid_mesh(2, z=5.0)
    with pytest.warns(UserWarning, match="no projection hit"):
        op = build_projection(
            source, "surf", target, "surf",
            ProjectionConfig(proj_direction=[0.0, 0.0, 1.0], max_distance=1.0,
                             search_radius=50.0),
        )
    assert op.unmatched.size == 4
    assert op.matrix.nnz == 0


def test_projection_out_of_radius_raises():
    source = grid_mesh(3)
    target = grid_mesh(2, z=0.5)
    target.coordinates[:, 0] += 100.0
    with pytest.raises(ValueError, match="search_radius"):
        build_projection(source, "surf", target, "surf",
                         ProjectionConfig(proj_direction=[0.0, 0.0, 1.0]))


def test_projection_rejects_volume_source(rng):
    source = random_mesh(np.random.default_rng(2), codes=[ElementType.HEXA8], max_elements=4)
    target = grid_mesh(2)
    with pytest.raises(ValueError, match="surface"):
        build_projection(source, source.regions[0].name, target, "surf")


def test_projection_direction_shape_checked():
    source = grid_mesh(3)
    target = grid_mesh(2, z=0.2)
    with pytest.raises(ValueError, match="proj_direction"):
        build_projection(source, "surf", target, "surf",
                         ProjectionConfig(proj_direction=np.zeros((7, 3))))


def test_projection_pointcloud_requires_direction():
    # a target region of POINT elements has no surface normals at all
    source = grid_mesh(4)
    coords = np.array([[0.3, 0.4, 0.5], [0.6, 0.7, 0.5]])
    target = Mesh(
        coords,
        [ElementType.POINT, ElementType.POINT],
        [[1], [2]],
        regions=[Region("pts", 0, np.array([1, 2]), np.array([1, 2]))],
    )
    with pytest.raises(ValueError, match="proj_direction"):
        build_projection(source, "surf", target, "pts")
    op = build_projection(source, "surf", target, "pts",
                          ProjectionConfig(proj_direction=[0.0, 0.0, 1.0], search_radius=2.0))
    got = op.matrix @ _affine(source.coordinates)
    assert np.max(np.abs(got - _affine(coords))) <= 1e-10


def test_projection_degenerate_normal_falls_back():
    # nodes D, E below only touch a zero-area triangle, so their averaged
    # normals vanish and the nearest source element normal takes over
    source = grid_mesh(5)
    coords = np.array(
        [
            [0.2, 0.2, 0.2], [0.5, 0.2, 0.2], [0.2, 0.5, 0.2],  # proper triangle
            [0.7, 0.2, 0.2], [0.9, 0.2, 0.2],                   # collinear with B
        ]
    )
    target = Mesh(
        coords,
        [ElementType.TRIA3, ElementType.TRIA3],
        [[1, 2, 3], [2, 4, 5]],
        regions=[Region("tris", 2, np.arange(1, 6), np.array([1, 2]))],
    )
    with pytest.warns(UserWarning, match="falling back"):
        op = build_projection(source, "surf", target, "tris",
                              ProjectionConfig(search_radius=2.0))
    assert op.unmatched.size == 0
    got = op.matrix @ _affine(source.coordinates)
    assert np.max(np.abs(got - _affine(coords))) <= 1e-10


def test_projection_config_validation():
    with pytest.raises(ValueError, match="max_distance"):
        ProjectionConfig(max_distance=0.0)
    with pytest.raises(ValueError, match="search_radius"):
        ProjectionConfig(search_radius=-1.0)
