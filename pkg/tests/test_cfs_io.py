"""HDF5 container I/O: layout, round trips, validation, error paths."""

import numpy as np
import h5py
import pytest

import meshfield.cfs_io as cfs_io
from meshfield.cfs_io import (
    MalformedFileError,
    available_multisteps,
    read_data,
    read_file,
    read_mesh,
    write_file,
)
from meshfield.mesh import Mesh, Region
from meshfield.results import AnalysisType, ResType, ResultArray, ResultContainer, UnknownQuantityWarning

from _factories import grid_mesh, random_mesh, random_result


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------


def test_mesh_only_round_trip(tmp_path, rng):
    for k in range(10):
        mesh = random_mesh(rng)
        path = tmp_path / f"mesh_{k}.cfs"
        write_file(path, mesh)
        assert read_mesh(path) == mesh
        back_mesh, back_result = read_file(path)
        assert back_mesh == mesh
        assert back_result.is_empty


@pytest.mark.parametrize(
    "analysis",
    [
        AnalysisType.TRANSIENT,
        AnalysisType.HARMONIC,
        AnalysisType.STATIC,
        AnalysisType.EIGENFREQUENCY,
    ],
)
def test_full_round_trip(tmp_path, rng, analysis):
    for k in range(5):
        mesh = random_mesh(rng)
        result = random_result(rng, mesh, analysis)
        path = tmp_path / f"data_{analysis.value}_{k}.cfs"
        write_file(path, mesh, result)
        back_mesh, back = read_file(path)
        assert back_mesh == mesh
        assert back == result


def test_unsorted_steps_are_written_sorted(tmp_path):
    mesh = grid_mesh(2)
    data = np.arange(3 * 4 * 1, dtype=float).reshape(3, 4, 1)
    arr = ResultArray(
        data,
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[0.3, 0.1, 0.2],
        analysis_type=AnalysisType.TRANSIENT,
    )
    path = tmp_path / "steps.cfs"
    write_file(path, mesh, ResultContainer(arrays=[arr]))
    back = read_data(path)
    assert np.array_equal(back.step_values, [0.1, 0.2, 0.3])
    got = back.get("acouPressure")
    assert np.array_equal(got.data, data[[1, 2, 0]])


def test_history_round_trip_keeps_step_axis(tmp_path):
    mesh = grid_mesh(2)
    hist = ResultArray(
        np.linspace(0.0, 1.0, 8).reshape(4, 2),
        quantity="acouPressure",
        region="surf",
        res_type=ResType.REGION,
        step_values=[0.0, 0.1, 0.2, 0.3],
        analysis_type=AnalysisType.TRANSIENT,
    )
    path = tmp_path / "hist.cfs"
    write_file(path, mesh, ResultContainer(arrays=[hist]))
    with h5py.File(path, "r") as f:
        # step axis is registered under the field branch even with no field data
        assert "Results/Mesh/MultiStep_1/Step_4" in f
        assert "Results/History/MultiStep_1/acouPressure/surf/Real" in f
    back = read_data(path)
    assert back.get("acouPressure") == hist


def test_multi_step_id_round_trip(tmp_path):
    mesh = grid_mesh(2)
    arr = ResultArray(
        np.ones((2, 4, 1)),
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[1.0, 2.0],
        analysis_type=AnalysisType.TRANSIENT,
        multi_step_id=3,
    )
    path = tmp_path / "ms3.cfs"
    write_file(path, mesh, ResultContainer(arrays=[arr], multi_step_id=3))
    assert available_multisteps(path) == [3]
    back = read_data(path, multi_step_id=3)
    assert back.multi_step_id == 3
    assert back.get("acouPressure") == arr
    with pytest.raises(MalformedFileError, match=r"available: \[3\]"):
        read_data(path, multi_step_id=1)


# ---------------------------------------------------------------------------
# On-disk layout
# ---------------------------------------------------------------------------


def test_written_layout_and_dtypes(tmp_path):
    mesh = grid_mesh(3)
    mesh.regions.append(Region("picked", 2, np.array([1, 5]), np.array([1]), is_group=True))
    cplx = ResultArray(
        (1 + 2j) * np.ones((2, 9, 3)),
        quantity="acouVelocity",
        region="surf",
        res_type=ResType.NODE,
        step_values=[10.0, 20.0],
        analysis_type=AnalysisType.HARMONIC,
    )
    path = tmp_path / "layout.cfs"
    write_file(path, mesh, ResultContainer(arrays=[cplx]))
    with h5py.File(path, "r") as f:
        assert f["Mesh/Nodes/Coordinates"].dtype == np.float64
        assert f["Mesh/Nodes/Coordinates"].shape == (9, 3)
        assert f["Mesh/Elements/Types"].dtype == np.int32
        assert f["Mesh/Elements/Connectivity"].dtype == np.uint32
        reg = f["Mesh/Regions/surf"]
        assert reg["Nodes"].dtype == np.uint32
        assert reg["Elements"].dtype == np.uint32
        assert int(reg.attrs["Dimension"]) == 2
        assert int(reg.attrs["IsGroup"]) == 0
        assert int(f["Mesh/Regions/picked"].attrs["IsGroup"]) == 1
        ms = f["Results/Mesh/MultiStep_1"]
        assert cfs_io._attr_str(ms.attrs["AnalysisType"]) == "harmonic"
        assert int(ms.attrs["LastStepNum"]) == 2
        assert float(ms.attrs["LastStepValue"]) == 20.0
        assert float(ms["Step_1"].attrs["StepValue"]) == 10.0
        node = ms["Step_2/acouVelocity/surf/Nodes"]
        assert node["Real"].shape == (9, 3)
        assert node["Real"].dtype == np.float64
        assert node["Imag"].shape == (9, 3)
        assert np.allclose(node["Imag"][...], 2.0)


def test_real_transient_has_no_imag_dataset(tmp_path):
    mesh = grid_mesh(2)
    arr = ResultArray(
        np.zeros((1, 4, 1)),
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[0.0],
        analysis_type=AnalysisType.TRANSIENT,
    )
    path = tmp_path / "real.cfs"
    write_file(path, mesh, ResultContainer(arrays=[arr]))
    with h5py.File(path, "r") as f:
        grp = f["Results/Mesh/MultiStep_1/Step_1/acouPressure/surf/Nodes"]
        assert "Real" in grp and "Imag" not in grp


def test_mesh_read_touches_no_result_datasets(tmp_path, rng, monkeypatch):
    mesh = random_mesh(rng)
    result = random_result(rng, mesh, AnalysisType.TRANSIENT)
    path = tmp_path / "probe.cfs"
    import warnings as _w

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        write_file(path, mesh, result)

    touched = []
    original = cfs_io._read_dataset

    def spy(node):
        touched.append(node.name)
        return original(node)

    monkeypatch.setattr(cfs_io, "_read_dataset", spy)
    read_mesh(path)
    assert touched, "expected the mesh read to load datasets"
    assert all(name.startswith("/Mesh") for name in touched)


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


def test_missing_file_raises_file_not_found(tmp_path):
    missing = tmp_path / "absent.cfs"
    with pytest.raises(FileNotFoundError):
        read_mesh(missing)
    with pytest.raises(FileNotFoundError):
        read_data(missing)


def test_malformed_file_reports_missing_path(tmp_path):
    path = tmp_path / "broken.cfs"
    with h5py.File(path, "w") as f:
        f.create_dataset("Mesh/Nodes/Coordinates", data=np.zeros((2, 3)))
        # Elements group missing entirely
    with pytest.raises(MalformedFileError, match="Types") as err:
        read_mesh(path)
    assert getattr(err.value, "path_in_file", None)


def test_read_data_requires_analysis_type(tmp_path):
    path = tmp_path / "noattr.cfs"
    with h5py.File(path, "w") as f:
        f.create_group("Results/Mesh/MultiStep_1")
    with pytest.raises(MalformedFileError, match="AnalysisType"):
        read_data(path)


def test_read_data_rejects_step_gaps(tmp_path):
    mesh = grid_mesh(2)
    arr = ResultArray(
        np.zeros((2, 4, 1)),
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[0.0, 1.0],
        analysis_type=AnalysisType.TRANSIENT,
    )
    path = tmp_path / "gap.cfs"
    write_file(path, mesh, ResultContainer(arrays=[arr]))
    with h5py.File(path, "a") as f:
        del f["Results/Mesh/MultiStep_1/Step_2/acouPressure"]
    with pytest.raises(MalformedFileError, match="missing in step"):
        read_data(path)


def _one_node_result(mesh, region="surf", quantity="acouPressure", m=4):
    return ResultContainer(
        arrays=[
            ResultArray(
                np.zeros((1, m, 1)),
                quantity=quantity,
                region=region,
                res_type=ResType.NODE,
                step_values=[0.0],
                analysis_type=AnalysisType.TRANSIENT,
            )
        ]
    )


def test_write_rejects_unknown_region(tmp_path):
    with pytest.raises(ValueError, match="absent from the mesh"):
        write_file(tmp_path / "x.cfs", grid_mesh(2), _one_node_result(None, region="ghost"))


def test_write_rejects_count_mismatch(tmp_path):
    with pytest.raises(ValueError, match="does not match"):
        write_file(tmp_path / "x.cfs", grid_mesh(2), _one_node_result(None, m=7))


def test_write_rejects_slash_in_names(tmp_path):
    with pytest.raises(ValueError, match="not allowed"):
        write_file(
            tmp_path / "x.cfs", grid_mesh(2), _one_node_result(None, quantity="a/b")
        )


def test_write_rejects_duplicate_arrays(tmp_path):
    mesh = grid_mesh(2)
    arr = ResultArray(
        np.zeros((1, 4, 1)),
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[0.0],
        analysis_type=AnalysisType.TRANSIENT,
    )
    cont = ResultContainer(arrays=[arr, arr.with_data(np.ones((1, 4, 1)))])
    with pytest.raises(ValueError, match="duplicate result"):
        write_file(tmp_path / "x.cfs", mesh, cont)


def test_write_warns_on_unknown_quantity(tmp_path):
    with pytest.warns(UnknownQuantityWarning, match="myField"):
        write_file(tmp_path / "w.cfs", grid_mesh(2), _one_node_result(None, quantity="myField"))


def test_write_validates_mesh_first(tmp_path):
    mesh = grid_mesh(2)
    mesh.connectivity[0, 0] = 77
    with pytest.raises(ValueError):
        write_file(tmp_path / "bad.cfs", mesh)


def test_element_result_round_trip(tmp_path):
    mesh = grid_mesh(3)  # 4 quads
    arr = ResultArray(
        np.arange(2 * 4 * 3, dtype=float).reshape(2, 4, 3),
        quantity="fluidMechVelocity",
        region="surf",
        res_type=ResType.ELEMENT,
        step_values=[0.0, 0.1],
        analysis_type=AnalysisType.TRANSIENT,
    )
    path = tmp_path / "elem.cfs"
    write_file(path, mesh, ResultContainer(arrays=[arr]))
    back = read_data(path)
    assert back.get("fluidMechVelocity") == arr
    with h5py.File(path, "r") as f:
        assert "Results/Mesh/MultiStep_1/Step_1/fluidMechVelocity/surf/Elements/Real" in f


def test_empty_connectivity_mesh(tmp_path):
    # point-free degenerate mesh: nodes only, zero elements
    mesh = Mesh(np.random.default_rng(0).random((5, 3)), np.zeros(0, dtype=int), np.zeros((0, 1), dtype=int))
    path = tmp_path / "points.cfs"
    write_file(path, mesh)
    back = read_mesh(path)
    assert back.num_nodes == 5
    assert back.num_elements == 0
