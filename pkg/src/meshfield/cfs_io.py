"""HDF5 container file I/O (``*.cfs``).

Layout written and read by this module::

    /Mesh                         attr Dimension (u32)
    /Mesh/Nodes/Coordinates       f64  [num_nodes x 3]
    /Mesh/Elements/Types          i32  [num_elements]
    /Mesh/Elements/Connectivity   u32  [num_elements x max_nodes], 1-based, 0-padded
    /Mesh/Regions/<name>/Nodes    u32      (group attrs Dimension u32, IsGroup u8)
    /Mesh/Regions/<name>/Elements u32
    /Results/Mesh/MultiStep_<id>  attrs AnalysisType (str), LastStepNum (u32),
                                        LastStepValue (f64)
    /Results/Mesh/MultiStep_<id>/Step_<k>            attr StepValue (f64)
        <Quantity>/<Region>/<Nodes|Elements>/Real    f64 [M x D]  (+ /Imag)
    /Results/History/MultiStep_<id>/<Quantity>/<Region>/Real  f64 [N x D]  (+ /Imag)

Step groups are numbered from 1 and stored sorted by step value. The
``/Results/Mesh/MultiStep_<id>`` group is written whenever results
exist, even for history-only containers, so the step axis always has a
single authoritative location.
"""

from __future__ import annotations

import os

import h5py
import numpy as np

from .errors import MalformedFileError
from .mesh import Mesh, Region
from .results import (
    AnalysisType,
    ResType,
    ResultArray,
    ResultContainer,
    check_quantity_name,
)

__all__ = [
    "read_file",
    "read_mesh",
    "read_data",
    "write_file",
    "available_multisteps",
]


def _read_dataset(node) -> np.ndarray:
    """Single funnel for dataset reads (patchable in tests)."""
    return np.asarray(node[...])


def _require(handle, path: str):
    if path not in handle:
        raise MalformedFileError(
            f"malformed file '{handle.file.filename}': missing '{path}'",
            path_in_file=path,
        )
    return handle[path]


def read_mesh(path) -> Mesh:
    """Read the mesh (coordinates, elements, regions) from a container file."""
    _check_exists(path)
    with h5py.File(path, "r") as f:
        _require(f, "/Mesh")
        coords = _read_dataset(_require(f, "/Mesh/Nodes/Coordinates"))
        types = _read_dataset(_require(f, "/Mesh/Elements/Types")).astype(np.int64)
        conn = _read_dataset(_require(f, "/Mesh/Elements/Connectivity")).astype(np.int64)
        regions = []
        if "/Mesh/Regions" in f:
            grp = f["/Mesh/Regions"]
            for name in sorted(grp):
                reg = grp[name]
                regions.append(
                    Region(
                        name=name,
                        dimension=int(reg.attrs.get("Dimension", 0)),
                        node_ids=_read_dataset(_require(grp, f"{name}/Nodes")).astype(np.int64),
                        element_ids=_read_dataset(_require(grp, f"{name}/Elements")).astype(np.int64),
                        is_group=bool(reg.attrs.get("IsGroup", 0)),
                    )
                )
    mesh = Mesh(coords, types, conn, regions)
    try:
        mesh.validate()
    except ValueError as exc:
        raise MalformedFileError(f"malformed file '{os.fspath(path)}': {exc}") from exc
    return mesh


def available_multisteps(path) -> list[int]:
    """Sorted multi-step ids present in a container file."""
    _check_exists(path)
    ids: set[int] = set()
    with h5py.File(path, "r") as f:
        for base in ("/Results/Mesh", "/Results/History"):
            if base in f:
                for name in f[base]:
                    if name.startswith("MultiStep_"):
                        ids.add(int(name.split("_", 1)[1]))
    return sorted(ids)


def read_data(path, multi_step_id: int = 1) -> ResultContainer:
    """Read all result arrays of one multi-step.

    Step values are returned sorted ascending. Raises an error listing
    the available ids when the requested multi-step does not exist.
    """
    _check_exists(path)
    available = available_multisteps(path)
    if multi_step_id not in available:
        raise MalformedFileError(
            f"multi-step {multi_step_id} not present in '{os.fspath(path)}'; "
            f"available: {available}"
        )
    arrays: list[ResultArray] = []
    with h5py.File(path, "r") as f:
        mesh_ms = f.get(f"/Results/Mesh/MultiStep_{multi_step_id}")
        hist_ms = f.get(f"/Results/History/MultiStep_{multi_step_id}")
        analysis = None
        for ms in (mesh_ms, hist_ms):
            if ms is not None and "AnalysisType" in ms.attrs:
                analysis = AnalysisType(_attr_str(ms.attrs["AnalysisType"]))
                break
        if analysis is None:
            raise MalformedFileError(
                f"malformed file '{os.fspath(path)}': multi-step {multi_step_id} "
                "has no AnalysisType attribute"
            )

        step_values = np.zeros(0)
        if mesh_ms is not None:
            step_names = [s for s in mesh_ms if s.startswith("Step_")]
            step_values = np.array(
                [float(mesh_ms[s].attrs["StepValue"]) for s in step_names]
            )
            order = np.argsort(step_values, kind="stable")
            step_names = [step_names[i] for i in order]
            step_values = step_values[order]

            # field data: collect per (quantity, region, res_type) over steps
            shapes: dict[tuple[str, str, str], list] = {}
            for k, sname in enumerate(step_names):
                sgrp = mesh_ms[sname]
                for qty in sorted(sgrp):
                    for reg in sorted(sgrp[qty]):
                        for kind in sorted(sgrp[qty][reg]):
                            key = (qty, reg, kind)
                            shapes.setdefault(key, [None] * len(step_names))
                            node = sgrp[f"{qty}/{reg}/{kind}"]
                            real = _read_dataset(_require(node, "Real"))
                            imag = (
                                _read_dataset(node["Imag"]) if "Imag" in node else None
                            )
                            shapes[key][k] = (real, imag)
            for (qty, reg, kind), steps in sorted(shapes.items()):
                missing = [i for i, s in enumerate(steps) if s is None]
                if missing:
                    raise MalformedFileError(
                        f"malformed file '{os.fspath(path)}': '{qty}' on '{reg}' "
                        f"missing in step group(s) {missing}"
                    )
                is_complex = steps[0][1] is not None
                if any((s[1] is not None) != is_complex for s in steps):
                    raise MalformedFileError(
                        f"malformed file '{os.fspath(path)}': '{qty}' on '{reg}' "
                        "mixes real and complex steps"
                    )
                data = np.stack(
                    [s[0] + 1j * s[1] if is_complex else s[0] for s in steps]
                )
                arrays.append(
                    ResultArray(
                        data,
                        quantity=qty,
                        region=reg,
                        res_type=ResType(kind),
                        step_values=step_values,
                        analysis_type=analysis,
                        is_complex=is_complex,
                        multi_step_id=multi_step_id,
                    )
                )

        if hist_ms is not None:
            for qty in sorted(hist_ms):
                if qty.startswith("Step_"):
                    continue
                for reg in sorted(hist_ms[qty]):
                    node = hist_ms[f"{qty}/{reg}"]
                    real = _read_dataset(_require(node, "Real"))
                    imag = _read_dataset(node["Imag"]) if "Imag" in node else None
                    data = real + 1j * imag if imag is not None else real
                    sv = (
                        step_values
                        if step_values.size == data.shape[0]
                        else np.arange(1, data.shape[0] + 1, dtype=float)
                    )
                    arrays.append(
                        ResultArray(
                            data,
                            quantity=qty,
                            region=reg,
                            res_type=ResType.REGION,
                            step_values=sv,
                            analysis_type=analysis,
                            is_complex=imag is not None,
                            multi_step_id=multi_step_id,
                        )
                    )

    if not arrays:
        return ResultContainer(
            analysis_type=analysis,
            multi_step_id=multi_step_id,
            step_values=step_values,
        )
    return ResultContainer(
        analysis_type=analysis,
        multi_step_id=multi_step_id,
        step_values=step_values if step_values.size else arrays[0].step_values,
        arrays=arrays,
    )


def read_file(path, multi_step_id: int = 1) -> tuple[Mesh, ResultContainer]:
    """Read mesh and result data in one call.

    Files without a ``/Results`` group yield an empty container.
    """
    mesh = read_mesh(path)
    with h5py.File(path, "r") as f:
        has_results = "/Results" in f
    if not has_results:
        return mesh, ResultContainer(multi_step_id=multi_step_id)
    return mesh, read_data(path, multi_step_id)


def write_file(path, mesh: Mesh, result: ResultContainer | None = None) -> None:
    """Write mesh (and optionally one multi-step of results) to a container file.

    The mesh is validated first; every result array must reference an
    existing region and match its node/element count. A container with
    no arrays produces a mesh-only file.
    """
    mesh.validate()
    if result is not None and not result.is_empty:
        _validate_result(mesh, result)
    else:
        result = None

    with h5py.File(path, "w") as f:
        mgrp = f.create_group("Mesh")
        mgrp.attrs["Dimension"] = np.uint32(mesh.info.dimension)
        mgrp.create_dataset("Nodes/Coordinates", data=mesh.coordinates, dtype=np.float64)
        mgrp.create_dataset("Elements/Types", data=mesh.element_types, dtype=np.int32)
        conn = mesh.connectivity
        if conn.size == 0:
            conn = conn.reshape(mesh.num_elements, 0)
        mgrp.create_dataset("Elements/Connectivity", data=conn, dtype=np.uint32)
        for reg in mesh.regions:
            rgrp = mgrp.create_group(f"Regions/{reg.name}")
            rgrp.attrs["Dimension"] = np.uint32(reg.dimension)
            rgrp.attrs["IsGroup"] = np.uint8(1 if reg.is_group else 0)
            rgrp.create_dataset("Nodes", data=reg.node_ids, dtype=np.uint32)
            rgrp.create_dataset("Elements", data=reg.element_ids, dtype=np.uint32)

        if result is None:
            return

        order = np.argsort(result.step_values, kind="stable")
        step_values = result.step_values[order]
        ms = f.create_group(f"Results/Mesh/MultiStep_{result.multi_step_id}")
        ms.attrs["AnalysisType"] = result.analysis_type.value
        ms.attrs["LastStepNum"] = np.uint32(step_values.size)
        ms.attrs["LastStepValue"] = np.float64(step_values[-1])
        for k, sv in enumerate(step_values, start=1):
            sgrp = ms.create_group(f"Step_{k}")
            sgrp.attrs["StepValue"] = np.float64(sv)
        for arr in result.arrays:
            data = arr.data[order]
            if arr.res_type.is_field:
                for k in range(step_values.size):
                    base = f"Step_{k + 1}/{arr.quantity}/{arr.region}/{arr.res_type.value}"
                    ms.create_dataset(f"{base}/Real", data=data[k].real, dtype=np.float64)
                    if arr.is_complex:
                        ms.create_dataset(f"{base}/Imag", data=data[k].imag, dtype=np.float64)
            else:
                hgrp = f.require_group(
                    f"Results/History/MultiStep_{result.multi_step_id}"
                )
                if "AnalysisType" not in hgrp.attrs:
                    hgrp.attrs["AnalysisType"] = result.analysis_type.value
                base = f"{arr.quantity}/{arr.region}"
                hgrp.create_dataset(f"{base}/Real", data=data.real, dtype=np.float64)
                if arr.is_complex:
                    hgrp.create_dataset(f"{base}/Imag", data=data.imag, dtype=np.float64)


def _validate_result(mesh: Mesh, result: ResultContainer) -> None:
    result.validate()
    region_names = {r.name for r in mesh.regions}
    seen: set[tuple[str, str, str]] = set()
    warned: set[str] = set()
    for arr in result.arrays:
        if "/" in arr.quantity or "/" in arr.region:
            raise ValueError(
                f"'/' not allowed in quantity or region names: "
                f"'{arr.quantity}' on '{arr.region}'"
            )
        if arr.region not in region_names:
            raise ValueError(
                f"result '{arr.quantity}' references region '{arr.region}' "
                f"absent from the mesh (regions: {sorted(region_names)})"
            )
        key = (arr.quantity, arr.region, arr.res_type.name)
        if key in seen:
            raise ValueError(f"duplicate result {key}")
        seen.add(key)
        reg = mesh.region(arr.region)
        if arr.res_type is ResType.NODE and arr.num_dofs != reg.num_nodes:
            raise ValueError(
                f"'{arr.quantity}': M={arr.num_dofs} does not match "
                f"{reg.num_nodes} nodes of region '{arr.region}'"
            )
        if arr.res_type is ResType.ELEMENT and arr.num_dofs != reg.num_elements:
            raise ValueError(
                f"'{arr.quantity}': M={arr.num_dofs} does not match "
                f"{reg.num_elements} elements of region '{arr.region}'"
            )
        if arr.quantity not in warned:
            warned.add(arr.quantity)
            check_quantity_name(arr.quantity)


def _attr_str(value) -> str:
    return value.decode() if isinstance(value, bytes) else str(value)


def _check_exists(path) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"file not found: {os.fspath(path)}")
