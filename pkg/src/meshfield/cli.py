"""Command-line front end for batch pipelines.

Every subcommand is a pure file-to-file transform: exit code 0 on
success, 2 on usage or input errors, 1 on internal errors. Reports go
to stdout, errors to stderr. The environment variable MESHFIELD_THREADS
caps the worker threads used by neighbor searches.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import cfs_io
from .elements import ElementType
from .ensight_io import read_ensight_case
from .errors import FileFormatError
from .interpolation import (
    IDWConfig,
    ProjectionConfig,
    apply,
    build_cell2node,
    build_idw,
    build_node2cell,
    build_projection,
)
from .mesh import compute_centroids
from .rbf import RBFConfig, rbf_interpolate
from .results import AnalysisType, ResType, ResultArray, ResultContainer
from .stl_io import read_stl
from .timeproc import BoundaryTreatment, field_fft, time_derivative
from .transform import RigidTransform, fit_mesh, transform_mesh_data


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
        return 0
    except BrokenPipeError:
        return 1
    except (FileNotFoundError, FileFormatError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshfield",
        description="Mesh and field-data pipelines on HDF5 container files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="summarize a container file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("convert", help="convert a mesh/result file to a container file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument(
        "--from",
        dest="from_format",
        required=True,
        choices=["stl", "ensight", "cfs"],
        help="input format",
    )
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("interpolate", help="interpolate a quantity onto a target mesh")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("output")
    p.add_argument(
        "--method",
        required=True,
        choices=["n2c", "c2n", "idw", "projection", "rbf"],
    )
    p.add_argument("--quantity", help="quantity name (default: the only one)")
    p.add_argument("--source_region", help="region the data lives on")
    p.add_argument("--target_region", help="region to interpolate onto")
    p.add_argument("--neighbors", type=int, default=20)
    p.add_argument("--exponent", type=float, default=2.0)
    p.add_argument("--max_distance", type=float, default=None)
    p.add_argument("--search_radius", type=float, default=None)
    p.add_argument("--kernel", default="gaussian",
                   choices=["gaussian", "multiquadric", "wendland_c2"])
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--smoothing", type=float, default=0.0)
    p.add_argument("--local", action="store_true",
                   help="fit the kernel expansion per neighborhood")
    p.add_argument("--min_neighbors", type=int, default=5)
    p.add_argument("--radius_factor", type=float, default=1.5)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("derivative", help="differentiate a transient quantity in time")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--quantity", help="quantity name (default: the only one)")
    p.add_argument(
        "--boundary_treatment",
        default="remove",
        choices=[b.value for b in BoundaryTreatment],
    )
    p.set_defaults(func=_cmd_derivative)

    p = sub.add_parser("fft", help="transform a transient quantity to the frequency domain")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--quantity", help="quantity name (default: the only one)")
    p.add_argument("--window", choices=["hann"], default=None)
    p.set_defaults(func=_cmd_fft)

    p = sub.add_parser("fit", help="rigidly register a source region onto a target")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--source_region")
    p.add_argument("--target_region")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("transform", help="rigidly transform mesh and vector data")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--translate", default="0,0,0", metavar="X,Y,Z")
    p.add_argument("--euler", default="0,0,0", metavar="A,B,C",
                   help="intrinsic Z-Y'-X'' angles in radians")
    p.add_argument("--regions", help="comma-separated regions (default: all)")
    p.set_defaults(func=_cmd_transform)
    return parser


# ---------------------------------------------------------------------------
# subcommands

def _cmd_info(args) -> None:
    mesh = cfs_io.read_mesh(args.file)
    info = mesh.info
    print(f"file: {args.file}")
    print(f"num_nodes: {info.num_nodes}")
    print(f"num_elements: {info.num_elements}")
    print(f"dimension: {info.dimension}")
    for etype, count in sorted(info.type_counts.items()):
        print(f"  {ElementType(etype).name}: {count}")
    print(f"regions: {len(mesh.regions)}")
    for reg in mesh.regions:
        kind = "group" if reg.is_group else "region"
        print(
            f"  {reg.name}: dim={reg.dimension} nodes={reg.num_nodes} "
            f"elements={reg.num_elements} ({kind})"
        )
    steps = cfs_io.available_multisteps(args.file)
    if not steps:
        print("no results")
        return
    for ms_id in steps:
        result = cfs_io.read_data(args.file, ms_id)
        analysis = result.analysis_type.value if result.analysis_type else "-"
        print(
            f"multi-step {ms_id}: analysis={analysis} "
            f"steps={len(result.step_values) if result.step_values is not None else 0}"
        )
        for arr_info in result.infos:
            print(
                f"  {arr_info.quantity} on {arr_info.region} "
                f"({arr_info.res_type.value}, dims={arr_info.dim_names}, "
                f"complex={arr_info.is_complex})"
            )


def _cmd_convert(args) -> None:
    if args.from_format == "stl":
        mesh, result = read_stl(args.input), None
    elif args.from_format == "ensight":
        mesh, result = read_ensight_case(args.input)
    else:
        mesh, result = cfs_io.read_file(args.input)
    cfs_io.write_file(args.output, mesh, result)


def _pick_array(result: ResultContainer, quantity, region=None) -> ResultArray:
    if result.is_empty:
        raise ValueError("input file contains no result data")
    if quantity is None:
        names = sorted({a.quantity for a in result.arrays})
        if len(names) > 1:
            raise ValueError(
                f"file holds several quantities {names}; pass --quantity"
            )
        quantity = names[0]
    return result.get(quantity, region)


def _target_region(mesh, name):
    if name is not None:
        return mesh.region(name)
    if len(mesh.regions) == 1:
        return mesh.regions[0]
    raise ValueError(
        f"target mesh has {len(mesh.regions)} regions; pass --target_region"
    )


def _cmd_interpolate(args) -> None:
    source_mesh, source_result = cfs_io.read_file(args.source)
    array = _pick_array(source_result, args.quantity, args.source_region)
    source_region = source_mesh.region(args.source_region or array.region)

    if args.method in ("n2c", "c2n"):
        if args.method == "n2c":
            op = build_node2cell(source_mesh, source_region)
        else:
            op = build_cell2node(source_mesh, source_region)
        out = apply(op, array)
        out_mesh = source_mesh
    else:
        target_mesh = cfs_io.read_mesh(args.target)
        target_region = _target_region(target_mesh, args.target_region)
        target_points = target_mesh.coordinates[target_region.node_ids - 1]
        if array.res_type is ResType.NODE:
            source_points = source_mesh.coordinates[source_region.node_ids - 1]
        else:
            source_points = compute_centroids(source_mesh, source_region)

        if args.method == "idw":
            op = build_idw(
                source_points,
                target_points,
                IDWConfig(num_neighbors=args.neighbors, exponent=args.exponent),
            )
            out = apply(op, array)
        elif args.method == "projection":
            cfg = ProjectionConfig(
                max_distance=args.max_distance
                if args.max_distance is not None
                else np.inf,
                search_radius=args.search_radius,
            )
            op = build_projection(
                source_mesh, source_region, target_mesh, target_region, cfg
            )
            out = apply(op, array)
        else:
            cfg = RBFConfig(
                kernel=args.kernel,
                epsilon=args.epsilon,
                smoothing=args.smoothing,
                local=args.local,
                neighbors=args.neighbors,
                min_neighbors=args.min_neighbors,
                radius_factor=args.radius_factor,
            )
            n, m, d = array.data.shape
            data = np.stack(
                [
                    rbf_interpolate(source_points, array.data[k], target_points, cfg)
                    for k in range(n)
                ]
            )
            op = None
            out = array.with_data(
                data, region=target_region.name, res_type=ResType.NODE
            )
        out_mesh = target_mesh
        if op is not None:
            out = out.with_data(out.data, region=target_region.name)

    unmatched = 0 if args.method == "rbf" else int(op.unmatched.size)
    print(f"unmatched rows: {unmatched}")
    container = ResultContainer(
        analysis_type=out.analysis_type,
        multi_step_id=out.multi_step_id,
        step_values=out.step_values,
        arrays=[out],
    )
    cfs_io.write_file(args.output, out_mesh, container)


def _cmd_derivative(args) -> None:
    mesh, result = cfs_io.read_file(args.input)
    array = _pick_array(result, args.quantity)
    out = time_derivative(array, BoundaryTreatment(args.boundary_treatment))
    container = ResultContainer(
        analysis_type=out.analysis_type,
        multi_step_id=out.multi_step_id,
        step_values=out.step_values,
        arrays=[out],
    )
    cfs_io.write_file(args.output, mesh, container)


def _cmd_fft(args) -> None:
    mesh, result = cfs_io.read_file(args.input)
    array = _pick_array(result, args.quantity)
    out = field_fft(array, window=args.window)
    container = ResultContainer(
        analysis_type=out.analysis_type,
        multi_step_id=out.multi_step_id,
        step_values=out.step_values,
        arrays=[out],
    )
    cfs_io.write_file(args.output, mesh, container)


def _cmd_fit(args) -> None:
    source_mesh = cfs_io.read_mesh(args.source)
    target_mesh = cfs_io.read_mesh(args.target)
    source_region = _target_region(source_mesh, args.source_region)
    target_region = _target_region(target_mesh, args.target_region)
    fit = fit_mesh(source_mesh, source_region, target_mesh, target_region)
    t = fit.transform.translation
    a = fit.transform.euler_angles
    print(" ".join(f"{v:.17g}" for v in (*t, *a)))


def _parse_triple(text: str, what: str) -> np.ndarray:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise ValueError(f"--{what} needs three comma-separated numbers")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ValueError(f"--{what}: could not parse '{text}'") from None


def _cmd_transform(args) -> None:
    mesh, result = cfs_io.read_file(args.input)
    transform = RigidTransform(
        _parse_triple(args.translate, "translate"),
        _parse_triple(args.euler, "euler"),
    )
    regions = args.regions.split(",") if args.regions else None
    vectors = [
        a for a in result.arrays if a.res_type.is_field and a.num_dims == 3
    ]
    others = [a for a in result.arrays if a not in vectors]
    out_mesh, out_vectors = transform_mesh_data(mesh, regions, transform, vectors)
    container = None
    if not result.is_empty:
        container = ResultContainer(
            analysis_type=result.analysis_type,
            multi_step_id=result.multi_step_id,
            step_values=result.step_values,
            arrays=out_vectors + others,
        )
    cfs_io.write_file(args.output, out_mesh, container)
