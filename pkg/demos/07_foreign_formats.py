"""Ingest geometry and results from STL and EnSight Gold files.

Both readers return the package's own mesh/result objects, so foreign
data can be written straight into an HDF5 container file — that is all
the ``meshfield convert`` subcommand does.
"""

import tempfile
import warnings
from pathlib import Path

import numpy as np

import meshfield as mf

with tempfile.TemporaryDirectory() as tmp:
    folder = Path(tmp)

    # --- STL: a tetrahedron written by hand, read back as a surface mesh
    stl = folder / "tet.stl"
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    facets = [(0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2)]
    lines = ["solid tet"]
    for a, b, c in facets:
        lines += ["facet normal 0 0 0", "outer loop"]
        lines += [f"vertex {p[0]:g} {p[1]:g} {p[2]:g}" for p in (v[a], v[b], v[c])]
        lines += ["endloop", "endfacet"]
    lines.append("endsolid tet")
    stl.write_text("\n".join(lines) + "\n")

    surface = mf.read_stl(stl)
    print("STL:", surface.info)
    print("  shared vertices were merged:", surface.num_nodes, "nodes for",
          surface.num_elements, "triangles")

    # --- EnSight Gold: a one-quad case with a two-step pressure history
    (folder / "sq.geo").write_text(
        "square\ndemo\npart\n1\nmembrane\ncoordinates\n4\n"
        "0\n1\n1\n0\n" "0\n0\n1\n1\n" "0\n0\n0\n0\n"
        "quad4\n1\n1 2 3 4\n"
    )
    for k, scale in enumerate((1.0, 2.5)):
        (folder / f"p.{k}.scl").write_text(
            "pressure\npart\n1\ncoordinates\n"
            + "".join(f"{scale * (i + 1)}\n" for i in range(4))
        )
    (folder / "sq.case").write_text(
        "FORMAT\ntype: ensight gold\n"
        "GEOMETRY\nmodel: sq.geo\n"
        "VARIABLE\nscalar per node: pressure p.*.scl\n"
        "TIME\ntime set: 1\nnumber of steps: 2\n"
        "filename start number: 0\nfilename increment: 1\n"
        "time values:\n0.0 0.1\n"
    )

    mesh, results = mf.read_ensight_case(folder / "sq.case")
    pressure = results.get("pressure", "membrane")
    print("EnSight:", mesh.info)
    print("  pressure steps:", pressure.step_values)
    print("  pressure data:\n", pressure.data[:, :, 0])

    # --- both ingested datasets can go straight into container files;
    # the writer flags quantity names no solver convention knows about
    mf.write_file(folder / "tet.h5", surface)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mf.write_file(folder / "sq.h5", mesh, results)
    for w in caught:
        print("  writer warning:", w.message)
    print("converted files:",
          sorted(p.name for p in folder.glob("*.h5")))
