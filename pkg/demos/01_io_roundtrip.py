"""Build a small mesh with transient results, write it to HDF5, read it back.

The container file keeps the mesh under /Mesh and every result under
/Results/Mesh/MultiStep_<id>/Step_<k>, so one file carries a whole
simulation history.
"""

import tempfile
from pathlib import Path

import numpy as np

import meshfield as mf

# a 3 x 3 grid of nodes forming four QUAD4 elements on the unit square
n = 3
xs = np.linspace(0.0, 1.0, n)
X, Y = np.meshgrid(xs, xs, indexing="ij")
coords = np.column_stack([X.ravel(), Y.ravel(), np.zeros(n * n)])
conn = [
    [i * n + j + 1, (i + 1) * n + j + 1, (i + 1) * n + j + 2, i * n + j + 2]
    for i in range(n - 1)
    for j in range(n - 1)
]
region = mf.Region(
    "plate", 2,
    np.arange(1, n * n + 1, dtype=np.int64),
    np.arange(1, len(conn) + 1, dtype=np.int64),
)
mesh = mf.Mesh(coords, np.full(len(conn), int(mf.ElementType.QUAD4)), conn, [region])
mesh.validate()
print("mesh:", mesh.info)

# a pressure history: p(x, t) = (1 + x) * sin(2 pi t) sampled at 8 steps
steps = np.linspace(0.0, 0.35, 8)
p = np.stack([(1.0 + coords[:, 0]) * np.sin(2 * np.pi * t) for t in steps])
pressure = mf.ResultArray(
    p[:, :, None],
    quantity="acouPressure",
    region="plate",
    res_type=mf.ResType.NODE,
    step_values=steps,
    analysis_type=mf.AnalysisType.TRANSIENT,
)
container = mf.ResultContainer(arrays=[pressure])

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "plate.h5"
    mf.write_file(path, mesh, container)
    print(f"wrote {path.name}: {path.stat().st_size} bytes")

    mesh_back, result_back = mf.read_file(path)
    print("round trip mesh equal:   ", mesh_back == mesh)
    print("round trip results equal:", result_back == container)

    back = result_back.get("acouPressure", "plate")
    print("steps:", back.step_values)
    print("last-step pressure at the x=1 edge:", back.data[-1, 2::3, 0])
