"""Generate volume meshes by sweeping, then recover a lost transform.

Extrusion and revolution turn surface meshes into volume meshes;
fit_mesh solves the inverse problem — given two copies of a shape in
different poses, find the rigid transform between them.
"""

import numpy as np

import meshfield as mf

# a single quad on the unit square
quad = mf.Mesh(
    np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float),
    [int(mf.ElementType.QUAD4)],
    [[1, 2, 3, 4]],
    [mf.Region("face", 2, np.arange(1, 5, dtype=np.int64),
               np.array([1], dtype=np.int64))],
)

# extruding along two z offsets gives two HEXA8 layers
solid = mf.extrude_mesh_region(quad, "face", [[0, 0, 0.5], [0, 0, 0.5]])
print("extruded:", solid.info.type_counts, "-", solid.num_nodes, "nodes")

# revolving a radial strip around the z axis gives a full ring
strip = mf.Mesh(
    np.array([[1, 0, 0], [2, 0, 0]], dtype=float),
    [int(mf.ElementType.LINE2)],
    [[1, 2]],
    [mf.Region("strip", 1, np.arange(1, 3, dtype=np.int64),
               np.array([1], dtype=np.int64))],
)
ring = mf.revolve_mesh_region(strip, "strip", [0, 0, 0], [0, 0, 1],
                              2 * np.pi, 12)
print("revolved:", ring.info.type_counts, "-", ring.num_nodes, "nodes")

# pose the solid somewhere else ...
secret = mf.RigidTransform([0.08, -0.03, 0.05], [np.radians(9), 0.0, 0.0])
rng = np.random.default_rng(3)
jittered = mf.Mesh(
    solid.coordinates + rng.normal(0, 0.01, solid.coordinates.shape),
    solid.element_types, solid.connectivity, solid.regions,
)
moved, _ = mf.transform_mesh_data(jittered, None, secret, [])

# ... and recover the pose from coordinates alone
fit = mf.fit_mesh(jittered, jittered.regions[0], moved, moved.regions[0])
print("hidden translation:   ", secret.translation)
print("recovered translation:", np.round(fit.transform.translation, 6))
print("hidden z angle:   ", f"{secret.euler_angles[0]:.6f} rad")
print("recovered z angle:", f"{fit.transform.euler_angles[0]:.6f} rad")
print(f"final point-match objective: {fit.objective:.3e}")
