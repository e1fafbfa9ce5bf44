"""Mesh and multi-step field data: containers, HDF5 I/O, interpolation,
sweeps and registration, time-domain processing, and modal metrics."""

from .cfs_io import available_multisteps, read_data, read_file, read_mesh, write_file
from .elements import ElementType
from .ensight_io import read_ensight_case
from .errors import FileFormatError, MalformedFileError, SingularKernelError
from .interpolation import (
    IDWConfig,
    InterpolationMatrix,
    ProjectionConfig,
    apply,
    build_cell2node,
    build_idw,
    build_node2cell,
    build_projection,
    cell2node,
    node2cell,
)
from .mesh import (
    Mesh,
    MeshInfo,
    Region,
    compute_centroids,
    compute_node_normals,
    element_normals,
    extract_region,
)
from .modal import ModeSet, mac, mcf, msf
from .rbf import RBFConfig, rbf_gradient, rbf_interpolate
from .results import (
    AnalysisType,
    ResType,
    ResultArray,
    ResultContainer,
    ResultInfo,
    UnknownQuantityWarning,
)
from .stl_io import read_stl
from .timeproc import BoundaryTreatment, field_fft, time_derivative
from .transform import (
    FitResult,
    RigidTransform,
    extrude_mesh_region,
    fit_mesh,
    revolve_mesh_region,
    transform_mesh_data,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisType",
    "BoundaryTreatment",
    "ElementType",
    "FileFormatError",
    "FitResult",
    "IDWConfig",
    "InterpolationMatrix",
    "MalformedFileError",
    "Mesh",
    "MeshInfo",
    "ModeSet",
    "ProjectionConfig",
    "RBFConfig",
    "Region",
    "ResType",
    "ResultArray",
    "ResultContainer",
    "ResultInfo",
    "RigidTransform",
    "SingularKernelError",
    "UnknownQuantityWarning",
    "apply",
    "available_multisteps",
    "build_cell2node",
    "build_idw",
    "build_node2cell",
    "build_projection",
    "cell2node",
    "compute_centroids",
    "compute_node_normals",
    "element_normals",
    "extract_region",
    "extrude_mesh_region",
    "field_fft",
    "fit_mesh",
    "mac",
    "mcf",
    "msf",
    "node2cell",
    "read_data",
    "read_ensight_case",
    "read_file",
    "read_mesh",
    "read_stl",
    "revolve_mesh_region",
    "rbf_gradient",
    "rbf_interpolate",
    "time_derivative",
    "transform_mesh_data",
    "write_file",
]
