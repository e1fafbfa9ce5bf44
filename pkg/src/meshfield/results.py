"""Multi-step result data: arrays, metadata and the container grouping them.

Field data (on nodes or element centroids) is shaped ``(N, M, D)`` and
history data (whole-region quantities) ``(N, D)``, with ``N`` steps,
``M`` degrees of freedom and ``D`` dimensions. Step values are seconds
for transient analyses and hertz for harmonic ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class AnalysisType(Enum):
    STATIC = "static"
    TRANSIENT = "transient"
    HARMONIC = "harmonic"
    EIGENFREQUENCY = "eigenfrequency"

    @property
    def default_complex(self) -> bool:
        """Harmonic and eigenfrequency data default to complex values."""
        return self in (AnalysisType.HARMONIC, AnalysisType.EIGENFREQUENCY)


class ResType(Enum):
    NODE = "Nodes"
    ELEMENT = "Elements"
    REGION = "Region"

    @property
    def is_field(self) -> bool:
        return self is not ResType.REGION


#: Quantity names recognized by downstream acoustic/flow solvers. Any
#: other string is legal but triggers :class:`UnknownQuantityWarning`
#: when written to a container file.
KNOWN_QUANTITIES = frozenset(
    {
        "acouPressure",
        "acouVelocity",
        "acouPotential",
        "acoutIntensity",
        "fluidMechVelocity",
        "meanFluidMechVelocity",
        "fluidMechPressure",
        "fluidMechDensity",
        "fluidMechVorticity",
        "fluidMechGradPressure",
        "acouRhsLoad",
        "acouRhsLoadP",
        "vortexRhsLoad",
        "acouDivLighthillTensor",
    }
)


class UnknownQuantityWarning(UserWarning):
    """Quantity name is not in the solver vocabulary (still written)."""


def check_quantity_name(name: str) -> bool:
    """Warn (once per call) if ``name`` is outside the known vocabulary."""
    if name not in KNOWN_QUANTITIES:
        warnings.warn(
            f"quantity '{name}' is not a known solver quantity name",
            UnknownQuantityWarning,
            stacklevel=2,
        )
        return False
    return True


def default_dim_names(d: int) -> list[str]:
    if d == 1:
        return ["-"]
    if d == 3:
        return ["x", "y", "z"]
    if d == 6:
        return ["xx", "yy", "zz", "yz", "xz", "xy"]
    return [f"d{i + 1}" for i in range(d)]


@dataclass
class ResultInfo:
    """Metadata describing one result array (intentionally redundant)."""

    quantity: str
    region: str
    res_type: ResType
    dim_names: list[str]
    analysis_type: AnalysisType
    is_complex: bool


@dataclass
class ResultArray:
    """One quantity on one region over all steps of a multi-step.

    Parameters
    ----------
    data : ndarray
        ``(N, M, D)`` for field data (``res_type`` NODE/ELEMENT),
        ``(N, D)`` for history data (``res_type`` REGION). Stored as
        float64 or complex128 according to ``is_complex``.
    quantity, region : str
    res_type : ResType
    step_values : (N,) float array
    analysis_type : AnalysisType
    dim_names : list of str, optional
        Defaults derived from ``D`` when omitted.
    is_complex : bool, optional
        Defaults from the analysis type (harmonic/eigenfrequency are
        complex). Setting it False with complex input data is an error.
    multi_step_id : int
    meta : dict
        Free-form processing notes; never persisted to file.
    """

    data: np.ndarray
    quantity: str
    region: str
    res_type: ResType
    step_values: np.ndarray
    analysis_type: AnalysisType
    dim_names: list[str] | None = None
    is_complex: bool | None = None
    multi_step_id: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.res_type = ResType(self.res_type)
        self.analysis_type = AnalysisType(self.analysis_type)
        data = np.asarray(self.data)
        want = 3 if self.res_type.is_field else 2
        if data.ndim != want:
            kind = "field" if self.res_type.is_field else "history"
            raise ValueError(
                f"{kind} data ({self.res_type.name}) requires rank {want}, "
                f"got shape {data.shape}"
            )
        if self.is_complex is None:
            self.is_complex = self.analysis_type.default_complex or np.iscomplexobj(data)
        if self.is_complex:
            data = data.astype(np.complex128, copy=False)
        else:
            if np.iscomplexobj(data):
                raise ValueError("is_complex=False but data has an imaginary part")
            data = data.astype(np.float64, copy=False)
        self.data = data
        self.step_values = np.asarray(self.step_values, dtype=np.float64).ravel()
        if self.step_values.size != data.shape[0]:
            raise ValueError(
                f"step_values has length {self.step_values.size}, "
                f"data has {data.shape[0]} steps"
            )
        d = data.shape[-1]
        if self.dim_names is None:
            self.dim_names = default_dim_names(d)
        elif len(self.dim_names) != d:
            raise ValueError(
                f"dim_names has {len(self.dim_names)} entries for D={d}"
            )
        else:
            self.dim_names = [str(s) for s in self.dim_names]
        self.multi_step_id = int(self.multi_step_id)

    @property
    def num_steps(self) -> int:
        return int(self.data.shape[0])

    @property
    def num_dofs(self) -> int:
        if not self.res_type.is_field:
            raise ValueError("history data has no DOF axis")
        return int(self.data.shape[1])

    @property
    def num_dims(self) -> int:
        return int(self.data.shape[-1])

    @property
    def info(self) -> ResultInfo:
        return ResultInfo(
            quantity=self.quantity,
            region=self.region,
            res_type=self.res_type,
            dim_names=list(self.dim_names),
            analysis_type=self.analysis_type,
            is_complex=bool(self.is_complex),
        )

    def with_data(self, data, **overrides) -> "ResultArray":
        """Copy of this array with new data and selected metadata changes."""
        kw = dict(
            quantity=self.quantity,
            region=self.region,
            res_type=self.res_type,
            step_values=self.step_values,
            analysis_type=self.analysis_type,
            dim_names=None,
            is_complex=None,
            multi_step_id=self.multi_step_id,
        )
        kw.update(overrides)
        return ResultArray(data, **kw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultArray):
            return NotImplemented
        return (
            self.quantity == other.quantity
            and self.region == other.region
            and self.res_type == other.res_type
            and self.analysis_type == other.analysis_type
            and bool(self.is_complex) == bool(other.is_complex)
            and self.multi_step_id == other.multi_step_id
            and list(self.dim_names) == list(other.dim_names)
            and np.array_equal(self.step_values, other.step_values)
            and np.array_equal(self.data, other.data)
        )


@dataclass
class ResultContainer:
    """All result arrays of one multi-step.

    A container holds exactly one multi-step; every member array must
    share its analysis type, step values and multi-step id.
    """

    analysis_type: AnalysisType | None = None
    multi_step_id: int = 1
    step_values: np.ndarray | None = None
    arrays: list[ResultArray] = field(default_factory=list)

    def __post_init__(self):
        if self.analysis_type is not None:
            self.analysis_type = AnalysisType(self.analysis_type)
        if self.analysis_type is None and self.arrays:
            self.analysis_type = self.arrays[0].analysis_type
        if self.step_values is None and self.arrays:
            self.step_values = self.arrays[0].step_values
        if self.step_values is not None:
            self.step_values = np.asarray(self.step_values, dtype=np.float64).ravel()
        self.validate()

    def validate(self) -> None:
        for arr in self.arrays:
            if arr.analysis_type != self.analysis_type:
                raise ValueError(
                    f"array '{arr.quantity}' has analysis type "
                    f"{arr.analysis_type}, container has {self.analysis_type}"
                )
            if arr.multi_step_id != self.multi_step_id:
                raise ValueError(
                    f"array '{arr.quantity}' belongs to multi-step "
                    f"{arr.multi_step_id}, container is {self.multi_step_id}"
                )
            if not np.array_equal(arr.step_values, self.step_values):
                raise ValueError(
                    f"array '{arr.quantity}' step values differ from the container's"
                )

    @property
    def infos(self) -> list[ResultInfo]:
        return [a.info for a in self.arrays]

    @property
    def is_empty(self) -> bool:
        return not self.arrays

    def add(self, array: ResultArray) -> None:
        if self.analysis_type is None:
            self.analysis_type = array.analysis_type
        if self.step_values is None:
            self.step_values = array.step_values
        self.arrays.append(array)
        self.validate()

    def get(self, quantity: str, region: str | None = None) -> ResultArray:
        hits = [
            a
            for a in self.arrays
            if a.quantity == quantity and (region is None or a.region == region)
        ]
        if not hits:
            raise KeyError(
                f"no result '{quantity}'"
                + (f" on region '{region}'" if region else "")
            )
        if len(hits) > 1:
            raise KeyError(f"result '{quantity}' is ambiguous; specify the region")
        return hits[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultContainer):
            return NotImplemented
        if self.is_empty and other.is_empty:
            return True
        key = lambda a: (a.quantity, a.region, a.res_type.name)
        return (
            self.analysis_type == other.analysis_type
            and self.multi_step_id == other.multi_step_id
            and np.array_equal(self.step_values, other.step_values)
            and sorted(self.arrays, key=key) == sorted(other.arrays, key=key)
        )
