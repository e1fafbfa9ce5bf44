"""Result arrays and containers: shape rules, dtype policy, lookup."""

import numpy as np
import pytest

from meshfield.results import (
    KNOWN_QUANTITIES,
    AnalysisType,
    ResType,
    ResultArray,
    ResultContainer,
    UnknownQuantityWarning,
    check_quantity_name,
    default_dim_names,
)


def _field(data=None, **overrides):
    kw = dict(
        quantity="acouPressure",
        region="surf",
        res_type=ResType.NODE,
        step_values=[0.0, 0.1],
        analysis_type=AnalysisType.TRANSIENT,
    )
    kw.update(overrides)
    if data is None:
        data = np.arange(2 * 4 * 1, dtype=float).reshape(2, 4, 1)
    return ResultArray(data, **kw)


# ---------------------------------------------------------------------------
# enum helpers
# ---------------------------------------------------------------------------


def test_analysis_type_complex_defaults():
    assert not AnalysisType.STATIC.default_complex
    assert not AnalysisType.TRANSIENT.default_complex
    assert AnalysisType.HARMONIC.default_complex
    assert AnalysisType.EIGENFREQUENCY.default_complex


def test_res_type_field_flag():
    assert ResType.NODE.is_field
    assert ResType.ELEMENT.is_field
    assert not ResType.REGION.is_field
    assert ResType("Nodes") is ResType.NODE  # hdf5 group spelling


def test_known_quantities_vocabulary():
    for name in ("acouPressure", "acoutIntensity", "fluidMechVelocity", "acouRhsLoad"):
        assert name in KNOWN_QUANTITIES
    assert "temperature" not in KNOWN_QUANTITIES


def test_check_quantity_name():
    assert check_quantity_name("acouPressure")
    with pytest.warns(UnknownQuantityWarning, match="myQuantity"):
        assert not check_quantity_name("myQuantity")


@pytest.mark.parametrize(
    "d,names",
    [
        (1, ["-"]),
        (3, ["x", "y", "z"]),
        (6, ["xx", "yy", "zz", "yz", "xz", "xy"]),
        (2, ["d1", "d2"]),
        (4, ["d1", "d2", "d3", "d4"]),
    ],
)
def test_default_dim_names(d, names):
    assert default_dim_names(d) == names


# ---------------------------------------------------------------------------
# ResultArray validation
# ---------------------------------------------------------------------------


def test_field_array_shape_and_defaults():
    arr = _field()
    assert arr.num_steps == 2
    assert arr.num_dofs == 4
    assert arr.num_dims == 1
    assert arr.dim_names == ["-"]
    assert not arr.is_complex
    assert arr.data.dtype == np.float64


def test_field_array_rejects_rank_2():
    with pytest.raises(ValueError, match="rank 3"):
        _field(data=np.zeros((2, 4)))


def test_history_array_rejects_rank_3():
    with pytest.raises(ValueError, match="rank 2"):
        _field(data=np.zeros((2, 4, 1)), res_type=ResType.REGION)


def test_history_array_has_no_dof_axis():
    arr = _field(data=np.zeros((2, 3)), res_type=ResType.REGION)
    assert arr.num_steps == 2
    assert arr.num_dims == 3
    with pytest.raises(ValueError, match="DOF"):
        arr.num_dofs


def test_step_value_length_must_match():
    with pytest.raises(ValueError, match="step_values"):
        _field(step_values=[0.0, 0.1, 0.2])


def test_dim_names_length_must_match():
    with pytest.raises(ValueError, match="dim_names"):
        _field(dim_names=["x", "y"])
    arr = _field(data=np.zeros((2, 4, 3)), dim_names=["u", "v", "w"])
    assert arr.dim_names == ["u", "v", "w"]


def test_harmonic_defaults_to_complex():
    arr = _field(analysis_type=AnalysisType.HARMONIC, step_values=[10.0, 20.0])
    assert arr.is_complex
    assert arr.data.dtype == np.complex128


def test_complex_data_forces_flag():
    arr = _field(data=np.zeros((2, 4, 1), dtype=complex))
    assert arr.is_complex  # inferred despite TRANSIENT analysis


def test_complex_data_with_explicit_real_flag_is_error():
    with pytest.raises(ValueError, match="imaginary"):
        _field(data=np.ones((2, 4, 1)) * 1j, is_complex=False)


def test_with_data_rederives_dims_and_dtype():
    arr = _field(data=np.zeros((2, 4, 3)))
    assert arr.dim_names == ["x", "y", "z"]
    out = arr.with_data(np.zeros((2, 4, 1)), quantity="acouPotential")
    assert out.quantity == "acouPotential"
    assert out.region == arr.region
    assert out.dim_names == ["-"]
    assert not out.is_complex
    cplx = arr.with_data(np.zeros((2, 4, 3), dtype=complex))
    assert cplx.is_complex


def test_array_equality_is_by_value():
    a = _field()
    b = _field()
    assert a == b
    assert a != _field(data=np.ones((2, 4, 1)))
    assert a != _field(quantity="acouPotential")


# ---------------------------------------------------------------------------
# ResultContainer
# ---------------------------------------------------------------------------


def test_container_infers_metadata_from_first_array():
    arr = _field()
    cont = ResultContainer(arrays=[arr])
    assert cont.analysis_type is AnalysisType.TRANSIENT
    assert np.array_equal(cont.step_values, [0.0, 0.1])
    assert not cont.is_empty
    assert cont.infos[0].quantity == "acouPressure"


@pytest.mark.parametrize(
    "overrides,message",
    [
        (dict(analysis_type=AnalysisType.STATIC), "analysis type"),
        (dict(step_values=[0.0, 0.5]), "step values differ"),
        (dict(multi_step_id=2), "multi-step"),
    ],
)
def test_container_add_checks_consistency(overrides, message):
    cont = ResultContainer()
    assert cont.is_empty
    cont.add(_field())
    with pytest.raises(ValueError, match=message):
        cont.add(_field(**overrides))


def test_container_get_by_quantity_and_region():
    a = _field()
    b = _field(region="other")
    c = _field(quantity="acouPotential")
    cont = ResultContainer(arrays=[a, b, c])
    assert cont.get("acouPotential") is c
    assert cont.get("acouPressure", "other") is b
    with pytest.raises(KeyError, match="ambiguous"):
        cont.get("acouPressure")
    with pytest.raises(KeyError, match="no result"):
        cont.get("missing")


def test_container_equality_ignores_array_order():
    a, b = _field(), _field(quantity="acouPotential")
    assert ResultContainer(arrays=[a, b]) == ResultContainer(arrays=[b, a])
    assert ResultContainer() == ResultContainer()
    assert ResultContainer(arrays=[a]) != ResultContainer(arrays=[b])
