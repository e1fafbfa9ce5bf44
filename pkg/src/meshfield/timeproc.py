"""Time-domain processing of result arrays.

Differentiation uses a 5-point smooth differentiator that suppresses
high-frequency noise: interior points apply

    dq/dt ~ (2*(q[k+1] - q[k-1]) + q[k+2] - q[k-2]) / (8*dt)

which is exact for polynomials up to degree 2 and attenuates noise to
10/64 of the input variance. FFT maps transient field data to a
one-sided complex spectrum scaled so an on-bin sinusoid of amplitude A
shows |A| in its bin.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .results import AnalysisType, ResultArray


class BoundaryTreatment(Enum):
    """What to do with the first/last two steps of a derivative.

    REMOVE drops them, NONE copies the input values through unchanged
    (flagged in the output metadata), ONE_SIDED applies one-sided
    5-point estimators.
    """

    REMOVE = "remove"
    NONE = "none"
    ONE_SIDED = "one-sided"


# One-sided 5-point differentiator weights (units of 1/dt), for the
# first and second step. Derived from the five constraints: exact for
# constant, linear and quadratic signals, and zero amplitude response
# with zero response slope at the Nyquist frequency (the same
# noise-suppression principle as the interior stencil). The right
# boundary uses the reversed, negated weights.
_ONE_SIDED = np.array(
    [
        [-5 / 8, -1 / 4, 1.0, 1 / 4, -3 / 8],
        [-3 / 8, -1 / 4, 1 / 2, 1 / 4, -1 / 8],
    ]
)


def _uniform_dt(step_values: np.ndarray, what: str) -> float:
    t = np.asarray(step_values, dtype=float)
    if len(t) < 2:
        raise ValueError(f"{what} needs at least 2 steps")
    diffs = np.diff(t)
    dt = diffs[0]
    if dt == 0 or np.any(np.abs(diffs - dt) > 1e-9 * abs(dt)):
        raise ValueError(f"{what} requires uniformly spaced step values")
    return float(dt)


def time_derivative(
    values: ResultArray,
    boundary: BoundaryTreatment | str = BoundaryTreatment.REMOVE,
) -> ResultArray:
    """Differentiate a transient result along the step axis.

    Interior steps use the noise-suppressing 5-point stencil; the two
    steps at each end are handled per ``boundary``. The output quantity
    name gains a ``_dt`` suffix.
    """
    boundary = BoundaryTreatment(boundary)
    if values.analysis_type is not AnalysisType.TRANSIENT:
        raise ValueError("time_derivative requires TRANSIENT data")
    n = values.num_steps
    if n < 5:
        raise ValueError(f"time_derivative needs at least 5 steps, got {n}")
    dt = _uniform_dt(values.step_values, "time_derivative")

    q = values.data
    out = np.zeros_like(q)
    out[2:-2] = (2.0 * (q[3:-1] - q[1:-3]) + q[4:] - q[:-4]) / (8.0 * dt)

    meta = {}
    steps = np.asarray(values.step_values, dtype=float)
    if boundary is BoundaryTreatment.REMOVE:
        out = out[2:-2]
        steps = steps[2:-2]
    elif boundary is BoundaryTreatment.NONE:
        out[:2] = q[:2]
        out[-2:] = q[-2:]
        meta["untreated_steps"] = [0, 1, n - 2, n - 1]
    else:
        for k in (0, 1):
            out[k] = np.tensordot(_ONE_SIDED[k], q[:5], axes=(0, 0)) / dt
            out[n - 1 - k] = (
                -np.tensordot(_ONE_SIDED[k][::-1], q[-5:], axes=(0, 0)) / dt
            )
    result = values.with_data(
        out, quantity=values.quantity + "_dt", step_values=steps
    )
    result.meta.update(meta)
    return result


def field_fft(values: ResultArray, window: str | None = None) -> ResultArray:
    """Transform transient data to a one-sided complex spectrum.

    Bin k of the output sits at frequency k/(N*dt) and is scaled by 2/N
    (1/N for the DC bin), so an on-bin real sinusoid of amplitude A
    appears with magnitude |A|. The output is HARMONIC and complex. An
    optional Hann ``window`` ("hann") tapers the signal first; default
    is no windowing.
    """
    if values.analysis_type is not AnalysisType.TRANSIENT:
        raise ValueError("field_fft requires TRANSIENT data")
    n = values.num_steps
    if n < 2:
        raise ValueError(f"field_fft needs at least 2 steps, got {n}")
    dt = _uniform_dt(values.step_values, "field_fft")

    data = values.data
    if window is not None:
        if window != "hann":
            raise ValueError(f"unknown window '{window}'")
        taper = np.hanning(n)
        data = data * taper.reshape((n,) + (1,) * (data.ndim - 1))

    spectrum = np.fft.rfft(data, axis=0)
    scale = np.full(spectrum.shape[0], 2.0 / n)
    scale[0] = 1.0 / n
    spectrum = spectrum * scale.reshape((-1,) + (1,) * (data.ndim - 1))
    freqs = np.fft.rfftfreq(n, d=dt)

    result = values.with_data(
        spectrum.astype(np.complex128),
        step_values=freqs,
        analysis_type=AnalysisType.HARMONIC,
        is_complex=True,
    )
    result.meta["num_samples"] = n
    return result


def _inverse_field_fft(spectrum: ResultArray, num_samples: int | None = None):
    """Reconstruct the time samples behind a field_fft result.

    Testing helper: undoes the one-sided amplitude scaling and inverts
    the real FFT. ``num_samples`` defaults to the count recorded by
    field_fft.
    """
    if num_samples is None:
        num_samples = spectrum.meta.get("num_samples")
    if num_samples is None:
        raise ValueError("num_samples not recorded; pass it explicitly")
    n = int(num_samples)
    data = spectrum.data
    scale = np.full(data.shape[0], 2.0 / n)
    scale[0] = 1.0 / n
    unscaled = data / scale.reshape((-1,) + (1,) * (data.ndim - 1))
    return np.fft.irfft(unscaled, n=n, axis=0)
