"""Differentiate noisy histories and inspect their spectra.

The time derivative uses a smooth noise-robust stencil: exact for
polynomials up to degree two, but damping white noise to 10/64 of its
input variance instead of amplifying it like a plain central
difference.
"""

import numpy as np

import meshfield as mf

rng = np.random.default_rng(42)

n, dt = 256, 1.0 / 256.0
steps = dt * np.arange(n)
clean = np.sin(2 * np.pi * 8.0 * steps)          # 8 Hz tone, amplitude 1
noisy = clean + rng.normal(0.0, 0.05, n)


def history(samples):
    return mf.ResultArray(
        samples[:, None, None],
        quantity="acouPressure",
        region="probe",
        res_type=mf.ResType.NODE,
        step_values=steps,
        analysis_type=mf.AnalysisType.TRANSIENT,
    )


# derivative: compare against the exact 16 pi cos(...)
deriv = mf.time_derivative(history(noisy), mf.BoundaryTreatment.REMOVE)
exact = 2 * np.pi * 8.0 * np.cos(2 * np.pi * 8.0 * deriv.step_values)
err = deriv.data[:, 0, 0] - exact
print("derivative of the noisy tone:")
print(f"  rms error     : {np.sqrt(np.mean(err ** 2)):.3f}")
print(f"  naive np.diff : "
      f"{np.sqrt(np.mean((np.diff(noisy) / dt - 2 * np.pi * 8 * np.cos(2 * np.pi * 8 * steps[:-1])) ** 2)):.3f}")
print("  (the stencil damps noise; a one-step difference amplifies it)")

# spectrum: the tone shows up as a unit peak in the 8 Hz bin
spectrum = mf.field_fft(history(noisy))
mags = np.abs(spectrum.data[:, 0, 0])
peak = np.argmax(mags[1:]) + 1
print("spectrum of the noisy tone:")
print(f"  peak bin      : {spectrum.step_values[peak]:.1f} Hz")
print(f"  peak magnitude: {mags[peak]:.4f}  (amplitude was 1.0)")
print(f"  noise floor   : {np.median(mags):.4f}")

# windowing trades bin precision for reduced leakage on off-bin tones
off = np.sin(2 * np.pi * 8.37 * steps)
plain = np.abs(mf.field_fft(history(off)).data[:, 0, 0])
hann = np.abs(mf.field_fft(history(off), window="hann").data[:, 0, 0])
print("off-bin tone leakage far from the peak:")
print(f"  plain: {np.max(plain[30:]):.5f}   hann: {np.max(hann[30:]):.5f}")
