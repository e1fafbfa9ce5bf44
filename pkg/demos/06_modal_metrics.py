"""Compare measured mode shapes against a reference set.

MAC says which modes match, MSF recovers calibration factors between
matched pairs, and MCF flags modes that are genuinely complex (a
traveling rather than standing wave pattern).
"""

import numpy as np

from meshfield import ModeSet, mac, mcf, msf

rng = np.random.default_rng(5)

# reference: the first four bending shapes of a 24-point beam
x = np.linspace(0.0, 1.0, 24)
reference = ModeSet(
    np.column_stack([np.sin((k + 1) * np.pi * x) for k in range(4)]),
    labels=[f"bending_{k + 1}" for k in range(4)],
)

# "measurement": scaled, slightly noisy, and with two modes swapped
scale = np.array([2.0, -0.5, 1.3, 0.8])
measured = reference.matrix * scale
measured += rng.normal(0.0, 0.02, measured.shape)
measured = ModeSet(measured[:, [0, 2, 1, 3]],
                   labels=["m1", "m2", "m3", "m4"])

table = mac(measured, reference)
print("MAC (rows: measured, columns: reference):")
for i, row in enumerate(np.round(table, 3)):
    print(f"  {measured.labels[i]}: {row}")
pairs = np.argmax(table, axis=1)
print("best matches:", {measured.labels[i]: reference.labels[j]
                        for i, j in enumerate(pairs)})

factors = msf(measured, reference)
print("recovered scale factors:",
      np.round([factors[i, j].real for i, j in enumerate(pairs)], 3))
print("true factors (after the swap):", scale[[0, 2, 1, 3]])

# complexity: real standing modes score 0, a traveling wave scores high
standing = mcf(reference)
traveling = ModeSet((np.sin(2 * np.pi * x) + 1j * np.cos(2 * np.pi * x))[:, None])
print("MCF of the standing reference modes:", np.round(standing, 4))
print("MCF of a traveling wave:", np.round(mcf(traveling), 4))
