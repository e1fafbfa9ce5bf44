"""Comparison metrics between mode-shape vectors.

Modes are columns of a complex matrix. The assurance criterion (MAC)
measures shape correlation, the scale factor (MSF) the complex scaling
of one mode relative to a reference, and the complexity factor (MCF)
how far a mode is from being real after a global phase rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_ZERO_NORM = 1e-300


@dataclass
class ModeSet:
    """Column-wise collection of mode shapes with optional labels."""

    matrix: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=np.complex128))
        if self.matrix.ndim != 2:
            raise ValueError("mode matrix must be 2-dimensional [dof x modes]")
        norms = np.linalg.norm(self.matrix, axis=0)
        if np.any(norms <= _ZERO_NORM):
            bad = np.nonzero(norms <= _ZERO_NORM)[0].tolist()
            raise ValueError(f"zero-norm mode column(s): {bad}")
        if not self.labels:
            self.labels = [f"mode_{k}" for k in range(self.num_modes)]
        if len(self.labels) != self.num_modes:
            raise ValueError(
                f"{len(self.labels)} labels for {self.num_modes} modes"
            )

    @property
    def num_dof(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[1]


def _as_modes(a) -> ModeSet:
    return a if isinstance(a, ModeSet) else ModeSet(np.asarray(a))


def mac(a, b) -> np.ndarray:
    """Modal assurance criterion matrix.

    ``mac[i, j] = |phi_i^H psi_j|^2 / ((phi_i^H phi_i)(psi_j^H psi_j))``
    over the columns phi of ``a`` and psi of ``b``; values lie in [0, 1]
    and are invariant to complex scaling of either argument.
    """
    a, b = _as_modes(a), _as_modes(b)
    if a.num_dof != b.num_dof:
        raise ValueError(
            f"mode sets have {a.num_dof} and {b.num_dof} DOFs; they must match"
        )
    cross = a.matrix.conj().T @ b.matrix
    na = np.sum(np.abs(a.matrix) ** 2, axis=0)
    nb = np.sum(np.abs(b.matrix) ** 2, axis=0)
    return np.abs(cross) ** 2 / np.outer(na, nb)


def msf(a, b) -> np.ndarray:
    """Modal scale factor matrix, scaling of ``a`` relative to ``b``.

    ``msf[i, j] = (psi_j^H phi_i) / (psi_j^H psi_j)`` with psi the
    reference modes (second argument), so ``msf(c*phi, phi) = c``.
    """
    a, b = _as_modes(a), _as_modes(b)
    if a.num_dof != b.num_dof:
        raise ValueError(
            f"mode sets have {a.num_dof} and {b.num_dof} DOFs; they must match"
        )
    cross = b.matrix.conj().T @ a.matrix  # [j, i] = psi_j^H phi_i
    nb = np.sum(np.abs(b.matrix) ** 2, axis=0)
    return (cross / nb[:, None]).T


def mcf(a) -> np.ndarray:
    """Modal complexity factor per mode, in [0, 1].

    Uses the eigenvalues of the 2x2 covariance of (Re phi, Im phi):
    ``1 - (l_max - l_min)/(l_max + l_min)``. A mode that is real up to
    a global phase scores 0; a maximally complex mode (real and
    imaginary parts orthogonal with equal norm) scores 1.
    """
    a = _as_modes(a)
    out = np.zeros(a.num_modes)
    for j in range(a.num_modes):
        re = a.matrix[:, j].real
        im = a.matrix[:, j].imag
        cov = np.array(
            [[re @ re, re @ im], [re @ im, im @ im]]
        )
        lam = np.linalg.eigvalsh(cov)
        out[j] = 1.0 - (lam[1] - lam[0]) / (lam[1] + lam[0])
    return out
