"""Vibronic transitions as Gaussian unitaries (Duschinsky parameters, Doktorov operator)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .extension import thermal_occupation
from .gaussian import (
    BogoliubovTransform,
    Displacement,
    OpticalCircuit,
    Rotation,
    Squeeze,
)

UNITS = ("dimensionless", "cm-1")


@dataclass(frozen=True)
class MolecularParams:
    """Harmonic model of two electronic states related by ``Q' = U Q + d``.

    Frequencies are in ``units``.  With hbar = 1 the displacement ``d`` carries
    units of frequency^(-1/2), so ``delta = sqrt(omega') * d`` is dimensionless.
    ``temperature`` is in kelvin for ``cm-1`` and in frequency units (k_B T)
    for ``dimensionless``; ``nbar`` overrides it per mode.
    ``reference_frequency`` only rescales the circuit's squeezers for numerical
    conditioning; the transform itself does not depend on it.
    """

    omega: np.ndarray
    omega_prime: np.ndarray
    duschinsky_U: np.ndarray
    displacement_d: np.ndarray
    temperature: float = 0.0
    nbar: Optional[np.ndarray] = None
    adiabatic_offset: float = 0.0
    units: str = "dimensionless"
    reference_frequency: Optional[float] = None

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        omega_p = np.atleast_1d(np.asarray(self.omega_prime, dtype=float))
        M = omega.size
        if M == 0:
            raise ValidationError("molecule needs at least one mode")
        U = np.asarray(self.duschinsky_U)
        if np.iscomplexobj(U):
            raise ValidationError("Duschinsky matrix must be real orthogonal")
        U = np.atleast_2d(U.astype(float))
        d = np.atleast_1d(np.asarray(self.displacement_d, dtype=float))
        if omega_p.shape != (M,) or d.shape != (M,) or U.shape != (M, M):
            raise ValidationError(
                f"inconsistent shapes: omega {omega.shape}, omega_prime {omega_p.shape}, "
                f"duschinsky {U.shape}, displacement {d.shape}"
            )
        if np.any(omega <= 0) or np.any(omega_p <= 0):
            raise ValidationError("frequencies must be strictly positive")
        res = float(np.linalg.norm(U.T @ U - np.eye(M)))
        if res >= 1e-8:
            raise ValidationError(f"Duschinsky matrix is not orthogonal (residual {res:.3e})")
        if self.temperature < 0:
            raise ValidationError("temperature must be non-negative")
        if self.units not in UNITS:
            raise ValidationError(f"units must be one of {UNITS}, got {self.units!r}")
        nbar = self.nbar
        if nbar is not None:
            nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
            if nbar.shape != (M,) or np.any(nbar < 0):
                raise ValidationError("nbar must be a non-negative vector with one entry per mode")
        ref = self.reference_frequency
        if ref is None:
            ref = 1.0 if self.units == "dimensionless" else float(
                np.exp(np.mean(np.log(np.concatenate([omega, omega_p]))))
            )
        if ref <= 0:
            raise ValidationError("reference frequency must be positive")
        for name, val in [
            ("omega", omega), ("omega_prime", omega_p), ("duschinsky_U", U),
            ("displacement_d", d), ("nbar", nbar),
        ]:
            if val is not None:
                val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "reference_frequency", float(ref))

    @property
    def mode_count(self) -> int:
        return self.omega.size

    def thermal_nbar(self) -> np.ndarray:
        if self.nbar is not None:
            return np.array(self.nbar)
        return thermal_occupation(self.omega, self.temperature, self.units)

    @classmethod
    def identity(cls, mode_count: int = 1, omega: float = 1.0, **kwargs) -> "MolecularParams":
        w = np.full(mode_count, float(omega))
        return cls(w, w, np.eye(mode_count), np.zeros(mode_count), **kwargs)


@dataclass(frozen=True)
class DuschinskyParams:
    J: np.ndarray
    delta: np.ndarray


def duschinsky_params(mol: MolecularParams) -> DuschinskyParams:
    """``J = diag(sqrt(omega')) U diag(1/sqrt(omega))`` and ``delta = sqrt(omega') d``."""
    sqrt_wp = np.sqrt(mol.omega_prime)
    J = sqrt_wp[:, None] * mol.duschinsky_U / np.sqrt(mol.omega)[None, :]
    return DuschinskyParams(J, sqrt_wp * mol.displacement_d)


def doktorov_transform(p: DuschinskyParams) -> BogoliubovTransform:
    """``X = (J - J^-T)/2``, ``Y = (J + J^-T)/2``, ``z = delta/sqrt(2)``."""
    J = np.asarray(p.J)
    if np.iscomplexobj(J):
        raise ValidationError("complex J is not supported; use real orthogonal Duschinsky matrices")
    smin = float(np.linalg.svd(J, compute_uv=False)[-1])
    if smin < 1e-12 * max(1.0, float(np.abs(J).max())):
        raise ValidationError(f"J is singular (smallest singular value {smin:.3e})")
    JinvT = np.linalg.inv(J).T
    return BogoliubovTransform((J - JinvT) / 2, (J + JinvT) / 2, np.asarray(p.delta) / np.sqrt(2))


def doktorov_circuit(mol: MolecularParams) -> OpticalCircuit:
    """Squeeze, rotate, squeeze, displace: the Doktorov operator as an optical circuit."""
    w = mol.omega / mol.reference_frequency
    wp = mol.omega_prime / mol.reference_frequency
    delta = duschinsky_params(mol).delta
    return OpticalCircuit(
        mol.mode_count,
        (
            Squeeze(-0.5 * np.log(w)),
            Rotation(mol.duschinsky_U),
            Squeeze(0.5 * np.log(wp)),
            Displacement(delta / np.sqrt(2)),
        ),
    )
