"""Thermal inputs through purification on a doubled mode register.

A thermal state on ``M`` modes is the reduced state of two-mode squeezed
vacuum on ``2M`` modes.  Composing the molecular Gaussian unitary with that
purifier gives a ``2M``-mode Gaussian unitary, which in turn is prepared from
single-mode squeezed coherent states followed by one interferometer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock
from .errors import ValidationError
from .gaussian import (
    DEFAULT_TOL,
    BlochMessiahFactors,
    BogoliubovTransform,
    Displacement,
    OpticalCircuit,
    Rotation,
    Squeeze,
    TwoModeSqueeze,
    bloch_messiah,
    check,
    compose,
    primitive_transform,
    reorder_displacement,
    synthesize_circuit,
)

# second radiation constant hc/k_B in cm K
C2_CM_K = 1.438777


def thermal_occupation(omega, temperature: float, units: str = "dimensionless") -> np.ndarray:
    """Bose-Einstein occupations ``1/(exp(beta hbar omega) - 1)``.

    For ``cm-1`` the temperature is in kelvin; for ``dimensionless`` it is
    ``k_B T`` in the same units as ``omega``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if temperature < 0:
        raise ValidationError("temperature must be non-negative")
    if np.any(omega <= 0):
        raise ValidationError("frequencies must be positive")
    if temperature == 0:
        return np.zeros_like(omega)
    if units == "cm-1":
        x = C2_CM_K * omega / temperature
    elif units == "dimensionless":
        x = omega / temperature
    else:
        raise ValidationError(f"unknown units {units!r}")
    return 1.0 / np.expm1(x)


def purification_theta(nbar) -> np.ndarray:
    """``theta = 2 artanh(sqrt(nbar/(nbar+1)))`` so that ``sinh^2(theta/2) = nbar``."""
    nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
    if np.any(nbar < 0):
        raise ValidationError("mean occupations must be non-negative")
    # same as 2 artanh(sqrt(nbar/(nbar+1))), without cancellation at large nbar
    return 2 * np.arcsinh(np.sqrt(nbar))


def thermal_weight(nbar, n: Sequence[int]) -> float:
    """Product of geometric laws ``nbar^n / (nbar+1)^(n+1)``."""
    nbar = np.asarray(nbar, dtype=float)
    n = np.asarray(n)
    q = nbar / (nbar + 1)
    return float(np.prod(q ** n / (nbar + 1)))


@dataclass(frozen=True)
class ThermalSpec:
    nbar: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        nbar = np.atleast_1d(np.asarray(self.nbar, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if nbar.shape != theta.shape:
            raise ValidationError("nbar and theta must have equal length")
        if np.any(np.abs(np.sinh(theta / 2) ** 2 - nbar) > 1e-12 * np.maximum(1.0, nbar)):
            raise ValidationError("theta is inconsistent with nbar")
        nbar.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "nbar", nbar)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_nbar(cls, nbar) -> "ThermalSpec":
        nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
        return cls(nbar, purification_theta(nbar))

    @property
    def mode_count(self) -> int:
        return self.nbar.size

    def purifier(self) -> TwoModeSqueeze:
        return TwoModeSqueeze(self.theta)


@dataclass(frozen=True)
class ExtendedTransform:
    """``2M``-mode transform of ``O_G V(beta)`` with its M-mode source and thermal spec."""

    transform: BogoliubovTransform
    source: BogoliubovTransform
    thermal: ThermalSpec

    @property
    def mode_count(self) -> int:
        return self.source.mode_count


def build_extended(T: BogoliubovTransform, spec: ThermalSpec, tol: float = DEFAULT_TOL) -> ExtendedTransform:
    """Closed-form extended matrices ``[[XF, YG], [G, 0]]``, ``[[YF, XG], [0, F]]``, ``(z, 0)``."""
    check(T, tol)
    M = T.mode_count
    if spec.mode_count != M:
        raise ValidationError(f"thermal spec has {spec.mode_count} modes, transform has {M}")
    F = np.diag(np.sqrt(spec.nbar + 1))
    G = np.diag(np.sqrt(spec.nbar))
    Z = np.zeros((M, M))
    X = np.block([[T.X @ F, T.Y @ G], [G, Z]])
    Y = np.block([[T.Y @ F, T.X @ G], [Z, F]])
    z = np.concatenate([T.z, np.zeros(M)])
    return ExtendedTransform(BogoliubovTransform(X, Y, z), T, spec)


def extended_by_composition(T: BogoliubovTransform, spec: ThermalSpec) -> BogoliubovTransform:
    """Same transform assembled as purifier first, then ``T`` on the primary modes."""
    return compose(primitive_transform(spec.purifier()), T.embed(2 * T.mode_count))


@dataclass(frozen=True)
class VibronicInputPrep:
    """Squeezed coherent inputs ``S(s)|gamma''>`` followed by the interferometer ``C_L``."""

    squeeze_params: np.ndarray
    gamma_dprime: np.ndarray
    interferometer: np.ndarray
    factors: BlochMessiahFactors
    gamma_prime: np.ndarray

    @property
    def mode_count(self) -> int:
        return self.squeeze_params.size

    def circuit(self) -> OpticalCircuit:
        return OpticalCircuit(
            self.mode_count,
            (
                Displacement(self.gamma_dprime),
                Squeeze(self.squeeze_params),
                Rotation(self.interferometer),
            ),
        )


def synthesize_vibronic_prep(ext: ExtendedTransform, tol: float = DEFAULT_TOL) -> VibronicInputPrep:
    T = ext.transform
    f = bloch_messiah(T, tol)
    gamma_p = reorder_displacement(T.X, T.Y, T.z, tol)
    gamma_pp = f.U_R.T @ gamma_p
    return VibronicInputPrep(f.sigma, gamma_pp, f.U_L, f, gamma_p)


def joint_probability_table(ext: ExtendedTransform, cutoff: int, tol: float = DEFAULT_TOL, **fock_kwargs) -> np.ndarray:
    """``P(m, n) = |<m, n|U(beta)|0>|^2`` over the cutoff box, indexed ``[m..., n...]``."""
    prep = synthesize_vibronic_prep(ext, tol)
    table = fock.state_probabilities(prep.circuit(), (0,) * (2 * ext.mode_count), cutoff, tol=tol, **fock_kwargs)
    return table.probabilities()


def joint_probability(ext: ExtendedTransform, m: Sequence[int], n: Sequence[int], cutoff: int, **kwargs) -> float:
    """Probability of detecting ``m`` on the primary and ``n`` on the ancilla modes."""
    M = ext.mode_count
    if len(m) != M or len(n) != M:
        raise ValidationError(f"occupation vectors must have length {M}")
    P = joint_probability_table(ext, cutoff, **kwargs)
    return float(P[tuple(m) + tuple(n)])


def heralded_probability(
    T: BogoliubovTransform, nbar, m: Sequence[int], n: Sequence[int], cutoff: int, tol: float = DEFAULT_TOL, **fock_kwargs
) -> float:
    """``P_th(n) |<m|O_G|n>|^2`` evaluated on the ``M``-mode circuit of ``T``."""
    amp = fock.circuit_amplitude(synthesize_circuit(T, tol), m, n, cutoff, tol=tol, **fock_kwargs)
    return thermal_weight(nbar, n) * abs(amp) ** 2
