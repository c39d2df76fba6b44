"""Randomized invariant suites shared by the ``verify`` command and the tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.stats import ortho_group, unitary_group

from . import fock
from .config import RunConfig
from .doktorov import MolecularParams, doktorov_circuit, doktorov_transform, duschinsky_params
from .extension import ThermalSpec, build_extended, joint_probability_table, thermal_weight
from .gaussian import (
    Displacement,
    OpticalCircuit,
    Rotation,
    Squeeze,
    circuit_transform,
    max_entry_difference,
    synthesize_circuit,
    validate,
)
from .spectrum import fcp_direct, fcp_extended, max_bin_difference


def random_unitary(rng: np.random.Generator, M: int) -> np.ndarray:
    if M == 1:
        return np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.eye(1)
    return unitary_group.rvs(M, random_state=rng)


def random_orthogonal(rng: np.random.Generator, M: int) -> np.ndarray:
    if M == 1:
        return np.eye(1) * rng.choice([-1.0, 1.0])
    return ortho_group.rvs(M, random_state=rng)


def random_primitive(rng: np.random.Generator, M: int, scale: float = 1.0):
    kind = rng.integers(3)
    if kind == 0:
        return Rotation(random_unitary(rng, M))
    if kind == 1:
        return Squeeze(scale * rng.normal(size=M))
    return Displacement(scale * (rng.normal(size=M) + 1j * rng.normal(size=M)))


def random_circuit(rng: np.random.Generator, M: int, max_ops: int = 5, scale: float = 1.0) -> OpticalCircuit:
    n_ops = int(rng.integers(1, max_ops + 1))
    return OpticalCircuit(M, [random_primitive(rng, M, scale) for _ in range(n_ops)])


def random_molecule(
    rng: np.random.Generator,
    M: int,
    freq_range=(0.25, 4.0),
    max_d: float = 1.0,
    degenerate: bool = False,
    **kwargs,
) -> MolecularParams:
    lo, hi = np.log(freq_range[0]), np.log(freq_range[1])
    w = np.exp(rng.uniform(lo, hi, M))
    wp = np.exp(rng.uniform(lo, hi, M))
    if degenerate:
        w[:] = w[0]
        wp[:] = wp[0]
    d = rng.uniform(-max_d, max_d, M)
    return MolecularParams(w, wp, random_orthogonal(rng, M), d, **kwargs)


def bounded_molecule(rng: np.random.Generator, M: int, max_squeeze=0.7, max_delta=1.0, max_nbar=1.0) -> MolecularParams:
    """Molecule with ``|ln(omega'/omega)|/2 <= max_squeeze``, ``|delta| <= max_delta``, ``nbar <= max_nbar``."""
    w = np.exp(rng.uniform(-0.5, 0.5, M))
    wp = w * np.exp(rng.uniform(-2 * max_squeeze, 2 * max_squeeze, M))
    delta = rng.uniform(-max_delta, max_delta, M)
    return MolecularParams(
        w, wp, random_orthogonal(rng, M), delta / np.sqrt(wp), nbar=rng.uniform(0, max_nbar, M)
    )


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    limit: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: worst={self.worst:.3e} limit={self.limit:.1e}"
        return text + (f" ({self.detail})" if self.detail else "")


def _worst(name, values, limit, describe: Callable[[int], str]) -> SuiteResult:
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values))
    passed = bool(np.all(values < limit))
    return SuiteResult(name, passed, float(values[i]), limit, "" if passed else describe(i))


def suite_constraints(rng, config: RunConfig, count: int = 200) -> SuiteResult:
    circuits = [random_circuit(rng, int(rng.integers(1, 5))) for _ in range(count)]
    vals = [max(validate(circuit_transform(c))) for c in circuits]
    return _worst("constraints", vals, config.tolerance, lambda i: f"circuit {circuits[i]!r}")


def suite_round_trip(rng, config: RunConfig, count: int = 100) -> SuiteResult:
    Ts = [circuit_transform(random_circuit(rng, int(rng.integers(1, 5)))) for _ in range(count)]
    vals = [max_entry_difference(circuit_transform(synthesize_circuit(T)), T) for T in Ts]
    return _worst("bloch_messiah_round_trip", vals, config.tolerance, lambda i: f"transform {Ts[i]!r}")


def suite_doktorov(rng, config: RunConfig, count: int = 100) -> SuiteResult:
    mols = [random_molecule(rng, int(rng.integers(1, 5))) for _ in range(count)]
    vals = [
        max_entry_difference(circuit_transform(doktorov_circuit(m)), doktorov_transform(duschinsky_params(m)))
        for m in mols
    ]
    return _worst("doktorov_circuit", vals, config.tolerance, lambda i: f"molecule {mols[i]!r}")


def suite_route_equivalence(rng, config: RunConfig, count: int = 2, cutoff: int = 6) -> SuiteResult:
    mols = [bounded_molecule(rng, M) for M in (1, 2) for _ in range(count)]
    kw = config.fock_kwargs
    vals = [
        max_bin_difference(
            fcp_direct(m, cutoff, 1e-5, 0.01, workers=1, **kw), fcp_extended(m, cutoff, 1e-5, 0.01, **kw)
        )
        for m in mols
    ]
    return _worst("route_equivalence", vals, config.route_tolerance, lambda i: f"molecule {mols[i]!r}")


def suite_scattershot(rng, config: RunConfig, count: int = 3, max_total: int = 3) -> SuiteResult:
    vals, cases = [], []
    for _ in range(count):
        U = random_unitary(rng, 2)
        nbar = rng.uniform(0.1, 1.0, 2)
        ext = build_extended(circuit_transform(OpticalCircuit(2, [Rotation(U)])), ThermalSpec.from_nbar(nbar))
        P = joint_probability_table(ext, max_total, **config.fock_kwargs)
        worst = 0.0
        for m, n in itertools.product(itertools.product(range(max_total + 1), repeat=2), repeat=2):
            if sum(m) > max_total or sum(n) > max_total:
                continue
            amp = fock.rotation_amplitude(U, m, n, limit=config.permanent_limit)
            worst = max(worst, abs(P[m + n] - thermal_weight(nbar, n) * abs(amp) ** 2))
        vals.append(worst)
        cases.append((U, nbar))
    return _worst("scattershot_reduction", vals, config.tolerance, lambda i: f"U={cases[i][0]!r}, nbar={cases[i][1]!r}")


SUITES = [suite_constraints, suite_round_trip, suite_doktorov, suite_route_equivalence, suite_scattershot]


def run_all(config: RunConfig, seed: int = 0) -> List[SuiteResult]:
    """Run every suite with its own generator derived from ``seed``."""
    seeds = np.random.SeedSequence(seed).spawn(len(SUITES))
    return [suite(np.random.default_rng(s), config) for suite, s in zip(SUITES, seeds)]
