"""Franck-Condon profiles as binned stick spectra.

Two routes produce the same profile: ``fcp_direct`` averages Fock-state
transition probabilities over a truncated thermal ensemble, while
``fcp_extended`` reads the joint photon statistics of the purified ``2M``-mode
circuit.  Both use the same ensemble, so their difference isolates the
amplitude computation.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fock
from .doktorov import MolecularParams, doktorov_circuit, doktorov_transform, duschinsky_params
from .errors import CostGuardError, ValidationError
from .extension import ThermalSpec, build_extended, joint_probability_table, thermal_weight
from .gaussian import DEFAULT_TOL

# guards floor() against representation error at bin edges
_EDGE_GUARD = 1e-9
# squared amplitude roundoff (~1e-16 ** 2); bins below this are reported as empty
NOISE_FLOOR = 1e-30


@dataclass(frozen=True)
class ThermalEnsemble:
    entries: tuple  # ((occupation tuple, weight), ...) in decreasing weight
    coverage: float

    def __len__(self):
        return len(self.entries)


def thermal_ensemble(nbar, epsilon: float, max_occupation: Optional[int] = None, max_entries: int = 1_000_000) -> ThermalEnsemble:
    """Most probable thermal occupation vectors until their weight reaches ``1 - epsilon``.

    Weights strictly decrease along every axis, so a best-first walk from the
    vacuum yields a downward-closed set.  With ``max_occupation`` the walk stays
    inside that box and the coverage may fall short of ``1 - epsilon``.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
    if np.any(nbar < 0):
        raise ValidationError("mean occupations must be non-negative")
    M = nbar.size
    start = (0,) * M
    heap = [(-thermal_weight(nbar, start), start)]
    seen = {start}
    entries = []
    coverage = 0.0
    while heap and coverage < 1 - epsilon:
        negw, n = heapq.heappop(heap)
        if -negw == 0:
            break
        entries.append((n, -negw))
        coverage += -negw
        if len(entries) >= max_entries:
            raise CostGuardError("thermal_ensemble_entries", len(entries), max_entries)
        for k in range(M):
            nxt = n[:k] + (n[k] + 1,) + n[k + 1:]
            if nxt in seen or (max_occupation is not None and nxt[k] > max_occupation):
                continue
            seen.add(nxt)
            heapq.heappush(heap, (-thermal_weight(nbar, nxt), nxt))
    return ThermalEnsemble(tuple(entries), coverage)


@dataclass(frozen=True)
class Spectrum:
    """Histogram over bins ``[k w, (k+1) w)``; ``bin_edges`` has one more entry than ``intensities``."""

    bin_edges: np.ndarray
    intensities: np.ndarray
    captured_probability: float
    metadata: dict = field(default_factory=dict)

    @property
    def bin_width(self) -> float:
        return float(self.metadata.get("bin_width", self.bin_edges[1] - self.bin_edges[0]))

    @property
    def first_bin(self) -> int:
        return int(self.metadata["first_bin"])

    @property
    def centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    def by_bin(self) -> dict:
        """Map from integer bin index to intensity."""
        return {self.first_bin + i: float(v) for i, v in enumerate(self.intensities)}


def _default_bin_width(mol: MolecularParams) -> float:
    return 10.0 if mol.units == "cm-1" else 0.01


def _box_energies(omega_prime: np.ndarray, cutoff: int) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(cutoff + 1) * w for w in omega_prime], indexing="ij")
    return np.sum(grids, axis=0)


def _bin_range(mol, cutoff, ensemble, width):
    top = cutoff * float(np.sum(mol.omega_prime)) + mol.adiabatic_offset
    bottom = -max(float(np.dot(n, mol.omega)) for n, _ in ensemble.entries) + mol.adiabatic_offset
    return math.floor(bottom / width + _EDGE_GUARD), math.floor(top / width + _EDGE_GUARD)


def _histogram(probs, energies, n, mol, width, kmin, length):
    shift = mol.adiabatic_offset - float(np.dot(n, mol.omega))
    idx = np.floor((energies + shift) / width + _EDGE_GUARD).astype(np.int64) - kmin
    return np.bincount(idx.ravel(), weights=probs.ravel(), minlength=length)


def _assemble(hists, kmin, width, metadata) -> Spectrum:
    total = np.zeros_like(hists[0])
    for h in hists:  # fixed merge order keeps results independent of worker count
        total += h
    total[total < NOISE_FLOOR] = 0.0
    nz = np.nonzero(total > 0)[0]
    lo, hi = (nz[0], nz[-1]) if nz.size else (0, 0)
    intens = total[lo:hi + 1]
    first = kmin + int(lo)
    edges = (first + np.arange(intens.size + 1)) * width
    meta = dict(metadata, bin_width=width, first_bin=first)
    return Spectrum(edges, intens, float(np.sum(intens)), meta)


def _validate_run(cutoff, bin_width):
    if cutoff < 0:
        raise ValidationError("cutoff must be non-negative")
    if bin_width <= 0:
        raise ValidationError(f"bin width must be positive, got {bin_width}")


def fcp_direct(
    mol: MolecularParams,
    cutoff: int = 8,
    epsilon: float = 1e-4,
    bin_width: Optional[float] = None,
    workers: Optional[int] = None,
    tol: float = DEFAULT_TOL,
    **fock_kwargs,
) -> Spectrum:
    """Thermally averaged Franck-Condon profile from Fock-state transitions.

    Each ensemble occupation ``n`` is propagated through the Doktorov circuit
    and ``weight(n) |<m|U_D|n>|^2`` is deposited at
    ``m . omega' - n . omega + omega_ad`` for every ``m`` in the cutoff box.
    """
    width = _default_bin_width(mol) if bin_width is None else float(bin_width)
    _validate_run(cutoff, width)
    nbar = mol.thermal_nbar()
    ensemble = thermal_ensemble(nbar, epsilon, max_occupation=cutoff)
    circuit = doktorov_circuit(mol)
    energies = _box_energies(mol.omega_prime, cutoff)
    kmin, kmax = _bin_range(mol, cutoff, ensemble, width)
    length = kmax - kmin + 1

    def one(entry):
        n, weight = entry
        table = fock.state_probabilities(circuit, n, cutoff, tol=tol, **fock_kwargs)
        return _histogram(weight * table.probabilities(), energies, n, mol, width, kmin, length)

    if workers == 1 or len(ensemble) == 1:
        hists = [one(e) for e in ensemble.entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hists = list(pool.map(one, ensemble.entries))
    return _assemble(hists, kmin, width, _metadata(mol, "direct", cutoff, epsilon, ensemble, nbar))


def fcp_extended(
    mol: MolecularParams,
    cutoff: int = 8,
    epsilon: float = 1e-4,
    bin_width: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    **fock_kwargs,
) -> Spectrum:
    """Same profile from the joint statistics of the ``2M``-mode purified circuit.

    ``P(m, n)`` already carries the thermal weight of the ancilla pattern ``n``;
    it is summed over the ensemble patterns used by :func:`fcp_direct`.
    """
    width = _default_bin_width(mol) if bin_width is None else float(bin_width)
    _validate_run(cutoff, width)
    nbar = mol.thermal_nbar()
    ensemble = thermal_ensemble(nbar, epsilon, max_occupation=cutoff)
    T = doktorov_transform(duschinsky_params(mol))
    ext = build_extended(T, ThermalSpec.from_nbar(nbar), tol)
    P = joint_probability_table(ext, cutoff, tol=tol, **fock_kwargs)
    energies = _box_energies(mol.omega_prime, cutoff)
    kmin, kmax = _bin_range(mol, cutoff, ensemble, width)
    length = kmax - kmin + 1
    hists = [
        _histogram(P[(Ellipsis,) + tuple(n)], energies, n, mol, width, kmin, length)
        for n, _ in ensemble.entries
    ]
    return _assemble(hists, kmin, width, _metadata(mol, "extended", cutoff, epsilon, ensemble, nbar))


def _metadata(mol, route, cutoff, epsilon, ensemble, nbar):
    return {
        "route": route,
        "cutoff": cutoff,
        "temperature": mol.temperature,
        "nbar": [float(v) for v in nbar],
        "epsilon": epsilon,
        "ensemble_size": len(ensemble),
        "ensemble_coverage": ensemble.coverage,
        "units": mol.units,
        "reference_frequency": mol.reference_frequency,
        "adiabatic_offset": mol.adiabatic_offset,
    }


def aligned(*spectra: Spectrum):
    """Common bin centers and intensity columns (zero-filled) for spectra of equal bin width."""
    widths = {s.bin_width for s in spectra}
    if len(widths) != 1:
        raise ValidationError(f"spectra have different bin widths: {sorted(widths)}")
    width = widths.pop()
    lo = min(s.first_bin for s in spectra)
    hi = max(s.first_bin + s.intensities.size for s in spectra)
    cols = []
    for s in spectra:
        col = np.zeros(hi - lo)
        col[s.first_bin - lo:s.first_bin - lo + s.intensities.size] = s.intensities
        cols.append(col)
    centers = (lo + np.arange(hi - lo) + 0.5) * width
    return centers, cols


def max_bin_difference(a: Spectrum, b: Spectrum) -> float:
    _, (ca, cb) = aligned(a, b)
    return float(np.max(np.abs(ca - cb))) if ca.size else 0.0


def broaden(spectrum: Spectrum, fwhm: float, grid=None):
    """Gaussian-broadened lineshape of the stick spectrum (bin centers as sticks)."""
    if fwhm <= 0:
        raise ValidationError("fwhm must be positive")
    sigma = fwhm / (2 * math.sqrt(2 * math.log(2)))
    centers = spectrum.centers
    if grid is None:
        grid = np.linspace(centers[0] - 4 * fwhm, centers[-1] + 4 * fwhm, 2000)
    grid = np.asarray(grid, dtype=float)
    kern = np.exp(-0.5 * ((grid[:, None] - centers[None, :]) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return grid, kern @ spectrum.intensities
