"""Brute-force truncated Fock-space engine.

Everything here is built from the operator definitions alone (generators and
their closed-form matrix elements), never from Bogoliubov matrices, so it can
serve as an independent check on :mod:`vibronic.gaussian`.

States live in the space of occupation vectors with total photon number at
most ``N``.  Passive rotations conserve the total number and therefore act
exactly on that space; squeezers and displacements are truncated.  For an
output box with per-mode cutoff ``c`` on ``M`` modes the working space uses
``N = M*c + pad`` so the whole box is represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.special import eval_genlaguerre, gammaln

from .errors import CostGuardError, ValidationError
from .gaussian import (
    DEFAULT_TOL,
    Displacement,
    OpticalCircuit,
    Rotation,
    Squeeze,
    TwoModeSqueeze,
    unitarity_residual,
)
from .permanent import permanent

DEFAULT_BASIS_BUDGET = 2_000_000
DEFAULT_PERMANENT_LIMIT = 14
DEFAULT_PAD = 16
# extra per-mode rows kept while the state is still a product state
_PRODUCT_EXTRA = 30


def _log_factorial(n) -> np.ndarray:
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def _occupation(idx, cutoff=None, name="index") -> tuple:
    occ = tuple(int(v) for v in idx)
    if any(v < 0 for v in occ):
        raise ValidationError(f"{name} {occ} has negative occupations")
    if cutoff is not None and any(v > cutoff for v in occ):
        raise ValidationError(f"{name} {occ} exceeds cutoff {cutoff}")
    return occ


# --- single-mode matrices ----------------------------------------------------


def displacement_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """``<m|D(alpha)|n>`` for ``m, n <= cutoff`` from the associated-Laguerre closed form."""
    if cutoff < 0:
        raise ValidationError("cutoff must be non-negative")
    size = cutoff + 1
    alpha = complex(alpha)
    if alpha == 0:
        return np.eye(size, dtype=complex)
    x = abs(alpha) ** 2
    m = np.arange(size)[:, None]
    n = np.arange(size)[None, :]
    lo = np.minimum(m, n)
    k = np.abs(m - n)
    lf = _log_factorial
    log_pref = 0.5 * (lf(lo) - lf(lo + k)) + k * math.log(abs(alpha)) - x / 2
    phase = np.where(m >= n, np.exp(1j * np.angle(alpha) * k), np.exp(1j * np.angle(-np.conj(alpha)) * k))
    return np.exp(log_pref) * phase * eval_genlaguerre(lo, k, x)


def squeeze_matrix(lam: float, cutoff: int) -> np.ndarray:
    """``<m|S(lam)|n>`` for ``S = exp(lam (a^dagger^2 - a^2)/2)``.

    Built column by column from
    ``sqrt(n) S[m,n] = sqrt(m) sech(lam) S[m-1,n-1] - sqrt(n-1) tanh(lam) S[m,n-2]``,
    whose coefficients are bounded by one.
    """
    if cutoff < 0:
        raise ValidationError("cutoff must be non-negative")
    size = cutoff + 1
    lam = float(lam)
    S = np.zeros((size, size))
    t, sech = math.tanh(lam), 1.0 / math.cosh(lam)
    S[0, 0] = math.sqrt(sech)
    for m in range(2, size, 2):
        S[m, 0] = math.sqrt((m - 1) / m) * t * S[m - 2, 0]
    sq = np.sqrt(np.arange(size))
    for n in range(1, size):
        col = np.zeros(size)
        col[1:] = sq[1:] * sech * S[:-1, n - 1]
        if n >= 2:
            col -= sq[n - 1] * t * S[:, n - 2]
        S[:, n] = col / sq[n]
    return S.astype(complex)


def two_mode_squeeze_vacuum(theta: float, cutoff: int) -> np.ndarray:
    """Amplitudes ``<m_a, m_b|V(theta)|0, 0>`` as a ``(c+1, c+1)`` array (diagonal only)."""
    if cutoff < 0:
        raise ValidationError("cutoff must be non-negative")
    half = float(theta) / 2
    m = np.arange(cutoff + 1)
    amp = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amp[m, m] = math.tanh(half) ** m / math.cosh(half)
    return amp


# --- interferometer amplitudes ------------------------------------------------


def rotation_amplitude(U, m: Sequence[int], n: Sequence[int], limit: int = DEFAULT_PERMANENT_LIMIT) -> complex:
    """``<m|R_U|n>`` for ``R_U = exp(a^dagger^T log(U*) a)``.

    Since ``R_U a_j^dagger R_U^dagger = sum_k conj(U_kj) a_k^dagger`` this is the
    permanent of ``conj(U)`` with row ``k`` repeated ``m_k`` times and column
    ``j`` repeated ``n_j`` times, over ``sqrt(prod m! prod n!)``.
    """
    U = np.asarray(U, dtype=complex)
    M = U.shape[0]
    m = _occupation(m, name="output")
    n = _occupation(n, name="input")
    if len(m) != M or len(n) != M:
        raise ValidationError(f"occupation vectors must have length {M}")
    total = sum(n)
    if sum(m) != total:
        return 0j
    if total > limit:
        raise CostGuardError("permanent_size", total, limit)
    rows = np.repeat(np.arange(M), m)
    cols = np.repeat(np.arange(M), n)
    sub = U.conj()[np.ix_(rows, cols)]
    log_norm = 0.5 * float(np.sum(_log_factorial(m)) + np.sum(_log_factorial(n)))
    return permanent(sub) * math.exp(-log_norm)


# --- multimode working space --------------------------------------------------


class FockBasis:
    """All ``M``-mode occupation vectors with total photon number ``<= N``."""

    def __init__(self, mode_count: int, max_total: int):
        self.mode_count = M = mode_count
        self.max_total = N = max_total
        occ = np.arange(N + 1)[:, None]
        for _ in range(M - 1):
            counts = N - occ.sum(axis=1) + 1
            rows = np.repeat(occ, counts, axis=0)
            starts = np.repeat(np.cumsum(counts) - counts, counts)
            new = np.arange(rows.shape[0]) - starts
            occ = np.column_stack([rows, new])
        self.strides = (N + 1) ** np.arange(M, dtype=np.int64)
        keys = occ @ self.strides
        order = np.argsort(keys)
        self.occ = occ[order]
        self.keys = keys[order]
        self.totals = self.occ.sum(axis=1)
        self._mode_groups = {}
        self._pair_groups = {}

    @property
    def dim(self) -> int:
        return self.keys.size

    def index(self, occupations) -> np.ndarray:
        """Basis positions of occupation vectors (rows); ``-1`` where absent."""
        occ = np.atleast_2d(np.asarray(occupations, dtype=np.int64))
        ok = (occ >= 0).all(axis=1) & (occ.sum(axis=1) <= self.max_total)
        keys = occ @ self.strides
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.dim - 1)
        ok &= self.keys[pos] == keys
        return np.where(ok, pos, -1)

    def mode_groups(self, k: int):
        """Index tables grouping states that differ only in mode ``k``."""
        if k not in self._mode_groups:
            groups = []
            base = self.occ[:, k] == 0
            for r in range(self.max_total + 1):
                reps = np.nonzero(base & (self.totals == r))[0]
                if reps.size == 0:
                    continue
                L = self.max_total - r + 1
                keys = self.keys[reps][:, None] + np.arange(L)[None, :] * self.strides[k]
                groups.append((L, np.searchsorted(self.keys, keys)))
            self._mode_groups[k] = groups
        return self._mode_groups[k]

    def apply_single_mode(self, psi: np.ndarray, k: int, A: np.ndarray) -> np.ndarray:
        out = np.empty_like(psi)
        for L, idx in self.mode_groups(k):
            out[idx] = psi[idx] @ A[:L, :L].T
        return out

    def pair_groups(self, i: int, j: int):
        """Index tables of states differing only in modes ``i, j`` at fixed ``n_i + n_j``."""
        key = (i, j)
        if key not in self._pair_groups:
            groups = []
            base = (self.occ[:, i] == 0) & (self.occ[:, j] == 0)
            for r in range(self.max_total + 1):
                reps = np.nonzero(base & (self.totals == r))[0]
                if reps.size == 0:
                    continue
                rk = self.keys[reps][:, None]
                for S in range(self.max_total - r + 1):
                    p = np.arange(S + 1)[None, :]
                    keys = rk + p * self.strides[i] + (S - p) * self.strides[j]
                    groups.append((S, np.searchsorted(self.keys, keys)))
            self._pair_groups[key] = groups
        return self._pair_groups[key]

    def apply_rotation(self, psi: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Exact action of ``R_U`` through two-mode factors of ``U``."""
        diag, factors = givens_factors(U)
        psi = psi * np.prod(np.conj(diag)[None, :] ** self.occ, axis=1)
        # U = G_1 ... G_K D, so the last factor acts on the ket first
        for i, j, g in reversed(factors):
            sectors = two_mode_rotation_sectors(g, self.max_total)
            out = psi.copy()
            for S, idx in self.pair_groups(i, j):
                out[idx] = psi[idx] @ sectors[S].T
            psi = out
        return psi

    def rotation_generator(self, H: np.ndarray) -> sparse.csr_matrix:
        """Sparse matrix of ``sum_kl H_kl a_k^dagger a_l`` on this basis."""
        M = self.mode_count
        occ = self.occ
        rows, cols, vals = [], [], []
        src_all = np.arange(self.dim)
        diag = occ @ np.diag(H)
        rows.append(src_all)
        cols.append(src_all)
        vals.append(diag.astype(complex))
        for k in range(M):
            for l in range(M):
                if k == l or H[k, l] == 0:
                    continue
                src = np.nonzero(occ[:, l] > 0)[0]
                tgt = np.searchsorted(self.keys, self.keys[src] + self.strides[k] - self.strides[l])
                rows.append(tgt)
                cols.append(src)
                vals.append(H[k, l] * np.sqrt(occ[src, l] * (occ[src, k] + 1.0)))
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.dim, self.dim),
        )


def givens_factors(U: np.ndarray):
    """Write ``U = G_1 ... G_K diag(d)`` with each ``G`` acting on two modes.

    Returns ``(d, [(i, j, g), ...])`` where ``g`` is the 2x2 block of ``G`` on
    modes ``(i, j)``, listed as ``G_1 .. G_K``.
    """
    W = np.array(U, dtype=complex)
    M = W.shape[0]
    factors = []
    for c in range(M - 1):
        for r in range(M - 1, c, -1):
            a, b = W[r - 1, c], W[r, c]
            if b == 0:
                continue
            nrm = math.hypot(abs(a), abs(b))
            g = np.array([[np.conj(a), np.conj(b)], [-b, a]]) / nrm
            W[[r - 1, r], :] = g @ W[[r - 1, r], :]
            factors.append((r - 1, r, g.conj().T))
    return np.diag(W).copy(), factors


def two_mode_rotation_sectors(g: np.ndarray, max_total: int) -> list:
    """Matrices of ``R_g`` on ``|p, S-p>``, ``p = 0..S``, for every ``S <= max_total``.

    Each sector is closed under the generator, so ``expm`` of the restricted
    generator is exact there.
    """
    from scipy.linalg import expm

    H = rotation_log(g)
    out = []
    for S in range(max_total + 1):
        p = np.arange(S + 1)
        G = np.diag(H[0, 0] * p + H[1, 1] * (S - p)).astype(complex)
        # a_0^dagger a_1 maps |p, S-p> to |p+1, S-p-1>
        up = np.sqrt((p[:-1] + 1.0) * (S - p[:-1]))
        G[p[1:], p[:-1]] += H[0, 1] * up
        G[p[:-1], p[1:]] += H[1, 0] * up
        out.append(expm(G))
    return out


@lru_cache(maxsize=8)
def _basis(mode_count: int, max_total: int) -> FockBasis:
    return FockBasis(mode_count, max_total)


def rotation_log(U: np.ndarray) -> np.ndarray:
    """Anti-Hermitian ``H`` with ``exp(H) = conj(U)`` via the complex Schur form."""
    from scipy.linalg import schur

    T, Z = schur(np.conj(np.asarray(U, dtype=complex)), output="complex")
    phases = np.angle(np.diag(T))
    return Z @ np.diag(1j * phases) @ Z.conj().T


def _expand_two_mode_squeeze(op: TwoModeSqueeze):
    """``V(theta) = R(B) [S(theta/2) x S(-theta/2)] R(B)`` with ``B`` the symmetric 50:50 splitter."""
    P = op.theta.size
    h = 1 / math.sqrt(2)
    B = np.zeros((2 * P, 2 * P))
    for k in range(P):
        B[k, k], B[k, P + k], B[P + k, k], B[P + k, P + k] = h, h, h, -h
    half = op.theta / 2
    return [Rotation(B), Squeeze(np.concatenate([half, -half])), Rotation(B)]


def working_total(mode_count: int, cutoff: int, pad: int = DEFAULT_PAD) -> int:
    return mode_count * cutoff + pad


def _check_budget(mode_count, cutoff, pad, basis_budget):
    box = (cutoff + 1) ** mode_count
    if box > basis_budget:
        raise CostGuardError("basis_size (cutoff+1)^M", box, basis_budget)
    N = working_total(mode_count, cutoff, pad)
    dim = math.comb(N + mode_count, mode_count)
    if dim > basis_budget:
        raise CostGuardError("working_dimension", dim, basis_budget)
    return N


def evolve(
    circuit: OpticalCircuit,
    n: Sequence[int],
    cutoff: int,
    pad: int = DEFAULT_PAD,
    basis_budget: int = DEFAULT_BASIS_BUDGET,
    tol: float = DEFAULT_TOL,
):
    """Apply ``circuit`` to ``|n>``; returns ``(basis, psi)`` on the working space."""
    M = circuit.mode_count
    n = _occupation(n, cutoff, "input")
    if len(n) != M:
        raise ValidationError(f"input occupation has length {len(n)}, circuit has {M} modes")
    N = _check_budget(M, cutoff, pad, basis_budget)
    ops = []
    for op in circuit.ops:
        if isinstance(op, Rotation):
            res = unitarity_residual(op.U)
            if res > tol:
                raise ValidationError(f"rotation matrix is not unitary (residual {res:.3e})")
        ops.extend(_expand_two_mode_squeeze(op) if isinstance(op, TwoModeSqueeze) else [op])

    # product-state stage: single-mode ops act mode by mode in a roomier space
    size = N + _PRODUCT_EXTRA
    factors = [np.eye(size + 1, dtype=complex)[:, v] for v in n]
    vacuum = not any(n)
    i = 0
    while i < len(ops):
        op = ops[i]
        if isinstance(op, Squeeze):
            factors = [squeeze_matrix(l, size) @ f if l else f for l, f in zip(op.lam, factors)]
            vacuum = vacuum and not np.any(op.lam)
        elif isinstance(op, Displacement):
            factors = [displacement_matrix(a, size) @ f if a else f for a, f in zip(op.alpha, factors)]
            vacuum = vacuum and not np.any(op.alpha)
        elif isinstance(op, Rotation) and (vacuum or _is_diagonal(op.U)):
            if not vacuum:
                # diagonal rotation multiplies |v> by conj(u)^v
                u = np.conj(np.diag(op.U))
                factors = [f * u_k ** np.arange(size + 1) for u_k, f in zip(u, factors)]
        else:
            break
        i += 1

    basis = _basis(M, N)
    psi = np.ones(basis.dim, dtype=complex)
    for k, f in enumerate(factors):
        psi *= f[basis.occ[:, k]]

    for op in ops[i:]:
        if isinstance(op, Squeeze):
            for k, l in enumerate(op.lam):
                if l:
                    psi = basis.apply_single_mode(psi, k, squeeze_matrix(l, N))
        elif isinstance(op, Displacement):
            for k, a in enumerate(op.alpha):
                if a:
                    psi = basis.apply_single_mode(psi, k, displacement_matrix(a, N))
        elif isinstance(op, Rotation):
            psi = basis.apply_rotation(psi, op.U)
    return basis, psi


def _is_diagonal(U) -> bool:
    return not np.any(U - np.diag(np.diag(U)))


def circuit_amplitude(
    circuit: OpticalCircuit,
    m: Sequence[int],
    n: Sequence[int],
    cutoff: int,
    **kwargs,
) -> complex:
    """``<m|U|n>`` for the circuit's unitary, evaluated by truncated matrix products."""
    m = _occupation(m, cutoff, "output")
    basis, psi = evolve(circuit, n, cutoff, **kwargs)
    if len(m) != circuit.mode_count:
        raise ValidationError(f"output occupation has length {len(m)}, circuit has {circuit.mode_count} modes")
    return complex(psi[basis.index(m)[0]])


@dataclass(frozen=True)
class FockAmplitudeTable:
    """Amplitudes ``<m|U|n>`` for every ``m`` in the cutoff box.

    ``amplitudes[m]`` is indexed by the output occupation tuple.
    """

    mode_count: int
    cutoff: int
    input: tuple
    amplitudes: np.ndarray
    captured_probability: float

    def __getitem__(self, m) -> complex:
        return complex(self.amplitudes[tuple(m)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def probability(self, m) -> float:
        return float(abs(self.amplitudes[tuple(m)]) ** 2)

    def nonzero(self, threshold: float = 0.0):
        """``(occupation, probability)`` pairs above ``threshold``, in index order."""
        P = self.probabilities()
        for idx in zip(*np.nonzero(P > threshold)):
            yield tuple(int(i) for i in idx), float(P[idx])


def box_amplitudes(basis: FockBasis, psi: np.ndarray, cutoff: int) -> np.ndarray:
    M = basis.mode_count
    out = np.zeros((cutoff + 1,) * M, dtype=complex)
    mask = (basis.occ <= cutoff).all(axis=1)
    out[tuple(basis.occ[mask].T)] = psi[mask]
    return out


def state_probabilities(circuit: OpticalCircuit, n: Sequence[int], cutoff: int, **kwargs) -> FockAmplitudeTable:
    """Output amplitudes over the whole cutoff box for input ``|n>``."""
    basis, psi = evolve(circuit, n, cutoff, **kwargs)
    amps = box_amplitudes(basis, psi, cutoff)
    amps.setflags(write=False)
    captured = float(np.sum(np.abs(amps) ** 2))
    return FockAmplitudeTable(circuit.mode_count, cutoff, tuple(int(v) for v in n), amps, captured)
