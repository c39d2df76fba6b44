"""Gaussian unitaries as affine Bogoliubov transforms.

A Gaussian unitary ``U`` is stored through its action on the column vector of
creation operators::

    U^dagger a^dagger U = X a + Y a^dagger + z

with ``YY^dagger - XX^dagger = I`` and ``XY^T = YX^T``.  Optical circuits list
their operations in application order: ``ops[0]`` acts on the ket first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import ConstraintError, DecompositionError, SolveError, ValidationError

DEFAULT_TOL = 1e-9


def _frozen(a, dtype=complex, ndim=None, name="array"):
    arr = np.array(a, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        if ndim == 1 and arr.ndim == 0:
            arr = arr.reshape(1)
        else:
            raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def unitarity_residual(U: np.ndarray) -> float:
    U = np.asarray(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))


@dataclass(frozen=True)
class BogoliubovTransform:
    """Affine action ``(X, Y, z)`` of a Gaussian unitary on creation operators."""

    X: np.ndarray
    Y: np.ndarray
    z: np.ndarray = None

    def __post_init__(self):
        X = _frozen(self.X, ndim=2, name="X")
        Y = _frozen(self.Y, ndim=2, name="Y")
        M = X.shape[0]
        if M == 0:
            raise ValidationError("mode count must be positive")
        if X.shape != (M, M) or Y.shape != (M, M):
            raise ValidationError(f"X and Y must be square and equal in shape, got {X.shape}, {Y.shape}")
        z = np.zeros(M) if self.z is None else self.z
        z = _frozen(z, ndim=1, name="z")
        if z.shape != (M,):
            raise ValidationError(f"z must have length {M}, got {z.shape}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "z", z)

    @property
    def mode_count(self) -> int:
        return self.X.shape[0]

    @classmethod
    def identity(cls, mode_count: int) -> "BogoliubovTransform":
        return cls(np.zeros((mode_count, mode_count)), np.eye(mode_count), np.zeros(mode_count))

    def embed(self, mode_count: int) -> "BogoliubovTransform":
        """Extend to ``mode_count`` modes, acting trivially on the trailing ones."""
        M = self.mode_count
        if mode_count < M:
            raise ValidationError(f"cannot embed {M} modes into {mode_count}")
        X = np.zeros((mode_count, mode_count), dtype=complex)
        Y = np.eye(mode_count, dtype=complex)
        z = np.zeros(mode_count, dtype=complex)
        X[:M, :M] = self.X
        Y[:M, :M] = self.Y
        z[:M] = self.z
        return BogoliubovTransform(X, Y, z)

    def allclose(self, other: "BogoliubovTransform", atol: float = DEFAULT_TOL) -> bool:
        return (
            self.mode_count == other.mode_count
            and max_entry_difference(self, other) < atol
        )


def max_entry_difference(a: BogoliubovTransform, b: BogoliubovTransform) -> float:
    return float(
        max(
            np.max(np.abs(a.X - b.X)),
            np.max(np.abs(a.Y - b.Y)),
            np.max(np.abs(a.z - b.z)),
        )
    )


# --- primitive operations -------------------------------------------------


@dataclass(frozen=True)
class Rotation:
    """Passive linear interferometer with ``R^dagger a^dagger R = U a^dagger``."""

    U: np.ndarray

    def __post_init__(self):
        U = _frozen(self.U, ndim=2, name="U")
        if U.shape[0] == 0 or U.shape[0] != U.shape[1]:
            raise ValidationError(f"rotation matrix must be square and nonempty, got {U.shape}")
        object.__setattr__(self, "U", U)

    @property
    def mode_count(self) -> int:
        return self.U.shape[0]


@dataclass(frozen=True)
class Displacement:
    """``D_alpha = exp(alpha^T a^dagger - alpha^dagger a)``; stores the operator subscript."""

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen(self.alpha, ndim=1, name="alpha"))
        if self.alpha.size == 0:
            raise ValidationError("displacement needs at least one mode")

    @property
    def mode_count(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class Squeeze:
    """Single-mode squeezers ``exp((a^dagger L a^dagger - a L a)/2)`` with ``L = diag(lam)``."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam)
        if np.iscomplexobj(lam):
            if np.max(np.abs(lam.imag), initial=0.0) > 0:
                raise ValidationError("squeezing parameters must be real")
            lam = lam.real
        object.__setattr__(self, "lam", _frozen(lam, dtype=float, ndim=1, name="lam"))
        if self.lam.size == 0:
            raise ValidationError("squeeze needs at least one mode")

    @property
    def mode_count(self) -> int:
        return self.lam.shape[0]


@dataclass(frozen=True)
class TwoModeSqueeze:
    """``prod_k exp(theta_k (a_k^dagger b_k^dagger - a_k b_k)/2)`` on pairs ``(k, M + k)``."""

    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen(self.theta, dtype=float, ndim=1, name="theta"))
        if self.theta.size == 0:
            raise ValidationError("two-mode squeeze needs at least one pair")

    @property
    def mode_count(self) -> int:
        return 2 * self.theta.shape[0]


PrimitiveOp = Union[Rotation, Displacement, Squeeze, TwoModeSqueeze]


@dataclass(frozen=True)
class OpticalCircuit:
    """Ordered primitive operations; ``ops[0]`` is applied to the state first."""

    mode_count: int
    ops: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(self.ops)
        if self.mode_count < 1:
            raise ValidationError("mode count must be positive")
        for op in ops:
            if op.mode_count != self.mode_count:
                raise ValidationError(
                    f"{type(op).__name__} acts on {op.mode_count} modes, circuit has {self.mode_count}"
                )
        object.__setattr__(self, "ops", ops)

    def then(self, *ops: PrimitiveOp) -> "OpticalCircuit":
        return OpticalCircuit(self.mode_count, self.ops + tuple(ops))

    def __len__(self):
        return len(self.ops)


def primitive_transform(op: PrimitiveOp, tol: float = DEFAULT_TOL) -> BogoliubovTransform:
    """Bogoliubov transform of a single primitive operation."""
    M = op.mode_count
    zeros = np.zeros((M, M))
    if isinstance(op, Rotation):
        res = unitarity_residual(op.U)
        if res > tol:
            raise ValidationError(f"rotation matrix is not unitary (residual {res:.3e})")
        return BogoliubovTransform(zeros, op.U, np.zeros(M))
    if isinstance(op, Displacement):
        return BogoliubovTransform(zeros, np.eye(M), np.conj(op.alpha))
    if isinstance(op, Squeeze):
        return BogoliubovTransform(np.diag(np.sinh(op.lam)), np.diag(np.cosh(op.lam)), np.zeros(M))
    if isinstance(op, TwoModeSqueeze):
        half = op.theta / 2
        sh = np.diag(np.sinh(half))
        ch = np.diag(np.cosh(half))
        X = np.block([[np.zeros_like(sh), sh], [sh, np.zeros_like(sh)]])
        Y = np.block([[ch, np.zeros_like(ch)], [np.zeros_like(ch), ch]])
        return BogoliubovTransform(X, Y, np.zeros(M))
    raise ValidationError(f"unknown primitive {op!r}")


def compose(first: BogoliubovTransform, then: BogoliubovTransform) -> BogoliubovTransform:
    """Transform of ``U_then @ U_first`` (``first`` acts on the ket first)."""
    if first.mode_count != then.mode_count:
        raise ValidationError(f"mode-count mismatch: {first.mode_count} vs {then.mode_count}")
    Xf, Yf, zf = first.X, first.Y, first.z
    Xt, Yt, zt = then.X, then.Y, then.z
    X = Xt @ Yf.conj() + Yt @ Xf
    Y = Xt @ Xf.conj() + Yt @ Yf
    z = Xt @ zf.conj() + Yt @ zf + zt
    return BogoliubovTransform(X, Y, z)


def circuit_transform(circuit: OpticalCircuit, tol: float = DEFAULT_TOL) -> BogoliubovTransform:
    """Compose every operation of ``circuit`` in application order."""
    T = BogoliubovTransform.identity(circuit.mode_count)
    for op in circuit.ops:
        T = compose(T, primitive_transform(op, tol))
    return T


class Residuals(NamedTuple):
    symplectic: float  # ||YY^dagger - XX^dagger - I||_F
    symmetric: float  # ||XY^T - YX^T||_F


def validate(T: BogoliubovTransform) -> Residuals:
    M = T.mode_count
    X, Y = T.X, T.Y
    r1 = np.linalg.norm(Y @ Y.conj().T - X @ X.conj().T - np.eye(M))
    r2 = np.linalg.norm(X @ Y.T - Y @ X.T)
    return Residuals(float(r1), float(r2))


def check(T: BogoliubovTransform, tol: float = DEFAULT_TOL) -> Residuals:
    """Like :func:`validate` but raises :class:`ConstraintError` beyond ``tol``."""
    res = validate(T)
    if res.symplectic > tol or res.symmetric > tol:
        raise ConstraintError(
            f"Bogoliubov constraints violated: symplectic {res.symplectic:.3e}, "
            f"symmetric {res.symmetric:.3e} (tol {tol:.1e})",
            residuals=res,
        )
    return res


# --- Bloch-Messiah synthesis ------------------------------------------------


@dataclass(frozen=True)
class BlochMessiahFactors:
    """``X = U_L sinh(S) U_R^T``, ``Y = U_L cosh(S) U_R^dagger``; ``sigma`` descending."""

    U_L: np.ndarray
    sigma: np.ndarray
    U_R: np.ndarray
    z: np.ndarray

    def reconstruct(self) -> BogoliubovTransform:
        sh = np.diag(np.sinh(self.sigma))
        ch = np.diag(np.cosh(self.sigma))
        return BogoliubovTransform(
            self.U_L @ sh @ self.U_R.T, self.U_L @ ch @ self.U_R.conj().T, self.z
        )


def takagi(A: np.ndarray):
    """Takagi factorization ``A = U diag(d) U^T`` of a complex symmetric matrix.

    Singular values come back in descending order.  Degenerate singular values
    are handled by taking the principal square root of the (block-diagonal,
    symmetric) unitary that relates the left and right singular vectors.
    """
    from scipy.linalg import sqrtm

    A = np.asarray(A, dtype=complex)
    u, d, vh = np.linalg.svd(A)
    W = vh @ u.conj()
    W = (W + W.T) / 2
    Q = sqrtm(W)
    return u @ Q, d


def _canonical_basis(V: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(V), aligned with coordinate axes where possible."""
    M, k = V.shape
    P = V @ V.conj().T
    chosen, basis = [], []
    for _ in range(k):
        best, best_vec, best_norm = None, None, -1.0
        for j in range(M):
            if j in chosen:
                continue
            v = P[:, j].copy()
            for b in basis:
                v -= b * (b.conj() @ v)
            nv = np.linalg.norm(v)
            if nv > best_norm + 1e-12:
                best, best_vec, best_norm = j, v, nv
        v = best_vec / best_norm
        v *= np.exp(-1j * np.angle(v[best]))
        chosen.append(best)
        basis.append(v)
    order = np.argsort(chosen)
    return np.stack([basis[i] for i in order], axis=1)


def bloch_messiah(
    T: BogoliubovTransform, tol: float = DEFAULT_TOL, zero_tol: float = 1e-10
) -> BlochMessiahFactors:
    """Factor ``T`` into interferometer, single-mode squeezers, interferometer.

    ``Y^{-1} X = U_R tanh(S) U_R^T`` is Takagi-factorized and ``U_L`` follows from
    ``Y U_R cosh(S)^{-1}``.  Zero-squeezing subspaces are put in a canonical
    gauge so that a pure rotation gives ``U_R = I``.
    """
    check(T, tol)
    X, Y = T.X, T.Y
    A = np.linalg.solve(Y, X)
    U_R, _ = takagi((A + A.T) / 2)
    # sinh is well conditioned at every squeezing strength, unlike tanh or cosh
    sigma = np.arcsinh(np.linalg.norm(X @ U_R.conj(), axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma, U_R = sigma[order], U_R[:, order]
    U_L = (Y @ U_R) / np.cosh(sigma)

    zero = sigma <= zero_tol
    if np.any(zero):
        sigma = np.where(zero, 0.0, sigma)
        Vz = U_R[:, zero]
        Wz = _canonical_basis(Vz)
        Q = Vz.conj().T @ Wz
        U_R[:, zero] = Wz
        U_L[:, zero] = U_L[:, zero] @ Q

    factors = BlochMessiahFactors(U_L, sigma, U_R, T.z)
    rec = factors.reconstruct()
    err = max(
        np.linalg.norm(rec.X - X),
        np.linalg.norm(rec.Y - Y),
        unitarity_residual(U_L),
        unitarity_residual(U_R),
    )
    if err > tol:
        raise DecompositionError(f"Bloch-Messiah reconstruction error {err:.3e} exceeds {tol:.1e}")
    return factors


def synthesize_circuit(T: BogoliubovTransform, tol: float = DEFAULT_TOL) -> OpticalCircuit:
    """Circuit ``[R(U_R^dagger), S(sigma), R(U_L), D(z*)]`` realizing ``T``."""
    f = bloch_messiah(T, tol)
    return OpticalCircuit(
        T.mode_count,
        (
            Rotation(f.U_R.conj().T),
            Squeeze(f.sigma),
            Rotation(f.U_L),
            Displacement(np.conj(f.z)),
        ),
    )


def reorder_displacement(X, Y, gamma, tol: float = DEFAULT_TOL, rel_residual: float = 1e-8):
    """Displacement ``gamma'`` with ``D_{gamma*} W = W D_{gamma'}`` for the linear part ``W``.

    Solves ``gamma = X gamma' + Y conj(gamma')`` written as a real block system
    in the real and imaginary parts.
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    check(BogoliubovTransform(X, Y, gamma), tol)
    XR, XI, YR, YI = X.real, X.imag, Y.real, Y.imag
    A = np.block([[XR + YR, -XI + YI], [XI + YI, XR - YR]])
    b = np.concatenate([gamma.real, gamma.imag])
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond):
        raise SolveError("displacement reordering system is singular", condition=cond)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ x - b))
    if residual > rel_residual * max(np.linalg.norm(b), np.finfo(float).tiny):
        raise SolveError(
            f"displacement reordering residual {residual:.3e} (condition {cond:.3e})",
            condition=cond,
            residual=residual,
        )
    M = X.shape[0]
    return x[:M] + 1j * x[M:]


# --- moments ---------------------------------------------------------------


@dataclass(frozen=True)
class GaussianState:
    """First and symmetrized second moments in the ``(a, a^dagger)`` basis.

    ``covariance[i, j] = <{d_i, d_j^dagger}>/2`` with ``d = xi - <xi>`` and
    ``xi = (a_1..a_M, a_1^dagger..a_M^dagger)``; vacuum is ``I/2``.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean, ndim=1, name="mean")
        cov = _frozen(self.covariance, ndim=2, name="covariance")
        if cov.shape != (2 * mean.size, 2 * mean.size):
            raise ValidationError(f"covariance shape {cov.shape} does not match {mean.size} modes")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def mode_count(self) -> int:
        return self.mean.size

    def photon_numbers(self) -> np.ndarray:
        M = self.mode_count
        diag = np.real(np.diag(self.covariance)[:M])
        return diag - 0.5 + np.abs(self.mean) ** 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        M = self.mode_count
        K = np.diag(np.concatenate([np.ones(M), -np.ones(M)]))
        ev = np.linalg.eigvals(K @ self.covariance)
        return np.sort(np.abs(ev.real))[::2]

    def is_physical(self, tol: float = DEFAULT_TOL) -> bool:
        M = self.mode_count
        K = np.diag(np.concatenate([np.ones(M), -np.ones(M)]))
        cov = self.covariance
        if np.linalg.norm(cov - cov.conj().T) > tol:
            return False
        return bool(np.min(np.linalg.eigvalsh(cov + K / 2)) > -tol)

    def is_pure(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.symplectic_eigenvalues() - 0.5)) < tol)


def vacuum_state(mode_count: int) -> GaussianState:
    return GaussianState(np.zeros(mode_count), np.eye(2 * mode_count) / 2)


def thermal_state(nbar: Sequence[float]) -> GaussianState:
    nbar = np.asarray(nbar, dtype=float)
    return GaussianState(np.zeros(nbar.size), np.diag(np.concatenate([nbar, nbar]) + 0.5))


def apply_to_vacuum(T: BogoliubovTransform, tol: float = DEFAULT_TOL) -> GaussianState:
    """Moments of ``U|0>`` computed from ``(X, Y, z)``."""
    check(T, tol)
    X, Y = T.X, T.Y
    A = np.block([[Y.conj(), X.conj()], [X, Y]])
    return GaussianState(T.z.conj(), A @ A.conj().T / 2)


def reduce_modes(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Partial trace onto the modes listed in ``keep`` (order preserved)."""
    keep = [int(k) for k in keep]
    M = state.mode_count
    if not keep:
        raise ValidationError("keep must be nonempty")
    bad = [k for k in keep if not 0 <= k < M]
    if bad:
        raise ValidationError(f"mode indices {bad} out of range for {M} modes")
    idx = keep + [M + k for k in keep]
    return GaussianState(state.mean[keep], state.covariance[np.ix_(idx, idx)])
