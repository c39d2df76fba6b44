"""Independent reference implementations used only by the tests.

Everything here is deliberately naive: dense tensor-product Fock spaces,
matrix exponentials of truncated generators, and permutation sums.
"""

import itertools
import math
from functools import reduce

import numpy as np
from scipy.linalg import expm, logm

from vibronic.gaussian import Displacement, Rotation, Squeeze, TwoModeSqueeze


def annihilation(c):
    return np.diag(np.sqrt(np.arange(1, c + 1)), 1).astype(complex)


def mode_operators(M, c):
    a = annihilation(c)
    eye = np.eye(c + 1)
    return [reduce(np.kron, [a if j == k else eye for j in range(M)]) for k in range(M)]


def generator(op, M, c):
    """Anti-Hermitian ``G`` with ``exp(G)`` the truncated primitive."""
    a = mode_operators(M, c)
    ad = [x.conj().T for x in a]
    G = np.zeros(a[0].shape, dtype=complex)
    if isinstance(op, Squeeze):
        for k, lam in enumerate(op.lam):
            G += lam / 2 * (ad[k] @ ad[k] - a[k] @ a[k])
    elif isinstance(op, Displacement):
        for k, alpha in enumerate(op.alpha):
            G += alpha * ad[k] - np.conj(alpha) * a[k]
    elif isinstance(op, Rotation):
        H = logm(np.asarray(op.U).conj())
        for k in range(M):
            for l in range(M):
                G += H[k, l] * ad[k] @ a[l]
    elif isinstance(op, TwoModeSqueeze):
        P = M // 2
        for k, th in enumerate(op.theta):
            G += th / 2 * (ad[k] @ ad[P + k] - a[k] @ a[P + k])
    else:
        raise TypeError(op)
    return G


def dense_unitary(circuit, c):
    """Product of truncated exponentials, ``ops[0]`` rightmost."""
    M = circuit.mode_count
    U = np.eye((c + 1) ** M, dtype=complex)
    for op in circuit.ops:
        U = expm(generator(op, M, c)) @ U
    return U


def flat_index(occ, c):
    idx = 0
    for v in occ:
        idx = idx * (c + 1) + v
    return idx


def dense_amplitude(U, m, n, c):
    return U[flat_index(m, c), flat_index(n, c)]


def naive_permanent(A):
    """Sum over all permutations, vectorized over the permutation list."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 1.0 + 0j
    perms = np.array(list(itertools.permutations(range(n))))
    return complex(np.sum(np.prod(A[np.arange(n), perms], axis=1)))


def poisson(mean, k):
    return math.exp(-mean) * mean ** k / math.factorial(k)


def geometric(nbar, k):
    return nbar ** k / (nbar + 1) ** (k + 1)


def squeezed_vacuum_probability(lam, k):
    """``|<k|S(lam)|0>|^2`` from the closed form (zero for odd ``k``)."""
    if k % 2:
        return 0.0
    j = k // 2
    return math.tanh(lam) ** (2 * j) * math.factorial(2 * j) / (4 ** j * math.factorial(j) ** 2) / math.cosh(lam)


def match_phase(a, b):
    """``b`` rotated by the global phase that best aligns it with ``a``."""
    overlap = np.vdot(b, a)
    if abs(overlap) == 0:
        return b
    return b * overlap / abs(overlap)
