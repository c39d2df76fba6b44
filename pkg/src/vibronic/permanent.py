"""Matrix permanent via Ryser's inclusion-exclusion formula."""

import numpy as np

from .errors import ValidationError


def permanent(A) -> complex:
    """Permanent of a square matrix in O(2^n n) operations.

    Subsets are visited in Gray-code order so each step adds or removes a
    single column from the running row sums.  The empty matrix has permanent 1.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"permanent needs a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(A[0, 0])
    cols = np.asarray(A, dtype=complex).T.copy()
    rowsums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            rowsums += cols[j]
        else:
            rowsums -= cols[j]
        term = np.prod(rowsums)
        total += -term if bin(gray).count("1") & 1 else term
    return complex(-total if n & 1 else total)
