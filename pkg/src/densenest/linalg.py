"""Small dense-matrix utilities defining the constrained weight-prior support.

Square matrices only: the symmetric/skew-symmetric decomposition, a strict
positive-definiteness test, and the sign convention fixing the orientation
of the skew part.
"""

import math

import numpy as np

SYMMETRY_TOL = 1e-12


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def sym_skew_split(w):
    """Split a square matrix into its symmetric and skew-symmetric parts.

    Returns ``(s, a)`` with ``s = (w + w.T)/2`` and ``a = (w - w.T)/2``;
    their sum reproduces ``w`` up to round-off.
    """
    w = _as_square(w)
    s = (w + w.T) / 2.0
    a = (w - w.T) / 2.0
    return s, a


def is_positive_definite(s) -> bool:
    """Strict positive-definiteness via a pivot-free factorisation.

    Attempts the lower-triangular factorisation ``s = L L^T`` without any row
    exchanges and succeeds only if every pivot is strictly positive, so
    singular matrices (zero eigenvalue) return False.

    Raises ``ValueError`` when ``s`` is not symmetric to 1e-12.
    """
    s = _as_square(s)
    if np.max(np.abs(s - s.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    # plain-float loops: the matrices here are tiny and this sits on the
    # sampler's rejection hot path
    m = s.tolist()
    n = len(m)
    low = [[0.0] * n for _ in range(n)]
    for j in range(n):
        acc = 0.0
        for k in range(j):
            acc += low[j][k] * low[j][k]
        pivot = m[j][j] - acc
        if pivot <= 0.0:
            return False
        ljj = math.sqrt(pivot)
        low[j][j] = ljj
        for i in range(j + 1, n):
            acc = 0.0
            for k in range(j):
                acc += low[i][k] * low[j][k]
            low[i][j] = (m[i][j] - acc) / ljj
    return True


def is_consistently_oriented(a) -> bool:
    """True when every strictly upper-triangular entry of ``a`` is >= 0.

    This is the adopted normal-ordering sign convention for the skew part of
    a weight matrix; the zero matrix is accepted as a boundary case.

    Raises ``ValueError`` when ``a`` is not skew-symmetric to 1e-12.
    """
    a = _as_square(a)
    if np.max(np.abs(a + a.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("matrix is not skew-symmetric")
    m = a.tolist()
    n = len(m)
    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] < 0.0:
                return False
    return True
