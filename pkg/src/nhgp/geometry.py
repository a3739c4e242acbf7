"""Linear algebra for velocity-constraint distributions.

A configuration-dependent constraint matrix ``A`` (shape ``(k, n)``, full row
rank) defines the subspace of admissible velocities ``ker A``.  This module
computes the orthogonal projector onto that subspace, either from ``A``
directly or from a basis ``B`` of the subspace, together with the
pseudoinverse maps used to move between ambient and adapted coordinates.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateConstraintError, InvalidInputError


def _default_rcond(m: np.ndarray) -> float:
    return float(np.finfo(float).eps * max(m.shape))


def pseudoinverse(m, rcond: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below ``rcond * sigma_max`` are treated as zero.
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    if m.size == 0:
        return np.zeros(m.shape[::-1])
    if rcond is None:
        rcond = _default_rcond(m)
    return np.linalg.pinv(m, rcond=rcond)


def _check_full_rank(m: np.ndarray, rank: int, rcond: float, what: str) -> None:
    s = np.linalg.svd(m, compute_uv=False)
    if len(s) < rank or s[0] == 0.0 or s[rank - 1] / s[0] < rcond:
        raise DegenerateConstraintError(f"{what} is rank deficient")


def projector_from_constraints(a, rcond: float | None = None) -> np.ndarray:
    """Orthogonal projector ``P = I - pinv(A) A`` onto ``ker A``.

    ``a`` has shape ``(k, n)``; ``k = 0`` yields the identity.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InvalidInputError("constraint matrix must be 2-D")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("constraint matrix has non-finite entries")
    k, n = a.shape
    if k == 0:
        return np.eye(n)
    if rcond is None:
        rcond = _default_rcond(a)
    _check_full_rank(a, k, rcond, "constraint matrix")
    p = np.eye(n) - pseudoinverse(a, rcond=rcond) @ a
    return 0.5 * (p + p.T)


def projector_from_basis(b, rcond: float | None = None) -> np.ndarray:
    """Orthogonal projector ``P = B (B^T B)^{-1} B^T`` onto ``Im B``."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2:
        raise InvalidInputError("basis matrix must be 2-D")
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("basis matrix has non-finite entries")
    if rcond is None:
        rcond = _default_rcond(b)
    _check_full_rank(b, b.shape[1], rcond, "basis matrix")
    p = b @ np.linalg.solve(b.T @ b, b.T)
    return 0.5 * (p + p.T)


def adapted_pseudoinverse(b, rcond: float | None = None) -> np.ndarray:
    """Left inverse ``(B^T B)^{-1} B^T`` mapping ambient vectors to adapted
    coordinates; satisfies ``B_dagger B = I`` and ``B B_dagger = P``."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2:
        raise InvalidInputError("basis matrix must be 2-D")
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("basis matrix has non-finite entries")
    if rcond is None:
        rcond = _default_rcond(b)
    _check_full_rank(b, b.shape[1], rcond, "basis matrix")
    return np.linalg.solve(b.T @ b, b.T)
