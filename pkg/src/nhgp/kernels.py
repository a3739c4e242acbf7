"""Scalar and matrix-valued covariance kernels.

The scalar kernel is a squared-exponential with per-dimension length scales
acting on a subset of the configuration coordinates.  Two matrix-valued
kernels are built from it: the standard isotropic kernel ``k(q, q') I`` and
the constraint-preserving kernel ``P(q) k(q, q') P(q')``, whose sections take
values in the admissible velocity subspace at every configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidHyperparameterError, InvalidInputError


@dataclass(frozen=True)
class KernelHyperparams:
    """Hyperparameters of one squared-exponential scalar channel."""

    signal_variance: float
    length_scales: tuple[float, ...]
    noise_variance: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.signal_variance) or self.signal_variance <= 0:
            raise InvalidHyperparameterError("signal_variance must be positive")
        ls = np.asarray(self.length_scales, dtype=float)
        if ls.size == 0 or np.any(~np.isfinite(ls)) or np.any(ls <= 0):
            raise InvalidHyperparameterError("length scales must be positive")
        object.__setattr__(self, "length_scales", tuple(float(v) for v in ls))
        if not np.isfinite(self.noise_variance) or self.noise_variance < 0:
            raise InvalidHyperparameterError("noise_variance must be >= 0")


def check_active_dims(dims, n: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(set(dims)) != len(dims):
        raise InvalidInputError("active dims must be distinct")
    if any(d < 0 or d >= n for d in dims):
        raise InvalidInputError(f"active dims out of range for dimension {n}")
    return dims


def se_ard_kernel(q, q2, hp: KernelHyperparams, dims) -> float:
    """Squared-exponential kernel over the active coordinates of q and q2."""
    q = np.asarray(q, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    dims = check_active_dims(dims, q.shape[-1])
    if len(dims) != len(hp.length_scales):
        raise InvalidHyperparameterError(
            "need one length scale per active dimension"
        )
    d = (q[..., dims] - q2[..., dims]) / np.asarray(hp.length_scales)
    return float(hp.signal_variance * np.exp(-0.5 * np.sum(d * d)))


def se_ard_kernel_matrix(x, x2, hp: KernelHyperparams, dims) -> np.ndarray:
    """Cross-covariance matrix of the scalar kernel, shape (len(x), len(x2))."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    x2 = np.atleast_2d(np.asarray(x2, dtype=float))
    dims = check_active_dims(dims, x.shape[1])
    if len(dims) != len(hp.length_scales):
        raise InvalidHyperparameterError(
            "need one length scale per active dimension"
        )
    ls = np.asarray(hp.length_scales)
    a = x[:, dims] / ls
    b = x2[:, dims] / ls
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * a @ b.T
    )
    return hp.signal_variance * np.exp(-0.5 * np.maximum(sq, 0.0))


def standard_matrix_kernel(q, q2, hp: KernelHyperparams, dims, n: int) -> np.ndarray:
    """Isotropic matrix kernel ``k(q, q2) * I_n``."""
    return se_ard_kernel(q, q2, hp, dims) * np.eye(n)


def nonholonomic_kernel(q, q2, hp: KernelHyperparams, dims, system) -> np.ndarray:
    """Constraint-preserving matrix kernel ``P(q) k(q, q2) P(q2)``.

    Every column of the result lies in ``ker A(q)`` and every row in
    ``ker A(q2)`` (as a row space), so GP predictors built from it satisfy
    the velocity constraints identically.
    """
    p1 = system.projector(q)
    p2 = system.projector(q2)
    return se_ard_kernel(q, q2, hp, dims) * (p1 @ p2)


def make_standard_kernel(hp: KernelHyperparams, dims, n: int):
    """Closure over hyperparameters for the isotropic matrix kernel."""

    def kernel(q, q2):
        return standard_matrix_kernel(q, q2, hp, dims, n)

    return kernel


def make_nonholonomic_kernel(hp: KernelHyperparams, dims, system):
    """Closure over hyperparameters and system for the projected kernel."""

    def kernel(q, q2):
        return nonholonomic_kernel(q, q2, hp, dims, system)

    return kernel


def gram_matrix(points, kernel, n: int) -> np.ndarray:
    """Block Gram matrix of a matrix-valued kernel, shape (N*n, N*n)."""
    points = [np.asarray(q, dtype=float) for q in points]
    big_n = len(points)
    if big_n == 0:
        raise InvalidInputError("need at least one point")
    gram = np.empty((big_n * n, big_n * n))
    for i in range(big_n):
        for j in range(i, big_n):
            block = kernel(points[i], points[j])
            gram[i * n:(i + 1) * n, j * n:(j + 1) * n] = block
            if j > i:
                gram[j * n:(j + 1) * n, i * n:(i + 1) * n] = block.T
    return gram
