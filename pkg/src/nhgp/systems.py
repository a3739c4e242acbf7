"""Concrete constrained mechanical systems.

Each system exposes the constraint matrix ``A(q)``, a basis ``B(q)`` of the
admissible velocity subspace, and true/nominal vector fields both in ambient
coordinates and as adapted velocities (coefficients with respect to ``B``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import InvalidInputError


class ConstraintSystem:
    """Interface for a system with linear velocity constraints ``A(q) qdot = 0``."""

    name = "abstract"
    n = 0
    k = 0
    # coordinates that receive state noise during data generation and that
    # the scalar kernel acts on by default
    angular_indices: tuple[int, ...] = ()

    def constraint_matrix(self, q) -> np.ndarray:
        raise NotImplementedError

    def basis(self, q) -> np.ndarray:
        raise NotImplementedError

    def nominal_velocity(self, q) -> np.ndarray:
        raise NotImplementedError

    def perturbation(self, q) -> np.ndarray:
        raise NotImplementedError

    def projector(self, q) -> np.ndarray:
        return geometry.projector_from_constraints(self.constraint_matrix(q))

    def adapted_pseudoinverse(self, q) -> np.ndarray:
        return geometry.adapted_pseudoinverse(self.basis(q))

    def true_velocity(self, q) -> np.ndarray:
        return self.nominal_velocity(q) + self.perturbation(q)

    def nominal_field(self, q) -> np.ndarray:
        return self.basis(q) @ self.nominal_velocity(q)

    def true_field(self, q) -> np.ndarray:
        return self.basis(q) @ self.true_velocity(q)

    def params_dict(self) -> dict:
        return {}


@dataclass(frozen=True)
class DiskParams:
    """Vertical rolling disk parameters (defaults are the benchmark values)."""

    radius: float = 1.0
    Omega: float = 1.0
    omega: float = 0.35
    epsilon: float = 0.18

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")


class VerticalRollingDisk(ConstraintSystem):
    """Disk of radius R rolling upright without slipping.

    Configuration ``q = (x, y, phi, theta)``: contact point, heading angle,
    rolling angle.  Rolling imposes ``xdot = R cos(phi) thetadot`` and
    ``ydot = R sin(phi) thetadot``.
    """

    name = "vertical_rolling_disk"
    n = 4
    k = 2
    angular_indices = (2, 3)

    def __init__(self, params: DiskParams | None = None):
        self.params = params or DiskParams()

    def constraint_matrix(self, q):
        r = self.params.radius
        phi = q[2]
        return np.array([
            [1.0, 0.0, 0.0, -r * np.cos(phi)],
            [0.0, 1.0, 0.0, -r * np.sin(phi)],
        ])

    def basis(self, q):
        r = self.params.radius
        phi = q[2]
        return np.array([
            [r * np.cos(phi), 0.0],
            [r * np.sin(phi), 0.0],
            [0.0, 1.0],
            [1.0, 0.0],
        ])

    def nominal_velocity(self, q):
        phi, theta = q[2], q[3]
        p = self.params
        return np.array([
            p.Omega + 0.10 * np.sin(phi) + 0.06 * np.cos(theta),
            p.omega + 0.08 * np.cos(phi) - 0.05 * np.sin(theta),
        ])

    def perturbation(self, q):
        phi, theta = q[2], q[3]
        eps = self.params.epsilon
        return eps * np.array([
            0.60 * np.sin(phi - theta) + 0.25 * np.cos(2.0 * theta),
            0.50 * np.cos(phi + theta) - 0.20 * np.sin(2.0 * phi),
        ])

    def explicit_projector(self, q):
        """Closed-form projector for R = 1, used to cross-check the
        pseudoinverse route."""
        phi = q[2]
        c, s = np.cos(phi), np.sin(phi)
        return np.array([
            [c * c / 2, s * c / 2, 0.0, c / 2],
            [s * c / 2, s * s / 2, 0.0, s / 2],
            [0.0, 0.0, 1.0, 0.0],
            [c / 2, s / 2, 0.0, 0.5],
        ])

    def params_dict(self):
        p = self.params
        return {
            "radius": p.radius,
            "Omega": p.Omega,
            "omega": p.omega,
            "epsilon": p.epsilon,
        }


class FreeParticle(ConstraintSystem):
    """Unconstrained system (k = 0, projector = identity).

    Exists for degenerate-case coverage: with no constraints the projected
    kernel coincides with the standard isotropic kernel.
    """

    name = "free_particle"
    k = 0

    def __init__(self, n: int = 2, drift: float = 0.5):
        self.n = n
        self.drift = drift
        self.angular_indices = tuple(range(n))

    def constraint_matrix(self, q):
        return np.zeros((0, self.n))

    def basis(self, q):
        return np.eye(self.n)

    def nominal_velocity(self, q):
        q = np.asarray(q, dtype=float)
        return self.drift * np.cos(q)

    def perturbation(self, q):
        return np.zeros(self.n)

    def params_dict(self):
        return {"n": self.n, "drift": self.drift}


_SYSTEMS = {
    "vertical_rolling_disk": lambda params: VerticalRollingDisk(
        DiskParams(**params)
    ),
    "free_particle": lambda params: FreeParticle(**params),
}


def make_system(name: str, params: dict | None = None) -> ConstraintSystem:
    """Instantiate a system by name; params override the defaults."""
    if name not in _SYSTEMS:
        options = ", ".join(sorted(_SYSTEMS))
        raise InvalidInputError(f"unknown system '{name}' (options: {options})")
    return _SYSTEMS[name](params or {})
