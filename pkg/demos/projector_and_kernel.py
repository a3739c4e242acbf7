"""A tour of the geometric building blocks.

The vertical rolling disk has configuration q = (x, y, phi, theta): planar
contact point, heading, and rolling angle.  Rolling without slipping ties the
contact-point velocity to the rolling rate, which is a linear velocity
constraint A(q) qdot = 0.  Everything else in the library is built on the
orthogonal projector onto ker A(q).
"""

import numpy as np

from nhgp import KernelHyperparams, VerticalRollingDisk, nonholonomic_kernel

disk = VerticalRollingDisk()
q = np.array([0.3, -0.1, 0.7, 2.1])

A = disk.constraint_matrix(q)
P = disk.projector(q)

print("constraint matrix A(q):")
print(A)
print()
print("projector P(q) onto ker A(q):")
print(np.round(P, 6))
print()

# The projector laws, numerically: symmetric, idempotent, annihilated by A.
print("||P - P^T||      =", np.max(np.abs(P - P.T)))
print("||P @ P - P||    =", np.max(np.abs(P @ P - P)))
print("||A @ P||        =", np.max(np.abs(A @ P)))
print()

# Projecting an arbitrary velocity makes it admissible -- and never longer.
v = np.array([1.0, -2.0, 0.5, 3.0])
pv = P @ v
print("raw velocity violation       ||A v|| =", np.linalg.norm(A @ v))
print("projected velocity violation ||A Pv|| =", np.linalg.norm(A @ pv))
print("norms: ||v|| = %.4f   ||Pv|| = %.4f" % (np.linalg.norm(v),
                                               np.linalg.norm(pv)))
print()

# The matrix-valued kernel sandwiches a scalar kernel between projectors, so
# every column of K(q, q') is itself an admissible velocity at q.
hp = KernelHyperparams(signal_variance=1.0, length_scales=(1.0, 1.0))
q2 = np.array([-0.5, 0.4, -0.3, 1.0])
K = nonholonomic_kernel(q, q2, hp, dims=(2, 3), system=disk)
print("matrix kernel K(q, q'):")
print(np.round(K, 6))
print("max column violation max_j ||A K[:, j]|| =",
      np.max(np.abs(A @ K)))
