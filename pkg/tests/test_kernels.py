import numpy as np
import pytest

from nhgp import (
    InvalidHyperparameterError,
    InvalidInputError,
    KernelHyperparams,
    gram_matrix,
    make_nonholonomic_kernel,
    make_standard_kernel,
    nonholonomic_kernel,
    se_ard_kernel,
    se_ard_kernel_matrix,
    standard_matrix_kernel,
)
from nhgp.regression import nonholonomic_gram
from conftest import random_disk_configs

HP = KernelHyperparams(signal_variance=1.0, length_scales=(1.0, 1.0))
DIMS = (2, 3)


class TestScalarKernel:
    def test_zero_distance(self):
        q = np.array([0.3, -0.1, 0.7, 1.2])
        assert se_ard_kernel(q, q, HP, DIMS) == pytest.approx(1.0)

    def test_analytic_value(self):
        hp = KernelHyperparams(1.0, (1.0,))
        q = np.array([0.0])
        q2 = np.array([np.sqrt(2.0)])
        assert se_ard_kernel(q, q2, hp, (0,)) == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_symmetric(self, rng):
        q, q2 = rng.standard_normal((2, 4))
        assert se_ard_kernel(q, q2, HP, DIMS) == pytest.approx(
            se_ard_kernel(q2, q, HP, DIMS)
        )

    def test_monotone_decay(self):
        hp = KernelHyperparams(2.0, (0.7,))
        vals = [
            se_ard_kernel(np.array([0.0]), np.array([d]), hp, (0,))
            for d in np.linspace(0.0, 6.0, 40)
        ]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-8

    def test_bad_hyperparams_rejected(self):
        with pytest.raises(InvalidHyperparameterError):
            KernelHyperparams(1.0, (0.0,))
        with pytest.raises(InvalidHyperparameterError):
            KernelHyperparams(-1.0, (1.0,))
        with pytest.raises(InvalidHyperparameterError):
            KernelHyperparams(1.0, (1.0,), noise_variance=-0.1)

    def test_matrix_form_matches_pointwise(self, rng):
        x = rng.standard_normal((6, 4))
        k = se_ard_kernel_matrix(x, x, HP, DIMS)
        for i in range(6):
            for j in range(6):
                assert k[i, j] == pytest.approx(
                    se_ard_kernel(x[i], x[j], HP, DIMS), abs=1e-12
                )


class TestStandardMatrixKernel:
    def test_identity_at_zero_distance(self):
        q = np.zeros(4)
        assert np.allclose(standard_matrix_kernel(q, q, HP, DIMS, 4), np.eye(4))

    def test_diagonal_structure(self, rng):
        q, q2 = rng.standard_normal((2, 4))
        k = standard_matrix_kernel(q, q2, HP, DIMS, 4)
        assert np.allclose(k - np.diag(np.diag(k)), 0.0)
        assert np.allclose(np.diag(k), se_ard_kernel(q, q2, HP, DIMS))


class TestNonholonomicKernel:
    def test_equals_projector_at_zero_distance(self, disk, rng):
        for q in random_disk_configs(rng, 10):
            k = nonholonomic_kernel(q, q, HP, DIMS, disk)
            assert np.allclose(k, disk.projector(q), atol=1e-10)

    def test_disk_explicit_projector_at_origin(self, disk):
        q = np.zeros(4)
        expected = np.array([
            [0.5, 0.0, 0.0, 0.5],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.5, 0.0, 0.0, 0.5],
        ])
        assert np.allclose(nonholonomic_kernel(q, q, HP, DIMS, disk), expected,
                           atol=1e-12)

    def test_transpose_symmetry(self, disk, rng):
        for _ in range(20):
            q, q2 = random_disk_configs(rng, 2)
            k12 = nonholonomic_kernel(q, q2, HP, DIMS, disk)
            k21 = nonholonomic_kernel(q2, q, HP, DIMS, disk)
            assert np.allclose(k12, k21.T, atol=1e-12)

    def test_sections_are_admissible(self, disk, rng):
        for _ in range(20):
            q, q2 = random_disk_configs(rng, 2)
            k = nonholonomic_kernel(q, q2, HP, DIMS, disk)
            assert np.max(np.abs(disk.constraint_matrix(q) @ k)) <= 1e-10
            assert np.max(np.abs(k @ disk.constraint_matrix(q2).T)) <= 1e-10

    def test_factorization_consistency(self, disk, rng):
        for _ in range(10):
            q, q2 = random_disk_configs(rng, 2)
            direct = nonholonomic_kernel(q, q2, HP, DIMS, disk)
            factored = disk.projector(q) @ standard_matrix_kernel(
                q, q2, HP, DIMS, 4
            ) @ disk.projector(q2)
            assert np.allclose(direct, factored, atol=1e-12)

    def test_free_particle_reduces_to_standard(self, free_particle, rng):
        hp = KernelHyperparams(1.3, (0.8, 1.1))
        q, q2 = rng.standard_normal((2, 2))
        knh = nonholonomic_kernel(q, q2, hp, (0, 1), free_particle)
        kstd = standard_matrix_kernel(q, q2, hp, (0, 1), 2)
        assert np.allclose(knh, kstd, atol=1e-14)


class TestGramMatrix:
    def test_single_point_standard(self):
        hp = KernelHyperparams(2.5, (1.0, 1.0))
        g = gram_matrix([np.zeros(4)], make_standard_kernel(hp, DIMS, 4), 4)
        assert np.allclose(g, 2.5 * np.eye(4))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            gram_matrix([], make_standard_kernel(HP, DIMS, 4), 4)

    def test_symmetric_and_psd(self, disk, rng):
        pts = list(random_disk_configs(rng, 30))
        g = gram_matrix(pts, make_nonholonomic_kernel(HP, DIMS, disk), 4)
        assert np.max(np.abs(g - g.T)) <= 1e-10
        eig = np.linalg.eigvalsh(g)
        assert eig.min() >= -1e-8 * eig.max()

    def test_rank_bounded_by_distribution_dimension(self, disk, rng):
        pts = list(random_disk_configs(rng, 30))
        g = gram_matrix(pts, make_nonholonomic_kernel(HP, DIMS, disk), 4)
        s = np.linalg.svd(g, compute_uv=False)
        rank = int(np.sum(s > 1e-8 * s.max()))
        assert rank <= 30 * 2

    def test_matches_cached_projector_assembly(self, disk, rng):
        pts = random_disk_configs(rng, 12)
        g1 = gram_matrix(list(pts), make_nonholonomic_kernel(HP, DIMS, disk), 4)
        g2 = nonholonomic_gram(disk, pts, HP, DIMS)
        assert np.allclose(g1, g2, atol=1e-12)

    def test_quadratic_form_certificate(self, disk, rng):
        # 50 random point sets, random coefficients: the block quadratic
        # form must be nonnegative up to roundoff
        for _ in range(50):
            count = int(rng.integers(2, 21))
            pts = random_disk_configs(rng, count)
            c = rng.standard_normal(count * 4)
            g = nonholonomic_gram(disk, pts, HP, DIMS)
            assert c @ g @ c >= -1e-8 * float(np.sum(c * c))
