import math
import tempfile
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from schrodinger.core_grid import (
    SampledField, coarse_samples, d_dz, d_dzbar, export_csv, holder_seminorm_estimate,
    integrate_disc, laplacian_5pt, lp_norm, make_grid, read_field, singular_power_integral,
    sup_norm, write_field,
)
from schrodinger.exceptions import FieldError, GridError, ParameterError


class GridSpecTests(SimpleTestCase):
    def test_rejects_odd_and_tiny_grids(self):
        with self.assertRaises(GridError):
            make_grid(63, 2)
        with self.assertRaises(GridError):
            make_grid(2, 2)
        with self.assertRaises(GridError):
            make_grid(64, 0)

    def test_geometry(self):
        grid = make_grid(64, 2)
        self.assertEqual(grid.total_side, 128)
        self.assertAlmostEqual(grid.spacing, 1 / 32)
        self.assertAlmostEqual(grid.axis[0], -2 + 1 / 64)
        # row index runs along y
        self.assertAlmostEqual(grid.z[5, 9], grid.axis[9] + 1j * grid.axis[5])
        inner = grid.axis[grid.inner_slice]
        self.assertEqual(inner.size, 64)
        self.assertTrue(np.all(np.abs(inner) < 1))

    def test_require_padding(self):
        with self.assertRaises(GridError):
            make_grid(16, 1).require_padding(2)

    def test_nearest_index(self):
        grid = make_grid(32, 2)
        i, j = grid.nearest_index(0.3 - 0.2j)
        self.assertLess(abs(grid.z[i, j] - (0.3 - 0.2j)), grid.spacing)


class SampledFieldTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(32, 2)

    def test_shape_mismatch(self):
        with self.assertRaises(FieldError):
            SampledField(self.grid, np.zeros((10, 10)))

    def test_from_function_is_disc_supported(self):
        f = SampledField.from_function(self.grid, lambda z: np.ones_like(z))
        self.assertTrue(np.all(f.values[~self.grid.mask] == 0))
        self.assertTrue(np.all(f.values[self.grid.mask] == 1))

    def test_arithmetic_checks_grid(self):
        a = SampledField.zeros(self.grid)
        b = SampledField.zeros(make_grid(16, 2))
        with self.assertRaises(FieldError):
            a + b
        c = 2 * (a + 1.5) - 1
        assert_allclose(c.values, 2.0)


class QuadratureTests(SimpleTestCase):
    def test_disc_area(self):
        grid = make_grid(128, 2)
        ones = SampledField.from_function(grid, lambda z: np.ones_like(z))
        self.assertAlmostEqual(integrate_disc(ones).real / math.pi, 1.0, delta=0.02)

    def test_norms(self):
        grid = make_grid(64, 2)
        f = SampledField.from_function(grid, lambda z: z)
        self.assertAlmostEqual(sup_norm(f), 1.0, delta=2 * grid.spacing)
        # int |z|^2 = pi / 2
        self.assertAlmostEqual(lp_norm(f, 2) ** 2, math.pi / 2, delta=0.05)
        with self.assertRaises(ParameterError):
            lp_norm(f, 0.5)

    def test_integrable_singularity_at_vertex(self):
        grid = make_grid(128, 2)
        with np.errstate(divide='ignore'):
            f = SampledField.from_function(grid, lambda z: np.abs(z) ** -0.5)
        self.assertAlmostEqual(integrate_disc(f).real / (4 * math.pi / 3), 1.0, delta=0.01)

    def test_odd_integrand_vanishes(self):
        grid = make_grid(64, 2)
        self.assertLess(abs(integrate_disc(SampledField.from_function(grid, lambda z: z))), 1e-12)

    def test_integral_is_linear(self):
        grid = make_grid(32, 2)
        rng = np.random.default_rng(1)
        shape = grid.z.shape
        f = SampledField(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        g = SampledField(grid, rng.standard_normal(shape))
        a, b = 0.7 - 2j, 3.1
        combined = integrate_disc(a * f + b * g)
        self.assertAlmostEqual(abs(combined - a * integrate_disc(f) - b * integrate_disc(g)), 0.0, places=10)

    def test_l2_norm_matches_integral(self):
        grid = make_grid(64, 2)
        f = SampledField.from_function(grid, lambda z: np.exp(1j * z) * (1 + z.real))
        self.assertAlmostEqual(lp_norm(f, 2) ** 2, integrate_disc(f * f.conj()).real, places=12)

    def test_singular_power_integral(self):
        grid = make_grid(128, 2)
        for beta in (0.5, 1.0, 1.5):
            exact = 2 * math.pi / (2 - beta)
            self.assertAlmostEqual(singular_power_integral(grid, 0j, beta) / exact, 1.0, delta=0.01)
            self.assertLessEqual(singular_power_integral(grid, 0.5 + 0.3j, beta), exact * 1.01)
        with self.assertRaises(ParameterError):
            singular_power_integral(grid, 0j, 2.0)

    def test_holder_seminorm_of_linear_field(self):
        grid = make_grid(64, 2)
        f = SampledField.from_function(grid, lambda z: z.real)
        value = holder_seminorm_estimate(f, 1.0)
        self.assertLessEqual(value, 1.0 + 1e-9)
        self.assertGreater(value, 0.99)
        with self.assertRaises(ParameterError):
            holder_seminorm_estimate(f, 1.5)

    def test_coarse_samples(self):
        grid = make_grid(64, 2)
        points, (rows, cols) = coarse_samples(grid, min_count=50)
        self.assertGreaterEqual(points.size, 50)
        self.assertTrue(np.all(np.abs(points) < 1))
        assert_allclose(grid.z[rows, cols], points)


class FiniteDifferenceTests(SimpleTestCase):
    def test_wirtinger_derivatives_of_z_squared(self):
        grid = make_grid(64, 2)
        f = SampledField.from_function(grid, lambda z: z ** 2, supported=False)
        region = grid.interior_mask(2)
        assert_allclose(d_dz(f).values[region], 2 * grid.z[region], atol=1e-10)
        assert_allclose(d_dzbar(f).values[region], 0, atol=1e-10)

    def test_laplacian_of_quadratic(self):
        grid = make_grid(64, 2)
        f = SampledField.from_function(grid, lambda z: np.abs(z) ** 2, supported=False)
        region = grid.interior_mask(2)
        assert_allclose(laplacian_5pt(f).values[region], 4.0, atol=1e-8)


class FieldFileTests(SimpleTestCase):
    def test_write_and_read(self):
        grid = make_grid(16, 2)
        f = SampledField.from_function(grid, lambda z: z * np.conj(z) + 1j * z)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_field(Path(tmp) / 'f.bkg', f)
            payload = path.read_bytes()
            self.assertTrue(payload.startswith(b'BKGRID1'))
            self.assertEqual(len(payload), 7 + 8 + grid.node_count * 16)
            back = read_field(path)
        self.assertEqual(back.grid, grid)
        assert_allclose(back.values, f.values, rtol=0, atol=0)

    def test_bad_magic(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bad.bkg'
            path.write_bytes(b'NOTAGRID' + bytes(16))
            with self.assertRaises(FieldError):
                read_field(path)

    def test_export_csv(self):
        grid = make_grid(8, 2)
        f = SampledField.from_function(grid, lambda z: z)
        with tempfile.TemporaryDirectory() as tmp:
            path = export_csv(Path(tmp) / 'f.csv', f, masked_only=True)
            lines = path.read_text().splitlines()
        self.assertEqual(lines[0], 'x,y,re,im')
        self.assertEqual(len(lines) - 1, int(grid.mask.sum()))
