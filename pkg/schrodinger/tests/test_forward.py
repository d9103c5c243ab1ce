import math
import tempfile
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase

from schrodinger import cgo, forward
from schrodinger.core_grid import SampledField, make_grid
from schrodinger.exceptions import FieldError, ParameterError, SingularSystem
from schrodinger.potentials import bump_potential, constant_potential, zero_potential


class BoundaryDataTests(SimpleTestCase):
    def test_boundary_grid(self):
        boundary = forward.BoundaryGrid(64)
        self.assertAlmostEqual(boundary.integrate(np.ones(64)).real, 2 * math.pi)
        self.assertAlmostEqual(abs(boundary.integrate(boundary.points)), 0.0)
        with self.assertRaises(ParameterError):
            forward.BoundaryGrid(0)

    def test_cauchy_pair_validation(self):
        with self.assertRaises(FieldError):
            forward.CauchyPair(np.ones(8), np.ones(7))
        with self.assertRaises(FieldError):
            forward.CauchyPair(np.array([1.0, np.nan]), np.ones(2))
        with self.assertRaises(FieldError):
            forward.CauchyPair(np.ones(8), np.ones(8), forward.BoundaryGrid(16))

    def test_csv(self):
        theta = forward.BoundaryGrid(32).angles
        pair = forward.CauchyPair(np.exp(1j * theta), 1j * np.exp(1j * theta))
        with tempfile.TemporaryDirectory() as tmp:
            path = pair.to_csv(Path(tmp) / 'pair.csv')
            header = path.read_text().splitlines()[0]
            back = forward.CauchyPair.from_csv(path)
        self.assertEqual(header, 'theta,tr_re,tr_im,dn_re,dn_im')
        assert_allclose(back.trace, pair.trace, rtol=0, atol=0)
        assert_allclose(back.normal_deriv, pair.normal_deriv, rtol=0, atol=0)

    def test_bilinear_form_is_antisymmetric(self):
        rng = np.random.default_rng(0)
        a = forward.CauchyPair(rng.standard_normal(16), rng.standard_normal(16))
        b = forward.CauchyPair(rng.standard_normal(16), rng.standard_normal(16))
        self.assertAlmostEqual(forward.bilinear_form(a, b), -forward.bilinear_form(b, a))
        self.assertAlmostEqual(forward.bilinear_form(a, a), 0.0)


class DirichletSolverTests(SimpleTestCase):
    def test_harmonic_data(self):
        u = forward.solve_dirichlet(zero_potential(), np.cos, 32, 64)
        exact = forward.PolarSolution.from_function(lambda z: z.real, 32, 64)
        assert_allclose(u.values, exact.values, atol=5e-3)
        assert_allclose(forward.normal_derivative(u), np.cos(u.angles), atol=1e-2)

    def test_manufactured_solution(self):
        # u = exp(x) solves Delta u - u = 0
        u = forward.solve_dirichlet(constant_potential(-1.0), lambda t: np.exp(np.cos(t)), 32, 64)
        exact = forward.PolarSolution.from_function(lambda z: np.exp(z.real), 32, 64)
        assert_allclose(u.values, exact.values, atol=5e-3)
        pair = forward.cauchy_pair(u)
        assert_allclose(pair.normal_deriv, np.cos(u.angles) * np.exp(np.cos(u.angles)), atol=2e-2)

    def test_centre_row(self):
        u = forward.solve_dirichlet(zero_potential(), lambda t: np.full_like(t, 2.0), 16, 32)
        assert_allclose(u.values, 2.0, atol=1e-10)
        assert_allclose(u.ring_means(), 2.0, atol=1e-10)

    def test_ring_means_of_harmonic_solution(self):
        u = forward.solve_dirichlet(zero_potential(), lambda t: 1 + np.cos(t) + np.sin(3 * t), 32, 64)
        assert_allclose(u.ring_means(), 1.0, atol=1e-3)

    def test_factorization_is_reused(self):
        solver = forward.DirichletSolver(bump_potential(), 16, 32)
        a = solver.solve(np.cos)
        b = solver.solve(np.sin)
        c = solver.solve(lambda t: np.cos(t) + 2 * np.sin(t))
        assert_allclose(c.values, a.values + 2 * b.values, atol=1e-10)

    def test_bad_arguments(self):
        with self.assertRaises(ParameterError):
            forward.DirichletSolver(zero_potential(), 1, 32)
        solver = forward.DirichletSolver(zero_potential(), 8, 16)
        with self.assertRaises(FieldError):
            solver.solve(np.ones(15))

    def test_dirichlet_eigenvalue(self):
        matrix, _ = forward.DirichletSolver.assemble(zero_potential(), 8, 16)
        eigenvalues = np.linalg.eigvals(matrix.toarray())
        smallest = eigenvalues[np.argmin(np.abs(eigenvalues))]
        # first Dirichlet eigenvalue of the disc is j_{0,1}^2 ~ 5.78
        self.assertAlmostEqual(-smallest.real, 5.78, delta=0.5)
        with self.assertRaises(SingularSystem):
            forward.DirichletSolver(constant_potential(-smallest), 8, 16, pivot_tolerance=1e-6)

    def test_basis(self):
        labels = [label for label, _ in forward.dirichlet_basis(2)]
        self.assertEqual(labels, ['1', 'cos1', 'sin1', 'cos2', 'sin2'])
        _, sin2 = forward.dirichlet_basis(2)[-1]
        self.assertAlmostEqual(sin2(np.array([math.pi / 4]))[0], 1.0)


class QuadratureTests(SimpleTestCase):
    def test_integrate_polar(self):
        ones = np.ones((17, 32))
        self.assertAlmostEqual(forward.integrate_polar(ones, 16).real, math.pi, places=10)
        r2 = forward.PolarSolution.from_function(lambda z: np.abs(z) ** 2, 16, 32).values
        self.assertAlmostEqual(forward.integrate_polar(r2, 16).real, math.pi / 2, places=10)

    def test_resample_to_grid(self):
        grid = make_grid(32, 2)
        u = forward.PolarSolution.from_function(lambda z: z.real, 32, 64)
        field = forward.resample_to_grid(u, grid)
        assert_allclose(field.values[grid.mask], grid.z[grid.mask].real, atol=5e-3)
        self.assertTrue(np.all(field.values[~grid.mask] == 0))


    def test_resampling_error_is_second_order(self):
        grid = make_grid(64, 2)
        exact = grid.z[grid.mask].real
        errors = []
        for n_r in (16, 32):
            u = forward.PolarSolution.from_function(lambda z: z.real, n_r, 2 * n_r)
            errors.append(np.abs(forward.resample_to_grid(u, grid).values[grid.mask] - exact).max())
        self.assertLess(errors[1], 0.3 * errors[0])


class OrthogonalityTests(SimpleTestCase):
    def test_bump_against_harmonic(self):
        q1, q0 = bump_potential(), zero_potential()
        u1 = forward.solve_dirichlet(q1, np.cos, 64, 128)
        u2 = forward.solve_dirichlet(q0, np.cos, 64, 128)
        gap = forward.orthogonality_gap(q1, q0, u1, u2)
        volume, boundary = gap
        self.assertGreater(abs(volume), 0.01)
        q_norm = math.sqrt(abs(forward.integrate_polar(np.abs(q1(u1.points)) ** 2, 64)))
        self.assertLess(abs(volume - boundary) / max(abs(volume), q_norm), 0.005)
        self.assertIsNone(gap.reciprocity)

    def test_reciprocity(self):
        q = bump_potential(center=0.25 - 0.15j, radius=0.5)
        solver = forward.DirichletSolver(q, 64, 128)
        a = solver.solve(np.cos)
        b = solver.solve(lambda t: np.sin(t) + np.cos(2 * t))
        lhs, rhs = forward.orthogonality_gap(q, q, a, b).reciprocity
        energy = abs(forward.orthogonality_gap(q, q, a, a).reciprocity[0])
        self.assertGreater(energy, 1.0)
        self.assertLess(abs(lhs - rhs), 0.005 * max(abs(lhs), energy))

    def test_manufactured_against_constant(self):
        # u = exp(x) with q = -1 against u2 = 1; the r = 1 ring carries q
        q, q0 = constant_potential(-1.0), zero_potential()
        for n_r in (32, 64):
            u = forward.solve_dirichlet(q, lambda t: np.exp(np.cos(t)), n_r, 2 * n_r)
            one = forward.solve_dirichlet(q0, np.ones_like, n_r, 2 * n_r)
            gap = forward.orthogonality_gap(q, q0, u, one)
            exact = -forward.integrate_polar(np.exp(u.points.real), n_r)
            self.assertLess(abs(gap.volume - exact) / abs(exact), 1e-3)
            self.assertLess(gap.gap / abs(gap.volume), 0.005)

    def test_cartesian_fields_with_cgo_data(self):
        grid = make_grid(128, 2)
        q, z0 = bump_potential(), 0.1 + 0.1j
        solution = cgo.solve_cgo(q, cgo.CGOParams(8, z0), grid)
        first = (solution.solution_field(), cgo.cgo_cauchy_pair(solution, 512))
        carrier = SampledField.from_function(grid, lambda z: np.exp(8j * np.conj(z - z0) ** 2))
        second = (carrier, cgo.harmonic_cauchy_pair(8, z0, 512, cgo.SECOND_KIND))
        gap = forward.orthogonality_gap(q, zero_potential(), first, second)
        self.assertGreater(abs(gap.volume), 0.05)
        self.assertLess(gap.gap / abs(gap.volume), 0.01)
        # (2n/pi) int q u1 u2 tends to q(z0)
        self.assertAlmostEqual(abs(16 / math.pi * gap.volume - q(np.array([z0]))[0]), 0, delta=0.5)

    def test_equal_potentials_leave_nothing(self):
        q1, q2 = bump_potential(), bump_potential()
        u1 = forward.solve_dirichlet(q1, np.cos, 64, 128)
        u2 = forward.solve_dirichlet(q2, lambda t: np.sin(t) + np.cos(2 * t), 64, 128)
        gap = forward.orthogonality_gap(q1, q2, u1, u2)
        self.assertEqual(gap.volume, 0)
        energy = abs(forward.orthogonality_gap(q1, q1, u1, u1).reciprocity[0])
        self.assertLess(abs(gap.boundary), 0.005 * energy)
