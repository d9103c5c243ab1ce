import math

from django.test import SimpleTestCase

from schrodinger import checks
from schrodinger.core_grid import make_grid


class CheckOutcomeTests(SimpleTestCase):
    def test_status(self):
        self.assertTrue(checks.CheckOutcome('a', 0.5, 1.0).passed)
        self.assertTrue(checks.CheckOutcome('a', 1.0, 1.0).passed)
        self.assertFalse(checks.CheckOutcome('a', 1.5, 1.0).passed)
        self.assertFalse(checks.CheckOutcome('a', math.nan, 1.0).passed)
        self.assertFalse(checks.CheckOutcome('a', math.inf, 1.0).passed)

    def test_summary_line(self):
        line = checks.CheckOutcome('tn_isometry_n8', 0.0125, 0.02).summary_line()
        self.assertEqual(line, 'check=tn_isometry_n8 status=pass measured=0.0125 bound=0.02')

    def test_worst_ratio(self):
        self.assertAlmostEqual(checks.worst_ratio([1.0, 0.5, 0.4]), 0.8)
        self.assertEqual(checks.worst_ratio([2.0]), 0.0)
        self.assertEqual(checks.worst_ratio([0.0, 1.0]), math.inf)


class CheapGroupTests(SimpleTestCase):
    def assertAllPass(self, outcomes):
        outcomes = list(outcomes)
        self.assertTrue(outcomes)
        for outcome in outcomes:
            self.assertTrue(outcome.passed, outcome.summary_line())

    def test_smooth_step(self):
        self.assertAllPass(checks.smooth_step_checks(make_grid(128, 2)))

    def test_phase_holder(self):
        self.assertAllPass(checks.phase_holder_checks(make_grid(64, 2)))

    def test_singular_integral(self):
        self.assertAllPass(checks.singular_integral_checks(make_grid(128, 2)))

    def test_gaussian_transform(self):
        self.assertAllPass(checks.gaussian_transform_checks())

    def test_orthogonality(self):
        self.assertAllPass(checks.orthogonality_checks())

    def test_reference_harmonic_refines(self):
        self.assertLess(checks.reference_harmonic_ratio(256) / checks.reference_harmonic_ratio(128), 0.3)
