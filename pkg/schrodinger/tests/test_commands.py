import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from schrodinger.core_grid import make_grid, write_field
from schrodinger.models import CheckResult, ExperimentRun, ReconstructionPoint, RunLog
from schrodinger.potentials import bump_potential


def run(*args, **options):
    out = StringIO()
    call_command('cgolab', *args, stdout=out, **options)
    return out.getvalue()


class UsageErrorTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def assertUsageError(self, flag, *args, **options):
        with self.assertRaises(CommandError) as ctx:
            run(*args, out=self.tmp.name, **options)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn(flag, str(ctx.exception))

    def test_negative_frequency(self):
        self.assertUsageError('--n', 'reconstruct', n='-3')

    def test_odd_grid(self):
        self.assertUsageError('--grid', 'convergence-study', grid='127')

    def test_centre_outside_disc(self):
        self.assertUsageError('--z0', 'cgo-solve', z0='0.9,0.9')

    def test_exponent(self):
        self.assertUsageError('--p', 'cgo-solve', p='2')

    def test_unknown_config_key(self):
        config = Path(self.tmp.name) / 'run.conf'
        config.write_text('grid = 64\ncolour = blue\n')
        self.assertUsageError('--config', 'convergence-study', config=str(config))

    def test_missing_config(self):
        self.assertUsageError('--config', 'convergence-study', config='/nonexistent/run.conf')

    def test_unknown_potential(self):
        self.assertUsageError('unknown potential', 'convergence-study', potential='nope', grid='32')
        run_row = ExperimentRun.objects.get()
        self.assertEqual(run_row.status, 'failed')

    def test_nothing_is_stored_for_flag_errors(self):
        self.assertUsageError('--n', 'reconstruct', n='-3')
        self.assertFalse(ExperimentRun.objects.exists())


class ConvergenceStudyCommandTests(TestCase):
    def test_config_and_flag_precedence(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = Path(tmp) / 'run.conf'
            config.write_text('# study\ngrid = 32\nn = 4,8   # two frequencies\npotential = bump\n')
            output = run('convergence-study', config=str(config), grid='64', out=tmp)
            lines = (Path(tmp) / 'convergence.csv').read_text().splitlines()
        self.assertIn('check=tn_convergence_monotone status=pass', output)
        self.assertIn('# grid=64', lines)
        self.assertIn('n,l2_error', lines)
        self.assertEqual([line.split(',')[0] for line in lines[-2:]], ['4', '8'])

        run_row = ExperimentRun.objects.get()
        self.assertEqual(run_row.status, 'completed')
        self.assertEqual(run_row.options['grid'], '64')
        self.assertEqual(run_row.options['n'], '4,8')
        self.assertEqual(run_row.checks_passed, 1)
        self.assertEqual(CheckResult.objects.filter(run=run_row, status='pass').count(), 1)
        self.assertTrue(RunLog.objects.filter(run=run_row, level='CHECK').exists())

    def test_deterministic_output(self):
        bodies = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as tmp:
                run('convergence-study', grid='64', n='4,8', seed='7', out=tmp)
                bodies.append((Path(tmp) / 'convergence.csv').read_bytes())
        self.assertEqual(bodies[0], bodies[1])


class NumericalCommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)

    def test_reconstruct_report(self):
        output = run('reconstruct', potential='bump', n='8,16', grid='128', z0='0,0',
                     boundary_nodes='512', out=self.tmp.name)
        for name in ('reconstruct_failures', 'reconstruct_bridge', 'reconstruct_error_decreasing'):
            self.assertIn(f'check={name} status=pass', output)
        self.assertEqual(ExperimentRun.objects.get().status, 'completed')
        header = (self.out / 'reconstruction.csv').read_text().splitlines()[0]
        self.assertEqual(header, 'z0_re,z0_im,n,qhat_re,qhat_im,qref_re,qref_im,abs_err')
        self.assertEqual(ReconstructionPoint.objects.count(), 2)

    def test_cgo_solve(self):
        output = run('cgo-solve', n='8', grid='128', z0='0.1,0.1', boundary_nodes='256',
                     out=self.tmp.name)
        self.assertIn('check=cgo_contraction_n8 status=pass', output)
        self.assertIn('check=cgo_residual_n8 status=pass', output)
        for name in ('cgo_n8_f.bkg', 'cgo_n8_remainder.bkg', 'cgo_n8.txt', 'cgo_n8_cauchy.csv'):
            self.assertTrue((self.out / name).exists(), name)

    def test_non_contractive_is_a_failed_check(self):
        path = self.out / 'strong.bkg'
        write_field(path, bump_potential(height=1000.0).sample(make_grid(64, 2)))
        with self.assertRaises(CommandError) as ctx:
            run('cgo-solve', n='2', grid='64', potential=str(path), out=self.tmp.name)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('cgo_contraction_n2', str(ctx.exception))
        self.assertEqual(ExperimentRun.objects.get().status, 'failed')

    def test_forward_solve(self):
        output = run('forward-solve', grid='128', potential='offset_bump', out=self.tmp.name)
        self.assertIn('check=forward_orthogonality status=pass', output)
        for label in ('1', 'cos1', 'sin1', 'cos2', 'sin2'):
            self.assertTrue((self.out / f'forward_{label}.csv').exists(), label)
        self.assertTrue((self.out / 'forward_u_1.bkg').read_bytes().startswith(b'BKGRID1'))

    def test_operators_bench(self):
        output = run('operators-bench', grid='128', out=self.tmp.name)
        self.assertIn('check=beurling_l2_norm status=pass', output)
        lines = (self.out / 'operators.csv').read_text().splitlines()
        self.assertIn('p,C_p,B_p,C_alpha', lines)
        self.assertEqual(lines[-2].split(',')[0], '3')
        self.assertEqual(lines[-1].split(',')[0], '4')

    def test_verify_lemmas(self):
        output = run('verify-lemmas', grid='128', pad='2', seed='7', out=self.tmp.name)
        summary_lines = [line for line in output.splitlines() if line.startswith('check=')]
        self.assertGreater(len(summary_lines), 20)
        self.assertTrue(all('status=pass' in line for line in summary_lines))
        run_row = ExperimentRun.objects.get()
        self.assertEqual(run_row.checks_failed, 0)
        self.assertEqual(run_row.checks_passed, len(summary_lines))


class ResetRunsTests(TestCase):
    def test_deletes_runs_of_one_command(self):
        kept = ExperimentRun.objects.create(command='reconstruct')
        dropped = ExperimentRun.objects.create(command='verify-lemmas')
        dropped.add_log('hello')
        call_command('reset_runs', command='verify-lemmas', confirm=True, stdout=StringIO())
        self.assertEqual(list(ExperimentRun.objects.all()), [kept])
        self.assertFalse(RunLog.objects.exists())

    def test_logs_only(self):
        run_row = ExperimentRun.objects.create(command='reconstruct')
        run_row.add_log('hello')
        call_command('reset_runs', logs_only=True, confirm=True, stdout=StringIO())
        self.assertTrue(ExperimentRun.objects.exists())
        self.assertFalse(RunLog.objects.exists())
