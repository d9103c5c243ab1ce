"""
Single entry point for the numerical experiments.

    python manage.py cgolab verify-lemmas --grid 128 --pad 2 --seed 7
    python manage.py cgolab reconstruct --potential bump --n 8,16,32

Options are merged as settings.CGOLAB < --config file < command-line flags and
validated by RunOptionsForm. Exit status: 0 when every check passes, 1 when
a check fails, 2 on a usage error.
"""
import traceback
from pathlib import Path

import numpy as np

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from schrodinger import cgo, checks, forward, operators, reconstruct, stationary_phase
from schrodinger.checks import CheckOutcome, worst_ratio
from schrodinger.core_grid import make_grid, write_field
from schrodinger.exceptions import CGOLabError, NonContractive, NoConvergence
from schrodinger.forms import RunOptionsForm
from schrodinger.models import ExperimentRun
from schrodinger.potentials import bump_potential, get_potential, zero_potential

COMMANDS = (
    'verify-lemmas',
    'operators-bench',
    'cgo-solve',
    'forward-solve',
    'reconstruct',
    'convergence-study',
)

OPTION_NAMES = (
    'grid', 'pad', 'n', 'z0', 'potential', 'q2', 'p', 'tol', 'out', 'seed',
    'workers', 'boundary_nodes', 'plots',
)

DEFAULT_N = {
    'cgo-solve': '8',
    'reconstruct': '8,16,32,64',
    'convergence-study': '8,16,32,64',
}


def read_config(path):
    """``key = value`` lines with ``#`` comments; keys are flag names"""
    path = Path(path)
    if not path.exists():
        raise CommandError(f'--config: file not found: {path}', returncode=2)
    values = {}
    for number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise CommandError(f'--config: {path}:{number}: expected key = value', returncode=2)
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.lstrip('-').replace('-', '_')
        if key not in OPTION_NAMES:
            raise CommandError(f'--config: {path}:{number}: unknown key {key!r}', returncode=2)
        values[key] = value
    return values


def default_options(command):
    conf = settings.CGOLAB
    return {
        'grid': conf['GRID'],
        'pad': conf['PAD'],
        'n': DEFAULT_N.get(command, ''),
        'z0': '',
        'potential': 'bump',
        'q2': '',
        'p': conf['P'],
        'tol': conf['TOL'],
        'out': str(conf['OUTPUT_DIR']),
        'seed': conf['SEED'],
        'workers': conf['WORKERS'],
        'boundary_nodes': conf['BOUNDARY_NODES'],
        'plots': conf['PLOTS'],
    }


class Command(BaseCommand):
    help = 'Run a CGO reconstruction experiment or the verification suite'

    def add_arguments(self, parser):
        parser.add_argument('command', choices=COMMANDS, help='Experiment to run')
        parser.add_argument('--grid', help='Nodes per side of the unit square (even)')
        parser.add_argument('--pad', help='Padding factor of the computational box')
        parser.add_argument('--n', help='Frequency or comma-separated increasing list')
        parser.add_argument('--z0', help='Centre as re,im (use --z0=-0.2,0.1 for negative values)')
        parser.add_argument('--potential', help='Catalog name or BKGRID1 file')
        parser.add_argument('--q2', help='Known reference potential (default: zero)')
        parser.add_argument('--p', help='Sobolev exponent p > 2')
        parser.add_argument('--tol', help='Fixed-point tolerance')
        parser.add_argument('--out', help='Output directory')
        parser.add_argument('--seed', help='Random seed')
        parser.add_argument('--workers', help='Worker threads for parameter sweeps')
        parser.add_argument('--boundary-nodes', dest='boundary_nodes', help='Nodes on the circle')
        parser.add_argument('--plots', action='store_true', default=None, help='Render PNG images')
        parser.add_argument('--config', help='Plain-text key = value option file')

    def handle(self, *args, **options):
        command = options['command']
        merged = default_options(command)
        if options.get('config'):
            merged.update(read_config(options['config']))
        merged.update({k: options[k] for k in OPTION_NAMES if options.get(k) is not None})

        form = RunOptionsForm(data=merged)
        if not form.is_valid():
            raise CommandError('\n'.join(form.flag_errors()), returncode=2)
        opts = form.cleaned_data
        out = Path(opts['out'])

        run = ExperimentRun.objects.create(
            command=command,
            options={k: str(v) for k, v in merged.items()},
            seed=opts['seed'],
            output_dir=str(out),
        )
        run.start()
        run.add_log(f'{command} started', 'INFO', {k: str(v) for k, v in merged.items()})

        self.stdout.write(self.style.SUCCESS(f'\ncgolab {command} (run #{run.id})'))
        self.stdout.write('=' * 60)

        try:
            grid = make_grid(opts['grid'], opts['pad'])
            out.mkdir(parents=True, exist_ok=True)
            handler = getattr(self, '_' + command.replace('-', '_'))
            outcomes = list(handler(run, grid, opts, out))
        except (NonContractive, NoConvergence) as e:
            run.add_log(str(e), 'ERROR')
            run.finish('failed', error_details=str(e))
            raise CommandError(str(e), returncode=1)
        except CGOLabError as e:
            run.add_log(str(e), 'ERROR')
            run.finish('failed', error_details=str(e))
            raise CommandError(str(e), returncode=2)
        except Exception as e:
            run.add_log(f'Unexpected error: {e}', 'ERROR')
            run.finish('failed', error_details=traceback.format_exc())
            raise

        failed = [o for o in outcomes if not o.passed]
        summary = f'{len(outcomes) - len(failed)} passed, {len(failed)} failed'
        self.stdout.write('\n' + '=' * 60)
        if failed:
            self.stdout.write(self.style.ERROR(f'{command}: {summary}'))
            run.add_log(f'{command} finished: {summary}', 'ERROR')
            run.finish('failed', summary)
            raise CommandError(f'{len(failed)} check(s) failed: '
                               + ', '.join(o.name for o in failed), returncode=1)
        self.stdout.write(self.style.SUCCESS(f'{command}: {summary}'))
        run.add_log(f'{command} finished: {summary}', 'SUCCESS')
        run.finish('completed', summary)

    def _report(self, run, outcome):
        style = self.style.SUCCESS if outcome.passed else self.style.ERROR
        self.stdout.write(style(outcome.summary_line()))
        run.record_check(outcome)
        return outcome

    def _artifact(self, run, path):
        self.stdout.write(f'  wrote {path}')
        run.add_log(f'Wrote {path}', 'INFO', {'path': str(path)})

    # Commands

    def _verify_lemmas(self, run, grid, opts, out):
        for outcome in checks.verify_lemmas(grid, opts['p'], opts['tol'], opts['seed'],
                                            opts['boundary_nodes']):
            yield self._report(run, outcome)

    def _operators_bench(self, run, grid, opts, out):
        path = out / 'operators.csv'
        with open(path, 'w', newline='') as f:
            f.write(f'# grid={grid.n_side}\n# pad={grid.pad_factor}\n# seed={opts["seed"]}\n')
            f.write('p,C_p,B_p,C_alpha\n')
            for p in (3.0, 4.0):
                constants = operators.operator_constants(grid, p, seed=opts['seed'])
                f.write(f'{p:g},' + ','.join(f'{constants[k]:.17g}' for k in ('C_p', 'B_p', 'C_alpha')) + '\n')
                run.add_log(f'Operator constants at p={p:g}', 'INFO', constants)
        self._artifact(run, path)

        b2 = operators.estimate_operator_norm('beurling', grid, 2.0, seed=opts['seed'])
        yield self._report(run, CheckOutcome('beurling_l2_norm', b2, 1.05, 'L^2 isometry of Pi'))
        defects = operators.identity_defects(bump_potential().sample(grid))
        for name, value in defects.items():
            yield self._report(run, CheckOutcome(f'identity_{name}', value, 0.05, 'Cauchy operator identities'))

    def _cgo_solve(self, run, grid, opts, out):
        q = get_potential(opts['potential'], grid)
        z0 = opts['z0'] if opts['z0'] is not None else 0j
        n_list = opts['n']
        max_iterations = settings.CGOLAB['MAX_ITERATIONS']
        for n in n_list:
            params = cgo.CGOParams(n, z0, opts['p'])
            try:
                solution = cgo.solve_cgo(q, params, grid, opts['tol'], max_iterations, seed=opts['seed'])
            except NonContractive as e:
                yield self._report(run, CheckOutcome(f'cgo_contraction_n{n:g}', e.factor, 0.5,
                                                     'fixed-point contraction'))
                continue
            stem = f'cgo_n{n:g}'
            self._artifact(run, solution.write(out, stem))
            data = cgo.cgo_cauchy_pair(solution, opts['boundary_nodes'])
            self._artifact(run, data.to_csv(out / f'{stem}_cauchy.csv'))
            self.stdout.write(f'  n={n:g}: {solution.iterations} iterations')
            yield self._report(run, CheckOutcome(f'cgo_contraction_n{n:g}', solution.empirical_contraction,
                                                 0.5, 'fixed-point contraction'))
            yield self._report(run, CheckOutcome(f'cgo_residual_n{n:g}', solution.fixed_point_residual,
                                                 opts['tol'], 'fixed point'))

        if len(n_list) >= 2:
            samples = stationary_phase.z0_samples(make_grid(8, grid.pad_factor), min_count=4)
            path = out / 'remainder_decay.csv'
            rows = cgo.remainder_decay(q, n_list, samples, opts['p'], grid, opts['tol'],
                                       opts['workers'], path)
            self._artifact(run, path)
            for n, measured, bound in cgo.fitted_decay_bound(rows, opts['p']):
                run.add_log(f'remainder n={n:g}: {measured:.4e} (fitted bound {bound:.4e})', 'INFO')

    def _forward_solve(self, run, grid, opts, out):
        q = get_potential(opts['potential'], grid)
        n_r, n_theta = grid.n_side // 2, grid.n_side
        solver = forward.DirichletSolver(q, n_r, n_theta)
        first = None
        for label, data in forward.dirichlet_basis(2):
            u = solver.solve(data)
            if first is None:
                first = u
            self._artifact(run, forward.cauchy_pair(u).to_csv(out / f'forward_{label}.csv'))

        path = out / 'forward_u_1.bkg'
        write_field(path, forward.resample_to_grid(first, grid))
        self._artifact(run, path)

        harmonic = forward.solve_dirichlet(zero_potential(), lambda t: np.ones_like(t), n_r, n_theta)
        gap = forward.orthogonality_gap(q, zero_potential(), first, harmonic)
        scale = max(abs(gap.volume), abs(gap.boundary), 1e-12)
        yield self._report(run, CheckOutcome('forward_orthogonality', gap.gap / scale, 0.005,
                                             'orthogonality identity'))

    def _reconstruct(self, run, grid, opts, out):
        q1 = get_potential(opts['potential'], grid)
        q2 = get_potential(opts['q2'], grid) if opts['q2'] else None
        z0_list = [opts['z0']] if opts['z0'] is not None else reconstruct.default_lattice()
        report = reconstruct.reconstruct_grid(
            q1, opts['n'], z0_list, grid, q2, opts['p'], opts['tol'],
            opts['boundary_nodes'], opts['workers'],
        )
        path = report.to_csv(out / 'reconstruction.csv')
        self._artifact(run, path)
        for point in report.points:
            run.record_point(point)
            if not point.ok:
                run.add_log(f'n={point.n:g} z0={point.z0}: {point.error}', 'WARNING')
        for n, sup_error, l2_error in report.error_table():
            self.stdout.write(f'  n={n:>4g}  sup_err={sup_error:.4e}  l2_err={l2_error:.4e}')
        if opts['plots']:
            for image in reconstruct.render_report(report, out):
                self._artifact(run, image)

        yield self._report(run, CheckOutcome('reconstruct_failures', len(report.failures), 0,
                                             'per-point solves'))
        yield self._report(run, CheckOutcome('reconstruct_bridge', report.max_bridge_gap, 0.01,
                                             'boundary functional = volume functional'))
        if len(report.n_list) >= 2:
            errors = [row[1] for row in report.error_table()]
            measured = worst_ratio(errors) if errors[0] > 0 else 0.0
            yield self._report(run, CheckOutcome('reconstruct_error_decreasing', measured, 1.0,
                                                 'pointwise convergence in n'))

    def _convergence_study(self, run, grid, opts, out):
        q = get_potential(opts['potential'], grid)
        path = out / 'convergence.csv'
        metadata = {'grid': grid.n_side, 'pad': grid.pad_factor, 'potential': opts['potential'],
                    'seed': opts['seed']}
        rows = stationary_phase.convergence_study(q.sample(grid), opts['n'], path, metadata)
        self._artifact(run, path)
        errors = [error for _, error in rows]
        measured = worst_ratio(errors) if errors and errors[0] > 0 else 0.0
        yield self._report(run, CheckOutcome('tn_convergence_monotone', measured, 1.0, 'T_n f -> f'))
