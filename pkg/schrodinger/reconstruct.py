"""
Pointwise recovery of the potential from boundary data of oscillating solutions.

For each centre z0 the first-kind solution u1 of Delta u + q1 u = 0 is built
from the known q1 and only its Cauchy pair on the circle is kept. Together
with the reference solution u2 of the reference potential q2 (closed form
exp(i n conj(z - z0)^2) when q2 = 0) the boundary functional

    (2n/pi) int_circle (u1 dn u2 - u2 dn u1) dsigma

equals (2n/pi) int (q1 - q2) u1 u2 dm, which tends to (q1 - q2)(z0) as n grows.
"""
import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cgo import (
    FIRST_KIND, SECOND_KIND, CGOParams, cgo_cauchy_pair, harmonic_cauchy_pair, solve_cgo,
)
from .core_grid import SampledField, integrate_disc
from .exceptions import CGOLabError, ParameterError
from .forward import bilinear_form
from .operators import workspace_for
from .stationary_phase import phase_R

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ('z0_re', 'z0_im', 'n', 'qhat_re', 'qhat_im', 'qref_re', 'qref_im', 'abs_err')


def reconstruct_point(data1, n, z0, data2=None):
    """
    (2n/pi) times the trapezoid rule for int (u1 dn u2 - u2 dn u1) over the
    circle. ``data2`` defaults to the Cauchy pair of exp(i n conj(z - z0)^2).
    """
    if n <= 0:
        raise ParameterError(f'frequency n must be > 0 (got {n})')
    if abs(z0) >= 1:
        raise ParameterError(f'z0 must lie in the unit disc (got {z0})')
    if data2 is None:
        data2 = harmonic_cauchy_pair(n, z0, data1.boundary.m_nodes, SECOND_KIND)
    return (2 * n / math.pi) * bilinear_form(data1, data2)


@dataclass
class PointEstimate:
    z0: complex
    n: float
    qhat: complex = complex('nan')
    qref: complex = complex('nan')
    volume: complex = complex('nan')
    error: str = ''

    @property
    def ok(self):
        return not self.error

    @property
    def abs_err(self):
        return abs(self.qhat - self.qref)

    @property
    def bridge_gap(self):
        """|boundary - volume| relative to max(|volume|, |qref|, 1e-6)"""
        scale = max(abs(self.volume), abs(self.qref), 1e-6)
        return abs(self.qhat - self.volume) / scale


@dataclass
class ReconstructionReport:
    z0_list: list
    n_list: list
    points: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def for_n(self, n):
        return [p for p in self.points if p.n == n and p.ok]

    @property
    def failures(self):
        return [p for p in self.points if not p.ok]

    def sup_error(self, n):
        return max((p.abs_err for p in self.for_n(n)), default=0.0)

    def l2_error(self, n):
        """Discrete L^2(Omega, z0) norm of the error, each centre weighted pi / count"""
        errors = [p.abs_err for p in self.for_n(n)]
        if not errors:
            return 0.0
        return math.sqrt(math.pi / len(errors) * sum(e ** 2 for e in errors))

    def error_table(self):
        return [(n, self.sup_error(n), self.l2_error(n)) for n in self.n_list]

    @property
    def max_bridge_gap(self):
        return max((p.bridge_gap for p in self.points if p.ok), default=0.0)

    def to_csv(self, path):
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(REPORT_COLUMNS)
            for p in self.points:
                writer.writerow([
                    f'{p.z0.real:.17g}', f'{p.z0.imag:.17g}', f'{p.n:g}',
                    f'{p.qhat.real:.17g}', f'{p.qhat.imag:.17g}',
                    f'{p.qref.real:.17g}', f'{p.qref.imag:.17g}', f'{p.abs_err:.17g}',
                ])
        return Path(path)


def default_lattice(spacing=0.2):
    """3 x 3 interior lattice of centres"""
    return [complex(x, y) for y in (-spacing, 0.0, spacing) for x in (-spacing, 0.0, spacing)]


def _volume_functional(q_difference, solutions, n, z0, grid):
    """(2n/pi) int exp(inR) (q1 - q2) f g dm on the Cartesian grid"""
    integrand = np.exp(1j * n * phase_R(grid.z, z0)) * q_difference
    for solution in solutions:
        integrand = integrand * solution.f.values
    return (2 * n / math.pi) * integrate_disc(SampledField(grid, integrand))


def estimate_point(q1, n, z0, grid, q2=None, p=4.0, tol=1e-10, boundary_nodes=1024, workspace=None):
    """One reconstructed value with its reference and the matching volume functional"""
    estimate = PointEstimate(complex(z0), float(n))
    q_ref = q1(np.array([z0]))[0] - (q2(np.array([z0]))[0] if q2 is not None else 0.0)
    estimate.qref = complex(q_ref)
    try:
        workspace = workspace or workspace_for(grid)
        first = solve_cgo(q1, CGOParams(n, z0, p, FIRST_KIND), grid, tol, workspace=workspace)
        data1 = cgo_cauchy_pair(first, boundary_nodes, workspace=workspace)
        solutions = [first]
        data2 = None
        if q2 is not None:
            second = solve_cgo(q2, CGOParams(n, z0, p, SECOND_KIND), grid, tol, workspace=workspace)
            data2 = cgo_cauchy_pair(second, boundary_nodes, workspace=workspace)
            solutions.append(second)
        estimate.qhat = complex(reconstruct_point(data1, n, z0, data2))
        difference = q1(grid.z) - (q2(grid.z) if q2 is not None else 0.0)
        estimate.volume = complex(_volume_functional(difference, solutions, n, z0, grid))
    except CGOLabError as e:
        logger.warning('Reconstruction failed at n=%g z0=%s: %s', n, z0, e)
        estimate.error = str(e)
    return estimate


def reconstruct_grid(q1, n_list, z0_list, grid, q2=None, p=4.0, tol=1e-10,
                     boundary_nodes=1024, workers=1):
    """
    Sweep (n, z0) and collect point estimates. Failures at single points are
    stored in the report instead of being raised.
    """
    n_list = [float(n) for n in n_list]
    z0_list = [complex(z0) for z0 in z0_list]
    for n in n_list:
        if n <= 1:
            raise ParameterError(f'frequency n must be > 1 (got {n:g})')
    workspace = workspace_for(grid).prepare().prepare(extended=True)
    tasks = [(n, z0) for n in n_list for z0 in z0_list]
    started = time.monotonic()

    def run(task):
        n, z0 = task
        return estimate_point(q1, n, z0, grid, q2, p, tol, boundary_nodes, workspace)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(run, tasks))
    else:
        points = [run(task) for task in tasks]

    report = ReconstructionReport(z0_list, n_list, points, {
        'grid': grid.n_side,
        'pad': grid.pad_factor,
        'potential': str(q1),
        'reference': str(q2) if q2 is not None else 'zero',
        'boundary_nodes': boundary_nodes,
        'seconds': round(time.monotonic() - started, 3),
    })
    for n, sup_error, l2_error in report.error_table():
        logger.info('reconstruct n=%g sup_err=%.4e l2_err=%.4e', n, sup_error, l2_error)
    return report


def scaling_deviation(q1, c, n, z0, grid, **kwargs):
    """|qhat(c q) - c qhat(q)| / |c qhat(q)|"""
    base = estimate_point(q1, n, z0, grid, **kwargs)
    scaled = estimate_point(q1.scaled(c), n, z0, grid, **kwargs)
    if not (base.ok and scaled.ok):
        raise ParameterError(base.error or scaled.error)
    return abs(scaled.qhat - c * base.qhat) / abs(c * base.qhat)


def render_report(report, directory):
    """Error curves and a |qhat| map of the largest n as PNG files"""
    import matplotlib

    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    table = report.error_table()

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog([row[0] for row in table], [max(row[1], 1e-16) for row in table], 'o-', label='sup')
    ax.loglog([row[0] for row in table], [max(row[2], 1e-16) for row in table], 's--', label='L2')
    ax.set_xlabel('n')
    ax.set_ylabel('reconstruction error')
    ax.legend()
    fig.tight_layout()
    curve = directory / 'reconstruction_errors.png'
    fig.savefig(curve, dpi=120)
    plt.close(fig)

    points = report.for_n(report.n_list[-1])
    fig, ax = plt.subplots(figsize=(5, 4))
    scatter = ax.scatter([p.z0.real for p in points], [p.z0.imag for p in points],
                         c=[abs(p.qhat) for p in points], s=120, cmap='viridis')
    fig.colorbar(scatter, ax=ax, label='|qhat|')
    ax.set_aspect('equal')
    ax.set_title(f'n = {report.n_list[-1]:g}')
    fig.tight_layout()
    heatmap = directory / 'reconstruction_map.png'
    fig.savefig(heatmap, dpi=120)
    plt.close(fig)
    return [curve, heatmap]
