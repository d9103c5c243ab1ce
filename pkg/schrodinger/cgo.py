"""
Oscillating (CGO) solutions u = exp(i n (z - z0)^2) (1 + r) of  Delta u + q u = 0.

The remainder is the fixed point f = 1 + S f with

    S f    = -1/4 C   (exp(-inR) Cbar(exp(inR) q f))     first kind
    Sbar g = -1/4 Cbar(exp(-inR) C   (exp(inR) q g))     second kind

and u2 = exp(i n conj(z - z0)^2) (1 + s) for the second kind. Contraction is
certified per (q, n, grid) by probing S with random smooth fields before the
iteration starts.
"""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import roots_legendre

from .core_grid import (
    SampledField, d_dx, d_dy, d_dz, d_dzbar, holder_norm_estimate, laplacian_5pt,
    restricted_lp_norm, sup_norm, write_field,
)
from .exceptions import NoConvergence, NonContractive, ParameterError, SupportError
from .forward import BoundaryGrid, CauchyPair
from .operators import smooth_probe, workspace_for
from .stationary_phase import phase_R

logger = logging.getLogger(__name__)

FIRST_KIND = 'first'
SECOND_KIND = 'second'


# Smooth step and cut-off

def _g(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = np.exp(-1.0 / x[positive])
    return out


def smooth_step(x):
    """gamma(x) = g(2 - x) / (g(2 - x) + g(x - 1)): 1 for x <= 1, 0 for x >= 2, C-infinity"""
    x = np.asarray(x, dtype=float)
    a = _g(2.0 - x)
    b = _g(x - 1.0)
    out = a / (a + b)
    return float(out) if out.ndim == 0 else out


SMOOTH_STEP_SLOPE_BOUND = 8 * math.e


def smooth_step_slope(samples=10 ** 4, low=0.0, high=3.0, step=1e-5):
    """max |gamma'| over uniform samples, by central differences"""
    x = np.linspace(low, high, samples)
    return float(np.abs((smooth_step(x + step) - smooth_step(x - step)) / (2 * step)).max())


@dataclass(frozen=True)
class CutoffParams:
    z0: complex
    delta: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ParameterError(f'cut-off width delta must lie in (0, 1) (got {self.delta})')
        if abs(self.z0) >= 1:
            raise ParameterError(f'z0 must lie in the unit disc (got {self.z0})')


def cutoff(params, grid):
    """h = gamma_S gamma_B: 0 near z0 and near the circle, 1 in between"""
    z = grid.z
    scale = 2.0 / params.delta
    gamma_s = 1.0 - smooth_step(scale * np.abs(z - params.z0))
    gamma_b = smooth_step(scale * (np.abs(z) - (1.0 - params.delta)) + 1.0)
    return SampledField(grid, np.where(grid.mask, gamma_s * gamma_b, 0.0))


def cutoff_bounds(params, grid):
    """
    Measured quantities of the cut-off inequalities, each with the value it
    must not exceed. The exceptional set has area exactly 2 pi delta, so its
    node count is allowed a layer of pi h around the two level sets.
    """
    h = cutoff(params, grid)
    z, mask = grid.z, grid.mask
    delta = params.delta
    distance = np.abs(z - params.z0)
    values = h.values.real

    core = mask & (distance < delta / 2)
    plateau = mask & (distance >= delta) & (np.abs(z) <= 1 - delta)
    off_node = mask & (distance > 0)
    quotient = np.zeros(z.shape, dtype=np.complex128)
    quotient[off_node] = h.values[off_node] / (z[off_node] - params.z0)
    quotient_field = SampledField(grid, quotient)
    inner = grid.interior_mask(1)
    slope = max(restricted_lp_norm(d_dx(quotient_field), math.inf, inner),
                restricted_lp_norm(d_dy(quotient_field), math.inf, inner))

    return {
        'range': (float(max(values[mask].max() - 1.0, -values[mask].min(), 0.0)), 0.0),
        'core': (float(np.abs(values[core]).max(initial=0.0)), 0.0),
        'plateau': (float(np.abs(1.0 - values[plateau]).max(initial=0.0)), 0.0),
        'measure': (grid.cell_area * int(np.count_nonzero(mask & (values != 1.0))),
                    2 * math.pi * delta + math.pi * grid.spacing),
        'quotient_sup': (float(np.abs(quotient[mask]).max()), 2.0 / delta),
        'quotient_c1': (float(np.abs(quotient[mask]).max()) + 2 * slope, 200.0 / delta ** 2),
    }


# Phases

def phase_field(n, z0, grid, sign=1):
    """exp(sign i n R) on every node"""
    return SampledField(grid, np.exp(sign * 1j * n * phase_R(grid.z, z0)))


def decay_exponent(p):
    """Rate of the remainder bound in n for potentials in L^p"""
    return 2.0 / (p * (2 * p + 1))


def cutoff_width(n, p):
    """delta = n^(-2/(2p+1)), the cut-off width that balances the remainder bound"""
    return float(n) ** (-2.0 / (2 * p + 1))


def mollified_potential(q, z0, eps, p, grid):
    """
    q times the cut-off 1 - gamma(2|z - z0|/delta) that removes z0 from the
    support, with delta(eps) = (eps / (2 pi^(1/p) sup|q|))^(p/2) so that the
    L^p distance to q is at most eps/2. Returns (field, delta).
    """
    q_field = q if isinstance(q, SampledField) else q.sample(grid)
    peak = sup_norm(q_field)
    if peak == 0:
        return q_field.masked(), 0.0
    delta = (eps / (2 * math.pi ** (1.0 / p) * peak)) ** (p / 2.0)
    if not 0 < delta < 1:
        raise ParameterError(f'eps={eps:g} gives cut-off width {delta:g} outside (0, 1)')
    window = 1.0 - smooth_step((2.0 / delta) * np.abs(grid.z - z0))
    return SampledField(grid, np.where(grid.mask, q_field.values * window, 0.0)), delta


# Fixed point

@dataclass(frozen=True)
class CGOParams:
    n: float
    z0: complex = 0j
    p: float = 4.0
    variant: str = FIRST_KIND
    phase_sign: int = 1

    def __post_init__(self):
        if self.n <= 1:
            raise ParameterError(f'CGO frequency n must be > 1 (got {self.n})')
        if abs(self.z0) >= 1:
            raise ParameterError(f'z0 must lie in the unit disc (got {self.z0})')
        if self.p <= 2:
            raise ParameterError(f'integrability exponent p must be > 2 (got {self.p})')
        if self.variant not in (FIRST_KIND, SECOND_KIND):
            raise ParameterError(f"variant must be '{FIRST_KIND}' or '{SECOND_KIND}' (got {self.variant!r})")
        if self.phase_sign not in (1, -1):
            raise ParameterError(f'phase_sign must be +1 or -1 (got {self.phase_sign})')

    @property
    def alpha(self):
        return 1.0 - 2.0 / self.p

    def phase(self, grid):
        return self.phase_sign * self.n * phase_R(grid.z, self.z0)


def _as_field(q, grid):
    if isinstance(q, SampledField):
        return q.masked()
    return q.sample(grid)


def apply_S(f, q, params, workspace=None):
    """
    One application of S (first kind) or Sbar (second kind). The result is
    exact on the convolution's valid box and zero outside it.
    """
    grid = f.grid
    workspace = workspace or workspace_for(grid)
    q_field = _as_field(q, grid)
    phase = params.phase(grid)
    inner, outer = ((workspace.conj_cauchy, workspace.cauchy) if params.variant == FIRST_KIND
                    else (workspace.cauchy, workspace.conj_cauchy))
    psi = SampledField(grid, np.exp(1j * phase) * q_field.values * f.values)
    middle = inner(psi)
    phi = SampledField(grid, np.exp(-1j * phase) * middle.values)
    out = -0.25 * outer(phi).values
    return SampledField(grid, np.where(workspace.valid_mask, out, 0.0))


def probe_contraction(q, params, grid, probes=10, seed=0, workspace=None):
    """max ||S f||_inf over random smooth probes with ||f||_inf = 1"""
    workspace = workspace or workspace_for(grid)
    q_field = _as_field(q, grid)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(probes):
        probe = smooth_probe(grid, rng)
        probe = probe / sup_norm(probe)
        best = max(best, sup_norm(apply_S(probe, q_field, params, workspace)))
    return best


@dataclass
class CGOSolution:
    params: CGOParams
    f: SampledField
    remainder: SampledField
    iterations: int
    empirical_contraction: float
    fixed_point_residual: float
    potential: SampledField = None
    steps: tuple = field(default=())
    ratios: tuple = field(default=())

    @property
    def grid(self):
        return self.f.grid

    def solution_field(self):
        """u = exp(i n (z - z0)^2) f (first kind) or exp(i n conj(z - z0)^2) g (second kind)"""
        return SampledField(self.grid, _holomorphic_phase(self.params, self.grid.z) * self.f.values)

    def metadata(self):
        return {
            'variant': self.params.variant,
            'n': f'{self.params.n:.17g}',
            'z0_re': f'{self.params.z0.real:.17g}',
            'z0_im': f'{self.params.z0.imag:.17g}',
            'p': f'{self.params.p:.17g}',
            'iterations': str(self.iterations),
            'contraction': f'{self.empirical_contraction:.17g}',
            'residual': f'{self.fixed_point_residual:.17g}',
        }

    def write(self, directory, stem='cgo'):
        """BKGRID1 files for f and the remainder plus a key=value sidecar"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        write_field(directory / f'{stem}_f.bkg', self.f)
        write_field(directory / f'{stem}_remainder.bkg', self.remainder)
        sidecar = directory / f'{stem}.txt'
        sidecar.write_text(''.join(f'{k}={v}\n' for k, v in self.metadata().items()))
        return sidecar


def read_sidecar(path):
    values = {}
    for line in Path(path).read_text().splitlines():
        if '=' in line:
            key, value = line.split('=', 1)
            values[key.strip()] = value.strip()
    return values


def _holomorphic_phase(params, z):
    w = np.asarray(z) - params.z0
    if params.variant == SECOND_KIND:
        w = np.conj(w)
    return np.exp(params.phase_sign * 1j * params.n * w ** 2)


def solve_cgo(q, params, grid, tol=1e-10, max_iterations=200, initial=None,
              probes=10, seed=0, workspace=None):
    """
    Iterate f <- 1 + S f from f = 1 (or ``initial``) until the sup-norm step
    drops to ``tol``. Raises NonContractive when the probed operator norm is
    at least 1 and NoConvergence at the iteration cap.
    """
    workspace = workspace or workspace_for(grid)
    q_field = _as_field(q, grid)
    ones = SampledField(grid, np.where(workspace.valid_mask, 1.0, 0.0))

    if sup_norm(q_field) == 0:
        zero = SampledField.zeros(grid)
        return CGOSolution(params, ones, zero, 1, 0.0, 0.0, q_field)

    factor = probe_contraction(q_field, params, grid, probes, seed, workspace)
    if factor >= 1:
        raise NonContractive(factor, params.n)
    logger.debug('n=%g z0=%s: probed contraction %.4f', params.n, params.z0, factor)

    f = ones if initial is None else SampledField(grid, np.where(workspace.valid_mask, initial.values, 0.0))
    steps, ratios = [], []
    floor = 1e3 * np.finfo(float).eps
    for k in range(1, max_iterations + 1):
        f_next = ones + apply_S(f, q_field, params, workspace)
        step = sup_norm(f_next - f)
        if steps and steps[-1] > floor and step > floor:
            ratios.append(step / steps[-1])
        steps.append(step)
        f = f_next
        if step <= tol:
            break
    else:
        raise NoConvergence(max_iterations, steps[-1])

    remainder = apply_S(f, q_field, params, workspace)
    residual = sup_norm(f - ones - remainder)
    contraction = max([factor] + ratios)
    if contraction >= 1:
        raise NonContractive(contraction, params.n)
    logger.info('CGO %s kind n=%g z0=%s: %d iterations, contraction %.4f, residual %.2e',
                params.variant, params.n, params.z0, k, contraction, residual)
    return CGOSolution(params, f, f - ones, k, contraction, residual, q_field,
                       tuple(steps), tuple(ratios))


def uniqueness_gap(q, params, grid, tol=1e-10, seed=0, workspace=None):
    """
    ||f_a - f_b||_inf for the fixed points reached from f = 1 and from a
    seeded random smooth start of sup norm 5.
    """
    start = smooth_probe(grid, np.random.default_rng(seed))
    start = 5.0 * start / sup_norm(start)
    a = solve_cgo(q, params, grid, tol, workspace=workspace)
    b = solve_cgo(q, params, grid, tol, initial=start, workspace=workspace)
    return sup_norm(a.f - b.f)


def pde_residual(solution, interior_cells=3):
    """
    ||Delta u + q u||_2 / ||q u||_2 on nodes ``interior_cells`` away from the
    circle, evaluated after dividing out the (unit-free, exponentially large)
    phase factor:  Delta w + 8 i n (z - z0) dbar w + q w  for the first kind,
    Delta w + 8 i n conj(z - z0) d w + q w  for the second.
    """
    params = solution.params
    grid = solution.grid
    if sup_norm(solution.potential) == 0:
        return 0.0
    w = solution.f
    q = solution.potential.values
    offset = grid.z - params.z0
    n = params.phase_sign * params.n
    if params.variant == FIRST_KIND:
        transport = 8j * n * offset * d_dzbar(w).values
    else:
        transport = 8j * n * np.conj(offset) * d_dz(w).values
    residual = SampledField(grid, laplacian_5pt(w).values + transport + q * w.values)
    region = grid.interior_mask(interior_cells)
    scale = restricted_lp_norm(SampledField(grid, q * w.values), 2, region)
    return restricted_lp_norm(residual, 2, region) / scale


# Remainder decay

DECAY_COLUMNS = ('n', 'sup_holder', 'sup_dbar_inf', 'sup_d_p')


def remainder_norms(solution, boundary_cells=1):
    """(Hölder-alpha estimate, ||dbar r||_inf, ||d r||_p) of one remainder"""
    r = solution.remainder
    grid = r.grid
    p = solution.params.p
    region = grid.interior_mask(boundary_cells)
    return (
        holder_norm_estimate(r.masked(), solution.params.alpha, long_range_pairs=4000),
        restricted_lp_norm(d_dzbar(r), math.inf, region),
        restricted_lp_norm(d_dz(r), p, region),
    )


def remainder_decay(q, n_list, z0_samples, p, grid, tol=1e-10, workers=1, path=None):
    """
    Rows (n, sup_holder, sup_dbar_inf, sup_d_p): suprema over the z0 samples
    of the remainder norms, one row per n.
    """
    workspace = workspace_for(grid).prepare()
    q_field = _as_field(q, grid)
    tasks = [(n, complex(z0)) for n in n_list for z0 in z0_samples]

    def norms(task):
        n, z0 = task
        if sup_norm(q_field) == 0:
            return 0.0, 0.0, 0.0
        solution = solve_cgo(q_field, CGOParams(n, z0, p), grid, tol, workspace=workspace)
        return remainder_norms(solution)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(norms, tasks))
    else:
        results = [norms(task) for task in tasks]

    rows = []
    for n in n_list:
        block = [values for (task_n, _), values in zip(tasks, results) if task_n == n]
        row = (float(n),) + tuple(max(column) for column in zip(*block))
        logger.info('remainder decay n=%g holder=%.4e dbar=%.4e d_p=%.4e', *row)
        rows.append(row)
    if path is not None:
        write_decay_csv(path, rows)
    return rows


def write_decay_csv(path, rows):
    with open(path, 'w', newline='') as out:
        writer = csv.writer(out)
        writer.writerow(DECAY_COLUMNS)
        for row in rows:
            writer.writerow([f'{row[0]:g}'] + [f'{value:.17g}' for value in row[1:]])
    return path


def fitted_decay_bound(rows, p, column=1):
    """
    (n, measured, C n^(-e)) with e the remainder decay exponent and C fitted
    so the bound equals the measurement at the first n.
    """
    exponent = decay_exponent(p)
    n0, v0 = rows[0][0], rows[0][column]
    constant = v0 * n0 ** exponent
    return [(row[0], row[column], constant * row[0] ** (-exponent)) for row in rows]


# Integration by parts away from z0

def integration_by_parts_check(g, n, z0, sign=1, workspace=None):
    """
    Relative L^2(Omega) discrepancy between C(e g) and
    sign/(2 i n) (e g / conj(z - z0) - C(e dbar(g / conj(z - z0)))), e = exp(sign i n R).
    """
    grid = g.grid
    workspace = workspace or workspace_for(grid)
    if sup_norm(g) == 0:
        return 0.0
    near = grid.mask & (np.abs(grid.z - z0) < 2 * grid.spacing)
    if np.any(g.values[near] != 0):
        raise SupportError(f'g does not vanish within two cells of z0={z0}')

    e = np.exp(sign * 1j * n * phase_R(grid.z, z0))
    offset = np.conj(grid.z - z0)
    nonzero = g.values != 0
    quotient = np.zeros(grid.z.shape, dtype=np.complex128)
    quotient[nonzero] = g.values[nonzero] / offset[nonzero]
    quotient = SampledField(grid, quotient)

    lhs = workspace.cauchy(SampledField(grid, e * g.values))
    correction = workspace.cauchy(SampledField(grid, e * d_dzbar(quotient).values))
    rhs = SampledField(grid, sign / (2j * n) * (e * quotient.values - correction.values))
    scale = restricted_lp_norm(lhs, 2, grid.mask)
    return restricted_lp_norm(lhs - rhs, 2, grid.mask) / scale


# Cauchy data on the circle

def _laurent_boundary_data(phi_polar, phi_boundary, radii, weights, angles):
    """
    Trace and interior radial derivative on the circle of r = -1/4 C phi,
    from the exterior expansion C phi(z) = (1/pi) sum_k M_k z^(-k-1),
    M_k = int phi xi^k, and the jump of d/dr across the circle.
    """
    m = angles.size
    k_max = m // 2
    angular = 2 * np.pi * np.fft.ifft(phi_polar, axis=1)[:, :k_max]
    powers = radii[:, None] ** (np.arange(k_max) + 1)[None, :]
    moments = np.sum(weights[:, None] * powers * angular, axis=0)

    def series(coefficients):
        padded = np.zeros(m, dtype=np.complex128)
        padded[:k_max] = coefficients
        return np.exp(-1j * angles) * np.fft.fft(padded)

    trace = -series(moments) / (4 * np.pi)
    exterior = series((np.arange(k_max) + 1) * moments) / (4 * np.pi)
    interior = exterior - 0.5 * np.exp(-1j * angles) * phi_boundary
    return trace, interior


def _sample(field, points):
    grid = field.grid
    h = grid.spacing
    coords = np.stack([(points.imag - grid.axis[0]) / h, (points.real - grid.axis[0]) / h])
    flat = coords.reshape(2, -1)
    re = map_coordinates(field.values.real, flat, order=3, mode='nearest')
    im = map_coordinates(field.values.imag, flat, order=3, mode='nearest')
    return (re + 1j * im).reshape(points.shape)


def cgo_cauchy_pair(solution, boundary_nodes=1024, radial_nodes=None, workspace=None):
    """
    Trace and outward normal derivative of u on ``boundary_nodes`` points of
    the circle, using only interior samples of the fixed point: the remainder
    is continued to the circle through the moments of its dbar-derivative
    (Gauss-Legendre in r, trapezoid in theta).
    """
    params = solution.params
    if params.phase_sign != 1:
        raise ParameterError('Cauchy data is defined for the standard phase only')
    grid = solution.grid
    workspace = workspace or workspace_for(grid)
    boundary = BoundaryGrid(boundary_nodes)
    angles = boundary.angles
    radial_nodes = radial_nodes or max(boundary_nodes // 2, 64)
    nodes, weights = roots_legendre(radial_nodes)
    radii = (nodes + 1) / 2
    weights = weights / 2
    polar = radii[:, None] * np.exp(1j * angles)[None, :]
    circle = np.exp(1j * angles)

    phase = params.n * phase_R(grid.z, params.z0)
    psi = SampledField(grid, np.exp(1j * phase) * solution.potential.values * solution.f.values)
    if params.variant == FIRST_KIND:
        inner = workspace.conj_cauchy(psi, extended=True)
    else:
        inner = workspace.cauchy(psi, extended=True)

    def phi_at(points):
        return np.exp(-1j * params.n * phase_R(points, params.z0)) * _sample(inner, points)

    phi_polar, phi_boundary = phi_at(polar), phi_at(circle)
    if params.variant == FIRST_KIND:
        trace_r, dr_r = _laurent_boundary_data(phi_polar, phi_boundary, radii, weights, angles)
        offset = circle - params.z0
        radial_phase = 2 * offset * circle
    else:
        trace_r, dr_r = _laurent_boundary_data(np.conj(phi_polar), np.conj(phi_boundary),
                                               radii, weights, angles)
        trace_r, dr_r = np.conj(trace_r), np.conj(dr_r)
        offset = np.conj(circle - params.z0)
        radial_phase = 2 * offset * np.conj(circle)

    carrier = np.exp(1j * params.n * offset ** 2)
    trace = carrier * (1 + trace_r)
    normal = carrier * (1j * params.n * radial_phase * (1 + trace_r) + dr_r)
    return CauchyPair(trace, normal, boundary)


def harmonic_cauchy_pair(n, z0, boundary_nodes, variant=SECOND_KIND):
    """Closed-form Cauchy data of exp(i n (z - z0)^2) or exp(i n conj(z - z0)^2)"""
    boundary = BoundaryGrid(boundary_nodes)
    circle = boundary.points
    if variant == FIRST_KIND:
        offset, radial = circle - z0, 2 * (circle - z0) * circle
    else:
        offset, radial = np.conj(circle - z0), 2 * np.conj(circle - z0) * np.conj(circle)
    carrier = np.exp(1j * n * offset ** 2)
    return CauchyPair(carrier, 1j * n * radial * carrier, boundary)

