"""
Forward Dirichlet problem  Delta u + q u = 0  in the unit disc, u = f on the circle.

Polar finite differences: rings r_i = i / N_r (i = 0 is the centre, a single
unknown; i = N_r is the boundary), angles theta_j = 2 pi j / N_theta. The
5-point polar stencil is used on every interior ring; at the centre
Delta u(0) ~ 4 (mean(u on ring 1) - u(0)) / dr^2. One sparse LU factorization
per (q, grid) serves every boundary datum.

Solution arrays are shaped (N_r + 1, N_theta); row 0 repeats the centre value.
"""
import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.integrate import simpson
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import splu

from .core_grid import SampledField, integrate_disc
from .exceptions import FieldError, ParameterError, SingularSystem

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BoundaryGrid:
    """M uniformly spaced nodes on the unit circle with trapezoid weights"""
    m_nodes: int

    def __post_init__(self):
        if self.m_nodes <= 0:
            raise ParameterError(f'boundary grid needs m_nodes > 0 (got {self.m_nodes})')

    @property
    def angles(self):
        return 2 * math.pi * np.arange(self.m_nodes) / self.m_nodes

    @property
    def points(self):
        return np.exp(1j * self.angles)

    @property
    def weight(self):
        return 2 * math.pi / self.m_nodes

    def integrate(self, values):
        return complex(self.weight * np.sum(values))


@dataclass
class CauchyPair:
    """Boundary trace and outward normal derivative of one solution"""
    trace: np.ndarray
    normal_deriv: np.ndarray
    boundary: BoundaryGrid = None

    def __post_init__(self):
        self.trace = np.asarray(self.trace, dtype=np.complex128)
        self.normal_deriv = np.asarray(self.normal_deriv, dtype=np.complex128)
        if self.trace.shape != self.normal_deriv.shape or self.trace.ndim != 1:
            raise FieldError('trace and normal derivative must be 1-D arrays of equal length')
        if not (np.all(np.isfinite(self.trace)) and np.all(np.isfinite(self.normal_deriv))):
            raise FieldError('Cauchy data contains non-finite values')
        if self.boundary is None:
            self.boundary = BoundaryGrid(self.trace.size)
        elif self.boundary.m_nodes != self.trace.size:
            raise FieldError(f'{self.trace.size} values for {self.boundary.m_nodes} boundary nodes')

    def to_csv(self, path):
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['theta', 'tr_re', 'tr_im', 'dn_re', 'dn_im'])
            for theta, tr, dn in zip(self.boundary.angles, self.trace, self.normal_deriv):
                writer.writerow([f'{theta:.17g}', f'{tr.real:.17g}', f'{tr.imag:.17g}',
                                 f'{dn.real:.17g}', f'{dn.imag:.17g}'])
        return path

    @classmethod
    def from_csv(cls, path):
        with open(path, newline='') as f:
            rows = list(csv.DictReader(f))
        trace = [complex(float(r['tr_re']), float(r['tr_im'])) for r in rows]
        dn = [complex(float(r['dn_re']), float(r['dn_im'])) for r in rows]
        return cls(np.array(trace), np.array(dn))


def bilinear_form(u_pair, v_pair):
    """int_{circle} (u dn v - v dn u) dsigma"""
    boundary = u_pair.boundary
    return boundary.integrate(u_pair.trace * v_pair.normal_deriv - v_pair.trace * u_pair.normal_deriv)


@dataclass
class PolarSolution:
    n_r: int
    n_theta: int
    values: np.ndarray
    potential: object = None
    boundary_data: np.ndarray = None

    @property
    def radii(self):
        return np.arange(self.n_r + 1) / self.n_r

    @property
    def angles(self):
        return 2 * math.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def points(self):
        r, t = np.meshgrid(self.radii, self.angles, indexing='ij')
        return r * np.exp(1j * t)

    @classmethod
    def from_function(cls, func, n_r, n_theta, potential=None):
        """Exact samples of a closed form on the polar nodes"""
        radii = np.arange(n_r + 1) / n_r
        angles = 2 * math.pi * np.arange(n_theta) / n_theta
        r, t = np.meshgrid(radii, angles, indexing='ij')
        values = np.asarray(func(r * np.exp(1j * t)), dtype=np.complex128) * np.ones(r.shape)
        return cls(n_r, n_theta, values, potential, values[-1].copy())

    def ring_means(self):
        return self.values.mean(axis=1)


def dirichlet_basis(k_max):
    """Boundary data {1, cos k theta, sin k theta : 1 <= k <= k_max} as (label, callable)"""
    basis = [('1', lambda t: np.ones_like(t))]
    for k in range(1, k_max + 1):
        basis.append((f'cos{k}', lambda t, k=k: np.cos(k * t)))
        basis.append((f'sin{k}', lambda t, k=k: np.sin(k * t)))
    return basis


class DirichletSolver:
    """Factorized discrete Delta + q on a polar grid"""

    def __init__(self, q, n_r, n_theta, pivot_tolerance=PIVOT_TOLERANCE):
        if n_r < 2 or n_theta < 4:
            raise ParameterError(f'polar grid needs n_r >= 2 and n_theta >= 4 (got {n_r}, {n_theta})')
        self.q = q
        self.n_r = n_r
        self.n_theta = n_theta
        matrix, self._boundary_coupling = self.assemble(q, n_r, n_theta)
        try:
            self._lu = splu(matrix.tocsc())
        except RuntimeError as e:
            raise SingularSystem(0.0) from e
        pivots = np.abs(self._lu.U.diagonal())
        ratio = float(pivots.min() / pivots.max())
        if ratio < pivot_tolerance:
            raise SingularSystem(ratio)
        logger.debug('Factorized polar operator %d x %d (pivot ratio %.2e)', n_r, n_theta, ratio)

    @staticmethod
    def assemble(q, n_r, n_theta):
        """
        Sparse matrix of Delta + q on the unknowns [centre, ring 1, ..., ring N_r - 1]
        and the coupling weights of ring N_r - 1 to the boundary ring.
        """
        dr = 1.0 / n_r
        dt = 2 * math.pi / n_theta
        size = 1 + (n_r - 1) * n_theta
        radii = np.arange(n_r + 1) * dr
        angles = np.arange(n_theta) * dt

        def index(i, j):
            return 1 + (i - 1) * n_theta + (j % n_theta)

        rows, cols, vals = [], [], []
        q_centre = complex(np.asarray(q(np.array([0j])))[0]) if q is not None else 0.0
        rows.append(0)
        cols.append(0)
        vals.append(-4.0 / dr ** 2 + q_centre)
        for j in range(n_theta):
            rows.append(0)
            cols.append(index(1, j))
            vals.append(4.0 / (dr ** 2 * n_theta))

        q_rings = np.zeros((n_r + 1, n_theta), dtype=np.complex128)
        if q is not None:
            r, t = np.meshgrid(radii, angles, indexing='ij')
            q_rings = np.asarray(q(r * np.exp(1j * t)), dtype=np.complex128) * np.ones(r.shape)

        for i in range(1, n_r):
            r_i = radii[i]
            outer = (r_i + dr / 2) / (r_i * dr ** 2)
            inner = (r_i - dr / 2) / (r_i * dr ** 2)
            angular = 1.0 / (r_i ** 2 * dt ** 2)
            for j in range(n_theta):
                row = index(i, j)
                rows.append(row)
                cols.append(row)
                vals.append(-outer - inner - 2 * angular + q_rings[i, j])
                rows.extend([row, row])
                cols.extend([index(i, j + 1), index(i, j - 1)])
                vals.extend([angular, angular])
                rows.append(row)
                cols.append(0 if i == 1 else index(i - 1, j))
                vals.append(inner)
                if i + 1 < n_r:
                    rows.append(row)
                    cols.append(index(i + 1, j))
                    vals.append(outer)
        matrix = sparse.coo_matrix((vals, (rows, cols)), shape=(size, size), dtype=np.complex128)
        r_last = radii[n_r - 1]
        coupling = (r_last + dr / 2) / (r_last * dr ** 2)
        return matrix, coupling

    def solve(self, f):
        """``f`` is a callable of the angle or an array of N_theta boundary values"""
        angles = 2 * math.pi * np.arange(self.n_theta) / self.n_theta
        boundary = np.asarray(f(angles) if callable(f) else f, dtype=np.complex128)
        if boundary.shape != (self.n_theta,):
            raise FieldError(f'boundary datum has shape {boundary.shape}, expected ({self.n_theta},)')
        rhs = np.zeros(1 + (self.n_r - 1) * self.n_theta, dtype=np.complex128)
        rhs[-self.n_theta:] = -self._boundary_coupling * boundary
        x = self._lu.solve(rhs)
        values = np.empty((self.n_r + 1, self.n_theta), dtype=np.complex128)
        values[0] = x[0]
        values[1:-1] = x[1:].reshape(self.n_r - 1, self.n_theta)
        values[-1] = boundary
        return PolarSolution(self.n_r, self.n_theta, values, self.q, boundary)


def solve_dirichlet(q, f, n_r, n_theta):
    return DirichletSolver(q, n_r, n_theta).solve(f)


def normal_derivative(u):
    """One-sided second-order d/dr at r = 1"""
    if u.n_r < 2:
        raise ParameterError('normal derivative needs at least 3 rings')
    v = u.values
    return (3 * v[-1] - 4 * v[-2] + v[-3]) * u.n_r / 2.0


def cauchy_pair(u):
    return CauchyPair(u.values[-1].copy(), normal_derivative(u), BoundaryGrid(u.n_theta))


# Quadrature and resampling

def integrate_polar(values, n_r):
    """int_Omega g dm for g sampled on the polar nodes (Simpson in r, trapezoid in theta)"""
    values = np.asarray(values)
    radii = np.arange(n_r + 1) / n_r
    angular = values.mean(axis=1) * 2 * math.pi
    return complex(simpson(angular * radii, x=radii))


def resample_to_grid(u, grid):
    """Bilinear (r, theta) interpolation of a polar solution onto the masked Cartesian nodes"""
    angles = np.append(u.angles, 2 * math.pi)
    values = np.concatenate([u.values, u.values[:, :1]], axis=1)
    points = grid.z[grid.mask]
    theta = np.mod(np.angle(points), 2 * math.pi)
    query = np.stack([np.abs(points), theta], axis=-1)
    out = np.zeros(grid.z.shape, dtype=np.complex128)
    for part, scale in ((values.real, 1.0), (values.imag, 1j)):
        interp = RegularGridInterpolator((u.radii, angles), part, method='linear')
        out[grid.mask] += scale * interp(query)
    return SampledField(grid, out)


@dataclass
class OrthogonalityGap:
    volume: complex
    boundary: complex
    reciprocity: tuple = field(default=None)

    def __iter__(self):
        yield self.volume
        yield self.boundary

    @property
    def gap(self):
        return abs(self.volume - self.boundary)


def orthogonality_gap(q1, q2, u1, u2):
    """
    Both sides of  int_Omega (q1 - q2) u1 u2 dm = int_circle (u1 dn u2 - u2 dn u1) dsigma.

    ``u1``/``u2`` are PolarSolutions (volume by polar quadrature) or
    (SampledField, CauchyPair) tuples (volume by the Cartesian midpoint rule).
    With q1 is q2 the reciprocity sides int u1 dn u2 and int u2 dn u1 are
    returned as well.
    """
    if isinstance(u1, PolarSolution):
        points = u1.points
        difference = q1(points) - q2(points)
        volume = integrate_polar(difference * u1.values * u2.values, u1.n_r)
        pair1, pair2 = cauchy_pair(u1), cauchy_pair(u2)
    else:
        (field1, pair1), (field2, pair2) = u1, u2
        grid = field1.grid
        difference = q1(grid.z) - q2(grid.z)
        volume = integrate_disc(SampledField(grid, difference * field1.values * field2.values))
    boundary = bilinear_form(pair1, pair2)
    reciprocity = None
    if q1 is q2:
        reciprocity = (pair1.boundary.integrate(pair1.trace * pair2.normal_deriv),
                       pair1.boundary.integrate(pair2.trace * pair1.normal_deriv))
    return OrthogonalityGap(volume, boundary, reciprocity)
