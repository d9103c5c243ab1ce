"""
Cartesian sampling of the unit disc inside a padded square.

A grid with ``n_side`` nodes per unit-disc diameter and padding factor ``K``
covers [-K, K]^2 with ``K * n_side`` cell-centred nodes per side. Arrays are
indexed ``values[i, j]`` with row ``i`` running along y and column ``j``
along x (row-major, y-major), so ``grid.z[i, j] = x_j + 1j * y_i``.

Quadrature is the midpoint rule over masked nodes (|z| < 1, binary mask).
"""
import csv
import logging
import math
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .exceptions import FieldError, GridError, ParameterError

logger = logging.getLogger(__name__)

FIELD_MAGIC = b'BKGRID1'


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centred grid on [-L, L]^2 with L = pad_factor"""
    n_side: int
    pad_factor: int = 2

    def __post_init__(self):
        if self.n_side <= 0 or self.pad_factor <= 0:
            raise GridError(
                f'n_side and pad_factor must be positive (got {self.n_side}, {self.pad_factor})'
            )
        if self.n_side < 4:
            raise GridError(f'n_side must be at least 4 (got {self.n_side})')
        if self.n_side % 2:
            raise GridError(f'n_side must be even so [-1, 1] is tiled exactly (got {self.n_side})')

    @property
    def half_width(self):
        return float(self.pad_factor)

    @property
    def total_side(self):
        return self.n_side * self.pad_factor

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.total_side

    @property
    def node_count(self):
        return self.total_side ** 2

    @property
    def cell_area(self):
        return self.spacing ** 2

    @cached_property
    def axis(self):
        h = self.spacing
        return -self.half_width + (np.arange(self.total_side) + 0.5) * h

    @cached_property
    def z(self):
        x, y = np.meshgrid(self.axis, self.axis)
        return x + 1j * y

    @cached_property
    def mask(self):
        return np.abs(self.z) < 1.0

    @cached_property
    def inner_slice(self):
        """Index range of the nodes covering [-1, 1] along one axis"""
        start = (self.total_side - self.n_side) // 2
        return slice(start, start + self.n_side)

    def interior_mask(self, cells):
        """Masked nodes at distance more than ``cells`` spacings from the boundary"""
        return np.abs(self.z) < 1.0 - cells * self.spacing

    def nearest_index(self, point):
        """(row, column) of the node closest to a complex point"""
        h = self.spacing
        j = int(np.clip(np.floor((point.real + self.half_width) / h), 0, self.total_side - 1))
        i = int(np.clip(np.floor((point.imag + self.half_width) / h), 0, self.total_side - 1))
        return i, j

    def require_padding(self, minimum=2):
        if self.pad_factor < minimum:
            raise GridError(
                f'operation needs pad_factor >= {minimum} to avoid wrap-around (got {self.pad_factor})'
            )

    def __str__(self):
        return f'GridSpec(n_side={self.n_side}, pad={self.pad_factor}, h={self.spacing:g})'


def make_grid(n_side, pad_factor=2):
    return GridSpec(int(n_side), int(pad_factor))


class SampledField:
    """Complex samples of a function at every node of a grid"""

    __slots__ = ('grid', 'values')

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=np.complex128)
        shape = (grid.total_side, grid.total_side)
        if values.shape != shape:
            raise FieldError(f'field shape {values.shape} does not match grid {shape}')
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.total_side, grid.total_side), dtype=np.complex128))

    @classmethod
    def from_function(cls, grid, func, supported=True):
        """Sample ``func(z)``; with ``supported`` the result is zero outside the disc"""
        values = np.asarray(func(grid.z), dtype=np.complex128) * np.ones(grid.z.shape)
        if supported:
            values = np.where(grid.mask, values, 0.0)
        return cls(grid, values)

    def masked(self):
        return SampledField(self.grid, np.where(self.grid.mask, self.values, 0.0))

    def conj(self):
        return SampledField(self.grid, np.conj(self.values))

    def _other(self, other):
        if isinstance(other, SampledField):
            if other.grid != self.grid:
                raise FieldError(f'cannot combine fields on {self.grid} and {other.grid}')
            return other.values
        return other

    def __add__(self, other):
        return SampledField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledField(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return SampledField(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return SampledField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SampledField(self.grid, self.values / self._other(other))

    def __neg__(self):
        return SampledField(self.grid, -self.values)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f'SampledField({self.grid}, max|f|={np.abs(self.values).max():.3g})'

    def at(self, point):
        """Value at the node nearest to ``point``"""
        return self.values[self.grid.nearest_index(point)]


# Quadrature and norms

def integrate_disc(field):
    """Midpoint rule for the integral over the unit disc"""
    grid = field.grid
    return complex(grid.cell_area * field.values[grid.mask].sum())


def lp_norm(field, p):
    if p != math.inf and p < 1:
        raise ParameterError(f'L^p norm needs p >= 1 (got {p})')
    moduli = np.abs(field.values[field.grid.mask])
    if p == math.inf:
        return float(moduli.max(initial=0.0))
    return float((field.grid.cell_area * np.sum(moduli ** p)) ** (1.0 / p))


def sup_norm(field):
    return lp_norm(field, math.inf)


def holder_seminorm_estimate(field, alpha, neighborhood=3, long_range_pairs=20000, seed=0):
    """
    Lower estimate of sup |f(z0) - f(z1)| / |z0 - z1|^alpha over masked nodes.

    Pairs sampled: every pair within ``neighborhood`` nodes of each other, plus
    ``long_range_pairs`` random pairs drawn with a fixed seed.
    """
    if not 0 < alpha <= 1:
        raise ParameterError(f'Hölder exponent must lie in (0, 1] (got {alpha})')
    grid = field.grid
    values = field.values
    mask = grid.mask
    h = grid.spacing
    best = 0.0
    rows, cols = values.shape
    for di in range(0, neighborhood + 1):
        for dj in range(-neighborhood, neighborhood + 1):
            if di == 0 and dj <= 0:
                continue
            # pair (i, j) with (i + di, j + dj)
            width = cols - abs(dj)
            src = (slice(0, rows - di), slice(max(0, -dj), max(0, -dj) + width))
            dst = (slice(di, rows), slice(max(0, dj), max(0, dj) + width))
            both = mask[src] & mask[dst]
            if not both.any():
                continue
            diffs = np.abs(values[dst][both] - values[src][both])
            distance = h * math.hypot(di, dj)
            best = max(best, float(diffs.max()) / distance ** alpha)
    if long_range_pairs:
        points = grid.z[mask]
        samples = values[mask]
        rng = np.random.default_rng(seed)
        a = rng.integers(0, points.size, long_range_pairs)
        b = rng.integers(0, points.size, long_range_pairs)
        keep = a != b
        distance = np.abs(points[a[keep]] - points[b[keep]])
        quotients = np.abs(samples[a[keep]] - samples[b[keep]]) / distance ** alpha
        if quotients.size:
            best = max(best, float(quotients.max()))
    return best


def holder_norm_estimate(field, alpha, **kwargs):
    """sup norm plus the sampled seminorm, the norm the fixed-point space uses"""
    return sup_norm(field) + holder_seminorm_estimate(field, alpha, **kwargs)


def singular_power_integral(grid, z0, beta):
    """
    Midpoint rule for the integral of |z - z0|^(-beta) over the disc.

    Cells whose centres lie within one spacing of z0 are replaced by the
    closed-form integral over a disc centred at z0 with the same total area.
    """
    if not 0 < beta < 2:
        raise ParameterError(f'singular exponent must lie in (0, 2) (got {beta})')
    if abs(z0) >= 1:
        raise ParameterError(f'z0 must lie in the unit disc (got {z0})')
    distance = np.abs(grid.z - z0)
    with np.errstate(divide='ignore'):
        samples = np.where(grid.mask, distance ** (-beta), 0.0)
    near = grid.mask & (distance < grid.spacing)
    samples[near] = 0.0
    radius = grid.spacing * math.sqrt(max(int(near.sum()), 1) / math.pi)
    singular_cell = 2.0 * math.pi * radius ** (2.0 - beta) / (2.0 - beta)
    return float(grid.cell_area * samples.sum() + singular_cell)


def coarse_samples(grid, min_count=200):
    """
    Evaluation centres z0 for L^2(Omega, z0) norms: the masked nodes of the
    coarsest sub-lattice (stride over the inner nodes) with at least
    ``min_count`` members. Returns (points, (rows, cols)).
    """
    inner = grid.inner_slice
    best = None
    for stride in range(grid.n_side // 2, 0, -1):
        offset = (grid.n_side % stride) // 2 + stride // 2
        idx = np.arange(inner.start + offset, inner.stop, stride)
        rows, cols = np.meshgrid(idx, idx, indexing='ij')
        keep = grid.mask[rows, cols]
        if keep.sum() >= min_count:
            best = rows[keep], cols[keep]
            break
    if best is None:
        rows, cols = np.nonzero(grid.mask)
        best = rows, cols
    return grid.z[best], best


# Centred finite differences

def d_dx(field):
    v = field.values
    out = np.zeros_like(v)
    out[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2 * field.grid.spacing)
    return SampledField(field.grid, out)


def d_dy(field):
    v = field.values
    out = np.zeros_like(v)
    out[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2 * field.grid.spacing)
    return SampledField(field.grid, out)


def d_dz(field):
    """Wirtinger derivative d/dz = (d/dx - i d/dy) / 2"""
    return SampledField(field.grid, 0.5 * (d_dx(field).values - 1j * d_dy(field).values))


def d_dzbar(field):
    """Wirtinger derivative d/dzbar = (d/dx + i d/dy) / 2"""
    return SampledField(field.grid, 0.5 * (d_dx(field).values + 1j * d_dy(field).values))


def laplacian_5pt(field):
    v = field.values
    h2 = field.grid.spacing ** 2
    out = np.zeros_like(v)
    out[1:-1, 1:-1] = (
        v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2] - 4 * v[1:-1, 1:-1]
    ) / h2
    return SampledField(field.grid, out)


def restricted_lp_norm(field, p, region):
    """L^p norm over an arbitrary node subset (boolean array)"""
    if p != math.inf and p < 1:
        raise ParameterError(f'L^p norm needs p >= 1 (got {p})')
    moduli = np.abs(field.values[region])
    if p == math.inf:
        return float(moduli.max(initial=0.0))
    return float((field.grid.cell_area * np.sum(moduli ** p)) ** (1.0 / p))


# Field files

def write_field(path, field):
    """BKGRID1: magic, n_side and pad_factor as <u4, then <f8 re/im pairs row-major"""
    path = Path(path)
    grid = field.grid
    with open(path, 'wb') as f:
        f.write(FIELD_MAGIC)
        f.write(struct.pack('<II', grid.n_side, grid.pad_factor))
        f.write(np.ascontiguousarray(field.values, dtype='<c16').tobytes())
    return path


def read_field(path):
    with open(path, 'rb') as f:
        payload = f.read()
    if not payload.startswith(FIELD_MAGIC):
        raise FieldError(f'{path}: not a BKGRID1 field file')
    offset = len(FIELD_MAGIC)
    if len(payload) < offset + 8:
        raise FieldError(f'{path}: truncated header')
    n_side, pad_factor = struct.unpack_from('<II', payload, offset)
    grid = make_grid(n_side, pad_factor)
    body = payload[offset + 8:]
    expected = grid.node_count * 16
    if len(body) != expected:
        raise FieldError(f'{path}: expected {expected} payload bytes, found {len(body)}')
    values = np.frombuffer(body, dtype='<c16').reshape(grid.total_side, grid.total_side)
    return SampledField(grid, values.astype(np.complex128))


def export_csv(path, field, masked_only=False):
    grid = field.grid
    selection = grid.mask if masked_only else np.ones_like(grid.mask)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['x', 'y', 're', 'im'])
        for point, value in zip(grid.z[selection], field.values[selection]):
            writer.writerow([f'{point.real:.17g}', f'{point.imag:.17g}',
                             f'{value.real:.17g}', f'{value.imag:.17g}'])
    return Path(path)
