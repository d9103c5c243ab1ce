"""
Potential catalog.

A Potential is evaluated pointwise on complex coordinate arrays so the same
object feeds the Cartesian grid (operators, CGO solver) and the polar grid
(forward solver). Values outside the closed unit disc are always zero; the
boundary circle keeps its values so polar quadrature sees the r = 1 ring.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import ndtr

from .core_grid import SampledField, read_field
from .exceptions import PotentialError

logger = logging.getLogger(__name__)

# r = 1 polar nodes land a few ulp either side of 1
CLOSED_DISC_RADIUS = 1.0 + 1e-12


def bump(z, center=0.0, radius=0.6, height=1.0):
    """C-infinity bump: height at ``center``, zero for |z - center| >= radius"""
    s = np.abs(np.asarray(z) - center) ** 2 / radius ** 2
    inside = s < 1
    out = np.zeros(np.shape(s), dtype=np.complex128)
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - s[inside]))
    return out


def smoothed_half_disc(z, width, radius=0.7):
    """
    Indicator of {Re z > 0, |z| < radius} mollified with a Gaussian of
    standard deviation ``width`` (closed form per edge).
    """
    z = np.asarray(z)
    values = ndtr(z.real / width) * ndtr((radius - np.abs(z)) / width)
    return values.astype(np.complex128)


@dataclass(frozen=True)
class Potential:
    name: str
    func: object
    pieces: tuple = ('disc',)
    description: str = ''
    scale: complex = 1.0
    is_zero: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.is_zero:
            return np.zeros(z.shape, dtype=np.complex128)
        values = self.scale * np.asarray(self.func(z), dtype=np.complex128) * np.ones(z.shape)
        return np.where(np.abs(z) <= CLOSED_DISC_RADIUS, values, 0.0)

    def sample(self, grid):
        return SampledField(grid, self(grid.z))

    def scaled(self, factor):
        return replace(self, name=f'{factor:g}*{self.name}', scale=self.scale * factor,
                       is_zero=self.is_zero or factor == 0)

    def translated(self, shift):
        func = self.func
        return replace(self, name=f'{self.name}@{shift:g}', func=lambda z: func(z - shift))

    def sup_estimate(self, grid):
        return float(np.abs(self(grid.z[grid.mask])).max(initial=0.0))

    def __str__(self):
        return self.name


def zero_potential():
    return Potential('zero', lambda z: 0.0, description='q = 0', is_zero=True)


def bump_potential(center=0.0, radius=0.6, height=1.0):
    return Potential(
        'bump',
        lambda z: bump(z, center, radius),
        description=f'smooth bump at {center:g}, radius {radius:g}',
        scale=height,
        params={'center': center, 'radius': radius},
    )


def half_disc_potential(width=0.03, radius=0.7, height=1.0):
    return Potential(
        'half_disc',
        lambda z: smoothed_half_disc(z, width, radius),
        pieces=('half_disc', 'complement'),
        description=f'half-disc indicator mollified at scale {width:g}',
        scale=height,
        params={'width': width, 'radius': radius},
    )


def constant_potential(value):
    return Potential('constant', lambda z: value, description=f'q = {value:g} on the disc',
                     is_zero=value == 0, params={'value': value})


def sampled_potential(field, name=None):
    """Bilinear interpolation of imported samples, zero outside the grid"""
    grid = field.grid
    re = RegularGridInterpolator((grid.axis, grid.axis), field.values.real,
                                 bounds_error=False, fill_value=0.0)
    im = RegularGridInterpolator((grid.axis, grid.axis), field.values.imag,
                                 bounds_error=False, fill_value=0.0)

    def func(z):
        points = np.stack([z.imag.ravel(), z.real.ravel()], axis=-1)
        return (re(points) + 1j * im(points)).reshape(z.shape)

    return Potential(name or 'samples', func, description=f'samples on {grid}',
                     params={'grid': str(grid)})


CATALOG = {
    'zero': zero_potential,
    'bump': bump_potential,
    'offset_bump': lambda: bump_potential(center=0.25 - 0.15j, radius=0.5),
    'complex_bump': lambda: bump_potential(height=1.0 + 0.5j),
    'half_disc': half_disc_potential,
    'constant': lambda: constant_potential(-1.0),
}


def get_potential(name, grid=None):
    """
    Catalog entry by name, or a BKGRID1 file path. The half-disc fixture is
    mollified at two grid spacings when a grid is given.
    """
    if name in CATALOG:
        if name == 'half_disc' and grid is not None:
            return half_disc_potential(width=2 * grid.spacing)
        return CATALOG[name]()
    path = Path(name)
    if path.exists():
        logger.info('Loading potential samples from %s', path)
        try:
            return sampled_potential(read_field(path), name=path.stem)
        except ValueError as e:
            raise PotentialError(f'{path}: {e}') from e
    raise PotentialError(
        f"unknown potential '{name}' (catalog: {', '.join(sorted(CATALOG))}, or a BKGRID1 file)"
    )
