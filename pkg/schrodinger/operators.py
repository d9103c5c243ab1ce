"""
Solid Cauchy and Beurling operators on the unit disc, the complex Gaussian
kernel and the unitary 2D Fourier transform.

All four operators are discrete convolutions with cell-centre samples of
their kernels, applied through cached FFTs of the padded grid:

    C f(z)    = (1/pi) int f(xi) / (z - xi)           dm(xi)
    Cbar f(z) = (1/pi) int f(xi) / (conj z - conj xi) dm(xi)
    Pi f(z)   = -(1/pi) p.v. int f(xi) / (z - xi)^2   dm(xi)

The self-cell of every kernel contributes 0 (odd symmetry over a centred
square cell). With an FFT the size of the padded grid the result is exact
(no wrap-around) on the box |x|, |y| < pad_factor - 1, which for pad 2 is
[-1, 1]^2. ``extended=True`` doubles the FFT size and makes every node of
the padded grid valid.
"""
import logging
import math
import threading
from functools import lru_cache

import numpy as np
from scipy.ndimage import gaussian_filter

from .core_grid import (
    SampledField, d_dz, d_dzbar, holder_norm_estimate, lp_norm, restricted_lp_norm,
)
from .exceptions import GridError, ParameterError

logger = logging.getLogger(__name__)

KERNELS = ('cauchy', 'conj_cauchy', 'beurling', 'conj_beurling')


def _offsets(size, spacing):
    k = np.fft.fftfreq(size, d=1.0 / size)
    dx, dy = np.meshgrid(k * spacing, k * spacing)
    return dx + 1j * dy


def _kernel_samples(name, d):
    with np.errstate(divide='ignore', invalid='ignore'):
        if name == 'cauchy':
            k = 1.0 / (math.pi * d)
        elif name == 'conj_cauchy':
            k = 1.0 / (math.pi * np.conj(d))
        elif name == 'beurling':
            k = -1.0 / (math.pi * d ** 2)
        elif name == 'conj_beurling':
            k = -1.0 / (math.pi * np.conj(d) ** 2)
        else:
            raise ValueError(f'unknown kernel {name}')
    k[0, 0] = 0.0
    return k


class OperatorWorkspace:
    """Cached kernel transforms for one grid; safe to share read-only"""

    def __init__(self, grid):
        grid.require_padding(2)
        self.grid = grid
        self._hats = {}

    def _kernel_hat(self, name, extended):
        key = (name, extended)
        if key not in self._hats:
            size = self.grid.total_side * (2 if extended else 1)
            d = _offsets(size, self.grid.spacing)
            self._hats[key] = np.fft.fft2(self.grid.cell_area * _kernel_samples(name, d))
            logger.debug('Built %s kernel transform (%d x %d)', name, size, size)
        return self._hats[key]

    def prepare(self, extended=False):
        """Build every kernel transform up front; call before sharing across threads"""
        for name in KERNELS:
            self._kernel_hat(name, extended)
        return self

    @property
    def valid_half_width(self):
        return self.grid.half_width - 1.0

    @property
    def valid_mask(self):
        w = self.valid_half_width
        z = self.grid.z
        return (np.abs(z.real) < w) & (np.abs(z.imag) < w)

    def apply(self, name, f, extended=False):
        """Convolve the disc-supported part of ``f`` with one of the four kernels"""
        if f.grid != self.grid:
            raise GridError(f'field on {f.grid} applied with a workspace for {self.grid}')
        values = np.where(self.grid.mask, f.values, 0.0)
        hat = self._kernel_hat(name, extended)
        n = self.grid.total_side
        if extended:
            padded = np.zeros((2 * n, 2 * n), dtype=np.complex128)
            padded[:n, :n] = values
            out = np.fft.ifft2(np.fft.fft2(padded) * hat)[:n, :n]
        else:
            out = np.fft.ifft2(np.fft.fft2(values) * hat)
        return SampledField(self.grid, out)

    def cauchy(self, f, extended=False):
        return self.apply('cauchy', f, extended)

    def conj_cauchy(self, f, extended=False):
        return self.apply('conj_cauchy', f, extended)

    def beurling(self, f, variant='pi', extended=False):
        if variant not in ('pi', 'pibar'):
            raise ParameterError(f"beurling variant must be 'pi' or 'pibar' (got {variant!r})")
        return self.apply('beurling' if variant == 'pi' else 'conj_beurling', f, extended)

    def adjoint(self, name, f):
        """
        Adjoint with respect to int_Omega f conj(g) dm:
        C* = -Cbar, Cbar* = -C, Pi* = Pibar, Pibar* = Pi.
        """
        if name == 'cauchy':
            return -self.conj_cauchy(f).masked()
        if name == 'conj_cauchy':
            return -self.cauchy(f).masked()
        if name == 'beurling':
            return self.beurling(f, 'pibar').masked()
        if name == 'conj_beurling':
            return self.beurling(f, 'pi').masked()
        raise ValueError(f'unknown kernel {name}')


_workspace_lock = threading.Lock()


@lru_cache(maxsize=8)
def _cached_workspace(grid):
    return OperatorWorkspace(grid)


def workspace_for(grid):
    """Shared workspace per grid; the eight most recent grids are kept"""
    with _workspace_lock:
        return _cached_workspace(grid)


def cauchy(f):
    return workspace_for(f.grid).cauchy(f)


def conj_cauchy(f):
    return workspace_for(f.grid).conj_cauchy(f)


def beurling(f, variant='pi'):
    return workspace_for(f.grid).beurling(f, variant)


# Gaussian kernel and Fourier transform

class GaussianKernel:
    """kappa_n(z) = (2n/pi) exp(i n (z^2 + conj(z)^2)) sampled on a grid"""

    def __init__(self, n, grid):
        if n == 0:
            raise ParameterError('Gaussian kernel needs n != 0')
        self.n = float(n)
        self.grid = grid

    def __call__(self, z):
        z = np.asarray(z)
        return (2 * self.n / math.pi) * np.exp(1j * self.n * 2.0 * (z.real ** 2 - z.imag ** 2))

    def sample(self):
        return SampledField(self.grid, self(self.grid.z))

    def windowed(self, flat=1.0, taper=2.0):
        """
        Samples times a separable smooth window equal to 1 on |x|, |y| <= flat
        and 0 beyond flat + taper. Used for transform checks on a finite box.
        """
        from .cgo import smooth_step

        def window(t):
            return smooth_step(1.0 + (np.abs(t) - flat) / taper)

        z = self.grid.z
        return SampledField(self.grid, self(z) * window(z.real) * window(z.imag))

    def hat(self, xi):
        return gaussian_kernel_hat(self.n, xi)


def gaussian_kernel_hat(n, xi):
    """Closed-form transform (sgn n / 2pi) exp(-i (xi^2 + conj(xi)^2) / (16 n))"""
    if n == 0:
        raise ParameterError('Gaussian kernel transform needs n != 0')
    xi = np.asarray(xi, dtype=np.complex128)
    return np.sign(n) / (2 * math.pi) * np.exp(-1j * 2.0 * (xi.real ** 2 - xi.imag ** 2) / (16 * n))


def frequencies(grid):
    """Angular frequencies (xi_1 + i xi_2) matching ``np.fft.fft2`` ordering"""
    k = 2 * math.pi * np.fft.fftfreq(grid.total_side, d=grid.spacing)
    kx, ky = np.meshgrid(k, k)
    return kx + 1j * ky


def fourier_transform(f):
    """
    Unitary transform (1/2pi) int f(x) exp(-i x.xi) dm(x) by the midpoint
    rule over the whole padded grid. Returns (values, frequencies) in FFT order.
    """
    grid = f.grid
    xi = frequencies(grid)
    x0 = grid.axis[0]
    phase = np.exp(-1j * (xi.real * x0 + xi.imag * x0))
    return grid.cell_area / (2 * math.pi) * phase * np.fft.fft2(f.values), xi


def inverse_fourier_transform(values, grid):
    xi = frequencies(grid)
    x0 = grid.axis[0]
    phase = np.exp(-1j * (xi.real * x0 + xi.imag * x0))
    return SampledField(grid, np.fft.ifft2(values / (grid.cell_area / (2 * math.pi) * phase)))


# Empirical operator constants

def smooth_probe(grid, rng, smoothing=2.0):
    """Random complex field, Gaussian-smoothed over ``smoothing`` cells, supported in the disc"""
    shape = (grid.total_side, grid.total_side)
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    values = gaussian_filter(noise.real, smoothing) + 1j * gaussian_filter(noise.imag, smoothing)
    return SampledField(grid, np.where(grid.mask, values, 0.0))


def _dual(field, p):
    """Norming functional of ``field`` in L^p, as an L^{p'} field of unit norm"""
    norm = lp_norm(field, p)
    if norm == 0:
        return field
    v = field.values
    modulus = np.abs(v)
    phase = np.where(modulus > 0, v / np.where(modulus > 0, modulus, 1.0), 0.0)
    return SampledField(field.grid, modulus ** (p - 1) * phase / norm ** (p - 1))


def estimate_operator_norm(name, grid, p, probes=3, iterations=12, seed=0, workspace=None):
    """
    Lower estimate of the L^p(Omega) operator norm by the p-norm power method
    (alternating the operator with its adjoint and the duality maps).
    """
    if p <= 1:
        raise ParameterError(f'operator norm estimate needs p > 1 (got {p})')
    workspace = workspace or workspace_for(grid)
    q = p / (p - 1)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(probes):
        x = smooth_probe(grid, rng)
        x = x / lp_norm(x, p)
        for _ in range(iterations):
            y = workspace.apply(name, x).masked()
            ratio = lp_norm(y, p)
            best = max(best, ratio)
            z = workspace.adjoint(name, _dual(y, p))
            x = _dual(z, q)
            norm = lp_norm(x, p)
            if norm == 0:
                break
            x = x / norm
    logger.debug('Operator %s: L^%g norm estimate %.4f', name, p, best)
    return best


def estimate_holder_constant(grid, p, probes=6, seed=0, workspace=None):
    """Largest sampled ratio ||C f||_alpha / ||f||_p over smooth random probes, alpha = 1 - 2/p"""
    if p <= 2:
        raise ParameterError(f'Hölder bound needs p > 2 (got {p})')
    workspace = workspace or workspace_for(grid)
    alpha = 1.0 - 2.0 / p
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(probes):
        f = smooth_probe(grid, rng)
        image = workspace.cauchy(f).masked()
        best = max(best, holder_norm_estimate(image, alpha, long_range_pairs=4000, seed=seed)
                   / lp_norm(f, p))
    return best


def operator_constants(grid, p, seed=0):
    """C_p, B_p and C_alpha estimates for one grid"""
    workspace = workspace_for(grid)
    return {
        'C_p': estimate_operator_norm('cauchy', grid, p, seed=seed, workspace=workspace),
        'B_p': estimate_operator_norm('beurling', grid, p, seed=seed, workspace=workspace),
        'C_alpha': estimate_holder_constant(grid, p, seed=seed, workspace=workspace),
    }


def identity_defects(f, interior_cells=2):
    """
    Relative L^2 defects of dbar C = id, d Cbar = id and d C = Pi for a
    smooth disc-supported ``f``, measured with centred differences on nodes
    ``interior_cells`` inside the circle.
    """
    workspace = workspace_for(f.grid)
    region = f.grid.interior_mask(interior_cells)
    scale = restricted_lp_norm(f, 2, region)
    if scale == 0:
        raise ParameterError('identity defects need a nonzero field')
    c = workspace.cauchy(f)
    pi = workspace.beurling(f)

    def relative(a, b):
        return restricted_lp_norm(a - b, 2, region) / scale

    return {
        'dbar_cauchy': relative(d_dzbar(c), f),
        'd_conj_cauchy': relative(d_dz(workspace.conj_cauchy(f)), f),
        'beurling_d_cauchy': restricted_lp_norm(d_dz(c) - pi, 2, region) / restricted_lp_norm(pi, 2, region),
    }
