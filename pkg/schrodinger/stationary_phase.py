"""
The oscillatory operator

    T_n f(z0) = (2n/pi) int_Omega exp(i n R(z)) f(z) dm(z),
    R(z) = (z - z0)^2 + (conj z - conj z0)^2,

as a convolution with the Gaussian kernel, its Fourier-multiplier twin, and
the measurements built on them (isometry defect, convergence to f, the
z0-family remainder functional).
"""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core_grid import (
    SampledField, coarse_samples, integrate_disc, make_grid, restricted_lp_norm,
)
from .exceptions import ParameterError
from .operators import GaussianKernel

logger = logging.getLogger(__name__)


def phase_R(z, z0):
    """R = (z - z0)^2 + conj(z - z0)^2, real valued"""
    w = np.asarray(z) - z0
    return 2.0 * (w.real ** 2 - w.imag ** 2)


@dataclass(frozen=True)
class PhaseParams:
    n: float
    z0_grid: tuple = ()

    def __post_init__(self):
        if self.n <= 0:
            raise ParameterError(f'frequency n must be > 0 (got {self.n})')
        outside = [z0 for z0 in self.z0_grid if abs(z0) >= 1]
        if outside:
            raise ParameterError(f'evaluation centres must lie in the unit disc (got {outside[0]})')


def _check_n(n):
    if n <= 0:
        raise ParameterError(f'frequency n must be > 0 (got {n})')


def apply_Tn(f, n):
    """
    T_n f on every node of the padded grid: linear (non-wrapping) FFT
    convolution of the disc-supported part of f with point samples of kappa_n.
    """
    _check_n(n)
    grid = f.grid
    grid.require_padding(2)
    size = 2 * grid.total_side
    k = np.fft.fftfreq(size, d=1.0 / size) * grid.spacing
    dx, dy = np.meshgrid(k, k)
    kernel = GaussianKernel(n, grid)(dx + 1j * dy) * grid.cell_area
    padded = np.zeros((size, size), dtype=np.complex128)
    N = grid.total_side
    padded[:N, :N] = np.where(grid.mask, f.values, 0.0)
    out = np.fft.ifft2(np.fft.fft2(padded) * np.fft.fft2(kernel))[:N, :N]
    return SampledField(grid, out)


def apply_Tn_multiplier(f, n):
    """T_n f through its transform: multiply by exp(-i (xi^2 + conj(xi)^2) / (16 n))"""
    _check_n(n)
    grid = f.grid
    N = grid.total_side
    k = 2 * math.pi * np.fft.fftfreq(2 * N, d=grid.spacing)
    xi1, xi2 = np.meshgrid(k, k)
    multiplier = np.exp(-1j * 2.0 * (xi1 ** 2 - xi2 ** 2) / (16 * n))
    padded = np.zeros((2 * N, 2 * N), dtype=np.complex128)
    padded[:N, :N] = np.where(grid.mask, f.values, 0.0)
    out = np.fft.ifft2(np.fft.fft2(padded) * multiplier)[:N, :N]
    return SampledField(grid, out)


def l2_padded(field):
    """L^2 norm over the whole padded square"""
    return float(math.sqrt(field.grid.cell_area * np.sum(np.abs(field.values) ** 2)))


def isometry_defect(f, n):
    """| ||T_n f||_{L^2(padded square)} / ||f||_{L^2(Omega)} - 1 |"""
    base = restricted_lp_norm(f, 2, f.grid.mask)
    if base == 0:
        return 0.0
    return abs(l2_padded(apply_Tn(f, n)) / base - 1.0)


def isometry_table(func, n_side, n_list, pads=(2, 3)):
    """Rows (pad, n, defect) for ``func`` sampled on grids of growing padding"""
    rows = []
    for pad in pads:
        grid = make_grid(n_side, pad)
        f = SampledField.from_function(grid, func)
        for n in n_list:
            rows.append((pad, n, isometry_defect(f, n)))
    return rows


def convergence_study(f, n_list, path=None, metadata=None):
    """
    Rows (n, ||T_n f - f||_{L^2(Omega)}) for increasing n. With ``path`` the
    table is written as CSV below a ``# key=value`` comment header.
    """
    n_list = [float(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ParameterError(f'n_list must be increasing (got {n_list})')
    rows = []
    for n in n_list:
        error = restricted_lp_norm(apply_Tn(f, n) - f, 2, f.grid.mask)
        logger.info('convergence n=%g l2_error=%.6e', n, error)
        rows.append((n, error))
    if path is not None:
        write_convergence_csv(path, rows, metadata or {'grid': f.grid.n_side, 'pad': f.grid.pad_factor})
    return rows


def write_convergence_csv(path, rows, metadata):
    with open(path, 'w', newline='') as out:
        for key, value in metadata.items():
            out.write(f'# {key}={value}\n')
        writer = csv.writer(out)
        writer.writerow(['n', 'l2_error'])
        for n, error in rows:
            writer.writerow([f'{n:g}', f'{error:.17g}'])
    return path


def z0_samples(grid, min_count=200):
    points, _ = coarse_samples(grid, min_count)
    return points


def remainder_functional(q, g_family, n, grid, z0_list=None, workers=1):
    """
    Discrete L^2(Omega, z0) norm of z0 -> (2n/pi) int exp(i n R) q g_z0 dm over
    a sample of centres (each centre weighted by pi / sample size).

    ``q`` is a Potential or SampledField; ``g_family(z0)`` returns a SampledField
    or None for g = 0.
    """
    _check_n(n)
    samples = list(z0_samples(grid) if z0_list is None else z0_list)
    if not samples:
        return 0.0
    q_field = q if isinstance(q, SampledField) else q.sample(grid)

    def value(z0):
        g = g_family(z0)
        if g is None:
            return 0.0
        integrand = np.exp(1j * n * phase_R(grid.z, z0)) * q_field.values * g.values
        return (2 * n / math.pi) * integrate_disc(SampledField(grid, integrand))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(value, samples))
    else:
        values = [value(z0) for z0 in samples]
    weight = math.pi / len(samples)
    return float(math.sqrt(weight * sum(abs(v) ** 2 for v in values)))


def remainder_bound_terms(p, boundary_length=2 * math.pi):
    """
    The n-independent geometric factors in the bound on the remainder
    functional, for alpha = 1 - 2/p and a piece with the given boundary length.
    """
    if p <= 2:
        raise ParameterError(f'remainder bound needs p > 2 (got {p})')
    alpha = 1.0 - 2.0 / p
    root_pi = math.sqrt(math.pi)
    return {
        'boundary': math.sqrt(math.pi / alpha) * boundary_length / (2 * math.pi),
        'singular_area': 2 * root_pi / alpha,
        'holder_area': root_pi,
        'gradient_area': root_pi * (1 + 1 / alpha),
    }
