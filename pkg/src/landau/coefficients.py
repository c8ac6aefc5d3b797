"""Convolution coefficients a_bar = a * f, b_bar = b * f, c_bar = c * f.

The convolutions act in velocity only, independently per spatial cell.  The
kernel is tabulated once per (velocity grid, gamma) as exact cell averages
(module kernel) over the difference lattice, then applied either directly
(reference, O(n_v^{2 d_v})) or by zero-padded circular FFT convolution on a
(2 n_v)^{d_v} lattice, which reproduces the non-periodic convolution exactly
because index differences never wrap.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeInput
from .kernel import KernelParams, cell_averaged_kernel, kernel_c, kernel_divergence, kernel_matrix, SINGULAR_CELL_RADIUS
from .phase_state import DistributionField, Grid, bracket

_TABLE_CACHE = {}


def _sym_pairs(d):
    """Index pairs of the upper triangle of a d x d symmetric matrix."""
    return [(i, j) for i in range(d) for j in range(i, d)]


def kernel_tables(grid: Grid, p: KernelParams):
    """Cell-averaged kernel components on the velocity difference lattice.

    Returns (tables, fft_tables): tables is a dict name -> array over offsets
    k in [-(n_v-1), n_v-1]^{d_v} stored in circulant layout on the (2 n_v)^{d_v}
    lattice (offset k at index k mod 2 n_v); fft_tables holds their rfftn.
    """
    key = (grid.n_v, grid.d_v, round(grid.dv, 14), round(p.gamma, 14))
    if key in _TABLE_CACHE:
        return _TABLE_CACHE[key]

    d = grid.d_v
    n = grid.n_v
    dv = grid.dv
    m = 2 * n
    off = np.arange(-(n - 1), n)
    mesh = np.array(np.meshgrid(*([off] * d), indexing="ij"))
    z = mesh.reshape(d, -1).T * dv

    amat = kernel_matrix(z, p)
    r2 = np.sum(z * z, axis=-1)
    origin = r2 == 0.0
    zs = np.where(origin[:, None], 1.0, z)
    bvec = kernel_divergence(zs, p)
    cval = kernel_c(zs, p)
    bvec[origin] = 0.0
    cval[origin] = 0.0

    # Replace midpoint values by exact cell averages near the singularity.
    near = np.flatnonzero(np.sqrt(r2) < SINGULAR_CELL_RADIUS * dv)
    for idx in near:
        amat[idx] = cell_averaged_kernel(z[idx], dv, p, "matrix")
        bvec[idx] = cell_averaged_kernel(z[idx], dv, p, "divergence")
        cval[idx] = cell_averaged_kernel(z[idx], dv, p, "c")

    lattice_shape = (2 * n - 1,) * d
    tables = {}
    for i, j in _sym_pairs(d):
        tables[f"a{i}{j}"] = amat[:, i, j].reshape(lattice_shape)
    for i in range(d):
        tables[f"b{i}"] = bvec[:, i].reshape(lattice_shape)
    tables["c"] = cval.reshape(lattice_shape)

    # Circulant layout on the padded lattice and its real FFT.
    idx = off % m
    fft_tables = {}
    circ = {}
    v_axes = tuple(range(d))
    for name, tab in tables.items():
        padded = np.zeros((m,) * d)
        dest = np.ix_(*([idx] * d))
        padded[dest] = tab
        circ[name] = padded
        fft_tables[name] = np.fft.rfftn(padded, axes=v_axes)

    _TABLE_CACHE[key] = (tables, circ, fft_tables)
    return _TABLE_CACHE[key]


@dataclass
class CoefficientFields:
    """Per-cell convolution coefficients with their evaluation time."""

    time: float
    grid: Grid
    a_bar: np.ndarray  # shape + (d, d)
    b_bar: np.ndarray  # shape + (d,)
    c_bar: np.ndarray  # shape


def _validate_nonnegative(values):
    peak = float(np.max(values, initial=0.0))
    if peak > 0.0 and float(np.min(values)) < -1e-14 * peak:
        raise NegativeInput("distribution has negative values beyond round-off")
    return np.maximum(values, 0.0)


def compute_coefficients(f: DistributionField, p: KernelParams, method="fft"):
    """Convolve f with the cell-averaged kernel tables, per spatial cell."""
    grid = f.grid
    d = grid.d_v
    if d != p.d:
        raise ValueError("grid velocity dimension and kernel dimension differ")
    vals = _validate_nonnegative(f.values)
    tables, circ, fft_tables = kernel_tables(grid, p)
    n = grid.n_v
    m = 2 * n
    xshape = vals.shape[: grid.d_x]
    nxc = int(np.prod(xshape, dtype=int)) if grid.d_x else 1
    fv = vals.reshape((nxc,) + (n,) * d)
    scale = grid.dv ** d

    out = {}
    if method == "fft":
        padded = np.zeros((nxc,) + (m,) * d)
        padded[(slice(None),) + (slice(0, n),) * d] = fv
        v_axes = tuple(range(1, d + 1))
        fhat = np.fft.rfftn(padded, axes=v_axes)
        for name, that in fft_tables.items():
            conv = np.fft.irfftn(fhat * that[None], s=(m,) * d, axes=v_axes)
            out[name] = conv[(slice(None),) + (slice(0, n),) * d] * scale
    elif method == "direct":
        for name, tab in tables.items():
            acc = np.zeros_like(fv)
            it = np.ndindex(*((n,) * d))
            for j in it:
                w = fv[(slice(None),) + j]
                block = tab[tuple(slice(n - 1 - jj, m - 1 - jj) for jj in j)]
                acc += w[(slice(None),) + (None,) * d] * block[None]
            out[name] = acc * scale
    else:
        raise ValueError(f"unknown method {method!r}")

    full = vals.shape
    a_bar = np.empty(full + (d, d))
    for i, j in _sym_pairs(d):
        comp = out[f"a{i}{j}"].reshape(full)
        a_bar[..., i, j] = comp
        a_bar[..., j, i] = comp
    b_bar = np.empty(full + (d,))
    for i in range(d):
        b_bar[..., i] = out[f"b{i}"].reshape(full)
    c_bar = out["c"].reshape(full)
    return CoefficientFields(f.time, grid, a_bar, b_bar, c_bar)


def coefficient_sup_norms(coeffs: CoefficientFields, gamma):
    """Sup norms of a_bar driving the decay-rate diagnostics.

    plain:          sup <v>^-(2+gamma) max_ij |a_bar|
    weighted_down:  sup <x-tv>^-min{1,2+gamma} <v>^-max{0,1+gamma} max_ij |a_bar|
    c_sup:          sup |c_bar|
    """
    grid = coeffs.grid
    amax = np.max(np.abs(coeffs.a_bar), axis=(-2, -1))
    vb = bracket(grid.v_squared())
    plain = float(np.max(amax / vb ** (2.0 + gamma)))
    xtb = bracket(grid.x_minus_tv_squared(coeffs.time))
    wdown = amax / xtb ** min(1.0, 2.0 + gamma) / vb ** max(0.0, 1.0 + gamma)
    weighted = float(np.max(wdown))
    return {
        "plain": plain,
        "weighted_down": weighted,
        "c_sup": float(np.max(np.abs(coeffs.c_bar))),
    }
