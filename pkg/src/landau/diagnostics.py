"""Norms, hierarchy constants, decay-rate fits, and convergence diagnostics.

The derivative hierarchy constants (M_max, M_int, zeta_k, theta_k, p_*, p_**)
are gamma-dependent integers/exponents controlling how much time growth and
velocity weight each derivative order costs.  The decay diagnostics turn
(1+t)^-r predictions into least-squares slopes of log value vs log(1+t).
"""

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import (GammaOutOfRange, GridMismatch, InsufficientPoints,
                     NonPositiveValue, OrderTooHigh)
from .phase_state import DistributionField, WeightSpec, bracket

K_DIAG_DEFAULT = 2


@dataclass(frozen=True)
class HierarchyParams:
    gamma: float
    delta: float
    M_max: int
    M_int: int
    zeta: tuple      # indexed k = 0 .. M_max-4
    theta: tuple
    p_star: float    # may be inf
    p_star_star: float


def hierarchy_params(gamma):
    """All gamma-dependent hierarchy constants.

    M_max = 2 + 2 ceil(2/(2+gamma) + 4) on (-2,-1], 2 + 2 ceil(1/|gamma| + 4)
    on (-1,0); M_int drops the ceiling term once.  zeta_k/theta_k interpolate
    from 0 at k <= M_int to (3/2, 1) at k = M_max - 4.
    """
    if not (-2.0 < gamma < 0.0):
        raise GammaOutOfRange(f"gamma={gamma} not in (-2, 0)")
    soft = gamma <= -1.0
    step = math.ceil(2.0 / (2.0 + gamma) + 4.0) if soft else math.ceil(1.0 / abs(gamma) + 4.0)
    m_max = 2 + 2 * step
    m_int = m_max - step
    delta = min((2.0 + gamma) / 4.0, 0.1)

    top = m_max - 4
    zeta = [0.0] * (top + 1)
    theta = [0.0] * (top + 1)
    for k in range(m_int + 1, top):
        if soft:
            zeta[k] = max(0.0, 1.5 - (3.0 * (2.0 + gamma) / 4.0) * (top - k))
        elif k == top - 1:
            zeta[k] = 0.75
            theta[k] = 1.0 + gamma
        else:
            theta[k] = max(0.0, 1.0 + (top - k) * gamma)
    zeta[top] = 1.5
    theta[top] = 1.0

    if gamma >= -1.0:
        p_star = math.inf
    else:
        p_star = -15.0 / (4.0 * (gamma + 1.0))
    p_star_star = -15.0 / (4.0 * gamma) if gamma >= -1.5 else 2.0

    return HierarchyParams(gamma, delta, m_max, m_int, tuple(zeta), tuple(theta),
                           p_star, p_star_star)


@dataclass
class DiagnosticRecord:
    """One timestamped row of run diagnostics."""

    t: float
    mass: float
    momentum: list
    energy: float
    rho_sup: float
    m_sup: float
    e_sup: float
    E_norms: dict
    Z_norms: dict
    a_bar_plain_sup: float
    a_bar_weighted_sup: float
    c_bar_sup: float
    null_term_sup: float
    sharp_diff_vs_t0: float
    h_value: float
    clipped_mass: float


def _diff(values, spacing, axis, order):
    out = values
    for _ in range(order):
        out = np.gradient(out, spacing, axis=axis, edge_order=2)
    return out


def apply_derivatives(f: DistributionField, alpha, beta, sigma):
    """d_x^alpha d_v^beta Y^sigma of a field, Y_a = t d_x_a + d_v_a.

    alpha indexes spatial axes (length d_x), beta and sigma velocity axes
    (length d_v); for an axis without a spatial partner, Y reduces to d_v.
    Centered differences throughout.
    """
    grid = f.grid
    alpha = tuple(alpha) + (0,) * (grid.d_x - len(tuple(alpha)))
    beta = tuple(beta) + (0,) * (grid.d_v - len(tuple(beta)))
    sigma = tuple(sigma) + (0,) * (grid.d_v - len(tuple(sigma)))
    out = f.values
    for a, order in enumerate(sigma):
        for _ in range(order):
            term = _diff(out, grid.dv, grid.d_x + a, 1)
            if a < grid.d_x:
                term = term + f.time * _diff(out, grid.dx, a, 1)
            out = term
    for a, order in enumerate(beta):
        if order:
            out = _diff(out, grid.dv, grid.d_x + a, order)
    for a, order in enumerate(alpha):
        if order:
            out = _diff(out, grid.dx, a, order)
    return out


def _total(idx):
    return int(sum(idx))


def z_norm(g: DistributionField, orders, hp: HierarchyParams, zeta=0.0, theta=0.0,
           k_max=K_DIAG_DEFAULT):
    """Weighted sup norm of one derivative of g.

    sup (1+t)^(-zeta-|beta|) <v>^(1-theta) <x-tv>^(M_max+5-|sigma|) |D g|.
    """
    alpha, beta, sigma = orders
    if _total(alpha) + _total(beta) + _total(sigma) > k_max:
        raise OrderTooHigh("derivative order exceeds the diagnostic cap")
    grid = g.grid
    dg = apply_derivatives(g, alpha, beta, sigma)
    vb = bracket(grid.v_squared())
    xtb = bracket(grid.x_minus_tv_squared(g.time))
    w = vb ** (1.0 - theta) * xtb ** (hp.M_max + 5 - _total(sigma))
    pref = (1.0 + g.time) ** (-zeta - _total(beta))
    return float(pref * np.max(w * np.abs(dg)))


def e_norm(g: DistributionField, orders, hp: HierarchyParams, k_max=K_DIAG_DEFAULT):
    """Fixed-time weighted L2 piece and the instantaneous L2_t integrand.

    Returns ((1+T)^-|beta| ||<x-tv>^(M_max+5-|sigma|) D g||_L2, integrand) where
    integrand is the squared norm ||(1+t)^(-1/2-delta/2) <v> (same) D g||^2 to
    be accumulated in t by ENormAccumulator.
    """
    alpha, beta, sigma = orders
    if _total(alpha) + _total(beta) + _total(sigma) > k_max:
        raise OrderTooHigh("derivative order exceeds the diagnostic cap")
    grid = g.grid
    dg = apply_derivatives(g, alpha, beta, sigma)
    xtb = bracket(grid.x_minus_tv_squared(g.time))
    w = xtb ** (hp.M_max + 5 - _total(sigma))
    vol = grid.cell_volume
    fixed = (1.0 + g.time) ** (-_total(beta)) * math.sqrt(float(np.sum((w * dg) ** 2)) * vol)
    vb = bracket(grid.v_squared())
    integrand = (1.0 + g.time) ** (-1.0 - hp.delta) * float(np.sum((vb * w * dg) ** 2)) * vol
    return fixed, integrand


class ENormAccumulator:
    """Trapezoid accumulator for the time-integrated energy piece."""

    def __init__(self):
        self._last_t = None
        self._last_val = None
        self.total = 0.0

    def add(self, t, integrand):
        if self._last_t is not None:
            self.total += 0.5 * (t - self._last_t) * (integrand + self._last_val)
        self._last_t = t
        self._last_val = integrand

    @property
    def value(self):
        return math.sqrt(self.total)


def macroscopic_fields(f: DistributionField):
    """Mass, momentum and energy densities per spatial cell, with sup norms."""
    grid = f.grid
    scale = grid.dv ** grid.d_v
    v_axes = tuple(range(grid.d_x, grid.d_x + grid.d_v))
    rho = np.sum(f.values, axis=v_axes) * scale
    v = grid.v_axis()
    m = []
    vsq = np.zeros(f.values.shape)
    for a in range(grid.d_v):
        shp = [1] * f.values.ndim
        shp[grid.d_x + a] = grid.n_v
        va = v.reshape(shp)
        m.append(np.sum(f.values * va, axis=v_axes) * scale)
        vsq = vsq + va ** 2
    e = 0.5 * np.sum(f.values * vsq, axis=v_axes) * scale
    m = np.stack(m, axis=-1)
    return {
        "rho": rho,
        "m": m,
        "e": e,
        "rho_sup": float(np.max(np.abs(rho))),
        "m_sup": float(np.max(np.abs(m))),
        "e_sup": float(np.max(np.abs(e))),
    }


def fit_decay_rate(series, window=None):
    """Least-squares slope of log(value) against log(1+t) inside the window."""
    pts = [(float(t), float(v)) for t, v in series]
    if window is not None:
        lo, hi = window
        pts = [(t, v) for t, v in pts if lo <= t <= hi]
    if len(pts) < 5:
        raise InsufficientPoints(f"{len(pts)} points in window, need >= 5")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(v <= 0.0):
        raise NonPositiveValue("decay fit needs positive values")
    x = np.log1p(t)
    y = np.log(v)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return float(slope), float(math.sqrt(max(cov[0, 0], 0.0)))


def null_structure_gain(plain_series, weighted_series, window=None):
    """slope(plain a_bar sup) - slope(weighted a_bar sup); predicted >= min{2+gamma, 1}."""
    sp, _ = fit_decay_rate(plain_series, window)
    sw, _ = fit_decay_rate(weighted_series, window)
    return sp - sw


def sharp_cauchy_diff(f_sharp_1: DistributionField, f_sharp_2: DistributionField,
                      v_power=2, x_power=2.0):
    """sup <v>^l <x>^m |f_sharp(T1) - f_sharp(T2)| on a common grid."""
    if f_sharp_1.grid != f_sharp_2.grid:
        raise GridMismatch("sharp fields live on different grids")
    grid = f_sharp_1.grid
    vb = bracket(grid.v_squared())
    xb = bracket(grid.x_minus_tv_squared(0.0))  # plain <x> at t = 0
    w = vb ** v_power * xb ** x_power
    return float(np.max(w * np.abs(f_sharp_1.values - f_sharp_2.values)))
