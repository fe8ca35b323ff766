"""Mechanical states at each stage of the protocol, in position and Wigner form.

Conventions: q = b + b^dagger, so the thermal state has <q^2> = <p^2> = 1 + 2 n_bar,
and W(q, p) = (1/2pi) int dy rho(q+y, q-y) exp(-i y p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline

from .params import ProtocolParams, kick_momentum, momentum_variance_coeff
from .quadrature import gauss_hermite

# Maximum deviation of one bicubic rotation from the exact rotated state on
# a default grid, relative to max |W|.
INTERPOLATION_TOL = 1e-6


class UnsupportedConfiguration(ValueError):
    """Parameters outside what the closed-form post-kick state covers."""


class GridCoverageError(ValueError):
    def __init__(self, mass_defect: float, message: str = ""):
        self.mass_defect = mass_defect
        super().__init__(message or f"grid misses probability mass: |sum W dq dp - 1| = {mass_defect:.3e}")


@dataclass(frozen=True)
class PositionDensity:
    """rho(q, q') of the resonator.

    ``residual(q, y)`` returns rho(q+y, q-y) * exp(y^2 variance / 2), i.e. the
    density with the thermal off-diagonal Gaussian divided out; quadrature
    code integrates it against that Gaussian.  ``feature_scale`` is the
    shortest length in q on which the residual changes (inf if none besides
    the state width).
    """

    kind: str
    residual: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    variance: float
    params: ProtocolParams | None = None
    position_center: float = 0.0
    momentum_center: float = 0.0
    feature_scale: float = math.inf

    @property
    def n_bar(self) -> float:
        return 0.5 * (self.variance - 1.0)

    def at(self, q, y):
        """rho(q + y, q - y)."""
        q = np.asarray(q, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.residual(q, y) * np.exp(-0.5 * self.variance * y * y)

    def __call__(self, q, q_prime):
        q = np.asarray(q, dtype=float)
        q_prime = np.asarray(q_prime, dtype=float)
        return self.at(0.5 * (q + q_prime), 0.5 * (q - q_prime))

    def diagonal(self, q):
        return self.residual(np.asarray(q, dtype=float), np.zeros_like(q, dtype=float)).real


def _thermal_log(q, s):
    return -0.5 * math.log(2 * math.pi * s) - q * q / (2 * s)


def thermal_density(n_bar: float) -> PositionDensity:
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar!r}")
    s = 1.0 + 2.0 * n_bar

    def residual(q, y):
        return np.exp(_thermal_log(q, s) + 0j * y)

    return PositionDensity("thermal", residual, s)


def cavity_amplitude(q, t, E, kappa, Delta, G):
    """Coherent amplitude of a driven cavity whose detuning is shifted by -G q.

    ``t = np.inf`` gives the steady-state value E / (kappa + i(Delta - G q)).
    """
    if not kappa > 0:
        raise ValueError("kappa must be > 0")
    q = np.asarray(q, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    rate = kappa + 1j * (Delta - G * q)
    steady = E / rate
    finite = np.isfinite(t)
    decay = np.exp(-rate * np.where(finite, t, 0.0))
    return np.where(finite, steady * (1 - decay), steady)


def _require_resonant(params: ProtocolParams) -> None:
    if params.Delta1 != 0:
        raise UnsupportedConfiguration(
            f"post-kick state is only available for a resonant first pulse (Delta1 = 0), got {params.Delta1}"
        )


def post_kick_density_exact(params: ProtocolParams) -> PositionDensity:
    """Resonator state after the first pulse, with the full coherent-state overlap."""
    _require_resonant(params)
    s = params.thermal_variance
    E2, G, k = params.E1**2, params.G1, params.kappa1

    def residual(q, y):
        a_plus = k * k + G * G * (q + y) ** 2
        a_minus = k * k + G * G * (q - y) ** 2
        kick = -2 * E2 * (G * G * y * y - 1j * G * k * y) / (a_plus * a_minus)
        return np.exp(_thermal_log(q, s) + kick)

    scale = k / G if G > 0 and params.E1 > 0 else math.inf
    return PositionDensity(
        "post_kick_exact", residual, s, params,
        momentum_center=kick_momentum(params), feature_scale=scale,
    )


def post_kick_density_approx(params: ProtocolParams) -> PositionDensity:
    """Second-order expansion of the post-kick state in G1 / kappa1."""
    _require_resonant(params)
    if params.G1 / params.kappa1 >= 1:
        raise UnsupportedConfiguration("expansion needs G1 / kappa1 < 1")
    s = params.thermal_variance
    n_cav = params.E1**2 / params.kappa1**2
    g = params.G1 / params.kappa1

    def residual(q, y):
        return np.exp(_thermal_log(q, s) - 2 * n_cav * (g * g * y * y - 1j * g * y))

    return PositionDensity(
        "post_kick_approx", residual, s, params, momentum_center=kick_momentum(params)
    )


def displaced_thermal_density(params: ProtocolParams, theta: float) -> PositionDensity:
    """Thermal state kicked by p0 along momentum and rotated by theta = omega_m tau."""
    s = params.thermal_variance
    p0 = kick_momentum(params)
    q0 = p0 * math.sin(theta)
    pc = p0 * math.cos(theta)

    def residual(q, y):
        return np.exp(_thermal_log(q - q0, s) + 1j * y * pc)

    return PositionDensity(
        "displaced_thermal", residual, s, params, position_center=q0, momentum_center=pc
    )


@dataclass(frozen=True)
class GaussianState:
    mean_q: float
    mean_p: float
    var_q: float
    var_p: float
    cov_qp: float = 0.0

    def __post_init__(self):
        if not (self.var_q > 0 and self.var_p > 0):
            raise ValueError("variances must be > 0")
        if self.var_q * self.var_p - self.cov_qp**2 <= 0:
            raise ValueError("covariance matrix must be positive definite")

    def wigner(self, q, p):
        dq = np.asarray(q, dtype=float) - self.mean_q
        dp = np.asarray(p, dtype=float) - self.mean_p
        det = self.var_q * self.var_p - self.cov_qp**2
        quad = (self.var_p * dq * dq - 2 * self.cov_qp * dq * dp + self.var_q * dp * dp) / det
        return np.exp(-0.5 * quad) / (2 * np.pi * math.sqrt(det))

    def rotate(self, theta: float) -> GaussianState:
        """Free evolution by theta: W_f(q, p) = W(q cos - p sin, p cos + q sin)."""
        if theta == 0:
            return self
        c, s = math.cos(theta), math.sin(theta)
        # W_f(x) = W(M x) with M = [[c, -s], [s, c]], so mean -> M^T mean, cov -> M^T cov M
        mq = c * self.mean_q + s * self.mean_p
        mp = -s * self.mean_q + c * self.mean_p
        vq = c * c * self.var_q + 2 * c * s * self.cov_qp + s * s * self.var_p
        vp = s * s * self.var_q - 2 * c * s * self.cov_qp + c * c * self.var_p
        cqp = (c * c - s * s) * self.cov_qp + c * s * (self.var_p - self.var_q)
        return GaussianState(mq, mp, vq, vp, cqp)


def post_kick_gaussian(params: ProtocolParams, exact_width: bool = True) -> GaussianState:
    """Gaussian post-kick state with mean (0, p0) and variances (1 + 2 n_bar, a1 / 2).

    ``exact_width=False`` drops the second-order broadening, a1 -> 2(1 + 2 n_bar).
    """
    width = momentum_variance_coeff(params)
    a1 = width.a1 if exact_width else width.thermal
    return GaussianState(0.0, kick_momentum(params), params.thermal_variance, a1 / 2)


@dataclass
class WignerGrid:
    """W(q, p) sampled on a rectangular grid; ``W[i, j]`` is at (q[i], p[j])."""

    q: np.ndarray
    p: np.ndarray
    W: np.ndarray
    kind: str = ""
    params: ProtocolParams | None = None
    imag_residual: float = 0.0
    mass_defect: float = 0.0

    @property
    def dq(self) -> float:
        return float(self.q[1] - self.q[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def mass(self) -> float:
        return float(self.W.sum() * self.dq * self.dp)

    def moments(self) -> dict[str, float]:
        cell = self.dq * self.dp
        Q, P = np.meshgrid(self.q, self.p, indexing="ij")
        mq = float((Q * self.W).sum() * cell)
        mp = float((P * self.W).sum() * cell)
        return {
            "mean_q": mq,
            "mean_p": mp,
            "var_q": float(((Q - mq) ** 2 * self.W).sum() * cell),
            "var_p": float(((P - mp) ** 2 * self.W).sum() * cell),
            "q2": float((Q * Q * self.W).sum() * cell),
            "p2": float((P * P * self.W).sum() * cell),
        }

    @classmethod
    def from_gaussian(cls, state: GaussianState, q, p, kind="gaussian", params=None) -> WignerGrid:
        Q, P = np.meshgrid(q, p, indexing="ij")
        W = state.wigner(Q, P)
        grid = cls(np.asarray(q, float), np.asarray(p, float), W, kind, params)
        grid.mass_defect = abs(grid.mass - 1.0)
        return grid


def default_axis(variance: float, center: float = 0.0, n_points: int = 512, extent_sigmas: float = 6.0):
    half = extent_sigmas * math.sqrt(variance)
    return np.linspace(center - half, center + half, n_points)


def wigner_from_density(
    rho: PositionDensity,
    q=None,
    p=None,
    *,
    n_points: int = 512,
    extent_sigmas: float = 6.0,
    y_order: int = 64,
    mass_tol: float = 1e-6,
) -> WignerGrid:
    """Wigner function of ``rho`` on a grid, by Gauss-Hermite quadrature in y.

    Default axes span +-extent_sigmas standard deviations about the state
    centre.  Raises GridCoverageError when the grid holds less than
    1 - mass_tol of the probability.
    """
    if q is None:
        q = default_axis(rho.variance, rho.position_center, n_points, extent_sigmas)
    if p is None:
        p = default_axis(rho.variance, rho.momentum_center, n_points, extent_sigmas)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    y, wy = gauss_hermite(y_order).scaled(0.0, 1.0 / rho.variance)
    f = rho.residual(q[:, None], y[None, :]) * (wy / (2 * np.pi))
    Wc = f @ np.exp(-1j * np.outer(y, p))
    peak = np.abs(Wc).max()
    grid = WignerGrid(q, p, Wc.real.copy(), rho.kind, rho.params)
    grid.imag_residual = float(np.abs(Wc.imag).max() / peak) if peak > 0 else 0.0
    grid.mass_defect = abs(grid.mass - 1.0)
    if grid.mass_defect > mass_tol:
        raise GridCoverageError(grid.mass_defect)
    return grid


def rotate_phase_space(grid: WignerGrid, theta: float) -> WignerGrid:
    """Rotate a gridded Wigner function by theta using bicubic spline interpolation.

    Samples falling outside the grid are taken as zero; the resulting mass
    defect is stored on the returned grid.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if theta == 0:
        return WignerGrid(grid.q.copy(), grid.p.copy(), grid.W.copy(), grid.kind, grid.params,
                          grid.imag_residual, grid.mass_defect)
    c, s = math.cos(theta), math.sin(theta)
    Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
    src_q = Q * c - P * s
    src_p = P * c + Q * s
    coords = np.array([(src_q - grid.q[0]) / grid.dq, (src_p - grid.p[0]) / grid.dp])
    W = ndimage.map_coordinates(grid.W, coords, order=3, mode="constant", cval=0.0)
    out = WignerGrid(grid.q.copy(), grid.p.copy(), W, grid.kind, grid.params, grid.imag_residual)
    out.mass_defect = abs(out.mass - 1.0)
    return out


def density_from_wigner(grid: WignerGrid) -> PositionDensity:
    """Position representation rho(q+y, q-y) = int dp W(q, p) e^{iyp} of a gridded state.

    W is interpolated along q with a cubic spline and summed over the p grid.
    """
    spline = CubicSpline(grid.q, grid.W, axis=0, extrapolate=False)
    m = grid.moments()
    s = m["var_q"]
    p = grid.p
    dp = grid.dp

    def at(q, y):
        q, y = np.broadcast_arrays(np.asarray(q, float), np.asarray(y, float))
        rows = np.nan_to_num(spline(q.ravel()))
        phase = np.exp(1j * y.ravel()[:, None] * p[None, :])
        return (np.sum(rows * phase, axis=1) * dp).reshape(q.shape)

    def residual(q, y):
        return at(q, y) * np.exp(0.5 * s * np.asarray(y, float) ** 2)

    return PositionDensity(
        "gridded", residual, s, grid.params,
        position_center=m["mean_q"], momentum_center=m["mean_p"],
    )
