"""Numerical integration: Gauss-Hermite rules, adaptive Gauss-Kronrod and the
three-dimensional probe-signal integrator.
"""
from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfc, roots_hermite

MAX_HERMITE_ORDER = 512

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_half = np.zeros(8)
_wg_half[1::2] = _WG
# Gauss weights on the Kronrod node set (zero on the Kronrod-only nodes).
G_WEIGHTS = np.concatenate([_wg_half[:-1], _wg_half[::-1]])


@dataclass(frozen=True)
class GaussHermiteRule:
    """Physicists' Gauss-Hermite rule, weight function exp(-x^2)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Approximate the integral of exp(-x^2) f(x) over the real line."""
        return np.sum(self.weights * f(self.nodes))

    def scaled(self, center: float, variance: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights for integrating against exp(-(x-center)^2 / (2 variance))."""
        scale = math.sqrt(2 * variance)
        return center + scale * self.nodes, scale * self.weights


@functools.lru_cache(maxsize=None)
def gauss_hermite(n: int) -> GaussHermiteRule:
    if not 1 <= n <= MAX_HERMITE_ORDER:
        raise ValueError(f"Gauss-Hermite order must be in [1, {MAX_HERMITE_ORDER}], got {n}")
    x, w = roots_hermite(n)
    # symmetrize away rounding noise
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return GaussHermiteRule(n, x, w)


@dataclass
class AdaptiveResult:
    value: float
    error: float
    n_evals: int
    converged: bool
    intervals: list[tuple[float, float]] = field(default_factory=list, repr=False)


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * GK_NODES
    fx = np.asarray(f(x), dtype=float)
    k = half * np.dot(GK_WEIGHTS, fx)
    g = half * np.dot(G_WEIGHTS, fx)
    return k, abs(k - g)


def _map_infinite(f, a, b):
    """Return (g, lo, hi) so that integral of f over [a, b] equals integral of g over [lo, hi]."""
    if math.isinf(a) and math.isinf(b):
        def g(t):
            x = t / (1 - t * t)
            return f(x) * (1 + t * t) / (1 - t * t) ** 2
        return g, -1.0, 1.0
    if math.isinf(b):
        def g(t):
            return f(a + t / (1 - t)) / (1 - t) ** 2
        return g, 0.0, 1.0
    def g(t):
        return f(b - t / (1 - t)) / (1 - t) ** 2
    return g, 0.0, 1.0


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    points: Sequence[float] = (),
    max_subdivisions: int = 2000,
) -> AdaptiveResult:
    """Globally adaptive 15-point Gauss-Kronrod integration of a vectorized f.

    The interval with the largest |K15 - G7| difference is bisected until the
    summed difference is below max(tol, rtol * |value|).  Infinite endpoints
    are mapped to a finite interval (x = t / (1 - t) style), in which case
    ``points`` is ignored.  Running out of subdivisions returns an
    unconverged result rather than raising.
    """
    if not tol > 0 and not rtol > 0:
        raise ValueError("need a positive tolerance")
    if math.isnan(a) or math.isnan(b):
        raise ValueError("limits must not be NaN")
    if a == b:
        return AdaptiveResult(0.0, 0.0, 0, True)
    if a > b:
        res = integrate_adaptive(f, b, a, tol, rtol=rtol, points=points, max_subdivisions=max_subdivisions)
        res.value = -res.value
        return res
    if math.isinf(a) or math.isinf(b):
        f, a, b = _map_infinite(f, a, b)
        points = ()
    edges = sorted({a, b, *[p for p in points if a < p < b]})

    heap = []
    total = 0.0
    err = 0.0
    n_evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _gk15(f, lo, hi)
        n_evals += 15
        total += v
        err += e
        heapq.heappush(heap, (-e, lo, hi, v))

    while err > max(tol, rtol * abs(total)) and len(heap) < max_subdivisions:
        neg_e, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_e, lo, hi, v))
            break
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        n_evals += 30
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))

    # re-sum to drop accumulated update rounding
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    intervals = sorted((item[1], item[2]) for item in heap)
    return AdaptiveResult(total, err, n_evals, err <= max(tol, rtol * abs(total)), intervals)


def composite_gk(a: float, b: float, n_panels: int):
    """Nodes, Kronrod weights and embedded Gauss weights of a uniform composite rule."""
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * GK_NODES).ravel()
    wk = (half[:, None] * GK_WEIGHTS).ravel()
    wg = (half[:, None] * G_WEIGHTS).ravel()
    return x, wk, wg


@dataclass(frozen=True)
class SignalQuadSpec:
    """Knobs of :func:`integrate_signal_3d`.

    ``tol`` is absolute on the signal divided by the kernel peak.
    """

    y_order: int = 96
    box_sigmas: float = 9.0
    panel_fraction: float = 0.7  # panel width / smallest feature scale
    min_panels: int = 16
    tol: float = 1e-8
    max_refinements: int = 2
    block_elements: int = 2_000_000

    def refined(self) -> SignalQuadSpec:
        return SignalQuadSpec(
            y_order=min(MAX_HERMITE_ORDER, int(math.ceil(1.5 * self.y_order))),
            box_sigmas=self.box_sigmas,
            panel_fraction=0.5 * self.panel_fraction,
            min_panels=2 * self.min_panels,
            tol=self.tol,
            max_refinements=self.max_refinements,
            block_elements=self.block_elements,
        )


@dataclass
class SignalIntegral:
    values: np.ndarray
    errors: np.ndarray
    converged: np.ndarray
    budget: dict[str, float]
    qspec: SignalQuadSpec
    n_nodes: int

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def _signal_pass(rho, kernel, thetas, qspec):
    s = rho.variance
    sigma = math.sqrt(s)
    scale = min(sigma, kernel.width, rho.feature_scale)
    half_box = qspec.box_sigmas * sigma
    n_panels = max(qspec.min_panels, int(math.ceil(2 * half_box / (qspec.panel_fraction * scale))))
    q, wq_k, wq_g = composite_gk(rho.position_center - half_box, rho.position_center + half_box, n_panels)
    p, wp_k, wp_g = composite_gk(rho.momentum_center - half_box, rho.momentum_center + half_box, n_panels)

    low_order = max(1, int(math.ceil(2 * qspec.y_order / 3)))
    y_hi, wy_hi = gauss_hermite(qspec.y_order).scaled(0.0, 1.0 / s)
    y_lo, wy_lo = gauss_hermite(low_order).scaled(0.0, 1.0 / s)
    phase_hi = np.exp(-1j * np.outer(y_hi, p))
    phase_lo = np.exp(-1j * np.outer(y_lo, p))

    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    sum_k = np.zeros(len(thetas))
    sum_g = np.zeros(len(thetas))
    y_defect = 0.0
    rows = max(1, qspec.block_elements // len(p))
    for start in range(0, len(q), rows):
        qb = q[start:start + rows]
        f_hi = rho.residual(qb[:, None], y_hi[None, :]) * (wy_hi / (2 * np.pi))
        f_lo = rho.residual(qb[:, None], y_lo[None, :]) * (wy_lo / (2 * np.pi))
        w_hi = (f_hi @ phase_hi).real
        w_lo = (f_lo @ phase_lo).real
        y_defect += np.abs(wq_k[start:start + rows]) @ np.abs(w_hi - w_lo) @ np.abs(wp_k)
        for i, (c, sn) in enumerate(zip(cos_t, sin_t)):
            m = w_hi * kernel(qb[:, None] * c + p[None, :] * sn)
            sum_k[i] += wq_k[start:start + rows] @ m @ wp_k
            sum_g[i] += wq_g[start:start + rows] @ m @ wp_g

    quad_err = np.abs(sum_k - sum_g)
    y_err = y_defect * kernel.peak
    trunc_err = 2 * erfc(qspec.box_sigmas / math.sqrt(2)) * kernel.peak
    errors = quad_err + y_err + trunc_err
    budget = {
        "phase_space": float(quad_err.max(initial=0.0)),
        "y": float(y_err),
        "truncation": float(trunc_err),
    }
    return sum_k, errors, budget, len(q) * len(p)


def integrate_signal_3d(rho, kernel, thetas, qspec: SignalQuadSpec | None = None) -> SignalIntegral:
    """Probe signal for each rotation angle in ``thetas`` by nested quadrature.

    The integrand is W1(q, p) K(q cos(theta) + p sin(theta)), with W1 the
    Wigner function of ``rho`` written as a y-integral over rho(q+y, q-y)
    e^{-iyp} / 2pi.  The y-integral is done by Gauss-Hermite against the
    thermal factor exp(-y^2 s / 2) (``rho.residual`` is the remainder); the
    (q, p) integral by a composite Gauss-Kronrod mesh whose panels resolve
    the smallest of the state width, the kernel width and the kick scale of
    ``rho``.  W1 does not depend on theta, so the mesh and the y-sums are
    shared by all angles.

    Error estimates per angle add the embedded Gauss/Kronrod difference, the
    change between Gauss-Hermite orders n and 2n/3, and the Gaussian mass
    outside the box.  The mesh is refined up to ``qspec.max_refinements``
    times while any angle misses ``qspec.tol``.
    """
    qspec = qspec or SignalQuadSpec()
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    target = qspec.tol * kernel.peak
    for attempt in range(qspec.max_refinements + 1):
        values, errors, budget, n_nodes = _signal_pass(rho, kernel, thetas, qspec)
        converged = errors <= target
        if converged.all() or attempt == qspec.max_refinements:
            break
        qspec = qspec.refined()
    return SignalIntegral(values, errors, converged, budget, qspec, n_nodes)
