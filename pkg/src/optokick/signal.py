"""Probe-pulse photon number versus omega_m tau, and fringe visibilities.

Four routes to the signal n2(theta), theta = omega_m tau:

* ``exact``: triple integral over the exact post-kick state;
* ``gaussian``: thermal Gaussian displaced by the kick, convolved with the
  cavity Lorentzian (a Voigt profile evaluated by adaptive quadrature);
* ``doppler``: the Gaussian-dominated closed form;
* ``lorentzian``: the Lorentzian-dominated closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .params import ProtocolParams, kick_momentum, validate_regime
from .phasespace import displaced_thermal_density, post_kick_density_exact
from .quadrature import SignalQuadSpec, integrate_adaptive, integrate_signal_3d

METHODS = ("exact", "gaussian", "doppler", "lorentzian")

DOPPLER_RATIO = 10.0
LORENTZIAN_RATIO = 0.1
# Probe detuning, in thermal Gaussian widths G2 sqrt(1 + 2 n_bar), beyond
# which the Lorentzian wing rather than the Gaussian core sets the signal.
CORE_WIDTHS = 3.0
DEFAULT_THETA_POINTS = 128
FLAT_RTOL = 1e-14


class RegimeWarning(UserWarning):
    pass


class RegimeError(ValueError):
    pass


def default_thetas(n: int = DEFAULT_THETA_POINTS) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class LorentzianKernel:
    """Cavity response |E|^2 / (kappa^2 + (Delta - G q)^2) to a resonator at position q."""

    E: float
    kappa: float
    Delta: float
    G: float

    def __call__(self, q):
        d = self.Delta - self.G * q
        return self.E**2 / (self.kappa**2 + d * d)

    @property
    def peak(self) -> float:
        return self.E**2 / self.kappa**2

    @property
    def width(self) -> float:
        """Half width in q."""
        return self.kappa / self.G if self.G > 0 else math.inf

    @classmethod
    def probe(cls, params: ProtocolParams) -> LorentzianKernel:
        return cls(params.E2, params.kappa2, params.Delta2, params.G2)


@dataclass
class FringeCurve:
    thetas: np.ndarray
    n2: np.ndarray
    method: str
    params: ProtocolParams
    errors: np.ndarray | None = None
    converged: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.n2 = np.asarray(self.n2, dtype=float)
        if self.thetas.shape != self.n2.shape or self.thetas.ndim != 1:
            raise ValueError("thetas and n2 must be 1-d arrays of equal length")
        if len(self.thetas) > 1 and np.any(np.diff(self.thetas) <= 0):
            raise ValueError("thetas must be strictly increasing")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def tau_ns(self) -> np.ndarray:
        return self.thetas / self.params.omega_m

    @property
    def partial(self) -> bool:
        return self.converged is not None and not bool(np.all(self.converged))

    def __len__(self) -> int:
        return len(self.thetas)


class RegimeClass(NamedTuple):
    name: str  # "doppler", "lorentzian" or "intermediate"
    width_ratio: float  # (1 + 2 n_bar) G2^2 / kappa2^2
    detuning_widths: float  # |Delta2| / (G2 sqrt(1 + 2 n_bar))


def width_ratio(params: ProtocolParams) -> float:
    return params.thermal_variance * params.G2**2 / params.kappa2**2


def classify_regime(params: ProtocolParams) -> RegimeClass:
    """Which limit of the Voigt profile applies to the probe.

    Doppler needs the thermal width to dominate and the probe to sit inside
    the Gaussian core; otherwise a wide-Gaussian case is reported as
    intermediate.
    """
    ratio = width_ratio(params)
    gauss_width = params.G2 * math.sqrt(params.thermal_variance)
    widths = abs(params.Delta2) / gauss_width if gauss_width > 0 else math.inf
    if ratio < LORENTZIAN_RATIO:
        name = "lorentzian"
    elif ratio > DOPPLER_RATIO and widths <= CORE_WIDTHS:
        name = "doppler"
    else:
        name = "intermediate"
    return RegimeClass(name, ratio, widths)


def _thetas(thetas):
    return default_thetas() if thetas is None else np.asarray(thetas, dtype=float)


def probe_signal_exact(
    params: ProtocolParams,
    thetas=None,
    *,
    qspec: SignalQuadSpec | None = None,
    check_regime: bool = True,
) -> FringeCurve:
    """Signal from the exact post-kick state.

    With ``check_regime`` a failed protocol assumption raises RegimeError;
    pass False to evaluate anyway.
    """
    thetas = _thetas(thetas)
    if check_regime:
        tau = float(np.max(np.abs(thetas), initial=0.0)) / params.omega_m
        report = validate_regime(params, tau=tau)
        if not report.ok:
            failed = ", ".join(c.name for c in report.checks if not c.passed)
            raise RegimeError(f"protocol assumptions violated: {failed}")
    rho = post_kick_density_exact(params)
    result = integrate_signal_3d(rho, LorentzianKernel.probe(params), thetas, qspec)
    info = {"quadrature": result.budget, "nodes": result.n_nodes, "y_order": result.qspec.y_order}
    return FringeCurve(thetas, result.values, "exact", params, result.errors, result.converged, info)


def _warn_first_order(params: ProtocolParams) -> None:
    report = validate_regime(params)
    if not report.first_order_valid:
        warnings.warn(f"G1/kappa1 = {report.g1_over_kappa1:.3g} is not small", RegimeWarning, stacklevel=3)
    elif report.notes:
        warnings.warn(report.notes[0], RegimeWarning, stacklevel=3)


def probe_signal_gaussian(params: ProtocolParams, thetas=None, *, rtol: float = 1e-12) -> FringeCurve:
    """Voigt integral of the displaced thermal position distribution against the cavity Lorentzian."""
    _warn_first_order(params)
    thetas = _thetas(thetas)
    kernel = LorentzianKernel.probe(params)
    sigma = math.sqrt(params.thermal_variance)
    values = np.empty(len(thetas))
    errors = np.empty(len(thetas))
    converged = np.empty(len(thetas), dtype=bool)
    for i, theta in enumerate(thetas):
        rho = displaced_thermal_density(params, theta)
        center = rho.position_center
        lo, hi = center - 12 * sigma, center + 12 * sigma
        points = [center]
        if params.G2 > 0:
            points.append(params.Delta2 / params.G2)
        res = integrate_adaptive(
            lambda q: rho.diagonal(q) * kernel(q), lo, hi, tol=1e-300, rtol=rtol, points=points
        )
        values[i], errors[i], converged[i] = res.value, res.error, res.converged
    return FringeCurve(thetas, values, "gaussian", params, errors, converged)


def effective_detuning(params: ProtocolParams, thetas) -> np.ndarray:
    """Probe detuning shifted by the oscillating kicked resonator, Delta2 - G2 p0 sin(theta)."""
    return params.Delta2 - params.G2 * kick_momentum(params) * np.sin(thetas)


def probe_signal_doppler(params: ProtocolParams, thetas=None) -> FringeCurve:
    thetas = _thetas(thetas)
    if params.G2 <= 0:
        raise ValueError("the Gaussian-dominated limit needs G2 > 0")
    ratio = width_ratio(params)
    if ratio <= DOPPLER_RATIO:
        warnings.warn(f"(1+2n)G2^2/kappa2^2 = {ratio:.3g} <= {DOPPLER_RATIO}: "
                      "thermal width does not dominate", RegimeWarning, stacklevel=2)
    else:
        widths = classify_regime(params).detuning_widths
        if widths > CORE_WIDTHS:
            warnings.warn(f"probe detuned {widths:.3g} Gaussian widths (> {CORE_WIDTHS:g}): "
                          "Lorentzian wings dominate the signal", RegimeWarning, stacklevel=2)
    s = params.thermal_variance
    d = effective_detuning(params, thetas)
    prefactor = params.E2**2 / (params.kappa2 * params.G2) * math.sqrt(math.pi / (2 * s))
    n2 = prefactor * np.exp(-d * d / (2 * params.G2**2 * s))
    return FringeCurve(thetas, n2, "doppler", params)


def probe_signal_lorentzian(params: ProtocolParams, thetas=None) -> FringeCurve:
    thetas = _thetas(thetas)
    ratio = width_ratio(params)
    if ratio >= LORENTZIAN_RATIO:
        warnings.warn(f"(1+2n)G2^2/kappa2^2 = {ratio:.3g} >= {LORENTZIAN_RATIO}: "
                      "thermal width is not negligible", RegimeWarning, stacklevel=2)
    d = effective_detuning(params, thetas)
    return FringeCurve(thetas, params.E2**2 / (params.kappa2**2 + d * d), "lorentzian", params)


SIGNAL_METHODS = {
    "exact": probe_signal_exact,
    "gaussian": probe_signal_gaussian,
    "doppler": probe_signal_doppler,
    "lorentzian": probe_signal_lorentzian,
}


class CurveVisibility(NamedTuple):
    value: float
    n_max: float
    n_min: float
    theta_max: float
    theta_min: float
    zero_amplitude: bool


def _covers_period(thetas) -> bool:
    if len(thetas) < 2:
        return False
    h = np.diff(thetas)
    uniform = np.allclose(h, h[0], rtol=1e-9, atol=0)
    return uniform and abs(thetas[-1] + h[0] - thetas[0] - 2 * np.pi) < 1e-9


def _refine_extremum(thetas, values, i, periodic):
    n = len(values)
    if periodic:
        left, right = values[(i - 1) % n], values[(i + 1) % n]
    elif 0 < i < n - 1:
        left, right = values[i - 1], values[i + 1]
    else:
        return thetas[i], values[i]
    h = thetas[1] - thetas[0] if periodic else 0.5 * (thetas[i + 1] - thetas[i - 1])
    curvature = left - 2 * values[i] + right
    if curvature == 0:
        return thetas[i], values[i]
    shift = 0.5 * (left - right) / curvature
    value = values[i] - 0.25 * (left - right) * shift
    return thetas[i] + shift * h, value


def visibility_from_curve(curve: FringeCurve) -> CurveVisibility:
    """(max - min) / (max + min) of a sampled fringe, extrema refined by a three-point parabola."""
    thetas, values = curve.thetas, curve.n2
    if len(values) < 16 or thetas[-1] - thetas[0] < 2 * np.pi * (1 - 2 / len(values)):
        raise ValueError("need at least one full period sampled with >= 16 points")
    periodic = _covers_period(thetas)
    hi = int(np.argmax(values))
    lo = int(np.argmin(values))
    if values[hi] - values[lo] <= FLAT_RTOL * abs(values[hi]):
        return CurveVisibility(0.0, float(values[hi]), float(values[lo]), float(thetas[hi]), float(thetas[lo]), True)
    t_max, n_max = _refine_extremum(thetas, values, hi, periodic)
    t_min, n_min = _refine_extremum(thetas, values, lo, periodic)
    # the parabola is only a refinement; never let it undercut the samples
    n_max = max(n_max, values[hi])
    n_min = min(n_min, values[lo])
    return CurveVisibility(float((n_max - n_min) / (n_max + n_min)), float(n_max), float(n_min),
                           float(t_max), float(t_min), False)


def visibility_tanh(params: ProtocolParams) -> float:
    """Gaussian-limit visibility tanh(|Delta2| p0 / (G2 (1 + 2 n_bar)))."""
    if params.G2 <= 0:
        raise ValueError("the Gaussian-dominated limit needs G2 > 0")
    arg = abs(params.Delta2) * kick_momentum(params) / (params.G2 * params.thermal_variance)
    return math.tanh(arg)


class LorentzianVisibility(NamedTuple):
    value: float
    delta2_opt: float
    v_max: float


def visibility_lorentzian(params: ProtocolParams) -> LorentzianVisibility:
    kick = params.G2 * kick_momentum(params)
    k2 = params.kappa2**2
    v = 2 * abs(params.Delta2) * kick / (k2 + kick**2 + params.Delta2**2)
    root = math.sqrt(k2 + kick**2)
    return LorentzianVisibility(v, root, kick / root)


@dataclass
class VisibilityReport:
    V_numeric: float | None
    method: str | None
    V_tanh: float
    V_lorentzian: float
    V_max: float
    delta2_opt: float
    regime: str
    width_ratio: float
    detuning_widths: float
    kick_momentum: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def visibility_report(params: ProtocolParams, curve: FringeCurve | None = None) -> VisibilityReport:
    lor = visibility_lorentzian(params)
    regime = classify_regime(params)
    v_tanh = visibility_tanh(params) if params.G2 > 0 else 0.0
    return VisibilityReport(
        V_numeric=visibility_from_curve(curve).value if curve is not None else None,
        method=curve.method if curve is not None else None,
        V_tanh=v_tanh,
        V_lorentzian=lor.value,
        V_max=lor.v_max,
        delta2_opt=lor.delta2_opt,
        regime=regime.name,
        width_ratio=regime.width_ratio,
        detuning_widths=regime.detuning_widths,
        kick_momentum=kick_momentum(params),
    )


def scan_detuning(params: ProtocolParams, deltas) -> np.ndarray:
    """Lorentzian-limit visibility over a grid of probe detunings."""
    return np.array([visibility_lorentzian(params.replace(Delta2=float(d))).value for d in deltas])
