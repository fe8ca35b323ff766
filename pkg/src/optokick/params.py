"""Physical parameters, unit conversions and regime checks.

Internal units: angular rates in rad/ns, times in ns.  SI inputs (kg, N, W,
rad/s, K) are converted through the helpers below and nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

NS_PER_S = 1e9

# Regime thresholds.  "pass" below/above the strict value, "marginal" inside
# the soft band, "fail" beyond it.
KAPPA_T_PASS = 10.0
KAPPA_T_MARGINAL = 3.0
OMEGA_T_PASS = 0.1
OMEGA_T_MARGINAL = 0.5
GAMMA_TAU_PASS = 0.1
Q_M_PASS = 100.0
G_OVER_KAPPA_VALID = 0.1


def per_s_to_per_ns(rate: float) -> float:
    return rate / NS_PER_S


def per_ns_to_per_s(rate: float) -> float:
    return rate * NS_PER_S


def _require_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class ProtocolParams:
    """Rates of both pulses and of the resonator, in rad/ns and ns.

    ``tau`` is the delay between the pulses; sweeps usually supply the
    rotation angle ``omega_m * tau`` directly instead.
    """

    kappa1: float
    kappa2: float
    Delta1: float
    Delta2: float
    G1: float
    G2: float
    E1: float
    E2: float
    t1: float
    t2: float
    omega_m: float
    gamma_m: float
    n_bar: float
    tau: float = 0.0

    def __post_init__(self) -> None:
        _require_positive(kappa1=self.kappa1, kappa2=self.kappa2, omega_m=self.omega_m)
        for name in ("n_bar", "t1", "t2", "tau", "G1", "G2", "gamma_m"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    @property
    def thermal_variance(self) -> float:
        """1 + 2 n_bar, the position (and momentum) variance of the thermal state."""
        return 1.0 + 2.0 * self.n_bar

    @property
    def Q_m(self) -> float:
        return math.inf if self.gamma_m == 0 else self.omega_m / self.gamma_m

    def replace(self, **changes: float) -> ProtocolParams:
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def reference(cls, **overrides: float) -> ProtocolParams:
        """The two-pulse reference parameter set for the fringe.

        Couplings come from F = 0.1 pN, m = 1 pg, omega_m/2pi = 10 MHz;
        the mechanical Q is 1e6.
        """
        omega_m_si = 2 * math.pi * 10e6
        G = per_s_to_per_ns(coupling_from_force(0.1e-12, 1e-15, omega_m_si))
        omega_m = per_s_to_per_ns(omega_m_si)
        values = dict(
            kappa1=1.0,
            kappa2=1.0,
            Delta1=0.0,
            Delta2=20.0,
            G1=G,
            G2=G,
            E1=1.0,
            E2=1000.0,
            t1=5.0,
            t2=5.0,
            omega_m=omega_m,
            gamma_m=omega_m / 1e6,
            n_bar=1e4,
            tau=0.0,
        )
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class MaterialParams:
    """SI device quantities from which ProtocolParams can be derived.

    Any field may be None when the corresponding rate is given directly.
    """

    mass: float | None = None  # kg
    force_per_photon: float | None = None  # N
    input_power: float | None = None  # W
    omega_L: float | None = None  # rad/s
    temperature: float | None = None  # K
    g_om: float | None = None  # rad/(s m)
    n_eff: float | None = None
    dn_eff_dz: float | None = None  # 1/m

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be > 0 when given, got {value!r}")


def coupling_from_force(F: float, m: float, omega_m: float) -> float:
    """Single-photon coupling G = F / sqrt(2 hbar m omega_m), in rad/s."""
    _require_positive(F=F, m=m, omega_m=omega_m)
    return F / math.sqrt(2 * HBAR * m * omega_m)


def drive_from_power(P_in: float, kappa: float, omega_L: float) -> float:
    """Drive rate E = sqrt(2 P_in kappa / (hbar omega_L)), in rad/s."""
    _require_positive(P_in=P_in, kappa=kappa, omega_L=omega_L)
    return math.sqrt(2 * P_in * kappa / (HBAR * omega_L))


def power_from_drive(E: float, kappa: float, omega_L: float) -> float:
    """Inverse of :func:`drive_from_power`."""
    _require_positive(E=E, kappa=kappa, omega_L=omega_L)
    return E**2 * HBAR * omega_L / (2 * kappa)


def thermal_occupation(T: float, omega_m: float) -> float:
    """Bose-Einstein occupation for temperature T [K] and omega_m [rad/s]."""
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    _require_positive(omega_m=omega_m)
    if T == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_m / (K_B * T))


def temperature_from_occupation(n_bar: float, omega_m: float) -> float:
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar!r}")
    _require_positive(omega_m=omega_m)
    if n_bar == 0:
        return 0.0
    return HBAR * omega_m / (K_B * math.log1p(1.0 / n_bar))


def kick_momentum(params: ProtocolParams) -> float:
    """Mean dimensionless momentum imparted by the first pulse, 2 E1^2 G1 / kappa1^3."""
    return 2 * params.E1**2 * params.G1 / params.kappa1**3


class MomentumWidth(NamedTuple):
    a1: float
    thermal: float  # 2(1 + 2 n_bar), the value used in the first-order treatment
    relative_correction: float


def momentum_variance_coeff(params: ProtocolParams) -> MomentumWidth:
    thermal = 2 * params.thermal_variance
    correction = 8 * params.E1**2 * params.G1**2 / params.kappa1**4
    return MomentumWidth(thermal + correction, thermal, correction / thermal)


def pulse_photon_count(E: float, kappa: float, t: float) -> float:
    """Number of input photons E^2 t / (2 kappa) carried by a pulse of length t."""
    if E < 0 or t < 0:
        raise ValueError("E and t must be >= 0")
    _require_positive(kappa=kappa)
    return E**2 * t / (2 * kappa)


def force_per_photon_cavity(g_om: float) -> float:
    """Force hbar g_om [N] of one intracavity photon; g_om in rad/(s m)."""
    if g_om < 0:
        raise ValueError(f"g_om must be >= 0, got {g_om!r}")
    return HBAR * g_om


def force_per_photon_waveguide(omega_0: float, n_eff: float, dn_eff_dz: float) -> float:
    """Force (hbar omega_0 / n_eff) dn_eff/dz [N] of a guided photon."""
    _require_positive(omega_0=omega_0, n_eff=n_eff, dn_eff_dz=dn_eff_dz)
    return HBAR * omega_0 / n_eff * dn_eff_dz


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    threshold: float
    status: str  # "pass", "marginal" or "fail"
    description: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class RegimeReport:
    checks: tuple[RegimeCheck, ...]
    g1_over_kappa1: float
    first_order_valid: bool
    # G1 sqrt(1 + 2 n_bar) / kappa1: thermal spread of the first-pulse detuning.
    thermal_detuning_ratio: float
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def marginal(self) -> tuple[RegimeCheck, ...]:
        return tuple(c for c in self.checks if c.status == "marginal")

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [asdict(c) for c in self.checks],
            "g1_over_kappa1": self.g1_over_kappa1,
            "first_order_valid": self.first_order_valid,
            "thermal_detuning_ratio": self.thermal_detuning_ratio,
            "notes": list(self.notes),
        }


def _greater(name, ratio, strict, soft, description):
    if ratio > strict:
        status = "pass"
    elif soft is not None and ratio > soft:
        status = "marginal"
    else:
        status = "fail"
    return RegimeCheck(name, ratio, strict, status, description)


def _less(name, ratio, strict, soft, description):
    if ratio < strict:
        status = "pass"
    elif soft is not None and ratio < soft:
        status = "marginal"
    else:
        status = "fail"
    return RegimeCheck(name, ratio, strict, status, description)


def validate_regime(params: ProtocolParams, tau: float | None = None) -> RegimeReport:
    """Evaluate the six protocol assumptions; never raises.

    ``tau`` defaults to ``params.tau``; pass the longest delay of a sweep
    (one mechanical period for a full fringe) to check damping between pulses.
    """
    tau = params.tau if tau is None else tau
    checks = (
        _greater("kappa1_t1", params.kappa1 * params.t1, KAPPA_T_PASS, KAPPA_T_MARGINAL,
                 "first pulse reaches the cavity steady state"),
        _greater("kappa2_t2", params.kappa2 * params.t2, KAPPA_T_PASS, KAPPA_T_MARGINAL,
                 "probe pulse reaches the cavity steady state"),
        _less("omega_m_t1", params.omega_m * params.t1, OMEGA_T_PASS, OMEGA_T_MARGINAL,
              "resonator frozen during first pulse"),
        _less("omega_m_t2", params.omega_m * params.t2, OMEGA_T_PASS, OMEGA_T_MARGINAL,
              "resonator frozen during probe pulse"),
        _less("gamma_m_tau", params.gamma_m * tau, GAMMA_TAU_PASS, None,
              "no mechanical damping between pulses"),
        _greater("Q_m", params.Q_m, Q_M_PASS, None, "high mechanical quality factor"),
    )
    g_ratio = params.G1 / params.kappa1
    thermal_ratio = g_ratio * math.sqrt(params.thermal_variance)
    notes = []
    if thermal_ratio > G_OVER_KAPPA_VALID:
        notes.append(
            "thermal position spread detunes the first pulse by "
            f"{thermal_ratio:.3g} linewidths; the kick is q-dependent and the "
            "Gaussian approximation overestimates the fringe"
        )
    return RegimeReport(checks, g_ratio, g_ratio < G_OVER_KAPPA_VALID, thermal_ratio, tuple(notes))
