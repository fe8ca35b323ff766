"""Run configuration files.

INI syntax (``configparser``).  Every physical field carries its unit in the
key name; see docs/config.md for the full list.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import params as P
from .counting import DetectorModel
from .quadrature import SignalQuadSpec
from .signal import METHODS

MATCH_RTOL = 1e-6
SPEED_OF_LIGHT = 299792458.0


class ConfigError(ValueError):
    pass


PROTOCOL_KEYS = {
    "kappa1_rad_per_ns": "kappa1",
    "kappa2_rad_per_ns": "kappa2",
    "delta1_rad_per_ns": "Delta1",
    "delta2_rad_per_ns": "Delta2",
    "g1_rad_per_ns": "G1",
    "g2_rad_per_ns": "G2",
    "e1_rad_per_ns": "E1",
    "e2_rad_per_ns": "E2",
    "t1_ns": "t1",
    "t2_ns": "t2",
    "n_bar": "n_bar",
    "tau_ns": "tau",
    "gamma_m_rad_per_ns": "gamma_m",
}
EXTRA_PROTOCOL_KEYS = {"omega_m_over_2pi_mhz", "quality_factor"}
MATERIAL_KEYS = {
    "mass_pg", "force1_pn", "force2_pn", "temperature_k",
    "input_power1_w", "input_power2_w", "wavelength1_nm", "wavelength2_nm",
}
SWEEP_KEYS = {"theta_points", "theta_start_rad", "theta_stop_rad", "tau_start_ns", "tau_stop_ns", "methods"}
QUAD_KEYS = {"y_order", "box_sigmas", "panel_fraction", "tol", "max_refinements"}
DETECTOR_KEYS = {
    "efficiency", "dark_rate_hz", "window_s", "repetition_rate_hz", "total_shots",
    "bins", "curve_method", "target_z",
}
RUN_KEYS = {"seed", "output_dir"}
SECTIONS = {
    "protocol": set(PROTOCOL_KEYS) | EXTRA_PROTOCOL_KEYS,
    "material": MATERIAL_KEYS,
    "sweep": SWEEP_KEYS,
    "quadrature": QUAD_KEYS,
    "detector": DETECTOR_KEYS,
    "run": RUN_KEYS,
}


@dataclass
class DetectorConfig:
    model: DetectorModel
    repetition_rate: float
    total_shots: int
    bins: int = 32
    curve_method: str | None = None
    target_z: float = 5.0


@dataclass
class RunConfig:
    protocol: P.ProtocolParams
    thetas: np.ndarray
    methods: list[str]
    quadrature: SignalQuadSpec = field(default_factory=SignalQuadSpec)
    detector: DetectorConfig | None = None
    seed: int = 0
    output_dir: str = "out"
    derived: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Everything needed to rerun this configuration."""
        out = {
            "protocol": self.protocol.as_dict(),
            "theta_points": len(self.thetas),
            "theta_start_rad": float(self.thetas[0]) if len(self.thetas) else None,
            "theta_step_rad": float(self.thetas[1] - self.thetas[0]) if len(self.thetas) > 1 else None,
            "methods": list(self.methods),
            "quadrature": dict(self.quadrature.__dict__),
            "seed": self.seed,
            "derived_from_material": self.derived,
            "source": self.raw,
        }
        if self.detector is not None:
            d = self.detector
            out["detector"] = {
                "efficiency": d.model.efficiency,
                "dark_rate_hz": d.model.dark_rate,
                "window_s": d.model.window,
                "repetition_rate_hz": d.repetition_rate,
                "total_shots": d.total_shots,
                "bins": d.bins,
                "curve_method": d.curve_method,
                "target_z": d.target_z,
            }
        return out


def _float(section, key, value) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"[{section}] {key}: must be finite")
    return x


def _int(section, key, value) -> int:
    x = _float(section, key, value)
    if x != int(x):
        raise ConfigError(f"[{section}] {key}: must be an integer")
    return int(x)


def parse_methods(text: str) -> list[str]:
    methods = [m.strip().lower() for m in text.replace(";", ",").split(",") if m.strip()]
    if not methods:
        raise ConfigError("at least one method must be selected")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ConfigError(f"unknown method(s) {unknown}; choose from {list(METHODS)}")
    return list(dict.fromkeys(methods))


def _settle(name: str, explicit: float | None, derived: float | None) -> float | None:
    if explicit is not None and derived is not None:
        if not math.isclose(explicit, derived, rel_tol=MATCH_RTOL, abs_tol=0.0):
            raise ConfigError(f"{name}: explicit value {explicit} conflicts with material-derived {derived}")
    return explicit if explicit is not None else derived


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    raw = {s: dict(cp[s]) for s in cp.sections()}
    for section, keys in raw.items():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(keys) - SECTIONS[section]
        if extra:
            raise ConfigError(f"[{section}] unknown key(s): {sorted(extra)}")

    proto = raw.get("protocol", {})
    mat = raw.get("material", {})
    values: dict[str, float | None] = {
        field_name: _float("protocol", key, proto[key]) if key in proto else None
        for key, field_name in PROTOCOL_KEYS.items()
    }
    if "omega_m_over_2pi_mhz" not in proto:
        raise ConfigError("[protocol] omega_m_over_2pi_MHz is required")
    f_m = _float("protocol", "omega_m_over_2pi_MHz", proto["omega_m_over_2pi_mhz"])
    if f_m <= 0:
        raise ConfigError("[protocol] omega_m_over_2pi_MHz must be > 0")
    omega_m_si = 2 * math.pi * f_m * 1e6
    values["omega_m"] = P.per_s_to_per_ns(omega_m_si)
    if "quality_factor" in proto:
        qf = _float("protocol", "quality_factor", proto["quality_factor"])
        if qf <= 0:
            raise ConfigError("[protocol] quality_factor must be > 0")
        values["gamma_m"] = _settle("gamma_m", values["gamma_m"], values["omega_m"] / qf)

    derived: dict[str, float] = {}
    m = {k: _float("material", k, v) for k, v in mat.items()}
    try:
        if "mass_pg" in m:
            mass = m["mass_pg"] * 1e-15
            for j in (1, 2):
                if f"force{j}_pn" in m:
                    G = P.per_s_to_per_ns(P.coupling_from_force(m[f"force{j}_pn"] * 1e-12, mass, omega_m_si))
                    derived[f"G{j}"] = G
        if "temperature_k" in m:
            derived["n_bar"] = P.thermal_occupation(m["temperature_k"], omega_m_si)
        for j in (1, 2):
            if f"input_power{j}_w" in m:
                kappa = values[f"kappa{j}"]
                wl = m.get(f"wavelength{j}_nm")
                if kappa is None or wl is None:
                    raise ConfigError(f"input_power{j}_W needs kappa{j}_rad_per_ns and wavelength{j}_nm")
                omega_l = 2 * math.pi * SPEED_OF_LIGHT / (wl * 1e-9)
                derived[f"E{j}"] = P.per_s_to_per_ns(
                    P.drive_from_power(m[f"input_power{j}_w"], P.per_ns_to_per_s(kappa), omega_l))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[material] {exc}") from None
    for name, value in derived.items():
        values[name] = _settle(name, values[name], value)

    if values["tau"] is None:
        values["tau"] = 0.0
    if values["Delta1"] is None:
        values["Delta1"] = 0.0
    if values["gamma_m"] is None:
        raise ConfigError("[protocol] give quality_factor or gamma_m_rad_per_ns")
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ConfigError(f"missing protocol values (explicit or via [material]): {sorted(missing)}")
    try:
        protocol = P.ProtocolParams(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    sweep = raw.get("sweep", {})
    n = _int("sweep", "theta_points", sweep.get("theta_points", 128))
    if n < 1:
        raise ConfigError("[sweep] theta_points must be >= 1")
    if "tau_start_ns" in sweep or "tau_stop_ns" in sweep:
        start = _float("sweep", "tau_start_ns", sweep.get("tau_start_ns", 0)) * protocol.omega_m
        stop = _float("sweep", "tau_stop_ns", sweep.get("tau_stop_ns", 2 * math.pi / protocol.omega_m)) * protocol.omega_m
    else:
        start = _float("sweep", "theta_start_rad", sweep.get("theta_start_rad", 0))
        stop = _float("sweep", "theta_stop_rad", sweep.get("theta_stop_rad", 2 * math.pi))
    if not stop > start:
        raise ConfigError("[sweep] stop must exceed start")
    thetas = start + (stop - start) * np.arange(n) / n  # stop is excluded
    methods = parse_methods(sweep.get("methods", "exact"))

    qsec = raw.get("quadrature", {})
    base = SignalQuadSpec()
    quad = SignalQuadSpec(
        y_order=_int("quadrature", "y_order", qsec.get("y_order", base.y_order)),
        box_sigmas=_float("quadrature", "box_sigmas", qsec.get("box_sigmas", base.box_sigmas)),
        panel_fraction=_float("quadrature", "panel_fraction", qsec.get("panel_fraction", base.panel_fraction)),
        tol=_float("quadrature", "tol", qsec.get("tol", base.tol)),
        max_refinements=_int("quadrature", "max_refinements", qsec.get("max_refinements", base.max_refinements)),
    )

    detector = None
    if "detector" in raw:
        d = raw["detector"]
        rate = _float("detector", "repetition_rate_Hz", d.get("repetition_rate_hz", 1e3))
        if rate <= 0:
            raise ConfigError("[detector] repetition_rate_Hz must be > 0")
        window = _float("detector", "window_s", d.get("window_s", 1 / rate))
        try:
            model = DetectorModel(
                _float("detector", "efficiency", d.get("efficiency", 0.5)),
                _float("detector", "dark_rate_Hz", d.get("dark_rate_hz", 0.1)),
                window,
            )
        except ValueError as exc:
            raise ConfigError(f"[detector] {exc}") from None
        curve_method = d.get("curve_method")
        if curve_method is not None:
            curve_method = parse_methods(curve_method)[0]
        detector = DetectorConfig(
            model=model,
            repetition_rate=rate,
            total_shots=_int("detector", "total_shots", d.get("total_shots", 1_000_000)),
            bins=_int("detector", "bins", d.get("bins", 32)),
            curve_method=curve_method,
            target_z=_float("detector", "target_z", d.get("target_z", 5.0)),
        )

    run = raw.get("run", {})
    seed = _int("run", "seed", run.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigError("[run] seed must be an unsigned 64-bit integer")
    return RunConfig(protocol, thetas, methods, quad, detector, seed,
                     run.get("output_dir", "out"), derived, raw)
