"""Single-photon optomechanical interferometry: probe signal, fringe visibility
and photon-counting feasibility."""

__version__ = "0.1.0"

from .params import (
    MaterialParams,
    ProtocolParams,
    RegimeReport,
    coupling_from_force,
    drive_from_power,
    kick_momentum,
    momentum_variance_coeff,
    pulse_photon_count,
    temperature_from_occupation,
    thermal_occupation,
    validate_regime,
)
from .signal import (
    FringeCurve,
    probe_signal_doppler,
    probe_signal_exact,
    probe_signal_gaussian,
    probe_signal_lorentzian,
    visibility_from_curve,
    visibility_lorentzian,
    visibility_report,
    visibility_tanh,
)
from .counting import DetectorModel, required_shots, simulate_campaign
