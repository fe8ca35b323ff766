"""Photon-counting campaigns against a fringe curve.

Per shot the detector registers Poisson(eta * n2(theta) + dark_rate * window)
counts.  The fringe is detected by projecting the per-bin counts on
sin(theta), the shape of the first-harmonic modulation; under the no-fringe
null the projection divided by its Poisson standard error is standard normal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .signal import FringeCurve


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 0.5
    dark_rate: float = 0.1  # counts / s
    window: float = 1e-3  # s per shot

    def __post_init__(self):
        if not 0 <= self.efficiency <= 1:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency}")
        if self.dark_rate < 0 or self.window < 0:
            raise ValueError("dark rate and window must be >= 0")

    @property
    def dark_per_shot(self) -> float:
        return self.dark_rate * self.window


@dataclass
class CountingCampaign:
    thetas: np.ndarray
    shots_per_bin: int
    counts: np.ndarray
    dark_counts: np.ndarray
    expected: np.ndarray
    repetition_rate: float
    seed: int
    z_score: float
    z_cos: float
    amplitude: float
    amplitude_err: float
    z_analytic: float
    detector: DetectorModel
    extra: dict = field(default_factory=dict)

    @property
    def total_shots(self) -> int:
        return self.shots_per_bin * len(self.thetas)

    @property
    def duration(self) -> float:
        return campaign_schedule(self.total_shots, self.repetition_rate)

    @property
    def expected_dark_counts(self) -> float:
        return self.total_shots * self.detector.dark_per_shot

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "rng": "numpy PCG64, SeedSequence(seed, spawn_key=(bin,))",
            "shots_per_bin": self.shots_per_bin,
            "bins": len(self.thetas),
            "total_shots": self.total_shots,
            "repetition_rate_hz": self.repetition_rate,
            "duration_s": self.duration,
            "detector": {
                "efficiency": self.detector.efficiency,
                "dark_rate_hz": self.detector.dark_rate,
                "window_s": self.detector.window,
            },
            "expected_dark_counts": self.expected_dark_counts,
            "simulated_dark_counts": int(self.dark_counts.sum()),
            "thetas": self.thetas.tolist(),
            "counts": self.counts.tolist(),
            "expected_counts": self.expected.tolist(),
            "first_harmonic_amplitude": self.amplitude,
            "first_harmonic_amplitude_err": self.amplitude_err,
            "z_score": self.z_score,
            "z_cos": self.z_cos,
            "z_analytic": self.z_analytic,
            **self.extra,
        }


def _resample(curve: FringeCurve, n_bins: int):
    thetas = 2 * np.pi * np.arange(n_bins) / n_bins
    values = np.interp(thetas, curve.thetas, curve.n2, period=2 * np.pi)
    return thetas, values


def _fringe_sign(thetas, values) -> float:
    proj = np.sum((values - values.mean()) * np.sin(thetas))
    return -1.0 if proj < 0 else 1.0


def analytic_z(visibility: float, mean_counts: float, det: DetectorModel, shots: float) -> float:
    """Expected significance V eta N sqrt(M / (2 (eta N + dark))) of the sine projection.

    Without dark counts this is V sqrt(eta N M / 2).
    """
    signal = det.efficiency * mean_counts
    rate = signal + det.dark_per_shot
    if rate <= 0:
        return 0.0
    return visibility * signal * math.sqrt(shots / (2 * rate))


def simulate_campaign(
    curve: FringeCurve,
    det: DetectorModel,
    shots_per_bin: int,
    seed: int,
    *,
    n_bins: int | None = None,
    repetition_rate: float = 1e3,
) -> CountingCampaign:
    """Monte Carlo of ``shots_per_bin`` shots at each theta bin.

    Bins are the curve's own points, or ``n_bins`` uniform angles on
    [0, 2 pi) sampled from the curve by periodic linear interpolation.  Every
    bin draws from its own stream seeded by (seed, bin index).
    """
    if len(curve) == 0:
        raise ValueError("empty curve")
    if shots_per_bin < 1:
        raise ValueError("shots_per_bin must be >= 1")
    if n_bins is None:
        thetas, n2 = curve.thetas, curve.n2
    else:
        thetas, n2 = _resample(curve, n_bins)

    signal_mean = shots_per_bin * det.efficiency * n2
    dark_mean = shots_per_bin * det.dark_per_shot
    signal_counts = np.empty(len(thetas), dtype=np.int64)
    dark_counts = np.empty(len(thetas), dtype=np.int64)
    for i in range(len(thetas)):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
        signal_counts[i] = rng.poisson(signal_mean[i])
        dark_counts[i] = rng.poisson(dark_mean)
    counts = signal_counts + dark_counts

    sign = _fringe_sign(thetas, n2)
    sin_t = np.sin(thetas)
    cos_t = np.cos(thetas)
    var_sin = float(np.sum(counts * sin_t**2))
    var_cos = float(np.sum(counts * cos_t**2))
    z = sign * float(np.sum(counts * sin_t)) / math.sqrt(var_sin) if var_sin > 0 else 0.0
    z_cos = float(np.sum(counts * cos_t)) / math.sqrt(var_cos) if var_cos > 0 else 0.0

    # first-harmonic amplitude of the per-shot rate, relative to its mean
    k = len(thetas)
    mean_rate = counts.sum() / k
    amplitude = 2 * sign * float(np.sum(counts * sin_t)) / k / mean_rate if mean_rate > 0 else 0.0
    amplitude_err = 2 * math.sqrt(var_sin) / k / mean_rate if mean_rate > 0 else math.inf

    v = _sinusoid_visibility(thetas, n2)
    z_model = analytic_z(v, float(n2.mean()), det, shots_per_bin * k)
    return CountingCampaign(
        thetas=np.asarray(thetas, float),
        shots_per_bin=shots_per_bin,
        counts=counts,
        dark_counts=dark_counts,
        expected=signal_mean + dark_mean,
        repetition_rate=repetition_rate,
        seed=seed,
        z_score=z,
        z_cos=z_cos,
        amplitude=amplitude,
        amplitude_err=amplitude_err,
        z_analytic=z_model,
        detector=det,
        extra={"model_visibility": v, "mean_photons_per_shot": float(n2.mean())},
    )


def _sinusoid_visibility(thetas, n2) -> float:
    """Amplitude of the sin(theta) component relative to the mean."""
    mean = float(np.mean(n2))
    if mean <= 0:
        return 0.0
    return abs(2 * float(np.mean((n2 - mean) * np.sin(thetas)))) / mean


@dataclass(frozen=True)
class ShotEstimate:
    shots: float  # math.inf when the visibility is zero
    resolvable: bool
    model: str = "z = V eta N sqrt(M / (2 (eta N + dark per shot)))"


def required_shots(visibility: float, mean_counts_per_shot: float, det: DetectorModel, target_z: float) -> ShotEstimate:
    """Smallest number of shots M whose expected significance reaches ``target_z``."""
    if visibility < 0 or mean_counts_per_shot <= 0 or target_z <= 0:
        raise ValueError("need V >= 0, mean counts > 0 and target_z > 0")
    signal = det.efficiency * mean_counts_per_shot
    if visibility == 0 or signal == 0:
        return ShotEstimate(math.inf, False)
    rate = signal + det.dark_per_shot
    shots = 2 * rate * (target_z / (visibility * signal)) ** 2
    # guard against ceil() of a value sitting a rounding error above an integer
    return ShotEstimate(float(math.ceil(shots * (1 - 1e-12))), True)


def campaign_schedule(shots: float, repetition_rate: float) -> float:
    """Wall-clock seconds for ``shots`` shots at ``repetition_rate`` Hz."""
    if not repetition_rate > 0:
        raise ValueError("repetition rate must be > 0")
    if shots < 0:
        raise ValueError("shots must be >= 0")
    return shots / repetition_rate
