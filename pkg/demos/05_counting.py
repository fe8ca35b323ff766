# Can a photon counter see the reference fringe?

import math
import warnings

import numpy as np

from optokick.counting import DetectorModel, analytic_z, campaign_schedule, required_shots, simulate_campaign
from optokick.params import ProtocolParams
from optokick.signal import probe_signal_exact, probe_signal_gaussian, visibility_from_curve

warnings.simplefilter("ignore")
det = DetectorModel(efficiency=0.5, dark_rate=0.1, window=1e-3)
p = ProtocolParams.reference()

for curve in (probe_signal_exact(p), probe_signal_gaussian(p)):
    v = visibility_from_curve(curve).value
    n = float(np.mean(curve.n2))
    camp = simulate_campaign(curve, det, 1_000_000 // 32, seed=42, n_bins=32)
    need = required_shots(v, n, det, 5.0)
    print(f"{curve.method}: V = {v:.3e}, {n:.0f} photons per shot")
    print(f"  one million shots take {camp.duration:g} s with {camp.expected_dark_counts:g} expected dark counts")
    print(f"  z = {camp.z_score:.2f} (model {camp.z_analytic:.2f})")
    print(f"  5 sigma needs {need.shots:.3g} shots = {campaign_schedule(need.shots, 1e3) / 3600:.2f} h at 1 kHz")

# The rule of thumb behind the million-shot estimate, for V = 1e-3
print(f"\nV = 1e-3 at 2494 photons per shot: z after 1e6 shots = "
      f"{analytic_z(1e-3, 2494, det, 1e6):.1f}")

# The null: no fringe, a thousand campaigns, z should be standard normal
flat = probe_signal_exact(p.replace(E1=0.0), np.linspace(0, 2 * math.pi, 32, endpoint=False))
z = np.array([simulate_campaign(flat, det, 1000, seed=s).z_score for s in range(1000)])
print(f"null z: mean {z.mean():+.3f}, variance {z.var():.3f}, |z| < 3 in {np.mean(np.abs(z) < 3):.1%}")
