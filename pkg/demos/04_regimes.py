# The two limits of the probe response and where each closed form holds.

import warnings

import numpy as np

from optokick.params import ProtocolParams
from optokick.signal import (
    SIGNAL_METHODS,
    classify_regime,
    scan_detuning,
    visibility_from_curve,
    visibility_lorentzian,
    visibility_tanh,
)
from optokick.quadrature import SignalQuadSpec

warnings.simplefilter("ignore")


def compare(p, methods, thetas=None, **exact_kwargs):
    return {m: SIGNAL_METHODS[m](p, thetas, **(exact_kwargs if m == "exact" else {})) for m in methods}


# Cold resonator, weak probe coupling: the cavity Lorentzian is much wider
# than the thermal distribution, which acts as a delta function.
cold = ProtocolParams.reference(n_bar=0.0, G2=0.03)
cold = cold.replace(Delta2=visibility_lorentzian(cold).delta2_opt)
print("Lorentzian regime:", classify_regime(cold).name)
curves = compare(cold, ("exact", "gaussian", "lorentzian"))
for name, c in curves.items():
    print(f"  {name:>10s}  V = {visibility_from_curve(c).value:.5e}")
print(f"  closed-form maximum V_max = {visibility_lorentzian(cold).v_max:.5e}")

# Hot resonator, strong probe coupling, probe inside the Gaussian core.
hot = ProtocolParams.reference(G2=0.3, Delta2=4.0)
print("\nDoppler regime:", classify_regime(hot).name)
thetas = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
curves = compare(hot, ("exact", "gaussian", "doppler"), thetas, qspec=SignalQuadSpec(panel_fraction=1.0))
for name, c in curves.items():
    print(f"  {name:>10s}  n2 = {np.array2string(c.n2, precision=2)}")
print(f"  tanh visibility {visibility_tanh(hot):.4e}")

# Optimal probe detuning in the Lorentzian limit
p = ProtocolParams.reference()
opt = visibility_lorentzian(p)
deltas = np.linspace(0, 5 * opt.delta2_opt, 2001)
scan = scan_detuning(p, deltas)
print(f"\nscan maximum at Delta2 = {deltas[np.argmax(scan)]:.4f}, "
      f"closed form {opt.delta2_opt:.4f}, V_max = {opt.v_max:.4e}")
