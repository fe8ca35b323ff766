# The resonator state after the first pulse, in position and phase space.
#
# The kick is applied only where the first pulse is near resonance.  For a
# hot resonator the thermal position spread detunes the pulse by several
# linewidths, so the average kick is much smaller than the nominal p0.

import math

import numpy as np

from optokick.params import ProtocolParams, kick_momentum
from optokick.phasespace import (
    WignerGrid,
    post_kick_density_exact,
    post_kick_gaussian,
    rotate_phase_space,
    thermal_density,
    wigner_from_density,
)

for n_bar in (0.0, 1e2, 1e4):
    p = ProtocolParams.reference(n_bar=n_bar)
    grid = wigner_from_density(post_kick_density_exact(p))
    m = grid.moments()
    print(f"n_bar = {n_bar:8.0f}: <p> = {m['mean_p']:.5f} = {m['mean_p'] / kick_momentum(p):.3f} p0, "
          f"mass defect {grid.mass_defect:.1e}")

# The thermal Wigner function is a symmetric Gaussian of variance 1 + 2 n_bar.
thermal = wigner_from_density(thermal_density(1e4), n_points=257)
print(f"\nthermal W(0, 0) = {thermal.W.max():.6e}, expected 1 / (2 pi s) = {1 / (2 * math.pi * 20001):.6e}")

# Free evolution is a rotation by theta = omega_m tau.  For a Gaussian the
# rotation is exact; on a grid it is a bicubic resampling.
p = ProtocolParams.reference(n_bar=0.5, E1=10.0)
state = post_kick_gaussian(p)
axis = np.linspace(-16, 16, 1024)
grid = WignerGrid.from_gaussian(state, axis, axis)
for theta in (0.0, math.pi / 4, math.pi / 2):
    rotated = rotate_phase_space(grid, theta)
    exact = WignerGrid.from_gaussian(state.rotate(theta), axis, axis)
    m = rotated.moments()
    err = np.max(np.abs(rotated.W - exact.W)) / grid.W.max()
    print(f"theta = {theta:.3f}: mean (q, p) = ({m['mean_q']:.4f}, {m['mean_p']:.4f}), "
          f"interpolation error {err:.1e}")
