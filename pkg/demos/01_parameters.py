# From device numbers to the dimensionless rates the model runs on.
#
# Everything downstream works in rad/ns and ns, with positions and momenta
# in units of the zero-point width (q = b + b^dagger).

import math

from optokick.params import (
    ProtocolParams,
    coupling_from_force,
    force_per_photon_cavity,
    force_per_photon_waveguide,
    kick_momentum,
    momentum_variance_coeff,
    pulse_photon_count,
    temperature_from_occupation,
    validate_regime,
)

# A 1 pg cantilever at 10 MHz pushed with 0.1 pN per photon
omega_m = 2 * math.pi * 10e6  # rad/s
G = coupling_from_force(0.1e-12, 1e-15, omega_m)
print(f"single-photon coupling G = {G:.4e} rad/s = {G / 1e9:.5f} rad/ns")

# how big such forces get in practice
print(f"photonic-crystal cavity, g_om = 2pi x 123 GHz/nm: {force_per_photon_cavity(2 * math.pi * 123e18) * 1e15:.0f} fN")
print(f"guided wave at 193 THz, dn/dz = 1e-3 / nm:       "
      f"{force_per_photon_waveguide(2 * math.pi * 193e12, 1.0, 1e6) * 1e15:.0f} fN")

# ten thousand thermal phonons is a liquid-helium temperature at 10 MHz
print(f"n_bar = 1e4 corresponds to T = {temperature_from_occupation(1e4, omega_m):.2f} K")

p = ProtocolParams.reference()
print(f"\nkick p0 = 2 E1^2 G1 / kappa1^3 = {kick_momentum(p):.5f}")
print(f"thermal momentum width sqrt(1 + 2 n_bar) = {math.sqrt(p.thermal_variance):.1f}")
print(f"probe pulse carries {pulse_photon_count(p.E2, p.kappa2, p.t2):.3g} photons")

width = momentum_variance_coeff(p)
print(f"kick broadens the momentum variance by a relative {width.relative_correction:.2e}")

# The regime report grades every modelling assumption.  The reference set
# is acceptable but marginal: five cavity lifetimes per pulse, and the
# resonator turns by 0.31 rad while the pulse is on.
report = validate_regime(p, tau=2 * math.pi / p.omega_m)
for check in report.checks:
    print(f"  {check.name:<12s} {check.ratio:10.4g}  {check.status}")
print(f"G1 / kappa1 = {report.g1_over_kappa1:.4f}, thermal detuning of the first pulse "
      f"= {report.thermal_detuning_ratio:.2f} linewidths")
for note in report.notes:
    print("note:", note)
