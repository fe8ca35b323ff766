"""Reference values computed without the package's own numerics.

Everything here is either a high-precision special-function evaluation
(mpmath), a direct ODE integration (scipy), or a closed form written out
independently of the library code.
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad, solve_ivp

HBAR = 1.054571817e-34
K_B = 1.380649e-23


def faddeeva_series(z, dps=60):
    """w(z) = sum_n (iz)^n / Gamma(n/2 + 1), summed at high precision."""
    z = mp.mpc(z)
    with mp.workdps(dps + int(abs(z) ** 2 / 2.3) + 10):
        iz = 1j * z
        total = mp.mpc(0)
        term_pow = mp.mpc(1)
        n = 0
        while True:
            term = term_pow / mp.gamma(mp.mpf(n) / 2 + 1)
            total += term
            if n > 20 and abs(term) < mp.mpf(10) ** (-dps) * max(abs(total), mp.mpf(1e-300)):
                break
            term_pow *= iz
            n += 1
        return complex(total)


def faddeeva_continued_fraction(z, terms=400):
    """Laplace continued fraction, valid for Im z > 0 and |z| large."""
    z = mp.mpc(z)
    with mp.workdps(40):
        tail = z
        for k in range(terms, 0, -1):
            tail = z - (mp.mpf(k) / 2) / tail
        return complex(1j / mp.sqrt(mp.pi) / tail)


def faddeeva(z):
    return faddeeva_continued_fraction(z) if abs(z) > 8 else faddeeva_series(z)


def voigt_integral(sigma, kappa, delta):
    """int dx exp(-x^2 / 2 sigma^2) / (kappa^2 + (delta - x)^2) = (pi / kappa) Re w(z)."""
    z = (delta + 1j * kappa) / (sigma * math.sqrt(2))
    return math.pi / kappa * faddeeva(z).real


def cavity_ode(q, t, E, kappa, Delta, G):
    """alpha(t) from d alpha/dt = E - (kappa + i(Delta - G q)) alpha, alpha(0) = 0."""
    det = Delta - G * q

    def rhs(_, y):
        a = y[0] + 1j * y[1]
        d = E - (kappa + 1j * det) * a
        return [d.real, d.imag]

    scale = abs(E) / math.hypot(kappa, det) if E else 1.0
    sol = solve_ivp(rhs, (0.0, t), [0.0, 0.0], method="DOP853", rtol=1e-13, atol=1e-16 * scale)
    return sol.y[0, -1] + 1j * sol.y[1, -1]


def coupling_si(F, m, f_m):
    """F / sqrt(2 hbar m omega_m) in rad/s, at mpmath precision."""
    with mp.workdps(30):
        return float(mp.mpf(F) / mp.sqrt(2 * mp.mpf(HBAR) * m * 2 * mp.pi * f_m))


def bose_occupation(T, omega):
    with mp.workdps(30):
        return float(1 / (mp.exp(mp.mpf(HBAR) * omega / (mp.mpf(K_B) * T)) - 1))


def gauss_hermite_moment(k):
    """int x^k exp(-x^2) dx."""
    if k % 2:
        return 0.0
    return float(mp.gamma(mp.mpf(k + 1) / 2))


def mean_kick_exact_state(E1, G1, kappa1, n_bar):
    """<p> of the exact post-kick state.

    The y-derivative of rho(q+y, q-y) at y = 0 gives a local kick
    p0(q) = 2 E^2 G kappa / (kappa^2 + G^2 q^2)^2 weighted by the thermal
    position distribution.
    """
    s = 1 + 2 * n_bar
    sigma = math.sqrt(s)

    def integrand(q):
        local = 2 * E1**2 * G1 * kappa1 / (kappa1**2 + G1**2 * q * q) ** 2
        return local * math.exp(-q * q / (2 * s)) / math.sqrt(2 * math.pi * s)

    width = kappa1 / G1 if G1 > 0 else sigma
    edge = 14 * sigma
    pts = sorted({-width, 0.0, width})
    pts = [x for x in pts if -edge < x < edge]
    value, _ = quad(integrand, -edge, edge, points=pts, epsabs=0, epsrel=1e-12, limit=400)
    return value


def thermal_wigner(q, p, n_bar):
    s = 1 + 2 * n_bar
    return np.exp(-(q * q + p * p) / (2 * s)) / (2 * np.pi * s)


def displaced_voigt_signal(theta, p0, s, E2, kappa2, Delta2, G2):
    """n2(theta) for a thermal state displaced to q0 = p0 sin(theta), via the Faddeeva oracle."""
    q0 = p0 * math.sin(theta)
    sigma_det = G2 * math.sqrt(s)
    # Lorentzian in detuning space: E2^2 / (kappa2^2 + (Delta2 - G2 q0 - x)^2), x ~ N(0, sigma_det^2)
    norm = 1 / (sigma_det * math.sqrt(2 * math.pi))
    return E2**2 * norm * voigt_integral(sigma_det, kappa2, Delta2 - G2 * q0)
