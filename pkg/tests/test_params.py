import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from optokick import params as P
from optokick.params import ProtocolParams


class TestConversions:
    def test_coupling_reference_resonator(self):
        G = P.coupling_from_force(0.1e-12, 1e-15, 2 * math.pi * 10e6)
        assert G == pytest.approx(oracles.coupling_si(0.1e-12, 1e-15, 10e6), rel=1e-13)
        # 2.746e7 rad/s quoted to four figures (the value is 2.74699e7)
        assert G == pytest.approx(2.746e7, rel=5e-4)

    def test_coupling_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            P.coupling_from_force(0.0, 1e-15, 1e7)
        with pytest.raises(ValueError):
            P.coupling_from_force(1e-13, -1.0, 1e7)

    def test_drive_power_round_trip(self):
        kappa = 2 * math.pi * 0.159e9
        omega_l = 2 * math.pi * 193e12
        p_in = P.power_from_drive(1e9, kappa, omega_l)
        assert P.drive_from_power(p_in, kappa, omega_l) == pytest.approx(1e9, rel=1e-12)

    def test_drive_gives_one_intracavity_photon(self):
        from optokick.phasespace import cavity_amplitude

        kappa = 2 * math.pi * 0.159e9
        omega_l = 2 * math.pi * 193e12
        p_in = P.power_from_drive(kappa, kappa, omega_l)
        E = P.drive_from_power(p_in, kappa, omega_l)
        alpha = cavity_amplitude(0.0, math.inf, E / 1e9, kappa / 1e9, 0.0, 0.0)
        assert abs(alpha) ** 2 == pytest.approx(1.0, rel=1e-12)

    def test_zero_power_rejected(self):
        with pytest.raises(ValueError):
            P.drive_from_power(0.0, 1e9, 1e15)

    def test_thermal_occupation_matches_bose(self):
        omega = 2 * math.pi * 10e6
        for T in (1e-3, 0.1, 4.8, 300.0):
            assert P.thermal_occupation(T, omega) == pytest.approx(oracles.bose_occupation(T, omega), rel=1e-12)

    def test_occupation_1e4_is_about_4p8_kelvin(self):
        T = P.temperature_from_occupation(1e4, 2 * math.pi * 10e6)
        assert T == pytest.approx(4.8, rel=5e-3)

    def test_zero_temperature(self):
        assert P.thermal_occupation(0.0, 1e7) == 0.0
        assert P.temperature_from_occupation(0.0, 1e7) == 0.0
        with pytest.raises(ValueError):
            P.thermal_occupation(-1.0, 1e7)

    @given(st.floats(1e-3, 1e6))
    def test_occupation_round_trip(self, n):
        omega = 2 * math.pi * 10e6
        T = P.temperature_from_occupation(n, omega)
        assert P.thermal_occupation(T, omega) == pytest.approx(n, rel=1e-9)

    def test_rate_units(self):
        assert P.per_s_to_per_ns(1e9) == 1.0
        assert P.per_ns_to_per_s(2.0) == 2e9


class TestKick:
    def test_reference_kick(self, reference):
        assert P.kick_momentum(reference) == pytest.approx(0.0549, rel=2e-3)
        assert P.kick_momentum(reference) == pytest.approx(2 * reference.G1, rel=1e-15)

    def test_no_drive_no_kick(self, reference):
        assert P.kick_momentum(reference.replace(E1=0.0)) == 0.0

    @given(st.floats(0.01, 10), st.floats(0.1, 10))
    def test_quadratic_in_drive(self, E, kappa):
        base = ProtocolParams.reference(E1=E, kappa1=kappa)
        double = base.replace(E1=2 * E)
        assert P.kick_momentum(double) == pytest.approx(4 * P.kick_momentum(base), rel=1e-13)

    def test_momentum_width(self, reference):
        w = P.momentum_variance_coeff(reference)
        assert w.thermal == 2 * reference.thermal_variance
        assert w.a1 - w.thermal == pytest.approx(8 * reference.G1**2, rel=1e-13)
        assert w.a1 - w.thermal == pytest.approx(6.04e-3, rel=2e-3)
        assert w.relative_correction == pytest.approx(1.5e-7, rel=0.01)

    def test_width_at_zero_coupling(self, reference):
        w = P.momentum_variance_coeff(reference.replace(G1=0.0))
        assert w.a1 == w.thermal and w.relative_correction == 0


class TestPhotonNumbers:
    def test_pulse_photons(self):
        assert P.pulse_photon_count(1000.0, 1.0, 5.0) == pytest.approx(2.5e6)

    def test_force_per_photon_cavity(self):
        # g_om / 2 pi = 123 GHz/nm
        F = P.force_per_photon_cavity(2 * math.pi * 123e9 / 1e-9)
        assert F == pytest.approx(80e-15, rel=0.03)
        assert F == pytest.approx(oracles.HBAR * 2 * math.pi * 123e18, rel=1e-14)

    def test_force_per_photon_waveguide(self):
        # 193 THz carrier, n_eff = 1, dn_eff/dz = 1e-3 per nm
        F = P.force_per_photon_waveguide(2 * math.pi * 193e12, 1.0, 1e6)
        assert F == pytest.approx(130e-15, rel=0.03)
        assert P.force_per_photon_waveguide(2 * math.pi * 193e12, 2.0, 1e6) == pytest.approx(F / 2, rel=1e-15)

    def test_force_zero_coupling(self):
        assert P.force_per_photon_cavity(0.0) == 0.0
        with pytest.raises(ValueError):
            P.force_per_photon_cavity(-1.0)


class TestProtocolParams:
    def test_reference_set(self, reference):
        assert reference.G1 == reference.G2 == pytest.approx(0.0274699, rel=1e-6)
        assert reference.omega_m == pytest.approx(2 * math.pi * 0.01)
        assert reference.Q_m == pytest.approx(1e6)
        assert reference.thermal_variance == 20001

    def test_validation(self):
        with pytest.raises(ValueError):
            ProtocolParams.reference(kappa1=0.0)
        with pytest.raises(ValueError):
            ProtocolParams.reference(n_bar=-1.0)
        with pytest.raises(ValueError):
            ProtocolParams.reference(E2=math.nan)

    def test_frozen(self, reference):
        with pytest.raises(Exception):
            reference.kappa1 = 2.0

    def test_material_params(self):
        m = P.MaterialParams(mass=1e-15, force_per_photon=1e-13, temperature=4.8)
        assert m.input_power is None
        with pytest.raises(ValueError):
            P.MaterialParams(mass=-1.0)


class TestRegime:
    def test_reference_is_acceptable_but_marginal(self, reference):
        report = P.validate_regime(reference, tau=2 * math.pi / reference.omega_m)
        assert report.ok
        assert len(report.checks) == 6
        status = {c.name: c.status for c in report.checks}
        assert status["kappa1_t1"] == "marginal"
        assert status["kappa2_t2"] == "marginal"
        assert status["omega_m_t1"] == "marginal"
        assert status["gamma_m_tau"] == "pass"
        assert status["Q_m"] == "pass"

    def test_reference_coupling_flags(self, reference):
        report = P.validate_regime(reference)
        assert report.first_order_valid
        assert report.g1_over_kappa1 == pytest.approx(0.02747, rel=1e-3)
        assert report.thermal_detuning_ratio == pytest.approx(3.885, rel=1e-3)
        assert report.notes

    def test_fast_mechanics_fail(self, reference):
        report = P.validate_regime(reference.replace(omega_m=reference.kappa1))
        assert not report.ok
        assert {c.name for c in report.checks if not c.passed} == {"omega_m_t1", "omega_m_t2"}

    def test_short_pulse_fails(self, reference):
        report = P.validate_regime(reference.replace(t1=1.0))
        assert [c.name for c in report.checks if not c.passed] == ["kappa1_t1"]

    def test_long_delay_damped(self, reference):
        report = P.validate_regime(reference, tau=0.2 / reference.gamma_m)
        assert not report.ok

    def test_strong_coupling_invalidates_first_order(self, reference):
        assert not P.validate_regime(reference.replace(G1=0.5)).first_order_valid

    def test_never_raises(self, reference):
        P.validate_regime(reference.replace(gamma_m=0.0, t1=0.0, t2=0.0))

    def test_as_dict(self, reference):
        d = P.validate_regime(reference).as_dict()
        assert d["ok"] and len(d["checks"]) == 6
