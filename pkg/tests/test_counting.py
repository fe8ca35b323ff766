import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optokick.counting import (
    DetectorModel,
    analytic_z,
    campaign_schedule,
    required_shots,
    simulate_campaign,
)
from optokick.params import ProtocolParams
from optokick.signal import FringeCurve, default_thetas


def synthetic(mean, visibility, n=128):
    t = default_thetas(n)
    return FringeCurve(t, mean * (1 + visibility * np.sin(t)), "lorentzian", ProtocolParams.reference())


class TestDetector:
    def test_defaults(self):
        d = DetectorModel()
        assert (d.efficiency, d.dark_rate, d.window) == (0.5, 0.1, 1e-3)
        assert d.dark_per_shot == pytest.approx(1e-4)

    @pytest.mark.parametrize("kwargs", [{"efficiency": 1.5}, {"efficiency": -0.1}, {"dark_rate": -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            DetectorModel(**kwargs)


class TestSchedule:
    def test_million_shots(self):
        assert campaign_schedule(1e6, 1e3) == 1000.0

    def test_zero(self):
        assert campaign_schedule(0, 1e3) == 0.0

    def test_hour(self):
        assert campaign_schedule(3.6e6, 1e3) == 3600.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            campaign_schedule(10, 0.0)
        with pytest.raises(ValueError):
            campaign_schedule(-1, 1e3)


class TestRequiredShots:
    def test_one_count_per_shot(self):
        det = DetectorModel(1.0, 0.0)
        assert required_shots(1e-3, 1.0, det, 5.0).shots == 5e7

    def test_reference_scale(self):
        est = required_shots(1e-3, 2494.0, DetectorModel(0.5, 0.0), 5.0)
        assert est.resolvable
        assert est.shots == pytest.approx(4.0e4, rel=0.01)
        # the million-shot campaign then reaches about 25 sigma
        assert analytic_z(1e-3, 2494.0, DetectorModel(0.5, 0.0), 1e6) == pytest.approx(25.0, rel=0.01)

    @given(st.floats(1e-5, 0.1), st.floats(0.1, 1e4))
    def test_inverse_square(self, v, n):
        det = DetectorModel(0.5, 0.0)
        a = 2 * 0.5 * n * (5 / (v * 0.5 * n)) ** 2
        b = 2 * 0.5 * n * (5 / (2 * v * 0.5 * n)) ** 2
        assert b == pytest.approx(a / 4, rel=1e-12)
        m1 = required_shots(v, n, det, 5.0).shots
        m2 = required_shots(2 * v, n, det, 5.0).shots
        assert m2 == math.ceil(b * (1 - 1e-12))
        assert abs(m2 - m1 / 4) <= 1

    def test_zero_visibility(self):
        est = required_shots(0.0, 10.0, DetectorModel(), 5.0)
        assert est.shots == math.inf and not est.resolvable

    def test_dark_counts_cost_shots(self):
        clean = required_shots(1e-2, 0.01, DetectorModel(0.5, 0.0), 5.0).shots
        noisy = required_shots(1e-2, 0.01, DetectorModel(0.5, 10.0), 5.0).shots
        assert noisy > clean

    def test_invalid(self):
        with pytest.raises(ValueError):
            required_shots(1e-3, 0.0, DetectorModel(), 5.0)
        with pytest.raises(ValueError):
            required_shots(1e-3, 1.0, DetectorModel(), 0.0)


class TestSimulation:
    def test_deterministic(self):
        c = synthetic(10.0, 0.01)
        a = simulate_campaign(c, DetectorModel(), 1000, seed=42)
        b = simulate_campaign(c, DetectorModel(), 1000, seed=42)
        assert np.array_equal(a.counts, b.counts) and a.z_score == b.z_score
        other = simulate_campaign(c, DetectorModel(), 1000, seed=43)
        assert not np.array_equal(a.counts, other.counts)

    def test_bins_use_separate_streams(self):
        c = synthetic(10.0, 0.0, n=8)
        camp = simulate_campaign(c, DetectorModel(1.0, 0.0), 1, seed=1)
        assert len(set(camp.counts.tolist())) > 1

    def test_counts_nonnegative_integers(self):
        camp = simulate_campaign(synthetic(0.5, 0.5), DetectorModel(), 10, seed=0)
        assert camp.counts.dtype.kind == "i" and np.all(camp.counts >= 0)
        assert camp.duration == camp.total_shots / 1e3

    def test_poisson_mean(self):
        det = DetectorModel(0.5, 0.1, 1e-3)
        c = synthetic(2.0, 0.2, n=32)
        camp = simulate_campaign(c, det, 100_000, seed=5)
        expected = camp.expected.sum()
        assert abs(camp.counts.sum() - expected) < 3 * math.sqrt(expected)
        per_bin = np.abs(camp.counts - camp.expected) / np.sqrt(camp.expected)
        assert np.all(per_bin < 4.5)

    def test_null_distribution(self):
        c = synthetic(2.0, 0.0, n=32)
        det = DetectorModel(1.0, 0.0)
        z = np.array([simulate_campaign(c, det, 1000, seed=s).z_score for s in range(1000)])
        assert np.mean(np.abs(z) < 3) >= 0.99
        assert abs(z.mean()) < 0.1
        assert 0.8 <= z.var() <= 1.25

    def test_reference_scale_detection(self):
        c = synthetic(2494.0, 1e-3)
        det = DetectorModel(0.5, 0.1, 1e-3)
        camp = simulate_campaign(c, det, 1_000_000 // 32, seed=42, n_bins=32)
        assert camp.total_shots == 1_000_000
        assert camp.z_analytic == pytest.approx(25.0, rel=0.01)
        assert camp.z_score >= 5
        assert camp.z_score == pytest.approx(camp.z_analytic, rel=0.3)

    def test_dark_counts(self):
        det = DetectorModel(0.0, 0.1, 1e-3)
        c = synthetic(2494.0, 1e-3, n=32)
        camp = simulate_campaign(c, det, 37_500, seed=9)
        assert camp.duration == pytest.approx(1200.0)
        assert camp.expected_dark_counts == pytest.approx(120.0)
        assert camp.counts.sum() == camp.dark_counts.sum()
        assert abs(camp.dark_counts.sum() - 120) < 3 * math.sqrt(120)

    def test_required_shots_consistent(self):
        v, n = 1e-3, 2494.0
        det = DetectorModel(0.5, 0.1, 1e-3)
        m = required_shots(v, n, det, 5.0).shots
        c = synthetic(n, v)
        bins = 32
        z = np.array([simulate_campaign(c, det, int(math.ceil(m / bins)), seed=s, n_bins=bins).z_score
                      for s in range(200)])
        assert 3.5 <= z.mean() <= 6.5
        assert np.mean((z >= 3.5) & (z <= 6.5)) >= 0.8

    def test_resampling(self):
        c = synthetic(100.0, 0.1, n=128)
        camp = simulate_campaign(c, DetectorModel(), 10, seed=0, n_bins=16)
        assert len(camp.thetas) == 16
        assert camp.extra["model_visibility"] == pytest.approx(0.1, rel=1e-3)

    def test_invalid(self):
        c = synthetic(10.0, 0.0)
        with pytest.raises(ValueError):
            simulate_campaign(c, DetectorModel(), 0, seed=0)

    def test_as_dict(self):
        d = simulate_campaign(synthetic(10.0, 0.01), DetectorModel(), 100, seed=3).as_dict()
        assert d["seed"] == 3 and d["total_shots"] == 12800
        assert len(d["counts"]) == 128
