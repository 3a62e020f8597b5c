"""Spectrum construction, evaluation, conventions, and band algebra."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from dephasekit import spectra

TWO_PI = 2 * math.pi


class TestConstruction:
    def test_power_law_amplitude_at_1hz(self):
        s = spectra.make_power_law(10 ** -8.5, 5 / 3, 1e-3, 1000.0)
        assert spectra.eval_one_sided(s, 1.0) == pytest.approx(10 ** -8.5, rel=1e-14)

    def test_white_is_flat(self):
        s = spectra.make_white(4.0, 0.1, 100.0)
        f = np.array([0.1, 1.0, 99.0, 100.0])
        assert np.all(spectra.eval_one_sided(s, f) == 4.0)

    def test_band_validation(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.make_white(1.0, 10.0, 1.0)
        with pytest.raises(spectra.SpectrumError):
            spectra.make_white(1.0, 0.0, 1.0)
        with pytest.raises(spectra.SpectrumError):
            spectra.make_power_law(1.0, 5 / 3, math.nan, 1.0)
        with pytest.raises(spectra.SpectrumError):
            spectra.make_power_law(-1.0, 5 / 3, 0.1, 1.0)
        with pytest.raises(spectra.SpectrumError):
            spectra.make_power_law(1.0, -0.5, 0.1, 1.0)

    def test_paper_preset_shape(self):
        s = spectra.paper_intensity_spectrum(2.0)
        assert s.f_ir == pytest.approx(0.016 / TWO_PI)
        assert s.f_uv == 1000.0
        assert spectra.eval_one_sided(s, 1.0) == pytest.approx(4 * 10 ** -8.5)
        assert s.spectrum_id == "paper-yag-1f"


class TestEvaluation:
    def test_out_of_band_is_exactly_zero(self):
        for s in (spectra.make_white(4.0, 0.1, 10.0),
                  spectra.make_power_law(2.0, 1.7, 0.1, 10.0),
                  spectra.make_lorentzian(1.0, 3.0, 0.1, 10.0)):
            assert spectra.eval_one_sided(s, 20.0) == 0.0
            assert spectra.eval_one_sided(s, 0.05) == 0.0
            assert spectra.eval_one_sided(s, 0.0) == 0.0

    def test_tabulated_loglog_midpoint(self):
        s = spectra.make_tabulated([(1.0, 1e-3), (100.0, 1e-5)])
        # log-log straight line: midpoint in log f lands at the log-S midpoint
        assert spectra.eval_one_sided(s, 10.0) == pytest.approx(1e-4, rel=1e-12)

    def test_tabulated_exact_at_knots(self):
        knots = [(0.5, 3e-2), (2.0, 1e-3), (40.0, 5e-4)]
        s = spectra.make_tabulated(knots)
        for f, v in knots:
            assert float(spectra.eval_one_sided(s, f)) == v

    def test_tabulated_monotone_between_monotone_knots(self):
        s = spectra.make_tabulated([(1.0, 1.0), (10.0, 0.1), (100.0, 1e-3)])
        f = np.geomspace(1.0, 100.0, 301)
        vals = spectra.eval_one_sided(s, f)
        assert np.all(np.diff(vals) <= 1e-18)

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(5)
        f = np.concatenate([[0.0], rng.uniform(0, 2000, 4000)])
        several = [
            spectra.make_white(3.0, 0.01, 900.0),
            spectra.make_power_law(1.3, 2.0, 0.5, 800.0),
            spectra.make_lorentzian(2.0, 5.0, 0.01, 1500.0),
            spectra.make_tabulated([(0.1, 1e-2), (5.0, 1e-4), (50.0, 1e-5)]),
        ]
        several.append(spectra.combine(several))
        for s in several:
            assert np.all(spectra.eval_one_sided(s, f) >= 0.0)

    def test_angular_convention(self):
        s = spectra.make_white(6.0, 0.1, 100.0)
        assert spectra.eval_angular(s, TWO_PI * 1.0) == pytest.approx(3.0)
        assert spectra.eval_angular(s, TWO_PI * 0.05) == 0.0
        p = spectra.paper_intensity_spectrum(1.0)
        assert spectra.eval_angular(p, TWO_PI) == pytest.approx(10 ** -8.5 / 2)

    def test_variance_matching_between_conventions(self):
        # int_0^inf (dw/pi) S(w) must equal int_0^inf S_f(f) df
        for s in (spectra.make_white(4.0, 0.3, 50.0),
                  spectra.make_power_law(0.7, 5 / 3, 0.2, 300.0),
                  spectra.make_lorentzian(2.0, 4.0, 0.1, 200.0)):
            per_hz = quad(lambda f: float(spectra.eval_one_sided(s, f)),
                          s.f_ir, s.f_uv, limit=500)[0]
            angular = quad(lambda w: float(spectra.eval_angular(s, w)) / math.pi,
                           TWO_PI * s.f_ir, TWO_PI * s.f_uv, limit=500)[0]
            assert angular == pytest.approx(per_hz, rel=1e-8)


class TestCombineAndScale:
    def test_singleton(self):
        s = spectra.make_power_law(1.0, 1.0, 0.1, 10.0)
        c = spectra.combine([s])
        f = np.geomspace(0.05, 20.0, 200)
        assert np.array_equal(spectra.eval_one_sided(c, f),
                              spectra.eval_one_sided(s, f))

    def test_additivity_exact(self):
        a = spectra.make_white(2.0, 0.1, 10.0)
        b = spectra.make_white(2.0, 0.1, 10.0)
        c = spectra.combine([a, b])
        f = np.geomspace(0.1, 10.0, 100)
        assert np.all(spectra.eval_one_sided(c, f) == 4.0)

    def test_band_union_semantics(self):
        pl = spectra.make_power_law(1.0, 1.5, 0.1, 10.0)
        lz = spectra.make_lorentzian(5.0, 2.0, 20.0, 100.0)
        c = spectra.combine([pl, lz])
        assert c.f_ir == 0.1 and c.f_uv == 100.0
        # inside pl band only: the sum equals pl alone
        f = np.array([0.5, 5.0])
        assert np.array_equal(spectra.eval_one_sided(c, f),
                              spectra.eval_one_sided(pl, f))
        assert float(spectra.eval_one_sided(c, 15.0)) == 0.0  # gap between bands

    def test_empty_rejected(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.combine([])

    def test_scale(self):
        s = spectra.make_lorentzian(2.0, 4.0, 0.1, 200.0)
        f = np.geomspace(0.1, 200.0, 50)
        assert np.allclose(spectra.eval_one_sided(spectra.scale(s, 2.5), f),
                           2.5 * spectra.eval_one_sided(s, f), rtol=1e-15)
        nested = spectra.combine([s, spectra.make_white(1.0, 1.0, 2.0)])
        assert np.allclose(spectra.eval_one_sided(spectra.scale(nested, 0.5), f),
                           0.5 * spectra.eval_one_sided(nested, f), rtol=1e-15)


class TestBandPower:
    @pytest.mark.parametrize("s", [
        spectra.make_white(4.0, 0.3, 50.0),
        spectra.make_power_law(0.7, 5 / 3, 0.2, 300.0),
        spectra.make_power_law(0.7, 1.0, 0.2, 300.0),
        spectra.make_lorentzian(2.0, 4.0, 0.1, 200.0),
        spectra.make_tabulated([(0.5, 3e-2), (2.0, 1e-3), (40.0, 5e-4)]),
    ], ids=["white", "power_law", "one_over_f", "lorentzian", "tabulated"])
    def test_against_quadrature(self, s):
        knots = [k[0] for k in s.table] if s.kind == "tabulated" else []
        for (a, b) in [(s.f_ir, s.f_uv), (0.01, 1.0), (1.7, 12.3), (0.0, 1e6)]:
            lo, hi = max(a, s.f_ir), min(b, s.f_uv)
            if hi > lo:
                pts = [k for k in knots if lo < k < hi] or None
                ref = quad(lambda f: float(spectra.eval_one_sided(s, f)),
                           lo, hi, limit=800, points=pts)[0]
            else:
                ref = 0.0
            assert float(spectra.band_power(s, a, b)) == pytest.approx(ref, rel=1e-9, abs=1e-14)

    def test_variance(self):
        s = spectra.make_white(4.0, 1e-4, 1e4)
        assert spectra.variance(s) == pytest.approx(4.0 * (1e4 - 1e-4), rel=1e-12)

    def test_sum_band_power(self):
        a = spectra.make_white(2.0, 0.1, 10.0)
        b = spectra.make_power_law(1.0, 0.5, 5.0, 50.0)
        c = spectra.combine([a, b])
        assert float(spectra.band_power(c, 0.0, 100.0)) == pytest.approx(
            spectra.variance(a) + spectra.variance(b), rel=1e-12)


class TestCsv:
    def test_round_trip(self, tmp_path):
        s = spectra.make_tabulated([(0.5, 3e-2), (2.0, 1e-3), (40.0, 5e-4)])
        path = tmp_path / "spec.csv"
        spectra.to_csv(s, path, n_points=64)
        back = spectra.from_csv(path)
        # exact at the resampled knots; interpolation only cuts the corners
        # of the original kinks between them
        f = np.geomspace(0.5, 40.0, 64)
        assert np.allclose(spectra.eval_one_sided(back, f),
                           spectra.eval_one_sided(s, f), rtol=1e-12)
        f_dense = np.geomspace(0.5, 40.0, 301)
        assert np.allclose(spectra.eval_one_sided(back, f_dense),
                           spectra.eval_one_sided(s, f_dense), rtol=0.02)

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("freq,psd\n1.0,2.0\n10.0,1.0\n")
        with pytest.raises(spectra.SpectrumError):
            spectra.from_csv(path)

    def test_table_validation(self):
        with pytest.raises(spectra.SpectrumError):
            spectra.make_tabulated([(1.0, 1.0)])
        with pytest.raises(spectra.SpectrumError):
            spectra.make_tabulated([(1.0, 1.0), (1.0, 2.0)])
        with pytest.raises(spectra.SpectrumError):
            spectra.make_tabulated([(1.0, 1.0), (2.0, 0.0)])
