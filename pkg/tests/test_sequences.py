"""Pulse-time catalogs and filter-function cross-checks."""
import math

import numpy as np
import pytest

from dephasekit import sequences
from dephasekit.sequences import (FID, FilterDomainError, SequenceError, cdd,
                                  cpmg, custom_sequence, filter_closed_form,
                                  filter_generic, pdd, pulse_times, se, udd)


class TestCatalog:
    def test_se_halftime(self):
        assert se().fractions == (0.5,)
        assert pulse_times("se").fractions == (0.5,)

    def test_cpmg_formula(self):
        assert cpmg(2).fractions == (0.25, 0.75)
        assert cpmg(4).fractions == (0.125, 0.375, 0.625, 0.875)

    def test_udd_formula_and_cpmg2_coincidence(self):
        u = udd(2)
        assert u.fractions[0] == pytest.approx(math.sin(math.pi / 6) ** 2, abs=1e-15)
        assert np.allclose(u.fractions, (0.25, 0.75), atol=1e-15)

    def test_pdd_formula(self):
        assert pdd(3).fractions == (0.25, 0.5, 0.75)

    def test_cdd_level3_expansion(self):
        s = cdd(3)
        assert s.n_pulses == 5
        assert np.allclose(s.fractions, np.array([1, 3, 4, 5, 7]) / 8)

    def test_cdd_level4_expansion(self):
        s = cdd(4)
        assert s.n_pulses == 10
        assert np.allclose(s.fractions,
                           np.array([1, 3, 4, 5, 7, 9, 11, 12, 13, 15]) / 16)

    def test_cdd_parity_of_midpoint(self):
        # odd levels place a pulse exactly at 1/2; even levels never do
        for level in range(1, 7):
            has_mid = 0.5 in cdd(level).fractions
            assert has_mid == (level % 2 == 1)

    def test_reflection_symmetry(self):
        for seq in (cpmg(7), cpmg(12), pdd(5), pdd(8), udd(6), udd(9), cdd(4)):
            fr = np.asarray(seq.fractions)
            assert np.allclose(np.sort(1.0 - fr), fr, atol=1e-15), seq.sequence_id

    def test_rejects_zero_pulses(self):
        for fam in ("cpmg", "pdd", "udd"):
            with pytest.raises(SequenceError):
                pulse_times(fam, n=0)
        with pytest.raises(SequenceError):
            cdd(0)
        with pytest.raises(SequenceError):
            pulse_times("nope", n=3)


class TestCustom:
    def test_behaves_like_se(self):
        c = custom_sequence([0.5])
        x = np.linspace(0.0, 50.0, 1001)
        assert np.array_equal(filter_generic(c, x), filter_generic(se(), x))

    def test_empty_is_fid(self):
        assert custom_sequence([]) is FID

    def test_rejections(self):
        with pytest.raises(SequenceError):
            custom_sequence([0.3, 0.3])
        with pytest.raises(SequenceError):
            custom_sequence([0.7, 0.3])
        with pytest.raises(SequenceError):
            custom_sequence([0.0, 0.5])
        with pytest.raises(SequenceError):
            custom_sequence([0.5, 1.0])


class TestGenericFilter:
    def test_fid_value(self):
        assert filter_generic(FID, math.pi) == pytest.approx(2.0, rel=1e-14)

    def test_se_value(self):
        assert filter_generic(se(), 2 * math.pi) == pytest.approx(8.0, rel=1e-12)

    def test_zero(self):
        for seq in (FID, se(), cpmg(6), udd(5), cdd(3)):
            assert filter_generic(seq, 0.0) == 0.0

    def test_rejects_bad_x(self):
        with pytest.raises(ValueError):
            filter_generic(se(), -1.0)
        with pytest.raises(ValueError):
            filter_generic(se(), math.inf)

    def test_small_x_quartic_bound(self):
        # refocusing sequences: F <= x^4 (sum |c_j| s_j^2)^2 / 8 once the
        # zeroth and first moments of the signed boundary sum vanish
        for seq in (se(), cpmg(2), cpmg(6), udd(4), pdd(5), cdd(3), cdd(4)):
            fr = np.concatenate(([0.0], seq.fractions, [1.0]))
            coef = np.concatenate(([1.0], 2.0 * np.ones(seq.n_pulses), [1.0]))
            bound_coef = (coef * fr**2).sum() ** 2 / 8.0
            for x in (1e-2, 1e-3):
                f = float(filter_generic(seq, x))
                assert f <= bound_coef * x**4 * 1.000001 + 1e-300, seq.sequence_id

    def test_udd_leading_order_constant_stable(self):
        # F(x) / x^(2n+2) approaches a constant; ratio stable to 3 digits
        for n, xs in ((1, (1e-2, 1e-3)), (2, (1e-2, 1e-3)), (3, (1e-1, 1e-2))):
            seq = udd(n)
            e = 2 * n + 2
            c = [float(filter_generic(seq, x)) / x**e for x in xs]
            assert c[0] == pytest.approx(c[1], rel=1e-3), (n, c)
            assert c[1] > 0.0


class TestClosedForms:
    def test_se_matches_generic_tightly(self):
        x = np.linspace(0.0, 100.0, 10_000)
        gen = filter_generic(se(), x)
        cf = filter_closed_form("se", x)
        assert np.all(np.abs(cf - gen) <= 1e-10 * (1.0 + gen))

    def test_se_values(self):
        assert filter_closed_form("se", 2 * math.pi) == pytest.approx(8.0, rel=1e-12)
        assert filter_closed_form("se", 0.0) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_cpmg_matches_generic(self, n):
        x = np.linspace(0.05, 60.0, 4001)
        x = x[np.abs(np.cos(x / (2 * n))) > 1e-3]
        gen = filter_generic(cpmg(n), x)
        cf = filter_closed_form("cpmg", x, n=n)
        assert np.max(np.abs(cf - gen) / (1.0 + gen)) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_pdd_matches_generic(self, n):
        x = np.linspace(0.05, 60.0, 4001)
        x = x[np.abs(np.cos(x / (2 * n + 2))) > 1e-3]
        gen = filter_generic(pdd(n), x)
        cf = filter_closed_form("pdd", x, n=n)
        assert np.max(np.abs(cf - gen) / (1.0 + gen)) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_udd_matches_generic(self, n):
        x = np.linspace(0.0, 60.0, 4001)
        gen = filter_generic(udd(n), x)
        cf = filter_closed_form("udd", x, n=n)
        assert np.max(np.abs(cf - gen) / (1.0 + gen)) < 1e-10

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_cdd_matches_generic(self, level):
        x = np.linspace(0.0, 60.0, 4001)
        gen = filter_generic(cdd(level), x)
        cf = filter_closed_form("cdd", x, level=level)
        assert np.max(np.abs(cf - gen) / (1.0 + gen)) < 1e-10

    def test_cpmg_small_x_agreement(self):
        # agreement to O(x^6) near zero (n=2 cancels through fifth order)
        for x in (1e-3, 1e-4):
            gen = float(filter_generic(cpmg(2), x))
            cf = float(filter_closed_form("cpmg", x, n=2))
            assert cf == pytest.approx(gen, rel=1e-6, abs=1e-28)

    def test_domain_error_near_singularity(self):
        n = 2
        x_sing = n * math.pi  # cos(x/2n) = 0
        with pytest.raises(FilterDomainError):
            filter_closed_form("cpmg", x_sing, n=n)
        with pytest.raises(FilterDomainError):
            filter_closed_form("pdd", (2 * n + 2) * math.pi / 2, n=n)

    def test_udd1_equals_se(self):
        x = np.linspace(0.0, 40.0, 2001)
        assert np.allclose(filter_closed_form("udd", x, n=1),
                           filter_closed_form("se", x), rtol=1e-12, atol=1e-12)


class TestSpecParsing:
    def test_round_trips(self):
        assert sequences.parse_sequence_spec("cpmg:50").fractions == cpmg(50).fractions
        assert sequences.parse_sequence_spec("cdd:l=3").cdd_level == 3
        assert sequences.parse_sequence_spec("cdd:3").n_pulses == 5
        assert sequences.parse_sequence_spec("fid") is FID
        assert sequences.parse_sequence_spec("custom:0.1,0.5,0.9").fractions == (0.1, 0.5, 0.9)

    def test_bad_specs(self):
        for bad in ("cpmg", "cpmg:x", "se:2", "cdd:l=", "wat:3", "custom:0.5,0.4"):
            with pytest.raises(SequenceError):
                sequences.parse_sequence_spec(bad)

    def test_json(self):
        import json
        d = json.loads(cpmg(2).to_json())
        assert d == {"family": "cpmg", "n": 2, "fractions": [0.25, 0.75]}
