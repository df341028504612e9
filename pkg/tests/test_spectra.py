import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instanton import potentials, spectra
from instanton.errors import SemanticsError

S0_QUARTIC = 1.0 / 6.0
A_QUARTIC = np.sqrt(6.0)


class TestDoubleWellSplitting:
    def test_quartic_reference_value(self):
        spec = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1)
        assert spec.delta_e == pytest.approx(6.73955e-2, rel=1e-4)

    def test_closed_form_identity(self):
        hbar = 0.1
        spec = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=hbar)
        closed = 2.0 * np.sqrt(hbar / np.pi) * np.exp(-S0_QUARTIC / hbar)
        assert spec.delta_e == pytest.approx(closed, rel=1e-12)

    def test_parity_ordering(self):
        spec = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1)
        assert spec.e_plus < spec.e_minus
        assert spec.delta_e == pytest.approx(spec.e_minus - spec.e_plus, rel=1e-14)
        assert spec.e_plus == pytest.approx(0.05 - 0.5 * spec.delta_e, rel=1e-12)

    def test_explicit_fluctuation_ratio_overrides_default(self):
        spec = spectra.double_well_splitting(
            S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1, ratio_prime=1.0 / 12.0
        )
        default = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1)
        assert spec.delta_e == pytest.approx(default.delta_e, rel=1e-12)

    def test_bounce_like_ratio_rejected(self):
        with pytest.raises(SemanticsError):
            spectra.double_well_splitting(
                S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1, ratio_prime=-1.0 / 12.0
            )

    @settings(max_examples=25, deadline=None)
    @given(
        # dilute regime (s0/hbar >= 5): the one-loop splitting formula is
        # only below the level spacing when the exponent actually dominates
        # (at s0 = hbar/2 the prefactor alone pushes it to ~1.19 hbar).
        s0=st.floats(0.5, 2.0),
        hbar=st.floats(0.02, 0.1),
    )
    def test_splitting_positive_and_below_level_spacing(self, s0, hbar):
        spec = spectra.double_well_splitting(s0, A_QUARTIC, 1.0, hbar=hbar)
        assert spec.delta_e > 0
        assert spec.delta_e < hbar  # exponentially small vs. level spacing


class TestBlochBand:
    def test_band_center(self):
        e = spectra.bloch_band(S0_QUARTIC, A_QUARTIC, 1.0, 0.1, theta=np.pi / 2.0)
        assert e == pytest.approx(0.05, rel=1e-12)

    def test_band_symmetry_and_extrema(self):
        thetas = np.linspace(0.0, 2.0 * np.pi, 41)
        band = spectra.bloch_band(S0_QUARTIC, A_QUARTIC, 1.0, 0.1, theta=thetas)
        assert np.allclose(band, band[::-1], rtol=0, atol=1e-15)
        assert np.argmax(band) in (0, 40)
        assert np.argmin(band) == 20

    def test_bandwidth_is_twice_the_two_well_splitting(self):
        band0 = spectra.bloch_band(S0_QUARTIC, A_QUARTIC, 1.0, 0.1, theta=0.0)
        band_pi = spectra.bloch_band(S0_QUARTIC, A_QUARTIC, 1.0, 0.1, theta=np.pi)
        split = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=0.1)
        assert band0 - band_pi == pytest.approx(2.0 * split.delta_e, rel=1e-12)


class TestDecayRate:
    def test_family_gating(self):
        with pytest.raises(SemanticsError):
            spectra.decay_rate(S0_QUARTIC, A_QUARTIC, 1.0, 0.1, family="quartic_double_well")
        with pytest.raises(SemanticsError):
            spectra.double_well_splitting(
                8.0 / 3.0, A_QUARTIC, 1.0, hbar=0.3, family="poly_bounce"
            )

    def test_quartic_bounce_closed_form(self):
        # unstable quartic with g = -0.1: round-trip action -4/(3 g)
        g = -0.1
        s0 = -4.0 / (3.0 * g)
        res = spectra.decay_rate(s0, A_QUARTIC, 1.0, 1.0, family="poly_bounce")
        closed = (4.0 / np.sqrt(2.0 * np.pi)) * np.exp(4.0 / (3.0 * g)) / np.sqrt(-g)
        assert res.im_e0 == pytest.approx(closed, rel=1e-12)
        assert res.im_e0 == pytest.approx(8.17291e-6, rel=1e-4)

    def test_sextic_bounce_closed_form(self):
        # x^6 barrier at g = -0.01: amplitude prefactor scales as
        # sqrt(hbar) * C / (-g)^beta with C = 2^(1/(N-1))/sqrt(pi),
        # beta = 1/(2N-2); exact identity once A carries 2^nu/sqrt(S0-coeff)
        from instanton import trajectory

        big_n, g, hbar = 3, -0.01, 1.0
        nu = 1.0 / (big_n - 1.0)
        coeff = trajectory.action_coefficient(big_n)
        s0 = coeff / (-g) ** nu
        a_tail = 2.0**nu / np.sqrt(coeff)
        res = spectra.decay_rate(s0, a_tail, 1.0, hbar, family="poly_bounce")
        c = 2.0**nu / np.sqrt(np.pi)
        beta = 0.5 * nu
        closed = np.sqrt(hbar) * c / (-g) ** beta * np.exp(-s0 / hbar)
        assert res.im_e0 == pytest.approx(closed, rel=1e-12)
        assert res.im_e0 == pytest.approx(9.795e-4, rel=2e-3)

    def test_rate_and_lifetime(self):
        res = spectra.decay_rate(8.0 / 3.0, A_QUARTIC, 1.0, 0.3, family="poly_bounce")
        assert res.gamma == pytest.approx(2.0 * res.im_e0, rel=1e-14)
        assert res.lifetime * res.im_e0 == pytest.approx(0.3, rel=1e-14)

    def test_survival_curve(self):
        res = spectra.decay_rate(8.0 / 3.0, A_QUARTIC, 1.0, 0.3, family="poly_bounce")
        t, p = spectra.survival_curve(res)
        assert len(t) == 512 and len(p) == 512
        assert p[0] == pytest.approx(1.0, abs=1e-14)
        assert t[-1] == pytest.approx(5.0 * res.lifetime, rel=1e-12)
        # probability decays at rate Gamma/hbar, amplitude at half that
        k = 100
        assert p[k] == pytest.approx(np.exp(-res.gamma * t[k] / 0.3), rel=1e-12)
        assert np.all(np.diff(p) < 0)


class TestWashboardAnalysis:
    @pytest.fixture(scope="class")
    def model(self):
        return potentials.Washboard(e_j=1.0, e_c=0.02, i_e=0.9, i_c=1.0)

    def test_reported_fields(self, model):
        res = spectra.washboard_analysis(model)
        assert res.s0 > 0
        assert res.omega == pytest.approx((1.0 - 0.81) ** 0.25, rel=1e-6)
        assert res.hbar == pytest.approx(np.sqrt(2.0 * 0.02 / 1.0), rel=1e-12)
        assert res.gamma > 0
        assert res.negative_mode is True

    def test_well_translation_invariance(self, model):
        r0 = spectra.washboard_analysis(model, well_index=0)
        r1 = spectra.washboard_analysis(model, well_index=1)
        assert r0.gamma == pytest.approx(r1.gamma, rel=1e-10)
        assert r0.s0 == pytest.approx(r1.s0, rel=1e-10)

    def test_rate_grows_toward_critical_bias(self):
        gammas = []
        for s in (0.80, 0.90, 0.95):
            m = potentials.Washboard(e_j=1.0, e_c=0.02, i_e=s, i_c=1.0)
            gammas.append(spectra.washboard_analysis(m).gamma)
        assert gammas[0] < gammas[1] < gammas[2]

    def test_action_shrinks_toward_critical_bias(self):
        s0s = []
        for s in (0.80, 0.90, 0.95):
            m = potentials.Washboard(e_j=1.0, e_c=0.02, i_e=s, i_c=1.0)
            s0s.append(spectra.washboard_analysis(m).s0)
        assert s0s[0] > s0s[1] > s0s[2]

    def test_self_convergence(self, model):
        coarse = spectra.washboard_analysis(model)
        fine = spectra.washboard_analysis(model, dt=0.01)
        assert coarse.gamma == pytest.approx(fine.gamma, rel=1e-4)


class TestFluxGroundEnergy:
    def test_closed_form(self):
        hbar = 0.1
        e0 = spectra.flux_ground_energy(S0_QUARTIC, A_QUARTIC, hbar)
        expected = 0.5 * hbar + hbar * np.exp(-S0_QUARTIC / hbar) * A_QUARTIC * np.sqrt(
            S0_QUARTIC / (np.pi * hbar)
        )
        assert e0 == pytest.approx(expected, rel=1e-12)

    def test_shift_is_half_the_splitting(self):
        hbar = 0.1
        e0 = spectra.flux_ground_energy(S0_QUARTIC, A_QUARTIC, hbar)
        split = spectra.double_well_splitting(S0_QUARTIC, A_QUARTIC, 1.0, hbar=hbar)
        assert 2.0 * (e0 - 0.5 * hbar) == pytest.approx(split.delta_e, rel=1e-12)


class TestDiagnostics:
    def test_thermal_ratio(self):
        d = spectra.diagnostics(
            k_coeff=1.0, s0=S0_QUARTIC, hbar=0.1, delta_e=0.5, temperature=0.02
        )
        assert d.thermal_ratio == 25.0

    def test_dilute_gas_flag(self):
        lo = spectra.diagnostics(k_coeff=1.0, s0=0.25, hbar=0.1, delta_e=1.0, temperature=1.0)
        # density K exp(-S0/hbar) = exp(-2.5) = 0.082 < 0.1
        assert lo.diluteness == pytest.approx(np.exp(-2.5), rel=1e-12)
        assert lo.dilute_gas_violated is False
        hi = spectra.diagnostics(k_coeff=2.0, s0=0.25, hbar=0.1, delta_e=1.0, temperature=1.0)
        assert hi.dilute_gas_violated is True

    def test_expected_instanton_count_scales_with_horizon(self):
        d1 = spectra.diagnostics(
            k_coeff=1.0, s0=0.5, hbar=0.1, delta_e=1.0, temperature=1.0, horizon_T=10.0
        )
        d2 = spectra.diagnostics(
            k_coeff=1.0, s0=0.5, hbar=0.1, delta_e=1.0, temperature=1.0, horizon_T=20.0
        )
        assert d2.expected_count == pytest.approx(2.0 * d1.expected_count, rel=1e-12)


class TestFluxPipeline:
    def test_doublet_against_grid_oracle(self):
        # full pipeline on an inductively shunted cosine at phi_e = pi;
        # hbar = 0.1 so the one-loop answer is only expected to land the
        # exponent: check log-agreement, not digits
        from instanton import determinants, oracle, trajectory

        model = potentials.Flux(e_j=1.0, e_l=0.5, phi_e=np.pi, e_c=0.005)
        pts = potentials.stationary_points(model, (0.0, 2.0 * np.pi))
        wells = [p.x for p in pts if p.kind == "min"]
        assert len(wells) == 2
        path = trajectory.solve_path(model, (wells[0], wells[1]))
        flres = determinants.zero_mode_removed_ratio(path)
        hbar = np.sqrt(2.0 * 0.005 / 1.0)
        spec = spectra.double_well_splitting(
            path.S0, path.A, path.omega, hbar=hbar, ratio_prime=flres.ratio_prime
        )
        osc = oracle.grid_spectrum(
            model, domain=(wells[0] - 2.2, wells[1] + 2.2), points=4096, hbar=hbar
        )
        exact = osc.energies[1] - osc.energies[0]
        assert exact > 0
        assert abs(np.log(spec.delta_e / exact)) < 0.9
