"""End-to-end acceptance checks.

One test per shipped criterion; the test name carries the criterion number
and `pytest -v` emits the per-criterion pass/fail line.  Runtime limits are
asserted where the contract states one (the session-scoped warmup fixture in
conftest keeps JIT compilation out of the timed regions).
"""

import json
import time

import numpy as np
import pytest
from scipy import integrate

from instanton import (
    asymptotics,
    cli,
    determinants,
    gl_junction,
    oracle,
    potentials,
    spectra,
    trajectory,
    wkb,
)


def test_criterion_01_kink_closed_form():
    t0 = time.perf_counter()
    qdw = potentials.QuarticDoubleWell()
    s0 = trajectory.action(qdw, (-0.5, 0.5))
    path = trajectory.solve_path(qdw, (-0.5, 0.5))
    elapsed = time.perf_counter() - t0
    assert abs(s0 - 1.0 / 6.0) < 1e-8
    assert np.max(np.abs(path.x - 0.5 * np.tanh(0.5 * path.t))) < 1e-6
    assert path.A == pytest.approx(np.sqrt(6.0), abs=1e-4)
    assert path.omega == pytest.approx(1.0, abs=1e-6)
    assert elapsed < 1.0


def test_criterion_02_splitting_vs_oracle():
    t0 = time.perf_counter()
    qdw = potentials.QuarticDoubleWell()
    rel = {}
    for hbar, pts, dom in ((0.2, 4096, 1.8), (0.1, 4096, 1.6), (0.05, 4096, 1.4)):
        ex = oracle.grid_spectrum(qdw, domain=(-dom, dom), points=pts, hbar=hbar)
        gap = ex.energies[1] - ex.energies[0]
        inst = spectra.double_well_splitting(1.0 / 6.0, np.sqrt(6.0), 1.0, hbar=hbar)
        rel[hbar] = abs(inst.delta_e / gap - 1.0)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    table = "  ".join(f"hbar={h}: {r:.3f}" for h, r in rel.items())
    # The one-loop formula's relative error at these hbar is dominated by the
    # next correction (~ -71/12 * hbar for this well): measured errors are
    # 0.97/1.11/0.62 -- neither monotone nor < 0.15.  Asserted as stated.
    assert rel[0.2] > rel[0.1] > rel[0.05], f"not monotone: {table}"
    assert rel[0.05] < 0.15, f"one-loop error at hbar=0.05 not below 15%: {table}"


def test_criterion_03_determinant_theorem():
    t0 = time.perf_counter()
    ratio = determinants.gelfand_yaglom_ratio(1.0, 0.0, 10.0)
    assert ratio == pytest.approx(np.sinh(10.0) / 10.0, rel=1e-6)

    def pt_well(t, lam_pt=2.0, omega=1.0):
        return omega**2 * (1.0 - lam_pt * (lam_pt + 1.0) / np.cosh(omega * t) ** 2)

    for lam_pt in (1, 2, 3):
        shot = determinants.gelfand_yaglom_ratio(
            lambda t, k=lam_pt: pt_well(t, k), 1.0, 40.0, lam=-1e-3
        )
        closed = determinants.bargmann_wigner_det(lam_pt, 1.0, 1e-3)
        assert shot == pytest.approx(closed, rel=1e-4)

    omega = 0.5
    eps = 0.012
    # eps detunes the squared decay rate from the *unit* continuum edge
    # (z = sqrt(1+eps)/omega), so the spectral shift is omega^2 - (1+eps);
    # -eps*omega**2 would reproduce the omega=1 value by scale invariance.
    shot = determinants.gelfand_yaglom_ratio(
        lambda t: pt_well(t, 2.0, omega), omega**2, 40.0, lam=omega**2 - (1.0 + eps)
    )
    closed = determinants.bargmann_wigner_det(2, omega, eps)
    assert shot == pytest.approx(closed, rel=1e-4)
    assert closed == pytest.approx(eps / 12.0, rel=0.02)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_04_zero_eigenvalue_scaling():
    qdw = potentials.QuarticDoubleWell()
    path = trajectory.solve_path(qdw, (-0.5, 0.5))
    ts = np.arange(25.0, 40.0 + 1e-9, 3.0)
    lam = np.array(
        [determinants.zero_mode_removed_ratio(path, T_grid=(t, t)).lambda0 for t in ts]
    )
    slope, intercept = np.polyfit(ts, np.log(lam), 1)
    assert slope == pytest.approx(-1.0, abs=1e-3)
    assert np.exp(intercept) == pytest.approx(4.0 * 6.0, rel=0.01)


def test_criterion_05_bounce_closed_form():
    t0 = time.perf_counter()
    for g in (-0.05, -0.1, -0.2):
        model = potentials.PolyBounce(big_n=2, g=g)
        sigma = potentials.exit_point(model, 0.0)
        path = trajectory.solve_path(model, (0.0, sigma))
        fl = determinants.zero_mode_removed_ratio(path)
        res = spectra.decay_rate(
            path.S0, path.A, path.omega, 1.0, family="poly_bounce", ratio_prime=fl.ratio_prime
        )
        closed = (4.0 / np.sqrt(2.0 * np.pi)) * np.exp(4.0 / (3.0 * g)) / np.sqrt(-g)
        assert res.im_e0 == pytest.approx(closed, rel=0.02)
        assert res.gamma == 2.0 * res.im_e0
    assert time.perf_counter() - t0 < 5.0


def test_criterion_06_general_exponent_coefficient():
    for big_n in (2, 3, 4):
        quad = trajectory.action_coefficient_quadrature(big_n)
        nu = 1.0 / (big_n - 1.0)
        from scipy.special import gamma as gamma_fn

        closed = 4.0**nu * gamma_fn(big_n * nu) ** 2 / gamma_fn(2.0 * big_n * nu)
        assert abs(quad - closed) < 1e-8
    # the alternative printed expression disagrees at N = 2; quadrature rules
    alt = trajectory.action_coefficient_inconsistent_form(2)
    assert abs(alt - trajectory.action_coefficient_quadrature(2)) > 0.1


def test_criterion_07_charge_band():
    t0 = time.perf_counter()
    ratios = []
    for ej_over_ec in (25.0, 50.0, 100.0, 200.0):
        hbar_eff = np.sqrt(2.0 / ej_over_ec)
        inst = ej_over_ec * 16.0 * np.sqrt(hbar_eff / np.pi) * np.exp(-8.0 / hbar_eff)
        exact = oracle.bloch_bandwidth(e_c=1.0, e_j=ej_over_ec)
        ratios.append(inst / exact)
    err = [abs(r - 1.0) for r in ratios]
    assert err[0] > err[1] > err[2] > err[3], f"ratios: {ratios}"
    assert err[3] < 0.30
    spec_p = oracle.bloch_spectrum(e_c=1.0, e_j=30.0, theta=0.7)
    spec_m = oracle.bloch_spectrum(e_c=1.0, e_j=30.0, theta=-0.7)
    assert spec_p.energies[0] == pytest.approx(spec_m.energies[0], abs=1e-12)
    free = oracle.bloch_spectrum(e_c=1.0, e_j=0.0, theta=1.1, charge_cutoff=24)
    assert free.energies[0] == pytest.approx((1.1 / (2.0 * np.pi)) ** 2, abs=1e-10)
    assert time.perf_counter() - t0 < 10.0


def test_criterion_08_wkb():
    model = potentials.ParabolicDoubleWell(a=3.0, omega=1.0)
    doublets = wkb.quantize(model, hbar=1.0, n_max=1)
    for d in doublets:
        for energy, sign in ((d.e_plus, -1.0), (d.e_minus, +1.0)):
            theta, phi = wkb.phase_integrals(model, energy, hbar=1.0)
            assert abs(np.sin(theta) + sign * 2.0 * np.exp(phi) * np.cos(theta)) < 1e-8
    _, phi0 = wkb.phase_integrals(model, 0.5, hbar=1.0)
    z0 = 3.0 / np.sqrt(2.0 * 0.5)
    closed = 2.0 * 0.5 * (z0 * np.sqrt(z0**2 - 1.0) - np.log(z0 + np.sqrt(z0**2 - 1.0)))
    assert abs(phi0 - closed) < 1e-8
    ex = oracle.grid_spectrum(model, domain=(-9.0, 9.0), points=4096, hbar=1.0)
    exact = ex.energies[1] - ex.energies[0]
    assert abs(doublets[0].parity_split - exact) / exact < 0.30


def test_criterion_09_gl_junction():
    t0 = time.perf_counter()
    deltas = np.linspace(0.0, np.pi, 64)
    worst_dev = {}
    for lam in (0.05, 0.3, 0.6, 1.0):
        cpr = gl_junction.nonlinear_cpr(lam, deltas)
        h = cpr.x_grid[1] - cpr.x_grid[0]
        for k, prof in enumerate(cpr.profiles):
            assert abs(prof[0] - 1.0) < 1e-8
            assert abs(prof[-1] - np.exp(1j * deltas[k])) < 1e-8
            j_loc = np.imag(np.conj(prof[:-1]) * prof[1:]) / h
            assert np.max(j_loc) - np.min(j_loc) < 1e-6 * max(cpr.j_c, 1e-30)
        worst_dev[lam] = np.max(np.abs(cpr.deviation))
        if lam == 0.05:
            lin = gl_junction.linear_cpr(lam, deltas)
            assert np.max(np.abs(cpr.current - lin.current)) < 1e-3
    assert worst_dev[0.3] < worst_dev[0.6] < worst_dev[1.0]
    assert worst_dev[1.0] > 0.003  # percent scale
    assert time.perf_counter() - t0 < 30.0


def test_criterion_10_appendix_asymptotics():
    a = np.array([[2.0, 0.3], [0.3, 1.0]])
    b = np.array([0.4, -0.2])
    ref, _ = integrate.dblquad(
        lambda y, x: np.exp(
            -0.5 * (a[0, 0] * x * x + 2 * a[0, 1] * x * y + a[1, 1] * y * y)
            + b[0] * x
            + b[1] * y
        ),
        -12.0,
        12.0,
        -12.0,
        12.0,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    val = asymptotics.gaussian_integral(asymptotics.QuadraticForm(matrix=a, offset=b))
    assert abs(val - ref) < 1e-8 * ref

    def a_func(x):
        return 0.5 * x * x + 0.25 * x**4

    # h = 0.2 is outside the asymptotic window: the error law
    # c2*h^2*(1 - 8.25*h + ...) bends there and the fitted exponent is
    # 1.73 even with exact derivatives.  Measured 1.888 on this ladder.
    hs = np.array([0.05, 0.025, 0.0125, 0.00625])
    errs = []
    for h in hs:
        q, _ = integrate.quad(
            lambda x: np.exp(-a_func(x) / h), -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13
        )
        errs.append(abs(asymptotics.steepest_descent(a_func, h, order=1) / q - 1.0))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 1.8

    drift = []
    for g in (-0.1, -0.05, -0.02):
        res = asymptotics.toy_imaginary_part(g)
        drift.append(abs(res.exact / res.asymptotic - 1.0))
    assert drift[0] > drift[1] > drift[2]
    assert drift[2] < 0.12


def test_criterion_11_population_propagation():
    class Harmonic:
        def value(self, x):
            return 0.5 * np.asarray(x) ** 2

    spec = oracle.grid_spectrum(Harmonic(), domain=(-10.0, 10.0), points=2048, hbar=1.0)
    drive = oracle.DriveSpec(amplitude=0.05, frequency=1.0, phase=0.0)
    trace = oracle.propagate_populations(spec, drive, t_final=200.0, levels=2, samples=10001)
    assert np.max(np.abs(trace.populations.sum(axis=1) - 1.0)) < 1e-8

    amp = 0.02
    x01 = np.sqrt(0.5)
    period = 2.0 * np.pi / (x01 * amp)
    weak = oracle.DriveSpec(amplitude=amp, frequency=1.0, phase=0.0)
    tr = oracle.propagate_populations(spec, weak, t_final=period, levels=2, samples=2001)
    p1 = tr.populations[:, 1]
    k = int(np.argmax(p1))
    tpk = tr.times[k] + 0.5 * (tr.times[k + 1] - tr.times[k]) * (p1[k - 1] - p1[k + 1]) / (
        p1[k - 1] - 2.0 * p1[k] + p1[k + 1]
    )
    assert tpk == pytest.approx(period / 2.0, rel=0.01)


def test_criterion_12_diagnostics():
    d = spectra.diagnostics(k_coeff=1.0, s0=1.0 / 6.0, hbar=0.1, delta_e=0.5, temperature=0.02)
    assert d.thermal_ratio == 25.0
    below = spectra.diagnostics(k_coeff=0.99, s0=0.23, hbar=0.1, delta_e=1.0, temperature=1.0)
    above = spectra.diagnostics(k_coeff=1.02, s0=0.23, hbar=0.1, delta_e=1.0, temperature=1.0)
    assert below.diluteness < 0.1 < above.diluteness
    assert below.dilute_gas_violated is False
    assert above.dilute_gas_violated is True


def test_cli_end_to_end(tmp_path):
    # composition sanity for the shipped front door (digits pinned in
    # test_cli.py); determinism is part of the CLI contract
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    for out in (out1, out2):
        out.mkdir()
        assert cli.main(["double-well", "--hbar", "0.1", "--out", str(out)]) == 0
    b1 = (out1 / "results.json").read_bytes()
    assert b1 == (out2 / "results.json").read_bytes()
    payload = json.loads(b1)
    assert payload["schema_version"] == 1
    assert payload["results"]["delta_e_instanton"]["value"] == pytest.approx(
        6.73955e-2, rel=1e-3
    )
