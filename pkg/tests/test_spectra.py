import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sideband_params
from hybridoptomech.errors import DetuningNotZero, SingularDetuning
from hybridoptomech.model import LinearParams
from hybridoptomech.spectra import (
    chi_bare,
    chi_dressed,
    cooling_rate,
    fano_approximation,
    force_spectrum,
    optimal_cavity_detuning,
    polariton_energies,
    resonant_cooling_rate,
    resonant_spectra,
)

rates = st.floats(0.01, 100.0)
couplings = st.floats(-20.0, 20.0)
detunings = st.floats(-50.0, 50.0)


def random_lin(rng, resonant=False):
    kw = dict(
        kappa=rng.uniform(0.05, 50.0),
        gamma=rng.uniform(0.05, 20.0),
        g=rng.uniform(-2.0, 2.0),
        lam=rng.uniform(-15.0, 15.0),
        mu=rng.uniform(-0.5, 0.5),
    )
    if not resonant:
        kw.update(delta_c=rng.uniform(-60.0, 60.0), delta_a=rng.uniform(-6.0, 6.0))
    return LinearParams(**kw)


def test_bare_susceptibilities():
    lin = LinearParams(kappa=2.0, gamma=0.8, delta_c=-3.0, delta_a=-0.6)
    assert chi_bare("cavity", lin, -3.0) == pytest.approx(0.5)
    assert abs(chi_bare("dopant", lin, 1e12)) < 1e-11
    assert chi_bare("dopant", lin, 1.0) == pytest.approx(1.0 / (0.8 - 1.6j), rel=1e-15)
    with pytest.raises(ValueError):
        chi_bare("phonon", lin, 0.0)


def test_dressed_reduces_to_bare_without_coupling():
    lin = LinearParams(kappa=2.0, gamma=0.8, delta_c=-3.0, delta_a=-0.6)
    w = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(chi_dressed("cavity", lin, w), chi_bare("cavity", lin, w), rtol=1e-15)


def test_dressed_identity_random_frequencies(rng):
    lin = random_lin(rng)
    w = rng.uniform(-3, 3, 100)
    for mode, other in (("cavity", "dopant"), ("dopant", "cavity")):
        lhs = 1.0 / chi_dressed(mode, lin, w) - 1.0 / chi_bare(mode, lin, w)
        rhs = lin.lam**2 * chi_bare(other, lin, w)
        resid = np.abs(lhs - rhs) / np.maximum(np.abs(1.0 / chi_bare(mode, lin, w)), np.abs(rhs))
        assert resid.max() <= 1e-12


def test_spectral_hole_at_dopant_resonance():
    lin = LinearParams(kappa=2.0, gamma=1e-3, lam=1.0, delta_c=0.0, delta_a=0.5)
    bare = abs(chi_bare("cavity", lin, 0.5))
    assert abs(chi_dressed("cavity", lin, 0.5)) < 1e-2 * bare


@settings(max_examples=200, deadline=None)
@given(rates, rates, couplings, couplings, st.floats(-1.0, 1.0), detunings, detunings, st.floats(-5.0, 5.0))
def test_spectra_nonnegative(k, ga, g, lam, mu, dc, da, w):
    lin = LinearParams(kappa=k, gamma=ga, g=g, lam=lam, mu=mu, delta_c=dc, delta_a=da)
    s = force_spectrum(lin, w)
    assert s.s_kappa >= 0 and s.s_gamma >= 0
    assert s.s_f == s.s_kappa + s.s_gamma


def test_radiation_pressure_lorentzian():
    lin = LinearParams(kappa=0.3, gamma=1.0, g=0.2, delta_c=1.2)
    w = np.linspace(-2, 2, 41)
    s = force_spectrum(lin, w)
    np.testing.assert_allclose(s.s_kappa, 2 * 0.04 * 0.3 / (0.09 + (w - 1.2) ** 2), rtol=1e-13)
    assert np.all(s.s_gamma == 0)


def test_dopant_limit_far_detuned_cavity():
    # delta_a at the sideband makes the required cavity detuning diverge
    lin = LinearParams(kappa=20.0, gamma=0.8, g=0.0, lam=8.0, mu=0.01, delta_a=1.0, delta_c=1e9)
    w = np.linspace(-2, 2, 41)
    s = force_spectrum(lin, w)
    expected = 2 * 0.01**2 * 0.8 / (0.64 + (w - 1.0) ** 2)
    assert np.max(s.s_kappa / expected) < 1e-12
    np.testing.assert_allclose(s.s_gamma, expected, rtol=1e-6)


def test_fano_dip_at_fig3_point(fig3_lin):
    s = force_spectrum(fig3_lin, [1.0, -1.0]).s_f
    assert cooling_rate(fig3_lin) > 0
    assert s[0] > 3.0 * s[1]
    # the Fano amplitude has its minimum next to the heating sideband
    f = fano_approximation(fig3_lin)
    w = np.linspace(-3, 0, 3001)
    assert abs(w[np.argmin(f.amplitude_a(w))] + 1.0) < 0.25


def test_cooling_rate_zero_without_couplings():
    assert cooling_rate(LinearParams(kappa=1.0, gamma=1.0, lam=3.0, delta_c=1.0)) == 0.0


def test_polariton_energies():
    lin = LinearParams(kappa=1.0, gamma=1.0, lam=0.0, delta_c=2.0, delta_a=-1.0)
    assert polariton_energies(lin) == (2.0, -1.0)
    lin = LinearParams(kappa=1.0, gamma=1.0, lam=3.0, delta_c=0.5, delta_a=0.5)
    assert polariton_energies(lin) == pytest.approx((3.5, -2.5), rel=1e-15)


def test_polariton_sum_product_identities(rng):
    for _ in range(100):
        lin = random_lin(rng)
        wp, wm = polariton_energies(lin)
        assert wp >= wm
        scale = abs(lin.delta_a) + abs(lin.delta_c) + abs(lin.lam)
        assert abs(wp + wm - (lin.delta_a + lin.delta_c)) <= 1e-12 * scale
        assert abs(wp * wm - (lin.delta_a * lin.delta_c - lin.lam**2)) <= 1e-12 * scale**2


def test_optimal_cavity_detuning_values():
    assert optimal_cavity_detuning(2.0, 8.0) == 65.0
    assert optimal_cavity_detuning(-3.0, 0.0) == 1.0
    with pytest.raises(SingularDetuning):
        optimal_cavity_detuning(1.0 + 1e-7, 8.0)


def test_sideband_substitution_identity(rng):
    for _ in range(100):
        da = rng.uniform(-6, 6)
        lam = rng.uniform(0, 20)
        dc = optimal_cavity_detuning(da, lam)
        assert abs((1 - da) * (1 - dc) - lam**2) <= 1e-12 * max(1.0, lam**2)
        lin = LinearParams(kappa=1.0, gamma=1.0, lam=lam, delta_c=dc, delta_a=da)
        wp, wm = polariton_energies(lin)
        assert min(abs(wp - 1), abs(wm - 1)) <= 1e-9 * max(1.0, abs(dc))


def test_red_sideband_optimum_without_dopant():
    kappa = 0.1
    dcs = np.linspace(-3, 3, 6001)
    rates_ = [cooling_rate(LinearParams(kappa=kappa, gamma=1.0, g=0.05, delta_c=d)) for d in dcs]
    assert abs(dcs[int(np.argmax(rates_))] - 1.0) < kappa


def test_fano_limits():
    tiny = fano_approximation(sideband_params(lam=1e-4, delta_a=-0.6))
    assert tiny.gamma_eff == pytest.approx(0.8, rel=1e-6)
    assert tiny.delta_eff == pytest.approx(-0.6, rel=1e-6)
    big = fano_approximation(sideband_params(lam=1e4, delta_a=-0.6))
    assert big.gamma_eff == pytest.approx(0.8, rel=1e-4)
    assert big.delta_eff == pytest.approx(1.0, rel=1e-4)


def test_fano_amplitude_nonnegative_and_expansion():
    # expanded coefficients against the sum-of-squares form
    lin = sideband_params(delta_a=-1.3)
    f = fano_approximation(lin)
    k, ga, lam, mu, g, da = lin.kappa, lin.gamma, lin.lam, lin.mu, lin.g, lin.delta_a
    d = da - 1.0
    w = np.linspace(-5, 5, 101)
    direct = 2 * k * d**2 / ((ga**2 + da**2) * (lam**4 + k**2 * d**2)) * (
        (2 * lam * mu * da - g * (ga**2 + da**2) + (g * da - lam * mu) * w) ** 2 + g**2 * ga**2 * w**2
    )
    np.testing.assert_allclose(f.amplitude_a(w), direct, rtol=1e-12)
    assert np.all(f.amplitude_a(w) >= 0) and f.gamma_eff > 0


@pytest.mark.parametrize("da", [-2.0, -0.6, 0.4, 2.0])
def test_fano_converges_with_kappa(da):
    w = np.linspace(-2, 2, 401)
    errs = []
    for k in (20.0, 200.0, 2000.0):
        lin = sideband_params(kappa=k, lam=np.sqrt(4 * k * 0.8), delta_a=da)
        exact = force_spectrum(lin, w).s_kappa
        errs.append(np.max(np.abs(fano_approximation(lin).spectra(w).s_kappa - exact) / exact))
    assert errs[0] > errs[1] > errs[2]


def test_resonant_closed_form_matches_general(rng):
    w = rng.uniform(-3, 3, 50)
    for _ in range(100):
        lin = random_lin(rng, resonant=True)
        a = resonant_spectra(lin, w)
        b = force_spectrum(lin, w)
        np.testing.assert_allclose(a.s_kappa, b.s_kappa, rtol=1e-10)
        np.testing.assert_allclose(a.s_gamma, b.s_gamma, rtol=1e-10)
        assert resonant_cooling_rate(lin) == pytest.approx(cooling_rate(lin), rel=1e-10, abs=1e-300)


def test_resonant_needs_zero_detuning():
    with pytest.raises(DetuningNotZero):
        resonant_spectra(LinearParams(kappa=1.0, gamma=1.0, delta_c=0.1), 0.0)
    with pytest.raises(DetuningNotZero):
        resonant_cooling_rate(LinearParams(kappa=1.0, gamma=1.0, delta_a=-0.1))


def test_resonant_sign_rule(rng):
    for _ in range(50):
        g, lam, mu = rng.uniform(0.01, 1.0, 3) * rng.choice([-1, 1], 3)
        lin = LinearParams(kappa=rng.uniform(0.1, 5), gamma=rng.uniform(0.1, 5), g=g, lam=lam, mu=mu)
        assert np.sign(resonant_cooling_rate(lin)) == np.sign(g * lam * mu)
        assert np.sign(cooling_rate(lin.replace(mu=-mu))) == -np.sign(g * lam * mu)


def test_resonant_no_interference_is_symmetric():
    lin = LinearParams(kappa=0.7, gamma=0.5, g=0.1, lam=0.0, mu=0.02)
    w = np.linspace(0.1, 3, 20)
    np.testing.assert_allclose(resonant_spectra(lin, w).s_f, resonant_spectra(lin, -w).s_f, rtol=1e-14)
    assert resonant_cooling_rate(lin) == 0.0
    zero = resonant_spectra(LinearParams(kappa=0.7, gamma=0.5, lam=2.0), w)
    assert np.all(zero.s_f == 0)
