import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from finfet_mc.device import flicker_psd, transconductance
from finfet_mc.link import (
    SymbolStats,
    current_variance,
    log10_sep,
    mean_current,
    ml_thresholds,
    noise_spectrum,
    receiver_chain,
    sep,
    snr,
    snr_ceiling,
    symbol_stats,
)
from finfet_mc.params import BandConfig

MU_I_GOLDEN = 2.624590131996727e-08


def test_mean_current_golden(bundle):
    assert mean_current(bundle, 5e5) == pytest.approx(MU_I_GOLDEN, rel=1e-8)
    assert mean_current(bundle, 0.0) == 0.0


@pytest.mark.parametrize("N_m", [1e3, 5e5, 4e6, 1e9])
def test_closed_form_matches_chain(bundle, N_m):
    assert mean_current(bundle, N_m) == pytest.approx(receiver_chain(bundle, N_m).mean_current, rel=1e-12)


def test_mean_current_saturates(bundle):
    chain = receiver_chain(bundle, 5e5)
    ceiling = chain.g_FET * chain.transducer.Psi_L * chain.binding.N_R
    mus = [mean_current(bundle, n) for n in np.geomspace(1e3, 1e14, 40)]
    assert all(b > a for a, b in zip(mus, mus[1:]))
    assert mus[-1] == pytest.approx(ceiling, rel=1e-3)
    assert mus[-1] < ceiling


def test_no_release_no_binding_noise(bundle):
    sp = noise_spectrum(bundle, 0.0)
    assert np.all(sp.s_binding == 0)
    assert current_variance(sp) == current_variance(sp, "flicker")


def test_spectrum_components(bundle):
    sp = noise_spectrum(bundle, 5e5)
    assert np.array_equal(sp.s_total, sp.s_binding + sp.s_flicker)
    assert current_variance(sp) == pytest.approx(
        current_variance(sp, "binding") + current_variance(sp, "flicker"), rel=1e-13)
    assert len(sp.freqs) == bundle.band.n_points


def test_flicker_variance_is_log_ratio(bundle):
    g = transconductance(bundle.device)
    amp = float(flicker_psd(bundle.device, g, 1.0))
    var = current_variance(noise_spectrum(bundle, 5e5), "flicker")
    assert var == pytest.approx(2 * amp * math.log(1e6), rel=1e-12)
    wide = BandConfig(f_min=bundle.band.f_min / 2, f_max=bundle.band.f_max, n_points=4001)
    var2 = current_variance(noise_spectrum(bundle, 5e5, wide), "flicker")
    assert var2 - var == pytest.approx(2 * amp * math.log(2), rel=1e-9)


def test_quadrature_converged(bundle):
    coarse = current_variance(noise_spectrum(bundle, 5e5))
    fine = current_variance(noise_spectrum(bundle, 5e5, BandConfig(1e-3, 1e3, 16001)))
    assert coarse == pytest.approx(fine, rel=1e-8)


def test_binding_dominates_mid_band(bundle):
    sp = noise_spectrum(bundle, 5e5)
    # 1/f rises above the flat Lorentzian plateau at the low edge and above
    # its f^-2 tail at the high edge
    assert sp.s_binding[0] < sp.s_flicker[0]
    assert sp.s_binding[-1] < sp.s_flicker[-1]
    assert np.max(sp.s_binding / sp.s_flicker) > 100
    sign = np.sign(sp.s_binding - sp.s_flicker)
    assert np.count_nonzero(np.diff(sign)) == 2


def test_snr_defaults(bundle):
    ratio, db = snr(bundle, 5e5)
    assert db == pytest.approx(10 * math.log10(ratio), rel=1e-15)
    assert db == pytest.approx(33.53, abs=0.01)
    assert snr_ceiling(bundle)[1] == pytest.approx(62.99, abs=0.01)
    assert db < snr_ceiling(bundle)[1]


def test_snr_falls_with_distance(bundle):
    d = np.geomspace(1e-4, 1e-2, 15)
    s = [snr(bundle.replace(**{"channel.x_R": float(x)}), 5e5)[1] for x in d]
    assert all(b < a for a, b in zip(s, s[1:]))


def test_snr_falls_with_receptor_length(bundle):
    l = np.linspace(0.5e-9, 8e-9, 12)
    s = [snr(bundle.replace(**{"ligand.l_SR": float(x)}), 5e5)[1] for x in l]
    assert all(b < a for a, b in zip(s, s[1:]))


def test_snr_unchanged_by_drain_bias(bundle):
    # mean and both noise terms carry the same transconductance factor
    ref = snr(bundle, 5e5)[0]
    for v in (0.02, 0.2, 0.35):
        assert snr(bundle.replace(**{"device.V_SD": v}), 5e5)[0] == pytest.approx(ref, rel=1e-12)


def test_ml_threshold_equal_variance_is_midpoint():
    assert ml_thresholds([0.0, 1.0], [0.3, 0.3]) == pytest.approx((0.5,), abs=1e-15)
    assert ml_thresholds([1.0, 3.0, 7.0], [2.0, 2.0, 2.0]) == pytest.approx((2.0, 5.0))


def test_ml_threshold_unequal_variance():
    (lam,) = ml_thresholds([0.0, 1.0], [0.01, 0.04])
    x = np.linspace(0, 1, 2_000_001)
    pdf = lambda x, m, v: np.exp(-(x - m) ** 2 / (2 * v)) / np.sqrt(2 * np.pi * v)
    scan = x[np.argmin(np.abs(pdf(x, 0, 0.01) - pdf(x, 1, 0.04)))]
    assert lam == pytest.approx(scan, abs=1e-6)
    assert 0 < lam < 0.5  # pulled towards the tighter symbol


def test_ml_threshold_scale_free():
    (a,) = ml_thresholds([0.0, 1.0], [0.04, 0.09])
    (b,) = ml_thresholds([1e-8, 1e-8 + 1e-9], [0.04e-18, 0.09e-18])
    assert (b - 1e-8) / 1e-9 == pytest.approx(a, rel=1e-9)


def test_ml_threshold_dominated_gap():
    # the taller (narrower) likelihood wins across the whole tiny gap, so the
    # wider symbol is never decided there
    (lam,) = ml_thresholds([0.0, 1e-3], [1.0, 1.0001])
    assert lam == 1e-3
    (lam,) = ml_thresholds([0.0, 1e-3], [1.0001, 1.0])
    assert lam == 0.0
    (lam,) = ml_thresholds([0.0, 1.0], [1.0, 4.0])
    assert lam == 1.0


def test_ml_threshold_input_checks():
    with pytest.raises(ValueError):
        ml_thresholds([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        ml_thresholds([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        ml_thresholds([0.0], [1.0])


def test_binary_sep_reduces_to_q_function():
    st_ = SymbolStats.from_moments([0.0, 2.0], [1.0, 1.0])
    assert sep(st_) == pytest.approx(0.5 * math.erfc(1 / math.sqrt(2)), rel=1e-14)
    assert log10_sep(st_) == pytest.approx(math.log10(sep(st_)), rel=1e-12)


def test_degenerate_sep():
    assert sep(SymbolStats.from_moments([1.0, 1.0], [2.0, 2.0])) == pytest.approx(0.5, abs=1e-12)
    assert sep(SymbolStats.from_moments([1.0] * 4, [2.0] * 4)) == pytest.approx(0.75, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(gaps=st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=3),
       var=st.lists(st.floats(1e-2, 1e2), min_size=4, max_size=4))
def test_sep_bounds(gaps, var):
    mu = np.concatenate([[0.0], np.cumsum(gaps)])
    M = len(mu)
    stats = SymbolStats.from_moments(mu, var[:M])
    p = sep(stats)
    assert 0.0 <= p <= (M - 1) / M + 1e-15
    if p > 1e-300:
        assert log10_sep(stats) == pytest.approx(math.log10(p), abs=1e-9)


def test_log10_sep_beyond_underflow():
    stats = SymbolStats.from_moments([0.0, 100.0], [1.0, 1.0])
    assert sep(stats) == 0.0
    # sep = erfc(z) / 2 with z = 50 / sqrt 2; asymptotic series for erfc
    z = 50 / math.sqrt(2)
    ln_erfc = -z * z - math.log(z * math.sqrt(math.pi)) + math.log1p(-1 / (2 * z * z) + 3 / (4 * z**4))
    assert log10_sep(stats) == pytest.approx((ln_erfc - math.log(2)) / math.log(10), abs=1e-9)


def test_sep_falls_as_levels_separate(bundle):
    seps = [sep(symbol_stats(bundle, 2, [5e5, 5e5 + d])) for d in np.geomspace(1e3, 3e5, 12)]
    assert all(b < a for a, b in zip(seps, seps[1:]))


def test_symbol_stats_levels(bundle):
    s = symbol_stats(bundle, 4)
    assert s.levels == bundle.ligand.levels(4)
    assert all(b > a for a, b in zip(s.mu, s.mu[1:]))
    assert all(s.mu[i] < s.thresholds[i] < s.mu[i + 1] for i in range(3))
