"""
End-to-end link model: per-symbol mean current, noise spectrum, SNR, ML
thresholds and symbol error probability for M-ary concentration shift keying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import erfc, log_ndtr, logsumexp

from .device import flicker_psd, operating_point, transconductance
from .params import BandConfig, Bundle
from .receptor import (
    BindingState,
    binding_noise_psd,
    binding_stats,
    receptor_count,
    transport_rate,
)
from .transducer import TransducerState, transducer_state
from .transport import effective_diffusion, passage_duration, received_concentration

__all__ = [
    "ReceiverChain",
    "NoiseSpectrum",
    "SymbolStats",
    "receiver_chain",
    "mean_current",
    "noise_spectrum",
    "current_variance",
    "snr",
    "snr_ceiling",
    "ml_thresholds",
    "symbol_stats",
    "sep",
    "log10_sep",
]


@dataclass(frozen=True)
class ReceiverChain:
    """Intermediate quantities of the receiver for one release count."""

    N_m: float
    rho_R: float
    binding: BindingState
    transducer: TransducerState
    g_FET: float
    I_D: float
    region: str
    tau_p: float

    @property
    def mean_current(self) -> float:
        return self.g_FET * self.transducer.Psi_L * self.binding.mu_NB


def receiver_chain(bundle: Bundle, N_m: float) -> ReceiverChain:
    ch, dev, lig = bundle.channel, bundle.device, bundle.ligand
    rho = received_concentration(ch, N_m)
    N_R = receptor_count(dev, lig)
    state = binding_stats(rho, lig, N_R, transport_rate(ch, dev))
    tr = transducer_state(dev, ch, lig.l_SR, lig.N_e)
    op = operating_point(dev, T=ch.T)
    return ReceiverChain(N_m=N_m, rho_R=rho, binding=state, transducer=tr,
                         g_FET=op.g_FET, I_D=op.I_D, region=op.region,
                         tau_p=passage_duration(ch))


def mean_current(bundle: Bundle, N_m: float) -> float:
    """Mean signal current for ``N_m`` released molecules [A].

    Closed form ``g Psi_L N_R / (1 + K_D A_ch / N_m * sqrt(4 pi D x_R / u))``;
    it tends to ``g Psi_L N_R`` as the receptors saturate.
    """
    ch, dev, lig = bundle.channel, bundle.device, bundle.ligand
    if N_m < 0:
        raise ValueError("N_m must be >= 0")
    if ch.u <= 0:
        raise ValueError("no advective delay defined for u = 0")
    g = transconductance(dev, T=ch.T)
    psi = transducer_state(dev, ch, lig.l_SR, lig.N_e).Psi_L
    N_R = receptor_count(dev, lig)
    if N_m == 0:
        return 0.0
    atten = lig.K_D * ch.A_ch / N_m * math.sqrt(4.0 * math.pi * effective_diffusion(ch) * ch.x_R / ch.u)
    return g * psi * N_R / (1.0 + atten)


@dataclass(frozen=True)
class NoiseSpectrum:
    freqs: np.ndarray
    s_binding: np.ndarray
    s_flicker: np.ndarray
    s_total: np.ndarray
    band: BandConfig
    tau_B: float = float("nan")


def _band_grid(band: BandConfig) -> np.ndarray:
    return np.geomspace(band.f_min, band.f_max, band.n_points)


def noise_spectrum(bundle: Bundle, N_m: float, band: Optional[BandConfig] = None) -> NoiseSpectrum:
    """Output-referred current noise PSD [A^2/Hz] on a log-spaced grid."""
    band = band or bundle.band
    chain = receiver_chain(bundle, N_m)
    f = _band_grid(band)
    gain2 = (chain.transducer.Psi_L * chain.g_FET) ** 2
    s_b = np.asarray(binding_noise_psd(chain.binding, f)) * gain2
    s_f = np.asarray(flicker_psd(bundle.device, chain.g_FET, f, T=bundle.channel.T))
    return NoiseSpectrum(freqs=f, s_binding=s_b, s_flicker=s_f, s_total=s_b + s_f,
                         band=band, tau_B=chain.binding.tau_B)


def current_variance(spectrum: NoiseSpectrum, which: str = "total") -> float:
    """Current variance [A^2]: the two-sided PSD integral folded onto ``[f_min, f_max]``.

    Trapezoid rule in ``ln f``, which is exact for a 1/f spectrum.
    """
    s = {"total": spectrum.s_total, "binding": spectrum.s_binding,
         "flicker": spectrum.s_flicker}[which]
    f = spectrum.freqs
    return 2.0 * float(np.trapezoid(s * f, np.log(f)))


def snr(bundle: Bundle, N_m: float, band: Optional[BandConfig] = None) -> Tuple[float, float]:
    """Output SNR ``mu^2 / sigma^2`` as ``(linear, dB)``."""
    mu = mean_current(bundle, N_m)
    var = current_variance(noise_spectrum(bundle, N_m, band))
    ratio = mu**2 / var
    return ratio, 10.0 * math.log10(ratio) if ratio > 0 else -math.inf


def snr_ceiling(bundle: Bundle, band: Optional[BandConfig] = None) -> Tuple[float, float]:
    """Large-``N_m`` SNR limit: saturated signal over flicker noise alone."""
    band = band or bundle.band
    ch, dev, lig = bundle.channel, bundle.device, bundle.ligand
    g = transconductance(dev, T=ch.T)
    mu_sat = g * transducer_state(dev, ch, lig.l_SR, lig.N_e).Psi_L * receptor_count(dev, lig)
    # flicker is exactly A/|f|
    amp = float(flicker_psd(dev, g, 1.0, T=ch.T))
    var = 2.0 * amp * math.log(band.f_max / band.f_min)
    ratio = mu_sat**2 / var
    return ratio, 10.0 * math.log10(ratio)


# --------------------------------------------------------------------------
# detection
# --------------------------------------------------------------------------

def _pair_threshold(mu_a: float, var_a: float, mu_b: float, var_b: float) -> float:
    # Equal-likelihood point of N(mu_a, var_a) and N(mu_b, var_b) inside (mu_a, mu_b),
    # solved in coordinates where the means sit at 0 and 1.
    span = mu_b - mu_a
    a, b = var_a / span**2, var_b / span**2
    A = 1.0 / b - 1.0 / a
    B = -2.0 / b
    C = 1.0 / b + math.log(b / a)
    if abs(A) <= 1e-12 * max(1.0 / a, 1.0 / b):
        roots = [-C / B]
    else:
        disc = B * B - 4.0 * A * C
        if disc < 0:
            roots = []
        else:
            qq = -0.5 * (B + math.copysign(math.sqrt(disc), B))
            roots = [qq / A, C / qq] if qq != 0 else [-B / (2 * A)]
    inside = [r for r in roots if 0.0 < r < 1.0]
    if len(inside) > 1:
        raise ValueError(
            f"two ML crossings between means {mu_a!r} and {mu_b!r} "
            f"(variances {var_a!r}, {var_b!r})"
        )
    if not inside:
        # one likelihood dominates the whole gap (means far closer than the
        # spread, different variances): ML never picks the other symbol here,
        # so the threshold sits on the far mean of the dominated side
        llr = 0.5 * (math.log(b / a) + 0.25 / b - 0.25 / a)
        return mu_b if llr > 0 else mu_a
    return mu_a + inside[0] * span


def ml_thresholds(mu: Sequence[float], sigma2: Sequence[float]) -> Tuple[float, ...]:
    """Decision thresholds between adjacent Gaussian symbol likelihoods."""
    mu = [float(m) for m in mu]
    sigma2 = [float(v) for v in sigma2]
    if len(mu) != len(sigma2) or len(mu) < 2:
        raise ValueError("need matching mu and sigma2 with at least two symbols")
    if any(v <= 0 for v in sigma2):
        raise ValueError("variances must be > 0")
    if any(b <= a for a, b in zip(mu, mu[1:])):
        raise ValueError("means must be strictly increasing")
    return tuple(_pair_threshold(mu[i], sigma2[i], mu[i + 1], sigma2[i + 1])
                 for i in range(len(mu) - 1))


@dataclass(frozen=True)
class SymbolStats:
    M: int
    mu: Tuple[float, ...]
    sigma2: Tuple[float, ...]
    thresholds: Tuple[float, ...]
    levels: Tuple[float, ...] = ()

    @classmethod
    def from_moments(cls, mu, sigma2, levels=()) -> "SymbolStats":
        mu, sigma2 = tuple(map(float, mu)), tuple(map(float, sigma2))
        if len(mu) >= 2 and mu[0] == mu[-1] and len(set(mu)) == 1:
            # indistinguishable symbols: any threshold at the common mean
            thr = tuple(mu[:-1])
        else:
            thr = ml_thresholds(mu, sigma2)
        return cls(M=len(mu), mu=mu, sigma2=sigma2, thresholds=thr, levels=tuple(levels))


def symbol_stats(bundle: Bundle, M: int = 2, levels: Optional[Sequence[float]] = None,
                 band: Optional[BandConfig] = None) -> SymbolStats:
    """Per-symbol mean and variance of the output current plus ML thresholds."""
    levels = tuple(levels) if levels is not None else bundle.ligand.levels(M)
    mu = [mean_current(bundle, n) for n in levels]
    var = [current_variance(noise_spectrum(bundle, n, band)) for n in levels]
    return SymbolStats.from_moments(mu, var, levels=levels)


def _erfc_args(stats: SymbolStats):
    mu, lam = stats.mu, stats.thresholds
    s = [math.sqrt(v) * math.sqrt(2.0) for v in stats.sigma2]
    M = stats.M
    args = [(lam[0] - mu[0]) / s[0], (mu[M - 1] - lam[M - 2]) / s[M - 1]]
    for m in range(1, M - 1):
        args.append((mu[m] - lam[m - 1]) / s[m])
        args.append((lam[m] - mu[m]) / s[m])
    return np.asarray(args)


def sep(stats: SymbolStats) -> float:
    """Symbol error probability under equiprobable symbols and threshold detection.

    The ``1/(2M)`` weight applies to every erfc term, so ``M = 2`` reduces to
    the usual binary error and the result never exceeds ``(M-1)/M``.
    """
    return float(np.sum(erfc(_erfc_args(stats))) / (2 * stats.M))


def log10_sep(stats: SymbolStats) -> float:
    """log10 of :func:`sep`, accurate where the probability underflows."""
    z = _erfc_args(stats)
    log_erfc = math.log(2.0) + log_ndtr(-z * math.sqrt(2.0))
    return float((logsumexp(log_erfc) - math.log(2 * stats.M)) / math.log(10.0))
