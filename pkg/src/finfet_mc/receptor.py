"""Ligand flux to the sensor surface, equilibrium occupancy and binding noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ChannelParams, DeviceParams, LigandParams
from .transport import effective_diffusion

__all__ = [
    "BindingState",
    "active_area",
    "receptor_count",
    "peclet_number",
    "transport_rate",
    "binding_stats",
    "relaxation_time",
    "binding_noise_psd",
    "equilibrium_ok",
]


def active_area(dev: DeviceParams) -> float:
    """Functionalised gate area: top face plus both sidewalls [m^2]."""
    return (dev.W + 2.0 * dev.t_s) * dev.L_eff


def receptor_count(dev: DeviceParams, lig: LigandParams) -> int:
    return int(round(lig.rho_SR * active_area(dev)))


def peclet_number(ch: ChannelParams, dev: DeviceParams) -> float:
    """Shear Peclet number ``6 Q w_R^2 / (D l_ch h_ch^2)`` with ``w_R = W``."""
    Q = ch.A_ch * ch.u
    return 6.0 * Q * dev.W**2 / (effective_diffusion(ch) * ch.l_ch * ch.h_ch**2)


def _rate_high(P_s: float) -> float:
    return 0.8075 * P_s ** (1 / 3) + 0.7058 * P_s ** (-1 / 6) - 0.1984 * P_s ** (-1 / 3)


def _rate_low(P_s: float) -> float:
    denom = 4.885 - math.log(P_s)
    return 2.0 * math.pi / denom * (1.0 - 0.09266 * P_s / denom)


def transport_rate(ch: ChannelParams, dev: DeviceParams) -> float:
    """Mass-transport rate constant ``k_T`` [m^3/s].

    Piecewise fit in the Peclet number; ``P_s = 1`` uses the high-flow branch.
    Requires ``u > 0``.
    """
    if ch.u <= 0:
        raise ValueError("transport rate requires u > 0")
    P_s = peclet_number(ch, dev)
    shape = _rate_high(P_s) if P_s >= 1.0 else _rate_low(P_s)
    return effective_diffusion(ch) * dev.L_eff * shape


@dataclass(frozen=True)
class BindingState:
    N_R: int
    P_on: float
    mu_NB: float
    var_NB: float
    tau_B: float
    k_T: float
    K_D: float


def _p_on(rho_R: float, K_D: float) -> float:
    if math.isinf(rho_R):
        return 1.0
    return rho_R / (rho_R + K_D)


def relaxation_time(rho_R: float, lig: LigandParams, N_R: float, k_T: float) -> float:
    """Relaxation time of transport-influenced binding [s]."""
    k1, km1 = lig.k1, lig.k_minus1
    on = k1 * rho_R + km1
    return 1.0 / on + k1 * (k1 * rho_R + N_R * km1) / (k_T * on**2)


def binding_stats(rho_R: float, lig: LigandParams, N_R: int, k_T: float = math.inf) -> BindingState:
    """Equilibrium Binomial occupancy of ``N_R`` receptors at concentration ``rho_R``.

    ``k_T`` only enters the relaxation time; the default (infinite transport)
    gives the reaction-limited value.
    """
    if rho_R < 0:
        raise ValueError("rho_R must be >= 0")
    K_D = lig.K_D
    P = _p_on(rho_R, K_D)
    tau = relaxation_time(rho_R, lig, N_R, k_T) if math.isfinite(rho_R) else 0.0
    return BindingState(
        N_R=N_R,
        P_on=P,
        mu_NB=P * N_R,
        var_NB=P * (1.0 - P) * N_R,
        tau_B=tau,
        k_T=k_T,
        K_D=K_D,
    )


def binding_noise_psd(state: BindingState, f):
    """Two-sided Lorentzian PSD of the bound-receptor count [1/Hz]."""
    f = np.asarray(f, dtype=float)
    tau = state.tau_B
    out = state.var_NB * 2.0 * tau / (1.0 + (2.0 * np.pi * f * tau) ** 2)
    return float(out) if out.ndim == 0 else out


def equilibrium_ok(tau_p: float, tau_B: float) -> bool:
    """True when the exposure window is at least five relaxation times."""
    if tau_p <= 0 or tau_B <= 0:
        raise ValueError("tau_p and tau_B must be > 0")
    return tau_p >= 5.0 * tau_B
