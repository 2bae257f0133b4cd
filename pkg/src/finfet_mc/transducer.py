"""
Charge-to-potential transduction at the functionalised gate.

Bound ligand charge is screened by the electrolyte (Debye length) and
converted to a surface potential through the oxide / nanowire / double-layer
capacitance stack. All three gate faces are lumped into one stack scaled by
the effective width ``W + 2 t_s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .constants import K_B, N_AVOGADRO, Q
from .params import ChannelParams, DeviceParams

__all__ = [
    "TransducerState",
    "debye_length",
    "effective_charge",
    "nanowire_screening_length",
    "capacitance_stack",
    "ligand_potential",
    "transducer_state",
]


def debye_length(ch: ChannelParams) -> float:
    """Electrolyte Debye length [m]; ``c_ion`` is in mol/m^3."""
    if ch.c_ion <= 0:
        raise ValueError("c_ion must be > 0")
    return math.sqrt(ch.eps_M * K_B * ch.T / (2.0 * N_AVOGADRO * Q**2 * ch.c_ion))


def effective_charge(lambda_D: float, l_SR: float) -> float:
    """Screened charge per ligand electron at distance ``l_SR`` from the surface [C]."""
    if lambda_D <= 0:
        raise ValueError("lambda_D must be > 0")
    return Q * math.exp(-l_SR / lambda_D)


def nanowire_screening_length(dev: DeviceParams, T: float) -> float:
    return math.sqrt(dev.eps_SiNW * K_B * T / (dev.p * Q**2))


@dataclass(frozen=True)
class TransducerState:
    lambda_D: float
    q_eff: float
    C_OX: float
    C_DL: float
    C_NW: float
    C_eq: float
    Psi_L: float = float("nan")


def capacitance_stack(dev: DeviceParams, ch: ChannelParams, lambda_D: float,
                      q_eff: float = float("nan")) -> TransducerState:
    """Oxide, double-layer and nanowire capacitances and their equivalent [F].

    ``C_eq = (1/C_OX + 1/C_NW)^-1 + C_DL``. ``Psi_L`` is left unset; see
    :func:`ligand_potential`.
    """
    area = (dev.W + 2.0 * dev.t_s) * dev.L_eff
    C_OX = dev.eps_ox / dev.t_ox * area
    C_DL = ch.eps_M / lambda_D * area
    C_NW = dev.eps_SiNW / nanowire_screening_length(dev, ch.T) * area
    C_eq = 1.0 / (1.0 / C_OX + 1.0 / C_NW) + C_DL
    return TransducerState(lambda_D=lambda_D, q_eff=q_eff, C_OX=C_OX, C_DL=C_DL,
                           C_NW=C_NW, C_eq=C_eq)


def ligand_potential(state: TransducerState, N_e: float) -> float:
    """Surface potential produced by one bound ligand [V].

    The potential of ``N_B`` bound ligands is ``N_B`` times this value.
    """
    return state.q_eff * N_e / state.C_eq


def transducer_state(dev: DeviceParams, ch: ChannelParams, l_SR: float, N_e: float) -> TransducerState:
    """Full transducer chain with ``Psi_L`` filled in."""
    lam = debye_length(ch)
    st = capacitance_stack(dev, ch, lam, q_eff=effective_charge(lam, l_SR))
    return replace(st, Psi_L=ligand_potential(st, N_e))
