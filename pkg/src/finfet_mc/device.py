"""
FinFET electrical model.

Charge-sheet drain current of a tri-gate device in the linear region,
expressed through the principal-branch Lambert W function, its analytic
transconductance, and the correlated number/mobility-fluctuation flicker noise.
Voltages are magnitudes; the p-type device uses the hole mobility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import K_B, Q, thermal_voltage
from .params import DeviceParams

__all__ = [
    "RegionError",
    "OperatingPoint",
    "lambert_w",
    "lambert_w_exp",
    "threshold_voltage",
    "drain_current",
    "transconductance",
    "operating_point",
    "flatband_noise_psd",
    "flicker_psd",
]

_MAX_ITER = 60
_TOL = 4e-16


class RegionError(ValueError):
    """Bias point outside the linear region."""


# --------------------------------------------------------------------------
# Lambert W, principal branch on [0, inf)
# --------------------------------------------------------------------------

def _halley_direct(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Halley on f(w) = w e^w - x; safe while e^w stays finite (w < ~709).
    for _ in range(_MAX_ITER):
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        dw = np.divide(f, denom, out=np.zeros_like(f), where=denom != 0)
        w = w - dw
        if np.all(np.abs(dw) <= _TOL * np.maximum(np.abs(w), 1e-300)):
            break
    return w


def _halley_log(z: np.ndarray) -> np.ndarray:
    # Solve w + ln(w) = z for z >= 1, i.e. w = W(e^z), without forming e^z.
    lz = np.log(z)
    w = z - lz + lz / z
    for _ in range(_MAX_ITER):
        g = w + np.log(w) - z
        g1 = 1.0 + 1.0 / w
        g2 = -1.0 / w**2
        dw = g / (g1 - g * g2 / (2.0 * g1))
        w = w - dw
        if np.all(np.abs(dw) <= _TOL * w):
            break
    return w


def lambert_w(x):
    """Principal branch W(x) for ``x >= 0``.

    Solves ``w * exp(w) = x``. Small arguments start from ``log1p(x)``; large
    ones from the asymptotic ``ln x - ln ln x`` and are iterated in log form,
    then polished with one direct Halley step.

    Parameters
    ----------
    x : float or array_like
        Non-negative argument(s).

    Returns
    -------
    float or ndarray
        W(x), same shape as ``x``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise ValueError("lambert_w is only implemented for x >= 0")
    out = np.zeros_like(x)
    small = (x > 0) & (x <= math.e)
    big = x > math.e
    if np.any(small):
        xs = x[small]
        out[small] = _halley_direct(xs, np.log1p(xs))
    if np.any(big):
        xb = x[big]
        finite = np.isfinite(xb)
        wb = np.full_like(xb, np.inf)
        if np.any(finite):
            w0 = _halley_log(np.log(xb[finite]))
            with np.errstate(over="ignore", invalid="ignore"):
                polished = _halley_direct(xb[finite], w0)
            wb[finite] = np.where(np.isfinite(polished), polished, w0)
        out[big] = wb
    return float(out) if out.ndim == 0 else out


def lambert_w_exp(z):
    """W(exp(z)) for real ``z``, without overflow for large ``z``."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    low = z <= 1.0
    if np.any(low):
        out[low] = lambert_w(np.exp(z[low]))
    if np.any(~low):
        out[~low] = _halley_log(z[~low])
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# DC model
# --------------------------------------------------------------------------

def threshold_voltage(dev: DeviceParams, T: float = 300.0) -> float:
    """Long-channel threshold voltage [V].

    Uses ``n_i`` and ``N_A_dop``, which are not part of the reference
    parameter table; nothing downstream depends on this value.
    """
    if dev.N_A_dop is None or dev.n_i is None:
        raise ValueError("threshold_voltage needs N_A_dop and n_i")
    kT = K_B * T
    arg = (Q * dev.t_ox / dev.eps_ox) * math.sqrt(dev.n_i**2 * dev.eps_SiNW / (2.0 * kT * dev.N_A_dop))
    return dev.V_fb - 2.0 * kT / Q * math.log(arg)


def _check_region(V_ov: float, V_SD: float) -> None:
    if not (V_ov > 0 and 0 <= V_SD <= V_ov):
        raise RegionError(
            f"not in linear region: need V_ov > 0 and 0 <= V_SD <= V_ov "
            f"(V_ov={V_ov!r}, V_SD={V_SD!r})"
        )


def _prefactor(dev: DeviceParams, T: float) -> float:
    # mu * 2 W_eff / L * C_ox' * (2kT/q)^2
    return dev.mu_p * 2.0 * dev.W_eff / dev.L_eff * (dev.eps_ox / dev.t_ox) * (2.0 * thermal_voltage(T)) ** 2


def _sheet_charges(V_ov: float, V_SD: float, T: float):
    two_vt = 2.0 * thermal_voltage(T)
    q_is = lambert_w_exp(V_ov / two_vt)
    q_id = lambert_w_exp((V_ov - V_SD) / two_vt)
    return q_is, q_id


def drain_current(dev: DeviceParams, V_ov: float = None, V_SD: float = None, T: float = 300.0) -> float:
    """Linear-region drain current magnitude [A].

    ``V_ov`` and ``V_SD`` default to the values stored in ``dev``.
    """
    V_ov = dev.V_ov if V_ov is None else V_ov
    V_SD = dev.V_SD if V_SD is None else V_SD
    _check_region(V_ov, V_SD)
    q_is, q_id = _sheet_charges(V_ov, V_SD, T)
    return _prefactor(dev, T) * ((q_is - q_id) + 0.5 * (q_is**2 - q_id**2))


def transconductance(dev: DeviceParams, V_ov: float = None, V_SD: float = None, T: float = 300.0) -> float:
    """dI_D/dV_SG at fixed V_SD [A/V].

    With dW/dv = W / (1 + W) per unit of the exponent, d/dV of
    ``q + q^2/2`` is ``q / (2kT/q)``, so the bracket collapses to
    ``(q_is - q_id) / (2kT/q)``.
    """
    V_ov = dev.V_ov if V_ov is None else V_ov
    V_SD = dev.V_SD if V_SD is None else V_SD
    _check_region(V_ov, V_SD)
    q_is, q_id = _sheet_charges(V_ov, V_SD, T)
    return _prefactor(dev, T) * (q_is - q_id) / (2.0 * thermal_voltage(T))


@dataclass(frozen=True)
class OperatingPoint:
    V_ov: float
    V_SD: float
    I_D: float
    g_FET: float
    region: str  # "linear" or "invalid"


def operating_point(dev: DeviceParams, T: float = 300.0) -> OperatingPoint:
    try:
        I_D = drain_current(dev, T=T)
        g = transconductance(dev, T=T)
        region = "linear"
    except RegionError:
        I_D = g = float("nan")
        region = "invalid"
    return OperatingPoint(V_ov=dev.V_ov, V_SD=dev.V_SD, I_D=I_D, g_FET=g, region=region)


# --------------------------------------------------------------------------
# flicker noise
# --------------------------------------------------------------------------

def flatband_noise_psd(dev: DeviceParams, f, T: float = 300.0):
    """Flat-band voltage noise PSD [V^2/Hz], trapping over the full gate area."""
    f = np.asarray(f, dtype=float)
    if np.any(f == 0):
        raise ValueError("flicker PSD diverges at f = 0")
    c_ox = dev.eps_ox / dev.t_ox
    area = dev.W_eff * dev.L_eff
    out = dev.lambda_tun * K_B * T * Q**2 * dev.N_ot_SI / (area * c_ox**2 * np.abs(f))
    return float(out) if out.ndim == 0 else out


def flicker_psd(dev: DeviceParams, g_FET: float, f, T: float = 300.0):
    """Drain-current flicker noise PSD [A^2/Hz]; exact 1/|f| law."""
    c_ox = dev.eps_ox / dev.t_ox
    mobility = (1.0 + dev.alpha_s * dev.mu_p * c_ox * dev.V_ov) ** 2
    return flatband_noise_psd(dev, f, T) * g_FET**2 * mobility
