"""
Parameter sets for the microfluidic channel, FinFET receiver and ligands.

All values are stored in SI units. ``defaults()`` returns the reference
operating point; ``load_config`` parses the flat ``section.key = value``
text format used by the command line front-end.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .constants import EPS_0, Q

__all__ = [
    "ChannelParams",
    "DeviceParams",
    "LigandParams",
    "BandConfig",
    "Bundle",
    "Violation",
    "ConfigError",
    "defaults",
    "validate",
    "load_config",
    "dump_config",
    "level_mapping",
    "L_EFF_RANGE",
]

# Documented tuning range for the effective channel length:
# from short FinFET gates up to long-channel nanowire sensors.
L_EFF_RANGE = (20e-9, 10e-6)


@dataclass(frozen=True)
class ChannelParams:
    h_ch: float = 3e-6  # channel height [m]
    l_ch: float = 15e-6  # channel width [m]
    u: float = 10e-6  # mean flow velocity [m/s]
    D0: float = 2e-10  # intrinsic diffusion coefficient [m^2/s]
    x_R: float = 1e-3  # transmitter-receiver distance d [m]
    T: float = 300.0  # temperature [K]
    c_ion: float = 30.0  # ionic strength [mol/m^3]
    eps_M: float = 78 * EPS_0  # medium permittivity [F/m]

    @property
    def A_ch(self) -> float:
        return self.h_ch * self.l_ch


@dataclass(frozen=True)
class DeviceParams:
    W: float = 10 * math.pi * 1e-9  # fin top width [m]
    t_s: float = 5e-8  # fin height [m]
    L_eff: float = 2e-6  # effective channel length [m]; assumed, tunable in L_EFF_RANGE
    t_ox: float = 2e-9  # oxide thickness [m]
    eps_ox: float = 3.9 * EPS_0
    eps_SiNW: float = 11.68 * EPS_0
    V_fb: float = -0.4762  # flat-band voltage [V]
    # Only used by threshold_voltage; assumed values.
    N_A_dop: float = 1e24  # [1/m^3]
    n_i: float = 1.45e16  # [1/m^3]
    mu_p: float = 500e-4  # hole mobility [m^2/Vs]
    V_SD: float = 0.1  # [V]
    V_ov: float = 0.4  # V_SG - |V_t| [V]
    p: float = 1e24  # hole density [1/m^3]
    lambda_tun: float = 0.05e-9  # tunnelling distance [m]
    N_ot: float = 1e22  # oxide trap density [1/(eV m^3)]
    alpha_s: float = 1.9e-4  # Coulomb scattering coefficient [Vs/C]

    @property
    def W_eff(self) -> float:
        return self.W + 2 * self.t_s

    @property
    def N_ot_SI(self) -> float:
        """Trap density per joule per cubic metre."""
        return self.N_ot / Q


@dataclass(frozen=True)
class LigandParams:
    k1: float = 2e-19  # binding rate [m^3/s]
    k_minus1: float = 20.0  # unbinding rate [1/s]
    N_e: float = 3.0  # electrons per ligand
    rho_SR: float = 4e16  # receptor surface density [1/m^2]
    l_SR: float = 2e-9  # receptor length [m]
    N_m: float = 5e5  # molecules released for the reference symbol
    K_max: float = 4e6  # max releasable molecules
    N_m_levels: Optional[Tuple[float, ...]] = None  # explicit per-symbol counts

    @property
    def K_D(self) -> float:
        """Dissociation constant [molecules/m^3]."""
        return self.k_minus1 / self.k1

    def levels(self, M: int) -> Tuple[float, ...]:
        if self.N_m_levels is not None:
            if len(self.N_m_levels) != M:
                raise ValueError(
                    f"N_m_levels has {len(self.N_m_levels)} entries, M={M}"
                )
            return tuple(self.N_m_levels)
        return level_mapping(M, self.N_m, self.K_max)


@dataclass(frozen=True)
class BandConfig:
    f_min: float = 1e-3  # [Hz]
    f_max: float = 1e3  # [Hz]
    n_points: int = 4001

    def describe(self) -> str:
        return f"{self.f_min!r}:{self.f_max!r}:{self.n_points}"


@dataclass(frozen=True)
class Bundle:
    channel: ChannelParams = field(default_factory=ChannelParams)
    device: DeviceParams = field(default_factory=DeviceParams)
    ligand: LigandParams = field(default_factory=LigandParams)
    band: BandConfig = field(default_factory=BandConfig)

    def get(self, key: str):
        section, name = _split_key(key)
        return getattr(getattr(self, section), name)

    def replace(self, **overrides) -> "Bundle":
        """Return a copy with dotted-key overrides, e.g. ``replace(**{"channel.u": 5e-6})``."""
        by_section: Dict[str, Dict[str, object]] = {}
        for key, value in overrides.items():
            section, name = _split_key(key)
            by_section.setdefault(section, {})[name] = value
        changes = {
            s: dataclasses.replace(getattr(self, s), **kv)
            for s, kv in by_section.items()
        }
        return dataclasses.replace(self, **changes)


def level_mapping(M: int, N_min: float, K_max: float) -> Tuple[float, ...]:
    """Evenly spaced release counts from ``N_min`` (symbol 0) to ``K_max``."""
    if M < 2:
        raise ValueError("M must be at least 2")
    step = (K_max - N_min) / (M - 1)
    return tuple(N_min + m * step for m in range(M))


def defaults() -> Bundle:
    return Bundle()


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


SECTIONS = ("channel", "device", "ligand", "band")
_SECTION_TYPES = {
    "channel": ChannelParams,
    "device": DeviceParams,
    "ligand": LigandParams,
    "band": BandConfig,
}


def validate(bundle: Bundle) -> List[Violation]:
    """Return every violated invariant; an empty list means the bundle is valid."""
    out: List[Violation] = []

    def need(cond: bool, key: str, msg: str) -> None:
        if not cond:
            out.append(Violation(key, msg))

    ch, dev, lig, band = bundle.channel, bundle.device, bundle.ligand, bundle.band
    for name in ("h_ch", "l_ch", "D0", "x_R", "T", "c_ion", "eps_M"):
        v = getattr(ch, name)
        need(_finite(v) and v > 0, f"channel.{name}", f"must be > 0 (got {v!r})")
    need(_finite(ch.u) and ch.u >= 0, "channel.u", f"must be >= 0 (got {ch.u!r})")

    for name in ("W", "t_s", "L_eff", "t_ox", "eps_ox", "eps_SiNW", "mu_p", "p",
                 "lambda_tun", "N_A_dop", "n_i"):
        v = getattr(dev, name)
        need(_finite(v) and v > 0, f"device.{name}", f"must be > 0 (got {v!r})")
    for name in ("N_ot", "alpha_s"):
        v = getattr(dev, name)
        need(_finite(v) and v >= 0, f"device.{name}", f"must be >= 0 (got {v!r})")
    need(dev.t_s > dev.W, "device.t_s",
         f"tri-gate assumption requires t_s > W (t_s={dev.t_s!r}, W={dev.W!r})")
    need(dev.V_ov > 0, "device.V_ov", f"must be > 0 (got {dev.V_ov!r})")
    need(0 <= dev.V_SD <= dev.V_ov, "device.V_SD",
         f"linear region requires 0 <= V_SD <= V_ov (V_SD={dev.V_SD!r}, V_ov={dev.V_ov!r})")

    for name in ("k1", "k_minus1"):
        v = getattr(lig, name)
        need(_finite(v) and v > 0, f"ligand.{name}", f"must be > 0 (got {v!r})")
    for name in ("N_e", "rho_SR", "l_SR", "N_m"):
        v = getattr(lig, name)
        need(_finite(v) and v >= 0, f"ligand.{name}", f"must be >= 0 (got {v!r})")
    need(lig.K_max > 0, "ligand.K_max", f"must be > 0 (got {lig.K_max!r})")
    need(lig.N_m <= lig.K_max, "ligand.N_m",
         f"must be <= K_max (N_m={lig.N_m!r}, K_max={lig.K_max!r})")
    if lig.N_m_levels is not None:
        lv = lig.N_m_levels
        need(len(lv) >= 2, "ligand.N_m_levels", "need at least two levels")
        need(all(b > a for a, b in zip(lv, lv[1:])), "ligand.N_m_levels",
             "must be strictly increasing")
        need(all(x >= 0 for x in lv), "ligand.N_m_levels", "must be >= 0")
        need(max(lv, default=0) <= lig.K_max, "ligand.N_m_levels",
             f"max level must be <= K_max ({lig.K_max!r})")

    need(band.f_min > 0, "band.f_min", f"must be > 0 (got {band.f_min!r})")
    need(band.f_max > band.f_min, "band.f_max",
         f"must exceed f_min (f_min={band.f_min!r}, f_max={band.f_max!r})")
    need(band.n_points >= 2, "band.n_points", f"must be >= 2 (got {band.n_points!r})")
    return out


def _finite(v) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        return False


# --------------------------------------------------------------------------
# config text
# --------------------------------------------------------------------------

class ConfigError(ValueError):
    """Raised for malformed or invalid configuration text."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


_ALIASES = {
    "d": "channel.x_R",
    "channel.d": "channel.x_R",
    "channel.h_c": "channel.h_ch",
    "channel.l_c": "channel.l_ch",
}

_PREFIX = {"p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6, "m": 1e-3,
           "c": 1e-2, "k": 1e3, "M": 1e6}
_UNITS = ("m", "V", "s", "Hz", "K", "F", "A", "C")
_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_VALUE_RE = re.compile(rf"^({_NUM})\s*([A-Za-zµμ]*)$")


def parse_quantity(text: str) -> float:
    """Parse ``"10mm"``, ``"3 um"``, ``"0.4V"``, ``"2e-10"`` into an SI float.

    A lone letter is read as an SI prefix (``"10m"`` is 0.01). A recognised unit
    symbol after an optional prefix is dropped; no unit conversion beyond the
    prefix is performed.
    """
    m = _VALUE_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse value {text!r}")
    number, suffix = float(m.group(1)), m.group(2)
    if not suffix:
        return number
    if suffix[0] in _PREFIX and (len(suffix) == 1 or suffix[1:] in _UNITS):
        return number * _PREFIX[suffix[0]]
    if suffix in _UNITS:
        return number
    raise ValueError(f"unknown unit suffix {suffix!r}")


def _split_key(key: str) -> Tuple[str, str]:
    key = _ALIASES.get(key, key)
    section, _, name = key.partition(".")
    if section not in _SECTION_TYPES or not name:
        raise KeyError(key)
    names = {f.name for f in dataclasses.fields(_SECTION_TYPES[section])}
    if name not in names:
        raise KeyError(key)
    return section, name


def resolve_key(key: str) -> str:
    """Canonical ``section.field`` name for ``key`` (aliases resolved)."""
    section, name = _split_key(key.strip())
    return f"{section}.{name}"


def _coerce(key: str, raw: str):
    section, name = _split_key(key)
    if name == "N_m_levels":
        raw = raw.strip()
        if raw.lower() in ("", "none", "auto"):
            return None
        return tuple(parse_quantity(part) for part in raw.split(","))
    if name == "n_points":
        value = parse_quantity(raw)
        if value != int(value):
            raise ValueError(f"n_points must be an integer, got {raw!r}")
        return int(value)
    return parse_quantity(raw)


def parse_assignments(pairs, base: Optional[Bundle] = None) -> Bundle:
    """Apply ``(line, key, raw_value)`` triples to ``base``; raises ConfigError."""
    overrides: Dict[str, object] = {}
    for line, key, raw in pairs:
        try:
            canon = resolve_key(key)
        except KeyError:
            raise ConfigError(f"unknown key {key!r}", line=line, key=key) from None
        if canon in overrides and line is not None:
            raise ConfigError("duplicate key", line=line, key=key)
        try:
            overrides[canon] = _coerce(canon, raw)
        except ValueError as exc:
            raise ConfigError(str(exc), line=line, key=key) from None
    bundle = (base or defaults()).replace(**overrides)
    problems = validate(bundle)
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(map(str, problems)))
    return bundle


def load_config(text: str, base: Optional[Bundle] = None) -> Bundle:
    """Parse flat ``section.key = value`` text. Unspecified keys keep their defaults."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError("missing key", line=lineno)
        pairs.append((lineno, key, raw.strip()))
    return parse_assignments(pairs, base=base)


def dump_config(bundle: Bundle) -> str:
    """Serialise every field so that ``load_config(dump_config(b)) == b``."""
    lines = []
    for section in SECTIONS:
        obj = getattr(bundle, section)
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if value is None:
                text = "auto"
            elif isinstance(value, tuple):
                text = ", ".join(repr(float(v)) for v in value)
            else:
                text = repr(value)
            lines.append(f"{section}.{f.name} = {text}")
    return "\n".join(lines) + "\n"
