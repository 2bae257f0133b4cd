"""
Parameter sweeps, named presets and CSV emission for the command line.

A sweep varies one dotted parameter (``channel.x_R``, ``ligand.N_m`` ...) over a
list of values and evaluates one metric per value. Rows outside the linear
region or failing the equilibrium check are kept and flagged.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .device import RegionError
from .link import (
    current_variance,
    log10_sep,
    mean_current,
    noise_spectrum,
    receiver_chain,
    sep,
    symbol_stats,
)
from .params import Bundle, BandConfig, defaults, dump_config, resolve_key, validate
from .receptor import equilibrium_ok

__all__ = [
    "METRICS",
    "PRESETS",
    "SweepError",
    "SweepSpec",
    "Table",
    "preset",
    "run_sweep",
    "emit_csv",
    "read_csv",
    "config_hash",
]

METRICS = ("snr_db", "sep", "mu_I", "psd", "response")

# overrides applied on top of defaults()
PRESETS: Dict[str, Dict[str, float]] = {
    "table1": {},
    "physiological": {"device.t_s": 5e-7, "channel.c_ion": 150.0},
}

# violations that are reported as a region flag instead of an error
_REGION_KEYS = {"device.V_SD", "device.V_ov"}


class SweepError(ValueError):
    """Unknown sweep variable or a variable/metric combination that cannot run."""


def preset(name: str) -> Bundle:
    try:
        overrides = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return defaults().replace(**overrides)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: Tuple[float, ...]
    metric: str = "snr_db"
    overrides: Tuple[Tuple[str, float], ...] = ()

    @classmethod
    def from_range(cls, variable: str, start: float, stop: float, count: int,
                   scale: str = "log", metric: str = "snr_db", overrides=()) -> "SweepSpec":
        if scale == "log":
            values = np.geomspace(start, stop, count)
        elif scale == "lin":
            values = np.linspace(start, stop, count)
        else:
            raise SweepError(f"scale must be 'lin' or 'log', got {scale!r}")
        return cls(variable, tuple(float(v) for v in values), metric, tuple(overrides))


@dataclass
class Table:
    columns: List[str]
    rows: List[tuple]
    meta: Dict[str, str] = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def config_hash(bundle: Bundle) -> str:
    return hashlib.sha256(dump_config(bundle).encode()).hexdigest()[:16]


_METRIC_COLUMNS = {
    "snr_db": ["N_m", "mu_I", "sigma2", "snr", "snr_db"],
    "mu_I": ["N_m", "mu_I"],
    "response": ["N_m", "rho_R", "P_on", "mu_NB", "mu_I", "I_D", "g_FET"],
    "psd": ["N_m", "sigma2_binding", "sigma2_flicker", "sigma2_total", "f_corner"],
    "sep": ["M", "sep", "log10_sep"],
}
_FLAG_COLUMNS = ["f_min", "f_max", "tau_B", "tau_p", "equilibrium_ok", "region"]


def _evaluate(bundle: Bundle, metric: str, M: int, tau_p: Optional[float]) -> Tuple[list, float, str]:
    lig = bundle.ligand
    if metric == "sep":
        stats = symbol_stats(bundle, M)
        tau_B = max(receiver_chain(bundle, n).binding.tau_B for n in stats.levels)
        chain = receiver_chain(bundle, stats.levels[0])
        return [M, sep(stats), log10_sep(stats)], tau_B, chain
    chain = receiver_chain(bundle, lig.N_m)
    tau_B = chain.binding.tau_B
    if metric in ("snr_db", "mu_I"):
        mu = mean_current(bundle, lig.N_m)
        if metric == "mu_I":
            return [lig.N_m, mu], tau_B, chain
        var = current_variance(noise_spectrum(bundle, lig.N_m))
        ratio = mu * mu / var
        db = 10 * math.log10(ratio) if ratio > 0 else -math.inf
        return [lig.N_m, mu, var, ratio, db], tau_B, chain
    if metric == "response":
        b = chain.binding
        return [lig.N_m, chain.rho_R, b.P_on, b.mu_NB, mean_current(bundle, lig.N_m),
                chain.I_D, chain.g_FET], tau_B, chain
    if metric == "psd":
        sp = noise_spectrum(bundle, lig.N_m)
        return [lig.N_m, current_variance(sp, "binding"), current_variance(sp, "flicker"),
                current_variance(sp), 1.0 / (2 * math.pi * tau_B)], tau_B, chain
    raise SweepError(f"unknown metric {metric!r}; choose from {METRICS}")


def _row(bundle: Bundle, spec: SweepSpec, value: float, M: int, tau_p: Optional[float]) -> tuple:
    key = resolve_key(spec.variable)
    if key == "band.n_points":
        if value != int(value):
            raise SweepError("band.n_points needs integer values")
        value = int(value)
    b = bundle.replace(**{key: value})
    problems = [p for p in validate(b) if p.field not in _REGION_KEYS]
    if problems:
        raise SweepError(f"{key}={value!r} gives invalid parameters: "
                         + "; ".join(map(str, problems)))
    band = b.band
    n_metric = len(_METRIC_COLUMNS[spec.metric])
    try:
        values, tau_B, chain = _evaluate(b, spec.metric, M, tau_p)
    except RegionError:
        return (value, *([math.nan] * n_metric), band.f_min, band.f_max,
                math.nan, math.nan, False, "invalid")
    window = tau_p if tau_p is not None else chain.tau_p
    return (value, *values, band.f_min, band.f_max, tau_B, window,
            equilibrium_ok(window, tau_B), chain.region)


def run_sweep(spec: SweepSpec, bundle: Bundle, M: int = 2, tau_p: Optional[float] = None,
              jobs: int = 1, seed: int = 0) -> Table:
    """Evaluate ``spec.metric`` at each value of ``spec.variable``.

    Rows come back in input order regardless of ``jobs``.
    """
    if spec.metric not in METRICS:
        raise SweepError(f"unknown metric {spec.metric!r}; choose from {METRICS}")
    if not spec.values:
        raise SweepError("sweep needs at least one value")
    try:
        key = resolve_key(spec.variable)
    except KeyError:
        raise SweepError(f"unknown sweep variable {spec.variable!r}") from None
    if key == "ligand.N_m_levels":
        raise SweepError("ligand.N_m_levels cannot be swept; sweep ligand.N_m or ligand.K_max")
    if spec.overrides:
        bundle = bundle.replace(**{resolve_key(k): v for k, v in spec.overrides})

    def work(v):
        return _row(bundle, spec, v, M, tau_p)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, spec.values))
    else:
        rows = [work(v) for v in spec.values]
    columns = [key, *_METRIC_COLUMNS[spec.metric], *_FLAG_COLUMNS]
    meta = {
        "variable": key,
        "metric": spec.metric,
        "M": str(M),
        "config_sha256": config_hash(bundle),
        "band": bundle.band.describe(),
        "seed": str(seed),
    }
    return Table(columns=columns, rows=rows, meta=meta)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def emit_csv(table: Table, destination="-") -> int:
    """Write ``table`` as CSV with ``#`` metadata comments; returns bytes written.

    ``destination`` is a path, ``"-"`` for stdout, or a text file object.
    """
    if not table.rows:
        raise ValueError("refusing to write an empty table")
    buf = io.StringIO()
    meta = {"generator": f"finfet_mc {__version__}", **table.meta}
    for key in sorted(meta):
        buf.write(f"# {key}={meta[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    return len(text.encode("utf-8"))


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> Table:
    """Inverse of :func:`emit_csv`."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [tuple(_parse_cell(c) for c in r) for r in reader]
    meta.pop("generator", None)
    return Table(columns=columns, rows=rows, meta=meta)
