"""Command line front-end: ``finfet-mc <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 model-domain error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import List, Optional

from .experiments import (
    METRICS,
    PRESETS,
    SweepError,
    SweepSpec,
    Table,
    config_hash,
    emit_csv,
    preset,
    run_sweep,
)
from .link import log10_sep, noise_spectrum, sep, symbol_stats
from .oracle import PRNG_NAME, TrialConfig, simulate_binding, simulate_sep
from .params import (
    BandConfig,
    ConfigError,
    dump_config,
    load_config,
    parse_assignments,
    parse_quantity,
    validate,
)
from .link import receiver_chain

log = logging.getLogger("finfet_mc")

EXIT_OK, EXIT_CONFIG, EXIT_MODEL = 0, 2, 3


def _band(text: str) -> BandConfig:
    try:
        fmin, fmax, n = text.split(":")
        return BandConfig(parse_quantity(fmin), parse_quantity(fmax), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must be fmin:fmax:n, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="parameter file (section.key = value)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one parameter, e.g. channel.u=5e-6 (repeatable)")
    p.add_argument("--preset", default="table1", choices=sorted(PRESETS))
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--band", type=_band, help="integration band fmin:fmax:n")
    p.add_argument("--M", type=int, default=2, choices=(2, 4), help="alphabet size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-p", type=float, default=None,
                   help="exposure window for the equilibrium flag [s]")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finfet-mc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep one parameter and evaluate a metric")
    _common(p)
    p.add_argument("--var", required=True, help="dotted parameter, e.g. channel.x_R")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--values", help="comma separated values")
    g.add_argument("--range", help="start:stop:count[:log|lin]")
    p.add_argument("--metric", default="snr_db", choices=METRICS)

    p = sub.add_parser("psd", help="noise PSD components for one release count")
    _common(p)
    p.add_argument("--N-m", type=float, default=None)

    p = sub.add_parser("response", help="mean current versus released molecules")
    _common(p)
    p.add_argument("--range", default="1e4:1e7:31:log")

    p = sub.add_parser("sep", help="analytic symbol error probability")
    _common(p)

    p = sub.add_parser("oracle", help="Monte-Carlo check of SEP and occupancy")
    _common(p)
    p.add_argument("--trials", type=int, default=1_000_000)

    p = sub.add_parser("validate-config", help="check a parameter file")
    _common(p)
    p.add_argument("--dump", action="store_true", help="print the resolved parameters")

    sub.add_parser("presets", help="list named presets")
    return parser


def _bundle(args):
    bundle = preset(args.preset)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            bundle = load_config(fh.read(), base=bundle)
    pairs = []
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, _, v = item.partition("=")
        pairs.append((None, k.strip(), v.strip()))
    if pairs:
        bundle = parse_assignments(pairs, base=bundle)
    if args.band is not None:
        bundle = parse_assignments(
            [(None, "band.f_min", repr(args.band.f_min)),
             (None, "band.f_max", repr(args.band.f_max)),
             (None, "band.n_points", str(args.band.n_points))], base=bundle)
    return bundle


def _range(text: str):
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"range must be start:stop:count[:log|lin], got {text!r}")
    start, stop = parse_quantity(parts[0]), parse_quantity(parts[1])
    return start, stop, int(parts[2]), parts[3] if len(parts) == 4 else "log"


def _meta(bundle, args, **extra):
    meta = {"config_sha256": config_hash(bundle), "band": bundle.band.describe(),
            "seed": str(args.seed), "preset": args.preset}
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def _cmd_sweep(args, bundle) -> Table:
    if args.values is not None:
        values = tuple(parse_quantity(v) for v in args.values.split(","))
        spec = SweepSpec(args.var, values, args.metric)
    else:
        start, stop, count, scale = _range(args.range)
        spec = SweepSpec.from_range(args.var, start, stop, count, scale, args.metric)
    table = run_sweep(spec, bundle, M=args.M, tau_p=args.tau_p, jobs=args.jobs, seed=args.seed)
    table.meta["preset"] = args.preset
    return table


def _cmd_response(args, bundle) -> Table:
    start, stop, count, scale = _range(args.range)
    spec = SweepSpec.from_range("ligand.N_m", start, stop, count, scale, "response")
    # the range may exceed K_max; response only needs the release count
    bundle = bundle.replace(**{"ligand.K_max": max(bundle.ligand.K_max, start, stop)})
    table = run_sweep(spec, bundle, M=args.M, tau_p=args.tau_p, jobs=args.jobs, seed=args.seed)
    table.meta["preset"] = args.preset
    return table


def _cmd_psd(args, bundle) -> Table:
    N_m = bundle.ligand.N_m if args.N_m is None else args.N_m
    sp = noise_spectrum(bundle, N_m)
    rows = list(zip(sp.freqs.tolist(), sp.s_binding.tolist(), sp.s_flicker.tolist(),
                    sp.s_total.tolist()))
    return Table(["f", "s_binding", "s_flicker", "s_total"], rows,
                 _meta(bundle, args, N_m=repr(N_m), tau_B=repr(sp.tau_B)))


def _cmd_sep(args, bundle) -> Table:
    stats = symbol_stats(bundle, args.M)
    cols = ["symbol", "N_m", "mu_I", "sigma2", "threshold_above"]
    rows = []
    for m in range(stats.M):
        thr = stats.thresholds[m] if m < stats.M - 1 else math.nan
        rows.append((m, stats.levels[m], stats.mu[m], stats.sigma2[m], thr))
    return Table(cols, rows, _meta(bundle, args, M=args.M, sep=repr(sep(stats)),
                                   log10_sep=repr(log10_sep(stats))))


def _cmd_oracle(args, bundle) -> Table:
    cfg = TrialConfig(n_trials=args.trials, seed=args.seed, workers=args.jobs)
    stats = symbol_stats(bundle, args.M)
    p_hat, se = simulate_sep(stats, cfg)
    p = sep(stats)
    rows = [("sep", p, p_hat, se, (p_hat - p) / se if se > 0 else math.nan)]
    chain = receiver_chain(bundle, bundle.ligand.N_m)
    b = chain.binding
    m_hat, v_hat = simulate_binding(b.N_R, b.P_on, cfg)
    n = cfg.n_trials
    se_m = math.sqrt(b.var_NB / n)
    # SE of the sample variance for a Binomial: sqrt((mu4 - var^2 (n-3)/(n-1)) / n)
    mu4 = b.var_NB * (1 + 3 * (b.N_R - 2) * b.P_on * (1 - b.P_on)) if b.N_R else 0.0
    se_v = math.sqrt(max(mu4 - b.var_NB**2 * (n - 3) / (n - 1), 0.0) / n)
    rows.append(("binding_mean", b.mu_NB, m_hat, se_m, (m_hat - b.mu_NB) / se_m if se_m else math.nan))
    rows.append(("binding_var", b.var_NB, v_hat, se_v, (v_hat - b.var_NB) / se_v if se_v else math.nan))
    return Table(["check", "analytic", "estimate", "standard_error", "z"], rows,
                 _meta(bundle, args, M=args.M, n_trials=n, prng=PRNG_NAME))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        for name in sorted(PRESETS):
            ov = ", ".join(f"{k}={v!r}" for k, v in PRESETS[name].items()) or "(defaults)"
            print(f"{name}: {ov}")
        return EXIT_OK
    try:
        bundle = _bundle(args)
        if args.command == "validate-config":
            problems = validate(bundle)
            for p in problems:
                print(p, file=sys.stderr)
            if not problems:
                print(dump_config(bundle) if args.dump else "ok", end="" if args.dump else "\n")
            return EXIT_CONFIG if problems else EXIT_OK
        handler = {"sweep": _cmd_sweep, "psd": _cmd_psd, "response": _cmd_response,
                   "sep": _cmd_sep, "oracle": _cmd_oracle}[args.command]
        table = handler(args, bundle)
    except (ConfigError, SweepError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    emit_csv(table, args.out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
