"""Command line front end: ``panc <subcommand> [options]``.

Exit codes: 0 success, 1 invalid input or failed validation, 2 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys

from .config import METHODS, RELAY_POSITIONS, SCHEMES, ConfigError, ExperimentConfig, preset

log = logging.getLogger("panc")

CSV_HEADER = ("snr_db", "scheme", "method", "sper", "ci95", "trials", "seed")


# argument helpers

def parse_snr(text):
    """``lo:hi:step`` (inclusive) or a comma list."""
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"bad SNR range {text!r}")
        lo, hi, step = parts
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + k * step for k in range(n))
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_trials(text):
    """``CHANNELSxSYMBOLS`` or a channel count."""
    if "x" in text.lower():
        c, s = text.lower().split("x", 1)
        return int(c), int(s)
    return int(text), None


def parse_list(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_config(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        try:
            cfg = ExperimentConfig.load(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    else:
        cfg = preset(args.preset or "symmetric")
    if args.preset and getattr(args, "config", None):
        cfg = cfg.replace(name=args.preset, relay=RELAY_POSITIONS[args.preset])
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.trials:
        c, s = parse_trials(args.trials)
        kw["n_channels"] = c
        if s is not None:
            kw["n_symbols"] = s
        kw["analytic_channels"] = min(cfg.analytic_channels, c)
    if args.snr:
        kw["snr_db"] = parse_snr(args.snr)
    if args.schemes is not None:
        kw["schemes"] = parse_list(args.schemes)
    if args.method:
        kw["methods"] = parse_list(args.method)
    if args.out:
        kw["out"] = args.out
    return cfg.replace(**kw).validate()


# output

def _num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return repr(float(x))


def result_rows(results, cfg):
    for r in results:
        for m in cfg.methods:
            if m == "mc":
                yield (_num(r.snr_db), r.scheme, m, _num(r.sper_mc), _num(r.ci95_halfwidth), r.trials, cfg.seed)
            else:
                yield (_num(r.snr_db), r.scheme, m, _num(getattr(r, f"sper_{m}")),
                       _num(getattr(r, f"{m}_ci95")), r.analytic_channels, cfg.seed)


def write_csv(path, results, cfg):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for row in result_rows(results, cfg):
                w.writerow(row)
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from None


def gnuplot_script(csv_path, cfg):
    name = os.path.basename(csv_path)
    curves = []
    for s in cfg.schemes:
        for m in cfg.methods:
            curves.append(f"'{name}' every ::1 using 1:(strcol(2) eq '{s}' && strcol(3) eq '{m}' ? $4 : 1/0) "
                          f"with linespoints title '{s} {m}'")
    return "\n".join([
        "# SPER against SNR, one curve per scheme and method",
        "set datafile separator ','",
        "set logscale y",
        "set format y '10^{%L}'",
        "set xlabel 'SNR (dB)'",
        "set ylabel 'SPER'",
        "set grid",
        "set key outside right",
        f"set title '{cfg.name}'",
        "plot " + ", \\\n     ".join(curves),
        "",
    ])


def write_plot(csv_path, cfg):
    path = os.path.splitext(csv_path)[0] + ".gp"
    try:
        with open(path, "w") as fh:
            fh.write(gnuplot_script(csv_path, cfg))
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from None
    return path


# channel input for single-instance commands

def _channel_from_args(args, cfg):
    from .geometry import ChannelRealization
    from .montecarlo import channel_stream, link_gains, sample_channels

    given = [args.h1r, args.h2r, args.h1d, args.h2d, args.hrd]
    if all(v is not None for v in given):
        return ChannelRealization(complex(args.h1r.replace(" ", "")), complex(args.h2r.replace(" ", "")),
                                  abs(float(args.h1d)), abs(float(args.h2d)), abs(float(args.hrd)))
    if any(v is not None for v in given):
        raise ConfigError("give all five links or none")
    return sample_channels(link_gains(cfg), channel_stream(cfg.seed, args.draw))


# subcommands

def cmd_sweep(args):
    from .montecarlo import run_sweep

    cfg = build_config(args)
    log.info("sweep %s: %d x %d trials, seed %d", cfg.name, cfg.n_channels, cfg.n_symbols, cfg.seed)
    results = run_sweep(cfg)
    write_csv(cfg.out, results, cfg)
    gp = write_plot(cfg.out, cfg)
    for r in results:
        extra = "".join(f"  {m}={getattr(r, 'sper_' + m):.3e}" for m in cfg.methods if m != "mc")
        print(f"{r.snr_db:6.1f} dB  {r.scheme:10s}  mc={r.sper_mc:.3e} +-{r.ci95_halfwidth:.1e}{extra}")
    print(f"wrote {cfg.out} and {gp}")
    return 0


def cmd_validate(args):
    from . import validation

    ok = validation.run_all(n=args.n, seed=args.seed if args.seed is not None else 0, out=print)
    return 0 if ok else 1


def cmd_optimize(args):
    from .power import grid_oracle, objective_ct_minedge, objective_exact_minpair, optimize_powers_ct, \
        optimize_powers_exact

    cfg = build_config(args)
    ch = _channel_from_args(args, cfg)
    print(f"channel: {ch}")
    for label, fn, obj, key in (("origin (diagonals)", optimize_powers_exact, objective_exact_minpair, "exact_minpair"),
                                ("CT (edges)", optimize_powers_ct, objective_ct_minedge, "ct_minedge")):
        p, info = fn(ch, cfg.er_ave, full_output=True)
        _, best = grid_oracle(ch, cfg.er_ave, key, args.resolution)
        val = float(obj(ch, p.a, p.b))
        flag = " (clamped)" if info["clamped"] else ""
        print(f"{label:20s} a={p.a:.6f} b={p.b:.6f}{flag}  {key}={val:.6f}  oracle={best:.6f}  "
              f"ratio={val / best:.6f}")
    return 0


def cmd_analyze(args):
    from .asymptotic import InsufficientData, diversity_slope
    from .montecarlo import SweepResult

    try:
        with open(args.csv) as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise RuntimeError(f"cannot read {args.csv}: {exc}") from None
    if not rows or set(CSV_HEADER) - set(rows[0]):
        raise ConfigError(f"{args.csv}: missing columns, expected {','.join(CSV_HEADER)}")
    results = [SweepResult(float(r["snr_db"]), r["scheme"], int(r["trials"]), float(r["sper"]), float(r["ci95"]))
               for r in rows if r["method"] == "mc"]
    window = tuple(float(x) for x in args.window.split(","))
    for scheme in dict.fromkeys(r.scheme for r in results):
        try:
            fit = diversity_slope(results, scheme, window)
            print(f"{scheme:10s} slope={fit.slope:.3f} residual={fit.residual:.3f} points={fit.points}")
        except InsufficientData as exc:
            print(f"{scheme:10s} insufficient data ({exc})")
    return 0


def cmd_geometry(args):
    from .ct import ct_dest, ct_relay
    from .geometry import build_idc, build_irc, geometry_dump
    from .power import optimize_powers_exact

    cfg = build_config(args)
    ch = _channel_from_args(args, cfg)
    p = optimize_powers_exact(ch, cfg.er_ave)
    print(f"channel: {ch}")
    print(f"levels: a={p.a:.6f} b={p.b:.6f}")
    print(geometry_dump(build_irc(ch), "relay"))
    print(geometry_dump(build_idc(ch, p), "destination"))
    for label, t in (("relay CT", ct_relay(ch)), ("destination CT", ct_dest(ch, p))):
        print(f"[{label}]")
        for k, v in enumerate(t.vertices, start=1):
            print(f"V{k} = ({v[0]: .6f}, {v[1]: .6f})")
    return 0


def cmd_config(args):
    if args.print_defaults:
        cfg = preset(args.preset) if args.preset else ExperimentConfig()
        sys.stdout.write(cfg.to_text())
        return 0
    if args.config:
        cfg = ExperimentConfig.load(args.config).validate()
        sys.stdout.write(cfg.to_text())
        return 0
    raise ConfigError("nothing to do: use --print-defaults or --config")


def _add_common(p, sweep_flags=True):
    p.add_argument("--preset", choices=sorted(RELAY_POSITIONS))
    p.add_argument("--config", help="key/value config file")
    p.add_argument("--seed", type=int)
    if sweep_flags:
        p.add_argument("--trials", help="CHANNELSxSYMBOLS or a channel count")
        p.add_argument("--snr", help="lo:hi:step or comma list, dB")
        p.add_argument("--schemes", help=f"comma list from {','.join(SCHEMES)}")
        p.add_argument("--method", help=f"comma list from {','.join(METHODS)}")
        p.add_argument("--out", help="CSV path")


def _add_channel(p):
    p.add_argument("--h1r", help="complex, e.g. 0.3-1.2j")
    p.add_argument("--h2r")
    p.add_argument("--h1d")
    p.add_argument("--h2d")
    p.add_argument("--hrd")
    p.add_argument("--draw", type=int, default=0, help="channel draw index when links are not given")


def make_parser():
    ap = argparse.ArgumentParser(prog="panc", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sweep with analytic overlays")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the oracle suites")
    p.add_argument("--seed", type=int)
    p.add_argument("-n", type=int, default=100, help="random instances per suite")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("optimize", help="closed-form relay levels against the grid oracle")
    _add_common(p)
    _add_channel(p)
    p.add_argument("--resolution", type=int, default=512)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("analyze", help="diversity slopes from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--window", default="20,30", help="lo,hi in dB")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("geometry-dump", help="print constellations and their transforms")
    _add_common(p)
    _add_channel(p)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("config", help="print or check configuration files")
    p.add_argument("--print-defaults", action="store_true")
    p.add_argument("--preset", choices=sorted(RELAY_POSITIONS))
    p.add_argument("--config")
    p.set_defaults(func=cmd_config)
    return ap


def main(argv=None):
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2; those are input errors here
        return 1 if exc.code == 2 else (exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
