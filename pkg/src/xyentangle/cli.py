"""Command-line interface: ``xyentangle {uniform,thermal,random,maxtrace,oracle-check,sample-field}``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .check import oracle_check
from .model import (Boundary, ConfigError, DisorderSpec, Regime, SigmaConvention,
                    config_from_mapping, load_config, validate_disorder)
from .randfield import draw, sample_seed
from .sweep import (DESK_PRESET, PRODUCTION_PRESET, dump_spectra, emit, max_concurrence_trace,
                    run_random_zero_t, run_uniform_finite_t, run_uniform_zero_t, to_csv)

log = logging.getLogger("xyentangle")

DEFAULT_GRID = {"h_min": 0.0, "h_max": 2.0, "h_steps": 41}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML file with chain/disorder/sweep sections")
    parser.add_argument("--preset", choices=("desk", "production"),
                        help="desk: N=100, 1000 samples; production: N=500, 10000 samples")
    parser.add_argument("--n-sites", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--q", type=float)
    parser.add_argument("--a", type=float)
    parser.add_argument("--kt", type=float)
    parser.add_argument("--h-min", type=float)
    parser.add_argument("--h-max", type=float)
    parser.add_argument("--h-steps", type=int)
    parser.add_argument("--h-list", type=lambda s: [float(x) for x in s.split(",")],
                        help="comma-separated h values (overrides --h-min/--h-max/--h-steps)")
    parser.add_argument("--r-max", type=int)
    parser.add_argument("--boundary", choices=[b.value for b in Boundary])
    parser.add_argument("--sigma-convention", choices=[c.value for c in SigmaConvention])
    parser.add_argument("--out", help="CSV path (default: stdout)")
    parser.add_argument("--emit-plot-script", action="store_true")
    parser.add_argument("--threads", type=int, default=1, help="worker processes over samples")
    parser.add_argument("--finite", action="store_true",
                        help="uniform/thermal: evaluate the finite N ring instead of N -> inf")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xyentangle", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("uniform", "uniform field, T = 0"),
                        ("thermal", "uniform field, T > 0 (needs --kt)"),
                        ("random", "random field, T = 0, disorder averaged")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "random":
            p.add_argument("--dump-spectra", metavar="PATH",
                           help="write per-sample sector, filling and energies as text")

    p = sub.add_parser("maxtrace", help="max over h of C(r) as a function of a or kT")
    _common(p)
    p.add_argument("--control", choices=("a", "kt"), required=True)
    p.add_argument("--values", type=lambda s: [float(x) for x in s.split(",")], required=True,
                   help="comma-separated a (random regime) or kT (thermal regime) values")

    p = sub.add_parser("oracle-check", help="compare the pipeline with exact diagonalization")
    p.add_argument("--per-combo", type=int, default=1,
                   help="instances per (N, boundary, kT, q, a) combination")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--sizes", type=lambda s: tuple(int(x) for x in s.split(",")),
                   default=(4, 6, 8, 10))
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("sample-field", help="dump raw random-field draws, one per line")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-convention", choices=[c.value for c in SigmaConvention],
                   default="literal")
    p.add_argument("--out")
    return parser


def _raw_config(args: argparse.Namespace, regime: Regime) -> dict:
    raw = load_config(args.config) if args.config else {}
    chain = dict(raw.get("chain", {}))
    disorder = dict(raw.get("disorder", {}))
    sweep = dict(raw.get("sweep", {}))
    preset = {"desk": DESK_PRESET, "production": PRODUCTION_PRESET}.get(args.preset or "", {})
    if preset:
        chain["n_sites"] = preset["n_sites"]
        disorder["n_samples"] = preset["n_samples"]
    chain.setdefault("n_sites", DESK_PRESET["n_sites"])
    disorder.setdefault("n_samples", DESK_PRESET["n_samples"])

    overrides = [
        (chain, "n_sites", args.n_sites), (chain, "temperature", args.kt),
        (chain, "boundary", args.boundary),
        (disorder, "n_samples", args.samples), (disorder, "master_seed", args.seed),
        (disorder, "q", args.q), (disorder, "scale_a", args.a),
        (disorder, "sigma_convention", args.sigma_convention),
        (sweep, "r_max", args.r_max),
    ]
    for section, key, value in overrides:
        if value is not None:
            section[key] = value
    if args.h_list is not None:
        sweep["h_grid"] = args.h_list
    elif any(v is not None for v in (args.h_min, args.h_max, args.h_steps)) or "h_grid" not in sweep:
        for key, default in DEFAULT_GRID.items():
            value = getattr(args, key)
            sweep[key] = value if value is not None else sweep.get(key, default)
        sweep.pop("h_grid", None)
    if regime is not Regime.UNIFORM_FINITE_T:
        chain["temperature"] = 0.0
    sweep["regime"] = regime.value
    return {"chain": chain, "disorder": disorder, "sweep": sweep}


def _progress(done: int, total: int) -> None:
    if done == total or done % max(1, total // 20) == 0:
        log.info("samples %d/%d", done, total)


def _run(regime: Regime, args: argparse.Namespace, overrides: dict | None = None):
    raw = _raw_config(args, regime)
    for (section, key), value in (overrides or {}).items():
        raw[section][key] = value
    cfg = config_from_mapping(raw)
    if regime is Regime.UNIFORM_ZERO_T:
        return run_uniform_zero_t(cfg.chain, cfg.sweep, finite=args.finite)
    if regime is Regime.UNIFORM_FINITE_T:
        return run_uniform_finite_t(cfg.chain, cfg.sweep, finite=args.finite)
    if getattr(args, "dump_spectra", None):
        with open(args.dump_spectra, "w") as fh:
            dump_spectra(cfg.chain, cfg.disorder, cfg.sweep.h_grid, fh)
    return run_random_zero_t(cfg.chain, cfg.disorder, cfg.sweep, workers=args.threads,
                             progress=_progress)


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command in ("uniform", "thermal", "random"):
            regime = {"uniform": Regime.UNIFORM_ZERO_T, "thermal": Regime.UNIFORM_FINITE_T,
                      "random": Regime.RANDOM_ZERO_T}[args.command]
            result = _run(regime, args)
            if args.out:
                emit(result, args.out, plot_script=args.emit_plot_script)
            else:
                sys.stdout.write(to_csv(result))
            return 0

        if args.command == "maxtrace":
            regime = Regime.RANDOM_ZERO_T if args.control == "a" else Regime.UNIFORM_FINITE_T
            key = ("disorder", "scale_a") if args.control == "a" else ("chain", "temperature")
            results = [_run(regime, args, {key: v}) for v in args.values]
            r_max = results[0].rows[-1].r
            lines = [f"# version={__version__}", "control,value,r,max_concurrence"]
            for r in range(1, r_max + 1):
                for value, peak in max_concurrence_trace(results, args.control, r):
                    lines.append(f"{args.control},{value!r},{r},{peak!r}")
            _write("\n".join(lines) + "\n", args.out)
            return 0

        if args.command == "oracle-check":
            count, worst = oracle_check(args.per_combo, args.seed, sizes=args.sizes)
            ok = worst <= args.tol
            print(f"{count} instances, worst |pipeline - exact| = {worst:.3e} "
                  f"({'PASS' if ok else 'FAIL'} at tol {args.tol:g})")
            return 0 if ok else 1

        if args.command == "sample-field":
            validate_disorder(DisorderSpec(q=args.q, scale_a=args.a))
            rng = np.random.default_rng(sample_seed(args.seed, 0))
            values = draw(rng, args.q, args.a, args.count, SigmaConvention(args.sigma_convention))
            _write("".join(f"{v!r}\n" for v in values.tolist()), args.out)
            return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
