"""``femtoloss single|fig3|fig5`` command-line front end."""

from __future__ import annotations

import argparse
import logging
import sys

from .configfile import ConfigError, default_config_path, load_config
from .experiments import (FIG3_HEADER, FIG5_HEADER, ExperimentSpec, run_fig3, run_fig5,
                          run_single, theta_grid, to_csv)
from .sim import EstimationError
from .uplink import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="femtoloss", description="Non-cooperative PU-SU path loss estimation")
    p.add_argument("kind", choices=("single", "fig3", "fig5"))
    p.add_argument("--config", default=None, help="scenario file (default: packaged default.cfg)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="CSV / report path (default: stdout)")
    p.add_argument("--dump-trace", default=None, help="single: write the observation trace CSV")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--distances", type=_floats, default=None, help="fig3: PU distances in m")
    p.add_argument("--r1", type=_floats, default=None, help="fig5: SU distances in m")
    p.add_argument("--r0", type=_floats, default=None, help="fig5: PU circle radii in m")
    p.add_argument("--thetas", type=int, default=None, help="fig5: number of angles on each circle")
    p.add_argument("--pu-r", type=float, default=300.0, help="single: PU distance from BS (m)")
    p.add_argument("--pu-theta", type=float, default=0.8, help="single: PU angle from SU direction (rad)")
    p.add_argument("--su-r1", type=float, default=100.0, help="single: SU distance from BS (m)")
    return p


def _spec(args) -> ExperimentSpec:
    kw = {"kind": args.kind}
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.distances is not None:
        kw["distances"] = args.distances
    if args.r1 is not None:
        kw["r1_list"] = args.r1
    if args.r0 is not None:
        kw["r0_list"] = args.r0
    if args.thetas is not None:
        kw["thetas"] = theta_grid(args.thetas)
    kw["pu"] = (args.pu_r, args.pu_theta)
    kw["su_r1"] = args.su_r1
    return ExperimentSpec(**kw)


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config or default_config_path())
        if args.seed is not None:
            config = config.with_(seed=args.seed)
        spec = _spec(args)
        spec.validate(config)
    except (ConfigError, ValueError) as exc:
        print(f"femtoloss: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"femtoloss: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.kind == "fig3":
            text = to_csv(FIG3_HEADER, run_fig3(spec, config, threads=args.threads))
        elif args.kind == "fig5":
            text = to_csv(FIG5_HEADER, run_fig5(spec, config, threads=args.threads))
        else:
            text = run_single(spec, config, dump_trace=args.dump_trace)
        _emit(text, args.out)
    except (EstimationError, NumericalError) as exc:
        print(f"femtoloss: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"femtoloss: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
