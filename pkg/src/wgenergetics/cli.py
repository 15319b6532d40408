"""Command-line entry point: ``python -m wgenergetics --config run.cfg``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure. A bound
violation is reported as data, never through the exit code.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from .errors import (ConfigError, DomainError, InconsistencyError, NumericalError,
                     SolverDivergenceError, TruncationError)
from .runner import (EMITS, convergence_sweep, emit_fig2_dataset, fig2_configs, parse_config,
                     run_scenario, scenario_csv)

OUTPUT_DIR_ENV = "WGENERGETICS_OUTPUT_DIR"


def build_parser():
    p = argparse.ArgumentParser(prog="wgenergetics", description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--out", help="output CSV path (default: <scenario>_<emit>.csv)")
    p.add_argument("--emit", choices=EMITS, help="dataset to produce (overrides the config)")
    p.add_argument("--oracle", action="store_true", help="run the collision-model oracle")
    p.add_argument("--dt", type=float, help="override the integration step (units 1/gamma)")
    return p


def _output_path(args, cfg):
    if args.out:
        path = Path(args.out)
    else:
        path = Path(f"{cfg.scenario}_{cfg.emit}.csv")
    if not path.is_absolute() and os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / path
    return path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
        overrides = {}
        if args.emit:
            overrides["emit"] = args.emit
        if args.oracle:
            overrides["oracle"] = True
        if args.dt is not None:
            overrides["dt"] = args.dt
        cfg = dataclasses.replace(cfg, **overrides)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if cfg.emit == "fig2":
            shared = {k: getattr(cfg, k) for k in ("width", "center", "t_start", "t_stop", "t0",
                                                   "t_max", "dt", "gamma", "omega0")}
            shared["pulse"] = cfg.pulse or "rising_exponential"
            fig = emit_fig2_dataset(*fig2_configs(**shared))
            text = fig.csv()
            summary = f"{fig.coherent.summary()}\n{fig.single.summary()}"
        elif cfg.emit == "convergence":
            rep = convergence_sweep(cfg)
            text = rep.csv(cfg)
            summary = (f"scenario={cfg.scenario} balance_order={rep.balance_order:.3f} "
                       f"oracle_order={rep.oracle_order:.3f}")
        else:
            res = run_scenario(cfg)
            text = scenario_csv(res)
            summary = res.summary()
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverDivergenceError, NumericalError, TruncationError, InconsistencyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    path = _output_path(args, cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
