"""Command-line front end.

    cournot-mfg presets
    cournot-mfg show-config --preset test1-bm-ci > run.json
    cournot-mfg solve --preset test1-bm-ci --out out/t1 --plots
    cournot-mfg solve --config run.json --sweep-beta 1,2,4

Exit status: 0 for a completed run (converged or not), 1 for usage or
configuration errors, 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from cournot_mfg.config import PRESETS, RunConfig, load_config, preset
from cournot_mfg.errors import ConfigurationError, NumericalError, UsageError
from cournot_mfg.export import default_times, export_field, export_series, write_manifest
from cournot_mfg.fpk import initial_density
from cournot_mfg.spi import constant_policy, spi_solve

log = logging.getLogger("cournot_mfg")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


def solve_config(config: RunConfig):
    grid = config.build_grid()
    params = config.build_params()
    m0 = initial_density(config.initial, grid)
    u_T = config.terminal_row(grid)
    init = config.solver.initial_policy
    if init == "zero":
        Q0 = constant_policy(grid, 0.0)
    elif init == "max":
        Q0 = constant_policy(grid, params.q_max)
    else:
        raise ConfigurationError(f"unknown initial_policy {init!r}")
    return spi_solve(params, grid, m0, u_T, Q0, config.build_spi_config())


def run(config: RunConfig, out_dir=None):
    """Solve and write every requested artifact; returns (manifest, solution)."""
    out = Path(out_dir or config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    start = time.perf_counter()
    sol = solve_config(config)
    wall = time.perf_counter() - start

    artifacts = []
    (out / "config.json").write_text(config.dumps() + "\n", encoding="utf-8")
    artifacts.append(out / "config.json")
    ex = config.export
    if ex.convergence:
        artifacts.append(export_series(sol, "convergence", out / "convergence.csv"))
    if ex.series:
        for which in ("price", "production", "mass"):
            artifacts.append(export_series(sol, which, out / f"{which}.csv"))
    if ex.fields:
        for which in ("U", "M", "Q"):
            n_rows = sol.grid.N_T + (0 if which == "Q" else 1)
            if ex.field_times is None:
                times = default_times(n_rows)
            elif which == "Q":
                # the policy has no row at the final time level
                times = [tau for tau in ex.field_times if tau < n_rows]
            else:
                times = list(ex.field_times)
            artifacts.append(export_field(sol, which, times, out / f"field_{which}.csv"))
    if ex.plots:
        from cournot_mfg.plotting import emit_plots

        artifacts.extend(emit_plots(sol, out / "plots"))
    manifest = write_manifest(out / "manifest.json", config, sol, wall, artifacts)
    log.info(
        "%s: %s after %d iterations (residual %.3e) in %.1fs -> %s",
        config.name,
        manifest["status"],
        sol.iterations,
        sol.final_residual,
        wall,
        out,
    )
    return manifest, sol


def _sweep_job(args):
    config, out = args
    manifest, sol = run(config, out)
    return manifest, sol.history


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="cournot-mfg", description="Smoothed policy iteration for Cournot MFG of controls")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("presets", help="list preset names")

    show = sub.add_parser("show-config", help="print a preset as a JSON config file")
    show.add_argument("--preset", required=True)

    s = sub.add_parser("solve", help="run SPI and export artifacts")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset")
    src.add_argument("--config", type=Path)
    s.add_argument("--out", type=Path)
    s.add_argument("--beta", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--exploitability-every", type=int)
    s.add_argument("--initial-policy", choices=("zero", "max"))
    s.add_argument("--plots", action="store_true")
    s.add_argument("--sweep-beta", help="comma-separated learning-rate parameters, one run each")
    s.add_argument("--jobs", type=int, default=1, help="parallel processes for --sweep-beta")
    return p


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    changes = {
        k: v
        for k, v in (
            ("beta", args.beta),
            ("epsilon", args.epsilon),
            ("max_iters", args.max_iters),
            ("exploitability_every", args.exploitability_every),
            ("initial_policy", args.initial_policy),
        )
        if v is not None
    }
    if changes:
        config = config.with_solver(**changes)
    if args.plots:
        config = replace(config, export=replace(config.export, plots=True))
    if args.out is not None:
        config = replace(config, out_dir=str(args.out))
    return config


def _solve(args) -> int:
    config = preset(args.preset) if args.preset else load_config(args.config)
    config = _apply_overrides(config, args)
    # validate the whole configuration before any work starts
    config.build_grid()
    config.build_params()
    config.build_spi_config()
    if not args.sweep_beta:
        manifest, _ = run(config)
        print(f"{manifest['status']} iterations={manifest['iterations']} residual={manifest['final_residual']:.6e}")
        return EXIT_OK

    try:
        betas = [int(b) for b in args.sweep_beta.split(",") if b.strip()]
    except ValueError:
        raise UsageError(f"--sweep-beta expects integers, got {args.sweep_beta!r}") from None
    root = Path(config.out_dir)
    jobs = [(config.with_solver(beta=b), root / f"beta_{b}") for b in betas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    for b, (manifest, _) in zip(betas, results):
        print(f"beta={b} {manifest['status']} iterations={manifest['iterations']} residual={manifest['final_residual']:.6e}")
    if config.export.plots:
        from cournot_mfg.plotting import sweep_plot

        sweep_plot(root / "sweep.svg", {f"beta={b}": hist for b, (_, hist) in zip(betas, results)})
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        if args.command == "presets":
            for name in PRESETS:
                print(name)
            return EXIT_OK
        if args.command == "show-config":
            print(preset(args.preset).dumps())
            return EXIT_OK
        return _solve(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
