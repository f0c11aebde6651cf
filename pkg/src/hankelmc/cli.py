"""Command-line entry points for the experiment harness.

Subcommands: ``convergence``, ``phase``, ``beam``, ``doa`` reproduce the
four experiments; ``gen`` writes one synthetic scenario to files and
``complete`` runs a one-shot completion of a CSV-supplied matrix/mask pair.

Exit codes: 0 success, 1 validation/usage error, 2 structural solver error.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import StructuralMaskError, ValidationError
from .experiments import (Algorithm, GridSpec, default_doa_grid,
                          default_doa_scenario, default_phase_grid,
                          default_scenario, resolve_threads, run_beam_pattern,
                          run_convergence, run_doa_grid, run_phase_transition)
from .matrixio import (HarnessConfig, load_config, read_mask_csv,
                       read_matrix_csv, write_mask_csv, write_matrix_csv)
from .simulate import MeasurementMatrix, simulate_scenario
from .solver import SolverOptions, complete

__all__ = ["cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the harness reserves 2 for
    # structural solver errors, so usage problems are rerouted to exit 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config document")
    common.add_argument("--out", metavar="DIR", default="out",
                        help="output directory (default: out)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="master seed override")
    common.add_argument("--trials", type=int, metavar="N",
                        help="trial-count override")
    common.add_argument("--threads", type=int, metavar="N",
                        help="worker processes (default: HANKELMC_THREADS or 1)")

    parser = _Parser(prog="hankelmc",
                     description="Hankel-structured lp matrix completion "
                                 "experiments for failed-sensor sonar data")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("convergence", parents=[common],
                   help="median error versus iteration")
    sub.add_parser("phase", parents=[common],
                   help="recovery-probability grid")
    sub.add_parser("beam", parents=[common],
                   help="beam-pattern comparison")
    sub.add_parser("doa", parents=[common],
                   help="bearing-error grid")
    gen = sub.add_parser("gen", parents=[common],
                         help="write one synthetic scenario to files")
    comp = sub.add_parser("complete", parents=[common],
                          help="complete a CSV-supplied matrix")
    comp.add_argument("--matrix", required=True, metavar="CSV",
                      help="measurement matrix (rows,cols header; i,j,re,im)")
    comp.add_argument("--mask", required=True, metavar="CSV",
                      help="observation mask (rows,cols header; i,j,bit)")
    return parser


def _load(args) -> HarnessConfig:
    if args.config is None:
        return HarnessConfig()
    return load_config(args.config)


def _scenario(cfg: HarnessConfig, args, default_factory):
    scenario = cfg.scenario if cfg.scenario is not None else default_factory()
    if args.seed is not None:
        scenario = replace(scenario, rng_seed=args.seed)
    return scenario


def _solver(cfg: HarnessConfig, args) -> SolverOptions:
    solver = cfg.solver if cfg.solver is not None else SolverOptions()
    if args.seed is not None:
        solver = replace(solver, rng_seed=args.seed)
    return solver


def _grid(cfg: HarnessConfig, args, default_factory) -> GridSpec:
    grid = (GridSpec.from_dict(cfg.grid) if cfg.grid is not None
            else default_factory())
    if args.trials is not None:
        grid = replace(grid, trials_per_cell=args.trials)
    return grid


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        cfg = _load(args)
        out = Path(args.out)
        threads = resolve_threads(args.threads)

        if args.command == "phase":
            result = run_phase_transition(
                grid=_grid(cfg, args, default_phase_grid),
                scenario=_scenario(cfg, args, default_scenario),
                solver=_solver(cfg, args), out_dir=out, threads=threads,
                master_seed=args.seed)
            n_err = sum(c.errors for c in result.cells)
            print(f"phase grid done: {len(result.cells)} cells, "
                  f"{len(result.trials)} trial records, "
                  f"{n_err} structural failures -> {out}")

        elif args.command == "convergence":
            trials = args.trials if args.trials is not None else 100
            res = run_convergence(
                scenario=_scenario(cfg, args, default_scenario),
                solver=_solver(cfg, args), trials=trials, out_dir=out,
                threads=threads, master_seed=args.seed)
            finals = {k: (v[-1] if v else float("nan"))
                      for k, v in res["medians"].items()}
            print(f"convergence done: median final nrmse {finals} -> {out}")

        elif args.command == "beam":
            trials = args.trials if args.trials is not None else 50
            res = run_beam_pattern(
                scenario=_scenario(cfg, args, default_scenario),
                solver=_solver(cfg, args), trials=trials, out_dir=out,
                threads=threads, master_seed=args.seed)
            for name, m in res["metrics"].items():
                print(f"  {name}: beamwidth {m['beamwidth_deg']:.2f} deg, "
                      f"peak sidelobe {m['peak_sidelobe_db']:.1f} dB, "
                      f"{m['n_spurious']} spurious peaks")
            print(f"beam patterns -> {out}")

        elif args.command == "doa":
            result = run_doa_grid(
                grid=_grid(cfg, args, default_doa_grid),
                scenario=_scenario(cfg, args, default_doa_scenario),
                solver=_solver(cfg, args), out_dir=out, threads=threads,
                master_seed=args.seed)
            passed = {name: sum(c.passed for c in result.cells if c.algo == name)
                      for name in ["RAW"] + [a.value for a in Algorithm]}
            print(f"bearing grid done: cells passed per curve {passed} -> {out}")

        elif args.command == "gen":
            scenario = _scenario(cfg, args, default_scenario)
            meas = simulate_scenario(scenario)
            out.mkdir(parents=True, exist_ok=True)
            (out / "scenario.json").write_text(scenario.to_json() + "\n")
            write_matrix_csv(out / "x.csv", meas.x)
            write_mask_csv(out / "mask.csv", meas.mask)
            write_matrix_csv(out / "clean.csv", meas.clean)
            print(f"scenario written: x.csv mask.csv clean.csv scenario.json -> {out}")

        elif args.command == "complete":
            x = read_matrix_csv(args.matrix)
            mask = read_mask_csv(args.mask)
            if mask.shape != x.shape:
                raise ValidationError(
                    f"mask shape {mask.shape} != matrix shape {x.shape}")
            meas = MeasurementMatrix(x=x * mask, mask=mask, clean=None)
            est = complete(meas, _solver(cfg, args))
            out.mkdir(parents=True, exist_ok=True)
            write_matrix_csv(out / "completed.csv", est)
            print(f"completed matrix ({est.shape[0]} x {est.shape[1]}) "
                  f"-> {out / 'completed.csv'}")

        return 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except StructuralMaskError as exc:
        print(f"structural error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
