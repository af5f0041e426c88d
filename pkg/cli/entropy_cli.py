"""
entropy_cli.py

Command-line entry point. Every subcommand is a thin adapter around one
library operation:

  sft-entropy   entropy of a transition matrix file
  extend        build the extended matrix of an unfolded tangency
  chain         Perron chain of principal minors (CSV)
  estimate      separated-set entropy of a registered map family (CSV)
  sweep-gap     entropy gap over a grid of transit lengths (CSV)
  sweep-disc    entropy of G_tau over a grid of flow times (CSV)
  snake         snake perturbation lower bound
  verdict       does entropy vary at a tangency?
  orbit         orbit dump of a registered map family (CSV)

Run with:
    py -m cli.entropy_cli sft-entropy data/h.mat
    python3 -m cli.entropy_cli snake --lambda 3 --tau 1 --eps 0

Each subcommand also takes --config FILE with KEY=VALUE lines named like
its flags (dashes or underscores). Flags override the file, the file
overrides the environment defaults from utils/utils_config.

Exit codes: 0 ok, 2 config, 3 non-convergence, 4 invalid spec,
5 domain escape, 6 index out of range, 7 grid too coarse, 8 overflow guard,
9 invalid eigenvalues, 1 anything else.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import argparse
import pathlib
import sys

# import external packages
import numpy as np

# import from local modules
import utils.utils_config as config
from estimators.entropy_estimate import (
    SamplingGrid,
    estimate_to_frame,
    growth_rate,
    newhouse_interpretation,
    separated_entropy,
    snake_bound,
    variation_verdict,
    yomdin_defect,
)
from maps.smooth_maps import FAMILIES, get_family, orbit, orbit_to_frame
from reports.report import scenario_summary, sweep_discontinuity, sweep_entropy_gap, write_report
from symbolic.sft_core import decompose, read_matrix, spectral_radius, write_matrix
from symbolic.tangency_extend import (
    ExtensionSpec,
    chain_to_frame,
    extend_matrix,
    perron_chain,
    read_spec,
    validate_markov_structure,
)
from utils.utils_errors import ConfigError, ToolkitError
from utils.utils_logger import logger, quiet_console

PATH_OPTIONS = ("spec", "H", "out")

#####################################
# Parsing Helpers
#####################################


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _resolve(path: str | None) -> pathlib.Path | None:
    return pathlib.Path(path).expanduser().resolve() if path else None


def _print_frame(frame) -> None:
    print(frame.to_string(index=False))


def _write_frame(frame, out: pathlib.Path | None) -> None:
    if out is None:
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, float_format="%.17g")
    print(f"wrote {out}")


def _extension_spec(args) -> ExtensionSpec:
    if args.spec:
        return read_spec(_resolve(args.spec))
    if args.H is None or args.n1 is None or args.n2 is None:
        raise ConfigError("give --spec, or all of --H, --n1 and --n2")
    return ExtensionSpec(H=read_matrix(_resolve(args.H)), n1=args.n1, n2=args.n2)


def _sampling_grid(args) -> SamplingGrid:
    return SamplingGrid(resolution=args.resolution, curves=args.curves)


#####################################
# Subcommand Handlers
#####################################


def cmd_sft_entropy(args) -> int:
    A = read_matrix(_resolve(args.matrix))
    result = spectral_radius(A, args.tol, args.max_iterations, args.oracle_max_order)
    print(f"order {A.order}")
    print(f"radius {result.radius:.15g}")
    print(f"entropy {result.entropy:.12g}")
    if result.degenerate:
        print("nilpotent: no recurrent symbols")
    if args.components:
        parts = decompose(A, args.tol)
        for indices, h in zip((c.indices for c in parts.components), parts.component_entropies):
            print(f"component {[i + 1 for i in indices]} entropy {h:.12g}")
    return 0


def cmd_extend(args) -> int:
    spec = _extension_spec(args)
    A = extend_matrix(spec)
    violations = validate_markov_structure(A, spec)
    if args.out:
        write_matrix(A, _resolve(args.out))
        print(f"wrote {_resolve(args.out)}")
    else:
        print(A.to_text(), end="")
    print(f"order {A.order} (s={spec.s}, l={spec.ell}), {len(violations)} structure violations")
    return 0


def cmd_chain(args) -> int:
    spec = _extension_spec(args)
    report = perron_chain(extend_matrix(spec), spec, args.tol)
    frame = chain_to_frame(report)
    _print_frame(frame)
    print(f"entropy increases: {report.conclusion}")
    _write_frame(frame, _resolve(args.out))
    return 0


def cmd_estimate(args) -> int:
    m = get_family(args.family, t=args.t, tau=args.tau)
    grid = _sampling_grid(args)
    sampling = grid.covering(m) if args.whole_domain else grid
    estimate = separated_entropy(m, args.n, args.epsilon, sampling, args.tail)
    print(f"{m.name}: entropy estimate {estimate.value:.6g} (log 2 = {np.log(2):.6g})")
    print(newhouse_interpretation(estimate))
    if args.growth:
        rate = growth_rate(m, args.n, grid, args.tail)
        print(f"growth rate R = {rate.value:.6g}, alpha_k = {yomdin_defect(rate, m.dim, args.k):.6g} (k={args.k})")
    _write_frame(estimate_to_frame(estimate), _resolve(args.out))
    return 0


def cmd_sweep_gap(args) -> int:
    if args.H is None:
        raise ConfigError("sweep-gap needs --H")
    H = read_matrix(_resolve(args.H))
    if args.diagonal:
        if len(args.n1_values) != len(args.n2_values):
            raise ConfigError("--diagonal needs as many N1 values as N2 values")
        pairs = list(zip(args.n1_values, args.n2_values))
    else:
        pairs = [(a, b) for a in args.n1_values for b in args.n2_values]
    report = sweep_entropy_gap([ExtensionSpec(H, a, b) for a, b in pairs], args.tol, args.jobs)
    print(scenario_summary(report), end="")
    if args.out:
        write_report(report, _resolve(args.out))
    return 0


def cmd_sweep_disc(args) -> int:
    report = sweep_discontinuity(args.taus, args.n, args.epsilon, _sampling_grid(args), args.tail, args.jobs)
    print(scenario_summary(report), end="")
    if args.out:
        write_report(report, _resolve(args.out))
    return 0


def cmd_snake(args) -> int:
    print(f"{snake_bound(args.lambda_p, args.mu, args.tau, args.eps):.12g}")
    return 0


def cmd_verdict(args) -> int:
    print(variation_verdict(args.pieces, args.index, args.alpha_k).value)
    return 0


def cmd_orbit(args) -> int:
    m = get_family(args.family, t=args.t, tau=args.tau)
    if args.point:
        start = np.array(args.point)
        if len(start) != m.dim:
            raise ConfigError(f"{m.name} needs a {m.dim}-dimensional --point")
    else:
        lo, hi = (np.asarray(c) for c in m.core_box)
        start = np.random.default_rng(args.seed).uniform(lo, hi)
    frame = orbit_to_frame(orbit(m, start, args.n))
    _print_frame(frame)
    _write_frame(frame, _resolve(args.out))
    return 0


#####################################
# Parser
#####################################


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="KEY=VALUE scenario file")
    common.add_argument("--seed", type=int, default=config.get_seed(), help="random seed")
    common.add_argument("--jobs", type=int, default=config.get_jobs(), help="parallel workers for sweeps")
    common.add_argument("--out", default=None, help="output path")
    common.add_argument("--tol", type=float, default=config.get_spectral_tolerance(), help="spectral tolerance")
    return common


def _spec_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", default=None, help="spec file with H-file, N1, N2")
    p.add_argument("--H", default=None, help="base matrix file")
    p.add_argument("--n1", type=int, default=None, help="forward transit length N1")
    p.add_argument("--n2", type=int, default=None, help="backward transit length N2")


def _estimator_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=config.get_orbit_length(), help="orbit segment length")
    p.add_argument("--epsilon", type=float, default=config.get_epsilon(), help="separation scale")
    p.add_argument("--resolution", type=int, default=config.get_grid_resolution(), help="seed cells per curve")
    p.add_argument("--curves", type=int, default=2, help="seed curves per transverse axis")
    p.add_argument("--tail", type=float, default=config.get_tail_window(), help="fraction of n before the fit window")


def _family_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, default="horseshoe", help="map family")
    p.add_argument("--t", type=float, default=0.0, help="isotopy parameter")
    p.add_argument("--tau", type=float, default=0.0, help="flow time of the ball family")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="entropy_cli",
        description="Entropy variation toolkit: symbolic extensions, map families, estimates.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sft-entropy", parents=[common], formatter_class=fmt, help="entropy of a matrix file")
    p.add_argument("matrix", help="matrix file")
    p.add_argument("--components", action="store_true", help="also list recurrent components")
    p.add_argument("--max-iterations", type=int, default=config.get_max_iterations(), help="power iteration cap")
    p.add_argument("--oracle-max-order", type=int, default=config.get_oracle_max_order(), help="largest order checked exactly")
    p.set_defaults(handler=cmd_sft_entropy)

    p = sub.add_parser("extend", parents=[common], formatter_class=fmt, help="build the extended matrix")
    _spec_options(p)
    p.set_defaults(handler=cmd_extend)

    p = sub.add_parser("chain", parents=[common], formatter_class=fmt, help="Perron chain of minors")
    _spec_options(p)
    p.set_defaults(handler=cmd_chain)

    p = sub.add_parser("estimate", parents=[common], formatter_class=fmt, help="separated-set entropy")
    _family_options(p)
    _estimator_options(p)
    p.add_argument("--growth", action="store_true", help="also estimate R(f) and alpha_k")
    p.add_argument("--whole-domain", action="store_true", help="sample the whole domain at the same y spacing")
    p.add_argument("--k", type=int, default=1, help="smoothness for alpha_k")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("sweep-gap", parents=[common], formatter_class=fmt, help="entropy gap sweep")
    p.add_argument("--H", default=None, help="base matrix file")
    p.add_argument("--n1-values", type=_int_list, default="1,2,3", help="N1 grid")
    p.add_argument("--n2-values", type=_int_list, default="1,2,3", help="N2 grid")
    p.add_argument("--diagonal", action="store_true", help="pair the grids instead of taking the product")
    p.set_defaults(handler=cmd_sweep_gap)

    p = sub.add_parser("sweep-disc", parents=[common], formatter_class=fmt, help="discontinuity sweep over tau")
    p.add_argument("--taus", type=_float_list, default="0,0.05,0.2", help="flow times")
    _estimator_options(p)
    p.set_defaults(handler=cmd_sweep_disc)

    p = sub.add_parser("snake", parents=[common], formatter_class=fmt, help="snake perturbation bound")
    p.add_argument("--lambda", dest="lambda_p", type=float, default=3.0, help="unstable eigenvalue")
    p.add_argument("--mu", type=float, default=None, help="stable eigenvalue (omit when conservative)")
    p.add_argument("--tau", type=int, default=1, help="period of the saddle")
    p.add_argument("--eps", type=float, default=0.0, help="slack epsilon")
    p.set_defaults(handler=cmd_snake)

    p = sub.add_parser("verdict", parents=[common], formatter_class=fmt, help="variation verdict")
    p.add_argument("--pieces", type=_float_list, default="0.6931471805599453,1.0986122886681098", help="piece entropies")
    p.add_argument("--index", type=int, default=0, help="0-based index of the tangency piece")
    p.add_argument("--alpha-k", type=float, default=0.0, help="C^k defect bound")
    p.set_defaults(handler=cmd_verdict)

    p = sub.add_parser("orbit", parents=[common], formatter_class=fmt, help="orbit dump")
    _family_options(p)
    p.add_argument("--point", type=_float_list, default=None, help="start point x,y[,z]; random in the core box if omitted")
    p.add_argument("--n", type=int, default=config.get_orbit_length(), help="number of steps")
    p.set_defaults(handler=cmd_orbit)

    parser.subcommands = sub.choices
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    subparser = parser.subcommands[args.command]
    actions = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config")}
    config_path = _resolve(args.config)
    values = config.read_scenario_config(config_path, set(actions))
    for key, value in values.items():
        if actions[key].nargs == 0:
            values[key] = value.strip().lower() in ("1", "true", "yes", "on")
        elif key in PATH_OPTIONS:
            # relative paths in a scenario file name files next to it
            path = pathlib.Path(value.strip()).expanduser()
            values[key] = str(path if path.is_absolute() else config_path.parent / path)
    # string defaults are converted by each option's type on the next parse
    subparser.set_defaults(**values)
    return parser.parse_args(argv)


#####################################
# Main
#####################################


def run(argv: list[str] | None = None) -> int:
    """Parse argv, dispatch, and map toolkit errors to exit codes."""
    quiet_console()
    parser = build_parser()
    try:
        logger.info("STEP 1. Parse arguments and scenario config.")
        args = _apply_config_file(parser, list(sys.argv[1:] if argv is None else argv))
        logger.info(f"STEP 2. Run {args.command}.")
        status = args.handler(args)
        logger.info(f"STEP 3. {args.command} finished with status {status}.")
        return status
    except ToolkitError as e:
        logger.error(e.structured())
        print(e.structured(), file=sys.stderr)
        return e.exit_code
    except (ValueError, OSError) as e:
        logger.error(f"ERROR: {e}")
        print(f"ERROR: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


#####################################
# Conditional Execution
#####################################

if __name__ == "__main__":
    main()
