"""Command-line surface: simulate a design, optimize, or enumerate.

Exit codes are a stable contract:

    0  success / feasible
    1  input error (bad file, bad flags, invalid network or design)
    2  simulated design violates a constraint
    3  best design found is infeasible (or nothing feasible exists)
    4  enumeration refused: design space over the ceiling
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datafiles import resolve_dataset
from .errors import PipeDesignError, SearchSpaceError
from .ga import FitnessEvaluator, GaConfig, convergence_csv, run_ga
from .hydraulics import simulate
from .network import DesignVector, validate_network
from .oracle import DEFAULT_MAX_COMBINATIONS, brute_force

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_INFEASIBLE_BEST = 3
EXIT_REFUSED = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the
    # "infeasible simulation" code; remap to the input-error code.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _amount(value) -> str:
    """Costs and penalties print as integers whenever they are integral."""
    if abs(value - round(value)) < 1e-9:
        return str(int(round(value)))
    return f"{value:.4f}"


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


def _load(name_or_path: str):
    network, catalog, settings = resolve_dataset(name_or_path)
    violations = validate_network(network)
    if violations:
        raise PipeDesignError(
            "invalid network: " + "; ".join(violations)
        )
    return network, catalog, settings


def _parse_diameters(text: str, expected: int) -> list[float]:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise PipeDesignError(f"diameters must be numbers, got {text!r}") from None
    if len(values) != expected:
        raise PipeDesignError(
            f"expected {expected} diameters, got {len(values)}"
        )
    return values


def render_constraint_tables(network, catalog, settings, dv, result) -> str:
    lines = [f"Pipe constraints (g_FF <= {settings.gff_max:.4f} m/m)"]
    lines.append("pipe diameter_mm g_FF ok")
    for pipe, gene in zip(network.pipes, dv.genes):
        diameter = catalog.entries[gene].diameter
        lines.append(
            f"{pipe.id} {diameter:g} {result.pipe_gradient[pipe.id]:.4f} "
            f"{_yes_no(result.pipe_feasible[pipe.id])}"
        )
    lines.append("")
    lines.append(f"Node constraints (H_R >= {settings.hr_min:.4f} m)")
    lines.append("node H_R ok")
    for node in network.demand_nodes:
        lines.append(
            f"{node.id} {result.node_residual[node.id]:.4f} "
            f"{_yes_no(result.node_feasible[node.id])}"
        )
    return "\n".join(lines)


def render_design_block(network, catalog, evaluated) -> str:
    lines = ["best design", "pipe diameter_mm"]
    for pipe, gene in zip(network.pipes, evaluated.dv.genes):
        lines.append(f"{pipe.id} {catalog.entries[gene].diameter:g}")
    lines.append(f"Total cost: {_amount(evaluated.cost)}")
    lines.append(f"Nodal penalty: {_amount(evaluated.nodal_penalty)}")
    lines.append(f"Pipe penalty: {_amount(evaluated.pipe_penalty)}")
    lines.append(f"Total penalty: {_amount(evaluated.nodal_penalty + evaluated.pipe_penalty)}")
    lines.append(f"Feasible: {'yes' if evaluated.feasible else 'no'}")
    return "\n".join(lines)


def _cmd_simulate(args) -> int:
    network, catalog, settings = _load(args.network)
    diameters = _parse_diameters(args.diameters, len(network.pipes))
    dv = DesignVector.from_diameters(catalog, diameters)
    result = simulate(network, catalog, settings, dv)
    evaluator = FitnessEvaluator(network, catalog, settings, args.npf, args.ppf)
    evaluated = evaluator.evaluate(dv)

    print(render_constraint_tables(network, catalog, settings, dv, result))
    print()
    print(f"Total cost: {_amount(evaluated.cost)}")
    print(f"Nodal penalty: {_amount(evaluated.nodal_penalty)}")
    print(f"Pipe penalty: {_amount(evaluated.pipe_penalty)}")
    print(f"Total penalty: {_amount(evaluated.nodal_penalty + evaluated.pipe_penalty)}")
    print(f"Feasible: {'yes' if result.feasible else 'no'}")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _cmd_optimize(args) -> int:
    network, catalog, settings = _load(args.network)
    config = GaConfig(
        population_size=args.pop,
        crossover_probability=args.pc,
        mutation_probability=args.pm,
        max_generations=args.generations,
        rng_seed=args.seed,
        nodal_penalty_factor=args.npf,
        pipe_penalty_factor=args.ppf,
    )
    report = run_ga(network, catalog, settings, config)

    body = "\n".join(
        [
            f"network: {args.network}",
            f"seed: {config.rng_seed}",
            f"population_size: {config.population_size}",
            f"crossover_probability: {config.crossover_probability:g}",
            f"mutation_probability: {config.mutation_probability:g}",
            f"max_generations: {config.max_generations}",
            f"nodal_penalty_factor: {config.nodal_penalty_factor:g}",
            f"pipe_penalty_factor: {config.pipe_penalty_factor:g}",
            "",
            render_design_block(network, catalog, report.best),
        ]
    ) + "\n"

    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(convergence_csv(report), encoding="utf-8")

    print(body, end="")
    print(f"(elapsed {report.elapsed_seconds:.2f} s, "
          f"{len(report.history)} generations)", file=sys.stderr)
    return EXIT_OK if report.best.feasible else EXIT_INFEASIBLE_BEST


def _cmd_bruteforce(args) -> int:
    network, catalog, settings = _load(args.network)
    space = len(catalog.entries) ** len(network.pipes)
    ceiling = space if args.force_full else args.max_combinations
    try:
        outcome = brute_force(
            network, catalog, settings, ceiling, prune=not args.exhaustive
        )
    except SearchSpaceError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        print("pass --force-full to enumerate anyway", file=sys.stderr)
        return EXIT_REFUSED

    lines = [
        f"network: {args.network}",
        f"designs_total: {space}",
        f"designs_evaluated: {outcome.n_enumerated}",
        f"designs_feasible: {outcome.n_feasible}",
        "",
    ]
    if outcome.best_dv is None:
        lines.append("no feasible design exists")
        body = "\n".join(lines) + "\n"
        exit_code = EXIT_INFEASIBLE_BEST
    else:
        evaluator = FitnessEvaluator(network, catalog, settings, args.npf, args.ppf)
        lines.append(render_design_block(network, catalog, evaluator.evaluate(outcome.best_dv)))
        body = "\n".join(lines) + "\n"
        exit_code = EXIT_OK

    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    print(body, end="")
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gapipes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--network", required=True,
                       help="dataset path or bundled name (e.g. gurudeniya.json)")
        p.add_argument("--npf", type=float, default=10_000.0,
                       help="nodal penalty factor, currency per metre of deficit")
        p.add_argument("--ppf", type=float, default=1_000_000.0,
                       help="pipe penalty factor, currency per (m/m) of excess")

    p_sim = sub.add_parser("simulate", help="evaluate one diameter assignment")
    add_common(p_sim)
    p_sim.add_argument("--diameters", required=True,
                       help="comma- or space-separated diameters in mm, one per pipe")
    p_sim.set_defaults(func=_cmd_simulate)

    p_opt = sub.add_parser("optimize", help="run the genetic algorithm")
    add_common(p_opt)
    p_opt.add_argument("--seed", type=int, default=0)
    p_opt.add_argument("--pop", type=int, default=20)
    p_opt.add_argument("--pc", type=float, default=0.8)
    p_opt.add_argument("--pm", type=float, default=0.05)
    p_opt.add_argument("--generations", type=int, default=5000)
    p_opt.add_argument("--out", help="write the run report to this path")
    p_opt.add_argument("--csv", help="write the per-generation convergence log here")
    p_opt.set_defaults(func=_cmd_optimize)

    p_bf = sub.add_parser("bruteforce", help="enumerate the design space")
    add_common(p_bf)
    p_bf.add_argument("--max-combinations", type=int, default=DEFAULT_MAX_COMBINATIONS)
    p_bf.add_argument("--force-full", action="store_true",
                      help="enumerate even when the space exceeds the ceiling")
    p_bf.add_argument("--exhaustive", action="store_true",
                      help="disable branch-and-bound pruning")
    p_bf.add_argument("--out", help="write the enumeration report to this path")
    p_bf.set_defaults(func=_cmd_bruteforce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except PipeDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
