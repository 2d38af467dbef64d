"""Genetic algorithm for least-cost discrete pipe sizing.

One individual is a :class:`~gapipes.network.DesignVector`. Fitness is the
reciprocal penalized cost

    F = 100,000 / (NP + PP + Σ unit_cost(d_i) · L_i)

where NP charges the summed residual-head deficits at demand nodes and PP
the summed gradient excesses over the pipes, each scaled by a configurable
factor. The generation loop is: roulette reproduction proportional to F,
single-point crossover over consecutive mating-pool pairs, per-gene
mutation to a different catalog entry, then re-evaluation.

Randomness comes from one sequential ``random.Random`` (Mersenne Twister,
seeded from the config), and every draw for a generation happens before any
fitness evaluation is dispatched, so evaluation parallelism cannot perturb
the stream: a fixed seed reproduces the run bit for bit.

Two "best" notions are tracked across the whole run. ``best_by_fitness`` is
the highest-fitness individual ever observed (the lowest penalized cost).
``best_feasible`` is the cheapest individual with zero penalties. They can
genuinely differ: a hair-over-the-limit design saves more in pipe cost than
its penalty adds whenever the penalty factors are small relative to the
local cost gradient. The deliverable of a run, ``RunReport.best``, prefers
the feasible one whenever any feasible design was seen.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import InvalidDesignError
from .hydraulics import FEASIBILITY_SLACK, compute_flows, friction_gradient
from .network import DesignVector, HydraulicSettings, Network, PipeCatalog

#: Numerator of the reciprocal fitness.
FITNESS_NUMERATOR = 100_000.0


@dataclass(frozen=True)
class GaConfig:
    """Run parameters. Defaults replicate the benchmark run description."""

    population_size: int = 20
    crossover_probability: float = 0.8
    mutation_probability: float = 0.05
    max_generations: int = 5000
    rng_seed: int = 0
    nodal_penalty_factor: float = 10_000.0  # currency per metre of head deficit
    pipe_penalty_factor: float = 1_000_000.0  # currency per (m/m) of gradient excess

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and at least 2")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover_probability must be in [0, 1]")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation_probability must be in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if self.nodal_penalty_factor < 0 or self.pipe_penalty_factor < 0:
            raise ValueError("penalty factors must be non-negative")


@dataclass(frozen=True)
class EvaluatedIndividual:
    dv: DesignVector
    cost: float
    nodal_penalty: float
    pipe_penalty: float
    fitness: float
    feasible: bool

    @property
    def penalized_cost(self) -> float:
        return self.cost + self.nodal_penalty + self.pipe_penalty


@dataclass(frozen=True)
class GenerationRecord:
    """One convergence-log row: running global best after this generation."""

    generation: int
    best_cost: float  # lowest penalized cost observed so far
    best_fitness: float
    n_feasible: int  # feasible individuals in this generation's population


@dataclass(frozen=True)
class RunReport:
    best_by_fitness: EvaluatedIndividual
    best_feasible: EvaluatedIndividual | None
    history: tuple[GenerationRecord, ...]
    config: GaConfig
    elapsed_seconds: float = field(compare=False)

    @property
    def best(self) -> EvaluatedIndividual:
        """Global best: the cheapest feasible individual ever observed,
        falling back to the highest-fitness one when no feasible design was
        seen during the run."""
        return self.best_feasible if self.best_feasible is not None else self.best_by_fitness


class FitnessEvaluator:
    """Evaluates designs against one fixed network/catalog/settings triple.

    On a tree the flows do not depend on the diameters, so the gradient,
    head loss, and cost of every (pipe, catalog entry) pair can be computed
    once up front; evaluating a design is then a table walk. The table
    entries come from the exact same formula calls a one-off simulation
    makes, so both paths produce bit-identical numbers.
    """

    def __init__(
        self,
        network: Network,
        catalog: PipeCatalog,
        settings: HydraulicSettings,
        nodal_penalty_factor: float,
        pipe_penalty_factor: float,
    ):
        self.network = network
        self.catalog = catalog
        self.settings = settings
        self.npf = nodal_penalty_factor
        self.ppf = pipe_penalty_factor

        flows = compute_flows(network)  # validates the network
        self._n_pipes = len(network.pipes)
        self._n_entries = len(catalog.entries)
        self._cost = [
            [entry.unit_cost * pipe.length for entry in catalog.entries]
            for pipe in network.pipes
        ]
        self._gradient = [
            [
                friction_gradient(flows[pipe.id], entry.diameter, settings)
                for entry in catalog.entries
            ]
            for pipe in network.pipes
        ]
        self._headloss = [
            [g * pipe.length for g in per_pipe]
            for pipe, per_pipe in zip(network.pipes, self._gradient)
        ]

        # Head propagation plan: (pipe storage index, upstream slot, node slot)
        # in breadth-first order, plus the elevation/slot of every demand node.
        slot = {network.reservoir: 0}
        for node in network.demand_nodes:
            slot[node.id] = len(slot)
        index_of_pipe = {pipe.id: i for i, pipe in enumerate(network.pipes)}
        self._walk = [
            (index_of_pipe[pipe.id], slot[pipe.from_node], slot[pipe.to_node])
            for pipe in network.pipes_from_root
        ]
        self._source_head = network.node_by_id[network.reservoir].elevation
        self._demand_slots = [
            (slot[node.id], node.elevation) for node in network.demand_nodes
        ]

    def evaluate(self, dv: DesignVector) -> EvaluatedIndividual:
        genes = dv.genes
        if len(genes) != self._n_pipes:
            raise InvalidDesignError(
                f"design has {len(genes)} genes for {self._n_pipes} pipes"
            )
        gmax = self.settings.gff_max
        hmin = self.settings.hr_min

        cost = 0
        excess = 0.0
        for i, g in enumerate(genes):
            if not 0 <= g < self._n_entries:
                raise InvalidDesignError(
                    f"gene {g} at position {i} is outside the catalog range"
                )
            cost += self._cost[i][g]
            grad = self._gradient[i][g]
            if grad > gmax + FEASIBILITY_SLACK:
                excess += grad - gmax

        heads = [0.0] * (self._n_pipes + 1)
        heads[0] = self._source_head
        for pipe_i, up, down in self._walk:
            heads[down] = heads[up] - self._headloss[pipe_i][genes[pipe_i]]

        deficit = 0.0
        for node_slot, elevation in self._demand_slots:
            residual = heads[node_slot] - elevation
            if residual < hmin - FEASIBILITY_SLACK:
                deficit += hmin - residual

        nodal_penalty = self.npf * deficit
        pipe_penalty = self.ppf * excess
        fitness = FITNESS_NUMERATOR / (nodal_penalty + pipe_penalty + cost)
        return EvaluatedIndividual(
            dv=dv,
            cost=cost,
            nodal_penalty=nodal_penalty,
            pipe_penalty=pipe_penalty,
            fitness=fitness,
            # Raw deficits rather than the scaled penalties, so a zero
            # penalty factor cannot mislabel a violating design.
            feasible=deficit == 0.0 and excess == 0.0,
        )


def evaluate_fitness(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    dv: DesignVector,
    nodal_penalty_factor: float,
    pipe_penalty_factor: float,
) -> EvaluatedIndividual:
    """Simulate one design and fold the outcome into a penalized fitness."""
    evaluator = FitnessEvaluator(
        network, catalog, settings, nodal_penalty_factor, pipe_penalty_factor
    )
    return evaluator.evaluate(dv)


def selection_probabilities(fitnesses: list[float]) -> list[float]:
    """Roulette-wheel weights: each probability proportional to fitness."""
    if not fitnesses:
        raise ValueError("population is empty")
    if any(f <= 0 for f in fitnesses):
        raise ValueError("fitnesses must be strictly positive")
    total = sum(fitnesses)
    return [f / total for f in fitnesses]


def reproduce(population: list, probabilities: list[float], rng: random.Random) -> list:
    """Mating pool: len(population) independent draws with replacement."""
    if len(population) != len(probabilities):
        raise ValueError("population and probabilities differ in length")
    cumulative = []
    acc = 0.0
    for p in probabilities:
        acc += p
        cumulative.append(acc)
    last = len(population) - 1
    return [
        population[min(bisect_right(cumulative, rng.random()), last)]
        for _ in range(len(population))
    ]


def crossover(
    parent_a: DesignVector,
    parent_b: DesignVector,
    crossover_probability: float,
    rng: random.Random,
) -> tuple[DesignVector, DesignVector]:
    """Single-point crossover of two equal-length parents.

    With the configured probability a cut point is drawn uniformly from the
    interior positions and the tails are swapped; otherwise the children are
    verbatim copies. Single-gene parents have no interior, so they always
    copy through.
    """
    a, b = parent_a.genes, parent_b.genes
    if len(a) != len(b):
        raise ValueError(f"parent lengths differ: {len(a)} vs {len(b)}")
    if rng.random() < crossover_probability and len(a) > 1:
        cut = rng.randrange(1, len(a))
        return (
            DesignVector(a[:cut] + b[cut:]),
            DesignVector(b[:cut] + a[cut:]),
        )
    return DesignVector(a), DesignVector(b)


def mutate(
    dv: DesignVector,
    mutation_probability: float,
    catalog: PipeCatalog,
    rng: random.Random,
) -> DesignVector:
    """Independently replace each gene, with the configured probability,
    by a uniformly chosen *different* catalog index."""
    n_entries = len(catalog.entries)
    if n_entries < 2:
        raise ValueError("mutation needs a catalog with at least 2 entries")
    genes = list(dv.genes)
    for i, g in enumerate(genes):
        if rng.random() < mutation_probability:
            draw = rng.randrange(n_entries - 1)
            genes[i] = draw if draw < g else draw + 1
    return DesignVector(tuple(genes))


def _evaluate_all(
    evaluator: FitnessEvaluator,
    population: list[DesignVector],
    workers: int | None,
) -> list[EvaluatedIndividual]:
    # Evaluation is pure and consumes no randomness, so any dispatch order
    # yields the same ordered results.
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluator.evaluate, population))
    return [evaluator.evaluate(dv) for dv in population]


def run_ga(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    config: GaConfig,
    *,
    workers: int | None = None,
) -> RunReport:
    """Run the generation loop and report the global best.

    The initial population samples every gene uniformly over the catalog.
    Each generation applies reproduction, pairwise crossover over
    consecutive mating-pool pairs, and mutation, then re-evaluates. The
    population size never changes. Bit-reproducible for a fixed seed,
    including under any ``workers`` setting.
    """
    started = time.perf_counter()
    evaluator = FitnessEvaluator(
        network,
        catalog,
        settings,
        config.nodal_penalty_factor,
        config.pipe_penalty_factor,
    )
    rng = random.Random(config.rng_seed)
    n = config.population_size
    n_genes = len(network.pipes)
    n_entries = len(catalog.entries)

    population = [
        DesignVector(tuple(rng.randrange(n_entries) for _ in range(n_genes)))
        for _ in range(n)
    ]
    evaluated = _evaluate_all(evaluator, population, workers)

    best_by_fitness: EvaluatedIndividual | None = None
    best_feasible: EvaluatedIndividual | None = None

    def witness(batch: list[EvaluatedIndividual]) -> None:
        nonlocal best_by_fitness, best_feasible
        for ind in batch:
            if best_by_fitness is None or ind.fitness > best_by_fitness.fitness:
                best_by_fitness = ind
            if ind.feasible and (best_feasible is None or ind.cost < best_feasible.cost):
                best_feasible = ind

    witness(evaluated)
    history: list[GenerationRecord] = []

    for generation in range(1, config.max_generations + 1):
        probabilities = selection_probabilities([ind.fitness for ind in evaluated])
        pool = reproduce(population, probabilities, rng)
        offspring: list[DesignVector] = []
        for i in range(0, n, 2):
            child_a, child_b = crossover(
                pool[i], pool[i + 1], config.crossover_probability, rng
            )
            offspring.append(child_a)
            offspring.append(child_b)
        population = [
            mutate(child, config.mutation_probability, catalog, rng)
            for child in offspring
        ]
        evaluated = _evaluate_all(evaluator, population, workers)
        witness(evaluated)
        history.append(
            GenerationRecord(
                generation=generation,
                best_cost=best_by_fitness.penalized_cost,
                best_fitness=best_by_fitness.fitness,
                n_feasible=sum(ind.feasible for ind in evaluated),
            )
        )

    return RunReport(
        best_by_fitness=best_by_fitness,
        best_feasible=best_feasible,
        history=tuple(history),
        config=config,
        elapsed_seconds=time.perf_counter() - started,
    )


def convergence_csv(report: RunReport) -> str:
    """Render the per-generation log as CSV text."""
    lines = ["generation,best_cost,best_fitness,n_feasible"]
    for record in report.history:
        lines.append(
            f"{record.generation},{record.best_cost!r},"
            f"{record.best_fitness!r},{record.n_feasible}"
        )
    return "\n".join(lines) + "\n"
