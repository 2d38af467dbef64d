"""Independent ground truth for optimizer validation.

Exhaustive enumeration is the reference answer for small design spaces; the
pruned mode gives the same (best cost, best design) with two sound cuts:

* a branch-and-bound bound on prefix cost: a partial assignment whose cost
  plus the cheapest possible completion already meets the incumbent cannot
  improve on it;
* per-pipe gradient minima: tree flows are independent of the diameters,
  so any gene whose loss gradient exceeds the cap dooms every completion.

Ties in cost resolve to the lexicographically smallest gene tuple in both
modes because enumeration is lexicographic and only strict improvements
replace the incumbent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import SearchSpaceError
from .ga import FitnessEvaluator
from .hydraulics import FEASIBILITY_SLACK, compute_flows, friction_gradient
from .network import DesignVector, HydraulicSettings, Network, PipeCatalog

DEFAULT_MAX_COMBINATIONS = 10_000_000


@dataclass(frozen=True)
class EnumerationResult:
    """Outcome of a full search. ``best_dv`` is None when nothing is feasible.

    ``n_enumerated`` counts the complete designs actually evaluated, which
    under pruning is less than the size of the design space.
    """

    best_dv: DesignVector | None
    best_cost: float | None
    n_enumerated: int
    n_feasible: int


@dataclass(frozen=True)
class NeighborAudit:
    """One single-gene substitution of an audited design."""

    dv: DesignVector
    cost: float
    feasible: bool
    improves: bool  # feasible and strictly cheaper than the audited design


def brute_force(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    max_combinations: int = DEFAULT_MAX_COMBINATIONS,
    *,
    prune: bool = True,
) -> EnumerationResult:
    """Cheapest feasible design by enumeration over the whole catalog lattice.

    Refuses outright when ``catalog_size ** pipe_count`` exceeds
    ``max_combinations``. Finding no feasible design is an answer, not an
    error: the result reports ``n_feasible == 0``.
    """
    n_pipes = len(network.pipes)
    n_entries = len(catalog.entries)
    space = n_entries**n_pipes
    if space > max_combinations:
        raise SearchSpaceError(
            f"{n_entries}^{n_pipes} = {space} designs exceed the ceiling of "
            f"{max_combinations}; raise max_combinations to run anyway"
        )
    evaluator = FitnessEvaluator(network, catalog, settings, 1.0, 1.0)
    if prune:
        return _enumerate_pruned(network, catalog, settings, evaluator)
    return _enumerate_exhaustive(n_pipes, n_entries, evaluator)


def _enumerate_exhaustive(
    n_pipes: int, n_entries: int, evaluator: FitnessEvaluator
) -> EnumerationResult:
    best = None
    n_feasible = 0
    n_enumerated = 0
    for genes in itertools.product(range(n_entries), repeat=n_pipes):
        n_enumerated += 1
        candidate = evaluator.evaluate(DesignVector(genes))
        if candidate.feasible:
            n_feasible += 1
            if best is None or candidate.cost < best.cost:
                best = candidate
    if best is None:
        return EnumerationResult(None, None, n_enumerated, 0)
    return EnumerationResult(best.dv, best.cost, n_enumerated, n_feasible)


def _enumerate_pruned(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    evaluator: FitnessEvaluator,
) -> EnumerationResult:
    flows = compute_flows(network)
    cap = settings.gff_max + FEASIBILITY_SLACK

    # Smallest gradient-feasible gene per pipe; gradients fall with diameter,
    # so everything below is infeasible and everything above is allowed.
    min_gene: list[int] = []
    for pipe in network.pipes:
        flow = flows[pipe.id]
        feasible_genes = [
            k
            for k, entry in enumerate(catalog.entries)
            if friction_gradient(flow, entry.diameter, settings) <= cap
        ]
        if not feasible_genes:
            return EnumerationResult(None, None, 0, 0)
        min_gene.append(feasible_genes[0])

    cost_table = [
        [entry.unit_cost * pipe.length for entry in catalog.entries]
        for pipe in network.pipes
    ]
    n_pipes = len(network.pipes)
    # Cheapest possible completion from pipe i onward, over allowed genes.
    min_rest = [0.0] * (n_pipes + 1)
    for i in range(n_pipes - 1, -1, -1):
        min_rest[i] = min_rest[i + 1] + cost_table[i][min_gene[i]]

    best: list = [None]
    counters = [0, 0]  # enumerated, feasible
    genes = [0] * n_pipes

    def descend(i: int, prefix_cost: float) -> None:
        if best[0] is not None and prefix_cost + min_rest[i] >= best[0].cost:
            return
        if i == n_pipes:
            counters[0] += 1
            candidate = evaluator.evaluate(DesignVector(tuple(genes)))
            if candidate.feasible:
                counters[1] += 1
                if best[0] is None or candidate.cost < best[0].cost:
                    best[0] = candidate
            return
        for k in range(min_gene[i], len(catalog.entries)):
            genes[i] = k
            descend(i + 1, prefix_cost + cost_table[i][k])

    descend(0, 0.0)
    if best[0] is None:
        return EnumerationResult(None, None, counters[0], counters[1])
    return EnumerationResult(best[0].dv, best[0].cost, counters[0], counters[1])


def neighborhood_audit(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    dv: DesignVector,
) -> list[NeighborAudit]:
    """Evaluate every single-gene substitution of a design.

    Returns pipe_count × (catalog_size − 1) entries in deterministic order
    (pipes in storage order, genes ascending). An entry with ``improves``
    set is a feasible neighbor strictly cheaper than the audited design,
    which is direct evidence against the design's local optimality.
    """
    evaluator = FitnessEvaluator(network, catalog, settings, 1.0, 1.0)
    base_cost = evaluator.evaluate(dv).cost
    audits: list[NeighborAudit] = []
    for position, gene in enumerate(dv.genes):
        for replacement in range(len(catalog.entries)):
            if replacement == gene:
                continue
            neighbor_genes = list(dv.genes)
            neighbor_genes[position] = replacement
            neighbor = evaluator.evaluate(DesignVector(tuple(neighbor_genes)))
            audits.append(
                NeighborAudit(
                    dv=neighbor.dv,
                    cost=neighbor.cost,
                    feasible=neighbor.feasible,
                    improves=neighbor.feasible and neighbor.cost < base_cost,
                )
            )
    return audits
