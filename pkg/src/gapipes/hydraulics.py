"""Steady-state hydraulic evaluation of a diameter assignment on a tree.

On a tree the pipe flows follow from continuity alone: each pipe carries the
total demand of the subtree hanging below it, independent of the diameters.
Head then propagates down from the reservoir, losing ``gradient × length``
per pipe, where the gradient comes from the adapted Hazen-Williams relation

    g_FF = c_ft · 10.666 · Q^1.85 / (c_hw^1.85 · d^4.87)

with Q in m³/s and d in m. Flows are handed around in m³/day and diameters
in mm (the units of the data files); this module does the conversion at the
formula boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import HydraulicDomainError, NetworkStructureError
from .network import (
    DesignVector,
    HydraulicSettings,
    Network,
    PipeCatalog,
    design_cost,
    validate_network,
)

#: Absolute slack applied when comparing a value against its constraint
#: bound, to absorb floating-point noise exactly at the boundary.
FEASIBILITY_SLACK = 1e-9

SECONDS_PER_DAY = 86_400.0


@dataclass(frozen=True)
class HydraulicResult:
    """Per-pipe and per-node outcome of one simulation.

    pipe_flow       m³/day, keyed by pipe id
    pipe_gradient   friction-and-fitting loss gradient, m/m
    pipe_headloss   gradient × length, m
    node_head       hydraulic grade line, m; includes the reservoir
    node_residual   head − elevation, m; demand nodes only
    pipe_feasible   gradient within the maximum, per pipe
    node_feasible   residual above the minimum, per demand node
    """

    pipe_flow: dict[str, float]
    pipe_gradient: dict[str, float]
    pipe_headloss: dict[str, float]
    node_head: dict[str, float]
    node_residual: dict[str, float]
    pipe_feasible: dict[str, bool]
    node_feasible: dict[str, bool]

    @cached_property
    def feasible(self) -> bool:
        return all(self.pipe_feasible.values()) and all(self.node_feasible.values())


def _require_valid(network: Network) -> None:
    violations = validate_network(network)
    if violations:
        raise NetworkStructureError(violations)


def compute_flows(network: Network) -> dict[str, float]:
    """Flow in every pipe (m³/day) from nodal continuity on the tree.

    The flow through a pipe equals the summed demand of all nodes in the
    subtree it feeds.
    """
    _require_valid(network)
    subtree = {node.id: node.demand for node in network.demand_nodes}
    # Accumulate leaf-to-root: reversed BFS order visits children first.
    for pipe in reversed(network.pipes_from_root):
        if pipe.from_node != network.reservoir:
            subtree[pipe.from_node] += subtree[pipe.to_node]
    return {pipe.id: subtree[pipe.to_node] for pipe in network.pipes}


def friction_gradient(flow: float, diameter: float, settings: HydraulicSettings) -> float:
    """Loss gradient (m/m) for a flow in m³/day through a diameter in mm.

    Pure and deterministic. Zero flow gives zero gradient. Tree flows are
    non-negative by construction, so negative flow is a caller bug.
    """
    if flow < 0:
        raise HydraulicDomainError(f"flow must be non-negative, got {flow}")
    if diameter <= 0:
        raise HydraulicDomainError(f"diameter must be positive, got {diameter}")
    q = flow / SECONDS_PER_DAY
    d = diameter / 1000.0
    return settings.c_ft * 10.666 * q**1.85 / (settings.c_hw**1.85 * d**4.87)


def simulate(
    network: Network,
    catalog: PipeCatalog,
    settings: HydraulicSettings,
    dv: DesignVector,
) -> HydraulicResult:
    """Evaluate one design: flows, gradients, heads, residuals, verdicts.

    Pure function of its inputs. Rejects any network that is not a valid
    tree; looped layouts can only be checked with
    :func:`loop_balance_residuals`.
    """
    design_cost(network, catalog, dv)  # raises InvalidDesignError on bad genes
    flows = compute_flows(network)

    gene_of = dict(zip((p.id for p in network.pipes), dv.genes))
    gradient: dict[str, float] = {}
    headloss: dict[str, float] = {}
    for pipe in network.pipes:
        d = catalog.entries[gene_of[pipe.id]].diameter
        g = friction_gradient(flows[pipe.id], d, settings)
        gradient[pipe.id] = g
        headloss[pipe.id] = g * pipe.length

    reservoir = network.node_by_id[network.reservoir]
    head: dict[str, float] = {reservoir.id: reservoir.elevation}
    for pipe in network.pipes_from_root:
        head[pipe.to_node] = head[pipe.from_node] - headloss[pipe.id]

    residual: dict[str, float] = {}
    node_ok: dict[str, bool] = {}
    for node in network.demand_nodes:
        r = head[node.id] - node.elevation
        residual[node.id] = r
        node_ok[node.id] = r >= settings.hr_min - FEASIBILITY_SLACK

    pipe_ok = {
        pid: g <= settings.gff_max + FEASIBILITY_SLACK for pid, g in gradient.items()
    }

    return HydraulicResult(
        pipe_flow=flows,
        pipe_gradient=gradient,
        pipe_headloss=headloss,
        node_head=head,
        node_residual=residual,
        pipe_feasible=pipe_ok,
        node_feasible=node_ok,
    )


def loop_balance_residuals(
    network: Network,
    loops: list[list[tuple[str, int]]],
    headlosses: dict[str, float],
) -> list[float]:
    """Signed head-loss sum around each supplied loop.

    The caller supplies the cycle basis as lists of (pipe id, orientation)
    pairs, orientation +1 when the pipe is traversed with its flow and -1
    against it, together with the per-pipe head losses. A hydraulically
    valid looped solution sums to ~0 around every loop. Tree networks have
    no loops, so an empty basis returns an empty list.
    """
    known = {pipe.id for pipe in network.pipes}
    residuals = []
    for loop in loops:
        total = 0.0
        for pipe_id, orientation in loop:
            if pipe_id not in known:
                raise KeyError(f"loop references unknown pipe {pipe_id!r}")
            if orientation not in (1, -1):
                raise ValueError(f"orientation must be +1 or -1, got {orientation!r}")
            total += orientation * headlosses[pipe_id]
        residuals.append(total)
    return residuals
