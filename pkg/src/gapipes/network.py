"""Domain model for gravity-fed tree water distribution networks.

A network is a directed tree rooted at a single fixed-head reservoir. Every
other node draws a demand, every edge is a pipe with a known length, and a
design assigns each pipe one diameter from an ordered commercial catalog.
Demands are stored in m³/day and diameters in millimetres exactly as they
appear in benchmark data files; unit conversion happens inside the hydraulic
formulas, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidDesignError

#: Tolerance on the network-wide demand balance, m³/day.
DEMAND_BALANCE_TOL = 1e-6


@dataclass(frozen=True)
class Node:
    """A junction with a ground elevation (m) and a demand (m³/day).

    The reservoir carries the balancing negative demand; every other node
    draws a non-negative demand.
    """

    id: str
    elevation: float
    demand: float


@dataclass(frozen=True)
class Pipe:
    """A directed edge carrying flow from ``from_node`` to ``to_node``."""

    id: str
    from_node: str
    to_node: str
    length: float  # m


@dataclass(frozen=True)
class Network:
    """A directed tree of pipes rooted at the reservoir node.

    Construction is permissive: structural invariants are checked by
    :func:`validate_network`, which reports violations as data rather than
    raising, so that broken datasets can be diagnosed in full.
    """

    nodes: tuple[Node, ...]
    pipes: tuple[Pipe, ...]
    reservoir: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "pipes", tuple(self.pipes))

    @cached_property
    def node_by_id(self) -> dict[str, Node]:
        return {node.id: node for node in self.nodes}

    @cached_property
    def incoming_pipe(self) -> dict[str, Pipe]:
        """Map node id -> the unique pipe feeding it. Valid trees only."""
        return {pipe.to_node: pipe for pipe in self.pipes}

    @cached_property
    def outgoing_pipes(self) -> dict[str, tuple[Pipe, ...]]:
        out: dict[str, list[Pipe]] = {node.id: [] for node in self.nodes}
        for pipe in self.pipes:
            out[pipe.from_node].append(pipe)
        return {nid: tuple(pipes) for nid, pipes in out.items()}

    @cached_property
    def pipes_from_root(self) -> tuple[Pipe, ...]:
        """Pipes in breadth-first order from the reservoir.

        Walking this order guarantees the upstream node of each pipe has been
        visited before the pipe itself, which is what head propagation needs.
        """
        order: list[Pipe] = []
        frontier = [self.reservoir]
        while frontier:
            nid = frontier.pop(0)
            for pipe in self.outgoing_pipes.get(nid, ()):
                order.append(pipe)
                frontier.append(pipe.to_node)
        return tuple(order)

    @cached_property
    def demand_nodes(self) -> tuple[Node, ...]:
        return tuple(node for node in self.nodes if node.id != self.reservoir)


@dataclass(frozen=True)
class CatalogEntry:
    diameter: float  # mm
    unit_cost: float  # currency per metre


@dataclass(frozen=True)
class PipeCatalog:
    """Ordered list of commercially available diameters and unit costs.

    Diameters and unit costs must both be strictly increasing; violating
    either breaks the cost-monotonicity the optimizer relies on, so the
    constructor rejects such catalogs outright.
    """

    entries: tuple[CatalogEntry, ...]

    def __post_init__(self):
        entries = tuple(
            e if isinstance(e, CatalogEntry) else CatalogEntry(*e) for e in self.entries
        )
        object.__setattr__(self, "entries", entries)
        if len(entries) < 2:
            raise ValueError("catalog needs at least 2 entries")
        for prev, cur in zip(entries, entries[1:]):
            if not cur.diameter > prev.diameter:
                raise ValueError("catalog diameters must be strictly increasing")
            if not cur.unit_cost > prev.unit_cost:
                raise ValueError("catalog unit costs must be strictly increasing")

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def diameters(self) -> tuple[float, ...]:
        return tuple(e.diameter for e in self.entries)

    def index_of_diameter(self, diameter: float) -> int:
        """Catalog index of an exact diameter value (mm)."""
        try:
            return self.diameters.index(diameter)
        except ValueError:
            raise InvalidDesignError(
                f"diameter {diameter} mm is not in the catalog {self.diameters}"
            ) from None


@dataclass(frozen=True)
class HydraulicSettings:
    """Coefficients and limits shared by every pipe and node.

    c_hw      Hazen-Williams smoothness coefficient (dimensionless)
    c_ft      fitting-loss multiplier folded into the friction gradient
    hr_min    minimum residual head required at every demand node, m
    gff_max   maximum allowed friction-and-fitting loss gradient, m/m
    """

    c_hw: float
    c_ft: float
    hr_min: float
    gff_max: float

    def __post_init__(self):
        for name in ("c_hw", "c_ft", "hr_min", "gff_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class DesignVector:
    """One genome: a catalog index per pipe, in pipe storage order."""

    genes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "genes", tuple(int(g) for g in self.genes))

    def __len__(self) -> int:
        return len(self.genes)

    @classmethod
    def from_diameters(cls, catalog: PipeCatalog, diameters: list[float]) -> "DesignVector":
        return cls(tuple(catalog.index_of_diameter(d) for d in diameters))

    def diameters(self, catalog: PipeCatalog) -> tuple[float, ...]:
        return tuple(catalog.entries[g].diameter for g in self.genes)


def validate_network(network: Network) -> list[str]:
    """Check every structural invariant and return the violations found.

    An empty list means the network is a demand-balanced tree rooted at the
    reservoir. Violations are data, not errors: all of them are reported in
    one pass.
    """
    violations: list[str] = []

    node_ids: set[str] = set()
    for node in network.nodes:
        if node.id in node_ids:
            violations.append(f"duplicate node id {node.id!r}")
        node_ids.add(node.id)
        if not math.isfinite(node.elevation) or node.elevation < 0:
            violations.append(f"node {node.id} elevation must be finite and non-negative")
        if not math.isfinite(node.demand):
            violations.append(f"node {node.id} demand must be finite")

    if network.reservoir not in node_ids:
        violations.append(f"reservoir {network.reservoir!r} is not a node")
        return violations

    pipe_ids: set[str] = set()
    incoming: dict[str, list[str]] = {nid: [] for nid in node_ids}
    adjacency: dict[str, list[str]] = {nid: [] for nid in node_ids}
    for pipe in network.pipes:
        if pipe.id in pipe_ids:
            violations.append(f"duplicate pipe id {pipe.id!r}")
        pipe_ids.add(pipe.id)
        if not math.isfinite(pipe.length) or pipe.length <= 0:
            violations.append(f"pipe {pipe.id} length must be finite and positive")
        if pipe.from_node == pipe.to_node:
            violations.append(f"pipe {pipe.id} connects {pipe.from_node} to itself")
        bad_endpoint = False
        for endpoint in (pipe.from_node, pipe.to_node):
            if endpoint not in node_ids:
                violations.append(f"pipe {pipe.id} references unknown node {endpoint!r}")
                bad_endpoint = True
        if bad_endpoint:
            continue
        incoming[pipe.to_node].append(pipe.id)
        adjacency[pipe.from_node].append(pipe.to_node)

    for node in network.nodes:
        if node.id == network.reservoir:
            if node.demand > 0:
                violations.append(f"reservoir {node.id} demand must not be positive")
            if incoming[node.id]:
                violations.append(f"reservoir {node.id} has an incoming pipe")
        else:
            if node.demand < 0:
                violations.append(
                    f"node {node.id} has negative demand but is not the reservoir"
                )
            n_in = len(incoming[node.id])
            if n_in == 0:
                violations.append(f"node {node.id} has no incoming pipe")
            elif n_in > 1:
                violations.append(f"node {node.id} has {n_in} incoming pipes")

    # Reachability from the reservoir; with the in-degree checks above this
    # is what separates a tree from a forest with detached cycles.
    seen = {network.reservoir}
    frontier = [network.reservoir]
    while frontier:
        nid = frontier.pop()
        for child in adjacency.get(nid, ()):
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    for node in network.nodes:
        if node.id not in seen:
            violations.append(f"node {node.id} is unreachable from the reservoir")

    balance = sum(node.demand for node in network.nodes)
    if abs(balance) > DEMAND_BALANCE_TOL:
        violations.append(f"demands sum to {balance!r} m³/day, expected 0")

    return violations


def design_cost(network: Network, catalog: PipeCatalog, dv: DesignVector):
    """Total cost of a design: sum over pipes of unit_cost(diameter) × length.

    Exact; no rounding. Integer inputs yield an integer total.
    """
    if len(dv.genes) != len(network.pipes):
        raise InvalidDesignError(
            f"design has {len(dv.genes)} genes for {len(network.pipes)} pipes"
        )
    total = 0
    for pipe, gene in zip(network.pipes, dv.genes):
        if not 0 <= gene < len(catalog.entries):
            raise InvalidDesignError(
                f"gene {gene} for pipe {pipe.id} is outside the catalog range "
                f"0..{len(catalog.entries) - 1}"
            )
        total += catalog.entries[gene].unit_cost * pipe.length
    return total
