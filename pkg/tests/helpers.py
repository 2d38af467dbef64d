"""Shared builders and independent oracles used across the test suite."""

from __future__ import annotations

import random
from decimal import Decimal, getcontext

from gapipes import (
    CatalogEntry,
    HydraulicSettings,
    Network,
    Node,
    Pipe,
    PipeCatalog,
)

# Published benchmark solutions (diameters in mm, pipe order P1..P10).
GA_DIAMETERS = [203.2, 203.2, 203.2, 203.2, 152.4, 152.4, 152.4, 152.4, 101.6, 50.8]
HBMO_DIAMETERS = [254.0, 203.2, 203.2, 203.2, 152.4, 101.6, 101.6, 76.2, 101.6, 50.8]
NWSDB_DIAMETERS = [254.0, 203.2, 203.2, 152.4, 203.2, 101.6, 101.6, 76.2, 76.2, 76.2]

# Published constraint-table reference values for the best (GA) design:
# per-pipe loss gradients (m/m, 4 decimals) and per-node residual heads (m).
REFERENCE_GRADIENTS = {
    "P1": 0.0042,
    "P2": 0.0019,
    "P3": 0.0016,
    "P4": 0.0013,
    "P5": 0.0042,
    "P6": 0.0025,
    "P7": 0.0018,
    "P8": 0.0010,
    "P9": 0.0024,
    "P10": 0.0018,
}
REFERENCE_RESIDUALS = {
    "N1": 100.1171,
    "N2": 33.0224,
    "N3": 30.8328,
    "N4": 14.4703,
    "N5": 56.8433,
    "N6": 65.1481,
    "N7": 69.3995,
    "N8": 59.1601,
    "N9": 82.4587,
    "N10": 62.6765,
}


def chain_network(
    elevations: list[float],
    demands: list[float],
    lengths: list[float],
    reservoir_demand: float | None = None,
) -> Network:
    """Chain R -> C1 -> C2 -> ... with one pipe per demand node."""
    supply = -sum(demands) if reservoir_demand is None else reservoir_demand
    nodes = [Node("R", elevations[0], supply)]
    nodes += [
        Node(f"C{i + 1}", elev, dem)
        for i, (elev, dem) in enumerate(zip(elevations[1:], demands))
    ]
    pipes = [
        Pipe(f"L{i + 1}", nodes[i].id, nodes[i + 1].id, length)
        for i, length in enumerate(lengths)
    ]
    return Network(tuple(nodes), tuple(pipes), "R")


def small_catalog(*pairs) -> PipeCatalog:
    return PipeCatalog(tuple(CatalogEntry(d, c) for d, c in pairs))


def decimal_gradient(flow_m3_day, diameter_mm, c_hw, c_ft) -> Decimal:
    """Arbitrary-precision evaluation of the loss-gradient formula.

    Independent of the float implementation: decimal arithmetic at 50
    significant digits, with the non-integer powers done by decimal
    ``exp(y * ln(x))``.
    """
    getcontext().prec = 50
    q = Decimal(str(flow_m3_day)) / Decimal(86400)
    d = Decimal(str(diameter_mm)) / Decimal(1000)

    def dpow(base: Decimal, exponent: str) -> Decimal:
        return (Decimal(exponent) * base.ln()).exp()

    return (
        Decimal(str(c_ft))
        * Decimal("10.666")
        * dpow(q, "1.85")
        / (dpow(Decimal(str(c_hw)), "1.85") * dpow(d, "4.87"))
    )


# Diameter pool the random instances draw from (mm).
_DIAMETER_POOL = [25.4, 50.8, 76.2, 101.6, 152.4, 203.2, 254.0, 304.8]


def random_tree_instance(
    rng: random.Random,
    max_pipes: int = 5,
    max_entries: int = 4,
) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    """A random rooted tree with a random catalog and settings.

    Elevations drop away from the reservoir and the largest diameter is
    generous, so most instances have feasible designs; callers that need a
    guaranteed feasible optimum should still check.
    """
    n_pipes = rng.randint(1, max_pipes)
    elevations = [rng.uniform(80.0, 120.0)]
    parents = []
    for i in range(n_pipes):
        parent = rng.randrange(i + 1)  # 0 is the reservoir
        parents.append(parent)
        elevations.append(max(elevations[parent] - rng.uniform(2.0, 15.0), 1.0))

    demands = [round(rng.uniform(20.0, 300.0), 2) for _ in range(n_pipes)]
    nodes = [Node("R", elevations[0], -sum(demands))]
    nodes += [
        Node(f"J{i + 1}", elevations[i + 1], demands[i]) for i in range(n_pipes)
    ]
    pipes = [
        Pipe(
            f"E{i + 1}",
            nodes[parents[i]].id,
            nodes[i + 1].id,
            round(rng.uniform(50.0, 400.0), 1),
        )
        for i in range(n_pipes)
    ]
    network = Network(tuple(nodes), tuple(pipes), "R")

    n_entries = rng.randint(2, max_entries)
    start = rng.randrange(len(_DIAMETER_POOL) - n_entries + 1)
    diameters = _DIAMETER_POOL[start : start + n_entries]
    cost = rng.randint(1, 4)
    entries = []
    for d in diameters:
        entries.append(CatalogEntry(d, cost))
        cost += rng.randint(1, 9)
    catalog = PipeCatalog(tuple(entries))

    settings = HydraulicSettings(
        c_hw=130.0,
        c_ft=1.15,
        hr_min=rng.uniform(2.0, 6.0),
        gff_max=rng.choice([0.003, 0.005, 0.01, 0.02]),
    )
    return network, catalog, settings
