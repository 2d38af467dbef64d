"""Least-cost discrete pipe sizing for gravity-fed tree water networks.

The package pairs a steady-state hydraulic model (continuity flows plus an
adapted Hazen-Williams loss gradient) with a penalty-driven genetic
algorithm, an independent enumeration oracle, and a command-line front end.
It ships the Gurudeniya Service Zone benchmark dataset and reproduces its
published cost and constraint tables.
"""

from .errors import (
    DatasetFormatError,
    HydraulicDomainError,
    InvalidDesignError,
    NetworkStructureError,
    PipeDesignError,
    SearchSpaceError,
)
from .network import (
    CatalogEntry,
    DesignVector,
    HydraulicSettings,
    Network,
    Node,
    Pipe,
    PipeCatalog,
    design_cost,
    validate_network,
)
from .hydraulics import (
    FEASIBILITY_SLACK,
    HydraulicResult,
    compute_flows,
    friction_gradient,
    loop_balance_residuals,
    simulate,
)
from .ga import (
    EvaluatedIndividual,
    FitnessEvaluator,
    GaConfig,
    GenerationRecord,
    RunReport,
    convergence_csv,
    crossover,
    evaluate_fitness,
    mutate,
    reproduce,
    run_ga,
    selection_probabilities,
)
from .oracle import (
    EnumerationResult,
    NeighborAudit,
    brute_force,
    neighborhood_audit,
)
from . import datafiles

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry",
    "DatasetFormatError",
    "DesignVector",
    "EnumerationResult",
    "EvaluatedIndividual",
    "FEASIBILITY_SLACK",
    "FitnessEvaluator",
    "GaConfig",
    "GenerationRecord",
    "HydraulicDomainError",
    "HydraulicResult",
    "HydraulicSettings",
    "InvalidDesignError",
    "NeighborAudit",
    "Network",
    "NetworkStructureError",
    "Node",
    "Pipe",
    "PipeCatalog",
    "PipeDesignError",
    "RunReport",
    "SearchSpaceError",
    "brute_force",
    "compute_flows",
    "convergence_csv",
    "crossover",
    "datafiles",
    "design_cost",
    "evaluate_fitness",
    "friction_gradient",
    "loop_balance_residuals",
    "mutate",
    "neighborhood_audit",
    "reproduce",
    "run_ga",
    "selection_probabilities",
    "simulate",
    "validate_network",
]
