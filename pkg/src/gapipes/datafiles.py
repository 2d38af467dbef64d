"""Network dataset files: JSON schema, parsing, and the bundled benchmarks.

A dataset is one JSON document:

    {
      "nodes":     [{"id", "elevation_m", "demand_m3_per_day"}, ...],
      "pipes":     [{"id", "from", "to", "length_m"}, ...],
      "reservoir": "<node id>",
      "catalog":   [{"diameter_mm", "unit_cost"}, ...],
      "settings":  {"c_hw", "c_ft", "hr_min_m", "gff_max_m_per_m"}
    }

An optional top-level "description" string is allowed and ignored by the
parser. The package ships the Gurudeniya benchmark zone in two flavours and
a three-pipe toy network used by the command-line examples.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import DatasetFormatError
from .network import (
    CatalogEntry,
    HydraulicSettings,
    Network,
    Node,
    Pipe,
    PipeCatalog,
)

#: Gurudeniya zone exactly as published: demand table, pipe table, catalog.
GURUDENIYA = "gurudeniya.json"
#: Same zone with the demand set under which the published per-pipe and
#: per-node hydraulic reference tables reproduce to four decimals (node N9
#: drawing 233.76 m³/day instead of the printed 333.76; see README).
GURUDENIYA_AS_SIMULATED = "gurudeniya_as_simulated.json"
#: Three-pipe chain small enough to enumerate by hand.
TOY3 = "toy3.json"
#: Golden enumeration answer for the toy chain.
TOY3_OPTIMUM = "toy3_optimum.json"

BUNDLED = (GURUDENIYA, GURUDENIYA_AS_SIMULATED, TOY3)
_BUNDLED_FILES = BUNDLED + (TOY3_OPTIMUM,)


def _number(doc: dict, key: str, where: str) -> float:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetFormatError(f"{where}: {key!r} must be a number, got {value!r}")
    return value


def _string(doc: dict, key: str, where: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str) or not value:
        raise DatasetFormatError(f"{where}: {key!r} must be a non-empty string")
    return value


def _array(doc: dict, key: str) -> list:
    value = doc.get(key)
    if not isinstance(value, list):
        raise DatasetFormatError(f"top-level {key!r} must be an array")
    return value


def parse_network_document(doc: dict) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    """Build the domain objects from a decoded dataset document."""
    if not isinstance(doc, dict):
        raise DatasetFormatError("dataset root must be an object")

    nodes = []
    for i, item in enumerate(_array(doc, "nodes")):
        where = f"nodes[{i}]"
        if not isinstance(item, dict):
            raise DatasetFormatError(f"{where} must be an object")
        nodes.append(
            Node(
                id=_string(item, "id", where),
                elevation=_number(item, "elevation_m", where),
                demand=_number(item, "demand_m3_per_day", where),
            )
        )

    pipes = []
    for i, item in enumerate(_array(doc, "pipes")):
        where = f"pipes[{i}]"
        if not isinstance(item, dict):
            raise DatasetFormatError(f"{where} must be an object")
        pipes.append(
            Pipe(
                id=_string(item, "id", where),
                from_node=_string(item, "from", where),
                to_node=_string(item, "to", where),
                length=_number(item, "length_m", where),
            )
        )

    if "reservoir" not in doc:
        raise DatasetFormatError("top-level 'reservoir' is required")
    reservoir = _string(doc, "reservoir", "top level")

    entries = []
    for i, item in enumerate(_array(doc, "catalog")):
        where = f"catalog[{i}]"
        if not isinstance(item, dict):
            raise DatasetFormatError(f"{where} must be an object")
        entries.append(
            CatalogEntry(
                diameter=_number(item, "diameter_mm", where),
                unit_cost=_number(item, "unit_cost", where),
            )
        )

    settings_doc = doc.get("settings")
    if not isinstance(settings_doc, dict):
        raise DatasetFormatError("top-level 'settings' must be an object")

    try:
        catalog = PipeCatalog(tuple(entries))
        settings = HydraulicSettings(
            c_hw=_number(settings_doc, "c_hw", "settings"),
            c_ft=_number(settings_doc, "c_ft", "settings"),
            hr_min=_number(settings_doc, "hr_min_m", "settings"),
            gff_max=_number(settings_doc, "gff_max_m_per_m", "settings"),
        )
    except ValueError as exc:
        raise DatasetFormatError(str(exc)) from exc

    return Network(tuple(nodes), tuple(pipes), reservoir), catalog, settings


def parse_network_text(text: str) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_network_document(doc)


def load_network_file(path) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    return parse_network_text(Path(path).read_text(encoding="utf-8"))


def network_document(
    network: Network, catalog: PipeCatalog, settings: HydraulicSettings
) -> dict:
    """Inverse of :func:`parse_network_document`, for round-trips."""
    return {
        "nodes": [
            {"id": n.id, "elevation_m": n.elevation, "demand_m3_per_day": n.demand}
            for n in network.nodes
        ],
        "pipes": [
            {"id": p.id, "from": p.from_node, "to": p.to_node, "length_m": p.length}
            for p in network.pipes
        ],
        "reservoir": network.reservoir,
        "catalog": [
            {"diameter_mm": e.diameter, "unit_cost": e.unit_cost}
            for e in catalog.entries
        ],
        "settings": {
            "c_hw": settings.c_hw,
            "c_ft": settings.c_ft,
            "hr_min_m": settings.hr_min,
            "gff_max_m_per_m": settings.gff_max,
        },
    }


def bundled_text(name: str) -> str:
    if name not in _BUNDLED_FILES:
        raise DatasetFormatError(f"no bundled dataset named {name!r}")
    return resources.files("gapipes").joinpath("data", name).read_text(encoding="utf-8")


def load_bundled(name: str) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    return parse_network_text(bundled_text(name))


def resolve_dataset(name_or_path: str) -> tuple[Network, PipeCatalog, HydraulicSettings]:
    """Load a dataset from a filesystem path, falling back to bundled names."""
    path = Path(name_or_path)
    if path.exists():
        return load_network_file(path)
    if name_or_path in BUNDLED:
        return load_bundled(name_or_path)
    raise DatasetFormatError(f"dataset not found: {name_or_path}")
