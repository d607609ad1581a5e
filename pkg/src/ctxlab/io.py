"""JSON file formats: scenarios, behaviours, reports, polytope descriptions.

Rationals are written as ``"num/den"`` strings. Outcome tuples and contexts
become comma-joined keys (JSON keys must be strings), aligned with the
canonical measurement order.
"""

from __future__ import annotations

import json
from pathlib import Path

from .behaviour import (
    Behaviour,
    DegeneracyWitness,
    DisturbanceWitness,
    context_key,
    dimension,
    validate_behaviour,
    vector_index,
)
from .contextuality import (
    BehaviourExtension,
    ClassificationReport,
    ExtendedWitness,
    GlobalSection,
    InfeasibilityCertificate,
)
from .distributions import Distribution, diagonal_mass, format_rational
from .errors import ParseError
from .polytope import nc_vertices, nd_equalities, ndeg_equalities
from .scenario import ExtendedScenario, Scenario, validate_scenario


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


# -- scenarios -----------------------------------------------------------------


def scenario_to_dict(s: Scenario) -> dict:
    return s.to_dict()


def load_scenario(source) -> Scenario:
    """Scenario from a path or an already-decoded object."""
    raw = source if isinstance(source, dict) else read_json(source)
    return validate_scenario(raw)


# -- distributions and behaviours ---------------------------------------------


def distribution_to_dict(d: Distribution, dense: bool = False) -> dict:
    items = ((c, d[c]) for c in d.cells()) if dense else d.table.items()
    return {
        "coordinates": list(d.coordinates),
        "outcomes": list(d.outcomes),
        "table": {",".join(cell): format_rational(p) for cell, p in items},
    }


def distribution_from_dict(raw) -> Distribution:
    try:
        coords = [str(c) for c in raw["coordinates"]]
        outcomes = [str(o) for o in raw["outcomes"]]
        table = {tuple(k.split(",")): v for k, v in raw["table"].items()}
    except (KeyError, TypeError, AttributeError):
        raise ParseError("distribution needs 'coordinates', 'outcomes' and 'table'") from None
    return Distribution(coords, outcomes, table)


def behaviour_to_dict(b: Behaviour) -> dict:
    return {
        "scenario": scenario_to_dict(b.scenario),
        "tables": {
            context_key(ctx): {",".join(cell): format_rational(b[ctx][cell]) for cell in b[ctx].cells()}
            for ctx in b.scenario.contexts
        },
    }


def behaviour_from_dict(raw, base_dir=None) -> Behaviour:
    if not isinstance(raw, dict):
        raise ParseError("behaviour file must hold an object")
    if "scenario" not in raw or "tables" not in raw:
        raise ParseError("behaviour needs fields 'scenario' and 'tables'")
    source = raw["scenario"]
    if isinstance(source, str):
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        scenario = load_scenario(path)
    else:
        scenario = load_scenario(source)
    return validate_behaviour(scenario, raw["tables"])


def load_behaviour(path) -> Behaviour:
    path = Path(path)
    return behaviour_from_dict(read_json(path), base_dir=path.parent)


# -- reports -------------------------------------------------------------------


def _certificate_dict(cert: InfeasibilityCertificate) -> dict:
    return {
        "rows": list(cert.labels),
        "multipliers": [format_rational(y) for y in cert.multipliers],
    }


def _disturbance(w: DisturbanceWitness) -> dict:
    return {
        "contexts": [list(c) for c in w.contexts],
        "subset": list(w.subset),
        "lhs": distribution_to_dict(w.lhs, dense=True),
        "rhs": distribution_to_dict(w.rhs, dense=True),
    }


def _degeneracy(w: DegeneracyWitness) -> dict:
    return {
        "measurement": w.measurement,
        "contexts": [list(c) for c in w.contexts],
        "lhs": distribution_to_dict(w.lhs, dense=True),
        "rhs": distribution_to_dict(w.rhs, dense=True),
    }


def extended_scenario_to_dict(ext: ExtendedScenario) -> dict:
    return {
        "scenario": scenario_to_dict(ext.scenario),
        "copies": {
            f"{x}@{i}": {"measurement": x, "context": list(ext.base.contexts[i])}
            for x, i in ext.extended_measurements
        },
        "context_images": {context_key(c): list(img) for c, img in ext.context_images.items()},
        "connections": {x: list(m) for x, m in ext.connections.items()},
    }


def report_to_dict(report: ClassificationReport) -> dict:
    nd, ndeg, nc, ncext = report.nd, report.ndeg, report.nc, report.ncext
    out = {"scenario": scenario_to_dict(report.scenario), "verdicts": report.flags()}
    out["nd"] = {"holds": nd.holds, "witness": None if nd else _disturbance(nd.witness)}
    out["ndeg"] = {"holds": ndeg.holds, "witness": None if ndeg else _degeneracy(ndeg.witness)}
    if nc:
        section: GlobalSection = nc.witness
        out["nc"] = {"holds": True, "global_section": distribution_to_dict(section.distribution)}
    else:
        out["nc"] = {"holds": False, "certificate": _certificate_dict(nc.certificate)}
    if ncext:
        w: ExtendedWitness = ncext.witness
        out["ncext"] = {
            "holds": True,
            "witness": {
                "extension": extended_scenario_to_dict(w.extension),
                "distribution": distribution_to_dict(w.distribution),
                "connection_diagonal_mass": {
                    x: format_rational(diagonal_mass(w.connection_marginal(x)))
                    for x in w.extension.connections
                },
            },
        }
    else:
        out["ncext"] = {"holds": False, "certificate": _certificate_dict(ncext.certificate)}
    return out


def extension_to_dict(ext: ExtendedScenario, extension: BehaviourExtension | None) -> dict:
    return {
        "extended_scenario": extended_scenario_to_dict(ext),
        "extension": None if extension is None else behaviour_to_dict(extension.extended)["tables"],
    }


def polytope_to_dict(scenario: Scenario, size_cap=None) -> dict:
    def eq(e):
        return {
            "coefficients": [format_rational(a) for a in e.coefficients],
            "rhs": format_rational(e.rhs),
            "label": e.label,
        }

    return {
        "scenario": scenario_to_dict(scenario),
        "dimension": dimension(scenario),
        "index": [{"context": list(c), "outcome": list(s)} for c, s in vector_index(scenario)],
        "nd_equalities": [eq(e) for e in nd_equalities(scenario)],
        "ndeg_equalities": [eq(e) for e in ndeg_equalities(scenario)],
        "nc_vertices": [[format_rational(v) for v in vec] for vec in nc_vertices(scenario, size_cap)],
    }
