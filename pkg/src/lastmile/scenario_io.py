"""Scenario JSON files: validation, parsing and serialisation."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import jsonschema

from .errors import SchemaError
from .graph import RoadGraph, validate_graph
from .model import (
    AnomalyPolicy,
    Centroid,
    DemandModel,
    DistributionCenter,
    ScenarioSpec,
    SimConfig,
    VanAgent,
)

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int = {"type": "integer"}
_nonneg_int = {"type": "integer", "minimum": 0}


def _obj(props: dict, required: list[str]) -> dict:
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


SCHEMA = _obj(
    {
        "graph": _obj(
            {
                "nodes": {
                    "type": "array",
                    "items": _obj({"id": _nonneg_int, "x": _num, "y": _num}, ["id"]),
                },
                "edges": {
                    "type": "array",
                    "items": _obj({"from": _nonneg_int, "to": _nonneg_int, "weight": _num}, ["from", "to", "weight"]),
                },
                "directed": {"type": "boolean"},
                "minutes_per_km": _pos,
            },
            ["nodes", "edges"],
        ),
        "dc": _obj({"node": _nonneg_int}, ["node"]),
        "centroids": {
            "type": "array",
            "minItems": 1,
            "items": _obj({"id": _int, "node": _nonneg_int, "label": {"type": "string"}}, ["id", "node"]),
        },
        "vans": {
            "type": "array",
            "minItems": 1,
            "items": _obj(
                {
                    "id": _int,
                    "capacity": {"type": "integer", "minimum": 1},
                    "shift_minutes": _pos,
                    "fixed_cost": _pos,
                    "variable_cost": _pos,
                    "service_time": {"type": "number", "minimum": 0},
                },
                ["id", "capacity", "shift_minutes", "fixed_cost", "variable_cost"],
            ),
        },
        "demand": _obj(
            {
                "mean_daily": {"type": "number", "minimum": 0},
                "pickup_probability": {"type": "number", "minimum": 0, "maximum": 1},
                "seed": _int,
                "destination_weights": {
                    "type": "array",
                    "items": _obj({"node": _nonneg_int, "weight": {"type": "number", "minimum": 0}}, ["node", "weight"]),
                },
                "daily_counts": {"type": "array", "items": _nonneg_int},
            },
            ["mean_daily", "seed"],
        ),
        "sim": _obj(
            {
                "horizon_days": {"type": "integer", "minimum": 1},
                "lambda_terminal": {"type": "number", "minimum": 0},
                "success_probability": {"type": "number", "minimum": 0, "maximum": 1},
                "emission_g_per_km": {"type": "number", "minimum": 0},
                "centroid_capacity": {"type": ["integer", "null"], "minimum": 1},
                "early_service": {"type": "boolean"},
                "anomaly": _obj(
                    {
                        "surge_factor": {"type": "number", "exclusiveMinimum": 1},
                        "window_days": {"type": "integer", "minimum": 1},
                        "sustained_factor": {"type": "number", "exclusiveMinimum": 1},
                        "max_vans": {"type": "integer", "minimum": 1},
                    },
                    [],
                ),
            },
            [],
        ),
    },
    ["graph", "dc", "centroids", "vans", "demand"],
)


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_document(doc: Any) -> list[tuple[str, str]]:
    """Structural and referential problems in a scenario document, as (json path, message)."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    violations = [(_json_path(e.absolute_path), e.message) for e in errors]
    if violations:
        return violations

    g = doc["graph"]
    n = len(g["nodes"])
    ids = [node["id"] for node in g["nodes"]]
    if sorted(ids) != list(range(n)):
        violations.append(("$.graph.nodes", f"node ids must be exactly 0..{n - 1}"))
    with_xy = [("x" in node) and ("y" in node) for node in g["nodes"]]
    partial = [i for i, node in enumerate(g["nodes"]) if ("x" in node) != ("y" in node)]
    for i in partial:
        violations.append((f"$.graph.nodes[{i}]", "x and y must be given together"))
    if any(with_xy) and not all(with_xy):
        violations.append(("$.graph.nodes", "either every node or no node has coordinates"))
    for i, e in enumerate(g["edges"]):
        for key in ("from", "to"):
            if e[key] >= n:
                violations.append((f"$.graph.edges[{i}].{key}", f"edge {i} references missing node {e[key]}"))
        if e["from"] == e["to"]:
            violations.append((f"$.graph.edges[{i}]", f"edge {i} is a self-loop"))
        if e["weight"] < 0:
            violations.append((f"$.graph.edges[{i}].weight", f"edge {i} has negative weight"))

    def node_ref(path: str, node: int):
        if node >= n:
            violations.append((path, f"references missing node {node}"))

    node_ref("$.dc.node", doc["dc"]["node"])
    seen = set()
    for i, c in enumerate(doc["centroids"]):
        node_ref(f"$.centroids[{i}].node", c["node"])
        if c["id"] in seen:
            violations.append((f"$.centroids[{i}].id", f"duplicate centroid id {c['id']}"))
        seen.add(c["id"])
    seen = set()
    for i, v in enumerate(doc["vans"]):
        if v["id"] in seen:
            violations.append((f"$.vans[{i}].id", f"duplicate van id {v['id']}"))
        seen.add(v["id"])
    weights = doc["demand"].get("destination_weights")
    if weights is not None:
        for i, w in enumerate(weights):
            node_ref(f"$.demand.destination_weights[{i}].node", w["node"])
        if weights and sum(w["weight"] for w in weights) <= 0:
            violations.append(("$.demand.destination_weights", "weights must not all be zero"))
    return violations


def scenario_from_dict(doc: Any) -> ScenarioSpec:
    violations = validate_document(doc)
    if violations:
        raise SchemaError(violations)
    g = doc["graph"]
    nodes = sorted(g["nodes"], key=lambda node: node["id"])
    positions = [(node["x"], node["y"]) for node in nodes] if nodes and "x" in nodes[0] else None
    edges = [(e["from"], e["to"], e["weight"]) for e in g["edges"]]
    mpk = g.get("minutes_per_km", 2.0)
    if g.get("directed", True):
        graph = RoadGraph(len(nodes), tuple(edges), None if positions is None else tuple(positions), mpk)
    else:
        graph = RoadGraph.from_undirected(len(nodes), edges, positions, mpk)
    centroids = tuple(Centroid(c["id"], c["node"], c.get("label", "")) for c in doc["centroids"])
    vans = tuple(
        VanAgent(
            v["id"], v["capacity"], v["shift_minutes"], v["fixed_cost"], v["variable_cost"], v.get("service_time", 2.0)
        )
        for v in doc["vans"]
    )
    d = doc["demand"]
    weights = d.get("destination_weights")
    if weights is None:
        reserved = {doc["dc"]["node"], *(c.node for c in centroids)}
        pool = [i for i in range(len(nodes)) if i not in reserved] or list(range(len(nodes)))
        weight_pairs = tuple((i, 1.0) for i in pool)
    else:
        weight_pairs = tuple((w["node"], w["weight"]) for w in weights)
    demand = DemandModel(
        mean_daily_packages=d["mean_daily"],
        destination_weights=weight_pairs,
        pickup_probability=d.get("pickup_probability", 0.10),
        seed=d["seed"],
        daily_counts=d.get("daily_counts"),
    )
    s = doc.get("sim", {})
    a = s.get("anomaly", {})
    default_policy = AnomalyPolicy()
    policy = AnomalyPolicy(
        surge_factor=a.get("surge_factor", default_policy.surge_factor),
        window_days=a.get("window_days", default_policy.window_days),
        sustained_factor=a.get("sustained_factor", default_policy.sustained_factor),
        max_vans=a.get("max_vans", max(default_policy.max_vans, len(vans))),
    )
    cap = s.get("centroid_capacity")
    sim = SimConfig(
        lambda_terminal=s.get("lambda_terminal", 1.0),
        success_probability=s.get("success_probability", 0.95),
        emission_g_per_km=s.get("emission_g_per_km", 180.0),
        anomaly=policy,
        centroid_capacity=math.inf if cap is None else cap,
        early_service=s.get("early_service", True),
    )
    spec = ScenarioSpec(
        graph=graph,
        dc=DistributionCenter(doc["dc"]["node"]),
        centroids=centroids,
        vans=vans,
        demand=demand,
        horizon_days=s.get("horizon_days", 30),
        sim=sim,
    )
    problems = validate_graph(graph)
    if problems:
        raise SchemaError([("$.graph", v.detail) for v in problems])
    return spec


def parse_scenario(path: str | Path) -> ScenarioSpec:
    """Load and validate a scenario file. Raises OSError or SchemaError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError([("$", f"not valid JSON: {exc}")]) from exc
    return scenario_from_dict(doc)


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    g = spec.graph
    nodes = []
    for i in range(g.node_count):
        node: dict[str, Any] = {"id": i}
        if g.positions is not None:
            node["x"], node["y"] = g.positions[i]
        nodes.append(node)
    sim = spec.sim
    doc = {
        "graph": {
            "nodes": nodes,
            "edges": [{"from": u, "to": v, "weight": w} for u, v, w in g.edges],
            "directed": True,
            "minutes_per_km": g.minutes_per_km,
        },
        "dc": {"node": spec.dc.node},
        "centroids": [{"id": c.id, "node": c.node, "label": c.label} for c in spec.centroids],
        "vans": [
            {
                "id": v.id,
                "capacity": v.capacity,
                "shift_minutes": v.shift_minutes,
                "fixed_cost": v.fixed_cost,
                "variable_cost": v.variable_cost,
                "service_time": v.service_time_per_stop,
            }
            for v in spec.vans
        ],
        "demand": {
            "mean_daily": spec.demand.mean_daily_packages,
            "pickup_probability": spec.demand.pickup_probability,
            "seed": spec.demand.seed,
            "destination_weights": [{"node": n, "weight": w} for n, w in spec.demand.destination_weights],
        },
        "sim": {
            "horizon_days": spec.horizon_days,
            "lambda_terminal": sim.lambda_terminal,
            "success_probability": sim.success_probability,
            "emission_g_per_km": sim.emission_g_per_km,
            "centroid_capacity": None if math.isinf(sim.centroid_capacity) else int(sim.centroid_capacity),
            "early_service": sim.early_service,
            "anomaly": {
                "surge_factor": sim.anomaly.surge_factor,
                "window_days": sim.anomaly.window_days,
                "sustained_factor": sim.anomaly.sustained_factor,
                "max_vans": sim.anomaly.max_vans,
            },
        },
    }
    if spec.demand.daily_counts is not None:
        doc["demand"]["daily_counts"] = list(spec.demand.daily_counts)
    return doc


def dump_scenario(spec: ScenarioSpec) -> str:
    return json.dumps(scenario_to_dict(spec), indent=2) + "\n"


def write_scenario(spec: ScenarioSpec, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(dump_scenario(spec), encoding="utf-8")
    return path


def config_hash(spec: ScenarioSpec) -> str:
    canonical = json.dumps(scenario_to_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
