"""Run configuration: JSON schema, validation, and construction of checker inputs.

The config is one JSON object whose ``format`` header names the schema
version. A ``system.catalog`` entry pulls every block from the built-in
catalog; explicit blocks override it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .catalog import catalog_names, get_entry
from .complexes import ComplexError, read_mesh
from .conditions import CycleSpec, random_cycles
from .expr import ExprError
from .fields import FieldError, VectorFieldSpec, circle_loop, icosphere
from .interval import IntervalBox
from .sublevel import LyapunovSpec, SublevelError
from .system import BUNDLE_KINDS, ControlSystemSpec, SystemError_, TargetSet

CONFIG_FORMAT = "stabtopo-config/1"
CONDITIONS = ("brockett", "adversary", "coron", "mansouri", "homology", "audit")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_box = {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}, "minItems": 1}
_vec = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_strs = {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1}

SCHEMA = {
    "type": "object",
    "required": ["format", "system"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": CONFIG_FORMAT},
        "system": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "catalog": {"type": "string"},
                "name": {"type": "string"},
                "n": {"type": "integer", "minimum": 1},
                "bundle_kind": {"enum": list(BUNDLE_KINDS)},
                "dynamics": _strs,
                "control_box": _box,
                "orientable_state": {"type": "boolean"},
            },
            "oneOf": [{"required": ["catalog"]}, {"required": ["n", "dynamics", "control_box"]}],
        },
        "target": {
            "type": "object",
            "required": ["variant"],
            "additionalProperties": False,
            "properties": {
                "variant": {"enum": ["point", "triangulated", "hypersurface"]},
                "point": _vec,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "neighborhood": _box,
                "mesh": {"type": "string"},
            },
        },
        "reference_field": _strs,
        "lyapunov": {
            "type": "object",
            "required": ["V", "c"],
            "additionalProperties": False,
            "properties": {"V": {"type": "string"}, "c": {"type": "number", "exclusiveMinimum": 0}},
        },
        "cycles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": ["circle", "sphere", "random"]},
                    "center": _vec,
                    "radius": {"type": "number", "exclusiveMinimum": 0},
                    "points": {"type": "integer", "minimum": 3},
                    "subdivisions": {"type": "integer", "minimum": 0, "maximum": 3},
                    "section": _strs,
                    "count": {"type": "integer", "minimum": 1},
                },
            },
        },
        "avoidance": {
            "type": "object",
            "required": ["direction"],
            "additionalProperties": False,
            "properties": {"direction": _vec},
        },
        "conditions": {"type": "array", "items": {"enum": list(CONDITIONS)}, "minItems": 1},
        "parameters": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "levels": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
                "resolution": {"type": "integer", "minimum": 2},
                "depth_cap": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "adversary_family": {"enum": ["constant", "fields", "probe"]},
                "adversary_fields": {"type": "array", "items": _strs},
                "random_systems": {"type": "integer", "minimum": 0},
            },
        },
    },
}


@dataclass
class RunConfig:
    system: ControlSystemSpec | None
    target: TargetSet | None
    G_ref: VectorFieldSpec | None
    lyapunov: LyapunovSpec | None
    cycles: list
    avoidance: list | None
    conditions: list
    delta: float = 0.1
    levels: list = field(default_factory=list)
    resolution: int = 32
    depth_cap: int = 12
    seed: int = 0
    adversary_family: str | None = None
    adversary_fields: list = field(default_factory=list)
    random_systems: int = 20
    catalog: str | None = None
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {
            "catalog": self.catalog,
            "conditions": list(self.conditions),
            "delta": self.delta,
            "levels": list(self.levels),
            "resolution": self.resolution,
            "depth_cap": self.depth_cap,
            "seed": self.seed,
            "adversary_family": self.adversary_family,
            "avoidance_direction": self.avoidance,
            "cycles": [c.label for c in self.cycles],
        }


def validate(doc: dict) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(path, exc.message) from None


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(str(path), "config file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    return build_config(doc, base_dir=path.parent)


def build_config(doc: dict, base_dir: str | Path = ".") -> RunConfig:
    validate(doc)
    base_dir = Path(base_dir)
    params = doc.get("parameters", {})
    seed = params.get("seed", 0)
    sblock = doc["system"]
    entry = None
    if sblock.get("catalog") == "all":
        conds = doc.get("conditions", ["audit"])
        if conds != ["audit"]:
            raise ConfigError("conditions", "catalog 'all' supports only the audit condition")
        return RunConfig(
            None, None, None, None, [], None, ["audit"],
            resolution=params.get("resolution", 32), depth_cap=params.get("depth_cap", 12), seed=seed,
            random_systems=params.get("random_systems", 20), catalog="all", raw=doc,
        )
    if "catalog" in sblock:
        if sblock["catalog"] not in catalog_names():
            raise ConfigError("system.catalog", f"unknown catalog entry {sblock['catalog']!r} (known: all, {', '.join(catalog_names())})")
        entry = get_entry(sblock["catalog"], seed)
        inst = entry.instance
        system = inst.system
    else:
        try:
            system = ControlSystemSpec(
                sblock.get("name", "custom"),
                sblock["n"],
                sblock["dynamics"],
                IntervalBox(sblock["control_box"]),
                sblock.get("bundle_kind", "trivial_vector"),
                sblock.get("orientable_state", True),
            )
        except SystemError_ as exc:
            where = "system.dynamics" if "dynamics" in str(exc) else "system"
            raise ConfigError(where, str(exc)) from None
        except (ExprError, ValueError) as exc:
            raise ConfigError("system.dynamics", str(exc)) from None
    n = system.n

    if "target" in doc:
        target = _build_target(doc["target"], n, base_dir)
    elif entry is not None:
        target = entry.instance.target
    else:
        raise ConfigError("target", "a target block is required for custom systems")

    if "reference_field" in doc:
        if len(doc["reference_field"]) != n:
            raise ConfigError("reference_field", f"expected {n} components")
        try:
            G = VectorFieldSpec(doc["reference_field"])
        except (ExprError, FieldError) as exc:
            raise ConfigError("reference_field", str(exc)) from None
    else:
        G = entry.instance.G_ref if entry else None

    if "lyapunov" in doc:
        try:
            lyap = LyapunovSpec(doc["lyapunov"]["V"], float(doc["lyapunov"]["c"]), target.neighborhood)
        except (ExprError, SublevelError) as exc:
            raise ConfigError("lyapunov", str(exc)) from None
    else:
        lyap = entry.instance.lyapunov if entry else None

    if "cycles" in doc:
        cycles = _build_cycles(doc["cycles"], system, target, seed)
    else:
        cycles = list(entry.instance.cycles) if entry else []

    if "avoidance" in doc:
        avoid = [float(x) for x in doc["avoidance"]["direction"]]
        if len(avoid) != n:
            raise ConfigError("avoidance.direction", f"expected {n} entries")
    else:
        avoid = entry.instance.avoidance_direction if entry else None

    default_delta = entry.instance.delta if entry else 0.1
    fields = []
    for i, comps in enumerate(params.get("adversary_fields", [])):
        try:
            fields.append(VectorFieldSpec(comps))
        except (ExprError, FieldError) as exc:
            raise ConfigError(f"parameters.adversary_fields.{i}", str(exc)) from None
    return RunConfig(
        system=system,
        target=target,
        G_ref=G,
        lyapunov=lyap,
        cycles=cycles,
        avoidance=avoid,
        conditions=doc.get("conditions", ["brockett", "adversary", "coron", "mansouri", "homology"]),
        delta=params.get("delta", default_delta),
        levels=params.get("levels", []),
        resolution=params.get("resolution", 32),
        depth_cap=params.get("depth_cap", 12),
        seed=seed,
        adversary_family=params.get("adversary_family", entry.instance.adversary_family if entry else None),
        adversary_fields=fields,
        random_systems=params.get("random_systems", 20),
        catalog=sblock.get("catalog"),
        raw=doc,
    )


def _build_target(t: dict, n: int, base_dir: Path) -> TargetSet:
    variant = t["variant"]
    if "neighborhood" in t:
        N = IntervalBox(t["neighborhood"])
    elif variant == "point" and "point" in t:
        r = t.get("radius", 1.0)
        N = IntervalBox([(x - r, x + r) for x in t["point"]])
    else:
        raise ConfigError("target.neighborhood", "required for mesh targets")
    if N.dim != n:
        raise ConfigError("target.neighborhood", f"expected {n} intervals")
    if variant == "point":
        if "point" not in t:
            raise ConfigError("target.point", "required for point targets")
        if len(t["point"]) != n:
            raise ConfigError("target.point", f"expected {n} coordinates")
        return TargetSet("point", N, point=[float(x) for x in t["point"]])
    if "mesh" not in t:
        raise ConfigError("target.mesh", "required for mesh targets")
    mesh_path = base_dir / t["mesh"]
    if not mesh_path.exists():
        raise ConfigError("target.mesh", f"mesh file not found: {mesh_path}")
    try:
        K = read_mesh(mesh_path)
        return TargetSet(variant, N, complex=K)
    except (ComplexError, SystemError_) as exc:
        raise ConfigError("target.mesh", str(exc)) from None


def _build_cycles(items: list, system: ControlSystemSpec, target: TargetSet, seed: int) -> list:
    out = []
    n = system.n
    for i, c in enumerate(items):
        where = f"cycles.{i}"
        if c["kind"] == "random":
            out.extend(random_cycles(system, target, c.get("count", 20), seed + i))
            continue
        for key in ("center", "radius", "section"):
            if key not in c:
                raise ConfigError(f"{where}.{key}", "required")
        if len(c["center"]) != n:
            raise ConfigError(f"{where}.center", f"expected {n} coordinates")
        if len(c["section"]) != system.m:
            raise ConfigError(f"{where}.section", f"expected {system.m} components")
        if c["kind"] == "circle":
            if n != 2:
                raise ConfigError(where, "circles need n = 2")
            cyc = circle_loop(tuple(c["center"]), c["radius"], n=c.get("points", 64))
        else:
            if n != 3:
                raise ConfigError(where, "spheres need n = 3")
            cyc = icosphere(c.get("subdivisions", 1), tuple(c["center"]), c["radius"])
        out.append(CycleSpec(cyc, list(c["section"]), f"{c['kind']} c={c['center']} r={c['radius']}"))
    return out
