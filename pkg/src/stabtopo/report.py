"""Report documents: JSON serialization, text rendering, witness re-checks."""
from __future__ import annotations

import json
import math
import platform
import time

import numpy as np

from . import __version__
from .conditions import FAILS, recheck_witness
from .interval import IntervalBox
from .system import ControlSystemSpec

REPORT_FORMAT = "stabtopo-report/1"
TIMING_KEY = "timing_s"


def system_block(sys: ControlSystemSpec) -> dict:
    return {
        "name": sys.name,
        "n": sys.n,
        "m": sys.m,
        "bundle_kind": sys.bundle_kind,
        "orientable_state": sys.orientable_state,
        "dynamics": sys.texts(),
        "control_box": sys.control_box.to_list(),
    }


def system_from_block(block: dict) -> ControlSystemSpec:
    return ControlSystemSpec(
        block["name"], block["n"], block["dynamics"], IntervalBox(block["control_box"]),
        block["bundle_kind"], block.get("orientable_state", True),
    )


def target_block(A) -> dict:
    out = {"variant": A.variant, "neighborhood": A.neighborhood.to_list()}
    if A.point is not None:
        out["point"] = list(A.point)
    if A.complex is not None:
        out["f_vector"] = list(A.complex.f_vector)
    return out


def new_report(kind: str) -> dict:
    return {
        "format": REPORT_FORMAT,
        "kind": kind,
        "toolkit": {"name": "stabtopo", "version": __version__, "python": platform.python_version(), "numpy": np.__version__},
    }


def _clean(obj):
    """JSON-safe copy: tuples to lists, numpy scalars to floats, inf to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def strip_timing(obj):
    """Drop every timing field, for determinism comparisons."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != TIMING_KEY}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = round(time.perf_counter() - self.t0, 4)


def recheck_report(report: dict, depth_cap: int = 24) -> list[dict]:
    """Re-verify every Fails witness in a check or audit report."""
    results = []
    systems = report.get("systems") or {report["system"]["name"]: report["system"]}
    if report.get("kind") == "audit":
        records = [
            (name, rec) for name, checks in report["audit"]["instances"].items() for rec in checks.values()
        ]
    else:
        records = [(report["system"]["name"], rec) for rec in report.get("checks", [])]
    built = {}
    for name, rec in records:
        if rec.get("status") != FAILS:
            continue
        wit = rec.get("certificate", {}).get("witness")
        if wit is None:
            results.append({"system": name, "condition": rec["condition"], "ok": False, "reason": "Fails record without witness"})
            continue
        if name not in built:
            built[name] = system_from_block(systems[name])
        ok = bool(recheck_witness(built[name], wit, depth_cap=depth_cap))
        results.append({"system": name, "condition": rec["condition"], "kind": wit.get("kind"), "ok": ok})
    return results


def render_text(report: dict) -> str:
    lines = [f"stabtopo {report['toolkit']['version']}  {report['kind']} report"]
    if report["kind"] == "check":
        s = report["system"]
        lines.append(f"system {s['name']}  n={s['n']} m={s['m']}  bundle={s['bundle_kind']}")
        for i, d in enumerate(s["dynamics"], 1):
            lines.append(f"  f{i} = {d}")
        lines.append(f"target {report['target']['variant']}")
        for rec in report["checks"]:
            extra = ""
            p = rec.get("parameters", {})
            if "level" in p and rec["condition"] == "homology":
                extra = f"  c={p['level']}"
            cert = rec.get("certificate", {})
            wit = cert.get("witness")
            why = f"  witness={wit.get('kind')}" if wit else (f"  ({cert['reason']})" if "reason" in cert else "")
            lines.append(f"  {rec['condition']:<10} {rec['status']:<8}{extra}{why}  [{rec.get(TIMING_KEY, 0):.2f}s]")
    elif report["kind"] == "audit":
        a = report["audit"]
        conds = ("brockett", "adversary", "coron", "mansouri", "homology")
        lines.append("  " + "instance".ljust(26) + "".join(c[:9].ljust(10) for c in conds))
        for name, checks in a["instances"].items():
            lines.append("  " + name.ljust(26) + "".join(checks[c]["status"].ljust(10) for c in conds))
        lines.append(f"contradictions: {len(a['contradictions'])}")
        lines.append(f"coron/brockett flags: {len(a['coron_brockett_flags'])}")
        lines.append("independence witnesses: " + (", ".join(w["instance"] for w in a["independence_witnesses"]) or "none"))
        lines.append(f"inconclusive: {len(a['inconclusive'])}")
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
