"""Command-line surface: check, audit, recheck, catalog, mesh-info.

Exit codes: 0 when every requested check produced a verdict (Unknown
included), 2 for configuration errors, 3 when no verdict could be
produced or a witness failed to re-verify.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path

from .catalog import audit_corpus, catalog_list, get_entry
from .complexes import ComplexError, read_mesh
from .conditions import (
    UNKNOWN,
    AuditInstance,
    ValidationError,
    audit_implications,
    check_adversary,
    check_brockett,
    check_coron,
    check_homology_euclidean,
    check_mansouri,
    coron_image_subgroup,
)
from .config import CONDITIONS, CONFIG_FORMAT, ConfigError, RunConfig, build_config, load_config
from .homology import homology_profile
from .sublevel import LyapunovSpec, SublevelError
from .report import (
    TIMING_KEY,
    Timer,
    dumps,
    new_report,
    recheck_report,
    render_text,
    system_block,
    target_block,
)

EXIT_OK, EXIT_CONFIG, EXIT_DECERT = 0, 2, 3
ERROR = "Error"

NOTES = [
    "Holds verdicts are scoped to the tested targets, fields and cycles; Fails verdicts carry re-checkable witnesses.",
    "The equilibrium refinement of Coron's condition is not checked separately.",
]


def _run_homology(cfg: RunConfig, img, level: float | None):
    lyap = cfg.lyapunov
    if level is not None:
        lyap = LyapunovSpec(lyap.V, level, lyap.box)
    return check_homology_euclidean(
        cfg.system, cfg.target, cfg.G_ref, lyap, cfg.cycles, cfg.avoidance, depth_cap=cfg.depth_cap, image=img
    )


def execute(cfg: RunConfig) -> tuple[dict, int]:
    """Run the selected checkers in declared order; return (report, exit code)."""
    if "audit" in cfg.conditions:
        return _execute_audit(cfg)
    sys, A = cfg.system, cfg.target
    report = new_report("check")
    report.update(system=system_block(sys), target=target_block(A), parameters=cfg.echo(), notes=list(NOTES))
    checks = []
    code = EXIT_OK
    img = None
    if {"coron", "mansouri", "homology"} & set(cfg.conditions):
        with Timer() as t:
            img = coron_image_subgroup(sys, cfg.cycles)
        report["image_subgroup"] = dict(img.as_dict(), **{TIMING_KEY: t.elapsed})
    for cond in cfg.conditions:
        runs = [None]
        if cond == "homology" and cfg.levels:
            runs = list(cfg.levels)
        for level in runs:
            with Timer() as t:
                try:
                    if cond == "brockett":
                        v = check_brockett(sys, A, cfg.delta, cfg.resolution, cfg.depth_cap, cfg.seed)
                    elif cond == "adversary":
                        v = check_adversary(sys, A, cfg.delta, cfg.adversary_family, cfg.adversary_fields,
                                            cfg.resolution, cfg.depth_cap, cfg.seed)
                    elif cond == "coron":
                        v = check_coron(sys, A, cfg.cycles, cfg.avoidance, cfg.depth_cap, img)
                    elif cond == "mansouri":
                        v = check_mansouri(sys, A, cfg.cycles, cfg.avoidance, cfg.depth_cap, img)
                    else:
                        if cfg.G_ref is None or cfg.lyapunov is None:
                            raise ValidationError("reference_field and lyapunov blocks are required")
                        v = _run_homology(cfg, img, level)
                    rec = v.as_dict()
                except (ValidationError, SublevelError, ValueError) as exc:
                    rec = {"condition": cond, "status": ERROR, "certificate": {"reason": str(exc)},
                           "parameters": {} if level is None else {"level": level}}
                    code = EXIT_DECERT
            rec[TIMING_KEY] = t.elapsed
            checks.append(rec)
    report["checks"] = checks
    return report, code


def _execute_audit(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.catalog == "all":
        instances = audit_corpus(cfg.random_systems, cfg.seed)
    else:
        instances = [AuditInstance(cfg.system.name, cfg.system, cfg.target, cfg.G_ref, cfg.lyapunov, cfg.cycles,
                                   cfg.avoidance, cfg.delta, cfg.adversary_family)]
    report = new_report("audit")
    with Timer() as t:
        audit = audit_implications(instances, cfg.resolution, cfg.depth_cap, cfg.seed)
    report.update(
        parameters={"catalog": cfg.catalog, "instances": len(instances), "resolution": cfg.resolution,
                    "depth_cap": cfg.depth_cap, "seed": cfg.seed, "random_systems": cfg.random_systems},
        systems={inst.name: system_block(inst.system) for inst in instances},
        audit=audit.as_dict(),
        notes=list(NOTES),
    )
    report[TIMING_KEY] = t.elapsed
    return report, EXIT_OK


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _config_doc(args) -> tuple[dict, Path]:
    if args.config:
        path = Path(args.config)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(str(path), "config file not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from None
        base = path.parent
    elif args.system:
        doc, base = {"format": CONFIG_FORMAT, "system": {"catalog": args.system}}, Path(".")
    else:
        raise ConfigError("<args>", "give a config file or --system NAME")
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if args.system and args.config:
        doc["system"] = {"catalog": args.system}
    params = doc.setdefault("parameters", {}) if isinstance(doc.get("parameters", {}), dict) else doc["parameters"]
    for key in ("delta", "resolution", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if getattr(args, "level", None):
        params["levels"] = list(args.level)
    if getattr(args, "condition", None):
        doc["conditions"] = list(args.condition)
    return doc, base


def _emit(report: dict, args) -> None:
    text = dumps(report)
    if args.output:
        Path(args.output).write_text(text)
    if args.json:
        _sys.stdout.write(text)
    else:
        _sys.stdout.write(render_text(report))


def cmd_check(args) -> int:
    doc, base = _config_doc(args)
    cfg = build_config(doc, base)
    report, code = execute(cfg)
    _emit(report, args)
    return code


def cmd_audit(args) -> int:
    if args.config or args.system:
        doc, base = _config_doc(args)
        doc["conditions"] = ["audit"]
    else:
        doc, base = {"format": CONFIG_FORMAT, "system": {"catalog": "all"}, "parameters": {}}, Path(".")
        for key in ("resolution", "seed"):
            if getattr(args, key) is not None:
                doc["parameters"][key] = getattr(args, key)
    if args.random is not None:
        doc.setdefault("parameters", {})["random_systems"] = args.random
    cfg = build_config(doc, base)
    report, code = execute(cfg)
    _emit(report, args)
    if report["audit"]["contradictions"] or report["audit"]["coron_brockett_flags"]:
        _sys.stderr.write("audit raised implication flags\n")
    return code


def cmd_recheck(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except FileNotFoundError:
        raise ConfigError(args.report, "report file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(args.report, f"invalid JSON: {exc}") from None
    results = recheck_report(report, depth_cap=args.depth_cap)
    out = {"rechecked": results, "all_ok": all(r["ok"] for r in results)}
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    if args.json:
        _sys.stdout.write(text)
    else:
        for r in results:
            _sys.stdout.write(f"{r['system']:<26} {r['condition']:<10} {r.get('kind', '-'):<20} {'ok' if r['ok'] else 'FAILED'}\n")
        _sys.stdout.write(f"{len(results)} witnesses, {'all re-verified' if out['all_ok'] else 'some NOT re-verified'}\n")
    return EXIT_OK if out["all_ok"] else EXIT_DECERT


def cmd_catalog(args) -> int:
    items = catalog_list()
    if args.json:
        _sys.stdout.write(json.dumps(items, sort_keys=True, indent=2) + "\n")
    else:
        for it in items:
            exp = " ".join(f"{k}={v}" for k, v in sorted(it["expected"].items()))
            _sys.stdout.write(f"{it['name']}\n    {it['description']}\n    expected: {exp}\n")
    return EXIT_OK


def cmd_mesh_info(args) -> int:
    try:
        K = read_mesh(args.mesh)
    except FileNotFoundError:
        raise ConfigError(args.mesh, "mesh file not found") from None
    except ComplexError as exc:
        raise ConfigError(args.mesh, str(exc)) from None
    prof = homology_profile(K)
    info = {"mesh": str(args.mesh), "dim": K.dim, "f_vector": list(K.f_vector), **prof.as_dict()}
    if args.json:
        _sys.stdout.write(json.dumps(info, sort_keys=True, indent=2) + "\n")
    else:
        _sys.stdout.write(
            f"{args.mesh}: dim {K.dim}, f-vector {info['f_vector']}, betti {info['betti']}, "
            f"torsion {info['torsion']}, euler {info['euler']}\n"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabtopo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--output", "-o", help="write the JSON report here")
        sp.add_argument("--json", action="store_true", help="print JSON instead of text")

    c = sub.add_parser("check", help="run condition checkers on one system")
    c.add_argument("config", nargs="?")
    c.add_argument("--system", help="built-in catalog entry")
    c.add_argument("--condition", action="append", choices=[x for x in CONDITIONS if x != "audit"])
    c.add_argument("--delta", type=float)
    c.add_argument("--level", type=float, action="append", help="sublevel c for the homology check (repeatable)")
    c.add_argument("--resolution", type=int)
    c.add_argument("--seed", type=int)
    common(c)
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("audit", help="implication audit over the catalog or one config")
    a.add_argument("config", nargs="?")
    a.add_argument("--system")
    a.add_argument("--random", type=int, help="number of random trivial-bundle systems (default 20)")
    a.add_argument("--resolution", type=int)
    a.add_argument("--seed", type=int)
    common(a)
    a.set_defaults(func=cmd_audit, delta=None, level=None, condition=None)

    r = sub.add_parser("recheck", help="re-verify every Fails witness in a report")
    r.add_argument("report")
    r.add_argument("--depth-cap", type=int, default=24)
    common(r)
    r.set_defaults(func=cmd_recheck)

    k = sub.add_parser("catalog", help="list built-in instances")
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_catalog)

    m = sub.add_parser("mesh-info", help="homology of a mesh file")
    m.add_argument("mesh")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_mesh_info)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
