"""Homology verdicts at shrinking sublevels c for the catalog entries."""
from stabtopo.catalog import catalog_names, get_entry
from stabtopo.conditions import ValidationError, check_homology_euclidean
from stabtopo.sublevel import LyapunovSpec, SublevelError

for name in catalog_names():
    inst = get_entry(name).instance
    V = inst.lyapunov
    row = []
    for scale in (1.0, 0.5, 0.25, 0.1):
        spec = LyapunovSpec(V.V, V.c * scale, V.box)
        try:
            v = check_homology_euclidean(inst.system, inst.target, inst.G_ref, spec, inst.cycles,
                                         inst.avoidance_direction)
            row.append(f"c={spec.c:<7g} {v.status:8}")
        except (ValidationError, SublevelError):
            row.append(f"c={spec.c:<7g} error   ")
    print(f"{name:26}" + "  ".join(row))
