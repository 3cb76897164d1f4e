"""Example 5 circle bundle: homology condition holds while the adversary condition fails."""
import json
import time

from stabtopo.catalog import get_entry
from stabtopo.conditions import check_adversary, check_homology_euclidean
from stabtopo.system import fiber_min_norm

e = get_entry("example5_circle_bundle").instance
t0 = time.perf_counter()
h = check_homology_euclidean(e.system, e.target, e.G_ref, e.lyapunov, e.cycles)
for delta in (0.5, 0.9, 0.99, 1.01):
    a = check_adversary(e.system, e.target, delta, family="probe")
    print(f"adversary (probe) delta={delta:<5} {a.status}")
fb = fiber_min_norm(e.system, e.target.neighborhood)
print(f"fiber lower bound on |f| over N_A: {fb.bound:.5f} ({fb.boxes} boxes)")
print(f"homology: {h.status}  image d={h.certificate['image']['d']}  chi*={h.certificate['chi_star']}")
print(json.dumps(h.certificate["left_side"]["boundary_degrees"]))
print(f"{time.perf_counter() - t0:.2f}s")
