"""Index sums against (-1)^n chi(S) on the Poincare-Hopf test corpus."""
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from corpus import ph_corpus  # noqa: E402

from stabtopo.sublevel import sublevel_region  # noqa: E402
from stabtopo.zeros import poincare_hopf_audit  # noqa: E402

print(f"{'instance':34}{'status':9}{'zeros':>6}{'sum':>5}{'chi':>5}{'time':>8}")
for label, G, V, chi in ph_corpus():
    t0 = time.perf_counter()
    a = poincare_hopf_audit(G, sublevel_region(V))
    print(f"{label:34}{a.status:9}{len(a.zeros):>6}{a.index_sum!s:>5}{a.euler!s:>5}{time.perf_counter() - t0:>7.2f}s")
