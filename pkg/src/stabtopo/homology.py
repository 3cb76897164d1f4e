"""Integer homology of finite simplicial complexes."""
from __future__ import annotations

from dataclasses import dataclass

from .complexes import SimplicialComplex, sparse_boundary
from .snf import invariant_factors


@dataclass(frozen=True)
class HomologyProfile:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    euler: int

    def as_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion], "euler": self.euler}


def homology_profile(K: SimplicialComplex) -> HomologyProfile:
    """Betti numbers, torsion coefficients and Euler characteristic of ``K``.

    b_k = #k-simplices - rank d_k - rank d_{k+1}; the torsion of H_k is read
    off the non-unit invariant factors of d_{k+1}.
    """
    d = K.dim
    if d < 0:
        return HomologyProfile((), (), 0)
    factors = {k: invariant_factors(sparse_boundary(K, k), K.count(k - 1)) for k in range(1, d + 1)}
    rank = {k: len(f) for k, f in factors.items()}
    betti = []
    torsion = []
    for k in range(d + 1):
        b = K.count(k) - rank.get(k, 0) - rank.get(k + 1, 0)
        betti.append(b)
        torsion.append(tuple(x for x in factors.get(k + 1, []) if x > 1))
    euler = sum((-1) ** k * b for k, b in enumerate(betti))
    assert euler == K.euler_characteristic(), "Euler-Poincare identity violated"
    return HomologyProfile(tuple(betti), tuple(torsion), euler)
