"""Simplicial homology on named complexes and random ones."""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from stabtopo.complexes import (
    ComplexError,
    MeshFormatError,
    barycentric_subdivision,
    boundary_matrix,
    build_complex,
    connected_components,
    format_mesh,
    fundamental_cycle,
    parse_mesh,
)
from stabtopo.homology import homology_profile


def torus7():
    return build_complex([t for i in range(7) for t in ((i, (i + 1) % 7, (i + 3) % 7), (i, (i + 2) % 7, (i + 3) % 7))])


def rp2():
    return build_complex([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
                          (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)])


def named_complexes():
    tet = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return {
        "point": (build_complex([(0,)]), (1,)),
        "two points": (build_complex([(0,), (1,)]), (2,)),
        "edge": (build_complex([(0, 1)]), (1, 0)),
        "circle": (build_complex([(0, 1), (1, 2), (0, 2)]), (1, 1)),
        "triangle": (build_complex([(0, 1, 2)]), (1, 0, 0)),
        "tetrahedron boundary": (build_complex(tet), (1, 0, 1)),
        "solid tetrahedron": (build_complex([(0, 1, 2, 3)]), (1, 0, 0, 0)),
        "octahedron": (build_complex([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]), (1, 0, 1)),
        "torus": (torus7(), (1, 2, 1)),
        "projective plane": (rp2(), (1, 0, 0)),
        "moebius strip": (build_complex([(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)]), (1, 1, 0)),
        "wedge of circles": (build_complex([(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]), (1, 2)),
        "sphere and circle": (build_complex(tet + [(5, 6), (6, 7), (5, 7)]), (2, 1, 1)),
        "subdivided torus": (barycentric_subdivision(torus7()), (1, 2, 1)),
    }


def rational_betti(K):
    """Oracle: ranks over the rationals via floating-point matrix rank."""
    rank = {}
    for k in range(1, K.dim + 1):
        M = np.array(boundary_matrix(K, k), dtype=float)
        rank[k] = int(np.linalg.matrix_rank(M)) if M.size else 0
    return tuple(K.count(k) - rank.get(k, 0) - rank.get(k + 1, 0) for k in range(K.dim + 1))


def random_complex(rng):
    nv = int(rng.integers(4, 9))
    k = int(rng.integers(2, 10))
    tops = []
    for _ in range(k):
        d = int(rng.integers(1, 4))
        tops.append(tuple(sorted(rng.choice(nv, size=d + 1, replace=False).tolist())))
    return build_complex(tops)


def corpus20():
    out = [K for K, _ in named_complexes().values()]
    rng = np.random.default_rng(11)
    while len(out) < 20:
        out.append(random_complex(rng))
    return out


@pytest.mark.parametrize("name", list(named_complexes()))
def test_named_betti_numbers(name):
    K, betti = named_complexes()[name]
    assert homology_profile(K).betti == betti


def test_projective_plane_torsion():
    p = homology_profile(rp2())
    assert p.torsion[1] == (2,) and p.euler == 1


def test_euler_poincare_on_corpus():
    corpus = corpus20()
    assert len(corpus) == 20
    for K in corpus:
        p = homology_profile(K)
        alt_f = sum((-1) ** k * f for k, f in enumerate(K.f_vector))
        assert p.euler == alt_f
        assert p.betti == rational_betti(K)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_boundary_of_boundary_vanishes(seed):
    K = random_complex(np.random.default_rng(seed))
    for k in range(2, K.dim + 1):
        A = np.array(boundary_matrix(K, k - 1), dtype=np.int64)
        B = np.array(boundary_matrix(K, k), dtype=np.int64)
        assert not (A @ B).any()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_betti_zero_counts_components(seed):
    K = random_complex(np.random.default_rng(seed))
    assert homology_profile(K).betti[0] == len(connected_components(K))


def test_fundamental_cycle_of_torus_is_a_cycle():
    z = fundamental_cycle(torus7())
    assert z.boundary().is_zero()


def test_non_orientable_surface_has_no_fundamental_cycle():
    with pytest.raises(ComplexError):
        fundamental_cycle(rp2())


def test_mesh_roundtrip_and_errors():
    K = build_complex([(0, 1, 2), (0, 2, 3)], [(0, 0), (1, 0), (1, 1), (0, 1)])
    again = parse_mesh(format_mesh(K))
    assert again.f_vector == K.f_vector
    with pytest.raises(MeshFormatError):
        parse_mesh("3 1 2\n0 0\n1 0\n0 1\n0 1 7\n")
    with pytest.raises(MeshFormatError):
        parse_mesh("")
