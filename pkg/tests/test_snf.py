"""Smith normal form against an independent minors oracle."""
import itertools
import math

import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st

from stabtopo.snf import det, invariant_factors, matmul, smith_normal_form


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total += (-1) ** inv * math.prod(m[i][perm[i]] for i in range(n))
    return total


def oracle_factors(A):
    """d_k = D_k / D_{k-1}, with D_k the gcd of all k x k minors."""
    rows, cols = len(A), len(A[0])
    D = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                g = math.gcd(g, leibniz_det([[A[i][j] for j in c] for i in r]))
        if g == 0:
            break
        D.append(g)
    return [D[k] // D[k - 1] for k in range(1, len(D))]


def check_snf(A):
    res = smith_normal_form(A)
    assert matmul(matmul(res.U, A), res.V) == res.D
    assert abs(det(res.U)) == 1 and abs(det(res.V)) == 1
    diag = res.diagonal
    for i, row in enumerate(res.D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    nz = [d for d in diag if d != 0]
    assert all(d > 0 for d in nz) and nz == diag[: len(nz)]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return res


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_invariants_on_random_matrices(A):
    check_snf(A)


def test_snf_200_seeded_matrices_with_oracle_on_3x3():
    rng = np.random.default_rng(7)
    for _ in range(200):
        r, c = rng.integers(1, 7, size=2)
        A = rng.integers(-6, 7, size=(r, c)).tolist()
        res = check_snf(A)
        if r <= 3 and c <= 3:
            assert res.invariant_factors == oracle_factors(A)
    # every 3 x 3 case, including a dedicated batch
    for _ in range(100):
        A = rng.integers(-5, 6, size=(3, 3)).tolist()
        assert check_snf(A).invariant_factors == oracle_factors(A)


def test_known_forms():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).invariant_factors == [2, 6, 12]
    assert smith_normal_form([[0, 0], [0, 0]]).rank == 0
    assert smith_normal_form([[6]]).invariant_factors == [6]


def test_sparse_factors_agree_with_dense():
    rng = np.random.default_rng(3)
    for _ in range(30):
        A = rng.integers(-3, 4, size=(5, 4)).tolist()
        cols = [{i: A[i][j] for i in range(5) if A[i][j]} for j in range(4)]
        assert invariant_factors(cols, 5) == smith_normal_form(A).invariant_factors
