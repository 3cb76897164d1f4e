"""Oriented simplicial complexes, chains, mesh files and fundamental cycles."""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .snf import IntegerMatrix, zeros

Simplex = tuple[int, ...]


class ComplexError(ValueError):
    pass


class NonManifoldError(ComplexError):
    pass


class NonOrientableError(ComplexError):
    pass


def _key(s: Sequence[int]) -> frozenset:
    return frozenset(s)


def permutation_sign(seq: Sequence[int], ref: Sequence[int]) -> int:
    """Sign of the permutation taking ``ref`` to ``seq`` (same vertex set)."""
    pos = {v: i for i, v in enumerate(ref)}
    perm = [pos[v] for v in seq]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass
class SimplicialComplex:
    """Finite oriented simplicial complex.

    ``simplices[k]`` lists the k-simplices as ordered vertex tuples; the
    order of a tuple is its orientation. ``coords`` optionally embeds the
    vertices.
    """

    simplices: list[list[Simplex]]
    coords: dict[int, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self._index = [
            {_key(s): i for i, s in enumerate(level)} for level in self.simplices
        ]

    @property
    def dim(self) -> int:
        for k in range(len(self.simplices) - 1, -1, -1):
            if self.simplices[k]:
                return k
        return -1

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k < len(self.simplices) else 0

    @property
    def f_vector(self) -> list[int]:
        return [len(level) for level in self.simplices[: self.dim + 1]]

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices[0]] if self.simplices else []

    def index_of(self, s: Sequence[int]) -> int:
        return self._index[len(s) - 1][_key(s)]

    def has(self, s: Sequence[int]) -> bool:
        k = len(s) - 1
        return 0 <= k < len(self._index) and _key(s) in self._index[k]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def top_simplices(self) -> list[Simplex]:
        return list(self.simplices[self.dim]) if self.dim >= 0 else []

    def maximal_simplices(self) -> list[Simplex]:
        out = []
        for k, level in enumerate(self.simplices):
            higher = self.simplices[k + 1] if k + 1 < len(self.simplices) else []
            covered = set()
            for t in higher:
                for f in itertools.combinations(t, k + 1):
                    covered.add(_key(f))
            out.extend(s for s in level if _key(s) not in covered)
        return out


def build_complex(
    simplex_list: Iterable[Sequence[int]],
    coords: Mapping[int, Sequence[float]] | Sequence[Sequence[float]] | None = None,
) -> SimplicialComplex:
    """Close ``simplex_list`` under faces, keeping the orientation of given simplices.

    Faces that are not listed explicitly inherit the increasing vertex order.
    """
    if coords is None:
        cmap: dict[int, tuple[float, ...]] = {}
    elif isinstance(coords, Mapping):
        cmap = {int(k): tuple(float(x) for x in v) for k, v in coords.items()}
    else:
        cmap = {i: tuple(float(x) for x in v) for i, v in enumerate(coords)}
    given = [tuple(int(v) for v in s) for s in simplex_list]
    if not given:
        raise ComplexError("empty simplex list")
    if cmap:
        for s in given:
            for v in s:
                if v not in cmap:
                    raise ComplexError(f"dangling vertex id {v}")
    top = max(len(s) for s in given) - 1
    levels: list[dict[frozenset, Simplex]] = [dict() for _ in range(top + 1)]
    for s in given:
        if len(set(s)) != len(s):
            raise ComplexError(f"repeated vertex in simplex {s}")
        key = _key(s)
        lvl = levels[len(s) - 1]
        if key in lvl:
            if lvl[key] != s and permutation_sign(s, lvl[key]) != 1:
                raise ComplexError(f"inconsistent duplicate orientation for simplex {sorted(s)}")
            continue
        lvl[key] = s
    for k in range(top, 0, -1):
        for s in list(levels[k].values()):
            for face in itertools.combinations(sorted(s), k):
                fk = _key(face)
                if fk not in levels[k - 1]:
                    levels[k - 1][fk] = tuple(face)
    simplices = [sorted(lvl.values(), key=lambda t: (sorted(t), t)) for lvl in levels]
    # vertices without coordinates are allowed only when no coordinates are given at all
    return SimplicialComplex(simplices, cmap)


def boundary_matrix(K: SimplicialComplex, k: int) -> IntegerMatrix:
    """Signed incidence matrix of the k-th boundary operator.

    Face i of simplex (v0..vk) omitting v_i carries sign (-1)^i relative to
    the stored orientation of that face.
    """
    if k < 1 or k > K.dim:
        raise ComplexError(f"boundary degree {k} out of range 1..{K.dim}")
    rows = K.count(k - 1)
    cols = K.count(k)
    M = zeros(rows, cols)
    for j, (i, sign) in _boundary_entries(K, k):
        M[i][j] += sign
    return M


def _boundary_entries(K: SimplicialComplex, k: int):
    faces = K.simplices[k - 1]
    for j, s in enumerate(K.simplices[k]):
        for pos in range(k + 1):
            face = s[:pos] + s[pos + 1 :]
            i = K.index_of(face)
            stored = faces[i]
            sign = (-1) ** pos * permutation_sign(face, stored)
            yield j, (i, sign)


def sparse_boundary(K: SimplicialComplex, k: int) -> list[dict[int, int]]:
    cols: list[dict[int, int]] = [dict() for _ in range(K.count(k))]
    for j, (i, sign) in _boundary_entries(K, k):
        cols[j][i] = cols[j].get(i, 0) + sign
    return cols


@dataclass
class Chain:
    """Formal integer combination of k-simplices (keys are stored simplices)."""

    complex: SimplicialComplex
    degree: int
    coeffs: dict[Simplex, int]

    def boundary(self) -> "Chain":
        k = self.degree
        out: dict[Simplex, int] = defaultdict(int)
        if k == 0:
            return Chain(self.complex, -1, {})
        faces = self.complex.simplices[k - 1]
        for s, c in self.coeffs.items():
            for pos in range(k + 1):
                face = s[:pos] + s[pos + 1 :]
                stored = faces[self.complex.index_of(face)]
                out[stored] += c * (-1) ** pos * permutation_sign(face, stored)
        return Chain(self.complex, k - 1, {s: c for s, c in out.items() if c})

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())


def orientation_signs(K: SimplicialComplex) -> dict[Simplex, int]:
    """Coherent orientation of a pure closed combinatorial manifold.

    Returns a sign per top simplex such that each codimension-one face
    receives opposite induced orientations. Raises NonManifoldError or
    NonOrientableError.
    """
    d = K.dim
    if d < 1:
        raise NonManifoldError("need a complex of dimension >= 1")
    top = K.simplices[d]
    covered = set()
    incidence: dict[frozenset, list[tuple[int, int]]] = defaultdict(list)
    for j, s in enumerate(top):
        for pos in range(d + 1):
            face = s[:pos] + s[pos + 1 :]
            covered.add(_key(face))
            stored = K.simplices[d - 1][K.index_of(face)]
            incidence[_key(face)].append((j, (-1) ** pos * permutation_sign(face, stored)))
    for level in K.simplices[: d]:
        for s in level:
            if len(s) == d and _key(s) not in covered:
                raise NonManifoldError(f"complex is not pure: face {s} has no top coface")
    for face, inc in incidence.items():
        if len(inc) > 2:
            raise NonManifoldError(f"face {sorted(face)} lies in {len(inc)} top simplices")
    sign = [0] * len(top)
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for face, inc in incidence.items():
        if len(inc) == 2:
            (a, sa), (b, sb) = inc
            # need sign[a]*sa == -sign[b]*sb
            rel = -sa * sb
            adj[a].append((b, rel))
            adj[b].append((a, rel))
    for start in range(len(top)):
        if sign[start]:
            continue
        sign[start] = 1
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for b, rel in adj[a]:
                want = sign[a] * rel
                if sign[b] == 0:
                    sign[b] = want
                    queue.append(b)
                elif sign[b] != want:
                    raise NonOrientableError("orientation propagation found a conflict")
    open_faces = [sorted(f) for f, inc in incidence.items() if len(inc) == 1]
    if open_faces:
        raise NonManifoldError(f"complex has boundary, e.g. face {open_faces[0]}")
    return {s: sign[j] for j, s in enumerate(top)}


def fundamental_cycle(K: SimplicialComplex) -> Chain:
    """Top-degree cycle with coefficient +-1 on every top simplex.

    For a coherently oriented input every coefficient is +1.
    """
    signs = orientation_signs(K)
    chain = Chain(K, K.dim, dict(signs))
    assert chain.boundary().is_zero()
    return chain


def reorient(K: SimplicialComplex) -> SimplicialComplex:
    """Copy of a closed orientable manifold with coherently oriented top simplices."""
    signs = orientation_signs(K)
    top = []
    for s, sg in signs.items():
        top.append(s if sg > 0 else (s[1], s[0]) + s[2:])
    return build_complex(top, K.coords)


def barycentric_subdivision(K: SimplicialComplex) -> SimplicialComplex:
    """First barycentric subdivision; new vertex ids enumerate the old simplices."""
    ids: dict[frozenset, int] = {}
    coords: dict[int, tuple[float, ...]] = {}
    for level in K.simplices:
        for s in level:
            ids[_key(s)] = len(ids)
            if K.coords:
                pts = [K.coords[v] for v in s]
                coords[ids[_key(s)]] = tuple(sum(c) / len(pts) for c in zip(*pts))
    flags = []
    for s in K.maximal_simplices():
        for perm in itertools.permutations(s):
            flags.append(tuple(ids[_key(perm[: i + 1])] for i in range(len(perm) - 1, -1, -1)))
    return build_complex(flags, coords or None)


def connected_components(K: SimplicialComplex) -> list[set[int]]:
    parent = {v: v for v in K.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    if len(K.simplices) > 1:
        for a, b in K.simplices[1]:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    comps: dict[int, set[int]] = defaultdict(set)
    for v in K.vertices:
        comps[find(v)].add(v)
    return sorted(comps.values(), key=min)


# ---------------------------------------------------------------------------
# Mesh text format
#   line 1: n_vertices n_topsimplices dim
#   n_vertices coordinate lines, then n_topsimplices vertex-id lines
# ---------------------------------------------------------------------------

class MeshFormatError(ComplexError):
    pass


def parse_mesh(text: str) -> SimplicialComplex:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MeshFormatError("empty mesh file")
    head = lines[0].split()
    if len(head) != 3:
        raise MeshFormatError("header must be 'n_vertices n_topsimplices dim'")
    try:
        nv, nt, d = (int(x) for x in head)
    except ValueError:
        raise MeshFormatError("header fields must be integers") from None
    if len(lines) != 1 + nv + nt:
        raise MeshFormatError(f"expected {1 + nv + nt} non-empty lines, found {len(lines)}")
    coords = []
    for ln in lines[1 : 1 + nv]:
        coords.append(tuple(float(x) for x in ln.split()))
    if len({len(c) for c in coords}) > 1:
        raise MeshFormatError("inconsistent coordinate dimension")
    tops = []
    for ln in lines[1 + nv :]:
        s = tuple(int(x) for x in ln.split())
        if len(s) != d + 1:
            raise MeshFormatError(f"simplex {s} does not have {d + 1} vertices")
        for v in s:
            if not 0 <= v < nv:
                raise MeshFormatError(f"dangling vertex id {v}")
        tops.append(s)
    if not tops:
        return build_complex([(i,) for i in range(nv)], coords)
    K = build_complex(tops, coords)
    # keep isolated vertices that no simplex references
    used = set(K.vertices)
    extra = [(i,) for i in range(nv) if i not in used]
    if extra:
        K = build_complex(tops + extra, coords)
    return K


def read_mesh(path: str | Path) -> SimplicialComplex:
    return parse_mesh(Path(path).read_text())


def format_mesh(K: SimplicialComplex) -> str:
    top = K.maximal_simplices()
    d = K.dim
    if any(len(s) != d + 1 for s in top):
        raise MeshFormatError("mesh format stores pure complexes only")
    verts = sorted(K.vertices)
    if any(v not in K.coords for v in verts):
        raise MeshFormatError("every vertex needs coordinates")
    renum = {v: i for i, v in enumerate(verts)}
    out = [f"{len(verts)} {len(top)} {d}"]
    for v in verts:
        out.append(" ".join(repr(float(x)) for x in K.coords.get(v, ())))
    for s in top:
        out.append(" ".join(str(renum[v]) for v in s))
    return "\n".join(out) + "\n"


def write_mesh(K: SimplicialComplex, path: str | Path) -> None:
    Path(path).write_text(format_mesh(K))
