"""Limit shapes, Minkowski norms, cone measure and lattice-point counts.

All geometry is exact: hull facets carry primitive integer normals, volumes
and measures are :class:`fractions.Fraction`.  Floating point only appears in
:func:`sample_cone_measure` and the float norm helper used by the samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from . import _hull
from .errors import (
    DimensionMismatch,
    DimensionUnsupported,
    FitMismatch,
    NotFullRank,
    NotGenerating,
    NotSymmetric,
    ZeroGenerator,
    ZeroVector,
)

TRIANGULATION_RULE = (
    "pulling fan: each facet (and recursively each face) is coned from its "
    "lowest-index vertex; vertices indexed in lexicographic order"
)


def _neg(v):
    return tuple(-x for x in v)


@dataclass(frozen=True)
class GeneratorSet:
    """A symmetric generating set of Z^d.

    ``vectors`` is stored sorted and deduplicated.  Construction validates the
    standing assumptions: no zero vector, ``S == -S`` and the gcd of all
    maximal minors equal to 1.
    """

    dim: int
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(sorted({tuple(int(x) for x in v) for v in self.vectors}))
        object.__setattr__(self, "vectors", vecs)
        if self.dim < 1:
            raise DimensionMismatch(f"dimension must be positive, got {self.dim}")
        if not vecs:
            raise NotFullRank("empty generating set")
        for v in vecs:
            if len(v) != self.dim:
                raise DimensionMismatch(f"generator {v} is not {self.dim}-dimensional")
            if not any(v):
                raise ZeroGenerator("the zero vector is not allowed as a generator")
        present = set(vecs)
        missing = [v for v in vecs if _neg(v) not in present]
        if missing:
            raise NotSymmetric(f"inverse of {missing[0]} is missing")
        reps = self.representatives
        if _hull.rank(reps) < self.dim:
            raise NotFullRank("generators span a proper subspace")
        g = 0
        for rows in combinations(reps, self.dim):
            g = math.gcd(g, _hull.det(rows))
            if g == 1:
                break
        if g != 1:
            raise NotGenerating(f"generators span a sublattice of index {g}")

    @classmethod
    def from_vectors(cls, vectors, symmetrize=False):
        vectors = [tuple(int(x) for x in v) for v in vectors]
        if not vectors:
            raise NotFullRank("empty generating set")
        if symmetrize:
            vectors = vectors + [_neg(v) for v in vectors]
        return cls(len(vectors[0]), tuple(vectors))

    @cached_property
    def representatives(self):
        """One vector from each ``±`` pair: the one whose first nonzero entry is positive."""
        return tuple(v for v in self.vectors if next(x for x in v if x) > 0)

    @cached_property
    def array(self):
        return np.array(self.vectors, dtype=np.int64).reshape(-1, self.dim)

    @property
    def max_coord(self):
        return max(abs(x) for v in self.vectors for x in v)

    def __len__(self):
        return len(self.vectors)


@dataclass(frozen=True)
class Facet:
    vertex_indices: tuple
    normal: tuple
    support: int
    simplices: tuple


@dataclass(frozen=True)
class LimitShape:
    """Hull ``Q`` of a generating set together with its boundary ``L``.

    ``boundary_generators`` lists generators lying on ``L`` that are not
    vertices (e.g. ``e1`` for the cube generated by ``±e1±e2±e3, ±e1, ...``).
    """

    dim: int
    vertices: tuple
    facets: tuple
    volume: Fraction
    boundary_generators: tuple = ()

    @cached_property
    def simplices(self):
        """All facet simplices in facet order (the index space of cone measure)."""
        return tuple(s for f in self.facets for s in f.simplices)

    @cached_property
    def simplex_facet(self):
        return tuple(i for i, f in enumerate(self.facets) for _ in f.simplices)

    @cached_property
    def normals(self):
        return np.array([f.normal for f in self.facets], dtype=np.int64)

    @cached_property
    def supports(self):
        return np.array([f.support for f in self.facets], dtype=np.int64)

    @cached_property
    def denominator(self):
        """lcm of the facet supports; norms are integers over this."""
        return math.lcm(*(f.support for f in self.facets))

    @cached_property
    def _scaled_normals(self):
        c = self.denominator
        return self.normals * (c // self.supports)[:, None]

    @cached_property
    def vertex_array(self):
        return np.array(self.vertices, dtype=np.int64).reshape(-1, self.dim)

    @cached_property
    def simplex_vertices(self):
        """``(n_simplices, d, d)`` array; row ``j`` of entry ``s`` is vertex ``j``."""
        return self.vertex_array[np.array(self.simplices, dtype=np.int64)]

    @cached_property
    def _sector_tests(self):
        # sign(det) * adj(V) maps x to det-scaled barycentric coordinates
        mats = []
        for s in self.simplices:
            cols = [[self.vertices[v][r] for v in s] for r in range(self.dim)]
            sign = 1 if _hull.det(cols) > 0 else -1
            mats.append([[sign * a for a in row] for row in _hull.adjugate(cols)])
        return np.array(mats, dtype=np.int64)

    def scaled_norms(self, points):
        """``denominator * ||x||_L`` for each row of ``points`` (exact int64)."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        if pts.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return (pts @ self._scaled_normals.T).max(axis=1)

    def norms_float(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.dim)
        return (pts @ (self.normals / self.supports[:, None]).T).max(axis=1)

    def sectors(self, points):
        """Vectorised :func:`sector_of`; zero rows get ``-1``."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        out = np.empty(pts.shape[0], dtype=np.int64)
        tests = self._sector_tests
        for lo in range(0, pts.shape[0], 65536):
            chunk = pts[lo:lo + 65536]
            bary = np.einsum("sij,mj->msi", tests, chunk)
            inside = (bary >= 0).all(axis=2)
            idx = inside.argmax(axis=1)
            idx[~chunk.any(axis=1)] = -1
            out[lo:lo + 65536] = idx
        return out


@dataclass(frozen=True)
class ConeMeasure:
    weights: tuple
    triangulation_rule: str = field(default=TRIANGULATION_RULE)

    def per_facet(self, shape):
        totals = [Fraction(0)] * len(shape.facets)
        for w, f in zip(self.weights, shape.simplex_facet):
            totals[f] += w
        return totals


def _simplex_abs_det(shape_vertices, simplex):
    cols = [[shape_vertices[v][r] for v in simplex] for r in range(len(simplex))]
    return abs(_hull.det(cols))


@lru_cache(maxsize=64)
def build_hull(gens: GeneratorSet) -> LimitShape:
    """Exact hull ``Q = conv(S)`` with facets, normals, triangulation and volume."""
    d = gens.dim
    if any(not any(v) for v in gens.vectors):
        raise ZeroGenerator("the zero vector is not allowed as a generator")
    coords = dict(enumerate(gens.vectors))
    raw = _hull.polytope_facets(coords)
    vertex_ids = sorted({i for *_, vs in raw for i in vs}, key=lambda i: coords[i])
    vertices = tuple(coords[i] for i in vertex_ids)
    index = {i: k for k, i in enumerate(vertex_ids)}

    facets = []
    for normal, off, vs in raw:
        if off <= 0:
            raise NotFullRank("origin is not interior to the hull")
        local = sorted(index[i] for i in vs)
        if d == 1:
            simplices = (tuple(local),)
        else:
            face = _hull.project({index[i]: coords[i] for i in vs}, normal)
            simplices = tuple(_hull.fan_triangulation(face, local, lambda v: v))
        facets.append(Facet(tuple(local), tuple(normal), off, simplices))
    facets.sort(key=lambda f: f.vertex_indices)

    volume = sum(
        (Fraction(_simplex_abs_det(vertices, s), math.factorial(d))
         for f in facets for s in f.simplices),
        Fraction(0),
    )
    on_boundary = tuple(
        v for v in gens.vectors
        if v not in set(vertices)
        and any(_hull.dot(f.normal, v) == f.support for f in facets)
    )
    return LimitShape(d, vertices, tuple(facets), volume, on_boundary)


def minkowski_norm(shape: LimitShape, x) -> Fraction:
    """``||x||_L`` as an exact rational (max over facets of ``<n, x> / c``)."""
    x = tuple(int(a) for a in x)
    if len(x) != shape.dim:
        raise DimensionMismatch(f"point of dimension {len(x)} for a {shape.dim}-d shape")
    return max(Fraction(_hull.dot(f.normal, x), f.support) for f in shape.facets)


def cone_measure(shape: LimitShape) -> ConeMeasure:
    denom = math.factorial(shape.dim) * shape.volume
    weights = tuple(
        Fraction(_simplex_abs_det(shape.vertices, s)) / denom for s in shape.simplices
    )
    return ConeMeasure(weights)


def sector_of(shape: LimitShape, x) -> int:
    """Index of the facet simplex whose cone contains ``x`` (lowest index on ties)."""
    x = tuple(int(a) for a in x)
    if len(x) != shape.dim:
        raise DimensionMismatch(f"point of dimension {len(x)} for a {shape.dim}-d shape")
    if not any(x):
        raise ZeroVector("the origin lies in every sector")
    return int(shape.sectors([x])[0])


def lattice_points(shape: LimitShape, n: int, strict=False):
    """Lattice points of ``nQ`` (of its interior when ``strict``), lexicographic order."""
    r = n * max(abs(c) for v in shape.vertices for c in v)
    axes = [np.arange(-r, r + 1, dtype=np.int64)] * shape.dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, shape.dim)
    bound = n * shape.denominator
    s = shape.scaled_norms(grid)
    keep = s < bound if strict else s <= bound
    return grid[keep]


def count_lattice_points(shape: LimitShape, n: int) -> int:
    if n < 0:
        raise ValueError("dilation factor must be nonnegative")
    return int(lattice_points(shape, n).shape[0])


def _solve_exact(a, b):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def ehrhart_fit(shape: LimitShape, max_n: int) -> list:
    """Ehrhart polynomial coefficients ``[a_0, ..., a_d]`` (ascending powers).

    Interpolates through the counts at ``n = 0..d``, then checks every count up
    to ``max_n`` and that the leading coefficient is the volume.
    """
    d = shape.dim
    if max_n < d:
        raise ValueError(f"max_n must be at least the dimension {d}")
    ns = list(range(d + 1))
    coeffs = _solve_exact(
        [[n ** j for j in range(d + 1)] for n in ns],
        [count_lattice_points(shape, n) for n in ns],
    )
    for n in range(d + 1, max_n + 1):
        predicted = sum(c * n ** j for j, c in enumerate(coeffs))
        actual = count_lattice_points(shape, n)
        if predicted != actual:
            raise FitMismatch(f"n={n}: polynomial predicts {predicted}, enumerated {actual}")
    if coeffs[-1] != shape.volume:
        raise FitMismatch(f"leading coefficient {coeffs[-1]} != volume {shape.volume}")
    return coeffs


@dataclass(frozen=True)
class PickResult:
    interior: int
    boundary: int
    area: Fraction
    holds: bool


def picks_identity(shape: LimitShape) -> PickResult:
    if shape.dim != 2:
        raise DimensionUnsupported("Pick's identity is a planar statement")
    total = count_lattice_points(shape, 1)
    interior = int(lattice_points(shape, 1, strict=True).shape[0])
    boundary = total - interior
    holds = shape.volume == interior + Fraction(boundary, 2) - 1
    return PickResult(interior, boundary, shape.volume, holds)


def sample_cone_measure(measure: ConeMeasure, shape: LimitShape, rng, size=None):
    """Draw points of ``L`` distributed by cone measure.

    A simplex is chosen with probability equal to its weight, then a uniform
    point in it from normalised exponential barycentric coordinates.  Returns
    shape ``(d,)`` for ``size=None`` else ``(size, d)``.
    """
    m = 1 if size is None else int(size)
    p = np.array([float(w) for w in measure.weights])
    p /= p.sum()
    which = rng.choice(len(p), size=m, p=p)
    bary = rng.standard_exponential((m, shape.dim))
    bary /= bary.sum(axis=1, keepdims=True)
    pts = np.einsum("mj,mjk->mk", bary, shape.simplex_vertices[which].astype(np.float64))
    return pts[0] if size is None else pts
