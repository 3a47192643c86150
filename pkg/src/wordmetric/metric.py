"""Word lengths on the Cayley graph of (Z^d, S).

:func:`bfs_ball` grows spheres by frontier expansion.  Two storage backends
produce identical tables: a dense flat-index grid over the bounding box
(numpy, the fast path) and a coordinate-keyed dict for boxes too large to
allocate.  :func:`word_length_oracle` is an independent exhaustive search
over spellings used to cross-check BFS.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .errors import CapacityExceeded, EmptySphere
from .lattice import GeneratorSet, LimitShape, build_hull, ehrhart_fit, lattice_points

log = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 200_000_000
DENSE_CELL_LIMIT = 250_000_000


@dataclass(frozen=True, eq=False)
class MetricTable:
    """Word lengths of every point of the ball ``B_N``.

    ``points`` is sorted by (length, lexicographic); sphere ``n`` is the slice
    ``points[offsets[n]:offsets[n + 1]]``.
    """

    gens: GeneratorSet
    radius: int
    points: np.ndarray
    lengths: np.ndarray
    offsets: np.ndarray
    _grid: np.ndarray | None = None
    _half: int = 0
    _lookup: dict | None = None

    @property
    def dim(self):
        return self.gens.dim

    def sphere(self, n):
        return self.points[self.offsets[n]:self.offsets[n + 1]]

    def ball(self, n):
        return self.points[:self.offsets[n + 1]]

    def ball_lengths(self, n):
        return self.lengths[:self.offsets[n + 1]]

    def sphere_size(self, n):
        return int(self.offsets[n + 1] - self.offsets[n])

    def ball_size(self, n):
        return int(self.offsets[n + 1])

    def __len__(self):
        return int(self.points.shape[0])

    def length_of(self, points):
        """Word lengths of arbitrary points; ``-1`` for points outside ``B_N``."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        if self._grid is not None:
            h = self._half
            inside = (np.abs(pts) <= h).all(axis=1)
            out = np.full(pts.shape[0], -1, dtype=np.int64)
            idx = np.ravel_multi_index(tuple((pts[inside] + h).T), self._grid.shape)
            out[inside] = self._grid.ravel()[idx]
            return out
        lookup = self._lookup
        if lookup is None:
            lookup = {tuple(p): int(l) for p, l in zip(self.points.tolist(), self.lengths)}
            object.__setattr__(self, "_lookup", lookup)
        return np.array([lookup.get(tuple(p), -1) for p in pts.tolist()], dtype=np.int64)

    def __getitem__(self, point):
        n = int(self.length_of([point])[0])
        if n < 0:
            raise KeyError(point)
        return n


def _sorted_table(gens, radius, spheres, grid=None, half=0):
    pts = [s for s in spheres]
    sizes = [s.shape[0] for s in pts]
    offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    points = np.concatenate(pts) if pts else np.zeros((0, gens.dim), dtype=np.int64)
    lengths = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    return MetricTable(gens, radius, points, lengths, offsets, grid, half)


def _bfs_dense(gens, radius):
    d = gens.dim
    half = radius * gens.max_coord
    shape = (2 * half + 1,) * d
    dtype = np.int16 if radius < np.iinfo(np.int16).max else np.int32
    grid = np.full(shape, -1, dtype=dtype)
    flat = grid.reshape(-1)
    strides = np.array([int(np.prod(shape[i + 1:])) for i in range(d)], dtype=np.int64)
    offs = gens.array @ strides
    centre = int(half * strides.sum())
    flat[centre] = 0
    frontier = np.array([centre], dtype=np.int64)
    spheres = [np.zeros((1, d), dtype=np.int64)]
    for n in range(1, radius + 1):
        cand = (frontier[:, None] + offs[None, :]).ravel()
        cand = np.unique(cand[flat[cand] < 0])
        flat[cand] = n
        frontier = cand
        coords = np.stack(np.unravel_index(cand, shape), axis=1).astype(np.int64) - half
        spheres.append(coords)
    return _sorted_table(gens, radius, spheres, grid, half)


def _bfs_dict(gens, radius):
    seen = {tuple([0] * gens.dim)}
    frontier = [tuple([0] * gens.dim)]
    spheres = [np.zeros((1, gens.dim), dtype=np.int64)]
    for _ in range(radius):
        nxt = set()
        for p in frontier:
            for s in gens.vectors:
                q = tuple(a + b for a, b in zip(p, s))
                if q not in seen:
                    nxt.add(q)
        seen |= nxt
        frontier = sorted(nxt)
        spheres.append(np.array(frontier, dtype=np.int64).reshape(-1, gens.dim))
    return _sorted_table(gens, radius, spheres)


def _largest_feasible(coeffs, budget):
    n = 0
    while sum(c * (n + 1) ** j for j, c in enumerate(coeffs)) <= budget:
        n += 1
    return n


def bfs_ball(gens: GeneratorSet, radius: int, backend="auto",
             max_points=DEFAULT_MAX_POINTS) -> MetricTable:
    """Word lengths on ``B_radius`` by breadth-first frontier expansion.

    ``B_N`` lies inside ``NQ``, so the Ehrhart count of ``NQ`` bounds the
    storage; the check runs before any allocation.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    shape = build_hull(gens)
    coeffs = ehrhart_fit(shape, gens.dim)
    bound = sum(c * radius ** j for j, c in enumerate(coeffs))
    if bound > max_points:
        raise CapacityExceeded(radius, _largest_feasible(coeffs, max_points), max_points)
    cells = (2 * radius * gens.max_coord + 1) ** gens.dim
    if backend == "auto":
        backend = "dense" if cells <= DENSE_CELL_LIMIT else "dict"
    log.debug("bfs_ball radius=%d backend=%s bound=%s", radius, backend, bound)
    if backend == "dense":
        return _bfs_dense(gens, radius)
    if backend == "dict":
        return _bfs_dict(gens, radius)
    raise ValueError(f"unknown backend {backend!r}")


# -- exhaustive oracle ------------------------------------------------------

@dataclass(frozen=True)
class Unreachable:
    """No spelling of total weight ``<= bound`` exists."""

    bound: int


@lru_cache(maxsize=None)
def _l1_sphere(r, t):
    """All integer vectors in Z^r with ``sum |a_i| == t``."""
    if r == 0:
        return ((),) if t == 0 else ()
    out = []
    for a in range(-t, t + 1):
        for rest in _l1_sphere(r - 1, t - abs(a)):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=256)
def _spelled(reps, t):
    if not reps:
        return frozenset()
    coeffs = np.array(_l1_sphere(len(reps), t), dtype=np.int64).reshape(-1, len(reps))
    vals = coeffs @ np.array(reps, dtype=np.int64)
    return frozenset(map(tuple, vals.tolist()))


def word_length_oracle(gens: GeneratorSet, w, bound: int, shape: LimitShape | None = None):
    """Minimal ``sum |alpha_i|`` over ``w = sum alpha_i a_i`` with one ``a_i`` per ``±`` pair.

    Enumerates coefficient vectors by total weight; when ``shape`` is given the
    search starts at ``ceil(||w||_L)``, a valid lower bound for word length.
    """
    w = tuple(int(x) for x in w)
    start = 0
    if shape is not None:
        s = int(shape.scaled_norms([w])[0])
        start = -(-s // shape.denominator)
    for t in range(start, bound + 1):
        if w in _spelled(gens.representatives, t):
            return t
    return Unreachable(bound)


# -- constants and checks ---------------------------------------------------

def compute_K(gens: GeneratorSet, shape: LimitShape | None = None) -> int:
    """Largest word length of a lattice point of ``Q``."""
    if shape is None:
        shape = build_hull(gens)
    targets = {tuple(p) for p in lattice_points(shape, 1).tolist()}
    origin = tuple([0] * gens.dim)
    seen = {origin}
    frontier = [origin]
    remaining = targets - seen
    n = 0
    while remaining:
        n += 1
        nxt = set()
        for p in frontier:
            for s in gens.vectors:
                q = tuple(a + b for a, b in zip(p, s))
                if q not in seen:
                    nxt.add(q)
        seen |= nxt
        remaining -= nxt
        frontier = list(nxt)
    return max(n, 1)


@dataclass
class NormBoundReport:
    checked: int
    K: int
    violations: list
    max_gap: Fraction

    @property
    def ok(self):
        return not self.violations


def verify_norm_bounds(table: MetricTable, shape: LimitShape, K: int) -> NormBoundReport:
    """Check ``||w||_L <= |w| < ||w||_L + K`` on every stored point."""
    c = shape.denominator
    scaled = shape.scaled_norms(table.points)
    lengths = table.lengths * c
    bad = (scaled > lengths) | (lengths >= scaled + K * c)
    violations = [
        (tuple(p), int(l), Fraction(int(s), c))
        for p, l, s in zip(table.points[bad].tolist(), table.lengths[bad], scaled[bad])
    ]
    gap = Fraction(int((lengths - scaled).max()), c) if len(table) else Fraction(0)
    return NormBoundReport(len(table), K, violations, gap)


def tiling_check(shape: LimitShape, gens: GeneratorSet, n: int) -> bool:
    """Discrete form of ``(n-1)Q + S = nQ``."""
    if n < 2:
        raise ValueError("tiling check needs n >= 2")
    pts = lattice_points(shape, n)
    c = shape.denominator
    covered = np.zeros(pts.shape[0], dtype=bool)
    for s in gens.array:
        covered |= shape.scaled_norms(pts - s) <= (n - 1) * c
    return bool(covered.all())


def hausdorff_gap(table: MetricTable, shape: LimitShape, n: int) -> Fraction:
    """``max over S_n of 1 - ||x||_L / n``: how far ``S_n / n`` shrinks inside ``L``."""
    if n < 1 or n > table.radius:
        raise ValueError(f"radius {n} outside 1..{table.radius}")
    sphere = table.sphere(n)
    if sphere.shape[0] == 0:
        raise EmptySphere(f"S_{n} is empty")
    smallest = int(shape.scaled_norms(sphere).min())
    return 1 - Fraction(smallest, n * shape.denominator)


# -- simple spellings -------------------------------------------------------

@dataclass(frozen=True)
class SpellingWitness:
    coefficients: dict

    @property
    def length(self):
        return sum(self.coefficients.values())

    def value(self, dim):
        return tuple(sum(a * g[i] for g, a in self.coefficients.items()) for i in range(dim))


def _facet_combination(vertices, w, m):
    """Nonnegative integers summing to ``m`` with ``sum a_i v_i == w``, or None."""
    k = len(vertices)

    @lru_cache(maxsize=None)
    def go(i, rest, left):
        if i == k - 1:
            v = vertices[i]
            if all(r == left * x for r, x in zip(rest, v)):
                return (left,)
            return None
        v = vertices[i]
        for a in range(left, -1, -1):
            sub = go(i + 1, tuple(r - a * x for r, x in zip(rest, v)), left - a)
            if sub is not None:
                return (a,) + sub
        return None

    return go(0, tuple(w), m)


def simple_spelling(shape: LimitShape, w) -> SpellingWitness | None:
    """A spelling of ``w`` by vertex generators of one facet, if one exists.

    Such a spelling has length ``||w||_L`` and is therefore geodesic.  The
    origin has the empty spelling.
    """
    w = tuple(int(x) for x in w)
    if not any(w):
        return SpellingWitness({})
    verts = shape.vertices
    if shape.dim == 2:
        for f in shape.facets:
            u, v = (verts[i] for i in f.vertex_indices)
            det = u[0] * v[1] - u[1] * v[0]
            a, ra = divmod(w[0] * v[1] - w[1] * v[0], det)
            b, rb = divmod(u[0] * w[1] - u[1] * w[0], det)
            if ra == 0 and rb == 0 and a >= 0 and b >= 0:
                return SpellingWitness({g: c for g, c in ((u, a), (v, b)) if c})
        return None
    for f in shape.facets:
        num = sum(a * b for a, b in zip(f.normal, w))
        if num <= 0 or num % f.support:
            continue
        m = num // f.support
        # on this facet's sector only if the facet attains the norm
        if Fraction(num, f.support) * shape.denominator != int(shape.scaled_norms([w])[0]):
            continue
        fv = [verts[i] for i in f.vertex_indices]
        sol = _facet_combination(tuple(fv), w, m)
        if sol is not None:
            return SpellingWitness({g: c for g, c in zip(fv, sol) if c})
    return None


def has_simple_spelling(shape: LimitShape, w) -> bool:
    return simple_spelling(shape, w) is not None


def simple_spelling_mask(shape: LimitShape, points) -> np.ndarray:
    """Vectorised :func:`has_simple_spelling` (closed form in the plane)."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, shape.dim)
    if shape.dim != 2:
        return np.array([has_simple_spelling(shape, p) for p in pts.tolist()], dtype=bool)
    mask = ~pts.any(axis=1)
    x, y = pts[:, 0], pts[:, 1]
    for f in shape.facets:
        u, v = (shape.vertices[i] for i in f.vertex_indices)
        det = u[0] * v[1] - u[1] * v[0]
        a = x * v[1] - y * v[0]
        b = u[0] * y - u[1] * x
        if det < 0:
            a, b, det = -a, -b, -det
        mask |= (a >= 0) & (b >= 0) & (a % det == 0) & (b % det == 0)
    return mask


# -- on-disk cache ----------------------------------------------------------

def cache_key(gens: GeneratorSet) -> str:
    doc = json.dumps({"dim": gens.dim, "generators": [list(v) for v in gens.vectors]},
                     separators=(",", ":"))
    return hashlib.sha256(doc.encode()).hexdigest()[:24]


def cache_path(cache_dir, gens):
    return os.path.join(cache_dir, f"{cache_key(gens)}.wmt")


def write_cache(table: MetricTable, path):
    """Little-endian int64: dim, N, #gens, gens..., #records, (coords..., length)*.

    Records are sorted lexicographically by point.
    """
    gens = table.gens
    order = np.lexsort(table.points.T[::-1])
    records = np.concatenate([table.points[order], table.lengths[order, None]], axis=1)
    header = [gens.dim, table.radius, len(gens)] + [x for v in gens.vectors for x in v]
    header.append(records.shape[0])
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        np.asarray(header, dtype="<i8").tofile(fh)
        records.astype("<i8").tofile(fh)
    os.replace(tmp, path)


def read_cache(path, radius=None) -> MetricTable:
    raw = np.fromfile(path, dtype="<i8")
    d, n, k = (int(x) for x in raw[:3])
    gvec = raw[3:3 + k * d].reshape(k, d)
    count = int(raw[3 + k * d])
    records = raw[4 + k * d:].reshape(count, d + 1).astype(np.int64)
    gens = GeneratorSet(d, tuple(map(tuple, gvec.tolist())))
    radius = n if radius is None else radius
    if radius > n:
        raise ValueError(f"cache holds radius {n} < {radius}")
    records = records[records[:, d] <= radius]
    order = np.lexsort(tuple(records[:, :d].T[::-1]) + (records[:, d],))
    records = records[order]
    sizes = np.bincount(records[:, d], minlength=radius + 1)
    spheres = np.split(records[:, :d], np.cumsum(sizes)[:-1])
    return _sorted_table(gens, radius, spheres)


def load_or_build(gens: GeneratorSet, radius: int, cache_dir=None, **kwargs) -> MetricTable:
    """:func:`bfs_ball` behind the binary cache (when ``cache_dir`` is set)."""
    if cache_dir is None:
        return bfs_ball(gens, radius, **kwargs)
    path = cache_path(cache_dir, gens)
    if os.path.exists(path):
        raw = np.fromfile(path, dtype="<i8", count=2)
        if int(raw[1]) >= radius:
            table = read_cache(path, radius)
            if table.gens == gens:
                return bfs_ball_from(table, **kwargs)
    table = bfs_ball(gens, radius, **kwargs)
    os.makedirs(cache_dir, exist_ok=True)
    write_cache(table, path)
    return table


def bfs_ball_from(table: MetricTable, backend="auto", max_points=DEFAULT_MAX_POINTS):
    """Attach a dense lookup grid to a table loaded without one."""
    gens, radius = table.gens, table.radius
    half = radius * gens.max_coord
    cells = (2 * half + 1) ** gens.dim
    if backend == "dict" or (backend == "auto" and cells > DENSE_CELL_LIMIT):
        return table
    dtype = np.int16 if radius < np.iinfo(np.int16).max else np.int32
    grid = np.full((2 * half + 1,) * gens.dim, -1, dtype=dtype)
    grid[tuple((table.points + half).T)] = table.lengths
    return MetricTable(gens, radius, table.points, table.lengths, table.offsets, grid, half)
