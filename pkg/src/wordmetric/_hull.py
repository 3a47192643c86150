"""Exact convex hulls of small integer point sets.

Everything here works on Python integers, so orientation tests never need a
tolerance.  Points are passed as ``{id: coords}`` mappings; ids are returned
instead of coordinates so callers keep their own indexing.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import NotFullRank


def det(rows):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            f = m[i][c] / m[r][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def adjugate(rows):
    """Integer adjugate, so that ``adj @ M == det(M) * I``."""
    n = len(rows)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return adj


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def hyperplane_through(points):
    """Primitive integer normal and offset of the hyperplane through k points in R^k."""
    p0 = points[0]
    k = len(p0)
    rows = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    normal = []
    for j in range(k):
        minor = [[r[c] for c in range(k) if c != j] for r in rows]
        normal.append((-1) ** j * det(minor))
    normal = primitive(normal)
    return normal, dot(normal, p0)


def project(coords, normal):
    """Drop one coordinate on which ``normal`` is nonzero.

    Restricted to the hyperplane this is an affine bijection, so extreme
    points and face structure are preserved.
    """
    j = next(i for i, x in enumerate(normal) if x != 0)
    return {i: p[:j] + p[j + 1:] for i, p in coords.items()}


def _initial_simplex(ids, coords, k):
    chosen = [ids[0]]
    p0 = coords[ids[0]]
    diffs = []
    for i in ids[1:]:
        cand = diffs + [[a - b for a, b in zip(coords[i], p0)]]
        if rank(cand) == len(cand):
            diffs = cand
            chosen.append(i)
            if len(chosen) == k + 1:
                return chosen
    raise NotFullRank(f"points span an affine subspace of dimension {len(chosen) - 1} < {k}")


def simplicial_hull(coords):
    """Beneath-beyond incremental hull.

    Returns outward simplicial facets ``(ids, normal, offset)`` with
    ``<normal, x> <= offset`` on the hull.  Coplanar neighbouring facets are
    not merged here.
    """
    ids = sorted(coords)
    k = len(coords[ids[0]])
    start = _initial_simplex(ids, coords, k)
    # scaled interior point: centroid of the start simplex times (k+1)
    inner = [sum(coords[i][c] for i in start) for c in range(k)]
    scale = k + 1

    def make(face):
        normal, off = hyperplane_through([coords[i] for i in face])
        if dot(normal, inner) > scale * off:
            normal = tuple(-x for x in normal)
            off = -off
        return (tuple(face), normal, off)

    facets = [make(f) for f in combinations(start, k)]
    used = set(start)
    for i in ids:
        if i in used:
            continue
        p = coords[i]
        visible = [f for f in facets if dot(f[1], p) > f[2]]
        if not visible:
            continue
        ridges = {}
        for f in visible:
            for r in combinations(f[0], k - 1):
                key = frozenset(r)
                ridges[key] = ridges.get(key, 0) + 1
        vis = {id(f) for f in visible}
        facets = [f for f in facets if id(f) not in vis]
        for r, count in ridges.items():
            if count == 1:
                facets.append(make(sorted(r) + [i]))
    return facets


def polytope_facets(coords):
    """Facets of conv(coords) as ``(normal, offset, vertex_ids)``.

    ``vertex_ids`` holds only the extreme points of each facet; the union over
    all facets is exactly the vertex set of the polytope.  The point set must
    be full-dimensional in its ambient coordinates.
    """
    ids = sorted(coords)
    k = len(coords[ids[0]])
    if k == 1:
        lo = min(ids, key=lambda i: coords[i][0])
        hi = max(ids, key=lambda i: coords[i][0])
        if lo == hi:
            raise NotFullRank("a single point has no 1-dimensional hull")
        return [((-1,), -coords[lo][0], (lo,)), ((1,), coords[hi][0], (hi,))]
    planes = sorted({(n, off) for _, n, off in simplicial_hull(coords)})
    out = []
    for normal, off in planes:
        on = {i: coords[i] for i in ids if dot(normal, coords[i]) == off}
        if len(on) == k:
            verts = tuple(sorted(on))
        else:
            sub = project(on, normal)
            verts = tuple(sorted({v for *_, vs in polytope_facets(sub) for v in vs}))
        out.append((normal, off, verts))
    return out


def fan_triangulation(coords, vertex_ids, order):
    """Pulling triangulation of a full-dimensional polytope.

    The apex of every fan is the vertex that comes first under ``order`` (a
    key function over ids); lower-dimensional faces are fanned the same way.
    Returns a sorted list of simplices, each a tuple of ids sorted by ``order``.
    """
    verts = sorted(vertex_ids, key=order)
    k = len(coords[verts[0]])
    if len(verts) == k + 1:
        return [tuple(verts)]
    apex = verts[0]
    sub = {i: coords[i] for i in verts}
    simplices = []
    for normal, _, face in polytope_facets(sub):
        if apex in face:
            continue
        face_coords = project({i: sub[i] for i in face}, normal)
        for s in fan_triangulation(face_coords, face, order):
            simplices.append((apex,) + s)
    return sorted(simplices, key=lambda s: [order(i) for i in s])
