"""Independent reference computations for the test-suite.

None of these call into the code path they are used to check.
"""

from collections import deque
from fractions import Fraction
from itertools import product

import numpy as np

from wordmetric.lattice import GeneratorSet


def shoelace(vertices):
    """Area of a planar polygon given in cyclic order."""
    s = 0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return Fraction(abs(s), 2)


def angular(vertices):
    import math
    return sorted(vertices, key=lambda v: math.atan2(v[1], v[0]))


def inside_polygon(p, poly):
    """Closed point-in-convex-polygon test via cross products (poly counter-clockwise)."""
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) < 0:
            return False
    return True


def on_polygon_boundary(p, poly):
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        cross = (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0)
        if cross == 0 and min(x0, x1) <= p[0] <= max(x0, x1) and min(y0, y1) <= p[1] <= max(y0, y1):
            return True
    return False


def bfs_lengths(vectors, radius):
    """Plain queue BFS; returns {point: length} for the ball of the given radius."""
    d = len(vectors[0])
    origin = (0,) * d
    dist = {origin: 0}
    q = deque([origin])
    while q:
        p = q.popleft()
        if dist[p] == radius:
            continue
        for s in vectors:
            r = tuple(a + b for a, b in zip(p, s))
            if r not in dist:
                dist[r] = dist[p] + 1
                q.append(r)
    return dist


def l1_ball_count(n, d):
    """Number of lattice points with l1 norm <= n, by direct enumeration."""
    return sum(1 for p in product(range(-n, n + 1), repeat=d) if sum(map(abs, p)) <= n)


def random_generating_set(seed, dim=3, pairs=4, box=2):
    """Seeded random symmetric generating set of Z^dim (rejection sampling)."""
    rng = np.random.default_rng(seed)
    while True:
        vecs = [tuple(int(x) for x in rng.integers(-box, box + 1, size=dim)) for _ in range(pairs)]
        try:
            return GeneratorSet.from_vectors(vecs, symmetrize=True)
        except Exception:
            continue


def scipy_volume(vectors):
    from scipy.spatial import ConvexHull
    return ConvexHull(np.array(vectors, dtype=float)).volume
