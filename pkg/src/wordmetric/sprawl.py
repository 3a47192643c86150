"""The sprawl statistic: mean normalised distance between two points of ``S_n``.

Two estimators that share a limit:

* :func:`sprawl_empirical` averages ``d(x, y) / n`` over pairs of an actual
  sphere, exhaustively or by uniform pair sampling;
* :func:`sprawl_mc` integrates ``||x - y||_L`` against cone measure squared.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .lattice import ConeMeasure, LimitShape, build_hull, cone_measure, sample_cone_measure
from .metric import MetricTable, compute_K

METHODS = ("empirical-exhaustive", "empirical-sampled", "monte-carlo")
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SprawlEstimate:
    value: float
    method: str
    size: int
    stderr: float
    pairs: int = 0
    # pairs whose distance fell outside the table and used ||x - y||_L instead
    approximated: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 2.0:
            raise ValueError(f"sprawl estimate {self.value} outside [0, 2]")

    def to_json(self):
        return asdict(self)


def _seed_sequence(rng):
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, np.random.Generator):
        return np.random.SeedSequence(int(rng.integers(2 ** 63)))
    return np.random.SeedSequence(0 if rng is None else int(rng))


def _pair_distances(table, shape, xs, ys):
    diff = xs - ys
    dist = table.length_of(diff).astype(np.float64)
    miss = dist < 0
    n_miss = int(miss.sum())
    if n_miss:
        dist[miss] = shape.norms_float(diff[miss])
    return dist, n_miss


def sprawl_empirical(table: MetricTable, n: int, pair_budget=10 ** 6, rng=None,
                     shape: LimitShape | None = None) -> SprawlEstimate:
    """Average of ``d(x, y) / n`` over ``x, y`` in ``S_n``.

    Exhaustive when ``|S_n|^2 <= pair_budget``; otherwise ``pair_budget``
    i.i.d. uniform pairs.  Distances come from the table when ``x - y`` is in
    the stored ball, else from ``||x - y||_L`` (counted in ``approximated``;
    a table of radius ``2n`` never needs this).
    """
    if not 1 <= n <= table.radius:
        raise ValueError(f"radius {n} outside 1..{table.radius}")
    if shape is None:
        shape = build_hull(table.gens)
    sphere = table.sphere(n)
    m = sphere.shape[0]
    missed = 0
    if m * m <= pair_budget:
        total = 0.0
        rows = max(1, _CHUNK // m)
        for lo in range(0, m, rows):
            xs = np.repeat(sphere[lo:lo + rows], m, axis=0)
            ys = np.tile(sphere, (min(rows, m - lo), 1))
            dist, k = _pair_distances(table, shape, xs, ys)
            total += float(dist.sum())
            missed += k
        return SprawlEstimate(total / (m * m * n), "empirical-exhaustive", n, 0.0,
                              m * m, missed)
    gen = np.random.default_rng(_seed_sequence(rng))
    s1 = s2 = 0.0
    for lo in range(0, pair_budget, _CHUNK):
        k = min(_CHUNK, pair_budget - lo)
        i = gen.integers(m, size=k)
        j = gen.integers(m, size=k)
        dist, miss = _pair_distances(table, shape, sphere[i], sphere[j])
        dist /= n
        s1 += float(dist.sum())
        s2 += float((dist * dist).sum())
        missed += miss
    mean = s1 / pair_budget
    var = max(s2 / pair_budget - mean * mean, 0.0) * pair_budget / (pair_budget - 1)
    return SprawlEstimate(mean, "empirical-sampled", n, math.sqrt(var / pair_budget),
                          pair_budget, missed)


def _mc_batch(shape, measure, seed, size):
    gen = np.random.default_rng(seed)
    x = sample_cone_measure(measure, shape, gen, size=size)
    y = sample_cone_measure(measure, shape, gen, size=size)
    v = shape.norms_float(x - y)
    mean = float(v.mean())
    return size, mean, float(((v - mean) ** 2).sum())


def sprawl_mc(shape: LimitShape, measure: ConeMeasure | None = None, samples=10 ** 6,
              rng=0, batch_size=1 << 16, threads=1) -> SprawlEstimate:
    """Monte Carlo ``E = integral of ||x - y||_L dmu(x) dmu(y)``.

    Batch ``b`` draws from the ``b``-th child of the seed sequence and batch
    statistics are merged in batch order, so the result depends only on
    ``(rng, samples, batch_size)``, never on ``threads``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    if measure is None:
        measure = cone_measure(shape)
    if shape.dim == 1:
        # two atoms of mass 1/2 at distance 0 or 2
        return SprawlEstimate(1.0, "monte-carlo", samples, 0.0, samples)
    sizes = [min(batch_size, samples - lo) for lo in range(0, samples, batch_size)]
    seeds = _seed_sequence(rng).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda a: _mc_batch(shape, measure, *a), jobs))
    else:
        parts = [_mc_batch(shape, measure, s, k) for s, k in jobs]
    count, mean, m2 = 0, 0.0, 0.0
    for k, mu, q in parts:
        total = count + k
        delta = mu - mean
        mean += delta * k / total
        m2 += q + delta * delta * count * k / total
        count = total
    stderr = math.sqrt(m2 / (count - 1) / count)
    return SprawlEstimate(mean, "monte-carlo", samples, stderr, samples)


@dataclass(frozen=True)
class SprawlConfig:
    radius: int = 60
    samples: int = 10 ** 6
    pair_budget: int = 10 ** 6
    seed: int = 0
    delta: float = 0.05
    batch_size: int = 1 << 16
    threads: int = 1


@dataclass(frozen=True)
class SprawlComparison:
    empirical: SprawlEstimate
    mc: SprawlEstimate
    difference: float
    tolerance: float
    margin: float

    @property
    def agree(self):
        return abs(self.difference) <= self.tolerance

    @property
    def below_two(self):
        return max(self.empirical.value, self.mc.value) < 2 - self.margin

    def to_json(self):
        return {
            "empirical": self.empirical.to_json(),
            "monte_carlo": self.mc.to_json(),
            "difference": self.difference,
            "tolerance": self.tolerance,
            "agree": self.agree,
            "margin": self.margin,
            "below_two": self.below_two,
        }


def sprawl_report(shape: LimitShape, measure: ConeMeasure | None, table: MetricTable,
                  config: SprawlConfig = SprawlConfig()) -> SprawlComparison:
    """Run both estimators; agreement allows ``3 sigma + K / n`` (finite-radius bias)."""
    if measure is None:
        measure = cone_measure(shape)
    emp = sprawl_empirical(table, config.radius, config.pair_budget, config.seed, shape)
    mc = sprawl_mc(shape, measure, config.samples, config.seed, config.batch_size,
                   config.threads)
    K = compute_K(table.gens, shape)
    tol = 3 * math.hypot(emp.stderr, mc.stderr) + K / config.radius
    return SprawlComparison(emp, mc, emp.value - mc.value, tol, config.delta)
