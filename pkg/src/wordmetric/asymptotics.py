"""Growth series, sector statistics and sphere/ball averages."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateWindow, DimensionUnsupported, NotHomogeneous
from .lattice import (
    ConeMeasure, LimitShape, _solve_exact, build_hull, cone_measure, sample_cone_measure,
)
from .metric import MetricTable, simple_spelling_mask


@dataclass(frozen=True)
class GrowthSeries:
    beta: tuple
    sigma: tuple


def growth_series(table: MetricTable) -> GrowthSeries:
    sigma = tuple(int(x) for x in np.diff(table.offsets))
    beta = tuple(int(x) for x in table.offsets[1:])
    return GrowthSeries(beta, sigma)


@dataclass(frozen=True)
class LeadingCoefficient:
    estimate: Fraction
    slope: Fraction
    residual: Fraction
    window: tuple
    error: Fraction

    def __float__(self):
        return float(self.estimate)


def _least_squares(xs, ys, terms):
    rows = [[x ** j for j in range(terms)] for x in xs]
    ata = [[sum(r[i] * r[j] for r in rows) for j in range(terms)] for i in range(terms)]
    aty = [sum(r[i] * y for r, y in zip(rows, ys)) for i in range(terms)]
    return _solve_exact(ata, aty)


def leading_coefficient(seq, k, window=None) -> LeadingCoefficient:
    """Fit ``seq(n) / n^k ~ c0 + c1 / n`` by exact least squares.

    ``window`` is an inclusive ``(lo, hi)`` range of indices into ``seq``; by
    default the top half.  ``residual`` is the largest absolute residual;
    ``error`` also covers truncation, as the larger of the residual and the
    shift in ``c0`` when a ``c2 / n^2`` term is admitted.
    """
    if window is None:
        window = (len(seq) // 2, len(seq) - 1)
    lo, hi = window
    if lo < 1 or hi >= len(seq) or hi - lo + 1 < 8:
        raise DegenerateWindow(f"window {window} needs >= 8 radii inside 1..{len(seq) - 1}")
    ns = range(lo, hi + 1)
    ys = [Fraction(int(seq[n]), n ** k) for n in ns]
    xs = [Fraction(1, n) for n in ns]
    c0, slope = _least_squares(xs, ys, 2)
    resid = max(abs(y - c0 - slope * x) for x, y in zip(xs, ys))
    c0_quad = _least_squares(xs, ys, 3)[0]
    return LeadingCoefficient(c0, slope, resid, (lo, hi), max(resid, abs(c0 - c0_quad)))


@dataclass(frozen=True)
class SectorHistogram:
    radius: int
    counts: tuple

    @property
    def total(self):
        return sum(self.counts)

    def frequencies(self):
        t = self.total
        return [Fraction(c, t) for c in self.counts]


def sector_histogram(table: MetricTable, shape: LimitShape, n) -> SectorHistogram:
    sphere = table.sphere(n)
    n_simplices = len(shape.simplices)
    if n == 0:
        return SectorHistogram(0, (0,) * n_simplices)
    idx = shape.sectors(sphere)
    counts = np.bincount(idx, minlength=n_simplices)
    return SectorHistogram(n, tuple(int(c) for c in counts))


@dataclass
class ConvergenceReport:
    radii: list
    deviations: list
    histograms: list = field(repr=False)
    first_quartile_median: float = 0.0
    last_quartile_median: float = 0.0

    @property
    def decreasing(self):
        return self.last_quartile_median <= self.first_quartile_median


def measure_convergence_report(table, shape, radii, measure=None) -> ConvergenceReport:
    """``D(n) = max over simplices |mu_n - mu|`` for each radius, plus a trend summary."""
    if measure is None:
        measure = cone_measure(shape)
    radii = list(radii)
    hists, devs = [], []
    for n in radii:
        h = sector_histogram(table, shape, n)
        freq = h.frequencies()
        devs.append(float(max(abs(f - w) for f, w in zip(freq, measure.weights))))
        hists.append(h)
    q = max(1, len(radii) // 4)
    return ConvergenceReport(
        radii, devs, hists,
        statistics.median(devs[:q]) if devs else 0.0,
        statistics.median(devs[-q:]) if devs else 0.0,
    )


# -- functionals ------------------------------------------------------------

KINDS = (
    "word-length-power",
    "l-norm-power",
    "euclidean-power",
    "coordinate-monomial",
    "coprime-indicator",
    "constant-one",
)


@dataclass(frozen=True)
class Functional:
    """A function on Z^d to average.

    ``p`` is the power for the ``*-power`` kinds; ``exponents`` the per-axis
    exponents of a coordinate monomial.
    """

    kind: str
    p: int = 1
    exponents: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.p < 0:
            raise ValueError("power must be nonnegative")

    @property
    def order(self):
        if self.kind in ("coprime-indicator", "constant-one"):
            return 0
        if self.kind == "coordinate-monomial":
            return sum(self.exponents)
        return self.p

    @property
    def homogeneous(self):
        return self.kind != "coprime-indicator"

    @property
    def exact(self):
        return not (self.kind == "euclidean-power" and self.p % 2)

    def evaluate_point(self, x, shape=None):
        """Homogeneous representative ``g`` at a real point (used for sampling)."""
        x = np.asarray(x, dtype=np.float64)
        if self.kind in ("word-length-power", "l-norm-power"):
            return shape.norms_float(x) ** self.p
        if self.kind == "euclidean-power":
            return np.linalg.norm(x.reshape(-1, x.shape[-1]), axis=1) ** self.p
        if self.kind == "coordinate-monomial":
            return np.prod(x.reshape(-1, x.shape[-1]) ** np.array(self.exponents), axis=1)
        if self.kind == "constant-one":
            return np.ones(x.reshape(-1, x.shape[-1]).shape[0])
        raise NotHomogeneous("the coprime indicator has no homogeneous limit")


def _int_power_sum(values, p):
    if p == 0:
        return int(values.size)
    big = int(np.abs(values).max()) if values.size else 0
    if big ** p * max(values.size, 1) < 2 ** 62:
        return int((values ** p).sum())
    return sum(int(v) ** p for v in values.tolist())


def functional_sum(functional: Functional, points, lengths, shape=None):
    """Exact (int/Fraction) sum of the functional, or float for odd Euclidean powers."""
    pts = np.asarray(points, dtype=np.int64)
    kind, p = functional.kind, functional.p
    if kind == "word-length-power":
        return _int_power_sum(np.asarray(lengths, dtype=np.int64), p)
    if kind == "l-norm-power":
        c = shape.denominator
        return Fraction(_int_power_sum(shape.scaled_norms(pts), p), c ** p)
    if kind == "euclidean-power":
        sq = (pts * pts).sum(axis=1)
        if p % 2 == 0:
            return _int_power_sum(sq, p // 2)
        return float(np.sum(np.sqrt(sq.astype(np.float64)) ** p))
    if kind == "coordinate-monomial":
        vals = np.ones(pts.shape[0], dtype=object)
        for i, e in enumerate(functional.exponents):
            vals = vals * np.array([int(v) ** e for v in pts[:, i].tolist()], dtype=object)
        return sum(vals.tolist())
    if kind == "coprime-indicator":
        g = np.gcd.reduce(np.abs(pts), axis=1)
        return int((g == 1).sum())
    return int(pts.shape[0])


def _average(total, count):
    if isinstance(total, float):
        return total / count
    return Fraction(total, count) if isinstance(total, int) else total / count


def sphere_average(table: MetricTable, functional: Functional, n, shape=None):
    if shape is None and functional.kind == "l-norm-power":
        shape = build_hull(table.gens)
    sphere = table.sphere(n)
    lengths = np.full(sphere.shape[0], n, dtype=np.int64)
    return _average(functional_sum(functional, sphere, lengths, shape), sphere.shape[0])


def ball_average(table: MetricTable, functional: Functional, n, shape=None):
    if shape is None and functional.kind == "l-norm-power":
        shape = build_hull(table.gens)
    ball = table.ball(n)
    return _average(functional_sum(functional, ball, table.ball_lengths(n), shape),
                    ball.shape[0])


@dataclass(frozen=True)
class IntegralEstimate:
    value: float | Fraction
    stderr: float
    exact: bool
    samples: int = 0


def limit_integral(functional: Functional, shape: LimitShape, measure: ConeMeasure,
                   rng=None, samples=200_000) -> IntegralEstimate:
    """``integral over L of g dmu`` for the homogeneous representative ``g``.

    Norm powers and the constant are identically 1 on ``L``; everything else is
    integrated by Monte Carlo against cone measure.
    """
    if not functional.homogeneous:
        raise NotHomogeneous("the coprime indicator is not asymptotically homogeneous")
    if functional.kind in ("word-length-power", "l-norm-power", "constant-one"):
        return IntegralEstimate(Fraction(1), 0.0, True)
    if rng is None:
        rng = np.random.default_rng(0)
    pts = sample_cone_measure(measure, shape, rng, size=samples)
    vals = functional.evaluate_point(pts, shape)
    return IntegralEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)),
                            False, samples)


@dataclass(frozen=True)
class FactorCheck:
    ball_normalized: float
    sphere_normalized: float
    ratio: float
    target: Fraction

    @property
    def deviation(self):
        return self.ratio - float(self.target)

    @property
    def relative_deviation(self):
        return self.deviation / float(self.target)


def sphere_ball_factor_check(table, functional, shape, n) -> FactorCheck:
    """Compare ``ball_avg / sphere_avg`` with ``d / (d + k)``."""
    if not functional.homogeneous:
        raise NotHomogeneous("the sphere/ball factor needs a homogeneous functional")
    k = functional.order
    scale = Fraction(n) ** k
    b = ball_average(table, functional, n, shape)
    s = sphere_average(table, functional, n, shape)
    bn, sn = b / scale, s / scale
    return FactorCheck(float(bn), float(sn), float(bn / sn),
                       Fraction(table.dim, table.dim + k))


@dataclass
class CoprimeReport:
    ball: dict
    sphere: dict

    @property
    def even(self):
        return {n: v for n, v in self.sphere.items() if n % 2 == 0}

    @property
    def odd(self):
        return {n: v for n, v in self.sphere.items() if n % 2 == 1}

    @property
    def parity_gap(self):
        """Mean odd-radius average minus the largest even-radius average.

        Odd radii are pooled: single odd spheres can dip low (S_n averages
        phi(n)/n, so n = 105 gives 0.457 against 0.491 at n = 106).
        """
        if not self.even or not self.odd:
            return float("nan")
        return statistics.fmean(self.odd.values()) - max(self.even.values())


def coprimality_demo(table: MetricTable, radii) -> CoprimeReport:
    if table.dim != 2:
        raise DimensionUnsupported("the coprimality demo is planar")
    f = Functional("coprime-indicator")
    ball = {n: float(ball_average(table, f, n)) for n in radii}
    sphere = {n: float(sphere_average(table, f, n)) for n in radii}
    return CoprimeReport(ball, sphere)


@dataclass(frozen=True)
class DensityReport:
    radius: int
    sphere: Fraction
    ball: Fraction
    target: Fraction | None


def simple_spelling_density(table: MetricTable, shape: LimitShape, n) -> DensityReport:
    """Share of ``S_n`` and ``B_n`` with a simple spelling; planar target ``r / 2A``."""
    mask = simple_spelling_mask(shape, table.ball(n))
    start = int(table.offsets[n])
    sphere = Fraction(int(mask[start:].sum()), max(table.sphere_size(n), 1))
    ball = Fraction(int(mask.sum()), table.ball_size(n))
    target = None
    if shape.dim == 2:
        target = Fraction(len(shape.facets)) / (2 * shape.volume)
    return DensityReport(n, sphere, ball, target)
