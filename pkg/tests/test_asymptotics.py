import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wordmetric.asymptotics import (
    Functional,
    ball_average,
    coprimality_demo,
    growth_series,
    leading_coefficient,
    limit_integral,
    measure_convergence_report,
    sector_histogram,
    simple_spelling_density,
    sphere_average,
    sphere_ball_factor_check,
)
from wordmetric.errors import DegenerateWindow, DimensionUnsupported, NotHomogeneous
from wordmetric.lattice import GeneratorSet, build_hull, cone_measure
from wordmetric.metric import bfs_ball, compute_K
from wordmetric.presets import PRESETS, preset


def quad_euclidean_on_square():
    from scipy.integrate import quad
    return quad(lambda t: math.sqrt(2 * t * t - 2 * t + 1), 0, 1)[0]


# -- growth ------------------------------------------------------------------------

def test_standard_growth_closed_form(table):
    g = growth_series(table("std-d2", 60))
    assert g.sigma[0] == 1
    assert all(g.sigma[n] == 4 * n for n in range(1, 61))
    assert all(g.beta[n] == 2 * n * n + 2 * n + 1 for n in range(61))


def test_line_growth():
    g = growth_series(bfs_ball(GeneratorSet.from_vectors([(1,)], symmetrize=True), 20))
    assert g.sigma[1:] == (2,) * 20
    assert g.beta == tuple(2 * n + 1 for n in range(21))


def test_beta_is_cumulative_sigma(table):
    for name in PRESETS:
        g = growth_series(table(name, 12))
        assert list(g.beta) == list(np.cumsum(g.sigma))


def test_fit_exact_linear():
    seq = [1] + [4 * n for n in range(1, 40)]
    fit = leading_coefficient(seq, 1)
    assert fit.estimate == 4 and fit.residual == 0 and fit.error == 0


def test_fit_quadratic_polynomial():
    seq = [2 * n * n + 2 * n + 1 for n in range(200)]
    fit = leading_coefficient(seq, 2)
    assert abs(fit.estimate - 2) < Fraction(1, 1000)
    # the 1/n^2 term leaks into the slope only at order 1/n
    assert abs(float(fit.slope) - 2) < 0.05
    assert abs(fit.estimate - 2) <= fit.error


def test_fit_knight_window(table):
    beta = growth_series(table("chess-knight", 200)).beta
    fit = leading_coefficient(beta, 2, window=(100, 200))
    assert abs(float(fit.estimate) - 14) < 0.2
    assert fit.window == (100, 200)


def test_fit_degenerate():
    with pytest.raises(DegenerateWindow):
        leading_coefficient(list(range(10)), 1, window=(2, 6))
    with pytest.raises(DegenerateWindow):
        leading_coefficient(list(range(10)), 1, window=(0, 9))


# -- sector statistics ------------------------------------------------------------

def test_square_histogram(table, shape):
    s = shape("std-d2")
    h = sector_histogram(table("std-d2", 10), s, 10)
    assert h.total == 40
    for count in h.counts:
        assert abs(count - 10) <= 2


def test_line_histogram():
    gens = GeneratorSet.from_vectors([(1,), (3,)], symmetrize=True)
    s = build_hull(gens)
    t = bfs_ball(gens, 30)
    for n in (1, 10, 30):
        h = sector_histogram(t, s, n)
        assert h.counts[0] == h.counts[1] == t.sphere_size(n) // 2
    r = measure_convergence_report(t, s, range(1, 31))
    assert max(r.deviations) == 0


def test_square_convergence_bound(table, shape):
    r = measure_convergence_report(table("std-d2", 100), shape("std-d2"), range(1, 101))
    for n, dev in zip(r.radii, r.deviations):
        assert dev <= 1 / (2 * n) + 1e-15
    assert r.decreasing


def test_histograms_sum_to_sphere(table, shape):
    for name in PRESETS:
        t = table(name, 10)
        for n in (1, 5, 10):
            assert sector_histogram(t, shape(name), n).total == t.sphere_size(n)


# -- averages ------------------------------------------------------------------------

def test_standard_ball_average_formula(table):
    t = table("std-d2", 50)
    f = Functional("word-length-power", 1)
    for n in range(51):
        assert ball_average(t, f, n) == Fraction(4 * n ** 3 + 6 * n ** 2 + 2 * n,
                                                 6 * n ** 2 + 6 * n + 3)


def test_norm_average_within_K(table, shape):
    f = Functional("l-norm-power", 1)
    for name in PRESETS:
        s = shape(name)
        K = compute_K(preset(name), s)
        t = table(name, 20)
        for n in (5, 20):
            avg = sphere_average(t, f, n, s) / n
            assert 1 - Fraction(K, n) < avg <= 1


def test_standard_norm_is_length(table, shape):
    t = table("std-d2", 30)
    for n in (1, 17, 30):
        assert sphere_average(t, Functional("l-norm-power", 3), n) == n ** 3


def test_coprime_unit_sphere(table):
    t = table("std-d2", 5)
    assert sphere_average(t, Functional("coprime-indicator"), 1) == 1
    assert coprimality_demo(t, [1]).sphere[1] == 1.0


def _phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_coprime_sphere_is_totient_ratio(table):
    # gcd(x, y) = gcd(|x|, n) on |x| + |y| = n
    rep = coprimality_demo(table("std-d2", 120), range(2, 121))
    for n, v in rep.sphere.items():
        assert v == pytest.approx(_phi(n) / n, abs=1e-15)
    # single odd spheres can sit below even ones, hence the pooled gap
    assert rep.sphere[105] < rep.sphere[106]


def test_coprime_needs_plane(table):
    with pytest.raises(DimensionUnsupported):
        coprimality_demo(table("std-d3", 4), [2])


def test_even_spheres_have_no_coprime_axis_points(table):
    # on S_n with n even, x + y is even so coprime points need both odd
    t = table("std-d2", 40)
    rep = coprimality_demo(t, range(30, 41))
    assert rep.parity_gap > 0.05
    assert set(rep.even) == {30, 32, 34, 36, 38, 40}


def test_monomial_and_euclidean_exact(table):
    t = table("std-d2", 3)
    pts = t.sphere(3)
    f = Functional("coordinate-monomial", exponents=(2, 1))
    assert sphere_average(t, f, 3) == Fraction(int((pts[:, 0] ** 2 * pts[:, 1]).sum()), len(pts))
    e2 = sphere_average(t, Functional("euclidean-power", 2), 3)
    assert e2 == Fraction(int((pts ** 2).sum()), len(pts))
    assert isinstance(sphere_average(t, Functional("euclidean-power", 1), 3), float)


def test_functional_validation():
    with pytest.raises(ValueError):
        Functional("nonsense")
    with pytest.raises(ValueError):
        Functional("l-norm-power", -1)
    assert Functional("coordinate-monomial", exponents=(1, 2)).order == 3
    assert not Functional("coprime-indicator").homogeneous


@settings(max_examples=60, deadline=None)
@given(x=st.tuples(st.integers(-9, 9), st.integers(-9, 9)), t=st.integers(1, 6),
       kind=st.sampled_from(["l-norm-power", "euclidean-power", "coordinate-monomial",
                             "constant-one"]),
       p=st.integers(0, 4))
def test_functionals_homogeneous(x, t, kind, p):
    s = build_hull(preset("chess-knight"))
    f = Functional(kind, p, exponents=(p, 1))
    a = f.evaluate_point(np.array([x]) * t, s)[0]
    b = f.evaluate_point(np.array([x]), s)[0]
    assert a == pytest.approx(t ** f.order * b, rel=1e-12, abs=1e-9)


# -- limit integrals ------------------------------------------------------------------

def test_limit_integral_trivial(shape):
    for name in PRESETS:
        s = shape(name)
        mu = cone_measure(s)
        for f in (Functional("l-norm-power", 3), Functional("word-length-power", 2),
                  Functional("constant-one")):
            r = limit_integral(f, s, mu)
            assert r.exact and r.value == 1


def test_limit_integral_euclidean_square(shape):
    s = shape("std-d2")
    ref = quad_euclidean_on_square()
    assert ref == pytest.approx(0.8116, abs=1e-4)
    r = limit_integral(Functional("euclidean-power", 1), s, cone_measure(s),
                       np.random.default_rng(1), samples=200_000)
    assert abs(r.value - ref) < 4 * r.stderr
    assert r.stderr < 1e-3


def test_limit_integral_rejects_coprime(shape):
    s = shape("std-d2")
    with pytest.raises(NotHomogeneous):
        limit_integral(Functional("coprime-indicator"), s, cone_measure(s))


def test_limit_integral_matches_sphere_average(table, shape):
    s = shape("std-d2")
    f = Functional("euclidean-power", 2)
    r = limit_integral(f, s, cone_measure(s), np.random.default_rng(2))
    n = 150
    avg = float(sphere_average(table("std-d2", n), f, n)) / n ** 2
    assert abs(avg - r.value) < 4 * r.stderr + 2 / n


# -- sphere versus ball -----------------------------------------------------------------

def test_constant_factor_is_one(table, shape):
    c = sphere_ball_factor_check(table("chess-knight", 40), Functional("constant-one"),
                                 shape("chess-knight"), 40)
    assert c.ratio == 1 and c.target == 1


def test_factor_target(table, shape):
    c = sphere_ball_factor_check(table("std-d3", 30), Functional("word-length-power", 2),
                                 shape("std-d3"), 30)
    assert c.target == Fraction(3, 5)
    assert abs(c.relative_deviation) < 0.1


def test_factor_rejects_coprime(table, shape):
    with pytest.raises(NotHomogeneous):
        sphere_ball_factor_check(table("std-d2", 5), Functional("coprime-indicator"),
                                 shape("std-d2"), 5)


# -- simple spellings -----------------------------------------------------------------

def test_standard_density_is_one(table, shape):
    r = simple_spelling_density(table("std-d2", 30), shape("std-d2"), 30)
    assert r.sphere == r.ball == r.target == 1


def test_density_targets(table, shape):
    assert simple_spelling_density(table("chess-knight", 10), shape("chess-knight"),
                                   10).target == Fraction(2, 7)
    assert simple_spelling_density(table("six-one-d2", 10), shape("six-one-d2"),
                                   10).target == Fraction(1, 36)
    assert simple_spelling_density(table("std-d3", 5), shape("std-d3"), 5).target is None


def test_simple_count_on_sphere(table, shape):
    # r n simple spellings of length n: facets times n
    s = shape("chess-knight")
    t = table("chess-knight", 60)
    for n in (10, 40, 60):
        r = simple_spelling_density(t, s, n)
        assert r.sphere * t.sphere_size(n) == len(s.facets) * n
