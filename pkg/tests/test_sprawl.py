import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wordmetric.lattice import GeneratorSet, build_hull, cone_measure
from wordmetric.metric import bfs_ball
from wordmetric.presets import preset
from wordmetric.sprawl import SprawlConfig, SprawlEstimate, sprawl_empirical, sprawl_mc, sprawl_report


def _transform(gens, matrix):
    m = np.asarray(matrix, dtype=np.int64)
    return GeneratorSet.from_vectors((gens.array @ m.T).tolist())


def test_line_is_one(line13):
    assert sprawl_mc(build_hull(line13)).value == 1.0


def test_line_empirical_exact():
    # S_n = {-n, n}: pairs are distance 0 or 2n, half each
    gens = GeneratorSet.from_vectors([(1,)], symmetrize=True)
    t = bfs_ball(gens, 10)
    est = sprawl_empirical(t, 5)
    assert est.method == "empirical-exhaustive"
    assert est.value == 1.0 and est.approximated == 0


def test_line_empirical_converges(line13):
    # with {±1, ±3} each half of S_n is a short interval, so only within K/n of 1
    t = bfs_ball(line13, 80)
    for n in (10, 40):
        assert abs(sprawl_empirical(t, n).value - 1) <= 2 / n


def test_exhaustive_matches_direct_sum(table, shape):
    t = table("std-d2", 16)
    n = 8
    sph = t.sphere(n)
    total = sum(int(np.abs(x - y).sum()) for x in sph for y in sph)
    est = sprawl_empirical(t, n, shape=shape("std-d2"))
    assert est.value == pytest.approx(total / (len(sph) ** 2 * n), rel=1e-15)
    assert est.pairs == len(sph) ** 2


def test_sampled_and_reproducible(table, shape):
    t = table("chess-knight", 40)
    s = shape("chess-knight")
    a = sprawl_empirical(t, 20, pair_budget=50_000, rng=7, shape=s)
    b = sprawl_empirical(t, 20, pair_budget=50_000, rng=7, shape=s)
    assert a.method == "empirical-sampled" and a == b
    exact = sprawl_empirical(t, 20, pair_budget=10 ** 7, shape=s)
    assert abs(a.value - exact.value) < 4 * a.stderr


def test_outside_table_is_flagged(table, shape):
    t = table("chess-knight", 20)
    est = sprawl_empirical(t, 20, shape=shape("chess-knight"), pair_budget=10 ** 5)
    assert est.approximated > 0
    assert sprawl_empirical(table("chess-knight", 40), 20).approximated == 0


def test_mc_reproducible_across_threads(shape):
    s = shape("std-d3")
    one = sprawl_mc(s, samples=200_000, rng=3, batch_size=30_000, threads=1)
    four = sprawl_mc(s, samples=200_000, rng=3, batch_size=30_000, threads=4)
    assert one == four
    other = sprawl_mc(s, samples=200_000, rng=4, batch_size=30_000)
    assert other.value != one.value


def test_mc_stderr_scaling(shape):
    s = shape("chess-knight")
    small = sprawl_mc(s, samples=50_000, rng=1)
    big = sprawl_mc(s, samples=200_000, rng=1)
    assert big.stderr / small.stderr == pytest.approx(0.5, rel=0.05)


def test_mc_measure_argument(shape):
    s = shape("std-d2")
    assert sprawl_mc(s, cone_measure(s), samples=10_000, rng=2) == sprawl_mc(s, samples=10_000, rng=2)


def test_scale_invariance(shape):
    gens = preset("chess-knight")
    s = shape("chess-knight")
    base = sprawl_mc(s, samples=200_000, rng=5)
    # 3S alone is not generating; the unit vectors fix that without touching the hull
    scaled_gens = GeneratorSet.from_vectors((3 * gens.array).tolist() + [[1, 0], [0, 1]],
                                            symmetrize=True)
    scaled_shape = build_hull(scaled_gens)
    assert scaled_shape.volume == 9 * s.volume
    scaled = sprawl_mc(scaled_shape, samples=200_000, rng=6)
    assert abs(base.value - scaled.value) < 4 * np.hypot(base.stderr, scaled.stderr)


@pytest.mark.parametrize("matrix", [[[0, 1], [-1, 0]], [[-1, 0], [0, 1]], [[0, 1], [1, 0]]])
def test_symmetry_of_knight(matrix, shape):
    gens = preset("chess-knight")
    image = _transform(gens, matrix)
    assert image == gens
    a = sprawl_mc(shape("chess-knight"), samples=100_000, rng=8)
    b = sprawl_mc(build_hull(image), samples=100_000, rng=8)
    assert a == b


def test_invariant_under_lattice_automorphism(shape):
    # a shear changes S but not the metric space
    gens = _transform(preset("std-d2"), [[1, 1], [0, 1]])
    a = sprawl_mc(shape("std-d2"), samples=200_000, rng=9)
    b = sprawl_mc(build_hull(gens), samples=200_000, rng=10)
    assert abs(a.value - b.value) < 4 * np.hypot(a.stderr, b.stderr)


@settings(max_examples=15, deadline=None)
@given(name=st.sampled_from(["std-d2", "chess-knight", "six-one-d2", "std-d3", "cube-d3"]),
       seed=st.integers(0, 2 ** 32))
def test_mc_bounds(name, seed):
    est = sprawl_mc(build_hull(preset(name)), samples=2_000, rng=seed)
    assert 0 <= est.value <= 2 and est.stderr > 0


def test_estimate_validation():
    with pytest.raises(ValueError):
        SprawlEstimate(2.5, "monte-carlo", 10, 0.0)
    with pytest.raises(ValueError):
        SprawlEstimate(1.0, "guess", 10, 0.0)
    with pytest.raises(ValueError):
        sprawl_mc(build_hull(preset("std-d2")), samples=1)


def test_report_planar_agrees(table, shape):
    cfg = SprawlConfig(radius=30, samples=200_000, pair_budget=200_000, seed=1)
    for name in ("std-d2", "chess-knight"):
        rep = sprawl_report(shape(name), None, table(name, 60), cfg)
        assert rep.agree and rep.below_two
        assert rep.empirical.approximated == 0
        doc = rep.to_json()
        assert doc["agree"] is True and doc["monte_carlo"]["method"] == "monte-carlo"
