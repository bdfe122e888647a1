from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minwidth import targets
from minwidth.construct import assemble_uniform_net
from minwidth.metrics import ErrorReport, Quadrature, error_report, lp_error, pl_sup_distance, sup_error
from minwidth.net import DimensionError, affine_network, identity_network


def random_curve(rng, n=None):
    # breakpoints on a 1/1000 lattice so the dense-grid oracle samples every one
    n = n or int(rng.integers(2, 12))
    inner = np.sort(rng.choice(np.arange(1, 1000), n - 2, replace=False)) / 1000
    ts = np.concatenate([[0.0], inner, [1.0]])
    return ts, rng.normal(size=(n, 2))


def dense_sup(a, b, n=1_000_001):
    t = np.linspace(0, 1, n)
    fa = np.stack([np.interp(t, a[0], a[1][:, j]) for j in range(2)], axis=1)
    fb = np.stack([np.interp(t, b[0], b[1][:, j]) for j in range(2)], axis=1)
    return float(np.max(np.abs(fa - fb)))


def test_identical_functions():
    f = targets.identity(2)
    assert sup_error(identity_network(2), f) <= 1e-9
    assert lp_error(identity_network(2), f, 2.0) <= 1e-9


def test_constant_offset():
    f = targets.identity(2)
    shifted = affine_network(np.eye(2), [0.1, 0.0])
    assert abs(sup_error(shifted, f) - 0.1) <= 1e-12
    both = affine_network(np.eye(2), [0.1, 0.1])
    assert abs(lp_error(both, f, 2.0) - 0.1 * np.sqrt(2)) <= 1e-3


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        sup_error(identity_network(1), targets.identity(2))


def test_monte_carlo_is_seeded():
    q1, q2 = Quadrature("monte-carlo", 1000, 5), Quadrature("monte-carlo", 1000, 5)
    assert np.array_equal(q1.points(3), q2.points(3))
    with pytest.raises(ValueError):
        Quadrature("grid", 1)
    with pytest.raises(ValueError):
        Quadrature("simpson", 10)


def test_sup_monotone_on_nested_grids():
    f = targets.product_mean_absdiff()
    net = assemble_uniform_net(f, 3, 3)
    coarse, fine = (sup_error(net, f, Quadrature("grid", n)) for n in (21, 41))
    assert fine >= coarse


def test_error_report_json_round_trip():
    rep = error_report(identity_network(1), targets.identity(1), "lp", 3.0, Quadrature("grid", 11), bound=0.5)
    back = ErrorReport.from_json(rep.to_json())
    assert back == rep and back.within_bound
    with pytest.raises(ValueError):
        error_report(identity_network(1), targets.identity(1), "l1")


def test_pl_distance_examples():
    a = ([0, 0.5, 1], [(0, 0), (1, 2), (3, 1)])
    assert pl_sup_distance(a, a) == 0
    b = (a[0], [(x + Fraction(3, 10), y) for x, y in a[1]])
    assert pl_sup_distance(a, b) == Fraction(3, 10)


def test_pl_distance_rejects_unsorted():
    with pytest.raises(ValueError):
        pl_sup_distance(([0, 0.6, 0.5, 1], [(0, 0)] * 4), ([0, 1], [(0, 0), (1, 1)]))


def test_pl_distance_matches_dense_grid():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a, b = random_curve(rng), random_curve(rng)
        exact = float(pl_sup_distance(a, b))
        assert exact >= dense_sup(a, b) - 1e-12
        assert abs(exact - dense_sup(a, b)) <= 1e-6


@given(st.integers(0, 2 ** 32 - 1))
def test_pl_distance_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_curve(rng) for _ in range(3))
    ab, ba = pl_sup_distance(a, b), pl_sup_distance(b, a)
    assert ab == ba
    assert pl_sup_distance(a, c) <= ab + pl_sup_distance(b, c)
