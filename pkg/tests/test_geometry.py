import csv
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from minwidth.construct import PLScalarFunction, build_pl_vector_net
from minwidth.geometry import (P1, P2, Q, Affine, Box, OnBarrierError, Polyline, PreconditionError, Quadrant,
                               check_affine_on_S, counterexample_curve, diagnose, find_box_stable_layer,
                               local_search, parity, parity_fan, propagate, random_corpus, random_width2_net,
                               reformulate, run_corpus, simplex_bound, write_curve_csv)
from minwidth.geometry.curve import Q_POINT, red_blue_separation
from minwidth.geometry.diagnostics import closed_blue_loop, float_distance, pl_seed
from minwidth.geometry.planar import polylines_intersect, segments_intersect, sup_segment_segment
from minwidth.geometry.propagate import fold
from minwidth.geometry.simplex import (determinant_volume, epsilon, geometric_bound, max_vertex_distance,
                                       simplex_vertices, simplex_volume)
from minwidth.net import Layer, affine_network, evaluate, network

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def width2(Ws, bs, out_W, out_b):
    layers = [Layer.build(W, b, ("relu", "relu")) for W, b in zip(Ws, bs)]
    return network(layers + [Layer.build(out_W, out_b, ("id", "id"))])


class TestPlanar:
    def test_affine_inverse_and_composition(self):
        t = Affine(((F(2), F(1)), (F(1), F(1))), (F(1), F(-3)))
        x = (F(1, 3), F(-5, 7))
        assert t.inverse()(t(x)) == x
        assert t.after(t.inverse())(x) == x

    def test_segment_intersection(self):
        o = (F(0), F(0))
        assert segments_intersect(o, (F(2), F(2)), (F(0), F(2)), (F(2), F(0)))
        assert segments_intersect(o, (F(1), F(0)), (F(1), F(0)), (F(1), F(1)))  # shared endpoint
        assert not segments_intersect(o, (F(1), F(0)), (F(0), F(1)), (F(1), F(1)))
        assert segments_intersect(o, (F(2), F(0)), (F(1), F(0)), (F(3), F(0)))  # collinear overlap

    def test_sup_segment_distance(self):
        d = sup_segment_segment((F(0), F(0)), (F(1), F(0)), (F(0), F(3)), (F(1), F(3)))
        assert d == 3

    def test_polyline_restrict_and_simplify(self):
        p = Polyline.from_vertices([0, F(1, 2), 1], [(0, 0), (1, 1), (2, 2)])
        assert len(p.simplified()) == 2
        r = p.restrict(F(1, 4), F(3, 4))
        assert r.points[0] == (F(1, 2), F(1, 2)) and r.points[-1] == (F(3, 2), F(3, 2))
        with pytest.raises(ValueError):
            p(F(2))

    def test_quadrant(self):
        q = Quadrant.of(Affine(((F(1), F(0)), (F(0), F(1))), (F(0), F(0))))
        assert q.contains((F(1), F(2))) and not q.contains((F(-1), F(2)))
        assert q.on_boundary((F(0), F(5))) and not q.on_boundary((F(1), F(1)))


class TestParity:
    def test_square(self):
        assert parity((0.5, 0.5), [SQUARE]) == 1
        assert parity((5, 5), [SQUARE]) == 0

    def test_on_barrier(self):
        with pytest.raises(OnBarrierError):
            parity((1, 0.5), [SQUARE])

    def test_degenerate_rays_resolved(self):
        # the first fan direction from (1, 1) passes exactly through the vertex (8, 3)
        loop = [(-1, -1), (15, -1), (15, 3), (8, 3), (8, 5), (-1, 5)]
        assert parity_fan((1, 1), [loop]) == [1] * 8

    def test_box_adds_a_barrier(self):
        assert parity((0, 0), [], box=Box()) == 1
        assert parity((3, 0), [], box=Box()) == 0

    @given(st.integers(0, 2 ** 32 - 1))
    def test_fan_agreement_random(self, seed):
        rng = np.random.default_rng(seed)
        loop = [tuple(map(F, rng.integers(-20, 21, 2))) for _ in range(int(rng.integers(3, 9)))]
        pt = (F(int(rng.integers(-25, 26)), 3), F(int(rng.integers(-25, 26)), 2))
        try:
            votes = parity_fan(pt, [loop])
        except OnBarrierError:
            return
        assert len(set(votes)) == 1

    def test_target_point_is_surrounded_by_target_blue_loop(self):
        g = counterexample_curve()
        assert g(Q) == Q_POINT
        assert parity(Q_POINT, [closed_blue_loop(g)]) == 1


class TestCurve:
    def test_constraints(self):
        g = counterexample_curve()
        assert g(F(0)) == (4, 3) and g(F(1)) == (1, 0)
        assert g(P1) == (0, 0) and g(P2) == (-1, 0)
        assert red_blue_separation(g) >= 1
        assert not polylines_intersect(g.restrict(F(0), P1), g.restrict(P2, F(1)))

    def test_csv(self, tmp_path):
        path = tmp_path / "c.csv"
        write_curve_csv(path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["t", "x", "y"] and rows[1] == ["0.0", "4.0", "3.0"]
        assert len(rows) == 1 + len(counterexample_curve())

    def test_width3_vector_net_is_exact(self):
        g = counterexample_curve()
        pl = PLScalarFunction(np.array([float(t) for t in g.ts]), np.array([[float(x), float(y)] for x, y in g.points]))
        net = build_pl_vector_net(pl)
        assert net.width == 3
        t = np.linspace(0, 1, 10_001)
        assert np.max(np.abs(evaluate(net, t[:, None]) - g.evaluate_float(t))) <= 1e-9


class TestPropagation:
    def test_matches_forward_pass(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            net = random_width2_net(rng)
            g = propagate(net, ts=(0, 1))[-1]
            t = np.linspace(0, 1, 1000)
            assert np.max(np.abs(g.evaluate_float(t) - evaluate(net, t[:, None]))) <= 1e-6

    def test_float_mode_agrees_with_exact(self):
        net = random_width2_net(np.random.default_rng(4), depth=6)
        ge = propagate(net)[-1]
        gf = propagate(net, as_exact=False)[-1]
        t = np.linspace(0, 1, 257)
        assert np.max(np.abs(ge.evaluate_float(t) - gf.evaluate_float(t))) <= 1e-9

    def test_fixed_or_snapped_vertices(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            ref = reformulate(random_width2_net(rng))
            images = propagate(ref, simplify=False)
            for l in range(1, ref.n_hidden + 1):
                q = ref.quadrant(l)
                for v in images[l - 1].points:
                    u = ref.phis[l - 1](v)
                    w = ref.phi_invs[l - 1](tuple(c if c > 0 else 0 * c for c in u))
                    assert (q.contains(v) and w == v) or q.on_boundary(w)

    def test_singular_layer_is_perturbed(self):
        net = width2([[[1.0], [1.0]], [[1.0, 1.0], [1.0, 1.0]]], [[0, 0], [0, 0]], [[1.0, 0.0], [0.0, 1.0]], [0, 0])
        ref = reformulate(net)
        assert ref.perturbed == (2,)
        assert ref.affines[1].det() != 0

    def test_rejects_other_shapes(self):
        with pytest.raises(ValueError):
            reformulate(affine_network(np.eye(2), [0, 0]))

    def test_box_stable_layer(self):
        ident = [[1.0, 0.0], [0.0, 1.0]]
        far = width2([[[1.0], [1.0]], ident], [[0, 0], [10, 10]], ident, [-10, -10])
        assert find_box_stable_layer(far) == 1
        never = width2([[[1.0], [1.0]]], [[100, 100]], ident, [-100, -100])
        assert find_box_stable_layer(never) == 0

    @given(st.integers(0, 2 ** 32 - 1))
    def test_fold_keeps_enclosed_fixed_points(self, seed):
        # a point of the open quadrant enclosed by T stays enclosed by the folded T
        rng = np.random.default_rng(seed)
        A = rng.integers(-4, 5, (2, 2))
        assume(round(np.linalg.det(A)) != 0)
        phi = Affine(tuple(tuple(F(int(v)) for v in row) for row in A), tuple(F(int(v)) for v in rng.integers(-3, 4, 2)))
        loop = [tuple(F(int(v)) for v in rng.integers(-8, 9, 2)) for _ in range(int(rng.integers(3, 8)))]
        loop.append(loop[0])
        T = Polyline(tuple(F(i) for i in range(len(loop))), tuple(loop))
        x = phi.inverse()((F(int(rng.integers(1, 6)), 2), F(int(rng.integers(1, 6)), 3)))
        try:
            before = parity(x, [T])
            after_fold = fold(phi, phi.inverse(), T, simplify=False)
            after = parity(x, [after_fold])
        except OnBarrierError:
            return
        if before == 1:
            assert after == 1


class TestDiagnose:
    def test_constant_net(self):
        net = width2([[[0.0], [0.0]]], [[0, 0]], [[0.0, 0.0], [0.0, 0.0]], [0, 0])
        rep = diagnose(net)
        assert rep.sup_distance >= 4 and not rep.pipeline_ran
        assert rep.containment_verdict == "not-applicable"

    def test_forced_pipeline_reports_intersection(self):
        # a constant image makes the red and blue parts meet at every layer
        net = width2([[[0.0], [0.0]]], [[1, 1]], [[1.0, 0.0], [0.0, 1.0]], [0, 0])
        rep = diagnose(net, force=True)
        assert rep.pipeline_ran and rep.nointersect == [False]
        assert rep.containment_verdict == "intersects"
        assert {s["barrier"] for s in rep.parity_samples} == {"U", "U+boundary(B)"}

    def test_exact_distance_matches_sampled(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            net = random_width2_net(rng)
            exact = float(diagnose(net).sup_distance)
            sampled = float_distance(net, np.linspace(0, 1, 200_001))
            assert sampled <= exact + 1e-9
            assert exact - sampled <= 1e-3

    def test_report_json(self):
        rep = diagnose(random_width2_net(np.random.default_rng(0)))
        d = rep.to_dict()
        assert F(d["sup_distance_exact"]) == rep.sup_distance

    def test_small_corpus_never_certifies(self):
        nets = random_corpus(30, seed=7, refined=2, iters=40)
        reports, summary = run_corpus(nets)
        assert summary["count"] == 32 and summary["certified"] == 0
        assert summary["min_sup_distance"] > 0.01

    def test_local_search_does_not_worsen(self):
        rng = np.random.default_rng(3)
        start = pl_seed(rng, coord=0)
        refined = local_search(start, rng, iters=30)
        ts = np.linspace(0, 1, 513)
        assert float_distance(refined, ts) <= float_distance(start, ts) + 0.05


class TestSimplex:
    @pytest.mark.parametrize("dy", range(1, 7))
    def test_vertices_and_volume(self, dy):
        V = simplex_vertices(dy)
        D = np.linalg.norm(V[:, None] - V[None], axis=-1)
        off = ~np.eye(dy + 1, dtype=bool)
        assert np.max(np.abs(D[off] - math.sqrt(2))) <= 1e-12
        assert abs(determinant_volume(V) - simplex_volume(dy)) <= 1e-9

    def test_dy1_midpoint(self):
        V = simplex_vertices(1)
        assert abs(max_vertex_distance(V, [1.0]) - math.sqrt(2) / 2) <= 1e-15
        assert geometric_bound(1) == pytest.approx(math.sqrt(2) / 2, rel=1e-12)

    def test_epsilon_values(self):
        # sqrt(4)/(2*3!) * Gamma(2) * (2/pi) / sqrt(7) * 3^0, p = 2
        assert abs(epsilon(3, 2) - (1 / 6) * (2 / math.pi) / math.sqrt(7)) <= 1e-15
        assert epsilon(3, 1) == pytest.approx(geometric_bound(3) / 7, rel=1e-12)
        with pytest.raises(ValueError):
            epsilon(2, 0.5)

    def test_monte_carlo_respects_bound(self):
        res = simplex_bound(3, 2, trials=2000, seed=1, refine=5)
        assert res.monte_carlo_min >= res.geometric_bound
        assert res.refined_min >= res.geometric_bound
        assert res.refined_min <= res.monte_carlo_min


class TestAffineOnS:
    def test_linear_net(self):
        net = width2([[[1.0], [2.0]]], [[5, 5]], [[1.0, 0.0], [0.0, 1.0]], [0, 0])
        assert check_affine_on_S(net, [0.0], [1.0])

    def test_random_pairs_in_S(self):
        rng = np.random.default_rng(0)
        W1, b1 = rng.normal(size=(3, 2)), rng.normal(size=3) + 3
        W2, b2 = rng.normal(size=(3, 3)) * 0.2 + np.eye(3), rng.normal(size=3) + 3
        net = network([Layer.build(W1, b1, ["relu"] * 3), Layer.build(W2, b2, ["relu"] * 3),
                       Layer.build(rng.normal(size=(2, 3)), rng.normal(size=2), ["id", "id"])])
        ok = 0
        for _ in range(1000):
            x1, x2 = rng.uniform(-0.3, 0.3, 2), rng.uniform(-0.3, 0.3, 2)
            try:
                assert check_affine_on_S(net, x1, x2)
                ok += 1
            except PreconditionError:
                pass
        assert ok > 900

    def test_straddling_pair(self):
        net = width2([[[1.0], [-1.0]]], [[0, 0]], [[1.0, 0.0], [0.0, 1.0]], [0, 0])
        with pytest.raises(PreconditionError):
            check_affine_on_S(net, [-1.0], [1.0])
