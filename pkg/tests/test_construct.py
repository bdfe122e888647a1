import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minwidth import coding, targets
from minwidth.coding import BudgetError
from minwidth.construct import (PLScalarFunction, assemble_lp_net, assemble_uniform_net, build_clamp_net,
                                build_decoder_net, build_memorizer_net, build_pl_net, build_pl_vector_net,
                                build_relu_encoder_net, build_staircase_pair_net, build_step_encoder_net,
                                build_step_quantizer_net, default_alpha, default_encoder_delta, lp_bound)
from minwidth.metrics import Quadrature, pointwise_error, sup_error
from minwidth.net import Activation, evaluate
from minwidth.verify import random_pl, run_suite

TOL = 1e-9


def ev(net, x):
    return evaluate(net, np.atleast_2d(np.asarray(x, dtype=np.float64)))


class TestPL:
    def test_identity_one_piece(self):
        net = build_pl_net(PLScalarFunction([0.0, 1.0], [0.0, 1.0]))
        x = np.linspace(0, 1, 1000)
        assert np.max(np.abs(ev(net, x[:, None]).ravel() - x)) <= TOL

    def test_hat(self):
        g = PLScalarFunction([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
        net = build_pl_net(g)
        pts = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        assert np.max(np.abs(ev(net, pts[:, None]).ravel() - g(pts))) <= TOL

    def test_pair_variant_carries_shifted_input(self):
        g = PLScalarFunction([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
        out = ev(build_pl_net(g, pair=True), [[0.75]])[0]
        np.testing.assert_allclose(out, [0.25, 0.5], atol=TOL)

    def test_seven_pieces_width_two(self):
        rng = np.random.default_rng(2)
        g = PLScalarFunction(np.linspace(-1, 2, 8), rng.normal(size=8))
        net = build_pl_net(g)
        assert net.width == 2 and not net.uses(Activation.STEP)

    def test_from_pieces_continuity(self):
        g = PLScalarFunction.from_pieces(0, 2, [1.0], [1.0, -1.0], [0.0, 2.0])
        assert g.values.tolist() == [0.0, 1.0, 0.0]
        with pytest.raises(ValueError, match="disagree"):
            PLScalarFunction.from_pieces(0, 2, [1.0], [1.0, -1.0], [0.0, 3.0])

    def test_bad_breakpoints(self):
        with pytest.raises(ValueError):
            PLScalarFunction([0.0, 0.0, 1.0], [0, 1, 2])

    def test_vector_net_width(self):
        g = PLScalarFunction([0.0, 0.3, 1.0], np.array([[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]]))
        net = build_pl_vector_net(g)
        assert net.width == 3
        x = np.linspace(0, 1, 101)
        assert np.max(np.abs(ev(net, x[:, None]) - g(x))) <= TOL

    @given(st.integers(0, 2 ** 32 - 1))
    def test_random_pl_property(self, seed):
        g = random_pl(np.random.default_rng(seed))
        net = build_pl_net(g)
        x = np.linspace(g.lo, g.hi, 257)
        assert net.width == 2
        assert np.max(np.abs(ev(net, x[:, None]).ravel() - g(x))) <= 1e-8


class TestMemorizer:
    def test_identity_table(self):
        table = coding.build_codebook(targets.identity(1), 3, 3)
        net = build_memorizer_net(table)
        assert np.array_equal(ev(net, table.keys[:, None]).ravel(), table.keys)

    def test_square_table_and_range(self):
        sq = targets.TargetFunction(1, 1, lambda X: X ** 2, 2.0, "square")
        table = coding.build_codebook(sq, 3, 6)
        net = build_memorizer_net(table)
        assert len(table) == 8 and net.width == 2
        assert np.max(np.abs(ev(net, table.keys[:, None]).ravel() - table.values)) <= TOL
        s = ev(net, np.linspace(0, 1, 10_000)[:, None]).ravel()
        assert s.min() >= table.values.min() - TOL and s.max() <= table.values.max() + TOL

    def test_two_dimensional_codebook(self):
        assert all(c.passed for c in run_suite("memorizer", dx=2, K=3, M=4))

    def test_empty_table(self):
        with pytest.raises(ValueError, match="empty"):
            build_memorizer_net(coding.CodebookTable(1, 1, 1, 1, np.array([]), np.array([])))


class TestQuantizer:
    @pytest.mark.parametrize("K,x,expected", [(2, 0.3, 0.25), (2, 0.999, 0.75), (3, 1.0, 0.875)])
    def test_examples(self, K, x, expected):
        assert ev(build_step_quantizer_net(K), [[x]])[0, 0] == expected

    @pytest.mark.parametrize("K", range(1, 7))
    def test_matches_quantize(self, K):
        net = build_step_quantizer_net(K)
        assert net.width == 2 and net.uses(Activation.STEP)
        x = np.linspace(0, 1, 2 ** K * 100)
        assert np.max(np.abs(ev(net, x[:, None]).ravel() - coding.quantize(x, K))) <= TOL

    @pytest.mark.parametrize("K", [1, 3, 5])
    def test_exact_in_dyadic_mode(self, K):
        assert all(c.passed for c in run_suite("quantizer", K=K, numeric="dyadic"))

    @given(st.floats(0, 1), st.integers(1, 6))
    def test_property(self, x, K):
        assert ev(build_step_quantizer_net(K), [[x]])[0, 0] == coding.quantize(x, K)


class TestStepEncoder:
    def test_examples(self):
        net = build_step_encoder_net(2, 2)
        assert ev(net, [[0.5, 0.25]])[0, 0] == 0.5625
        assert ev(net, [[0.0, 0.0]])[0, 0] == 0.0
        assert net.width == 3

    def test_grid(self):
        assert all(c.passed for c in run_suite("encoder-step", dx=2, K=3, grid=129))

    def test_budget(self):
        with pytest.raises(BudgetError):
            build_step_encoder_net(5, 5)


class TestStaircase:
    def test_examples(self):
        net = build_staircase_pair_net(2, 0.01)
        # oracle: (q_2(0.3), 4 * (0.3 - q_2(0.3)))
        q = coding.quantize(0.3, 2)
        np.testing.assert_allclose(ev(net, [[0.3]])[0], [q, 4 * (0.3 - q)], atol=TOL)
        np.testing.assert_allclose(ev(net, [[0.0]])[0], [0.0, 0.0], atol=TOL)
        np.testing.assert_array_equal(ev(net, [[-5.0]]), ev(net, [[0.0]]))
        np.testing.assert_array_equal(ev(net, [[7.0]]), ev(net, [[1.0]]))
        assert net.width == 2 and not net.uses(Activation.STEP)

    def test_delta_range(self):
        with pytest.raises(ValueError):
            build_staircase_pair_net(2, 0.25)
        with pytest.raises(ValueError):
            build_staircase_pair_net(2, 0.0)

    def test_suite(self):
        assert all(c.passed for c in run_suite("staircase", M=3, delta=0.005))


class TestDecoder:
    def test_examples(self):
        net = build_decoder_net(2, 2)
        np.testing.assert_allclose(ev(net, [[0.5625]])[0], coding.decode(0.5625, 2, 2), atol=TOL)
        np.testing.assert_allclose(ev(build_decoder_net(3, 2), [[0.0]])[0], [0, 0, 0], atol=TOL)

    @pytest.mark.parametrize("dy,M", [(1, 4), (2, 3), (3, 4), (2, 6)])
    def test_exhaustive(self, dy, M):
        assert all(c.passed for c in run_suite("decoder", dy=dy, M=M))

    def test_dyadic(self):
        assert all(c.passed for c in run_suite("decoder", dy=2, M=3, numeric="dyadic"))


class TestClamp:
    def test_examples(self):
        net = build_clamp_net(2, 0.1)
        np.testing.assert_allclose(ev(net, [[0.5, 0.5]])[0], [0.5, 0.5], atol=TOL)
        np.testing.assert_allclose(ev(net, [[2.0, 0.5]])[0], [1.0, 1.0], atol=TOL)
        Y = ev(net, np.random.default_rng(0).uniform(-5, 6, (10_000, 2)))
        assert Y.min() >= -TOL and Y.max() <= 1 + TOL

    @pytest.mark.parametrize("dx,alpha", [(1, 0.2), (2, 0.1), (3, 0.05)])
    def test_clauses(self, dx, alpha):
        assert all(c.passed for c in run_suite("clamp", dx=dx, alpha=alpha))

    def test_band_points_off_cube(self):
        # one coordinate inside the margin band, the other far below zero
        net = build_clamp_net(2, 0.1)
        X = np.array([[0.917, -2.287], [0.0947, -0.297], [0.95, -0.5], [-0.5, 0.05]])
        np.testing.assert_allclose(ev(net, X), 1.0, atol=TOL)

    def test_interleaved_sweeps_miss_band_points(self):
        # sweeping s_1, r_1, s_2, r_2 over all coordinates lifts x_2 back into the cube
        out = ev(build_clamp_net(2, 0.1, variant="interleaved"), [[0.917, -2.287]])[0]
        assert out[0] == 1.0 and 0.0 < out[1] < 1.0

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            build_clamp_net(2, 0.5)


class TestReluEncoder:
    def test_examples(self):
        art = build_relu_encoder_net(2, 3, gamma=0.01)
        assert art.net.width == 3 and not art.net.uses(Activation.STEP)
        assert abs(ev(art.net, [[0.5, 0.3]])[0, 0] - coding.encode(np.array([0.5, 0.3]), 3)) <= TOL
        assert art.sentinel == 1 - 2.0 ** -6
        assert abs(ev(art.net, [[2.0, 0.5]])[0, 0] - 0.984375) <= TOL

    def test_defaults_meet_gamma(self):
        for dx, K, gamma in [(1, 4, 0.01), (2, 3, 0.001), (3, 2, 0.05)]:
            a, d = default_alpha(dx, gamma), default_encoder_delta(dx, K, gamma)
            assert dx * 2 * a + dx * 2 ** K * d < gamma

    def test_infeasible(self):
        with pytest.raises(ValueError, match="infeasible"):
            build_relu_encoder_net(2, 3, alpha=0.1, gamma=0.01)

    def test_suite(self):
        assert all(c.passed for c in run_suite("encoder-relu", dx=2, K=3, gamma=0.01, samples=200_000))


class TestAssembly:
    def test_identity_uniform(self):
        f = targets.identity(1)
        net = assemble_uniform_net(f, 5, 5)
        assert sup_error(net, f, Quadrature("grid", 4001)) <= 2 ** -5 + 2 ** -5

    def test_constant_uniform(self):
        f = targets.constant(2, 1, 0.3)
        net = assemble_uniform_net(f, 3, 4)
        assert net.width == 3
        assert sup_error(net, f, Quadrature("grid", 101)) <= 2 ** -4

    def test_trio_pointwise_and_step_placement(self):
        f = targets.product_mean_absdiff()
        net = assemble_uniform_net(f, 4, 4)
        assert net.width == 3
        err = pointwise_error(net, f, Quadrature("grid", 101).points(2))
        assert np.all(err <= coding.error_budget(1.0, 4, 4))
        enc_hidden = build_step_encoder_net(2, 4).depth - 1
        assert not any(Activation.STEP in l.activations for l in net.layers[enc_hidden:])

    def test_lp_net(self):
        f = targets.product_mean_absdiff()
        cons = assemble_lp_net(f, 4, 4, gamma=0.001, p=2)
        net = cons.net
        assert net.width == 3 and not net.uses(Activation.STEP)
        assert np.max(np.abs(ev(net, [[3.0, -1.0]]))) <= TOL
        rep = cons.report()
        assert rep["zeroed_region"] == "[0.9375, 1]^2"
        assert cons.bound == lp_bound(2, 3, 1.0, 4, 4, 0.001, 2)

    def test_lp_bound_formula(self):
        # (3 (2^-4 + 2^-4)^2 + (2^-8 + 0.001) (2 sqrt 3)^2)^(1/2)
        expected = (3 * 0.125 ** 2 + (2 ** -8 + 0.001) * 12) ** 0.5
        assert abs(lp_bound(2, 3, 1.0, 4, 4, 0.001, 2) - expected) <= 1e-15

    def test_wide_output_width(self):
        f = targets.TargetFunction(1, 4, lambda X: np.repeat(X, 4, axis=1) / 2, 0.5, "rep")
        net = assemble_uniform_net(f, 3, 3)
        assert net.width == 4
