import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hhverify import (
    CATALOG,
    ConePoint,
    bernstein_pq_closed_form,
    bernstein_pq_values,
    cm_difference_probe,
    composed,
    cone_iterated_difference,
    double_divided_difference,
    double_divided_difference_nested,
    exp_linear,
    frechet_min,
    get_function,
    iterated_difference,
    neg_sqrt_product,
    riesz_kernel,
    sz_alternating_sum,
    sz_bounds,
)
from hhverify.errors import DegenerateInput, DomainError

from oracles import divided_difference_recursive, iterated

LN2 = math.log(2.0)
cone_vec = st.lists(st.floats(0.0, 2.0), min_size=2, max_size=2).map(np.array)


class TestConePoint:
    def test_validation(self):
        assert len(ConePoint((1.0, 0.0, 2.0))) == 3
        with pytest.raises(DomainError):
            ConePoint((1.0, -0.1))


class TestConeIteratedDifference:
    def test_min_example(self):
        assert cone_iterated_difference(frechet_min(), (0, 0), [(1, 0), (0, 1)]) == 1.0

    def test_neg_sqrt_reference_point(self):
        got = cone_iterated_difference(neg_sqrt_product(), (0.01, 0.01), [(1, 2), (2, 1)])
        ref = -2 * (mpmath.sqrt(mpmath.mpf("3.01") ** 2) - 2 * mpmath.sqrt(mpmath.mpf("1.01") * mpmath.mpf("2.01")) + mpmath.mpf("0.01"))
        assert got == pytest.approx(float(ref), rel=1e-12)
        assert got == pytest.approx(-0.3407, abs=1e-4)

    def test_composed_matches_scalar(self):
        phi = composed(CATALOG["cube"], (1.0, 1.0))
        got = cone_iterated_difference(phi, (0, 0), [(1, 0), (0, 2), (3, 0)])
        assert got == 36.0
        assert got == iterated_difference(CATALOG["cube"], 0.0, (1, 2, 3))

    def test_riesz_needs_open_cone(self):
        with pytest.raises(DomainError):
            cone_iterated_difference(riesz_kernel((1.0, 1.0)), (0.0, 1.0), [(1, 1)])

    @given(cone_vec, st.lists(cone_vec, min_size=1, max_size=3))
    def test_matches_recursive_operator(self, base, steps):
        f = exp_linear((0.5, 1.5))
        g = lambda x: math.exp(-(0.5 * x[0] + 1.5 * x[1]))
        ref = iterated(g, steps)(base)
        assert cone_iterated_difference(f, base, steps) == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_min_second_difference_can_be_negative(self):
        # min is concave, so a repeated step along one ray gives a nonpositive second difference
        assert cone_iterated_difference(frechet_min(), (1, 0), [(0, 1), (0, 1)]) == -1.0
        s, t = 0.1, 1.0
        assert cone_iterated_difference(frechet_min(), (1, 0), [(s, t), (s, t)]) == pytest.approx(-0.8)

    @given(cone_vec, st.floats(0.0, 2.0), st.floats(0.0, 2.0))
    def test_min_mixed_axis_steps_nonnegative(self, base, s, v):
        assert cone_iterated_difference(frechet_min(), base, [(s, 0.0), (0.0, v)]) >= 0.0

    @given(cone_vec, st.lists(cone_vec, min_size=2, max_size=3), st.randoms())
    def test_step_order_irrelevant(self, base, steps, rnd):
        shuffled = list(steps)
        rnd.shuffle(shuffled)
        f = frechet_min()
        a = cone_iterated_difference(f, base, steps)
        b = cone_iterated_difference(f, base, shuffled)
        assert a == pytest.approx(b, abs=1e-12)

    @given(cone_vec, st.lists(cone_vec, min_size=3, max_size=3), st.sampled_from(["exp", "cube", "sinh"]))
    def test_composed_positive_differences(self, base, steps, name):
        # f(<x, w>) with f 3-convex: third differences along cone steps are >= 0
        phi = composed(CATALOG[name], (0.3, 0.7))
        assert cone_iterated_difference(phi, base, steps) >= -1e-9 * 50


class TestSendovZitikis:
    def test_exponential_example(self):
        f = exp_linear((1.0, 1.0))
        assert sz_alternating_sum(f, [(LN2, 0), (0, LN2)]) == pytest.approx(0.75, rel=1e-12)

    def test_single_point(self):
        f = exp_linear((1.0, 2.0))
        assert sz_alternating_sum(f, [(0.3, 0.4)]) == pytest.approx(math.exp(-1.1))

    def test_riesz_example(self):
        f = riesz_kernel((1.0, 1.0))
        assert sz_alternating_sum(f, [(1, 1)] * 3) == pytest.approx(3 - 0.75 + 1 / 9, rel=1e-12)
        lower, upper, _ = sz_bounds(f, [(1, 1)] * 3)
        assert lower > 0 and upper == math.inf

    @given(st.lists(cone_vec, min_size=1, max_size=5))
    def test_double_bound(self, points):
        f = exp_linear((1.0, 0.5))
        lower, upper, scale = sz_bounds(f, points)
        assert lower >= -1e-9 * scale
        assert upper >= -1e-9 * scale

    @given(cone_vec.filter(lambda v: v.sum() > 0), st.integers(2, 5))
    def test_equal_points_give_p(self, x, n):
        y = np.array([0.7, 1.3])
        s = sz_alternating_sum(exp_linear(y), [x] * n)
        p, _ = bernstein_pq_values([float(x @ y)] * n)
        assert s == pytest.approx(p, rel=1e-9, abs=1e-15)


class TestBernsteinPQ:
    def test_ln2(self):
        p, q = bernstein_pq_values((LN2, LN2))
        assert p == pytest.approx(0.75, rel=1e-12) and q == pytest.approx(0.25, rel=1e-12)

    def test_zeros(self):
        assert bernstein_pq_values((0.0, 0.0, 0.0)) == (1.0, 0.0)
        assert bernstein_pq_closed_form((0.0, 2.0)) == (1.0, 0.0)

    def test_large_exponents(self):
        p, _ = bernstein_pq_values((20.0, 20.0, 20.0))
        assert p == pytest.approx(3 * math.exp(-20), rel=1e-6)
        assert p >= 0

    def test_errors(self):
        with pytest.raises(ValueError):
            bernstein_pq_values((1.0,))
        with pytest.raises(DomainError):
            bernstein_pq_values((1.0, -1.0))

    @given(st.lists(st.floats(0.25, 6.0), min_size=2, max_size=6))
    def test_closed_form(self, alphas):
        p, q = bernstein_pq_values(alphas)
        pc, qc = bernstein_pq_closed_form(alphas)
        ref_q = mpmath.fprod(1 - mpmath.exp(-a) for a in alphas)
        assert pc == pytest.approx(float(1 - ref_q), rel=1e-12)
        assert qc == pytest.approx(float(ref_q), rel=1e-12)
        assert p == pytest.approx(pc, rel=1e-9)
        assert q == pytest.approx(qc, rel=1e-9)
        assert p >= 0 and q >= 0


class TestCompleteMonotonicityProbe:
    def test_riesz_one_dimensional(self):
        v = cm_difference_probe(riesz_kernel((1.0,)), [(1.0, 3.0)], max_order=3)
        assert v.passed

    def test_exponential(self):
        v = cm_difference_probe(exp_linear((1.0, 2.0)), [(0.5, 2.0)] * 2, max_order=4, grid=8)
        assert v.passed

    def test_neg_sqrt_fails_at_order_two(self):
        v = cm_difference_probe(neg_sqrt_product(), [(0.5, 2.0)] * 2, max_order=2)
        assert not v.passed
        assert v.order == 2
        x, steps = v.witness
        assert (-1) ** 2 * cone_iterated_difference(neg_sqrt_product(), x, steps) == pytest.approx(v.min_margin, rel=1e-12)

    def test_boundary_box_rejected(self):
        with pytest.raises(DomainError):
            cm_difference_probe(riesz_kernel((1.0,)), [(0.0, 1.0)])
        with pytest.raises(ValueError):
            cm_difference_probe(exp_linear((1.0,)), [(0.0, 1.0)], max_order=5)

    def test_deterministic(self):
        f = riesz_kernel((0.5, 1.5, 1.0))
        a = cm_difference_probe(f, [(0.1, 1.0)] * 3, max_order=3, grid=5, seed=4)
        b = cm_difference_probe(f, [(0.1, 1.0)] * 3, max_order=3, grid=5, seed=4)
        assert a == b


def _node_prod(nodes, t):
    return math.prod(t - u for u in nodes if u != t)


class TestDoubleDividedDifference:
    @pytest.mark.parametrize(
        "f, xs, ys, expected",
        [
            (lambda x, y: x * y, (0, 1), (0, 1), 1.0),
            (lambda x, y: x * x * y, (0, 1, 2), (0, 1), 1.0),
            (lambda x, y: x + y, (0, 1), (0, 1), 0.0),
        ],
    )
    def test_examples(self, f, xs, ys, expected):
        assert double_divided_difference(xs, ys, f) == pytest.approx(expected, abs=1e-14)

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            double_divided_difference((0.0, 0.0), (0.0, 1.0), lambda x, y: x * y)

    @given(
        st.lists(st.floats(0.0, 3.0), min_size=2, max_size=4, unique=True),
        st.lists(st.floats(0.0, 3.0), min_size=2, max_size=4, unique=True),
    )
    def test_order_of_application(self, xs, ys):
        assume(min(np.diff(sorted(xs))) > 1e-2 and min(np.diff(sorted(ys))) > 1e-2)
        f = lambda x, y: math.exp(0.3 * x) * math.sqrt(1 + y) + x * y * y
        a = double_divided_difference_nested(xs, ys, f, first="x")
        b = double_divided_difference_nested(xs, ys, f, first="y")
        # cancellation makes a value-relative bound unattainable; compare on the term scale
        scale = sum(abs(f(x, y) / (_node_prod(xs, x) * _node_prod(ys, y))) for x in xs for y in ys)
        assert abs(a - b) <= 1e-9 * scale
        ref = divided_difference_recursive(
            lambda y: divided_difference_recursive(lambda x: mpmath.exp(0.3 * x) * mpmath.sqrt(1 + y) + x * y * y, xs), ys
        )
        assert abs(double_divided_difference(xs, ys, f) - float(ref)) <= 1e-12 * scale
        # the product form is symmetric exactly
        g = lambda x, y: f(y, x)
        assert double_divided_difference(xs, ys, f) == double_divided_difference(ys, xs, g)

    def test_min_is_order_one_one_convex(self):
        # mixed differences of min(x, y) are nonnegative
        for xs, ys in [((0.0, 1.0), (0.5, 2.0)), ((0.2, 0.8), (0.1, 0.9))]:
            assert double_divided_difference(xs, ys, min) >= 0.0


def test_catalog_parameters():
    assert exp_linear((1.0, 2.0))((1.0, 1.0)) == pytest.approx(math.exp(-3.0))
    assert riesz_kernel((1.0, 2.0))((2.0, 2.0)) == pytest.approx(1 / 8)
    assert composed(get_function("log1p"), (1.0, 2.0))((1.0, 1.0)) == pytest.approx(math.log(4.0))
    with pytest.raises(DomainError):
        exp_linear((-1.0, 1.0))
