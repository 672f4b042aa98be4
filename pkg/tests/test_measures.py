import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_talagrand import (DiscreteMeasure, GridSpace, ScalarField,
                                SpaceMismatchError, ent_functional, p_norm,
                                product_measure, relative_entropy)
from entropic_talagrand.errors import DomainError
from entropic_talagrand.measures import factor_marginals


def two_point_space():
    return GridSpace([np.array([0.0, 1.0])])


def measure(*w):
    space = GridSpace([np.arange(float(len(w)))])
    return DiscreteMeasure(space, np.array(w))


class TestGridSpace:
    def test_rejects_decreasing_axis(self):
        with pytest.raises(ValueError):
            GridSpace([np.array([0.0, 2.0, 1.0])])

    def test_rejects_uneven_spacing(self):
        with pytest.raises(ValueError):
            GridSpace([np.array([0.0, 1.0, 3.0])])

    def test_product_points_count(self):
        a = GridSpace.regular(0, 1, 3)
        b = GridSpace.regular(0, 1, 5)
        assert a.product(b).n_points == 15

    def test_points_c_order(self):
        a = GridSpace([np.array([0.0, 1.0])])
        b = GridSpace([np.array([10.0, 20.0, 30.0])])
        pts = a.product(b).points
        # index = i * 3 + j with the second coordinate varying fastest
        assert pts[1].tolist() == [0.0, 20.0]
        assert pts[3].tolist() == [1.0, 10.0]


class TestDiscreteMeasure:
    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            measure(1.2, -0.2)

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            measure(0.6, 0.6)

    def test_json_round_trip(self):
        m = measure(0.25, 0.75)
        back = DiscreteMeasure.from_json_dict(m.to_json_dict())
        assert np.array_equal(back.weights, m.weights)
        assert back.space.matches(m.space)


class TestRelativeEntropy:
    def test_identity_is_zero(self):
        q = measure(0.3, 0.7)
        assert relative_entropy(q, q) == 0.0

    def test_absolute_continuity_failure(self):
        assert relative_entropy(measure(1.0, 0.0), measure(0.0, 1.0)) == math.inf

    def test_hand_value(self):
        # 0.5*log 2 + 0.5*log(2/3) = log 2 - log(3)/2
        expected = math.log(2.0) - 0.5 * math.log(3.0)
        got = relative_entropy(measure(0.5, 0.5), measure(0.25, 0.75))
        assert got == pytest.approx(expected, abs=1e-14)

    def test_space_mismatch(self):
        q = measure(0.5, 0.5)
        p = DiscreteMeasure(GridSpace([np.array([0.0, 2.0])]), [0.5, 0.5])
        with pytest.raises(SpaceMismatchError):
            relative_entropy(q, p)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_nonnegative_zero_iff_equal(self, seed):
        gen = np.random.default_rng(seed)
        space = GridSpace([np.arange(6.0)])
        q = DiscreteMeasure(space, gen.dirichlet(np.ones(6)))
        p = DiscreteMeasure(space, gen.dirichlet(np.ones(6)))
        h = relative_entropy(q, p)
        assert h >= 0.0
        if h == 0.0:
            assert np.allclose(q.weights, p.weights, atol=1e-9)
        assert relative_entropy(q, q) == 0.0


class TestPNorm:
    def test_constant_any_p(self):
        space = GridSpace([np.arange(4.0)])
        m = DiscreteMeasure.uniform(space)
        f = ScalarField.constant(space, 2.5)
        for p in (-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 7.0):
            assert p_norm(f, p, m) == pytest.approx(2.5, rel=1e-12)

    def test_p_one_is_mean(self, rng):
        space = GridSpace([np.arange(5.0)])
        m = DiscreteMeasure(space, rng.dirichlet(np.ones(5)))
        f = ScalarField(space, rng.uniform(0.1, 3.0, 5))
        assert p_norm(f, 1.0, m) == pytest.approx(float(np.dot(m.weights, f.values)), rel=1e-12)

    def test_geometric_mean(self):
        m = DiscreteMeasure(two_point_space(), [0.5, 0.5])
        f = ScalarField(two_point_space(), [1.0, 4.0])
        assert p_norm(f, 0.0, m) == pytest.approx(2.0, rel=1e-12)

    def test_rejects_zero_at_nonpositive_p(self):
        space = two_point_space()
        m = DiscreteMeasure.uniform(space)
        f = ScalarField(space, [0.0, 1.0])
        with pytest.raises(DomainError):
            p_norm(f, -1.0, m)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_nondecreasing_in_p(self, seed):
        gen = np.random.default_rng(seed)
        space = GridSpace([np.arange(8.0)])
        m = DiscreteMeasure(space, gen.dirichlet(np.ones(8)))
        f = ScalarField(space, gen.uniform(0.2, 5.0, 8))
        ps = [-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0]
        norms = [p_norm(f, p, m) for p in ps]
        for lo, hi in zip(norms, norms[1:]):
            assert hi >= lo - 1e-12 * max(1.0, abs(hi))


class TestEntFunctional:
    def test_constant_is_zero(self):
        space = two_point_space()
        m = DiscreteMeasure.uniform(space)
        assert ent_functional(ScalarField.constant(space, 3.0), m) == 0.0

    def test_hand_value(self):
        # 2*0.5*log 2 - 1.5*log 1.5
        m = DiscreteMeasure(two_point_space(), [0.5, 0.5])
        f = ScalarField(two_point_space(), [2.0, 1.0])
        expected = math.log(2.0) - 1.5 * math.log(1.5)
        assert ent_functional(f, m) == pytest.approx(expected, abs=1e-14)

    def test_tilt_identity(self, m64, rng):
        # Ent_m(e^g) = (integral e^g dm) * H(nu_g | m) for the tilt nu_g
        g = rng.normal(scale=0.7, size=m64.space.n_points)
        f = ScalarField(m64.space, np.exp(g))
        mass = float(np.dot(m64.weights, f.values))
        nu_g = DiscreteMeasure(m64.space, m64.weights * f.values / mass)
        lhs = ent_functional(f, m64)
        rhs = mass * relative_entropy(nu_g, m64)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


class TestProductMeasure:
    def test_dirac_product(self):
        a = DiscreteMeasure.dirac(two_point_space(), 0)
        b = DiscreteMeasure.dirac(GridSpace([np.arange(3.0)]), 2)
        prod = product_measure(a, b)
        assert prod.weights[2] == 1.0
        assert prod.weights.sum() == 1.0

    def test_uniform_product(self):
        a = DiscreteMeasure.uniform(two_point_space())
        prod = product_measure(a, a)
        assert np.allclose(prod.weights, 0.25)

    def test_marginals_recover_factors(self, rng):
        a = measure(*rng.dirichlet(np.ones(4)))
        b = measure(*rng.dirichlet(np.ones(3)))
        prod = product_measure(a, b)
        first, second = factor_marginals(prod, 4)
        assert np.allclose(first, a.weights, atol=1e-15)
        assert np.allclose(second, b.weights, atol=1e-15)

    def test_entropy_additivity(self, rng):
        a = measure(*rng.dirichlet(np.ones(4)))
        b = measure(*rng.dirichlet(np.ones(3)))
        m1 = measure(*rng.dirichlet(np.ones(4)))
        m2 = measure(*rng.dirichlet(np.ones(3)))
        lhs = relative_entropy(product_measure(a, b), product_measure(m1, m2))
        rhs = relative_entropy(a, m1) + relative_entropy(b, m2)
        assert lhs == pytest.approx(rhs, abs=1e-12)
