import math

import numpy as np
import pytest

from entropic_talagrand import (DiscreteMeasure, GridSpace, ParameterError,
                                PotentialSpec, build_generator, gaussian_grid,
                                ou_closed_form, product_kernel,
                                stationary_measure, transition_kernel)
from entropic_talagrand.errors import DegeneratePotentialError
from entropic_talagrand.reference import kernel_to_csv


class TestStationaryMeasure:
    def test_flat_potential_is_uniform(self):
        grid = GridSpace.regular(0, 1, 9)
        m = stationary_measure(grid, PotentialSpec.tabulated(np.zeros(9)))
        assert np.allclose(m.weights, 1.0 / 9)

    def test_quadratic_matches_gaussian_shape(self):
        grid = gaussian_grid(0.5, 33)
        m = stationary_measure(grid, PotentialSpec.quadratic(0.5))
        x = grid.axes[0]
        expected = np.exp(-0.5 * x**2)
        expected /= expected.sum()
        assert np.allclose(m.weights, expected, atol=1e-15)

    def test_constant_shift_invariance(self):
        grid = GridSpace.regular(-1, 1, 17)
        vals = np.cos(grid.axes[0])
        m1 = stationary_measure(grid, PotentialSpec.tabulated(vals))
        m2 = stationary_measure(grid, PotentialSpec.tabulated(vals + 7.5))
        assert np.allclose(m1.weights, m2.weights, atol=1e-15)

    def test_degenerate_potential(self):
        # log-domain normalization survives any finite tilt; only a true
        # float overflow of -2U leaves no mass at all
        grid = GridSpace.regular(0, 1, 4)
        with pytest.raises(DegeneratePotentialError):
            stationary_measure(grid, PotentialSpec.tabulated([1e308] * 4))


class TestGenerator:
    def test_flat_potential_random_walk_rates(self):
        grid = GridSpace([np.arange(5.0)])  # spacing 1
        gen = build_generator(grid, PotentialSpec.tabulated(np.zeros(5)), 0.8)
        assert gen.rate_matrix[1, 2] == pytest.approx(0.4)
        assert gen.rate_matrix[1, 0] == pytest.approx(0.4)
        assert gen.rate_matrix[0, 2] == 0.0

    def test_row_sums_zero(self, gen64):
        assert np.max(np.abs(gen64.rate_matrix.sum(axis=1))) < 1e-12

    def test_detailed_balance(self, gen64):
        # symmetric by construction; floats differ only by rounding of the
        # two exp evaluation orders
        m = gen64.stationary.weights
        flux = m[:, None] * gen64.rate_matrix
        assert np.max(np.abs(flux - flux.T)) < 1e-12

    def test_product_grid_is_kronecker_sum(self, quad_pot):
        g1 = gaussian_grid(1.0, 6)
        gen1 = build_generator(g1, quad_pot, 1.0)
        grid2d = g1.product(g1)
        gen2d = build_generator(grid2d, quad_pot, 1.0)
        eye = np.eye(6)
        kron_sum = np.kron(gen1.rate_matrix, eye) + np.kron(eye, gen1.rate_matrix)
        assert np.max(np.abs(gen2d.rate_matrix - kron_sum)) < 1e-12

    def test_rejects_nonpositive_epsilon(self, grid64, quad_pot):
        with pytest.raises(ParameterError):
            build_generator(grid64, quad_pot, 0.0)


class TestTransitionKernel:
    def test_short_time_is_identity(self, gen64):
        k = transition_kernel(gen64, 1e-8)
        off_diag = k.k - np.diag(np.diag(k.k))
        assert np.max(off_diag) < 1e-6

    def test_rows_sum_to_one(self, k64):
        assert k64.row_sum_residual() < 1e-10

    def test_entries_in_unit_interval(self, k64):
        assert k64.k.min() >= 0.0
        assert k64.k.max() <= 1.0 + 1e-12

    def test_stationarity(self, k64, m64):
        assert np.max(np.abs(m64.weights @ k64.k - m64.weights)) < 1e-10

    def test_reversibility(self, k64):
        assert k64.reversibility_residual() < 1e-10

    def test_semigroup_property(self, gen64):
        ks = transition_kernel(gen64, 0.4)
        kt = transition_kernel(gen64, 0.6)
        kst = transition_kernel(gen64, 1.0)
        assert np.max(np.abs(ks.k @ kt.k - kst.k)) < 1e-10

    def test_time_change_scaling(self, grid64, quad_pot):
        k_eps = transition_kernel(build_generator(grid64, quad_pot, 0.25), 1.2)
        k_one = transition_kernel(build_generator(grid64, quad_pot, 1.0), 0.3)
        assert np.max(np.abs(k_eps.k - k_one.k)) < 1e-12

    def test_rejects_nonpositive_t(self, gen64):
        with pytest.raises(ParameterError):
            transition_kernel(gen64, 0.0)


class TestOuClosedForm:
    def test_first_two_moments(self):
        # dX = -eps*lam*X dt + sqrt(eps) dB at lam=1, eps=1, t=log 2:
        # conditional mean x/2, conditional variance 3/8.
        sigma = 1.0 / math.sqrt(2.0)
        grid = GridSpace.regular(-4 * sigma, 4 * sigma, 256)
        k = ou_closed_form(grid, 1.0, 1.0, math.log(2.0))
        x = grid.axes[0]
        i = 128  # interior row, away from truncation
        row = k.k[i]
        mean = float(np.dot(row, x))
        var = float(np.dot(row, (x - mean) ** 2))
        assert mean == pytest.approx(x[i] / 2.0, abs=1e-4)
        assert var == pytest.approx(3.0 / 8.0, abs=1e-3)

    def test_ergodic_limit_rows_approach_stationary(self):
        grid = gaussian_grid(1.0, 64)
        k = ou_closed_form(grid, 1.0, 1.0, 50.0)
        m = stationary_measure(grid, PotentialSpec.quadratic(1.0))
        tv = 0.5 * np.max(np.abs(k.k - m.weights[None, :]).sum(axis=1))
        assert tv < 1e-6

    def test_cross_check_against_generator_kernel(self, quad_pot):
        # Row-wise total variation against the reversible-generator kernel
        # on a fine grid.  Thresholds recorded at first measurement:
        # 0.0150 at t = 2.0 and 0.0538 at t = log 2 (n = 256, +-4 sigma).
        sigma = 1.0 / math.sqrt(2.0)
        grid = GridSpace.regular(-4 * sigma, 4 * sigma, 256)
        gen = build_generator(grid, quad_pot, 1.0)
        for t, bound in ((2.0, 0.02), (math.log(2.0), 0.06)):
            kd = transition_kernel(gen, t)
            ko = ou_closed_form(grid, 1.0, 1.0, t)
            tv = 0.5 * np.max(np.abs(kd.k - ko.k).sum(axis=1))
            assert tv < bound

    def test_rejects_bad_lambda(self, grid64):
        with pytest.raises(ParameterError):
            ou_closed_form(grid64, -1.0, 1.0, 1.0)


class TestProductKernel:
    @pytest.fixture(scope="class")
    def small_pair(self, quad_pot):
        grid = gaussian_grid(1.0, 10)
        gen = build_generator(grid, quad_pot, 1.0)
        return transition_kernel(gen, 1.0), gen.stationary

    def test_rows_sum_to_one(self, small_pair):
        k, _ = small_pair
        kp = product_kernel(k, k)
        assert kp.row_sum_residual() < 1e-10

    def test_detailed_balance_on_product(self, small_pair):
        k, _ = small_pair
        kp = product_kernel(k, k)
        assert kp.reversibility_residual() < 1e-10

    def test_product_of_near_identities_is_near_identity(self, quad_pot):
        grid = gaussian_grid(1.0, 10)
        gen = build_generator(grid, quad_pot, 1.0)
        k = transition_kernel(gen, 1e-9)
        kp = product_kernel(k, k)
        off_diag = kp.k - np.diag(np.diag(kp.k))
        assert np.max(off_diag) < 1e-6

    def test_matches_product_grid_generator(self, quad_pot):
        grid = gaussian_grid(1.0, 6)
        gen1 = build_generator(grid, quad_pot, 1.0)
        k1 = transition_kernel(gen1, 1.0)
        kp = product_kernel(k1, k1)
        gen2d = build_generator(grid.product(grid), quad_pot, 1.0)
        k2d = transition_kernel(gen2d, 1.0)
        assert np.max(np.abs(kp.k - k2d.k)) < 1e-10

    def test_rejects_mismatched_parameters(self, small_pair, quad_pot):
        k, _ = small_pair
        grid = gaussian_grid(1.0, 10)
        other = transition_kernel(build_generator(grid, quad_pot, 0.5), 1.0)
        with pytest.raises(ParameterError):
            product_kernel(k, other)


def test_potential_json_round_trip():
    for pot in (PotentialSpec.quadratic(0.7),
                PotentialSpec.double_well(1.2, 0.6),
                PotentialSpec.tabulated([0.0, 1.0, 0.5])):
        back = PotentialSpec.from_json_dict(pot.to_json_dict())
        assert back.family == pot.family
        grid = GridSpace.regular(-1, 1, 3)
        assert np.allclose(back.evaluate(grid), pot.evaluate(grid))


def test_kernel_csv_dump(tmp_path, k64):
    path = tmp_path / "kernel.csv"
    kernel_to_csv(k64, path)
    rows = path.read_text().strip().split("\n")
    assert len(rows) == 64
    first = [float(v) for v in rows[0].split(",")]
    assert len(first) == 64
    assert np.allclose(first, k64.log_k[0], atol=0.0)
