import numpy as np
import pytest

from entropic_talagrand import (DiscreteMeasure, GridSpace, PotentialSpec,
                                ScalarField, apply_heat, apply_hjb,
                                build_generator, entropy_dual_value,
                                gaussian_grid, hopf_lax, product_kernel,
                                relative_entropy, transition_kernel)
from entropic_talagrand.draws import smooth_field


class TestApplyHeat:
    def test_preserves_constants(self, k64):
        f = ScalarField.constant(k64.space, 1.0)
        assert np.allclose(apply_heat(k64, f).values, 1.0, atol=1e-12)

    def test_near_identity_kernel(self, gen64, rng):
        k = transition_kernel(gen64, 1e-9)
        f = ScalarField(k.space, rng.uniform(0.5, 2.0, k.space.n_points))
        assert np.allclose(apply_heat(k, f).values, f.values, atol=1e-6)

    def test_stationarity_of_averages(self, k64, m64, rng):
        f = ScalarField(k64.space, rng.normal(size=k64.space.n_points))
        before = float(np.dot(m64.weights, f.values))
        after = float(np.dot(m64.weights, apply_heat(k64, f).values))
        assert after == pytest.approx(before, abs=1e-10)


class TestApplyHjb:
    def test_constants_are_fixed_points(self, k64):
        phi = ScalarField.constant(k64.space, -1.7)
        out = apply_hjb(k64, phi, 1.0)
        assert np.allclose(out.values, -1.7, atol=1e-12)

    def test_dominated_by_heat_average(self, k64, rng):
        phi = smooth_field(k64.space, rng)
        soft = apply_hjb(k64, phi, 1.0)
        avg = k64.k @ phi.values
        assert np.all(soft.values <= avg + 1e-12)

    def test_range_bounds(self, k64, rng):
        phi = smooth_field(k64.space, rng)
        out = apply_hjb(k64, phi, 0.25)
        assert out.values.min() >= phi.values.min() - 1e-12
        assert out.values.max() <= phi.values.max() + 1e-12

    def test_monotone(self, k64, rng):
        phi = smooth_field(k64.space, rng)
        psi = ScalarField(phi.space, phi.values + rng.uniform(0.0, 1.0, phi.space.n_points))
        out_lo = apply_hjb(k64, phi, 0.5)
        out_hi = apply_hjb(k64, psi, 0.5)
        assert np.all(out_hi.values >= out_lo.values - 1e-12)

    def test_additive_constants(self, k64, rng):
        phi = smooth_field(k64.space, rng)
        shifted = ScalarField(phi.space, phi.values + 3.25)
        a = apply_hjb(k64, phi, 0.5).values + 3.25
        b = apply_hjb(k64, shifted, 0.5).values
        assert np.max(np.abs(a - b)) < 1e-12

    def test_matches_variational_form(self, k64, rng):
        # Q phi(x) equals the minimum over p of <phi, p> + eps*H(p|row);
        # the row's exponential tilt attains it, perturbations exceed it.
        eps = 0.5
        phi = smooth_field(k64.space, rng)
        out = apply_hjb(k64, phi, eps)
        i = 31
        row = DiscreteMeasure(k64.space, k64.k[i] / k64.k[i].sum())
        tilt_log = row.log_weights - phi.values / eps
        p_star = DiscreteMeasure.from_log_weights(k64.space, tilt_log)
        val_star = (float(np.dot(p_star.weights, phi.values))
                    + eps * relative_entropy(p_star, row))
        assert val_star == pytest.approx(out.values[i], abs=1e-10)
        mix = DiscreteMeasure(k64.space, 0.7 * p_star.weights + 0.3 * row.weights)
        val_mix = (float(np.dot(mix.weights, phi.values))
                   + eps * relative_entropy(mix, row))
        assert val_mix >= out.values[i] - 1e-12

    def test_scaling_identity(self, grid64, quad_pot, rng):
        # (1/C) Q_t^eps (C psi) = Q_{tC}^{eps/C} psi, entrywise
        psi = smooth_field(grid64, rng)
        base = transition_kernel(build_generator(grid64, quad_pot, 1.0), 1.0)
        for c in (0.5, 2.0, 5.0):
            lhs = apply_hjb(base, ScalarField(grid64, c * psi.values), 1.0).values / c
            scaled = transition_kernel(build_generator(grid64, quad_pot, 1.0 / c), c)
            rhs = apply_hjb(scaled, psi, 1.0 / c).values
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_separable_nesting_on_products(self, quad_pot, rng):
        grid = gaussian_grid(1.0, 12)
        gen = build_generator(grid, quad_pot, 1.0)
        k1 = transition_kernel(gen, 1.0)
        kp = product_kernel(k1, k1)
        f = smooth_field(grid, rng)
        g = smooth_field(grid, rng)
        phi = ScalarField(kp.space, (f.values[:, None] + g.values[None, :]).ravel())
        joint = apply_hjb(kp, phi, 1.0).values
        nested = (apply_hjb(k1, f, 1.0).values[:, None]
                  + apply_hjb(k1, g, 1.0).values[None, :]).ravel()
        assert np.max(np.abs(joint - nested)) < 1e-10


class TestEntropyDualValue:
    def test_zero_field(self, m64):
        psi = ScalarField.constant(m64.space, 0.0)
        assert entropy_dual_value(m64, psi) == pytest.approx(0.0, abs=1e-12)

    def test_supremum_attained_at_tilt(self, m64, rng):
        psi = smooth_field(m64.space, rng)
        val = entropy_dual_value(m64, psi)
        q_star = DiscreteMeasure.from_log_weights(m64.space,
                                                  m64.log_weights + psi.values)
        attained = (float(np.dot(q_star.weights, psi.values))
                    - relative_entropy(q_star, m64))
        assert attained == pytest.approx(val, abs=1e-10)

    def test_gap_is_entropy_to_tilt(self, m64, rng):
        psi = smooth_field(m64.space, rng)
        val = entropy_dual_value(m64, psi)
        q_star = DiscreteMeasure.from_log_weights(m64.space,
                                                  m64.log_weights + psi.values)
        q = DiscreteMeasure(m64.space, 0.5 * q_star.weights + 0.5 * m64.weights)
        lower = float(np.dot(q.weights, psi.values)) - relative_entropy(q, m64)
        gap = val - lower
        assert gap == pytest.approx(relative_entropy(q, q_star), abs=1e-10)
        assert gap > 0.0


class TestHopfLax:
    def test_constants(self, grid64):
        phi = ScalarField.constant(grid64, 2.0)
        assert np.allclose(hopf_lax(grid64, phi, 0.7).values, 2.0)

    def test_single_well(self):
        grid = GridSpace([np.arange(5.0)])
        big = 100.0
        vals = np.full(5, big)
        vals[2] = 0.0
        phi = ScalarField(grid, vals)
        out = hopf_lax(grid, phi, 0.5).values
        x = grid.axes[0]
        expected = np.minimum((x - 2.0) ** 2, big)
        assert np.allclose(out, expected)

    def test_soft_to_hard_convergence(self, quad_pot):
        # Noise sweep {1, 1/4, 1/16} decreases monotonically toward the hard
        # infimum; gap at 1/16 measured 0.0883 on first run, bound at 0.15.
        sigma = 1.0 / np.sqrt(2.0)
        grid = GridSpace.regular(-4 * sigma, 4 * sigma, 256)
        phi = smooth_field(grid, np.random.default_rng(7), amplitude=0.5)
        hard = hopf_lax(grid, phi, 1.0)
        gaps = []
        for eps in (1.0, 0.25, 0.0625):
            k = transition_kernel(build_generator(grid, quad_pot, eps), 1.0)
            soft = apply_hjb(k, phi, eps)
            gaps.append(float(np.max(np.abs(soft.values - hard.values))))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.15
