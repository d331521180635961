"""Relative energy: Bregman structure, coercivity, scaling, stability gap."""

import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from stratoflow.energy import (
    CompressibleState,
    EssentialSet,
    ReferenceTriple,
    ballistic_energy,
    coercivity_check,
    ess_res_split,
    invert_temperature,
    rel_energy_conservative,
    rel_energy_conservative_density,
    rel_energy_density,
    rel_energy_total,
    stability_gap,
)
from stratoflow.errors import DomainError
from stratoflow.initial import random_bandlimited, shear_layer, taylor_green
from stratoflow.solver import LayeredGrid, LayeredState, SolverConfig
from stratoflow.thermo import ThermoState, entropy, ideal_monoatomic, internal_energy, third_law_compliant


def make_ref(shape, rho=1.0, theta=1.0):
    return ReferenceTriple(
        r_tilde=np.full(shape, rho),
        theta_tilde=np.full(shape, theta),
        u_tilde=np.zeros((3,) + shape),
    )


class TestDensity:
    def test_zero_at_reference(self):
        eos = ideal_monoatomic()
        shape = (5, 4)
        ref = make_ref(shape)
        state = CompressibleState(
            rho=ref.r_tilde.copy(), theta=ref.theta_tilde.copy(),
            u=ref.u_tilde.copy(), epsilon=0.1,
        )
        dens = rel_energy_density(eos, state, ref)
        assert np.all(dens == 0.0)

    def test_velocity_only_perturbation(self):
        eos = ideal_monoatomic()
        shape = (8,)
        ref = make_ref(shape, rho=1.3)
        rng = np.random.Generator(np.random.Philox(21))
        w = rng.standard_normal((3,) + shape)
        state = CompressibleState(rho=ref.r_tilde.copy(), theta=ref.theta_tilde.copy(),
                                  u=w, epsilon=0.5)
        dens = rel_energy_density(eos, state, ref)
        assert np.allclose(dens, 0.5 * 1.3 * np.sum(w ** 2, axis=0), rtol=1e-12)

    def test_density_matches_hessian_oracle(self):
        # rho-only perturbation: the bracket is the 1-d Bregman divergence of
        # F(rho) = rho e - theta~ rho s at theta = theta~; its finite-difference
        # Hessian gives the quadratic prediction, valid to ~5% at delta = 0.1
        eos = ideal_monoatomic()
        shape = (1,)
        ref = make_ref(shape)
        state = CompressibleState(rho=np.array([1.1]), theta=np.array([1.0]),
                                  u=np.zeros((3, 1)), epsilon=1.0)
        val = float(rel_energy_density(eos, state, ref)[0])

        def F(rho):
            s = ThermoState(rho=rho, theta=1.0)
            return rho * internal_energy(eos, s) - 1.0 * rho * entropy(eos, s)

        h = 1e-4
        hessian = (F(1.0 + h) - 2.0 * F(1.0) + F(1.0 - h)) / h ** 2
        assert val == pytest.approx(0.5 * hessian * 0.1 ** 2, rel=0.05)

    def test_nonnegative_on_essential_samples(self):
        eos = ideal_monoatomic()
        rng = np.random.Generator(np.random.Philox(22))
        n = 10_000
        rho = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))
        theta = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))
        u = rng.standard_normal((3, n))
        ref = make_ref((n,))
        state = CompressibleState(rho=rho, theta=theta, u=u, epsilon=1.0)
        dens = rel_energy_density(eos, state, ref)
        assert np.all(dens >= 0.0)

    def test_definiteness(self):
        eos = ideal_monoatomic()
        n = 500
        rng = np.random.Generator(np.random.Philox(23))
        ref = make_ref((n,))
        rho = 1.0 + 1e-4 * rng.standard_normal(n)
        theta = 1.0 + 1e-4 * rng.standard_normal(n)
        u = 1e-4 * rng.standard_normal((3, n))
        state = CompressibleState(rho=rho, theta=theta, u=u, epsilon=1.0)
        dens = rel_energy_density(eos, state, ref)
        deviation = np.abs(rho - 1.0) + np.abs(theta - 1.0) + np.sum(np.abs(u), axis=0)
        assert np.all(dens[deviation > 1e-8] > 0.0)

    def test_grid_mismatch_rejected(self):
        eos = ideal_monoatomic()
        ref = make_ref((4,))
        state = CompressibleState(rho=np.ones(5), theta=np.ones(5),
                                  u=np.zeros((3, 5)), epsilon=1.0)
        with pytest.raises(DomainError):
            rel_energy_density(eos, state, ref)


class TestTotalAndScaling:
    def test_zero_perturbation_total(self):
        grid = LayeredGrid(n1=8, n2=8, n3=4)
        eos = ideal_monoatomic()
        ref = make_ref(grid.shape)
        state = CompressibleState(rho=np.ones(grid.shape), theta=np.ones(grid.shape),
                                  u=np.zeros((3,) + grid.shape), epsilon=1.0)
        assert rel_energy_total(eos, state, ref, grid) == 0.0

    def test_pure_velocity_total_is_half_l2(self):
        grid = LayeredGrid(n1=16, n2=16, n3=8)
        eos = ideal_monoatomic()
        ref = make_ref(grid.shape)
        X1, _ = grid.meshgrid_h()
        w = np.zeros((3,) + grid.shape)
        w[0] = np.sin(np.pi * X1)[None, :, :]
        state = CompressibleState(rho=np.ones(grid.shape), theta=np.ones(grid.shape),
                                  u=w, epsilon=1.0)
        total = rel_energy_total(eos, state, ref, grid)
        # 0.5 * int sin^2(pi x1) over T^2 x [0,1] = 0.5 * 2 = 1
        assert total == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("make_eos", [ideal_monoatomic, third_law_compliant])
    def test_quadratic_scaling_ratio_stable_in_epsilon(self, make_eos):
        eos = make_eos()
        grid = LayeredGrid(n1=16, n2=16, n3=8)
        x3 = grid.x3[:, None, None]
        X1, X2 = grid.meshgrid_h()
        r_base = np.broadcast_to(np.exp(-x3), grid.shape).copy()
        theta_base = np.ones(grid.shape)
        d_rho = 0.25 * np.sin(np.pi * X1) * np.cos(np.pi * X2) * np.ones_like(r_base)
        d_theta = 0.2 * np.cos(np.pi * X1) * np.ones_like(r_base)
        d_u = np.zeros((3,) + grid.shape)
        d_u[0] = 0.3 * np.sin(np.pi * X2)
        d_u[2] = 0.1 * np.cos(np.pi * X1)
        ref = ReferenceTriple(r_tilde=r_base, theta_tilde=theta_base,
                              u_tilde=np.zeros((3,) + grid.shape))
        norm = grid.integrate(d_rho ** 2) + grid.integrate(d_theta ** 2) + \
            grid.integrate(np.sum(d_u ** 2, axis=0))
        ratios = []
        for eps in (1e-1, 1e-2, 1e-3):
            state = CompressibleState(
                rho=r_base + eps * d_rho, theta=theta_base + eps * d_theta,
                u=eps * d_u, epsilon=eps,
            )
            ratios.append(rel_energy_total(eos, state, ref, grid) / norm)
        drift = max(ratios) / min(ratios) - 1.0
        assert drift < 0.05, ratios
        assert min(ratios) > 0.0


class TestConservativePath:
    def test_base_point_zero(self):
        eos = ideal_monoatomic()
        n = 6
        ref = make_ref((n,), rho=1.2, theta=0.9)
        s_ref = entropy(eos, ThermoState(rho=1.2, theta=0.9))
        S = np.full(n, 1.2 * s_ref)
        m = np.zeros((3, n))
        dens, ok = rel_energy_conservative_density(
            eos, np.full(n, 1.2), S, m, ref, epsilon=1.0, theta_bounds=(0.45, 1.8)
        )
        assert np.all(ok)
        # limited by the 1e-12 relative temperature-inversion tolerance
        assert np.max(np.abs(dens)) < 5e-12

    def test_momentum_only_perturbation(self):
        eos = ideal_monoatomic()
        n = 8
        rng = np.random.Generator(np.random.Philox(31))
        ref = make_ref((n,), rho=2.0, theta=1.0)
        s_ref = entropy(eos, ThermoState(rho=2.0, theta=1.0))
        S = np.full(n, 2.0 * s_ref)
        m = rng.standard_normal((3, n))
        dens, ok = rel_energy_conservative_density(
            eos, np.full(n, 2.0), S, m, ref, epsilon=1.0, theta_bounds=(0.5, 2.0)
        )
        assert np.all(ok)
        assert np.allclose(dens, np.sum(m ** 2, axis=0) / (2.0 * 2.0), rtol=1e-12)

    @pytest.mark.parametrize("make_eos", [ideal_monoatomic, third_law_compliant])
    def test_cross_path_agreement(self, make_eos):
        eos = make_eos()
        rng = np.random.Generator(np.random.Philox(33))
        n = 1000
        rho = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))
        theta = np.exp(rng.uniform(np.log(0.5), np.log(2.0), n))
        u = rng.standard_normal((3, n))
        eps = 1.0
        ref = make_ref((n,))
        state = CompressibleState(rho=rho, theta=theta, u=u, epsilon=eps)
        direct = rel_energy_density(eos, state, ref)
        S = rho * entropy(eos, ThermoState(rho=rho, theta=theta))
        m = rho * u
        conserv, ok = rel_energy_conservative_density(
            eos, rho, S, m, ref, epsilon=eps, theta_bounds=(0.5, 2.0)
        )
        assert np.all(ok)
        scale = np.maximum(np.abs(direct), 1e-8)
        assert np.max(np.abs(conserv - direct) / scale) < 1e-10

    def test_failed_inversion_reported(self):
        eos = ideal_monoatomic()
        grid = LayeredGrid(n1=8, n2=8, n3=2)
        rho = np.ones(grid.shape)
        # entropy far beyond what theta in [lo/2, 2 hi] can generate
        S = np.full(grid.shape, 50.0)
        m = np.zeros((3,) + grid.shape)
        ref = make_ref(grid.shape)
        out = rel_energy_conservative(eos, rho, S, m, ref, epsilon=1.0,
                                      grid=grid, theta_bounds=(0.9, 1.1))
        assert out.n_failed == out.n_points

    def test_inversion_accuracy(self):
        eos = third_law_compliant(a=0.3)
        rng = np.random.Generator(np.random.Philox(35))
        rho = np.exp(rng.uniform(np.log(0.3), np.log(3.0), 200))
        theta = np.exp(rng.uniform(np.log(0.3), np.log(3.0), 200))
        S = rho * entropy(eos, ThermoState(rho=rho, theta=theta))
        found, ok = invert_temperature(eos, rho, S, 0.15, 6.0)
        assert np.all(ok)
        assert np.max(np.abs(found - theta) / theta) < 1e-10


class TestBallistic:
    def test_static_profile_oracle(self):
        # u = 0, theta = theta~ = 1, rho = exp(-x3): integrand is
        # rho (e - s) = e^{-x}(3/2 - x) for the plain ideal preset
        grid = LayeredGrid(n1=8, n2=8, n3=64)
        eos = ideal_monoatomic()
        x3 = grid.x3[:, None, None]
        rho = np.broadcast_to(np.exp(-x3), grid.shape).copy()
        state = CompressibleState(rho=rho, theta=np.ones(grid.shape),
                                  u=np.zeros((3,) + grid.shape), epsilon=1.0)
        val = ballistic_energy(eos, state, np.ones(grid.shape), grid)
        oracle, err = quad(lambda x: np.exp(-x) * (1.5 - x), 0.0, 1.0)
        assert err < 1e-12
        assert val == pytest.approx(4.0 * oracle, rel=1e-4)  # area of the torus = 4

    def test_kinetic_vanishes_quadratically_in_epsilon(self):
        grid = LayeredGrid(n1=8, n2=8, n3=4)
        eos = ideal_monoatomic()
        u = np.ones((3,) + grid.shape)
        vals = []
        for eps in (1.0, 0.5, 0.25):
            state = CompressibleState(rho=np.ones(grid.shape), theta=np.ones(grid.shape),
                                      u=u, epsilon=eps)
            vals.append(ballistic_energy(eos, state, np.ones(grid.shape), grid))
        # kinetic part scales as eps^2: halving eps quarters the excess
        assert (vals[0] - vals[1]) / (vals[1] - vals[2]) == pytest.approx(4.0, rel=0.3)

    def test_entropy_constant_shift(self):
        grid = LayeredGrid(n1=8, n2=8, n3=4)
        eos = ideal_monoatomic()
        const = 0.7
        shifted = dataclasses.replace(
            eos, S_structural=lambda Z, f=eos.S_structural: f(Z) + const
        )
        rho = np.full(grid.shape, 1.3)
        tt = np.full(grid.shape, 1.1)
        state = CompressibleState(rho=rho, theta=np.ones(grid.shape),
                                  u=np.zeros((3,) + grid.shape), epsilon=1.0)
        v0 = ballistic_energy(eos, state, tt, grid)
        v1 = ballistic_energy(shifted, state, tt, grid)
        expected_shift = -grid.integrate(tt * rho * const)
        assert v1 - v0 == pytest.approx(expected_shift, rel=1e-12)


class TestEssResSplit:
    def test_all_inside(self):
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        grid_shape = (10,)
        state = CompressibleState(rho=np.ones(grid_shape), theta=np.ones(grid_shape),
                                  u=np.zeros((3,) + grid_shape), epsilon=1.0)
        f = np.arange(10.0)
        ess, res = ess_res_split(f, state, K)
        assert np.array_equal(ess, f) and np.all(res == 0.0)

    def test_all_outside(self):
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        state = CompressibleState(rho=np.full(10, 10.0), theta=np.ones(10),
                                  u=np.zeros((3, 10)), epsilon=1.0)
        f = np.arange(10.0)
        ess, res = ess_res_split(f, state, K)
        assert np.all(ess == 0.0) and np.array_equal(res, f)

    def test_half_half_reassembles_exactly(self):
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        n = 1000
        rho = np.where(np.arange(n) % 2 == 0, 1.0, 5.0)
        state = CompressibleState(rho=rho, theta=np.ones(n),
                                  u=np.zeros((3, n)), epsilon=1.0)
        rng = np.random.Generator(np.random.Philox(41))
        f = rng.standard_normal(n)
        ess, res = ess_res_split(f, state, K)
        assert np.array_equal(ess + res, f)
        assert np.count_nonzero(res) == n // 2


class TestCoercivity:
    def test_positive_constants(self):
        eos = ideal_monoatomic()
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        rep = coercivity_check(eos, K, (1.0, 1.0), n_samples=2000, seed=7)
        assert rep.C_essential > 0.0
        assert rep.C_residual > 0.0
        assert rep.n_degenerate == 0

    def test_degenerate_samples_excluded(self):
        # all samples exactly at the reference: the essential ratio is 0/0
        eos = ideal_monoatomic()
        K = EssentialSet(0.999999999, 1.000000001, 0.999999999, 1.000000001)
        rep = coercivity_check(eos, K, (1.0, 1.0), n_samples=50, seed=1, u_radius=1e-300)
        assert rep.n_degenerate >= 0  # report carries the count either way

    def test_constant_degrades_toward_boundary(self):
        eos = ideal_monoatomic()
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        consts = []
        for margin in (0.5, 0.2, 0.05):
            rho_ref = K.rho_min * (K.rho_max / K.rho_min) ** margin
            th_ref = K.theta_min * (K.theta_max / K.theta_min) ** margin
            rep = coercivity_check(eos, K, (rho_ref, th_ref), n_samples=3000, seed=42)
            consts.append(rep.C_essential)
        assert consts[0] > consts[1] > consts[2] > 0.0

    def test_reference_must_be_interior(self):
        eos = ideal_monoatomic()
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        with pytest.raises(DomainError):
            coercivity_check(eos, K, (0.5, 1.0), n_samples=10, seed=0)

    def test_csv_export(self, tmp_path):
        eos = ideal_monoatomic()
        K = EssentialSet(0.5, 2.0, 0.5, 2.0)
        rep = coercivity_check(eos, K, (1.0, 1.0), n_samples=50, seed=3)
        path = tmp_path / "coercivity.csv"
        rep.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "sample_id,kind,rho,theta,ratio"
        assert len(lines) == 1 + rep.n_essential + rep.n_residual


class TestStabilityGap:
    def make_config(self, grid, t_final=0.2):
        n = grid.n_layers
        return SolverConfig(nu_profile=np.full(n, 0.1), r_profile=np.ones(n),
                            mu_theta=1.0, t_final=t_final, cfl=0.5, dt_max=0.01)

    def test_identical_states_zero_gap(self):
        grid = LayeredGrid(n1=16, n2=16, n3=8)
        cfg = self.make_config(grid, t_final=0.05)
        a = taylor_green(grid)
        b = taylor_green(grid)
        series = stability_gap(grid, a, b, cfg)
        assert np.all(series.D == 0.0)

    def test_perturbed_trajectory_within_envelope(self):
        grid = LayeredGrid(n1=16, n2=16, n3=8)
        cfg = self.make_config(grid, t_final=0.3)
        base = taylor_green(grid)
        bump = random_bandlimited(grid, seed=5, kmax=3, amplitude=1e-6)
        twin = LayeredState(t=0.0, omega=base.omega + bump.omega, u_mean=base.u_mean.copy())
        series = stability_gap(grid, base, twin, cfg)
        assert series.D[0] > 0.0
        assert np.isfinite(series.C_fit)
        assert np.all(series.D <= series.bound * (1.0 + 1e-9))

    def test_mean_flow_perturbation_decays_monotonically(self):
        grid = LayeredGrid(n1=16, n2=16, n3=16)
        cfg = self.make_config(grid, t_final=0.3)
        base = shear_layer(grid, amplitude=1.0)
        twin = shear_layer(grid, amplitude=1.0 + 1e-6)
        series = stability_gap(grid, base, twin, cfg)
        assert np.all(np.diff(series.D) <= 1e-12 * series.D[0])

    def test_csv_export(self, tmp_path):
        grid = LayeredGrid(n1=16, n2=16, n3=8)
        cfg = self.make_config(grid, t_final=0.05)
        base = taylor_green(grid)
        twin = taylor_green(grid, amplitude=1.0 + 1e-6)
        series = stability_gap(grid, base, twin, cfg)
        path = tmp_path / "gap.csv"
        series.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,D,bound"
        assert len(lines) == 1 + len(series.t)
