"""Classical field configurations, charge densities and Coulomb energies."""

import numpy as np
import pytest

from fockbox.classical import (
    ClassicalModeState,
    SpatialGrid,
    charge_density,
    coulomb_cross_energy,
    coulomb_energy,
    coulomb_energy_direct,
    decomposition_report,
    density_to_csv,
    free_evolve,
    gaussian_cloud,
    synthesize_field,
    total_charge,
)
from fockbox.model import ModelConfig

CFG1 = ModelConfig(dimension=1, grid_points=64)
CFG3 = ModelConfig(dimension=3, grid_points=16)
GRID1 = SpatialGrid.for_config(CFG1)
GRID3 = SpatialGrid.for_config(CFG3)


class TestSynthesis:
    def test_zero_momentum_mode_is_constant(self):
        st = ClassicalModeState.zero(CFG1).set_b(1, (0,), 1.0)
        psi = synthesize_field(st, GRID1, CFG1)
        for comp in psi:
            assert np.abs(comp - comp.flat[0]).max() <= 1e-13

    def test_linearity(self):
        st = ClassicalModeState.zero(CFG1).set_b(1, (1,), 0.3 + 0.4j).set_d(2, (0,), 0.5)
        psi = synthesize_field(st, GRID1, CFG1)
        psi_scaled = synthesize_field(st.scaled(2.0 - 1.0j), GRID1, CFG1)
        assert np.abs(psi_scaled - (2.0 - 1.0j) * psi).max() <= 1e-12

    def test_parseval(self, rng):
        # integral of psi+ psi equals the squared coefficient norm; the
        # oracle is the plain grid sum
        st = ClassicalModeState.zero(CFG1)
        st.b[:] = rng.standard_normal(st.b.shape) + 1j * rng.standard_normal(st.b.shape)
        st.d[:] = rng.standard_normal(st.d.shape) + 1j * rng.standard_normal(st.d.shape)
        psi = synthesize_field(st, GRID1, CFG1)
        grid_integral = float(np.sum(np.abs(psi) ** 2)) * GRID1.cell_volume
        assert grid_integral == pytest.approx(st.coeff_norm_sq(), rel=1e-10)

    def test_aliasing_rejected(self):
        cfg = ModelConfig(dimension=1, n_max=1)
        st = ClassicalModeState.zero(cfg)
        tiny = SpatialGrid(1, cfg.box_l, 2)
        with pytest.raises(ValueError):
            synthesize_field(st, tiny, cfg)


class TestChargeDensity:
    def test_zero_field(self):
        rho = charge_density(np.zeros((4, 8)), CFG1)
        assert np.all(rho == 0)

    def test_normalized_electron_state_total_charge(self):
        st = ClassicalModeState.zero(CFG1).set_b(1, (1,), 1.0)
        psi = synthesize_field(st, GRID1, CFG1)
        rho = charge_density(psi, CFG1)
        assert total_charge(rho, GRID1) == pytest.approx(-CFG1.charge, abs=1e-10)

    def test_quadratic_in_amplitude(self):
        st = ClassicalModeState.zero(CFG1).set_b(2, (0,), 0.7)
        rho1 = charge_density(synthesize_field(st, GRID1, CFG1), CFG1)
        rho2 = charge_density(synthesize_field(st.scaled(2.0), GRID1, CFG1), CFG1)
        assert np.abs(rho2 - 4.0 * rho1).max() <= 1e-12

    def test_never_positive(self, rng):
        st = ClassicalModeState.zero(CFG1)
        st.b[:] = rng.standard_normal(st.b.shape) + 1j * rng.standard_normal(st.b.shape)
        st.d[:] = rng.standard_normal(st.d.shape) + 1j * rng.standard_normal(st.d.shape)
        rho = charge_density(synthesize_field(st, GRID1, CFG1), CFG1)
        assert np.all(rho <= 0)


class TestCoulombEnergy:
    def test_zero_density(self):
        assert coulomb_energy(np.zeros(GRID1.shape), GRID1, CFG1) == 0.0

    def test_positive_for_nonzero(self):
        rho = gaussian_cloud(GRID3, CFG3.box_l / 8.0, -1.0)
        assert coulomb_energy(rho, GRID3, CFG3) > 0.0

    @pytest.mark.parametrize("cfg,grid", [(CFG1, GRID1), (CFG3, GRID3)])
    def test_momentum_vs_real_space(self, cfg, grid):
        rho = gaussian_cloud(grid, cfg.box_l / 8.0, -cfg.charge)
        u_k = coulomb_energy(rho, grid, cfg)
        u_r = coulomb_energy_direct(rho, grid, cfg)
        assert abs(u_k - u_r) <= 1e-6 * abs(u_r)

    def test_scaling_self_similar(self):
        # box and width scaled together: U scales exactly like 1/sigma
        from dataclasses import replace

        sigma0 = CFG3.box_l / 8.0
        products = []
        for f in (1.0, 2.0, 4.0):
            cfg = replace(CFG3, box_l=CFG3.box_l * f)
            grid = SpatialGrid.for_config(cfg)
            rho = gaussian_cloud(grid, sigma0 * f, -1.0)
            products.append(coulomb_energy(rho, grid, cfg) * sigma0 * f)
        spread = (max(products) - min(products)) / abs(products[0])
        assert spread <= 1e-4

    def test_scaling_constant_against_oracle(self):
        sigma = CFG3.box_l / 8.0
        rho = gaussian_cloud(GRID3, sigma, -1.0)
        u = coulomb_energy(rho, GRID3, CFG3)
        u_oracle = coulomb_energy_direct(rho, GRID3, CFG3)
        assert u * sigma == pytest.approx(u_oracle * sigma, rel=1e-6)

    def test_bilinearity(self, rng):
        rho1 = gaussian_cloud(GRID1, CFG1.box_l / 10.0, -1.0, center=(CFG1.box_l * 0.3,))
        rho2 = gaussian_cloud(GRID1, CFG1.box_l / 12.0, -1.0, center=(CFG1.box_l * 0.7,))
        lhs = coulomb_energy(rho1 + rho2, GRID1, CFG1)
        rhs = (
            coulomb_energy(rho1, GRID1, CFG1)
            + coulomb_energy(rho2, GRID1, CFG1)
            + coulomb_cross_energy(rho1, rho2, GRID1, CFG1)
        )
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1.0)

    def test_opposite_charges_attract(self):
        rho1 = gaussian_cloud(GRID1, CFG1.box_l / 10.0, -1.0, center=(CFG1.box_l * 0.45,))
        rho2 = gaussian_cloud(GRID1, CFG1.box_l / 10.0, +1.0, center=(CFG1.box_l * 0.55,))
        assert coulomb_cross_energy(rho1, rho2, GRID1, CFG1) < 0.0


class TestDecomposition:
    def _splits(self, grid, cfg):
        rho = gaussian_cloud(grid, cfg.box_l / 8.0, -2.0 * cfg.charge)
        halves = (rho / 2.0, rho / 2.0)
        mask = (np.indices(grid.shape)[-1] < grid.points // 2).astype(float)
        topbot = (rho * mask, rho * (1.0 - mask))
        return rho, halves, topbot

    def test_total_invariant_across_splits(self):
        rho, halves, topbot = self._splits(GRID3, CFG3)
        rows = decomposition_report(rho, [halves, topbot], GRID3, CFG3)
        assert rows[0].total == pytest.approx(rows[1].total, rel=1e-10)

    def test_topbottom_has_larger_self_energy(self):
        rho, halves, topbot = self._splits(GRID3, CFG3)
        rows = decomposition_report(rho, [halves, topbot], GRID3, CFG3)
        assert rows[1].self_sum > rows[0].self_sum
        assert rows[1].cross < rows[0].cross

    def test_trivial_split_has_zero_cross(self):
        rho, _, _ = self._splits(GRID1, CFG1)
        rows = decomposition_report(rho, [(rho, np.zeros_like(rho))], GRID1, CFG1)
        assert rows[0].cross == 0.0
        assert rows[0].self2 == 0.0

    def test_mismatched_split_rejected(self):
        rho, halves, _ = self._splits(GRID1, CFG1)
        with pytest.raises(ValueError):
            decomposition_report(rho, [(halves[0], halves[1] * 0.5)], GRID1, CFG1)


class TestFreeEvolve:
    def test_identity_at_t0(self, rng):
        st = ClassicalModeState.zero(CFG1)
        st.b[:] = rng.standard_normal(st.b.shape)
        out = free_evolve(st, 0.0, CFG1)
        assert np.array_equal(out.b, st.b)

    def test_group_property(self, rng):
        st = ClassicalModeState.zero(CFG1)
        st.b[:] = rng.standard_normal(st.b.shape) + 1j * rng.standard_normal(st.b.shape)
        st.d[:] = rng.standard_normal(st.d.shape)
        one = free_evolve(free_evolve(st, 0.7, CFG1), 1.1, CFG1)
        two = free_evolve(st, 1.8, CFG1)
        assert np.abs(one.b - two.b).max() <= 1e-12
        assert np.abs(one.d - two.d).max() <= 1e-12

    def test_moduli_preserved_and_directions_opposite(self, rng):
        st = ClassicalModeState.zero(CFG1).set_b(1, (1,), 1.0).set_d(1, (1,), 1.0)
        out = free_evolve(st, 0.4, CFG1)
        assert np.abs(np.abs(out.b) - np.abs(st.b)).max() <= 1e-14
        i = st.index((1,))
        phase_b = np.angle(out.b[0, i])
        phase_d = np.angle(out.d[0, i])
        assert phase_b == pytest.approx(-phase_d, abs=1e-12)

    def test_single_mode_density_static(self):
        st = ClassicalModeState.zero(CFG1).set_b(2, (1,), 1.0)
        rho0 = charge_density(synthesize_field(st, GRID1, CFG1), CFG1)
        rho_t = charge_density(
            synthesize_field(free_evolve(st, 2.3, CFG1), GRID1, CFG1), CFG1
        )
        assert np.abs(rho_t - rho0).max() <= 1e-12


def test_density_csv_dump(tmp_path):
    rho = gaussian_cloud(GRID1, CFG1.box_l / 8.0, -1.0)
    path = tmp_path / "rho.csv"
    density_to_csv(path, rho, GRID1)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i0,value"
    assert len(lines) == GRID1.points + 1
    values = np.array([float(line.split(",")[1]) for line in lines[1:]])
    assert np.array_equal(values, rho)


def test_field_npz_dump(tmp_path):
    from fockbox.classical import field_to_npz

    st = ClassicalModeState.zero(CFG1).set_b(1, (1,), 0.6 + 0.8j)
    psi = synthesize_field(st, GRID1, CFG1)
    path = tmp_path / "psi.npz"
    field_to_npz(path, psi, GRID1)
    with np.load(path) as z:
        assert int(z["points"]) == GRID1.points
        assert np.array_equal(z["psi"], psi)
