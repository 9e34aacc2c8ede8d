"""Hamiltonian builders: kernels, free term, Coulomb orderings, pieces,
external potentials, and the conservation-law block structures."""

import math

import numpy as np
import pytest

from fockbox.algebra import OperatorExpr, vacuum_expectation, wick_reorder
from fockbox.fock import (
    Sector,
    enumerate_basis,
    ground_state,
    state_vector,
    to_matrix,
    vacuum_index,
)
from fockbox.model import (
    ModelConfig,
    bad_electron_term,
    build_spinors,
    coulomb_full,
    coulomb_kernel,
    coulomb_partial,
    coulomb_pieces,
    dimensionless,
    dispersion,
    external_potential_term,
    free_hamiltonian,
    modes_for,
    point_charge_potential,
    unit_scales,
)
from fockbox.modes import Species

CFG1 = ModelConfig(dimension=1)
CFG3 = ModelConfig(dimension=3)


class TestKernel:
    def test_reference_value_3d(self):
        # L = 2 pi (hbar = 1): k = q, so V((1,0,0)) = 4 pi e^2
        kern = coulomb_kernel(ModelConfig(dimension=3, box_l=2.0 * math.pi, charge=2.0))
        assert kern.value((1, 0, 0)) == pytest.approx(4.0 * math.pi * 4.0, rel=1e-14)

    def test_parity(self, rng):
        kern = coulomb_kernel(CFG3)
        for _ in range(10):
            q = tuple(int(x) for x in rng.integers(-2, 3, 3))
            assert kern.value(q) == pytest.approx(kern.value(tuple(-c for c in q)))

    def test_nonnegative_and_finite(self):
        for cfg in (CFG1, CFG3):
            kern = coulomb_kernel(cfg)
            for q, v in kern.table(2 * cfg.n_max).items():
                assert v >= 0.0 and np.isfinite(v)

    def test_q0_dropped_by_default(self):
        assert coulomb_kernel(CFG3).value((0, 0, 0)) == 0.0

    def test_q0_override(self):
        kern = coulomb_kernel(ModelConfig(dimension=3, q0_value=7.0))
        assert kern.value((0, 0, 0)) == 7.0

    def test_1d_softened_kernel_decays(self):
        kern = coulomb_kernel(CFG1)
        v1, v2 = kern.value((1,)), kern.value((2,))
        assert v1 > v2 > 0.0


class TestDispersion:
    def test_rest_energy(self):
        cfg = ModelConfig(dimension=3, mass=1.7, c=2.0)
        assert dispersion(cfg, (0, 0, 0)) == pytest.approx(1.7 * 4.0)

    def test_symmetric_and_monotone(self):
        assert dispersion(CFG3, (1, 0, 0)) == pytest.approx(dispersion(CFG3, (-1, 0, 0)))
        assert dispersion(CFG3, (1, 0, 0)) > dispersion(CFG3, (0, 0, 0))

    def test_cutoff_enforced(self):
        with pytest.raises(ValueError):
            dispersion(CFG3, (2, 0, 0))


class TestFreeHamiltonian:
    def test_one_particle_block_is_diagonal_dispersions(self):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n=1))
        mat = to_matrix(free_hamiltonian(CFG1), basis, ms).dense()
        expected = [dispersion(CFG1, ms[int(b).bit_length() - 1].momentum) for b in basis]
        assert np.abs(mat - np.diag(expected)).max() <= 1e-12

    def test_vacuum_expectation_zero(self):
        assert vacuum_expectation(free_hamiltonian(CFG1)) == 0

    def test_positive_on_nonvacuum(self):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n_max=2))
        mat = to_matrix(free_hamiltonian(CFG1), basis, ms).dense()
        eigs = np.linalg.eigvalsh(mat)
        assert (np.sort(eigs)[1:] > 0).all()  # all but the vacuum

    def test_ground_state_is_lowest_mode_energy_sum(self):
        # the free Hamiltonian is diagonal: the sector ground energy is the
        # smallest sum of occupied-mode dispersions
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n=2, charge=-2))
        op = to_matrix(free_hamiltonian(CFG1), basis, ms)
        energy, _ = ground_state(op)
        best = min(
            sum(dispersion(CFG1, ms[k].momentum) for k in range(len(ms)) if int(b) >> k & 1)
            for b in basis
        )
        assert energy == pytest.approx(best, abs=1e-10)


def _one_electron_block(cfg, expr):
    ms = modes_for(cfg)
    basis = enumerate_basis(ms, Sector(n=1, charge=-1))
    return to_matrix(expr, basis, ms)


class TestCoulombFull:
    @pytest.mark.parametrize("cfg", [CFG1, CFG3])
    def test_one_electron_block_structurally_zero(self, cfg):
        block = _one_electron_block(cfg, coulomb_full(cfg))
        assert block.matrix.nnz == 0  # no stored entries at all

    def test_vacuum_expectation_zero(self):
        assert abs(vacuum_expectation(coulomb_full(CFG1))) == 0

    def test_purely_quartic(self):
        assert {t.degree for t in coulomb_full(CFG1).terms} == {4}

    @pytest.mark.parametrize("sector", [Sector(n_max=2), Sector(n_max=4, charge=0), Sector(n=2, charge=-2)])
    def test_hermitian_on_sectors(self, sector):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, sector)
        op = to_matrix(coulomb_full(CFG1), basis, ms)
        assert op.hermiticity_defect() <= 1e-12

    def test_charge_block_diagonal(self):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n_max=2))
        charges = np.array(
            [sum(ms[k].species.charge for k in range(len(ms)) if int(b) >> k & 1) for b in basis]
        )
        mat = to_matrix(coulomb_full(CFG1), basis, ms).matrix.tocoo()
        assert all(charges[r] == charges[c] for r, c in zip(mat.row, mat.col))

    def test_momentum_block_diagonal(self):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n_max=2))
        momenta = np.array(
            [sum(ms[k].momentum[0] for k in range(len(ms)) if int(b) >> k & 1) for b in basis]
        )
        for expr in (coulomb_full(CFG1), coulomb_partial(CFG1), free_hamiltonian(CFG1)):
            mat = to_matrix(expr, basis, ms).matrix.tocoo()
            assert all(momenta[r] == momenta[c] for r, c in zip(mat.row, mat.col))

    def test_contains_number_changing_terms(self):
        degree_imbalance = {
            sum(1 if f.create else -1 for f in t.factors) for t in coulomb_full(CFG1).terms
        }
        assert degree_imbalance & {4, -4, 2, -2}

    def test_zero_coupling_gives_free_theory(self):
        cfg = ModelConfig(dimension=1, charge=0.0)
        assert coulomb_full(cfg).is_zero()
        assert coulomb_partial(cfg).is_zero()


class TestCoulombPartial:
    def test_one_electron_block_nonzero(self):
        block = _one_electron_block(CFG1, coulomb_partial(CFG1))
        assert block.max_abs_entry() > 0

    def test_vacuum_expectation_positive(self):
        # normal-ordering each density separately kills <0|rho|0> but not
        # the cross-density pair bubble: <0|rho(x)rho(y)|0> sums
        # |<pair|rho|0>|^2, so the partially ordered term carries a strictly
        # positive vacuum energy (one of its defects)
        val = vacuum_expectation(coulomb_partial(CFG1))
        assert abs(val.imag) <= 1e-14
        assert val.real > 0

    def test_differs_from_full_by_contraction_remainder(self):
        # the remainder is one-body plus the c-number vacuum bubble; no
        # quartic content survives
        diff = wick_reorder(coulomb_partial(CFG1) - coulomb_full(CFG1))
        diff = diff.prune(1e-12 * max(coulomb_full(CFG1).max_abs_coeff(), 1.0))
        degrees = {t.degree for t in diff.terms}
        assert 2 in degrees
        assert degrees <= {0, 2}


class TestCoulombPieces:
    def test_ee_one_electron_block_zero(self):
        pieces = coulomb_pieces(CFG1)
        assert _one_electron_block(CFG1, pieces.ee).matrix.nnz == 0

    def test_piece_structure(self):
        pieces = coulomb_pieces(CFG1)
        for t in pieces.ee.terms:
            kinds = [(f.mode.species, f.create) for f in t.factors]
            assert all(sp is Species.ELECTRON for sp, _ in kinds)
            assert sorted(c for _, c in kinds) == [False, False, True, True]
        for t in pieces.ep.terms:
            species = sorted(f.mode.species.value for f in t.factors)
            assert species == ["e", "e", "p", "p"]
        for t in pieces.pp.terms:
            assert all(f.mode.species is Species.POSITRON for f in t.factors)

    def test_remainder_content(self):
        # the remainder holds the number-changing terms plus the
        # electron-positron annihilation channel (pair created at one vertex
        # and destroyed at the other), which conserves both particle numbers
        # but is not part of the three density-density pieces; it never
        # contains single-species density-density content
        pieces = coulomb_pieces(CFG1)
        saw_number_changing = False
        for t in pieces.number_changing.terms:
            n_e = sum(1 if f.create else -1 for f in t.factors if f.mode.species is Species.ELECTRON)
            n_p = sum(1 if f.create else -1 for f in t.factors if f.mode.species is Species.POSITRON)
            species = {f.mode.species for f in t.factors}
            if (n_e, n_p) != (0, 0):
                saw_number_changing = True
            else:
                assert species == {Species.ELECTRON, Species.POSITRON}
        assert saw_number_changing

    @pytest.mark.parametrize("cfg", [CFG1, CFG3])
    @pytest.mark.parametrize("sector_kwargs", [
        dict(n_max=2), dict(n_max=2, charge=0), dict(n=2, charge=-2), dict(n=1, charge=-1),
    ])
    def test_decomposition_completeness(self, cfg, sector_kwargs):
        ms = modes_for(cfg)
        basis = enumerate_basis(ms, Sector(**sector_kwargs))
        pieces = coulomb_pieces(cfg)
        full = to_matrix(coulomb_full(cfg), basis, ms).matrix
        total = sum(to_matrix(p, basis, ms).matrix for p in pieces)
        diff = abs(total - full)
        scale = max(np.abs(full.data).max() if full.nnz else 0.0, 1.0)
        assert (diff.max() if diff.nnz else 0.0) <= 1e-13 * scale


class TestBadElectronTerm:
    def test_one_electron_block_nonzero_with_positive_diagonal(self):
        block = _one_electron_block(CFG1, bad_electron_term(CFG1)).dense()
        assert np.abs(block).max() > 0
        diag = np.diag(block)
        assert np.abs(diag.imag).max() <= 1e-14
        assert (diag.real > 0).all()

    def test_wick_equals_ee_plus_one_body(self):
        # as matrices on the full N<=2 space: wick(bad) = ee + degree-2 rest
        cfg = CFG1
        ms = modes_for(cfg)
        basis = enumerate_basis(ms, Sector(n_max=2))
        bad = bad_electron_term(cfg)
        pieces = coulomb_pieces(cfg)
        remainder = wick_reorder(bad) - pieces.ee
        remainder = remainder.prune(1e-13 * max(bad.max_abs_coeff(), 1.0))
        assert {t.degree for t in remainder.terms} == {2}
        lhs = to_matrix(bad, basis, ms).matrix
        rhs = to_matrix(pieces.ee, basis, ms).matrix + to_matrix(remainder, basis, ms).matrix
        diff = abs(lhs - rhs)
        assert (diff.max() if diff.nnz else 0.0) <= 1e-12

    def test_hermitian(self):
        ms = modes_for(CFG1)
        basis = enumerate_basis(ms, Sector(n_max=2))
        assert to_matrix(bad_electron_term(CFG1), basis, ms).hermiticity_defect() <= 1e-12


class TestExternalPotential:
    def test_constant_is_charge_operator_multiple(self):
        cfg = CFG1
        const = 0.37
        term = external_potential_term(cfg, {(0,): const})
        ms = modes_for(cfg)
        basis = enumerate_basis(ms, Sector(n_max=2))
        mat = to_matrix(term, basis, ms).dense()
        charges = np.array(
            [sum(ms[k].species.charge for k in range(len(ms)) if int(b) >> k & 1) for b in basis]
        )
        expected = np.diag(const * cfg.charge * charges)
        assert np.abs(mat - expected).max() <= 1e-12

    def test_zero_potential_empty(self):
        assert external_potential_term(CFG1, {}).is_zero()

    def test_complex_potential_rejected(self):
        with pytest.raises(ValueError):
            external_potential_term(CFG1, {(1,): 1.0 + 0.5j})  # missing conjugate partner

    def test_hermitian_and_number_conserving(self):
        cfg = CFG1
        phi = {(1,): 0.2 + 0.1j, (-1,): 0.2 - 0.1j, (0,): 0.05}
        term = external_potential_term(cfg, phi)
        for t in term.terms:
            assert sum(1 if f.create else -1 for f in t.factors) == 0
        ms = modes_for(cfg)
        basis = enumerate_basis(ms, Sector(n_max=2))
        assert to_matrix(term, basis, ms).hermiticity_defect() <= 1e-12

    def test_attractive_nucleus_lowers_ground_energy(self):
        # variational: the free one-electron ground state has energy m c^2;
        # adding the attractive nuclear term pulls the minimum strictly down
        cfg = CFG1
        ms = modes_for(cfg)
        basis = enumerate_basis(ms, Sector(n=1, charge=-1))
        phi = point_charge_potential(cfg, charge=+3.0)
        h_free = to_matrix(free_hamiltonian(cfg), basis, ms)
        h_nuc = to_matrix(external_potential_term(cfg, phi), basis, ms)
        e_free, _ = ground_state(h_free)
        e_bound, _ = ground_state(h_free + h_nuc)
        assert e_bound < e_free


class TestUnits:
    def test_scales(self):
        cfg = ModelConfig(dimension=1, mass=2.0, c=3.0, hbar=4.0)
        s = unit_scales(cfg)
        assert s.energy == pytest.approx(2.0 * 9.0)
        assert s.length == pytest.approx(4.0 / 6.0)
        assert s.time == pytest.approx(4.0 / 18.0)

    def test_dimensionless_preserves_physics_ratios(self):
        cfg = ModelConfig(dimension=1, mass=2.0, c=3.0, hbar=4.0, box_l=10.0)
        dcfg = dimensionless(cfg)
        assert dcfg.mass == dcfg.c == dcfg.hbar == 1.0
        # energies measured in m c^2 agree between the two descriptions
        s = unit_scales(cfg)
        assert dispersion(dcfg, (1,)) == pytest.approx(dispersion(cfg, (1,)) / s.energy)

    def test_default_config_round_trips_through_json(self, tmp_path):
        cfg = ModelConfig()
        path = tmp_path / "cfg.json"
        path.write_text(cfg.to_json())
        assert ModelConfig.from_file(path) == cfg

    def test_invalid_configs_rejected(self):
        with pytest.raises(ValueError):
            ModelConfig(dimension=2)
        with pytest.raises(ValueError):
            ModelConfig(box_l=-1.0)
        with pytest.raises(ValueError):
            ModelConfig(grid_points=24)
