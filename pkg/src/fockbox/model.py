"""Hamiltonian variants of the Dirac field with Coulomb interactions on a
periodic momentum lattice.

All operators are built from the box-discretized plane-wave expansion

    psi(x) = (1/sqrt(V)) sum_{s,n} (2 E_n)^(-1/2)
             [ b_{s,n} u^s(p_n) e^{i p_n.x/hbar} + d+_{s,n} v^s(p_n) e^{-i p_n.x/hbar} ]

with p_n = (2 pi hbar / L) n and box-normalized ladder operators obeying
Kronecker anticommutators.  The Coulomb quartic

    (e^2/2) integral  psi+ psi(x) psi+ psi(y) / |x-y|

is expanded into mode sums; momentum conservation and the kernel Fourier
coefficients come out of the double position integral.  Three orderings of
the same quartic are exposed:

* :func:`coulomb_full` applies the normal-ordering prescription to the
  whole quartic (all creators left, sign per swap, contractions dropped).
  Its one-electron block vanishes identically.
* :func:`coulomb_partial` normal-orders each charge-density factor
  separately and keeps the as-written order across the two densities; this
  operator acts on single-electron states.
* :func:`bad_electron_term` is the electron-only part of the partial
  ordering (creation and annihilation alternating), the operator version of
  the classical self-repulsion energy.

:func:`coulomb_pieces` builds the electron-electron, electron-positron and
positron-positron number-conserving pieces directly from their explicit
normal-ordered mode sums, as an independent cross-check decomposition of
:func:`coulomb_full`.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .algebra import (
    Ladder,
    OperatorExpr,
    Term,
    canonicalize,
    normal_order_prescription,
)
from .coulomb import CoulombKernel
from .modes import Mode, ModeSet, Species, momentum_lattice
from .spinors import SpinorTable

CONFIG_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    """Physical and numerical parameters (Gaussian cgs conventions).

    The defaults are the desk-scale dimensionless setup hbar = c = m = 1,
    L = 2 pi, e^2 = 1: momenta sit at integer wavevectors and the rest
    energy is 1.  ``momentum_ball`` trims the cutoff cube to |n|^2 <=
    n_max^2 (origin plus face neighbours at n_max = 1), keeping the default
    3D mode count at 28.
    """

    dimension: int = 3
    box_l: float = 2.0 * math.pi
    n_max: int = 1
    momentum_ball: bool = True
    mass: float = 1.0
    charge: float = 1.0
    hbar: float = 1.0
    c: float = 1.0
    q0_value: float = 0.0
    soften_a: float | None = None
    sector_n_max: int = 2
    grid_points: int = 32

    def __post_init__(self):
        if self.dimension not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        for name in ("box_l", "mass", "hbar", "c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        # charge 0 is allowed: the free-theory limit is exercised in tests
        if self.charge < 0:
            raise ValueError("charge must be >= 0")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.soften_a is not None and self.soften_a <= 0:
            raise ValueError("soften_a must be positive")
        if self.grid_points < 2 or self.grid_points & (self.grid_points - 1):
            raise ValueError("grid_points must be a power of two >= 2")

    @property
    def e2(self) -> float:
        return self.charge * self.charge

    @property
    def volume(self) -> float:
        return self.box_l**self.dimension

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = CONFIG_SCHEMA_VERSION
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        version = d.pop("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema version {version}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ModelConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True)
class UnitScales:
    """Conversion factors from internal (hbar=c=m=1) to cgs quantities."""

    energy: float  # m c^2
    length: float  # hbar / (m c)
    time: float  # hbar / (m c^2)


def unit_scales(cfg: ModelConfig) -> UnitScales:
    return UnitScales(
        energy=cfg.mass * cfg.c**2,
        length=cfg.hbar / (cfg.mass * cfg.c),
        time=cfg.hbar / (cfg.mass * cfg.c**2),
    )


def dimensionless(cfg: ModelConfig) -> ModelConfig:
    """Equivalent configuration in hbar = c = m = 1 units.

    Lengths rescale by the Compton length and the coupling becomes the
    dimensionless e^2/(hbar c).
    """
    s = unit_scales(cfg)
    return replace(
        cfg,
        box_l=cfg.box_l / s.length,
        mass=1.0,
        hbar=1.0,
        c=1.0,
        charge=math.sqrt(cfg.e2 / (cfg.hbar * cfg.c)),
        soften_a=None if cfg.soften_a is None else cfg.soften_a / s.length,
    )


# -- mode bookkeeping --------------------------------------------------


@lru_cache(maxsize=32)
def modes_for(cfg: ModelConfig) -> ModeSet:
    return ModeSet.build(cfg.dimension, cfg.n_max, cfg.momentum_ball)


@lru_cache(maxsize=32)
def build_spinors(cfg: ModelConfig) -> SpinorTable:
    lattice = momentum_lattice(cfg.dimension, cfg.n_max, cfg.momentum_ball)
    return SpinorTable(cfg.mass, cfg.c, cfg.hbar, cfg.box_l, lattice)


def coulomb_kernel(cfg: ModelConfig) -> CoulombKernel:
    return CoulombKernel(cfg.dimension, cfg.box_l, cfg.e2, cfg.q0_value, cfg.soften_a)


def dispersion(cfg: ModelConfig, n) -> float:
    """Single-mode energy E(p_n) = sqrt(m^2 c^4 + |p_n|^2 c^2)."""
    n = tuple(int(c) for c in np.atleast_1d(n))
    if any(abs(c) > cfg.n_max for c in n):
        raise ValueError(f"momentum {n} outside cutoff n_max={cfg.n_max}")
    dp = 2.0 * math.pi * cfg.hbar / cfg.box_l
    p2 = dp * dp * sum(c * c for c in n)
    return math.sqrt((cfg.mass * cfg.c**2) ** 2 + p2 * cfg.c**2)


# -- Hamiltonian builders ----------------------------------------------


@lru_cache(maxsize=8)
def free_hamiltonian(cfg: ModelConfig) -> OperatorExpr:
    """Normal-ordered free Dirac Hamiltonian: sum_s,n E_n (b+b + d+d)."""
    table = build_spinors(cfg)
    terms = []
    for n in table.lattice():
        e_n = table.e[n]
        for s in (1, 2):
            for species in (Species.ELECTRON, Species.POSITRON):
                mode = Mode(species, s, n)
                terms.append(Term(e_n, (Ladder(mode, True), Ladder(mode, False))))
    return OperatorExpr(terms)


class _Slot(NamedTuple):
    create: bool  # ladder kind
    species: Species
    spinor: str  # "u" or "v"
    conj: bool  # spinor conjugated (psi+ slots)
    sigma: int  # sign of p in the position-space phase


# psi+(x) contributes b+ (u*, e^{-ipx}) or d (v*, e^{+ipx});
# psi(x) contributes b (u, e^{+ipx}) or d+ (v, e^{-ipx}).
_DAGGER_SLOTS = {
    Species.ELECTRON: _Slot(True, Species.ELECTRON, "u", True, -1),
    Species.POSITRON: _Slot(False, Species.POSITRON, "v", True, +1),
}
_PLAIN_SLOTS = {
    Species.ELECTRON: _Slot(False, Species.ELECTRON, "u", False, +1),
    Species.POSITRON: _Slot(True, Species.POSITRON, "v", False, -1),
}


class _QuarticContext:
    """Shared tables for enumerating Coulomb quartic mode sums."""

    def __init__(self, cfg: ModelConfig):
        self.cfg = cfg
        self.table = build_spinors(cfg)
        self.kernel = coulomb_kernel(cfg)
        self.lattice = list(self.table.lattice())
        self.lattice_set = set(self.lattice)
        self.labels = [(s, n) for s in (1, 2) for n in self.lattice]
        self._bil: dict = {}

    def bilinear(self, kind1, s1, n1, kind2, s2, n2) -> complex:
        """conj(w1) . w2 / sqrt(2E1 * 2E2) with w in {u, v}."""
        key = (kind1, s1, n1, kind2, s2, n2)
        hit = self._bil.get(key)
        if hit is None:
            t = self.table
            w1 = t.u[(s1, n1)] if kind1 == "u" else t.v[(s1, n1)]
            w2 = t.u[(s2, n2)] if kind2 == "u" else t.v[(s2, n2)]
            hit = complex(np.vdot(w1, w2)) / math.sqrt(4.0 * t.e[n1] * t.e[n2])
            self._bil[key] = hit
        return hit


def _vertex_factors(slot_a: _Slot, lab_a, slot_b: _Slot, lab_b, ctx: _QuarticContext,
                    order_pair: bool):
    """Operators and spinor factor of one psi+ psi vertex.

    With ``order_pair`` the two operators of the vertex are normal ordered
    (prescription: sign, no contraction), which realizes the separately
    normal-ordered charge density :psi+ psi:.
    """
    (s_a, n_a), (s_b, n_b) = lab_a, lab_b
    bil = ctx.bilinear(slot_a.spinor, s_a, n_a, slot_b.spinor, s_b, n_b)
    op_a = Ladder(Mode(slot_a.species, s_a, n_a), slot_a.create)
    op_b = Ladder(Mode(slot_b.species, s_b, n_b), slot_b.create)
    sign = 1.0
    ops = (op_a, op_b)
    if order_pair and (not op_a.create) and op_b.create:
        ops = (op_b, op_a)
        sign = -1.0
    return ops, sign * bil


def _coulomb_quartic(cfg: ModelConfig, vertex_ordered: bool,
                     species_filter=None) -> list[Term]:
    """All quartic mode-sum terms of the Coulomb interaction.

    ``species_filter``, when given, restricts the four (x-dagger, x-plain,
    y-dagger, y-plain) species choices.  ``vertex_ordered`` applies the
    per-density normal ordering (partial prescription).
    """
    ctx = _QuarticContext(cfg)
    inv_2v = 1.0 / (2.0 * cfg.volume)
    terms: list[Term] = []
    species_choices = list(itertools.product((Species.ELECTRON, Species.POSITRON), repeat=4))
    if species_filter is not None:
        species_choices = [sc for sc in species_choices if sc == species_filter]
    for c1, c2, c3, c4 in species_choices:
        sl1, sl2 = _DAGGER_SLOTS[c1], _PLAIN_SLOTS[c2]
        sl3, sl4 = _DAGGER_SLOTS[c3], _PLAIN_SLOTS[c4]
        for lab1, lab2, lab3 in itertools.product(ctx.labels, ctx.labels, ctx.labels):
            n1, n2, n3 = lab1[1], lab2[1], lab3[1]
            qx = tuple(sl1.sigma * a + sl2.sigma * b for a, b in zip(n1, n2))
            vq = ctx.kernel.value(qx)
            if vq == 0.0:
                continue
            # sigma1 n1 + ... + sigma4 n4 = 0 fixes the fourth momentum
            n4 = tuple(
                -sl4.sigma * (sl1.sigma * a + sl2.sigma * b + sl3.sigma * g)
                for a, b, g in zip(n1, n2, n3)
            )
            if n4 not in ctx.lattice_set:
                continue
            ops_x, bil_x = _vertex_factors(sl1, lab1, sl2, lab2, ctx, vertex_ordered)
            if bil_x == 0.0:
                continue
            for s4 in (1, 2):
                lab4 = (s4, n4)
                ops_y, bil_y = _vertex_factors(sl3, lab3, sl4, lab4, ctx, vertex_ordered)
                coeff = inv_2v * vq * bil_x * bil_y
                if coeff == 0.0:
                    continue
                terms.append(Term(coeff, ops_x + ops_y))
    return terms


@lru_cache(maxsize=8)
def coulomb_full(cfg: ModelConfig) -> OperatorExpr:
    """Fully normal-ordered Coulomb term.

    Hermitian; conserves net charge and total lattice momentum; contains
    number-changing (pair creating/annihilating) pieces, but no piece that
    acts within the one-electron sector.
    """
    raw = OperatorExpr(_coulomb_quartic(cfg, vertex_ordered=False))
    return normal_order_prescription(raw)


@lru_cache(maxsize=8)
def coulomb_partial(cfg: ModelConfig) -> OperatorExpr:
    """Coulomb term with each charge density normal-ordered separately.

    This is the operator version of the classical Coulomb energy; it
    differs from :func:`coulomb_full` by a contraction remainder (one-body
    terms plus a c-number vacuum bubble) and has a nonzero one-electron
    block as well as a positive vacuum expectation.
    """
    return canonicalize(OperatorExpr(_coulomb_quartic(cfg, vertex_ordered=True)))


@lru_cache(maxsize=8)
def bad_electron_term(cfg: ModelConfig) -> OperatorExpr:
    """Electron-only part of the partial ordering: b+ b b+ b alternating.

    The one-electron block of this operator is nonzero with positive real
    diagonal: the quantum residue of classical self-repulsion.
    """
    all_e = (Species.ELECTRON,) * 4
    return canonicalize(
        OperatorExpr(_coulomb_quartic(cfg, vertex_ordered=False, species_filter=all_e))
    )


class CoulombPieces(NamedTuple):
    ee: OperatorExpr
    ep: OperatorExpr
    pp: OperatorExpr
    number_changing: OperatorExpr


@lru_cache(maxsize=8)
def coulomb_pieces(cfg: ModelConfig) -> CoulombPieces:
    """Number-conserving pieces of the full Coulomb term, built directly
    from their explicit normal-ordered mode sums (not by classifying
    :func:`coulomb_full`), plus the number-changing remainder.

    ee carries the -e^2/2 prefactor with two electron creators left of two
    electron annihilators; ep the +e^2 electron-positron density term; pp
    the -e^2/2 positron term.  The remainder is the canonicalized
    difference full - (ee + ep + pp), pruned of rounding dust.  Besides the
    particle-number-changing terms it also holds the electron-positron
    annihilation channel (a pair destroyed at one vertex and recreated at
    the other), which conserves both particle numbers but lies outside the
    three density-density structures.
    """
    ctx = _QuarticContext(cfg)
    inv_2v = 1.0 / (2.0 * cfg.volume)
    ee_terms: list[Term] = []
    ep_terms: list[Term] = []
    pp_terms: list[Term] = []
    e, p = Species.ELECTRON, Species.POSITRON
    for lab1, lab2, lab3 in itertools.product(ctx.labels, ctx.labels, ctx.labels):
        (s1, n1), (s2, n2), (s3, n3) = lab1, lab2, lab3
        q = tuple(a - b for a, b in zip(n3, n1))
        vq = ctx.kernel.value(q)
        if vq == 0.0:
            continue
        n4 = tuple(a + b - g for a, b, g in zip(n1, n2, n3))
        if n4 not in ctx.lattice_set:
            continue
        for s4 in (1, 2):
            # electron-electron: -e^2/2, b+(1) b+(2) b(3) b(4)
            coeff = -inv_2v * vq * ctx.bilinear("u", s1, n1, "u", s3, n3) \
                * ctx.bilinear("u", s2, n2, "u", s4, n4)
            if coeff != 0.0:
                ee_terms.append(
                    Term(coeff, (
                        Ladder(Mode(e, s1, n1), True),
                        Ladder(Mode(e, s2, n2), True),
                        Ladder(Mode(e, s3, n3), False),
                        Ladder(Mode(e, s4, n4), False),
                    ))
                )
            # electron-positron: +e^2, d+(1) b+(2) d(3) b(4)
            coeff = 2.0 * inv_2v * vq * ctx.bilinear("v", s3, n3, "v", s1, n1) \
                * ctx.bilinear("u", s2, n2, "u", s4, n4)
            if coeff != 0.0:
                ep_terms.append(
                    Term(coeff, (
                        Ladder(Mode(p, s1, n1), True),
                        Ladder(Mode(e, s2, n2), True),
                        Ladder(Mode(p, s3, n3), False),
                        Ladder(Mode(e, s4, n4), False),
                    ))
                )
            # positron-positron: -e^2/2, d+(1) d+(2) d(3) d(4)
            coeff = -inv_2v * vq * ctx.bilinear("v", s3, n3, "v", s1, n1) \
                * ctx.bilinear("v", s4, n4, "v", s2, n2)
            if coeff != 0.0:
                pp_terms.append(
                    Term(coeff, (
                        Ladder(Mode(p, s1, n1), True),
                        Ladder(Mode(p, s2, n2), True),
                        Ladder(Mode(p, s3, n3), False),
                        Ladder(Mode(p, s4, n4), False),
                    ))
                )
    ee = canonicalize(OperatorExpr(ee_terms))
    ep = canonicalize(OperatorExpr(ep_terms))
    pp = canonicalize(OperatorExpr(pp_terms))
    full = coulomb_full(cfg)
    remainder = full - ee - ep - pp
    scale = max(full.max_abs_coeff(), 1e-300)
    remainder = remainder.prune(1e-13 * scale)
    return CoulombPieces(ee, ep, pp, remainder)


def external_potential_term(cfg: ModelConfig, phi: dict) -> OperatorExpr:
    """Coupling of the charge density to an external scalar potential.

    ``phi`` maps integer wavevectors q to Fourier coefficients of
    phi(x) = sum_q phi_q exp(2 pi i q.x / L).  The potential must be real
    in position space (phi_{-q} = conj(phi_q)), otherwise the build is
    rejected.  Only the number-conserving (b+b and d+d) pieces of the
    normal-ordered density enter, so the term is number conserving and
    Hermitian; a constant potential reduces to phi_0 times the net charge
    operator.
    """
    phi = {tuple(int(c) for c in np.atleast_1d(q)): complex(val) for q, val in phi.items()}
    for q, val in phi.items():
        if len(q) != cfg.dimension:
            raise ValueError(f"wavevector {q} has wrong dimension")
        minus = tuple(-c for c in q)
        conj = phi.get(minus, 0.0 + 0.0j)
        if abs(val.conjugate() - conj) > 1e-12 * max(1.0, abs(val)):
            raise ValueError("potential is not real in position space")
    ctx = _QuarticContext(cfg)
    e_charge = cfg.charge
    terms: list[Term] = []
    for (s1, n1), (s2, n2) in itertools.product(ctx.labels, ctx.labels):
        q_b = tuple(a - b for a, b in zip(n1, n2))
        val = phi.get(q_b)
        if val:
            coeff = -e_charge * val * ctx.bilinear("u", s1, n1, "u", s2, n2)
            terms.append(Term(coeff, (
                Ladder(Mode(Species.ELECTRON, s1, n1), True),
                Ladder(Mode(Species.ELECTRON, s2, n2), False),
            )))
        q_d = tuple(b - a for a, b in zip(n1, n2))
        val = phi.get(q_d)
        if val:
            coeff = e_charge * val * ctx.bilinear("v", s1, n1, "v", s2, n2)
            terms.append(Term(coeff, (
                Ladder(Mode(Species.POSITRON, s2, n2), True),
                Ladder(Mode(Species.POSITRON, s1, n1), False),
            )))
    return canonicalize(OperatorExpr(terms))


def point_charge_potential(cfg: ModelConfig, charge: float, q_max: int | None = None) -> dict:
    """Fourier coefficients of a point charge's periodic Coulomb potential.

    phi_q = 4 pi Z e / (V |k_q|^2) for q != 0 (zero mode dropped, i.e.
    neutralizing background); the charge sits at the box origin.  In 1D the
    softened kernel of the model is used instead.
    """
    if q_max is None:
        q_max = 2 * cfg.n_max
    kern = CoulombKernel(cfg.dimension, cfg.box_l, 1.0, 0.0, cfg.soften_a)
    out = {}
    for q in itertools.product(range(-q_max, q_max + 1), repeat=cfg.dimension):
        v = kern.value(q)
        if v != 0.0:
            out[q] = charge * v / cfg.volume
    return out
