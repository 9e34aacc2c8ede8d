"""Shared fixtures and independent oracles.

The Jordan-Wigner kron-product construction below is a fully independent
route to operator matrices on the complete Fock space of M modes: ladder
matrices are built as explicit tensor products and expressions are
evaluated by dense matrix arithmetic, never touching the package's
occupancy-bitmask assembly kernels.
"""

from __future__ import annotations

import numpy as np
import pytest

from fockbox.algebra import Ladder, OperatorExpr, Term
from fockbox.modes import Mode, ModeSet, Species

_ID = np.eye(2)
_Z = np.diag([1.0, -1.0])
_ANNIHILATE = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| per mode factor


def jw_ladder_matrix(mode_index: int, create: bool, n_modes: int) -> np.ndarray:
    """Dense ladder matrix with Z-strings on lower mode indices.

    Basis index = occupancy bitmask with mode 0 in the least significant
    bit, matching the package's parity convention (-1)^(occupied below k).
    """
    op = np.array([[1.0]])
    for k in range(n_modes - 1, -1, -1):  # most significant factor first
        if k > mode_index:
            factor = _ID
        elif k == mode_index:
            factor = _ANNIHILATE.T if create else _ANNIHILATE
        else:
            factor = _Z
        op = np.kron(op, factor)
    return op


def jw_expr_matrix(expr: OperatorExpr, modes: ModeSet) -> np.ndarray:
    """Dense matrix of an expression on the full 2^M Fock space."""
    m = len(modes)
    dim = 2**m
    total = np.zeros((dim, dim), dtype=np.complex128)
    for term in expr.terms:
        acc = np.eye(dim, dtype=np.complex128)
        for ladder in term.factors:
            acc = acc @ jw_ladder_matrix(modes.index(ladder.mode), ladder.create, m)
        total += term.coeff * acc
    return total


def random_expr(rng, modes: ModeSet, n_terms=3, max_factors=4) -> OperatorExpr:
    terms = []
    for _ in range(n_terms):
        k = int(rng.integers(0, max_factors + 1))
        factors = tuple(
            Ladder(modes[int(i)], bool(rng.integers(0, 2)))
            for i in rng.integers(0, len(modes), k)
        )
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        terms.append(Term(coeff, factors))
    return OperatorExpr(terms)


@pytest.fixture
def rng():
    return np.random.default_rng(20230504)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, printed even on green runs."""
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)


@pytest.fixture
def modes8():
    """Eight electron modes (1D, spins 1-2, n in {-1,0,1} minus two)."""
    return ModeSet(
        sorted(
            [Mode(Species.ELECTRON, s, (n,)) for s in (1, 2) for n in (-1, 0, 1)]
            + [Mode(Species.POSITRON, 1, (n,)) for n in (0, 1)],
            key=lambda m: m.sort_key,
        )
    )


@pytest.fixture
def modes4():
    return ModeSet(
        sorted(
            [Mode(Species.ELECTRON, s, (n,)) for s in (1, 2) for n in (0, 1)],
            key=lambda m: m.sort_key,
        )
    )
