import numpy as np
import pytest

from rotent.anharmonic import condensation_trend, default_u0_grid, strength_scan
from rotent.fock import enumerate_basis
from rotent.orbitals import TrapConfig, build_orbital_set


def test_default_grid():
    grid = default_u0_grid()
    assert len(grid) == 21
    assert grid[0] == -0.05 and grid[-1] == 0.05
    assert 0.0 in grid


def test_noninteracting_minimizer_is_unique_and_unentangled():
    lam = 0.005
    eps = build_orbital_set(5, TrapConfig(lam=lam)).energies
    basis = enumerate_basis(5, 5, "boson")
    single = basis.occupations @ eps
    order = np.argsort(single)
    assert single[order[1]] - single[order[0]] > 1e-6
    assert tuple(basis.state(order[0])) == (0, 5, 0, 0, 0, 0)
    # first-order check: five in l=1 beats four in l=0 plus one in l=5
    assert 5 * eps[1] < 4 * eps[0] + eps[5]
    (row,) = strength_scan(5, 5, lam, [0.0])
    assert row.s1 == pytest.approx(0.0, abs=1e-12)
    assert row.s2 == pytest.approx(0.0, abs=1e-12)
    assert row.energy == pytest.approx(5 * eps[1], rel=1e-12)


def test_rows_sorted_and_opposite_signs_differ():
    rows = strength_scan(5, 5, 0.005, [0.05, -0.05, 0.0])
    assert [r.u0 for r in rows] == [-0.05, 0.0, 0.05]
    neg, pos = rows[0], rows[2]
    assert abs(neg.amplitudes @ pos.amplitudes) < 1 - 1e-6
    assert neg.s1 > 0 and pos.s1 > 0 and neg.s1 != pos.s1


def test_grid_and_trap_validation():
    with pytest.raises(ValueError):
        strength_scan(3, 3, 0.005, [0.1])
    with pytest.raises(ValueError):
        strength_scan(3, 3, 0.005, [])
    with pytest.raises(ValueError):
        strength_scan(3, 3, 0.005, [0.01], trap=TrapConfig(lam=0.0))
    with pytest.raises(ValueError):
        condensation_trend([5, 4], 0.005, -0.03)
    with pytest.raises(ValueError):
        condensation_trend([4, 5], 0.005, 0.0)


def test_trend_shape():
    out = condensation_trend([3, 4], 0.005, -0.03)
    assert [n for n, _ in out] == [3, 4]
    assert all(s > 0 for _, s in out)
