"""Interaction-strength scans for contact bosons in the quadratic-plus-quartic trap."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .entanglement import report
from .fock import Statistics, enumerate_basis
from .interaction import numeric_contact_table
from .orbitals import TrapConfig, build_orbital_set
from .solver import build_hamiltonian, ground_state_lanczos

log = logging.getLogger(__name__)

U0_LIMIT = 0.05


def default_u0_grid():
    return np.linspace(-U0_LIMIT, U0_LIMIT, 21)


@dataclass(frozen=True)
class StrengthScanRow:
    n_particles: int
    total_l: int
    lam: float
    u0: float
    energy: float
    s1: float
    s2: float
    degenerate: bool = False
    amplitudes: np.ndarray = field(default=None, repr=False)


_ORBITALS = {}
_TABLES = {}


def _orbital_data(l_max, trap):
    have = _ORBITALS.get(trap)
    if have is None or have.l_max < l_max:
        have = build_orbital_set(l_max, trap)
        _ORBITALS[trap] = have
        _TABLES.pop(trap, None)
    table = _TABLES.get(trap)
    if table is None or table.l_max < l_max:
        table = numeric_contact_table(have, have.l_max)
        _TABLES[trap] = table
    return have, table


def strength_scan(n_particles, total_l, lam, u0_grid=None, with_s2=True, trap=None):
    """Ground state and entropies of sum eps_l n_l + U0 W across a U0 grid.

    W is the contact interaction built from the numerically solved orbitals.
    The -L Omega constant is left out. Rows come back sorted by U0.
    """
    grid = default_u0_grid() if u0_grid is None else np.asarray(u0_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty U0 grid")
    if np.any(np.abs(grid) > U0_LIMIT + 1e-12):
        raise ValueError(f"U0 values must lie in [-{U0_LIMIT}, {U0_LIMIT}]")
    if trap is None:
        trap = TrapConfig(lam=lam)
    elif trap.lam != lam:
        raise ValueError("trap.lam disagrees with lam")
    basis = enumerate_basis(n_particles, total_l, Statistics.BOSON)
    orbitals, table = _orbital_data(basis.l_max, trap)
    rows = []
    previous = None
    for u0 in sorted(float(u) for u in grid):
        H = build_hamiltonian(basis, table, orbitals.energies, u0=u0)
        state = ground_state_lanczos(H)
        if state.degenerate:
            log.warning("degenerate ground state at N=%d L=%d U0=%g", n_particles, total_l, u0)
            s1 = s2 = None
        else:
            rep = report(state, basis, with_s2=with_s2)
            s1, s2 = rep.s1, rep.s2
        if previous is not None and abs(previous @ state.amplitudes) < 0.5:
            log.info("level crossing between U0=%g and its predecessor", u0)
        previous = state.amplitudes
        rows.append(
            StrengthScanRow(
                n_particles, total_l, lam, u0, state.energy, s1, s2, state.degenerate, state.amplitudes
            )
        )
    return rows


def condensation_trend(n_list, lam, u0, trap=None, subspace="N"):
    """(N, S1) of the L = N ground state for each N.

    ``subspace="N(N-1)"`` uses the Laughlin momentum L = N(N - 1) instead.
    """
    if subspace not in ("N", "N(N-1)"):
        raise ValueError("subspace must be 'N' or 'N(N-1)'")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("N list must be strictly increasing")
    if u0 == 0:
        raise ValueError("U0 must be nonzero")
    out = []
    for n in n_list:
        L = n if subspace == "N" else n * (n - 1)
        (row,) = strength_scan(n, L, lam, [u0], with_s2=False, trap=trap)
        out.append((n, row.s1))
    return out
