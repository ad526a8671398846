"""One- and two-particle reduced density matrices and their entropies (nats)."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class DensityMatrixError(ValueError):
    pass


def entropy(spectrum, tol=1e-10) -> float:
    """Von Neumann entropy -sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(spectrum, dtype=float)
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise DensityMatrixError(f"spectrum sums to {total!r}, not 1")
    p = _clip(p)
    nz = p[p > 0]
    return max(0.0, float(-(nz * np.log(nz)).sum()))


def _clip(values, floor=1e-14):
    values = np.asarray(values, dtype=float)
    if values.size and values.min() < -floor:
        raise DensityMatrixError(f"eigenvalue {values.min():.3e} is negative beyond {floor}")
    return np.where(values < 0, 0.0, values)


def occupations(state, basis) -> np.ndarray:
    """<a_l† a_l> for every orbital l of the basis."""
    weights = np.asarray(state.amplitudes) ** 2
    return weights @ basis.occupations


@dataclass(frozen=True)
class SingleParticleRdm:
    eigenvalues: np.ndarray
    n_particles: int

    @property
    def occupations(self):
        return self.eigenvalues * self.n_particles

    def entropy(self) -> float:
        return entropy(self.eigenvalues)


def single_particle_rdm(state, basis) -> SingleParticleRdm:
    """Diagonal rho_1: angular momentum conservation kills every off-diagonal entry."""
    p = _clip(occupations(state, basis) / basis.n_particles)
    return SingleParticleRdm(p, basis.n_particles)


@dataclass(frozen=True)
class TwoParticleRdm:
    """rho_2 blocks keyed by pair momentum s over ordered pairs (i, s - i)."""

    blocks: dict = field(repr=False)
    pairs: dict = field(repr=False)

    def trace(self) -> float:
        return float(sum(np.trace(b) for b in self.blocks.values()))

    def eigenvalues(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks.values()])

    def entropy(self) -> float:
        return entropy(_clip(self.eigenvalues(), floor=1e-12))


def two_particle_rdm(state, basis) -> TwoParticleRdm:
    """Blocks of (rho_2)_{ij,kl} = <a_k† a_l† a_j a_i> / (N (N - 1)).

    Ordered pairs: bosons keep i = j, fermions drop it.
    """
    N = basis.n_particles
    if N < 2:
        raise ValueError("two-particle density matrix needs N >= 2")
    coeffs = np.ascontiguousarray(state.amplitudes, dtype=float)
    T = kernels.pair_expectations(
        basis.occupations, coeffs, basis.counts, N, basis.total_l, basis.fermion
    )
    T /= N * (N - 1)
    M = basis.n_orbitals
    blocks = {}
    pairs = {}
    for s in range(2 * M - 1):
        ordered = [(i, s - i) for i in range(max(0, s - M + 1), min(s, M - 1) + 1)]
        if basis.fermion:
            ordered = [(i, j) for i, j in ordered if i != j]
        if not ordered:
            continue
        block = np.empty((len(ordered), len(ordered)))
        for a, (i, j) in enumerate(ordered):
            for b, (k, _l) in enumerate(ordered):
                block[a, b] = T[i, j, k]
        block = 0.5 * (block + block.T)
        if not np.any(block):
            continue
        blocks[s] = block
        pairs[s] = ordered
    return TwoParticleRdm(blocks, pairs)


@dataclass(frozen=True)
class EntanglementReport:
    s1: float
    s2: float
    ln_l_minus_s1: float
    occupations: np.ndarray = field(repr=False)
    delta_s1: float
    degenerate: bool = False


def report(state, basis, with_s2=False) -> EntanglementReport:
    """S1 always; S2 on request. ``ln_l_minus_s1`` is None at L = 0."""
    rho1 = single_particle_rdm(state, basis)
    s1 = rho1.entropy()
    s2 = None
    if with_s2 and basis.n_particles >= 2:
        s2 = two_particle_rdm(state, basis).entropy()
    L = basis.total_l
    # the bound uses ln L itself, not ln(L + 1)
    gap = math.log(L) - s1 if L > 0 else None
    return EntanglementReport(
        s1,
        s2,
        gap,
        rho1.occupations,
        s1 - math.log(basis.n_particles),
        bool(getattr(state, "degenerate", False)),
    )
