"""Fixed-(N, L) occupation bases over lowest-Landau-level orbitals."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels


class Statistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def is_fermion(self) -> bool:
        return self is Statistics.FERMION

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class EmptySubspace(ValueError):
    """No Fock state satisfies the requested (N, L, statistics, l_max)."""


def min_angular_momentum(n_particles: int, statistics) -> int:
    """Smallest reachable L: 0 for bosons, N(N-1)/2 for fermions."""
    if Statistics.parse(statistics).is_fermion:
        return n_particles * (n_particles - 1) // 2
    return 0


def tight_orbital_bound(n_particles: int, total_l: int, statistics) -> int:
    """Largest orbital any state of the (N, L) subspace can occupy."""
    statistics = Statistics.parse(statistics)
    if statistics.is_fermion:
        # the other N-1 fermions sit in orbitals 0..N-2 at the very least
        return total_l - (n_particles - 1) * (n_particles - 2) // 2
    return total_l


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Immutable, deterministically ordered basis of one (N, L) subspace.

    ``occupations[s]`` is the occupation vector of state ``s`` over orbitals
    ``0..l_max``. ``index_of`` is the exact inverse map.
    """

    n_particles: int
    total_l: int
    l_max: int
    statistics: Statistics
    occupations: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    def __len__(self):
        return self.dim

    @property
    def fermion(self) -> bool:
        return self.statistics.is_fermion

    @property
    def n_orbitals(self) -> int:
        return self.l_max + 1

    def state(self, index: int) -> tuple:
        return tuple(int(v) for v in self.occupations[index])

    def index_of(self, occupations) -> int:
        row = np.zeros(self.n_orbitals, dtype=np.int32)
        occupations = np.asarray(occupations, dtype=np.int32)
        if occupations.shape[0] > self.n_orbitals and occupations[self.n_orbitals:].any():
            raise KeyError("state occupies orbitals beyond l_max")
        row[: min(len(occupations), self.n_orbitals)] = occupations[: self.n_orbitals]
        if (
            row.min() < 0
            or row.sum() != self.n_particles
            or int(np.dot(row, np.arange(self.n_orbitals))) != self.total_l
            or (self.fermion and row.max() > 1)
        ):
            raise KeyError(f"{tuple(occupations)} is not in this basis")
        return int(
            kernels.rank_state(row, self.counts, self.n_particles, self.total_l, self.fermion)
        )

    def __contains__(self, occupations) -> bool:
        try:
            self.index_of(occupations)
        except KeyError:
            return False
        return True

    def same_subspace(self, other) -> bool:
        return (
            self.n_particles == other.n_particles
            and self.total_l == other.total_l
            and self.statistics is other.statistics
            and self.l_max == other.l_max
        )


def enumerate_basis(n_particles: int, total_l: int, statistics, l_max=None) -> SubspaceBasis:
    """All occupation states with N particles and angular momentum L.

    ``l_max`` defaults to the tight bound; any larger value gives the same
    states padded with empty orbitals.
    """
    statistics = Statistics.parse(statistics)
    if n_particles < 1:
        raise EmptySubspace(f"N must be >= 1, got {n_particles}")
    if total_l < min_angular_momentum(n_particles, statistics):
        raise EmptySubspace(
            f"L={total_l} is below the minimum {min_angular_momentum(n_particles, statistics)}"
            f" for N={n_particles} {statistics.value}s"
        )
    if l_max is None:
        l_max = tight_orbital_bound(n_particles, total_l, statistics)
    if l_max < 0:
        raise EmptySubspace(f"l_max must be >= 0, got {l_max}")
    T = kernels.count_table(n_particles, total_l, l_max, statistics.is_fermion)
    dim = int(T[l_max + 1, n_particles, total_l])
    if dim == 0:
        raise EmptySubspace(
            f"no {statistics.value} states with N={n_particles}, L={total_l}, l_max={l_max}"
        )
    occ = kernels.unrank_states(T, n_particles, total_l, l_max, statistics.is_fermion, dim)
    occ.setflags(write=False)
    T.setflags(write=False)
    return SubspaceBasis(n_particles, total_l, l_max, statistics, occ, T)


def apply_two_body(basis: SubspaceBasis, state_index: int, i: int, j: int, k: int, l: int):
    """Image of a_i† a_j† a_k a_l on basis state ``state_index``.

    States are normalized products of creation operators applied in ascending
    orbital order; fermion signs follow from that ordering. Returns
    ``(image index, amplitude)`` or ``None`` when the operator kills the state.
    """
    for idx in (i, j, k, l):
        if not 0 <= idx <= basis.l_max:
            raise IndexError(f"orbital {idx} outside 0..{basis.l_max}")
    if i + j != k + l:
        raise ValueError(f"({i},{j},{k},{l}) does not conserve angular momentum")
    row = np.ascontiguousarray(basis.occupations[state_index])
    image, amp = kernels.apply_two_body_row(row, i, j, k, l, basis.fermion)
    if amp == 0.0:
        return None
    t = kernels.rank_state(image, basis.counts, basis.n_particles, basis.total_l, basis.fermion)
    return int(t), float(amp)
