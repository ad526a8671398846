"""Symmetrized products of nu = 1/2 Laughlin factors expanded in the boson Fock basis."""

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .analysis import special_subspace_momentum
from .fock import Statistics, enumerate_basis

TRIAL_CAP = 8


class TrialCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class MonomialExpansion:
    """Integer polynomial in ``variables``; keys are exponent tuples in variable order."""

    variables: tuple
    terms: dict = field(repr=False)

    @property
    def degree(self) -> int:
        return sum(next(iter(self.terms))) if self.terms else 0

    def __call__(self, values) -> complex:
        z = np.asarray(values, dtype=complex)
        return sum(c * np.prod(z ** np.array(e)) for e, c in self.terms.items())


def jastrow_squared(variables, cap=TRIAL_CAP) -> MonomialExpansion:
    """prod_{i<j} (z_i - z_j)^2 over ``variables``, expanded factor by factor."""
    variables = tuple(variables)
    n = len(variables)
    if n < 1:
        raise ValueError("need at least one variable")
    if n > cap:
        raise TrialCapExceeded(f"{n} variables exceeds the expansion cap {cap}")
    terms = {(0,) * n: 1}
    for i in range(n):
        for j in range(i + 1, n):
            factor = {}
            for e, c in terms.items():
                for di, dj, w in ((2, 0, 1), (1, 1, -2), (0, 2, 1)):
                    f = list(e)
                    f[i] += di
                    f[j] += dj
                    key = tuple(f)
                    factor[key] = factor.get(key, 0) + c * w
            terms = {e: c for e, c in factor.items() if c}
    return MonomialExpansion(variables, terms)


@lru_cache(maxsize=None)
def vandermonde_squared_coefficient(exponents) -> int:
    """Coefficient of prod z_i^{a_i} in prod_{i<j} (z_i - z_j)^2.

    Squaring the Vandermonde determinant gives sum over permutation pairs
    sgn(s) sgn(t) with s(i) + t(i) = a_i; we backtrack over s, where t is
    then forced.
    """
    a = tuple(exponents)
    n = len(a)
    if sum(a) != n * (n - 1) or (a and max(a) > 2 * (n - 1)):
        return 0

    def walk(i, used_s, used_t):
        if i == n:
            return 1
        total = 0
        for s in range(n):
            if used_s >> s & 1:
                continue
            t = a[i] - s
            if t < 0 or t >= n or used_t >> t & 1:
                continue
            # sign: inversions against already placed values
            flips = bin(used_s >> s).count("1") + bin(used_t >> t).count("1")
            sub = walk(i + 1, used_s | 1 << s, used_t | 1 << t)
            total += -sub if flips & 1 else sub
        return total

    return walk(0, 0, 0)


def block_sizes(n_particles, k):
    """Block-size multiset: Nbar blocks of m + 1 and k - Nbar blocks of m, m = (N - Nbar) / k."""
    nbar = n_particles % k
    m = (n_particles - nbar) // k
    return (m + 1,) * nbar + (m,) * (k - nbar)


def set_partitions(n, sizes):
    """Distinct partitions of range(n) into unordered blocks with the given sizes."""

    def rec(remaining, sizes):
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        for size in sorted(set(sizes)):
            left = list(sizes)
            left.remove(size)
            for others in combinations(rest, size - 1):
                block = (first,) + others
                remain = tuple(x for x in rest if x not in others)
                for tail in rec(remain, tuple(left)):
                    yield (block,) + tail

    yield from rec(tuple(range(n)), tuple(sizes))


@dataclass(frozen=True, eq=False)
class TrialState:
    n_particles: int
    k: int
    nbar: int
    total_l: int
    basis: object = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    blocks: tuple = ()

    def dump_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "occupations", "amplitude"])
            for i, amp in enumerate(self.amplitudes):
                occ = " ".join(str(int(x)) for x in self.basis.occupations[i])
                writer.writerow([i, occ, f"{amp:.12g}"])


def symmetrized_product(n_particles, k, cap=TRIAL_CAP) -> TrialState:
    """Normalized Fock amplitudes of S[prod over blocks of (z_i - z_j)^2]."""
    if n_particles < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    if n_particles < k:
        raise ValueError(f"N={n_particles} has fewer particles than blocks k={k}")
    if n_particles > cap:
        raise TrialCapExceeded(f"N={n_particles} exceeds the trial cap {cap}")
    L, nbar = special_subspace_momentum(n_particles, k)
    sizes = block_sizes(n_particles, k)
    partitions = list(set_partitions(n_particles, sizes))
    targets = [[len(b) * (len(b) - 1) for b in p] for p in partitions]
    basis = enumerate_basis(n_particles, L, Statistics.BOSON)
    lf = [math.lgamma(x + 1) for x in range(max(L, n_particles) + 2)]
    amps = np.zeros(basis.dim)
    for row in range(basis.dim):
        occ = basis.occupations[row]
        # particle exponents in descending order
        a = tuple(l for l in range(len(occ) - 1, -1, -1) for _ in range(int(occ[l])))
        coeff = 0
        for part, want in zip(partitions, targets):
            term = 1
            for block, deg in zip(part, want):
                sub = tuple(a[i] for i in block)
                if sum(sub) != deg:
                    term = 0
                    break
                term *= vandermonde_squared_coefficient(sub)
                if not term:
                    break
            coeff += term
        if coeff:
            log_w = 0.5 * (sum(lf[x] for x in a) + lf[n_particles] - sum(lf[int(c)] for c in occ))
            amps[row] = coeff * math.exp(log_w)
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ArithmeticError("trial state vanished identically")
    amps /= norm
    first = np.flatnonzero(np.abs(amps) > 1e-8 * np.abs(amps).max())[0]
    if amps[first] < 0:
        amps = -amps
    amps.setflags(write=False)
    return TrialState(n_particles, k, nbar, L, basis, amps, sizes)


def overlap(trial: TrialState, ed) -> float:
    """|<trial|ground state>| for a ground state on the same boson subspace."""
    if (
        ed.n_particles != trial.n_particles
        or ed.total_l != trial.total_l
        or Statistics.parse(ed.statistics) is not Statistics.BOSON
        or len(ed.amplitudes) != trial.basis.dim
    ):
        raise ValueError("trial state and ground state live in different subspaces")
    return float(abs(np.dot(trial.amplitudes, ed.amplitudes)))
