"""Subspace Hamiltonians and their ground states.

Harmonic trap: the matrix is the bare interaction sum_{ijkl} U a†a†aa at unit
strength; the constant (L + N) - L*Omega lives in ``offset`` and never enters
the matrix. Quartic trap: sum eps_l n_l + U0 * interaction.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
from scipy.linalg import eigh_tridiagonal

from . import kernels
from .fock import SubspaceBasis


class LanczosError(RuntimeError):
    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


class DimensionTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    """Symmetric matrix stored as its upper triangle in CSR arrays."""

    basis: SubspaceBasis
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)
    single_particle: np.ndarray = field(repr=False)
    offset: float = 0.0
    interaction: str = ""
    u0: float = 1.0
    trap: dict = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def nnz(self) -> int:
        return len(self.data)

    def matvec(self, x, out=None):
        if out is None:
            out = np.empty(self.dim)
        kernels.sym_matvec(self.indptr, self.indices, self.data, np.ascontiguousarray(x), out)
        return out

    def upper(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.dim, self.dim)
        )

    def to_scipy(self) -> scipy.sparse.csr_matrix:
        up = self.upper()
        return (up + up.T - scipy.sparse.diags(up.diagonal())).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def diagonal(self) -> np.ndarray:
        return self.upper().diagonal()

    def total_energy(self, energy: float, omega: float = 0.0) -> float:
        """Reattach the harmonic constant (L + N) - L*Omega to a matrix eigenvalue."""
        return energy + self.offset - self.basis.total_l * omega

    def dump_csv(self, path):
        up = self.upper().tocoo()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["row", "col", "value"])
            for r, c, v in zip(up.row, up.col, up.data):
                writer.writerow([r, c, f"{v:.17g}"])


def build_hamiltonian(basis: SubspaceBasis, table, orbital_energies=None, u0=None) -> SparseHamiltonian:
    """Assemble the subspace Hamiltonian.

    Without ``orbital_energies`` this is the harmonic case and ``u0`` must be
    left unset (the ground state does not depend on a positive strength).
    With them, the matrix is sum eps_l n_l + u0 * interaction.
    """
    if table.l_max < basis.l_max:
        raise KeyError(
            f"element table covers orbitals 0..{table.l_max}, basis needs 0..{basis.l_max}"
        )
    M = basis.n_orbitals
    V = table.folded(basis.fermion)
    if table.l_max != basis.l_max:
        V = _fold_slice(table, basis)
    harmonic = orbital_energies is None
    if harmonic:
        if u0 is not None:
            raise ValueError("harmonic Hamiltonians use unit interaction strength")
        eps = np.zeros(M)
        strength = 1.0
        offset = float(basis.total_l + basis.n_particles)
    else:
        eps = np.asarray(orbital_energies, dtype=float)
        if len(eps) < M:
            raise KeyError(f"need orbital energies for 0..{basis.l_max}, got {len(eps)}")
        eps = np.ascontiguousarray(eps[:M])
        strength = 1.0 if u0 is None else float(u0)
        offset = 0.0
    V = np.ascontiguousarray(V * strength)
    indptr, indices, data = kernels.assemble_upper(
        basis.occupations, basis.counts, basis.n_particles, basis.total_l, basis.fermion, V, eps
    )
    single = basis.occupations @ eps
    return SparseHamiltonian(
        basis,
        indptr,
        indices,
        data,
        single,
        offset,
        interaction=table.kind.value,
        u0=strength,
    )


def _fold_slice(table, basis):
    from .interaction import ElementTable

    M = basis.n_orbitals
    sub = ElementTable(table.kind, basis.l_max, np.ascontiguousarray(table.values[:M, :M, :M]))
    return sub.folded(basis.fermion)


@dataclass(frozen=True, eq=False)
class GroundStateRecord:
    n_particles: int
    total_l: int
    statistics: str
    interaction: str
    energy: float
    amplitudes: np.ndarray = field(repr=False)
    residual: float = 0.0
    degenerate: bool = False
    gap: float = math.inf
    iterations: int = 0
    method: str = "lanczos"
    u0: float = 1.0
    trap: dict = None
    offset: float = 0.0


def _canonical_sign(v):
    big = np.abs(v).max()
    first = np.flatnonzero(np.abs(v) > 1e-8 * big)[0]
    return -v if v[first] < 0 else v


def _record(H, energy, vec, residual, e1, iterations, method):
    vec = _canonical_sign(vec / np.linalg.norm(vec))
    gap = e1 - energy
    degenerate = bool(gap < 1e-10 * max(1.0, abs(energy)))
    vec.setflags(write=False)
    return GroundStateRecord(
        H.basis.n_particles,
        H.basis.total_l,
        H.basis.statistics.value,
        H.interaction,
        float(energy),
        vec,
        float(residual),
        degenerate,
        float(gap),
        iterations,
        method,
        H.u0,
        H.trap,
        H.offset,
    )


def ground_state_lanczos(H: SparseHamiltonian, tol=1e-10, max_iter=1000) -> GroundStateRecord:
    """Lowest eigenpair by Lanczos with full reorthogonalization.

    Starts from the normalized all-ones vector, so repeated runs give
    identical results. Converged when the residual norm of the Ritz pair is
    at most ``tol * max(1, |E0|)``.
    """
    n = H.dim
    if n == 1:
        e = float(H.data[0])
        return _record(H, e, np.ones(1), 0.0, math.inf, 0, "lanczos")
    max_iter = min(max_iter, n)
    cap = min(max_iter, 64)
    Q = np.empty((cap, n))
    Q[0] = 1.0 / math.sqrt(n)
    alpha = []
    beta = []
    w = np.empty(n)
    best = math.inf
    theta = None
    for m in range(max_iter):
        H.matvec(Q[m], w)
        a = float(Q[m] @ w)
        alpha.append(a)
        # two passes of classical Gram-Schmidt against the whole basis
        for _ in range(2):
            w -= Q[: m + 1].T @ (Q[: m + 1] @ w)
        b = float(np.linalg.norm(w))
        if m == 0:
            theta, s = np.array([a]), np.ones((1, 1))
        else:
            theta, s = eigh_tridiagonal(np.array(alpha), np.array(beta))
        scale = max(1.0, abs(theta[0]))
        resid = abs(b * s[-1, 0])
        best = min(best, resid)
        breakdown = b <= 1e-13 * max(scale, abs(a))
        if resid <= tol * scale or breakdown:
            vec = Q[: m + 1].T @ s[:, 0]
            true_res = float(np.linalg.norm(H.matvec(vec) - theta[0] * vec) / np.linalg.norm(vec))
            e1 = float(theta[1]) if len(theta) > 1 else math.inf
            if true_res <= max(tol * scale, 1e-12 * scale) or breakdown:
                return _record(H, theta[0], vec, true_res, e1, m + 1, "lanczos")
        if m + 1 >= max_iter:
            break
        beta.append(b)
        if m + 1 >= Q.shape[0]:
            grown = np.empty((min(2 * Q.shape[0], max_iter), n))
            grown[: m + 1] = Q[: m + 1]
            Q = grown
        Q[m + 1] = w / b
    raise LanczosError(
        f"Lanczos did not converge in {max_iter} iterations (best residual {best:.2e})", best
    )


def ground_state_dense(H: SparseHamiltonian, cap=2000) -> GroundStateRecord:
    if H.dim > cap:
        raise DimensionTooLarge(f"dimension {H.dim} exceeds dense cap {cap}")
    evals, evecs = np.linalg.eigh(H.to_dense())
    vec = evecs[:, 0].copy()
    res = float(np.linalg.norm(H.matvec(vec) - evals[0] * vec))
    e1 = float(evals[1]) if len(evals) > 1 else math.inf
    return _record(H, evals[0], vec, res, e1, 0, "dense")


def ground_state(H: SparseHamiltonian, tol=1e-10, max_iter=1000) -> GroundStateRecord:
    return ground_state_lanczos(H, tol=tol, max_iter=max_iter)
