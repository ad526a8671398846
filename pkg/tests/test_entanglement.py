import itertools
import math

import numpy as np
import pytest

from rotent.entanglement import (
    DensityMatrixError,
    entropy,
    occupations,
    report,
    single_particle_rdm,
    two_particle_rdm,
)
from rotent.fock import enumerate_basis
from rotent.interaction import element_table
from rotent.solver import build_hamiltonian, ground_state_lanczos


def solve(N, L, stat, kind="coulomb"):
    basis = enumerate_basis(N, L, stat)
    return basis, ground_state_lanczos(build_hamiltonian(basis, element_table(kind, basis.l_max)))


def first_quantized(basis, amplitudes):
    """psi[x1, ..., xN] over orbital labels, from Fock amplitudes."""
    N, M = basis.n_particles, basis.n_orbitals
    psi = np.zeros((M,) * N)
    for s, amp in enumerate(amplitudes):
        occ = basis.state(s)
        orbs = [l for l in range(M) for _ in range(int(occ[l]))]
        if basis.fermion:
            for perm in itertools.permutations(range(N)):
                sign = np.linalg.det(np.eye(N)[list(perm)])
                psi[tuple(orbs[p] for p in perm)] += sign * amp / math.sqrt(math.factorial(N))
        else:
            weight = math.sqrt(np.prod([math.factorial(int(n)) for n in occ]) / math.factorial(N))
            for idx in set(itertools.permutations(orbs)):
                psi[idx] += amp * weight
    return psi


@pytest.mark.parametrize("N,L,stat", [(3, 6, "boson"), (3, 8, "fermion"), (4, 6, "boson"), (3, 5, "boson")])
def test_rdms_match_first_quantized(N, L, stat):
    basis, gs = solve(N, L, stat)
    psi = first_quantized(basis, gs.amplitudes)
    M = basis.n_orbitals
    assert np.sum(psi**2) == pytest.approx(1.0, abs=1e-12)
    flat1 = psi.reshape(M, -1)
    rho1 = flat1 @ flat1.T
    flat2 = psi.reshape(M * M, -1)
    rho2 = flat2 @ flat2.T
    ours1 = single_particle_rdm(gs, basis)
    assert np.allclose(np.diag(rho1), ours1.eigenvalues, atol=1e-12)
    assert np.allclose(rho1, np.diag(np.diag(rho1)), atol=1e-12)
    ref2 = np.sort(np.linalg.eigvalsh(rho2))
    got2 = np.sort(two_particle_rdm(gs, basis).eigenvalues())
    ref2 = ref2[ref2 > 1e-12]
    got2 = got2[got2 > 1e-12]
    assert np.allclose(ref2, got2, atol=1e-12)


def test_three_particle_s2_equals_s1():
    # Schmidt decomposition of a pure 3-particle state across (12)|(3)
    for stat, L in (("boson", 7), ("fermion", 9)):
        basis, gs = solve(3, L, stat)
        rep = report(gs, basis, with_s2=True)
        assert rep.s2 == pytest.approx(rep.s1, abs=1e-10)


def test_two_particle_trace_and_blocks():
    basis, gs = solve(5, 9, "boson")
    rho2 = two_particle_rdm(gs, basis)
    assert rho2.trace() == pytest.approx(1.0, abs=1e-12)
    for s, pairs in rho2.pairs.items():
        assert all(i + j == s for i, j in pairs)
    fbasis, fgs = solve(4, 10, "fermion")
    frho = two_particle_rdm(fgs, fbasis)
    assert all(i != j for pairs in frho.pairs.values() for i, j in pairs)
    assert frho.trace() == pytest.approx(1.0, abs=1e-12)


def test_occupations_sum_and_moment():
    basis, gs = solve(6, 11, "boson")
    occ = occupations(gs, basis)
    assert occ.sum() == pytest.approx(6.0)
    assert occ @ np.arange(len(occ)) == pytest.approx(11.0)


def test_entropy_basics():
    assert entropy([1.0]) == 0.0
    assert entropy([0.5, 0.5]) == pytest.approx(math.log(2))
    assert entropy([0.25] * 4 + [0.0]) == pytest.approx(math.log(4))
    with pytest.raises(DensityMatrixError):
        entropy([0.6, 0.6])
    with pytest.raises(DensityMatrixError):
        entropy([1.1, -0.1])


def test_report_fields():
    basis, gs = solve(4, 0, "boson")
    rep = report(gs, basis, with_s2=True)
    assert rep.s1 == 0.0
    assert rep.ln_l_minus_s1 is None
    assert rep.delta_s1 == pytest.approx(-math.log(4))
    basis, gs = solve(4, 8, "boson")
    rep = report(gs, basis)
    assert rep.s2 is None
    assert rep.ln_l_minus_s1 == pytest.approx(math.log(8) - rep.s1)


def test_two_particle_needs_two():
    basis, gs = solve(1, 3, "boson")
    with pytest.raises(ValueError):
        two_particle_rdm(gs, basis)
    assert report(gs, basis, with_s2=True).s2 is None
