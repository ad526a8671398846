import math

import numpy as np
import pytest

from rotent.fock import enumerate_basis
from rotent.interaction import closed_form_element, element_table
from rotent.solver import (
    DimensionTooLarge,
    LanczosError,
    build_hamiltonian,
    ground_state_dense,
    ground_state_lanczos,
)


def _destroy(state, p, fermion):
    occ = list(state)
    if occ[p] == 0:
        return None, 0.0
    amp = (-1.0) ** sum(occ[:p]) if fermion else math.sqrt(occ[p])
    occ[p] -= 1
    return tuple(occ), amp


def _create(state, p, fermion):
    occ = list(state)
    if fermion and occ[p]:
        return None, 0.0
    amp = (-1.0) ** sum(occ[:p]) if fermion else math.sqrt(occ[p] + 1)
    occ[p] += 1
    return tuple(occ), amp


def reference_matrix(N, L, fermion, kind):
    """sum_{ijkl} U_ijkl a_i† a_j† a_k a_l built term by term on dict states."""
    basis = enumerate_basis(N, L, "fermion" if fermion else "boson")
    M = basis.l_max + 1
    states = [tuple(int(x) for x in basis.state(s)) for s in range(basis.dim)]
    where = {s: n for n, s in enumerate(states)}
    H = np.zeros((basis.dim, basis.dim))
    for col, src in enumerate(states):
        for i in range(M):
            for j in range(M):
                for k in range(M):
                    l = i + j - k
                    if not 0 <= l < M:
                        continue
                    amp = 1.0
                    st = src
                    for op, p in ((_destroy, l), (_destroy, k), (_create, j), (_create, i)):
                        st, a = op(st, p, fermion)
                        if st is None:
                            break
                        amp *= a
                    if st is None:
                        continue
                    H[where[st], col] += closed_form_element(kind, i, j, k, l) * amp
    return basis, H


@pytest.mark.parametrize(
    "N,L,fermion,kind",
    [
        (2, 2, False, "contact"),
        (3, 4, False, "coulomb"),
        (4, 6, False, "coulomb"),
        (3, 6, True, "coulomb"),
        (3, 7, True, "contact"),
        (4, 10, True, "coulomb"),
    ],
)
def test_assembly_matches_reference(N, L, fermion, kind):
    basis, ref = reference_matrix(N, L, fermion, kind)
    H = build_hamiltonian(basis, element_table(kind, basis.l_max))
    assert np.allclose(H.to_dense(), ref, atol=1e-12, rtol=0)
    assert np.allclose(ref, ref.T, atol=1e-12)


def test_two_boson_first_quantized():
    # N=2, L=2 written out by hand from the element definitions
    basis = enumerate_basis(2, 2, "boson")
    H = build_hamiltonian(basis, element_table("contact", 2)).to_dense()
    u = lambda *t: closed_form_element("contact", *t)
    # |n0=1,n2=1> and |n1=2>
    h00 = 2 * (u(0, 2, 2, 0) + u(2, 0, 0, 2))
    h11 = 2 * u(1, 1, 1, 1)
    h01 = 2 * math.sqrt(2) * u(0, 2, 1, 1)
    ref = np.array([[h00, h01], [h01, h11]])
    assert np.allclose(H, ref)
    evals = np.linalg.eigvalsh(ref)
    # the Laughlin-like state (relative d-wave) has zero contact energy
    assert evals[0] == pytest.approx(0.0, abs=1e-14)


def test_lanczos_matches_dense_and_is_deterministic():
    basis = enumerate_basis(6, 6, "boson")
    H = build_hamiltonian(basis, element_table("coulomb", basis.l_max))
    a = ground_state_lanczos(H)
    b = ground_state_lanczos(H)
    d = ground_state_dense(H)
    assert a.energy == pytest.approx(23.4996400746656, rel=1e-12)
    assert abs(a.energy - d.energy) < 1e-10
    assert abs(a.amplitudes @ d.amplitudes) > 1 - 1e-10
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert a.residual <= 1e-10 * max(1, abs(a.energy))
    # canonical sign: first sizable amplitude positive
    first = np.flatnonzero(np.abs(a.amplitudes) > 1e-8 * np.abs(a.amplitudes).max())[0]
    assert a.amplitudes[first] > 0


def test_offset_and_total_energy():
    basis = enumerate_basis(4, 5, "boson")
    H = build_hamiltonian(basis, element_table("contact", 5))
    assert H.offset == 9.0
    assert H.total_energy(1.0, omega=0.5) == pytest.approx(1.0 + 9.0 - 2.5)
    with pytest.raises(ValueError):
        build_hamiltonian(basis, element_table("contact", 5), u0=2.0)
    with pytest.raises(KeyError):
        build_hamiltonian(basis, element_table("contact", 3))


def test_single_state_subspace():
    basis = enumerate_basis(3, 3, "fermion")
    gs = ground_state_lanczos(build_hamiltonian(basis, element_table("coulomb", 2)))
    assert gs.amplitudes.tolist() == [1.0]
    assert not gs.degenerate


def test_degenerate_flag():
    # equal orbital energies and no interaction: every state is degenerate
    basis = enumerate_basis(2, 4, "boson")
    H = build_hamiltonian(basis, element_table("contact", 4), np.ones(5), u0=0.0)
    gs = ground_state_dense(H)
    assert gs.degenerate


def test_dense_cap_and_lanczos_failure():
    basis = enumerate_basis(6, 12, "boson")
    H = build_hamiltonian(basis, element_table("coulomb", 12))
    with pytest.raises(DimensionTooLarge):
        ground_state_dense(H, cap=10)
    with pytest.raises(LanczosError) as info:
        ground_state_lanczos(H, tol=1e-15, max_iter=3)
    assert info.value.best_residual > 0


def test_csv_dump(tmp_path):
    basis = enumerate_basis(3, 3, "boson")
    H = build_hamiltonian(basis, element_table("contact", 3))
    path = tmp_path / "h.csv"
    H.dump_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,value"
    assert len(lines) == H.nnz + 1
