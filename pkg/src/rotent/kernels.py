"""Hot loops: basis ranking, Hamiltonian assembly, matvec, pair densities, Numerov.

Every function here is plain Python over numpy arrays so that it runs
unchanged with the JIT disabled. States are occupation rows ``occ[s, orb]``.
Basis order is descending lexicographic with the highest orbital compared
first; ``count_table`` plus ``rank_state`` give an exact perfect hash for it.
"""

import math

import numpy as np

from ._jit import kernel


@kernel
def count_table(n_particles, total_l, l_max, fermion):
    """``T[m, n, l]``: number of ways to put n particles with momentum l in orbitals < m."""
    T = np.zeros((l_max + 2, n_particles + 1, total_l + 1), dtype=np.int64)
    T[0, 0, 0] = 1
    for m in range(1, l_max + 2):
        orb = m - 1
        for n in range(n_particles + 1):
            vmax = 1 if fermion else n
            if vmax > n:
                vmax = n
            for l in range(total_l + 1):
                c = 0
                for v in range(vmax + 1):
                    rem = l - v * orb
                    if rem < 0:
                        break
                    c += T[m - 1, n - v, rem]
                T[m, n, l] = c
    return T


@kernel
def unrank_states(T, n_particles, total_l, l_max, fermion, dim):
    occ = np.zeros((dim, l_max + 1), dtype=np.int32)
    for r0 in range(dim):
        r = r0
        n = n_particles
        l = total_l
        for orb in range(l_max, -1, -1):
            vmax = 1 if fermion else n
            if vmax > n:
                vmax = n
            for v in range(vmax, -1, -1):
                rem = l - v * orb
                if rem < 0:
                    continue
                c = T[orb, n - v, rem]
                if r < c:
                    occ[r0, orb] = v
                    n -= v
                    l = rem
                    break
                r -= c
    return occ


@kernel
def rank_state(row, T, n_particles, total_l, fermion):
    r = 0
    n = n_particles
    l = total_l
    for orb in range(row.shape[0] - 1, -1, -1):
        if n == 0:
            break
        v = row[orb]
        vmax = 1 if fermion else n
        for w in range(v + 1, vmax + 1):
            rem = l - w * orb
            if rem < 0:
                break
            r += T[orb, n - w, rem]
        n -= v
        l -= v * orb
    return r


@kernel
def _parity_below(work, p):
    s = 0
    for q in range(p):
        s += work[q]
    return -1.0 if s & 1 else 1.0


@kernel
def _annihilate(work, p, fermion):
    """Apply a_p to ``work`` in place; returns the amplitude (0 when it kills the state)."""
    n = work[p]
    if n == 0:
        return 0.0
    if fermion:
        amp = _parity_below(work, p)
    else:
        amp = math.sqrt(n)
    work[p] = n - 1
    return amp


@kernel
def _create(work, p, fermion):
    n = work[p]
    if fermion:
        if n == 1:
            return 0.0
        amp = _parity_below(work, p)
    else:
        amp = math.sqrt(n + 1)
    work[p] = n + 1
    return amp


@kernel
def apply_two_body_row(row, i, j, k, l, fermion):
    """a_i† a_j† a_k a_l on one occupation row; returns (image row, amplitude)."""
    work = row.copy()
    amp = _annihilate(work, l, fermion)
    if amp == 0.0:
        return work, 0.0
    a = _annihilate(work, k, fermion)
    if a == 0.0:
        return work, 0.0
    amp *= a
    a = _create(work, j, fermion)
    if a == 0.0:
        return work, 0.0
    amp *= a
    a = _create(work, i, fermion)
    if a == 0.0:
        return work, 0.0
    return work, amp * a


@kernel
def _later_than_source(work, row, i, j, k, l):
    # 1: image sorts after the source, 0: same state, -1: before
    best = -1
    if work[i] != row[i] and i > best:
        best = i
    if work[j] != row[j] and j > best:
        best = j
    if work[k] != row[k] and k > best:
        best = k
    if work[l] != row[l] and l > best:
        best = l
    if best < 0:
        return 0
    return 1 if work[best] < row[best] else -1


@kernel
def assemble_upper(occ, T, n_particles, total_l, fermion, V3, eps):
    """Upper triangle (with diagonal) of sum V a_i†a_j†a_k a_l + sum eps_o n_o in CSR form.

    ``V3[k, l, i]`` holds the coefficient of the normal-ordered term with
    i <= j = k + l - i and k <= l, already folded over index orderings.
    Rows are independent, so the output does not depend on scheduling.
    """
    dim = occ.shape[0]
    M = occ.shape[1]
    cap = 16 * dim + 16
    indptr = np.zeros(dim + 1, dtype=np.int64)
    indices = np.empty(cap, dtype=np.int64)
    data = np.empty(cap, dtype=np.float64)
    acc = np.zeros(dim, dtype=np.float64)
    mark = np.zeros(dim, dtype=np.bool_)
    touched = np.empty(dim, dtype=np.int64)
    work = np.empty(M, dtype=np.int32)
    nnz = 0
    for s in range(dim):
        row = occ[s]
        for o in range(M):
            work[o] = row[o]
        d = 0.0
        for o in range(M):
            d += eps[o] * row[o]
        acc[s] = d
        mark[s] = True
        touched[0] = s
        ntouch = 1
        for l in range(M):
            if row[l] == 0:
                continue
            for k in range(l + 1):
                if k == l and (fermion or row[l] < 2):
                    continue
                if row[k] == 0:
                    continue
                a1 = _annihilate(work, l, fermion)
                a2 = _annihilate(work, k, fermion)
                amp_kl = a1 * a2
                tot = k + l
                i_lo = tot - (M - 1)
                if i_lo < 0:
                    i_lo = 0
                i_hi = (tot - 1) // 2 if fermion else tot // 2
                for i in range(i_lo, i_hi + 1):
                    j = tot - i
                    coeff = V3[k, l, i]
                    if coeff == 0.0:
                        continue
                    a3 = _create(work, j, fermion)
                    if a3 == 0.0:
                        continue
                    a4 = _create(work, i, fermion)
                    if a4 != 0.0:
                        order = _later_than_source(work, row, i, j, k, l)
                        if order >= 0:
                            t = s if order == 0 else rank_state(work, T, n_particles, total_l, fermion)
                            acc[t] += coeff * amp_kl * a3 * a4
                            if not mark[t]:
                                mark[t] = True
                                touched[ntouch] = t
                                ntouch += 1
                        work[i] -= 1
                    work[j] -= 1
                work[k] += 1
                work[l] += 1
        cols = np.sort(touched[:ntouch])
        if nnz + ntouch > cap:
            cap = 2 * cap + ntouch
            new_ind = np.empty(cap, dtype=np.int64)
            new_dat = np.empty(cap, dtype=np.float64)
            new_ind[:nnz] = indices[:nnz]
            new_dat[:nnz] = data[:nnz]
            indices = new_ind
            data = new_dat
        for c in cols:
            val = acc[c]
            acc[c] = 0.0
            mark[c] = False
            if val != 0.0 or c == s:
                indices[nnz] = c
                data[nnz] = val
                nnz += 1
        indptr[s + 1] = nnz
    return indptr, indices[:nnz].copy(), data[:nnz].copy()


@kernel
def sym_matvec(indptr, indices, data, x, y):
    """y = A x for A stored as its upper triangle (diagonal included)."""
    n = x.shape[0]
    for r in range(n):
        y[r] = 0.0
    for r in range(n):
        xr = x[r]
        s = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            c = indices[p]
            a = data[p]
            s += a * x[c]
            if c != r:
                y[c] += a * xr
        y[r] += s


@kernel
def pair_expectations(occ, coeffs, T, n_particles, total_l, fermion):
    """``out[i, j, k] = <a_k† a_l† a_j a_i>`` with l = i + j - k, for a real state."""
    dim = occ.shape[0]
    M = occ.shape[1]
    out = np.zeros((M, M, M), dtype=np.float64)
    work = np.empty(M, dtype=np.int32)
    for s in range(dim):
        cs = coeffs[s]
        if cs == 0.0:
            continue
        row = occ[s]
        for o in range(M):
            work[o] = row[o]
        for i in range(M):
            if row[i] == 0:
                continue
            a1 = _annihilate(work, i, fermion)
            for j in range(M):
                if work[j] == 0:
                    continue
                a2 = _annihilate(work, j, fermion)
                tot = i + j
                k_lo = tot - (M - 1)
                if k_lo < 0:
                    k_lo = 0
                k_hi = tot if tot < M - 1 else M - 1
                for k in range(k_lo, k_hi + 1):
                    l = tot - k
                    a3 = _create(work, l, fermion)
                    if a3 == 0.0:
                        continue
                    a4 = _create(work, k, fermion)
                    if a4 != 0.0:
                        t = rank_state(work, T, n_particles, total_l, fermion)
                        out[i, j, k] += coeffs[t] * cs * a1 * a2 * a3 * a4
                        work[k] -= 1
                    work[l] -= 1
                work[j] += 1
            work[i] += 1
    return out


@kernel
def numerov_match(x0, h, npts, l, lam, energy, y):
    """Shoot the log-grid radial equation at one trial energy.

    On x = ln r the radial equation has no first-derivative term:
    y'' = (l^2 - 2 (E - V(r)) r^2) y. Integrates outward to the outer turning
    point and inward from r_max, glues the pieces there (y = 1 at the joint)
    and fills ``y``. Uses the summed form of Numerov (second differences of
    f*y) to keep roundoff from accumulating over long flat stretches.
    Returns (derivative jump, outward node count, matching index); the index
    is -1 when no classically allowed point exists (energy too low).
    """
    h2 = h * h
    h12 = h2 / 12.0
    g = np.empty(npts, dtype=np.float64)
    f = np.empty(npts, dtype=np.float64)
    m = -1
    for n in range(npts):
        r = math.exp(x0 + n * h)
        pot = 0.5 * r * r * (1.0 + lam * r * r)
        g[n] = l * l - 2.0 * (energy - pot) * r * r
        f[n] = 1.0 - h12 * g[n]
        if g[n] < 0.0:
            m = n
    if m < 2 or m > npts - 3:
        return 0.0, 0, -1

    # regular series R ~ r^l (1 - E r^2 / (2 (l + 1))) at the first two points
    r0 = math.exp(x0)
    r1 = math.exp(x0 + h)
    c = energy / (2.0 * (l + 1.0))
    y[0] = 1.0 - c * r0 * r0
    y[1] = math.exp(l * h) * (1.0 - c * r1 * r1)
    z = f[1] * y[1]
    d = z - f[0] * y[0]
    nodes = 0
    for n in range(1, m):
        d += h2 * g[n] * y[n]
        z += d
        y[n + 1] = z / f[n + 1]
        if y[n + 1] * y[n] < 0.0:
            nodes += 1
        if abs(y[n + 1]) > 1e150:
            for q in range(n + 2):
                y[q] *= 1e-150
            z *= 1e-150
            d *= 1e-150
    y_out = y[m]
    for n in range(m + 1):
        y[n] /= y_out

    y[npts - 1] = 0.0
    y[npts - 2] = 1e-200
    z = f[npts - 2] * y[npts - 2]
    d = z
    for n in range(npts - 2, m, -1):
        d += h2 * g[n] * y[n]
        z += d
        y[n - 1] = z / f[n - 1]
        if abs(y[n - 1]) > 1e150:
            for q in range(n - 1, npts):
                y[q] *= 1e-150
            z *= 1e-150
            d *= 1e-150
    scale = 1.0 / y[m]
    for n in range(m, npts):
        y[n] *= scale
    y[m] = 1.0
    jump = (y[m - 1] * f[m - 1] + y[m + 1] * f[m + 1] + (10.0 * f[m] - 12.0)) / h
    return jump, nodes, m
