"""Angular-momentum scans and the signatures read off them."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entanglement import report
from .fock import EmptySubspace, Statistics, enumerate_basis, min_angular_momentum, tight_orbital_bound
from .interaction import element_table
from .solver import build_hamiltonian, ground_state_lanczos

log = logging.getLogger(__name__)

EDGE_TROUGH_DEPTH = 0.10
EDGE_TROUGH_OFFSET = 2


@dataclass(frozen=True)
class ScanRow:
    statistics: str
    n_particles: int
    total_l: int
    delta_l: int
    dim: int
    energy: float
    s1: float
    ln_l_minus_s1: float
    delta_s1: float
    s2: float = None
    occupations: tuple = field(default=(), repr=False)
    degenerate: bool = False


class ScanAborted(RuntimeError):
    def __init__(self, message, rows):
        super().__init__(message)
        self.rows = rows


def subspace_row(n_particles, total_l, statistics, interaction, with_s2=False, tol=1e-10):
    """Ground state and entanglement of one (N, L) subspace, harmonic trap."""
    statistics = Statistics.parse(statistics)
    basis = enumerate_basis(n_particles, total_l, statistics)
    table = element_table(interaction, basis.l_max)
    state = ground_state_lanczos(build_hamiltonian(basis, table), tol=tol)
    rep = report(state, basis, with_s2=with_s2)
    return ScanRow(
        statistics.value,
        n_particles,
        total_l,
        total_l - min_angular_momentum(n_particles, statistics),
        basis.dim,
        state.energy,
        rep.s1,
        rep.ln_l_minus_s1,
        rep.delta_s1,
        rep.s2,
        tuple(float(x) for x in rep.occupations),
        state.degenerate,
    )


def _job(args):
    return subspace_row(*args)


def scan_subspaces(
    n_particles, statistics, interaction, l_values, with_s2=False, relative=False, workers=1
):
    """One ScanRow per feasible L, sorted by L.

    ``relative`` means ``l_values`` are offsets from the minimal momentum
    (Delta L for fermions). Infeasible L are skipped with a log note.
    """
    statistics = Statistics.parse(statistics)
    base = min_angular_momentum(n_particles, statistics) if relative else 0
    targets = []
    for value in sorted(set(int(v) for v in l_values)):
        L = base + value
        if L < min_angular_momentum(n_particles, statistics):
            log.info("skipping infeasible L=%d for N=%d %ss", L, n_particles, statistics.value)
            continue
        targets.append(L)
    if targets:
        # one shared table sized for the largest subspace
        element_table(interaction, tight_orbital_bound(n_particles, targets[-1], statistics))
    jobs = [(n_particles, L, statistics, interaction, with_s2) for L in targets]
    rows = []
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for row in pool.map(_job, jobs):
                    rows.append(row)
        else:
            for job in jobs:
                rows.append(_job(job))
    except EmptySubspace:
        raise
    except Exception as exc:
        raise ScanAborted(f"scan stopped after {len(rows)} rows: {exc}", rows) from exc
    return rows


# ------------------------------------------------------------------ extrema


def _plateaus(values, atol):
    runs = []
    start = 0
    for n in range(1, len(values) + 1):
        if n == len(values) or abs(values[n] - values[start]) > atol:
            runs.append((start, n - 1))
            start = n
    return runs


def local_extrema(series, kind="max", atol=0.0):
    """Interior strict extrema of a (L, value) series sorted in L.

    A run of equal values counts as one point, reported at its smallest L.
    """
    if kind not in ("max", "min"):
        raise ValueError("kind must be 'max' or 'min'")
    Ls = [p[0] for p in series]
    vals = [p[1] for p in series]
    if len(vals) < 3:
        return []
    sign = 1.0 if kind == "max" else -1.0
    runs = _plateaus(vals, atol)
    found = []
    for idx in range(1, len(runs) - 1):
        a, _ = runs[idx]
        here = sign * vals[a]
        if here > sign * vals[runs[idx - 1][0]] and here > sign * vals[runs[idx + 1][0]]:
            found.append(Ls[a])
    return found


def oscillation_periods(series, periods=(2, 3, 4), min_cycles=2):
    """Maximal runs of equally spaced local minima.

    Returns ``[((L_start, L_end), P), ...]`` for runs of at least
    ``min_cycles`` consecutive spacings equal to one P in ``periods``.
    A run starts only at a minimum whose preceding local maximum lies less
    than P away: the bottom of a long monotone slope is not yet part of
    the oscillation.
    """
    minima = local_extrema(series, "min")
    maxima = local_extrema(series, "max")

    def inside(L, p):
        before = [m for m in maxima if m < L]
        return bool(before) and L - before[-1] < p

    out = []
    n = 0
    while n < len(minima) - 1:
        p = minima[n + 1] - minima[n]
        m = n + 1
        while m < len(minima) - 1 and minima[m + 1] - minima[m] == p:
            m += 1
        start = n
        if p in periods and not inside(minima[start], p):
            start += 1
        if p in periods and m - start >= min_cycles:
            out.append(((minima[start], minima[m]), p))
        n = m
    return out


def stable_angular_momenta(rows):
    """Vertices of the lower convex hull of (L, E0).

    Sweeping Omega in the -L*Omega term selects exactly these L as global
    ground states. Accepts ScanRows or (L, E0) pairs.
    """
    pts = sorted(
        (r.total_l, r.energy) if isinstance(r, ScanRow) else (int(r[0]), float(r[1])) for r in rows
    )
    if len(pts) < 2:
        raise ValueError("need at least two (L, E0) points")
    scale = max(1.0, max(abs(e) for _, e in pts))
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            # drop the middle point unless it lies strictly below the chord
            if cross <= 1e-12 * scale * (p[0] - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return [L for L, _ in hull]


# ------------------------------------------------------------------ special subspaces


def special_subspace_momentum(n_particles, k, statistics="boson"):
    """(L, Nbar) with L = (N - Nbar)(N + Nbar - k) / k; Delta L for fermions."""
    if k < 1:
        raise ValueError("k must be >= 1")
    nbar = n_particles % k
    if n_particles <= nbar:
        raise ValueError(f"N={n_particles} too small for k={k}")
    momentum = (n_particles - nbar) * (n_particles + nbar - k) // k
    return momentum, nbar


@dataclass(frozen=True)
class QhPrediction:
    filling: float
    shift: int
    s1: float
    k: int
    nbar: int


def spherical_prediction(n_particles, filling, shift) -> float:
    return math.log(n_particles / filling - shift + 1)


def laughlin_prediction(n0, m) -> float:
    return math.log(m * (n0 - 1) + 1)


def qh_entropy_prediction(n_particles, k, statistics="boson") -> QhPrediction:
    statistics = Statistics.parse(statistics)
    _, nbar = special_subspace_momentum(n_particles, k, statistics)
    if statistics.is_fermion:
        filling, shift = k / (k + 2), 3
        s1 = math.log((1 + 2 / k) * n_particles - 2)
    else:
        filling, shift = k / 2, 2
        s1 = math.log(2 * n_particles / k - 1)
    return QhPrediction(filling, shift, s1, k, nbar)


# ------------------------------------------------------------------ edge reconstruction


def classify_profile(occupations, depth=EDGE_TROUGH_DEPTH, offset=EDGE_TROUGH_OFFSET):
    """'central' when the droplet's depletion sits at l = 0, 'edge' for an interior trough.

    The droplet is the orbital range up to the last occupation above half
    the plateau; the trough is its lowest point. It counts as interior when
    it lies ``offset`` or more orbitals from l = 0 and some orbital on each
    side of it exceeds it by ``depth`` times the plateau.
    """
    occ = np.asarray(occupations, dtype=float)
    plateau = occ.max()
    inside = np.flatnonzero(occ >= 0.5 * plateau)
    edge = inside[-1]
    drop = occ[: edge + 1]
    trough = int(np.argmin(drop))
    if trough >= offset:
        left = drop[:trough].max() - drop[trough]
        right = drop[trough:].max() - drop[trough]
        if min(left, right) >= depth * plateau:
            return "edge"
    return "central"


@dataclass(frozen=True)
class EdgeTransition:
    n_particles: int
    previous: str
    current: str
    entropy_jump: bool
    classes: dict = field(repr=False)


def edge_reconstruction_detector(profiles, delta_s1=None, **thresholds):
    """First N whose occupation-profile class differs from N - 1.

    ``profiles`` maps N to the occupation vector of the Delta L = N fermion
    ground state; ``delta_s1`` optionally maps N to Delta S1 for the
    companion check Delta S1(N) > Delta S1(N - 1). Returns None when no
    transition occurs.
    """
    if len(profiles) < 2:
        raise ValueError("need profiles for at least two N")
    ns = sorted(profiles)
    classes = {n: classify_profile(profiles[n], **thresholds) for n in ns}
    for prev, cur in zip(ns, ns[1:]):
        if cur == prev + 1 and classes[cur] != classes[prev]:
            jump = None
            if delta_s1 is not None and prev in delta_s1 and cur in delta_s1:
                jump = delta_s1[cur] > delta_s1[prev]
            return EdgeTransition(cur, classes[prev], classes[cur], jump, classes)
    return None
