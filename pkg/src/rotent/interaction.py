"""Two-body matrix elements U[i, j, k, l] between lowest-Landau-level orbitals.

Index convention: particle 1 goes l -> i, particle 2 goes k -> j, so the
element multiplies a_i† a_j† a_k a_l and vanishes unless i + j = k + l.

Scales:

* contact: the closed form, equal to 2*pi times the bare overlap integral of
  four orbitals, so that U[0,0,0,0] = 1;
* Coulomb: the bare double integral of 1/|z1 - z2|, U[0,0,0,0] = sqrt(pi/2).
  The closed-form sums carry an extra factor 2*pi*sqrt(2) that
  ``COULOMB_SCALE`` removes; ``calibrate_coulomb_scale`` re-derives it from
  quadrature.
"""

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import jv

LOG_SQRT_PI = 0.5 * math.log(math.pi)
COULOMB_SCALE = 1.0 / (2.0 * math.pi * math.sqrt(2.0))
CONTACT_SCALE = 2.0 * math.pi


class InteractionKind(Enum):
    CONTACT = "contact"
    COULOMB = "coulomb"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class QuadratureError(RuntimeError):
    """A quadrature did not reach its requested accuracy."""


def log_gamma_half(two_n_plus_one: int) -> float:
    """ln Gamma(n + 1/2) for the odd integer argument 2n + 1, by upward recurrence."""
    if two_n_plus_one < 1 or two_n_plus_one % 2 == 0:
        raise ValueError("argument must be a positive odd integer 2n+1")
    return _log_gamma_half(two_n_plus_one // 2)


@lru_cache(maxsize=None)
def _log_gamma_half(n: int) -> float:
    # Gamma(n + 1/2) = (2n-1)!! sqrt(pi) / 2^n; sum the logs to stay finite
    total = LOG_SQRT_PI
    for m in range(1, n + 1):
        total += math.log(m - 0.5)
    return total


@lru_cache(maxsize=None)
def _log_factorial(n: int) -> float:
    if n < 171:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1.0)


def contact_element(i: int, j: int, k: int, l: int) -> float:
    """(i+j)! / (2^(i+j) sqrt(i! j! k! l!)) when i+j = k+l, else 0."""
    if min(i, j, k, l) < 0:
        raise ValueError("orbital indices must be non-negative")
    if i + j != k + l:
        return 0.0
    s = i + j
    if s <= 30:
        f = math.factorial
        return f(s) / (2**s * math.sqrt(f(i) * f(j) * f(k) * f(l)))
    log_u = (
        _log_factorial(s)
        - s * math.log(2.0)
        - 0.5 * (_log_factorial(i) + _log_factorial(j) + _log_factorial(k) + _log_factorial(l))
    )
    return math.exp(log_u)


def canonicalize_indices(i: int, j: int, k: int, l: int):
    """Map (i, j, k, l) to an equivalent tuple with i - l >= 0.

    Uses U[i,j,k,l] = U[l,k,j,i] (real orbitals, Hermitian kernel). Returns
    the new tuple and the name of the symmetry applied (``None`` if untouched).
    """
    if i + j != k + l:
        raise ValueError(f"({i},{j},{k},{l}) does not conserve angular momentum")
    if i >= l:
        return (i, j, k, l), None
    return (l, k, j, i), "conjugate"


@lru_cache(maxsize=None)
def _log_ab_terms(r: int, s: int, t: int):
    """Log of each summand shared by the A and B sums, plus the B weights."""
    logs = []
    weights = []
    for m in range(r + 1):
        logs.append(
            _log_factorial(r)
            - _log_factorial(m)
            - _log_factorial(r - m)
            + _log_gamma_half(m)
            + _log_gamma_half(m + t)
            - _log_factorial(m + t)
            - _log_gamma_half(m + s + t + 1)
        )
        weights.append(2 * m + t + 0.5)
    return np.array(logs), np.array(weights)


def _log_sum_exp(logs, weights=None):
    top = logs.max()
    terms = np.exp(logs - top)
    if weights is not None:
        terms = terms * weights
    return top + math.log(terms.sum())


@lru_cache(maxsize=None)
def _log_a(r: int, s: int, t: int) -> float:
    logs, _ = _log_ab_terms(r, s, t)
    return _log_sum_exp(logs)


@lru_cache(maxsize=None)
def _log_b(r: int, s: int, t: int) -> float:
    logs, weights = _log_ab_terms(r, s, t)
    return _log_sum_exp(logs, weights)


def coulomb_element(i: int, j: int, k: int, l: int) -> float:
    """Coulomb element from the closed-form A/B sums, in the bare-integral scale.

    All summands are positive, so the log-space evaluation loses no digits
    to cancellation.
    """
    if min(i, j, k, l) < 0:
        raise ValueError("orbital indices must be non-negative")
    if i + j != k + l:
        return 0.0
    (i, j, k, l), _ = canonicalize_indices(i, j, k, l)
    t = i - l
    log_pref = (
        0.5 * (_log_factorial(i) + _log_factorial(k) - _log_factorial(j) - _log_factorial(l))
        + _log_gamma_half(i + j + 1)
        - (i + j) * math.log(2.0)
    )
    first = _log_a(l, j, t) + _log_b(j, l, t)
    second = _log_a(j, l, t) + _log_b(l, j, t)
    top = max(first, second)
    log_sum = top + math.log(math.exp(first - top) + math.exp(second - top))
    return COULOMB_SCALE * math.exp(log_pref + log_sum)


def closed_form_element(kind, i, j, k, l) -> float:
    kind = InteractionKind.parse(kind)
    if kind is InteractionKind.CONTACT:
        return contact_element(i, j, k, l)
    return coulomb_element(i, j, k, l)


# ---------------------------------------------------------------- quadrature


def analytic_radial(l: int, r: np.ndarray) -> np.ndarray:
    """R_l(r) = sqrt(2 / l!) r^l exp(-r^2 / 2), normalized as int R^2 r dr = 1."""
    with np.errstate(divide="ignore"):
        log_r = np.log(r)
    log_val = 0.5 * (math.log(2.0) - _log_factorial(l)) + l * log_r - 0.5 * r * r
    out = np.exp(log_val)
    if l == 0:
        out = math.sqrt(2.0) * np.exp(-0.5 * r * r)
    return out


def _contact_gauss_laguerre(i, j, k, l, n_nodes):
    # int r R_i R_j R_k R_l dr with x = 2 r^2 is a Gauss-Laguerre moment
    x, w = np.polynomial.laguerre.laggauss(n_nodes)
    r = np.sqrt(x / 2.0)
    log_norm = 2.0 * math.log(2.0) - 0.5 * sum(_log_factorial(a) for a in (i, j, k, l))
    s = i + j + k + l
    with np.errstate(divide="ignore"):
        poly = np.exp(log_norm + s * np.log(r)) if s else np.full_like(r, math.exp(log_norm))
    return float(np.dot(w, poly)) / 4.0


def _legendre(n, upper):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) * upper / 2.0, w * upper / 2.0


def _coulomb_fourier_bessel(radial, i, j, k, l, n_r, n_q, r_cut, q_cut):
    # U = 4 pi^2 (-1)^t int dq G_il(q) G_jk(q), G_ab(q) = int r R_a R_b J_{+-t}(q r) dr / (2 pi)
    r, wr = _legendre(n_r, r_cut)
    q, wq = _legendre(n_q, q_cut)
    t = i - l
    prof = {a: radial(a, r) for a in {i, j, k, l}}
    qr = np.outer(q, r)
    g_il = (jv(t, qr) * (r * prof[i] * prof[l])) @ wr / (2.0 * math.pi)
    g_jk = (jv(-t, qr) * (r * prof[j] * prof[k])) @ wr / (2.0 * math.pi)
    return 4.0 * math.pi**2 * (-1) ** t * float(np.dot(wq, g_il * g_jk))


def quadrature_element(i, j, k, l, kernel="contact", orbitals=None, tol=1e-8):
    """Numerical U[i,j,k,l] in the same scale as ``closed_form_element``.

    ``orbitals`` is ``None`` for the analytic LLL profiles or an
    ``OrbitalSet`` from the Numerov solver. Each value is computed at two
    resolutions; a difference above ``tol`` (relative) raises
    ``QuadratureError``.
    """
    kind = InteractionKind.parse(kernel)
    if min(i, j, k, l) < 0:
        raise ValueError("orbital indices must be non-negative")
    if i + j != k + l:
        return 0.0
    if orbitals is not None:
        if kind is InteractionKind.CONTACT:
            coarse = orbitals.contact_overlap(i, j, k, l, stride=2)
            fine = orbitals.contact_overlap(i, j, k, l)
        else:
            radial = orbitals.interpolated_radial
            coarse = _coulomb_fourier_bessel(radial, i, j, k, l, 200, 300, orbitals.trap.r_max, 40.0)
            fine = _coulomb_fourier_bessel(radial, i, j, k, l, 300, 450, orbitals.trap.r_max, 40.0)
    elif kind is InteractionKind.CONTACT:
        n = (i + j + k + l) // 2 + 2
        coarse = _contact_gauss_laguerre(i, j, k, l, n)
        fine = _contact_gauss_laguerre(i, j, k, l, n + 8)
    else:
        r_cut = 10.0 + 2.0 * math.sqrt(max(i, j, k, l) + 1.0)
        coarse = _coulomb_fourier_bessel(analytic_radial, i, j, k, l, 200, 300, r_cut, 40.0)
        fine = _coulomb_fourier_bessel(analytic_radial, i, j, k, l, 300, 450, r_cut, 40.0)
    err = abs(fine - coarse)
    if err > tol * max(abs(fine), 1e-300):
        raise QuadratureError(
            f"U[{i},{j},{k},{l}] ({kind.value}) unconverged: estimate {fine:.3e}, error {err:.1e}"
        )
    return fine


def raw_contact_integral(i, j, k, l) -> float:
    """Bare int d^2z phi_i* phi_j* phi_k phi_l for analytic orbitals (no 2*pi scale)."""
    return quadrature_element(i, j, k, l, "contact") / CONTACT_SCALE


def calibrate_coulomb_scale() -> float:
    """Ratio of the quadrature value to the unscaled closed form at (0,0,0,0)."""
    unscaled = coulomb_element(0, 0, 0, 0) / COULOMB_SCALE
    return quadrature_element(0, 0, 0, 0, "coulomb") / unscaled


# ---------------------------------------------------------------- tables


@dataclass
class ElementTable:
    """Memoized U[i, j, k, l] for one interaction on orbitals 0..l_max.

    ``values[i, j, k]`` stores U[i, j, k, i + j - k] (zero where that l is
    out of range); the fourth index is implied by conservation.
    """

    kind: InteractionKind
    l_max: int
    values: np.ndarray = field(repr=False)
    scale: float = 1.0

    def __call__(self, i, j, k, l) -> float:
        if i + j != k + l:
            return 0.0
        if max(i, j, k, l) > self.l_max:
            raise KeyError(f"element ({i},{j},{k},{l}) outside table l_max={self.l_max}")
        return float(self.values[i, j, k])

    def folded(self, fermion: bool) -> np.ndarray:
        """Coefficients of normal-ordered terms a_i†a_j†a_k a_l with i<=j, k<=l.

        Returned as ``V[k, l, i]``. Bosons add the index orderings; fermions
        add them with the anticommutation sign and drop i = j, k = l.
        """
        key = bool(fermion)
        cache = self.__dict__.setdefault("_folded", {})
        if key not in cache:
            cache[key] = _fold(self.values, self.l_max, key)
        return cache[key]

    def dump_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["i", "j", "k", "l", "value"])
            M = self.l_max + 1
            for i in range(M):
                for j in range(M):
                    for k in range(M):
                        l = i + j - k
                        if 0 <= l < M:
                            writer.writerow([i, j, k, l, f"{self.values[i, j, k]:.17g}"])


def _fold(U, l_max, fermion):
    M = l_max + 1
    V = np.zeros((M, M, M))

    def u(a, b, c, d):
        return U[a, b, c] if 0 <= d < M else 0.0

    for l in range(M):
        for k in range(l + 1):
            if fermion and k == l:
                continue
            tot = k + l
            for i in range(max(0, tot - l_max), tot // 2 + 1):
                j = tot - i
                if fermion:
                    if i == j:
                        continue
                    V[k, l, i] = u(i, j, k, l) - u(j, i, k, l) - u(i, j, l, k) + u(j, i, l, k)
                else:
                    creations = {(i, j), (j, i)}
                    annihilations = {(k, l), (l, k)}
                    V[k, l, i] = sum(u(a, b, c, d) for a, b in creations for c, d in annihilations)
    return V


_TABLES = {}


def element_table(kind, l_max: int, u0: float = 1.0) -> ElementTable:
    """Closed-form table, cached per kind and grown on demand."""
    kind = InteractionKind.parse(kind)
    cached = _TABLES.get(kind)
    if cached is None or cached.l_max < l_max:
        M = l_max + 1
        values = np.zeros((M, M, M))
        element = contact_element if kind is InteractionKind.CONTACT else coulomb_element
        for i in range(M):
            for j in range(M):
                for k in range(max(0, i + j - l_max), min(M - 1, i + j) + 1):
                    l = i + j - k
                    if (i, j, k) > (l, k, j) and l < M:
                        # U[i,j,k,l] = U[l,k,j,i]
                        values[i, j, k] = values[l, k, j]
                        continue
                    values[i, j, k] = element(i, j, k, l)
        cached = ElementTable(kind, l_max, values)
        _TABLES[kind] = cached
    table = cached
    if table.l_max != l_max:
        M = l_max + 1
        table = ElementTable(kind, l_max, np.ascontiguousarray(cached.values[:M, :M, :M]))
    if u0 != 1.0:
        table = ElementTable(kind, l_max, table.values * u0, scale=u0)
    return table


def numeric_contact_table(orbitals, l_max=None) -> ElementTable:
    """Contact table from numerically solved orbitals, in the closed-form scale."""
    if l_max is None:
        l_max = orbitals.l_max
    M = l_max + 1
    values = np.zeros((M, M, M))
    seen = {}
    for i in range(M):
        for j in range(M):
            for k in range(max(0, i + j - l_max), min(M - 1, i + j) + 1):
                l = i + j - k
                # the contact integrand is symmetric in all four indices
                key = tuple(sorted((i, j, k, l)))
                if key not in seen:
                    seen[key] = orbitals.contact_overlap(i, j, k, l)
                values[i, j, k] = seen[key]
    return ElementTable(InteractionKind.CONTACT, l_max, values)
