"""Nodeless single-particle orbitals of the quadratic-plus-quartic trap.

V(r) = r^2 (1 + lam r^2) / 2 in oscillator units. For each angular momentum l
we solve for the lowest radial state by Numerov shooting on the grid
x = ln r, where the 2D radial equation carries no first-derivative term.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels


class OrbitalSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrapConfig:
    """Quartic coefficient and radial grid.

    ``step`` is the radial spacing at ``r_max``; the log grid is finer
    everywhere inside.
    """

    lam: float = 0.0
    r_min: float = 1e-6
    r_max: float = 12.0
    step: float = 1e-3

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.step <= 0:
            raise ValueError("step must be positive")

    @property
    def dx(self) -> float:
        return self.step / self.r_max

    @property
    def x0(self) -> float:
        return math.log(self.r_min)

    @property
    def npts(self) -> int:
        return int(math.ceil((math.log(self.r_max) - self.x0) / self.dx)) + 1

    def radii(self) -> np.ndarray:
        return np.exp(self.x0 + self.dx * np.arange(self.npts))


def _energy_bracket(l, lam):
    # harmonic value plus twice the first-order quartic shift bounds the level
    upper = (l + 1) + lam * (l + 1) * (l + 2) + 1.0
    return 0.0, upper


def solve_orbital(l: int, trap: TrapConfig, tol: float = 1e-12):
    """Lowest radial level for angular momentum ``l``: returns (energy, R on the grid).

    ``R`` is positive and normalized so that sum over the grid of R^2 r^2 dx
    (the trapezoid rule for the integral of R^2 r dr) equals 1.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    npts = trap.npts
    y = np.empty(npts)
    lo, hi = _energy_bracket(l, trap.lam)
    jump, nodes, m = kernels.numerov_match(trap.x0, trap.dx, npts, l, trap.lam, hi, y)
    grow = 0
    while m < 0 or (nodes == 0 and jump < 0):
        hi = 2.0 * hi + 1.0
        grow += 1
        if grow > 20:
            raise OrbitalSolveError(f"no upper energy bracket for l={l}")
        jump, nodes, m = kernels.numerov_match(trap.x0, trap.dx, npts, l, trap.lam, hi, y)

    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        jump, nodes, m = kernels.numerov_match(trap.x0, trap.dx, npts, l, trap.lam, mid, y)
        if m < 0:
            lo = mid
        elif nodes > 0 or jump > 0:
            hi = mid
        else:
            lo = mid

    energy = 0.5 * (lo + hi)
    jump, nodes, m = kernels.numerov_match(trap.x0, trap.dx, npts, l, trap.lam, energy, y)
    if m < 0 or nodes:
        raise OrbitalSolveError(f"bisection for l={l} ended outside the nodeless branch")
    r = trap.radii()
    peak = np.argmax(np.abs(y))
    if abs(y[-2]) > 1e-10 * abs(y[peak]):
        raise OrbitalSolveError(
            f"orbital l={l} has not decayed by r_max={trap.r_max}; enlarge the grid"
        )
    if y[peak] < 0:
        y = -y
    norm = np.trapezoid(y * y * r * r, dx=trap.dx)
    return energy, y / math.sqrt(norm)


@dataclass(frozen=True, eq=False)
class OrbitalSet:
    trap: TrapConfig
    energies: np.ndarray
    profiles: np.ndarray = field(repr=False)

    @property
    def l_max(self) -> int:
        return len(self.energies) - 1

    @property
    def radii(self) -> np.ndarray:
        return self.trap.radii()

    def contact_overlap(self, i, j, k, l, stride=1) -> float:
        """int r R_i R_j R_k R_l dr (trapezoid in ln r), i.e. the element at closed-form scale."""
        r = self.radii[::stride]
        prod = (
            self.profiles[i, ::stride]
            * self.profiles[j, ::stride]
            * self.profiles[k, ::stride]
            * self.profiles[l, ::stride]
        )
        return float(np.trapezoid(prod * r * r, dx=self.trap.dx * stride))

    def norms(self) -> np.ndarray:
        r = self.radii
        return np.trapezoid(self.profiles**2 * r * r, dx=self.trap.dx, axis=1)

    def interpolated_radial(self, l, r):
        splines = self.__dict__.setdefault("_splines", {})
        if l not in splines:
            splines[l] = CubicSpline(np.log(self.radii), self.profiles[l])
        r = np.asarray(r)
        out = np.zeros_like(r, dtype=float)
        inside = (r >= self.trap.r_min) & (r <= self.trap.r_max)
        out[inside] = splines[l](np.log(r[inside]))
        return out

    def dump_csv(self, path, every=100):
        r = self.radii
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["l", "epsilon", "r", "R"])
            for l, eps in enumerate(self.energies):
                for n in range(0, len(r), every):
                    writer.writerow([l, f"{eps:.12g}", f"{r[n]:.12g}", f"{self.profiles[l, n]:.12g}"])


def build_orbital_set(l_max: int, trap: TrapConfig) -> OrbitalSet:
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    energies = np.empty(l_max + 1)
    profiles = np.empty((l_max + 1, trap.npts))
    for l in range(l_max + 1):
        energies[l], profiles[l] = solve_orbital(l, trap)
    energies.setflags(write=False)
    profiles.setflags(write=False)
    return OrbitalSet(trap, energies, profiles)
