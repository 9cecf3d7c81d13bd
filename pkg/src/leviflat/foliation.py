"""The family S_n = union_t {w = t + g_n(t) z}, g_n(t) = exp(-1/t^(2n)).

The leaves {eta = c} of psi_n(zeta, eta) = (zeta, eta + g_n(eta) zeta) meet
the centre leaf {w = 0} at zeta* = -eta / g_n(eta). The set of eta in the
upper half-plane with |zeta*| < eps is, in polar coordinates eta = t e^{i theta},

    t * exp(cos(2 n theta) / t^(2n)) < eps,

and its number of connected components near 0 is n.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, LogOverflowError
from .geometry import LogComplex, PolarGrid, RegionMask, as_point, flood_label

_EPS = 2.0 ** -52


@dataclass(frozen=True)
class HalfPlaneFamily:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")


@dataclass(frozen=True)
class LineFamilyHypersurface:
    """Union over real t of the complex lines w = b0(t) + g(t) z."""

    b0: Callable[[float], complex]
    g: Callable[[float], complex]

    @classmethod
    def s_n(cls, n: int) -> "LineFamilyHypersurface":
        fam = HalfPlaneFamily(n)
        return cls(lambda t: complex(t), lambda t: g_n(fam, t).to_complex() if t else 0j)

    def point(self, t: float, z: complex) -> tuple[complex, complex]:
        return complex(z), self.b0(t) + self.g(t) * z


@dataclass(frozen=True)
class SectorAngles:
    alphas: np.ndarray
    betas: np.ndarray
    mus: np.ndarray

    @classmethod
    def for_n(cls, n: int) -> "SectorAngles":
        k = np.arange(n)
        return cls(math.pi / (4 * n) + k * math.pi / n,
                   3 * math.pi / (4 * n) + k * math.pi / n,
                   k * math.pi / n)


def _check_family(family) -> HalfPlaneFamily:
    return family if isinstance(family, HalfPlaneFamily) else HalfPlaneFamily(int(family))


def g_n(family, eta) -> LogComplex:
    """exp(-eta^(-2n)) on the closed upper half-plane minus the origin."""
    n = _check_family(family).n
    eta = as_point(eta)
    if eta == 0:
        raise DomainError("g_n has an essential singularity at eta = 0")
    if eta.imag < 0:
        raise DomainError(f"g_n is defined for Im eta >= 0, got {eta!r}")
    # eta^(-2n) = t^(-2n) e^{-2n i theta}
    t, theta = abs(eta), cmath.phase(eta)
    inv = cmath.rect(1.0, -2 * n * theta) * math.exp(-2 * n * math.log(t))
    return LogComplex.from_log(-inv.real, -inv.imag)


def psi(family, zeta, eta) -> tuple[complex, complex]:
    """(zeta, eta + g_n(eta) zeta)."""
    zeta, eta = as_point(zeta), as_point(eta)
    g = g_n(family, eta)
    if zeta == 0:
        return zeta, eta
    prod = g * zeta
    try:
        return zeta, eta + prod.to_complex()
    except LogOverflowError as exc:
        raise LogOverflowError(exc.logmag, f"g_n(eta)*zeta overflows: log-modulus {exc.logmag!r}") from None


def leaf_center_intersection(family, eta) -> LogComplex:
    """zeta* = -eta / g_n(eta), where the leaf {eta = const} meets {w = 0}."""
    eta = as_point(eta)
    if eta.imag <= 0:
        raise DomainError(f"need Im eta > 0, got {eta!r}")
    return -(LogComplex.from_complex(eta) / g_n(family, eta))


def cos_2n(n: int, theta):
    """cos(2 n theta), with values below the rounding noise of theta set to exactly 0.

    A double theta carries an error up to one ulp, which moves cos(2 n theta)
    by up to ~2 n pi 2^-52; anything smaller is indistinguishable from a zero
    of the cosine (the rays alpha_k, beta_k).
    """
    c = np.cos(2 * n * np.asarray(theta, dtype=float))
    tol = 4 * n * math.pi * _EPS
    c = np.where(np.abs(c) <= tol, 0.0, c)
    return c if c.ndim else float(c)


def _log_profile(n: int, t, h):
    # log(t) + h / t^(2n), with 0 * inf -> 0
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        inv = np.exp(-2 * n * np.log(t))
        term = np.where(h == 0, 0.0, h * inv)
    return np.log(t) + term


def h_membership(family, eps: float, delta: float, t: float, theta: float) -> bool:
    """True iff (t, theta) lies in the region with 0 < theta < pi and t < delta."""
    n = _check_family(family).n
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not (0 < theta < math.pi) or not t < delta:
        return False
    return bool(_log_profile(n, t, cos_2n(n, theta)) < math.log(eps))


def f_h(n: int, h: float, t):
    """Radial profile t * exp(h / t^(2n))."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    out = t * np.exp(h / t ** (2 * n))
    return out if out.ndim else float(out)


def log_f_h(n: int, h: float, t):
    """log f_h(t) = log t + h / t^(2n); stays finite where f_h underflows."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    out = _log_profile(n, t, h)
    return out if out.ndim else float(out)


def critical_t(n: int, h: float) -> float:
    """Minimiser (2 n h)^(1/(2n)) of f_h for h > 0."""
    if not h > 0:
        raise DomainError(f"critical_t needs h > 0, got {h!r}")
    return (2 * n * h) ** (1.0 / (2 * n))


def eps_threshold(n: int) -> float:
    """(2n)^(1/(2n)) e^(1/(2n)) = f_1(t(1)); below it the rays theta = mu_k miss the region."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return (2 * n) ** (1.0 / (2 * n)) * math.exp(1.0 / (2 * n))


def membership_grid(n: int, eps: float, delta: float, t_values, theta_values) -> np.ndarray:
    """Vectorised h_membership over an outer product of radii and angles."""
    t = np.asarray(t_values, dtype=float)[:, None]
    th = np.asarray(theta_values, dtype=float)[None, :]
    h = cos_2n(n, th)
    inside = (th > 0) & (th < math.pi) & (t < delta)
    with np.errstate(divide="ignore"):
        log_eps = np.log(eps)
    return inside & (_log_profile(n, t, h) < log_eps)


def build_region(family, eps: float, delta: float, grid: PolarGrid) -> RegionMask:
    fam = _check_family(family)
    if not eps > 0 or not delta > 0:
        raise DomainError("eps and delta must be positive")
    if grid.t_values[-1] > delta:
        raise DomainError("grid extends beyond delta")
    occ = membership_grid(fam.n, eps, delta, grid.t_values, grid.theta_values)
    return RegionMask(grid, occ, meta={"n": fam.n, "eps": float(eps), "delta": float(delta)})


def labeled_region(family, eps: float, delta: float, grid: PolarGrid) -> tuple[RegionMask, int]:
    return flood_label(build_region(family, eps, delta, grid))


def count_components(family, eps: float, delta: float, grid: PolarGrid) -> int:
    return labeled_region(family, eps, delta, grid)[1]


@dataclass(frozen=True)
class SectorReport:
    """Violations of the sector structure of a labeled region (all zero when it holds)."""

    components_spanning_mu: int
    mu_ray_hits: int
    ray_mismatches: int
    max_ray_offset: int

    @property
    def ok(self) -> bool:
        return self.components_spanning_mu == 0 and self.mu_ray_hits == 0 and self.ray_mismatches == 0


def sector_report(mask: RegionMask, n: int, eps: float, delta: float) -> SectorReport:
    """Check labels against the rays mu_k, alpha_k, beta_k.

    * every component's theta-range lies inside one sector (mu_k, mu_{k+1});
    * the rays theta = mu_k (k >= 1) carry no member t-values;
    * on theta = alpha_k and beta_k membership is exactly {t < eps}, allowing
      one cell of disagreement at the boundary.
    """
    if mask.labels is None:
        mask, _ = flood_label(mask)
    ang = SectorAngles.for_n(n)
    theta = mask.grid.theta_values
    t = mask.grid.t_values
    bounds = np.append(ang.mus, math.pi)
    sector_of_col = np.searchsorted(bounds, theta, side="right") - 1

    spanning = 0
    cols = np.broadcast_to(sector_of_col[None, :], mask.labels.shape)
    lab = mask.labels.ravel()
    occ = lab > 0
    if occ.any():
        sec = cols.ravel()[occ]
        lab = lab[occ]
        lo = np.full(lab.max() + 1, np.iinfo(np.int64).max)
        hi = np.full(lab.max() + 1, -1)
        np.minimum.at(lo, lab, sec)
        np.maximum.at(hi, lab, sec)
        spanning = int(np.sum(lo[1:] != hi[1:]))

    mu_hits = 0
    for mu in ang.mus[1:]:
        mu_hits += int(membership_grid(n, eps, delta, t, [mu]).sum())

    mismatches = 0
    worst = 0
    expect = (t < eps) & (t < delta)
    edge = int(np.searchsorted(t, eps))
    for ray in np.concatenate([ang.alphas, ang.betas]):
        got = membership_grid(n, eps, delta, t, [ray])[:, 0]
        bad = np.flatnonzero(got != expect)
        if bad.size == 0:
            continue
        # distance in cells from the t = eps boundary; cells edge-1 and edge count as 1
        dist = np.where(bad < edge, edge - bad, bad - edge + 1)
        worst = max(worst, int(dist.max()))
        mismatches += int(np.sum(dist > 1))
    return SectorReport(spanning, mu_hits, mismatches, worst)
