"""Cauchy transforms, Plemelj boundary values and related checks.

Conventions: kernel 1/(zeta - z), curves oriented so the "+" side lies to
the left (the interior of a counterclockwise circle, the upper half-plane
for a left-to-right real segment), and jump F+ - F- = chi * f.

Boundary values at a curve parameter s0 use singularity subtraction:

    P(z0) = 1/(2 pi i) int (chi f(zeta) - c) / (zeta - z0) dzeta
            + c/(2 pi i) PV int dzeta / (zeta - z0),     c = chi(s0) f(s0)
    F+-(z0) = P(z0) +- c/2

The density is only known at the nodes, so f(s0) is reconstructed by local
6-point Lagrange interpolation in the parameter; the jump residual therefore
measures how well the sampled data determine the boundary values.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NearSingularityError
from .geometry import CutoffWindow, SampledCurve, as_point, wrap_angle

STENCIL = 6


@dataclass(frozen=True)
class BoundaryFunction:
    """Density samples at the nodes of a curve.

    ``rule`` is the generating function when known; it is used only as the
    reference value in jump residuals.
    """

    samples: np.ndarray
    rule: Callable | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("boundary samples must be finite")

    @classmethod
    def from_rule(cls, curve: SampledCurve, rule: Callable) -> "BoundaryFunction":
        return cls(np.asarray(rule(curve.nodes), dtype=complex) * np.ones(len(curve)), rule)

    def check(self, curve: SampledCurve) -> None:
        if len(self.samples) != len(curve):
            raise DomainError(f"{len(self.samples)} samples for a curve with {len(curve)} nodes")


def _chi_at(chi: CutoffWindow | None, s):
    if chi is None:
        return np.ones_like(np.asarray(s, dtype=float))
    return np.asarray(chi(s), dtype=float)


def cauchy_transform(curve: SampledCurve, chi: CutoffWindow | None, f: BoundaryFunction, z) -> complex:
    """Trapezoid approximation of 1/(2 pi i) int chi f / (zeta - z) dzeta for z off the curve."""
    f.check(curve)
    z = as_point(z)
    d = np.abs(curve.nodes - z)
    j = int(np.argmin(d))
    if d[j] <= curve.spacing()[j]:
        raise NearSingularityError(
            f"z={z!r} lies within one node spacing of the curve; use plemelj_boundary_values")
    dens = _chi_at(chi, curve.params) * f.samples
    s = np.sum(curve.weights * dens * curve.tangents / (curve.nodes - z))
    return complex(s / (2j * math.pi))


def _lagrange(x: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    # values and derivatives of the Lagrange basis on nodes x at s
    p = len(x)
    w = np.ones(p)
    dw = np.zeros(p)
    for a in range(p):
        others = [b for b in range(p) if b != a]
        denom = np.prod([x[a] - x[b] for b in others])
        w[a] = np.prod([s - x[b] for b in others]) / denom
        acc = 0.0
        for m in others:
            acc += np.prod([s - x[b] for b in others if b != m])
        dw[a] = acc / denom
    return w, dw


def _stencil(curve: SampledCurve, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Node indices and (unwrapped) parameters of the interpolation stencil around s."""
    n = len(curve)
    params = curve.params
    if curve.closed:
        j0 = int(np.searchsorted(params, s, side="right")) - 1
        k = np.arange(j0 - STENCIL // 2 + 1, j0 + STENCIL // 2 + 1)
        idx = k % n
        x = params[idx] + curve.period * np.floor_divide(k, n)
        return idx, x
    j0 = int(np.searchsorted(params, s, side="right")) - 1
    start = min(max(j0 - STENCIL // 2 + 1, 0), n - STENCIL)
    idx = np.arange(start, start + STENCIL)
    return idx, params[idx]


def interpolate_density(curve: SampledCurve, samples: np.ndarray, s: float) -> tuple[complex, complex]:
    """Local Lagrange reconstruction of a sampled density and its parameter derivative."""
    idx, x = _stencil(curve, s)
    w, dw = _lagrange(x, s)
    y = samples[idx]
    return complex(np.dot(w, y)), complex(np.dot(dw, y))


def _reduce_param(curve: SampledCurve, s: float) -> float:
    if curve.closed:
        s0 = curve.params[0]
        return s0 + (s - s0) % curve.period
    if not curve.params[0] <= s <= curve.params[-1]:
        raise DomainError(f"parameter {s!r} outside the arc")
    return s


def _pv_log_integral(curve: SampledCurve, z0: complex, tangent: complex) -> complex:
    """PV int dzeta/(zeta - z0) over the whole curve, z0 on the curve."""
    if curve.closed:
        return 1j * math.pi
    a, b = curve.nodes[0], curve.nodes[-1]
    re = math.log(abs(b - z0)) - math.log(abs(a - z0))
    # turning of (zeta - z0) along [a, z0) and (z0, b], excluding the half-turn at z0
    im = (wrap_angle(cmath.phase(-tangent) - cmath.phase(a - z0))
          + wrap_angle(cmath.phase(b - z0) - cmath.phase(tangent)))
    return complex(re, im)


def _check_plateau(curve: SampledCurve, chi: CutoffWindow | None, s: float) -> None:
    if chi is None:
        if not curve.closed:
            raise DomainError("an open arc needs a cutoff window; endpoint singularities are not handled")
        return
    if not chi.on_plateau(s):
        raise DomainError(f"parameter {s!r} is outside the cutoff plateau "
                          f"[{chi.center - chi.inner_radius}, {chi.center + chi.inner_radius}]")


def plemelj_boundary_values(curve: SampledCurve, chi: CutoffWindow | None, f: BoundaryFunction,
                            param: float) -> tuple[complex, complex]:
    """One-sided limits (F+, F-) of the Cauchy transform at curve parameter ``param``."""
    f.check(curve)
    _check_plateau(curve, chi, param)
    s = _reduce_param(curve, float(param))
    z0 = complex(curve.point_at(s))
    tangent = complex(curve.tangent_at(s))
    chi0 = float(_chi_at(chi, s))

    scale = curve.period if curve.closed else curve.params[-1] - curve.params[0]
    hit = np.flatnonzero(np.abs(curve.params - s) <= 1e-12 * scale)
    fval, fder = interpolate_density(curve, f.samples, s)
    if hit.size:
        fval = complex(f.samples[hit[0]])
    c = chi0 * fval

    dens = _chi_at(chi, curve.params) * f.samples
    diff = curve.nodes - z0
    g = np.empty(len(curve), dtype=complex)
    ok = np.ones(len(curve), dtype=bool)
    ok[hit] = False
    g[ok] = (dens[ok] - c) * curve.tangents[ok] / diff[ok]
    # removable singularity: limit is d(chi f)/ds, chi flat on the plateau
    g[~ok] = chi0 * fder
    reg = np.sum(curve.weights * g) / (2j * math.pi)

    pv = reg + c * _pv_log_integral(curve, z0, tangent) / (2j * math.pi)
    return complex(pv + 0.5 * c), complex(pv - 0.5 * c)


@dataclass(frozen=True)
class JumpReport:
    evaluation_points: np.ndarray
    plus_values: np.ndarray
    minus_values: np.ndarray
    jump_residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.jump_residuals)) if len(self.jump_residuals) else 0.0

    def rows(self):
        for s, p, m, r in zip(self.evaluation_points, self.plus_values, self.minus_values,
                              self.jump_residuals):
            yield (s, p.real, p.imag, m.real, m.imag, r)

    def write_csv(self, fh) -> None:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["param", "re_plus", "im_plus", "re_minus", "im_minus", "residual"])
        for row in self.rows():
            wr.writerow([format(float(v), ".17g") for v in row])


def jump_residual(curve: SampledCurve, chi: CutoffWindow | None, f: BoundaryFunction,
                  points: Sequence[float]) -> JumpReport:
    """Residuals |F+ - F- - chi f| at the given curve parameters."""
    pts = np.asarray(points, dtype=float)
    plus = np.empty(len(pts), dtype=complex)
    minus = np.empty(len(pts), dtype=complex)
    res = np.empty(len(pts))
    for k, s in enumerate(pts):
        plus[k], minus[k] = plemelj_boundary_values(curve, chi, f, s)
        sr = _reduce_param(curve, s)
        if f.rule is not None:
            ref = complex(f.rule(complex(curve.point_at(sr))))
        else:
            ref = interpolate_density(curve, f.samples, sr)[0]
        res[k] = abs(plus[k] - minus[k] - float(_chi_at(chi, sr)) * ref)
    return JumpReport(pts, plus, minus, res)


class Extension(str, Enum):
    INSIDE_ONLY = "inside_only"
    OUTSIDE_ONLY = "outside_only"
    BOTH = "both"
    NEITHER = "neither"


def laurent_coefficients(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(k, c_k) with f(theta) = sum c_k e^{ik theta}, k in [-N/2, N/2)."""
    samples = np.asarray(samples, dtype=complex)
    n = len(samples)
    c = np.fft.fft(samples) / n
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    order = np.argsort(k)
    return k[order], c[order]


def extension_classify(samples: np.ndarray, tol: float) -> Extension:
    """Decide from uniform unit-circle samples which sides f extends holomorphically to.

    Inside needs no negative modes; outside (bounded at infinity) needs no
    positive modes. The Nyquist mode counts on both sides.
    """
    n = len(samples)
    if n < 64 or n & (n - 1):
        raise DomainError(f"sample count must be a power of two >= 64, got {n}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    k, c = laurent_coefficients(samples)
    mag = np.abs(c)
    top = mag.max()
    if top == 0:
        return Extension.BOTH
    nyq = mag[k == -n // 2].max()
    neg = max(mag[k < 0].max(), nyq)
    pos = max(mag[k > 0].max(), nyq)
    inside = neg <= tol * top
    outside = pos <= tol * top
    if inside and outside:
        return Extension.BOTH
    if inside:
        return Extension.INSIDE_ONLY
    if outside:
        return Extension.OUTSIDE_ONLY
    return Extension.NEITHER


def morera_loop_integral(G: Callable[[complex], complex], loop: SampledCurve) -> float:
    """|closed-loop integral of G(c) dc| by the trapezoid rule."""
    vals = np.empty(len(loop), dtype=complex)
    for j, c in enumerate(loop.nodes):
        try:
            vals[j] = complex(G(complex(c)))
        except ZeroDivisionError:
            vals[j] = complex("nan")
    if not np.all(np.isfinite(vals)):
        bad = loop.nodes[~np.isfinite(vals)][0]
        raise DomainError(f"G is not finite at c={bad!r}")
    return float(abs(np.sum(loop.weights * vals * loop.tangents)))
