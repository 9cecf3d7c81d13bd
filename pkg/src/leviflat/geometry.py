"""Value types, curve sampling and polar-grid machinery.

Everything numeric in the package sits on top of this module: complex
values kept in the log domain, sampled plane curves with trapezoid weights,
the smooth cutoff window, and boolean masks over a polar (t, theta) grid
with 4-neighbour component labels.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import DomainError, LogOverflowError

TWO_PI = 2.0 * math.pi

# Cody-Waite split of log(2) (fdlibm constants)
LN2_HI = 6.93147180369123816490e-01
LN2_LO = 1.90821492927058770002e-10
LN2 = math.log(2.0)

# largest logmag whose exponential is still a finite double
MAX_LOGMAG = 709.782712893384


def wrap_angle(x: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    r = math.remainder(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


def as_point(z) -> complex:
    """Coerce to a finite complex number."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite point {z!r}")
    return z


def _split_log(x: float, exp2: int = 0) -> tuple[int, float]:
    # x is a log-modulus; return (k, r) with x = k*ln2 + r, |r| <= ln2/2
    k = round(x / LN2)
    r = (x - k * LN2_HI) - k * LN2_LO
    return exp2 + int(k), r


@dataclass(frozen=True)
class LogComplex:
    """Complex number stored as log-modulus and argument.

    The log-modulus is kept as ``exp2 * log(2) + frac`` with a small ``frac``
    so that conversion back to a double is exact to a few ulps over the
    whole double range. ``frac = -inf`` encodes zero.
    """

    exp2: int
    frac: float
    arg: float

    @classmethod
    def from_log(cls, logmag: float, arg: float = 0.0) -> "LogComplex":
        if logmag == -math.inf:
            return ZERO
        if not math.isfinite(logmag) or not math.isfinite(arg):
            raise DomainError(f"non-finite log value ({logmag!r}, {arg!r})")
        k, r = _split_log(logmag)
        return cls(k, r, wrap_angle(arg))

    @classmethod
    def from_complex(cls, z) -> "LogComplex":
        z = as_point(z)
        if z == 0:
            return ZERO
        s = max(abs(z.real), abs(z.imag))
        _, e = math.frexp(s)
        r = math.hypot(math.ldexp(z.real, -e), math.ldexp(z.imag, -e))
        arg = math.atan2(z.imag, z.real)
        if arg == -math.pi:
            arg = math.pi
        return cls(e, math.log(r), arg)

    @property
    def is_zero(self) -> bool:
        return self.frac == -math.inf

    @property
    def logmag(self) -> float:
        if self.is_zero:
            return -math.inf
        return self.exp2 * LN2 + self.frac

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        if self.logmag > MAX_LOGMAG:
            raise LogOverflowError(self.logmag)
        try:
            mag = math.ldexp(math.exp(self.frac), self.exp2)
        except OverflowError:
            raise LogOverflowError(self.logmag) from None
        return complex(mag * math.cos(self.arg), mag * math.sin(self.arg))

    def modulus(self) -> float:
        return abs(self.to_complex())

    def __complex__(self) -> complex:
        return self.to_complex()

    def __mul__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if self.is_zero or other.is_zero:
            return ZERO
        k, r = _split_log(self.frac + other.frac, self.exp2 + other.exp2)
        return LogComplex(k, r, wrap_angle(self.arg + other.arg))

    __rmul__ = __mul__

    def reciprocal(self) -> "LogComplex":
        if self.is_zero:
            raise ZeroDivisionError("reciprocal of zero")
        return LogComplex(-self.exp2, -self.frac, wrap_angle(-self.arg))

    def __truediv__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return self * other.reciprocal()

    def __pow__(self, p) -> "LogComplex":
        if self.is_zero:
            if p > 0:
                return ZERO
            raise ZeroDivisionError("non-positive power of zero")
        if isinstance(p, int):
            k, r = _split_log(p * self.frac, p * self.exp2)
        else:
            k, r = _split_log(p * self.logmag)
        return LogComplex(k, r, wrap_angle(p * self.arg))

    def __neg__(self) -> "LogComplex":
        if self.is_zero:
            return ZERO
        return LogComplex(self.exp2, self.frac, wrap_angle(self.arg + math.pi))

    def conjugate(self) -> "LogComplex":
        if self.is_zero:
            return ZERO
        arg = -self.arg if self.arg != math.pi else math.pi
        return LogComplex(self.exp2, self.frac, arg)

    def __add__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        big, small = (self, other) if self.logmag >= other.logmag else (other, self)
        dlog = (small.exp2 - big.exp2) * LN2 + (small.frac - big.frac)
        ratio = cmath.rect(math.exp(dlog), small.arg - big.arg) if dlog > -800 else 0j
        s = 1.0 + ratio
        if s == 0:
            return ZERO
        return big * LogComplex.from_complex(s)

    __radd__ = __add__

    def __sub__(self, other) -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return self + (-other)

    def __repr__(self) -> str:
        return f"LogComplex(logmag={self.logmag!r}, arg={self.arg!r})"


ZERO = LogComplex(0, -math.inf, 0.0)


@dataclass(frozen=True)
class SampledCurve:
    """Oriented smooth curve sampled at increasing parameter values.

    ``tangents`` holds d(node)/d(param); ``weights`` are composite trapezoid
    weights in the parameter (uniform for closed curves, halved end weights
    for open arcs). ``point_at``/``tangent_at`` evaluate the underlying
    parametrization away from the nodes.
    """

    nodes: np.ndarray
    params: np.ndarray
    closed: bool
    tangents: np.ndarray
    weights: np.ndarray
    point_at: Callable = field(repr=False)
    tangent_at: Callable = field(repr=False)
    orientation: str = "counterclockwise"
    period: float | None = None

    def __post_init__(self):
        if len(self.nodes) != len(self.params):
            raise DomainError("nodes and params differ in length")
        if np.any(np.diff(self.params) <= 0):
            raise DomainError("params must be strictly increasing")
        if not np.all(np.isfinite(self.nodes)):
            raise DomainError("non-finite curve node")
        gaps = np.abs(np.diff(self.nodes))
        if np.any(gaps == 0) or (self.closed and self.nodes[0] == self.nodes[-1]):
            raise DomainError("curve nodes must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.nodes)

    def spacing(self) -> np.ndarray:
        """Distance from each node to its successor (wrapping for closed curves)."""
        if self.closed:
            return np.abs(np.roll(self.nodes, -1) - self.nodes)
        d = np.abs(np.diff(self.nodes))
        return np.append(d, d[-1])


def make_circle(radius: float, node_count: int, center: complex = 0j) -> SampledCurve:
    """Counterclockwise circle with equispaced parameter 2*pi*j/node_count."""
    if node_count < 8:
        raise DomainError(f"node_count must be >= 8, got {node_count}")
    if not (math.isfinite(radius) and radius > 0):
        raise DomainError(f"radius must be positive and finite, got {radius}")
    center = as_point(center)
    s = TWO_PI * np.arange(node_count) / node_count

    def point_at(t):
        return center + radius * np.exp(1j * np.asarray(t))

    def tangent_at(t):
        return 1j * radius * np.exp(1j * np.asarray(t))

    return SampledCurve(
        nodes=point_at(s),
        params=s,
        closed=True,
        tangents=tangent_at(s),
        weights=np.full(node_count, TWO_PI / node_count),
        point_at=point_at,
        tangent_at=tangent_at,
        period=TWO_PI,
    )


def make_segment(start: complex, end: complex, node_count: int) -> SampledCurve:
    """Straight open arc from ``start`` to ``end``.

    The parameter is arclength measured from the midpoint, so the real-axis
    segment [-1, 1] is parametrized by x itself.
    """
    if node_count < 8:
        raise DomainError(f"node_count must be >= 8, got {node_count}")
    start, end = as_point(start), as_point(end)
    length = abs(end - start)
    if length == 0:
        raise DomainError("degenerate segment")
    mid = 0.5 * (start + end)
    unit = (end - start) / length
    s = np.linspace(-0.5 * length, 0.5 * length, node_count)
    h = s[1] - s[0]
    w = np.full(node_count, h)
    w[0] = w[-1] = 0.5 * h

    def point_at(t):
        return mid + unit * np.asarray(t)

    def tangent_at(t):
        return unit * np.ones_like(np.asarray(t, dtype=float))

    return SampledCurve(
        nodes=point_at(s).astype(complex),
        params=s,
        closed=False,
        tangents=tangent_at(s).astype(complex),
        weights=w,
        point_at=point_at,
        tangent_at=tangent_at,
        orientation="as-parameterized",
    )


@dataclass(frozen=True)
class CutoffWindow:
    """Smooth bump in the curve parameter: 1 on the plateau, 0 outside ``outer_radius``."""

    center: float
    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise DomainError("need 0 < inner_radius < outer_radius")

    def on_plateau(self, s: float) -> bool:
        return abs(s - self.center) <= self.inner_radius

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        d = np.abs(s - self.center)
        x = np.clip((self.outer_radius - d) / (self.outer_radius - self.inner_radius), 0.0, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
            b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
        out = a / (a + b)
        out = np.where(d <= self.inner_radius, 1.0, out)
        out = np.where(d >= self.outer_radius, 0.0, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PolarGrid:
    """Cell-centred polar grid: log-spaced radii, uniform angles inside (0, pi)."""

    t_values: np.ndarray
    theta_values: np.ndarray

    def __post_init__(self):
        t, th = self.t_values, self.theta_values
        if t.ndim != 1 or th.ndim != 1 or len(t) == 0 or len(th) == 0:
            raise DomainError("grid axes must be nonempty 1-d arrays")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise DomainError("t_values must be positive and strictly increasing")
        if np.any(th <= 0) or np.any(th >= math.pi) or np.any(np.diff(th) <= 0):
            raise DomainError("theta_values must increase strictly inside (0, pi)")

    @classmethod
    def log_polar(cls, n_t: int, n_theta: int, delta: float = 0.9, t_min: float = 1e-4) -> "PolarGrid":
        if n_t < 1 or n_theta < 1:
            raise DomainError("grid sizes must be positive")
        if not 0 < t_min < delta:
            raise DomainError("need 0 < t_min < delta")
        edges = np.geomspace(t_min, delta, n_t + 1)
        t = np.sqrt(edges[:-1] * edges[1:])
        theta = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
        return cls(t, theta)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.t_values), len(self.theta_values)


@dataclass(frozen=True)
class RegionMask:
    """Occupancy over a PolarGrid, indexed (t-index, theta-index)."""

    grid: PolarGrid
    occupancy: np.ndarray
    labels: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.occupancy.shape != self.grid.shape:
            raise DomainError("occupancy shape does not match grid")
        if self.labels is not None and self.labels.shape != self.grid.shape:
            raise DomainError("labels shape does not match grid")


# 4-neighbour adjacency, no wrap-around in theta
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def flood_label(mask: RegionMask) -> tuple[RegionMask, int]:
    """Label 4-connected occupied cells.

    Components are numbered 1, 2, ... by first occurrence in a row-major scan.
    """
    occ = np.asarray(mask.occupancy, dtype=bool)
    raw, count = ndimage.label(occ, structure=_CROSS)
    labels = np.zeros(occ.shape, dtype=np.int32)
    if count:
        flat = raw.ravel()
        found, first = np.unique(flat, return_index=True)
        keep = found != 0
        found, first = found[keep], first[keep]
        remap = np.zeros(count + 1, dtype=np.int32)
        remap[found[np.argsort(first)]] = np.arange(1, len(found) + 1, dtype=np.int32)
        labels = remap[raw]
    return replace(mask, labels=labels), int(count)


def _pgm_header(width: int, height: int, meta: dict) -> bytes:
    parts = [f"{k}={_fmt(v)}" for k, v in meta.items()]
    parts.append(f"grid={height}x{width}")
    return f"P5\n# {' '.join(parts)}\n{width} {height}\n255\n".encode("ascii")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def mask_to_pgm_bytes(mask: RegionMask, use_labels: bool = False) -> bytes:
    """Binary PGM: rows are t-indices, columns theta-indices."""
    if use_labels:
        if mask.labels is None:
            raise DomainError("mask has no labels; run flood_label first")
        top = int(mask.labels.max())
        pix = (mask.labels.astype(np.int64) * 255 // top) if top else np.zeros_like(mask.labels)
    else:
        pix = np.where(mask.occupancy, 255, 0)
    pix = pix.astype(np.uint8)
    h, w = pix.shape
    return _pgm_header(w, h, mask.meta) + pix.tobytes()


def write_pgm(path, mask: RegionMask, use_labels: bool = False) -> None:
    with open(path, "wb") as fh:
        fh.write(mask_to_pgm_bytes(mask, use_labels))


def read_pgm(path) -> tuple[list[str], np.ndarray]:
    """Read a P5 file written by ``write_pgm``; returns (comment lines, pixels)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise DomainError("not a binary PGM")
    comments, tokens, pos = [], [], 2
    while len(tokens) < 3:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1:end].decode("ascii").strip())
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(int(data[pos:end]))
        pos = end
    w, h, _ = tokens
    pix = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8).reshape(h, w)
    return comments, pix
