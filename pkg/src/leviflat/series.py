"""Coefficient families a_n, b_n and their convergence diagnostics.

``a_n(w) = (i/(w - i))**(n*n)`` is bounded by 1 on the real axis but blows
up like ``(1 - v)**(-n*n)`` on the segment ``w = iv``, so the power series
with these coefficients has zero radius of convergence there. ``b_n`` is the
real-valued modification. All magnitudes are carried as LogComplex.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DomainError, SingularPointError
from .geometry import LogComplex, ZERO, as_point

I = 1j
_HALF_MINUS_I = LogComplex.from_complex(0.5 - 0.5j)
_HALF_PLUS_I = LogComplex.from_complex(0.5 + 0.5j)


def eval_a(n: int, w) -> LogComplex:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    w = as_point(w)
    if n == 0:
        return LogComplex.from_complex(w)
    if w == I:
        raise SingularPointError(w, "a_n has a pole at w = i")
    base = LogComplex.from_complex(I / (w - I))
    return base ** (n * n)


def eval_b(n: int, w) -> LogComplex:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    w = as_point(w)
    if w == I or w == -I:
        raise SingularPointError(w, "b_n has poles at w = +i and w = -i")
    if w.imag == 0:
        # a(-u) = conj a(u), so b(u) = Re a + Im a = sqrt2 |a| sin(arg a + pi/4), exactly real
        a = eval_a(n, w)
        s = math.sin(a.arg + math.pi / 4)
        if s == 0 or a.is_zero:
            return ZERO
        return LogComplex.from_log(a.logmag + math.log(math.sqrt(2) * abs(s)), 0.0 if s > 0 else math.pi)
    # 1/2 (a(w) + a(-w)) - i/2 (a(w) - a(-w)) = a(w)(1-i)/2 + a(-w)(1+i)/2
    return eval_a(n, w) * _HALF_MINUS_I + eval_a(n, -w) * _HALF_PLUS_I


@dataclass(frozen=True)
class CoefficientFamily:
    """Rule n -> (w -> LogComplex) with a finite set of excluded points."""

    rule: Callable[[int, complex], LogComplex]
    singular_points: tuple = ()
    name: str = ""

    def eval(self, n: int, w) -> LogComplex:
        w = as_point(w)
        if w in self.singular_points:
            raise SingularPointError(w, f"{self.name or 'family'} is singular at {w!r}")
        return self.rule(n, w)

    __call__ = eval


def _b_rule(n: int, w: complex) -> LogComplex:
    # b_0 mirrors a_0(w) = w
    return eval_b(n, w) if n else LogComplex.from_complex(w)


FAMILY_A = CoefficientFamily(eval_a, (I,), "a")
FAMILY_B = CoefficientFamily(_b_rule, (I, -I), "b")


def geometric_family(ratio: complex) -> CoefficientFamily:
    """a_n = ratio**n, independent of the point."""
    base = LogComplex.from_complex(ratio)
    return CoefficientFamily(lambda n, w: base ** n if n else LogComplex.from_complex(1.0),
                             (), f"geometric({ratio})")


def zero_tail_family() -> CoefficientFamily:
    """a_0 = 1 and a_n = 0 for n >= 1."""
    return CoefficientFamily(lambda n, w: ZERO if n else LogComplex.from_complex(1.0), (), "zero-tail")


def family_by_name(name: str) -> CoefficientFamily:
    try:
        return {"a": FAMILY_A, "b": FAMILY_B}[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}") from None


def root_moduli(family: CoefficientFamily, w, ns: Iterable[int]) -> list[tuple[int, float, float]]:
    """Rows (n, log|a_n(w)|, log|a_n(w)|/n) for n >= 1."""
    rows = []
    for n in ns:
        lm = family.eval(n, w).logmag
        rows.append((n, lm, lm / n))
    return rows


def radius_estimate(family: CoefficientFamily, w, N: int) -> float:
    """Tail-window Cauchy-Hadamard estimate 1 / max |a_n|^(1/n), n in [ceil(N/2), N].

    Returns +inf when every sampled coefficient vanishes.
    """
    if N < 4:
        raise DomainError(f"N must be >= 4, got {N}")
    lo = max(1, math.ceil(N / 2))
    best = max(lm / n for n, lm, _ in root_moduli(family, w, range(lo, N + 1)))
    if best == -math.inf:
        return math.inf
    return math.exp(-best)


@dataclass(frozen=True)
class NormTable:
    """Rows (k, sup-norm on gamma, sup-norm on W)."""

    entries: tuple

    def __post_init__(self):
        ks = [e[0] for e in self.entries]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise DomainError("k must be strictly increasing")
        for k, g, w in self.entries:
            if k < 1:
                raise DomainError(f"k must be >= 1, got {k}")
            if not (g > 0 and w > 0 and math.isfinite(g) and math.isfinite(w)):
                raise DomainError(f"norms must be positive and finite (k={k})")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["k", "norm_gamma", "norm_W"])
            for k, g, w in self.entries:
                wr.writerow([k, format(g, ".17g"), format(w, ".17g")])

    @classmethod
    def from_csv(cls, path) -> "NormTable":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(tuple((int(r["k"]), float(r["norm_gamma"]), float(r["norm_W"])) for r in rows))


def sup_log_norm(family: CoefficientFamily, k: int, points: Sequence) -> float:
    return max(family.eval(k, p).logmag for p in points)


def norm_table(family: CoefficientFamily, gamma_points: Sequence, w_points: Sequence,
               ks: Iterable[int]) -> NormTable:
    """Sampled sup norms of a_k on gamma and on W."""
    rows = []
    for k in ks:
        g = math.exp(sup_log_norm(family, k, gamma_points))
        w = math.exp(sup_log_norm(family, k, w_points))
        rows.append((k, g, w))
    return NormTable(tuple(rows))


@dataclass(frozen=True)
class GrowthFit:
    C_estimate: float
    trend: str
    ratios: tuple


def growth_fit(table: NormTable) -> GrowthFit:
    """Smallest C with ||a_k||_W <= C**k ||a_k||_gamma over the table, plus a trend flag.

    The trend is ``diverging`` when the per-k ratio (W/gamma)**(1/k) grows by
    more than a factor 2 from the first to the last row.
    """
    if not table.entries:
        raise DomainError("empty norm table")
    ratios = []
    for k, g, w in table.entries:
        if g <= 0 or w <= 0:
            raise DomainError(f"non-positive norm at k={k}")
        ratios.append(math.exp((math.log(w) - math.log(g)) / k))
    trend = "diverging" if ratios[-1] > 2.0 * ratios[0] else "bounded"
    return GrowthFit(max(ratios), trend, tuple(ratios))


def schwarz_reflect(f: Callable[[complex], complex], z, tol: float = 1e-8) -> complex:
    """Extend f from the closed upper half-plane to z (Im z < 0) by f(z) = conj f(conj z)."""
    z = as_point(z)
    if z.imag >= 0:
        raise DomainError(f"reflection target must satisfy Im z < 0, got {z!r}")
    x = z.real
    fx = complex(f(complex(x, 0.0)))
    if abs(fx.imag) > tol:
        raise DomainError(f"f is not real on the axis: Im f({x!r}) = {fx.imag!r}")
    return complex(f(z.conjugate())).conjugate()
