"""Command-line front end.

Subcommands: components, plemelj, series, morera, region-mask. Parameters
come from flags, optionally seeded from a JSON file (``--config``) whose keys
mirror the flag names; flags win. Exit codes: 0 success, 2 assertion
failure, 64 usage error, 65 domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .errors import DomainError, LogOverflowError
from .foliation import SectorAngles, labeled_region
from .geometry import (CutoffWindow, PolarGrid, make_circle, make_segment,
                       mask_to_pgm_bytes)
from .plemelj import BoundaryFunction, jump_residual, morera_loop_integral
from .series import (family_by_name, growth_fit, norm_table, radius_estimate,
                     root_moduli)

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 64, 65


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    command: str
    n: list = field(default_factory=lambda: [1])
    eps: list = field(default_factory=lambda: [0.05])
    sweep_eps: list | None = None
    delta: float = 0.9
    res: int = 1600
    res_t: int | None = None
    res_theta: int | None = None
    t_min: float = 1e-4
    assert_paper: bool = False
    pgm: bool = False
    labels: bool = False
    svg: bool = False
    preset: str = "circle-poly"
    nodes: int = 4096
    points: int = 32
    tol: float | None = None
    family: str = "a"
    at: list = field(default_factory=list)
    N: int = 12
    real_axis: str | None = None
    imag_axis: str | None = None
    samples: int = 1001
    check_bounds: bool = False
    W: list = field(default_factory=list)
    function: str = "square"
    radius: float = 1.0
    out: str | None = None

    def validate(self) -> None:
        if any(k < 1 for k in self.n):
            raise UsageError("--n must be >= 1")
        for e in self.eps + (self.sweep_eps or []):
            if not (e > 0 and math.isfinite(e)):
                raise UsageError("--eps values must be positive")
        if not self.delta > 0:
            raise UsageError("--delta must be positive")
        if not 0 < self.t_min < self.delta:
            raise UsageError("--t-min must lie in (0, delta)")
        for r in (self.res, self.res_t, self.res_theta):
            if r is not None and r < 2:
                raise UsageError("grid resolution must be >= 2")
        if self.nodes < 8:
            raise UsageError("--nodes must be >= 8")
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if self.preset not in PRESETS:
            raise UsageError(f"unknown preset {self.preset!r}")
        if self.family not in ("a", "b"):
            raise UsageError("--family must be a or b")
        if self.N < 4:
            raise UsageError("--N must be >= 4")
        if self.samples < 2:
            raise UsageError("--samples must be >= 2")
        if self.function not in MORERA_FUNCTIONS:
            raise UsageError(f"unknown function {self.function!r}")
        if not self.radius > 0:
            raise UsageError("--radius must be positive")

    @property
    def grid(self) -> PolarGrid:
        return PolarGrid.log_polar(self.res_t or self.res, self.res_theta or self.res,
                                   self.delta, self.t_min)


def parse_complex(text: str) -> complex:
    s = str(text).strip().replace(" ", "").replace("i", "j")
    # bare unit: "j", "-j", "1+j"
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_range(text: str) -> tuple[float, float]:
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*\.\.\s*([-+0-9.eE]+)\s*", str(text))
    if not m:
        raise UsageError(f"expected a range like -5..5, got {text!r}")
    a, b = float(m.group(1)), float(m.group(2))
    if not a < b:
        raise UsageError(f"empty range {text!r}")
    return a, b


def _list(conv):
    def parse(text):
        if isinstance(text, (list, tuple)):
            return [conv(x) for x in text]
        return [conv(x) for x in str(text).split(",") if x.strip()]
    return parse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leviflat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file with default parameters")
        sp.add_argument("--out", help="output path prefix (default: CSV to stdout)")

    def grid_args(sp):
        sp.add_argument("--n", type=str, help="n or comma list")
        sp.add_argument("--eps", type=str, help="eps or comma list")
        sp.add_argument("--delta", type=float)
        sp.add_argument("--res", type=int, help="grid cells per axis")
        sp.add_argument("--res-t", type=int)
        sp.add_argument("--res-theta", type=int)
        sp.add_argument("--t-min", type=float)

    sp = sub.add_parser("components", help="count components of H_{n,eps}")
    common(sp)
    grid_args(sp)
    sp.add_argument("--sweep-eps", type=str, help="comma list of eps (overrides --eps)")
    sp.add_argument("--assert-paper", action="store_true", default=None,
                    help="exit 2 unless every count equals n")
    sp.add_argument("--pgm", action="store_true", default=None, help="also write occupancy masks")

    sp = sub.add_parser("region-mask", help="write the region mask as PGM (and SVG)")
    common(sp)
    grid_args(sp)
    sp.add_argument("--labels", action="store_true", default=None, help="write labels instead of occupancy")
    sp.add_argument("--svg", action="store_true", default=None, help="SVG overlay with sector rays")

    sp = sub.add_parser("plemelj", help="jump residuals of Plemelj boundary values")
    common(sp)
    sp.add_argument("--preset", choices=sorted(PRESETS))
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--points", type=int)
    sp.add_argument("--tol", type=float, help="exit 2 if the max residual exceeds this")

    sp = sub.add_parser("series", help="coefficient tables and radius estimates")
    common(sp)
    sp.add_argument("--family", choices=["a", "b"])
    sp.add_argument("--at", type=str, help="comma list of complex points, e.g. 0.5i")
    sp.add_argument("--N", type=int)
    sp.add_argument("--real-axis", type=str, help="range a..b sampled on the real axis")
    sp.add_argument("--imag-axis", type=str, help="range a..b sampled on the imaginary axis")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--check-bounds", action="store_true", default=None)
    sp.add_argument("--W", type=str, help="comma list of points forming W for the growth fit")

    sp = sub.add_parser("morera", help="closed-loop integral of a preset function")
    common(sp)
    sp.add_argument("--function", choices=sorted(MORERA_FUNCTIONS))
    sp.add_argument("--radius", type=float)
    sp.add_argument("--nodes", type=int)
    return p


_CONVERTERS = {
    "n": _list(int), "eps": _list(float), "sweep_eps": _list(float),
    "at": _list(parse_complex), "W": _list(parse_complex),
}


_NEG_VALUE = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--real-axis -5..5" -> "--real-axis=-5..5"; argparse would read -5..5 as a flag
    out = []
    for tok in argv:
        if out and _NEG_VALUE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def make_config(argv: Sequence[str] | None = None) -> RunConfig:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    args = vars(build_parser().parse_args(argv))
    merged = {}
    if args.get("config"):
        try:
            with open(args["config"]) as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        merged.update({k.replace("-", "_"): v for k, v in raw.items()})
    merged.update({k: v for k, v in args.items() if v is not None and k != "config"})
    names = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - names
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    try:
        for key, conv in _CONVERTERS.items():
            if key in merged:
                merged[key] = conv(merged[key])
        cfg = RunConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


class _Outputs:
    """Collects named outputs; files under the prefix, or stdout when no prefix."""

    def __init__(self, prefix):
        self.prefix = prefix

    def text(self, name: str, content: str) -> None:
        if self.prefix is None:
            sys.stdout.write(content)
        else:
            with open(self.prefix + name, "w", newline="") as fh:
                fh.write(content)

    def binary(self, name: str, content: bytes) -> None:
        # binary artifacts need a destination
        if self.prefix is not None:
            with open(self.prefix + name, "wb") as fh:
                fh.write(content)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    return buf.getvalue()


def cmd_components(cfg: RunConfig) -> int:
    out = _Outputs(cfg.out)
    grid = cfg.grid
    eps_list = cfg.sweep_eps or cfg.eps
    rows, failed = [], False
    for n in cfg.n:
        for eps in eps_list:
            mask, count = labeled_region(n, eps, cfg.delta, grid)
            rows.append((n, eps, cfg.delta, grid.shape[0], grid.shape[1], count))
            failed |= count != n
            if cfg.pgm:
                out.binary(f"mask_n{n}_eps{fmt(eps)}.pgm", mask_to_pgm_bytes(mask))
    out.text("components.csv", _csv(["n", "eps", "delta", "grid_t", "grid_theta", "components"], rows))
    if cfg.assert_paper and failed:
        print("assertion failed: component count differs from n", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def sector_svg(mask, n: int) -> str:
    """Mask drawn as row runs, with the rays alpha_k, beta_k, mu_k as vertical lines."""
    h, w = mask.occupancy.shape
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
             f'<rect width="{w}" height="{h}" fill="black"/>']
    for i in range(h):
        row = np.concatenate([[0], mask.occupancy[i].astype(np.int8), [0]])
        edges = np.flatnonzero(np.diff(row))
        for a, b in zip(edges[::2], edges[1::2]):
            parts.append(f'<rect x="{a}" y="{h - 1 - i}" width="{b - a}" height="1" fill="white"/>')
    ang = SectorAngles.for_n(n)
    for name, vals, colour in (("alpha", ang.alphas, "red"), ("beta", ang.betas, "blue"),
                               ("mu", ang.mus, "lime")):
        for k, th in enumerate(vals):
            x = th / math.pi * w
            parts.append(f'<line x1="{x:.6f}" y1="0" x2="{x:.6f}" y2="{h}" stroke="{colour}" '
                         f'stroke-width="1"><title>{name}_{k}</title></line>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def cmd_region_mask(cfg: RunConfig) -> int:
    if cfg.out is None:
        raise UsageError("region-mask needs --out")
    out = _Outputs(cfg.out)
    grid = cfg.grid
    rows = []
    for n in cfg.n:
        for eps in cfg.eps:
            mask, count = labeled_region(n, eps, cfg.delta, grid)
            out.binary(f"region_n{n}_eps{fmt(eps)}.pgm", mask_to_pgm_bytes(mask, use_labels=cfg.labels))
            if cfg.svg:
                out.text(f"region_n{n}_eps{fmt(eps)}.svg", sector_svg(mask, n))
            rows.append((n, eps, cfg.delta, grid.shape[0], grid.shape[1], count))
    out.text("components.csv", _csv(["n", "eps", "delta", "grid_t", "grid_theta", "components"], rows))
    return EXIT_OK


def _poly(z):
    return 1 + 2 * z - z ** 3 + 0.5 * z ** 8


PRESETS = {
    "circle-poly": ("circle", _poly),
    "circle-inv": ("circle", lambda z: 1 / z),
    "circle-exp": ("circle", np.exp),
    "arc-bump": ("arc", lambda z: np.ones_like(z)),
    "zero": ("circle", lambda z: np.zeros_like(z)),
}

ARC_WINDOW = CutoffWindow(0.0, 0.4, 0.8)
_GOLDEN = (math.sqrt(5) - 1) / 2


def preset_setup(preset: str, nodes: int, points: int):
    """Curve, cutoff, density and evaluation parameters for a preset."""
    kind, rule = PRESETS[preset]
    if kind == "circle":
        curve = make_circle(1.0, nodes)
        chi = None
        # irrational offset keeps evaluation points off the nodes
        params = 2 * math.pi * (np.arange(points) + _GOLDEN) / points
    else:
        curve = make_segment(-1.0, 1.0, nodes)
        chi = ARC_WINDOW
        params = np.linspace(-ARC_WINDOW.inner_radius, ARC_WINDOW.inner_radius, points)
    return curve, chi, BoundaryFunction.from_rule(curve, rule), params


def cmd_plemelj(cfg: RunConfig) -> int:
    out = _Outputs(cfg.out)
    curve, chi, f, params = preset_setup(cfg.preset, cfg.nodes, cfg.points)
    report = jump_residual(curve, chi, f, params)
    buf = io.StringIO()
    report.write_csv(buf)
    out.text(f"plemelj_{cfg.preset}.csv", buf.getvalue())

    conv = []
    m = 64
    while m <= cfg.nodes:
        c, x, g, p = preset_setup(cfg.preset, m, cfg.points)
        conv.append((m, jump_residual(c, x, g, p).max_residual))
        m *= 2
    if cfg.out is not None:
        out.text(f"plemelj_{cfg.preset}_convergence.csv", _csv(["nodes", "max_residual"], conv))
    print(f"preset={cfg.preset} nodes={cfg.nodes} max_residual={fmt(report.max_residual)}",
          file=sys.stderr if cfg.out is None else sys.stdout)
    if cfg.tol is not None and report.max_residual > cfg.tol:
        return EXIT_ASSERT
    return EXIT_OK


def _axis_points(cfg: RunConfig) -> list[complex]:
    pts = []
    if cfg.real_axis:
        a, b = parse_range(cfg.real_axis)
        pts += [complex(u, 0.0) for u in np.linspace(a, b, cfg.samples)]
    if cfg.imag_axis:
        a, b = parse_range(cfg.imag_axis)
        pts += [complex(0.0, v) for v in np.linspace(a, b, cfg.samples)]
    return pts


def cmd_series(cfg: RunConfig) -> int:
    out = _Outputs(cfg.out)
    family = family_by_name(cfg.family)
    status = EXIT_OK
    log = sys.stderr if cfg.out is None else sys.stdout

    for idx, w in enumerate(cfg.at):
        rows = root_moduli(family, w, range(1, cfg.N + 1))
        name = "series_radius.csv" if len(cfg.at) == 1 else f"series_radius_{idx}.csv"
        out.text(name, _csv(["n", "logmag", "root_n_modulus"], rows))
        for N in range(4, cfg.N + 1):
            r = radius_estimate(family, w, N)
            print(f"at={fmt(w.real)}{w.imag:+.17g}i N={N} radius_estimate={fmt(r)}", file=log)

    pts = _axis_points(cfg)
    if pts:
        rows = []
        bad = 0
        for n in range(1, cfg.N + 1):
            for w in pts:
                v = family.eval(n, w)
                rows.append((cfg.family, n, w.real, w.imag, v.logmag, v.arg))
                if cfg.check_bounds and w.imag == 0:
                    bad += _bound_violation(cfg.family, v)
        out.text("series_axis.csv", _csv(["family", "n", "re_w", "im_w", "logmag", "arg"], rows))
        if cfg.check_bounds:
            print(f"bound_violations={bad}", file=log)
            if bad:
                status = EXIT_ASSERT
        if cfg.family == "b" and cfg.imag_axis:
            _report_strong_bound(cfg, log)

    if cfg.W:
        gamma = [complex(u, 0.0) for u in np.linspace(-1.0, 1.0, 201)]
        fit = growth_fit(norm_table(family, gamma, cfg.W, range(1, cfg.N + 1)))
        print(f"growth_fit C_estimate={fmt(fit.C_estimate)} trend={fit.trend}", file=log)
    return status


def _bound_violation(family: str, v) -> int:
    if family == "a":
        return int(v.logmag > 1e-12)
    z = v.to_complex()
    return int(abs(z) > math.sqrt(2) * (1 + 1e-12) or abs(z.imag) > 1e-12 * max(abs(z), 1e-300))


def _report_strong_bound(cfg: RunConfig, log) -> None:
    """Empirical check of |b_n(iv)| >= |a_n(iv)| / sqrt(2) on the sampled v in (0, 1)."""
    a, b = parse_range(cfg.imag_axis)
    fa, fb = family_by_name("a"), family_by_name("b")
    checked = held = 0
    for v in np.linspace(a, b, cfg.samples):
        if not 0 < v < 1:
            continue
        for n in range(1, cfg.N + 1):
            checked += 1
            held += fb.eval(n, 1j * v).logmag >= fa.eval(n, 1j * v).logmag - 0.5 * math.log(2) - 1e-12
    print(f"strong_lower_bound held={held} checked={checked}", file=log)


MORERA_FUNCTIONS = {
    "square": lambda c: c * c,
    "conj": lambda c: c.conjugate(),
    "pole2": lambda c: 1 / (c - 2),
    "exp": np.exp,
}


def cmd_morera(cfg: RunConfig) -> int:
    loop = make_circle(cfg.radius, cfg.nodes)
    val = morera_loop_integral(MORERA_FUNCTIONS[cfg.function], loop)
    _Outputs(cfg.out).text("morera.csv", _csv(["function", "radius", "nodes", "loop_integral"],
                                              [(cfg.function, cfg.radius, cfg.nodes, val)]))
    return EXIT_OK


COMMANDS = {
    "components": cmd_components,
    "region-mask": cmd_region_mask,
    "plemelj": cmd_plemelj,
    "series": cmd_series,
    "morera": cmd_morera,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = make_config(argv)
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"leviflat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"leviflat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, LogOverflowError, ZeroDivisionError) as exc:
        print(f"leviflat: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
