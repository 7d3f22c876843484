"""The first nontrivial curve of the Fucik spectrum.

For each s >= 0 the mountain-pass level c(s) gives the point
(s + c(s), c(s)); the curve is closed under the mirror (a, b) -> (b, a).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenResult, lambda1 as compute_lambda1
from .errors import ConfigError, ConvergenceError
from .functionals import functionals
from .mountainpass import PathOnS, default_witness, deform, initial_path

log = logging.getLogger(__name__)


@dataclass
class CurvePoint:
    s: float
    c: float
    converged: bool
    grad_norm: float = float("nan")
    iterations: int = 0

    @property
    def point(self):
        return (self.s + self.c, self.c)

    @property
    def mirror(self):
        return (self.c, self.s + self.c)


@dataclass
class FucikCurve:
    points: list
    lambda1: float
    meta: dict = field(default_factory=dict)

    def converged(self):
        return [pt for pt in self.points if pt.converged]

    def rows(self):
        """(s, c_s, a, b, converged) for each point and its mirror."""
        out = []
        for pt in self.points:
            a, b = pt.point
            out.append((pt.s, pt.c, a, b, pt.converged))
            out.append((pt.s, pt.c, b, a, pt.converged))
        return out

    def to_csv(self, header_lines=()):
        lines = [f"# {h}" for h in header_lines]
        lines.append("s,c_s,a,b,converged")
        for s, c, a, b, ok in self.rows():
            lines.append(f"{s:.6f},{c:.12e},{a:.12e},{b:.12e},{int(ok)}")
        return "\n".join(lines) + "\n"

    def to_svg(self, header_lines=()):
        return curve_svg(self, header_lines)


def sweep(s_grid, E, phi1: EigenResult | None = None, witness=None, m: int = 41,
          warm_start: bool = True, **deform_opts) -> FucikCurve:
    """c(s) for every s in ``s_grid`` (ascending, starting at 0)."""
    grid = [float(s) for s in s_grid]
    if not grid or grid[0] != 0.0:
        raise ConfigError("s_grid must start at 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("s_grid must be strictly increasing")
    if phi1 is None:
        phi1 = compute_lambda1(E)
    if witness is None:
        witness = default_witness(E)
    spec = E.mesh.spec
    meta = {"n": spec.n, "p": spec.p, "alpha": spec.alpha,
            "hypothesis_n_gt_p_alpha": bool(spec.n > spec.p * spec.alpha),
            "warm_start": warm_start, "m": m}
    if not meta["hypothesis_n_gt_p_alpha"]:
        log.warning("n > p*alpha fails; the asymptote check runs but is outside "
                    "the hypotheses")
    fresh = initial_path(phi1, witness, m, E)
    path = fresh
    points = []
    for s in grid:
        start = path if warm_start else fresh
        try:
            res = deform(start, s, E, **deform_opts)
        except ConvergenceError as exc:
            res = exc.result
            log.warning("s=%g did not converge (reduced gradient %.3e)", s,
                        res.reduced_grad_at_max)
        points.append(CurvePoint(s=s, c=res.c_value, converged=res.converged,
                                 grad_norm=res.reduced_grad_at_max,
                                 iterations=res.iterations))
        if res.converged:
            path = PathOnS(res.path.samples)
    return FucikCurve(points=points, lambda1=phi1.value, meta=meta)


# -- properties -------------------------------------------------------------

@dataclass
class PropertyReport:
    checks: dict
    offending: dict
    skipped_pairs: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def check_properties(curve: FucikCurve, tol: float = 1e-8, lip_slack: float = 1e-6,
                     s_mid: float | None = None) -> PropertyReport:
    """Strict decrease, increase of s + c, Lipschitz bound 1, approach to
    lambda_1 and c(s) > lambda_1 over the converged points."""
    pts = sorted(curve.converged(), key=lambda q: q.s)
    if len(pts) < 3:
        raise ConfigError("check_properties needs at least 3 converged points")
    lam = curve.lambda1
    off = {"above_lambda1": [], "decreasing": [], "s_plus_c_increasing": [],
           "lipschitz": [], "tail": []}
    skipped = 0
    for q in pts:
        if not q.c > lam + tol:
            off["above_lambda1"].append((q.s,))
    for i, q1 in enumerate(pts):
        for q2 in pts[i + 1:]:
            ds = q2.s - q1.s
            if ds == 0:
                skipped += 1
                continue
            if not q1.c - q2.c > tol:
                off["decreasing"].append((q1.s, q2.s))
            if not (q2.s + q2.c) - (q1.s + q1.c) > tol:
                off["s_plus_c_increasing"].append((q1.s, q2.s))
            if abs(q1.c - q2.c) > ds * (1.0 + lip_slack):
                off["lipschitz"].append((q1.s, q2.s))
    smax = pts[-1]
    if s_mid is None:
        ss = np.array([q.s for q in pts])
        s_mid = 1.0 if np.any(ss == 1.0) else float(ss[len(ss) // 2])
    mid = min(pts, key=lambda q: abs(q.s - s_mid))
    if not smax.c - lam < mid.c - lam or mid is smax:
        off["tail"].append((mid.s, smax.s))
    checks = {k: not v for k, v in off.items()}
    notes = []
    hyp = curve.meta.get("hypothesis_n_gt_p_alpha")
    if hyp is not None:
        notes.append(f"n > p*alpha: {hyp}")
    return PropertyReport(checks=checks, offending=off, skipped_pairs=skipped,
                          notes=notes)


@dataclass
class TrivialLinesReport:
    lambda1: float
    vertical: list      # (b, residual) for (phi_1, lambda_1, b)
    horizontal: list    # (a, residual) for (-phi_1, a, lambda_1)
    tol: float

    @property
    def ok(self) -> bool:
        return all(r < self.tol for _, r in self.vertical + self.horizontal)


def trivial_lines_check(E, phi1: EigenResult | None = None, tol: float = 1e-6,
                        b_values=None, a_values=None) -> TrivialLinesReport:
    """Residuals of (phi_1, lambda_1, b) for b <= lambda_1 and of
    (-phi_1, a, lambda_1) for a >= lambda_1."""
    if phi1 is None:
        phi1 = compute_lambda1(E)
    lam = phi1.value
    F = functionals(E)
    if b_values is None:
        b_values = [0.0, 0.25 * lam, 0.5 * lam, lam]
    if a_values is None:
        a_values = [lam, lam + 0.5, lam + 1.0, lam + 5.0]
    u = phi1.function
    vert = [(float(b), F.fucik_residual(u, lam, b)) for b in b_values]
    hor = [(float(a), F.fucik_residual(-u, a, lam)) for a in a_values]
    return TrivialLinesReport(lambda1=lam, vertical=vert, horizontal=hor, tol=tol)


# -- plotting ---------------------------------------------------------------

def curve_svg(curve: FucikCurve, header_lines=(), width=800, height=600) -> str:
    """Standalone SVG 1.1: curve, mirror, diagonal and the trivial lines."""
    pts = curve.converged() or curve.points
    lam = curve.lambda1
    a = np.array([q.point[0] for q in pts])
    b = np.array([q.point[1] for q in pts])
    top = float(max(a.max(), b.max())) * 1.05
    lo = 0.0
    margin = 60
    W, H = width - 2 * margin, height - 2 * margin

    def X(v):
        return margin + W * (v - lo) / (top - lo)

    def Y(v):
        return height - margin - H * (v - lo) / (top - lo)

    def poly(xs, ys, style):
        coords = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in zip(xs, ys))
        return f'<polyline points="{coords}" {style}/>'

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    for h in header_lines:
        out.append(f"<!-- {h} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">')
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    # axes and ticks
    out.append(poly([lo, top], [lo, lo], 'stroke="black" fill="none"'))
    out.append(poly([lo, lo], [lo, top], 'stroke="black" fill="none"'))
    step = _tick_step(top - lo)
    t = 0.0
    while t <= top + 1e-12:
        out.append(f'<line x1="{X(t):.2f}" y1="{Y(lo):.2f}" x2="{X(t):.2f}" '
                   f'y2="{Y(lo) + 5:.2f}" stroke="black"/>')
        out.append(f'<text x="{X(t):.2f}" y="{Y(lo) + 20:.2f}" font-size="12" '
                   f'text-anchor="middle">{t:g}</text>')
        out.append(f'<line x1="{X(lo):.2f}" y1="{Y(t):.2f}" x2="{X(lo) - 5:.2f}" '
                   f'y2="{Y(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{X(lo) - 8:.2f}" y="{Y(t) + 4:.2f}" font-size="12" '
                   f'text-anchor="end">{t:g}</text>')
        t += step
    out.append(f'<text x="{width / 2:.0f}" y="{height - 15}" font-size="14" '
               f'text-anchor="middle">a</text>')
    out.append(f'<text x="18" y="{height / 2:.0f}" font-size="14" '
               f'text-anchor="middle">b</text>')
    out.append(poly([lo, top], [lo, top], 'id="diagonal" stroke="gray" '
                    'stroke-dasharray="4,4" fill="none"'))
    out.append(poly([lam, lam], [lam, top], 'id="trivial-vertical" stroke="blue" fill="none"'))
    out.append(poly([lam, top], [lam, lam], 'id="trivial-horizontal" stroke="blue" fill="none"'))
    out.append(poly(a, b, 'id="curve" stroke="red" stroke-width="2" fill="none"'))
    out.append(poly(b, a, 'id="mirror" stroke="red" stroke-width="2" fill="none"'))
    for x, y in zip(a, b):
        out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="3" fill="red"/>')
        out.append(f'<circle cx="{X(y):.2f}" cy="{Y(x):.2f}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _tick_step(span):
    raw = span / 8.0
    mag = 10.0 ** np.floor(np.log10(raw))
    for k in (1.0, 2.0, 5.0, 10.0):
        if raw <= k * mag:
            return k * mag
    return 10.0 * mag
