"""Computational geometry: the domain, its boundary collar and the truncated exterior.

Meshes are tensor grids.  Inside the domain the spacing is uniform except that
grid lines are snapped onto the inner edge of the collar, so collar elements
tile the collar exactly.  Outside the domain the spacing grows geometrically up
to the truncation box.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

INTERIOR = 0
COLLAR = 1
EXTERIOR = 2

REGION_NAMES = {INTERIOR: "interior", COLLAR: "collar", EXTERIOR: "exterior"}


@dataclass(frozen=True)
class DomainSpec:
    """Problem geometry and exponents.

    ``omega`` is ``(a, b)`` in 1D and ``((x0, y0), (x1, y1))`` in 2D.  When
    ``truncation_radius`` is None it defaults to four times the diameter of
    the domain.  The exterior box is centred on the domain.
    """

    n: int
    omega: tuple
    epsilon: float
    alpha: float
    p: float = 2.0
    truncation_radius: float | None = None

    @property
    def lower(self) -> np.ndarray:
        if self.n == 1:
            return np.array([float(self.omega[0])])
        return np.asarray(self.omega[0], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        if self.n == 1:
            return np.array([float(self.omega[1])])
        return np.asarray(self.omega[1], dtype=float)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def measure(self) -> float:
        return float(np.prod(self.upper - self.lower))

    @property
    def radius(self) -> float:
        if self.truncation_radius is None:
            return 4.0 * self.diameter
        return float(self.truncation_radius)

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.center
        return c - self.radius, c + self.radius

    def with_(self, **changes) -> "DomainSpec":
        values = dict(n=self.n, omega=self.omega, epsilon=self.epsilon,
                      alpha=self.alpha, p=self.p,
                      truncation_radius=self.truncation_radius)
        values.update(changes)
        return DomainSpec(**values)


def validate(spec: DomainSpec) -> list[str]:
    """Check ``spec`` and return a list of non-fatal warnings.

    Raises ConfigError for anything the discretization cannot handle.  A
    failure of ``n > p*alpha`` is only a warning: the embedding argument that
    needs it does not affect the discrete problem.
    """
    if spec.n not in (1, 2):
        raise ConfigError(f"dimension n must be 1 or 2, got {spec.n}")
    if not 0.0 < spec.epsilon < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {spec.epsilon}")
    if not 0.0 < spec.alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {spec.alpha}")
    if not spec.p >= 2.0:
        raise ConfigError(f"p must be >= 2, got {spec.p}")
    lo, hi = spec.lower, spec.upper
    if lo.shape != (spec.n,) or hi.shape != (spec.n,):
        raise ConfigError("omega does not match the dimension n")
    if np.any(hi <= lo):
        raise ConfigError("omega must have positive extent along every axis")
    if np.any(2.0 * spec.epsilon >= hi - lo):
        raise ConfigError("collar width epsilon is too large: the collar "
                          "must leave a nonempty core")
    half = 0.5 * (hi - lo)
    if not np.all(spec.radius > half):
        raise ConfigError("truncation box must strictly contain the domain")

    notes = []
    if spec.n <= spec.p * spec.alpha:
        notes.append(f"n <= p*alpha ({spec.n} <= {spec.p * spec.alpha:g}): "
                     "the embedding hypothesis fails; the discrete "
                     "computation proceeds")
    if spec.radius <= spec.diameter:
        notes.append("truncation radius does not exceed the domain diameter; "
                     "exterior tail error may be large")
    return notes


@dataclass(frozen=True)
class Mesh:
    """Simplicial mesh of the truncation box with per-element region tags."""

    spec: DomainSpec
    nodes: np.ndarray        # (N, n)
    elements: np.ndarray     # (E, n+1) node indices
    region: np.ndarray       # (E,) INTERIOR / COLLAR / EXTERIOR
    measure: np.ndarray      # (E,)
    axes: tuple = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def num_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def in_omega(self) -> np.ndarray:
        return self.region != EXTERIOR

    @property
    def in_collar(self) -> np.ndarray:
        return self.region == COLLAR

    def node_mask(self, element_mask: np.ndarray) -> np.ndarray:
        """Nodes touched by at least one selected element."""
        mask = np.zeros(self.num_nodes, dtype=bool)
        mask[self.elements[element_mask].ravel()] = True
        return mask

    @property
    def omega_nodes(self) -> np.ndarray:
        return self.node_mask(self.in_omega)

    @property
    def collar_nodes(self) -> np.ndarray:
        return self.node_mask(self.in_collar)

    def region_measure(self, *codes: int) -> float:
        return float(self.measure[np.isin(self.region, codes)].sum())

    def check(self, u: np.ndarray) -> np.ndarray:
        from .errors import MeshMismatchError

        u = np.asarray(u, dtype=float)
        if u.shape != (self.num_nodes,):
            raise MeshMismatchError(
                f"nodal vector of shape {u.shape} does not match mesh with "
                f"{self.num_nodes} nodes")
        return u

    def interpolate(self, func) -> np.ndarray:
        """Nodal interpolant of ``func`` (called with coordinate arrays)."""
        if self.n == 1:
            return np.asarray(func(self.nodes[:, 0]), dtype=float) * np.ones(self.num_nodes)
        return np.asarray(func(self.nodes[:, 0], self.nodes[:, 1]),
                          dtype=float) * np.ones(self.num_nodes)

    def elements_min_distance_to_boundary(self) -> np.ndarray:
        """Largest distance to the domain boundary over each element's
        vertices (elements are convex, so this bounds every point)."""
        lo, hi = self.spec.lower, self.spec.upper
        pts = self.nodes[self.elements]                    # (E, n+1, n)
        d = np.minimum(pts - lo, hi - pts).min(axis=2)      # per vertex
        return d.max(axis=1)


def _graded(start: float, stop: float, h_first: float, growth: float) -> np.ndarray:
    """Nodes from ``start`` to ``stop`` (exclusive of ``start``) with sizes
    growing geometrically from about ``h_first``."""
    length = abs(stop - start)
    if length <= 0:
        return np.zeros(0)
    if growth <= 1.0:
        count = max(1, int(math.ceil(length / h_first)))
        sizes = np.full(count, length / count)
    else:
        count = max(1, int(math.ceil(
            math.log1p(length * (growth - 1.0) / h_first) / math.log(growth))))
        sizes = h_first * growth ** np.arange(count)
        sizes *= length / sizes.sum()
    offsets = np.cumsum(sizes)
    offsets[-1] = length
    return start + math.copysign(1.0, stop - start) * offsets


def _axis(lo: float, hi: float, resolution: int, eps: float,
          box_lo: float, box_hi: float, growth: float) -> np.ndarray:
    cells = resolution - 1
    h0 = (hi - lo) / cells
    if eps < h0 * (1.0 - 1e-12):
        raise ConfigError(
            f"resolution too coarse for epsilon: element size {h0:.6g} "
            f"exceeds collar width {eps:.6g}")
    k = max(1, int(round(eps / h0)))
    core = cells - 2 * k
    if core < 1:
        k = (cells - 1) // 2
        core = cells - 2 * k
        if k < 1:
            raise ConfigError("resolution too coarse for epsilon")
    inner = np.concatenate([
        np.linspace(lo, lo + eps, k + 1),
        np.linspace(lo + eps, hi - eps, core + 1)[1:],
        np.linspace(hi - eps, hi, k + 1)[1:],
    ])
    inner[k] = lo + eps
    inner[k + core] = hi - eps
    h_edge = eps / k
    left = _graded(lo, box_lo, h_edge, growth)[::-1]
    right = _graded(hi, box_hi, h_edge, growth)
    return np.concatenate([left, inner, right])


def build_mesh(spec: DomainSpec, resolution: int, growth: float = 1.15) -> Mesh:
    """Mesh Ω (``resolution`` nodes per axis, collar snapped) and the
    exterior up to the truncation box."""
    for msg in validate(spec):
        warnings.warn(msg, stacklevel=2)
    if resolution < 8 and resolution >= 2:
        # coarse meshes are still checked against the collar first so the
        # more informative message wins
        for d in range(spec.n):
            h0 = (spec.upper[d] - spec.lower[d]) / (resolution - 1)
            if spec.epsilon < h0:
                raise ConfigError(
                    f"resolution too coarse for epsilon: element size {h0:.6g} "
                    f"exceeds collar width {spec.epsilon:.6g}")
    if resolution < 8:
        raise ConfigError(f"resolution must be at least 8, got {resolution}")

    box_lo, box_hi = spec.box()
    lo, hi, eps = spec.lower, spec.upper, spec.epsilon
    axes = tuple(_axis(lo[d], hi[d], resolution, eps, box_lo[d], box_hi[d], growth)
                 for d in range(spec.n))

    if spec.n == 1:
        x = axes[0]
        nodes = x[:, None]
        elements = np.column_stack([np.arange(len(x) - 1), np.arange(1, len(x))])
        left, right = x[:-1], x[1:]
        measure = right - left
        inside = (left >= lo[0] - 1e-14) & (right <= hi[0] + 1e-14)
        in_band = inside & ((right <= lo[0] + eps + 1e-12) |
                            (left >= hi[0] - eps - 1e-12))
    else:
        x, y = axes
        nx, ny = len(x), len(y)
        X, Y = np.meshgrid(x, y, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="xy")
        i, j = i.ravel(), j.ravel()
        n00 = j * nx + i
        n10 = n00 + 1
        n01 = n00 + nx
        n11 = n01 + 1
        elements = np.concatenate([np.column_stack([n00, n10, n11]),
                                   np.column_stack([n00, n11, n01])])
        xl, xr = x[i], x[i + 1]
        yl, yr = y[j], y[j + 1]
        cell_area = (xr - xl) * (yr - yl)
        measure = np.concatenate([cell_area, cell_area]) / 2.0
        inside_x = (xl >= lo[0] - 1e-14) & (xr <= hi[0] + 1e-14)
        inside_y = (yl >= lo[1] - 1e-14) & (yr <= hi[1] + 1e-14)
        band_x = (xr <= lo[0] + eps + 1e-12) | (xl >= hi[0] - eps - 1e-12)
        band_y = (yr <= lo[1] + eps + 1e-12) | (yl >= hi[1] - eps - 1e-12)
        inside = inside_x & inside_y
        in_band = inside & (band_x | band_y)
        inside = np.concatenate([inside, inside])
        in_band = np.concatenate([in_band, in_band])

    region = np.full(len(measure), EXTERIOR, dtype=np.int8)
    region[inside] = INTERIOR
    region[in_band] = COLLAR
    return Mesh(spec=spec, nodes=nodes, elements=elements.astype(np.int64),
                region=region, measure=measure, axes=axes)
