"""Assembly and evaluation of the nonlocal energy.

The seminorm integrates over ordered pairs with at least one point in the
domain::

    [u]^p = int_{Omega x Omega} + 2 int_{Omega x (B_R \\ Omega)}
            |u(x) - u(y)|^p |x - y|^-(n + p alpha)

where B_R is the truncation box.  Dropping the exterior beyond the box
removes a tail of relative size O(R^-(p alpha)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _backend
from ..errors import ConfigError, MeshMismatchError
from ..local import LocalIntegrator


def lambda_np(n: int, p: float) -> float:
    """Normalization constant p Gamma((n+p)/2) / (2 pi^((n-1)/2) Gamma((p+1)/2))."""
    if n < 1 or p < 2:
        raise ConfigError("lambda_np needs n >= 1 and p >= 2")
    log = (math.log(p) + math.lgamma((n + p) / 2.0) - math.log(2.0)
           - 0.5 * (n - 1) * math.log(math.pi) - math.lgamma((p + 1) / 2.0))
    return math.exp(log)


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    p: float
    n: int
    truncation_radius: float
    lambda_np: float = field(default=None)

    def __post_init__(self):
        if self.lambda_np is None:
            object.__setattr__(self, "lambda_np", lambda_np(self.n, self.p))

    @classmethod
    def from_spec(cls, spec) -> "KernelParams":
        return cls(alpha=spec.alpha, p=spec.p, n=spec.n,
                   truncation_radius=spec.radius)

    @property
    def gamma(self) -> float:
        return self.n + self.p * self.alpha

    @property
    def scale(self) -> float:
        """Weight of the seminorm in the energy, Lambda (1 - alpha)."""
        return self.lambda_np * (1.0 - self.alpha)


PARTS = ("inner", "outer")


class PairSet:
    """Quadrature pairs of one part of Q, stored contiguously."""

    def __init__(self, chunks):
        chunks = list(chunks)
        if chunks:
            K = max(c[0].shape[1] for c in chunks)
            idx = [np.pad(c[0], ((0, 0), (0, K - c[0].shape[1]))) for c in chunks]
            coef = [np.pad(c[1], ((0, 0), (0, K - c[1].shape[1]))) for c in chunks]
            self.idx = np.ascontiguousarray(np.concatenate(idx), dtype=np.int64)
            self.coef = np.ascontiguousarray(np.concatenate(coef), dtype=float)
            self.w = np.ascontiguousarray(np.concatenate([c[2] for c in chunks]))
        else:
            self.idx = np.zeros((0, 2), dtype=np.int64)
            self.coef = np.zeros((0, 2))
            self.w = np.zeros(0)

    def __len__(self):
        return len(self.w)


def _generator(mesh):
    if mesh.n == 1:
        from .pairs1d import generate
    else:
        from .pairs2d import generate
    return generate


class NonlocalEnergy:
    """Precomputed quadrature for the seminorm, plus Omega and collar mass.

    For p = 2 the seminorm is held as dense symmetric matrices ``A_inner``
    (Omega x Omega) and ``A_outer`` (Omega x exterior); otherwise the
    quadrature pairs are stored and evaluated on demand.
    """

    def __init__(self, mesh, params: KernelParams, store_pairs=None,
                 backend=None, **opts):
        self.mesh = mesh
        self.params = params
        self.p = float(params.p)
        self.N = mesh.num_nodes
        self.kernels = _backend.kernels if backend is None else _backend.get(backend)
        if store_pairs is None:
            store_pairs = self.p != 2.0
        generate = _generator(mesh)
        gamma = params.gamma
        self.pairs = {}
        self.matrices = {}
        for part in PARTS:
            chunks = generate(mesh, self.p, gamma, part, **opts)
            if store_pairs:
                self.pairs[part] = PairSet(chunks)
                if self.p == 2.0:
                    self.matrices[part] = self._gram(self.pairs[part])
            else:
                A = np.zeros((self.N, self.N))
                for idx, coef, w in chunks:
                    self.kernels.pair_gram(np.ascontiguousarray(idx),
                                           np.ascontiguousarray(coef),
                                           np.ascontiguousarray(w), A)
                self.matrices[part] = _symmetrize(A)
        if self.matrices:
            self.A = self.matrices["inner"] + self.matrices["outer"]
        else:
            self.A = None

        self.omega = LocalIntegrator(mesh, mesh.in_omega)
        self.collar = LocalIntegrator(mesh, mesh.in_collar)
        self.M_omega = self.omega.mass_matrix()
        self.M_collar = self.collar.mass_matrix()

    # -- helpers ----------------------------------------------------------

    def _gram(self, ps, weights=None):
        A = np.zeros((self.N, self.N))
        w = ps.w if weights is None else weights
        self.kernels.pair_gram(ps.idx, ps.coef, np.ascontiguousarray(w), A)
        return _symmetrize(A)

    def check(self, u) -> np.ndarray:
        u = np.ascontiguousarray(u, dtype=float)
        if u.shape != (self.N,):
            raise MeshMismatchError(
                f"nodal vector of shape {u.shape} does not match mesh with "
                f"{self.N} nodes")
        return u

    def _parts(self, parts):
        if parts is None:
            return PARTS
        if isinstance(parts, str):
            return (parts,)
        return tuple(parts)

    # -- energy -----------------------------------------------------------

    def seminorm_p(self, u, parts=None) -> float:
        """[u]^p over the selected parts of Q."""
        u = self.check(u)
        total = 0.0
        for part in self._parts(parts):
            if part in self.matrices and self.p == 2.0:
                total += float(u @ (self.matrices[part] @ u))
            else:
                ps = self.pairs[part]
                total += self.kernels.pair_energy(ps.idx, ps.coef, ps.w, u, self.p)
        return total

    def gateaux(self, u, v, parts=None) -> float:
        """The form H(u, v), equal to (1/p) d/dt [u + t v]^p at t = 0."""
        u = self.check(u)
        v = self.check(v)
        total = 0.0
        for part in self._parts(parts):
            if part in self.matrices and self.p == 2.0:
                total += float(v @ (self.matrices[part] @ u))
            else:
                ps = self.pairs[part]
                total += self.kernels.pair_form(ps.idx, ps.coef, ps.w, u, v, self.p)
        return total

    def energy_and_grad(self, u, parts=None):
        """[u]^p and its gradient, p H(u, psi_i) for every node i."""
        u = self.check(u)
        grad = np.zeros(self.N)
        total = 0.0
        for part in self._parts(parts):
            if part in self.matrices and self.p == 2.0:
                Au = self.matrices[part] @ u
                total += float(u @ Au)
                grad += 2.0 * Au
            else:
                ps = self.pairs[part]
                total += self.kernels.pair_energy_grad(ps.idx, ps.coef, ps.w, u,
                                                       self.p, grad)
        return total, grad

    def hessian(self, u=None, parts=None) -> np.ndarray:
        """Dense Hessian of [u]^p; for p = 2 this is 2A and ``u`` is ignored."""
        if self.p == 2.0:
            if self.A is None:
                raise ValueError("no matrix assembled")
            return 2.0 * sum(self.matrices[q] for q in self._parts(parts))
        u = self.check(u)
        H = np.zeros((self.N, self.N))
        for part in self._parts(parts):
            ps = self.pairs[part]
            wts = self.kernels.pair_weights(ps.idx, ps.coef, ps.w, u, self.p)
            self.kernels.pair_gram(ps.idx, ps.coef, wts, H)
        H = _symmetrize(H)
        return self.p * (self.p - 1.0) * H

    # -- local terms ------------------------------------------------------

    def lp_omega(self, u) -> float:
        p = self.p
        return self.omega.integral(u, lambda z: np.abs(z) ** p)

    def lp_collar(self, u) -> float:
        p = self.p
        return self.collar.integral(u, lambda z: np.abs(z) ** p)


def _symmetrize(A):
    return 0.5 * (A + A.T)


def assemble(mesh, params: KernelParams | None = None, **opts) -> NonlocalEnergy:
    """Assemble the nonlocal energy for ``mesh``."""
    if params is None:
        params = KernelParams.from_spec(mesh.spec)
    return NonlocalEnergy(mesh, params, **opts)


def seminorm_p(u, E: NonlocalEnergy) -> float:
    return E.seminorm_p(u)


def gateaux(u, v, E: NonlocalEnergy) -> float:
    return E.gateaux(u, v)


def gradient_energy(mesh, u, p) -> float:
    """Exact ``int_Omega |grad u|^p`` for the piecewise-linear ``u``."""
    el = mesh.elements[mesh.in_omega]
    meas = mesh.measure[mesh.in_omega]
    pts = mesh.nodes[el]                      # (E, n+1, n)
    vals = np.asarray(u)[el]
    D = pts[:, 1:, :] - pts[:, :1, :]         # (E, n, n)
    dv = vals[:, 1:] - vals[:, :1]
    g = np.linalg.solve(D, dv[..., None])[..., 0]
    return float(meas @ np.linalg.norm(g, axis=1) ** p)


def bbm_sequence(mesh, u, p, alpha_list, **opts):
    """Lambda (1 - alpha) times the Omega x Omega part of [u]^p for each alpha.

    Returns ``(values, target)`` where ``target`` is the local energy
    ``int |grad u|^p`` of the interpolant.
    """
    u = np.asarray(u, dtype=float)
    values = []
    for alpha in alpha_list:
        params = KernelParams(alpha=alpha, p=p, n=mesh.n,
                              truncation_radius=mesh.spec.radius)
        E = _inner_only(mesh, params, **opts)
        values.append(params.scale * E.seminorm_p(u, parts="inner"))
    return values, gradient_energy(mesh, u, p)


class _InnerEnergy(NonlocalEnergy):
    def __init__(self, mesh, params, **opts):
        self.mesh = mesh
        self.params = params
        self.p = float(params.p)
        self.N = mesh.num_nodes
        self.kernels = _backend.kernels
        generate = _generator(mesh)
        self.pairs = {}
        self.matrices = {}
        chunks = generate(mesh, self.p, params.gamma, "inner", **opts)
        if self.p == 2.0:
            A = np.zeros((self.N, self.N))
            for idx, coef, w in chunks:
                self.kernels.pair_gram(np.ascontiguousarray(idx),
                                       np.ascontiguousarray(coef),
                                       np.ascontiguousarray(w), A)
            self.matrices["inner"] = _symmetrize(A)
        else:
            self.pairs["inner"] = PairSet(chunks)
        self.A = None


def _inner_only(mesh, params, **opts):
    return _InnerEnergy(mesh, params, **opts)


def export_triplets(E: NonlocalEnergy, path, header=None, tol=0.0):
    """Write the p = 2 matrix as ``row col value`` lines."""
    if E.A is None:
        raise ValueError("matrix export is only available for p = 2")
    rows, cols = np.nonzero(np.abs(E.A) > tol)
    with open(path, "w") as fh:
        if header:
            fh.write(header)
        for r, c in zip(rows, cols):
            fh.write(f"{r} {c} {E.A[r, c]:.17g}\n")
