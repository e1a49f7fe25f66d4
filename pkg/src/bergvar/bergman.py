"""Weighted Bergman spaces of a single fiber.

The space is spanned by polynomials in ``(zeta - center)/scale``,
orthonormalized on the fiber quadrature against ``e^{-phi} dA``.  All inner
products in this package use the convention

    <g, h> = int g * conj(h) * e^{-phi} dA.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import FiberQuadrature

__all__ = [
    "BergmanSpace",
    "GramIndefiniteError",
    "MinimalSolution",
    "PolyField",
    "WeightJet",
    "WeightPreset",
    "WEIGHT_PRESETS",
    "build_space",
    "cauchy_transform",
    "conj_project",
    "eval_kernel",
    "minimal_dbar_solve",
    "project",
    "weight_preset",
]

EIG_CUTOFF = 1e-12


class GramIndefiniteError(RuntimeError):
    """The quadrature Gram matrix is numerically indefinite; rebuild with higher resolution."""


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightJet:
    phi: np.ndarray
    phi_j: np.ndarray
    phi_mu: np.ndarray
    phi_jkbar: np.ndarray
    phi_jmubar: np.ndarray
    phi_mumubar: np.ndarray

    @property
    def phi_kbar(self):
        return np.conj(self.phi_j)

    @property
    def phi_mubar(self):
        return np.conj(self.phi_mu)

    @property
    def phi_kbarmu(self):
        return np.conj(self.phi_jmubar)


@dataclass(frozen=True)
class WeightPreset:
    preset_id: str
    params: tuple
    jet_fn: Callable = field(repr=False, compare=False)
    plurisubharmonic: bool = True
    description: str = ""

    @property
    def is_zero(self) -> bool:
        return self.preset_id == "zero"

    def jet(self, t, zeta) -> WeightJet:
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        z = np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel()
        return self.jet_fn(t, z)

    def value(self, t, zeta) -> np.ndarray:
        return self.jet(t, zeta).phi


def _wjet(m, z, phi, phi_j=None, phi_mu=None, phi_jkbar=None, phi_jmubar=None, phi_mumubar=None):
    shape = z.shape

    def fill(val, lead=()):
        if val is None:
            return np.zeros(lead + shape, dtype=complex)
        arr = np.asarray(val, dtype=complex)
        if lead and arr.ndim == len(lead):
            arr = arr.reshape(lead + (1,) * len(shape))
        return np.broadcast_to(arr, lead + shape).copy()

    return WeightJet(phi=np.real(fill(phi)), phi_j=fill(phi_j, (m,)), phi_mu=fill(phi_mu),
                     phi_jkbar=fill(phi_jkbar, (m, m)), phi_jmubar=fill(phi_jmubar, (m,)),
                     phi_mumubar=np.real(fill(phi_mumubar)))


def _zero(t, z):
    return _wjet(t.size, z, 0.0)


def _abs2(t, z):
    return _wjet(t.size, z, np.abs(z) ** 2, phi_mu=np.conj(z), phi_mumubar=1.0)


def _abs2_plus_tabs2(t, z):
    m = t.size
    return _wjet(m, z, np.abs(z) ** 2 + np.sum(np.abs(t) ** 2), phi_j=np.conj(t),
                 phi_mu=np.conj(z), phi_jkbar=np.eye(m), phi_mumubar=1.0)


def _shifted(alpha):
    # phi = |zeta - alpha t^1|^2
    def fn(t, z):
        m = t.size
        d = z - alpha * t[0]
        pj = np.zeros((m,) + z.shape, dtype=complex)
        pj[0] = -alpha * np.conj(d)
        pjk = np.zeros((m, m))
        pjk[0, 0] = abs(alpha) ** 2
        pjm = np.zeros((m,), dtype=complex)
        pjm[0] = -alpha
        return _wjet(m, z, np.abs(d) ** 2, phi_j=pj, phi_mu=np.conj(d), phi_jkbar=pjk,
                     phi_jmubar=pjm, phi_mumubar=1.0)
    return fn


WEIGHT_PRESETS = {
    "zero": "phi = 0 (classical Bergman space)",
    "abs2": "phi = |zeta|^2",
    "abs2_plus_tabs2": "phi = |zeta|^2 + |t|^2",
    "shifted_abs2": "phi = |zeta - alpha t^1|^2 (params: [alpha])",
}


def weight_preset(preset_id: str, params=()) -> WeightPreset:
    params = tuple(params)
    if preset_id == "zero":
        return WeightPreset("zero", params, _zero, True, WEIGHT_PRESETS["zero"])
    if preset_id == "abs2":
        return WeightPreset("abs2", params, _abs2, True, WEIGHT_PRESETS["abs2"])
    if preset_id == "abs2_plus_tabs2":
        return WeightPreset(preset_id, params, _abs2_plus_tabs2, True, WEIGHT_PRESETS[preset_id])
    if preset_id == "shifted_abs2":
        alpha = complex(params[0]) if params else 1.0
        return WeightPreset(preset_id, params, _shifted(alpha), True, WEIGHT_PRESETS[preset_id])
    raise KeyError(f"unknown weight preset {preset_id!r}")


# ---------------------------------------------------------------------------
# polynomial fields in (x, conj x), x = (zeta - center)/scale


@dataclass(frozen=True)
class PolyField:
    """``sum_{p,q} coef[p, q] x^p conj(x)^q`` with ``x = (zeta - center)/scale``."""

    coef: np.ndarray
    center: complex = 0j
    scale: float = 1.0

    def __call__(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        x = ((z - self.center) / self.scale).ravel()
        P, Q = self.coef.shape
        xp = x[:, None] ** np.arange(P)[None, :]
        xq = np.conj(x)[:, None] ** np.arange(Q)[None, :]
        out = np.einsum("np,pq,nq->n", xp, self.coef, xq)
        return out.reshape(z.shape)

    @property
    def total_degree(self) -> int:
        p, q = np.nonzero(np.abs(self.coef) > 0)
        return int(np.max(p + q)) if p.size else 0

    def dbar(self) -> "PolyField":
        """Wirtinger derivative in ``conj(zeta)``."""
        P, Q = self.coef.shape
        if Q == 1:
            return PolyField(np.zeros((P, 1), dtype=complex), self.center, self.scale)
        c = self.coef[:, 1:] * np.arange(1, Q)[None, :] / self.scale
        return PolyField(c, self.center, self.scale)

    def d(self) -> "PolyField":
        """Wirtinger derivative in ``zeta``."""
        P, Q = self.coef.shape
        if P == 1:
            return PolyField(np.zeros((1, Q), dtype=complex), self.center, self.scale)
        c = self.coef[1:, :] * np.arange(1, P)[:, None] / self.scale
        return PolyField(c, self.center, self.scale)

    def antidbar(self) -> "PolyField":
        """A particular ``u`` with ``du/d conj(zeta) = self``."""
        P, Q = self.coef.shape
        c = np.zeros((P, Q + 1), dtype=complex)
        c[:, 1:] = self.coef * self.scale / np.arange(1, Q + 1)[None, :]
        return PolyField(c, self.center, self.scale)

    def __neg__(self):
        return PolyField(-self.coef, self.center, self.scale)

    def __mul__(self, other):
        if np.isscalar(other):
            return PolyField(self.coef * other, self.center, self.scale)
        return NotImplemented

    __rmul__ = __mul__

    @classmethod
    def from_monomials(cls, terms: dict, center=0j, scale=1.0) -> "PolyField":
        """Build from ``{(p, q): c}`` meaning ``c x^p conj(x)^q``."""
        P = max((p for p, _ in terms), default=0) + 1
        Q = max((q for _, q in terms), default=0) + 1
        c = np.zeros((P, Q), dtype=complex)
        for (p, q), v in terms.items():
            c[p, q] += v
        return cls(c, center, scale)

    @classmethod
    def fit(cls, quad: FiberQuadrature, samples, degree: int, scale: float | None = None) -> "PolyField":
        """Weighted least-squares fit of interior-node samples by total degree <= ``degree``."""
        center = quad.center
        scale = quad.mean_radius if scale is None else scale
        x = (quad.interior_nodes - center) / scale
        pq = [(p, q) for p in range(degree + 1) for q in range(degree + 1 - p)]
        A = np.stack([x**p * np.conj(x) ** q for p, q in pq], axis=1)
        sw = np.sqrt(quad.interior_weights)
        sol, *_ = np.linalg.lstsq(A * sw[:, None], np.asarray(samples) * sw, rcond=None)
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for (p, q), v in zip(pq, sol):
            c[p, q] = v
        return cls(c, center, scale)


# ---------------------------------------------------------------------------
# the space


@dataclass(frozen=True, eq=False)
class BergmanSpace:
    """Orthonormal polynomial basis ``e_k`` of the weighted Bergman space of one fiber.

    ``e_k(zeta) = sum_p coef[p, k] x^p`` with ``x = (zeta - center)/scale``.
    """

    quad: FiberQuadrature
    weight: WeightPreset
    N: int
    center: complex
    scale: float
    coef: np.ndarray
    rank: int
    gram_eigenvalues: np.ndarray
    node_basis: np.ndarray = field(repr=False)  # e_k at interior nodes, (n_nodes, rank)
    measure: np.ndarray = field(repr=False)  # quadrature weights * e^{-phi}

    @property
    def t(self):
        return self.quad.t

    def monomials(self, zeta) -> np.ndarray:
        x = (np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel() - self.center) / self.scale
        return x[:, None] ** np.arange(self.N)[None, :]

    def basis(self, zeta) -> np.ndarray:
        """Values ``e_k(zeta)``, shape ``(n_points, rank)``."""
        return self.monomials(zeta) @ self.coef

    def synthesize(self, coefficients, zeta) -> np.ndarray:
        """Evaluate ``sum_k c_k e_k`` at ``zeta``."""
        return self.basis(zeta) @ np.asarray(coefficients)

    def synthesize_conj(self, coefficients, zeta) -> np.ndarray:
        """Evaluate ``sum_k c_k conj(e_k)`` at ``zeta``."""
        return np.conj(self.basis(zeta)) @ np.asarray(coefficients)

    def inner(self, g, h) -> complex:
        """``<g, h>`` for samples at the interior nodes."""
        return complex(np.sum(np.asarray(g) * np.conj(h) * self.measure))

    def norm2(self, g) -> float:
        return float(np.sum(np.abs(g) ** 2 * self.measure))

    def gram_residual(self) -> float:
        E = self.node_basis
        G = (E * self.measure[:, None]).T @ np.conj(E)
        return float(np.max(np.abs(G - np.eye(self.rank))))

    def kernel_matrix(self, zeta, eta) -> np.ndarray:
        """``K(zeta_i, conj(eta_j))`` for all pairs."""
        return self.basis(zeta) @ np.conj(self.basis(eta)).T


def _orthonormalize(B, mu, cutoff):
    G = (np.conj(B) * mu[:, None]).T @ B
    G = 0.5 * (G + np.conj(G.T))
    # unit-diagonal equilibration; high monomials otherwise dominate the cutoff
    d = 1.0 / np.sqrt(np.real(np.diag(G)))
    G = G * d[:, None] * d[None, :]
    lam, U = np.linalg.eigh(G)
    U = U * d[:, None]
    lam = lam[::-1]
    U = U[:, ::-1]
    if lam[-1] < -1e-10 * lam[0]:
        raise GramIndefiniteError(
            f"Gram matrix has eigenvalue {lam[-1]:.3e} (largest {lam[0]:.3e}); increase quadrature resolution"
        )
    keep = lam > cutoff * lam[0]
    return U[:, keep] / np.sqrt(lam[keep])[None, :], lam


def build_space(quad: FiberQuadrature, weight: WeightPreset, N: int) -> BergmanSpace:
    """Orthonormalize the first ``N`` shifted-scaled monomials on ``quad``.

    Eigen-decomposition of the Gram matrix with eigenvalues below
    ``1e-12 * largest`` discarded; a second pass on the already
    orthonormalized basis removes the conditioning loss of the first.
    """
    if N < 1:
        raise ValueError("basis size N must be >= 1")
    if quad.resolution[1] < 4 * N:
        raise ValueError(f"need at least 4N={4 * N} angular nodes, got {quad.resolution[1]}")
    center = quad.center
    scale = quad.mean_radius
    phi = weight.value(quad.t, quad.interior_nodes)
    mu = quad.interior_weights * np.exp(-phi)

    x = (quad.interior_nodes - center) / scale
    B = x[:, None] ** np.arange(N)[None, :]
    C1, lam = _orthonormalize(B, mu, EIG_CUTOFF)
    C2, _ = _orthonormalize(B @ C1, mu, 0.0)
    C = C1 @ C2
    E = B @ C
    return BergmanSpace(quad, weight, N, center, scale, C, C.shape[1], lam, E, mu)


def eval_kernel(space: BergmanSpace, zeta, eta):
    """``K(zeta, conj(eta)) = sum_k e_k(zeta) conj(e_k(eta))``, broadcasting ``zeta`` and ``eta``."""
    z = np.asarray(zeta, dtype=complex)
    w = np.asarray(eta, dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    val = np.sum(space.basis(z) * np.conj(space.basis(w)), axis=1)
    return val.reshape(z.shape) if z.shape else complex(val[0])


def project(space: BergmanSpace, g) -> np.ndarray:
    """Bergman projection of interior-node samples; returns coefficients in ``{e_k}``."""
    g = np.asarray(g, dtype=complex)
    return (g * space.measure) @ np.conj(space.node_basis)


def conj_project(space: BergmanSpace, g) -> np.ndarray:
    """Projection onto ``span{conj(e_k)}``; returns coefficients of ``conj(e_k)``."""
    g = np.asarray(g, dtype=complex)
    return (g * space.measure) @ space.node_basis


# ---------------------------------------------------------------------------
# d-bar


def _as_polyfield(quad, g, degree):
    if isinstance(g, PolyField):
        return g
    if callable(g):
        g = g(quad.interior_nodes)
    return PolyField.fit(quad, g, degree)


def cauchy_transform(quad: FiberQuadrature, g, degree: int = 20) -> PolyField:
    """A particular solution ``u`` of ``du/d conj(zeta) = g`` on the fiber.

    ``g`` may be a :class:`PolyField` (handled exactly), a callable, or
    samples at the interior nodes.  Non-polynomial data is first fitted in
    weighted least squares by polynomials in ``(x, conj x)`` of total degree
    ``degree``; the antiderivative in ``conj(zeta)`` is then taken term by
    term.  The result differs from the area Cauchy integral of ``g`` by a
    holomorphic function only.
    """
    return _as_polyfield(quad, g, degree).antidbar()


@dataclass(frozen=True)
class MinimalSolution:
    particular: PolyField
    holomorphic_part: np.ndarray  # coefficients in {e_k} removed from the particular solution
    space: BergmanSpace = field(repr=False)
    values: np.ndarray = field(repr=False)  # at interior nodes

    def __call__(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        out = self.particular(z.ravel()) - self.space.synthesize(self.holomorphic_part, z.ravel())
        return out.reshape(z.shape)

    @property
    def norm2(self) -> float:
        return self.space.norm2(self.values)


def minimal_dbar_solve(space: BergmanSpace, g, degree: int | None = None) -> MinimalSolution:
    """L2-minimal solution of ``du/d conj(zeta) = g``: the particular solution minus its Bergman projection."""
    if degree is None:
        degree = max(space.N - 3, 0)
    u = cauchy_transform(space.quad, g, degree)
    # the projection of a degree-d polynomial field needs holomorphic degree d in the basis
    if u.total_degree > space.N - 1:
        raise ValueError(f"particular solution has degree {u.total_degree}; needs basis size N >= {u.total_degree + 1}")
    vals = u(space.quad.interior_nodes)
    c = project(space, vals)
    vals = vals - space.node_basis @ c
    return MinimalSolution(u, c, space, vals)


def dbar_residual(u, g, points, h: float = 1e-5) -> np.ndarray:
    """Central-difference ``du/d conj(zeta) - g`` at ``points`` (``u``, ``g`` callables)."""
    p = np.asarray(points, dtype=complex)
    ux = (u(p + h) - u(p - h)) / (2 * h)
    uy = (u(p + 1j * h) - u(p - 1j * h)) / (2 * h)
    return 0.5 * (ux + 1j * uy) - g(p)
