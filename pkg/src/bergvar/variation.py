"""Variational formulas for Bergman kernels of a family and their finite-difference oracles.

Conventions: ``<g, h> = int g conj(h) e^{-phi} dA``; Wirtinger derivatives in
the parameter are ``d/dt = (d/dx - i d/dy)/2``.  The contraction of the
area form with ``V = d/dt - v d/dmu`` restricted to a fiber boundary is
``-(i/2) v dmubar``, integrated counterclockwise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .bergman import (
    BergmanSpace,
    PolyField,
    WeightPreset,
    build_space,
    conj_project,
    eval_kernel,
    minimal_dbar_solve,
    project,
    weight_preset,
)
from .deformation import boundary_density, quasi_ke_field
from .domains import (
    DomainFamily,
    FiberQuadrature,
    ParameterBoxError,
    _as_param,
    build_quadrature,
    evaluate_jet,
)

__all__ = [
    "FDResult",
    "FDStencil",
    "INTEGRANDS",
    "Integrand",
    "InteriorRegionError",
    "NakanoForm",
    "Resolution",
    "VariationReport",
    "contour_contraction",
    "fd_t",
    "fiber_integral_derivative",
    "fiber_quadrature",
    "fiber_space",
    "first_variation",
    "l2_identity_check",
    "l2_inequality_check",
    "nakano_form",
    "psh_scan",
    "second_variation_planar",
]

INTERIOR_FRACTION = 0.1


class InteriorRegionError(ValueError):
    """An evaluation point is closer to the fiber boundary than the kernel accuracy region allows."""


# ---------------------------------------------------------------------------
# finite differences in the parameter


@dataclass(frozen=True)
class FDStencil:
    h: float = 1e-3
    scheme: str = "richardson"  # "central" or "richardson"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("stencil step h must be positive")
        if self.scheme not in ("central", "richardson"):
            raise ValueError(f"unknown FD scheme {self.scheme!r}")

    @property
    def steps(self) -> tuple:
        return (self.h,) if self.scheme == "central" else (self.h, self.h / 2)


@dataclass(frozen=True)
class FDResult:
    value: np.ndarray
    d: np.ndarray  # (m, ...) dF/dt^j
    dbar: np.ndarray  # (m, ...) dF/d conj(t^j)
    ddbar: np.ndarray  # (m, m, ...) d^2F / dt^j d conj(t^k)


def _offsets(m: int, h: float, mixed: bool):
    """Real-direction offsets needed by the second-order central stencil."""
    out = [np.zeros(m, dtype=complex)]
    for j in range(m):
        for s in (1, -1):
            for u in (1, 1j):
                e = np.zeros(m, dtype=complex)
                e[j] = s * u * h
                out.append(e)
    if mixed:
        for j in range(m):
            for k in range(j + 1, m):
                for uj in (1, 1j):
                    for uk in (1, 1j):
                        for sj in (1, -1):
                            for sk in (1, -1):
                                e = np.zeros(m, dtype=complex)
                                e[j] = sj * uj * h
                                e[k] = sk * uk * h
                                out.append(e)
    return out


def _key(t):
    return tuple(complex(x) for x in np.round(np.asarray(t, dtype=complex), 15))


def _central(get, t0, m, h, mixed):
    F0 = get(t0)

    def at(j, s, u, k=None, sk=None, uk=None):
        e = np.zeros(m, dtype=complex)
        e[j] += s * u * h
        if k is not None:
            e[k] += sk * uk * h
        return get(t0 + e)

    d = np.empty((m,) + F0.shape, dtype=complex)
    db = np.empty_like(d)
    dd = np.empty((m, m) + F0.shape, dtype=complex)
    for j in range(m):
        xp, xm, yp, ym = at(j, 1, 1), at(j, -1, 1), at(j, 1, 1j), at(j, -1, 1j)
        dx = (xp - xm) / (2 * h)
        dy = (yp - ym) / (2 * h)
        d[j] = 0.5 * (dx - 1j * dy)
        db[j] = 0.5 * (dx + 1j * dy)
        # quarter of the real Laplacian in (x_j, y_j)
        dd[j, j] = 0.25 * ((xp + xm + yp + ym - 4 * F0) / h**2)
    if mixed:
        for j in range(m):
            for k in range(j + 1, m):
                def cross(uj, uk):
                    return (at(j, 1, uj, k, 1, uk) - at(j, 1, uj, k, -1, uk)
                            - at(j, -1, uj, k, 1, uk) + at(j, -1, uj, k, -1, uk)) / (4 * h**2)
                xx, yy, xy, yx = cross(1, 1), cross(1j, 1j), cross(1, 1j), cross(1j, 1)
                dd[j, k] = 0.25 * (xx + yy + 1j * (xy - yx))
                dd[k, j] = 0.25 * (xx + yy - 1j * (xy - yx))
    else:
        for j in range(m):
            for k in range(m):
                if j != k:
                    dd[j, k] = np.nan
    return F0, d, db, dd


def fd_t(F: Callable, stencil: FDStencil, t0, box=None, mixed: bool = True,
         threads: int = 1) -> FDResult:
    """Wirtinger derivatives of ``F`` (scalar- or array-valued) at ``t0``.

    Evaluations are collected first, run (optionally on ``threads``
    workers) in a fixed order, and then combined, so results do not depend
    on the worker count.  ``box`` (max ``|t^j|`` per parameter) rejects
    stencils that leave the parameter box.
    """
    t0 = np.atleast_1d(np.asarray(t0, dtype=complex))
    m = t0.size
    pts = []
    for h in stencil.steps:
        pts.extend(t0 + e for e in _offsets(m, h, mixed and m > 1))
    if box is not None:
        b = np.asarray(box, dtype=float) + 1e-12
        for p in pts:
            if np.any(np.abs(p) > b):
                raise ParameterBoxError(f"FD stencil point {p.tolist()} leaves the parameter box {tuple(box)}")
    keys = []
    for p in pts:
        k = _key(p)
        if k not in keys:
            keys.append(k)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            vals = list(ex.map(lambda k: np.asarray(F(np.array(k)), dtype=complex), keys))
    else:
        vals = [np.asarray(F(np.array(k)), dtype=complex) for k in keys]
    table = dict(zip(keys, vals))

    def get(t):
        return table[_key(t)]

    results = [_central(get, t0, m, h, mixed) for h in stencil.steps]
    if len(results) == 1:
        return FDResult(*results[0])
    (F0, d1, b1, m1), (_, d2, b2, m2) = results
    return FDResult(F0, d2 + (d2 - d1) / 3, b2 + (b2 - b1) / 3, m2 + (m2 - m1) / 3)


# ---------------------------------------------------------------------------
# fibers and spaces over the stencil


@dataclass(frozen=True)
class Resolution:
    N: int = 24
    n_radial: int = 48
    n_angular: int = 256


@lru_cache(maxsize=32)
def _quad_cached(family, tkey, n_radial, n_angular):
    return build_quadrature(family, np.array(tkey), n_radial, n_angular)


@lru_cache(maxsize=32)
def _space_cached(family, weight, tkey, res):
    return build_space(_quad_cached(family, tkey, res.n_radial, res.n_angular), weight, res.N)


def fiber_quadrature(family: DomainFamily, t, res: Resolution = Resolution()) -> FiberQuadrature:
    return _quad_cached(family, _key(_as_param(t, family.m)), res.n_radial, res.n_angular)


def fiber_space(family: DomainFamily, weight: WeightPreset, t, res: Resolution = Resolution()) -> BergmanSpace:
    """Bergman space of ``D_t``; memoized, since stencils revisit the same fibers."""
    return _space_cached(family, weight, _key(_as_param(t, family.m)), res)


def _check_interior(quad: FiberQuadrature, points):
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    dist = quad.boundary_distance(p)
    limit = INTERIOR_FRACTION * quad.mean_radius
    bad = (dist < limit) | ~quad.is_inside(p)
    if np.any(bad):
        raise InteriorRegionError(
            f"points {p[bad].tolist()} are within {limit:.3g} of the boundary of D_t at t={quad.t.tolist()}"
        )


def contour_contraction(quad: FiberQuadrature, values, v) -> complex:
    """``int_{bD_t} F * (V contracted into dA)`` with ``V = d/dt - v d/dmu``."""
    return complex(np.sum(values * (-0.5j) * v * np.conj(quad.boundary_dz)))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class VariationReport:
    """Formula value next to its oracle.

    ``rel_residual`` is ``abs_residual / |oracle|``, or ``abs_residual``
    itself when the oracle is exactly zero.
    """

    scenario: str
    formula: complex
    oracle: complex
    abs_residual: float
    rel_residual: float
    terms: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @classmethod
    def make(cls, scenario, formula, oracle, terms=None, metadata=None) -> "VariationReport":
        formula = complex(formula)
        oracle = complex(oracle)
        a = abs(formula - oracle)
        r = a / abs(oracle) if oracle != 0 else a
        return cls(scenario, formula, oracle, a, r, dict(terms or {}), dict(metadata or {}))

    def passes(self, atol: float, rtol: float) -> bool:
        return self.abs_residual <= max(atol, rtol * abs(self.oracle))


def _meta(res: Resolution, stencil: FDStencil):
    return {"N": res.N, "n_radial": res.n_radial, "n_angular": res.n_angular,
            "h": stencil.h, "scheme": stencil.scheme}


# ---------------------------------------------------------------------------
# fiber integrals


@dataclass(frozen=True)
class Integrand:
    """``f(t, zeta)`` with its derivative ``f_j`` in the parameter; ``fn`` returns ``(f, f_j)``."""

    name: str
    fn: Callable = field(compare=False)
    description: str = ""

    def __call__(self, t, z):
        return self.fn(np.atleast_1d(np.asarray(t, dtype=complex)), z)


def _const_in_t(g):
    def fn(t, z):
        return g(z), np.zeros((t.size,) + z.shape, dtype=complex)
    return fn


def _t_coupled(t, z):
    d = z - t[0]
    fj = np.zeros((t.size,) + z.shape, dtype=complex)
    fj[0] = -np.conj(d)
    return np.abs(d) ** 2, fj


def _gauss_t(t, z):
    g = np.exp(-np.abs(z) ** 2)
    fj = np.zeros((t.size,) + z.shape, dtype=complex)
    fj[0] = 0.5 * g
    return g * (1.0 + np.real(t[0])), fj


INTEGRANDS = {
    "one": Integrand("one", _const_in_t(lambda z: np.ones_like(z, dtype=float)), "f = 1 (area)"),
    "abs2": Integrand("abs2", _const_in_t(lambda z: np.abs(z) ** 2), "f = |zeta|^2"),
    "exp_re": Integrand("exp_re", _const_in_t(lambda z: np.exp(np.real(z))), "f = exp(Re zeta)"),
    "t_coupled": Integrand("t_coupled", _t_coupled, "f = |zeta - t^1|^2"),
    "gauss_t": Integrand("gauss_t", _gauss_t, "f = exp(-|zeta|^2) (1 + Re t^1)"),
}


def fiber_integral_derivative(family: DomainFamily, integrand: Integrand | str, t, j: int = 0,
                              res: Resolution = Resolution(), stencil: FDStencil = FDStencil(),
                              threads: int = 1) -> VariationReport:
    """``d/dt^j int_{D_t} f dA`` as a boundary contraction plus an interior term, against FD."""
    if isinstance(integrand, str):
        integrand = INTEGRANDS[integrand]
    t = _as_param(t, family.m)
    quad = fiber_quadrature(family, t, res)
    f_in, fj_in = integrand(t, quad.interior_nodes)
    interior = complex(np.sum(fj_in[j] * quad.interior_weights))
    f_bd, _ = integrand(t, quad.boundary_nodes)
    v = quasi_ke_field(evaluate_jet(family, t, quad.boundary_nodes), j).v
    boundary = contour_contraction(quad, f_bd, v)

    def F(s):
        q = fiber_quadrature(family, s, res)
        return np.sum(integrand(s, q.interior_nodes)[0] * q.interior_weights)

    oracle = fd_t(F, stencil, t, family.box, mixed=False, threads=threads).d[j]
    return VariationReport.make(
        f"fiber-integral/{family.preset_id}/{integrand.name}/j={j}", interior + boundary, oracle,
        {"interior": interior, "boundary": boundary}, _meta(res, stencil))


# ---------------------------------------------------------------------------
# kernel variations


def _kernel_fn(family, weight, res, zeta, eta):
    z = np.asarray(zeta, dtype=complex)
    w = np.asarray(eta, dtype=complex)

    def F(s):
        return eval_kernel(fiber_space(family, weight, s, res), z, w)
    return F


def first_variation(family: DomainFamily, weight: WeightPreset, t, zeta, eta, j: int = 0,
                    res: Resolution = Resolution(), stencil: FDStencil = FDStencil(),
                    threads: int = 1) -> VariationReport:
    """``dK^t(zeta, conj eta)/dt^j``: weight term minus boundary contraction, against FD."""
    t = _as_param(t, family.m)
    space = fiber_space(family, weight, t, res)
    quad = space.quad
    _check_interior(quad, [zeta, eta])
    kz = eval_kernel(space, zeta, eta)

    mu = quad.interior_nodes
    wj = weight.jet(t, mu)
    g_in = eval_kernel(space, mu, eta) * np.conj(eval_kernel(space, mu, zeta))
    weight_term = complex(np.sum(wj.phi_j[j] * g_in * space.measure))

    b = quad.boundary_nodes
    g_bd = (eval_kernel(space, b, eta) * np.conj(eval_kernel(space, b, zeta))
            * np.exp(-weight.value(t, b)))
    v = quasi_ke_field(evaluate_jet(family, t, b), j).v
    boundary = contour_contraction(quad, g_bd, v)

    F = _kernel_fn(family, weight, res, zeta, eta)
    oracle = fd_t(F, stencil, t, family.box, mixed=False, threads=threads).d[j]
    return VariationReport.make(
        f"first-variation/{family.preset_id}/{weight.preset_id}/j={j}",
        weight_term - boundary, oracle,
        {"weight": weight_term, "boundary": -boundary, "kernel": kz}, _meta(res, stencil))


def _derivative_kernels(family, weight, t, etas, res, stencil, threads):
    """FD of ``t -> K^t(mu, conj eta_p)`` at the interior nodes ``mu`` of ``D_t``.

    Returns ``dbar`` with shape ``(m, n_nodes, r)``; entry ``[k, :, p]`` is
    ``d/d conj(t^k) K^t(., conj eta_p)``.
    """
    base = fiber_space(family, weight, t, res)
    mu = base.quad.interior_nodes
    etas = np.atleast_1d(np.asarray(etas, dtype=complex))

    def F(s):
        sp = fiber_space(family, weight, s, res)
        return sp.basis(mu) @ np.conj(sp.basis(etas)).T

    fd = fd_t(F, stencil, t, family.box, mixed=False, threads=threads)
    return base, fd.dbar


def _membership_residual(space, samples, sections) -> float:
    """Change of each column of ``samples`` under the Bergman projection.

    Measured relative to the larger of the column norm and the norm of the
    matching kernel section in ``sections``, so that derivatives which
    vanish identically do not report rounding noise as a relative error.
    """
    worst = 0.0
    for col, sec in zip(samples.T, sections.T):
        n = max(space.norm2(col), space.norm2(sec))
        c = project(space, col)
        worst = max(worst, float(np.sqrt(space.norm2(col - space.node_basis @ c) / n)))
    return worst


def second_variation_planar(family: DomainFamily, t, zeta, eta, j: int = 0, k: int = 0,
                            res: Resolution = Resolution(), stencil: FDStencil = FDStencil(),
                            weight: WeightPreset | None = None, threads: int = 1) -> VariationReport:
    """``d^2 K^t(zeta, conj eta) / dt^j d conj(t^k)`` for the unweighted kernel as three terms.

    Boundary term ``(1/2) int b_{j kbar} K(mu, conj eta) conj(K(mu, conj zeta)) dsigma``,
    derivative-kernel term ``<d_kbar K(., conj eta), d_jbar K(., conj zeta)>``,
    harmonic term ``<H(v^j_mubar K(., conj eta)), H(v^k_mubar K(., conj zeta))>``
    with ``H`` the projection onto conjugate-holomorphic functions.
    """
    weight = weight or weight_preset("zero")
    if not weight.is_zero:
        raise ValueError("the planar second-variation identity is implemented for phi = 0 only")
    t = _as_param(t, family.m)
    space, dk = _derivative_kernels(family, weight, t, [eta, zeta], res, stencil, threads)
    quad = space.quad
    _check_interior(quad, [zeta, eta])

    b = quad.boundary_nodes
    dens = boundary_density(evaluate_jet(family, t, b))[j, k]
    kb_eta = eval_kernel(space, b, np.full(b.shape, eta))
    kb_zeta = eval_kernel(space, b, np.full(b.shape, zeta))
    boundary = complex(0.5 * np.sum(dens * kb_eta * np.conj(kb_zeta) * quad.boundary_weights))

    # <d_kbar K(., eta), d_jbar K(., zeta)>
    deriv = space.inner(dk[k, :, 0], dk[j, :, 1])
    mu = quad.interior_nodes
    k_eta = eval_kernel(space, mu, np.full(mu.shape, eta))
    k_zeta = eval_kernel(space, mu, np.full(mu.shape, zeta))
    membership = _membership_residual(space, np.stack([dk[k, :, 0], dk[j, :, 1]], axis=1),
                                      np.stack([k_eta, k_zeta], axis=1))

    jet_in = evaluate_jet(family, t, mu)
    vj = quasi_ke_field(jet_in, j).v_mubar
    vk = quasi_ke_field(jet_in, k).v_mubar
    hj = conj_project(space, vj * k_eta)
    hk = conj_project(space, vk * k_zeta)
    harmonic = complex(np.sum(hj * np.conj(hk)))

    F = _kernel_fn(family, weight, res, zeta, eta)
    oracle = fd_t(F, stencil, t, family.box, mixed=True, threads=threads).ddbar[j, k]
    return VariationReport.make(
        f"second-variation/{family.preset_id}/j={j},k={k}", boundary + deriv + harmonic, oracle,
        {"boundary": boundary, "derivative_kernel": deriv, "harmonic": harmonic,
         "membership_residual": membership},
        _meta(res, stencil))


# ---------------------------------------------------------------------------
# L2 identities for (0,1)-forms on a fiber


def l2_identity_check(space: BergmanSpace, g: PolyField):
    """Norm split of ``b = g dmubar`` into its harmonic part ``b_1`` and the ``a``-part.

    ``a`` is the L2-minimal solution of ``dbar a = -d_mu g``.  Returns
    ``(|b|^2, |a|^2, |b_1|^2, residual)``.
    """
    nodes = space.quad.interior_nodes
    gv = g(nodes)
    nb = space.norm2(gv)
    c1 = conj_project(space, gv)
    nb1 = float(np.sum(np.abs(c1) ** 2))
    a = minimal_dbar_solve(space, -g.d())
    na = a.norm2
    return nb, na, nb1, abs(nb - na - nb1)


def l2_inequality_check(space: BergmanSpace, c: PolyField):
    """Weighted estimate for ``dbar a = c``: returns ``(|a|^2_phi, int |c|^2 / phi_mumubar e^{-phi})``."""
    nodes = space.quad.interior_nodes
    h = space.weight.jet(space.t, nodes).phi_mumubar
    if np.any(h <= 0):
        raise ValueError("weight is not strictly subharmonic on the fiber")
    a = minimal_dbar_solve(space, c)
    bound = float(np.sum(np.abs(c(nodes)) ** 2 / h * space.measure))
    return a.norm2, bound


# ---------------------------------------------------------------------------
# Nakano form and plurisubharmonicity scans


@dataclass(frozen=True)
class NakanoForm:
    """Hermitian form indexed by ``(j, p)``: parameter direction ``j``, point ``eta_p`` (row index ``j*r + p``)."""

    points: np.ndarray
    m: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    scale: float  # max_p K(eta_p, conj eta_p)
    hermitian_residual: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])


def nakano_form(family: DomainFamily, weight: WeightPreset, t, points,
                res: Resolution = Resolution(), stencil: FDStencil = FDStencil(),
                threads: int = 1) -> NakanoForm:
    """``K_{j kbar}(eta_q, conj eta_p) - <d_kbar K(., conj eta_p), d_jbar K(., conj eta_q)>``."""
    t = _as_param(t, family.m)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    r = pts.size
    m = family.m
    space = fiber_space(family, weight, t, res)
    _check_interior(space.quad, pts)
    mu = space.quad.interior_nodes

    def F(s):
        sp = fiber_space(family, weight, s, res)
        E = sp.basis(pts)
        # [q, p] -> K(eta_q, conj eta_p); then the kernel sections at the base nodes
        return np.concatenate([(E @ np.conj(E).T).ravel(), (sp.basis(mu) @ np.conj(E).T).ravel()])

    fd = fd_t(F, stencil, t, family.box, mixed=True, threads=threads)
    kk = fd.ddbar[:, :, : r * r].reshape(m, m, r, r)  # [j, k, q, p]
    dsec = fd.dbar[:, r * r:].reshape(m, mu.size, r)  # [k, node, p]
    w = space.measure
    M = np.empty((m * r, m * r), dtype=complex)
    for j in range(m):
        for p in range(r):
            for k in range(m):
                for q in range(r):
                    inner = np.sum(dsec[k, :, p] * np.conj(dsec[j, :, q]) * w)
                    M[j * r + p, k * r + q] = kk[j, k, q, p] - inner
    herm = float(np.max(np.abs(M - np.conj(M.T))))
    Mh = 0.5 * (M + np.conj(M.T))
    ev = np.linalg.eigvalsh(Mh)
    scale = float(np.max(np.real(eval_kernel(space, pts, pts))))
    return NakanoForm(pts, m, Mh, ev, scale, herm)


def psh_scan(F: Callable, grid, stencil: FDStencil = FDStencil(), box=None, threads: int = 1):
    """Minimum over ``grid`` of the Levi form of ``log F``.

    For one parameter this is ``d^2 log F / dt dtbar``; for two, the
    smallest eigenvalue of the complex Hessian.  Returns
    ``(min_value, argmin_point, values)``.
    """
    def logF(s):
        val = np.real(np.asarray(F(s)))
        if np.any(val <= 0):
            raise ValueError(f"F is not positive at t={np.asarray(s).tolist()}")
        return np.log(val)

    values = []
    for t in grid:
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        H = fd_t(logF, stencil, t, box, mixed=True, threads=threads).ddbar
        H = np.real_if_close(0.5 * (H + np.conj(H.T))) if H.ndim == 2 else H
        values.append(float(np.min(np.linalg.eigvalsh(np.atleast_2d(H)))))
    values = np.array(values)
    i = int(np.argmin(values))
    return float(values[i]), np.atleast_1d(np.asarray(grid[i], dtype=complex)), values
