"""Smooth families of star-shaped planar domains and their fiber quadrature.

A family is described by a real defining function ``rho(t, zeta)`` on
``C^m x C`` that is negative inside each fiber ``D_t``.  Every preset hands
back its Wirtinger jet analytically; nothing here differentiates
numerically.

Index conventions for :class:`DefiningJet`: ``j``/``k`` run over the
parameters ``t^j`` and ``mu`` is the fiber coordinate.  Array fields are
vectorized over the trailing axis (the sample points).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BoundaryTraceError",
    "DefiningJet",
    "DomainFamily",
    "FiberQuadrature",
    "ParameterBoxError",
    "build_quadrature",
    "evaluate_jet",
    "family_preset",
    "FAMILY_PRESETS",
    "trace_boundary",
]


class ParameterBoxError(ValueError):
    """Raised when a parameter point lies outside a preset's box."""


class BoundaryTraceError(RuntimeError):
    """Raised when a fiber cannot be traced as a star-shaped domain."""


@dataclass(frozen=True)
class DefiningJet:
    """Wirtinger partials of a defining function at a batch of points.

    Shapes: scalars ``(P,)``; ``rho_j``-like ``(m, P)``; ``rho_jkbar``
    ``(m, m, P)``.  The three third-order entries are the ones the
    Kodaira-Spencer coefficient of the quasi-Kahler-Einstein field needs.
    """

    rho: np.ndarray
    rho_j: np.ndarray
    rho_mu: np.ndarray
    rho_jkbar: np.ndarray
    rho_jmubar: np.ndarray
    rho_mumubar: np.ndarray
    rho_mubarmubar: np.ndarray
    rho_jmubarmubar: np.ndarray
    rho_mumubarmubar: np.ndarray

    @property
    def rho_kbar(self) -> np.ndarray:
        return np.conj(self.rho_j)

    @property
    def rho_mubar(self) -> np.ndarray:
        return np.conj(self.rho_mu)

    @property
    def rho_kbarmu(self) -> np.ndarray:
        return np.conj(self.rho_jmubar)

    @property
    def m(self) -> int:
        return self.rho_j.shape[0]


def _jet(m, shape, *, rho, rho_j, rho_mu, rho_jkbar=None, rho_jmubar=None,
         rho_mumubar=None, rho_mubarmubar=None, rho_jmubarmubar=None,
         rho_mumubarmubar=None) -> DefiningJet:
    zc = np.zeros(shape, dtype=complex)

    def fill(val, lead=()):
        if val is None:
            return np.zeros(lead + shape, dtype=complex)
        arr = np.asarray(val, dtype=complex)
        if lead and arr.ndim == len(lead):
            arr = arr.reshape(lead + (1,) * len(shape))
        return np.broadcast_to(arr, lead + shape).copy()

    rho_jkbar = fill(rho_jkbar, (m, m))
    # Hermitian in (j, k) with real diagonal by construction of the presets
    rho_jkbar = 0.5 * (rho_jkbar + np.conj(np.swapaxes(rho_jkbar, 0, 1)))
    return DefiningJet(
        rho=np.real(fill(rho)),
        rho_j=fill(rho_j, (m,)),
        rho_mu=fill(rho_mu),
        rho_jkbar=rho_jkbar,
        rho_jmubar=fill(rho_jmubar, (m,)),
        rho_mumubar=np.real(fill(rho_mumubar)) + np.real(zc),
        rho_mubarmubar=fill(rho_mubarmubar),
        rho_jmubarmubar=fill(rho_jmubarmubar, (m,)),
        rho_mumubarmubar=fill(rho_mumubarmubar),
    )


@dataclass(frozen=True)
class DomainFamily:
    """A preset-backed family ``{D_t}`` with a hand-coded defining jet."""

    preset_id: str
    params: tuple
    center: complex
    m: int
    box: tuple  # max |t^j| per parameter
    jet_fn: Callable = field(repr=False, compare=False)
    description: str = ""

    def contains(self, t) -> bool:
        t = _as_param(t, self.m)
        return bool(np.all(np.abs(t) <= np.asarray(self.box) + 1e-12))

    def rho(self, t, zeta):
        return evaluate_jet(self, t, zeta).rho


def _as_param(t, m: int) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    if t.shape != (m,):
        raise ValueError(f"parameter point must have {m} complex entries, got shape {t.shape}")
    return t


def evaluate_jet(family: DomainFamily, t, zeta) -> DefiningJet:
    """Evaluate the defining-function jet of ``family`` at ``(t, zeta)``.

    ``zeta`` may be a scalar or any array; the returned fields are
    flattened over the points.
    """
    t = _as_param(t, family.m)
    if not family.contains(t):
        raise ParameterBoxError(
            f"t={t.tolist()} outside the parameter box {family.box} of {family.preset_id!r}"
        )
    z = np.atleast_1d(np.asarray(zeta, dtype=complex)).ravel()
    return family.jet_fn(t, z)


# ---------------------------------------------------------------------------
# presets


def _scaled_disk(t, z):
    # rho = |zeta|^2 - |1 + t|^2
    s = 1.0 + t[0]
    return _jet(1, z.shape, rho=np.abs(z) ** 2 - abs(s) ** 2, rho_j=[-np.conj(s)],
                rho_mu=np.conj(z), rho_jkbar=[[-1.0]], rho_mumubar=1.0)


def _squeezed_disk(t, z):
    # rho = |zeta|^2 - 1 + Re(t zeta^2)
    t0 = t[0]
    return _jet(1, z.shape, rho=np.abs(z) ** 2 - 1.0 + np.real(t0 * z * z),
                rho_j=[0.5 * z * z], rho_mu=np.conj(z) + t0 * z, rho_mumubar=1.0,
                rho_mubarmubar=np.conj(t0))


def _fixed_disk(t, z):
    return _jet(1, z.shape, rho=np.abs(z) ** 2 - 1.0, rho_j=[0.0], rho_mu=np.conj(z),
                rho_mumubar=1.0)


def _squeezed_disk_2p(t, z):
    # rho = |zeta|^2 - 1 + Re(t1 zeta^2) + |t2|^2
    t1, t2 = t
    return _jet(2, z.shape, rho=np.abs(z) ** 2 - 1.0 + np.real(t1 * z * z) + abs(t2) ** 2,
                rho_j=[0.5 * z * z, np.conj(t2) * np.ones_like(z)],
                rho_mu=np.conj(z) + t1 * z, rho_jkbar=[[0.0, 0.0], [0.0, 1.0]],
                rho_mumubar=1.0, rho_mubarmubar=np.conj(t1))


def motion_disk_jet(a: complex, da: complex, z: np.ndarray) -> DefiningJet:
    """Jet of ``rho = |w|^2 - 1`` with ``w = (zeta - a zeta_bar)/(1 - |a|^2)``.

    This is the defining function of the image of the unit disk under
    ``z -> z + a z_bar``; ``a`` depends holomorphically on ``t`` with
    derivative ``da``.
    """
    ab = np.conj(a)
    zb = np.conj(z)
    s = 1.0 - abs(a) ** 2
    w = z - a * zb
    nn = np.abs(w) ** 2
    n_z = zb * (1.0 + abs(a) ** 2) - 2.0 * ab * z
    n_a = -zb * np.conj(w)
    n_ab = np.conj(n_a)
    n_aab = np.abs(z) ** 2
    n_azb = -2.0 * zb + ab * z
    n_zb = np.conj(n_z)

    rho_a = n_a / s**2 + 2.0 * ab * nn / s**3
    rho_aab = n_aab / s**2 + 2.0 * a * n_a / s**3 + 2.0 * nn / s**3 \
        + 2.0 * ab * n_ab / s**3 + 6.0 * abs(a) ** 2 * nn / s**4
    rho_azb = n_azb / s**2 + 2.0 * ab * n_zb / s**3
    rho_azbzb = -2.0 / s**2 - 4.0 * abs(a) ** 2 / s**3
    return _jet(1, z.shape, rho=nn / s**2 - 1.0, rho_j=[da * rho_a], rho_mu=n_z / s**2,
                rho_jkbar=[[abs(da) ** 2 * rho_aab]], rho_jmubar=[da * rho_azb],
                rho_mumubar=(1.0 + abs(a) ** 2) / s**2, rho_mubarmubar=-2.0 * a / s**2,
                rho_jmubarmubar=[da * rho_azbzb * np.ones_like(z)])


# a(t) catalog for motions z -> z + a(t) z_bar: name -> (a, a', box radius)
MOTION_COEFFICIENTS = {
    "0": (lambda t, eps: 0.0j, lambda t, eps: 0.0j, 0.5),
    "t": (lambda t, eps: t, lambda t, eps: 1.0 + 0.0j, 0.5),
    "t2": (lambda t, eps: t * t, lambda t, eps: 2.0 * t, 0.7),
    "eps_t": (lambda t, eps: eps * t, lambda t, eps: eps + 0.0j, 0.5),
}

MOTION_PREFIX = "motion:z+a(t)zbar:a="


def _motion_family(name: str, params: tuple) -> DomainFamily:
    a_fn, da_fn, box = MOTION_COEFFICIENTS[name]
    eps = complex(params[0]) if params else 1.0
    if name == "eps_t":
        if not params:
            raise ValueError("motion a=eps_t needs one parameter eps")
        if abs(eps) * box >= 0.8:
            raise ValueError(f"|eps| too large for the box: sup|a| = {abs(eps) * box} >= 0.8")

    def jet(t, z):
        return motion_disk_jet(a_fn(t[0], eps), da_fn(t[0], eps), z)

    return DomainFamily(MOTION_PREFIX + name, tuple(params), 0j, 1, (box,), jet,
                        f"graph of the holomorphic motion z + a(t) z_bar, a={name}")


FAMILY_PRESETS = {
    "scaled_disk": ("disk of radius |1+t|; Levi-flat total space, trivial motion", 1, (0.4,),
                    _scaled_disk),
    "squeezed_disk": ("|zeta|^2 - 1 + Re(t zeta^2) < 0; pseudoconvex, nontrivial", 1, (0.4,),
                      _squeezed_disk),
    "fixed_disk": ("t-independent unit disk", 1, (0.5,), _fixed_disk),
    "squeezed_disk_2p": ("|zeta|^2 - 1 + Re(t1 zeta^2) + |t2|^2 < 0; two parameters", 2,
                         (0.3, 0.3), _squeezed_disk_2p),
}


def family_preset(preset_id: str, params: Sequence = ()) -> DomainFamily:
    """Look up a family preset by id; motion families use ``motion:z+a(t)zbar:a=...``."""
    params = tuple(params)
    if preset_id.startswith(MOTION_PREFIX):
        name = preset_id[len(MOTION_PREFIX):]
        if name not in MOTION_COEFFICIENTS:
            raise KeyError(f"unknown preset {preset_id!r}")
        return _motion_family(name, params)
    if preset_id not in FAMILY_PRESETS:
        raise KeyError(f"unknown preset {preset_id!r}")
    desc, m, box, fn = FAMILY_PRESETS[preset_id]
    return DomainFamily(preset_id, params, 0j, m, box, fn, desc)


def family_preset_ids() -> list[str]:
    return list(FAMILY_PRESETS) + [MOTION_PREFIX + k for k in MOTION_COEFFICIENTS]


# ---------------------------------------------------------------------------
# boundary tracing and quadrature


def _ray_rho(family, t, theta, r):
    z = family.center + r * np.exp(1j * theta)
    jet = family.jet_fn(t, z)
    drho_dr = 2.0 * np.real(jet.rho_mu * np.exp(1j * theta))
    return jet.rho, drho_dr, jet


def trace_boundary(family: DomainFamily, t, n_angular: int, tol: float = 1e-13):
    """Find the boundary radius along ``n_angular`` equispaced rays.

    Safeguarded Newton iteration inside a sign-change bracket, falling back
    to bisection whenever a Newton step leaves the bracket.

    Returns
    -------
    theta, radius, dradius : ndarray
        Ray angles, boundary radii ``R(theta)`` and ``dR/dtheta``.
    """
    t = _as_param(t, family.m)
    if not family.contains(t):
        raise ParameterBoxError(f"t={t.tolist()} outside the parameter box of {family.preset_id!r}")
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    rho0 = family.jet_fn(t, np.array([family.center])).rho[0]
    if not rho0 < 0:
        raise BoundaryTraceError(f"center {family.center} is not inside the fiber at t={t.tolist()}")

    lo = np.zeros(n_angular)
    hi = np.full(n_angular, 0.5)
    for _ in range(60):
        val, _, _ = _ray_rho(family, t, theta, hi)
        neg = val <= 0
        if not neg.any():
            break
        lo = np.where(neg, hi, lo)
        hi = np.where(neg, 2.0 * hi, hi)
    else:
        raise BoundaryTraceError("fiber appears unbounded along some ray")

    r = 0.5 * (lo + hi)
    for _ in range(200):
        val, der, _ = _ray_rho(family, t, theta, r)
        lo = np.where(val < 0, r, lo)
        hi = np.where(val > 0, r, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = r - val / der
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        r_new = np.where(ok, newton, 0.5 * (lo + hi))
        done = (np.abs(val) <= tol) & (np.abs(r_new - r) <= 1e-15 * np.maximum(r, 1.0))
        r = r_new
        if done.all():
            break
    val, der, jet = _ray_rho(family, t, theta, r)
    scale = abs(rho0)
    if np.max(np.abs(val)) > 1e-12 * max(scale, 1.0):
        raise BoundaryTraceError(f"boundary root-find did not converge (max |rho| = {np.max(np.abs(val)):.3e})")

    # star-shapedness: rho must stay negative strictly inside each ray
    frac = np.linspace(0.02, 0.98, 49)[:, None]
    inside = family.jet_fn(t, (family.center + frac * r[None, :] * np.exp(1j * theta)[None, :]).ravel()).rho
    if np.any(inside >= 0):
        raise BoundaryTraceError(f"fiber of {family.preset_id!r} at t={t.tolist()} is not star-shaped about the center")
    if np.any(der <= 0):
        raise BoundaryTraceError("defining function does not increase across the boundary")

    # implicit differentiation of rho(center + R(theta) e^{i theta}) = 0
    e = np.exp(1j * theta)
    dr = -r * np.real(1j * jet.rho_mu * e) / np.real(jet.rho_mu * e)
    return theta, r, dr


@dataclass(frozen=True)
class FiberQuadrature:
    """Interior (area) and boundary (arclength) rules on one fiber ``D_t``.

    Interior nodes come from a Gauss-Legendre rule in the normalized radius
    times the periodic trapezoid rule in angle, mapped to the star-shaped
    fiber.  ``boundary_dz`` holds ``gamma'(theta) * dtheta`` so that contour
    integrals are ``sum(F * boundary_dz)``.
    """

    t: np.ndarray
    center: complex
    interior_nodes: np.ndarray
    interior_weights: np.ndarray
    boundary_nodes: np.ndarray
    boundary_weights: np.ndarray
    boundary_dz: np.ndarray
    boundary_normal: np.ndarray
    radius: np.ndarray
    resolution: tuple

    @property
    def boundary_tangent(self) -> np.ndarray:
        return 1j * self.boundary_normal

    @property
    def area(self) -> float:
        return float(np.sum(self.interior_weights))

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.boundary_weights))

    @property
    def mean_radius(self) -> float:
        return float(np.mean(self.radius))

    def boundary_distance(self, points) -> np.ndarray:
        """Distance from ``points`` to the (discretized) boundary curve."""
        p = np.atleast_1d(np.asarray(points, dtype=complex))
        return np.min(np.abs(p[:, None] - self.boundary_nodes[None, :]), axis=1)

    def is_inside(self, points) -> np.ndarray:
        p = np.atleast_1d(np.asarray(points, dtype=complex)) - self.center
        n = self.radius.size
        ang = np.mod(np.angle(p), 2 * np.pi)
        # periodic linear interpolation of R(theta) is plenty for membership
        x = ang / (2 * np.pi) * n
        i0 = np.floor(x).astype(int) % n
        frac = x - np.floor(x)
        r = (1 - frac) * self.radius[i0] + frac * self.radius[(i0 + 1) % n]
        return np.abs(p) < r


def build_quadrature(family: DomainFamily, t, n_radial: int = 48, n_angular: int = 256) -> FiberQuadrature:
    """Polar product rule on the fiber ``D_t`` plus a trapezoid rule on its boundary."""
    t = _as_param(t, family.m)
    theta, r, dr = trace_boundary(family, t, n_angular)
    s, ws = np.polynomial.legendre.leggauss(n_radial)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    dtheta = 2.0 * np.pi / n_angular
    e = np.exp(1j * theta)

    nodes = family.center + s[:, None] * (r * e)[None, :]
    weights = (ws * s)[:, None] * (r**2)[None, :] * dtheta

    gamma_p = (dr + 1j * r) * e
    speed = np.abs(gamma_p)
    return FiberQuadrature(
        t=t,
        center=family.center,
        interior_nodes=nodes.ravel(),
        interior_weights=weights.ravel(),
        boundary_nodes=family.center + r * e,
        boundary_weights=speed * dtheta,
        boundary_dz=gamma_p * dtheta,
        boundary_normal=-1j * gamma_p / speed,
        radius=r,
        resolution=(n_radial, n_angular),
    )
