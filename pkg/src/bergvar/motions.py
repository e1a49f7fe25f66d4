"""Holomorphic motions of the unit disk and the triviality criterion for their Bergman spaces.

Motions in the catalog are real-linear in ``z``: ``f(t, z) = b(t) z + a(t) conj(z)``
with ``b(0) = 1``, ``a(0) = 0``, so every fiber ``f(t, D)`` is an ellipse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bergman import BergmanSpace, conj_project, eval_kernel, weight_preset
from .deformation import motion_ks_coefficient, quasi_ke_field
from .domains import (
    MOTION_COEFFICIENTS,
    MOTION_PREFIX,
    DomainFamily,
    _as_param,
    evaluate_jet,
    family_preset,
)
from .variation import Resolution, fiber_space

__all__ = [
    "BeltramiField",
    "Bump",
    "MotionSpec",
    "TrivialityReport",
    "beltrami_field",
    "harmonic_parts",
    "ks_coefficient",
    "kf_functional",
    "motion_field",
    "motion_preset",
    "motion_preset_ids",
    "motion_to_family",
    "triviality_decision",
    "triviality_integral",
]

NONTRIVIAL_FACTOR = 1e-3
TRIVIAL_FACTOR = 1e-8


@dataclass(frozen=True)
class MotionSpec:
    """``f(t, z) = b(t) z + a(t) conj(z)`` on the unit disk, holomorphic in ``t``."""

    preset_id: str
    params: tuple
    box: float
    a: Callable = field(compare=False, repr=False)
    da: Callable = field(compare=False, repr=False)
    b: Callable = field(default=lambda t: 1.0 + 0j, compare=False, repr=False)
    db: Callable = field(default=lambda t: 0j, compare=False, repr=False)

    def coefficients(self, t):
        t = complex(_as_param(t, 1)[0])
        if abs(t) > self.box + 1e-12:
            raise ValueError(f"t={t} outside the motion box |t| <= {self.box}")
        return complex(self.a(t)), complex(self.da(t)), complex(self.b(t)), complex(self.db(t))

    def __call__(self, t, z):
        a, _, b, _ = self.coefficients(t)
        z = np.asarray(z, dtype=complex)
        return b * z + a * np.conj(z)

    def inverse(self, t, zeta):
        a, _, b, _ = self.coefficients(t)
        s = abs(b) ** 2 - abs(a) ** 2
        if s <= 0:
            raise ValueError("motion is not injective at this t (|a| >= |b|)")
        zeta = np.asarray(zeta, dtype=complex)
        return (np.conj(b) * zeta - a * np.conj(zeta)) / s

    def jets(self, t, z):
        """``(f_z, f_zbar, f_t, f_tz, f_tzbar)`` at ``z`` (pre-image coordinates)."""
        a, da, b, db = self.coefficients(t)
        z = np.asarray(z, dtype=complex)
        one = np.ones_like(z)
        return b * one, a * one, db * z + da * np.conj(z), db * one, da * one


def _catalog():
    out = {}
    for name, (a_fn, da_fn, box) in MOTION_COEFFICIENTS.items():
        out[MOTION_PREFIX + name] = (a_fn, da_fn, box)
    return out


SCALING_ID = "motion:(1+t)z"


def motion_preset(preset_id: str, params=()) -> MotionSpec:
    """Catalog motions ``z + a(t) conj(z)`` (``a`` in ``0, t, t2, eps_t``) and the scaling ``(1+t) z``."""
    params = tuple(params)
    if preset_id == SCALING_ID:
        return MotionSpec(preset_id, params, 0.4, lambda t: 0j, lambda t: 0j,
                          lambda t: 1.0 + t, lambda t: 1.0 + 0j)
    cat = _catalog()
    if preset_id not in cat:
        raise KeyError(f"unknown motion preset {preset_id!r}")
    a_fn, da_fn, box = cat[preset_id]
    # validates eps for eps_t
    family_preset(preset_id, params)
    eps = complex(params[0]) if params else 1.0
    return MotionSpec(preset_id, params, box, lambda t: a_fn(t, eps), lambda t: da_fn(t, eps))


def motion_preset_ids() -> list[str]:
    return list(_catalog()) + [SCALING_ID]


def motion_to_family(motion: MotionSpec) -> DomainFamily:
    """The family of fibers ``f(t, D)`` with its defining function."""
    if motion.preset_id == SCALING_ID:
        return family_preset("scaled_disk")
    return family_preset(motion.preset_id, motion.params)


@dataclass(frozen=True)
class BeltramiField:
    points: np.ndarray
    J: np.ndarray
    sup_abs: float


def beltrami_field(motion: MotionSpec, t, z) -> BeltramiField:
    fz, fzb, *_ = motion.jets(t, z)
    J = fzb / fz
    sup = float(np.max(np.abs(J)))
    if sup >= 1:
        raise ValueError(f"sup |J| = {sup} >= 1: not quasiconformal")
    return BeltramiField(np.asarray(z, dtype=complex), J, sup)


def ks_coefficient(motion: MotionSpec, t, zeta) -> np.ndarray:
    """Kodaira-Spencer coefficient of the motion at fiber points ``zeta`` of ``D_t``."""
    z = motion.inverse(t, zeta)
    a, da, b, db = motion.coefficients(t)
    fz, fzb, *_ = motion.jets(t, z)
    J = fzb / fz
    J_t = (da * b - a * db) / b**2 * np.ones_like(z)
    return motion_ks_coefficient(fz, J, J_t)


def motion_field(motion: MotionSpec, t, zeta):
    """``(v, v_mubar)`` of the lift ``d/dt - v d/dmu`` transported by the motion: ``v = -f_t(f^{-1})``."""
    z = motion.inverse(t, zeta)
    a, da, b, db = motion.coefficients(t)
    s = abs(b) ** 2 - abs(a) ** 2
    v = -(db * z + da * np.conj(z))
    v_mb = -(da * b - a * db) / s * np.ones_like(z)
    return v, v_mb


def triviality_integral(motion: MotionSpec, space: BergmanSpace, eta, j: int = 0) -> complex:
    """``int_{D_t} K^t(zeta, conj eta) k(t, zeta) dA(zeta)`` with ``k`` the Kodaira-Spencer coefficient."""
    if j != 0:
        raise ValueError("catalog motions have a single parameter")
    mu = space.quad.interior_nodes
    kv = eval_kernel(space, mu, np.full(mu.shape, eta))
    return complex(np.sum(kv * ks_coefficient(motion, space.t, mu) * space.quad.interior_weights))


def harmonic_parts(motion: MotionSpec, space: BergmanSpace, eta):
    """Pairings of the harmonic parts of ``-v_mubar K(., conj eta)`` with the constant 1.

    Returns the values obtained from the motion's own lift and from the
    quasi-Kahler-Einstein lift of the associated family; both equal the
    triviality integral.
    """
    mu = space.quad.interior_nodes
    w = space.quad.interior_weights
    kv = eval_kernel(space, mu, np.full(mu.shape, eta))
    ones = np.conj(space.node_basis).T @ w  # int conj(e_k) dA
    _, vm = motion_field(motion, space.t, mu)
    h_motion = conj_project(space, -vm * kv) @ ones
    fam = motion_to_family(motion)
    vq = quasi_ke_field(evaluate_jet(fam, space.t, mu), 0).v_mubar
    h_qke = conj_project(space, -vq * kv) @ ones
    return complex(h_motion), complex(h_qke)


# ---------------------------------------------------------------------------
# triviality decision


@dataclass(frozen=True)
class TrivialityReport:
    """Sampled triviality integrals on a ``(t, eta)`` grid; verdicts hold for the sampled grid only."""

    motion_id: str
    t_grid: np.ndarray
    eta_grid: np.ndarray
    values: np.ndarray  # (n_t, n_eta)
    max_modulus: float
    argmax: tuple  # (t, eta, j)
    scale: float
    verdict: str  # "nontrivial", "trivial-consistent" or "inconclusive"
    thresholds: tuple  # (trivial, nontrivial) absolute thresholds
    grid_relative: bool = True


def triviality_decision(motion: MotionSpec, t_grid, eta_grid,
                        res: Resolution = Resolution()) -> TrivialityReport:
    """Decide (grid-relatively) whether the triviality integrals vanish."""
    fam = motion_to_family(motion)
    zero = weight_preset("zero")
    tg = np.asarray(t_grid, dtype=complex).ravel()
    eg = np.asarray(eta_grid, dtype=complex).ravel()
    vals = np.empty((tg.size, eg.size), dtype=complex)
    scale = 0.0
    for i, t in enumerate(tg):
        sp = fiber_space(fam, zero, [t], res)
        for k, eta in enumerate(eg):
            vals[i, k] = triviality_integral(motion, sp, eta)
            scale = max(scale, float(np.real(eval_kernel(sp, eta, eta))) * sp.quad.area)
    mod = np.abs(vals)
    i, k = np.unravel_index(int(np.argmax(mod)), mod.shape)
    mx = float(mod[i, k])
    lo, hi = TRIVIAL_FACTOR * scale, NONTRIVIAL_FACTOR * scale
    if mx > hi:
        verdict = "nontrivial"
    elif mx <= lo:
        verdict = "trivial-consistent"
    else:
        verdict = "inconclusive"
    return TrivialityReport(motion.preset_id, tg, eg, vals, mx, (complex(tg[i]), complex(eg[k]), 0),
                            scale, verdict, (lo, hi))


# ---------------------------------------------------------------------------
# K_f functional


@dataclass(frozen=True)
class Bump:
    """``f(t, z) = (1 + beta sum_j t^j z^(j+1)) (1 - |z - z0|^2 / r0^2)^power`` on ``|z - z0| < r0``.

    A polynomial bump: ``C^(power-1)`` across the edge of its support, and
    integrated exactly by the polar rule of :meth:`nodes`.
    """

    z0: complex = 0j
    r0: float = 0.5
    power: int = 4
    beta: complex = 0.5
    n_radial: int = 32
    n_angular: int = 96

    def nodes(self):
        s, ws = np.polynomial.legendre.leggauss(self.n_radial)
        s = 0.5 * (s + 1.0)
        ws = 0.5 * ws
        th = 2 * np.pi * np.arange(self.n_angular) / self.n_angular
        z = self.z0 + self.r0 * s[:, None] * np.exp(1j * th)[None, :]
        w = (ws * s * self.r0**2)[:, None] * np.full(self.n_angular, 2 * np.pi / self.n_angular)[None, :]
        return z.ravel(), w.ravel()

    def __call__(self, t, z):
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        z = np.asarray(z, dtype=complex)
        q = np.clip(1.0 - np.abs(z - self.z0) ** 2 / self.r0**2, 0.0, None)
        mod = 1.0 + self.beta * sum(t[j] * z ** (j + 1) for j in range(t.size))
        return mod * q**self.power


def kf_functional(space: BergmanSpace, bump: Bump, both_routes: bool = False):
    """``K_f(t)``: squared norm of the Bergman projection of ``conj(f) e^phi``.

    Equals ``sum_k |int f e_k dA|^2``.  With ``both_routes`` also returns the
    double integral ``int int K(z, conj w) f(z) conj(f(w))``.
    """
    quad = space.quad
    if quad.boundary_distance(bump.z0)[0] - bump.r0 < 0.1 * quad.mean_radius or not quad.is_inside(bump.z0)[0]:
        raise ValueError("support of f must stay inside the fiber's interior accuracy region")
    z, w = bump.nodes()
    fw = bump(space.t, z) * w
    c = space.basis(z).T @ fw
    kf = float(np.sum(np.abs(c) ** 2))
    if not both_routes:
        return kf
    alt = 0j
    for i in range(0, z.size, 512):
        alt += complex(fw[i:i + 512] @ (space.kernel_matrix(z[i:i + 512], z) @ np.conj(fw)))
    return kf, alt
