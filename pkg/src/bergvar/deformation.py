"""Deformation data of a family: horizontal lifts, boundary density, geodesic curvature.

The horizontal lift of ``d/dt^j`` is written ``V_j = d/dt^j - v d/dmu``;
``v_mubar`` (the d-bar of its fiber coefficient) represents the
Kodaira-Spencer class of the family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bergman import WeightJet
from .domains import DefiningJet

__all__ = [
    "DegenerateJetError",
    "FieldJet",
    "boundary_density",
    "boundary_density_from_field",
    "curvature_data",
    "geodesic_curvature",
    "motion_ks_coefficient",
    "quasi_ke_field",
]


class DegenerateJetError(ValueError):
    pass


@dataclass(frozen=True)
class FieldJet:
    v: np.ndarray
    v_mubar: np.ndarray
    tangency_residual: np.ndarray  # V_j(rho) = rho_j - v rho_mu


def quasi_ke_field(jet: DefiningJet, j: int = 0) -> FieldJet:
    """Horizontal lift for the quasi-Kahler-Einstein metric ``i ddbar(-log(-rho))`` on the fibers.

    ``v = (rho_j rho_mubar - rho rho_jmubar) / (|rho_mu|^2 - rho rho_mumubar)``;
    ``v_mubar`` is obtained by the quotient rule from the third-order jet.
    """
    rho = jet.rho
    rj = jet.rho_j[j]
    rjmb = jet.rho_jmubar[j]
    rmu = jet.rho_mu
    rmb = jet.rho_mubar
    num = rj * rmb - rho * rjmb
    den = np.abs(rmu) ** 2 - rho * jet.rho_mumubar
    if np.any(den <= 0):
        raise DegenerateJetError("quasi-KE denominator |rho_mu|^2 - rho rho_mumubar is not positive")
    v = num / den
    # d/dmubar of numerator and denominator
    num_mb = rj * jet.rho_mubarmubar - rho * jet.rho_jmubarmubar[j]
    den_mb = rmu * jet.rho_mubarmubar - rho * jet.rho_mumubarmubar
    v_mb = (num_mb * den - num * den_mb) / den**2
    return FieldJet(v, v_mb, rj - v * rmu)


def boundary_density(jet: DefiningJet) -> np.ndarray:
    """Levi-form density ``b_{j kbar}`` on the boundary, shape ``(m, m, P)``.

    ``(rho_jkbar |rho_mu|^2 - rho_jmubar rho_kbar rho_mu - rho_kbarmu rho_j rho_mubar
    + rho_j rho_kbar rho_mumubar) / |rho_mu|^3``.
    """
    rmu = jet.rho_mu
    a = np.abs(rmu)
    if np.any(a == 0):
        raise DegenerateJetError("vanishing fiber gradient on the boundary")
    rj = jet.rho_j[:, None, :]
    rkb = jet.rho_kbar[None, :, :]
    rjmb = jet.rho_jmubar[:, None, :]
    rkbm = jet.rho_kbarmu[None, :, :]
    b = (jet.rho_jkbar * a**2 - rjmb * rkb * rmu - rkbm * rj * jet.rho_mubar
         + rj * rkb * jet.rho_mumubar) / a**3
    return b


def boundary_density_from_field(jet: DefiningJet, v: np.ndarray) -> np.ndarray:
    """``<V_j, V_k>_{i ddbar rho} / |d rho|`` for fields ``V_j = d/dt^j - v[j] d/dmu``.

    Agrees with :func:`boundary_density` for any family of fields tangent to
    the boundary.
    """
    vj = v[:, None, :]
    vkb = np.conj(v)[None, :, :]
    levi = (jet.rho_jkbar - vkb * jet.rho_jmubar[:, None, :] - vj * jet.rho_kbarmu[None, :, :]
            + vj * vkb * jet.rho_mumubar)
    return levi / np.abs(jet.rho_mu)


def geodesic_curvature(wjet: WeightJet, j: int, k: int, field_v=None):
    """Geodesic curvature ``c_{j kbar}(phi)`` of the weight and its extension along a lift.

    Returns ``(c, c_ext)`` where ``c = phi_jkbar - phi_jmubar phi_kbarmu / phi_mumubar``
    and ``c_ext = c + (V_j phi_mubar) conj(V_k phi_mubar) / phi_mumubar``;
    ``field_v`` holds the fiber coefficients ``v`` of ``V_1..V_m`` (shape
    ``(m, P)``) and is required for the extension.
    """
    h = wjet.phi_mumubar
    if np.any(h <= 0):
        raise DegenerateJetError("weight is not strictly subharmonic on the fiber")
    c = wjet.phi_jkbar[j, k] - wjet.phi_jmubar[j] * wjet.phi_kbarmu[k] / h
    if field_v is None:
        return c, None
    aj = wjet.phi_jmubar[j] - field_v[j] * h
    ak = wjet.phi_jmubar[k] - field_v[k] * h
    return c, c + aj * np.conj(ak) / h


def curvature_data(wjet: WeightJet, field_v=None):
    """Hermitian ``(m, m, P)`` matrices ``c_{j kbar}(phi)`` and (if ``field_v``) ``c_{j kbar}(phi, V)``."""
    m = wjet.phi_j.shape[0]
    P = wjet.phi.shape[0]
    c = np.zeros((m, m, P), dtype=complex)
    ce = np.zeros((m, m, P), dtype=complex) if field_v is not None else None
    for j in range(m):
        for k in range(m):
            a, b = geodesic_curvature(wjet, j, k, field_v)
            c[j, k] = a
            if ce is not None:
                ce[j, k] = b
    return c, ce


def motion_ks_coefficient(f_z, J, J_j):
    """``(f_z)^2 J_j / (|f_z|^2 (1 - |J|^2))``: d-bar of the motion's velocity field in the moving coordinate."""
    J = np.asarray(J)
    if np.any(np.abs(J) >= 1):
        raise ValueError("Beltrami coefficient |J| >= 1: the motion is not quasiconformal here")
    return f_z**2 * J_j / (np.abs(f_z) ** 2 * (1.0 - np.abs(J) ** 2))
