"""First-order modulation systems averaged over one roll-wave period.

Two 2x2 systems of conservation laws in the wave parameters (H_s, scaled
H_-) are assembled: the wavenumber-transport ("Whitham") system built from
the averaged mass equation plus the eikonal relation, and the direct
average of both conservative equations.  Their characteristics and
hyperbolicity regions predict (respectively, fail to predict) the
low-frequency spectral behavior of the underlying wave.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSystemError
from .profile import Wave, WaveParameters, psi, zplus, zplus_prime

#: coincidence tolerance for the second characteristic hitting the first
CHAR_COINCIDENCE_RTOL = 1e-9


@dataclass(frozen=True)
class ModulationJacobians:
    a0: np.ndarray
    a1: np.ndarray
    system_tag: str
    det_a0: float
    evolutionary: bool


@dataclass(frozen=True)
class Characteristics:
    alpha1: float
    alpha2: float
    hyperbolic: bool
    jordan_defect: bool


def param_derivatives(p: WaveParameters, quad_rtol: float = 1e-11) -> dict:
    """Derivatives of the scaled period/averages with respect to scaled H_-.

    The integrands depend on the integration variable only, so moving the
    endpoints is the whole derivative: the upper face H_+ moves with slope
    d(zplus)/dH_- from the jump relation.  H_s derivatives follow from the
    exact power laws and are exposed via the returned scaled values.
    """
    wave = Wave(WaveParameters(p.froude, p.hminus_scaled, 1.0), quad_rtol=quad_rtol)
    F = p.froude
    hm, hp = wave.hm, wave.hp
    zp = float(zplus_prime(hm))
    psi_m = float(psi(hm, F))
    psi_p = float(psi(hp, F))

    def g(h):
        return (1.0 / h + h * h / 2.0) / F**2

    ell = wave.ell
    ellp = zp / psi_p - 1.0 / psi_m
    ell_hbar_p = zp * hp / psi_p - hm / psi_m
    ell_gbar_p = zp * g(hp) / psi_p - g(hm) / psi_m
    hbar_p = (ell_hbar_p - wave.hbar * ellp) / ell
    gbar_p = (ell_gbar_p - wave.gbar * ellp) / ell
    return {
        "ell": ell, "ell_prime": ellp,
        "hbar": wave.hbar, "hbar_prime": hbar_p,
        "ell_hbar_prime": ell_hbar_p,
        "gbar": wave.gbar, "gbar_prime": gbar_p,
        "zplus_prime": zp,
        "xminus_prime": 1.0 / psi_m,
        "xs_scaled": wave.xs_scaled,
    }


def whitham_jacobians(p: WaveParameters, quad_rtol: float = 1e-11) -> ModulationJacobians:
    """Jacobians of the wavenumber-transport system w.r.t. (H_s, scaled H_-)."""
    d = param_derivatives(p, quad_rtol)
    F, Hs = p.froude, p.h_sonic
    cb = 1.0 + 1.0 / F
    qb = 1.0 / F
    ell, ellp = d["ell"], d["ell_prime"]
    hb, hbp = d["hbar"], d["hbar_prime"]
    a0 = np.array([
        [hb, Hs * hbp],
        [-1.0 / (Hs**2 * ell), -ellp / (Hs * ell**2)],
    ])
    a1 = np.array([
        [1.5 * np.sqrt(Hs) * (cb * hb - qb), Hs**1.5 * cb * hbp],
        [-0.5 * cb / (Hs**1.5 * ell), -cb * ellp / (np.sqrt(Hs) * ell**2)],
    ])
    det = float(np.linalg.det(a0))
    scale = np.abs(a0).max() ** 2
    return ModulationJacobians(a0, a1, "whitham", det, abs(det) > 1e-12 * scale)


def averaged_jacobians(p: WaveParameters, quad_rtol: float = 1e-11) -> ModulationJacobians:
    """Jacobians of the directly averaged system w.r.t. (H_s, scaled H_-)."""
    d = param_derivatives(p, quad_rtol)
    F, Hs = p.froude, p.h_sonic
    cb = 1.0 + 1.0 / F
    qb = 1.0 / F
    hb, hbp = d["hbar"], d["hbar_prime"]
    gb, gbp = d["gbar"], d["gbar_prime"]
    a0 = np.array([
        [hb, Hs * hbp],
        [1.5 * np.sqrt(Hs) * (cb * hb - qb), Hs**1.5 * cb * hbp],
    ])
    a1 = np.array([
        [1.5 * np.sqrt(Hs) * (cb * hb - qb), Hs**1.5 * cb * hbp],
        [2.0 * Hs * (cb**2 * hb - 2.0 * cb * qb + gb), Hs**2 * (cb**2 * hbp + gbp)],
    ])
    det = float(np.linalg.det(a0))
    scale = np.abs(a0).max() ** 2
    return ModulationJacobians(a0, a1, "averaged", det, abs(det) > 1e-12 * scale)


def dispersion(jac: ModulationJacobians, lam, xi):
    """Dispersion function det(lam*A0 + i*xi*A1) of a first-order system."""
    a0, a1 = jac.a0, jac.a1
    m = lam * a0.astype(complex) + 1j * xi * a1.astype(complex)
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def whitham_characteristics(p: WaveParameters, quad_rtol: float = 1e-11) -> Characteristics:
    """Characteristic speeds (c, alpha2) of the wavenumber-transport system.

    The first characteristic is the wave speed exactly; hyperbolicity can
    only fail through a Jordan block when the two coincide.
    """
    d = param_derivatives(p, quad_rtol)
    F, Hs = p.froude, p.h_sonic
    c = np.sqrt(Hs) * (1.0 + 1.0 / F)
    cb = 1.0 + 1.0 / F
    qb = 1.0 / F
    ell, ellp = d["ell"], d["ell_prime"]
    hb, hbp = d["hbar"], d["hbar_prime"]
    denom = ell * hbp - hb * ellp
    scale = abs(ell * hbp) + abs(hb * ellp)
    if abs(denom) <= 1e-14 * scale:
        raise DegenerateSystemError(
            f"degenerate_system: det A0 ~ 0 at F={F}, H-={p.hminus_scaled}")
    alpha2 = c + np.sqrt(Hs) * (1.5 * ellp * qb - 0.5 * cb * d["ell_hbar_prime"]) / denom
    coincide = abs(alpha2 - c) < CHAR_COINCIDENCE_RTOL * (abs(c) + abs(alpha2))
    nontrivial_block = abs(ell * (cb * hb - 1.5 * qb)) > 1e-12
    return Characteristics(
        alpha1=float(c), alpha2=float(alpha2),
        hyperbolic=not (coincide and nontrivial_block),
        jordan_defect=bool(coincide and nontrivial_block))


def averaged_discriminant(p: WaveParameters, quad_rtol: float = 1e-11) -> float:
    """Discriminant of the averaged system's characteristic polynomial.

    Negative values mean complex characteristics (ellipticity, hence
    ill-posedness of the averaged model); the zero level set bounds its
    hyperbolicity region.  Computed in the scaled frame where it reads
    (Hbar'(F+1-2F^2 gbar) + Hbar F^2 gbar')^2
        + F^2 gbar' Hbar' ((F+1) Hbar - 3)^2.
    """
    d = param_derivatives(p, quad_rtol)
    F = p.froude
    hb, hbp = d["hbar"], d["hbar_prime"]
    gb, gbp = d["gbar"], d["gbar_prime"]
    return float((hbp * (F + 1.0 - 2.0 * F**2 * gb) + hb * F**2 * gbp) ** 2
                 + F**2 * gbp * hbp * ((F + 1.0) * hb - 3.0) ** 2)


def averaged_characteristics(p: WaveParameters, quad_rtol: float = 1e-11):
    """Eigenvalues of (A0)^-1 A1 for the averaged system (possibly complex)."""
    jac = averaged_jacobians(p, quad_rtol)
    vals = np.linalg.eigvals(np.linalg.solve(jac.a0, jac.a1))
    return np.sort_complex(vals)
