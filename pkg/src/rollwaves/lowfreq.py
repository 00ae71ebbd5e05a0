"""Low-frequency expansion of the stability determinant and its boundaries.

Near ``(lam, xi) = (0, 0)`` the reduced determinant expands as

    Delta_hat = alpha0*lam + ((e^{i xi X} - 1)/(i X)) * alpha1 + h.o.t.

with real ``alpha0`` and purely imaginary ``alpha1``.  The nontrivial
small spectral branch is ``lam(xi) = -i alpha xi - beta xi^2 + O(xi^3)``
with ``alpha = alpha1/(i alpha0)`` and ``beta = alpha*gamma``; the wave is
sideband stable at low frequency iff ``beta > 0``.  Two codimension-one
boundaries arise: boundary I where ``alpha`` vanishes (a whole loop of
spectrum crosses the origin) and boundary II where ``gamma`` vanishes (the
curvature of the branch flips).

Sign conventions.  ``alpha`` here equals the difference alpha2 - c of the
wavenumber-transport characteristics (group velocity minus phase
velocity), which is negative on the stable side of boundary I.  Parity
indices and classification use this convention throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import modulation
from .errors import NoSignChange, RollWaveError
from .evans import evans_split
from .profile import Wave, WaveParameters, h_hom, zplus
from .singular_ode import SonicSeriesTables, integrate_second_variation


@dataclass(frozen=True)
class LowFreqCoefficients:
    alpha0: float
    alpha1_over_i: float
    alpha: float
    gamma: float
    beta: float
    alpha0_vanishes: bool
    imag_residue: float


def alpha1_closed(froude: float, hminus_scaled: float, h_sonic: float = 1.0) -> float:
    """Closed form of d_xi Delta_hat(0,0)/(i X); no quadratures involved.

    Evaluated as a cubic polynomial in the Froude number with coefficients
    polynomial in the two shock face heights.
    """
    hm = hminus_scaled
    hp = float(zplus(hm))
    F = froude
    pref = h_sonic**2 * (hp - hm) / (F**2 * (F + 1.0) * hm**2 * hp**2)
    poly = (F**3 * hm**2 * hp**2
            - 2.0 * F**2 * hm * hp * (hm + hp)
            + F * (3.0 * hm**2 * hp**2 - 4.0 * hm * hp * (hm + hp)
                   + 7.0 * hm * hp + hm**2 + hp**2)
            + hm**2 * hp**2 - 2.0 * hm * hp * (hm + hp)
            + hm**2 + hp**2 + 7.0 * hm * hp - 3.0 * (hm + hp))
    return pref * poly


def alpha1_bracket(wave: Wave) -> float:
    """Same quantity from the jump-bracket form (cross-check of the cubic)."""
    F, Hs = wave.froude, wave.h_sonic
    jr = wave.jump_source
    return (jr * (wave.h_minus - 3.0 * Hs / (F + 1.0))
            - wave.jump_h * wave.source(wave.h_minus))


def lowfreq_coefficients(wave: Wave, tables: SonicSeriesTables | None = None) -> LowFreqCoefficients:
    """alpha0, alpha1/i, alpha, gamma, beta from one lam-derivative solve."""
    if tables is None:
        tables = SonicSeriesTables(wave)
    sv = integrate_second_variation(wave, tables=tables)
    tr = sv.base
    A = wave.jump_h
    jQ = wave.jump_q
    jr = wave.jump_source
    J = wave.source(wave.h_minus)
    c = wave.c
    X = wave.period

    def flux(H, pair):
        ht, qt = pair
        Q = wave.flow(H)
        return ((H / wave.froude**2 - Q * Q / (H * H)) * ht
                + (2.0 * Q / H - c) * qt)

    f0m = flux(wave.h_minus, tr.tilde_hq_at_hminus)
    f0p = flux(wave.h_plus, tr.tilde_hq_at_hplus)
    I0 = tr.integral_tilde_h
    alpha0 = float(A * (f0p - f0m + jQ) - jr * I0)

    a1_over_iX = alpha1_closed(wave.froude, wave.hm, wave.h_sonic)
    alpha1_over_i = X * a1_over_iX
    scale = abs(A * (abs(f0p) + abs(f0m) + jQ)) + abs(jr * I0)
    vanishes = abs(alpha0) < 1e-10 * max(scale, 1e-300)
    alpha = alpha1_over_i / alpha0 if not vanishes else math.inf

    # second derivatives of Delta_hat at the origin
    v_m = (sv.v_at_hminus[1], c * sv.v_at_hminus[1] - sv.v_at_hminus[0])
    v_p = (sv.v_at_hplus[1], c * sv.v_at_hplus[1] - sv.v_at_hplus[0])
    df_m = flux(wave.h_minus, v_m)
    df_p = flux(wave.h_plus, v_p)
    d2_lam = 2.0 * (A * (df_p - df_m) - jr * sv.integral_v2 + I0 * jQ)
    w1m0 = c * tr.tilde_hq_at_hminus[0] - tr.tilde_hq_at_hminus[1]
    d1_prime = -A * f0m + jr * sv.v_at_hminus[0] - jQ * w1m0
    gamma = float(-X / 2.0 - (alpha / 2.0) * d2_lam / alpha0
                  + X * d1_prime / alpha0) if not vanishes else math.nan
    beta = alpha * gamma if not vanishes else math.nan
    return LowFreqCoefficients(
        alpha0=alpha0, alpha1_over_i=alpha1_over_i, alpha=alpha,
        gamma=gamma, beta=beta, alpha0_vanishes=vanishes, imag_residue=0.0)


def alpha0_and_alpha(wave: Wave, tables: SonicSeriesTables | None = None):
    co = lowfreq_coefficients(wave, tables)
    return co.alpha0, co.alpha


def gamma_coefficient(wave: Wave, tables: SonicSeriesTables | None = None):
    co = lowfreq_coefficients(wave, tables)
    return co.gamma, co.beta


def parity_indices(wave: Wave, coeffs: LowFreqCoefficients | None = None) -> dict:
    """Parity of the number of real positive determinant roots.

    The determinant is real and eventually positive on the real axis both
    co-periodically (xi = 0) and subharmonically (xi = pi/X), so its sign
    near lam = 0+ fixes the parity of real positive roots in between.
    With alpha = alpha2 - c as used here, odd subharmonic parity (a
    guaranteed real unstable eigenvalue) occurs on the side alpha > 0;
    this is the "unstable when the expansion coefficient is negative" side
    in the dispersion-relation sign convention.
    """
    if coeffs is None:
        coeffs = lowfreq_coefficients(wave)
    coperiodic_odd = coeffs.alpha0 < 0.0
    subharmonic_odd = coeffs.alpha1_over_i > 0.0
    return {
        "coperiodic_parity": "odd" if coperiodic_odd else "even",
        "subharmonic_parity": "odd" if subharmonic_odd else "even",
        "unstable_if_alpha_negative": bool(coperiodic_odd or subharmonic_odd),
    }


def serre_gamma0(wave: Wave) -> float:
    """Prefactor linking the determinant to the modulation dispersion function."""
    c_prime = (1.0 + 1.0 / wave.froude) / (2.0 * math.sqrt(wave.h_sonic))
    return (wave.period**3 * wave.source(wave.h_plus)
            * wave.psi_full(wave.h_minus) / c_prime)


def serre_consistency(wave: Wave, lam, xi,
                      tables: SonicSeriesTables | None = None,
                      jac: modulation.ModulationJacobians | None = None) -> float:
    """|Delta - Gamma0 * D^W(:, :)| at one (lam, xi); cubic-order small."""
    lam = complex(lam)
    if jac is None:
        jac = modulation.whitham_jacobians(wave.params)
    split = evans_split(wave, lam, tables=tables)
    delta = split.full(xi)
    E = np.exp(1j * xi * wave.period) - 1.0
    arg1 = lam - wave.c * E / wave.period
    arg2 = E / (1j * wave.period)
    model = serre_gamma0(wave) * modulation.dispersion(jac, arg1, arg2)
    return abs(delta - model)


def find_boundary_I(froude: float, tol: float = 1e-9) -> float:
    """Scaled H_- where the closed-form alpha1 changes sign at this Froude."""
    lo = h_hom(froude) * (1.0 + 1e-7)
    hi = 1.0 - 1e-12
    flo = alpha1_closed(froude, lo)
    fhi = alpha1_closed(froude, hi)
    if flo * fhi > 0.0:
        raise NoSignChange(f"no_sign_change: boundary I absent at F={froude}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if alpha1_closed(froude, mid) * flo > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_boundary_II(froude: float, tol: float = 1e-6,
                     pinned_margin: float = 1e-7):
    """Scaled H_- where gamma changes sign; may be pinned at the existence edge.

    gamma vanishes only very close to the homoclinic boundary.  When no
    sign change is resolvable above the admissible-parameter floor the
    floor itself is returned with ``pinned=True``; the true boundary then
    lies between the floor and the homoclinic limit.
    """
    hh = h_hom(froude)

    def gamma_at(hm):
        wave = Wave(WaveParameters(froude, hm, 1.0))
        return lowfreq_coefficients(wave).gamma

    try:
        hi = find_boundary_I(froude) * (1.0 - 1e-6)
    except NoSignChange:
        hi = 1.0 - 1e-9
    lo = hh * (1.0 + pinned_margin)
    g_hi = gamma_at(hi)
    g_lo = gamma_at(lo)
    if g_hi * g_lo > 0.0:
        return lo, True
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gamma_at(mid) * g_lo > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False


def boundary_curves(froude_values, tol_I: float = 1e-9, tol_II: float = 1e-6):
    """Boundary I and II locations over a grid of Froude numbers.

    Returns a list of dict rows with the scaled H_-, the matching H_+ and
    the period, NaN where a boundary is absent.
    """
    rows = []
    for F in froude_values:
        row = {"F": F}
        try:
            hm1 = find_boundary_I(F, tol_I)
            row["Hminus_I"] = hm1
            row["Hplus_I"] = float(zplus(hm1))
            row["X_I"] = Wave(WaveParameters(F, hm1, 1.0)).period
        except NoSignChange:
            row["Hminus_I"] = row["Hplus_I"] = row["X_I"] = math.nan
        try:
            hm2, pinned = find_boundary_II(F, tol_II)
            row["Hminus_II"] = hm2
            row["Hplus_II"] = float(zplus(hm2))
            row["X_II"] = Wave(WaveParameters(F, hm2, 1.0)).period
            row["II_pinned"] = pinned
        except RollWaveError:
            row["Hminus_II"] = row["Hplus_II"] = row["X_II"] = math.nan
            row["II_pinned"] = False
        rows.append(row)
    return rows
