"""Dressler roll-wave profiles of the inviscid Saint-Venant equations.

A roll wave is a periodic traveling wave made of smooth monotone pieces
joined by shocks.  In the frame moving with the wave speed ``c`` the height
``H`` on a smooth piece obeys the scalar ODE ``H' = Psi_full(H)`` with a
rational right-hand side; the shock connects ``H_+`` back down to ``H_-``
through the Rankine-Hugoniot relation.  Waves are parametrized by the
Froude number ``F > 2``, the sonic height ``H_s`` and the left shock face
height ``H_-``.  All quantities obey exact power-law scalings in ``H_s``,
so the substantive computations happen in the rescaled frame ``H_s = 1``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import InvalidWaveError, QuadratureError

#: default relative tolerance for the period/average quadratures
QUAD_RTOL = 1e-10

#: relative margin under which H_- is rejected as too close to the
#: homoclinic (infinite-period) limit
HOMOCLINIC_MARGIN = 1e-8


@dataclass(frozen=True)
class WaveParameters:
    """The triple (F, H_-, H_s) identifying a roll wave.

    ``h_minus`` is in the same units as ``h_sonic``; the existence window
    is ``h_hom(F) < h_minus/h_sonic < 1`` with ``F > 2``.
    """

    froude: float
    h_minus: float
    h_sonic: float = 1.0

    @property
    def hminus_scaled(self) -> float:
        return self.h_minus / self.h_sonic


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    reason: str | None
    h_hom: float
    margin_homoclinic: float
    margin_sonic: float


@dataclass(frozen=True)
class WaveQuantities:
    """Derived constants and period/average quadratures, in physical units."""

    froude: float
    h_sonic: float
    h_minus: float
    h_plus: float
    speed: float
    flux_const: float
    h_hom: float
    period: float
    sonic_pos: float
    avg_h: float
    avg_q: float
    avg_gamma: float
    wavenumber: float
    temporal_wavenumber: float


def h_hom(froude: float) -> float:
    """Lower existence boundary for the scaled left face height.

    Largest root of the numerator of ``psi``; the wave period diverges as
    the scaled H_- approaches it from above.
    """
    return (1.0 + 2.0 * froude + math.sqrt(1.0 + 4.0 * froude)) / (2.0 * froude**2)


def psi(h, froude):
    """Scaled profile slope (F**2 h**2 - (1+2F) h + 1)/(h**2 + h + 1)."""
    h = np.asarray(h, dtype=float) if np.ndim(h) else float(h)
    num = froude**2 * h * h - (1.0 + 2.0 * froude) * h + 1.0
    den = h * h + h + 1.0
    return num / den


def zplus(h_minus_scaled):
    """Right shock face as a function of the left one (scaled units).

    Solves 1/a + a**2/2 = 1/b + b**2/2 for the root b > 1 in closed form.
    """
    hm = np.asarray(h_minus_scaled, dtype=float) if np.ndim(h_minus_scaled) else float(h_minus_scaled)
    return -hm / 2.0 + np.sqrt(hm * hm / 4.0 + 2.0 / hm)


def zplus_prime(h_minus_scaled):
    """d(zplus)/dH_- by implicit differentiation of the jump relation."""
    hm = h_minus_scaled
    hp = zplus(hm)
    return (hp / hm) ** 2 * (hm**3 - 1.0) / (hp**3 - 1.0)


def validate_params(p: WaveParameters) -> ValidityReport:
    """Check the existence window; never raises."""
    if p.froude <= 2.0:
        return ValidityReport(False, "froude_too_small", float("nan"), float("nan"), float("nan"))
    hh = h_hom(p.froude)
    if p.h_sonic <= 0.0 or p.h_minus <= 0.0:
        return ValidityReport(False, "below_homoclinic", hh, float("nan"), float("nan"))
    hm = p.hminus_scaled
    margin_lo = hm - hh
    margin_hi = 1.0 - hm
    if hm >= 1.0:
        return ValidityReport(False, "above_sonic", hh, margin_lo, margin_hi)
    if margin_lo < HOMOCLINIC_MARGIN * hh:
        return ValidityReport(False, "below_homoclinic", hh, margin_lo, margin_hi)
    return ValidityReport(True, None, hh, margin_lo, margin_hi)


def require_valid(p: WaveParameters) -> ValidityReport:
    rep = validate_params(p)
    if not rep.valid:
        raise InvalidWaveError(rep.reason, f"invalid wave parameters ({rep.reason}): {p}")
    return rep


def speed_of(froude: float, h_sonic: float) -> float:
    """Wave speed c = sqrt(H_s) (1 + 1/F)."""
    return math.sqrt(h_sonic) * (1.0 + 1.0 / froude)


def flux_const_of(froude: float, h_sonic: float) -> float:
    """Relative discharge q0 = H_s**(3/2)/F, with Q = c H - q0."""
    return h_sonic**1.5 / froude


class Wave:
    """A validated roll wave with its derived constants and quadratures.

    Exposes the coefficient functions of the profile and spectral ODEs as
    plain callables of the (physical) height ``H``.  Instances are
    immutable in practice and safe to share between threads/processes.
    """

    def __init__(self, params: WaveParameters, quad_rtol: float = QUAD_RTOL):
        require_valid(params)
        self.params = params
        F = params.froude
        Hs = params.h_sonic
        self.froude = F
        self.h_sonic = Hs
        self.h_minus = params.h_minus
        self.hm = params.hminus_scaled
        self.hp = float(zplus(self.hm))
        self.h_plus = Hs * self.hp
        self.c = speed_of(F, Hs)
        self.q0 = flux_const_of(F, Hs)
        self.h_hom = h_hom(F)
        self.quad_rtol = quad_rtol

        # scaled period/average quadratures (H_s = 1 frame)
        self.ell = self._quad_scaled(lambda h: 1.0)
        self.ell_hbar = self._quad_scaled(lambda h: h)
        self.ell_gbar = self._quad_scaled(lambda h: (1.0 / h + h * h / 2.0) / F**2)
        self.xs_scaled = self._quad_scaled(lambda h: 1.0, upper=1.0)
        self.hbar = self.ell_hbar / self.ell
        self.gbar = self.ell_gbar / self.ell

        self.period = Hs * self.ell
        self.sonic_pos = Hs * self.xs_scaled
        self.avg_h = Hs * self.hbar
        self.avg_q = self.c * self.avg_h - self.q0
        self.avg_gamma = Hs**2 * self.gbar
        self.wavenumber = 1.0 / self.period
        self.temporal_wavenumber = -self.c * self.wavenumber

    # -- coefficient functions (physical units) ---------------------------

    def psi_full(self, H):
        """Profile slope dH/dx; positive on (H_-, H_+)."""
        F, Hs = self.froude, self.h_sonic
        num = F**2 * (H * H + (Hs - self.c**2) * H + self.q0**2 / Hs)
        den = H * H + Hs * H + Hs * Hs
        return num / den

    def m(self, H):
        """Sonic factor p'(H) - q0**2/H**2 = (H**3 - H_s**3)/(F**2 H**2)."""
        return (H**3 - self.h_sonic**3) / (self.froude**2 * H * H)

    def flow(self, H):
        """Discharge Q = c H - q0 along the smooth profile."""
        return self.c * H - self.q0

    def source(self, H):
        """Slope/friction balance r(H, Q) = H - Q**2/H**2 on the profile."""
        Q = self.flow(H)
        return H - Q * Q / (H * H)

    # -- jumps across the shock -------------------------------------------

    @property
    def jump_h(self) -> float:
        return self.h_plus - self.h_minus

    @property
    def jump_q(self) -> float:
        return self.c * self.jump_h

    @property
    def jump_source(self) -> float:
        return self.source(self.h_plus) - self.source(self.h_minus)

    def rh_residual(self) -> float:
        """Rankine-Hugoniot residual of the jump relation (should be ~0)."""
        F = self.froude

        def pot(H):
            return self.q0**2 / H + H * H / (2.0 * F**2)

        return pot(self.h_minus) - pot(self.h_plus)

    # -- quadratures --------------------------------------------------------

    def _quad_scaled(self, weight, upper=None):
        """Integral of weight(h)/psi(h) over (hm, upper or hp), scaled frame."""
        F = self.froude
        hi = self.hp if upper is None else upper

        def integrand(h):
            return weight(h) / psi(h, F)

        out = quad(integrand, self.hm, hi, epsabs=0.0, epsrel=self.quad_rtol,
                   limit=400, full_output=1)
        val, err = out[0], out[1]
        if len(out) > 3 or (val != 0.0 and err > 50.0 * self.quad_rtol * abs(val)):
            raise QuadratureError(
                f"quadrature_nonconvergence: err={err:.2e} val={val:.6e} "
                f"(H_- may be too close to the homoclinic limit)")
        return val

    def x_of_height_scaled(self, h):
        """Scaled distance from the sonic point, x(h) = int_1^h dz/psi(z)."""
        sgn = 1.0 if h >= 1.0 else -1.0
        lo, hi = (1.0, h) if h >= 1.0 else (h, 1.0)
        val = quad(lambda z: 1.0 / psi(z, self.froude), lo, hi,
                   epsabs=0.0, epsrel=self.quad_rtol, limit=400)[0]
        return sgn * val

    def quantities(self) -> WaveQuantities:
        return WaveQuantities(
            froude=self.froude, h_sonic=self.h_sonic, h_minus=self.h_minus,
            h_plus=self.h_plus, speed=self.c, flux_const=self.q0,
            h_hom=self.h_hom, period=self.period, sonic_pos=self.sonic_pos,
            avg_h=self.avg_h, avg_q=self.avg_q, avg_gamma=self.avg_gamma,
            wavenumber=self.wavenumber,
            temporal_wavenumber=self.temporal_wavenumber)


def derived_constants(p: WaveParameters) -> WaveQuantities:
    """Closed-form part of the wave quantities (no quadratures).

    Quadrature-valued fields are returned as NaN; use ``quadratures`` or
    ``Wave`` for the complete record.
    """
    require_valid(p)
    F, Hs = p.froude, p.h_sonic
    nan = float("nan")
    return WaveQuantities(
        froude=F, h_sonic=Hs, h_minus=p.h_minus,
        h_plus=Hs * float(zplus(p.hminus_scaled)),
        speed=speed_of(F, Hs), flux_const=flux_const_of(F, Hs),
        h_hom=h_hom(F), period=nan, sonic_pos=nan, avg_h=nan, avg_q=nan,
        avg_gamma=nan, wavenumber=nan, temporal_wavenumber=nan)


def quadratures(p: WaveParameters, quad_rtol: float = QUAD_RTOL) -> WaveQuantities:
    """Complete wave quantities including all period/average quadratures."""
    return Wave(p, quad_rtol=quad_rtol).quantities()


_SCALING_POWERS = {
    "froude": 0.0, "h_sonic": 1.0, "h_minus": 1.0, "h_plus": 1.0,
    "speed": 0.5, "flux_const": 1.5, "h_hom": 0.0, "period": 1.0,
    "sonic_pos": 1.0, "avg_h": 1.0, "avg_q": 1.5, "avg_gamma": 2.0,
    "wavenumber": -1.0, "temporal_wavenumber": -0.5,
}


def unscale(scaled: WaveQuantities, h_sonic: float) -> WaveQuantities:
    """Map quantities computed at H_s = 1 to a wave with sonic height ``h_sonic``.

    Exact power laws: heights ~ H_s, discharges ~ H_s**(3/2), lengths ~ H_s,
    speeds ~ H_s**(1/2), wave numbers ~ 1/H_s, frequencies ~ H_s**(-1/2).
    """
    if scaled.h_sonic != 1.0:
        raise ValueError("unscale expects quantities computed at h_sonic = 1")
    updates = {name: getattr(scaled, name) * h_sonic**power
               for name, power in _SCALING_POWERS.items()}
    return replace(scaled, **updates)


class ProfileField:
    """The monotone profile H(x) on one period and its inverse.

    Uses the convention x in (0, X) with the shock at the period ends:
    H(0+) = H_-, H(X-) = H_+, sonic point at x_s.
    """

    def __init__(self, wave: Wave, rtol: float = 1e-12):
        self.wave = wave
        sol = solve_ivp(lambda x, y: [wave.psi_full(y[0])],
                        (0.0, wave.period), [wave.h_minus],
                        method="DOP853", rtol=rtol, atol=rtol * wave.h_sonic,
                        dense_output=True)
        if not sol.success:
            raise QuadratureError(f"profile integration failed: {sol.message}")
        self._dense = sol.sol

    def height_of_x(self, x):
        x = np.clip(x, 0.0, self.wave.period)
        return self._dense(np.atleast_1d(x))[0] if np.ndim(x) else float(self._dense([x])[0][0])

    def x_of_height(self, H):
        w = self.wave
        if np.ndim(H):
            return np.array([self.x_of_height(float(v)) for v in H])
        Hs = np.clip(H, w.h_minus, w.h_plus)
        val = quad(lambda z: 1.0 / w.psi_full(z), w.h_minus, Hs,
                   epsabs=0.0, epsrel=w.quad_rtol, limit=400)[0]
        return val

    def slope_of_height(self, H):
        return self.wave.psi_full(H)

    def sample(self, n: int = 1024):
        """Uniform x-grid samples (x, H, Q) over one period."""
        x = np.linspace(0.0, self.wave.period, n)
        H = self._dense(x)[0]
        Q = self.wave.flow(H)
        return x, H, Q

    def write_csv(self, path, n: int = 1024):
        x, H, Q = self.sample(n)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "H", "Q"])
            for row in zip(x, H, Q):
                writer.writerow([repr(float(v)) for v in row])
