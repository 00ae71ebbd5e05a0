"""Interior eigenfunction solves across the sonic regular-singular point.

The linearization of the flow equations about a roll wave, Laplace
transformed in time, is a 2x2 first-order system in space whose
coefficient matrix loses rank where a characteristic speed equals the wave
speed (the sonic point).  In the variables ``(w1, w2) = (c*h - q, h)`` the
system reads

    w1' = lam*w2,
    m(H) * w2' = (lam + b21(H))*w1 + (b22(H) - 2*lam*q0/H)*w2,

with ``m(H) = H/F**2 - q0**2/H**2`` vanishing linearly at ``H = H_s``.
Everything here works with the reduced unknowns scaled by ``1/lam`` after
subtracting the profile derivative, ``(h~, q~) = ((h, q) - (H', Q'))/lam``,
which satisfy the same system with a smooth lam-independent forcing and
stay finite as ``lam -> 0``.  Solutions are started by a power series in
``H - H_s`` whose coefficients follow a linear recursion, then continued
outward with adaptive Runge-Kutta in the travel coordinate x; a running
quadrature accumulates ``int h~ dx`` over the period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ResonanceError, SolvabilityError, StepFailure
from .profile import Wave

#: default series order at the sonic point
SERIES_ORDER = 24

#: default tolerances of the precision (single-lambda) integrator
RK_RTOL = 1e-10
RK_ATOL = 1e-12

#: relative magnitude the last retained series term may contribute
SERIES_TAIL_RTOL = 1e-12


@dataclass(frozen=True)
class SonicData:
    """Eigenfunction values pinned at the sonic point."""

    lam: complex
    h_at_sonic: complex
    q_at_sonic: complex
    a0: complex
    l0: complex


@dataclass(frozen=True)
class EigenTrace:
    """Endpoint data of one interior solve at spectral parameter ``lam``."""

    lam: complex
    hq_at_hminus: tuple
    hq_at_hplus: tuple
    tilde_hq_at_hminus: tuple
    tilde_hq_at_hplus: tuple
    integral_tilde_h: complex
    endpoint_defect: float


@dataclass(frozen=True)
class SecondVariation:
    """lam-derivative of the reduced eigenfunctions at lam = 0."""

    v_at_hminus: tuple
    v_at_hplus: tuple
    integral_v2: float
    base: EigenTrace


def solvability_threshold(wave: Wave) -> float:
    """Analytic solves exist for Re(lam) above -(F-2)/(2 sqrt(H_s))."""
    return -(wave.froude - 2.0) / (2.0 * math.sqrt(wave.h_sonic))


def sonic_data(wave: Wave, lam) -> SonicData:
    """Normalized eigenfunction value at the sonic point.

    The normalization is the unique (up to scale) one that is entire in
    ``lam`` and reduces to ``(H', Q')`` at ``lam = 0``; it satisfies the
    sonic solvability constraint identically in ``lam``.
    """
    lam = complex(lam)
    F = wave.froude
    sqhs = math.sqrt(wave.h_sonic)
    thr = solvability_threshold(wave)
    if lam.real <= thr:
        raise SolvabilityError(
            f"solvability_violation: Re(lam)={lam.real} <= {thr}")
    pref = (F - 2.0) / (2.0 * (F + 1.0)) * sqhs
    h = pref * (lam + (2.0 / 3.0) * (F + 1.0) / sqhs) * F
    q = pref * (lam * sqhs * (F - 1.0) + (2.0 / 3.0) * (F + 1.0) ** 2)
    a0 = 2.0 * lam * sqhs / (F - 2.0)
    l0 = F / (F - 2.0) * (lam + (2.0 / 3.0) * (F + 1.0) / sqhs)
    return SonicData(lam, h, q, a0, l0)


def sonic_constraint_residual(wave: Wave, data: SonicData) -> float:
    """|constraint| relative to its term sizes; 0 for the normalization."""
    F = wave.froude
    sqhs = math.sqrt(wave.h_sonic)
    lam = data.lam
    t1 = (lam * sqhs * (F - 1.0) + (2.0 / 3.0) * (F + 1.0) ** 2) * data.h_at_sonic
    t2 = (lam + (2.0 / 3.0) * (F + 1.0) / sqhs) * F * data.q_at_sonic
    scale = abs(t1) + abs(t2)
    return abs(t1 - t2) / scale if scale else 0.0


# ---------------------------------------------------------------------------
# truncated power-series helpers (plain numpy arrays of coefficients)
# ---------------------------------------------------------------------------

def _ser_mul(a, b, n):
    out = np.zeros(n + 1, dtype=np.result_type(a, b))
    for k in range(n + 1):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def _ser_inv(a, n):
    if a[0] == 0.0:
        raise ZeroDivisionError("series has no reciprocal (zero constant term)")
    out = np.zeros(n + 1, dtype=np.result_type(a, 1.0))
    out[0] = 1.0 / a[0]
    for k in range(1, n + 1):
        out[k] = -np.dot(a[1: k + 1], out[k - 1:: -1]) / a[0]
    return out


def _ser_poly_shift(coeffs_low_to_high, center, n):
    """Series of a polynomial around ``center`` (synthetic-division shift)."""
    work = list(reversed([float(v) for v in coeffs_low_to_high]))  # high->low
    out = []
    while work:
        rem = work[0]
        for v in work[1:]:
            rem = rem * center + v
        out.append(rem)
        if len(work) == 1:
            break
        quot = [work[0]]
        for v in work[1:-1]:
            quot.append(quot[-1] * center + v)
        work = quot
    ser = np.zeros(n + 1)
    for k, v in enumerate(out[: n + 1]):
        ser[k] = v
    return ser


class SonicSeriesTables:
    """lam-independent Taylor data of the ODE coefficients at the sonic point."""

    def __init__(self, wave: Wave, order: int = SERIES_ORDER):
        self.wave = wave
        self.order = n = order
        F, Hs = wave.froude, wave.h_sonic
        c, q0 = wave.c, wave.q0

        # H = Hs + t expansions of the rational building blocks
        H = _ser_poly_shift([0.0, 1.0], Hs, n)
        psi_num = _ser_poly_shift([q0 * q0 / Hs, Hs - c * c, 1.0], Hs, n) * F**2
        psi_den = _ser_poly_shift([Hs * Hs, Hs, 1.0], Hs, n)
        self.psi = _ser_mul(psi_num, _ser_inv(psi_den, n), n)
        self.inv_psi = _ser_inv(self.psi, n)
        invH = _ser_inv(H, n)
        invH2 = _ser_mul(invH, invH, n)
        invH3 = _ser_mul(invH2, invH, n)
        Q = c * H.copy()
        Q[0] -= q0
        # m = (H^3 - Hs^3)/(F^2 H^2); numerator shifted exactly
        m_num = _ser_poly_shift([-(Hs**3), 0.0, 0.0, 1.0], Hs, n)
        self.m = _ser_mul(m_num, invH2, n) / F**2
        m_psi = _ser_mul(self.m, self.psi, n)
        self.m_psi = m_psi
        # s(t) = m psi / t, nonzero at t = 0
        self.s = np.zeros(n + 1)
        self.s[:-1] = m_psi[1:]
        if abs(self.s[0]) < 1e-14:
            raise ResonanceError("degenerate sonic factorization")

        # first-order coefficient functions (x-derivatives folded in via psi)
        QH2 = _ser_mul(Q, invH2, n)
        self.b21 = 2.0 * QH2 + 2.0 * q0 * _ser_mul(self.psi, invH2, n)
        dm = (2.0 * q0 * q0 / F**2) * invH3
        dm[0] += 1.0 / F**2
        Q2H3 = _ser_mul(_ser_mul(Q, Q, n), invH3, n)
        one = np.zeros(n + 1)
        one[0] = 1.0
        self.b22 = -_ser_mul(dm, self.psi, n) + one + 2.0 * Q2H3 - 2.0 * c * QH2
        self.two_q0_invH = 2.0 * q0 * invH
        # forcing of the reduced system, rows (m psi, -(2 q0/H) psi)
        self.g1 = m_psi.copy()
        self.g2 = -_ser_mul(self.two_q0_invH, self.psi, n)

    def series_coefficients(self, lam, inhomogeneous=True, forcing=None,
                            w0=None):
        """Coefficient table W[n] of the sonic power series, batched in lam.

        ``lam`` may be a scalar or a 1-D array; returns shape
        (len(lam), order+1, 2).  ``forcing`` overrides the built-in reduced
        forcing (used by the lam-derivative solve), ``w0`` the order-zero
        value.
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        L = lam.size
        n = self.order
        wave = self.wave
        F = wave.froude
        thr = solvability_threshold(wave)
        if np.any(lam.real <= thr):
            raise SolvabilityError("solvability_violation in series batch")

        if forcing is None:
            if inhomogeneous:
                g1, g2 = self.g1, self.g2
            else:
                g1 = g2 = np.zeros(n + 1)
        else:
            g1, g2 = forcing
        if w0 is None:
            pref = (F - 2.0) / (F + 1.0)
            w0 = (wave.h_sonic * pref,
                  F * pref * math.sqrt(wave.h_sonic) / 2.0)

        W = np.zeros((L, n + 1, 2), dtype=complex)
        W[:, 0, 0] = w0[0]
        W[:, 0, 1] = w0[1]
        s = self.s
        m0_21 = lam + self.b21[0]
        m0_22 = lam * (-self.two_q0_invH[0]) + self.b22[0]
        for k in range(1, n + 1):
            rhs1 = np.full(L, g1[k], dtype=complex)
            rhs2 = np.full(L, g2[k], dtype=complex)
            for j in range(1, k + 1):
                # the constant (2,1) block entry contributes only at j = 0
                w = W[:, k - j, :]
                rhs1 += lam * self.m[j] * w[:, 1] - s[j] * (k - j) * w[:, 0]
                rhs2 += (self.b21[j] * w[:, 0]
                         + (self.b22[j] - lam * self.two_q0_invH[j]) * w[:, 1]
                         - s[j] * (k - j) * w[:, 1])
            den1 = s[0] * k
            W[:, k, 0] = rhs1 / den1
            den2 = s[0] * k - m0_22
            if np.any(np.abs(den2) < 1e-12 * abs(s[0] * k)):
                raise ResonanceError(
                    f"resonance_error: near-zero denominator at order {k}")
            W[:, k, 1] = (rhs2 + m0_21 * W[:, k, 0]) / den2
        return W

    def choose_delta(self, W) -> float:
        """Largest handoff radius where the last series term is negligible."""
        wave = self.wave
        span = wave.h_plus - wave.h_minus
        delta = span / 8.0
        mags = np.abs(W).max(axis=(0, 2))  # worst case over batch and comps
        powers = np.arange(self.order + 1)
        for _ in range(200):
            terms = mags * delta**powers
            total = terms.sum()
            if terms[-1] <= SERIES_TAIL_RTOL * max(total, 1e-300):
                return delta
            delta *= 0.8
        raise StepFailure("step_failure: no usable series handoff radius")

    def eval_series(self, W, delta):
        """Series value, its running x-quadrature of h~, and the x offset.

        Returns (value (L,2), z = int h~ dx from the sonic point, x offset
        of H_s + delta from the sonic point); ``delta`` may be negative.
        """
        n = self.order
        powers = delta ** np.arange(n + 1)
        val = np.tensordot(W, powers, axes=(1, 0))
        # z = int_0^delta w2(t)/psi(t) dt, term by term
        L = W.shape[0]
        z = np.zeros(L, dtype=complex)
        for k in range(n + 1):
            conv = np.zeros(L, dtype=complex)
            for j in range(k + 1):
                conv += W[:, j, 1] * self.inv_psi[k - j]
            z += conv * delta ** (k + 1) / (k + 1)
        xoff = float(np.sum(self.inv_psi * delta ** np.arange(1, n + 2)
                            / np.arange(1, n + 2)))
        return val, z, xoff


# ---------------------------------------------------------------------------
# right-hand sides in the travel coordinate x (H carried as a component)
# ---------------------------------------------------------------------------

def _coeffs(wave, H):
    psi = wave.psi_full(H)
    m = wave.m(H)
    Q = wave.flow(H)
    b21 = 2.0 * (Q + wave.q0 * psi) / (H * H)
    b22 = (-(1.0 / wave.froude**2 + 2.0 * wave.q0**2 / H**3) * psi
           + 1.0 + 2.0 * Q * Q / H**3 - 2.0 * wave.c * Q / (H * H))
    return psi, m, b21, b22


def _rhs_reduced(wave, lam):
    q0, c = wave.q0, wave.c

    def rhs(x, y):
        H = y[0].real
        psi, m, b21, b22 = _coeffs(wave, H)
        w1, w2 = y[1], y[2]
        dw1 = lam * w2 + psi
        dw2 = ((lam + b21) * w1 + (b22 - 2.0 * lam * q0 / H) * w2
               - (2.0 * q0 / H) * psi) / m
        return [psi, dw1, dw2, w2]

    return rhs


def integrate_eigen(wave: Wave, lam, order: int = SERIES_ORDER,
                    rtol: float = RK_RTOL, atol: float = RK_ATOL,
                    tables: SonicSeriesTables | None = None,
                    delta: float | None = None) -> EigenTrace:
    """Solve the reduced eigen-system over one period at a single ``lam``.

    Series start at ``H_s +/- delta``, adaptive embedded Runge-Kutta
    continuation to both shock faces, running quadrature of ``int h~ dx``.
    """
    lam = complex(lam)
    sonic_data(wave, lam)  # gate on the solvability half-plane
    if tables is None:
        tables = SonicSeriesTables(wave, order)
    W = tables.series_coefficients(lam)
    if delta is None:
        delta = tables.choose_delta(W)

    xs = wave.sonic_pos
    X = wave.period
    ends = {}
    zq = {}
    defect = 0.0
    for side, dlt, x_end, h_end in (("plus", delta, X - xs, wave.h_plus),
                                    ("minus", -delta, -xs, wave.h_minus)):
        val, z0, xoff = tables.eval_series(W, dlt)
        y0 = [complex(wave.h_sonic + dlt), val[0, 0], val[0, 1], z0[0]]
        sol = solve_ivp(_rhs_reduced(wave, lam), (xoff, x_end), y0,
                        method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise StepFailure(f"step_failure: {sol.message}")
        yf = sol.y[:, -1]
        defect = max(defect, abs(yf[0].real - h_end) / wave.h_sonic)
        ends[side] = (yf[1], yf[2])
        zq[side] = yf[3]

    integral = zq["plus"] - zq["minus"]
    c = wave.c
    out = {}
    for side, H in (("minus", wave.h_minus), ("plus", wave.h_plus)):
        w1, w2 = ends[side]
        tilde = (w2, c * w2 - w1)
        hp = wave.psi_full(H)
        out[side] = (tilde, (lam * tilde[0] + hp, lam * tilde[1] + c * hp))
    return EigenTrace(
        lam=lam,
        hq_at_hminus=out["minus"][1], hq_at_hplus=out["plus"][1],
        tilde_hq_at_hminus=out["minus"][0], tilde_hq_at_hplus=out["plus"][0],
        integral_tilde_h=integral, endpoint_defect=defect)


def integrate_second_variation(wave: Wave, order: int = SERIES_ORDER,
                               rtol: float = RK_RTOL, atol: float = RK_ATOL,
                               tables: SonicSeriesTables | None = None):
    """Joint solve of the lam = 0 trace and its lam-derivative.

    The derivative pair starts from zero at the sonic point and is forced
    by the lam = 0 solution itself; both are real, so the solve runs in
    real arithmetic.
    """
    if tables is None:
        tables = SonicSeriesTables(wave, order)
    n = tables.order
    W0 = tables.series_coefficients(0.0)
    w1s = W0[0, :, 0].real
    w2s = W0[0, :, 1].real
    gv1 = _ser_mul(tables.m, w2s, n)
    gv2 = w1s - _ser_mul(tables.two_q0_invH, w2s, n)
    # solvability at the sonic point requires the forcing to vanish there
    if abs(gv2[0]) > 1e-9 * (abs(w1s[0]) + abs(w2s[0])):
        raise ResonanceError(f"sonic constraint violated by forcing: {gv2[0]:.2e}")
    V = tables.series_coefficients(0.0, forcing=(gv1, gv2), w0=(0.0, 0.0))
    delta = min(tables.choose_delta(W0), tables.choose_delta(V))

    q0, c = wave.q0, wave.c

    def rhs(x, y):
        H = y[0]
        psi, m, b21, b22 = _coeffs(wave, H)
        w1, w2, v1, v2 = y[1], y[2], y[3], y[4]
        dw1 = psi
        dw2 = (b21 * w1 + b22 * w2 - (2.0 * q0 / H) * psi) / m
        dv1 = w2
        dv2 = (b21 * v1 + b22 * v2 + w1 - (2.0 * q0 / H) * w2) / m
        return [psi, dw1, dw2, dv1, dv2, w2, v2]

    xs, X = wave.sonic_pos, wave.period
    res = {}
    for side, dlt, x_end in (("plus", delta, X - xs), ("minus", -delta, -xs)):
        valW, zW, xoff = tables.eval_series(W0, dlt)
        valV, zV, _ = tables.eval_series(V, dlt)
        y0 = [wave.h_sonic + dlt, valW[0, 0].real, valW[0, 1].real,
              valV[0, 0].real, valV[0, 1].real, zW[0].real, zV[0].real]
        sol = solve_ivp(rhs, (xoff, x_end), y0, method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise StepFailure(f"step_failure: {sol.message}")
        res[side] = sol.y[:, -1]

    base = {}
    for side, H in (("minus", wave.h_minus), ("plus", wave.h_plus)):
        y = res[side]
        tilde = (y[2], c * y[2] - y[1])
        hp = wave.psi_full(H)
        base[side] = (tilde, (hp, c * hp))
    trace = EigenTrace(
        lam=0.0,
        hq_at_hminus=base["minus"][1], hq_at_hplus=base["plus"][1],
        tilde_hq_at_hminus=base["minus"][0], tilde_hq_at_hplus=base["plus"][0],
        integral_tilde_h=res["plus"][5] - res["minus"][5],
        endpoint_defect=max(abs(res["plus"][0] - wave.h_plus),
                            abs(res["minus"][0] - wave.h_minus)) / wave.h_sonic)
    return SecondVariation(
        v_at_hminus=(res["minus"][3], res["minus"][4]),
        v_at_hplus=(res["plus"][3], res["plus"][4]),
        integral_v2=res["plus"][6] - res["minus"][6],
        base=trace)


# ---------------------------------------------------------------------------
# batched integrator for contour sweeps
# ---------------------------------------------------------------------------

_RK_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_RK_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_RK_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_RK_E = _RK_B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                          -92097 / 339200, 187 / 2100, 1 / 40])

#: magnitude ceiling before a batch element gets renormalized
_RESCALE_AT = 1e120


@dataclass
class BatchTrace:
    """Endpoint data of a whole batch of reduced solves (one per lam).

    Tilde values carry a per-element real log scale: the true value is
    ``value * exp(logscale)``.
    """

    lams: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray
    z_minus: np.ndarray
    z_plus: np.ndarray
    log_minus: np.ndarray
    log_plus: np.ndarray


def _batch_rhs(wave, lams):
    q0, c = wave.q0, wave.c

    def rhs(H, w1, w2, srcscale):
        psi, m, b21, b22 = _coeffs(wave, H)
        dw1 = lams * w2 + psi * srcscale
        dw2 = ((lams + b21) * w1 + (b22 - 2.0 * lams * q0 / H) * w2
               - (2.0 * q0 / H) * psi * srcscale) / m
        return psi, dw1, dw2, w2

    return rhs


def _integrate_batch(wave, lams, H0, w0, z0, x0, x1, rtol, atol, max_steps):
    """Shared-step adaptive RK45 for a batch of reduced solves.

    State per element: (w1, w2, z) plus the shared profile height H.  Huge
    elements get divided out and their log scale accumulated so the batch
    survives exponential growth.
    """
    L = lams.size
    rhs = _batch_rhs(wave, lams)
    H = float(H0)
    w1 = w0[:, 0].astype(complex).copy()
    w2 = w0[:, 1].astype(complex).copy()
    z = z0.astype(complex).copy()
    logs = np.zeros(L)
    x = float(x0)
    span = x1 - x0
    direction = 1.0 if span > 0 else -1.0
    dt = direction * min(abs(span) / 50.0, 1e-3 * (1.0 + abs(span)))
    nsteps = 0
    while (x1 - x) * direction > 1e-14 * (1.0 + abs(x1)):
        if nsteps >= max_steps:
            raise StepFailure(f"step_failure: >{max_steps} steps in batch solve")
        if (x + dt - x1) * direction > 0:
            dt = x1 - x
        srcscale = np.exp(np.clip(-logs, -745.0, 0.0))
        kH = np.empty(7)
        kw1 = np.empty((7, L), dtype=complex)
        kw2 = np.empty((7, L), dtype=complex)
        kz = np.empty((7, L), dtype=complex)
        for i in range(7):
            Hs_ = H
            w1s = w1
            w2s = w2
            if i:
                a = _RK_A[i]
                Hs_ = H + dt * float(np.dot(a, kH[:i]))
                w1s = w1 + dt * np.tensordot(a, kw1[:i], axes=(0, 0))
                w2s = w2 + dt * np.tensordot(a, kw2[:i], axes=(0, 0))
            dH, dw1, dw2, dz = rhs(Hs_, w1s, w2s, srcscale)
            kH[i] = dH
            kw1[i] = dw1
            kw2[i] = dw2
            kz[i] = dz
        H_new = H + dt * float(np.dot(_RK_B, kH))
        w1_new = w1 + dt * np.tensordot(_RK_B, kw1, axes=(0, 0))
        w2_new = w2 + dt * np.tensordot(_RK_B, kw2, axes=(0, 0))
        z_new = z + dt * np.tensordot(_RK_B, kz, axes=(0, 0))
        e1 = dt * np.tensordot(_RK_E, kw1, axes=(0, 0))
        e2 = dt * np.tensordot(_RK_E, kw2, axes=(0, 0))
        eH = dt * abs(float(np.dot(_RK_E, kH)))
        sc1 = atol + rtol * np.maximum(np.abs(w1), np.abs(w1_new))
        sc2 = atol + rtol * np.maximum(np.abs(w2), np.abs(w2_new))
        err = max(np.max(np.abs(e1) / sc1), np.max(np.abs(e2) / sc2),
                  eH / (atol + rtol * abs(H)))
        if err <= 1.0:
            x += dt
            H, w1, w2, z = H_new, w1_new, w2_new, z_new
            big = np.maximum(np.abs(w1), np.abs(w2))
            mask = big > _RESCALE_AT
            if np.any(mask):
                f = big[mask]
                w1[mask] /= f
                w2[mask] /= f
                z[mask] /= f
                logs[mask] += np.log(f)
        dt *= min(5.0, max(0.2, 0.9 * (err + 1e-16) ** -0.2))
        nsteps += 1
    return H, w1, w2, z, logs


def trace_batch(wave: Wave, lams, order: int = SERIES_ORDER,
                rtol: float = 1e-8, atol: float = 1e-12,
                tables: SonicSeriesTables | None = None,
                max_steps: int = 2_000_000) -> BatchTrace:
    """Reduced solves over one period for a whole array of ``lam`` values."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if tables is None:
        tables = SonicSeriesTables(wave, order)
    W = tables.series_coefficients(lams)
    delta = tables.choose_delta(W)
    xs, X = wave.sonic_pos, wave.period
    out = {}
    for side, dlt, x_end in (("plus", delta, X - xs), ("minus", -delta, -xs)):
        val, z0, xoff = tables.eval_series(W, dlt)
        _, w1, w2, z, logs = _integrate_batch(
            wave, lams, wave.h_sonic + dlt, val, z0, xoff, x_end,
            rtol, atol, max_steps)
        out[side] = (np.stack([w1, w2], axis=1), z, logs)
    return BatchTrace(
        lams=lams, w_minus=out["minus"][0], w_plus=out["plus"][0],
        z_minus=out["minus"][1], z_plus=out["plus"][1],
        log_minus=out["minus"][2], log_plus=out["plus"][2])
