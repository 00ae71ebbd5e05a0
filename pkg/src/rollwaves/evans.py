"""Periodic Evans-Lopatinsky determinant of a roll wave.

``evans(wave, lam, xi)`` evaluates the 2x2 stability determinant whose
zeros with positive real part are the unstable Bloch eigenvalues of the
wave.  It always factors as ``Delta = lam * Delta_hat`` and, crucially
for sweeps in the Bloch frequency xi, the reduced determinant splits into
two xi-independent parts,

    Delta_hat(lam, xi) = d0(lam) + exp(i xi X) d1(lam),

so one interior solve per lam serves every xi.  Endpoint data of each
solve carry a real log scale to survive the exponential growth of the
eigenfunctions at large Re(lam); the scale cancels from winding numbers
and from any ratio of determinant values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .profile import Wave
from .singular_ode import (SonicSeriesTables, integrate_eigen, trace_batch,
                           EigenTrace)


@dataclass(frozen=True)
class EvansSplit:
    """One-solve summary: Delta_hat(lam, xi) = (d0 + e^{i xi X} d1) e^{logscale}."""

    lam: complex
    d0: complex
    d1: complex
    period: float
    logscale: float = 0.0

    def hat(self, xi) -> complex:
        return (self.d0 + cmath.exp(1j * xi * self.period) * self.d1) \
            * math.exp(self.logscale)

    def full(self, xi) -> complex:
        return self.lam * self.hat(xi)


def _jump_data(wave: Wave):
    A = wave.jump_h
    jQ = wave.jump_q
    jr = wave.jump_source
    J = wave.source(wave.h_minus)
    return A, jQ, jr, J


def _flux_tilde(wave: Wave, H, tilde):
    """(H/F^2 - Q^2/H^2) h~ + (2Q/H - c) q~ at a shock face."""
    ht, qt = tilde
    Q = wave.flow(H)
    return ((H / wave.froude**2 - Q * Q / (H * H)) * ht
            + (2.0 * Q / H - wave.c) * qt)


def split_from_trace(wave: Wave, trace: EigenTrace) -> EvansSplit:
    """Assemble the xi-split from one interior solve."""
    lam = trace.lam
    A, jQ, jr, J = _jump_data(wave)
    B = lam * jQ - jr
    ht_m, qt_m = trace.tilde_hq_at_hminus
    G = wave.c * ht_m - qt_m
    f_minus = _flux_tilde(wave, wave.h_minus, trace.tilde_hq_at_hminus)
    f_plus = _flux_tilde(wave, wave.h_plus, trace.tilde_hq_at_hplus)
    I0 = trace.integral_tilde_h
    d0 = A * (lam * f_plus + lam * jQ + J) - (-lam * I0 - G) * B
    d1 = A * (-lam * f_minus - J) - G * B
    return EvansSplit(lam=lam, d0=d0, d1=d1, period=wave.period)


def evans_split(wave: Wave, lam, tables: SonicSeriesTables | None = None,
                rtol: float = 1e-10, atol: float = 1e-12) -> EvansSplit:
    """Precision-path split determinant at a single spectral parameter."""
    trace = integrate_eigen(wave, lam, rtol=rtol, atol=atol, tables=tables)
    return split_from_trace(wave, trace)


def evans_hat(wave: Wave, lam, xi, **kw) -> complex:
    return evans_split(wave, lam, **kw).hat(xi)


def evans(wave: Wave, lam, xi, **kw) -> complex:
    """Full determinant Delta(lam, xi) = lam * Delta_hat(lam, xi)."""
    return complex(lam) * evans_hat(wave, lam, xi, **kw)


def evans_direct(wave: Wave, lam, xi, tables: SonicSeriesTables | None = None,
                 rtol: float = 1e-10, atol: float = 1e-12) -> complex:
    """Determinant assembled entry by entry from the unreduced eigenfunctions.

    Regression oracle for the split assembly; the two must agree to
    roundoff since they share one interior solve.
    """
    lam = complex(lam)
    trace = integrate_eigen(wave, lam, rtol=rtol, atol=atol, tables=tables)
    A, jQ, jr, _ = _jump_data(wave)
    e = cmath.exp(1j * xi * wave.period)

    def face(H, tilde):
        ht, qt = tilde
        mch_q = -lam * (wave.c * ht - qt)           # (-c h + q) at the face
        flux = lam * _flux_tilde(wave, H, tilde) + wave.source(H)
        return mch_q, flux

    m1, fl1 = face(wave.h_minus, trace.tilde_hq_at_hminus)
    p1, fl2 = face(wave.h_plus, trace.tilde_hq_at_hplus)
    top_right = p1 - e * m1
    bot_right = fl2 - e * fl1
    return lam * A * bot_right - top_right * (lam * jQ - jr)


def split_batch(wave: Wave, lams, tables: SonicSeriesTables | None = None,
                rtol: float = 1e-8, atol: float = 1e-12):
    """Vectorized (d0, d1, logscale) over an array of spectral parameters.

    The two outward solves may saturate at different magnitudes; both are
    folded onto the common per-element scale max(log-, log+).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    tr = trace_batch(wave, lams, tables=tables, rtol=rtol, atol=atol)
    A, jQ, jr, J = _jump_data(wave)
    c = wave.c
    sc = np.maximum(tr.log_minus, tr.log_plus)
    em = np.exp(tr.log_minus - sc)
    ep = np.exp(tr.log_plus - sc)
    e0 = np.exp(np.clip(-sc, -745.0, 0.0))

    w1m = tr.w_minus[:, 0] * em
    w2m = tr.w_minus[:, 1] * em
    w1p = tr.w_plus[:, 0] * ep
    w2p = tr.w_plus[:, 1] * ep
    I0 = tr.z_plus * ep - tr.z_minus * em

    Hm, Hp = wave.h_minus, wave.h_plus
    Qm, Qp = wave.flow(Hm), wave.flow(Hp)
    f_minus = wave.m(Hm) * w2m - (2.0 * Qm / Hm - c) * w1m
    f_plus = wave.m(Hp) * w2p - (2.0 * Qp / Hp - c) * w1p
    B = lams * jQ - jr
    d0 = A * (lams * f_plus + (lams * jQ + J) * e0) - (-lams * I0 - w1m) * B
    d1 = A * (-lams * f_minus - J * e0) - w1m * B
    return d0, d1, sc
