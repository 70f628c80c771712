"""Scalar pulsed beams: Green functions, wavelets, radiation patterns."""

from __future__ import annotations

import enum
import warnings

import numpy as np
from scipy import integrate

from .errors import (
    LightConeSingular,
    NotTimelikeWarning,
    OnBranchSphere,
    QuadratureFailure,
    SingularDenominator,
)
from .geometry import ComplexEvent, complex_distance
from .signals import AnalyticSignal, make_signal

SINGULAR_TOL = 1e-13


class Kappa(enum.IntEnum):
    """Branch selector: +1 retarded (outgoing), -1 advanced."""

    PLUS = 1
    MINUS = -1


def kappa_sign(k) -> int:
    if isinstance(k, str):
        k = k.strip()
        if k in ("+", "plus", "+1", "ret"):
            return 1
        if k in ("-", "minus", "-1", "adv"):
            return -1
        raise ValueError(f"bad kappa {k!r}")
    k = int(k)
    if k not in (1, -1):
        raise ValueError(f"kappa must be +1 or -1, got {k}")
    return k


def event_rtilde(z: ComplexEvent):
    return complex_distance(z.x, z.y)


def _check_denominators(rt, d):
    scale = np.maximum(1.0, np.abs(rt))
    if np.any(np.abs(rt) <= SINGULAR_TOL):
        raise OnBranchSphere("complex distance vanishes")
    if np.any(np.abs(d) <= SINGULAR_TOL * scale):
        raise SingularDenominator("tau -/+ r~ vanishes")


def green_euclidean(z: ComplexEvent, tol=1e-12):
    """Complexified four-dimensional Newtonian potential -1/(4 pi^2 z^2)."""
    zv = np.asarray(z.zvec)
    tau = np.asarray(z.tau)
    zsq = z.zsq
    scale = np.abs(np.sum(zv * zv, axis=-1)) + np.abs(tau * tau)
    if np.any(np.abs(zsq) < tol * scale):
        raise LightConeSingular("z^2 = 0")
    return -1.0 / (4.0 * np.pi**2 * zsq)


def green_pm_from(rt, tau, sign):
    """G^+/- from a precomputed complex distance."""
    s = kappa_sign(sign)
    d = tau - s * rt
    _check_denominators(rt, d)
    return 1.0 / (8.0 * np.pi**2 * rt * d)


def green_pm(z: ComplexEvent, sign):
    """Retarded (+) or advanced (-) pulsed-beam Green function 1/(8 pi^2 r~ (tau -/+ r~))."""
    return green_pm_from(event_rtilde(z), np.asarray(z.tau), sign)


def wavelet_from(rt, tau, g: AnalyticSignal, kappa):
    s = kappa_sign(kappa)
    d = tau - s * rt
    _check_denominators(rt, np.ones_like(d))
    g.check_poles(d)
    return g.eval(d) / (4.0 * np.pi * rt)


def wavelet(z: ComplexEvent, g, kappa):
    """Pulsed-beam wavelet g(tau - kappa r~)/(4 pi r~)."""
    return wavelet_from(event_rtilde(z), np.asarray(z.tau), make_signal(g), kappa)


def radiation_pattern(z: ComplexEvent, sign):
    """R^+/- = i / (2 pi (tau -/+ r~))."""
    s = kappa_sign(sign)
    rt = event_rtilde(z)
    d = np.asarray(z.tau) - s * rt
    if np.any(np.abs(d) <= SINGULAR_TOL * np.maximum(1.0, np.abs(rt))):
        raise SingularDenominator("tau -/+ r~ vanishes")
    return 1j / (2.0 * np.pi * d)


def eccentricity(a, u):
    return abs(a) / abs(u)


def pulse_duration(theta, u, a, sign):
    """Far-zone pulse duration |u -/+ a cos(theta)|."""
    s = kappa_sign(sign)
    if abs(u) <= a:
        warnings.warn(
            f"|u|={abs(u)} <= a={a}: not timelike, no pulse guarantee",
            NotTimelikeWarning,
            stacklevel=2,
        )
    return np.abs(u - s * a * np.cos(theta))


def peak_time(x, y, sign):
    """Time at which |G^+/-| peaks at fixed x: t = +/- p (exact minimiser of |tau -/+ r~|)."""
    return kappa_sign(sign) * np.real(complex_distance(x, y))


def mother_translate(xprime, tprime, x, t, y, u, g, kappa):
    """Wavelet translated to the complex source point: W(x' - x + i y)."""
    z = ComplexEvent.from_parts(
        np.asarray(xprime, float) - np.asarray(x, float),
        np.asarray(tprime, float) - np.asarray(t, float),
        y,
        u,
    )
    return wavelet(z, g, kappa)


def bump1d(center, halfwidth, power=8):
    """Polynomial bump (1 - s^2)^power on [center - halfwidth, center + halfwidth]."""

    def phi(t):
        s = (np.asarray(t, dtype=float) - center) / halfwidth
        return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** power, 0.0)

    phi.support = (center - halfwidth, center + halfwidth)
    return phi


def _quad_complex(fn, lo, hi, points, epsabs, epsrel, limit=400):
    pts = [p for p in points if lo < p < hi] or None
    re, err_re = integrate.quad(lambda t: fn(t).real, lo, hi, points=pts,
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
    im, err_im = integrate.quad(lambda t: fn(t).imag, lo, hi, points=pts,
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
    return re + 1j * im, float(np.hypot(err_re, err_im))


def minkowski_limit_probe(x, y, u, sign, phi, eps_list, support=None,
                          tol_rel=1e-10, tol_abs=1e-13):
    """Smeared boundary-value differences I_eps = int phi(t) [G(x - i eps y) - G(x + i eps y)] dt.

    As eps -> 0 these tend to i phi(+/-r) / (4 pi r).
    """
    s = kappa_sign(sign)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = float(np.linalg.norm(x))
    lo, hi = support if support is not None else phi.support
    out = []
    for eps in eps_list:
        rt_lo = complex(complex_distance(x, -eps * y))
        rt_hi = complex(complex_distance(x, eps * y))

        def integrand(t, rt_lo=rt_lo, rt_hi=rt_hi, eps=eps):
            g_lo = 1.0 / (8 * np.pi**2 * rt_lo * (t - 1j * eps * u - s * rt_lo))
            g_hi = 1.0 / (8 * np.pi**2 * rt_hi * (t + 1j * eps * u - s * rt_hi))
            return complex(phi(t)) * (g_lo - g_hi)

        val, err = _quad_complex(integrand, lo, hi, [s * r], tol_abs, tol_rel)
        if err > max(tol_abs, 1e3 * tol_rel * abs(val)):
            raise QuadratureFailure(f"Minkowski probe at eps={eps} did not converge",
                                    estimate=val, error=err)
        out.append(val)
    return out
