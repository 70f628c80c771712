"""Electromagnetic pulsed beams built from Hertz potentials Z = p G.

The field is F = E + i B = curl curl Z - d_{it} curl Z with d_{it} = -i d_t,
so F_j = p_k d_j d_k G - p_j Lap G + i eps_jkl d_k d_t G p_l. Off the source
tube it obeys curl F = i d_t F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beams import event_rtilde, kappa_sign, _check_denominators
from .geometry import ComplexEvent
from .signals import make_signal

_LEVI = np.zeros((3, 3, 3))
_LEVI[0, 1, 2] = _LEVI[1, 2, 0] = _LEVI[2, 0, 1] = 1.0
_LEVI[0, 2, 1] = _LEVI[2, 1, 0] = _LEVI[1, 0, 2] = -1.0


def polarization(p_e, p_m=(0.0, 0.0, 0.0)):
    """Complex dipole moment p = p_e + i p_m."""
    return np.asarray(p_e, dtype=float) + 1j * np.asarray(p_m, dtype=float)


@dataclass(frozen=True)
class DerivativeKernel:
    """Value and derivatives of a scalar beam at one or many events."""

    value: np.ndarray
    grad: np.ndarray  # (..., 3)
    hess: np.ndarray  # (..., 3, 3)
    dt: np.ndarray
    dtt: np.ndarray
    dt_grad: np.ndarray  # (..., 3)

    @property
    def laplacian(self):
        return np.trace(self.hess, axis1=-2, axis2=-1)


def derivative_kernel(z: ComplexEvent, sign, g="cauchy") -> DerivativeKernel:
    """Analytic derivatives of W = g(tau - s r~)/(4 pi r~) (G^+/- for the Cauchy signal).

    Uses d_j r~ = z_j / r~ and d_j d_k r~ = delta_jk / r~ - z_j z_k / r~^3.
    """
    g = make_signal(g)
    s = kappa_sign(sign)
    zv = np.asarray(z.zvec, dtype=complex)
    tau = np.asarray(z.tau, dtype=complex)
    rt = event_rtilde(z)
    d = tau - s * rt
    _check_denominators(rt, d)
    g.check_poles(d)
    g0, g1, g2 = g.eval(d), g.deriv(d), g.deriv2(d)
    c = 1.0 / (4.0 * np.pi)
    h = c * g0 / rt
    h_t = c * g1 / rt
    h_tt = c * g2 / rt
    h_r = c * (-s * g1 / rt - g0 / rt**2)
    h_rr = c * (g2 / rt + 2 * s * g1 / rt**2 + 2 * g0 / rt**3)
    h_rt = c * (-s * g2 / rt - g1 / rt**2)

    n = zv / rt[..., None]  # d_j r~
    nn = n[..., :, None] * n[..., None, :]
    eye = np.eye(3)
    d2r = (eye - nn) / rt[..., None, None]
    grad = h_r[..., None] * n
    hess = h_rr[..., None, None] * nn + h_r[..., None, None] * d2r
    return DerivativeKernel(h, grad, hess, h_t, h_tt, h_rt[..., None] * n)


def hertz_potential(z: ComplexEvent, p, sign):
    """Z^+/- = p G^+/-."""
    k = derivative_kernel(z, sign)
    return np.asarray(p, dtype=complex) * k.value[..., None]


def _field_from_kernel(k: DerivativeKernel, p):
    p = np.asarray(p, dtype=complex)
    grad_div = np.einsum("...jk,...k->...j", k.hess, np.broadcast_to(p, k.grad.shape))
    lap = k.laplacian[..., None] * p
    curl_t = np.einsum("jkl,...k,...l->...j", _LEVI, k.dt_grad, np.broadcast_to(p, k.grad.shape))
    return grad_div - lap + 1j * curl_t


@dataclass(frozen=True)
class EMField:
    F: np.ndarray

    @property
    def E(self):
        return np.real(self.F)

    @property
    def B(self):
        return np.imag(self.F)


def em_field(z: ComplexEvent, p, sign, g="cauchy") -> EMField:
    """Self-dual field F = E + i B of the pulsed-beam dipole with moment p."""
    return EMField(_field_from_kernel(derivative_kernel(z, sign, g), p))


def dyadic_mother(z: ComplexEvent, sign, g="cauchy"):
    """3x3 matrix whose k-th column is the field of the unit dipole e_k."""
    k = derivative_kernel(z, sign, g)
    cols = [_field_from_kernel(k, e) for e in np.eye(3)]
    return np.stack(cols, axis=-1)


def dyadic_translate(xprime, tprime, x, t, y, u, sign, g="cauchy"):
    """Dyadic beam centred on the complex source point: G(x' - x + i y)."""
    z = ComplexEvent.from_parts(np.asarray(xprime, float) - np.asarray(x, float),
                                np.asarray(tprime, float) - np.asarray(t, float), y, u)
    return dyadic_mother(z, sign, g)


def split_real_fields(F):
    """(E, B) = (Re F, Im F)."""
    F = F.F if isinstance(F, EMField) else np.asarray(F)
    return np.real(F), np.imag(F)
