"""Analytic driving signals g(tau) and their jump averages across the disk."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import OutOfDisk, PoleOnEvaluation, UnsupportedKind

POLE_TOL = 1e-12


@dataclass(frozen=True)
class AnalyticSignal:
    """A signal holomorphic off the real axis, with its first two derivatives.

    ``deriv2`` is only needed by the brute-force spacetime oracle and the
    electromagnetic kernels; custom signals may leave it out.
    """

    eval: Callable
    deriv: Callable
    deriv2: Optional[Callable] = None
    kind: str = "custom"
    order: int = 0
    poles: tuple = field(default=())

    def __call__(self, tau):
        return self.eval(tau)

    def check_poles(self, tau):
        for pole in self.poles:
            d = np.abs(np.asarray(tau) - pole)
            if np.any(d <= POLE_TOL * np.maximum(1.0, np.abs(tau))):
                raise PoleOnEvaluation(f"{self.kind} signal evaluated at its pole {pole}")

    @property
    def label(self):
        if self.kind == "dcauchy":
            return f"dcauchy:{self.order}"
        return self.kind


def _cauchy_derivative(m):
    sign = -1.0 if m % 2 else 1.0
    coef = sign * math.factorial(m) / (2.0 * np.pi)

    def f(tau):
        return coef / np.asarray(tau, dtype=complex) ** (m + 1)

    return f


def _constant(value):
    def f(tau):
        return np.full(np.shape(tau), value, dtype=complex)

    return f


def make_signal(kind) -> AnalyticSignal:
    """Build a signal from ``"cauchy"``, ``"const"`` or ``"dcauchy:m"``.

    The Cauchy signal is g = 1/(2 pi tau); ``dcauchy:m`` is its m-th
    derivative; ``const`` is g = -1.
    """
    if isinstance(kind, AnalyticSignal):
        return kind
    if not isinstance(kind, str):
        raise UnsupportedKind(f"signal kind must be a string, got {kind!r}")
    name, _, arg = kind.strip().lower().partition(":")
    if name == "cauchy" and not arg:
        m = 0
    elif name == "dcauchy":
        try:
            m = int(arg) if arg else 1
        except ValueError:
            raise UnsupportedKind(f"bad derivative order in {kind!r}") from None
        if m < 1:
            raise UnsupportedKind("dcauchy order must be >= 1")
    elif name == "const" and not arg:
        zero = _constant(0.0)
        return AnalyticSignal(_constant(-1.0), zero, zero, kind="const")
    else:
        raise UnsupportedKind(f"unknown signal kind {kind!r}")
    return AnalyticSignal(
        _cauchy_derivative(m),
        _cauchy_derivative(m + 1),
        _cauchy_derivative(m + 2),
        kind="cauchy" if m == 0 else "dcauchy",
        order=m,
        poles=(0.0,),
    )


def custom_signal(eval, deriv, deriv2=None, poles=()) -> AnalyticSignal:
    return AnalyticSignal(eval, deriv, deriv2, kind="custom", poles=tuple(poles))


def jump_average(g: AnalyticSignal, tau, q):
    """Mean of g across the jump on the disk: (g(tau - i q) + g(tau + i q))/2."""
    tau = np.asarray(tau, dtype=complex)
    q = np.asarray(q, dtype=float)
    lo = tau - 1j * q
    hi = tau + 1j * q
    g.check_poles(lo)
    g.check_poles(hi)
    return 0.5 * (g.eval(lo) + g.eval(hi))


def jump_average_deriv(g: AnalyticSignal, tau, q):
    """Mean of g' across the jump (used for the time derivative of actions)."""
    tau = np.asarray(tau, dtype=complex)
    q = np.asarray(q, dtype=float)
    return 0.5 * (g.deriv(tau - 1j * q) + g.deriv(tau + 1j * q))


def gtilde_rho(g: AnalyticSignal, tau, rho, a):
    """Jump average written in the cylindrical radius: q = sqrt(a^2 - rho^2)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho > a * (1.0 + 1e-12)) or np.any(rho < 0.0):
        raise OutOfDisk("rho must lie in [0, a]")
    return jump_average(g, tau, np.sqrt(np.clip(a * a - rho * rho, 0.0, None)))


def cauchy_riemann_residual(g: AnalyticSignal, tau, h=1e-4):
    """|(d/d Re + i d/d Im) g| by centered differences; ~0 for holomorphic g."""
    tau = np.asarray(tau, dtype=complex)
    d_re = (g.eval(tau + h) - g.eval(tau - h)) / (2 * h)
    d_im = (g.eval(tau + 1j * h) - g.eval(tau - 1j * h)) / (2 * h)
    return np.abs(d_re + 1j * d_im)
