"""Complex distance, oblate spheroidal coordinates and causal classification.

All routines broadcast over leading axes: spatial vectors have shape
``(..., 3)`` and the corresponding scalars shape ``(...)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDilation, NotOnCut, OnCutAmbiguous


def default_tol(a):
    return 1e-9 * max(1.0, float(a))


def _vec(v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {v.shape}")
    return v


def axis_frame(y):
    """Right-handed orthonormal frame ``(e1, e2, yhat)`` attached to ``y``.

    For ``y`` along +e3 the frame is the standard basis, so the azimuth is
    the usual one.
    """
    y = _vec(y)
    a = np.linalg.norm(y)
    if a == 0.0:
        raise DegenerateDilation("y = 0 has no axis")
    yhat = y / a
    ref = np.array([1.0, 0.0, 0.0]) if abs(yhat[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = ref - (ref @ yhat) * yhat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(yhat, e1)
    return e1, e2, yhat


def cylindrical(x, y):
    """Return ``(rho, x3, phi)`` of ``x`` about the axis of ``y``."""
    x = _vec(x)
    e1, e2, yhat = axis_frame(y)
    x1 = x @ e1
    x2 = x @ e2
    x3 = x @ yhat
    rho = np.hypot(x1, x2)
    phi = np.where(rho > 0.0, np.mod(np.arctan2(x2, x1), 2 * np.pi), 0.0)
    return rho, x3, phi


def _solve_pq(w, x3, a):
    """Cancellation-stable solve of p^2 - q^2 = w, p q = a x3 with p >= 0.

    Points on the open cut (x3 == 0, w < 0) come back with q = +|q| and are
    flagged by the caller.
    """
    w = np.asarray(w, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    s = np.hypot(w, 2.0 * a * x3)
    pos = w >= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        p_pos = np.sqrt(0.5 * (w + s))
        q_pos = np.where(p_pos > 0.0, a * x3 / p_pos, 0.0)
        qabs = np.sqrt(0.5 * (s - w))
        q_neg = np.where(x3 < 0.0, -qabs, qabs)
        p_neg = np.where(qabs > 0.0, a * np.abs(x3) / qabs, 0.0)
    p = np.where(pos, p_pos, p_neg)
    q = np.where(pos, q_pos, q_neg)
    return p, q


def _on_open_cut(w, x3):
    return (np.asarray(x3) == 0.0) & (np.asarray(w) < 0.0)


def complex_distance(x, y):
    """Complex distance sqrt((x + i y)^2) on the branch Re >= 0.

    ``y`` broadcasts against ``x``. Where ``y = 0`` this is the ordinary
    distance |x| (returned as complex). Raises :class:`OnCutAmbiguous` for
    points exactly on an open disk; use :func:`complex_distance_sided` there.
    """
    x = _vec(x)
    y = _vec(y)
    a = np.linalg.norm(y, axis=-1)
    r2 = np.einsum("...i,...i->...", x, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        x3 = np.where(a > 0.0, np.einsum("...i,...i->...", x, y) / np.where(a > 0.0, a, 1.0), 0.0)
    w = r2 - a * a
    if np.any(_on_open_cut(w, x3) & (a > 0.0)):
        raise OnCutAmbiguous("point on the open branch disk; pass a side")
    p, q = _solve_pq(w, x3, a)
    real = a == 0.0
    if np.any(real):
        p = np.where(real, np.sqrt(r2), p)
        q = np.where(real, 0.0, q)
    return p + 1j * q


def complex_distance_sided(x, y, side, tol=None):
    """Boundary value of the complex distance on the disk from ``x3 -> 0^side``.

    Returns ``side * i * sqrt(a^2 - r^2)``.
    """
    if side not in (1, -1, "+", "-"):
        raise ValueError(f"side must be +1 or -1, got {side!r}")
    s = 1.0 if side in (1, "+") else -1.0
    x = _vec(x)
    y = _vec(y)
    a = float(np.linalg.norm(y))
    if a == 0.0:
        raise DegenerateDilation("y = 0 has no branch disk")
    tol = default_tol(a) if tol is None else tol
    x3 = x @ (y / a)
    r2 = np.einsum("...i,...i->...", x, x)
    if np.any(np.abs(x3) > tol) or np.any(r2 > a * a * (1.0 + tol)):
        raise NotOnCut("point is not on the closed branch disk")
    return 1j * s * np.sqrt(np.clip(a * a - r2, 0.0, None))


@dataclass(frozen=True)
class OblateCoords:
    """Oblate spheroidal coordinates with complex distance ``p + i q``."""

    p: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    a: float

    @property
    def rtilde(self):
        return np.asarray(self.p) + 1j * np.asarray(self.q)


def to_oblate(x, y, side=None):
    x = _vec(x)
    y = _vec(y)
    a = float(np.linalg.norm(y))
    if a == 0.0:
        raise DegenerateDilation("oblate coordinates need y != 0")
    rho, x3, phi = cylindrical(x, y)
    w = rho * rho + x3 * x3 - a * a
    cut = _on_open_cut(w, x3)
    p, q = _solve_pq(w, x3, a)
    if np.any(cut):
        if side is None:
            raise OnCutAmbiguous("point on the open branch disk; pass a side")
        s = 1.0 if side in (1, "+") else -1.0
        q = np.where(cut, s * np.sqrt(np.clip(-w, 0.0, None)), q)
        p = np.where(cut, 0.0, p)
    return OblateCoords(p=p, q=q, phi=phi, a=a)


def from_oblate(c: OblateCoords, yhat):
    """Cartesian point with oblate coordinates ``c`` about the unit axis ``yhat``."""
    e1, e2, yh = axis_frame(yhat)
    a = c.a
    p = np.asarray(c.p, dtype=float)
    q = np.asarray(c.q, dtype=float)
    phi = np.asarray(c.phi, dtype=float)
    rho = np.sqrt((a * a + p * p) * np.clip(a * a - q * q, 0.0, None)) / a
    x3 = p * q / a
    return (
        (rho * np.cos(phi))[..., None] * e1
        + (rho * np.sin(phi))[..., None] * e2
        + x3[..., None] * yh
    )


def volume_jacobian(c: OblateCoords):
    """Volume element factor (p^2 + q^2)/a."""
    return (np.asarray(c.p) ** 2 + np.asarray(c.q) ** 2) / c.a


class BranchLocus(enum.Enum):
    REGULAR = "regular"
    ON_BRANCH_SPHERE = "on-branch-sphere"
    ON_DISK_PLUS = "on-disk+"
    ON_DISK_MINUS = "on-disk-"

    @property
    def on_disk(self):
        return self in (BranchLocus.ON_DISK_PLUS, BranchLocus.ON_DISK_MINUS)


def classify_branch_locus(x, y, tol=None) -> BranchLocus:
    x = _vec(x)
    y = _vec(y)
    a = float(np.linalg.norm(y))
    if a == 0.0:
        raise DegenerateDilation("branch locus needs y != 0")
    tol = default_tol(a) if tol is None else tol
    r = float(np.linalg.norm(x))
    x3 = float(x @ (y / a))
    if abs(x3) <= tol:
        if abs(r - a) <= tol:
            return BranchLocus.ON_BRANCH_SPHERE
        if r < a:
            return BranchLocus.ON_DISK_MINUS if x3 < 0.0 else BranchLocus.ON_DISK_PLUS
    return BranchLocus.REGULAR


class CausalClass(enum.Enum):
    TIMELIKE_FUTURE = "timelike-future"
    TIMELIKE_PAST = "timelike-past"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"

    @property
    def timelike(self):
        return self in (CausalClass.TIMELIKE_FUTURE, CausalClass.TIMELIKE_PAST)


def classify_causal(y, u, tol=None) -> CausalClass:
    """Classify the imaginary event ``(y, i u)`` against the light cone."""
    a = float(np.linalg.norm(_vec(y)))
    u = float(u)
    tol = default_tol(a) if tol is None else tol
    if abs(abs(u) - a) <= tol:
        return CausalClass.LIGHTLIKE
    if u > a:
        return CausalClass.TIMELIKE_FUTURE
    if -u > a:
        return CausalClass.TIMELIKE_PAST
    return CausalClass.SPACELIKE


def in_causal_tube(y, u, tol=None):
    return classify_causal(y, u, tol).timelike


def farzone_complex_distance(r, theta, a):
    """Far-zone approximation r + i a cos(theta)."""
    return np.asarray(r, dtype=float) + 1j * a * np.cos(theta)


@dataclass(frozen=True)
class ComplexEvent:
    """Complex spacetime point ``z = (zvec, i tau)``.

    ``zvec = x + i y`` and ``tau = t + i u``; the real event is ``(x, t)``
    and the imaginary one ``(y, u)``.
    """

    zvec: np.ndarray
    tau: complex

    @classmethod
    def from_parts(cls, x, t, y, u):
        x = _vec(x)
        y = _vec(y)
        return cls(zvec=x + 1j * y, tau=np.asarray(t) + 1j * np.asarray(u))

    @property
    def x(self):
        return np.real(self.zvec)

    @property
    def y(self):
        return np.imag(self.zvec)

    @property
    def t(self):
        return np.real(self.tau)

    @property
    def u(self):
        return np.imag(self.tau)

    @property
    def zsq(self):
        """Minkowski square zvec.zvec - tau^2."""
        z = np.asarray(self.zvec)
        return np.sum(z * z, axis=-1) - np.asarray(self.tau) ** 2

    def translated(self, d, dt=0.0):
        return ComplexEvent(self.zvec + _vec(d), self.tau + dt)
