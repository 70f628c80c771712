"""Independent verification machinery: oblate quadrature, finite differences,
convergence-order fits and extrapolation.

Nothing here calls the closed-form source actions; the brute-force actions
probe the defining identities directly (integrate W against the wave
operator applied to the test function).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beams import kappa_sign
from .errors import QuadratureFailure
from .geometry import axis_frame
from .quadrature import map_nodes, trapezoid_circle
from .signals import make_signal


@dataclass(frozen=True)
class QuadratureSpec:
    tol_rel: float = 1e-10
    tol_abs: float = 1e-13
    max_depth: int = 3
    n_psi: int = 16
    n_p: int = 16
    n_phi: int = 16
    p_panels: int = 2
    chunk: int = 200_000

    def __post_init__(self):
        if self.tol_rel <= 0 or self.tol_abs <= 0:
            raise ValueError("tolerances must be positive")


def _axial_offset(center, yhat):
    """Signed position of ``center`` along the axis, or None if it is off-axis."""
    center = np.asarray(center, dtype=float)
    along = float(center @ yhat)
    if np.linalg.norm(center - along * yhat) > 1e-12 * max(1.0, abs(along)):
        return None
    return along


def _sphere_breaks(psi, spheres, a, yhat, p_max):
    """p-values where each axis-centred sphere cuts the ray of fixed psi (clipped)."""
    cols = []
    s, c = np.sin(psi), np.cos(psi)
    for center, radius in spheres:
        along = _axial_offset(center, yhat)
        if along is None:
            continue
        disc = along**2 * s**2 - a**2 * c**2 - along**2 + radius**2
        root = np.sqrt(np.clip(disc, 0.0, None))
        for sign in (-1.0, 1.0):
            p = np.where(disc > 0.0, along * s + sign * root, 0.0)
            cols.append(np.clip(p, 0.0, p_max))
    return cols


def _psi_breaks(spheres, a, yhat):
    """Disk plane plus the angles where an axis-centred sphere is tangent to a psi-ray."""
    out = {0.0}
    for center, radius in spheres:
        along = _axial_offset(center, yhat)
        if along is None:
            continue
        s2 = 1.0 - radius**2 / (along**2 + a**2)
        if 0.0 < s2 < 1.0:
            out.update({np.arcsin(np.sqrt(s2)), -np.arcsin(np.sqrt(s2))})
    return sorted(out)


def _tensor_estimate(integrand, p_min, p_max, a, frame, spheres, n_psi, n_p, n_phi, p_panels,
                     chunk):
    e1, e2, yhat = frame
    cuts = [-np.pi / 2, *_psi_breaks(spheres, a, yhat), np.pi / 2]
    psi, w_psi = map_nodes(cuts[:-1], cuts[1:], n_psi)
    psi, w_psi = psi.ravel(), w_psi.ravel()
    phi = trapezoid_circle(n_phi)
    w_phi = 2.0 * np.pi / n_phi

    edges = [np.full_like(psi, p_min), np.full_like(psi, p_max)]
    edges += [np.full_like(psi, p_min + (p_max - p_min) * k / p_panels) for k in range(1, p_panels)]
    edges += [np.clip(b, p_min, None) for b in _sphere_breaks(psi, spheres, a, yhat, p_max)]
    edges = np.sort(np.stack(edges, axis=-1), axis=-1)  # (n_psi2, n_edges)
    pn, pw = map_nodes(edges[:, :-1], edges[:, 1:], n_p)  # (n_psi2, nseg, n_p)
    n_psi2 = psi.size
    pn = pn.reshape(n_psi2, -1)
    pw = pw.reshape(n_psi2, -1)

    total = 0.0 + 0.0j
    rows = max(1, chunk // max(1, pn.shape[1] * n_phi))
    for i0 in range(0, n_psi2, rows):
        sl = slice(i0, i0 + rows)
        ps = psi[sl][:, None, None]
        pp = pn[sl][:, :, None]
        q = a * np.sin(ps)
        jac = (pp**2 + q**2) * np.cos(ps)  # (p^2+q^2)/a * dq/dpsi
        P, Q, PHI = np.broadcast_arrays(pp, q, phi[None, None, :])
        vals = integrand(P, Q, PHI)
        wts = (w_psi[sl][:, None, None] * pw[sl][:, :, None]) * w_phi
        total += np.sum(vals * jac * wts)
    return total


def quad_oblate(integrand, p_max, y, spec: QuadratureSpec | None = None, spheres=(),
                tail=0.0, return_error=False, p_min=0.0):
    """Integrate ``integrand(p, q, phi)`` over the shell p_min <= p <= p_max.

    The volume element (p^2 + q^2)/a dp dq dphi is folded in. Node counts
    are doubled until two successive estimates agree; ``tail`` is an extra
    error allowance (e.g. a truncated Gaussian probe).
    """
    spec = spec or QuadratureSpec()
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    frame = axis_frame(y)
    prev = None
    err = np.inf
    for level in range(spec.max_depth + 1):
        k = 2**level
        est = _tensor_estimate(integrand, p_min, p_max, a, frame, spheres, spec.n_psi * k,
                               spec.n_p * k, spec.n_phi * k, spec.p_panels, spec.chunk)
        if prev is not None:
            err = abs(est - prev)
            if err <= max(spec.tol_abs, spec.tol_rel * abs(est)):
                return (est, err + tail) if return_error else est
        prev = est
    raise QuadratureFailure("oblate quadrature did not reach tolerance", estimate=prev,
                            error=err + tail)


def _points(p, q, phi, a, frame):
    e1, e2, yhat = frame
    rho = np.sqrt((a * a + p * p) * np.clip(a * a - q * q, 0.0, None)) / a
    x3 = p * q / a
    return (rho * np.cos(phi))[..., None] * e1 + (rho * np.sin(phi))[..., None] * e2 \
        + x3[..., None] * yhat


def action_bruteforce_static(f, y, spec: QuadratureSpec | None = None, return_error=False,
                             eps=0.0):
    """int G3(x + i y) Laplacian(f)(x) d^3x with G3 = -1/(4 pi r~).

    With ``eps > 0`` the integral is restricted to p >= eps, i.e. it probes
    the source of the wavelet truncated inside the ellipsoid p = eps.
    """
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    frame = axis_frame(y)

    def integrand(p, q, phi):
        x = _points(p, q, phi, a, frame)
        rt = p + 1j * q  # sided automatically: p >= 0, q carries the disk side
        return -f.laplacian(x) / (4 * np.pi * rt)

    return quad_oblate(integrand, f.support_radius, y, spec, spheres=f.spheres,
                       tail=f.tail_bound, return_error=return_error, p_min=eps)


def action_bruteforce_spacetime(f, y, tau, g, kappa, spec: QuadratureSpec | None = None,
                                return_error=False, eps=0.0):
    """int [W Laplacian(f) - (d_t^2 W) f] d^3x at fixed complex time tau."""
    g = make_signal(g)
    if g.deriv2 is None:
        raise ValueError("spacetime oracle needs the signal's second derivative")
    s = kappa_sign(kappa)
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    frame = axis_frame(y)
    tau = complex(tau)

    def integrand(p, q, phi):
        x = _points(p, q, phi, a, frame)
        rt = p + 1j * q
        d = tau - s * rt
        return (g.eval(d) * f.laplacian(x) - g.deriv2(d) * f.eval(x)) / (4 * np.pi * rt)

    return quad_oblate(integrand, f.support_radius, y, spec, spheres=f.spheres,
                       tail=f.tail_bound, return_error=return_error, p_min=eps)


_E = np.eye(3)


def fd_dalembertian(field, x, t, h):
    """Second-order centred (Laplacian - d_t^2) of ``field(x, t)``.

    ``h`` may be a scalar or broadcast per point.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    f0 = field(x, t)
    lap = 0.0
    hv = h[..., None]
    for j in range(3):
        lap = lap + field(x + hv * _E[j], t) - 2 * f0 + field(x - hv * _E[j], t)
    dtt = field(x, t + h) - 2 * f0 + field(x, t - h)
    return (lap - dtt) / h**2


def fd_gradient(field, x, t, h):
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)[..., None]
    return np.stack([(field(x + h * _E[j], t) - field(x - h * _E[j], t)) / (2 * h[..., 0])
                     for j in range(3)], axis=-1)


def fd_time_derivative(field, x, t, h):
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    fp = field(x, t + h)
    fm = field(x, t - h)
    hh = h.reshape(h.shape + (1,) * (np.ndim(fp) - h.ndim))
    return (fp - fm) / (2 * hh)


def fd_divergence(vfield, x, t, h):
    """Centred divergence of a vector field returning (..., 3)."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    out = 0.0
    for j in range(3):
        hv = h[..., None] * _E[j]
        out = out + (vfield(x + hv, t)[..., j] - vfield(x - hv, t)[..., j]) / (2 * h)
    return out


def fd_curl(vfield, x, t, h):
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)

    def d(j, comp):
        hv = h[..., None] * _E[j]
        return (vfield(x + hv, t)[..., comp] - vfield(x - hv, t)[..., comp]) / (2 * h)

    return np.stack([d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)], axis=-1)


@dataclass
class ConvergenceReport:
    steps: list
    residuals: list
    order: float
    target: float
    monotone: bool
    passed: bool
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {
            "steps": [float(h) for h in self.steps],
            "residuals": [float(r) for r in self.residuals],
            "order": float(self.order),
            "target": float(self.target),
            "monotone": bool(self.monotone),
            "passed": bool(self.passed),
            "notes": list(self.notes),
        }


def convergence_order(steps, residuals, target=2.0, slack=0.1):
    """Least-squares log-log slope of residual vs step; passes iff slope >= target - slack."""
    steps = np.asarray(steps, dtype=float)
    res = np.abs(np.asarray(residuals, dtype=float))
    if steps.size < 3 or steps.size != res.size:
        raise ValueError("need at least three (step, residual) pairs")
    order_idx = np.argsort(steps)[::-1]
    steps, res = steps[order_idx], res[order_idx]
    if np.all(res == 0.0):
        return ConvergenceReport(list(steps), list(res), np.inf, target, True, True,
                                 ["residuals identically zero"])
    monotone = bool(np.all(np.diff(res) < 0.0))
    notes = [] if monotone else ["NonMonotone"]
    if np.any(res == 0.0):
        return ConvergenceReport(list(steps), list(res), np.nan, target, monotone, False,
                                 notes + ["zero residual in sweep"])
    slope = np.polyfit(np.log(steps), np.log(res), 1)[0]
    return ConvergenceReport(list(steps), list(res), float(slope), target, monotone,
                             monotone and slope >= target - slack, notes)


def richardson(steps, values):
    """Polynomial (Neville) extrapolation of ``values(step)`` to step = 0."""
    h = [float(s) for s in steps]
    t = [complex(v) for v in values]
    n = len(h)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            t[i] = (h[i - k] * t[i] - h[i] * t[i - 1]) / (h[i - k] - h[i])
    return t[-1]
