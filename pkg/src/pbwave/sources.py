"""Source distributions of pulsed-beam wavelets acting on test functions.

Conventions: the imaginary spatial shift ``y`` defines the axis, ``a = |y|``
is the disk radius, and points are parametrised by oblate coordinates
``(p, q, phi)`` with complex distance ``p + i q``. Integrals over
``q in [-a, a]`` are carried out in the angle ``psi`` with ``q = a sin(psi)``,
which removes the square-root endpoint behaviour at the poles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beams import kappa_sign
from .geometry import axis_frame
from .quadrature import adaptive_gauss, trapezoid_circle
from .signals import AnalyticSignal, jump_average, make_signal

N_PHI = 64
AXIS_EPS = 1e-9


def _frame(y):
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    e1, e2, yhat = axis_frame(y)
    return a, e1, e2, yhat


def _oblate_points(p, psi, a, frame, n_phi):
    """Cartesian points and the p/psi tangent vectors on an azimuthal ring.

    Returns arrays of shape ``p.shape + (n_phi, 3)``.
    """
    e1, e2, yhat = frame
    p = np.asarray(p, dtype=float)[..., None]
    psi = np.asarray(psi, dtype=float)[..., None]
    phi = trapezoid_circle(n_phi)
    c, s = np.cos(phi), np.sin(phi)
    big_a = np.sqrt(a * a + p * p)
    rho = big_a * np.cos(psi)
    x3 = p * np.sin(psi)
    radial = c[..., None] * e1 + s[..., None] * e2  # (n_phi, 3)
    pts = rho[..., None] * radial + x3[..., None] * yhat
    dp = (p / big_a * np.cos(psi))[..., None] * radial + np.sin(psi)[..., None] * yhat
    dpsi = (-big_a * np.sin(psi))[..., None] * radial + (p * np.cos(psi))[..., None] * yhat
    return pts, dp, dpsi


def _mean_partials(f, p, psi, a, frame, n_phi=N_PHI):
    """Azimuthal means of f, df/dp and df/dpsi."""
    pts, dp, dpsi = _oblate_points(p, psi, a, frame, n_phi)
    grad = f.grad(pts)
    fbar = np.mean(f.eval(pts), axis=-1)
    fp = np.mean(np.sum(grad * dp, axis=-1), axis=-1)
    fpsi = np.mean(np.sum(grad * dpsi, axis=-1), axis=-1)
    return fbar, fp, fpsi


def phi_mean(f, p, q, y, n_nodes=N_PHI):
    """Mean of f over the azimuth at oblate coordinates (p, q)."""
    a, *frame = _frame(y)
    psi = np.arcsin(np.clip(np.asarray(q, dtype=float) / a, -1.0, 1.0))
    pts, _, _ = _oblate_points(p, psi, a, frame, n_nodes)
    return np.mean(f.eval(pts), axis=-1)


def f_rtilde(f, p, q, y, n_nodes=N_PHI):
    """(d/dp - i d/dq)/2 of the azimuthal mean of f, by the chain rule.

    On the axis (|q| = a) the q-derivative is taken as its symmetric limit
    through the transverse Hessian trace.
    """
    a, *frame = _frame(y)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    psi = np.arcsin(np.clip(q / a, -1.0, 1.0))
    _, fp, fpsi = _mean_partials(f, p, psi, a, frame, n_nodes)
    cos_psi = np.sqrt(np.clip(1.0 - (q / a) ** 2, 0.0, None))
    axis = cos_psi < AXIS_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        fq = fpsi / (a * cos_psi)
    if np.any(axis):
        e1, e2, yhat = frame
        pts = (p * np.sign(q))[..., None] * yhat
        h = f.hess(pts)
        trans = np.einsum("...ij,i,j->...", h, e1, e1) + np.einsum("...ij,i,j->...", h, e2, e2)
        fq_axis = -(a * a + p * p) * q / a**2 * 0.5 * trans
        fq = np.where(axis, fq_axis, fq)
    return 0.5 * (fp - 1j * fq)


def _disk_means(f, rho, frame, n_phi=N_PHI):
    """Azimuthal means of f_3 and f_rho on the disk circle of radius rho."""
    e1, e2, yhat = frame
    phi = trapezoid_circle(n_phi)
    radial = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2
    rho = np.asarray(rho, dtype=float)
    pts = rho[..., None, None] * radial
    grad = f.grad(pts)
    f3 = np.mean(grad @ yhat, axis=-1)
    frho = np.mean(np.sum(grad * radial, axis=-1), axis=-1)
    return f3, frho


def _signal(g):
    return make_signal(g) if not isinstance(g, AnalyticSignal) else g


def action_regularized(f, y, tau, g, kappa, eps, tol_rel=1e-12, tol_abs=1e-15,
                       n_phi=N_PHI):
    """Action of the source of the wavelet truncated outside the ellipsoid p = eps.

    Pole terms at r~ = eps +/- i a plus the q-integral of g f_r~ / r~ on p = eps.
    """
    g = _signal(g)
    s = kappa_sign(kappa)
    a, *frame = _frame(y)
    yhat = frame[2]
    tau = complex(tau)
    alpha = eps + 1j * a
    aa = eps * eps + a * a
    f_n = complex(f.eval(eps * yhat))
    f_s = complex(f.eval(-eps * yhat))
    g_n = complex(g.eval(tau - s * alpha))
    g_s = complex(g.eval(tau - s * np.conj(alpha)))
    boundary = aa / (2j * a) * (g_n * f_n / alpha - g_s * f_s / np.conj(alpha))

    def integrand(psi):
        q = a * np.sin(psi)
        rt = eps + 1j * q
        _, fp, fpsi = _mean_partials(f, np.full_like(psi, eps), psi, a, frame, n_phi)
        # f_r~ dq = (a cos(psi) f_p - i f_psi) / 2 dpsi
        frt_dq = 0.5 * (a * np.cos(psi) * fp - 1j * fpsi)
        d = tau - s * rt
        g.check_poles(d)
        return g.eval(d) * frt_dq / rt

    brk = [0.0] + [sgn * np.arcsin(min(1.0, k * eps / a)) for sgn in (-1, 1) for k in (1, 10)]
    integral, _ = adaptive_gauss(integrand, -np.pi / 2, np.pi / 2, tol_abs=tol_abs,
                                 tol_rel=tol_rel, breaks=brk)
    return boundary - aa / a * integral


def action_limit(f, y, tau, g, tol_rel=1e-12, tol_abs=1e-15, n_phi=N_PHI):
    """Action of S = box W on f, supported on the disk.

    -gbar(tau, a) f(0) + 2 i a int_0^a dq/q gbar(tau, q) f_r~(i q); the
    q-integral runs over q = a sin(psi) so that dq/q f_r~(iq) becomes
    (cos(psi) <f_3> + i <f_rho>)/2 dpsi on the disk circle rho = a cos(psi).
    """
    g = _signal(g)
    a, *frame = _frame(y)
    tau = complex(tau)
    f0 = complex(f.eval(np.zeros(3)))
    head = -complex(jump_average(g, tau, a)) * f0

    def integrand(psi):
        f3, frho = _disk_means(f, a * np.cos(psi), frame, n_phi)
        return jump_average(g, tau, a * np.sin(psi)) * 0.5 * (np.cos(psi) * f3 + 1j * frho)

    integral, _ = adaptive_gauss(integrand, 0.0, np.pi / 2, tol_abs=tol_abs, tol_rel=tol_rel)
    return head + 2j * a * integral


def _cylindrical_layer(f, a, frame, weight, tol_rel, tol_abs, n_phi):
    """int_disk weight(rho) Theta(a-rho)/(2 pi sqrt(a^2-rho^2)) ((a/rho) d_rho - i d_3) f.

    Substituting rho = a sin(psi) turns rho d rho / sqrt(a^2 - rho^2) into
    a sin(psi) d psi.
    """

    def integrand(psi):
        rho = a * np.sin(psi)
        f3, frho = _disk_means(f, rho, frame, n_phi)
        return weight(rho) * (a * frho - 1j * rho * f3)

    val, _ = adaptive_gauss(integrand, 0.0, np.pi / 2, tol_abs=tol_abs, tol_rel=tol_rel)
    return val


def action_static_delta(f, y, tol_rel=1e-12, tol_abs=1e-15, n_phi=N_PHI):
    """Static complex point source at x = -i y acting on f (cylindrical disk form)."""
    a, *frame = _frame(y)
    f0 = complex(f.eval(np.zeros(3)))
    layer = _cylindrical_layer(f, a, frame, lambda rho: np.ones_like(rho), tol_rel, tol_abs, n_phi)
    return f0 + layer


def action_spacetime_delta(f, y, tau, tol_rel=1e-12, tol_abs=1e-15, n_phi=N_PHI):
    """Complex spacetime point source acting on f at complex time tau.

    Uses z^2 = rho^2 - a^2 - tau^2 on the disk world tube. Both the point
    term and the layer carry the same coefficient tau / (2 pi z^2), which is
    -gtilde(tau, rho) for the Cauchy signal; the layer itself is the static one.
    """
    a, *frame = _frame(y)
    tau = complex(tau)
    f0 = complex(f.eval(np.zeros(3)))

    def weight(rho):
        return tau / (2 * np.pi * (rho * rho - a * a - tau * tau))

    head = weight(0.0) * f0
    layer = _cylindrical_layer(f, a, frame, weight, tol_rel, tol_abs, n_phi)
    return head + layer


@dataclass(frozen=True)
class LayerRepresentation:
    """Unsmeared regularised source: two real pole sources plus a layer on p = eps.

    ``pole_plus``/``pole_minus`` multiply f at the poles x = +/- eps yhat;
    ``density(q)`` multiplies the azimuthal mean of d f / d r~ on p = eps
    (its d/dp half is the double layer, its d/dq half the tangential flow).
    """

    pole_plus: complex
    pole_minus: complex
    epsilon: float
    alpha: complex
    a: float
    y: tuple
    tau: complex
    g: AnalyticSignal
    kappa: int

    def density(self, q):
        rt = self.epsilon + 1j * np.asarray(q, dtype=float)
        w = self.g.eval(self.tau - self.kappa * rt) / (4 * np.pi * rt)
        return -4 * np.pi * abs(self.alpha) ** 2 / self.a * w

    def parts(self, f, tol_rel=1e-12, tol_abs=1e-15, n_phi=N_PHI):
        """Contributions (poles, double layer, flow) of the layer acting on f."""
        a = self.a
        y = np.asarray(self.y)
        _, *frame = _frame(y)
        yhat = frame[2]
        eps = self.epsilon
        poles = (self.pole_plus * complex(f.eval(eps * yhat))
                 + self.pole_minus * complex(f.eval(-eps * yhat)))

        def piece(which):
            def integrand(psi):
                q = a * np.sin(psi)
                _, fp, fpsi = _mean_partials(f, np.full_like(psi, eps), psi, a, frame, n_phi)
                if which == "double":
                    term = 0.5 * a * np.cos(psi) * fp
                else:
                    term = -0.5j * fpsi
                return self.density(q) * term

            brk = [0.0] + [sgn * np.arcsin(min(1.0, k * eps / a)) for sgn in (-1, 1) for k in (1, 10)]
            val, _ = adaptive_gauss(integrand, -np.pi / 2, np.pi / 2, tol_abs=tol_abs,
                                    tol_rel=tol_rel, breaks=brk)
            return val

        return poles, piece("double"), piece("flow")

    def contract(self, f, **kw):
        return sum(self.parts(f, **kw))


def unsmeared_layers(y, tau, g, kappa, eps) -> LayerRepresentation:
    g = _signal(g)
    s = kappa_sign(kappa)
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    tau = complex(tau)
    alpha = eps + 1j * a
    aa = eps * eps + a * a

    def w(rt):
        return complex(g.eval(tau - s * rt)) / (4 * np.pi * rt)

    pole_plus = -2j * np.pi * aa / a * w(alpha)
    pole_minus = 2j * np.pi * aa / a * w(np.conj(alpha))
    return LayerRepresentation(pole_plus, pole_minus, float(eps), alpha, a,
                               tuple(y), tau, g, s)
