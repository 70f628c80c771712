"""Verification probes shared by the command line and the test-suite.

Each probe returns a plain dict (JSON-ready) with a ``passed`` flag.
Randomised probes take a numpy Generator so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .beams import bump1d, kappa_sign, minkowski_limit_probe, wavelet
from .em import derivative_kernel, em_field
from .geometry import ComplexEvent, complex_distance, farzone_complex_distance
from .oracles import (
    convergence_order,
    fd_curl,
    fd_dalembertian,
    fd_divergence,
    fd_gradient,
    fd_time_derivative,
    richardson,
)
from .signals import make_signal

FD_STEPS = (1e-2, 5e-3, 2.5e-3)
ORDER_TARGET = 2.0
ORDER_SLACK = 0.1


def sample_offdisk(rng, n, y=(0.0, 0.0, 1.0), box=3.0, margin=0.3, t_range=3.0):
    """Random events (x, t) at least ``margin`` away from the branch disk of y."""
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    yhat = y / a
    out = []
    while len(out) < n:
        x = rng.uniform(-box, box, size=(2 * n, 3))
        x3 = x @ yhat
        rho = np.linalg.norm(x - x3[:, None] * yhat, axis=-1)
        ok = (np.abs(x3) >= margin) | (rho >= a + margin)
        out.extend(x[ok])
    x = np.array(out[:n])
    t = rng.uniform(-t_range, t_range, size=n)
    return x, t


def _local_scale(x, t, y, u, sign):
    rt = complex_distance(x, y)
    tau = t + 1j * u
    return np.minimum(1.0, np.minimum(np.abs(rt), np.abs(tau - sign * rt)))


def _per_point_orders(steps, residuals):
    """Least-squares log-log slopes per column of ``residuals`` (n_steps, n_points)."""
    lh = np.log(np.asarray(steps))
    lr = np.log(np.maximum(residuals, 1e-300))
    lh = lh - lh.mean()
    return (lh @ (lr - lr.mean(axis=0))) / (lh @ lh)


def _summarise(name, steps, residuals, extra=None):
    """Aggregate report: per-point orders plus a global fit on the max residual."""
    residuals = np.asarray(residuals)
    orders = _per_point_orders(steps, residuals)
    glob = convergence_order(steps, residuals.max(axis=1), ORDER_TARGET, ORDER_SLACK)
    out = {
        "probe": name,
        "steps": list(steps),
        "max_residual": [float(r) for r in residuals.max(axis=1)],
        "order_global": glob.order,
        "order_min": float(orders.min()),
        "order_median": float(np.median(orders)),
        "n_points": int(residuals.shape[1]),
        "target": ORDER_TARGET,
        "passed": bool(glob.passed and orders.min() >= ORDER_TARGET - ORDER_SLACK),
        "notes": glob.notes,
    }
    if extra:
        out.update(extra)
    return out


def waveop_probe(rng, n=1000, y=(0.0, 0.0, 1.0), u=2.0, signal="cauchy", kappa=1,
                 steps=FD_STEPS):
    """FD d'Alembertian of W at random off-disk events; exact value is zero."""
    g = make_signal(signal)
    s = kappa_sign(kappa)
    y = np.asarray(y, dtype=float)
    x, t = sample_offdisk(rng, n, y)
    scale = _local_scale(x, t, y, u, s)

    def field(xx, tt):
        return wavelet(ComplexEvent.from_parts(xx, tt, y, u), g, s)

    w0 = np.abs(field(x, t))
    res = []
    for h in steps:
        hh = h * scale
        res.append(np.abs(fd_dalembertian(field, x, t, hh)) * scale**2 / w0)
    return _summarise("waveop", steps, res, {"signal": g.label, "kappa": s})


def kernel_fd_probe(rng, n=1000, y=(0.0, 0.0, 1.0), u=2.0, sign=1, signal="cauchy",
                    steps=FD_STEPS):
    """Analytic derivative kernel vs centred differences of lower-order entries."""
    s = kappa_sign(sign)
    y = np.asarray(y, dtype=float)
    x, t = sample_offdisk(rng, n, y)
    scale = _local_scale(x, t, y, u, s)
    exact = derivative_kernel(ComplexEvent.from_parts(x, t, y, u), s, signal)

    def kern(xx, tt):
        return derivative_kernel(ComplexEvent.from_parts(xx, tt, y, u), s, signal)

    def val(xx, tt):
        return kern(xx, tt).value

    def dt(xx, tt):
        return kern(xx, tt).dt

    def grad(xx, tt):
        return kern(xx, tt).grad

    norm = np.abs(exact.value)
    res = []
    for h in steps:
        hh = h * scale
        errs = [
            np.max(np.abs(fd_gradient(val, x, t, hh) - exact.grad), axis=-1) * scale,
            np.abs(fd_time_derivative(val, x, t, hh) - exact.dt) * scale,
            np.abs(fd_time_derivative(dt, x, t, hh) - exact.dtt) * scale**2,
            np.max(np.abs(fd_gradient(dt, x, t, hh) - exact.dt_grad), axis=-1) * scale**2,
        ]
        hess_fd = np.stack([fd_gradient(lambda xx, tt, j=j: grad(xx, tt)[..., j], x, t, hh)
                            for j in range(3)], axis=-2)
        errs.append(np.max(np.abs(hess_fd - exact.hess), axis=(-2, -1)) * scale**2)
        res.append(np.max(errs, axis=0) / norm)
    return _summarise("kernel-fd", steps, res, {"sign": s})


def divergence_probe(rng, n=1000, y=(0.0, 0.0, 1.0), u=2.0, sign=1, p=(1.0, 0.0, 0.0),
                     signal="cauchy", steps=FD_STEPS):
    """FD divergence of the field F off the source tube; exact value is zero."""
    s = kappa_sign(sign)
    y = np.asarray(y, dtype=float)
    x, t = sample_offdisk(rng, n, y)
    scale = _local_scale(x, t, y, u, s)

    def field(xx, tt):
        return em_field(ComplexEvent.from_parts(xx, tt, y, u), p, s, signal).F

    norm = np.linalg.norm(field(x, t), axis=-1)
    res = []
    for h in steps:
        hh = h * scale
        res.append(np.abs(fd_divergence(field, x, t, hh)) * scale / norm)
    return _summarise("divergence", steps, res, {"sign": s})


def maxwell_sign_probe(rng, n=100, y=(0.0, 0.0, 1.0), u=2.0, sign=1, p=(1.0, 0.5, -0.3),
                       signal="cauchy", h=1e-3):
    """Estimate sigma in curl F = sigma i d_t F at random events; report one global sign."""
    s = kappa_sign(sign)
    y = np.asarray(y, dtype=float)
    x, t = sample_offdisk(rng, n, y)
    scale = _local_scale(x, t, y, u, s)
    hh = h * scale

    def field(xx, tt):
        return em_field(ComplexEvent.from_parts(xx, tt, y, u), p, s, signal).F

    curl = fd_curl(field, x, t, hh)
    rhs = 1j * fd_time_derivative(field, x, t, hh)
    sigma = np.real(np.sum(curl * np.conj(rhs), axis=-1)) / np.sum(np.abs(rhs) ** 2, axis=-1)
    signs = np.sign(sigma)
    consistent = bool(np.all(signs == signs[0]))
    spread = float(np.max(np.abs(np.abs(sigma) - 1.0)))
    return {
        "probe": "maxwell-sign",
        "n_points": int(n),
        "sign": int(signs[0]) if consistent else 0,
        "consistent": consistent,
        "max_deviation": spread,
        "passed": consistent and spread < 1e-3,
    }


def farzone_probe(theta=np.pi / 4, a=1.0, radii=(50.0, 100.0, 200.0, 400.0), target=-1.0,
                  slack=0.05):
    """Slope of |r~ - (r + i a cos theta)| against r on a log-log scale."""
    radii = np.asarray(radii, dtype=float)
    x = np.stack([radii * np.sin(theta), np.zeros_like(radii), radii * np.cos(theta)], axis=-1)
    exact = complex_distance(x, np.array([0.0, 0.0, a]))
    err = np.abs(exact - farzone_complex_distance(radii, theta, a))
    slope = float(np.polyfit(np.log(radii), np.log(err), 1)[0])
    return {
        "probe": "farzone",
        "theta": float(theta),
        "a": float(a),
        "radii": radii.tolist(),
        "residuals": err.tolist(),
        "slope": slope,
        "target": target,
        "passed": bool(abs(slope - target) <= slack),
    }


def minkowski_probe(r=1.0, y=(0.0, 0.0, 1.0), u=2.0, sign=1, eps_list=(0.1, 0.05, 0.025),
                    halfwidth=3.0, power=4, tol=1e-4, tol_rel=1e-12, tol_abs=1e-15):
    """Smeared boundary-value difference extrapolated to eps = 0 vs i phi(+/-r)/(4 pi r)."""
    s = kappa_sign(sign)
    y = np.asarray(y, dtype=float)
    yhat = y / np.linalg.norm(y)
    x = r * np.array([np.sqrt(0.5), 0.0, np.sqrt(0.5)]) if abs(yhat[0]) < 0.9 \
        else r * np.array([0.0, np.sqrt(0.5), np.sqrt(0.5)])
    phi = bump1d(s * r, halfwidth, power)
    vals = minkowski_limit_probe(x, y, u, s, phi, list(eps_list), tol_rel=tol_rel,
                                 tol_abs=tol_abs)
    extrap = richardson(eps_list, vals)
    expected = 1j * phi(s * r) / (4 * np.pi * r)
    rel = abs(extrap - expected) / abs(expected)
    return {
        "probe": "minkowski",
        "r": float(r),
        "bump": {"center": s * float(r), "halfwidth": float(halfwidth), "power": int(power)},
        "eps": list(map(float, eps_list)),
        "values": [[v.real, v.imag] for v in map(complex, vals)],
        "extrapolated": [extrap.real, extrap.imag],
        "expected": [complex(expected).real, complex(expected).imag],
        "relative_error": float(rel),
        "tolerance": tol,
        "passed": bool(rel <= tol),
    }


def peak_probe(rng, n=100, dt=1e-2, span=12.0):
    """argmax_t |G^+| on a time grid vs the predicted peak time p = Re r~."""
    from .beams import green_pm

    worst = 0.0
    for _ in range(n):
        a = rng.uniform(0.2, 2.0)
        u = a * rng.uniform(1.1, 3.0)
        d = rng.normal(size=3)
        y = a * d / np.linalg.norm(d)
        x = rng.uniform(-4.0, 4.0, size=3)
        p = float(np.real(complex_distance(x, y)))
        t = np.arange(-span, span + dt / 2, dt)
        mag = np.abs(green_pm(ComplexEvent.from_parts(np.broadcast_to(x, (t.size, 3)), t, y, u), 1))
        worst = max(worst, abs(t[int(np.argmax(mag))] - p))
    return {"probe": "peak", "n": int(n), "grid_step": dt, "max_offset": float(worst),
            "passed": bool(worst <= dt)}
