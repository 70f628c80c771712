"""Smooth probe functions on R^3 with analytic gradients and Hessians.

Every function takes points of shape ``(..., 3)`` and returns values of
shape ``(...)``, gradients ``(..., 3)`` and Hessians ``(..., 3, 3)``.
``spheres`` lists the ``(center, radius)`` surfaces across which the
function is only finitely smooth; the quadrature oracle splits there.
"""

from __future__ import annotations

import numpy as np

_EYE = np.eye(3)


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


def _compose(h0, h1, h2, gv, hv):
    """Value/grad/Hessian of h(v(x)) given h, h', h'' at v and grad/Hessian of v."""
    grad = h1[..., None] * gv
    hess = h2[..., None, None] * _outer(gv, gv) + h1[..., None, None] * hv
    return h0, grad, hess


class TestFunction:
    """Base class; subclasses implement :meth:`_all`."""

    __test__ = False  # not a pytest class

    name = "f"
    support_radius = np.inf
    tail_bound = 0.0
    spheres: tuple = ()

    def _all(self, x):
        raise NotImplementedError

    def eval(self, x):
        return self._all(np.asarray(x, dtype=float))[0]

    def grad(self, x):
        return self._all(np.asarray(x, dtype=float))[1]

    def hess(self, x):
        return self._all(np.asarray(x, dtype=float))[2]

    def laplacian(self, x):
        h = self.hess(x)
        return h[..., 0, 0] + h[..., 1, 1] + h[..., 2, 2]

    def __call__(self, x):
        return self.eval(x)

    def __mul__(self, other):
        return Product(self, other)

    def __repr__(self):
        return f"<TestFunction {self.name}>"


class Bump(TestFunction):
    """(1 - |x - c|^2 / R^2)^k inside the ball, zero outside (C^{k-1})."""

    def __init__(self, radius, center=(0.0, 0.0, 0.0), power=4, name=None):
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)
        self.power = int(power)
        self.support_radius = float(np.linalg.norm(self.center)) + self.radius
        self.spheres = ((self.center, self.radius),)
        self.name = name or f"bump(R={radius})"

    def _all(self, x):
        d = x - self.center
        R2 = self.radius**2
        v = 1.0 - np.sum(d * d, axis=-1) / R2
        inside = v > 0.0
        v = np.where(inside, v, 0.0)
        k = self.power
        h0 = v**k
        h1 = np.where(inside, k * v ** (k - 1), 0.0)
        h2 = np.where(inside, k * (k - 1) * v ** max(k - 2, 0), 0.0)
        gv = -2.0 * d / R2
        hv = np.broadcast_to(-2.0 * _EYE / R2, d.shape + (3,))
        return _compose(h0, h1, h2, gv, hv)


class Shell(TestFunction):
    """Radial bump supported in the shell r_in < |x| < r_out."""

    def __init__(self, r_in, r_out, power=4, name=None):
        self.r_in, self.r_out = float(r_in), float(r_out)
        self.power = int(power)
        self.support_radius = self.r_out
        zero = np.zeros(3)
        self.spheres = ((zero, self.r_in), (zero, self.r_out))
        self.name = name or f"shell({r_in},{r_out})"

    def _all(self, x):
        a1, a2 = self.r_in**2, self.r_out**2
        c = 4.0 / (a2 - a1) ** 2
        r2 = np.sum(x * x, axis=-1)
        v = c * (r2 - a1) * (a2 - r2)
        inside = v > 0.0
        v = np.where(inside, v, 0.0)
        k = self.power
        h0 = v**k
        h1 = np.where(inside, k * v ** (k - 1), 0.0)
        h2 = np.where(inside, k * (k - 1) * v ** max(k - 2, 0), 0.0)
        gv = 2.0 * c * x * (a1 + a2 - 2.0 * r2)[..., None]
        hv = 2.0 * c * ((a1 + a2 - 2.0 * r2)[..., None, None] * _EYE - 4.0 * _outer(x, x))
        return _compose(h0, h1, h2, gv, hv)


class Plateau(TestFunction):
    """Equal to 1 for |x| <= r1, C^4 polynomial roll-off to 0 at |x| = r2."""

    def __init__(self, r1, r2, name=None):
        self.r1, self.r2 = float(r1), float(r2)
        self.support_radius = self.r2
        zero = np.zeros(3)
        self.spheres = ((zero, self.r1), (zero, self.r2))
        self.name = name or f"plateau({r1},{r2})"

    def _all(self, x):
        a1, a2 = self.r1**2, self.r2**2
        span = a2 - a1
        r2 = np.sum(x * x, axis=-1)
        s = np.clip((r2 - a1) / span, 0.0, 1.0)
        step = s**5 * (126 - 420 * s + 540 * s**2 - 315 * s**3 + 70 * s**4)
        d1 = 630 * s**4 * (1 - s) ** 4
        d2 = 2520 * s**3 * (1 - s) ** 3 * (1 - 2 * s)
        h0 = 1.0 - step
        h1 = -d1 / span
        h2 = -d2 / span**2
        gv = 2.0 * x
        hv = np.broadcast_to(2.0 * _EYE, x.shape + (3,))
        return _compose(h0, h1, h2, gv, hv)


class Gaussian(TestFunction):
    """exp(-|x - c|^2 / (2 w^2)); treated as supported within ``truncate`` widths."""

    def __init__(self, width, center=(0.0, 0.0, 0.0), truncate=9.0, name=None):
        self.width = float(width)
        self.center = np.asarray(center, dtype=float)
        self.support_radius = float(np.linalg.norm(self.center)) + truncate * self.width
        # crude bound on everything beyond the truncation sphere, incl. derivatives
        self.tail_bound = (1.0 + truncate**2) * np.exp(-0.5 * truncate**2) * self.support_radius**3
        self.name = name or f"gauss(w={width})"

    def _all(self, x):
        d = x - self.center
        w2 = self.width**2
        f = np.exp(-0.5 * np.sum(d * d, axis=-1) / w2)
        grad = -d / w2 * f[..., None]
        hess = (_outer(d, d) / w2**2 - _EYE / w2) * f[..., None, None]
        return f, grad, hess


class Monomial(TestFunction):
    """x1^i x2^j x3^k (unbounded support; use as a weight)."""

    def __init__(self, exponents, name=None):
        self.exponents = tuple(int(e) for e in exponents)
        self.name = name or "x^" + "".join(map(str, self.exponents))

    @staticmethod
    def _pow(x, e):
        if e < 0:
            return np.zeros_like(x)
        return x**e

    def _all(self, x):
        e = self.exponents
        comps = [x[..., m] for m in range(3)]
        p0 = [self._pow(c, k) for c, k in zip(comps, e)]
        p1 = [k * self._pow(c, k - 1) for c, k in zip(comps, e)]
        p2 = [k * (k - 1) * self._pow(c, k - 2) for c, k in zip(comps, e)]
        f = p0[0] * p0[1] * p0[2]
        grad = np.stack([
            p1[0] * p0[1] * p0[2],
            p0[0] * p1[1] * p0[2],
            p0[0] * p0[1] * p1[2],
        ], axis=-1)
        hess = np.empty(x.shape + (3,))
        for i in range(3):
            for j in range(3):
                fac = []
                for m in range(3):
                    if i == j == m:
                        fac.append(p2[m])
                    elif m in (i, j):
                        fac.append(p1[m])
                    else:
                        fac.append(p0[m])
                hess[..., i, j] = fac[0] * fac[1] * fac[2]
        return f, grad, hess


class Product(TestFunction):
    def __init__(self, f, g, name=None):
        self.f, self.g = f, g
        self.support_radius = min(f.support_radius, g.support_radius)
        self.spheres = tuple(f.spheres) + tuple(g.spheres)
        self.tail_bound = max(f.tail_bound, g.tail_bound)
        self.name = name or f"{f.name}*{g.name}"

    def _all(self, x):
        f0, f1, f2 = self.f._all(x)
        g0, g1, g2 = self.g._all(x)
        val = f0 * g0
        grad = f0[..., None] * g1 + g0[..., None] * f1
        hess = (
            f0[..., None, None] * g2
            + g0[..., None, None] * f2
            + _outer(f1, g1)
            + _outer(g1, f1)
        )
        return val, grad, hess


X1 = (1, 0, 0)
X3 = (0, 0, 1)


def builtin_test_functions():
    """The ten-function probe suite used by the action comparisons."""
    plateau = Plateau(1.5, 3.0)
    fns = [
        Plateau(1.5, 3.0, name="unit-bump"),
        Product(Monomial(X3), plateau, name="x3-bump"),
        Product(Monomial(X1), plateau, name="x1-bump"),
        Bump(3.0, name="poly-bump"),
        Bump(4.0, power=5, name="poly-bump-wide"),
        Product(Monomial(X3), Bump(2.0), name="x3-poly-bump"),
        Product(Monomial((2, 0, 0)), Bump(2.5), name="x1sq-poly-bump"),
        Gaussian(1.2, name="gauss"),
        Gaussian(1.2, center=(0.0, 0.0, 0.4), name="gauss-axis"),
        Product(Monomial(X1), Gaussian(0.8, center=(0.5, -0.3, 0.2)), name="x1-gauss-offaxis"),
    ]
    return {f.name: f for f in fns}


def support_probe_functions():
    """Probes vanishing on a neighbourhood of the unit disk about e3."""
    fns = [
        Shell(1.3, 2.5, name="shell"),
        Bump(1.5, center=(0.0, 0.0, 2.2), name="offset-bump"),
        Product(Monomial(X1), Bump(1.2, center=(0.0, 0.0, 1.8)), name="x1-offset-bump"),
    ]
    return {f.name: f for f in fns}


def narrow_probe_functions():
    """Radial probes whose width is close to the disk radius.

    Their limit action is small through cancellation, so the first-order
    eps term of the truncated action is large relative to it.
    """
    fns = [Bump(2.0, name="poly-bump-narrow"), Gaussian(0.8, name="gauss-narrow")]
    return {f.name: f for f in fns}


def library():
    lib = builtin_test_functions()
    lib.update(support_probe_functions())
    lib.update(narrow_probe_functions())
    return lib


def get_test_function(name):
    lib = library()
    if name not in lib:
        raise KeyError(f"unknown test function {name!r}; choose from {sorted(lib)}")
    return lib[name]
