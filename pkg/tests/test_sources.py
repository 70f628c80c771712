import numpy as np
import pytest

from pbwave import oracles
from pbwave.signals import jump_average, make_signal
from pbwave.sources import (
    action_limit,
    action_regularized,
    action_spacetime_delta,
    action_static_delta,
    f_rtilde,
    phi_mean,
    unsmeared_layers,
)
from pbwave.testfunctions import (
    Bump,
    Gaussian,
    Monomial,
    Plateau,
    builtin_test_functions,
    get_test_function,
    library,
    support_probe_functions,
)

E3 = np.array([0.0, 0.0, 1.0])
LIB = builtin_test_functions()
TAU = 0.5 + 3j


# ---------------------------------------------------------------- test functions


@pytest.mark.parametrize("name", sorted(library()))
def test_library_derivatives(name, rng):
    f = get_test_function(name)
    x = rng.uniform(-1.2, 1.2, size=(200, 3))
    errs = []
    for h in (1e-3, 5e-4):
        E = np.eye(3)
        fd_grad = np.stack([(f.eval(x + h * E[j]) - f.eval(x - h * E[j])) / (2 * h)
                            for j in range(3)], axis=-1)
        fd_hess = np.stack([(f.grad(x + h * E[j]) - f.grad(x - h * E[j])) / (2 * h)
                            for j in range(3)], axis=-2)
        scale = 1 + np.max(np.abs(f.hess(x)))
        errs.append(max(np.max(np.abs(fd_grad - f.grad(x))), np.max(np.abs(fd_hess - f.hess(x))))
                    / scale)
    assert errs[1] <= 1e-5
    assert errs[1] <= errs[0] / 3 or errs[1] < 1e-11
    assert np.allclose(f.hess(x), np.swapaxes(f.hess(x), -1, -2))


def test_unknown_test_function():
    with pytest.raises(KeyError):
        get_test_function("nope")


def test_builtin_suite_size():
    assert len(LIB) == 10


# ---------------------------------------------------------------- means and f_r~


def test_phi_mean_examples():
    x3 = Monomial((0, 0, 1))
    p, q = 1.7, 0.4
    assert phi_mean(x3, p, q, E3) == pytest.approx(p * q)
    assert phi_mean(Monomial((1, 0, 0)), p, q, E3) == pytest.approx(0, abs=1e-14)
    assert phi_mean(Monomial((0, 0, 0)), p, q, E3) == pytest.approx(1)
    assert phi_mean(x3, p, q, 2 * E3) == pytest.approx(p * q / 2)


def test_f_rtilde_monomial():
    f = Monomial((0, 0, 1))
    a = 1.0
    for p, q in [(1.2, 0.3), (0.0, 0.6), (2.0, -0.9)]:
        assert f_rtilde(f, p, q, a * E3) == pytest.approx(-1j * (p + 1j * q) / (2 * a))
    assert f_rtilde(f, 0.0, 0.6, E3) == pytest.approx(0.3)


@pytest.mark.parametrize("name", ["gauss-axis", "x3-poly-bump", "x1-gauss-offaxis", "poly-bump"])
def test_continuity_relations(name):
    f = LIB[name]
    y = E3
    q = np.linspace(0.05, 0.95, 7)
    assert np.allclose(phi_mean(f, 0.0, -q, y), phi_mean(f, 0.0, q, y), atol=1e-13)
    assert np.allclose(f_rtilde(f, 0.0, -q, y), -f_rtilde(f, 0.0, q, y), atol=1e-13)
    f0 = f.eval(np.zeros(3))
    assert phi_mean(f, 0.0, 1.0, y) == pytest.approx(f0, abs=1e-13)
    assert phi_mean(f, 0.0, -1.0, y) == pytest.approx(f0, abs=1e-13)
    assert abs(f_rtilde(f, 0.0, 0.0, y)) < 1e-13


def test_f_rtilde_against_differences():
    f = LIB["x1-gauss-offaxis"] * Monomial((0, 0, 0))
    y = np.array([0.2, -0.4, 0.9])
    p, q, h = 0.8, 0.3, 1e-5
    fp = (phi_mean(f, p + h, q, y) - phi_mean(f, p - h, q, y)) / (2 * h)
    fq = (phi_mean(f, p, q + h, y) - phi_mean(f, p, q - h, y)) / (2 * h)
    assert f_rtilde(f, p, q, y) == pytest.approx(0.5 * (fp - 1j * fq), rel=1e-8)


# ---------------------------------------------------------------- closed forms


def test_static_examples():
    a = 1.0
    assert action_limit(LIB["unit-bump"], E3, 0, "const") == pytest.approx(1.0, abs=1e-14)
    assert action_limit(LIB["x3-bump"], a * E3, 0, "const") == pytest.approx(-1j * a, abs=1e-12)
    y = 0.7 * E3
    assert action_limit(LIB["x3-bump"], y, 0, "const") == pytest.approx(-0.7j, abs=1e-12)
    assert abs(action_limit(LIB["x1-bump"], y, 0, "const")) < 1e-14
    assert action_static_delta(LIB["unit-bump"], E3) == pytest.approx(1.0)
    assert action_static_delta(LIB["x3-bump"], E3) == pytest.approx(-1j, abs=1e-12)
    assert abs(action_static_delta(LIB["x1-bump"], E3)) < 1e-14


@pytest.mark.parametrize("name", sorted(LIB))
def test_static_cylindrical_equals_limit(name):
    f = LIB[name]
    y = np.array([0.3, -0.2, 0.8])
    ref = action_limit(f, y, 0, "const")
    val = action_static_delta(f, y)
    assert abs(val - ref) <= 1e-10 * max(1.0, abs(ref))


def test_spacetime_delta_random_cross_check(rng):
    names = sorted(LIB)
    worst = 0.0
    for _ in range(100):
        f = LIB[names[rng.integers(len(names))]]
        d = rng.normal(size=3)
        a = rng.uniform(0.3, 1.4)
        y = a * d / np.linalg.norm(d)
        tau = complex(rng.uniform(-2, 2), rng.choice([-1, 1]) * a * rng.uniform(1.1, 3))
        ref = action_limit(f, y, tau, "cauchy")
        val = action_spacetime_delta(f, y, tau)
        if abs(ref) < 1e-12:
            assert abs(val - ref) < 1e-10
            continue
        worst = max(worst, abs(val - ref) / abs(ref))
    assert worst <= 1e-8


def test_spacetime_delta_constant_probe():
    tau = 0.3 + 2j
    head = tau / (2 * np.pi * (-1 - tau**2))
    c = make_signal("cauchy")
    assert action_spacetime_delta(LIB["unit-bump"], E3, tau) == pytest.approx(head, rel=1e-13)
    assert head == pytest.approx(-jump_average(c, tau, 1.0), rel=1e-13)


def test_spacetime_delta_decay_in_u():
    f = LIB["gauss"]
    vals = [u * abs(action_spacetime_delta(f, E3, 1j * u)) for u in (10.0, 100.0, 1000.0)]
    assert abs(vals[1] - vals[2]) < abs(vals[0] - vals[1])
    assert vals[2] == pytest.approx(vals[1], rel=0.05)


def test_degenerate_limit_small_a():
    f = LIB["gauss-axis"]
    g = make_signal("cauchy")
    errs = []
    for a in (1e-1, 1e-2):
        val = action_limit(f, a * E3, TAU, g)
        errs.append(abs(val + g.eval(TAU) * f.eval(np.zeros(3))))
    assert errs[1] < errs[0] / 5


# ---------------------------------------------------------------- regularized action


def test_regularized_support_zero():
    for f in support_probe_functions().values():
        for eps in (0.05, 1e-3):
            assert abs(action_regularized(f, E3, TAU, "cauchy", 1, eps)) < 1e-14


@pytest.mark.parametrize("kappa", [1, -1])
@pytest.mark.parametrize("name", ["x3-poly-bump", "gauss-axis", "x1sq-poly-bump"])
def test_regularized_matches_truncated_oracle(name, kappa):
    f = LIB[name]
    for eps in (0.2, 0.02):
        val = action_regularized(f, E3, TAU, "cauchy", kappa, eps)
        ref = oracles.action_bruteforce_spacetime(f, E3, TAU, "cauchy", kappa, eps=eps)
        assert abs(val - ref) <= 1e-9 * abs(ref)
    val = action_regularized(f, E3, 0, "const", kappa, 0.05)
    ref = oracles.action_bruteforce_static(f, E3, eps=0.05)
    assert abs(val - ref) <= 1e-9 * abs(ref)


@pytest.mark.parametrize("name", ["gauss", "x3-bump", "poly-bump-narrow"])
def test_eps_convergence(name):
    f = library()[name]
    ref = action_limit(f, E3, TAU, "cauchy")
    eps = [4e-3, 2e-3, 1e-3, 5e-4]
    errs = [abs(action_regularized(f, E3, TAU, "cauchy", 1, e) - ref) for e in eps]
    assert all(e1 > e2 for e1, e2 in zip(errs, errs[1:]))
    rep = oracles.convergence_order(eps, errs, target=1.0, slack=0.05)
    assert rep.passed, rep


def test_static_eps_convergence_is_second_order():
    f = LIB["gauss-axis"]
    ref = action_limit(f, E3, 0, "const")
    eps = [4e-2, 2e-2, 1e-2]
    errs = [abs(action_regularized(f, E3, 0, "const", 1, e) - ref) for e in eps]
    assert oracles.convergence_order(eps, errs, target=2.0).passed


# ---------------------------------------------------------------- layer representation


@pytest.mark.parametrize("name", ["gauss-axis", "x1-gauss-offaxis", "unit-bump"])
def test_layers_contract_to_regularized(name):
    f = LIB[name]
    for g, tau in (("cauchy", TAU), ("const", 0.0), ("dcauchy:1", 1 + 2j)):
        for eps in (0.3, 0.01):
            rep = unsmeared_layers(E3, tau, g, 1, eps)
            ref = action_regularized(f, E3, tau, g, 1, eps)
            assert abs(rep.contract(f) - ref) <= 1e-10 * abs(ref)


def test_layers_constant_probe_and_pole_merge():
    f = LIB["unit-bump"]
    g = make_signal("cauchy")
    prev = None
    for eps in (0.1, 0.01, 0.001):
        rep = unsmeared_layers(E3, TAU, g, 1, eps)
        poles, double, flow = rep.parts(f)
        assert abs(double) < 1e-13 and abs(flow) < 1e-13
        err = abs(rep.pole_plus + rep.pole_minus + jump_average(g, TAU, 1.0))
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 1e-2
    w_alpha = g.eval(TAU - rep.alpha) / (4 * np.pi * rep.alpha)
    assert rep.pole_plus == pytest.approx(-2j * np.pi * abs(rep.alpha) ** 2 * w_alpha)


# ---------------------------------------------------------------- support and symmetry


@pytest.mark.parametrize("name", sorted(support_probe_functions()))
def test_support(name):
    f = support_probe_functions()[name]
    assert abs(action_limit(f, E3, TAU, "cauchy")) < 1e-15
    assert abs(action_limit(f, E3, 0, "const")) < 1e-15
    spec = oracles.QuadratureSpec(tol_abs=1e-10)
    assert abs(oracles.action_bruteforce_static(f, E3, spec)) < 1e-10
    assert abs(oracles.action_bruteforce_spacetime(f, E3, TAU, "cauchy", 1, spec)) < 1e-10


def test_oracle_kappa_and_reflection_symmetry():
    f = LIB["gauss-axis"]
    plus = oracles.action_bruteforce_spacetime(f, E3, TAU, "cauchy", 1)
    minus = oracles.action_bruteforce_spacetime(f, E3, TAU, "cauchy", -1)
    reflected = oracles.action_bruteforce_spacetime(f, E3, -TAU, "cauchy", 1)
    assert plus == pytest.approx(minus, rel=1e-9)
    assert plus == pytest.approx(-reflected, rel=1e-9)


def test_oracle_degenerate_limit():
    f = Gaussian(1.0)
    g = make_signal("cauchy")
    target = -g.eval(TAU) * f.eval(np.zeros(3))
    val = oracles.action_bruteforce_spacetime(f, 1e-3 * E3, TAU, g, 1)
    assert abs(val - target) < 2e-3 * abs(target)


def test_complex_valued_probe_is_linear():
    f_re, f_im = Bump(2.5), Plateau(1.2, 2.4)

    class Mix:
        name = "mix"
        support_radius = 2.5
        spheres = ()
        tail_bound = 0.0

        def eval(self, x):
            return f_re.eval(x) + 1j * f_im.eval(x)

        def grad(self, x):
            return f_re.grad(x) + 1j * f_im.grad(x)

        def hess(self, x):
            return f_re.hess(x) + 1j * f_im.hess(x)

    mix = action_limit(Mix(), E3, TAU, "cauchy")
    parts = action_limit(f_re, E3, TAU, "cauchy") + 1j * action_limit(f_im, E3, TAU, "cauchy")
    assert mix == pytest.approx(parts, rel=1e-12)
