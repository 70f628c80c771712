import numpy as np
import pytest

from pbwave import probes
from pbwave.beams import green_pm
from pbwave.em import (
    EMField,
    derivative_kernel,
    dyadic_mother,
    dyadic_translate,
    em_field,
    hertz_potential,
    polarization,
    split_real_fields,
)
from pbwave.geometry import ComplexEvent
from pbwave.oracles import fd_dalembertian

E3 = np.array([0.0, 0.0, 1.0])
Z0 = ComplexEvent.from_parts([0, 0, 2], 2.0, E3, 2.0)


def random_events(rng, n=50):
    x, t = probes.sample_offdisk(rng, n)
    return ComplexEvent.from_parts(x, t, E3, 2.0)


def test_hertz_potential_examples():
    g = green_pm(Z0, 1)
    assert np.allclose(hertz_potential(Z0, [0, 0, 1], 1), [0, 0, g])
    assert np.allclose(hertz_potential(Z0, polarization([0, 0, 0], [1, 0, 0]), 1), [1j * g, 0, 0])
    p1, p2 = np.array([1, 2, 0.5]), np.array([0, -1, 1j])
    assert np.allclose(hertz_potential(Z0, 2 * p1 - 3j * p2, -1),
                       2 * hertz_potential(Z0, p1, -1) - 3j * hertz_potential(Z0, p2, -1))


def test_kernel_examples():
    k = derivative_kernel(Z0, 1)
    rt = 2 + 1j
    d = Z0.tau - rt
    assert k.value == pytest.approx(green_pm(Z0, 1))
    assert k.dt == pytest.approx(-1 / (8 * np.pi**2 * rt * d**2))
    # on the axis grad G is along e3 with d_3 r~ = 1
    h_r = (1 / (rt * d**2) - 1 / (rt**2 * d)) / (8 * np.pi**2)
    assert k.grad == pytest.approx([0, 0, h_r])
    assert np.allclose(k.hess, np.swapaxes(k.hess, -1, -2), atol=1e-12 * np.abs(k.hess).max())


def test_kernel_laplacian_equals_dtt(rng):
    z = random_events(rng, 200)
    for sign in (1, -1):
        for g in ("cauchy", "dcauchy:2"):
            k = derivative_kernel(z, sign, g)
            assert np.allclose(k.laplacian, k.dtt, rtol=1e-10)


def test_field_linearity_and_dyadic(rng):
    z = random_events(rng, 30)
    p1 = rng.normal(size=3) + 1j * rng.normal(size=3)
    p2 = rng.normal(size=3) + 1j * rng.normal(size=3)
    a, b = 0.7 - 0.2j, -1.3
    lhs = em_field(z, a * p1 + b * p2, 1).F
    rhs = a * em_field(z, p1, 1).F + b * em_field(z, p2, 1).F
    assert np.allclose(lhs, rhs, rtol=1e-12)
    G = dyadic_mother(z, -1)
    assert np.allclose(G[..., 1], em_field(z, [0, 1, 0], -1).F, rtol=0, atol=0)
    contracted = np.einsum("...jk,k->...j", G, p1)
    ref = em_field(z, p1, -1).F
    assert np.max(np.abs(contracted - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_dyadic_translate():
    x, t = np.array([0.5, -0.2, 0.3]), 0.4
    xp, tp = np.array([1.0, 1.5, 2.0]), 2.0
    G = dyadic_translate(xp, tp, x, t, E3, 2.0, 1)
    ref = dyadic_mother(ComplexEvent.from_parts(xp - x, tp - t, E3, 2.0), 1)
    assert np.array_equal(G, ref)


def test_split_real_fields():
    E, B = split_real_fields(EMField(np.array([1 + 2j, 0, 0])))
    assert np.array_equal(E, [1, 0, 0]) and np.array_equal(B, [2, 0, 0])
    F = np.array([0.3 - 1j, 2j, -4])
    E, B = split_real_fields(F)
    assert np.array_equal(E + 1j * B, F)
    f = em_field(Z0, [1, 0, 0], 1)
    assert np.array_equal(f.E, f.F.real) and np.array_equal(f.B, f.F.imag)


def test_axial_dipole_symmetry():
    """p = e3: |E| is invariant under rotations about the axis."""
    ang = np.linspace(0, 2 * np.pi, 7)
    x = np.stack([1.3 * np.cos(ang), 1.3 * np.sin(ang), np.full_like(ang, 0.8)], axis=-1)
    f = em_field(ComplexEvent.from_parts(x, 0.5, E3, 2.0), [0, 0, 1], 1)
    mag = np.linalg.norm(f.E, axis=-1)
    assert np.allclose(mag, mag[0], rtol=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
def test_field_components_solve_wave_equation(rng, sign):
    x, t = probes.sample_offdisk(rng, 200)
    p = np.array([0.3, -1, 0.5 + 0.2j])

    def comp(j):
        return lambda xx, tt: em_field(ComplexEvent.from_parts(xx, tt, E3, 2.0), p, sign).F[..., j]

    for j in range(3):
        res = [np.max(np.abs(fd_dalembertian(comp(j), x, t, h)) / np.abs(comp(j)(x, t)).max())
               for h in (1e-2, 5e-3, 2.5e-3)]
        slope = np.polyfit(np.log([1e-2, 5e-3, 2.5e-3]), np.log(res), 1)[0]
        assert slope >= 1.9


def test_maxwell_sign_is_plus(rng):
    rep = probes.maxwell_sign_probe(rng, n=40)
    assert rep["consistent"] and rep["sign"] == 1
