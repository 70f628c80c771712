import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbwave.errors import DegenerateDilation, NotOnCut, OnCutAmbiguous
from pbwave.geometry import (
    BranchLocus,
    CausalClass,
    ComplexEvent,
    OblateCoords,
    classify_branch_locus,
    classify_causal,
    complex_distance,
    complex_distance_sided,
    farzone_complex_distance,
    from_oblate,
    in_causal_tube,
    to_oblate,
    volume_jacobian,
)
from pbwave.oracles import quad_oblate

E3 = np.array([0.0, 0.0, 1.0])
coord = st.floats(-5.0, 5.0, allow_nan=False)
vec = st.tuples(coord, coord, coord).map(np.array)


def test_complex_distance_examples():
    assert complex_distance([0, 0, 2], E3) == pytest.approx(2 + 1j, abs=1e-15)
    assert complex_distance([np.sqrt(3), 0, 0], E3) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert complex_distance([3.0, 4.0, 0.0], np.zeros(3)) == 5.0


def test_complex_distance_on_disk_needs_side():
    with pytest.raises(OnCutAmbiguous):
        complex_distance([0.5, 0.0, 0.0], E3)


def test_sided_examples():
    assert complex_distance_sided([0.5, 0, 0], E3, +1) == pytest.approx(1j * np.sqrt(0.75))
    assert complex_distance_sided([0.5, 0, 0], E3, "-") == pytest.approx(-1j * np.sqrt(0.75))
    assert complex_distance_sided(np.zeros(3), E3, 1) == pytest.approx(1j)
    with pytest.raises(NotOnCut):
        complex_distance_sided([2.0, 0, 0], E3, 1)
    with pytest.raises(NotOnCut):
        complex_distance_sided([0.2, 0, 0.1], E3, 1)
    with pytest.raises(DegenerateDilation):
        complex_distance_sided([0.2, 0, 0], np.zeros(3), 1)


@pytest.mark.parametrize("side", [1, -1])
def test_sided_limit_is_linear_in_eps(side):
    x = np.array([0.3, 0.4, 0.0])
    target = complex_distance_sided(x, E3, side)
    errs = [abs(complex_distance(x + side * e * E3, E3) - target) for e in (1e-3, 1e-4, 1e-5)]
    assert errs[0] / errs[1] == pytest.approx(10, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(10, rel=0.05)


def test_squaring_invariant_bulk(rng):
    n = 100_000
    x = rng.uniform(-5, 5, size=(n, 3))
    y = rng.uniform(-3, 3, size=(n, 3))
    rt = complex_distance(x, y)
    r2 = np.sum(x * x, axis=-1)
    a2 = np.sum(y * y, axis=-1)
    target = r2 - a2 + 2j * np.sum(x * y, axis=-1)
    assert np.max(np.abs(rt**2 - target) / (r2 + a2)) <= 1e-12
    assert np.all(rt.real >= 0)
    assert np.all(np.abs(rt.imag) <= np.sqrt(a2) * (1 + 1e-14))


@settings(max_examples=300, deadline=None)
@given(vec, vec)
def test_squaring_property(x, y):
    a2 = float(y @ y)
    if a2 == 0.0:
        return
    try:
        rt = complex_distance(x, y)
    except OnCutAmbiguous:
        return
    target = x @ x - a2 + 2j * (x @ y)
    assert abs(rt * rt - target) <= 1e-12 * (x @ x + a2) + 1e-300
    assert rt.real >= 0.0
    assert abs(rt.imag) <= np.sqrt(a2) * (1 + 1e-12)


def test_small_y_continuity():
    x = np.array([1.0, 2.0, -0.5])
    r = np.linalg.norm(x)
    for s in (1e-4, 1e-8):
        assert abs(complex_distance(x, s * np.array([0.3, 0.1, 1.0])) - r) < 10 * s


def test_to_oblate_examples():
    c = to_oblate([0, 0, 2], E3)
    assert (float(c.p), float(c.q), float(c.phi)) == pytest.approx((2, 1, 0))
    c = to_oblate([np.sqrt(3), 0, 0], E3)
    assert (float(c.p), float(c.q)) == pytest.approx((np.sqrt(2), 0), abs=1e-15)
    c = to_oblate([1.0, 0, 0], E3)
    assert float(c.p) == pytest.approx(0, abs=1e-12) and float(c.q) == pytest.approx(0, abs=1e-12)
    with pytest.raises(OnCutAmbiguous):
        to_oblate([0.2, 0.0, 0.0], E3)
    c = to_oblate([0.6, 0.0, 0.0], E3, side=-1)
    assert float(c.q) == pytest.approx(-0.8)


def test_from_oblate_examples():
    assert from_oblate(OblateCoords(2.0, 1.0, 0.0, 1.0), E3) == pytest.approx([0, 0, 2])
    axis = from_oblate(OblateCoords(1.5, -1.0, 0.3, 1.0), E3)
    assert axis == pytest.approx([0, 0, -1.5], abs=1e-15)
    disk = from_oblate(OblateCoords(0.0, 0.6, 0.0, 1.0), E3)
    assert disk == pytest.approx([0.8, 0, 0])


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 10), st.floats(-1, 1), st.floats(0, 2 * np.pi - 1e-9),
       st.floats(0.1, 3), vec)
def test_oblate_round_trip(p, s, phi, a, direction):
    if np.linalg.norm(direction) < 1e-3:
        return
    yhat = direction / np.linalg.norm(direction)
    q = a * s
    if abs(abs(q) - a) < 1e-6:  # azimuth undefined on the axis
        return
    x = from_oblate(OblateCoords(p, q, phi, a), yhat)
    c = to_oblate(x, a * yhat)
    assert float(c.p) == pytest.approx(p, rel=1e-10, abs=1e-12)
    assert float(c.q) == pytest.approx(q, rel=1e-10, abs=1e-11)
    dphi = (float(c.phi) - phi + np.pi) % (2 * np.pi) - np.pi
    assert abs(dphi) < 1e-9


def test_confocal_surfaces(rng):
    a = 1.3
    p = rng.uniform(0.1, 4, 500)
    q = rng.uniform(-a + 1e-3, a - 1e-3, 500)
    x = from_oblate(OblateCoords(p, q, rng.uniform(0, 2 * np.pi, 500), a), E3)
    rho2 = x[:, 0] ** 2 + x[:, 1] ** 2
    x3 = x[:, 2]
    assert np.max(np.abs(rho2 / (a * a + p * p) + x3**2 / p**2 - 1)) < 1e-12
    assert np.max(np.abs(rho2 / (a * a - q * q) - x3**2 / q**2 - 1)) < 1e-9


def test_jacobian_and_ellipsoid_volume():
    assert volume_jacobian(OblateCoords(2.0, 1.0, 0.0, 1.0)) == 5.0
    assert volume_jacobian(OblateCoords(0.0, 0.0, 0.0, 1.0)) == 0.0
    P, a = 2.5, 1.0
    vol = quad_oblate(lambda p, q, phi: np.ones_like(p), P, a * E3)
    assert vol.real == pytest.approx(4 * np.pi / 3 * P * (P * P + a * a), rel=1e-9)


def test_branch_locus():
    assert classify_branch_locus([1, 0, 0], E3) is BranchLocus.ON_BRANCH_SPHERE
    assert classify_branch_locus([0.3, 0.2, 0], E3).on_disk
    assert classify_branch_locus([0, 0, 5], E3) is BranchLocus.REGULAR
    assert classify_branch_locus([2, 0, 0], E3) is BranchLocus.REGULAR


def test_causal_classes():
    assert classify_causal(E3, 2.0) is CausalClass.TIMELIKE_FUTURE
    assert classify_causal(E3, -2.0) is CausalClass.TIMELIKE_PAST
    assert classify_causal(E3, 0.5) is CausalClass.SPACELIKE
    assert classify_causal(E3, 1.0) is CausalClass.LIGHTLIKE
    assert classify_causal(E3, 1.0 + 1e-12) is CausalClass.LIGHTLIKE
    assert in_causal_tube(E3, 1.5) and not in_causal_tube(E3, 0.9)


def test_farzone_examples():
    assert farzone_complex_distance(100, 0, 1) == 100 + 1j
    assert farzone_complex_distance(7.0, np.pi / 2, 1.0) == pytest.approx(7.0)
    exact = complex_distance([0, 0, 100], E3)
    assert abs(exact - (100 + 1j)) < 1e-12  # on the axis the approximation is exact


def test_complex_event_round_trip():
    z = ComplexEvent.from_parts([1, 2, 3], 0.5, [0, 0, 1], 2.0)
    assert np.allclose(z.x, [1, 2, 3]) and np.allclose(z.y, [0, 0, 1])
    assert z.t == 0.5 and z.u == 2.0
    assert z.zsq == pytest.approx(np.sum((np.array([1, 2, 3]) + 1j * E3) ** 2) - (0.5 + 2j) ** 2)
    w = z.translated([1, 0, 0], 1.0)
    assert np.allclose(w.x, [2, 2, 3]) and w.t == 1.5
