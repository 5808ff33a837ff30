import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import atomic_halfplane
from lcembed.errors import InputError
from lcembed.measure import (CarlesonSquare, PlanarPiece, PositiveMeasure, carleson_sup, integrate_kernel,
                             interval_mass, power_weight_constant, square_mass, widom_constant)


def hardy(q):
    return q.h


def bergman(q):
    return q.h ** 2


# --- module examples ----------------------------------------------------------

def test_square_mass_planar_area():
    mu = PositiveMeasure("half-plane", planar=[PlanarPiece(0, math.inf, -math.inf, math.inf, 1.0, 0.0)])
    assert square_mass(mu, CarlesonSquare(0, 2)) == pytest.approx(4.0, rel=1e-12)


def test_square_mass_atom_containment():
    mu = PositiveMeasure.from_atoms([1.0], [1.0])
    assert square_mass(mu, CarlesonSquare(0, 1)) == 1.0
    assert square_mass(mu, CarlesonSquare(0, 3)) == 1.0
    assert square_mass(mu, CarlesonSquare(0, 0.999)) == 0.0


def test_square_mass_inverse_sqrt_density():
    mu = PositiveMeasure.power_law(1.0, -0.5)
    assert square_mass(mu, CarlesonSquare(0, 4)) == pytest.approx(4.0, rel=1e-14)


def test_square_side_must_be_positive():
    with pytest.raises(InputError):
        CarlesonSquare(0.0, 0.0)
    with pytest.raises(InputError):
        CarlesonSquare(0.0, -1.0)


def test_interval_mass_examples():
    assert interval_mass(PositiveMeasure.lebesgue_axis(), 3.0) == pytest.approx(3.0)
    assert interval_mass(PositiveMeasure.power_law(1.0, -0.5), 4.0) == pytest.approx(4.0)
    # atom at the origin is counted
    assert interval_mass(PositiveMeasure.from_atoms([0.0], [5.0], "axis"), 1.0) == 5.0


def test_interval_mass_rejects_planar():
    mu = PositiveMeasure("half-plane", planar=[PlanarPiece(0, 1, 0, 1, 1.0, 0.0)])
    with pytest.raises(InputError):
        interval_mass(mu, 1.0)


def test_integrate_kernel_examples():
    v, _ = integrate_kernel(PositiveMeasure.from_atoms([2.0], [1.0]), lambda s: 1 / s)
    assert v == pytest.approx(0.5, rel=1e-15)
    v, _ = integrate_kernel(PositiveMeasure.lebesgue_axis(), lambda s: 1 / (1 + s) ** 2)
    assert v == pytest.approx(1.0, rel=1e-8)
    v, err = integrate_kernel(PositiveMeasure.power_law(1.0, -0.5), lambda s: np.exp(-s))
    assert v == pytest.approx(math.sqrt(math.pi), rel=1e-8)
    assert err >= 0


def test_carleson_sup_examples():
    r = carleson_sup(PositiveMeasure.from_atoms([1.0], [3.0]), hardy, 1.0)
    assert r.sup_estimate == pytest.approx(3.0)
    assert r.exact
    assert r.witnesses[0].h == pytest.approx(1.0)
    r = carleson_sup(PositiveMeasure.power_law(1.0, -0.5), hardy, 1.0, nu_growth=1.0)
    assert r.sup_estimate == pytest.approx(2.0, rel=1e-3)
    assert r.certified_lower_bound <= r.sup_estimate
    assert r.witnesses[0].h == pytest.approx(1.0, rel=1e-2)


def test_carleson_sup_identity_case():
    # Hardy nu itself is Lebesgue on the imaginary axis
    from lcembed.measure import VerticalPiece

    mu = PositiveMeasure("half-plane", vertical=[VerticalPiece(0.0, -1e4, 1e4, 1.0)])
    r = carleson_sup(mu, hardy, 1.0)
    assert r.sup_estimate == pytest.approx(1.0, rel=1e-6)


def test_carleson_sup_growth_divergence():
    r = carleson_sup(PositiveMeasure.power_law(1.0, 0.5), hardy, 1.0, nu_growth=1.0)
    assert not r.finite
    assert r.growth_exponent == pytest.approx(0.5)


def test_widom_examples():
    assert widom_constant(PositiveMeasure.lebesgue_axis(), 1.0).value == pytest.approx(1.0)
    w = widom_constant(PositiveMeasure.power_law(1.0, -0.5), 1.0)
    assert w.value == 2.0 and w.argmax == 1.0
    w0 = widom_constant(PositiveMeasure.power_law(1.0, -0.5), 0.0)
    assert math.isinf(w0.value) and w0.divergence == "zero"
    assert widom_constant(PositiveMeasure.from_atoms([0.0], [1.0], "axis"), 1.0).value == 1.0


def test_widom_divergence_at_infinity():
    w = widom_constant(PositiveMeasure.power_law(1.0, 0.5), 1.0)
    assert math.isinf(w.value) and w.divergence == "infinity"
    assert w.growth_exponent == pytest.approx(0.5)


def test_power_weight_examples():
    r = power_weight_constant(PositiveMeasure.power_law(1.0, 2.0), 1.0, 1.0)
    assert r.value == pytest.approx(1 / 3)
    assert power_weight_constant(PositiveMeasure.from_atoms([0.0], [2.0], "axis"), 0.5, 1.0).value == 2.0
    with pytest.raises(InputError):
        power_weight_constant(PositiveMeasure.lebesgue_axis(), -1.0)


@given(atomic_halfplane(on_axis=True))
def test_power_weight_alpha_zero_is_widom(mu):
    assert power_weight_constant(mu, 0.0, 1.0).value == widom_constant(mu, 1.0).value


def test_negative_mass_names_field():
    with pytest.raises(InputError, match=r"atoms\[1\]\.mass"):
        PositiveMeasure.from_atoms([1.0, 2.0], [1.0, -1.0])


# --- invariants ---------------------------------------------------------------

@given(atomic_halfplane(), st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.0, 3))
def test_square_mass_monotone_in_h(mu, a, h, dh):
    assert square_mass(mu, CarlesonSquare(a, h)) <= square_mass(mu, CarlesonSquare(a, h + dh)) + 1e-12


@given(st.floats(-0.4, 2.0), st.floats(0.0, 3.0))
def test_interval_mass_monotone_densities(beta, dx):
    mu = PositiveMeasure("axis", [(0.5, 1.0)], [PositiveMeasure.power_law(2.0, beta).radial[0]])
    for x in (0.3, 1.0, 2.5):
        assert interval_mass(mu, x) <= interval_mass(mu, x + dx) + 1e-12


def test_vertical_bisection_additivity():
    # densities only, so the shared edge carries no mass
    mu = PositiveMeasure("half-plane", radial=PositiveMeasure.power_law(1.0, -0.5).radial,
                         planar=[PlanarPiece(0, 3, -2, 2, 1.5, 0.7)])
    q = CarlesonSquare(0.3, 2.0)
    lo, hi, y0, y1 = q.bounds
    from lcembed.measure import _rect_mass

    whole = square_mass(mu, q)
    left = _rect_mass(mu, lo, hi, y0, q.a)[0]
    right = _rect_mass(mu, lo, hi, q.a, y1)[0]
    assert left + right == pytest.approx(whole, rel=1e-8)


@given(atomic_halfplane(), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_carleson_sup_nonincreasing_in_h_min(mu, h1, dh):
    a = carleson_sup(mu, hardy, h1).sup_estimate
    b = carleson_sup(mu, hardy, h1 + dh).sup_estimate
    assert b <= a * (1 + 1e-12)


def brute_force_sup(mu, nu, h_min):
    """Independent oracle: for each candidate side, slide a window with one atom on its lower edge."""
    x = mu.locations.real
    y = mu.locations.imag
    m = mu.masses
    sides = {h_min} | {v for v in x if v >= h_min}
    sides |= {abs(y[i] - y[j]) for i in range(len(y)) for j in range(len(y)) if abs(y[i] - y[j]) >= h_min}
    best = 0.0
    for h in sides:
        if h <= 0:
            continue
        for i in range(len(y)):
            inside = (x <= h * (1 + 1e-12)) & (y >= y[i] - 1e-12) & (y <= y[i] + h * (1 + 1e-12))
            best = max(best, m[inside].sum() / nu(CarlesonSquare(y[i] + h / 2, h)))
    return best


@given(atomic_halfplane(max_atoms=20), st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from(["hardy", "bergman"]))
def test_atomic_sup_matches_brute_force(mu, h_min, which):
    nu = hardy if which == "hardy" else bergman
    r = carleson_sup(mu, nu, h_min)
    assert r.exact
    assert r.sup_estimate == pytest.approx(brute_force_sup(mu, nu, h_min), rel=1e-10)


@given(atomic_halfplane(max_atoms=10, on_axis=True))
def test_widom_vs_carleson_within_factor_two(mu):
    w = widom_constant(mu, 1.0).value
    c = carleson_sup(mu, hardy, 1.0).sup_estimate
    assert w <= c * (1 + 1e-12)
    assert c <= 2 * w * (1 + 1e-12)
