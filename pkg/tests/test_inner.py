import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcembed.cohn import disc_h_function, halfplane_side_h
from lcembed.errors import HypothesisViolation, InputError, PoleError
from lcembed.inner import (InnerFunction, baranov_log_bound, mobius_inverse, mobius_point,
                           transfer_measure_disc_to_halfplane, transfer_measure_halfplane_to_disc)
from lcembed.measure import PositiveMeasure

zeros_hp = st.lists(st.complex_numbers(min_magnitude=0.05, max_magnitude=8.0).filter(lambda z: z.real > 0.05),
                    min_size=1, max_size=8)


def test_eval_examples():
    th = InnerFunction.blaschke([1.0])
    assert th(1.0) == 0
    assert InnerFunction.singular(1.0)(1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    v = th(1j)
    assert v == pytest.approx(1j, abs=1e-15)


def test_pole_rejected():
    # half-plane poles sit in the open left half-plane, outside the domain
    with pytest.raises(InputError):
        InnerFunction.blaschke([1 + 2j])(-1 + 2j)
    with pytest.raises(PoleError):
        InnerFunction.singular(1.0, domain="disc")(-1.0)


def test_zeros_must_be_interior():
    with pytest.raises(InputError):
        InnerFunction.blaschke([-1.0])
    with pytest.raises(InputError):
        InnerFunction.blaschke([1.2], domain="disc")


def test_log_modulus_and_derivative_examples():
    lm, d = InnerFunction.singular(2.0).log_modulus_and_derivative(3.0)
    assert lm == pytest.approx(-6.0)
    assert d == pytest.approx(-2 * math.exp(-6), rel=1e-14)
    lm, _ = InnerFunction.blaschke([1.0]).log_modulus_and_derivative(2.0)
    assert lm == pytest.approx(math.log(1 / 3), rel=1e-14)
    both = InnerFunction.blaschke([1.0, 2 + 1j]).log_modulus_and_derivative(4.0)[0]
    parts = sum(InnerFunction.blaschke([z]).log_modulus_and_derivative(4.0)[0] for z in (1.0, 2 + 1j))
    assert both == pytest.approx(parts, rel=1e-14)
    assert InnerFunction.blaschke([1.0]).log_modulus_and_derivative(1.0)[0] == -math.inf


def test_derivative_matches_finite_difference():
    th = InnerFunction([1 + 1j, 0.5, 3 - 2j], 0.7)
    s, h = 1.3 + 0.4j, 1e-6
    fd = (th(s + h) - th(s - h)) / (2 * h)
    assert th.derivative(s) == pytest.approx(fd, rel=1e-7)


def test_spectrum_examples():
    sp = InnerFunction.singular(1.0).spectrum()
    assert sp.contains_infinity and not sp.contains(0)
    assert sp.dist_to(0) == math.inf
    sp = InnerFunction.blaschke([1.0, 2.0]).spectrum()
    assert sp.dist_to(0) == pytest.approx(1.0)
    # zeros must be interior, so use points just inside the half-plane
    sp = InnerFunction.blaschke([1e-9 + 1j * 2 ** k for k in range(4)]).spectrum()
    assert sp.dist_to(1.5j) == pytest.approx(0.5, abs=1e-8)
    assert InnerFunction.singular(1.0).to_disc().spectrum().contains(-1)


def test_mobius_examples():
    assert mobius_point(0) == 1 and mobius_point(1) == 0
    assert mobius_point(1j) == pytest.approx(-1j)
    z = 0.3 + 0.4j
    assert abs(mobius_inverse(mobius_point(z)) - z) < 1e-14
    with pytest.raises(InputError):
        mobius_point(-1)


def test_transfer_examples():
    mu = transfer_measure_disc_to_halfplane(PositiveMeasure.from_atoms([0.0], [1.0], "disc"))
    assert mu.atoms == [(1.0, 4.0)] or mu.atoms == [((1 + 0j), 4.0)]
    mu = transfer_measure_disc_to_halfplane(PositiveMeasure.from_atoms([1 / 3], [1.0], "disc"))
    (s, m), = mu.atoms
    assert s == pytest.approx(0.5) and m == pytest.approx(9 / 4)
    with pytest.raises(HypothesisViolation):
        transfer_measure_disc_to_halfplane(PositiveMeasure.from_atoms([-1.0], [1.0], "disc"))


@given(st.lists(st.complex_numbers(max_magnitude=0.95), min_size=1, max_size=10),
       st.lists(st.floats(0.01, 10), min_size=10, max_size=10))
def test_transfer_round_trip(locs, masses):
    rho = PositiveMeasure("disc", list(zip(locs, masses[:len(locs)])))
    back = transfer_measure_halfplane_to_disc(transfer_measure_disc_to_halfplane(rho))
    assert np.allclose(back.locations, rho.locations, atol=1e-12)
    assert np.allclose(back.masses, rho.masses, rtol=1e-12)


@given(zeros_hp, st.floats(0, 3))
def test_unimodular_on_boundary(zeros, T):
    th = InnerFunction(zeros, T)
    ys = np.random.default_rng(len(zeros)).uniform(-50, 50, 100)
    mods = np.array([abs(th(1j * y)) for y in ys])
    assert np.all(np.abs(mods - 1) <= 1e-10)


@given(zeros_hp, st.floats(0, 3))
def test_interior_modulus_below_one(zeros, T):
    th = InnerFunction(zeros, T)
    pts = np.random.default_rng(7).uniform(0.01, 10, 20) + 1j * np.random.default_rng(8).uniform(-10, 10, 20)
    assert np.all(th.modulus(pts) < 1)


@given(zeros_hp, st.floats(0, 3))
def test_log_modulus_agrees_with_eval(zeros, T):
    th = InnerFunction(zeros, T)
    pts = np.random.default_rng(3).uniform(0.1, 10, 30) + 1j * np.random.default_rng(4).uniform(-10, 10, 30)
    far = np.array([min(abs(p - z) for z in zeros) > 1e-3 for p in pts])
    lm = th.log_modulus(pts)
    ref = np.log(np.abs([th(p) for p in pts]))
    assert np.allclose(lm[far], ref[far], atol=1e-10, rtol=1e-10)


@given(zeros_hp, st.floats(0, 3))
def test_transfer_consistency_of_moduli(zeros, T):
    th = InnerFunction(zeros, T)
    phi = th.to_disc()
    rng = np.random.default_rng(11)
    r = np.sqrt(rng.uniform(0, 0.98, 100))
    zs = r * np.exp(2j * np.pi * rng.uniform(size=100))
    for z in zs:
        assert abs(th(mobius_point(z))) == pytest.approx(abs(phi(z)), abs=1e-12)


def _cone_points(omega, delta, rng, k=100):
    x = delta * (1 + rng.exponential(2.0, k))
    y = omega + x * rng.uniform(-1, 1, k)
    return x + 1j * y


def _baranov_case(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 9)
    zeros = rng.uniform(0.05, 4, n) + 1j * rng.uniform(-4, 4, n)
    th = InnerFunction.blaschke(zeros)
    omega = float(rng.uniform(-5, 5))
    return th, omega, rng


@pytest.mark.parametrize("seed", range(20))
def test_baranov_bound_holds(seed):
    th, omega, rng = _baranov_case(seed)
    delta = th.spectrum().dist_to(1j * omega)
    worst = -math.inf
    for z in _cone_points(omega, delta, rng):
        worst = max(worst, th.log_modulus([z])[0] - baranov_log_bound(th, omega, z))
    assert worst <= 1e-12


def test_baranov_boundary_accepted_and_preconditions():
    th = InnerFunction.blaschke([1.0])
    # delta = 1 at omega = 0; z = 1 + 1i is on the cone edge with Re z = delta
    b = baranov_log_bound(th, 0.0, 1 + 1j)
    assert b <= 0 and th.log_modulus([1 + 1j])[0] <= b + 1e-12
    with pytest.raises(HypothesisViolation, match="cone"):
        baranov_log_bound(th, 0.0, 1 + 3j)
    with pytest.raises(HypothesisViolation):
        baranov_log_bound(th, 0.0, 0.5)
    with pytest.raises(HypothesisViolation):
        baranov_log_bound(InnerFunction.singular(1.0), 0.0, 2.0)


@given(st.lists(st.complex_numbers(max_magnitude=0.9), min_size=1, max_size=6),
       st.lists(st.floats(0.01, 5), min_size=6, max_size=6))
def test_kernel_identity(locs, masses):
    rho = PositiveMeasure("disc", list(zip(locs, masses[:len(locs)])))
    mu = transfer_measure_disc_to_halfplane(rho)
    rng = np.random.default_rng(len(locs))
    for _ in range(20):
        xi = cmath.rect(math.sqrt(rng.uniform(0, 0.9)), rng.uniform(0, 2 * math.pi))
        a = disc_h_function(rho, xi)
        b = halfplane_side_h(mu, mobius_point(xi))
        assert a == pytest.approx(b, rel=1e-10, abs=1e-12)
