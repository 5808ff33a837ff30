import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcembed.admiss import DiagonalSystem, GeometricTail, admissibility_test, dyadic_ratios, system_to_measure
from lcembed.errors import InputError
from lcembed.measure import widom_constant

K = range(10)


def dyadic(bpow, tail=False):
    lam = [-(2.0 ** k) for k in K]
    b = [2.0 ** (bpow * k) for k in K]
    t = GeometricTail(-(2.0 ** 10), 2.0 ** (10 * bpow), 2.0, 2.0 ** bpow) if tail else None
    return DiagonalSystem(lam, b, tail=t)


def test_system_to_measure_examples():
    mu = system_to_measure(DiagonalSystem([-1.0], [2.0]))
    assert mu.atoms == [(1.0, 4.0)]
    mu = system_to_measure(DiagonalSystem([-1.0, -1.0], [1.0, 1.0]))
    assert mu.atoms == [(1.0, 2.0)]
    mu = system_to_measure(dyadic(0.5))
    got = sorted((complex(s).real, m) for s, m in mu.atoms)
    assert np.allclose(got, [(2.0 ** k, 2.0 ** k) for k in K], rtol=1e-14)


def test_complex_eigenvalues_go_to_half_plane():
    mu = system_to_measure(DiagonalSystem([-1 + 2j], [1j]))
    assert mu.domain == "half-plane" and mu.atoms == [(1 - 2j, 1.0)]


@pytest.mark.parametrize("lam,b", [([0.0], [1.0]), ([1 + 1j], [1.0]), ([-1.0], [1.0, 2.0]), ([-1.0], [math.nan])])
def test_rejects_bad_systems(lam, b):
    with pytest.raises(InputError):
        DiagonalSystem(lam, b)


def test_tail_validation():
    with pytest.raises(InputError):
        GeometricTail(1.0, 1.0, 2.0, 1.0)
    with pytest.raises(InputError):
        GeometricTail(-1.0, 1.0, 1.0, 1.0)


def test_single_mode():
    ok, c, rep = admissibility_test(DiagonalSystem([-1.0], [1.0]))
    assert ok and c == pytest.approx(1.0, abs=1e-12)
    assert rep.verdict == "bounded"


def test_dyadic_square_masses_brute_force():
    # mu(Q_{0,2^m}) = 2^{m+1} - 1 and nu = 2^m
    r = dyadic_ratios(dyadic(0.5), range(10))
    assert r == pytest.approx([(2.0 ** (m + 1) - 1) / 2.0 ** m for m in range(10)], rel=1e-14)


def test_sqrt_growth_admissible():
    for tail in (False, True):
        res = admissibility_test(dyadic(0.5, tail))
        assert res.admissible and res.constant <= 2 + 1e-9


def test_full_growth_inadmissible_with_witness():
    res = admissibility_test(dyadic(1.0, True))
    assert not res.admissible and math.isinf(res.constant)
    ratios = [w["ratio"] for w in res.report.witnesses]
    assert len(ratios) >= 2 and all(b > a for a, b in zip(ratios, ratios[1:]))
    assert res.extras["tail"]["ratio_growth_per_mode"] == pytest.approx(2.0)


def test_finite_truncation_of_full_growth_is_finite():
    res = admissibility_test(dyadic(1.0))
    assert res.admissible and res.constant == pytest.approx((4.0 ** 10 - 1) / 3 / 2.0 ** 9, rel=1e-12)


def test_tail_slower_than_weight_adds_nothing():
    t = GeometricTail(-(2.0 ** 10), 1.0, 2.0, 0.5)
    res = admissibility_test(DiagonalSystem([-1.0], [1.0], tail=t))
    assert res.admissible and res.extras["tail"]["limit_ratio"] == 0.0


@given(st.lists(st.floats(0, 2 * math.pi), min_size=10, max_size=10))
def test_rotation_invariance(phases):
    base = dyadic(0.5)
    rot = DiagonalSystem(base.eigenvalues, [b * cmath.exp(1j * p) for b, p in zip(base.b, phases)])
    a, b = admissibility_test(base), admissibility_test(rot)
    assert a.admissible == b.admissible and a.constant == pytest.approx(b.constant, rel=1e-12)


@given(st.floats(0.1, 10))
def test_constant_scales_with_coefficients(c):
    base = dyadic(0.5)
    scaled = DiagonalSystem(base.eigenvalues, [c * b for b in base.b])
    assert admissibility_test(scaled).constant == pytest.approx(c * c * admissibility_test(base).constant, rel=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_agrees_with_widom_on_axis(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    sys = DiagonalSystem(-rng.uniform(0.1, 50, n), rng.normal(size=n))
    assert admissibility_test(sys).admissible == math.isfinite(widom_constant(system_to_measure(sys), 1.0).value)
