import math

import numpy as np
import pytest

from lcembed.errors import InputError
from lcembed.literals import (measure_to_dict, parse_inner, parse_measure, parse_point, parse_system,
                              parse_zen_base)
from lcembed.measure import interval_mass
from lcembed.zen import weight_from_base


def test_measure_round_trip():
    raw = {"domain": "axis", "atoms": [{"re": 2.0, "mass": 3.0}],
           "radial": [{"from": 0.0, "to": "inf", "power": {"c": 1.0, "beta": -0.5}}]}
    mu = parse_measure(raw)
    again = parse_measure(measure_to_dict(mu) | {"radial": [
        {"from": 0.0, "to": "inf", "power": {"c": 1.0, "beta": -0.5}}]})
    assert measure_to_dict(mu) == measure_to_dict(again)
    assert interval_mass(mu, 4.0) == pytest.approx(3.0 + 4.0, rel=1e-12)


@pytest.mark.parametrize("raw,field", [
    ({"atoms": [{"re": 1, "mass": -1}]}, "measure.atoms[0].mass"),
    ({"atoms": [{"re": 1, "mass": 1}, {"re": 1}]}, "measure.atoms[1].mass"),
    ({"atoms": [{"re": 1, "mass": "x"}]}, "measure.atoms[0].mass"),
    ({"domain": "sphere"}, "measure.domain"),
    ({"radial": [{"from": 0, "to": 1}]}, "measure.radial[0]"),
    ({"radial": [{"power": {"c": -2}}]}, "measure.radial[0].power.c"),
    ({"radial": [{"from": 0, "to": 1, "tabulated": {"x": [0, 0.5], "y": [1, 1]}}]}, "measure.radial[0].tabulated"),
    ({"radial": [{"from": 0, "to": 1, "tabulated": {"x": [0, 1], "y": [1, -1]}}]}, "measure.radial[0].tabulated.y"),
    ({"colour": 1}, "measure"),
])
def test_measure_errors_name_field(raw, field):
    with pytest.raises(InputError) as exc:
        parse_measure(raw)
    assert str(exc.value).startswith(field)


def test_tabulated_density():
    mu = parse_measure({"domain": "axis", "radial": [
        {"from": 0, "to": 2, "tabulated": {"x": [0, 1, 2], "y": [1, 1, 1]}}]})
    assert interval_mass(mu, 2.0) == pytest.approx(2.0, rel=1e-8)


def test_points():
    assert parse_point(2, "p") == 2
    assert parse_point({"re": 1, "im": -1}, "p") == 1 - 1j
    with pytest.raises(InputError):
        parse_point({"im": 1}, "p")
    with pytest.raises(InputError):
        parse_point(True, "p")


def test_inner_literal():
    th = parse_inner({"blaschke_zeros": [{"re": 1, "mult": 2}, {"re": 2, "im": 1}], "singular_T": 0.5})
    assert len(th.zeros) == 3 and th.singular_T == 0.5
    with pytest.raises(InputError, match=r"inner.blaschke_zeros\[0\].mult"):
        parse_inner({"blaschke_zeros": [{"re": 1, "mult": 0}]})


def test_zen_base_literals():
    assert parse_zen_base("hardy").name == parse_zen_base({"preset": "hardy"}).name
    base = parse_zen_base({"atom_at_zero": 1.0, "radial": [{"power": {"c": 1, "beta": 0}}]})
    t = np.array([0.5, 2.0])
    assert np.allclose(weight_from_base(base)(t), 2 * math.pi + math.pi / t, rtol=1e-10)
    with pytest.raises(InputError, match="zen_base"):
        parse_zen_base("sobolev")


def test_system_literal():
    sys = parse_system({"modes": [{"lambda": {"re": -1, "im": 2}, "b": 3}], "T": 2})
    assert sys.eigenvalues == (-1 + 2j,) and sys.b == (3,) and sys.T == 2
    with pytest.raises(InputError, match=r"system.modes\[0\]"):
        parse_system({"modes": [{"lambda": -1}]})
    with pytest.raises(InputError, match=r"modes\[0\].lambda"):
        parse_system({"modes": [{"lambda": 1, "b": 1}]})
