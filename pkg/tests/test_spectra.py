import itertools
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov_excision import (
    BaseManifold,
    CodimensionError,
    DomainError,
    base_spectrum,
    cross_section_spectrum,
    harmonic_dimension,
    load_custom_spectrum,
    sphere_area,
)


def pairs(lines):
    return [(ln.value, ln.multiplicity) for ln in lines]


def test_point():
    assert pairs(base_spectrum(BaseManifold.point(), 1)) == [(0.0, 1)]
    assert pairs(base_spectrum(BaseManifold.point(), 5)) == [(0.0, 1)]


def test_unit_circle():
    got = pairs(base_spectrum(BaseManifold.circle(2 * math.pi), 3))
    assert got == [(0.0, 1), (pytest.approx(1.0), 2), (pytest.approx(4.0), 2)]


def test_circle_scaling():
    got = base_spectrum(BaseManifold.circle(1.0), 2)
    assert got[1].value == pytest.approx((2 * math.pi) ** 2)


def test_round_sphere():
    got = pairs(base_spectrum(BaseManifold.round_sphere(2, 1.0), 3))
    assert got == [(0.0, 1), (pytest.approx(2.0), 3), (pytest.approx(6.0), 5)]
    radius2 = base_spectrum(BaseManifold.round_sphere(2, 2.0), 2)
    assert radius2[1].value == pytest.approx(0.5)


def test_square_torus_multiplicities():
    got = pairs(base_spectrum(BaseManifold.flat_torus([2 * math.pi] * 2), 6))
    assert [m for _, m in got] == [1, 4, 4, 4, 8, 4]
    assert [v for v, _ in got] == pytest.approx([0, 1, 2, 4, 5, 8])


def test_torus_against_brute_force():
    lengths = (2 * math.pi, 3.0)
    box = range(-30, 31)
    vals = sorted(
        (2 * math.pi * a / lengths[0]) ** 2 + (2 * math.pi * b / lengths[1]) ** 2 for a, b in itertools.product(box, box)
    )
    lines = base_spectrum(BaseManifold.flat_torus(lengths), 12)
    expanded = [ln.value for ln in lines for _ in range(ln.multiplicity)]
    assert expanded == pytest.approx(vals[: len(expanded)], rel=1e-12)


def test_cross_sections():
    assert pairs(cross_section_spectrum(2, 2)) == [(0.0, 1), (1.0, 2), (4.0, 2)]
    assert pairs(cross_section_spectrum(3, 2)) == [(0.0, 1), (2.0, 3), (6.0, 5)]
    line = cross_section_spectrum(4, 1)[1]
    assert (line.value, line.multiplicity) == (3.0, 4)
    with pytest.raises(CodimensionError):
        cross_section_spectrum(1, 2)


def harmonic_count(j, d):
    """Dimension of harmonic homogeneous degree-j polynomials in d variables."""
    return math.comb(j + d - 1, d - 1) - (math.comb(j + d - 3, d - 1) if j >= 2 else 0)


@given(st.integers(0, 12), st.integers(2, 9))
def test_harmonic_dimension_matches_polynomial_count(j, d):
    assert harmonic_dimension(j, d) == harmonic_count(j, d)


def test_sphere_area_low_dimensions():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)


def test_weyl_count_on_torus():
    # N(lam) ~ area * lam / (4 pi) in two dimensions
    lines = base_spectrum(BaseManifold.flat_torus([2 * math.pi, 2 * math.pi]), 400)
    lam = lines[-1].value
    count = sum(ln.multiplicity for ln in lines if ln.value < lam)
    assert count / ((2 * math.pi) ** 2 * lam / (4 * math.pi)) == pytest.approx(1.0, rel=0.05)


def test_custom_spectrum_inline_and_file(tmp_path):
    data = [[0.0, 1], [3.5, 2], [9.0, 1]]
    base = BaseManifold.from_custom(data, volume=2.0)
    assert pairs(base_spectrum(base, 10)) == [(0.0, 1), (3.5, 2), (9.0, 1)]
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(data))
    assert load_custom_spectrum(str(path), 2.0) == base
    assert load_custom_spectrum(json.dumps(data), 2.0) == base


@pytest.mark.parametrize(
    "bad", [[[1.0, 1]], [[0.0, 1], [2.0, 1], [1.0, 1]], [[0.0, 0]], [[0.0, 1], [-1.0, 1]]]
)
def test_custom_spectrum_validation(bad):
    with pytest.raises(DomainError):
        BaseManifold.from_custom(bad)


def test_custom_zero_multiplicity_is_not_policed():
    # a disconnected N cannot be told apart reliably; it is documented, not rejected
    assert base_spectrum(BaseManifold.from_custom([[0.0, 2]]), 1)[0].multiplicity == 2


def test_constructor_validation():
    with pytest.raises(DomainError):
        BaseManifold.circle(0.0)
    with pytest.raises(DomainError):
        BaseManifold.flat_torus([])
    with pytest.raises(DomainError):
        BaseManifold.round_sphere(0)
