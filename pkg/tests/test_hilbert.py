import pytest
from gmpy2 import mpq

from sgmotion.field import QQ
from sgmotion.groebner import groebner_basis
from sgmotion.hilbert import (
    HomogeneityError,
    hilbert_data,
    hilbert_numerator,
    standard_monomial_count,
)
from sgmotion.ring import poly_ring


def test_twisted_cubic_invariants():
    r = poly_ring(QQ, "x", "y", "z", "w")
    x, y, z, w = r.variables()
    gb = groebner_basis([x * z - y * y, x * w - y * z, y * w - z * z])
    hd = hilbert_data(gb)
    assert (hd.dimension, hd.degree) == (1, 3)
    assert hd.hp_str() == "3*t + 1"
    assert hd.genus_candidate == 0


def test_twisted_cubic_against_monomial_count():
    r = poly_ring(QQ, "x", "y", "z", "w")
    x, y, z, w = r.variables()
    gb = groebner_basis([x * z - y * y, x * w - y * z, y * w - z * z])
    hd = hilbert_data(gb)
    for d in range(1, 9):
        assert standard_monomial_count(gb.lead_exps, 4, d) == hd.hp(d)


def test_projective_plane_hilbert_polynomial():
    # Coordinate ring of a plane inside P^3: HP(t) = (t+1)(t+2)/2
    r = poly_ring(QQ, "x", "y", "z", "w")
    gb = groebner_basis([r.var(0)])
    hd = hilbert_data(gb)
    assert hd.dimension == 2 and hd.degree == 1
    assert hd.hp(5) == mpq((5 + 1) * (5 + 2), 2)


def test_affine_homogenization_path():
    r = poly_ring(QQ, "x", "y", "z")
    x, y, z = r.variables()
    gb = groebner_basis([y - x * x, z - x * x * x])
    hd = hilbert_data(gb, homogenize=True)
    assert (hd.dimension, hd.degree) == (1, 3)


def test_inhomogeneous_without_flag_rejected():
    r = poly_ring(QQ, "x", "y")
    x, y = r.variables()
    gb = groebner_basis([x * x - y])
    with pytest.raises(HomogeneityError):
        hilbert_data(gb)


def test_lex_basis_cannot_homogenize():
    r = poly_ring(QQ, "x", "y", order="lex")
    x, y = r.variables()
    gb = groebner_basis([x * x - y])
    with pytest.raises(HomogeneityError):
        hilbert_data(gb, homogenize=True)


def test_hilbert_numerator_regular_sequence():
    # two coprime pure powers: N = (1 - T^2)(1 - T^3)
    num = hilbert_numerator([(2, 0), (0, 3)])
    assert num == [1, 0, -1, -1, 0, 1]


def test_empty_scheme():
    r = poly_ring(QQ, "x", "y")
    x, y = r.variables()
    gb = groebner_basis([x, y, r.one()])
    hd = hilbert_data(gb)
    assert hd.dimension == -1 and hd.degree == 0
