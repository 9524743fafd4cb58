import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from sgmotion.field import (
    FieldError,
    PrimeField,
    QQ,
    ReconstructionFailure,
    ResidueSystem,
    crt_combine,
    mpq_mod,
    rational_reconstruct,
    reconstruct_from_residues,
)


def test_prime_field_rejects_composites():
    with pytest.raises(FieldError):
        PrimeField(91)
    with pytest.raises(FieldError):
        PrimeField(1)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                               53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101])
def test_inverse_axiom_exhaustive(p):
    fld = PrimeField(p)
    for a in range(1, p):
        assert fld.mul(a, fld.inv(a)) == 1


def test_crt_basic_examples():
    assert crt_combine([(1, 3), (1, 5)]) == ResidueSystem(1, 15)
    # exhaustive check over 0..14 pins 8 as the unique solution
    sols = [v for v in range(15) if v % 3 == 2 and v % 5 == 3]
    assert sols == [8]
    assert crt_combine([(2, 3), (3, 5)]) == ResidueSystem(8, 15)
    assert crt_combine([(0, 97)]) == ResidueSystem(0, 97)


def test_crt_rejects_duplicate_prime():
    with pytest.raises(FieldError):
        crt_combine([(1, 5), (2, 5)])


def test_rational_reconstruct_90_over_47():
    m = 10**9 + 7
    v = 90 * pow(47, -1, m) % m
    assert rational_reconstruct(ResidueSystem(v, m)) == mpq(90, 47)


def test_rational_reconstruct_zero():
    assert rational_reconstruct(ResidueSystem(0, 101)) == 0


def test_rational_reconstruct_conic_coefficient():
    # -377/181 through two combined primes
    target = mpq(-377, 181)
    pairs = [(mpq_mod(target, p), p) for p in (10007, 10009)]
    assert reconstruct_from_residues(pairs) == target


def test_rational_reconstruct_failure_signals():
    # no candidate within the caller's bounds -> explicit failure
    with pytest.raises(ReconstructionFailure):
        rational_reconstruct(ResidueSystem(50, 101), num_bound=1, den_bound=1)


@settings(max_examples=200, deadline=None)
@given(
    num=st.integers(min_value=-10**6, max_value=10**6),
    den=st.integers(min_value=1, max_value=10**6),
)
def test_reconstruct_roundtrip(num, den):
    x = mpq(num, den)
    n, d = abs(x.numerator), x.denominator
    # enough primes that 2*max(n,d)^2 < modulus
    primes = [32003, 32009, 32027, 32029, 32051, 32057]
    pairs = []
    modulus = 1
    for p in primes:
        if d % p == 0:
            continue
        pairs.append((mpq_mod(x, p), p))
        modulus *= p
        if modulus > 2 * max(n, d, 1) ** 2:
            break
    assert reconstruct_from_residues(pairs) == x
