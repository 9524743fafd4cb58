"""Exact scalar arithmetic: prime fields, CRT, rational reconstruction.

Rationals are gmpy2.mpq throughout (arbitrary precision, canonical
gcd-reduced form with positive denominator). Prime-field elements are plain
Python ints in [0, p); the PrimeField object carries the modulus and the
field operations, while hot loops elsewhere inline ``% p`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz


class FieldError(ValueError):
    pass


class ReconstructionFailure(Exception):
    """Raised when no rational within the bound matches the residue.

    Callers recover by supplying more primes and retrying.
    """


class PrimeField:
    """Arithmetic modulo a (machine-word sized) prime.

    Elements are ints in [0, p). Construction checks primality.
    """

    __slots__ = ("p",)

    def __init__(self, p: int):
        p = int(p)
        if p < 2 or not gmpy2.is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        self.p = p

    # -- element constructors -------------------------------------------------
    def __call__(self, a) -> int:
        if isinstance(a, mpq):
            num = int(a.numerator) % self.p
            den = int(a.denominator) % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator of {a} vanishes mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        return int(a) % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    @property
    def characteristic(self) -> int:
        return self.p

    # -- arithmetic ----------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def elements(self) -> range:
        return range(self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


class RationalField:
    """The rationals, with gmpy2.mpq elements."""

    __slots__ = ()

    p = 0  # characteristic

    def __call__(self, a) -> mpq:
        return mpq(a)

    @property
    def zero(self) -> mpq:
        return mpq(0)

    @property
    def one(self) -> mpq:
        return mpq(1)

    @property
    def characteristic(self) -> int:
        return 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return 1 / mpq(a)

    def div(self, a, b):
        return mpq(a) / b

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("RationalField")

    def __repr__(self) -> str:
        return "QQ"


QQ = RationalField()


@dataclass(frozen=True)
class ResidueSystem:
    """A value known modulo a squarefree product of distinct primes."""

    value: int
    modulus: int

    def __post_init__(self):
        if not (0 <= self.value < self.modulus):
            object.__setattr__(self, "value", self.value % self.modulus)


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    """Combine a ≡ a1 (mod m1), a ≡ a2 (mod m2) for coprime m1, m2."""
    g, u, v = gmpy2.gcdext(mpz(m1), mpz(m2))
    if g != 1:
        raise FieldError(f"moduli {m1}, {m2} are not coprime")
    m = m1 * m2
    x = (a1 * v * m2 + a2 * u * m1) % m
    return int(x), int(m)


def crt_combine(residues: Iterable[tuple[int, int]]) -> ResidueSystem:
    """Combine residues [(value, prime), ...] into one ResidueSystem.

    Primes must be pairwise distinct; duplicates are rejected.
    """
    residues = list(residues)
    if not residues:
        raise FieldError("no residues to combine")
    primes = [p for _, p in residues]
    if len(set(primes)) != len(primes):
        raise FieldError("duplicate prime in CRT input")
    x, m = residues[0][0] % residues[0][1], residues[0][1]
    for v, p in residues[1:]:
        x, m = crt_pair(x, m, v % p, p)
    return ResidueSystem(x, m)


def rational_reconstruct(
    r: ResidueSystem,
    num_bound: int | None = None,
    den_bound: int | None = None,
) -> mpq:
    """Wang's rational reconstruction of n/d from n*d^-1 mod m.

    With the default balanced bounds, returns the unique n/d with
    |n|, d <= sqrt(m/2), gcd(d, m) = 1 and n ≡ v*d (mod m), if one exists.
    Raises ReconstructionFailure otherwise.
    """
    v, m = r.value % r.modulus, r.modulus
    if v == 0:
        return mpq(0)
    if num_bound is None:
        num_bound = int(gmpy2.isqrt(m // 2))
    if den_bound is None:
        den_bound = int(gmpy2.isqrt(m // 2))
    if num_bound < 1 or den_bound < 1:
        raise ReconstructionFailure(f"bounds too small for modulus {m}")

    # Extended Euclid on (m, v); the remainder/cofactor pair (r_i, t_i)
    # sweeps through all candidates n/d.
    r0, r1 = mpz(m), mpz(v)
    t0, t1 = mpz(0), mpz(1)
    while r1 > num_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d < 0:
        n, d = -n, -d
    if d == 0 or d > den_bound or abs(n) > num_bound:
        raise ReconstructionFailure(f"no n/d within bounds for {v} mod {m}")
    if gmpy2.gcd(d, m) != 1 or gmpy2.gcd(n, d) != 1:
        raise ReconstructionFailure(f"degenerate candidate {n}/{d} for {v} mod {m}")
    return mpq(n, d)


def reconstruct_from_residues(
    pairs: Sequence[tuple[int, int]],
    num_bound: int | None = None,
    den_bound: int | None = None,
) -> mpq:
    """CRT-combine residue/prime pairs, then rationally reconstruct."""
    return rational_reconstruct(crt_combine(pairs), num_bound, den_bound)


def mpq_mod(x: mpq, p: int) -> int:
    """Reduce a rational with denominator prime to p into F_p."""
    den = int(x.denominator) % p
    if den == 0:
        raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
    return int(x.numerator) % p * pow(den, -1, p) % p
