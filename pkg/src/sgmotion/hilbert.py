"""Hilbert series and Hilbert polynomials from initial monomial ideals.

The numerator of the Hilbert series is computed by the standard pivot
recursion on the minimal monomial generators; dimension, degree and the
arithmetic-genus candidate are read off the reduced numerator.

For an affine ideal with a grevlex basis, homogenizing the generators
yields a basis of the projective closure whose lead monomials agree with
the affine ones, so closure invariants come from the same exponent data
with one extra (invisible) variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Sequence

from gmpy2 import mpq

from .groebner import GroebnerBasis
from .ring import GREVLEX


class HomogeneityError(ValueError):
    pass


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _minimalize(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    gens = sorted(set(gens), key=sum)
    out: list[tuple[int, ...]] = []
    for g in gens:
        if not any(all(a <= b for a, b in zip(h, g)) for h in out):
            out.append(g)
    return out


def hilbert_numerator(gens: Sequence[tuple[int, ...]]) -> list[int]:
    """Numerator N(T) of the Hilbert series N(T)/(1-T)^n of R/I for the
    monomial ideal I with the given generators."""
    gens = _minimalize(list(gens))
    if any(sum(g) == 0 for g in gens):
        return [0]

    def rec(gens: tuple[tuple[int, ...], ...]) -> list[int]:
        if not gens:
            return [1]
        # Base case: pairwise coprime supports form a regular sequence.
        coprime = True
        seen = 0
        for g in gens:
            m = 0
            for i, e in enumerate(g):
                if e:
                    m |= 1 << i
            if m & seen:
                coprime = False
                break
            seen |= m
        if coprime:
            num = [1]
            for g in gens:
                factor = [0] * (sum(g) + 1)
                factor[0] = 1
                factor[-1] = -1
                num = _poly_mul(num, factor)
            return num
        # Pivot on the most frequent variable: N(I) = N(I + <x>) + T*N(I : x).
        counts: dict[int, int] = {}
        for g in gens:
            for i, e in enumerate(g):
                if e:
                    counts[i] = counts.get(i, 0) + 1
        pivot = max(counts, key=lambda i: counts[i])
        plus: list[tuple[int, ...]] = [
            g for g in gens if not g[pivot]
        ]
        pv = tuple(1 if i == pivot else 0 for i in range(len(gens[0])))
        plus.append(pv)
        quot = [
            tuple(e - 1 if i == pivot and e else e for i, e in enumerate(g)) for g in gens
        ]
        n_plus = rec(tuple(_minimalize(plus)))
        n_quot = rec(tuple(_minimalize(quot)))
        return _poly_add(n_plus, _poly_mul([0, 1], n_quot))

    return rec(tuple(gens))


@dataclass(frozen=True)
class HilbertData:
    """Invariants of a (closure's) homogeneous coordinate ring.

    hp_coeffs lists the Hilbert polynomial's coefficients, constant first,
    as exact rationals. dimension is the projective dimension (-1 for the
    empty scheme), degree the projective degree. For curves the
    genus_candidate is 1 - HP(0); it is only the arithmetic genus when no
    lower-dimensional components are present, so callers treat it as a
    candidate.
    """

    dimension: int
    degree: int
    hp_coeffs: tuple
    genus_candidate: object | None

    def hp(self, t) -> mpq:
        acc = mpq(0)
        for i, c in enumerate(self.hp_coeffs):
            acc += c * mpq(t) ** i
        return acc

    def hp_str(self) -> str:
        if not self.hp_coeffs:
            return "0"
        parts = []
        for i in reversed(range(len(self.hp_coeffs))):
            c = self.hp_coeffs[i]
            if c == 0:
                continue
            term = f"{c}" if i == 0 else (f"{c}*t" if i == 1 else f"{c}*t^{i}")
            parts.append(term)
        return " + ".join(parts) if parts else "0"


def _binomial_poly(shift: int, d: int) -> list[mpq]:
    """binom(t + shift, d) as a coefficient list in t (constant first)."""
    if d == 0:
        return [mpq(1)]
    coeffs = [mpq(1)]
    for i in range(d):
        # multiply by (t + shift - i)
        c = mpq(shift - i)
        nxt = [mpq(0)] * (len(coeffs) + 1)
        for j, a in enumerate(coeffs):
            nxt[j] += a * c
            nxt[j + 1] += a
        coeffs = nxt
    inv = mpq(1, factorial(d))
    return [a * inv for a in coeffs]


def hilbert_data(gb: GroebnerBasis, homogenize: bool = False) -> HilbertData:
    """Hilbert data of the homogeneous coordinate ring defined by the
    basis's initial ideal.

    With ``homogenize`` set the input is an affine grevlex basis and the
    invariants are those of the projective closure (one extra variable in
    the ambient count; lead monomials are unchanged). Without it the input
    generators must be homogeneous.
    """
    nvars = gb.ring.n
    if homogenize:
        if gb.ring.order != GREVLEX:
            raise HomogeneityError("homogenization trick requires a grevlex basis")
        nvars += 1
    else:
        for g in gb.polys:
            if not g.is_homogeneous():
                raise HomogeneityError("inhomogeneous input without homogenize flag")
    if gb.is_one:
        return HilbertData(dimension=-1, degree=0, hp_coeffs=(), genus_candidate=None)

    num = hilbert_numerator(list(gb.lead_exps))
    # Reduce the numerator at T = 1: N = (1-T)^e * N~ with N~(1) != 0.
    e = 0
    while sum(num) == 0:
        # divide by (1 - T)
        out = [0] * (len(num) - 1)
        acc = 0
        for i in range(len(num) - 1):
            acc += num[i]
            out[i] = acc
        num = out if out else [0]
        e += 1
        if not any(num):
            break
    krull = nvars - e
    degree = sum(num)
    dim_proj = krull - 1
    if dim_proj < 0:
        return HilbertData(dimension=dim_proj, degree=0, hp_coeffs=(), genus_candidate=None)
    # HP(t) = sum_j num[j] * binom(t - j + D - 1, D - 1), D = krull
    d = krull - 1
    hp = [mpq(0)] * (d + 1)
    for j, c in enumerate(num):
        if not c:
            continue
        b = _binomial_poly(d - j, d)
        for i, a in enumerate(b):
            hp[i] += c * a
    while len(hp) > 1 and hp[-1] == 0:
        hp.pop()
    genus = None
    if dim_proj == 1:
        genus = 1 - hp[0]
    return HilbertData(
        dimension=dim_proj,
        degree=int(degree),
        hp_coeffs=tuple(hp),
        genus_candidate=genus,
    )


def standard_monomial_count(lead_exps: Sequence[tuple[int, ...]], nvars: int, degree: int) -> int:
    """Brute-force count of degree-d monomials outside the monomial ideal
    (test oracle; exponential in nvars)."""
    gens = _minimalize(list(lead_exps))

    def rec(pos: int, remaining: int, current: list[int]) -> int:
        if pos == nvars - 1:
            current.append(remaining)
            divisible = any(all(a <= b for a, b in zip(g, current)) for g in gens)
            current.pop()
            return 0 if divisible else 1
        total = 0
        for e in range(remaining + 1):
            current.append(e)
            total += rec(pos + 1, remaining - e, current)
            current.pop()
        return total

    return rec(0, degree, [])
