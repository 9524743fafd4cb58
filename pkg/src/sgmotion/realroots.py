"""Certified real-root isolation and refinement for univariate polynomials
over the rationals.

Sturm sequences drive the isolation (the count in an interval is the
variation difference), after Yun squarefree factorization assigns
multiplicities. Refinement is plain bisection: exact sign evaluations,
guaranteed termination.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from gmpy2 import mpq

from .ring import Polynomial

Coeffs = list  # coefficient list, index = degree, mpq entries


def to_coeffs(obj) -> Coeffs:
    """Accept a coefficient sequence (constant first) or a univariate
    Polynomial; return a trimmed mpq list."""
    if isinstance(obj, Polynomial):
        ring = obj.ring
        used = [i for i in range(ring.n) if any(e[i] for e, _ in obj.iter_terms())]
        if len(used) > 1:
            raise ValueError("polynomial is not univariate")
        var = used[0] if used else 0
        out = [mpq(0)] * (obj.degree() + 1 if obj else 1)
        for exps, c in obj.iter_terms():
            out[exps[var]] = mpq(c)
        return _trim(out)
    return _trim([mpq(c) for c in obj])


def _trim(c: Coeffs) -> Coeffs:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def degree(c: Coeffs) -> int:
    return len(c) - 1 if any(c) else -1


def evaluate(c: Coeffs, x) -> mpq:
    acc = mpq(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def derivative(c: Coeffs) -> Coeffs:
    if len(c) <= 1:
        return [mpq(0)]
    return _trim([mpq(i) * c[i] for i in range(1, len(c))])


def _poly_sub(a: Coeffs, b: Coeffs) -> Coeffs:
    n = max(len(a), len(b))
    out = [mpq(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return _trim(out)


def _poly_rem(a: Coeffs, b: Coeffs) -> Coeffs:
    a = list(a)
    db, lb = degree(b), b[-1]
    while degree(a) >= db and any(a):
        shift = degree(a) - db
        factor = a[-1] / lb
        for i in range(db + 1):
            a[shift + i] -= factor * b[i]
        a = _trim(a)  # drops the cancelled lead
    return a


def poly_gcd(a: Coeffs, b: Coeffs) -> Coeffs:
    a, b = _trim(list(a)), _trim(list(b))
    while degree(b) >= 0 and any(b):
        a, b = b, _poly_rem(a, b)
    if not any(a):
        return [mpq(0)]
    return [x / a[-1] for x in a]  # monic


def poly_divexact_coeffs(a: Coeffs, b: Coeffs) -> Coeffs:
    a = list(a)
    out = [mpq(0)] * (degree(a) - degree(b) + 1)
    db, lb = degree(b), b[-1]
    while degree(a) >= db and any(a):
        shift = degree(a) - db
        factor = a[-1] / lb
        out[shift] = factor
        for i in range(db + 1):
            a[shift + i] -= factor * b[i]
        a = _trim(a)
    if any(a):
        raise ValueError("inexact univariate division")
    return _trim(out)


def squarefree_part(c: Coeffs) -> Coeffs:
    d = derivative(c)
    if degree(c) <= 0:
        return list(c)
    g = poly_gcd(c, d)
    if degree(g) <= 0:
        return list(c)
    return poly_divexact_coeffs(c, g)


def yun_factorization(c: Coeffs) -> list[tuple[Coeffs, int]]:
    """Squarefree decomposition f = prod f_i^i (f_i squarefree, coprime)."""
    c = _trim(list(c))
    if degree(c) <= 0:
        return []
    g = poly_gcd(c, derivative(c))
    if degree(g) == 0:
        return [(c, 1)]
    out = []
    w = poly_divexact_coeffs(c, g)
    y = poly_divexact_coeffs(derivative(c), g)
    i = 1
    while degree(w) > 0:
        z = _poly_sub(y, derivative(w))
        f_i = poly_gcd(w, z)
        if degree(f_i) > 0:
            out.append((f_i, i))
        w = poly_divexact_coeffs(w, f_i)
        y = poly_divexact_coeffs(z, f_i)
        i += 1
    return out


def sturm_chain(c: Coeffs) -> list[Coeffs]:
    chain = [_trim(list(c)), derivative(c)]
    while degree(chain[-1]) > 0:
        r = _poly_rem(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-x for x in r])
    if not any(chain[-1]):
        chain.pop()
    return chain


def _variations(chain: list[Coeffs], x) -> int:
    signs = []
    for c in chain:
        v = evaluate(c, x)
        if v:
            signs.append(1 if v > 0 else -1)
    count = 0
    for a, b in zip(signs, signs[1:]):
        if a != b:
            count += 1
    return count


def sturm_root_count(c: Coeffs, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi]; endpoints must not be
    roots of the squarefree part for a clean count (we use non-root
    endpoints throughout)."""
    chain = sturm_chain(squarefree_part(c))
    return _variations(chain, lo) - _variations(chain, hi)


def root_bound(c: Coeffs) -> mpq:
    """Cauchy bound: all real roots lie in (-M, M)."""
    c = _trim(list(c))
    lead = abs(c[-1])
    m = mpq(0)
    for x in c[:-1]:
        ax = abs(mpq(x)) / lead
        if ax > m:
            m = ax
    return m + 1


@dataclass(frozen=True)
class RootInterval:
    """An isolating interval (lo, hi) for one real root: either exact
    (lo == hi) or f changes sign across it."""

    lo: mpq
    hi: mpq
    coeffs: tuple
    multiplicity: int = 1
    exact: bool = False

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def as_float(self) -> float:
        return float(self.midpoint())


def isolate_real_roots(f) -> list[RootInterval]:
    """Disjoint isolating intervals for all real roots, each carrying its
    multiplicity (from the squarefree decomposition), sorted increasingly."""
    c = to_coeffs(f)
    if degree(c) < 0:
        raise ValueError("cannot isolate roots of the zero polynomial")
    if degree(c) == 0:
        return []
    out: list[RootInterval] = []
    for factor, mult in yun_factorization(c):
        out.extend(
            replace(iv, multiplicity=mult) for iv in _isolate_squarefree(factor)
        )
    out.sort(key=lambda iv: (iv.lo, iv.hi))
    return out


def _isolate_squarefree(c: Coeffs) -> list[RootInterval]:
    if degree(c) <= 0:
        return []
    chain = sturm_chain(c)
    bound = root_bound(c)
    lo, hi = -bound, bound
    # Endpoints of the Cauchy bound are never roots.
    total = _variations(chain, lo) - _variations(chain, hi)
    out: list[RootInterval] = []
    ctuple = tuple(c)

    def rec(a, b, count):
        if count == 0:
            return
        if count == 1 and evaluate(c, a) * evaluate(c, b) < 0:
            out.append(RootInterval(a, b, ctuple))
            return
        mid = (a + b) / 2
        vmid = evaluate(c, mid)
        if vmid == 0:
            out.append(RootInterval(mid, mid, ctuple, exact=True))
            # Nudge off the root for the two halves.
            eps = (b - a) / 65536
            left_hi, right_lo = mid - eps, mid + eps
            while evaluate(c, left_hi) == 0:
                left_hi = (a + left_hi) / 2
            while evaluate(c, right_lo) == 0:
                right_lo = (right_lo + b) / 2
            rec(a, left_hi, _variations(chain, a) - _variations(chain, left_hi))
            rec(right_lo, b, _variations(chain, right_lo) - _variations(chain, b))
            return
        cl = _variations(chain, a) - _variations(chain, mid)
        rec(a, mid, cl)
        rec(mid, b, count - cl)

    rec(lo, hi, total)
    return out


def refine_root(interval: RootInterval, tol) -> RootInterval:
    """Shrink an isolating interval below the given width by bisection."""
    tol = mpq(tol)
    if interval.exact or interval.width < tol:
        return interval
    c = list(interval.coeffs)
    lo, hi = interval.lo, interval.hi
    flo = evaluate(c, lo)
    while hi - lo >= tol:
        mid = (lo + hi) / 2
        fmid = evaluate(c, mid)
        if fmid == 0:
            return replace(interval, lo=mid, hi=mid, exact=True)
        if (flo > 0) != (fmid > 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return replace(interval, lo=lo, hi=hi)
