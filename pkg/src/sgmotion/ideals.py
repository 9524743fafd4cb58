"""Ideal-level operations built on Groebner bases: elimination, quotient,
intersection, saturation (single polynomial and at a point).

Elimination uses a block order with the removed variables dominant;
saturation by one polynomial adjoins an inverse variable; saturation at a
point iterates ideal quotients to stabilization.
"""

from __future__ import annotations

from typing import Sequence

from .groebner import BudgetExceeded, GroebnerBasis, groebner_basis
from .ring import Block, Polynomial, PolynomialRing


def _convert_all(polys, target):
    return [f.convert(target) for f in polys]


def eliminate(
    gens: Sequence[Polynomial],
    drop: Sequence[int],
    budget: int | None = None,
) -> list[Polynomial]:
    """Generators of the ideal's intersection with the subring omitting the
    ``drop`` variables; returned in that subring (grevlex)."""
    if not gens:
        return []
    ring = gens[0].ring
    drop = sorted(set(drop))
    if not drop:
        gb = groebner_basis(gens, budget=budget)
        return list(gb.polys)
    keep = [i for i in range(ring.n) if i not in drop]
    # Block ring: dropped variables first, then the kept ones.
    names = [ring.names[i] for i in drop] + [ring.names[i] for i in keep]
    work = PolynomialRing(ring.field, names, Block(len(drop)))
    gb = groebner_basis(_convert_all(gens, work), budget=budget)
    sub = PolynomialRing(ring.field, [ring.names[i] for i in keep])
    out = []
    cut = len(drop)
    for g in gb.polys:
        if all(e == 0 for e in g.lead_exps()[:cut]):
            out.append(g.convert(sub))
    return out


def poly_divexact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact division f/g; raises if g does not divide f."""
    ring = f.ring
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    fld = ring.field
    rem = dict(f.terms)
    glead = g.lead_key()
    gexps = g.lead_exps()
    ginv = fld.inv(g.lead_coeff())
    quot: dict = {}
    while rem:
        lk = max(rem)
        le = ring.decode(lk)
        if any(a > b for a, b in zip(gexps, le)):
            raise ValueError("inexact polynomial division")
        qk = lk - glead
        qc = fld.mul(rem[lk], ginv)
        quot[qk] = qc
        if fld.characteristic:
            p = fld.p
            for k2, c2 in g.terms.items():
                nk = k2 + qk
                v = (rem.get(nk, 0) - qc * c2) % p
                if v:
                    rem[nk] = v
                else:
                    rem.pop(nk, None)
        else:
            for k2, c2 in g.terms.items():
                nk = k2 + qk
                v = rem.get(nk, fld.zero) - qc * c2
                if v:
                    rem[nk] = v
                else:
                    rem.pop(nk, None)
    return Polynomial(ring, quot)


def intersect(
    a: Sequence[Polynomial],
    b: Sequence[Polynomial],
    budget: int | None = None,
) -> list[Polynomial]:
    """Ideal intersection via the auxiliary-variable construction
    <u*A, (1-u)*B> ∩ k[x]."""
    ring = a[0].ring
    names = ("_u",) + ring.names
    work = PolynomialRing(ring.field, names, Block(1))
    u = work.var(0)
    one = work.one()
    gens = [u * f.convert(work) for f in a] + [(one - u) * g.convert(work) for g in b]
    gb = groebner_basis(gens, budget=budget)
    out = []
    for g in gb.polys:
        if g.lead_exps()[0] == 0:
            out.append(g.convert(ring))
    return out


def ideal_quotient(
    gens: Sequence[Polynomial],
    f: Polynomial,
    budget: int | None = None,
) -> list[Polynomial]:
    """I : f, computed as (I ∩ <f>)/f."""
    if f.is_zero():
        raise ZeroDivisionError("quotient by zero polynomial")
    inter = intersect(list(gens), [f], budget=budget)
    return [poly_divexact(g, f) for g in inter]


def ideal_quotient_by_ideal(
    gens: Sequence[Polynomial],
    divisors: Sequence[Polynomial],
    budget: int | None = None,
) -> list[Polynomial]:
    """I : <f1,...,fk> as the intersection of the single quotients."""
    current: list[Polynomial] | None = None
    for f in divisors:
        q = ideal_quotient(gens, f, budget=budget)
        current = q if current is None else intersect(current, q, budget=budget)
    if current is None:
        raise ValueError("empty divisor list")
    return current


def saturate(
    gens: Sequence[Polynomial],
    f: Polynomial,
    budget: int | None = None,
    gens_are_gb: bool = False,
) -> list[Polynomial]:
    """I : f^inf via the inverse-variable trick: adjoin w, add w*f - 1,
    eliminate w.

    With ``gens_are_gb`` the input is a grevlex Groebner basis of I; since
    the block order restricts to grevlex on the original variables, it
    seeds the elimination run as a basis prefix whose internal S-pairs are
    skipped.
    """
    if f.is_zero():
        raise ZeroDivisionError("saturation by zero polynomial")
    ring = gens[0].ring
    if f.is_constant():
        gb = groebner_basis(gens, budget=budget)
        return list(gb.polys)
    names = ("_w",) + ring.names
    work = PolynomialRing(ring.field, names, Block(1))
    w = work.var(0)
    gens_w = [g.convert(work) for g in gens]
    extra = w * f.convert(work) - work.one()
    if gens_are_gb:
        prefix = GroebnerBasis(work, gens_w)
        gb = groebner_basis([extra], budget=budget, prefix=prefix, interreduce=True)
    else:
        gb = groebner_basis(gens_w + [extra], budget=budget)
    out = []
    for g in gb.polys:
        if g.lead_exps()[0] == 0:
            out.append(g.convert(ring))
    return out


def ideals_equal(
    a: Sequence[Polynomial], b: Sequence[Polynomial], budget: int | None = None
) -> bool:
    gba = groebner_basis(a, budget=budget)
    gbb = groebner_basis(b, budget=budget)
    if len(gba) != len(gbb):
        return False
    return all(f.terms == g.terms for f, g in zip(gba.polys, gbb.polys))


def saturate_by_point(
    gens: Sequence[Polynomial],
    point_ideal: Sequence[Polynomial],
    budget: int | None = None,
    max_rounds: int = 64,
) -> list[Polynomial]:
    """I : m^inf for the maximal ideal m of a rational point, by iterating
    the ideal quotient until it stabilizes."""
    current = list(groebner_basis(gens, budget=budget).polys)
    for _ in range(max_rounds):
        nxt = ideal_quotient_by_ideal(current, point_ideal, budget=budget)
        nxt_gb = groebner_basis(nxt, budget=budget)
        cur_gb = groebner_basis(current, budget=budget)
        if len(nxt_gb) == len(cur_gb) and all(
            f.terms == g.terms for f, g in zip(nxt_gb.polys, cur_gb.polys)
        ):
            return list(cur_gb.polys)
        current = list(nxt_gb.polys)
    raise BudgetExceeded(f"point saturation did not stabilize in {max_rounds} rounds")
