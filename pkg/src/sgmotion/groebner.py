"""Buchberger's algorithm with Gebauer-Moeller style pair pruning and sugar
selection, over prime fields or the rationals.

Basis elements are kept monic; reduction kernels are specialized for the
two coefficient types. Resource use is metered by a term-update counter so
callers can bound individual computations. An optional stop condition lets
callers abort early once the partial initial ideal already answers their
question (the survey uses this to certify rigidity cheaply: once every
variable carries a pure-power lead monomial, the dimension is 0).
"""

from __future__ import annotations

import heapq
from typing import Callable, Iterable, Sequence

from .ring import Polynomial, PolynomialRing, RingMismatch


class BudgetExceeded(RuntimeError):
    """A symbolic computation overran its explicit operation budget."""


class StoppedEarly(Exception):
    """Internal: the caller's stop condition fired."""

    def __init__(self, payload):
        self.payload = payload


class _Entry:
    __slots__ = ("lead", "exps", "mask", "terms", "sugar")

    def __init__(self, lead, exps, mask, terms, sugar):
        self.lead = lead
        self.exps = exps
        self.mask = mask
        self.terms = terms
        self.sugar = sugar


def _mask_of(exps) -> int:
    m = 0
    for i, e in enumerate(exps):
        if e:
            m |= 1 << i
    return m


def _divides(a: Sequence[int], b: Sequence[int]) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _monic_terms(ring: PolynomialRing, terms: dict) -> dict:
    lc = terms[max(terms)]
    if lc == ring.field.one:
        return terms
    inv = ring.field.inv(lc)
    if ring.field.characteristic:
        p = ring.field.p
        return {k: c * inv % p for k, c in terms.items()}
    return {k: c * inv for k, c in terms.items()}


class _Reducer:
    """Reduction against a list of monic entries, with an operation meter.

    Decoded exponent/mask pairs are memoized per reducer instance; the
    monomial universe of one basis computation is small enough to keep.
    """

    __slots__ = ("ring", "p", "entries", "budget", "ops", "_decoded")

    def __init__(self, ring: PolynomialRing, budget: int | None):
        self.ring = ring
        self.p = ring.field.characteristic
        self.entries: list[_Entry] = []
        self.budget = budget
        self.ops = 0
        self._decoded: dict[int, tuple] = {}

    def _lookup(self, lk: int):
        cached = self._decoded.get(lk)
        if cached is None:
            le = self.ring.decode(lk)
            cached = (le, _mask_of(le))
            self._decoded[lk] = cached
        return cached

    def _find(self, lk: int, le: tuple, lmask: int) -> _Entry | None:
        for e in self.entries:
            if e.lead <= lk and (e.mask & ~lmask) == 0:
                ee = e.exps
                for i in range(len(ee)):
                    if ee[i] > le[i]:
                        break
                else:
                    return e
        return None

    def _charge(self, ops: int):
        self.ops += ops
        if self.budget is not None and self.ops > self.budget:
            raise BudgetExceeded(f"operation budget {self.budget} exceeded")

    def _run(self, terms: dict, sugar: int, lead_only: bool) -> tuple[dict, int]:
        p = self.p
        key_degree = self.ring.key_degree
        out: dict = {}
        ops = 0
        while terms:
            lk = max(terms)
            le, lmask = self._lookup(lk)
            hit = self._find(lk, le, lmask)
            if hit is None:
                if lead_only:
                    break
                out[lk] = terms.pop(lk)
                continue
            shift = lk - hit.lead
            factor = terms[lk]
            hterms = hit.terms
            ops += len(hterms)
            sug = hit.sugar + key_degree(shift)
            if sug > sugar:
                sugar = sug
            if p:
                negf = p - factor
                for k2, c2 in hterms.items():
                    nk = k2 + shift
                    old = terms.get(nk)
                    if old is None:
                        terms[nk] = negf * c2 % p
                    else:
                        v = (old - factor * c2) % p
                        if v:
                            terms[nk] = v
                        else:
                            del terms[nk]
            else:
                for k2, c2 in hterms.items():
                    nk = k2 + shift
                    old = terms.get(nk)
                    if old is None:
                        terms[nk] = -factor * c2
                    else:
                        v = old - factor * c2
                        if v:
                            terms[nk] = v
                        else:
                            del terms[nk]
        self._charge(ops)
        return (terms if lead_only else out), sugar

    def reduce_lead(self, terms: dict, sugar: int = 0) -> tuple[dict, int]:
        """Reduce only until the lead term is irreducible (tail untouched)."""
        return self._run(terms, sugar, True)

    def reduce_full(self, terms: dict, sugar: int = 0) -> tuple[dict, int]:
        """Full normal form of the term dict; returns (remainder, sugar)."""
        return self._run(terms, sugar, False)


class GroebnerBasis:
    """A reduced Groebner basis: monic, pairwise tail-reduced, sorted by
    ascending lead monomial. Unique for (ideal, order)."""

    def __init__(self, ring: PolynomialRing, polys: Sequence[Polynomial]):
        self.ring = ring
        self.polys = list(polys)
        self.lead_keys = [g.lead_key() for g in self.polys]
        self.lead_exps = [g.lead_exps() for g in self.polys]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    @property
    def is_one(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and bool(self.polys[0])

    def normal_form(self, f: Polynomial, budget: int | None = None) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatch(f"{f.ring} vs {self.ring}")
        red = _Reducer(self.ring, budget)
        red.entries = [
            _Entry(k, e, _mask_of(e), g.terms, 0)
            for k, e, g in zip(self.lead_keys, self.lead_exps, self.polys)
        ]
        out, _ = red.reduce_full(dict(f.terms))
        return Polynomial(self.ring, out)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def dimension(self) -> int:
        """Affine Krull dimension of the quotient; -1 for the unit ideal."""
        if self.is_one:
            return -1
        supports = [frozenset(i for i, e in enumerate(exps) if e) for exps in self.lead_exps]
        return self.ring.n - _min_hitting_set(supports, self.ring.n)


def _min_hitting_set(supports: list[frozenset], n: int) -> int:
    """Smallest variable set meeting every support (branch and bound)."""
    supports = sorted(set(supports), key=len)
    kept: list[frozenset] = []
    for s in supports:
        if not any(t <= s for t in kept):
            kept.append(s)
    best = n

    def bb(remaining: list[frozenset], count: int):
        nonlocal best
        if count >= best:
            return
        if not remaining:
            best = count
            return
        pivot = min(remaining, key=len)
        for v in sorted(pivot):
            bb([s for s in remaining if v not in s], count + 1)

    bb(kept, 0)
    return best


def all_variables_rigid(lead_exps: Iterable[tuple]) -> bool:
    """True if every variable has a pure-power lead monomial; certifies
    dimension 0 even for a partial basis."""
    seen = 0
    n = None
    for exps in lead_exps:
        n = len(exps)
        nz = -1
        for i, e in enumerate(exps):
            if e:
                if nz >= 0:
                    nz = -2
                    break
                nz = i
        if nz >= 0:
            seen |= 1 << nz
    return n is not None and seen == (1 << n) - 1


def groebner_basis(
    gens: Iterable[Polynomial],
    budget: int | None = None,
    stop_condition: Callable[[list[tuple]], object] | None = None,
    interreduce: bool = True,
    prefix: "GroebnerBasis | None" = None,
):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Raises BudgetExceeded when the term-update budget runs out. If
    ``stop_condition`` (called on the list of current lead exponent tuples
    after each basis insertion) returns truthy, returns that payload
    immediately instead of a basis. ``prefix`` seeds the run with an
    already-known basis of a subideal (its internal S-pairs are skipped).
    """
    gens = [g for g in gens if g]
    if not gens:
        raise ValueError("no nonzero generators")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatch("mixed rings in generator list")

    red = _Reducer(ring, budget)
    entries = red.entries
    key_degree = ring.key_degree
    encode = ring.encode
    n = ring.n

    heap: list[tuple[int, int, int, int]] = []
    alive: set[tuple[int, int]] = set()
    pair_lcm_exps: dict[tuple[int, int], tuple] = {}
    lead_exps_list: list[tuple] = []
    prefix_count = 0
    if prefix is not None:
        if prefix.ring != ring:
            raise RingMismatch("prefix basis in a different ring")
        for k, e, g in zip(prefix.lead_keys, prefix.lead_exps, prefix.polys):
            entries.append(_Entry(k, e, _mask_of(e), g.terms, g.degree()))
            lead_exps_list.append(e)
        prefix_count = len(entries)

    def add_entry(terms: dict, sugar: int):
        terms = _monic_terms(ring, terms)
        lead = max(terms)
        exps = ring.decode(lead)
        h = len(entries)
        entries.append(_Entry(lead, exps, _mask_of(exps), terms, sugar))
        lead_exps_list.append(exps)

        # Candidate pairs (i, h), pruned by the Gebauer-Moeller criteria:
        # keep one pair per lcm, drop pairs whose lcm is a proper multiple
        # of another kept lcm, drop coprime-lead pairs.
        cand = []
        for i in range(h):
            ei = entries[i].exps
            lcm = tuple(a if a >= b else b for a, b in zip(ei, exps))
            cand.append((sum(lcm), lcm, i))
        cand.sort()
        kept: list[tuple[int, tuple, int]] = []
        for deg, lcm, i in cand:
            drop = False
            for kdeg, klcm, _ in kept:
                if kdeg <= deg and _divides(klcm, lcm):
                    drop = True
                    break
            if not drop:
                kept.append((deg, lcm, i))
        for deg, lcm, i in kept:
            ei = entries[i].exps
            coprime = True
            for a, b in zip(ei, exps):
                if a and b:
                    coprime = False
                    break
            if coprime:
                continue
            lkey = encode(lcm)
            sug = max(
                entries[i].sugar + key_degree(lkey - entries[i].lead),
                sugar + key_degree(lkey - lead),
            )
            alive.add((i, h))
            pair_lcm_exps[(i, h)] = lcm
            heapq.heappush(heap, (sug, lkey, i, h))

    try:
        for g in sorted(gens, key=lambda g: g.lead_key()):
            terms, sug = red.reduce_full(dict(g.terms), g.degree())
            if terms:
                add_entry(terms, sug)
                if stop_condition is not None:
                    payload = stop_condition(lead_exps_list)
                    if payload:
                        raise StoppedEarly(payload)

        while heap:
            sug, lkey, i, j = heapq.heappop(heap)
            if (i, j) not in alive:
                continue
            alive.discard((i, j))
            lcm = pair_lcm_exps.pop((i, j))
            # Pop-time chain criterion: a later entry h whose lead divides
            # the lcm (properly on both sides) makes this pair redundant.
            redundant = False
            for h in range(j + 1, len(entries)):
                eh = entries[h]
                if _divides(eh.exps, lcm):
                    li = entries[i].exps
                    lj = entries[j].exps
                    lih = tuple(a if a >= b else b for a, b in zip(li, eh.exps))
                    if lih == lcm:
                        continue
                    ljh = tuple(a if a >= b else b for a, b in zip(lj, eh.exps))
                    if ljh == lcm:
                        continue
                    redundant = True
                    break
            if redundant:
                continue

            ei, ej = entries[i], entries[j]
            shift_i = lkey - ei.lead
            shift_j = lkey - ej.lead
            terms = {k + shift_i: c for k, c in ei.terms.items()}
            p = red.p
            if p:
                for k, c in ej.terms.items():
                    nk = k + shift_j
                    v = (terms.get(nk, 0) - c) % p
                    if v:
                        terms[nk] = v
                    else:
                        terms.pop(nk, None)
            else:
                for k, c in ej.terms.items():
                    nk = k + shift_j
                    v = terms.get(nk, 0) - c
                    if v:
                        terms[nk] = v
                    else:
                        terms.pop(nk, None)
            terms, sug2 = red.reduce_lead(terms, sug)
            if terms:
                add_entry(terms, sug2)
                if stop_condition is not None:
                    payload = stop_condition(lead_exps_list)
                    if payload:
                        raise StoppedEarly(payload)
    except StoppedEarly as stop:
        return stop.payload

    return _interreduce(ring, entries, budget, tails=interreduce)


def _interreduce(
    ring: PolynomialRing, entries: list[_Entry], budget: int | None, tails: bool = True
) -> GroebnerBasis:
    # Drop entries whose lead is divisible by another lead (keeping the
    # earliest among equals), then tail-reduce survivors against each other.
    entries = sorted(entries, key=lambda e: e.lead)
    kept: list[_Entry] = []
    for e in entries:
        dominated = False
        for f in kept:
            if f.lead == e.lead or ((f.mask & ~e.mask) == 0 and _divides(f.exps, e.exps)):
                dominated = True
                break
        if not dominated:
            kept.append(e)

    if not tails:
        return GroebnerBasis(ring, [Polynomial(ring, e.terms) for e in kept])

    red = _Reducer(ring, budget)
    final: list[Polynomial] = []
    for idx, e in enumerate(kept):
        red.entries = kept[:idx] + kept[idx + 1 :]
        terms, _ = red.reduce_full(dict(e.terms))
        if terms:
            final.append(Polynomial(ring, _monic_terms(ring, terms)))
    final.sort(key=lambda g: g.lead_key())
    return GroebnerBasis(ring, final)


def normal_form(f: Polynomial, gb: GroebnerBasis, budget: int | None = None) -> Polynomial:
    """Remainder of f on division by the basis: no term of the result is
    divisible by any lead term, and f - result lies in the ideal."""
    return gb.normal_form(f, budget=budget)


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    ring = f.ring
    l = ring.key_lcm(f.lead_key(), g.lead_key())
    a = f.mul_term(l - f.lead_key(), ring.field.inv(f.lead_coeff()))
    b = g.mul_term(l - g.lead_key(), ring.field.inv(g.lead_coeff()))
    return a - b


def is_groebner(gb: GroebnerBasis) -> bool:
    """Direct Buchberger criterion; for small test cases."""
    polys = gb.polys
    for i in range(len(polys)):
        for j in range(i):
            if not gb.normal_form(s_polynomial(polys[i], polys[j])).is_zero():
                return False
    return True
