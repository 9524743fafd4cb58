"""Sparse multivariate polynomials over exact coefficient fields.

Monomials are packed into single Python ints so that the active monomial
order is plain integer comparison and monomial multiplication is integer
addition. For grevlex the packed fields are (total degree, then prefix sums
of the exponent vector, most significant first); for lex they are the
exponents themselves; a block order concatenates the grevlex fields of the
two blocks, eliminated variables first.

Polynomials are dicts {packed monomial: coefficient} wrapped in a thin
immutable-by-convention class. Coefficients are ints for prime fields and
gmpy2.mpq for the rationals.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .field import QQ, PrimeField, RationalField

FIELD_BITS = 8
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXP = FIELD_MASK  # also caps total degree; enforced at encode time


class RingMismatch(ValueError):
    pass


class GradingError(ValueError):
    pass


def _grevlex_encode(exps: Sequence[int]) -> int:
    # fields, most significant first: [deg, s_{n-1}, ..., s_1]
    # (s_i at bit position FIELD_BITS*(i-1), total degree on top)
    key = 0
    s = 0
    for i, e in enumerate(exps[:-1]):
        s += e
        key |= s << (FIELD_BITS * i)
    return key | ((s + exps[-1]) << (FIELD_BITS * (len(exps) - 1)))


def _grevlex_decode(key: int, n: int) -> tuple[int, ...]:
    exps = []
    prev = 0
    for i in range(n - 1):
        s = (key >> (FIELD_BITS * i)) & FIELD_MASK
        exps.append(s - prev)
        prev = s
    deg = key >> (FIELD_BITS * (n - 1))
    exps.append(deg - prev)
    return tuple(exps)


class MonomialOrder:
    """Total multiplicative well-ordering, realized through key packing."""

    kind: str

    def encode(self, exps: Sequence[int]) -> int:
        raise NotImplementedError

    def decode(self, key: int, n: int) -> tuple[int, ...]:
        raise NotImplementedError

    def degree(self, key: int, n: int) -> int:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.__dict__.items()))))


class Grevlex(MonomialOrder):
    kind = "grevlex"

    def encode(self, exps):
        if len(exps) == 1:
            return exps[0]
        return _grevlex_encode(exps)

    def decode(self, key, n):
        if n == 1:
            return (key,)
        return _grevlex_decode(key, n)

    def degree(self, key, n):
        return key >> (FIELD_BITS * (n - 1))

    def __repr__(self):
        return "grevlex"


class Lex(MonomialOrder):
    kind = "lex"

    def encode(self, exps):
        key = 0
        for e in exps:
            key = (key << FIELD_BITS) | e
        return key

    def decode(self, key, n):
        return tuple((key >> (FIELD_BITS * (n - 1 - j))) & FIELD_MASK for j in range(n))

    def degree(self, key, n):
        return sum(self.decode(key, n))

    def __repr__(self):
        return "lex"


class Block(MonomialOrder):
    """Elimination order: grevlex on the first ``split`` variables dominates
    grevlex on the rest."""

    kind = "block"

    def __init__(self, split: int):
        self.split = split

    def encode(self, exps):
        head, tail = exps[: self.split], exps[self.split :]
        k1 = _grevlex_encode(head) if len(head) > 1 else head[0]
        k2 = _grevlex_encode(tail) if len(tail) > 1 else tail[0]
        return (k1 << (FIELD_BITS * len(tail))) | k2

    def decode(self, key, n):
        n2 = n - self.split
        k2 = key & ((1 << (FIELD_BITS * n2)) - 1)
        k1 = key >> (FIELD_BITS * n2)
        head = _grevlex_decode(k1, self.split) if self.split > 1 else (k1,)
        tail = _grevlex_decode(k2, n2) if n2 > 1 else (k2,)
        return head + tail

    def degree(self, key, n):
        n2 = n - self.split
        d2 = (key >> (FIELD_BITS * (n2 - 1))) & FIELD_MASK if n2 > 1 else key & FIELD_MASK
        d1 = key >> (FIELD_BITS * (n - 1))
        return d1 + d2

    def __repr__(self):
        return f"block({self.split})"


GREVLEX = Grevlex()
LEX = Lex()


def order_from_name(name: str, split: int = 0) -> MonomialOrder:
    if name == "grevlex":
        return GREVLEX
    if name == "lex":
        return LEX
    if name == "block":
        return Block(split)
    raise ValueError(f"unknown monomial order {name!r}")


class PolynomialRing:
    """Ring descriptor: variable names, coefficient field, monomial order."""

    __slots__ = ("field", "names", "order", "n", "_vars", "zero_key")

    def __init__(self, field, names: Sequence[str], order: MonomialOrder = GREVLEX):
        self.field = field
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.order = order
        self.n = len(self.names)
        self.zero_key = 0
        self._vars = None

    # -- key helpers ----------------------------------------------------------
    def encode(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n:
            raise RingMismatch(f"exponent vector of arity {len(exps)} in {self}")
        if any(e < 0 for e in exps) or sum(exps) > MAX_EXP:
            raise ValueError(f"exponent vector {exps} out of packing range")
        return self.order.encode(exps)

    def decode(self, key: int) -> tuple[int, ...]:
        return self.order.decode(key, self.n)

    def key_degree(self, key: int) -> int:
        return self.order.degree(key, self.n)

    def key_divides(self, ka: int, kb: int) -> bool:
        ea, eb = self.decode(ka), self.decode(kb)
        return all(x <= y for x, y in zip(ea, eb))

    def key_lcm(self, ka: int, kb: int) -> int:
        ea, eb = self.decode(ka), self.decode(kb)
        return self.encode(tuple(max(x, y) for x, y in zip(ea, eb)))

    # -- element constructors --------------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {0: self.field.one})

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {0: c} if c else {})

    def variables(self) -> tuple["Polynomial", ...]:
        if self._vars is None:
            vs = []
            for i in range(self.n):
                exps = [0] * self.n
                exps[i] = 1
                vs.append(Polynomial(self, {self.encode(exps): self.field.one}))
            self._vars = tuple(vs)
        return self._vars

    def var(self, i: int) -> "Polynomial":
        return self.variables()[i]

    def var_index(self, name: str) -> int:
        return self.names.index(name)

    def from_terms(self, items: Iterable[tuple[Sequence[int], object]]) -> "Polynomial":
        terms: dict[int, object] = {}
        for exps, c in items:
            c = self.field(c)
            key = self.encode(exps)
            acc = terms.get(key)
            c = c if acc is None else self.field.add(acc, c)
            if c:
                terms[key] = c
            else:
                terms.pop(key, None)
        return Polynomial(self, terms)

    def with_order(self, order: MonomialOrder) -> "PolynomialRing":
        return PolynomialRing(self.field, self.names, order)

    def with_field(self, field) -> "PolynomialRing":
        return PolynomialRing(field, self.names, self.order)

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialRing)
            and self.field == other.field
            and self.names == other.names
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.field, self.names, self.order))

    def __repr__(self):
        return f"{self.field}[{','.join(self.names)}; {self.order}]"

    # -- parsing ---------------------------------------------------------------
    _TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|\d+/\d+|\d+|\*\*|[-+*^()])")

    def parse(self, text: str) -> "Polynomial":
        """Parse the deterministic text format: explicit '*', '^' powers."""
        pos = 0
        tokens: list[str] = []
        while pos < len(text):
            m = self._TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"bad polynomial syntax at {text[pos:pos+12]!r}")
            tokens.append(m.group(1))
            pos = m.end()
        tokens.append("$")
        idx = 0

        def peek():
            return tokens[idx]

        def take():
            nonlocal idx
            idx += 1
            return tokens[idx - 1]

        def parse_sum():
            node = parse_product(1)
            while peek() in "+-":
                sgn = -1 if take() == "-" else 1
                node = node + parse_product(sgn)
            return node

        def parse_product(sign):
            node = parse_power()
            if sign < 0:
                node = -node
            while peek() in ("*", "**"):
                take()
                node = node * parse_power()
            return node

        def parse_power():
            base = parse_atom()
            if peek() in ("^", "**"):
                take()
                exp = take()
                if not exp.isdigit():
                    raise ValueError(f"bad exponent {exp!r}")
                return base ** int(exp)
            return base

        def parse_atom():
            tok = take()
            if tok == "(":
                node = parse_sum()
                if take() != ")":
                    raise ValueError("unbalanced parentheses")
                return node
            if tok == "-":
                return -parse_atom()
            if tok == "+":
                return parse_atom()
            if tok[0].isdigit():
                return self.constant(mpq(tok) if "/" in tok else int(tok))
            if tok in self.names:
                return self.var(self.names.index(tok))
            raise ValueError(f"unknown variable {tok!r}")

        result = parse_sum()
        if peek() != "$":
            raise ValueError(f"trailing input {tokens[idx:]!r}")
        return result


class Polynomial:
    """Sparse polynomial; term dict maps packed monomial keys to coefficients.

    Treat instances as immutable: all operations return new objects.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolynomialRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basic queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def lead_key(self) -> int:
        return max(self.terms)

    def lead_coeff(self):
        return self.terms[max(self.terms)]

    def lead_exps(self) -> tuple[int, ...]:
        return self.ring.decode(max(self.terms))

    def constant_coeff(self):
        return self.terms.get(0, self.ring.field.zero)

    def degree(self) -> int:
        """Total degree (-1 for the zero polynomial)."""
        if not self.terms:
            return -1
        kd = self.ring.key_degree
        return max(kd(k) for k in self.terms)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        kd = self.ring.key_degree
        degs = {kd(k) for k in self.terms}
        return len(degs) == 1

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic ---------------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        self._check(other)
        add = self.ring.field.add
        res = dict(self.terms)
        for k, c in other.terms.items():
            a = res.get(k)
            v = c if a is None else add(a, c)
            if v:
                res[k] = v
            else:
                del res[k]
        return Polynomial(self.ring, res)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.constant(other)
        self._check(other)
        f = self.ring.field
        res = dict(self.terms)
        for k, c in other.terms.items():
            a = res.get(k)
            v = f.neg(c) if a is None else f.sub(a, c)
            if v:
                res[k] = v
            else:
                del res[k]
        return Polynomial(self.ring, res)

    def __neg__(self):
        neg = self.ring.field.neg
        return Polynomial(self.ring, {k: neg(c) for k, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        if self.terms and other.terms and self.degree() + other.degree() > MAX_EXP:
            raise ValueError("product degree exceeds monomial packing range")
        fld = self.ring.field
        if fld.characteristic:
            p = fld.p
            res: dict[int, int] = {}
            get = res.get
            a, b = self.terms, other.terms
            if len(a) > len(b):
                a, b = b, a
            for k1, c1 in a.items():
                for k2, c2 in b.items():
                    k = k1 + k2
                    v = (get(k, 0) + c1 * c2) % p
                    if v:
                        res[k] = v
                    else:
                        res.pop(k, None)
            return Polynomial(self.ring, res)
        res = {}
        get = res.get
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                v = get(k, 0) + c1 * c2
                if v:
                    res[k] = v
                else:
                    res.pop(k, None)
        return Polynomial(self.ring, res)

    __radd__ = __add__

    def __rsub__(self, other):
        return (-self) + other

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        mul = self.ring.field.mul
        return Polynomial(self.ring, {k: mul(v, c) for k, v in self.terms.items()})

    def mul_term(self, key: int, c) -> "Polynomial":
        c = self.ring.field(c)
        if not c:
            return self.ring.zero()
        mul = self.ring.field.mul
        return Polynomial(self.ring, {k + key: mul(v, c) for k, v in self.terms.items()})

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {0: self.ring.field(other)}

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.lead_coeff()
        if lc == self.ring.field.one:
            return self
        inv = self.ring.field.inv(lc)
        return self.scale(inv)

    def content_and_primitive(self) -> tuple[object, "Polynomial"]:
        """Over QQ: factor out rational content so coefficients are coprime
        integers and the leading coefficient is positive."""
        if not self.terms:
            return mpq(1), self
        from gmpy2 import gcd, mpz

        nums = [mpq(c).numerator for c in self.terms.values()]
        dens = [mpq(c).denominator for c in self.terms.values()]
        g = mpz(0)
        for v in nums:
            g = gcd(g, v)
        l = mpz(1)
        for d in dens:
            l = l * d // gcd(l, d)
        content = mpq(g, l)
        if self.lead_coeff() < 0:
            content = -content
        return content, self.scale(1 / content)

    def primitive(self) -> "Polynomial":
        return self.content_and_primitive()[1]

    # -- structure ------------------------------------------------------------------
    def coeff_of(self, exps: Sequence[int]):
        return self.terms.get(self.ring.encode(exps), self.ring.field.zero)

    def iter_terms(self):
        """Yield (exponent tuple, coefficient) sorted descending in the order."""
        dec = self.ring.decode
        for k in sorted(self.terms, reverse=True):
            yield dec(k), self.terms[k]

    def derivative(self, i: int) -> "Polynomial":
        fld = self.ring.field
        items = []
        for exps, c in self.iter_terms():
            e = exps[i]
            if e:
                ne = list(exps)
                ne[i] = e - 1
                items.append((ne, fld.mul(c, fld(e))))
        return self.ring.from_terms(items)

    def evaluate(self, values: Sequence):
        """Full evaluation; values live in (or coerce into) the field."""
        fld = self.ring.field
        vals = [fld(v) for v in values]
        total = fld.zero
        for exps, c in self.iter_terms():
            term = c
            for v, e in zip(vals, exps):
                for _ in range(e):
                    term = fld.mul(term, v)
            total = fld.add(total, term)
        return total

    def evaluate_float(self, values: Sequence[float]) -> float:
        total = 0.0
        for exps, c in self.iter_terms():
            term = float(c)
            for v, e in zip(values, exps):
                term *= v ** e
            total += term
        return total

    def subs(self, mapping: Mapping[int, "Polynomial"], target: PolynomialRing | None = None) -> "Polynomial":
        """Substitute polynomials for variables (by index).

        Unmapped variables must exist in the target ring under the same name.
        """
        target = target or (next(iter(mapping.values())).ring if mapping else self.ring)
        result = target.zero()
        var_images: list[Polynomial] = []
        for i, name in enumerate(self.ring.names):
            if i in mapping:
                var_images.append(mapping[i])
            elif name in target.names:
                var_images.append(target.var(target.names.index(name)))
            else:
                var_images.append(None)  # only legal if the variable is unused
        for exps, c in self.iter_terms():
            term = target.constant(c)
            for img, e in zip(var_images, exps):
                if e == 0:
                    continue
                if img is None:
                    raise RingMismatch("substitution drops a used variable")
                term = term * img ** e
            result = result + term
        return result

    def map_coefficients(self, func: Callable, new_field) -> "Polynomial":
        ring = self.ring.with_field(new_field)
        terms = {}
        for k, c in self.terms.items():
            v = func(c)
            if v:
                terms[k] = v
        return Polynomial(ring, terms)

    def convert(self, target: PolynomialRing) -> "Polynomial":
        """Re-express in a ring with the same variable names (any order/field)."""
        if target.names == self.ring.names and target.order == self.ring.order:
            if target.field == self.ring.field:
                return Polynomial(target, dict(self.terms))
            return Polynomial(
                target, {k: v for k, v in ((k, target.field(c)) for k, c in self.terms.items()) if v}
            )
        idx = [target.names.index(nm) if nm in target.names else -1 for nm in self.ring.names]
        items = []
        for exps, c in self.iter_terms():
            ne = [0] * target.n
            for i, e in enumerate(exps):
                if e:
                    if idx[i] < 0:
                        raise RingMismatch(f"variable {self.ring.names[i]} missing in {target}")
                    ne[idx[i]] = e
            items.append((ne, c))
        return target.from_terms(items)

    # -- printing ---------------------------------------------------------------------
    def __repr__(self):
        return self.to_str()

    def to_str(self) -> str:
        """Deterministic text form: terms sorted by the active order, space
        free, explicit '*' and '^'."""
        if not self.terms:
            return "0"
        parts = []
        names = self.ring.names
        for exps, c in self.iter_terms():
            mono = "*".join(
                f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(exps) if e
            )
            cs = str(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if mono and cs == "1":
                body = mono
            elif mono:
                body = f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("-" if neg else "+") + body)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out


def poly_ring(field, *names: str, order: str = "grevlex", split: int = 0) -> PolynomialRing:
    return PolynomialRing(field, names, order_from_name(order, split))
