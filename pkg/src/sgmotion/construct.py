"""Construction of motion-curve families from three chosen legs and a
plane through the identity rotation, plus the multi-prime triple-point
analysis that pins down the distinguished parameter plane, its conic, and
the septic cutting out the special points.

Pipeline:
  1. restrict the Euler chart to the chosen plane (identity must lie on it);
  2. the two leg-difference rows annihilate (b, ell); the degree-2 and
     degree-3 kernels of that 2x4 matrix give the quadric column a, the
     cubic column b', and the line ell (unique up to the documented
     normalizations);
  3. the one-leg equation with b = b' + (x s1 + y s2 + z s3) a yields the
     three-parameter family of plane sextics; proportionality of a generic
     leg equation against it cuts out the support surface in 9 variables,
     saturated at the three input legs;
  3b. degree-<=3 coefficient rows of the support ideal drop rank by the
     fiber size; triple points are the corank-3 locus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .field import QQ, PrimeField, mpq_mod
from .graded import graded_kernel, matrix_rank, monomials_of_degree, nullspace, rref
from .groebner import GroebnerBasis, groebner_basis
from .ideals import saturate
from .mechanism import Leg, euler_matrix, homogeneous_leg_sextic
from .ring import Polynomial, PolynomialRing, poly_ring


class PlaneError(ValueError):
    pass


class NonGenericInput(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionInput:
    """Three legs with exact coordinates and a plane c0 s0 + c1 s1 + c2 s2
    + c3 s3 = 0; the plane must pass through the identity point (0:0:0:1),
    i.e. c3 = 0."""

    legs: tuple
    plane: tuple

    def __post_init__(self):
        if len(self.legs) != 3:
            raise ValueError("construction needs exactly three legs")
        if len(self.plane) != 4:
            raise ValueError("plane needs four coefficients")
        object.__setattr__(self, "legs", tuple(self.legs))
        object.__setattr__(self, "plane", tuple(mpq(c) for c in self.plane))

    def to_json(self) -> dict:
        return {
            "legs": [
                {"p": [str(c) for c in l.p], "q": [str(c) for c in l.q]} for l in self.legs
            ],
            "plane": [str(c) for c in self.plane],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionInput":
        legs = tuple(
            Leg(tuple(mpq(c) for c in l["p"]), tuple(mpq(c) for c in l["q"]))
            for l in data["legs"]
        )
        return cls(legs, tuple(mpq(c) for c in data["plane"]))


def paper_fixture() -> ConstructionInput:
    """The shipped worked example: integer legs and the plane s0 - s1."""
    return ConstructionInput(
        legs=(
            Leg((mpq(0), mpq(0), mpq(0)), (mpq(3), mpq(0), mpq(0))),
            Leg((mpq(-2), mpq(-2), mpq(-1)), (mpq(-3), mpq(3), mpq(-3))),
            Leg((mpq(2), mpq(1), mpq(-2)), (mpq(3), mpq(1), mpq(1))),
        ),
        plane=(1, -1, 0, 0),
    )


@dataclass
class PlaneChart:
    """Restriction of the Euler chart to the plane: Ahat (3x3 quadrics),
    that (quadric) in S = k[s1,s2,s3], plus the substitution s0 -> sub."""

    ring: PolynomialRing  # k[s1, s2, s3]
    sub: Polynomial  # image of s0
    Ahat: list
    that: Polynomial


def restrict_to_plane(inp: ConstructionInput, fld=QQ) -> PlaneChart:
    """Substitution chart s0 -> -(c1 s1 + c2 s2)/c0 on the plane.

    Raises PlaneError when the plane misses the identity (c3 != 0) or when
    the default chart is unavailable (c0 = 0).
    """
    c0, c1, c2, c3 = (fld(c) for c in inp.plane)
    if c3:
        raise PlaneError("plane misses the identity point (0:0:0:1); need c3 = 0")
    if not c0:
        raise PlaneError("c0 = 0: the default chart s0 -> linear(s1,s2) is unavailable")
    S = poly_ring(fld, "s1", "s2", "s3")
    s1, s2, s3 = S.variables()
    inv = fld.inv(c0)
    sub = -(s1.scale(fld.mul(c1, inv)) + s2.scale(fld.mul(c2, inv)))
    # Euler chart in the ambient 4-variable ring, then substitute.
    R4 = poly_ring(fld, "s0", "s1", "s2", "s3")
    A, t = euler_matrix(R4)
    mapping = {0: sub, 1: s1, 2: s2, 3: s3}
    Ahat = [[entry.subs(mapping, S) for entry in row] for row in A]
    that = t.subs(mapping, S)
    return PlaneChart(S, sub, Ahat, that)


def difference_matrix(inp: ConstructionInput, chart: PlaneChart):
    """The 2x4 matrix (alpha_0 alpha_1 alpha_2 beta) whose rows are the leg
    differences (1,2) and (1,3) divided by ell: quadrics in the alpha slots,
    quartics in beta. It annihilates (b0, b1, b2, ell)."""
    S = chart.ring
    fld = S.field
    Ahat, that = chart.Ahat, chart.that

    def row(i: int, j: int):
        pi = [fld(c) for c in inp.legs[i].p]
        qi = [fld(c) for c in inp.legs[i].q]
        pj = [fld(c) for c in inp.legs[j].p]
        qj = [fld(c) for c in inp.legs[j].q]
        dp = [fld.sub(a, b) for a, b in zip(pi, pj)]
        dq = [fld.sub(a, b) for a, b in zip(qi, qj)]
        alphas = []
        for k in range(3):
            adp = Ahat[k][0].scale(dp[0]) + Ahat[k][1].scale(dp[1]) + Ahat[k][2].scale(dp[2])
            alphas.append(that.scale(fld.mul(fld(2), dq[k])) - adp.scale(2))
        # beta = 2*that*(<Ahat p_i, q_i> - <Ahat p_j, q_j>) - 2*that^2*(<p_i,q_i> - <p_j,q_j>)
        def apq(p, q):
            acc = S.zero()
            for r in range(3):
                ar = Ahat[r][0].scale(p[0]) + Ahat[r][1].scale(p[1]) + Ahat[r][2].scale(p[2])
                acc = acc + ar.scale(q[r])
            return acc
        pq_i = fld(sum(mpq(a) * mpq(b) for a, b in zip(inp.legs[i].p, inp.legs[i].q)))
        pq_j = fld(sum(mpq(a) * mpq(b) for a, b in zip(inp.legs[j].p, inp.legs[j].q)))
        beta = (that * (apq(pi, qi) - apq(pj, qj))).scale(2) - (that * that).scale(
            fld.mul(fld(2), fld.sub(pq_i, pq_j))
        )
        return alphas + [beta]

    return [row(0, 1), row(0, 2)]


@dataclass
class KernelStructure:
    """Syzygy data of the difference matrix: a (three quadrics, ell-slot
    zero), b' (three cubics), ell (linear, nonzero)."""

    a: list
    bprime: list
    ell: Polynomial

    def ring(self) -> PolynomialRing:
        return self.ell.ring


def _primitive_normalize(vec: list[Polynomial], ring: PolynomialRing):
    """Scale a vector of polynomials over QQ so the combined coefficients
    are coprime integers and the first nonzero coefficient (scanning slots
    in order, monomials descending) is positive."""
    from gmpy2 import gcd, mpz

    nums, dens = [], []
    lead_sign = 0
    for p in vec:
        for _, c in p.iter_terms():
            c = mpq(c)
            if lead_sign == 0 and c != 0:
                lead_sign = 1 if c > 0 else -1
            nums.append(c.numerator)
            dens.append(c.denominator)
    if not nums:
        return vec
    g = mpz(0)
    for v in nums:
        g = gcd(g, v)
    l = mpz(1)
    for d in dens:
        l = l * d // gcd(l, d)
    scale = mpq(l, g) * lead_sign
    return [p.scale(scale) for p in vec]


def kernel_structure(matrix, normalization: str = "primitive") -> KernelStructure:
    """Extract (a, b', ell) from the 2x4 difference matrix.

    The degree-2 kernel must be one-dimensional with vanishing ell-slot;
    the degree-3 kernel must be four-dimensional, spanned by s_i*(a,0) and
    one further vector (b', ell) with ell != 0. The representative of
    (b', ell) is canonicalized by eliminating the s_i*a components (echelon
    reduction over the fixed monomial order), then scaled according to
    ``normalization``: "primitive" (integer-coprime coefficients, positive
    lead) or "monic" (first nonzero coefficient of ell equal to one).
    """
    ring = next(e.ring for row in matrix for e in row if not e.is_zero())
    fld = ring.field

    deg2 = graded_kernel(matrix, [2, 2, 2, 0], ring)
    if len(deg2) != 1:
        raise NonGenericInput(f"degree-2 kernel has dimension {len(deg2)}, expected 1")
    a_vec = deg2[0]
    if not a_vec[3].is_zero():
        raise NonGenericInput("degree-2 kernel vector has a nonzero ell-slot")
    a = a_vec[:3]

    deg3 = graded_kernel(matrix, [3, 3, 3, 1], ring)
    if len(deg3) != 4:
        raise NonGenericInput(f"degree-3 kernel has dimension {len(deg3)}, expected 4")

    # Coefficient coordinates for degree-3 vectors: 3 cubic slots + 1 linear.
    cubes = monomials_of_degree(ring, 3)
    lins = monomials_of_degree(ring, 1)

    def coords(vec) -> list:
        out = []
        for j in range(3):
            for m in cubes:
                out.append(vec[j].coeff_of(m))
        for m in lins:
            out.append(vec[3].coeff_of(m))
        return out

    svars = ring.variables()
    multiples = []
    for s in svars:
        multiples.append([s * a[0], s * a[1], s * a[2], ring.zero()])
    w_rows = [coords(m) for m in multiples]
    w_red, w_pivots = rref([list(r) for r in w_rows], fld)
    if len(w_pivots) != 3:
        raise NonGenericInput("mulitples of a are linearly dependent")

    candidate = None
    for vec in deg3:
        if not vec[3].is_zero():
            candidate = vec
            break
    if candidate is None:
        raise NonGenericInput("no degree-3 kernel vector with nonzero ell-slot")
    cvec = coords(candidate)
    # Zero out the pivot coordinates of the s_i*a subspace.
    for prow, pcol in zip(w_red, w_pivots):
        factor = cvec[pcol]
        if factor:
            cvec = [fld.sub(x, fld.mul(factor, y)) for x, y in zip(cvec, prow)]

    # Rebuild polynomials from the reduced coordinates.
    nb = len(cubes)
    bprime = []
    for j in range(3):
        items = [(m, cvec[j * nb + k]) for k, m in enumerate(cubes) if cvec[j * nb + k]]
        bprime.append(ring.from_terms(items))
    items = [(m, cvec[3 * nb + k]) for k, m in enumerate(lins) if cvec[3 * nb + k]]
    ell = ring.from_terms(items)
    if ell.is_zero():
        raise NonGenericInput("ell vanished after canonicalization")

    a = list(a)
    if fld == QQ:
        if normalization == "primitive":
            a = _primitive_normalize(a, ring)
            full = _primitive_normalize(bprime + [ell], ring)
            bprime, ell = full[:3], full[3]
        elif normalization == "monic":
            a = _primitive_normalize(a, ring)
            lead = ell.lead_coeff()
            inv = fld.inv(lead)
            bprime = [p.scale(inv) for p in bprime]
            ell = ell.scale(inv)
        else:
            raise ValueError(f"unknown normalization {normalization!r}")
    else:
        # Over a prime field: scale a, then (b', ell), by the inverse of
        # their first nonzero coefficient (slots in order, monomials
        # descending) so reductions of the rational normalization agree.
        def first_nonzero(vec):
            for p in vec:
                if not p.is_zero():
                    return p.lead_coeff()
            return fld.one

        ainv = fld.inv(first_nonzero(a))
        a = [p.scale(ainv) for p in a]
        binv = fld.inv(first_nonzero(bprime + [ell]))
        bprime = [p.scale(binv) for p in bprime]
        ell = ell.scale(binv)

    return KernelStructure(a=a, bprime=bprime, ell=ell)


PARAM_NAMES = ("x", "y", "z")


@dataclass
class SexticFamily:
    """The three-parameter family of plane sextics: f lives in
    k[x,y,z,s1,s2,s3], homogeneous of degree 6 in the s-block with
    coefficients of degree <= 2 in the parameters."""

    ring: PolynomialRing  # k[x, y, z, s1, s2, s3]
    f: Polynomial
    chart: PlaneChart
    kernel: KernelStructure
    inp: ConstructionInput

    def sring(self) -> PolynomialRing:
        return self.chart.ring

    def specialize(self, xyz) -> Polynomial:
        """The plane sextic at concrete parameter values, in k[s1,s2,s3]."""
        S = self.chart.ring
        mapping = {
            0: S.constant(self.ring.field(xyz[0])),
            1: S.constant(self.ring.field(xyz[1])),
            2: S.constant(self.ring.field(xyz[2])),
        }
        return self.f.subs(mapping, S)


def _lift(p: Polynomial, target: PolynomialRing) -> Polynomial:
    return p.convert(target)


def sextic_family(inp: ConstructionInput, chart: PlaneChart, ks: KernelStructure) -> SexticFamily:
    """f for the first leg with b = b' + (x s1 + y s2 + z s3) a; verifies
    symbolically that the other two legs' sextics are proportional."""
    S = chart.ring
    fld = S.field
    big = poly_ring(fld, *(PARAM_NAMES + S.names))
    x, y, z = (big.var(i) for i in range(3))
    s1, s2, s3 = (big.var(i) for i in range(3, 6))
    g = x * s1 + y * s2 + z * s3
    a = [_lift(p, big) for p in ks.a]
    bprime = [_lift(p, big) for p in ks.bprime]
    b = [bp + g * av for bp, av in zip(bprime, a)]
    ell = _lift(ks.ell, big)
    Ahat = [[_lift(e, big) for e in row] for row in chart.Ahat]
    that = _lift(chart.that, big)

    fs = [
        homogeneous_leg_sextic(leg, Ahat, that, ell, b) for leg in inp.legs
    ]
    f = fs[0]
    # Proportionality of the other legs' equations: all 2x2 minors of the
    # coefficient matrix (w.r.t. s-monomials) must vanish identically.
    smonos = s_monomials(big, 6)
    fc = coefficient_vector(f, smonos)
    for other in fs[1:]:
        oc = coefficient_vector(other, smonos)
        for i in range(len(smonos)):
            for j in range(i + 1, len(smonos)):
                minor = fc[i] * oc[j] - fc[j] * oc[i]
                if not minor.is_zero():
                    raise NonGenericInput("companion leg equation is not proportional")
    return SexticFamily(ring=big, f=f, chart=chart, kernel=ks, inp=inp)


def s_monomials(ring: PolynomialRing, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of the s-block (last three variables) of the given
    total s-degree, zero elsewhere; descending order."""
    n = ring.n
    out = []
    for m in monomials_of_degree(poly_ring(ring.field, "u1", "u2", "u3"), degree):
        exps = [0] * n
        exps[n - 3], exps[n - 2], exps[n - 1] = m
        out.append(tuple(exps))
    return out


def coefficient_vector(f: Polynomial, smonos: Sequence[tuple]) -> list[Polynomial]:
    """Split f in k[params..., s1,s2,s3] into coefficient polynomials in the
    parameter block, indexed by the given s-monomials."""
    ring = f.ring
    n = ring.n
    buckets: dict[tuple, list] = {m: [] for m in smonos}
    for exps, c in f.iter_terms():
        key = tuple([0] * (n - 3) + list(exps[n - 3 :]))
        if key not in buckets:
            raise ValueError("unexpected s-monomial in coefficient split")
        coeff_exps = exps[: n - 3] + (0, 0, 0)
        buckets[key].append((coeff_exps, c))
    return [ring.from_terms(buckets[m]) for m in smonos]


@dataclass
class SupportData:
    """Support surface data: the saturated ideal J in k[p,q,x,y,z], its
    generators (linear and quadratic in the leg block), and the degree-<=3
    coefficient matrix used in the rank scan."""

    ring: PolynomialRing  # k[p0,p1,p2,q0,q1,q2,x,y,z]
    J: list
    minors_count: int
    sat_witness: Polynomial  # product of generic linear forms used to saturate


LEG_VARS = ("p0", "p1", "p2", "q0", "q1", "q2")


def support_ring(fld) -> PolynomialRing:
    return poly_ring(fld, *(LEG_VARS + PARAM_NAMES))


def support_ideal(
    family: SexticFamily,
    budget: int | None = None,
    sat_seed: int = 1,
) -> SupportData:
    """Minors of (coeffs f, coeffs f_pq) saturated at the three input legs.

    The saturation multiplies one generic linear form through each input
    leg's parameter plane (seeded deterministically); this removes exactly
    the components supported on those planes for generic forms, which the
    downstream invariants verify.
    """
    fld = family.ring.field
    R9 = support_ring(fld)
    big = poly_ring(fld, *(LEG_VARS + PARAM_NAMES + family.chart.ring.names))
    pvars = [big.var(i) for i in range(3)]
    qvars = [big.var(3 + i) for i in range(3)]

    Ahat = [[_lift(e, big) for e in row] for row in family.chart.Ahat]
    that = _lift(family.chart.that, big)
    ell = _lift(family.kernel.ell, big)
    x, y, z = (big.var(6 + i) for i in range(3))
    s1, s2, s3 = (big.var(9 + i) for i in range(3))
    g = x * s1 + y * s2 + z * s3
    a = [_lift(p, big) for p in family.kernel.a]
    bprime = [_lift(p, big) for p in family.kernel.bprime]
    b = [bp + g * av for bp, av in zip(bprime, a)]

    # Generic-leg equation with variable anchors.
    pq = pvars[0] * qvars[0] + pvars[1] * qvars[1] + pvars[2] * qvars[2]
    Ap = [
        Ahat[i][0] * pvars[0] + Ahat[i][1] * pvars[1] + Ahat[i][2] * pvars[2]
        for i in range(3)
    ]
    ApQ = Ap[0] * qvars[0] + Ap[1] * qvars[1] + Ap[2] * qvars[2]
    bQ = b[0] * qvars[0] + b[1] * qvars[1] + b[2] * qvars[2]
    ApB = Ap[0] * b[0] + Ap[1] * b[1] + Ap[2] * b[2]
    bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2]
    ell2 = ell * ell
    f_pq = (
        (ell2 * that * ApQ).scale(2)
        - (ell2 * that * that * pq).scale(2)
        + (ell * that * bQ).scale(2)
        - (ell * ApB).scale(2)
        - bb
    )
    f_lift = _lift(family.f, big)

    smonos = s_monomials(big, 6)
    fc = [c.convert(R9) for c in coefficient_vector(f_lift, smonos)]
    gc = [c.convert(R9) for c in coefficient_vector(f_pq, smonos)]

    minors = []
    npairs = len(smonos)
    for i in range(npairs):
        if fc[i].is_zero() and gc[i].is_zero():
            continue
        for j in range(i + 1, npairs):
            m = fc[i] * gc[j] - fc[j] * gc[i]
            if not m.is_zero():
                minors.append(m)

    # Deterministic generic linear forms through each input leg's plane.
    coeffs_pool = [1, 2, -1, 3, -2, 5, -3, 7, 2, -5, 1, 4, -7, 6, 3, -4, 5, -6]
    sat_factors = []
    for k, leg in enumerate(family.inp.legs):
        anchor = [fld(c) for c in (list(leg.p) + list(leg.q))]
        form = R9.zero()
        const = fld.zero
        for i in range(6):
            cmul = fld(coeffs_pool[(sat_seed * 7 + 5 * k + i) % len(coeffs_pool)])
            form = form + R9.var(i).scale(cmul)
            const = fld.add(const, fld.mul(cmul, anchor[i]))
        sat_factors.append(form - R9.constant(const))
    witness = sat_factors[0] * sat_factors[1] * sat_factors[2]

    J = saturate(minors, witness, budget=budget)
    return SupportData(ring=R9, J=list(J), minors_count=len(minors), sat_witness=witness)


def step3b_matrix(J: Sequence[Polynomial], ring: PolynomialRing):
    """Rows: each generator and its multiples by the six leg variables,
    written in the degree-<=3 monomial basis of the leg block; entries are
    polynomials in the parameters (x, y, z).

    Returns (rows, columns) where columns are the leg-block exponent
     6-tuples (degree <= 3, degrevlex-descending) and each row maps column
    index -> parameter polynomial (in a 3-variable ring).
    """
    fld = ring.field
    pring = poly_ring(fld, *PARAM_NAMES)
    cols: list[tuple] = []
    for d in range(4):
        six = poly_ring(fld, *LEG_VARS)
        cols.extend(monomials_of_degree(six, d))
    cols.sort(key=lambda m: (sum(m), poly_ring(fld, *LEG_VARS).encode(m)), reverse=True)
    col_index = {m: i for i, m in enumerate(cols)}

    def split(gen: Polynomial) -> dict[int, Polynomial] | None:
        row: dict[int, list] = {}
        for exps, c in gen.iter_terms():
            legm = exps[:6]
            if sum(legm) > 3:
                return None
            row.setdefault(col_index[legm], []).append((exps[6:], c))
        return {ci: pring.from_terms(items) for ci, items in row.items()}

    rows = []
    for gen in J:
        base = split(gen)
        if base is None:
            continue
        rows.append(base)
        for v in range(6):
            shifted = gen * ring.var(v)
            srow = split(shifted)
            if srow is not None:
                rows.append(srow)
    return rows, cols
