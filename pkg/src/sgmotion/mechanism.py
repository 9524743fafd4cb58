"""Platforms, poses, the Euler-parameter rotation chart, and the two forms
(affine and homogeneous) of the leg-length equations.

A leg joins a base anchor q to a platform anchor p; six legs make a
mechanism. A pose moves the platform by x -> A x + b. The assembly space of
a mechanism is the set of poses preserving all six leg lengths; its ideal
lives in the 12 variables (9 rotation entries, 3 translation entries).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .field import QQ, PrimeField
from .ring import Polynomial, PolynomialRing, poly_ring

ASSEMBLY_VARS = ("a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33", "b1", "b2", "b3")


@dataclass(frozen=True)
class Leg:
    """Platform anchor p and base anchor q, both 3-vectors."""

    p: tuple
    q: tuple

    def __post_init__(self):
        if len(self.p) != 3 or len(self.q) != 3:
            raise ValueError("leg anchors must be 3-vectors")
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "q", tuple(self.q))

    def length_sq(self):
        return sum((pi - qi) ** 2 for pi, qi in zip(self.p, self.q))


@dataclass(frozen=True)
class Mechanism:
    """Exactly six legs over a declared coefficient field."""

    legs: tuple
    field_tag: str = "rational"  # "rational" | "F_<p>" | "float"

    def __post_init__(self):
        if len(self.legs) != 6:
            raise ValueError("a mechanism has exactly six legs")
        object.__setattr__(self, "legs", tuple(self.legs))

    def to_json(self) -> dict:
        def coord(c):
            if self.field_tag == "rational":
                return str(mpq(c))
            if self.field_tag == "float":
                return float(c)
            return int(c)

        return {
            "field": self.field_tag,
            "legs": [
                {"p": [coord(c) for c in leg.p], "q": [coord(c) for c in leg.q]}
                for leg in self.legs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Mechanism":
        tag = data["field"]
        if tag == "rational":
            conv = mpq
        elif tag == "float":
            conv = float
        elif tag.startswith("F_"):
            p = int(tag[2:])
            conv = lambda c: int(c) % p
        else:
            raise ValueError(f"unknown field tag {tag!r}")
        legs = tuple(
            Leg(tuple(conv(c) for c in entry["p"]), tuple(conv(c) for c in entry["q"]))
            for entry in data["legs"]
        )
        return cls(legs, tag)

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Mechanism":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Pose:
    """Rigid movement x -> A x + b (A row-major 3x3, b 3-vector)."""

    A: tuple
    b: tuple

    def apply(self, x: Sequence) -> tuple:
        A, b = self.A, self.b
        return tuple(
            A[i][0] * x[0] + A[i][1] * x[1] + A[i][2] * x[2] + b[i] for i in range(3)
        )

    @classmethod
    def identity(cls) -> "Pose":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0))

    def orthogonality_defect(self) -> float:
        """max |(A^T A - E)_ij|, for numeric poses."""
        A = self.A
        worst = 0.0
        for j in range(3):
            for k in range(3):
                v = sum(A[i][j] * A[i][k] for i in range(3)) - (1.0 if j == k else 0.0)
                worst = max(worst, abs(v))
        return worst

    def det(self):
        A = self.A
        return (
            A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
            - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
            + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])
        )

    def to_json(self) -> dict:
        return {"A": [float(v) for row in self.A for v in row], "b": [float(v) for v in self.b]}


# The rotation chart is the unit-quaternion matrix for the quaternion
# (w, x, y, z) = (s3, e0*s0, e1*s1, e2*s2). The sign vector below is frozen
# by the worked-example calibration (see tests); all admissible choices
# satisfy the same identities but parametrize the rotation group through
# differently-labelled charts.
EULER_SIGNS = (1, -1, -1)


def euler_matrix(ring: PolynomialRing, svars: Sequence[int] = (0, 1, 2, 3)):
    """The quadratic rotation chart (A(s), t) on Euler parameters.

    Returns a 3x3 nested list of quadrics and the quadric t = |s|^2 in the
    given ring; svars names the indices of (s0, s1, s2, s3). A(s) carries
    the identities A^T A = t^2 E and det A = t^3, with A((0,0,0,1)) = E.
    """
    e0, e1, e2 = EULER_SIGNS
    s0, s1, s2, s3 = (ring.var(i) for i in svars)
    w, x, y, z = s3, s0.scale(e0), s1.scale(e1), s2.scale(e2)
    two = ring.constant(2)
    A = [
        [
            w * w + x * x - y * y - z * z,
            two * (x * y - w * z),
            two * (x * z + w * y),
        ],
        [
            two * (x * y + w * z),
            w * w - x * x + y * y - z * z,
            two * (y * z - w * x),
        ],
        [
            two * (x * z - w * y),
            two * (y * z + w * x),
            w * w - x * x - y * y + z * z,
        ],
    ]
    t = s0 * s0 + s1 * s1 + s2 * s2 + s3 * s3
    return A, t


def euler_pose(s: Sequence[float]) -> Pose:
    """Numeric pose from Euler parameters (t(s) must not vanish)."""
    e0, e1, e2 = EULER_SIGNS
    s0, s1, s2, s3 = (float(v) for v in s)
    w, x, y, z = s3, e0 * s0, e1 * s1, e2 * s2
    t = s0 * s0 + s1 * s1 + s2 * s2 + s3 * s3
    if t == 0.0:
        raise ZeroDivisionError("Euler parameters are all zero")
    A = (
        (
            (w * w + x * x - y * y - z * z) / t,
            2 * (x * y - w * z) / t,
            2 * (x * z + w * y) / t,
        ),
        (
            2 * (x * y + w * z) / t,
            (w * w - x * x + y * y - z * z) / t,
            2 * (y * z - w * x) / t,
        ),
        (
            2 * (x * z - w * y) / t,
            2 * (y * z + w * x) / t,
            (w * w - x * x - y * y + z * z) / t,
        ),
    )
    return Pose(A, (0.0, 0.0, 0.0))


def affine_leg_residual(pose: Pose, leg: Leg):
    """||p - q||^2 - ||A p + b - q||^2; zero iff the pose keeps this leg's
    length."""
    moved = pose.apply(leg.p)
    rest = leg.length_sq()
    posed = sum((mi - qi) ** 2 for mi, qi in zip(moved, leg.q))
    return rest - posed


def assembly_ring(field) -> PolynomialRing:
    return poly_ring(field, *ASSEMBLY_VARS)


_SE3_CACHE: dict = {}


def se3_relations(ring: PolynomialRing) -> list[Polynomial]:
    """Orthogonality A^T A = E (six relations) and det A = 1."""
    key = ring
    cached = _SE3_CACHE.get(key)
    if cached is not None:
        return cached
    a = [[ring.var(3 * i + j) for j in range(3)] for i in range(3)]
    gens = []
    for j in range(3):
        for k in range(j, 3):
            g = a[0][j] * a[0][k] + a[1][j] * a[1][k] + a[2][j] * a[2][k]
            if j == k:
                g = g - ring.one()
            gens.append(g)
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    gens.append(det - ring.one())
    _SE3_CACHE[key] = gens
    return gens


def leg_equation(ring: PolynomialRing, leg: Leg) -> Polynomial:
    """||p - q||^2 - ||A p + b - q||^2 in the 12 assembly variables."""
    fld = ring.field
    a = [[ring.var(3 * i + j) for j in range(3)] for i in range(3)]
    b = [ring.var(9 + i) for i in range(3)]
    p = [fld(c) for c in leg.p]
    q = [fld(c) for c in leg.q]
    rest = sum(
        (fld.sub(pi, qi)) * (fld.sub(pi, qi)) for pi, qi in zip(p, q)
    )
    g = ring.constant(rest)
    for i in range(3):
        move_i = a[i][0].scale(p[0]) + a[i][1].scale(p[1]) + a[i][2].scale(p[2]) + b[i] - ring.constant(q[i])
        g = g - move_i * move_i
    return g


def assembly_ideal(mech: Mechanism, field) -> list[Polynomial]:
    """Generators of the assembly ideal: 6 orthogonality relations, det-1,
    and the six leg equations. The vanishing locus is the assembly space."""
    ring = assembly_ring(field)
    gens = list(se3_relations(ring))
    for leg in mech.legs:
        gens.append(leg_equation(ring, leg))
    return gens


def homogeneous_leg_sextic(
    leg: Leg,
    Ahat: Sequence[Sequence[Polynomial]],
    that: Polynomial,
    ell: Polynomial,
    b: Sequence[Polynomial],
) -> Polynomial:
    """Homogeneous leg-length equation on the plane chart.

    With Ahat a 3x3 of quadrics, that a quadric, ell linear and b three
    cubics, this is the degree-6 form

        2*ell^2*that*<Ahat p, q> - 2*ell^2*that^2*<p,q>
        + 2*ell*that*<b, q> - 2*ell*<Ahat p, b> - |b|^2,

    identically equal to ell^2*that^2*||p-q||^2 - ||ell*Ahat p + b -
    ell*that*q||^2. Zero on the curve iff the pose A = Ahat/that,
    b_affine = b/(ell*that) keeps the leg's length.
    """
    ring = that.ring
    fld = ring.field
    p = [fld(c) for c in leg.p]
    q = [fld(c) for c in leg.q]
    Ap = [
        Ahat[i][0].scale(p[0]) + Ahat[i][1].scale(p[1]) + Ahat[i][2].scale(p[2])
        for i in range(3)
    ]
    pq = fld(sum(pi * qi for pi, qi in zip(p, q)))
    ApQ = Ap[0].scale(q[0]) + Ap[1].scale(q[1]) + Ap[2].scale(q[2])
    bQ = b[0].scale(q[0]) + b[1].scale(q[1]) + b[2].scale(q[2])
    ApB = Ap[0] * b[0] + Ap[1] * b[1] + Ap[2] * b[2]
    bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2]
    ell2 = ell * ell
    f = (
        (ell2 * that * ApQ).scale(2)
        - (ell2 * that * that).scale(fld.mul(fld(2), pq))
        + (ell * that * bQ).scale(2)
        - (ell * ApB).scale(2)
        - bb
    )
    # The s-block (the ring's last three variables) must be purely sextic;
    # parameter variables, if any, are unconstrained.
    if f:
        sdegs = {sum(exps[-3:]) for exps, _ in f.iter_terms()}
        if sdegs != {6}:
            raise ValueError(f"leg equation has s-degrees {sorted(sdegs)}, expected pure 6")
    return f


def paper_example_legs() -> tuple[Leg, Leg, Leg]:
    """The three integer input legs of the shipped worked example."""
    return (
        Leg((mpq(0), mpq(0), mpq(0)), (mpq(3), mpq(0), mpq(0))),
        Leg((mpq(-2), mpq(-2), mpq(-1)), (mpq(-3), mpq(3), mpq(-3))),
        Leg((mpq(2), mpq(1), mpq(-2)), (mpq(3), mpq(1), mpq(1))),
    )
