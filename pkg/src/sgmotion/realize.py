"""Realization over the reals: derive the parameter field polynomial from
the reconstructed conic and septic, isolate the real intersection points,
recover the remaining legs numerically, and validate the real double-point
geometry of the plane sextic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .field import QQ
from .mechanism import Leg, Mechanism, Pose
from .realroots import RootInterval, isolate_real_roots, refine_root, to_coeffs
from .ring import Polynomial, poly_ring


class RealizationError(RuntimeError):
    pass


@dataclass
class RationalFunction:
    """x(y) = num(y)/den(y), exact coefficients."""

    num: list  # mpq coefficients, constant first
    den: list

    def __call__(self, y):
        num = sum(c * mpq(y) ** i for i, c in enumerate(self.num))
        den = sum(c * mpq(y) ** i for i, c in enumerate(self.den))
        if den == 0:
            raise ZeroDivisionError("pole of x(y)")
        return num / den

    def eval_float(self, y: float) -> float:
        num = 0.0
        for c in reversed(self.num):
            num = num * y + float(c)
        den = 0.0
        for c in reversed(self.den):
            den = den * y + float(c)
        return num / den


def solve_x_of_y(septic: Polynomial) -> RationalFunction:
    """The x-linear septic S = A(y)*x + B(y) solved as x(y) = -B/A.

    Raises RealizationError when S is not linear in x (a different
    component was reconstructed).
    """
    ring = septic.ring
    xi = ring.var_index("x")
    yi = ring.var_index("y")
    Acoef: dict[int, mpq] = {}
    Bcoef: dict[int, mpq] = {}
    for exps, c in septic.iter_terms():
        dx = exps[xi]
        dy = exps[yi]
        if dx == 0:
            Bcoef[dy] = Bcoef.get(dy, mpq(0)) + mpq(c)
        elif dx == 1:
            Acoef[dy] = Acoef.get(dy, mpq(0)) + mpq(c)
        else:
            raise RealizationError("septic is not linear in x")
    if not Acoef:
        raise RealizationError("septic has no x part")
    da, db = max(Acoef), max(Bcoef) if Bcoef else 0
    num = [-Bcoef.get(i, mpq(0)) for i in range(db + 1)]
    den = [Acoef.get(i, mpq(0)) for i in range(da + 1)]
    return RationalFunction(num=num, den=den)


def field_polynomial(conic: Polynomial, x_of_y: RationalFunction) -> list:
    """Numerator of conic(x(y), y): the univariate polynomial defining the
    parameter field, content-stripped; degree <= 14."""
    ring = conic.ring
    xi = ring.var_index("x")
    yi = ring.var_index("y")

    def poly_mul(a, b):
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, yv in enumerate(b):
                    out[i + j] += x * yv
        return out

    def poly_add(a, b):
        n = max(len(a), len(b))
        out = [mpq(0)] * n
        for i, x in enumerate(a):
            out[i] += x
        for i, x in enumerate(b):
            out[i] += x
        return out

    num, den = x_of_y.num, x_of_y.den
    # conic terms: c * x^dx * y^dy -> c * num^dx * den^(2-dx) * y^dy
    acc = [mpq(0)]
    for exps, c in conic.iter_terms():
        dx, dy = exps[xi], exps[yi]
        if dx > 2:
            raise RealizationError("conic has degree > 2 in x")
        term = [mpq(c)]
        for _ in range(dx):
            term = poly_mul(term, num)
        for _ in range(2 - dx):
            term = poly_mul(term, den)
        term = poly_mul(term, [mpq(0)] * dy + [mpq(1)] if dy else [mpq(1)])
        acc = poly_add(acc, term)
    while len(acc) > 1 and acc[-1] == 0:
        acc.pop()
    if all(v == 0 for v in acc):
        raise RealizationError("field polynomial vanished identically")
    # strip rational content -> primitive integer coefficients
    from gmpy2 import gcd, mpz

    g = mpz(0)
    l = mpz(1)
    for v in acc:
        g = gcd(g, v.numerator)
        l = l * v.denominator // gcd(l, v.denominator)
    scale = mpq(l, g) * (1 if acc[-1] > 0 else -1)
    return [v * scale for v in acc]


@dataclass
class RealPoint:
    """A refined real intersection point of the conic and septic."""

    y: RootInterval
    x: float

    def xy(self) -> tuple[float, float]:
        return self.x, float(self.y.midpoint())


def real_parameter_points(
    conic: Polynomial, septic: Polynomial, tol=mpq(1, 10**18)
) -> tuple[list[RealPoint], RationalFunction, list]:
    """All real intersection points, refined to the given width, mapped
    through x(y); returns (points, x_of_y, field_poly_coeffs)."""
    xy = solve_x_of_y(septic)
    fpoly = field_polynomial(conic, xy)
    roots = isolate_real_roots(fpoly)
    pts = []
    for iv in roots:
        r = refine_root(iv, tol)
        # skip poles of x(y)
        den_mid = sum(c * r.midpoint() ** i for i, c in enumerate(xy.den))
        if den_mid == 0:
            continue
        pts.append(RealPoint(y=r, x=xy.eval_float(float(r.midpoint()))))
    return pts, xy, fpoly


def select_point(points: list, target_xy: tuple[float, float] | None, index: int | None):
    """Either an explicit index or the point closest to the target."""
    if index is not None:
        return points[index]
    if target_xy is None:
        return points[0]
    tx, ty = target_xy
    return min(points, key=lambda pt: (pt.x - tx) ** 2 + (float(pt.y.midpoint()) - ty) ** 2)


# -- numeric leg recovery ----------------------------------------------------------


@dataclass
class RealizedMechanism:
    """Six legs: the exact input three plus the numerically recovered
    three; parameter point and residual report."""

    mechanism: Mechanism
    parameter_point: tuple  # (x, y, z) floats
    residuals: dict

    def to_json(self) -> dict:
        data = self.mechanism.to_json()
        data["parameter_point"] = list(self.parameter_point)
        data["residuals"] = self.residuals
        return data


def recover_legs(
    specialized_gens: list,
    seeds: int = 200,
    box: float = 8.0,
    tol: float = 1e-10,
    dedup: float = 1e-6,
    rng_seed: int = 7,
) -> list[np.ndarray]:
    """Solve the specialized support system (polynomials in the six leg
    coordinates, float coefficients) by damped Gauss-Newton from many
    random seeds; return deduplicated solutions with residual < tol."""

    def fr(v):
        return np.array([g(v) for g in specialized_gens])

    def jac(v, h=1e-7):
        J = np.zeros((len(specialized_gens), 6))
        f0 = fr(v)
        for i in range(6):
            vv = v.copy()
            vv[i] += h
            J[:, i] = (fr(vv) - f0) / h
        return J

    rng = np.random.default_rng(rng_seed)
    found: list[np.ndarray] = []
    for _ in range(seeds):
        v = rng.uniform(-box, box, 6)
        ok = False
        for _ in range(80):
            f0 = fr(v)
            res = float(np.max(np.abs(f0)))
            if res < tol:
                ok = True
                break
            J = jac(v)
            try:
                step, *_ = np.linalg.lstsq(J, -f0, rcond=None)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            base = float(np.linalg.norm(f0))
            improved = False
            for _ in range(20):
                cand = v + lam * step
                if float(np.linalg.norm(fr(cand))) < base:
                    v = cand
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                break
        if ok:
            for w in found:
                if float(np.max(np.abs(w - v))) < dedup:
                    break
            else:
                found.append(v.copy())
    found.sort(key=lambda w: tuple(np.round(w, 9)))
    return found


# -- double-point geometry -----------------------------------------------------------


@dataclass
class SexticGeometry:
    double_points: list  # projective chart coordinates (s1, s2, s3)
    on_line_residuals: list
    crunodes: int

    @property
    def count(self) -> int:
        return len(self.double_points)


def validate_sextic_geometry(
    sextic_coeffs: dict,
    line_coeffs: tuple,
    tol: float = 1e-8,
    rng_seed: int = 11,
) -> SexticGeometry:
    """Find the double points of the plane sextic numerically (f and its
    gradient vanish), check they lie on the given line, and classify the
    node type by the Hessian signature.

    ``sextic_coeffs`` maps (e1, e2, e3) -> float; ``line_coeffs`` is the
    linear form. Works through the three affine charts.
    """
    items = list(sextic_coeffs.items())

    def f_hom(s):
        return sum(c * s[0] ** e[0] * s[1] ** e[1] * s[2] ** e[2] for e, c in items)

    def grad_hom(s):
        g = np.zeros(3)
        for e, c in items:
            for i in range(3):
                if e[i]:
                    ee = list(e)
                    ee[i] -= 1
                    g[i] += c * e[i] * s[0] ** ee[0] * s[1] ** ee[1] * s[2] ** ee[2]
        return g

    rng = np.random.default_rng(rng_seed)
    sols: list[np.ndarray] = []
    for chart in range(3):
        for _ in range(160):
            uv = rng.uniform(-6, 6, 2)
            s = np.zeros(3)
            idx = [i for i in range(3) if i != chart]
            s[chart] = 1.0
            s[idx[0]], s[idx[1]] = uv
            for _ in range(60):
                g = grad_hom(s)
                J = np.zeros((3, 2))
                h = 1e-7
                for k, i in enumerate(idx):
                    sv = s.copy()
                    sv[i] += h
                    J[:, k] = (grad_hom(sv) - g) / h
                try:
                    step, *_ = np.linalg.lstsq(J, -g, rcond=None)
                except np.linalg.LinAlgError:
                    break
                s[idx[0]] += step[0]
                s[idx[1]] += step[1]
                if float(np.linalg.norm(step)) < 1e-14:
                    break
            if float(np.max(np.abs(grad_hom(s)))) < tol and abs(f_hom(s)) < tol:
                sn = s / np.linalg.norm(s)
                if sn[np.argmax(np.abs(sn))] < 0:
                    sn = -sn
                for w in sols:
                    if float(np.linalg.norm(w - sn)) < 1e-6:
                        break
                else:
                    sols.append(sn)

    line_res = []
    crunodes = 0
    for s in sols:
        lr = abs(sum(c * v for c, v in zip(line_coeffs, s)))
        line_res.append(float(lr))
        # Hessian in the chart of the largest coordinate
        chart = int(np.argmax(np.abs(s)))
        idx = [i for i in range(3) if i != chart]
        h = 1e-6
        H = np.zeros((2, 2))
        base = s / s[chart]

        def fv(du, dv):
            sv = base.copy()
            sv[idx[0]] += du
            sv[idx[1]] += dv
            return f_hom(sv)

        H[0, 0] = (fv(h, 0) - 2 * fv(0, 0) + fv(-h, 0)) / h**2
        H[1, 1] = (fv(0, h) - 2 * fv(0, 0) + fv(0, -h)) / h**2
        H[0, 1] = H[1, 0] = (fv(h, h) - fv(h, -h) - fv(-h, h) + fv(-h, -h)) / (4 * h**2)
        if np.linalg.det(H) < 0:
            crunodes += 1
    return SexticGeometry(double_points=[s.tolist() for s in sols], on_line_residuals=line_res, crunodes=crunodes)
