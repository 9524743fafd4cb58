"""Per-prime triple-point scans of the support surface.

For a fixed prime the scan works with the degree-<=3 coefficient matrix of
the saturated support ideal over F_p[x,y,z]:

  * a sampling pass over the z-slices finds the distinguished planes (the
    slices fully covered by extra-leg components: positive corank almost
    everywhere);
  * inside each distinguished slice, determinants of random square
    compressions along lines cut out the corank-2 curve; the plane whose
    curve is a smooth conic is the special one;
  * the corank-3 divisor on that conic (degree 14), obtained by
    interpolating a compressed determinant along a rational parametrization
    of the conic, yields both the census count and the linear system whose
    kernel is the septic;
  * the other covered planes' triple points are the singular points of
    their corank-2 curves (counted over the algebraic closure).

All reductions mod p start from the one rational family, so parameter
coordinates agree across primes and the plane value, conic and septic can
be combined by CRT and rational reconstruction.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .field import PrimeField, QQ, ReconstructionFailure, mpq_mod, reconstruct_from_residues
from .graded import monomials_of_degree, nullspace
from .groebner import BudgetExceeded, GroebnerBasis, groebner_basis
from .hilbert import hilbert_data
from .modnum import (
    batched_det_modp,
    batched_rank_modp,
    eval_poly_modp,
    interp_poly_modp,
    nullspace_modp,
    poly_gcd_modp,
    rank_modp,
)
from .ring import Polynomial, PolynomialRing, poly_ring
from .construct import (
    LEG_VARS,
    PARAM_NAMES,
    ConstructionInput,
    SexticFamily,
    _lift,
    coefficient_vector,
    s_monomials,
    support_ring,
)


class ScanError(RuntimeError):
    pass


@dataclass
class SupportVectors:
    """Coefficient vectors of (f, f_generic-leg) over the rationals: the
    prime-independent data the scans reduce from."""

    inp: ConstructionInput
    fc: list  # 28 polynomials in QQ[p,q,x,y,z] (x,y,z only)
    gc: list  # 28 polynomials in QQ[p,q,x,y,z]


def support_vectors(family: SexticFamily) -> SupportVectors:
    """The 28 coefficient pairs of the sextic family and the generic-leg
    sextic, over the rationals."""
    fld = family.ring.field
    R9 = support_ring(fld)
    big = poly_ring(fld, *(LEG_VARS + PARAM_NAMES + family.chart.ring.names))
    pv = [big.var(i) for i in range(3)]
    qv = [big.var(3 + i) for i in range(3)]
    Ahat = [[_lift(e, big) for e in row] for row in family.chart.Ahat]
    that = _lift(family.chart.that, big)
    ell = _lift(family.kernel.ell, big)
    x, y, z = (big.var(6 + i) for i in range(3))
    s1, s2, s3 = (big.var(9 + i) for i in range(3))
    g = x * s1 + y * s2 + z * s3
    a = [_lift(t, big) for t in family.kernel.a]
    bp = [_lift(t, big) for t in family.kernel.bprime]
    b = [u + g * v for u, v in zip(bp, a)]
    pq = pv[0] * qv[0] + pv[1] * qv[1] + pv[2] * qv[2]
    Ap = [Ahat[i][0] * pv[0] + Ahat[i][1] * pv[1] + Ahat[i][2] * pv[2] for i in range(3)]
    ApQ = Ap[0] * qv[0] + Ap[1] * qv[1] + Ap[2] * qv[2]
    bQ = b[0] * qv[0] + b[1] * qv[1] + b[2] * qv[2]
    ApB = Ap[0] * b[0] + Ap[1] * b[1] + Ap[2] * b[2]
    bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2]
    f_pq = (
        (ell * ell * that * ApQ).scale(2)
        - (ell * ell * that * that * pq).scale(2)
        + (ell * that * bQ).scale(2)
        - (ell * ApB).scale(2)
        - bb
    )
    smonos = s_monomials(big, 6)
    fc = [c.convert(R9) for c in coefficient_vector(_lift(family.f, big), smonos)]
    gc = [c.convert(R9) for c in coefficient_vector(f_pq, smonos)]
    return SupportVectors(inp=family.inp, fc=fc, gc=gc)


def _reduce_poly_modp(poly: Polynomial, target: PolynomialRing, p: int) -> Polynomial:
    terms = {}
    for k, c in poly.terms.items():
        v = mpq_mod(mpq(c), p)
        if v:
            terms[k] = v
    return Polynomial(target, terms)


@dataclass
class ScanConfig:
    xyz_degree: int = 5  # parameter-degree window of the matrix rows
    sat_power: int = 2  # saturation exponent for the membership test
    seed: int = 1
    budget: int = 4_000_000_000
    census: bool = False  # also count triple points on the non-conic planes


@dataclass
class PlaneReport:
    zbar: int
    corank2_ydegree: int | None = None
    is_conic_plane: bool = False
    triple_count: int | None = None
    conic: list | None = None  # monic-x^2 coefficients mod p (6 entries)
    septic: list | None = None  # xy^6-normalized coefficient list mod p
    rational_triple_points: list = field(default_factory=list)


@dataclass
class TripleScanReport:
    prime: int
    generic_rank: int
    planes: list
    elapsed: float
    notes: list = field(default_factory=list)

    @property
    def conic_plane(self) -> PlaneReport | None:
        for pl in self.planes:
            if pl.is_conic_plane:
                return pl
        return None

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "generic_rank": self.generic_rank,
            "planes": [
                {
                    "zbar": pl.zbar,
                    "corank2_ydegree": pl.corank2_ydegree,
                    "is_conic_plane": pl.is_conic_plane,
                    "triple_count": pl.triple_count,
                    "conic": pl.conic,
                    "septic": pl.septic,
                    "rational_triple_points": pl.rational_triple_points,
                }
                for pl in self.planes
            ],
            "elapsed_seconds": self.elapsed,
            "notes": self.notes,
        }


# -- step 3b rows over F_p ------------------------------------------------------


def _saturation_form(inp: ConstructionInput, fld, seed: int):
    """A deterministic generic linear form vanishing on all three input-leg
    planes (their affine span in the leg block)."""
    legs = inp.legs
    base = [mpq(c) for c in (list(legs[0].p) + list(legs[0].q))]
    d12 = [fld(mpq(a) - mpq(b)) for a, b in zip(base, list(legs[1].p) + list(legs[1].q))]
    d13 = [fld(mpq(a) - mpq(b)) for a, b in zip(base, list(legs[2].p) + list(legs[2].q))]
    ker = nullspace([d12, d13], 6, fld)
    rng = random.Random(seed * 1_000_003 + fld.p)
    alpha = [fld.zero] * 6
    while all(v == fld.zero for v in alpha):
        alpha = [fld.zero] * 6
        for vec in ker:
            c = fld(rng.randrange(1, fld.p))
            alpha = [fld.add(ai, fld.mul(c, vi)) for ai, vi in zip(alpha, vec)]
    const = fld.zero
    for ai, bi in zip(alpha, base):
        const = fld.add(const, fld.mul(ai, fld(bi)))
    R9 = support_ring(fld)
    form = R9.zero()
    for i in range(6):
        form = form + R9.var(i).scale(alpha[i])
    return form - R9.constant(const)


@dataclass
class Step3bMatrix:
    """The degree-<=3 leg-block coefficient matrix over F_p in evaluation
    form: a list of distinct parameter monomials, one weight matrix mapping
    monomial values to matrix entries, and the entry positions."""

    prime: int
    cols: list  # leg-block exponent 6-tuples
    n_rows: int
    monos: np.ndarray  # (M, 3) xyz exponents
    weights: np.ndarray  # (E, M) coefficients
    entry_rows: np.ndarray  # (E,)
    entry_cols: np.ndarray  # (E,)
    xyz_degree: int

    @property
    def shape(self):
        return self.n_rows, len(self.cols)

    def evaluate_batch(self, xs, ys, zs) -> np.ndarray:
        """Assemble the matrix at many parameter points: (B, rows, cols)."""
        p = self.prime
        xs = np.asarray(xs, dtype=np.int64) % p
        ys = np.asarray(ys, dtype=np.int64) % p
        zs = np.asarray(zs, dtype=np.int64) % p
        B = xs.shape[0]
        dmax = self.xyz_degree + 1
        px = np.ones((dmax, B), dtype=np.int64)
        py = np.ones((dmax, B), dtype=np.int64)
        pz = np.ones((dmax, B), dtype=np.int64)
        for d in range(1, dmax):
            px[d] = px[d - 1] * xs % p
            py[d] = py[d - 1] * ys % p
            pz[d] = pz[d - 1] * zs % p
        monovals = px[self.monos[:, 0], :] * py[self.monos[:, 1], :] % p * pz[
            self.monos[:, 2], :
        ] % p  # (M, B)
        entry_vals = self.weights @ monovals % p  # (E, B)
        out = np.zeros((B, self.n_rows, len(self.cols)), dtype=np.int64)
        out[:, self.entry_rows, self.entry_cols] = entry_vals.T
        return out


def step3b_rows_modp(
    sup: SupportVectors, p: int, cfg: ScanConfig
) -> tuple[Step3bMatrix, GroebnerBasis]:
    """Degree-<=3 part of the saturated support ideal over F_p, arranged as
    the scan matrix: generators of leg-degree <= 2 found by linear algebra
    against the minor ideal's basis (membership of ell^k * candidate),
    plus their six variable multiples."""
    fld = PrimeField(p)
    R9 = support_ring(fld)
    fc = [_reduce_poly_modp(c, R9, p) for c in sup.fc]
    gc = [_reduce_poly_modp(c, R9, p) for c in sup.gc]
    minors = []
    n = len(fc)
    for i in range(n):
        if fc[i].is_zero() and gc[i].is_zero():
            continue
        for j in range(i + 1, n):
            m = fc[i] * gc[j] - fc[j] * gc[i]
            if not m.is_zero():
                minors.append(m)
    # Interreduce the minors by row reduction on their coefficient vectors.
    monoset: dict[int, int] = {}
    for m in minors:
        for k in m.terms:
            monoset.setdefault(k, len(monoset))
    order = sorted(monoset, reverse=True)
    colof = {k: i for i, k in enumerate(order)}
    mat = np.zeros((len(minors), len(order)), dtype=np.int64)
    for r, m in enumerate(minors):
        for k, c in m.terms.items():
            mat[r, colof[k]] = c
    from .modnum import rref_modp

    red, piv = rref_modp(mat, p)
    basis = []
    for r in range(len(piv)):
        terms = {order[i]: int(v) for i, v in enumerate(red[r]) if v}
        basis.append(Polynomial(R9, terms))
    gbI = groebner_basis(basis, budget=cfg.budget)

    ell = _saturation_form(sup.inp, fld, cfg.seed)
    ellk = ell
    for _ in range(cfg.sat_power - 1):
        ellk = ellk * ell

    # Candidates: leg-degree <= 2, parameter degree <= window.
    six = poly_ring(fld, *LEG_VARS)
    three = poly_ring(fld, *PARAM_NAMES)
    pq_monos = []
    for d in range(3):
        pq_monos.extend(monomials_of_degree(six, d))
    xyz_monos = []
    for d in range(cfg.xyz_degree + 1):
        xyz_monos.extend(monomials_of_degree(three, d))
    cands = [tuple(pm) + tuple(xm) for pm in pq_monos for xm in xyz_monos]

    colmap: dict[int, int] = {}
    vecs = []
    for mexps in cands:
        mono = Polynomial(R9, {R9.encode(mexps): 1})
        nf = gbI.normal_form(ellk * mono)
        vec = {}
        for k, c in nf.terms.items():
            idx = colmap.setdefault(k, len(colmap))
            vec[idx] = c
        vecs.append(vec)
    A = np.zeros((len(colmap), len(cands)), dtype=np.int64)
    for j, vec in enumerate(vecs):
        for i, c in vec.items():
            A[i, j] = c
    ker = nullspace_modp(A, p)
    gens = []
    for rowv in ker:
        items = [(cands[j], int(c)) for j, c in enumerate(rowv) if c]
        gens.append(R9.from_terms(items))

    # Keep module generators only: elements that are parameter-polynomial
    # combinations of earlier ones contribute nothing to the evaluated rank
    # at any point. Membership is tested on reduced forms; the original
    # (window-bounded) elements become the rows.
    gens.sort(key=lambda g: g.lead_key())
    kept: list[Polynomial] = []
    reducers: list[Polynomial] = []

    def module_reduce(g: Polynomial) -> Polynomial:
        fld_local = R9.field
        while not g.is_zero():
            le = g.lead_exps()
            hit = None
            for h in reducers:
                hl = h.lead_exps()
                if hl[:6] == le[:6] and all(a <= b for a, b in zip(hl[6:], le[6:])):
                    hit = h
                    break
            if hit is None:
                return g
            shift = g.lead_key() - hit.lead_key()
            factor = fld_local.mul(g.lead_coeff(), fld_local.inv(hit.lead_coeff()))
            g = g - hit.mul_term(shift, factor)
        return g

    for g in gens:
        red = module_reduce(g)
        if not red.is_zero():
            kept.append(g)
            reducers.append(red)
            reducers.sort(key=lambda h: h.lead_key())

    # Matrix rows: the kept elements and their leg-variable multiples.
    cols = []
    for d in range(4):
        cols.extend(monomials_of_degree(six, d))
    cols.sort(key=lambda m: (sum(m), six.encode(m)), reverse=True)
    col_index = {m: i for i, m in enumerate(cols)}

    entries: dict[tuple[int, int], dict[tuple, int]] = {}
    mono_index: dict[tuple, int] = {}
    n_rows = 0

    def add_row(g: Polynomial) -> bool:
        nonlocal n_rows
        split: dict[int, list] = {}
        for exps, c in g.iter_terms():
            legm = exps[:6]
            if sum(legm) > 3:
                return False
            split.setdefault(col_index[legm], []).append((exps[6:], int(c)))
        ri = n_rows
        for ci, items in split.items():
            d = entries.setdefault((ri, ci), {})
            for xm, c in items:
                mono_index.setdefault(xm, len(mono_index))
                d[xm] = (d.get(xm, 0) + c) % p
        n_rows += 1
        return True

    varpolys = [R9.var(i) for i in range(6)]
    for g in kept:
        add_row(g)
        for v in varpolys:
            add_row(g * v)

    monos = np.zeros((len(mono_index), 3), dtype=np.int64)
    for xm, i in mono_index.items():
        monos[i] = xm
    # Random row compression: the rank at every point is at most the column
    # count, so ~cols+12 compressed rows preserve rank profiles with high
    # probability and keep the evaluation cheap.
    target = min(n_rows, len(cols) + 12)
    rng = random.Random(cfg.seed * 7919 + p)
    dense = np.zeros((n_rows, len(cols), len(mono_index)), dtype=np.int64)
    for (ri, ci), d in entries.items():
        for xm, c in d.items():
            dense[ri, ci, mono_index[xm]] = c
    if target < n_rows:
        U = np.array(
            [[rng.randrange(p) for _ in range(n_rows)] for _ in range(target)],
            dtype=np.int64,
        )
        dense = np.tensordot(U, dense, axes=(1, 0)) % p
    n_final = dense.shape[0]
    er, ec, em = np.nonzero(dense)
    pairs = sorted({(int(r), int(c)) for r, c in zip(er, ec)})
    entry_rows = np.array([r for r, _ in pairs], dtype=np.int64)
    entry_cols = np.array([c for _, c in pairs], dtype=np.int64)
    weights = dense[entry_rows, entry_cols, :]
    return (
        Step3bMatrix(
            prime=p,
            cols=cols,
            n_rows=n_final,
            monos=monos,
            weights=weights,
            entry_rows=entry_rows,
            entry_cols=entry_cols,
            xyz_degree=int(monos.sum(axis=1).max()) if len(monos) else 0,
        ),
        gbI,
    )


# -- slice analysis --------------------------------------------------------------


def _rand_proj(rng: random.Random, p: int, n_from: int, n_to: int) -> np.ndarray:
    return np.array(
        [[rng.randrange(p) for _ in range(n_from)] for _ in range(n_to)], dtype=np.int64
    )


def scan_prime(
    sup: SupportVectors,
    p: int,
    cfg: ScanConfig | None = None,
    matrix: Step3bMatrix | None = None,
) -> TripleScanReport:
    """Full triple-point analysis of one prime."""
    cfg = cfg or ScanConfig()
    t0 = time.time()
    rng = random.Random((cfg.seed, p).__hash__() & 0x7FFFFFFF)
    if matrix is None:
        matrix, _ = step3b_rows_modp(sup, p, cfg)
    nrows, ncols = matrix.shape
    notes = [f"rows={nrows}"]

    # generic rank
    B = 24
    xs = np.array([rng.randrange(p) for _ in range(B)])
    ys = np.array([rng.randrange(p) for _ in range(B)])
    zs = np.array([rng.randrange(p) for _ in range(B)])
    mats = matrix.evaluate_batch(xs, ys, zs)
    ranks = batched_rank_modp(mats, p)
    r = int(ranks.max())
    if int(ranks.min()) != r:
        notes.append("generic rank not constant over the probe sample")

    # covered-plane detection: corank >= 1 at k random points per slice
    k1 = 3
    zvals = np.repeat(np.arange(p, dtype=np.int64), k1)
    xv = np.array([rng.randrange(p) for _ in range(p * k1)])
    yv = np.array([rng.randrange(p) for _ in range(p * k1)])
    covered = []
    chunk = 256
    low = np.zeros(p * k1, dtype=bool)
    for start in range(0, p * k1, chunk):
        end = min(start + chunk, p * k1)
        mats = matrix.evaluate_batch(xv[start:end], yv[start:end], zvals[start:end])
        rk = batched_rank_modp(mats, p, cap=r)
        low[start:end] = rk < r
    for zb in range(p):
        if all(low[zb * k1 : (zb + 1) * k1]):
            covered.append(zb)
    # confirm with more samples
    confirmed = []
    for zb in covered:
        m = 6
        mats = matrix.evaluate_batch(
            np.array([rng.randrange(p) for _ in range(m)]),
            np.array([rng.randrange(p) for _ in range(m)]),
            np.full(m, zb, dtype=np.int64),
        )
        rk = batched_rank_modp(mats, p, cap=r)
        if np.all(rk < r):
            confirmed.append(zb)
    planes = [PlaneReport(zbar=int(zb)) for zb in confirmed]
    notes.append(f"covered planes: {confirmed}")

    # identify the conic plane: in-slice corank-2 curve via determinant gcds
    for plane in planes:
        _slice_curve(matrix, plane, r, rng, notes)
    conic_planes = [pl for pl in planes if pl.corank2_ydegree == 2]
    if len(conic_planes) == 1:
        pl = conic_planes[0]
        pl.is_conic_plane = True
        _conic_analysis(matrix, pl, r, rng, notes)
    else:
        notes.append(f"conic-plane identification ambiguous: {[pl.zbar for pl in conic_planes]}")

    if cfg.census:
        for plane in planes:
            if not plane.is_conic_plane:
                _covered_plane_census(matrix, plane, r, rng, notes, cfg)

    return TripleScanReport(
        prime=p,
        generic_rank=r,
        planes=planes,
        elapsed=time.time() - t0,
        notes=notes,
    )


def _det_on_line(matrix: Step3bMatrix, U, V, xs, ys, zs, p) -> np.ndarray:
    mats = matrix.evaluate_batch(xs, ys, zs)
    comp = U[None, :, :] @ mats % p @ V[None, :, :] % p
    return batched_det_modp(comp, p)


def locate_curve_planes(
    matrix: Step3bMatrix,
    rng: random.Random,
    skip: set | None = None,
    lines: int = 4,
    chunk: int = 1024,
) -> tuple[list[int], list[int]]:
    """z-values whose slice contains a one-dimensional corank-2 locus,
    detected through rational common zeros of two compressed determinants
    along random horizontal lines (batched across all slices). Returns
    (curve planes, degenerate planes); intended for small primes where a
    full z-sweep is cheap. A slice votes when two lines show a common
    rational zero; identically-vanishing determinant lines flag the slice
    as degenerate instead."""
    p = matrix.prime
    nrows, ncols = matrix.shape
    size = min(nrows, ncols) - 1
    skip = skip or set()
    votes: dict[int, int] = {}
    degenerate: set[int] = set()
    projs = [
        (_rand_proj(rng, p, nrows, size), _rand_proj(rng, p, size, ncols)) for _ in range(2)
    ]

    def sweep(zlist: list[int], xi: int) -> np.ndarray:
        npts = len(zlist) * p
        xs_full = np.full(npts, xi, dtype=np.int64)
        ys_full = np.tile(np.arange(p, dtype=np.int64), len(zlist))
        zs_full = np.repeat(np.array(zlist, dtype=np.int64), p)
        common = np.ones(npts, dtype=bool)
        for U, V in projs:
            zero = np.zeros(npts, dtype=bool)
            for start in range(0, npts, chunk):
                end = min(start + chunk, npts)
                dets = _det_on_line(
                    matrix, U, V, xs_full[start:end], ys_full[start:end], zs_full[start:end], p
                )
                zero[start:end] = dets == 0
            common &= zero
            if not common.any():
                break
        return common.reshape(len(zlist), p)

    zlist = [z for z in range(p) if z not in skip]
    # phase 1: two full sweeps
    for line in range(2):
        common = sweep(zlist, rng.randrange(p))
        for i, z in enumerate(zlist):
            row = common[i]
            if bool(row.all()):
                degenerate.add(z)
            elif bool(row.any()):
                votes[z] = votes.get(z, 0) + 1
    # phase 2: extra lines for single-vote candidates only
    candidates = [z for z, v in votes.items() if v == 1 and z not in degenerate]
    for line in range(2, lines):
        if not candidates:
            break
        common = sweep(candidates, rng.randrange(p))
        still = []
        for i, z in enumerate(candidates):
            row = common[i]
            if bool(row.all()):
                degenerate.add(z)
            elif bool(row.any()):
                votes[z] += 1
            else:
                still.append(z)
        candidates = still
    curve_planes = sorted(
        z for z, v in votes.items() if v >= 2 and z not in degenerate
    )
    return curve_planes, sorted(degenerate)


def _slice_curve(matrix: Step3bMatrix, plane: PlaneReport, r: int, rng, notes):
    """y-degree of the corank-2 curve in the slice (gcd of compressed
    determinants along vertical lines)."""
    p = matrix.prime
    nrows, ncols = matrix.shape
    size = r - 1
    degs = []
    dbound = size * matrix.xyz_degree + 1
    if dbound >= p:
        raise ScanError(f"prime {p} too small for determinant interpolation ({dbound})")
    ytab = np.arange(dbound + 1, dtype=np.int64)
    projs = [
        (_rand_proj(rng, p, nrows, size), _rand_proj(rng, p, size, ncols)) for _ in range(2)
    ]
    for _ in range(5):
        xi = rng.randrange(p)
        gcds = None
        for U, V in projs:
            dets = _det_on_line(
                matrix,
                U,
                V,
                np.full(dbound + 1, xi, dtype=np.int64),
                ytab,
                np.full(dbound + 1, plane.zbar, dtype=np.int64),
                p,
            )
            poly = interp_poly_modp(ytab, dets, p)
            coeffs = [int(c) for c in poly]
            gcds = coeffs if gcds is None else poly_gcd_modp(gcds, coeffs, p)
        dg = len(gcds) - 1 if any(gcds) else None
        if dg is not None:
            degs.append(dg)
    if degs:
        plane.corank2_ydegree = max(set(degs), key=degs.count)


def _conic_points_on_lines(matrix, plane, r, rng, count=12):
    """Rational points of the corank-2 conic collected from vertical-line
    gcd roots."""
    p = matrix.prime
    nrows, ncols = matrix.shape
    size = r - 1
    dbound = size * matrix.xyz_degree + 1
    ytab = np.arange(dbound + 1, dtype=np.int64)
    projs = [
        (_rand_proj(rng, p, nrows, size), _rand_proj(rng, p, size, ncols)) for _ in range(2)
    ]
    pts = []
    tried = 0
    while len(pts) < count and tried < 400:
        tried += 1
        xi = rng.randrange(p)
        gcds = None
        for U, V in projs:
            dets = _det_on_line(
                matrix,
                U,
                V,
                np.full(dbound + 1, xi, dtype=np.int64),
                ytab,
                np.full(dbound + 1, plane.zbar, dtype=np.int64),
                p,
            )
            poly = interp_poly_modp(ytab, dets, p)
            coeffs = [int(c) for c in poly]
            gcds = coeffs if gcds is None else poly_gcd_modp(gcds, coeffs, p)
        if not any(gcds) or len(gcds) - 1 != 2:
            continue
        # rational roots of the quadratic
        c0, c1, c2 = gcds[0], gcds[1], gcds[2]
        disc = (c1 * c1 - 4 * c0 * c2) % p
        if pow(disc, (p - 1) // 2, p) not in (0, 1):
            continue
        rt = _sqrt_modp(disc, p)
        inv = pow(2 * c2 % p, -1, p)
        for yb in {(-c1 + rt) * inv % p, (-c1 - rt) * inv % p}:
            pts.append((xi, int(yb)))
    return pts


def _sqrt_modp(a: int, p: int) -> int:
    """Tonelli-Shanks square root (a must be a QR mod p)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # general case
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    zq = 2
    while pow(zq, (p - 1) // 2, p) != p - 1:
        zq += 1
    m, c, t, rt = s, pow(zq, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, rt = t * c % p, rt * b % p
    return rt


def _fit_conic(pts: list, p: int) -> list | None:
    """Monic-x^2 conic through the points: [1, xy, y^2, x, y, 1] coeffs."""
    rows = []
    for (x, y) in set(pts):
        rows.append([x * x % p, x * y % p, y * y % p, x, y, 1])
    ker = nullspace_modp(np.array(rows, dtype=np.int64), p)
    if ker.shape[0] != 1:
        return None
    v = ker[0]
    if v[0] == 0:
        return None
    inv = pow(int(v[0]), -1, p)
    return [int(c) * inv % p for c in v]


def _conic_analysis(matrix: Step3bMatrix, plane: PlaneReport, r: int, rng, notes):
    """On the special plane: fit the conic, parametrize it, interpolate the
    compressed determinant along it, and extract the triple divisor and the
    septic."""
    p = matrix.prime
    nrows, ncols = matrix.shape
    pts = _conic_points_on_lines(matrix, plane, r, rng)
    conic = _fit_conic(pts, p)
    if conic is None:
        notes.append(f"plane {plane.zbar}: conic fit failed")
        return
    plane.conic = conic
    a2, a11, a02, a10, a01, a00 = conic

    # rational parametrization through one conic point
    x0, y0 = pts[0]

    def conic_eval(x, y):
        return (
            a2 * x * x + a11 * x * y + a02 * y * y + a10 * x + a01 * y + a00
        ) % p

    assert conic_eval(x0, y0) == 0
    # lines (x, y) = (x0 + s, y0 + s*t): C = s*(L(t) + s*Q(t))
    # L(t) = dC/ds at s=0 = C_x + t C_y ; Q(t) = a2 + a11 t + a02 t^2
    cx = (2 * a2 * x0 + a11 * y0 + a10) % p
    cy = (a11 * x0 + 2 * a02 * y0 + a01) % p
    # second intersection: s = -L/Q; X = x0*Q - L, Y = y0*Q - t*L, W = Q
    # as tau-polynomials (constant first):
    L = [cx % p, cy % p]
    Q = [a2 % p, a11 % p, a02 % p]

    size = r - 2
    dmax = matrix.xyz_degree
    # matrix entries e(x,y) -> e(X/W, Y/W) * W^dmax: tau-degree <= 2*dmax
    tau_deg_bound = size * 2 * dmax + 8
    if tau_deg_bound >= p:
        raise ScanError(f"prime {p} too small for conic determinant interpolation")
    taus = np.arange(tau_deg_bound + 1, dtype=np.int64)
    Lv = eval_poly_modp(L, taus, p)
    Qv = eval_poly_modp(Q, taus, p)
    Wv = Qv
    Xv = (x0 * Qv - Lv) % p
    Yv = (y0 * Qv - taus * Lv) % p
    good = Wv != 0
    # evaluate matrix at projective points (X/W, Y/W): scale rows by W^dmax
    xs = Xv[good] * np.array([pow(int(w), -1, p) for w in Wv[good]]) % p
    ys = Yv[good] * np.array([pow(int(w), -1, p) for w in Wv[good]]) % p
    zs = np.full(xs.shape[0], plane.zbar, dtype=np.int64)
    wpow = np.array([pow(int(w), dmax, p) for w in Wv[good]], dtype=np.int64)

    divisor = None
    base_mats = matrix.evaluate_batch(xs, ys, zs)
    base_mats = base_mats * wpow[:, None, None] % p
    for _ in range(3):
        U = _rand_proj(rng, p, nrows, size)
        V = _rand_proj(rng, p, size, ncols)
        comp = U[None, :, :] @ base_mats % p @ V[None, :, :] % p
        dets = batched_det_modp(comp, p)
        # interpolate over the good taus
        poly = interp_poly_modp(taus[good], dets, p)
        coeffs = [int(c) for c in poly]
        # strip known W-factor roots: divide by gcd with W^inf
        for _ in range(size * dmax + 2):
            g = poly_gcd_modp(coeffs, [int(Q[0]), int(Q[1]), int(Q[2])], p)
            if len(g) - 1 < 1:
                break
            coeffs = _poly_div_modp(coeffs, g, p)
        divisor = coeffs if divisor is None else poly_gcd_modp(divisor, coeffs, p)
    if divisor is None or not any(divisor):
        notes.append(f"plane {plane.zbar}: divisor interpolation failed")
        return
    plane.triple_count = len(divisor) - 1
    # rational triple points from rational roots of the divisor
    roots = [int(t) for t in range(p) if eval_poly_modp(divisor, np.array([t]), p)[0] == 0]
    for t in roots:
        w = eval_poly_modp(Q, np.array([t]), p)[0]
        if w == 0:
            continue
        lv = eval_poly_modp(L, np.array([t]), p)[0]
        wx = (x0 * w - lv) * pow(int(w), -1, p) % p
        wy = (y0 * w - t * lv) * pow(int(w), -1, p) % p
        plane.rational_triple_points.append((int(wx), int(wy)))

    # septic: degree <= 7, linear in x, vanishing on the divisor
    monos = [(1, b) for b in range(7)] + [(0, b) for b in range(8)]
    deg_div = len(divisor) - 1
    cols = []
    for (ax, ay) in monos:
        # X^ax * Y^ay * W^(7-ax-ay) as tau-polynomial
        poly = [1]
        for _ in range(ax):
            poly = _poly_mul_modp(poly, [int(x0 * Q[0] - L[0]) % p, int(x0 * Q[1] - L[1]) % p, int(x0 * Q[2]) % p], p)
        for _ in range(ay):
            poly = _poly_mul_modp(poly, [int(y0 * Q[0]) % p, int((y0 * Q[1] - L[0])) % p, int((y0 * Q[2] - L[1])) % p], p)
        for _ in range(7 - ax - ay):
            poly = _poly_mul_modp(poly, [int(Q[0]), int(Q[1]), int(Q[2])], p)
        poly = _poly_rem_modp(poly, divisor, p)
        col = [0] * deg_div
        for i, c in enumerate(poly):
            col[i] = c
        cols.append(col)
    A = np.array(cols, dtype=np.int64).T
    ker = nullspace_modp(A, p)
    if ker.shape[0] != 1:
        notes.append(f"plane {plane.zbar}: septic kernel dimension {ker.shape[0]}")
        return
    v = [int(c) for c in ker[0]]
    # normalize: coefficient of x*y^6 -> 1
    if v[6] == 0:
        notes.append(f"plane {plane.zbar}: septic has vanishing x*y^6 coefficient")
        return
    inv = pow(v[6], -1, p)
    plane.septic = [c * inv % p for c in v]


def _poly_mul_modp(a: list, b: list, p: int) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, yv in enumerate(b):
                out[i + j] = (out[i + j] + x * yv) % p
    return out


def _poly_rem_modp(a: list, b: list, p: int) -> list:
    a = [v % p for v in a]
    db = len(b) - 1
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
        db -= 1
    inv = pow(b[-1], -1, p)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - db
        f = a[-1] * inv % p
        for i in range(db + 1):
            a[shift + i] = (a[shift + i] - f * b[i]) % p
        while len(a) > 1 and a[-1] == 0:
            a.pop()
    return a


def _poly_div_modp(a: list, b: list, p: int) -> list:
    a = [v % p for v in a]
    b = [v % p for v in b]
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    out = [0] * (len(a) - db)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - db
        f = a[-1] * inv % p
        out[shift] = f
        for i in range(db + 1):
            a[shift + i] = (a[shift + i] - f * b[i]) % p
        while len(a) > 1 and a[-1] == 0:
            a.pop()
    return out


def _covered_plane_census(matrix, plane, r, rng, notes, cfg):
    """Triple count on a covered non-conic plane: the corank-2 curve's
    singular points, counted over the closure (distinct points)."""
    p = matrix.prime
    h = _assemble_slice_curve(matrix, plane, r, rng, notes)
    if h is None:
        return
    fld = PrimeField(p)
    rxy = poly_ring(fld, "x", "y")
    hx = h.derivative(0)
    hy = h.derivative(1)
    try:
        gb = groebner_basis([h, hx, hy], budget=cfg.budget)
    except BudgetExceeded:
        notes.append(f"plane {plane.zbar}: singular-point count exceeded budget")
        return
    if gb.is_one:
        plane.triple_count = 0
        return
    if gb.dimension() != 0:
        notes.append(f"plane {plane.zbar}: singular locus not zero-dimensional")
        return
    plane.triple_count = _distinct_points(gb, rng)


def _assemble_slice_curve(matrix, plane, r, rng, notes):
    """The corank-2 curve h(x,y) of a covered slice, assembled from
    monic per-line gcds (valid when the y-lead coefficient is constant,
    which a random shear arranges with high probability)."""
    p = matrix.prime
    nrows, ncols = matrix.shape
    size = r - 1
    dbound = size * matrix.xyz_degree + 1
    ytab = np.arange(dbound + 1, dtype=np.int64)
    projs = [
        (_rand_proj(rng, p, nrows, size), _rand_proj(rng, p, size, ncols)) for _ in range(2)
    ]

    def line_gcd(xi):
        gcds = None
        for U, V in projs:
            dets = _det_on_line(
                matrix,
                U,
                V,
                np.full(dbound + 1, xi, dtype=np.int64),
                ytab,
                np.full(dbound + 1, plane.zbar, dtype=np.int64),
                p,
            )
            poly = interp_poly_modp(ytab, dets, p)
            coeffs = [int(c) for c in poly]
            gcds = coeffs if gcds is None else poly_gcd_modp(gcds, coeffs, p)
        return gcds

    # degree profile
    sample = []
    for _ in range(6):
        g = line_gcd(rng.randrange(p))
        if g and any(g):
            sample.append(len(g) - 1)
    if not sample:
        notes.append(f"plane {plane.zbar}: no curve found")
        return None
    dy = max(set(sample), key=sample.count)
    # x-degree bound: assume total degree <= dy + few; interpolate columns
    dx = dy + 4
    xs = []
    columns = []
    xi = 0
    while len(xs) < dx + 1 and xi < p:
        g = line_gcd(xi)
        if g and len(g) - 1 == dy:
            xs.append(xi)
            columns.append(g)
        xi += 1
    if len(xs) < dx + 1:
        notes.append(f"plane {plane.zbar}: curve assembly short of lines")
        return None
    fld = PrimeField(p)
    rxy = poly_ring(fld, "x", "y")
    items = []
    xs_arr = np.array(xs, dtype=np.int64)
    for j in range(dy + 1):
        vals = np.array([col[j] for col in columns], dtype=np.int64)
        cpoly = interp_poly_modp(xs_arr, vals, p)
        for i, c in enumerate(cpoly):
            if c:
                items.append(((int(i), int(j)), int(c)))
    h = rxy.from_terms(items)
    return h


def _distinct_points(gb: GroebnerBasis, rng) -> int:
    """Number of distinct closure points of a zero-dimensional plane ideal:
    degree of the squarefree part of the eliminant along a random shear."""
    ring = gb.ring
    p = ring.field.p
    x, y = ring.variables()
    for _ in range(6):
        lam = rng.randrange(1, p)
        # adjoin u = x + lam*y, eliminate (x, y), count the squarefree
        # degree of the eliminant in u
        ru = poly_ring(ring.field, "x", "y", "u", order="block", split=2)
        u = ru.var(2)
        gens = [_convert_xy(g, ru) for g in gb.polys]
        gens.append(_convert_xy(x + y.scale(lam), ru) - u)
        try:
            gbu = groebner_basis(gens, budget=800_000_000)
        except BudgetExceeded:
            continue
        elim = [g for g in gbu if all(e == 0 for e in g.lead_exps()[:2])]
        if not elim:
            continue
        epoly = min(elim, key=lambda g: g.degree())
        coeffs = [0] * (epoly.degree() + 1)
        for exps, c in epoly.iter_terms():
            coeffs[exps[2]] = int(c)
        der = [(i * coeffs[i]) % p for i in range(1, len(coeffs))]
        g = poly_gcd_modp(coeffs, der, p)
        sqfree_deg = (len(coeffs) - 1) - (len(g) - 1)
        return sqfree_deg
    return -1


def _convert_xy(g: Polynomial, target: PolynomialRing) -> Polynomial:
    items = []
    for exps, c in g.iter_terms():
        items.append(((exps[0], exps[1], 0), c))
    return target.from_terms(items)
