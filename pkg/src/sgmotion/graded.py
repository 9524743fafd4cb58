"""Graded linear algebra over polynomial rings: exact nullspaces/RREF over
the coefficient field, monomial bases by degree, and degree-constrained
kernels of polynomial matrices."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .ring import GradingError, Polynomial, PolynomialRing


def monomials_of_degree(ring: PolynomialRing, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree exactly d (deterministic order:
    descending in the ring's monomial order)."""
    if d < 0:
        return []
    n = ring.n
    out = []

    def rec(pos: int, remaining: int, cur: list[int]):
        if pos == n - 1:
            cur.append(remaining)
            out.append(tuple(cur))
            cur.pop()
            return
        for e in range(remaining, -1, -1):
            cur.append(e)
            rec(pos + 1, remaining - e, cur)
            cur.pop()

    rec(0, d, [])
    out.sort(key=ring.encode, reverse=True)
    return out


def rref(rows: list[list], field) -> tuple[list[list], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.inv(rows[r][c])
        if inv != field.one:
            rows[r] = [field.mul(v, inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [field.sub(a, field.mul(factor, b)) for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def nullspace(rows: list[list], ncols: int, field) -> list[list]:
    """Basis of the right kernel of the matrix (rows of length ncols),
    in reduced echelon normalization (free variable set to one)."""
    reduced, pivots = rref([list(r) for r in rows], field)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [field.zero] * ncols
        v[fc] = field.one
        for r, pc in zip(reduced, pivots):
            v[pc] = field.neg(r[fc])
        basis.append(v)
    return basis


def matrix_rank(rows: list[list], field) -> int:
    reduced, pivots = rref([list(r) for r in rows], field)
    return len(pivots)


def graded_kernel(
    matrix: Sequence[Sequence[Polynomial]],
    col_degrees: Sequence[int],
    ring: PolynomialRing | None = None,
) -> list[list[Polynomial]]:
    """Basis of the space of polynomial vectors v with M v = 0 where v_j is
    homogeneous of degree col_degrees[j] (negative degree means v_j = 0).

    All matrix entries must be homogeneous and the grading consistent: for
    each row, deg(M[i][j]) + col_degrees[j] is constant over the nonzero
    entries. Exact linear algebra on coefficient vectors.
    """
    nrows = len(matrix)
    ncols = len(matrix[0])
    if ring is None:
        ring = next(e.ring for row in matrix for e in row if not e.is_zero())
    field = ring.field

    col_bases = [monomials_of_degree(ring, d) if d >= 0 else [] for d in col_degrees]
    offsets = [0]
    for cb in col_bases:
        offsets.append(offsets[-1] + len(cb))
    nunknowns = offsets[-1]
    if nunknowns == 0:
        return []

    equations: list[list] = []
    for i in range(nrows):
        # Row target degree from any nonzero entry.
        target = None
        for j in range(ncols):
            e = matrix[i][j]
            if e.is_zero() or col_degrees[j] < 0:
                continue
            if not e.is_homogeneous():
                raise GradingError(f"entry ({i},{j}) is not homogeneous")
            t = e.degree() + col_degrees[j]
            if target is None:
                target = t
            elif t != target:
                raise GradingError(f"inconsistent grading in row {i}")
        if target is None:
            continue
        row_monos = monomials_of_degree(ring, target)
        mono_index = {m: k for k, m in enumerate(row_monos)}
        block = [[field.zero] * nunknowns for _ in row_monos]
        for j in range(ncols):
            e = matrix[i][j]
            if e.is_zero() or not col_bases[j]:
                continue
            for cidx, mono in enumerate(col_bases[j]):
                prod = e.mul_term(ring.encode(mono), field.one)
                for exps, c in prod.iter_terms():
                    block[mono_index[exps]][offsets[j] + cidx] = c
        equations.extend(block)

    kernel_vecs = nullspace(equations, nunknowns, field)
    out = []
    for v in kernel_vecs:
        vec = []
        for j in range(ncols):
            items = []
            for cidx, mono in enumerate(col_bases[j]):
                c = v[offsets[j] + cidx]
                if c:
                    items.append((mono, c))
            vec.append(ring.from_terms(items))
        out.append(vec)
    return out


def apply_matrix(matrix: Sequence[Sequence[Polynomial]], vec: Sequence[Polynomial]):
    out = []
    for row in matrix:
        acc = None
        for e, v in zip(row, vec):
            term = e * v
            acc = term if acc is None else acc + term
        out.append(acc)
    return out
