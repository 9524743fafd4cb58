"""Vectorized exact linear algebra over prime fields on numpy int64
arrays: row reduction, nullspace, rank, batched rank for many matrices,
univariate interpolation and gcd. All entries live in [0, p); p small
enough that p*p fits comfortably in int64 with row-length slack."""

from __future__ import annotations

import numpy as np


def rref_modp(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p; returns (matrix, pivot columns)."""
    a = np.array(a, dtype=np.int64) % p
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace_modp(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel as rows of the returned matrix."""
    a = np.atleast_2d(np.array(a, dtype=np.int64))
    m, n = a.shape
    red, pivots = rref_modp(a, p)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for row, pc in zip(red, pivots):
            basis[k, pc] = (-int(row[fc])) % p
    return basis


def rank_modp(a: np.ndarray, p: int) -> int:
    _, pivots = rref_modp(a, p)
    return len(pivots)


def batched_rank_modp(mats: np.ndarray, p: int, cap: int | None = None) -> np.ndarray:
    """Ranks of a batch of matrices (B x m x n int64, entries mod p).

    Fraction-free forward elimination vectorized over the batch; ``cap``
    stops once rank >= cap is certified for every matrix (useful when only
    corank thresholds matter).
    """
    a = np.array(mats, dtype=np.int64) % p
    B, m, n = a.shape
    ranks = np.zeros(B, dtype=np.int64)
    row = np.zeros(B, dtype=np.int64)  # current pivot row per matrix
    inv_table = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        inv_table[v] = pow(v, -1, p)
    for c in range(n):
        if cap is not None and np.all(ranks >= cap):
            break
        if np.all(row >= m):
            break
        col = a[:, :, c]  # B x m
        # mask out rows above the current pivot row
        idx = np.arange(m)[None, :]
        valid = (idx >= row[:, None]) & (col != 0)
        has = valid.any(axis=1)
        pivrow = np.where(has, np.argmax(valid, axis=1), 0)
        act = np.nonzero(has)[0]
        if act.size == 0:
            continue
        # swap pivot row into position
        r_act = row[act]
        pr_act = pivrow[act]
        need = pr_act != r_act
        sw = act[need]
        if sw.size:
            tmp = a[sw, row[sw], :].copy()
            a[sw, row[sw], :] = a[sw, pivrow[sw], :]
            a[sw, pivrow[sw], :] = tmp
        # normalize pivot row
        piv = a[act, r_act, c]
        a[act, r_act, :] = a[act, r_act, :] * inv_table[piv][:, None] % p
        # eliminate below
        below = idx > r_act[:, None]  # act-relative mask
        colvals = a[act, :, c]
        factors = np.where(below, colvals, 0)
        if np.any(factors):
            a[act] = (a[act] - factors[:, :, None] * a[act, r_act, :][:, None, :]) % p
        row[act] = r_act + 1
        ranks[act] += 1
    return ranks


def batched_det_modp(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants of a batch of square matrices mod p (B x n x n)."""
    a = np.array(mats, dtype=np.int64) % p
    B, n, n2 = a.shape
    assert n == n2
    det = np.ones(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    inv_table = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        inv_table[v] = pow(v, -1, p)
    for c in range(n):
        col = a[:, c:, c]
        nz = col != 0
        has = nz.any(axis=1)
        det[~has] = 0
        alive &= has
        if not alive.any():
            break
        pivrow = c + np.argmax(nz, axis=1)
        act = np.nonzero(alive)[0]
        pr = pivrow[act]
        swap = pr != c
        sw = act[swap]
        if sw.size:
            tmp = a[sw, c, :].copy()
            a[sw, c, :] = a[sw, pivrow[sw], :]
            a[sw, pivrow[sw], :] = tmp
            det[sw] = (p - det[sw]) % p
        piv = a[act, c, c]
        det[act] = det[act] * piv % p
        inv = inv_table[piv]
        rows_below = a[act, c + 1 :, c]  # B' x (n-c-1)
        if rows_below.shape[1]:
            factors = rows_below * inv[:, None] % p
            a[act, c + 1 :, c:] = (
                a[act, c + 1 :, c:] - factors[:, :, None] * (a[act, c, c:])[:, None, :]
            ) % p
    return det % p


def interp_poly_modp(xs: np.ndarray, ys: np.ndarray, p: int) -> np.ndarray:
    """Coefficients (constant first) of the unique polynomial of degree
    < len(xs) through the points: Newton divided differences, vectorized."""
    xs = np.array(xs, dtype=np.int64) % p
    ys = np.array(ys, dtype=np.int64) % p
    n = len(xs)
    inv_table = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        inv_table[v] = pow(v, -1, p)
    dd = ys.copy()
    for j in range(1, n):
        denom = (xs[j:] - xs[:-j]) % p
        dd[j:] = (dd[j:] - dd[j - 1 : -1]) % p * inv_table[denom] % p
    coeffs = np.zeros(n, dtype=np.int64)
    # Horner-style unfolding: poly = poly*(X - x_k) + dd[k], k = n-1..0
    deg = -1
    for k in range(n - 1, -1, -1):
        if deg >= 0:
            shifted = np.zeros(n, dtype=np.int64)
            shifted[1 : deg + 2] = coeffs[: deg + 1]
            shifted[: deg + 1] = (shifted[: deg + 1] - coeffs[: deg + 1] * int(xs[k])) % p
            coeffs = shifted
            deg += 1
        else:
            deg = 0
        coeffs[0] = (coeffs[0] + int(dd[k])) % p
    return coeffs % p


def poly_gcd_modp(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of univariate coefficient lists (constant first) mod p;
    gcd(0, b) is monic b, gcd(0, 0) is 0."""

    def trim(c):
        while len(c) > 1 and c[-1] % p == 0:
            c = c[:-1]
        return [int(v) % p for v in c]

    a, b = trim(list(a)), trim(list(b))
    if not any(a):
        a, b = b, a
    if not any(b):
        if not any(a):
            return [0]
        inv = pow(a[-1], -1, p)
        return [v * inv % p for v in a]
    if len(a) < len(b):
        a, b = b, a
    while any(b):
        da, db = len(a) - 1, len(b) - 1
        inv = pow(b[-1], -1, p)
        r = list(a)
        for shift in range(da - db, -1, -1):
            f = r[shift + db] * inv % p
            if f:
                for i in range(db + 1):
                    r[shift + i] = (r[shift + i] - f * b[i]) % p
        a, b = b, trim(r)
        if len(b) == 1 and b[0] == 0:
            break
    inv = pow(a[-1], -1, p)
    return [v * inv % p for v in a]


def eval_poly_modp(coeffs, xs: np.ndarray, p: int) -> np.ndarray:
    """Vectorized Horner evaluation of a univariate polynomial mod p."""
    out = np.zeros_like(xs, dtype=np.int64)
    for c in reversed(list(coeffs)):
        out = (out * xs + int(c)) % p
    return out
