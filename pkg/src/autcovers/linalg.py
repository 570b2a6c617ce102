"""Exact integer linear algebra: characteristic polynomials, ranks mod p, Smith form."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NotSquare


def as_int_matrix(rows) -> np.ndarray:
    """Dense matrix of Python ints (object dtype, so entries never overflow)."""
    arr = np.array(rows, dtype=object)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    return np.vectorize(int, otypes=[object])(arr) if arr.size else arr


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def is_identity(m: np.ndarray) -> bool:
    n = m.shape[0]
    return m.shape == (n, n) and all(m[i, j] == (i == j) for i in range(n) for j in range(n))


def mat_pow(m: np.ndarray, k: int) -> np.ndarray:
    result = identity(m.shape[0])
    base = m
    while k:
        if k & 1:
            result = result.dot(base)
        k >>= 1
        if k:
            base = base.dot(base)
    return result


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


@lru_cache(maxsize=None)
def _prime(k: int) -> int:
    """k-th prime below 2**25, counting down; products of two stay far below 2**63."""
    start = (1 << 25) - 1 if k == 0 else _prime(k - 1) - 2
    n = start
    while not _is_prime(n):
        n -= 2
    return n


def _charpoly_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Characteristic polynomial mod p (low to high) via Hessenberg reduction."""
    h = np.array(a, dtype=np.int64) % p
    n = h.shape[0]
    for m in range(1, n - 1):
        nz = np.nonzero(h[m:, m - 1])[0]
        if not len(nz):
            continue
        i = m + int(nz[0])
        if i != m:
            h[[i, m], :] = h[[m, i], :]
            h[:, [i, m]] = h[:, [m, i]]
        inv = pow(int(h[m, m - 1]), p - 2, p)
        f = (h[m + 1 :, m - 1] * inv) % p
        if not f.any():
            continue
        h[m + 1 :, :] = (h[m + 1 :, :] - (f[:, None] * h[m, :][None, :]) % p) % p
        h[:, m] = (h[:, m] + (h[:, m + 1 :] @ f) % p) % p
    polys = [np.ones(1, dtype=np.int64)]
    for k in range(n):
        prev = polys[-1]
        nxt = np.zeros(k + 2, dtype=np.int64)
        nxt[1:] = prev
        nxt[: k + 1] = (nxt[: k + 1] - h[k, k] * prev) % p
        prod = 1
        for i in range(k - 1, -1, -1):
            prod = prod * int(h[i + 1, i]) % p
            if prod == 0:
                break
            c = int(h[i, k]) * prod % p
            if c:
                nxt[: i + 1] = (nxt[: i + 1] - c * polys[i]) % p
        polys.append(nxt)
    return polys[-1]


def charpoly_bound_bits(m: np.ndarray) -> int:
    """Bits bounding every coefficient of det(tI - m) (product of 1 + row norms)."""
    bits = 1.0
    for row in m:
        sq = sum(int(x) * int(x) for x in row)
        bits += math.log2(1 + math.isqrt(sq) + 1)
    return int(bits) + 2


def charpoly(m: np.ndarray) -> list[int]:
    """Coefficients (low to high) of det(tI - m) for an integer matrix.

    Computed modulo enough word-sized primes and lifted by Chinese remaindering.
    """
    m = as_int_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return [1]
    need = charpoly_bound_bits(m)
    modulus = 1
    coeffs = [0] * (n + 1)
    k = 0
    while modulus.bit_length() <= need:
        p = _prime(k)
        k += 1
        red = np.array([[int(x) % p for x in row] for row in m], dtype=np.int64)
        cp = _charpoly_mod(red, p)
        # combine x = coeffs mod modulus with cp mod p
        inv = pow(modulus % p, p - 2, p)
        for i in range(n + 1):
            t = (int(cp[i]) - coeffs[i]) % p * inv % p
            coeffs[i] += modulus * t
        modulus *= p
    half = modulus // 2
    return [c - modulus if c > half else c for c in coeffs]


def berkowitz(m: Sequence[Sequence], one, zero) -> list:
    """Coefficients (low to high) of det(tI - m) over any commutative ring.

    Division free, so it works verbatim for Laurent polynomial entries.
    """
    n = len(m)
    p = [one]  # high to low
    for i in range(1, n + 1):
        a = m[i - 1][i - 1]
        row = [m[i - 1][j] for j in range(i - 1)]
        col = [m[r][i - 1] for r in range(i - 1)]
        q = [one, zero - a]
        v = col
        for _ in range(i - 1):
            dot = zero
            for x, y in zip(row, v):
                dot = dot + x * y
            q.append(zero - dot)
            v = [sum((m[r][c] * v[c] for c in range(i - 1)), zero) for r in range(i - 1)]
        new = []
        for k in range(i + 1):
            acc = zero
            for j in range(min(k, i - 1) + 1):
                acc = acc + q[k - j] * p[j]
            new.append(acc)
        p = new
    return p[::-1]


def rank_mod_p(m: np.ndarray, p: int) -> int:
    """Rank over the prime field F_p by Gaussian elimination."""
    a = np.array([[int(x) % p for x in row] for row in m], dtype=np.int64).reshape(m.shape)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        i = r + int(nz[0])
        if i != r:
            a[[i, r], :] = a[[r, i], :]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r, :] = (a[r, :] * inv) % p
        f = a[:, c].copy()
        f[r] = 0
        a = (a - (f[:, None] * a[r, :][None, :]) % p) % p
        r += 1
    return r


def smith_normal_form(m: np.ndarray):
    """Return ``(D, U, V)`` with ``U @ m @ V == D`` diagonal, d_i | d_{i+1}, d_i >= 0."""
    a = as_int_matrix(m).copy()
    rows, cols = a.shape
    U, V = identity(rows), identity(cols)

    def swap_rows(i, j):
        a[[i, j], :] = a[[j, i], :]
        U[[i, j], :] = U[[j, i], :]

    def swap_cols(i, j):
        a[:, [i, j]] = a[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(a[i, j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i, j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i, t]:
                    q = a[i, t] // a[t, t]
                    a[i, :] -= q * a[t, :]
                    U[i, :] -= q * U[t, :]
                    if a[i, t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t, j]:
                    q = a[t, j] // a[t, t]
                    a[:, j] -= q * a[:, t]
                    V[:, j] -= q * V[:, t]
                    if a[t, j]:
                        done = False
            if done:
                bad = [
                    (i, j)
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if a[i, j] % a[t, t]
                ]
                if not bad:
                    break
                i, _ = bad[0]
                a[t, :] += a[i, :]
                U[t, :] += U[i, :]
                continue
            nz = [(abs(a[i, t]), i, t) for i in range(t, rows) if a[i, t]]
            nz += [(abs(a[t, j]), t, j) for j in range(t, cols) if a[t, j]]
            _, i, j = min(nz)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
        if a[t, t] < 0:
            a[t, :] = -a[t, :]
            U[t, :] = -U[t, :]
        t += 1
    return a, U, V


def apply_poly(coeffs: Sequence[int], m: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (low to high coefficients) at a square integer matrix."""
    n = m.shape[0]
    out = np.zeros((n, n), dtype=object)
    for c in reversed(coeffs):
        out = out.dot(m) + c * identity(n)
    return out


def map_entries(m, fn: Callable) -> np.ndarray:
    return np.array([[fn(x) for x in row] for row in m], dtype=object).reshape(len(m), len(m[0]) if len(m) else 0)
