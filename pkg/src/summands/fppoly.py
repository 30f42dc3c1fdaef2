"""Univariate polynomial arithmetic over prime fields.

A polynomial is a 1-d int64 array of coefficients in ascending degree
order, coefficients in ``[0, p)``, with no trailing zeros; the zero
polynomial has length 0.  These are plain arrays, not a class: callers
thread the modulus.
"""

from __future__ import annotations

import numpy as np

from .linalg import FieldMatrix, eliminate, matmul_mod, solve

Poly = np.ndarray


def trim(f: np.ndarray) -> Poly:
    f = np.asarray(f, dtype=np.int64)
    nz = np.flatnonzero(f)
    return f[: nz[-1] + 1] if nz.size else f[:0]


def poly(coeffs, p: int) -> Poly:
    return trim(np.asarray(coeffs, dtype=np.int64) % p)


def degree(f: Poly) -> int:
    return len(f) - 1


def add(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    out = np.zeros(n, dtype=np.int64)
    out[: len(f)] += f
    out[: len(g)] += g
    return trim(out % p)


def sub(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    out = np.zeros(n, dtype=np.int64)
    out[: len(f)] += f
    out[: len(g)] -= g
    return trim(out % p)


def mul(f: Poly, g: Poly, p: int) -> Poly:
    if len(f) == 0 or len(g) == 0:
        return f[:0]
    return trim(np.convolve(f, g) % p)


def scale(f: Poly, c: int, p: int) -> Poly:
    return trim(f * (c % p) % p)


def monic(f: Poly, p: int) -> Poly:
    if len(f) == 0:
        return f
    lead = int(f[-1])
    if lead == 1:
        return f
    return f * pow(lead, p - 2, p) % p


def divmod_poly(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if len(g) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(f) < len(g):
        return f[:0], f.copy()
    r = f.copy()
    q = np.zeros(len(f) - len(g) + 1, dtype=np.int64)
    ginv = pow(int(g[-1]), p - 2, p)
    for i in range(len(f) - len(g), -1, -1):
        c = r[i + len(g) - 1] * ginv % p
        if c:
            q[i] = c
            r[i : i + len(g)] = (r[i : i + len(g)] - c * g) % p
    return trim(q), trim(r)


def mod(f: Poly, g: Poly, p: int) -> Poly:
    return divmod_poly(f, g, p)[1]


def gcd(f: Poly, g: Poly, p: int) -> Poly:
    while len(g):
        f, g = g, mod(f, g, p)
    return monic(f, p)


def pow_mod(f: Poly, e: int, modulus: Poly, p: int) -> Poly:
    """``f**e mod modulus``, binary powering."""
    result = np.ones(1, dtype=np.int64)
    base = mod(f, modulus, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), modulus, p)
        base = mod(mul(base, base, p), modulus, p)
        e >>= 1
    return result


def deriv(f: Poly, p: int) -> Poly:
    if len(f) <= 1:
        return f[:0]
    return trim(f[1:] * np.arange(1, len(f), dtype=np.int64) % p)


def eval_at(f: Poly, x: int, p: int) -> int:
    acc = 0
    for c in f[::-1]:
        acc = (acc * x + int(c)) % p
    return acc


def eval_matrix(f: Poly, a: np.ndarray, p: int) -> np.ndarray:
    """``f(a)`` for a square int matrix, by Horner's rule."""
    n = a.shape[0]
    if len(f) == 0:
        return np.zeros((n, n), dtype=np.int64)
    acc = np.eye(n, dtype=np.int64) * int(f[-1]) % p
    for c in f[-2::-1]:
        acc = matmul_mod(acc, a, p)
        acc[np.diag_indices(n)] = (acc.diagonal() + int(c)) % p
    return acc


_X = np.array([0, 1], dtype=np.int64)


def is_irreducible(f: Poly, p: int) -> bool:
    """Rabin's test."""
    d = degree(f)
    if d <= 0:
        return False
    if d == 1:
        return True
    xq = pow_mod(_X, p**d, f, p)
    if len(sub(xq, _X, p)):
        return False
    for q in _prime_divisors(d):
        xe = pow_mod(_X, p ** (d // q), f, p)
        if degree(gcd(sub(xe, _X, p), f, p)) != 0:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def squarefree_part(f: Poly, p: int) -> Poly:
    """The radical of ``f``: each irreducible factor once."""
    f = monic(f, p)
    if degree(f) <= 1:
        return f
    df = deriv(f, p)
    if len(df) == 0:
        # f = h(x**p); over the prime field h's coefficients are the
        # p-th roots of f's, which Frobenius fixes.
        return squarefree_part(trim(f[::p].copy()), p)
    g = gcd(f, df, p)
    if degree(g) == 0:
        return f
    core = divmod_poly(f, g, p)[0]
    # g may still hide factors of multiplicity >= p with zero effect
    # on the derivative; recurse to collect them all.
    return _merge_coprime(core, squarefree_part(g, p), p)


def _merge_coprime(f: Poly, g: Poly, p: int) -> Poly:
    d = gcd(f, g, p)
    if degree(d) > 0:
        g = divmod_poly(g, d, p)[0]
        return _merge_coprime(f, g, p) if degree(g) > 0 else f
    return mul(f, g, p)


def factor(f: Poly, p: int, rng: np.random.Generator) -> list[tuple[Poly, int]]:
    """Irreducible factorization, as (monic factor, multiplicity) pairs.

    Splitting inside an equal-degree block is randomized; pass a seeded
    generator for reproducibility.
    """
    f = monic(f, p)
    if degree(f) < 1:
        return []
    irreducibles: list[Poly] = []
    stack = [squarefree_part(f, p)]
    while stack:
        g = stack.pop()
        if degree(g) < 1:
            continue
        if degree(g) == 1 or is_irreducible(g, p):
            irreducibles.append(g)
            continue
        blocks = _distinct_degree(g, p)
        if len(blocks) == 1 and degree(blocks[0][0]) == degree(g):
            prod, d = blocks[0]
            stack.extend(_equal_degree(prod, d, p, rng))
        else:
            stack.extend(b for b, _ in blocks)
    out = []
    for g in sorted(irreducibles, key=lambda h: (len(h), h.tolist())):
        m = 0
        rem = f
        while True:
            q, r = divmod_poly(rem, g, p)
            if len(r):
                break
            rem = q
            m += 1
        out.append((g, m))
    return out


def _distinct_degree(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Split squarefree ``f`` into products of equal-degree irreducibles."""
    out = []
    h = mod(_X, f, p)
    rest = f
    d = 0
    while degree(rest) > 2 * (d + 1) - 1:
        d += 1
        h = pow_mod(h, p, rest, p)
        g = gcd(sub(h, _X, p), rest, p)
        if degree(g) > 0:
            out.append((g, d))
            rest = divmod_poly(rest, g, p)[0]
            h = mod(h, rest, p)
    if degree(rest) > 0:
        out.append((rest, degree(rest)))
    return out


def _equal_degree(f: Poly, d: int, p: int, rng: np.random.Generator) -> list[Poly]:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles."""
    n = degree(f)
    if n == d:
        return [f]
    while True:
        r = trim(rng.integers(0, p, n).astype(np.int64))
        if degree(r) < 1:
            continue
        if p == 2:
            # trace map
            t = mod(r, f, p)
            acc = t
            for _ in range(d - 1):
                t = pow_mod(t, 2, f, p)
                acc = add(acc, t, p)
            g = gcd(acc, f, p)
        else:
            g = gcd(sub(pow_mod(r, (p**d - 1) // 2, f, p), np.ones(1, dtype=np.int64), p), f, p)
        if 0 < degree(g) < n:
            return _equal_degree(g, d, p, rng) + _equal_degree(
                divmod_poly(f, g, p)[0], d, p, rng
            )


# ---------------------------------------------------------------------------
# Characteristic and minimal polynomials
# ---------------------------------------------------------------------------


def charpoly(a: np.ndarray, p: int) -> Poly:
    """Characteristic polynomial mod p, monic, via Hessenberg reduction."""
    n = a.shape[0]
    if n != a.shape[1]:
        raise ValueError(f"charpoly of a non-square {a.shape} matrix")
    h = (np.array(a, dtype=np.int64) % p).copy()
    for j in range(n - 2):
        piv = 0
        for i in range(j + 1, n):
            if h[i, j]:
                piv = i
                break
        if piv == 0:
            continue
        if piv != j + 1:
            h[[j + 1, piv]] = h[[piv, j + 1]]
            h[:, [j + 1, piv]] = h[:, [piv, j + 1]]
        inv = pow(int(h[j + 1, j]), p - 2, p)
        for i in range(j + 2, n):
            m = h[i, j] * inv % p
            if m:
                h[i] = (h[i] - m * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + m * h[:, i]) % p
    # c[k] = charpoly of the leading k x k block
    c: list[Poly] = [np.ones(1, dtype=np.int64)]
    for k in range(1, n + 1):
        term = mul(poly([-int(h[k - 1, k - 1]), 1], p), c[k - 1], p)
        run = 1
        for m in range(1, k):
            run = run * int(h[k - m, k - m - 1]) % p
            if run == 0:
                break
            coef = int(h[k - m - 1, k - 1]) * run % p
            if coef:
                term = sub(term, scale(c[k - m - 1], coef, p), p)
        c.append(term)
    return c[n]


def minpoly(a: np.ndarray, p: int) -> Poly:
    """Minimal polynomial mod p, by Krylov chains from standard vectors."""
    n = a.shape[0]
    if n == 0:
        return np.ones(1, dtype=np.int64)
    at = (np.array(a, dtype=np.int64) % p).T  # act on row vectors
    m = np.ones(1, dtype=np.int64)
    for start in range(n):
        if degree(m) == n:
            break
        v = np.zeros(n, dtype=np.int64)
        v[start] = 1
        # rows: v, vA, vA^2, ... with reduced echelon bookkeeping
        krylov = [v]
        while True:
            v = matmul_mod(v[None, :], at, p)[0]
            stack = np.vstack(krylov + [v])
            from .linalg import eliminate

            e = eliminate(stack, p, reduced=True)
            if len(e.piv_rows) < len(stack):
                break
            krylov.append(v)
        k = len(krylov)
        # local annihilator: express vA^k in the chain
        lhs = np.vstack(krylov).T
        rhs = v[:, None]
        from .linalg import FieldMatrix, solve

        sol = solve(FieldMatrix(lhs, p), FieldMatrix(rhs, p))
        local = np.zeros(k + 1, dtype=np.int64)
        local[k] = 1
        local[:k] = (-sol.a[:, 0]) % p
        g = gcd(m, local, p)
        m = divmod_poly(mul(m, local, p), g, p)[0]
    return monic(m, p)
