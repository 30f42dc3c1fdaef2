"""Exact dense linear algebra over prime fields.

Matrices live in numpy int64 arrays with entries reduced to ``[0, p)``.
Products and elimination stage their bulk work in float32 or float64 so
they run on BLAS, with block sizes chosen so that every intermediate
value is an exactly representable integer; reduction mod p is deferred
while a tracked value bound stays inside the work dtype's exact range.
All routines are deterministic: elimination takes the first usable
pivot row in each column, scanning columns left to right.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ModulusError",
    "ShapeError",
    "SingularError",
    "is_prime",
    "FieldMatrix",
    "matmul_mod",
    "eliminate",
    "echelon",
    "nullspace_of",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "inv",
    "row_space",
    "in_row_span",
    "intersect_row_spaces",
    "sum_row_spaces",
]


class ModulusError(ValueError):
    """Raised when operands carry different or invalid moduli."""


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


class SingularError(ValueError):
    """Raised when the inverse of a singular matrix is requested."""


# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIME_CACHE: dict[int, bool] = {}


def _check_prime(p: int) -> None:
    ok = _PRIME_CACHE.get(p)
    if ok is None:
        ok = is_prime(p)
        _PRIME_CACHE[p] = ok
    if not ok:
        raise ModulusError(f"modulus {p} is not prime")


def _work_dtype(p: int):
    """Float dtype whose exact-integer range holds staged products."""
    if p <= 127:
        return np.float32
    if (p - 1) ** 2 <= 2**53:
        return np.float64
    return None


def _capacity(dt) -> int:
    return 2**24 if dt == np.float32 else 2**53


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for nonnegative int arrays, staged on BLAS."""
    if a.shape[-1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    dt = _work_dtype(p)
    if dt is None:
        # Modulus near the word size: rank-1 accumulation in int64,
        # reduced at every step.  Slow but exact.
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out += a[:, k : k + 1] * b[k : k + 1, :]
            out %= p
        return out
    step = max(1, _capacity(dt) // max(1, (p - 1) ** 2))
    fa = np.ascontiguousarray(a, dtype=dt)
    fb = np.ascontiguousarray(b, dtype=dt)
    if a.shape[-1] <= step:
        return (fa @ fb % p).astype(np.int64)
    acc = np.zeros((a.shape[0], b.shape[1]), dtype=dt)
    for k0 in range(0, a.shape[-1], step):
        acc += fa[:, k0 : k0 + step] @ fb[k0 : k0 + step, :]
        acc %= p
    return acc.astype(np.int64)


# ---------------------------------------------------------------------------
# Blocked elimination
# ---------------------------------------------------------------------------

_SUPER = 96  # panel width; one BLAS trailing update per panel
_SUB = 12  # leaf width inside a panel
_BWD = 24  # pivot block size in back substitution
_CHUNK = 4096  # trailing column chunk per BLAS call


class _Echelon:
    """Echelon form of an integer matrix mod p.

    Forward elimination runs in panels of ``_SUPER`` columns.  Inside a
    panel, leaves of ``_SUB`` columns go one column at a time with
    rank-1 updates, and each leaf's effect on the rest of the panel is
    applied as one matrix product; the panel's aggregate effect on
    everything right of it is again one product per column chunk.
    Multipliers are captured per pivot, and pivot-row trailing values
    are recovered through the unit-lower system they satisfy.
    """

    def __init__(self, a: np.ndarray, p: int, reduced: bool = True, destroy: bool = False):
        self.p = p
        dt = _work_dtype(p)
        if dt is None:
            self.w, self.piv_rows, self.piv_cols = _echelon_int(a, p, reduced)
            return
        a = np.asarray(a)
        if a.dtype == dt and a.flags.c_contiguous:
            # Caller guarantees entries already lie in [0, p).
            w = a if destroy else a.copy()
        else:
            w = np.ascontiguousarray((a % p).astype(dt))
        self.w = w
        self.piv_rows: list[int] = []
        self.piv_cols: list[int] = []
        nrows, ncols = w.shape
        if nrows == 0 or ncols == 0:
            return
        cap = _capacity(dt)
        used = np.zeros(nrows, dtype=bool)
        buf = np.empty((nrows, min(ncols, _CHUNK)), dtype=dt)
        bound = p - 1  # max |entry| in the not-yet-visited part of w
        for lo in range(0, ncols, _SUPER):
            if not reduced and len(self.piv_rows) == nrows:
                break  # rank-only and no unused rows left
            hi = min(lo + _SUPER, ncols)
            if bound + 2 * _SUPER * (p - 1) ** 2 >= cap:
                w[:, lo:] %= p
                bound = p - 1
            # The panel is processed transposed: row t of pt is column
            # lo+t of the matrix, so leaf column extraction is
            # contiguous and leaf updates are one rank-1 per pivot.
            pt = np.ascontiguousarray(w[:, lo:hi].T)
            pan_rows: list[int] = []
            m_rows: list[np.ndarray] = []
            pivots: list[int] = []  # original pivot values, pre-scaling
            for s0 in range(0, hi - lo, _SUB):
                s1 = min(s0 + _SUB, hi - lo)
                st = pt[s0:s1]
                sub_rows: list[int] = []
                for c in range(s1 - s0):
                    st[c] %= p
                    cand = np.flatnonzero((st[c] != 0) & ~used)
                    if cand.size == 0:
                        continue
                    r = int(cand[0])
                    pcol = st[:, r] % p
                    v = int(pcol[c])
                    s = pow(v, p - 2, p)
                    if s != 1:
                        pcol = pcol * s % p
                    st[:, r] = pcol
                    mult = np.where(used, 0, st[c])
                    mult[r] = 0
                    if np.any(mult):
                        st -= np.outer(pcol, mult)
                    used[r] = True
                    self.piv_cols.append(lo + s0 + c)
                    sub_rows.append(r)
                    m_rows.append(mult)
                    pivots.append(v)
                k = len(sub_rows)
                if k and s1 < hi - lo:
                    # Finalize the new pivot rows on the rest of the
                    # panel, then push their effect there at once.
                    ksub = len(pan_rows)
                    mt = np.stack(m_rows[ksub:], axis=0)
                    cinv = _inv_lower(mt[:, sub_rows].T, pivots[ksub:], p).astype(dt)
                    b = pt[s1:, sub_rows].T % p
                    x = cinv @ b % p
                    mt[:, sub_rows] = 0
                    prod = buf.ravel()[: (hi - lo - s1) * nrows].reshape(-1, nrows)
                    np.matmul(x.T, mt, out=prod)
                    pt[s1:] -= prod
                    pt[s1:, sub_rows] = x.T
                pan_rows.extend(sub_rows)
            w[:, lo:hi] = pt.T % p
            self.piv_rows.extend(pan_rows)
            k = len(pan_rows)
            if k == 0 or hi == ncols:
                continue
            growth = k * (p - 1) ** 2
            m = np.stack(m_rows, axis=1)
            cinv = _inv_lower(m[pan_rows, :], pivots, p).astype(dt)
            m[pan_rows, :] = 0
            b = w[pan_rows, hi:]
            b %= p
            x = np.empty_like(b)
            for c0 in range(0, b.shape[1], _CHUNK):
                seg = x[:, c0 : c0 + _CHUNK]
                np.matmul(cinv, b[:, c0 : c0 + _CHUNK], out=seg)
                seg %= p
            for c0 in range(hi, ncols, _CHUNK):
                c1 = min(c0 + _CHUNK, ncols)
                prod = buf.ravel()[: nrows * (c1 - c0)].reshape(nrows, c1 - c0)
                np.matmul(m, x[:, c0 - hi : c1 - hi], out=prod)
                w[:, c0:c1] -= prod
            w[pan_rows, hi:] = x
            bound += growth
        if bound > p - 1:
            w %= p
        if reduced and self.piv_rows:
            self._back_substitute(cap, buf)

    def _back_substitute(self, cap: int, buf: np.ndarray) -> None:
        w, p = self.w, self.p
        dt = w.dtype
        pr, pc = self.piv_rows, self.piv_cols
        bound = p - 1
        for t1 in range(len(pr), 0, -_BWD):
            t0 = max(0, t1 - _BWD)
            rows = pr[t0:t1]
            cols = np.asarray(pc[t0:t1], dtype=np.int64)
            c_first = int(cols[0])
            block = w[rows, c_first:]
            if bound > p - 1:
                block %= p
            # Clear within the block: the pivot submatrix is unit upper
            # triangular, so one small inverse reduces the block rows.
            if len(rows) > 1:
                cinv = _inv_unit_upper(block[:, cols - c_first], p).astype(dt)
                out = np.empty_like(block)
                for c0 in range(0, block.shape[1], _CHUNK):
                    seg = out[:, c0 : c0 + _CHUNK]
                    np.matmul(cinv, block[:, c0 : c0 + _CHUNK], out=seg)
                    seg %= p
                block = out
            w[rows, c_first:] = block
            if t0 == 0:
                continue
            earlier = pr[:t0]
            cmat = w[np.ix_(earlier, cols)]
            if not np.any(cmat):
                continue
            growth = len(rows) * (p - 1) ** 2
            if bound + growth >= cap:
                w %= p
                bound = p - 1
            for c0 in range(c_first, w.shape[1], _CHUNK):
                c1 = min(c0 + _CHUNK, w.shape[1])
                prod = buf.ravel()[: t0 * (c1 - c0)].reshape(t0, c1 - c0)
                np.matmul(cmat, block[:, c0 - c_first : c1 - c_first], out=prod)
                w[earlier, c0:c1] -= prod
            bound += growth
        if bound > p - 1:
            w %= p

    def out(self) -> np.ndarray:
        if self.w.dtype == np.int64:
            return self.w
        return self.w.astype(np.int64)


def _inv_lower(lmat: np.ndarray, diag: list[int], p: int) -> np.ndarray:
    """Inverse mod p of ``strict_lower(lmat) + diag(diag)``."""
    k = len(diag)
    c = np.zeros((k, k), dtype=np.int64)
    li = lmat.astype(np.int64) % p
    for t in range(k):
        s = pow(diag[t], p - 2, p)
        row = np.zeros(k, dtype=np.int64)
        row[t] = 1
        if t:
            row -= li[t, :t] @ c[:t]
        c[t] = row % p * s % p
    return c


def _inv_unit_upper(umat: np.ndarray, p: int) -> np.ndarray:
    """Inverse mod p of an upper triangular matrix with unit diagonal."""
    k = umat.shape[0]
    c = np.zeros((k, k), dtype=np.int64)
    ui = umat.astype(np.int64) % p
    for t in range(k - 1, -1, -1):
        row = np.zeros(k, dtype=np.int64)
        row[t] = 1
        if t < k - 1:
            row -= ui[t, t + 1 :] @ c[t + 1 :]
        c[t] = row % p
    return c


def _echelon_int(a: np.ndarray, p: int, reduced: bool):
    """Unblocked int64 elimination for moduli too large to stage in floats."""
    w = (np.array(a, dtype=np.int64) % p).copy()
    nrows, ncols = w.shape
    used = np.zeros(nrows, dtype=bool)
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    for c in range(ncols):
        cand = np.flatnonzero((w[:, c] != 0) & ~used)
        if cand.size == 0:
            continue
        r = int(cand[0])
        w[r] = w[r] * pow(int(w[r, c]), p - 2, p) % p
        targets = np.flatnonzero(w[:, c] != 0) if reduced else cand
        for i in targets:
            if i != r and (reduced or not used[i]):
                w[i] = (w[i] - w[i, c] * w[r]) % p
        used[r] = True
        piv_rows.append(r)
        piv_cols.append(c)
    return w, piv_rows, piv_cols


def eliminate(a: np.ndarray, p: int, reduced: bool = True, destroy: bool = False) -> _Echelon:
    """Run elimination and hand back the raw state.

    ``a`` may be int64, or already in the staging float dtype for ``p``
    with entries in ``[0, p)``; in the latter case ``destroy=True``
    lets the elimination consume the array without copying it.
    """
    _check_prime(p)
    return _Echelon(np.asarray(a), p, reduced, destroy)


def echelon(a: np.ndarray, p: int, reduced: bool = True):
    """Echelon form of an integer array mod p.

    Returns ``(w, piv_rows, piv_cols)`` with the pivot lists aligned
    and sorted by column.  ``w`` keeps the original row positions; with
    ``reduced=True`` it is the reduced form (use :func:`rref` for rows
    sorted into the conventional order).
    """
    e = _Echelon(np.asarray(a), p, reduced)
    return e.out(), e.piv_rows, e.piv_cols


# ---------------------------------------------------------------------------
# FieldMatrix
# ---------------------------------------------------------------------------


class FieldMatrix:
    """A dense matrix over the prime field with ``p`` elements."""

    __slots__ = ("p", "a")

    def __init__(self, a, p: int, _reduced: bool = False):
        _check_prime(p)
        self.p = p
        if _reduced:
            self.a = a
            return
        arr = np.asarray(a)
        if arr.dtype == object:
            arr = np.array(
                [[int(x) for x in row] for row in arr.tolist()], dtype=np.int64
            )
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got shape {arr.shape}")
        self.a = np.ascontiguousarray(arr.astype(np.int64) % p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FieldMatrix":
        _check_prime(p)
        return cls(np.zeros((rows, cols), dtype=np.int64), p, _reduced=True)

    @classmethod
    def identity(cls, n: int, p: int) -> "FieldMatrix":
        _check_prime(p)
        return cls(np.eye(n, dtype=np.int64), p, _reduced=True)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(np.ascontiguousarray(self.a.T), self.p, _reduced=True)

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.a.copy(), self.p, _reduced=True)

    def _check(self, other: "FieldMatrix") -> None:
        if not isinstance(other, FieldMatrix):
            raise TypeError(f"expected FieldMatrix, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusError(f"mixed moduli {self.p} and {other.p}")

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return FieldMatrix((self.a + other.a) % self.p, self.p, _reduced=True)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return FieldMatrix((self.a - other.a) % self.p, self.p, _reduced=True)

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix((-self.a) % self.p, self.p, _reduced=True)

    def __mul__(self, scalar: int) -> "FieldMatrix":
        return FieldMatrix(
            self.a * (int(scalar) % self.p) % self.p, self.p, _reduced=True
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(matmul_mod(self.a, other.a, self.p), self.p, _reduced=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def is_zero(self) -> bool:
        return not np.any(self.a)

    def __repr__(self) -> str:
        return f"FieldMatrix(p={self.p}, shape={self.a.shape})"


def _unwrap(m: "FieldMatrix") -> tuple[np.ndarray, int]:
    if isinstance(m, FieldMatrix):
        return m.a, m.p
    raise TypeError(f"expected FieldMatrix, got {type(m).__name__}")


def rref(m: FieldMatrix) -> tuple[FieldMatrix, tuple[int, ...]]:
    """Reduced row echelon form, rows sorted by pivot column.

    Returns ``(r, piv_cols)``; ``r`` has the shape of ``m`` with zero
    rows collected at the bottom.
    """
    a, p = _unwrap(m)
    e = _Echelon(a, p, reduced=True)
    out = np.zeros_like(a)
    if e.piv_rows:
        out[: len(e.piv_rows)] = e.w[e.piv_rows].astype(np.int64)
    return FieldMatrix(out, p, _reduced=True), tuple(e.piv_cols)


def rank(m: FieldMatrix) -> int:
    a, p = _unwrap(m)
    if not np.any(a):
        return 0
    return len(_Echelon(a, p, reduced=False).piv_rows)


def nullspace(m: FieldMatrix) -> FieldMatrix:
    """Right nullspace; columns form a basis, one per free column."""
    a, p = _unwrap(m)
    e = _Echelon(a, p, reduced=True)
    return FieldMatrix(nullspace_of(e), p, _reduced=True)


def nullspace_of(e: _Echelon) -> np.ndarray:
    """Right nullspace basis, read off completed reduced elimination state."""
    ncols = e.w.shape[1]
    p = e.p
    pr, pc = e.piv_rows, e.piv_cols
    free = np.setdiff1d(np.arange(ncols), np.asarray(pc, dtype=np.int64))
    basis = np.zeros((ncols, free.size), dtype=np.int64)
    basis[free, np.arange(free.size)] = 1
    if pc:
        block = e.w[np.ix_(pr, free)].astype(np.int64)
        basis[np.asarray(pc, dtype=np.int64)] = (-block) % p
    return basis


def solve(a: FieldMatrix, b: FieldMatrix):
    """A particular solution ``x`` of ``a @ x = b``, or None.

    Free variables are set to zero; ``b`` may have several columns.
    """
    aa, p = _unwrap(a)
    bb, pb = _unwrap(b)
    if pb != p:
        raise ModulusError(f"mixed moduli {p} and {pb}")
    if aa.shape[0] != bb.shape[0]:
        raise ShapeError(f"lhs has {aa.shape[0]} rows, rhs has {bb.shape[0]}")
    n = aa.shape[1]
    e = _Echelon(np.hstack([aa, bb]), p, reduced=True)
    pr, pc = e.piv_rows, e.piv_cols
    if any(c >= n for c in pc):
        return None
    x = np.zeros((n, bb.shape[1]), dtype=np.int64)
    if pc:
        x[np.asarray(pc, dtype=np.int64)] = e.w[
            np.ix_(pr, n + np.arange(bb.shape[1]))
        ].astype(np.int64)
    return FieldMatrix(x, p, _reduced=True)


def inv(m: FieldMatrix) -> FieldMatrix:
    a, p = _unwrap(m)
    n = a.shape[0]
    if n != a.shape[1]:
        raise ShapeError(f"cannot invert a {a.shape} matrix")
    e = _Echelon(np.hstack([a, np.eye(n, dtype=np.int64)]), p, reduced=True)
    pr, pc = e.piv_rows, e.piv_cols
    if len(pc) < n or (pc and pc[-1] >= n):
        raise SingularError("matrix is singular")
    x = np.zeros((n, n), dtype=np.int64)
    x[np.asarray(pc, dtype=np.int64)] = e.w[np.ix_(pr, n + np.arange(n))].astype(
        np.int64
    )
    return FieldMatrix(x, p, _reduced=True)


# ---------------------------------------------------------------------------
# Row space calculus
# ---------------------------------------------------------------------------


def row_space(m: FieldMatrix) -> FieldMatrix:
    """Canonical basis (reduced echelon rows, no zero rows) of the row space."""
    a, p = _unwrap(m)
    if not np.any(a):
        return FieldMatrix(np.zeros((0, a.shape[1]), dtype=np.int64), p, _reduced=True)
    e = _Echelon(a, p, reduced=True)
    return FieldMatrix(e.w[e.piv_rows].astype(np.int64), p, _reduced=True)


def in_row_span(basis: FieldMatrix, vecs: FieldMatrix) -> bool:
    """Whether every row of ``vecs`` lies in the row space of ``basis``."""
    if basis.p != vecs.p:
        raise ModulusError(f"mixed moduli {basis.p} and {vecs.p}")
    if basis.cols != vecs.cols:
        raise ShapeError(f"ambient dims differ: {basis.cols} vs {vecs.cols}")
    stacked = FieldMatrix(np.vstack([basis.a, vecs.a]), basis.p, _reduced=True)
    return rank(stacked) == rank(basis)


def sum_row_spaces(*parts: FieldMatrix) -> FieldMatrix:
    if len({m.p for m in parts}) != 1:
        raise ModulusError("mixed moduli in sum")
    if len({m.cols for m in parts}) != 1:
        raise ShapeError("mixed ambient dimensions in sum")
    return row_space(
        FieldMatrix(np.vstack([m.a for m in parts]), parts[0].p, _reduced=True)
    )


def intersect_row_spaces(u: FieldMatrix, v: FieldMatrix) -> FieldMatrix:
    """Canonical basis of the intersection of two row spaces."""
    if u.p != v.p:
        raise ModulusError(f"mixed moduli {u.p} and {v.p}")
    if u.cols != v.cols:
        raise ShapeError(f"ambient dims differ: {u.cols} vs {v.cols}")
    p = u.p
    if u.rows == 0 or v.rows == 0:
        return FieldMatrix.zeros(0, u.cols, p)
    # x = a @ u = b @ v: read (a, b) off the kernel of [u.T | -v.T].
    ker = nullspace(
        FieldMatrix(np.hstack([u.a.T, (-v.a.T) % p]), p, _reduced=True)
    )
    if ker.cols == 0:
        return FieldMatrix.zeros(0, u.cols, p)
    vecs = matmul_mod(ker.a[: u.rows, :].T, u.a, p)
    return row_space(FieldMatrix(vecs, p, _reduced=True))
