"""Exact linear algebra over the chain ring Z/p^n.

Matrices are plain ``numpy`` int64 arrays whose entries are kept in
``[0, p^n)``.  Vectors are rows and maps act on the right: ``x -> x @ A``.
Because ``p^n < 2**31`` every product of two reduced entries fits in 63 bits,
so all arithmetic is exact word arithmetic with explicit reduction.

The central routine is :func:`howell_form`.  Over a chain ring plain row
echelon form does not determine the row span, but the Howell form does, and it
makes span membership decidable by greedy reduction.  Kernels and solving are
read off the Howell form of an augmented matrix ``[A | I]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "RingSpec",
    "NonUnit",
    "valuation",
    "unit_inverse",
    "matmul",
    "howell_form",
    "kernel",
    "solve",
    "Solver",
    "span_order",
    "Diagonalization",
    "cokernel_shape",
]

_MAX_MODULUS = 2**31


class NonUnit(ArithmeticError):
    """Raised when inverting an element of positive valuation."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class RingSpec:
    """The ring Z/p^n.  ``t = p`` is the uniformiser and ``Z/p`` the residue field."""

    p: int
    n: int
    q: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not _is_prime(int(self.p)):
            raise ValueError(f"p={self.p!r} is not prime")
        if self.n < 1:
            raise ValueError(f"ring length must be positive, got n={self.n}")
        q = int(self.p) ** int(self.n)
        if q >= _MAX_MODULUS:
            raise ValueError(f"p^n = {q} exceeds the desk-scale bound 2^31")
        object.__setattr__(self, "q", q)

    def pow(self, e: int) -> int:
        """``p**e`` clipped to the modulus (``p**e`` for ``e >= n`` is 0 in the ring)."""
        return self.p**e if e < self.n else 0

    def residue(self) -> "RingSpec":
        return RingSpec(self.p, 1)

    def reduce(self, A) -> np.ndarray:
        return np.asarray(A, dtype=np.int64) % self.q


def valuation(ring: RingSpec, x: int) -> int:
    """Largest ``v`` with ``p**v | x``; ``n`` for ``x = 0``."""
    x = int(x) % ring.q
    if x == 0:
        return ring.n
    v = 0
    while x % ring.p == 0:
        x //= ring.p
        v += 1
    return v


def _valuations(ring: RingSpec, xs: np.ndarray) -> np.ndarray:
    """Vectorised :func:`valuation` for an array of reduced entries."""
    xs = np.asarray(xs, dtype=np.int64)
    v = np.zeros(xs.shape, dtype=np.int64)
    cur = xs.copy()
    alive = cur != 0
    v[~alive] = ring.n
    for _ in range(ring.n):
        div = alive & (cur % ring.p == 0)
        if not div.any():
            break
        v[div] += 1
        cur[div] //= ring.p
        alive = div
    return v


def unit_inverse(ring: RingSpec, x: int) -> int:
    x = int(x) % ring.q
    if x % ring.p == 0:
        raise NonUnit(f"{x} is not a unit mod {ring.q}")
    return pow(x, -1, ring.q)


def matmul(ring: RingSpec, A, B) -> np.ndarray:
    """Exact ``A @ B mod p^n`` without int64 overflow."""
    A = np.asarray(A, dtype=np.int64) % ring.q
    B = np.asarray(B, dtype=np.int64) % ring.q
    k = A.shape[-1] if A.ndim else 1
    if (ring.q - 1) ** 2 * max(k, 1) < 2**62:
        return (A @ B) % ring.q
    lo = B & 0xFFFF
    hi = B >> 16
    out = (A @ lo) % ring.q
    out = (out + (((A @ hi) % ring.q) << 16)) % ring.q
    return out


@njit(cache=True)
def _inverse_mod(a, q):
    t, nt, r, nr = 0, 1, q, a % q
    while nr:
        k = r // nr
        t, nt = nt, t - k * nt
        r, nr = nr, r - k * nr
    return t % q


@njit(cache=True)
def _eliminate(buf, m, p, n, q):
    """Pivot loop of the Howell reduction on a work buffer.

    Rows ``[0, m)`` hold the input, the rest is room for annihilator rows.
    Returns the pivot rows (not yet reduced above the pivots), pivot columns
    and pivot valuations.
    """
    total, ncols = buf.shape
    live = np.zeros(total, np.bool_)
    live[:m] = True
    top = m
    H = np.zeros((min(ncols, total), ncols), np.int64)
    pcols = np.empty(ncols, np.int64)
    pvals = np.empty(ncols, np.int64)
    piv = np.empty(ncols, np.int64)
    idx = np.empty(ncols, np.int64)
    k = 0
    for c in range(ncols):
        best = -1
        bestv = n + 1
        for r in range(top):
            if live[r]:
                x = buf[r, c]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < bestv:
                        best = r
                        bestv = v
                        if v == 0:
                            break
        if best < 0:
            continue
        pv = p**bestv
        inv = _inverse_mod(buf[best, c] // pv, q)
        nnz = 0
        for j in range(c, ncols):
            piv[j] = buf[best, j] * inv % q
            if piv[j] != 0:
                idx[nnz] = j
                nnz += 1
        live[best] = False
        for r in range(top):
            if live[r] and buf[r, c] != 0:
                f = buf[r, c] // pv
                for t in range(nnz):
                    j = idx[t]
                    buf[r, j] = (buf[r, j] - f * piv[j]) % q
                nz = False
                for j in range(c + 1, ncols):
                    if buf[r, j] != 0:
                        nz = True
                        break
                if not nz:
                    live[r] = False
        if bestv > 0:
            # p^(n-v) times the pivot row is killed at column c but may survive further right
            a = p ** (n - bestv)
            for j in range(c, ncols):
                buf[top, j] = piv[j] * a % q
            live[top] = True
            top += 1
        for j in range(c, ncols):
            H[k, j] = piv[j]
        pcols[k] = c
        pvals[k] = bestv
        k += 1
    return H[:k], pcols[:k], pvals[:k]


@njit(cache=True)
def _reduce_above(H, pcols, pvals, p, q):
    """Bring entries above each pivot ``p^v`` into ``[0, p^v)``."""
    ncols = H.shape[1]
    for k in range(1, H.shape[0]):
        c = pcols[k]
        pv = p ** pvals[k]
        for i in range(k):
            f = H[i, c] // pv
            if f != 0:
                for j in range(c, ncols):
                    H[i, j] = (H[i, j] - f * H[k, j]) % q


def _echelon(ring: RingSpec, M: np.ndarray):
    """Howell reduction of ``M``.  Returns ``(H, pivot_cols, pivot_vals)``."""
    p, n, q = ring.p, ring.n, ring.q
    M = np.asarray(M, dtype=np.int64) % q
    ncols = M.shape[1] if M.ndim == 2 else 0
    M = M[np.any(M != 0, axis=1)] if M.size else M.reshape(0, ncols)
    m = M.shape[0]
    if m == 0 or ncols == 0:
        return np.zeros((0, ncols), dtype=np.int64), [], []
    # annihilator rows are appended in place; at most one per pivot
    buf = np.zeros((m + ncols, ncols), dtype=np.int64)
    buf[:m] = M
    H, pcols, pvals = _eliminate(buf, m, p, n, q)
    _reduce_above(H, pcols, pvals, p, q)
    return H, [int(c) for c in pcols], [int(v) for v in pvals]


def howell_form(ring: RingSpec, A) -> np.ndarray:
    """Canonical generating matrix of the row span of ``A`` (zero rows dropped)."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    return _echelon(ring, A)[0]


def span_order(ring: RingSpec, A) -> int:
    """Number of elements in the row span of ``A``."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 1
    _, _, pvals = _echelon(ring, A)
    out = 1
    for v in pvals:
        out *= ring.p ** (ring.n - v)
    return out


class Solver:
    """Repeated solving of ``x @ A = b`` for a fixed ``A``.

    Builds the Howell form of ``[A | I]`` once; the rows whose pivot lies in the
    ``A`` block carry their transforms, the remaining rows span the left kernel.
    """

    def __init__(self, ring: RingSpec, A):
        A = np.asarray(A, dtype=np.int64) % ring.q
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        self.ring = ring
        self.shape = A.shape
        r, c = A.shape
        aug = np.hstack([A, np.eye(r, dtype=np.int64)])
        H, pcols, pvals = _echelon(ring, aug)
        split = sum(1 for pc in pcols if pc < c)
        self._rows = H[:split, :c]
        self._trans = H[:split, c:]
        self._pcols = pcols[:split]
        self._pvals = pvals[:split]
        self.kernel = H[split:, c:]

    def reduce(self, b):
        """Greedy reduction of ``b``.  Returns ``(x, residual)`` with ``x @ A + residual = b``."""
        ring = self.ring
        b = np.asarray(b, dtype=np.int64).reshape(-1) % ring.q
        x = np.zeros(self.shape[0], dtype=np.int64)
        for row, tr, c, v in zip(self._rows, self._trans, self._pcols, self._pvals):
            e = int(b[c])
            if e == 0:
                continue
            pv = ring.p**v
            if e % pv:
                break
            s = e // pv
            b = (b - s * row) % ring.q
            x = (x + s * tr) % ring.q
        return x, b

    def solve(self, b):
        """One solution of ``x @ A = b``, or ``None`` when ``b`` is outside the row span."""
        x, res = self.reduce(b)
        if res.any():
            return None
        return x

    def contains(self, b) -> bool:
        return not self.reduce(b)[1].any()


def kernel(ring: RingSpec, A) -> np.ndarray:
    """Howell form of the left kernel ``{x : x @ A = 0}``."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if A.shape[1] == 0:
        return np.eye(A.shape[0], dtype=np.int64)
    return Solver(ring, A).kernel


def solve(ring: RingSpec, A, b):
    """Return one ``x`` with ``x @ A = b`` or ``None`` if there is none."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.shape[0] == 0:
        b = np.asarray(b, dtype=np.int64) % ring.q
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    return Solver(ring, A).solve(b)


@dataclass(frozen=True)
class Diagonalization:
    """Result of :func:`cokernel_shape`.

    ``U @ A @ V`` is diagonal.  ``proj`` (cols x r) sends an original coordinate
    row to normal coordinates; ``sect`` (r x cols) lifts normal coordinates back.
    """

    exponents: tuple
    U: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    proj: np.ndarray
    sect: np.ndarray


def cokernel_shape(ring: RingSpec, A, cols: int | None = None) -> Diagonalization:
    """Shape of ``(Z/p^n)^cols / rowspan(A)`` via diagonalisation ``U A V = D``."""
    p, n, q = ring.p, ring.n, ring.q
    A = np.asarray(A, dtype=np.int64)
    if cols is None:
        cols = A.shape[1]
    A = A.reshape(-1, cols) % q
    m = A.shape[0]
    D = A.copy()
    U = np.eye(m, dtype=np.int64)
    V = np.eye(cols, dtype=np.int64)
    Vinv = np.eye(cols, dtype=np.int64)
    diag = []
    k = 0
    while k < min(m, cols):
        sub = D[k:, k:]
        nz = np.argwhere(sub != 0)
        if nz.size == 0:
            break
        vals = _valuations(ring, sub[nz[:, 0], nz[:, 1]])
        j = int(np.argmin(vals))
        v = int(vals[j])
        i0, j0 = int(nz[j, 0]) + k, int(nz[j, 1]) + k
        if i0 != k:
            D[[k, i0]] = D[[i0, k]]
            U[[k, i0]] = U[[i0, k]]
        if j0 != k:
            D[:, [k, j0]] = D[:, [j0, k]]
            V[:, [k, j0]] = V[:, [j0, k]]
            Vinv[[k, j0]] = Vinv[[j0, k]]
        pv = p**v
        unit = int(D[k, k]) // pv
        if unit != 1:
            inv = pow(unit, -1, q)
            D[k] = (D[k] * inv) % q
            U[k] = (U[k] * inv) % q
        below = np.flatnonzero(D[k + 1:, k]) + k + 1
        if below.size:
            f = D[below, k] // pv
            D[below] = (D[below] - f[:, None] * D[k][None, :]) % q
            U[below] = (U[below] - f[:, None] * U[k][None, :]) % q
        right = np.flatnonzero(D[k, k + 1:]) + k + 1
        if right.size:
            f = D[k, right] // pv
            D[:, right] = (D[:, right] - D[:, [k]] * f[None, :]) % q
            V[:, right] = (V[:, right] - V[:, [k]] * f[None, :]) % q
            Vinv[k] = (Vinv[k] + matmul(ring, f[None, :], Vinv[right])[0]) % q
        diag.append(v)
        k += 1
    exps = diag + [n] * (cols - len(diag))
    order = sorted((e, i) for i, e in enumerate(exps) if e > 0)
    order = [i for _, i in sorted(order, key=lambda t: (-t[0], t[1]))]
    exponents = tuple(exps[i] for i in order)
    proj = V[:, order] if order else np.zeros((cols, 0), dtype=np.int64)
    sect = Vinv[order] if order else np.zeros((0, cols), dtype=np.int64)
    if exponents:
        mod = np.array([p**e for e in exponents], dtype=np.int64)
        proj = proj % mod[None, :]
    return Diagonalization(exponents, U, V, Vinv, proj, sect)
