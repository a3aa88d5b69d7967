"""Finitely generated Z/p^n-modules in normal form and their homomorphisms.

A :class:`Shape` ``(l_1 >= ... >= l_r)`` stands for ``Z/p^l_1 + ... + Z/p^l_r``
with its standard generators ``e_j``.  An element is a row of ``r`` integers,
coordinate ``j`` read modulo ``p^l_j``.  A hom ``M -> N`` is an ``r x s`` integer
matrix sending ``e_i`` to row ``i``; entry ``(i, j)`` is stored modulo
``p^mu_j`` and must be divisible by ``p^max(mu_j - l_i, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chainring import RingSpec, Solver, cokernel_shape, kernel, matmul

__all__ = [
    "RingMismatch",
    "Shape",
    "RnHom",
    "direct_sum",
    "tensor_rn",
    "tensor_hom",
    "dual_rn",
    "dual_hom",
    "subquotient",
    "submodule",
    "retraction",
    "scale_columns",
    "shift_matrix",
]


class RingMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Shape:
    ring: RingSpec
    exponents: tuple

    def __post_init__(self):
        ex = tuple(int(e) for e in self.exponents)
        if any(e < 1 or e > self.ring.n for e in ex):
            raise ValueError(f"exponents {ex} outside [1, {self.ring.n}]")
        if list(ex) != sorted(ex, reverse=True):
            raise ValueError(f"exponents {ex} not weakly decreasing")
        object.__setattr__(self, "exponents", ex)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def moduli(self) -> np.ndarray:
        return np.array([self.ring.p**e for e in self.exponents], dtype=np.int64)

    def order(self) -> int:
        return self.ring.p ** sum(self.exponents)

    def length(self) -> int:
        return sum(self.exponents)

    def reduce(self, X) -> np.ndarray:
        """Reduce rows of coordinates into canonical range."""
        X = np.asarray(X, dtype=np.int64)
        if self.rank == 0:
            return X.reshape(X.shape[:-1] + (0,)) if X.ndim else X
        return X % self.moduli

    def identity(self) -> "RnHom":
        return RnHom(self, self, np.eye(self.rank, dtype=np.int64))

    def zero_to(self, other: "Shape") -> "RnHom":
        return RnHom(self, other, np.zeros((self.rank, other.rank), dtype=np.int64))

    def __str__(self):
        return "(" + ",".join(map(str, self.exponents)) + ")"


def shift_matrix(source: Shape, target: Shape) -> np.ndarray:
    """Exponents ``max(mu_j - l_i, 0)``: hom entries must be divisible by ``p`` to these."""
    lam = np.array(source.exponents, dtype=np.int64)
    mu = np.array(target.exponents, dtype=np.int64)
    return np.maximum(mu[None, :] - lam[:, None], 0)


def scale_columns(ring: RingSpec, X, exponents) -> np.ndarray:
    """Multiply column ``j`` by ``p^(n - e_j)``.

    This embeds ``Z/p^e_j`` into ``Z/p^n`` so congruences with mixed moduli become
    plain equations over ``Z/p^n``.
    """
    X = np.asarray(X, dtype=np.int64)
    f = np.array([ring.p ** (ring.n - e) for e in exponents], dtype=np.int64)
    return (X % ring.q) * f % ring.q


@dataclass(frozen=True, eq=False)
class RnHom:
    source: Shape
    target: Shape
    matrix: np.ndarray

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise RingMismatch("hom between modules over different rings")
        C = np.asarray(self.matrix, dtype=np.int64).reshape(self.source.rank, self.target.rank)
        C = self.target.reduce(C)
        if C.size:
            sh = shift_matrix(self.source, self.target)
            p = self.source.ring.p
            if np.any(C % (p**sh) != 0):
                raise ValueError("matrix violates the congruence constraints of the shapes")
        C.setflags(write=False)
        object.__setattr__(self, "matrix", C)

    @property
    def ring(self) -> RingSpec:
        return self.source.ring

    def __matmul__(self, other: "RnHom") -> "RnHom":
        """Composite ``x -> (x self) other`` (row convention)."""
        if self.target != other.source:
            raise ValueError("composition of incompatible homs")
        return RnHom(self.source, other.target, matmul(self.ring, self.matrix, other.matrix))

    def __eq__(self, other):
        return (
            isinstance(other, RnHom)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def apply(self, x) -> np.ndarray:
        return self.target.reduce(matmul(self.ring, np.atleast_2d(x), self.matrix))

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def kernel_rows(self) -> np.ndarray:
        """Rows generating the kernel, as coordinate vectors of the source."""
        ring = self.ring
        if self.source.rank == 0:
            return np.zeros((0, 0), dtype=np.int64)
        if self.target.rank == 0:
            return np.eye(self.source.rank, dtype=np.int64)
        K = kernel(ring, scale_columns(ring, self.matrix, self.target.exponents))
        return self.source.reduce(K)

    def is_injective(self) -> bool:
        return not self.kernel_rows().any()

    def is_surjective(self) -> bool:
        return subquotient(self.target, self.matrix)[0].rank == 0


def _rows(X, r: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64)
    if r == 0:
        return np.zeros((X.shape[0] if X.ndim == 2 else 0, 0), dtype=np.int64)
    return X.reshape(-1, r)


def _check_same_ring(*shapes: Shape):
    rings = {s.ring for s in shapes}
    if len(rings) > 1:
        raise RingMismatch(f"shapes over different rings: {rings}")


def direct_sum(M: Shape, N: Shape):
    """``M + N`` with injections ``(iM, iN)`` and projections ``(pM, pN)``.

    Coordinates of the sum are re-sorted, so the structure maps are permutation
    matrices rather than block inclusions.
    """
    _check_same_ring(M, N)
    ex = list(M.exponents) + list(N.exponents)
    order = sorted(range(len(ex)), key=lambda i: (-ex[i], i))
    S = Shape(M.ring, tuple(ex[i] for i in order))
    P = np.zeros((len(ex), len(ex)), dtype=np.int64)
    for new, old in enumerate(order):
        P[old, new] = 1
    r = M.rank
    iM = RnHom(M, S, P[:r])
    iN = RnHom(N, S, P[r:])
    pM = RnHom(S, M, P[:r].T)
    pN = RnHom(S, N, P[r:].T)
    return S, (iM, iN), (pM, pN)


def tensor_rn(M: Shape, N: Shape):
    """``M (x) N`` and the permutation from lexicographic pair order to sorted order.

    Pair ``(i, j)`` has lexicographic index ``i * N.rank + j`` and exponent
    ``min(l_i, mu_j)``.  Returns ``(shape, perm)`` where sorted coordinate ``t`` is
    lexicographic coordinate ``perm[t]``.
    """
    _check_same_ring(M, N)
    ex = [min(a, b) for a in M.exponents for b in N.exponents]
    perm = sorted(range(len(ex)), key=lambda i: (-ex[i], i))
    return Shape(M.ring, tuple(ex[i] for i in perm)), np.array(perm, dtype=np.int64)


def tensor_hom(f: RnHom, g: RnHom) -> RnHom:
    """``f (x) g`` on the sorted tensor shapes."""
    S, ps = tensor_rn(f.source, g.source)
    T, pt = tensor_rn(f.target, g.target)
    K = np.kron(f.matrix, g.matrix) % f.ring.q
    return RnHom(S, T, K[np.ix_(ps, pt)])


def dual_rn(M: Shape) -> Shape:
    """``Hom(M, Z/p^n)`` has the same shape; generator of the ``j``-th summand is ``e_j -> p^(n-l_j)``."""
    return M


def dual_hom(f: RnHom) -> RnHom:
    """Transpose of ``f`` transported through ``Hom(Z/p^a, Z/p^n) = Z/p^a``."""
    p = f.ring.p
    lam = np.array(f.source.exponents, dtype=np.int64)
    mu = np.array(f.target.exponents, dtype=np.int64)
    C = f.matrix.astype(np.int64)
    d = lam[:, None] - mu[None, :]
    up = np.where(d > 0, C * p ** np.maximum(d, 0), 0)
    down = np.where(d <= 0, C // p ** np.maximum(-d, 0), 0)
    D = (up + down).T
    return RnHom(f.target, f.source, D % f.ring.q)


def subquotient(M: Shape, generators):
    """``M / <generators>``.

    Returns ``(Q, proj, sect)``: the quotient shape, the projection as a matrix
    (rank(M) x rank(Q)), and a section matrix (rank(Q) x rank(M)) lifting
    normal coordinates of ``Q`` back to ``M``.
    """
    ring = M.ring
    if M.rank == 0:
        z = np.zeros((0, 0), dtype=np.int64)
        return M, z, z
    G = _rows(generators, M.rank)
    rel = np.vstack([G % ring.q, np.diag(M.moduli) % ring.q]) if M.rank else G
    d = cokernel_shape(ring, rel, M.rank)
    return Shape(ring, d.exponents), d.proj, d.sect % ring.q


def submodule(M: Shape, generators):
    """Normal form of the submodule of ``M`` generated by rows of ``generators``.

    Returns ``(S, incl, coeff)`` where ``incl`` (rank(S) x rank(M)) is the
    inclusion matrix, and ``coeff`` maps a coefficient vector on the generators
    to normal coordinates of ``S``.
    """
    ring = M.ring
    K = M.reduce(_rows(generators, M.rank))
    if K.shape[0] == 0 or not K.any():
        return Shape(ring, ()), np.zeros((0, M.rank), dtype=np.int64), np.zeros((K.shape[0], 0), dtype=np.int64)
    rel = kernel(ring, scale_columns(ring, K, M.exponents))
    d = cokernel_shape(ring, rel, K.shape[0])
    S = Shape(ring, d.exponents)
    incl = M.reduce(matmul(ring, d.sect, K))
    return S, incl, d.proj


def retraction(f: RnHom) -> RnHom | None:
    """An R-linear ``rho`` with ``f @ rho = id`` if one exists.

    The system decouples by target column, so each column is solved separately.
    """
    ring = f.ring
    M, N = f.source, f.target
    if M.rank == 0:
        return N.zero_to(M)
    if N.rank == 0:
        return None
    sh = shift_matrix(N, M)  # rho: N -> M
    cols = []
    for b in range(M.rank):
        scale = np.array([ring.p ** int(s) for s in sh[:, b]], dtype=np.int64)
        A = (f.matrix.T * scale[:, None]) % ring.q  # unknown y_j, equation a
        A = scale_columns(ring, A, [M.exponents[b]] * M.rank)
        rhs = scale_columns(ring, np.eye(M.rank, dtype=np.int64)[b][None, :], [M.exponents[b]] * M.rank)[0]
        y = Solver(ring, A).solve(rhs)
        if y is None:
            return None
        cols.append(y * scale % ring.q)
    return RnHom(N, M, np.array(cols, dtype=np.int64).T)
