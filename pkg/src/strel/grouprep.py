"""Modules over the group algebras A_m = (Z/p^m)G.

A :class:`GModule` is a :class:`~strel.rnmod.Shape` together with one matrix
per group generator.  Group elements act on the right of coordinate rows,
``x -> x @ action(g)``, so ``action(g) @ action(h) == action(g*h)``.

Every module is kept in normal form: exponents sorted, hom entries reduced.
Constructions that naturally produce a presentation (cokernels, kernels,
induced modules) normalise through :func:`strel.chainring.cokernel_shape`.
The *level* ``m`` records which A_m the module was built over; exponents never
exceed it.  Homs and isomorphisms ignore the level because A_m-modules embed
fully faithfully into A_n-modules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .chainring import RingSpec, Solver, howell_form, kernel, matmul
from .groups import FiniteGroup
from .rnmod import (
    RnHom,
    Shape,
    dual_hom,
    retraction,
    scale_columns,
    shift_matrix,
    submodule,
    subquotient,
)

__all__ = [
    "LevelOutOfRange",
    "LevelMismatch",
    "GroupMismatch",
    "GModule",
    "GHom",
    "SES",
    "StandardModules",
    "standard_modules",
    "trivial",
    "regular",
    "free",
    "induce",
    "ind_res",
    "cosyzygy_of_k",
    "W",
    "restrict",
    "direct_sum_g",
    "tensor_g",
    "tensor_ghom",
    "base_change",
    "base_change_hom",
    "unit_map",
    "embed",
    "dual_g",
    "dual_ghom",
    "submodule_g",
    "quotient_g",
    "kernel_g",
    "cokernel_g",
    "image_g",
    "fixed_points",
    "mult_functor",
    "mult_functor_hom",
    "functor_F",
    "magic_sequence",
    "hom_space",
    "Verdict",
    "IsoResult",
    "is_isomorphic",
    "random_hom",
    "random_module",
    "g_closure",
]


class LevelOutOfRange(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


class GroupMismatch(ValueError):
    pass


def _reduce(X, exponents, p) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64)
    if len(exponents) == 0:
        return X
    return X % np.array([p**e for e in exponents], dtype=np.int64)


class GModule:
    """An A_m-module in normal form.

    ``action`` holds one matrix per entry of ``group.generators``; the action of
    every group element is completed breadth-first and checked against the
    Cayley table on construction.
    """

    __slots__ = ("ring", "level", "group", "shape", "action", "__dict__")

    def __init__(self, ring: RingSpec, level: int, group: FiniteGroup, shape: Shape, action):
        if not 0 <= level <= ring.n:
            raise LevelOutOfRange(f"level {level} outside [0, {ring.n}]")
        if shape.ring != ring:
            raise ValueError("shape is over a different ring")
        if shape.exponents and shape.exponents[0] > level:
            raise LevelOutOfRange(f"shape {shape} does not live at level {level}")
        action = [np.asarray(a, dtype=np.int64).reshape(shape.rank, shape.rank) for a in action]
        if len(action) != len(group.generators):
            raise ValueError("need one action matrix per generator")
        mats = []
        for a in action:
            m = RnHom(shape, shape, a).matrix
            mats.append(m)
        self.ring = ring
        self.level = level
        self.group = group
        self.shape = shape
        self.action = tuple(mats)
        self._complete()

    def _complete(self):
        ring, G, r = self.ring, self.group, self.rank
        full = [None] * G.order
        full[0] = np.eye(r, dtype=np.int64)
        for x, y, gi in G.words():
            full[x] = self._red(matmul(ring, full[y], self.action[gi]))
        for x in range(G.order):
            for gi, g in enumerate(G.generators):
                lhs = self._red(matmul(ring, full[x], self.action[gi]))
                if not np.array_equal(lhs, full[G.mul(x, g)]):
                    raise ValueError("action matrices violate the group relations")
        for m in full:
            m.setflags(write=False)
        self.__dict__["_full"] = tuple(full)

    def _red(self, X) -> np.ndarray:
        return _reduce(X, self.shape.exponents, self.ring.p)

    @property
    def rank(self) -> int:
        return self.shape.rank

    @property
    def exponents(self) -> tuple:
        return self.shape.exponents

    def act(self, g: int) -> np.ndarray:
        """Matrix of group element ``g``."""
        return self._full[g]

    @property
    def matrices(self) -> tuple:
        return self._full

    def order(self) -> int:
        return self.shape.order()

    def is_zero(self) -> bool:
        return self.rank == 0

    def identity(self) -> "GHom":
        return GHom(self, self, np.eye(self.rank, dtype=np.int64))

    def zero_to(self, other: "GModule") -> "GHom":
        return GHom(self, other, np.zeros((self.rank, other.rank), dtype=np.int64))

    def __eq__(self, other):
        return (
            isinstance(other, GModule)
            and self.ring == other.ring
            and self.level == other.level
            and self.group == other.group
            and self.shape == other.shape
            and all(np.array_equal(a, b) for a, b in zip(self.action, other.action))
        )

    def __hash__(self):
        return hash((self.ring, self.level, self.shape, tuple(a.tobytes() for a in self.action)))

    def __repr__(self):
        return f"GModule(p={self.ring.p}, n={self.ring.n}, level={self.level}, shape={self.shape})"


class GHom:
    """Equivariant hom ``source -> target`` (row convention, ``x -> x @ matrix``)."""

    def __init__(self, source: GModule, target: GModule, matrix, check: bool = True):
        if source.group != target.group:
            raise GroupMismatch("homomorphism between modules for different groups")
        self.source = source
        self.target = target
        self.underlying = RnHom(source.shape, target.shape, matrix)
        if check:
            ring = source.ring
            C = self.underlying.matrix
            for A, B in zip(source.action, target.action):
                lhs = target._red(matmul(ring, A, C))
                rhs = target._red(matmul(ring, C, B))
                if not np.array_equal(lhs, rhs):
                    raise ValueError("matrix is not G-equivariant")

    @property
    def matrix(self) -> np.ndarray:
        return self.underlying.matrix

    def __matmul__(self, other: "GHom") -> "GHom":
        if self.target.shape != other.source.shape:
            raise ValueError("composition of incompatible homs")
        return GHom(self.source, other.target, (self.underlying @ other.underlying).matrix, check=False)

    def __add__(self, other: "GHom") -> "GHom":
        return GHom(self.source, self.target, self.matrix + other.matrix, check=False)

    def __neg__(self) -> "GHom":
        return GHom(self.source, self.target, -self.matrix, check=False)

    def scale(self, c: int) -> "GHom":
        return GHom(self.source, self.target, self.matrix * int(c) % self.source.ring.q, check=False)

    def __eq__(self, other):
        return isinstance(other, GHom) and self.underlying == other.underlying

    def __hash__(self):
        return hash(self.underlying)

    def is_zero(self) -> bool:
        return self.underlying.is_zero()

    def __repr__(self):
        return f"GHom({self.source.shape} -> {self.target.shape})"


@dataclass
class SES:
    """Short exact sequence ``0 -> A --i--> B --q--> C -> 0`` with optional R-splitting."""

    i: GHom
    q: GHom
    witness: RnHom | None = None

    @property
    def sub(self) -> GModule:
        return self.i.source

    @property
    def middle(self) -> GModule:
        return self.i.target

    @property
    def quotient(self) -> GModule:
        return self.q.target

    def is_exact(self) -> bool:
        if not (self.i.underlying.is_injective() and self.q.underlying.is_surjective()):
            return False
        if not (self.i @ self.q).is_zero():
            return False
        return self.sub.order() * self.quotient.order() == self.middle.order()

    def witness_valid(self) -> bool:
        if self.witness is None:
            return False
        return self.i.underlying @ self.witness == self.sub.shape.identity()


# -- normal-form helpers -------------------------------------------------------------


def _make(ring, level, group, exps, actions):
    """Sort coordinates by exponent; returns ``(module, perm)`` with new coord ``t`` = old ``perm[t]``."""
    exps = [int(e) for e in exps]
    perm = np.array(sorted(range(len(exps)), key=lambda i: (-exps[i], i)), dtype=np.int64)
    shape = Shape(ring, tuple(exps[i] for i in perm))
    acts = [np.asarray(a, dtype=np.int64)[np.ix_(perm, perm)] for a in actions]
    return GModule(ring, level, group, shape, acts), perm


def _from_action_of_elements(ring, level, group, exps, element_matrix):
    """Build a module from a function giving the matrix of each generator."""
    acts = [element_matrix(g) for g in group.generators]
    return _make(ring, level, group, exps, acts)


def _check_level(ring: RingSpec, m: int, low: int = 1):
    if not low <= m <= ring.n:
        raise LevelOutOfRange(f"level {m} outside [{low}, {ring.n}]")


# -- standard modules ----------------------------------------------------------------


def trivial(ring: RingSpec, group: FiniteGroup, m: int) -> GModule:
    """R_m with trivial action (``trivial(ring, G, 1)`` is k)."""
    _check_level(ring, m, low=0)
    if m == 0:
        return GModule(ring, 0, group, Shape(ring, ()), [np.zeros((0, 0))] * len(group.generators))
    one = np.ones((1, 1), dtype=np.int64)
    return GModule(ring, m, group, Shape(ring, (m,)), [one] * len(group.generators))


def _perm_matrix(group: FiniteGroup, g: int) -> np.ndarray:
    m = group.order
    P = np.zeros((m, m), dtype=np.int64)
    P[np.arange(m), group.table[:, g]] = 1
    return P


def free(ring: RingSpec, group: FiniteGroup, m: int, copies: int = 1) -> GModule:
    """``A_m`` to the power ``copies``; coordinate ``t*|G| + h`` is ``h`` in copy ``t``."""
    _check_level(ring, m, low=0)
    if m == 0 or copies == 0:
        return trivial(ring, group, 0) if m == 0 else GModule(
            ring, m, group, Shape(ring, ()), [np.zeros((0, 0))] * len(group.generators))
    eye = np.eye(copies, dtype=np.int64)
    acts = [np.kron(eye, _perm_matrix(group, g)) for g in group.generators]
    return GModule(ring, m, group, Shape(ring, (m,) * (copies * group.order)), acts)


def regular(ring: RingSpec, group: FiniteGroup, m: int) -> GModule:
    """The group algebra A_m acting on itself by right multiplication (A_0 = 0)."""
    return free(ring, group, m, 1)


def induce(N: Shape, group: FiniteGroup, level: int | None = None):
    """``N (x) RG``.  Returns ``(module, perm)``; unsorted coordinate ``h*rank + j`` is ``e_j (x) h``."""
    ring = N.ring
    if level is None:
        level = N.exponents[0] if N.rank else 0
    exps = [e for _ in range(group.order) for e in N.exponents]
    eye = np.eye(N.rank, dtype=np.int64)
    return _from_action_of_elements(
        ring, level, group, exps, lambda g: np.kron(_perm_matrix(group, g), eye)
    )


def ind_res(M: GModule):
    """``Ind Res M`` with its unit ``M -> Ind Res M`` and counit ``Ind Res M -> M``.

    The unit is ``m -> sum_g m g^-1 (x) g`` and the counit ``m (x) h -> m h``.
    """
    G, r = M.group, M.rank
    I, perm = induce(M.shape, G, M.level)
    U = np.zeros((r, G.order * r), dtype=np.int64)
    E = np.zeros((G.order * r, r), dtype=np.int64)
    for g in range(G.order):
        U[:, g * r:(g + 1) * r] = M.act(G.inverse(g))
        E[g * r:(g + 1) * r, :] = M.act(g)
    unit = GHom(M, I, U[:, perm])
    counit = GHom(I, M, E[perm, :])
    return I, unit, counit


def cosyzygy_of_k(ring: RingSpec, group: FiniteGroup, i: int):
    """``W_i``: cokernel of ``k -> A_i``, ``1 -> p^(i-1) * sum_g g``.  Returns ``(W_i, inclusion, projection)``."""
    _check_level(ring, i)
    A = regular(ring, group, i)
    k = trivial(ring, group, 1)
    norm = GHom(k, A, np.full((1, group.order), ring.p ** (i - 1), dtype=np.int64))
    Wi, proj, _ = cokernel_g(norm)
    return Wi, norm, proj


def W(ring: RingSpec, group: FiniteGroup, i: int) -> GModule:
    return cosyzygy_of_k(ring, group, i)[0]


@dataclass(frozen=True)
class StandardModules:
    """Constructors bound to one ring and group."""

    ring: RingSpec
    group: FiniteGroup

    def trivial(self, m: int) -> GModule:
        return trivial(self.ring, self.group, m)

    def regular(self, m: int) -> GModule:
        return regular(self.ring, self.group, m)

    def induce(self, N: Shape, level: int | None = None) -> GModule:
        return induce(N, self.group, level)[0]

    def W(self, i: int) -> GModule:
        return W(self.ring, self.group, i)

    def k(self) -> GModule:
        return trivial(self.ring, self.group, 1)

    def unit(self) -> GModule:
        return trivial(self.ring, self.group, self.ring.n)


def standard_modules(ring: RingSpec, group: FiniteGroup) -> StandardModules:
    return StandardModules(ring, group)


def restrict(M: GModule) -> Shape:
    return M.shape


# -- sums, tensors, base change --------------------------------------------------------


def _same_group(M: GModule, N: GModule):
    if M.group != N.group:
        raise GroupMismatch("modules for different groups")
    if M.ring != N.ring:
        raise ValueError("modules over different rings")


def direct_sum_g(M: GModule, N: GModule):
    """``M + N`` with injections and projections (as GHoms)."""
    _same_group(M, N)
    r, s = M.rank, N.rank
    acts = []
    for A, B in zip(M.action, N.action):
        Z = np.zeros((r + s, r + s), dtype=np.int64)
        Z[:r, :r] = A
        Z[r:, r:] = B
        acts.append(Z)
    S, perm = _make(M.ring, max(M.level, N.level), M.group, list(M.exponents) + list(N.exponents), acts)
    P = np.eye(r + s, dtype=np.int64)[:, perm]
    iM, iN = GHom(M, S, P[:r], check=False), GHom(N, S, P[r:], check=False)
    pM, pN = GHom(S, M, P[:r].T, check=False), GHom(S, N, P[r:].T, check=False)
    return S, (iM, iN), (pM, pN)


def direct_sum_many(modules, ring=None, group=None) -> GModule:
    modules = list(modules)
    if not modules:
        return trivial(ring, group, 0)
    out = modules[0]
    for X in modules[1:]:
        out = direct_sum_g(out, X)[0]
    return out


def tensor_g(M: GModule, N: GModule) -> GModule:
    """``M (x)_R N`` with the diagonal action; level is the smaller of the two."""
    return _tensor(M, N)[0]


def _tensor(M: GModule, N: GModule):
    _same_group(M, N)
    exps = [min(a, b) for a in M.exponents for b in N.exponents]
    acts = [np.kron(A, B) % M.ring.q for A, B in zip(M.action, N.action)]
    return _make(M.ring, min(M.level, N.level), M.group, exps, acts)


def tensor_ghom(f: GHom, g: GHom) -> GHom:
    S, ps = _tensor(f.source, g.source)
    T, pt = _tensor(f.target, g.target)
    K = np.kron(f.matrix, g.matrix) % f.source.ring.q
    return GHom(S, T, K[np.ix_(ps, pt)], check=False)


def base_change(M: GModule, m: int) -> GModule:
    """``M (x)_R R_m`` for ``m <= level(M)``: exponents clipped to ``m``."""
    if not 0 <= m <= M.level:
        raise LevelOutOfRange(f"cannot base change level {M.level} module to level {m}")
    if m == M.level:
        return M
    exps = tuple(min(e, m) for e in M.exponents) if m > 0 else ()
    if m == 0:
        return trivial(M.ring, M.group, 0)
    shape = Shape(M.ring, exps)
    return GModule(M.ring, m, M.group, shape, [_reduce(a, exps, M.ring.p) for a in M.action])


def base_change_hom(f: GHom, m: int) -> GHom:
    return GHom(base_change(f.source, m), base_change(f.target, m), f.matrix, check=False)


def unit_map(M: GModule, m: int) -> GHom:
    """The quotient ``M -> M (x) R_m``."""
    B = base_change(M, m)
    if B.rank == 0:
        return M.zero_to(B)
    return GHom(M, B, np.eye(M.rank, dtype=np.int64), check=False)


def embed(M: GModule, level: int) -> GModule:
    """View an A_m-module as an A_level-module (``level >= m``) through A_level -> A_m."""
    if level < M.level:
        raise LevelOutOfRange("embedding can only raise the level")
    _check_level(M.ring, level, low=0)
    return GModule(M.ring, level, M.group, M.shape, M.action)


# -- duals -------------------------------------------------------------------------


def dual_g(M: GModule) -> GModule:
    """``Hom_R(M, R_n)`` with ``(phi g)(m) = phi(m g^-1)``."""
    G = M.group
    acts = [dual_hom(RnHom(M.shape, M.shape, M.act(G.inverse(g)))).matrix for g in G.generators]
    return GModule(M.ring, M.level, G, M.shape, acts)


def dual_ghom(f: GHom) -> GHom:
    return GHom(dual_g(f.target), dual_g(f.source), dual_hom(f.underlying).matrix)


# -- sub- and quotient modules ---------------------------------------------------------


def submodule_g(M: GModule, generators):
    """Submodule generated (over R) by G-stable rows.  Returns ``(S, inclusion)``."""
    S_shape, incl, _ = submodule(M.shape, generators)
    ring = M.ring
    if S_shape.rank == 0:
        S = GModule(ring, M.level, M.group, S_shape, [np.zeros((0, 0))] * len(M.action))
        return S, GHom(S, M, np.zeros((0, M.rank), dtype=np.int64), check=False)
    solver = Solver(ring, scale_columns(ring, incl, M.exponents))
    acts = []
    for A in M.action:
        img = scale_columns(ring, matmul(ring, incl, A), M.exponents)
        rows = []
        for b in img:
            y = solver.solve(b)
            if y is None:
                raise ValueError("generators do not span a G-stable submodule")
            rows.append(y)
        acts.append(_reduce(np.array(rows), S_shape.exponents, ring.p))
    S = GModule(ring, M.level, M.group, S_shape, acts)
    return S, GHom(S, M, incl)


def quotient_g(M: GModule, generators):
    """``M / <generators>`` for a G-stable set.  Returns ``(Q, projection, section)``.

    ``section`` is an R-linear lift of normal coordinates of ``Q`` to ``M``
    (a plain matrix, not a GHom).
    """
    ring = M.ring
    Q_shape, proj, sect = subquotient(M.shape, generators)
    acts = [matmul(ring, matmul(ring, sect, A), proj) for A in M.action]
    Q = GModule(ring, M.level, M.group, Q_shape, [_reduce(a, Q_shape.exponents, ring.p) for a in acts])
    return Q, GHom(M, Q, proj), sect


def kernel_g(f: GHom):
    return submodule_g(f.source, f.underlying.kernel_rows())


def cokernel_g(f: GHom):
    return quotient_g(f.target, f.matrix)


def image_g(f: GHom):
    return submodule_g(f.target, f.matrix)


def fixed_points(M: GModule) -> Shape:
    """Shape of ``M^G``; an isomorphism invariant."""
    if M.rank == 0:
        return M.shape
    ring = M.ring
    eye = np.eye(M.rank, dtype=np.int64)
    blocks = [scale_columns(ring, (A - eye) % ring.q, M.exponents) for A in M.action]
    K = kernel(ring, np.hstack(blocks))
    return submodule(M.shape, M.shape.reduce(K))[0]


# -- multiplication functor and F ------------------------------------------------------


def _mult_coords(M: GModule, k: int):
    return [j for j, e in enumerate(M.exponents) if e > k]


def mult_functor(M: GModule, k: int) -> GModule:
    """``p^k M`` as a module over A_(level-k); basis ``p^k e_j`` for ``l_j > k``."""
    if not 0 <= k < M.ring.n:
        raise LevelOutOfRange(f"multiplier exponent {k} outside [0, {M.ring.n})")
    keep = _mult_coords(M, k)
    exps = tuple(M.exponents[j] - k for j in keep)
    shape = Shape(M.ring, exps)
    acts = [_reduce(A[np.ix_(keep, keep)], exps, M.ring.p) for A in M.action]
    return GModule(M.ring, max(M.level - k, 0), M.group, shape, acts)


def mult_functor_hom(f: GHom, k: int) -> GHom:
    """Restriction of ``f`` to ``p^k source -> p^k target``."""
    S, T = mult_functor(f.source, k), mult_functor(f.target, k)
    C = f.matrix[np.ix_(_mult_coords(f.source, k), _mult_coords(f.target, k))]
    return GHom(S, T, C, check=False)


def functor_F(X: GModule, with_generators: bool = False):
    """``F X``: the cosyzygy over A_n of the syzygy over A_1 of a kG-module ``X``.

    Uses the coordinate free cover ``A_1^r -> X`` (``r`` = dimension of ``X``),
    embeds ``A_1^r`` as ``p^(n-1) A_n^r`` and returns the quotient of ``A_n^r``.
    With ``with_generators`` also returns the images of the ``r`` free
    generators, which form a free basis of ``F X (x) R_(n-1)``.
    """
    if X.level != 1:
        raise LevelMismatch(f"functor_F expects a level-1 module, got level {X.level}")
    ring, G, r = X.ring, X.group, X.rank
    n = ring.n
    if r == 0:
        Z = GModule(ring, n, G, Shape(ring, ()), [np.zeros((0, 0))] * len(G.generators))
        return (Z, np.zeros((0, 0), dtype=np.int64)) if with_generators else Z
    cover_src = free(ring, G, 1, r)
    C = np.zeros((r * G.order, r), dtype=np.int64)
    for t in range(r):
        for h in range(G.order):
            C[t * G.order + h] = X.act(h)[t]
    cover = GHom(cover_src, X, C)
    K = cover.underlying.kernel_rows() % ring.p
    big = free(ring, G, n, r)
    FX, proj, _ = quotient_g(big, K * ring.p ** (n - 1) % ring.q)
    if with_generators:
        return FX, proj.matrix[:: G.order].copy()
    return FX


# -- the R-split sequence 0 -> R_(m-1) -> W_m -> cosyzygy of R_m -> 0 ------------------


def magic_sequence(ring: RingSpec, group: FiniteGroup, m: int) -> SES:
    """R-split sequence ``0 -> R_(m-1) -> W_m -> Q -> 0``, built by dualising.

    Inside ``A_m`` take ``Omega k`` (augmentation in ``pR_m``) and the surjection
    ``phi: Omega k -> R_(m-1)``, ``x -> (sum of coefficients)/p``.  Its kernel is
    the augmentation ideal.  Applying ``Hom_R(-, R)`` reverses the sequence.
    """
    if not 2 <= m <= ring.n:
        raise LevelOutOfRange(f"magic sequence needs 2 <= m <= n, got m={m}")
    p = ring.p
    A = regular(ring, group, m)
    k = trivial(ring, group, 1)
    aug = GHom(A, k, np.ones((group.order, 1), dtype=np.int64))
    omega_k, incl = kernel_g(aug)
    sums = matmul(ring, incl.matrix, np.ones((group.order, 1), dtype=np.int64)) % p**m
    if np.any(sums % p):
        raise AssertionError("Omega k is not inside the augmentation preimage of pR")
    Rm1 = trivial(ring, group, m - 1)
    phi = GHom(omega_k, Rm1, (sums // p) % p ** (m - 1))
    omega_R, incl2 = kernel_g(phi)
    i = dual_ghom(phi)
    q = dual_ghom(incl2)
    ses = SES(i, q)
    ses.witness = retraction(i.underlying)
    return ses


# -- hom spaces and isomorphism --------------------------------------------------------


def hom_space(M: GModule, N: GModule) -> list:
    """Generators of ``Hom_G(M, N)`` as an R-module, in Howell-canonical order."""
    _same_group(M, N)
    ring = M.ring
    p, q = ring.p, ring.q
    r, s = M.rank, N.rank
    if r == 0 or s == 0:
        return []
    sh = shift_matrix(M.shape, N.shape).reshape(-1)
    row_scale = p**sh
    eq_exps = list(N.exponents) * r
    blocks = []
    Ir, Is = np.eye(r, dtype=np.int64), np.eye(s, dtype=np.int64)
    for A, B in zip(M.action, N.action):
        coef = (np.kron(A.T, Is) - np.kron(Ir, B)) % q
        blocks.append(scale_columns(ring, coef, eq_exps))
    if blocks:
        T = np.hstack(blocks) * row_scale[:, None] % q
        Y = kernel(ring, T)
    else:
        Y = np.eye(r * s, dtype=np.int64)
    H = Y * row_scale[None, :] % q
    H = howell_form(ring, scale_columns(ring, H, eq_exps))
    div = np.array([p ** (ring.n - e) for e in eq_exps], dtype=np.int64)
    out = []
    for row in H:
        C = (row // div).reshape(r, s)
        out.append(GHom(M, N, C, check=False))
    return out


def g_closure(M: GModule, rows) -> np.ndarray:
    """All translates ``x g`` of the given rows; they span the A-submodule the rows generate."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    return M._red(np.vstack([matmul(M.ring, rows, A) for A in M.matrices]))


def random_module(ring: RingSpec, group: FiniteGroup, rng, level: int | None = None,
                  copies: int = 1, relations: int = 1) -> GModule:
    """Quotient of ``A_level^copies`` by the submodule generated by random elements.

    Each relation is scaled by a random power of ``p`` so all levels of
    torsion show up.  ``level`` defaults to a random value in ``1..n``.
    """
    m = int(rng.integers(1, ring.n + 1)) if level is None else level
    F = free(ring, group, m, copies)
    rows = rng.integers(0, ring.p**m, size=(relations, F.rank))
    rows = rows * ring.p ** rng.integers(0, m, size=(relations, 1))
    return quotient_g(F, g_closure(F, rows))[0]


def random_hom(M: GModule, N: GModule, rng, gens=None) -> GHom:
    gens = hom_space(M, N) if gens is None else gens
    C = np.zeros((M.rank, N.rank), dtype=np.int64)
    for h in gens:
        C = (C + int(rng.integers(0, M.ring.q)) * h.matrix) % M.ring.q
    return GHom(M, N, C, check=False)


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass
class IsoResult:
    status: Verdict
    witness: GHom | None = None
    reason: str = ""

    def __bool__(self):
        return self.status is Verdict.YES


def _is_invertible(f: GHom) -> bool:
    """Nakayama: a hom between modules of equal shape is bijective iff it is onto mod p."""
    M, N = f.source, f.target
    if M.shape != N.shape:
        return False
    if M.rank == 0:
        return True
    res = RingSpec(M.ring.p, 1)
    return howell_form(res, f.matrix % M.ring.p).shape[0] == M.rank


def _combine(gens, coeffs, M, N, q):
    C = np.zeros((M.rank, N.rank), dtype=np.int64)
    for c, h in zip(coeffs, gens):
        if c:
            C = (C + int(c) * h.matrix) % q
    return GHom(M, N, C, check=False)


def is_isomorphic(M: GModule, N: GModule, seed: int = 0, budget: int = 64, cap: int = 4096) -> IsoResult:
    """Semi-decision for ``M = N`` as G-modules.

    ``NO`` only on a proven invariant mismatch; ``YES`` only with an invertible
    equivariant witness.  Random R-combinations of hom-space generators are
    tried ``budget`` times, then all combinations with coefficients below ``p``
    if there are at most ``cap`` of them.
    """
    _same_group(M, N)
    if M.shape != N.shape:
        return IsoResult(Verdict.NO, reason=f"shapes differ: {M.shape} vs {N.shape}")
    if M.rank == 0:
        return IsoResult(Verdict.YES, M.zero_to(N))
    fM, fN = fixed_points(M), fixed_points(N)
    if fM != fN:
        return IsoResult(Verdict.NO, reason=f"fixed points differ: {fM} vs {fN}")
    gens = hom_space(M, N)
    if not gens:
        return IsoResult(Verdict.NO, reason="no nonzero homomorphisms")
    q, p = M.ring.q, M.ring.p
    for h in gens:
        if _is_invertible(h):
            return IsoResult(Verdict.YES, h)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        f = _combine(gens, rng.integers(0, q, size=len(gens)), M, N, q)
        if _is_invertible(f):
            return IsoResult(Verdict.YES, f)
    if p ** len(gens) <= cap:
        for coeffs in itertools.product(range(p), repeat=len(gens)):
            f = _combine(gens, coeffs, M, N, q)
            if _is_invertible(f):
                return IsoResult(Verdict.YES, f)
        # every hom is congruent mod the radical to one of these, and invertibility
        # is decided mod p, so exhausting them proves non-isomorphism
        return IsoResult(Verdict.NO, reason="exhaustive search over residues found no isomorphism")
    return IsoResult(Verdict.UNKNOWN, reason="search budget exhausted")
