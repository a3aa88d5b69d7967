"""Supports along the chain of levels and the primes ``P_(i,n)`` for cyclic groups of prime order.

For ``X`` over A_n and a level ``i``, put ``Y = X (x) R_i``.  The ``i``-th
component of ``X`` vanishes iff the unit ``Y -> Y (x) R_(i-1)`` is a stable
isomorphism (for ``i = 1``: iff ``Y`` is stably zero).  The module
:func:`component_obstruction` is the fiber of that unit; it is stably zero
exactly when the unit is invertible, and :func:`support` uses the cheaper
invertibility test directly.

For ``G = C_p`` the n-point support computed here is the support in the
spectrum; for other groups it is reported as ``coarse``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grouprep import GModule, W, base_change, embed, mult_functor, tensor_g, unit_map
from .stable import cone, desuspend, is_stably_iso, is_stably_zero

__all__ = [
    "IndexOutOfRange",
    "NotCyclicPrime",
    "SupportSet",
    "PrimeDescriptor",
    "Spectrum",
    "component_obstruction",
    "component_vanishes",
    "support",
    "in_prime",
    "residue_model",
    "spc_points",
]


class IndexOutOfRange(ValueError):
    pass


class NotCyclicPrime(ValueError):
    pass


@dataclass(frozen=True)
class SupportSet:
    n: int
    members: frozenset
    exact: bool = True

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        if not members <= set(range(1, self.n + 1)):
            raise IndexOutOfRange(f"support {sorted(members)} not inside 1..{self.n}")
        object.__setattr__(self, "members", members)

    @property
    def label(self) -> str:
        return "exact" if self.exact else "coarse"

    def __contains__(self, i):
        return i in self.members

    def __str__(self):
        return "{" + ",".join(map(str, sorted(self.members))) + "} (" + self.label + ")"


@dataclass(frozen=True)
class PrimeDescriptor:
    """The prime generated by ``W_1, ..., W_n`` with ``W_i`` left out."""

    i: int
    n: int
    generators: tuple = field(repr=False)

    @property
    def generator_indices(self) -> tuple:
        return tuple(j for j in range(1, self.n + 1) if j != self.i)

    def __str__(self):
        gens = ",".join(f"W_{j}" for j in self.generator_indices)
        return f"P_{self.i},{self.n} = <{gens}>"


@dataclass
class Spectrum:
    points: list
    orthogonality: dict
    topology: str = "discrete"

    def verified(self) -> bool:
        return all(self.orthogonality.values())


def _check_index(X: GModule, i: int):
    if not 1 <= i <= X.ring.n:
        raise IndexOutOfRange(f"index {i} outside 1..{X.ring.n}")


def _at_level(X: GModule, i: int) -> GModule:
    """``X (x) R_i``; modules living below level ``i`` are just relabelled."""
    return base_change(X, i) if i <= X.level else embed(X, i)


def component_obstruction(X: GModule, i: int) -> GModule:
    """Fiber of ``Y -> Y (x) R_(i-1)`` for ``Y = X (x) R_i`` (or ``Y`` itself when ``i = 1``)."""
    _check_index(X, i)
    Y = _at_level(X, i)
    if i == 1:
        return Y
    c = cone(unit_map(Y, i - 1))
    return desuspend(c.obj)[0]


def component_vanishes(X: GModule, i: int) -> bool:
    _check_index(X, i)
    Y = _at_level(X, i)
    if i == 1:
        return is_stably_zero(Y)
    return is_stably_iso(unit_map(Y, i - 1))


def support(X: GModule) -> SupportSet:
    n = X.ring.n
    members = [i for i in range(1, n + 1) if not component_vanishes(X, i)]
    return SupportSet(n, frozenset(members), exact=X.group.is_cyclic_prime(X.ring.p))


def in_prime(X: GModule, i: int) -> bool:
    if not X.group.is_cyclic_prime(X.ring.p):
        raise NotCyclicPrime("primes P_(i,n) are only identified for cyclic groups of order p")
    _check_index(X, i)
    return component_vanishes(X, i)


def residue_model(X: GModule, i: int) -> GModule:
    """``p^(i-1)`` times the ``i``-th component: a kG-module, stably zero iff ``i`` is not in the support."""
    obs = component_obstruction(X, i)
    return mult_functor(obs, i - 1)


def spc_points(ring, group) -> Spectrum:
    """The ``n`` primes of the stable category of ``A_n`` for ``G = C_p``.

    Orthogonality data: ``W_i (x) W_j`` is stably zero for every ``i != j``.
    """
    if not group.is_cyclic_prime(ring.p):
        raise NotCyclicPrime("spectrum is only computed for cyclic groups of order p")
    n = ring.n
    Ws = {i: W(ring, group, i) for i in range(1, n + 1)}
    points = [
        PrimeDescriptor(i, n, tuple(Ws[j] for j in range(1, n + 1) if j != i)) for i in range(1, n + 1)
    ]
    orth = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            orth[(i, j)] = is_stably_zero(tensor_g(Ws[i], Ws[j]))
    return Spectrum(points, orth)
