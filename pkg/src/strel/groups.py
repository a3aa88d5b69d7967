"""Finite groups as Cayley tables with the identity at index 0."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = ["FiniteGroup", "cyclic", "symmetric3", "parse_group"]


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    generators: tuple
    name: str = ""

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.int64)
        m = T.shape[0]
        if T.shape != (m, m) or m < 1:
            raise ValueError("Cayley table must be square and non-empty")
        full = np.arange(m)
        if not (np.array_equal(T[0], full) and np.array_equal(T[:, 0], full)):
            raise ValueError("index 0 must be the identity")
        for k in range(m):
            if sorted(T[k]) != list(full) or sorted(T[:, k]) != list(full):
                raise ValueError("Cayley table rows/columns must be permutations")
        # (ab)c == a(bc) for all triples, vectorised over a and b
        if not np.array_equal(T[T, :], T[:, T]):
            raise ValueError("Cayley table is not associative")
        gens = tuple(int(g) for g in self.generators)
        if any(g < 0 or g >= m for g in gens):
            raise ValueError("generator index out of range")
        T.setflags(write=False)
        object.__setattr__(self, "table", T)
        object.__setattr__(self, "generators", gens)
        if len(self.closure(gens)) != m:
            raise ValueError("generators do not generate the group")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(np.flatnonzero(self.table[a] == 0)[0])

    def closure(self, gens) -> set:
        seen = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(self.table[x, g])
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return seen

    def words(self) -> list:
        """Triples ``(x, y, gi)`` with ``x = y * generators[gi]``, one for each element ``x != 0``.

        Breadth-first, so ``y`` always precedes ``x`` in the returned order.
        """
        out = []
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for y in frontier:
                for gi, g in enumerate(self.generators):
                    x = int(self.table[y, g])
                    if x not in seen:
                        seen.add(x)
                        out.append((x, y, gi))
                        nxt.append(x)
            frontier = nxt
        return out

    def is_cyclic_prime(self, p: int | None = None) -> bool:
        m = self.order
        if m < 2 or any(m % d == 0 for d in range(2, int(m**0.5) + 1)):
            return False
        return p is None or m == p

    def spec(self):
        """Serialisable description (``"cyclic:m"`` when built that way)."""
        if self.name.startswith("cyclic:"):
            return self.name
        return {"order": self.order, "table": self.table.tolist(), "generators": list(self.generators)}

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and np.array_equal(self.table, other.table)
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.table.tobytes(), self.generators))

    def __repr__(self):
        return f"FiniteGroup({self.name or self.order})"


def cyclic(m: int) -> FiniteGroup:
    idx = np.arange(m)
    T = (idx[:, None] + idx[None, :]) % m
    return FiniteGroup(T, (1 % m,) if m > 1 else (0,), name=f"cyclic:{m}")


def symmetric3() -> FiniteGroup:
    perms = sorted(permutations(range(3)))  # identity first
    index = {p: i for i, p in enumerate(perms)}
    T = np.array([[index[tuple(a[b[k]] for k in range(3))] for b in perms] for a in perms])
    # (0 1) and (0 1 2)
    return FiniteGroup(T, (index[(1, 0, 2)], index[(1, 2, 0)]), name="S3")


def parse_group(spec) -> FiniteGroup:
    """Build a group from ``"cyclic:m"``, ``"S3"`` or ``{order, table[, generators]}``."""
    if isinstance(spec, str):
        if spec.startswith("cyclic:"):
            m = int(spec.split(":", 1)[1])
            if m < 1:
                raise ValueError(f"bad cyclic order in {spec!r}")
            return cyclic(m)
        if spec.lower() in ("s3", "sym:3"):
            return symmetric3()
        raise ValueError(f"unknown group spec {spec!r}")
    table = np.asarray(spec["table"], dtype=np.int64)
    if "order" in spec and int(spec["order"]) != table.shape[0]:
        raise ValueError("group order does not match table")
    gens = spec.get("generators")
    if gens is None:
        gens = list(range(1, table.shape[0])) or [0]
    return FiniteGroup(table, tuple(gens))
