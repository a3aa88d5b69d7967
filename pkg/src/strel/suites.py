"""Named verification suites.

Each suite takes ``(ring, group, seed, budget)`` and returns a list of
:class:`CheckReport`.  A check passes only on a verified witness; an
``unknown`` from a semi-decision procedure is reported as such and counts as
a failure of the suite.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from . import io
from .chainring import RingSpec
from .groups import FiniteGroup
from .grouprep import (
    GModule,
    Verdict,
    W,
    base_change,
    direct_sum_many,
    embed,
    functor_F,
    induce,
    is_isomorphic,
    magic_sequence,
    mult_functor,
    random_module,
    regular,
    tensor_g,
    trivial,
)
from .rnmod import Shape
from .spectrum import NotCyclicPrime, in_prime, spc_points, support
from .stable import cone, is_weakly_projective, stably_isomorphic, suspend, verdict_from_free_basis

__all__ = ["CheckReport", "SUITES", "run_suite", "requires_cyclic_prime"]


@dataclass
class CheckReport:
    check: str
    params: dict
    status: str
    statement: str
    witness: dict = field(default_factory=dict)
    seconds: float = 0.0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "check": self.check,
            "params": self.params,
            "status": self.status,
            "statement": self.statement,
            "witness": self.witness,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if timings:
            d["seconds"] = round(self.seconds, 3)
        return d


def _digest(X) -> str:
    return hashlib.sha256(np.ascontiguousarray(X, dtype=np.int64).tobytes()).hexdigest()[:16]


def _group_label(G: FiniteGroup):
    return G.name or f"table:{G.order}"


class _Recorder:
    def __init__(self, check: str, ring: RingSpec, group: FiniteGroup):
        self.check = check
        self.base = {"p": ring.p, "n": ring.n, "group": _group_label(group)}
        self.reports = []

    def add(self, ok, statement, indices=None, witness=None, culprit: GModule | None = None, t0=None):
        if ok is None:
            status = "unknown"
        else:
            status = "pass" if ok else "fail"
        params = dict(self.base)
        if indices:
            params.update(indices)
        rep = CheckReport(
            self.check,
            params,
            status,
            statement,
            witness or {},
            time.perf_counter() - t0 if t0 is not None else 0.0,
        )
        if status != "pass" and culprit is not None:
            rep.counterexample = io.module_to_dict(culprit)
        self.reports.append(rep)


def _iso_outcome(res):
    if res.status is Verdict.YES:
        return True
    if res.status is Verdict.NO:
        return False
    return None


def _iso_witness(res) -> dict:
    if res.witness is None:
        return {"reason": res.reason}
    return {"iso_digest": _digest(res.witness.matrix), "shape": str(res.witness.source.shape)}


def _A(ring, group, m):
    return regular(ring, group, m) if m > 0 else trivial(ring, group, 0)


def suite_induced(ring, group, seed, budget):
    rec = _Recorder("prop-2.1", ring, group)
    n = ring.n
    for i in range(1, n + 1):
        t0 = time.perf_counter()
        I, _ = induce(Shape(ring, (i,)), group, i)
        res = is_isomorphic(I, regular(ring, group, i), seed=seed, budget=budget)
        rec.add(_iso_outcome(res), f"induce(R_{i}) = A_{i}", {"i": i}, _iso_witness(res), I, t0)
    shapes = {(i,) for i in range(1, n + 1)} | {(n, 1), tuple(range(n, 0, -1))}
    for exps in sorted(shapes, reverse=True):
        t0 = time.perf_counter()
        I, _ = induce(Shape(ring, exps), group, n)
        v = is_weakly_projective(I)
        rec.add(
            v.weakly_projective and v.verify(),
            f"induce{Shape(ring, exps)} is weakly projective (trace witness)",
            {"shape": list(exps)},
            {"trace_witness_digest": v.certificate_hash()},
            I,
            t0,
        )
    return rec.reports


def suite_W_base_change(ring, group, seed, budget):
    rec = _Recorder("lemma-2.2", ring, group)
    for m in range(2, ring.n + 1):
        t0 = time.perf_counter()
        B = base_change(W(ring, group, m), m - 1)
        res = is_isomorphic(B, regular(ring, group, m - 1), seed=seed, budget=budget)
        rec.add(_iso_outcome(res), f"W_{m} (x) R_{m - 1} = A_{m - 1}", {"m": m}, _iso_witness(res), B, t0)
    return rec.reports


def suite_split_sequence(ring, group, seed, budget):
    rec = _Recorder("lemma-2.3", ring, group)
    for m in range(2, ring.n + 1):
        t0 = time.perf_counter()
        s = magic_sequence(ring, group, m)
        exact = s.is_exact()
        split = s.witness_valid()
        sub = is_isomorphic(s.sub, trivial(ring, group, m - 1), seed=seed, budget=budget)
        mid = is_isomorphic(s.middle, W(ring, group, m), seed=seed, budget=budget)
        quot = s.quotient.exponents == (m,) * (group.order - 1)
        outcomes = [exact, split, _iso_outcome(sub), _iso_outcome(mid), quot]
        ok = None if None in outcomes else all(outcomes)
        rec.add(
            ok,
            f"0 -> R_{m - 1} -> W_{m} -> Q -> 0 is exact and R-split, Q restricts to ({m})^{group.order - 1}",
            {"m": m},
            {
                "exact": exact,
                "r_split_witness_digest": _digest(s.witness.matrix) if s.witness is not None else None,
                "sub": str(s.sub.shape),
                "middle": str(s.middle.shape),
                "quotient": str(s.quotient.shape),
            },
            s.middle,
            t0,
        )
    return rec.reports


def suite_W_tensor(ring, group, seed, budget):
    rec = _Recorder("lemma-2.4", ring, group)
    n = ring.n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            t0 = time.perf_counter()
            T = tensor_g(W(ring, group, i), W(ring, group, j))
            target = direct_sum_many(
                [_A(ring, group, i - 1)] + [regular(ring, group, i)] * (group.order - 1), ring, group
            )
            res = is_isomorphic(T, target, seed=seed, budget=budget)
            rec.add(
                _iso_outcome(res),
                f"W_{i} (x) W_{j} = A_{i - 1} + A_{i}^{group.order - 1}",
                {"i": i, "j": j},
                _iso_witness(res),
                T,
                t0,
            )
    return rec.reports


def suite_cone_triangle(ring, group, seed, budget):
    rec = _Recorder("lemma-4.1", ring, group)
    for m in range(2, ring.n + 1):
        t0 = time.perf_counter()
        s = magic_sequence(ring, group, m)
        Wm = W(ring, group, m)
        iso = is_isomorphic(s.middle, Wm, seed=seed, budget=budget)
        if iso.status is not Verdict.YES:
            rec.add(_iso_outcome(iso), f"magic middle term = W_{m}", {"m": m}, _iso_witness(iso), s.middle, t0)
            continue
        c = cone(s.i @ iso.witness)
        S1, _ = suspend(trivial(ring, group, m))
        res = stably_isomorphic(c.obj, S1, seed=seed, budget=budget)
        rec.add(
            _iso_outcome(res),
            f"cone(R_{m - 1} -> W_{m}) is stably isomorphic to Sigma R_{m}",
            {"m": m},
            {"cone": str(c.obj.shape), "suspension": str(S1.shape), **_iso_witness(res)},
            c.obj,
            t0,
        )
    return rec.reports


def _level_one_samples(ring, group, seed):
    R1 = ring
    k = trivial(R1, group, 1)
    sk, _ = suspend(k)
    ssk, _ = suspend(sk)
    out = [("k", k), ("W_1", W(R1, group, 1)), ("Sigma k", sk), ("Sigma^2 k", ssk), ("A_1", regular(R1, group, 1))]
    rng = np.random.default_rng(seed)
    for t in range(3):
        out.append((f"random#{t}", random_module(ring, group, rng, level=1, copies=2, relations=1)))
    return out


def suite_functor_F(ring, group, seed, budget):
    rec = _Recorder("lemma-5.1", ring, group)
    n = ring.n
    for name, X in _level_one_samples(ring, group, seed):
        t0 = time.perf_counter()
        FX, gens = functor_F(X, with_generators=True)
        P = mult_functor(FX, n - 1)
        res = is_isomorphic(P, X, seed=seed, budget=budget)
        if res.status is not Verdict.YES:
            res = stably_isomorphic(P, X, seed=seed, budget=budget)
        wp = True
        if n > 1:
            B = base_change(FX, n - 1)
            v = verdict_from_free_basis(B, gens)
            if v is None and B.rank <= 24:
                v = is_weakly_projective(B)
            wp = bool(v) and v.verify()
        iso = _iso_outcome(res)
        ok = None if iso is None else (iso and wp)
        rec.add(
            ok,
            f"P F({name}) = {name} and F({name}) (x) R_(n-1) is weakly projective",
            {"X": name, "X_shape": list(X.exponents)},
            {"FX": str(FX.shape), "PFX": str(P.shape), "base_change_weakly_projective": wp, **_iso_witness(res)},
            X,
            t0,
        )
    return rec.reports


def _pair_pool(ring, group, rng, level, count):
    pool = []
    for _ in range(count):
        pool.append(random_module(ring, group, rng, level=level, copies=1, relations=int(rng.integers(1, 3))))
    return pool


def suite_monoidal(ring, group, seed, budget, pairs: int = 25):
    rec = _Recorder("thm-5.4", ring, group)
    n = ring.n
    rng = np.random.default_rng(seed)
    for t in range(pairs):
        t0 = time.perf_counter()
        M, N = _pair_pool(ring, group, rng, n, 2)
        lhs = mult_functor(tensor_g(M, N), n - 1)
        rhs = tensor_g(mult_functor(M, n - 1), mult_functor(N, n - 1))
        res = is_isomorphic(lhs, rhs, seed=seed, budget=budget)
        rec.add(
            _iso_outcome(res),
            "P(M (x) N) = P(M) (x) P(N)",
            {"pair": t, "M": list(M.exponents), "N": list(N.exponents)},
            {"P(M(x)N)": str(lhs.shape), **_iso_witness(res)},
            M,
            t0,
        )
    return rec.reports


def suite_orthogonality(ring, group, seed, budget):
    rec = _Recorder("prop-6.1", ring, group)
    n = ring.n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            t0 = time.perf_counter()
            T = tensor_g(W(ring, group, i), W(ring, group, j))
            v = is_weakly_projective(T)
            rec.add(
                v.weakly_projective and v.verify(),
                f"W_{i} (x) W_{j} is stably zero",
                {"i": i, "j": j},
                {"trace_witness_digest": v.certificate_hash()},
                T,
                t0,
            )
    return rec.reports


def requires_cyclic_prime(ring, group):
    if not group.is_cyclic_prime(ring.p):
        raise NotCyclicPrime(f"this suite needs a cyclic group of order {ring.p}")


def suite_points(ring, group, seed, budget):
    requires_cyclic_prime(ring, group)
    rec = _Recorder("thm-6.6", ring, group)
    n = ring.n
    t0 = time.perf_counter()
    spc = spc_points(ring, group)
    sups = [support(W(ring, group, i)) for i in range(1, n + 1)]
    ok = len(spc.points) == n and spc.verified() and all(s.members == {i} for i, s in enumerate(sups, 1))
    rec.add(
        ok,
        f"{len(spc.points)} points, supports of "
        + ",".join(f"W_{i}" for i in range(1, n + 1))
        + " = "
        + ",".join("{" + ",".join(map(str, sorted(s.members))) + "}" for s in sups),
        None,
        {"points": [str(P) for P in spc.points], "orthogonal_pairs": len(spc.orthogonality)},
        None,
        t0,
    )
    t0 = time.perf_counter()
    unit = trivial(ring, group, n)
    s1 = support(unit)
    rec.add(s1.members == set(range(1, n + 1)), "support of the unit is everything", {"X": "R_n"},
            {"support": str(s1)}, unit, t0)
    for name, X in (("A_n", regular(ring, group, n)), ("induce(R_1)", induce(Shape(ring, (1,)), group, n)[0])):
        t0 = time.perf_counter()
        s = support(X)
        rec.add(not s.members, f"support of weakly projective {name} is empty", {"X": name}, {"support": str(s)}, X, t0)
    return rec.reports


def suite_singleton_supports(ring, group, seed, budget):
    requires_cyclic_prime(ring, group)
    rec = _Recorder("cor-6.7", ring, group)
    n = ring.n
    for i in range(1, n + 1):
        t0 = time.perf_counter()
        Wi = W(ring, group, i)
        s = support(Wi)
        membership = [in_prime(Wi, j) for j in range(1, n + 1)]
        ok = s.members == {i} and membership == [j != i for j in range(1, n + 1)]
        rec.add(ok, f"W_{i} is supported exactly at P_{i},{n}", {"i": i},
                {"support": str(s), "in_prime": membership}, Wi, t0)
    return rec.reports


def suite_level_supports(ring, group, seed, budget):
    requires_cyclic_prime(ring, group)
    rec = _Recorder("cor-6.8", ring, group)
    n = ring.n
    rng = np.random.default_rng(seed)
    for m in range(1, n):
        t0 = time.perf_counter()
        unit = embed(trivial(ring, group, m), n)
        s = support(unit)
        rec.add(s.members == set(range(1, m + 1)), f"support of R_{m} is 1..{m}", {"m": m, "X": f"R_{m}"},
                {"support": str(s)}, unit, t0)
        samples = [(f"W_{i}@{m}", W(ring, group, i)) for i in range(1, m + 1)]
        samples += [(f"random#{t}@{m}", random_module(ring, group, rng, level=m, copies=1, relations=1)) for t in range(3)]
        for name, X in samples:
            t0 = time.perf_counter()
            s = support(embed(X, n))
            rec.add(s.members <= set(range(1, m + 1)), f"level-{m} module has support inside 1..{m}",
                    {"m": m, "X": name}, {"support": str(s)}, X, t0)
    return rec.reports


SUITES = {
    "prop-2.1": suite_induced,
    "lemma-2.2": suite_W_base_change,
    "lemma-2.3": suite_split_sequence,
    "lemma-2.4": suite_W_tensor,
    "lemma-4.1": suite_cone_triangle,
    "lemma-5.1": suite_functor_F,
    "thm-5.4": suite_monoidal,
    "prop-6.1": suite_orthogonality,
    "thm-6.6": suite_points,
    "cor-6.7": suite_singleton_supports,
    "cor-6.8": suite_level_supports,
}


def run_suite(name: str, ring: RingSpec, group: FiniteGroup, seed: int = 0, budget: int = 64) -> list:
    if name == "all":
        out = []
        for key in SUITES:
            if key in ("thm-6.6", "cor-6.7", "cor-6.8") and not group.is_cyclic_prime(ring.p):
                continue
            out.extend(SUITES[key](ring, group, seed, budget))
        return out
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](ring, group, seed, budget)
