"""Brute force on the function side: homomorphisms A^n -> B and their minors.

Everything here is computed from the definitions by exhaustive search, so it
serves as ground truth for the dual-side computations.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .algebra import (
    DEFAULT_HOM_LIMIT,
    DEFAULT_POWER_CAP,
    FiniteAlgebra,
    enumerate_homs,
    identification_map,
    power,
    tau_index,
)
from .errors import ArityTooSmallError
from .posets import Poset, bell, dual, partition_lattice, poset_iso


@dataclass(frozen=True)
class OracleFunction:
    """A homomorphism A^n -> B given by its table over mixed-radix encoded tuples."""
    base: FiniteAlgebra = field(repr=False)
    arity: int
    target: FiniteAlgebra = field(repr=False)
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != self.base.size ** self.arity:
            raise ValueError("table length must be |A|^n")

    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __call__(self, *args: int) -> int:
        idx = sum(a * self.base.size ** i for i, a in enumerate(args))
        return self.table[idx]

    def is_homomorphism(self) -> bool:
        from .algebra import Hom
        return Hom(power(self.base, self.arity, max(DEFAULT_POWER_CAP, len(self.table))),
                   self.target, self.table).is_homomorphism()


def enumerate_power_homs(A: FiniteAlgebra, B: FiniteAlgebra, n: int, limit: int = DEFAULT_HOM_LIMIT,
                         cap: int = DEFAULT_POWER_CAP) -> list[OracleFunction]:
    An = power(A, n, cap)
    return [OracleFunction(A, n, B, h.table) for h in enumerate_homs(An, B, limit)]


def _cube(f: OracleFunction) -> np.ndarray:
    # axis n-1-i carries argument i
    return f.array().reshape((f.base.size,) * f.arity)


def essential_args(f: OracleFunction) -> tuple[int, ...]:
    """0-based arguments whose change can change the value."""
    cube = _cube(f)
    n = f.arity
    out = []
    for i in range(n):
        axis = n - 1 - i
        first = np.take(cube, [0], axis=axis)
        if not (cube == first).all():
            out.append(i)
    return tuple(out)


def compose_tau(f: OracleFunction, tau, m: int) -> OracleFunction:
    """The minor ``f ∘ tau^A`` of arity m (tau is 0-based, defined on f's arguments)."""
    idx = tau_index(tau, f.base.size, m)
    return OracleFunction(f.base, m, f.target, f.array()[idx])


def minor_le(g: OracleFunction, f: OracleFunction):
    """Some tau with ``g = f ∘ tau^A``, or None."""
    if g.base != f.base or g.target != f.target:
        raise ValueError("minor comparison needs common base and target")
    target = g.array()
    for tau in itertools.product(range(g.arity), repeat=f.arity):
        if np.array_equal(f.array()[tau_index(tau, f.base.size, g.arity)], target):
            return tau
    return None


def identification_minor_fn(f: OracleFunction, pair: tuple[int, int]) -> OracleFunction:
    if f.arity < 2:
        raise ArityTooSmallError("identification minors need arity >= 2")
    i, j = sorted(pair)
    return compose_tau(f, identification_map(f.arity, i, j), f.arity - 1)


def class_key(f: OracleFunction) -> tuple:
    """Normal form of the minor-equivalence class of f.

    Inessential arguments are dropped and the essential ones put in the
    order giving the least table, so two functions get equal keys exactly
    when each is a minor of the other.
    """
    ess = essential_args(f)
    k = len(ess)
    if k == 0:
        return (0, (f.table[0],))
    best = None
    for perm in itertools.permutations(ess):
        # core(b_0..b_{k-1}) = f(x) with x_{perm[t]} = b_t and every other argument 0
        tau = [0] * f.arity
        for t, arg in enumerate(perm):
            tau[arg] = t
        # arguments outside ``ess`` are inessential, so any value works for them
        table = tuple(f.array()[tau_index(tau, f.base.size, k)].tolist())
        if best is None or table < best:
            best = table
    return (k, best)


def deck_fn(f: OracleFunction) -> Counter:
    if f.arity < 2:
        raise ArityTooSmallError("the deck needs arity >= 2")
    return Counter(class_key(identification_minor_fn(f, p)) for p in itertools.combinations(range(f.arity), 2))


def invariance_group_fn(f: OracleFunction) -> list[tuple[int, ...]]:
    """Permutations sigma of the arguments with f = f ∘ sigma^A."""
    return [s for s in itertools.permutations(range(f.arity))
            if compose_tau(f, s, f.arity).table == f.table]


def arity_gap_fn(f: OracleFunction) -> int:
    """Least drop in essential arity over all identification minors."""
    if f.arity < 2:
        raise ArityTooSmallError("the arity gap needs arity >= 2")
    e = len(essential_args(f))
    return min(e - len(essential_args(identification_minor_fn(f, p)))
               for p in itertools.combinations(range(f.arity), 2))


@dataclass(frozen=True)
class OracleClass:
    ess: int
    representative: OracleFunction = field(compare=False)
    key: tuple = field(repr=False)

    def __str__(self):
        return f"ess={self.ess}:{self.representative.arity}:{''.join(map(str, self.representative.table))}"


def all_functions(A: FiniteAlgebra, B: FiniteAlgebra, max_n: int, limit: int = DEFAULT_HOM_LIMIT,
                  cap: int = DEFAULT_POWER_CAP) -> list[OracleFunction]:
    return [f for n in range(1, max_n + 1) for f in enumerate_power_homs(A, B, n, limit, cap)]


def minors_of(f: OracleFunction, max_n: int) -> frozenset:
    """All (arity, table) pairs ``f ∘ tau^A`` for target arities 1..max_n."""
    out = set()
    for m in range(1, max_n + 1):
        for tau in itertools.product(range(m), repeat=f.arity):
            out.add((m, tuple(f.array()[tau_index(tau, f.base.size, m)].tolist())))
    return frozenset(out)


def minor_poset_bruteforce(A: FiniteAlgebra, B: FiniteAlgebra, max_n: int, limit: int = DEFAULT_HOM_LIMIT,
                           cap: int = DEFAULT_POWER_CAP) -> Poset:
    """Classes of homomorphisms A^n -> B (1 <= n <= max_n) under mutual minors, ordered by minor.

    Two functions are equivalent when their sets of minors coincide; the order
    is membership of one representative among the other's minors.  Labels are
    :class:`OracleClass` values.
    """
    funcs = all_functions(A, B, max_n, limit, cap)
    minors = {}
    for f in funcs:
        minors.setdefault(minors_of(f, max_n), f)
    reps = sorted(minors.items(), key=lambda kv: (len(essential_args(kv[1])), kv[1].arity, kv[1].table))
    labels = [OracleClass(len(essential_args(f)), f, class_key(f)) for _, f in reps]
    le = [[(a.arity, a.table) in mb for mb, _ in reps] for _, a in reps]
    return Poset(le, labels, check=False)


@dataclass(frozen=True)
class Violation:
    criterion: str
    function: OracleFunction
    detail: str


@dataclass(frozen=True)
class NondualizabilityReport:
    max_n: int
    function_count: int
    class_count: int
    violations: tuple[Violation, ...]
    inconclusive_components: int = 0

    @property
    def flagged(self) -> bool:
        return bool(self.violations)

    def criteria(self) -> set[str]:
        return {v.criterion for v in self.violations}


def nondualizability_report(A: FiniteAlgebra, max_n: int, limit: int = DEFAULT_HOM_LIMIT,
                            cap: int = DEFAULT_POWER_CAP, iso_cap: int | None = None) -> NondualizabilityReport:
    """Look for minor-poset features that no logarithmic duality can produce.

    (a) a component with a single top of essential arity e that is not the
        dual partition lattice of order e (components cut off by ``max_n`` with
        several tops of arity ``max_n`` are counted as inconclusive);
    (b) two inequivalent functions of essential arity > 2 sharing a deck;
    (c) a function with all n >= 2 arguments essential whose identification
        minors fall into fewer than binom(n, 2) classes;
    (d) such a function with arity gap other than 1.
    """
    funcs = all_functions(A, A, max_n, limit, cap)
    P = minor_poset_bruteforce(A, A, max_n, limit, cap)
    violations = []
    inconclusive = 0
    for comp in P.components():
        sub = P.restrict(comp)
        tops = sub.maximal()
        top_ess = [sub.labels[t].ess for t in tops]
        if len(tops) == 1:
            e = top_ess[0]
            expected = dual(partition_lattice(e)) if e <= 7 else None
            if expected is None or sub.size != bell(e) or not poset_iso(sub, expected, cap=iso_cap):
                violations.append(Violation("a", sub.labels[tops[0]].representative,
                                            f"component of size {sub.size} is not the dual partition lattice of order {e}"))
        elif any(e < max_n for e in top_ess):
            violations.append(Violation("a", sub.labels[tops[0]].representative,
                                        f"component has {len(tops)} maximal classes"))
        else:
            inconclusive += 1
    full = [f for f in funcs if f.arity >= 2 and len(essential_args(f)) == f.arity]
    decks: dict = {}
    for f in full:
        ident = [class_key(identification_minor_fn(f, p)) for p in itertools.combinations(range(f.arity), 2)]
        distinct = len(set(ident))
        if distinct != comb(f.arity, 2):
            violations.append(Violation("c", f, f"{distinct} distinct identification-minor classes, "
                                                 f"expected {comb(f.arity, 2)}"))
        gap = arity_gap_fn(f)
        if gap != 1:
            violations.append(Violation("d", f, f"arity gap {gap}"))
        if f.arity > 2:
            decks.setdefault((f.arity, frozenset(Counter(ident).items())), {}).setdefault(class_key(f), f)
    for group in decks.values():
        if len(group) > 1:
            first, *others = group.values()
            for g in others:
                violations.append(Violation("b", g, "shares its deck with an inequivalent function"))
    return NondualizabilityReport(max_n, len(funcs), P.size, tuple(violations), inconclusive)


def census(P: Poset) -> dict:
    """Class counts and maximal-class counts by essential arity, for a labelled minor poset."""
    classes = Counter(lab.ess for lab in P.labels)
    tops = Counter(P.labels[t].ess for t in P.maximal())
    return {"classes": dict(sorted(classes.items())), "maximal": dict(sorted(tops.items()))}
