"""Natural duals of finite algebras.

An :class:`AlterEgo` is a discrete structure on the carrier of a finite algebra
``M`` (constants, unary total and partial operations, relations).  The dual of
an algebra ``A`` is the set of homomorphisms ``A -> M``, sorted by map table,
with the structure of the alter ego lifted pointwise.
"""

from __future__ import annotations

import functools
import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    DEFAULT_HOM_LIMIT,
    DEFAULT_POWER_CAP,
    FiniteAlgebra,
    Hom,
    enumerate_homs,
    mixed_radix_digits,
    power,
)
from .errors import (
    MalformedTableError,
    NotADistributiveLatticeError,
    PreconditionError,
    SignatureMismatchError,
)
from . import library


def _sorted_tuples(tuples) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted({tuple(int(x) for x in t) for t in tuples}))


@dataclass(frozen=True)
class DualSpace:
    """A finite structured set on ``range(size)``.

    ``constants`` holds ``(value, point)`` pairs: the point that interprets the
    alter-ego constant ``value``.  Partial operations are stored as their graphs.
    """
    size: int
    constants: tuple[tuple[int, int], ...] = ()
    unary_ops: tuple[tuple[str, tuple[int, ...]], ...] = ()
    partial_ops: tuple[tuple[str, tuple[tuple[int, int], ...]], ...] = ()
    relations: tuple[tuple[str, int, tuple[tuple[int, ...], ...]], ...] = ()
    point_labels: tuple | None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        set_ = functools.partial(object.__setattr__, self)
        set_("constants", tuple(sorted((int(v), int(p)) for v, p in self.constants)))
        set_("unary_ops", tuple((str(n), tuple(int(x) for x in t)) for n, t in self.unary_ops))
        set_("partial_ops", tuple((str(n), _sorted_tuples(g)) for n, g in self.partial_ops))
        set_("relations", tuple((str(n), int(k), _sorted_tuples(ts)) for n, k, ts in self.relations))
        if self.point_labels is not None:
            set_("point_labels", tuple(self.point_labels))
        self._check()

    def _check(self):
        n = self.size
        points = [p for _, p in self.constants]
        if len(set(points)) != len(points) or len({v for v, _ in self.constants}) != len(points):
            raise MalformedTableError("constants must be distinct points with distinct values")
        if any(not 0 <= p < n for p in points):
            raise MalformedTableError("constant point out of range")
        consts = set(points)
        for name, table in self.unary_ops:
            if len(table) != n or any(not 0 <= x < n for x in table):
                raise MalformedTableError(f"unary operation {name!r} is not a total map")
            if any(table[p] not in consts for p in consts):
                raise MalformedTableError(f"unary operation {name!r} moves a constant off the constants")
        for name, graph in self.partial_ops:
            dom = [x for x, _ in graph]
            if len(set(dom)) != len(dom):
                raise MalformedTableError(f"partial operation {name!r} is not a function")
            if any(not (0 <= x < n and 0 <= y < n) for x, y in graph):
                raise MalformedTableError(f"partial operation {name!r} out of range")
        for name, k, tuples in self.relations:
            if any(len(t) != k or any(not 0 <= x < n for x in t) for t in tuples):
                raise MalformedTableError(f"relation {name!r} has malformed tuples")

    @functools.cached_property
    def constant_points(self) -> frozenset[int]:
        return frozenset(p for _, p in self.constants)

    @functools.cached_property
    def constant_value(self) -> dict[int, int]:
        return {p: v for v, p in self.constants}

    @functools.cached_property
    def constant_point(self) -> dict[int, int]:
        return {v: p for v, p in self.constants}

    @functools.cached_property
    def flat(self) -> tuple[int, ...]:
        """The non-constant points in increasing order."""
        return tuple(p for p in range(self.size) if p not in self.constant_points)

    @functools.cached_property
    def relation_sets(self) -> dict[str, frozenset]:
        return {name: frozenset(ts) for name, _, ts in self.relations}

    @functools.cached_property
    def partial_maps(self) -> dict[str, dict[int, int]]:
        return {name: dict(graph) for name, graph in self.partial_ops}

    @functools.cached_property
    def shape(self) -> tuple:
        """The similarity type; morphisms only exist between spaces of one shape."""
        return (tuple(v for v, _ in self.constants), tuple(n for n, _ in self.unary_ops),
                tuple(n for n, _ in self.partial_ops), tuple((n, k) for n, k, _ in self.relations))

    def graph_tuples(self):
        """Every relation tuple and every operation graph pair, as plain tuples."""
        for _, _, ts in self.relations:
            yield from ts
        for _, table in self.unary_ops:
            yield from ((x, y) for x, y in enumerate(table))
        for _, graph in self.partial_ops:
            yield from graph

    def label(self, p: int) -> str:
        if self.point_labels is None:
            return str(p)
        lab = self.point_labels[p]
        if isinstance(lab, Hom):
            sep = "" if lab.target.size <= 10 else ","
            return sep.join(str(v) for v in lab.table)
        return str(lab)

    def substructure(self, points: Sequence[int]) -> tuple["DualSpace", tuple[int, ...]]:
        """Induced substructure on ``points`` (constants are added).

        Returns the new space and the list of original indices of its points.
        Unary and partial operations must map the subset into itself.
        """
        keep = sorted(set(points) | self.constant_points)
        where = {p: i for i, p in enumerate(keep)}
        unary = []
        for name, table in self.unary_ops:
            if any(table[p] not in where for p in keep):
                raise PreconditionError(f"{name!r} leaves the chosen subset")
            unary.append((name, [where[table[p]] for p in keep]))
        partial = [(name, [(where[x], where[y]) for x, y in graph if x in where and y in where])
                   for name, graph in self.partial_ops]
        rels = [(name, k, [tuple(where[x] for x in t) for t in ts if all(x in where for x in t)])
                for name, k, ts in self.relations]
        labels = tuple(self.point_labels[p] for p in keep) if self.point_labels else None
        sub = DualSpace(len(keep), tuple((v, where[p]) for v, p in self.constants),
                        tuple(unary), tuple(partial), tuple(rels), labels)
        return sub, tuple(keep)


def _apply_flat(space: DualSpace, kind: str, name: str, x: int):
    if kind == "unary":
        return dict(space.unary_ops)[name][x]
    return space.partial_maps[name].get(x)


def preserves_structure(source: DualSpace, target: DualSpace, f: Sequence[int]) -> bool:
    """True iff the point map ``f`` is a morphism ``source -> target``."""
    if source.shape != target.shape or len(f) != source.size:
        return False
    for value, p in source.constants:
        if f[p] != target.constant_point[value]:
            return False
    tgt_unary = dict(target.unary_ops)
    for name, table in source.unary_ops:
        gt = tgt_unary[name]
        if any(f[table[x]] != gt[f[x]] for x in range(source.size)):
            return False
    for name, graph in source.partial_ops:
        ht = target.partial_maps[name]
        for x, y in graph:
            if f[x] not in ht or ht[f[x]] != f[y]:
                return False
    for name, _, tuples in source.relations:
        rt = target.relation_sets[name]
        if any(tuple(f[x] for x in t) not in rt for t in tuples):
            return False
    return True


@dataclass(frozen=True)
class DualMap:
    """A point map between two dual spaces (a candidate morphism)."""
    source: DualSpace
    target: DualSpace
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))

    def is_morphism(self) -> bool:
        return preserves_structure(self.source, self.target, self.map)

    def __call__(self, x: int) -> int:
        return self.map[x]


@dataclass(frozen=True)
class AlterEgo:
    """Discrete alter ego of a finite algebra ``base``.

    Validated on construction: constants must be one-element subalgebras,
    relations and operation graphs must be subalgebras of powers of ``base``,
    and no total or partial operation may be constant-valued.
    """
    base: FiniteAlgebra
    constants: tuple[int, ...] = ()
    unary_ops: tuple[tuple[str, tuple[int, ...]], ...] = ()
    partial_ops: tuple[tuple[str, tuple[tuple[int, int], ...]], ...] = ()
    relations: tuple[tuple[str, int, tuple[tuple[int, ...], ...]], ...] = ()
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        set_ = functools.partial(object.__setattr__, self)
        set_("constants", tuple(sorted({int(c) for c in self.constants})))
        set_("unary_ops", tuple((str(n), tuple(int(x) for x in t)) for n, t in self.unary_ops))
        set_("partial_ops", tuple((str(n), _sorted_tuples(g)) for n, g in self.partial_ops))
        set_("relations", tuple((str(n), int(k), _sorted_tuples(ts)) for n, k, ts in self.relations))
        self._check()

    def _check(self):
        M = self.base
        for c in self.constants:
            if not 0 <= c < M.size or not M.is_subuniverse([c]):
                raise ValueError(f"constant {c} is not a one-element subalgebra")
        for name, table in self.unary_ops:
            if len(table) != M.size:
                raise MalformedTableError(f"unary operation {name!r} must be total")
            if len(set(table)) == 1:
                raise ValueError(f"unary operation {name!r} is constant")
            if not _is_algebraic(M, [(x, y) for x, y in enumerate(table)], 2):
                raise ValueError(f"graph of {name!r} is not a subalgebra of M^2")
        for name, graph in self.partial_ops:
            if not graph:
                raise ValueError(f"partial operation {name!r} has empty domain")
            if len({y for _, y in graph}) == 1:
                raise ValueError(f"partial operation {name!r} is constant")
            if not _is_algebraic(M, graph, 2):
                raise ValueError(f"graph of {name!r} is not a subalgebra of M^2")
        for name, k, tuples in self.relations:
            if k < 1 or any(len(t) != k for t in tuples):
                raise MalformedTableError(f"relation {name!r} has malformed tuples")
            if not _is_algebraic(M, tuples, k):
                raise ValueError(f"relation {name!r} is not a subalgebra of M^{k}")
            if k >= 2 and not avoids_binary_products(M, tuples, k):
                warnings.warn(f"relation {name!r} does not avoid binary products; "
                              "coproducts of the dual category may not be direct unions")


def _is_algebraic(M: FiniteAlgebra, tuples, k: int) -> bool:
    """Is the k-ary relation closed under every operation of M, coordinatewise?"""
    rel = set(tuple(t) for t in tuples)
    R = np.array(sorted(rel), dtype=np.int64).reshape(-1, k)
    for op, arity in M.sig:
        table = M.tables[op]
        if arity == 0:
            if (int(table),) * k not in rel:
                return False
            continue
        if not rel:
            continue
        grids = np.meshgrid(*([np.arange(len(R))] * arity), indexing="ij")
        rows = [g.ravel() for g in grids]
        out = np.stack([table[tuple(R[r, j] for r in rows)] for j in range(k)], axis=1)
        if any(tuple(t) not in rel for t in np.unique(out, axis=0).tolist()):
            return False
    return True


def subuniverses(M: FiniteAlgebra) -> list[frozenset[int]]:
    return [frozenset(s) for r in range(M.size + 1)
            for s in itertools.combinations(range(M.size), r) if M.is_subuniverse(s)]


def avoids_binary_products(M: FiniteAlgebra, tuples, k: int) -> bool:
    """No binary projection of the relation contains S1 x S2 for subalgebras with |Si| > 1."""
    nontrivial = [s for s in subuniverses(M) if len(s) > 1]
    for i, j in itertools.combinations(range(k), 2):
        proj = {(t[i], t[j]) for t in tuples}
        for s1 in nontrivial:
            for s2 in nontrivial:
                if all((a, b) in proj for a in s1 for b in s2):
                    return False
    return True


def alter_ego_boolean() -> AlterEgo:
    return AlterEgo(library.two_element_ba(), name="boolean")


_LE2 = (("le", 2, ((0, 0), (0, 1), (1, 1))),)


def alter_ego_dl() -> AlterEgo:
    return AlterEgo(library.two_element_dl(), constants=(0, 1), relations=_LE2, name="dl")


def alter_ego_median() -> AlterEgo:
    return AlterEgo(library.two_element_median(), constants=(0, 1),
                    unary_ops=(("c", (1, 0)),), relations=_LE2, name="median")


def divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def alter_ego_mv(m: int) -> AlterEgo:
    """Unary relations r_d = Ł_d inside Ł_m, one per divisor d of m."""
    if m < 1:
        raise ValueError("m must be positive")
    rels = tuple((f"r{d}", 1, tuple((i * (m // d),) for i in range(d + 1))) for d in divisors(m))
    return AlterEgo(library.lukasiewicz(m), relations=rels, name=f"mv{m}")


def ego_by_name(name: str) -> AlterEgo:
    key = name.strip().lower()
    if key in ("boolean", "stone"):
        return alter_ego_boolean()
    if key in ("dl", "priestley", "lattice"):
        return alter_ego_dl()
    if key == "median":
        return alter_ego_median()
    if key.startswith("mv"):
        return alter_ego_mv(int(key[2:].lstrip(":_-")))
    raise KeyError(f"unknown alter ego preset {name!r}")


def ego_space(ego: AlterEgo) -> DualSpace:
    """The alter ego itself as a dual space on the carrier of ``ego.base``."""
    return DualSpace(ego.base.size, tuple((c, c) for c in ego.constants), ego.unary_ops,
                     ego.partial_ops, ego.relations, point_labels=ego.base.labels)


@functools.lru_cache(maxsize=128)
def dualize(A: FiniteAlgebra, ego: AlterEgo, limit: int = DEFAULT_HOM_LIMIT) -> DualSpace:
    """The dual space of ``A``: homomorphisms A -> M with pointwise structure."""
    if A.sig != ego.base.sig:
        raise SignatureMismatchError(f"{A.sig} vs alter-ego base {ego.base.sig}")
    homs = enumerate_homs(A, ego.base, limit)
    maps = np.array([h.map for h in homs], dtype=np.int64).reshape(len(homs), A.size)
    index = {row.tobytes(): i for i, row in enumerate(maps)}

    def lookup(rows: np.ndarray) -> list[int]:
        return [index[r.tobytes()] for r in np.ascontiguousarray(rows)]

    constants = []
    for c in ego.constants:
        key = np.full(A.size, c, dtype=np.int64).tobytes()
        constants.append((c, index[key]))
    unary = [(name, lookup(np.asarray(table)[maps])) for name, table in ego.unary_ops]
    partial = []
    for name, graph in ego.partial_ops:
        h = np.full(ego.base.size, -1, dtype=np.int64)
        for x, y in graph:
            h[x] = y
        images = h[maps]
        dom = np.flatnonzero((images >= 0).all(axis=1))
        partial.append((name, [(int(u), index[images[u].tobytes()]) for u in dom]))
    rels = []
    for name, k, tuples in ego.relations:
        member = np.zeros((ego.base.size,) * k, dtype=bool)
        for t in tuples:
            member[t] = True
        found = [t for t in itertools.product(range(len(homs)), repeat=k)
                 if member[tuple(maps[u] for u in t)].all()]
        rels.append((name, k, found))
    return DualSpace(len(homs), tuple(constants), tuple(unary), tuple(partial), tuple(rels),
                     point_labels=tuple(homs))


def _lattice_order(L: FiniteAlgebra) -> np.ndarray:
    meet, join = L.tables["meet"], L.tables["join"]
    n = L.size
    x = np.arange(n).reshape(-1, 1)
    y = np.arange(n).reshape(1, -1)
    z = np.arange(n).reshape(1, 1, -1)
    xx = np.arange(n).reshape(-1, 1, 1)
    yy = np.arange(n).reshape(1, -1, 1)
    checks = {
        "commutative": np.array_equal(meet, meet.T) and np.array_equal(join, join.T),
        "idempotent": (np.diagonal(meet) == np.arange(n)).all() and (np.diagonal(join) == np.arange(n)).all(),
        "associative": (np.array_equal(meet[meet[xx, yy], z], meet[xx, meet[yy, z]])
                        and np.array_equal(join[join[xx, yy], z], join[xx, join[yy, z]])),
        "absorptive": (meet[x, join[x, y]] == x).all() and (join[x, meet[x, y]] == x).all(),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise NotADistributiveLatticeError(f"meet/join are not lattice operations ({', '.join(failed)})")
    if not np.array_equal(meet[xx, join[yy, z]], join[meet[xx, yy], meet[xx, z]]):
        raise NotADistributiveLatticeError("lattice is not distributive")
    return meet == x  # le[a, b] iff a ^ b == a


def birkhoff_dual(L: FiniteAlgebra) -> DualSpace:
    """Join-irreducibles of a finite distributive lattice with fresh bounds 0 and 1.

    A join-irreducible j stands for the homomorphism "x >= j" into 2, so the
    order between join-irreducibles is the reverse of the order of ``L``; this
    makes the result isomorphic to ``dualize(L, alter_ego_dl())``.
    """
    if "meet" not in L.sig.names or "join" not in L.sig.names:
        raise NotADistributiveLatticeError("algebra has no meet/join operations")
    le = _lattice_order(L)
    n = L.size
    lt = le & ~np.eye(n, dtype=bool)
    lower_covers = [[a for a in range(n) if lt[a, b] and not any(lt[a, c] and lt[c, b] for c in range(n))]
                    for b in range(n)]
    joinirr = [b for b in range(n) if len(lower_covers[b]) == 1]
    size = len(joinirr) + 2
    pos = {j: i + 1 for i, j in enumerate(joinirr)}
    top = size - 1
    order = [(0, p) for p in range(size)] + [(p, top) for p in range(size)]
    order += [(pos[j], pos[k]) for j in joinirr for k in joinirr if le[k, j]]
    labels = ["0"] + [L.label(j) for j in joinirr] + ["1"]
    return DualSpace(size, ((0, 0), (1, top)), relations=(("le", 2, order),), point_labels=labels)


@dataclass(frozen=True)
class CopowerIso:
    """The canonical bijection from the copower n·A* onto (A^n)*."""
    copower: DualSpace
    power_dual: DualSpace
    forward: tuple[int, ...]

    @functools.cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.forward)
        for p, q in enumerate(self.forward):
            inv[q] = p
        return tuple(inv)


def canonical_copower_iso(A: FiniteAlgebra, ego: AlterEgo, n: int, cap: int = DEFAULT_POWER_CAP,
                          limit: int = DEFAULT_HOM_LIMIT) -> CopowerIso:
    """Send each constant to the matching constant hom and (i, u) to ``u ∘ pr_i``."""
    from .dualspace import Const, copower, copower_points

    X = dualize(A, ego, limit)
    An = power(A, n, cap)
    P = dualize(An, ego, limit)
    digits = mixed_radix_digits(np.arange(An.size), [A.size] * n)
    index = {h.map.tobytes(): i for i, h in enumerate(P.point_labels)}
    forward = []
    for cp in copower_points(X, n):
        if isinstance(cp, Const):
            forward.append(P.constant_point[cp.value])
        else:
            u = X.point_labels[cp.point]
            forward.append(index[u.map[digits[:, cp.copy]].tobytes()])
    if sorted(forward) != list(range(P.size)):
        raise PreconditionError("copower is not isomorphic to the dual of the power; "
                                "the alter ego does not yield a logarithmic duality here")
    return CopowerIso(copower(X, n), P, tuple(forward))


def split_power_hom(w: np.ndarray, X: DualSpace, base_size: int, n: int):
    """Write a homomorphism A^n -> M as a constant or as ``u ∘ pr_i`` with u in X."""
    from .dualspace import Const, Pt

    if (w == w[0]).all() and int(w[0]) in X.constant_point:
        return Const(int(w[0]))
    digits = mixed_radix_digits(np.arange(base_size ** n), [base_size] * n)
    index = {h.map.tobytes(): p for p, h in enumerate(X.point_labels)}
    for i in range(n):
        # u is read off along coordinate i with every other coordinate at 0
        u = np.ascontiguousarray(w[np.arange(base_size) * base_size ** i], dtype=np.int64)
        if np.array_equal(w, u[digits[:, i]]):
            p = index.get(u.tobytes())
            if p is not None and p not in X.constant_points:
                return Pt(i, p)
    raise PreconditionError("homomorphism A^n -> M is neither constant nor a projection "
                            "followed by a dual point; duality is not logarithmic")


def dual_of_hom(f: Hom, base: FiniteAlgebra, n: int, ego: AlterEgo,
                limit: int = DEFAULT_HOM_LIMIT):
    """The dual morphism B* -> n·A* of ``f: A^n -> B``, u ↦ u ∘ f read in the copower."""
    from .dualspace import DualMorphism

    if f.source.size != base.size ** n:
        raise PreconditionError("source of f is not the n-th power of base")
    X = dualize(base, ego, limit)
    Y = dualize(f.target, ego, limit)
    images = tuple(split_power_hom(u.map[f.map], X, base.size, n) for u in Y.point_labels)
    return DualMorphism(Y, X, n, images)


def bidual_check(A: FiniteAlgebra, ego: AlterEgo, limit: int = DEFAULT_HOM_LIMIT) -> bool:
    """Is evaluation ``a ↦ (u ↦ u(a))`` an isomorphism of A onto the morphisms A* -> M~?"""
    from .dualspace import enumerate_morphisms

    X = dualize(A, ego, limit)
    M = ego.base
    evals = np.array([h.map for h in X.point_labels], dtype=np.int64).reshape(X.size, A.size).T
    morphisms = enumerate_morphisms(X, ego_space(ego), limit)
    targets = {m.map for m in morphisms}
    images = [tuple(int(v) for v in row) for row in evals]
    if len(set(images)) != A.size or set(images) != targets:
        return False
    for op, k in A.sig:
        src, tgt = A.tables[op], M.tables[op]
        if k == 0:
            if not (evals[int(src)] == int(tgt)).all():
                return False
            continue
        lhs = evals[src]  # shape (|A|,)*k + (|X|,)
        grids = np.meshgrid(*([np.arange(A.size)] * k), indexing="ij")
        rhs = tgt[tuple(evals[g] for g in grids)]
        if not np.array_equal(lhs, rhs):
            return False
    return True
