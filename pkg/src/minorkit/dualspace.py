"""Morphisms from a dual space into copowers of another, and their classes.

A morphism ``phi: Y -> nX`` lands in the direct union of n copies of the
non-constant points of X with the constants shared.  Two such morphisms are
equivalent when they differ by a renaming of copies, so a class is fixed by
three pieces of data (see :class:`MorphismClass`): which points go to
constants, where every other point lands inside X, and how those points are
grouped by copy.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .algebra import DEFAULT_HOM_LIMIT, identification_map
from .duality import DualMap, DualSpace
from .errors import (
    ArityTooSmallError,
    CapExceededError,
    EmptySplitError,
    LimitExceededError,
    ParseError,
    PreconditionError,
    SignatureMismatchError,
)
from .posets import Partition, Poset, set_partitions

PRINCIPAL_IDEAL_CAP = 5


class Const(NamedTuple):
    value: int

    def __str__(self):
        return f"c{self.value}"


class Pt(NamedTuple):
    copy: int
    point: int

    def __str__(self):
        return f"({self.copy},{self.point})"


def copower_points(X: DualSpace, n: int) -> list:
    """Carrier of nX: shared constants first (by value), then copy 0, copy 1, ..."""
    if n < 1:
        raise ValueError("copower needs n >= 1")
    return [Const(v) for v, _ in X.constants] + [Pt(i, x) for i in range(n) for x in X.flat]


def copower_index(X: DualSpace, n: int) -> dict:
    return {p: i for i, p in enumerate(copower_points(X, n))}


def _lift(X: DualSpace, x: int, copy: int):
    if x in X.constant_points:
        return Const(X.constant_value[x])
    return Pt(copy, x)


def _project(X: DualSpace, p) -> int:
    return X.constant_point[p.value] if isinstance(p, Const) else p.point


def copower(X: DualSpace, n: int) -> DualSpace:
    """The direct union of n copies of X with constants amalgamated."""
    pts = copower_points(X, n)
    idx = {p: i for i, p in enumerate(pts)}

    def copy_of(p):
        return p.copy if isinstance(p, Pt) else 0

    unary = [(name, [idx[_lift(X, table[_project(X, p)], copy_of(p))] for p in pts])
             for name, table in X.unary_ops]
    partial = []
    for name, graph in X.partial_ops:
        pairs = set()
        for a, b in graph:
            copies = [0] if a in X.constant_points and b in X.constant_points else range(n)
            pairs.update((idx[_lift(X, a, i)], idx[_lift(X, b, i)]) for i in copies)
        partial.append((name, pairs))
    rels = []
    for name, k, tuples in X.relations:
        out = set()
        for t in tuples:
            copies = [0] if all(x in X.constant_points for x in t) else range(n)
            out.update(tuple(idx[_lift(X, x, i)] for x in t) for i in copies)
        rels.append((name, k, out))
    return DualSpace(len(pts), tuple((v, idx[Const(v)]) for v, _ in X.constants),
                     tuple(unary), tuple(partial), tuple(rels), point_labels=tuple(pts))


def apply_tau(tau: Sequence[int], p):
    return p if isinstance(p, Const) else Pt(tau[p.copy], p.point)


def termwise_identity(tau: Sequence[int], X: DualSpace, m: int | None = None) -> DualMap:
    """The map nX -> mX fixing constants and sending (i, x) to (tau(i), x); tau is 0-based."""
    tau = tuple(int(t) for t in tau)
    if m is None:
        m = max(tau) + 1
    src = copower(X, len(tau))
    tgt = copower(X, m)
    idx = copower_index(X, m)
    return DualMap(src, tgt, tuple(idx[apply_tau(tau, p)] for p in src.point_labels))


@dataclass(frozen=True)
class DualMorphism:
    """A map from ``source`` into the copower ``copies``·``base``, one copower point per source point."""
    source: DualSpace
    base: DualSpace
    copies: int
    map: tuple

    def __post_init__(self):
        pts = tuple(p if isinstance(p, (Const, Pt)) else
                    (Const(*p) if len(p) == 1 else Pt(*p)) for p in self.map)
        object.__setattr__(self, "map", pts)
        if len(pts) != self.source.size:
            raise ValueError("morphism must be defined on every source point")
        for p in pts:
            if isinstance(p, Pt):
                if not 0 <= p.copy < self.copies:
                    raise ValueError(f"copy index of {p} out of range")
                if p.point in self.base.constant_points:
                    raise ValueError(f"{p} names a constant of the base")
            elif p.value not in self.base.constant_point:
                raise ValueError(f"{p} is not a constant of the base")

    def __call__(self, y: int):
        return self.map[y]

    @classmethod
    def from_flat(cls, source: DualSpace, base: DualSpace, copies: int, flat: Sequence[int]) -> "DualMorphism":
        pts = copower_points(base, copies)
        return cls(source, base, copies, tuple(pts[i] for i in flat))

    def to_flat(self) -> DualMap:
        idx = copower_index(self.base, self.copies)
        return DualMap(self.source, copower(self.base, self.copies), tuple(idx[p] for p in self.map))

    def pr2(self) -> tuple[int, ...]:
        """Images folded back into the base (constants to the constant points)."""
        return tuple(_project(self.base, p) for p in self.map)

    def after_tau(self, tau: Sequence[int], m: int | None = None) -> "DualMorphism":
        """``tau_X ∘ self`` as a morphism into mX."""
        tau = tuple(int(t) for t in tau)
        if len(tau) != self.copies:
            raise ValueError("tau must be defined on every copy")
        if m is None:
            m = max(tau) + 1
        return DualMorphism(self.source, self.base, m, tuple(apply_tau(tau, p) for p in self.map))

    def _image(self, y_img, table_x) -> object:
        gx = table_x[_project(self.base, y_img)]
        return _lift(self.base, gx, y_img.copy if isinstance(y_img, Pt) else 0)

    def is_morphism(self) -> bool:
        """Direct-union rule: every tuple's non-constant images share one copy and project into X."""
        Y, X, f = self.source, self.base, self.map
        if Y.shape != X.shape:
            return False
        if any(f[y] != Const(v) for v, y in Y.constants):
            return False
        for name, _, tuples in Y.relations:
            rel = X.relation_sets[name]
            for t in tuples:
                imgs = [f[y] for y in t]
                if len({p.copy for p in imgs if isinstance(p, Pt)}) > 1:
                    return False
                if tuple(_project(X, p) for p in imgs) not in rel:
                    return False
        xu = dict(X.unary_ops)
        for name, table in Y.unary_ops:
            if any(f[table[y]] != self._image(f[y], xu[name]) for y in range(Y.size)):
                return False
        for name, graph in Y.partial_ops:
            h = X.partial_maps[name]
            for a, b in graph:
                if _project(X, f[a]) not in h or f[b] != self._image(f[a], h):
                    return False
        return True


def enumerate_morphisms(Y: DualSpace, X: DualSpace, limit: int = DEFAULT_HOM_LIMIT) -> list[DualMap]:
    """All structure-preserving maps Y -> X, sorted by map table.

    Constants are fixed first; each further assignment forces images along
    unary and partial operations and is checked against every relation tuple
    whose points are all assigned.
    """
    if Y.shape != X.shape:
        raise SignatureMismatchError("dual spaces of different shape")
    n = Y.size
    graph_cons: list[list] = [[] for _ in range(n)]
    for name, table in Y.unary_ops:
        gx = dict(enumerate(dict(X.unary_ops)[name]))
        for a, b in enumerate(table):
            graph_cons[a].append((gx, a, b))
            if b != a:
                graph_cons[b].append((gx, a, b))
    for name, graph in Y.partial_ops:
        hx = X.partial_maps[name]
        for a, b in graph:
            graph_cons[a].append((hx, a, b))
            if b != a:
                graph_cons[b].append((hx, a, b))
    rel_cons: list[list] = [[] for _ in range(n)]
    for name, _, tuples in Y.relations:
        rset = X.relation_sets[name]
        for t in tuples:
            for y in set(t):
                rel_cons[y].append((rset, t))

    f = [-1] * n

    def assign(y: int, v: int, trail: list) -> bool:
        queue = [(y, v)]
        while queue:
            y, v = queue.pop()
            if f[y] >= 0:
                if f[y] != v:
                    return False
                continue
            f[y] = v
            trail.append(y)
            for gmap, a, b in graph_cons[y]:
                if f[a] < 0:
                    continue
                img = gmap.get(f[a])
                if img is None:
                    return False
                if f[b] < 0:
                    queue.append((b, img))
                elif f[b] != img:
                    return False
            for rset, t in rel_cons[y]:
                if all(f[z] >= 0 for z in t) and tuple(f[z] for z in t) not in rset:
                    return False
        return True

    def undo(trail: list):
        for y in trail:
            f[y] = -1

    root: list = []
    for value, y in Y.constants:
        if not assign(y, X.constant_point[value], root):
            return []
    found: list[tuple[int, ...]] = []

    def search(start: int):
        y = start
        while y < n and f[y] >= 0:
            y += 1
        if y == n:
            found.append(tuple(f))
            if len(found) > limit:
                raise LimitExceededError(f"more than {limit} morphisms")
            return
        for v in range(X.size):
            trail: list = []
            if assign(y, v, trail):
                search(y + 1)
            undo(trail)

    search(0)
    found.sort()
    return [DualMap(Y, X, m) for m in found]


def copower_morphisms(Y: DualSpace, X: DualSpace, n: int, limit: int = DEFAULT_HOM_LIMIT) -> list[DualMorphism]:
    """All morphisms Y -> nX, obtained by enumerating into the materialized copower."""
    target = copower(X, n)
    return [DualMorphism.from_flat(Y, X, n, m.map) for m in enumerate_morphisms(Y, target, limit)]


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return tuple(sorted(tuple(sorted(g)) for g in groups.values()))


def _link(points, tuples) -> tuple[tuple[int, ...], ...]:
    uf = _UnionFind(points)
    for t in tuples:
        live = [x for x in t if x in uf.parent]
        for a, b in zip(live, live[1:]):
            uf.union(a, b)
    return uf.blocks()


@dataclass(frozen=True)
class TildePartition:
    classes: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.classes)

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise KeyError(x)


def tilde_classes(X: DualSpace) -> TildePartition:
    """Connected components of the non-constant points, linked by shared tuples.

    Constant entries are dropped from each relation tuple and operation graph
    pair before linking, so the bounds do not glue everything together.
    """
    return TildePartition(_link(X.flat, X.graph_tuples()))


@dataclass(frozen=True, order=True)
class MorphismClass:
    """Canonical form of an equivalence class of morphisms Y -> nX.

    ``const_fiber`` lists (point, constant value) for points sent to constants,
    ``pr2`` lists (point, base point) for the rest, and ``blocks`` groups the
    latter by copy, blocks sorted by least member.
    """
    const_fiber: tuple[tuple[int, int], ...]
    pr2: tuple[tuple[int, int], ...]
    blocks: tuple[tuple[int, ...], ...]

    @property
    def ess(self) -> int:
        return len(self.blocks)

    def merge(self, partition) -> "MorphismClass":
        """Coarsen by a partition of the block indices ``range(ess)``."""
        blocks = partition.blocks if isinstance(partition, Partition) else partition
        merged = [tuple(sorted(y for b in group for y in self.blocks[b])) for group in blocks]
        return MorphismClass(self.const_fiber, self.pr2, tuple(sorted(merged)))

    def representative(self, Y: DualSpace, X: DualSpace) -> DualMorphism:
        """A morphism in this class, block b going to copy b (one copy if ess is 0)."""
        img: list = [None] * Y.size
        for y, v in self.const_fiber:
            img[y] = Const(v)
        pos = dict(self.pr2)
        for b, block in enumerate(self.blocks):
            for y in block:
                img[y] = Pt(b, pos[y])
        return DualMorphism(Y, X, max(1, self.ess), tuple(img))

    def __str__(self):
        consts = ",".join(f"{y}:c{v}" for y, v in self.const_fiber)
        pos = dict(self.pr2)
        blocks = "|".join(",".join(f"{y}>{pos[y]}" for y in b) for b in self.blocks)
        return f"[{consts};{blocks}]"


def canonical_class(phi: DualMorphism) -> MorphismClass:
    const_fiber = tuple((y, p.value) for y, p in enumerate(phi.map) if isinstance(p, Const))
    pr2 = tuple((y, p.point) for y, p in enumerate(phi.map) if isinstance(p, Pt))
    by_copy: dict[int, list[int]] = {}
    for y, p in enumerate(phi.map):
        if isinstance(p, Pt):
            by_copy.setdefault(p.copy, []).append(y)
    blocks = tuple(sorted(tuple(b) for b in by_copy.values()))
    return MorphismClass(const_fiber, pr2, blocks)


def co_essential_arity(phi: DualMorphism) -> int:
    return len({p.copy for p in phi.map if isinstance(p, Pt)})


def class_le(lower: MorphismClass, upper: MorphismClass) -> bool:
    """Is ``lower`` a co-minor of ``upper``?  Same fibers and positions, coarser blocks."""
    if lower.const_fiber != upper.const_fiber or lower.pr2 != upper.pr2:
        return False
    return Partition(upper.blocks).refines(Partition(lower.blocks))


def is_co_minor(psi: DualMorphism, phi: DualMorphism):
    """Return some 0-based tau with ``psi = tau_X ∘ phi``, or None (exhaustive search)."""
    if psi.source != phi.source or psi.base != phi.base:
        raise SignatureMismatchError("co-minor test needs a common source and base")
    for tau in itertools.product(range(psi.copies), repeat=phi.copies):
        if phi.after_tau(tau, psi.copies).map == psi.map:
            return tau
    return None


def identification_minor(phi: DualMorphism, pair: tuple[int, int]) -> DualMorphism:
    """Merge copies ``i < j`` (0-based) via the term-wise identity of the identification map."""
    if phi.copies < 2:
        raise ArityTooSmallError("identification minors need at least two copies")
    i, j = sorted(pair)
    return phi.after_tau(identification_map(phi.copies, i, j), phi.copies - 1)


def deck(phi: DualMorphism) -> Counter:
    """Multiset of classes of all identification minors."""
    if phi.copies < 2:
        raise ArityTooSmallError("the deck needs at least two copies")
    return Counter(canonical_class(identification_minor(phi, pair))
                   for pair in itertools.combinations(range(phi.copies), 2))


def invariance_group_dual(phi: DualMorphism) -> list[tuple[int, ...]]:
    """Copy permutations that leave ``phi`` unchanged."""
    if co_essential_arity(phi) != phi.copies:
        raise PreconditionError("every copy must be met by the image")
    return [s for s in itertools.permutations(range(phi.copies))
            if phi.after_tau(s, phi.copies).map == phi.map]


def _link_blocks(Y: DualSpace, X: DualSpace, images: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Finest copy grouping allowed for a morphism Y -> X: link non-constant images per tuple."""
    live = [y for y in range(Y.size) if images[y] not in X.constant_points]
    return _link(live, Y.graph_tuples())


@dataclass(frozen=True)
class MaximalClass:
    """A maximal class, built from one morphism per ~-class of the source.

    ``components`` are the tables of E_i^# -> X (in substructure indices),
    ``images`` the assembled map Y -> X and ``blocks`` the finest grouping of
    the points with non-constant image.  ``c`` is the essential arity.
    """
    components: tuple[tuple[int, ...], ...]
    images: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    met_components: int = field(compare=False)

    @property
    def c(self) -> int:
        return len(self.blocks)

    def to_class(self, X: DualSpace) -> MorphismClass:
        const_fiber = tuple((y, X.constant_value[x]) for y, x in enumerate(self.images)
                            if x in X.constant_points)
        pr2 = tuple((y, x) for y, x in enumerate(self.images) if x not in X.constant_points)
        return MorphismClass(const_fiber, pr2, self.blocks)


def maximal_classes(B_dual: DualSpace, A_dual: DualSpace, limit: int = DEFAULT_HOM_LIMIT) -> list[MaximalClass]:
    """Maximal classes of morphisms B* -> nA*, via the ~-class product decomposition.

    Each tuple of component morphisms E_i^# -> A* is one maximal class.  Its
    essential arity counts the linked groups of points with non-constant image;
    ``met_components`` records the coarser number of ~-classes meeting A*♭.
    """
    Y, X = B_dual, A_dual
    if Y.shape != X.shape:
        raise SignatureMismatchError("dual spaces of different shape")
    parts = []
    for E in tilde_classes(Y).classes:
        sub, keep = Y.substructure(E)
        parts.append((keep, enumerate_morphisms(sub, X, limit)))
    total = math.prod(len(ms) for _, ms in parts)
    if total > limit:
        raise LimitExceededError(f"{total} maximal classes exceed limit {limit}")
    base = [-1] * Y.size
    for value, y in Y.constants:
        base[y] = X.constant_point[value]
    out = []
    for combo in itertools.product(*(ms for _, ms in parts)):
        images = list(base)
        met = 0
        for (keep, _), m in zip(parts, combo):
            for i, y in enumerate(keep):
                images[y] = m.map[i]
            met += any(m.map[i] not in X.constant_points for i, y in enumerate(keep)
                       if y not in Y.constant_points)
        out.append(MaximalClass(tuple(m.map for m in combo), tuple(images),
                                _link_blocks(Y, X, images), met))
    return out


@dataclass
class MinorSequence:
    """Census of maximal classes: ``counts[j]`` classes of essential arity j >= 1, plus ``ess0``."""
    counts: dict[int, int]
    ess0: int = 0

    def __post_init__(self):
        self.counts = {int(j): int(c) for j, c in sorted(self.counts.items()) if c}
        if any(j < 1 for j in self.counts):
            raise ValueError("counts are indexed by essential arity >= 1")
        if self.ess0 < 0 or any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be nonnegative")

    @property
    def s1(self) -> int:
        """Classes of essential arity 0 or 1 together."""
        return self.counts.get(1, 0) + self.ess0

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.ess0

    def to_dict(self) -> dict:
        return {"counts": {str(j): c for j, c in self.counts.items()}, "ess0": self.ess0, "s1": self.s1}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MinorSequence":
        try:
            data = json.loads(text)
            seq = cls({int(j): int(c) for j, c in data["counts"].items()}, int(data.get("ess0", 0)))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"not a minor sequence: {exc}") from exc
        if "s1" in data and int(data["s1"]) != seq.s1:
            raise ParseError("s1 disagrees with counts[1] + ess0")
        return seq


def minor_sequence(B_dual: DualSpace, A_dual: DualSpace, limit: int = DEFAULT_HOM_LIMIT) -> MinorSequence:
    census = Counter(m.c for m in maximal_classes(B_dual, A_dual, limit))
    ess0 = census.pop(0, 0)
    return MinorSequence(dict(census), ess0)


def principal_ideal(cls: MorphismClass, cap: int = PRINCIPAL_IDEAL_CAP) -> Poset:
    """All coarsenings of ``cls`` ordered as co-minors; labels are the classes."""
    if cls.ess > cap:
        raise CapExceededError(f"essential arity {cls.ess} exceeds cap {cap}")
    members = sorted({cls.merge(p) for p in set_partitions(range(cls.ess))},
                     key=lambda c: (c.ess, c))
    le = [[class_le(a, b) for b in members] for a in members]
    return Poset(le, members, check=False)


def extend_split(phi: DualMorphism, E: Sequence[int]) -> DualMorphism:
    """Move the points of the ~-class E with non-constant image into a fresh copy."""
    moving = [y for y in E if isinstance(phi.map[y], Pt)]
    if not moving:
        raise EmptySplitError("no point of E has a non-constant image")
    if len({phi.map[y].copy for y in moving}) > 1:
        # merging several copies into one would not give a major of phi
        raise PreconditionError("the non-constant part of E spans more than one copy")
    img = list(phi.map)
    for y in moving:
        img[y] = Pt(phi.copies, img[y].point)
    return DualMorphism(phi.source, phi.base, phi.copies + 1, tuple(img))


def classes_of_arity(Y: DualSpace, X: DualSpace, n: int, limit: int = DEFAULT_HOM_LIMIT) -> list[MorphismClass]:
    """Classes of morphisms Y -> nX meeting every copy, by explicit enumeration."""
    found = {canonical_class(phi) for phi in copower_morphisms(Y, X, n, limit)}
    return sorted(c for c in found if c.ess == n)


@dataclass(frozen=True)
class ReconstructionReport:
    n: int
    class_count: int
    distinct_decks: int
    violations: tuple[tuple[MorphismClass, MorphismClass], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def weak_reconstruct_check(B_dual: DualSpace, A_dual: DualSpace, n: int,
                           limit: int = DEFAULT_HOM_LIMIT) -> ReconstructionReport:
    """Check that no two distinct classes of essential arity n share a deck."""
    if n <= 2:
        raise ArityTooSmallError("weak reconstruction is stated for n > 2")
    classes = classes_of_arity(B_dual, A_dual, n, limit)
    by_deck: dict = {}
    for cls in classes:
        key = frozenset(deck(cls.representative(B_dual, A_dual)).items())
        by_deck.setdefault(key, []).append(cls)
    violations = tuple((group[0], other) for group in by_deck.values() for other in group[1:])
    return ReconstructionReport(n, len(classes), len(by_deck), violations)


def dual_minor_poset(B_dual: DualSpace, A_dual: DualSpace, max_n: int,
                     limit: int = DEFAULT_HOM_LIMIT) -> Poset:
    """All classes of morphisms B* -> nA* for 1 <= n <= max_n, ordered as co-minors."""
    found: set[MorphismClass] = set()
    for n in range(1, max_n + 1):
        found.update(canonical_class(phi) for phi in copower_morphisms(B_dual, A_dual, n, limit))
    members = sorted(found, key=lambda c: (c.ess, c))
    le = [[class_le(a, b) for b in members] for a in members]
    return Poset(le, members, check=False)
