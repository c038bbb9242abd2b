"""Finite posets, partition lattices and order-isomorphism testing."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceededError

PARTITION_LATTICE_CAP = 7
ISO_CAP = 64


@dataclass(frozen=True)
class Partition:
    """A set partition; blocks are sorted tuples ordered by least member."""
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, blocks) -> "Partition":
        bs = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in bs):
            raise ValueError("blocks must be nonempty")
        flat = [x for b in bs for x in b]
        if len(flat) != len(set(flat)):
            raise ValueError("blocks must be disjoint")
        return cls(tuple(sorted(bs)))

    def __len__(self):
        return len(self.blocks)

    def refines(self, other: "Partition") -> bool:
        """True iff every block of self lies inside a block of other."""
        where = {x: i for i, b in enumerate(other.blocks) for x in b}
        return all(len({where[x] for x in b}) == 1 for b in self.blocks)

    def __str__(self):
        return "|".join("".join(str(x) for x in b) for b in self.blocks) or "∅"


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` (restricted growth order), blocks as lists."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        yield [[first]] + smaller
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]


class Poset:
    """A finite poset on ``range(size)`` given by its order matrix.

    ``le[i, j]`` is True iff i <= j.  ``labels`` carries an optional
    annotation per element (partitions, morphism classes, ...).
    """

    def __init__(self, le, labels: Sequence | None = None, check: bool = True):
        le = np.array(le, dtype=bool)
        if le.ndim != 2 or le.shape[0] != le.shape[1]:
            raise ValueError("order matrix must be square")
        le.setflags(write=False)
        self.le = le
        self.size = le.shape[0]
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.size:
            raise ValueError("one label per element")
        if check:
            self._check()

    def _check(self):
        le = self.le
        if not le.diagonal().all():
            raise ValueError("order is not reflexive")
        if (le & le.T & ~np.eye(self.size, dtype=bool)).any():
            raise ValueError("order is not antisymmetric")
        lei = le.astype(np.int64)
        if ((lei @ lei > 0) & ~le).any():
            raise ValueError("order is not transitive")

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"<Poset size={self.size} covers={len(self.covers())}>"

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j): i < j with nothing strictly between."""
        lt = self.le & ~np.eye(self.size, dtype=bool)
        lti = lt.astype(np.int64)
        cover = lt & ~((lti @ lti) > 0)
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(cover))]

    def maximal(self) -> list[int]:
        return [i for i in range(self.size) if self.le[i].sum() == 1]

    def minimal(self) -> list[int]:
        return [j for j in range(self.size) if self.le[:, j].sum() == 1]

    def down(self, x: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.le[:, x])]

    def components(self) -> list[list[int]]:
        """Connected components of the comparability graph, ordered by least member."""
        comp = [-1] * self.size
        out = []
        sym = self.le | self.le.T
        for start in range(self.size):
            if comp[start] >= 0:
                continue
            comp[start] = len(out)
            block, stack = [start], [start]
            while stack:
                x = stack.pop()
                for y in np.flatnonzero(sym[x]):
                    if comp[y] < 0:
                        comp[y] = len(out)
                        block.append(int(y))
                        stack.append(int(y))
            out.append(sorted(block))
        return out

    def restrict(self, elements: Sequence[int]) -> "Poset":
        idx = list(elements)
        labels = [self.labels[i] for i in idx] if self.labels is not None else None
        return Poset(self.le[np.ix_(idx, idx)], labels, check=False)

    def relabel(self, labels: Sequence | None) -> "Poset":
        return Poset(self.le, labels, check=False)


def partition_lattice(n: int, cap: int = PARTITION_LATTICE_CAP) -> Poset:
    """Partitions of range(n) under refinement (finer is smaller); labels are Partitions."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise CapExceededError(f"partition lattice of order {n} exceeds cap {cap}")
    parts = sorted((Partition.of(p) for p in set_partitions(range(n))),
                   key=lambda p: (-len(p), p.blocks))
    le = [[a.refines(b) for b in parts] for a in parts]
    return Poset(le, parts, check=False)


def bell(n: int) -> int:
    """Bell number via the Bell triangle."""
    if not 0 <= n <= 20:
        raise ValueError("bell(n) is provided for 0 <= n <= 20")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def dual(P: Poset) -> Poset:
    return Poset(P.le.T, P.labels, check=False)


def disjoint_union(posets: Sequence[Poset]) -> Poset:
    posets = list(posets)
    if not posets:
        raise ValueError("disjoint union of no posets")
    size = sum(p.size for p in posets)
    le = np.zeros((size, size), dtype=bool)
    labels: list | None = []
    at = 0
    for p in posets:
        le[at:at + p.size, at:at + p.size] = p.le
        at += p.size
        if labels is not None and p.labels is not None:
            labels.extend(p.labels)
        else:
            labels = None
    return Poset(le, labels, check=False)


def _signature(P: Poset, x: int, key) -> tuple:
    return (int(P.le[:, x].sum()), int(P.le[x].sum()), key(x))


def _connected_iso(P: Poset, Q: Poset, key_p, key_q) -> bool:
    n = P.size
    sig_p = [_signature(P, x, key_p) for x in range(n)]
    sig_q = [_signature(Q, y, key_q) for y in range(n)]
    if Counter(sig_p) != Counter(sig_q):
        return False
    # most constrained first: rare signatures, then breadth-first from there
    freq = Counter(sig_p)
    order = sorted(range(n), key=lambda x: (freq[sig_p[x]], sig_p[x], x))
    sym = P.le | P.le.T
    seen, bfs = set(), []
    for s in order:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            bfs.append(x)
            for y in sorted(np.flatnonzero(sym[x]), key=lambda y: (freq[sig_p[y]], y)):
                if int(y) not in seen:
                    seen.add(int(y))
                    queue.append(int(y))
    candidates = {x: [y for y in range(n) if sig_q[y] == sig_p[x]] for x in range(n)}
    mapping: dict[int, int] = {}
    used = [False] * n

    def extend(pos: int) -> bool:
        if pos == n:
            return True
        x = bfs[pos]
        for y in candidates[x]:
            if used[y]:
                continue
            if all(P.le[x, a] == Q.le[y, b] and P.le[a, x] == Q.le[b, y] for a, b in mapping.items()):
                mapping[x] = y
                used[y] = True
                if extend(pos + 1):
                    return True
                del mapping[x]
                used[y] = False
        return False

    return extend(0)


def poset_iso(P: Poset, Q: Poset, cap: int | None = ISO_CAP, label_key=None) -> bool:
    """Exact order-isomorphism test.

    Components are matched one by one and each pair is searched by backtracking
    with (down-degree, up-degree, label) pruning.  With ``label_key`` the
    isomorphism must also preserve ``label_key(label)``.
    """
    if cap is not None and max(P.size, Q.size) > cap:
        raise CapExceededError(f"poset_iso is capped at {cap} elements")
    if P.size != Q.size or int(P.le.sum()) != int(Q.le.sum()):
        return False

    def keyer(R: Poset):
        if label_key is None or R.labels is None:
            return lambda x: None
        return lambda x: label_key(R.labels[x])

    comps_q = [Q.restrict(c) for c in Q.components()]
    used = [False] * len(comps_q)
    for comp in P.components():
        cp = P.restrict(comp)
        ckp = keyer(cp)
        for i, cq in enumerate(comps_q):
            if used[i] or cq.size != cp.size:
                continue
            if _connected_iso(cp, cq, ckp, keyer(cq)):
                used[i] = True
                break
        else:
            return False
    return True


def hasse_dot(P: Poset, name: str = "P", label=str) -> str:
    """DOT digraph of the covering relation, edges pointing upwards."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(P.size):
        text = label(P.labels[i]) if P.labels is not None else str(i)
        text = text.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  n{i} [label="{text}"];')
    for i, j in P.covers():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
