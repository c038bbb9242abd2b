"""Concrete algebras used throughout: Boolean algebras, lattices, median and MV algebras."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, Signature, power, product

BA_SIG = Signature.of(("zero", 0), ("one", 0), ("meet", 2), ("join", 2), ("neg", 1))
DL_SIG = Signature.of(("meet", 2), ("join", 2))
MEDIAN_SIG = Signature.of(("m", 3),)
MV_SIG = Signature.of(("zero", 0), ("one", 0), ("oplus", 2), ("odot", 2), ("neg", 1))
BOOLEAN_GROUP_SIG = Signature.of(("plus", 2), ("zero", 0))

FIG1_LABELS = ("0", "a", "b", "c", "d", "1")


def two_element_ba() -> FiniteAlgebra:
    tables = {
        "zero": 0,
        "one": 1,
        "meet": [0, 0, 0, 1],
        "join": [0, 1, 1, 1],
        "neg": [1, 0],
    }
    return FiniteAlgebra(2, BA_SIG, tables, name="2")


def boolean_algebra(k: int) -> FiniteAlgebra:
    """The Boolean algebra 2^k (bit i of an element is coordinate i)."""
    alg = power(two_element_ba(), k, cap=max(4096, 2 ** k))
    return FiniteAlgebra(alg.size, alg.sig, alg.tables, name=f"2^{k}", factors=alg.factors)


def two_element_dl() -> FiniteAlgebra:
    return FiniteAlgebra(2, DL_SIG, {"meet": [0, 0, 0, 1], "join": [0, 1, 1, 1]}, name="2")


def reduct(alg: FiniteAlgebra, names: Iterable[str], name: str | None = None) -> FiniteAlgebra:
    names = list(names)
    sig = Signature(tuple((op, alg.sig.arity(op)) for op in names))
    return FiniteAlgebra(alg.size, sig, {op: alg.tables[op] for op in names},
                         name=name or alg.name, labels=alg.labels)


def dl_reduct(alg: FiniteAlgebra) -> FiniteAlgebra:
    return reduct(alg, ["meet", "join"], name=f"{alg.name}-lattice")


def median_of_lattice(alg: FiniteAlgebra) -> FiniteAlgebra:
    """The median algebra of a lattice: m(x,y,z) = (x^y) v (x^z) v (y^z)."""
    meet, join = alg.tables["meet"], alg.tables["join"]
    n = alg.size
    x = np.arange(n).reshape(n, 1, 1)
    y = np.arange(n).reshape(1, n, 1)
    z = np.arange(n).reshape(1, 1, n)
    m = join[join[meet[x, y], meet[x, z]], meet[y, z]]
    return FiniteAlgebra(n, MEDIAN_SIG, {"m": m}, name=f"{alg.name}-median", labels=alg.labels)


def two_element_median() -> FiniteAlgebra:
    return median_of_lattice(two_element_dl())


def lattice_from_order(size: int, le: Iterable[tuple[int, int]], name: str | None = None,
                       labels: Sequence[str] | None = None) -> FiniteAlgebra:
    """Lattice with meet/join read off a partial order given by (a, b) pairs meaning a <= b.

    The pairs are closed reflexively and transitively first.
    """
    rel = np.eye(size, dtype=bool)
    for a, b in le:
        rel[a, b] = True
    for k in range(size):
        rel |= rel[:, [k]] & rel[[k], :]
    meet = np.empty((size, size), dtype=np.int64)
    join = np.empty((size, size), dtype=np.int64)
    for a in range(size):
        for b in range(size):
            lower = [c for c in range(size) if rel[c, a] and rel[c, b]]
            upper = [c for c in range(size) if rel[a, c] and rel[b, c]]
            glb = [c for c in lower if all(rel[d, c] for d in lower)]
            lub = [c for c in upper if all(rel[c, d] for d in upper)]
            if len(glb) != 1 or len(lub) != 1:
                raise ValueError(f"order is not a lattice at {(a, b)}")
            meet[a, b], join[a, b] = glb[0], lub[0]
    return FiniteAlgebra(size, DL_SIG, {"meet": meet, "join": join}, name=name, labels=labels)


def fig1_lattice() -> FiniteAlgebra:
    """The six-element distributive lattice 0 < a < c < 1, 0 < b < d < 1, a < d."""
    z, a, b, c, d, one = range(6)
    covers = [(z, a), (z, b), (a, c), (a, d), (b, d), (c, one), (d, one)]
    return lattice_from_order(6, covers, name="fig1", labels=FIG1_LABELS)


def lukasiewicz(m: int) -> FiniteAlgebra:
    """The MV-chain Ł_m on {0, 1/m, ..., 1}; element i stands for i/m."""
    if m < 1:
        raise ValueError("m must be positive")
    x = np.arange(m + 1).reshape(-1, 1)
    y = np.arange(m + 1).reshape(1, -1)
    tables = {
        "zero": 0,
        "one": m,
        "oplus": np.minimum(m, x + y),
        "odot": np.maximum(0, x + y - m),
        "neg": m - np.arange(m + 1),
    }
    labels = ["0"] + [f"{i}/{m}" for i in range(1, m)] + ["1"]
    return FiniteAlgebra(m + 1, MV_SIG, tables, name=f"L{m}", labels=labels)


def mv_product(ms: Sequence[int]) -> FiniteAlgebra:
    return product([lukasiewicz(m) for m in ms], name="x".join(f"L{m}" for m in ms))


def boolean_group() -> FiniteAlgebra:
    """Z_2 with addition and zero."""
    return FiniteAlgebra(2, BOOLEAN_GROUP_SIG, {"plus": [0, 1, 1, 0], "zero": 0}, name="Z2")


def downset_lattice(size: int, le: Iterable[tuple[int, int]], name: str | None = None) -> FiniteAlgebra:
    """The distributive lattice of down-sets of a finite poset (including the empty set)."""
    rel = np.eye(size, dtype=bool)
    for a, b in le:
        rel[a, b] = True
    for k in range(size):
        rel |= rel[:, [k]] & rel[[k], :]
    downsets = []
    for mask in range(2 ** size):
        members = [i for i in range(size) if mask >> i & 1]
        if all(mask >> j & 1 for i in members for j in range(size) if rel[j, i]):
            downsets.append(mask)
    index = {d: i for i, d in enumerate(downsets)}
    n = len(downsets)
    meet = [[index[p & q] for q in downsets] for p in downsets]
    join = [[index[p | q] for q in downsets] for p in downsets]
    labels = ["{" + ",".join(str(i) for i in range(size) if d >> i & 1) + "}" for d in downsets]
    return FiniteAlgebra(n, DL_SIG, {"meet": meet, "join": join}, name=name, labels=labels)
