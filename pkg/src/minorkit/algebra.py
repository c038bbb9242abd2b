"""Finite algebras given by operation tables, their products, and homomorphism search.

Carriers are always ``range(size)``.  An operation of arity ``k`` is stored as a
read-only numpy array of shape ``(size,) * k``; flattening it in C order gives
the row-major table used by the JSON format.  Elements of a product are encoded
in mixed radix with factor 0 as the least significant digit.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    LimitExceededError,
    MalformedTableError,
    SignatureMismatchError,
    SizeOverflowError,
)

DEFAULT_POWER_CAP = 4096
DEFAULT_HOM_LIMIT = 1_000_000


@dataclass(frozen=True)
class Signature:
    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        ops = tuple((str(name), int(arity)) for name, arity in self.ops)
        object.__setattr__(self, "ops", ops)
        names = [name for name, _ in ops]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate operation names in {names}")
        if any(arity < 0 for _, arity in ops):
            raise ValueError("operation arities must be nonnegative")

    @classmethod
    def of(cls, *ops: tuple[str, int]) -> "Signature":
        return cls(tuple(ops))

    def arity(self, name: str) -> int:
        return dict(self.ops)[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)


class FiniteAlgebra:
    """An algebra on ``range(size)`` with total operation tables.

    ``tables`` maps each operation name to either a nested array of shape
    ``(size,) * arity`` or the flat row-major list of length ``size ** arity``.
    The instance is immutable; equality and hashing look only at the size,
    signature and tables, never at ``name``, ``labels`` or ``factors``.
    """

    def __init__(self, size: int, sig: Signature, tables, name: str | None = None,
                 labels: Sequence[str] | None = None, factors: tuple | None = None):
        if not isinstance(sig, Signature):
            sig = Signature(tuple(sig))
        if int(size) < 1:
            raise MalformedTableError("carrier size must be positive")
        self.size = int(size)
        self.sig = sig
        self.name = name
        self.labels = tuple(labels) if labels is not None else None
        self.factors = factors
        missing = [op for op in sig.names if op not in tables]
        if missing:
            raise MalformedTableError(f"missing tables for {missing}")
        extra = set(tables) - set(sig.names)
        if extra:
            raise MalformedTableError(f"tables for unknown operations {sorted(extra)}")
        self.tables = {op: _as_table(tables[op], self.size, k, op) for op, k in sig}
        if self.labels is not None and len(self.labels) != self.size:
            raise MalformedTableError("labels must name every carrier element")
        self._hash = None

    def __repr__(self):
        label = self.name or "algebra"
        return f"<FiniteAlgebra {label}: size={self.size}, ops={list(self.sig.names)}>"

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.size == other.size and self.sig == other.sig
                and all(np.array_equal(self.tables[op], other.tables[op]) for op in self.sig.names))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.size, self.sig,
                               tuple(self.tables[op].tobytes() for op in self.sig.names)))
        return self._hash

    def op(self, name: str, *args: int) -> int:
        return int(self.tables[name][tuple(args)])

    def flat_table(self, name: str) -> list[int]:
        return [int(v) for v in self.tables[name].ravel()]

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)

    def is_subuniverse(self, subset: Iterable[int]) -> bool:
        """True iff ``subset`` is closed under every operation."""
        sub = np.array(sorted(set(subset)), dtype=np.int64)
        mask = np.zeros(self.size, dtype=bool)
        mask[sub] = True
        for op, k in self.sig:
            table = self.tables[op]
            if k == 0:
                vals = table.reshape(1)
            elif sub.size == 0:
                continue
            else:
                vals = table[np.ix_(*([sub] * k))]
            if not mask[vals].all():
                return False
        return True


def _as_table(raw, size: int, arity: int, name: str) -> np.ndarray:
    arr = np.asarray(raw)
    if arr.dtype == object:
        raise MalformedTableError(f"table of {name!r} is ragged")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise MalformedTableError(f"table of {name!r} has non-integer entries")
    arr = arr.astype(np.int64)
    expected = size ** arity
    if arr.size != expected:
        raise MalformedTableError(
            f"table of {name!r} has {arr.size} entries, expected {expected} for arity {arity}")
    arr = arr.reshape((size,) * arity)
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise MalformedTableError(f"table of {name!r} has entries outside 0..{size - 1}")
    arr.setflags(write=False)
    return arr


def validate_algebra(candidate: FiniteAlgebra) -> FiniteAlgebra:
    """Re-check table shapes and ranges; return the algebra unchanged if valid."""
    for op, k in candidate.sig:
        table = np.asarray(candidate.tables[op])
        if table.shape != (candidate.size,) * k:
            raise MalformedTableError(f"table of {op!r} has shape {table.shape}")
        if table.size and (table.min() < 0 or table.max() >= candidate.size):
            raise MalformedTableError(f"table of {op!r} has out-of-range entries")
    return candidate


def _require_same_signature(*algebras: FiniteAlgebra):
    sig = algebras[0].sig
    for alg in algebras[1:]:
        if alg.sig != sig:
            raise SignatureMismatchError(f"{alg.sig} differs from {sig}")


def mixed_radix_digits(indices: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    """Decode mixed-radix indices (digit 0 least significant) into an (N, len) array."""
    out = np.empty((len(indices), len(radices)), dtype=np.int64)
    rest = np.asarray(indices, dtype=np.int64).copy()
    for i, r in enumerate(radices):
        out[:, i] = rest % r
        rest //= r
    return out


def mixed_radix_strides(radices: Sequence[int]) -> np.ndarray:
    strides = np.ones(len(radices), dtype=np.int64)
    for i in range(1, len(radices)):
        strides[i] = strides[i - 1] * radices[i - 1]
    return strides


def product(factors: Sequence[FiniteAlgebra], name: str | None = None) -> FiniteAlgebra:
    """Direct product with coordinatewise operations."""
    factors = list(factors)
    if not factors:
        raise ValueError("product needs at least one factor")
    _require_same_signature(*factors)
    radices = [f.size for f in factors]
    size = math.prod(radices)
    digits = mixed_radix_digits(np.arange(size), radices)
    strides = mixed_radix_strides(radices)
    tables = {}
    for op, k in factors[0].sig:
        out = np.zeros((size,) * k, dtype=np.int64)
        for i, f in enumerate(factors):
            coords = [digits[:, i].reshape((size,) if k == 1 else
                                           tuple(size if a == b else 1 for b in range(k)))
                      for a in range(k)]
            out += strides[i] * f.tables[op][tuple(coords)]
        tables[op] = out
    labels = None
    if all(f.labels is not None for f in factors):
        labels = ["(" + ",".join(f.labels[d] for f, d in zip(factors, row)) + ")" for row in digits]
    if name is None:
        name = "x".join(f.name or "?" for f in factors)
    return FiniteAlgebra(size, factors[0].sig, tables, name=name, labels=labels,
                         factors=tuple(factors))


@functools.lru_cache(maxsize=64)
def _power_cached(base: FiniteAlgebra, n: int) -> FiniteAlgebra:
    return product([base] * n, name=f"{base.name or 'A'}^{n}")


def power(base: FiniteAlgebra, n: int, cap: int = DEFAULT_POWER_CAP) -> FiniteAlgebra:
    if n < 1:
        raise ValueError("power exponent must be positive")
    if base.size ** n > cap:
        raise SizeOverflowError(f"|A|^n = {base.size}^{n} = {base.size ** n} exceeds cap {cap}")
    return _power_cached(base, n)


class Hom:
    """A map between the carriers of two algebras of one signature.

    Construction does not check the homomorphism property; call
    :meth:`is_homomorphism` for the exhaustive check.
    """

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra, table):
        self.source = source
        self.target = target
        arr = np.asarray(table, dtype=np.int64).reshape(-1)
        if arr.size != source.size:
            raise MalformedTableError("hom table must cover the whole source carrier")
        if arr.size and (arr.min() < 0 or arr.max() >= target.size):
            raise MalformedTableError("hom table has entries outside the target carrier")
        arr.setflags(write=False)
        self.map = arr

    @property
    def table(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.map)

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def __eq__(self, other):
        if not isinstance(other, Hom):
            return NotImplemented
        return (np.array_equal(self.map, other.map) and self.source == other.source
                and self.target == other.target)

    def __hash__(self):
        return hash(self.map.tobytes())

    def __repr__(self):
        return f"Hom({self.table})"

    def compose(self, inner: "Hom") -> "Hom":
        """``self ∘ inner``."""
        if inner.target.size != self.source.size:
            raise SignatureMismatchError("composition of incompatible maps")
        return Hom(inner.source, self.target, self.map[inner.map])

    def is_homomorphism(self) -> bool:
        if self.source.sig != self.target.sig:
            return False
        for op, k in self.source.sig:
            src, tgt = self.source.tables[op], self.target.tables[op]
            if k == 0:
                if self.map[int(src)] != int(tgt):
                    return False
                continue
            image_of_result = self.map[src]
            result_of_images = tgt[np.ix_(*([self.map] * k))]
            if not np.array_equal(image_of_result, result_of_images):
                return False
        return True


def tau_index(tau: Sequence[int], size: int, m: int) -> np.ndarray:
    """Index array of ``tau^A``: element of A^m -> element of A^n, n = len(tau).

    ``tau`` is 0-based: a tuple of length n with values in ``range(m)``;
    (a_0..a_{m-1}) is sent to (a_tau(0)..a_tau(n-1)).
    """
    tau = tuple(int(t) for t in tau)
    if any(t < 0 or t >= m for t in tau):
        raise ValueError(f"tau {tau} is not a map into range({m})")
    digits = mixed_radix_digits(np.arange(size ** m), [size] * m)
    strides = mixed_radix_strides([size] * len(tau))
    out = np.zeros(size ** m, dtype=np.int64)
    for i, t in enumerate(tau):
        out += strides[i] * digits[:, t]
    return out


def tau_power_map(tau: Sequence[int], base: FiniteAlgebra, m: int | None = None,
                  cap: int = DEFAULT_POWER_CAP) -> Hom:
    """The homomorphism ``tau^A: A^m -> A^n`` induced by ``tau: [n] -> [m]`` (0-based)."""
    tau = tuple(int(t) for t in tau)
    if not tau:
        raise ValueError("tau must have a nonempty domain")
    if m is None:
        m = max(tau) + 1
    source = power(base, m, cap)
    target = power(base, len(tau), cap)
    return Hom(source, target, tau_index(tau, base.size, m))


def identification_map(n: int, i: int, j: int) -> tuple[int, ...]:
    """The 0-based map [n] -> [n-1] merging positions i < j."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got {(i, j, n)}")
    return tuple(k if k < j else (i if k == j else k - 1) for k in range(n))


def _propagate(img: np.ndarray, new: np.ndarray, ops) -> bool:
    """Extend the partial map ``img`` (-1 = unassigned) along all operation tables.

    Semi-naive: each round only looks at argument tuples that contain an element
    assigned in the previous round.  Returns False on a contradiction.
    """
    while new.size:
        assigned = np.flatnonzero(img >= 0)
        fresh = []
        for src, tgt, k in ops:
            for p in range(k):
                axes = [assigned] * k
                axes[p] = new
                res = src[np.ix_(*axes)].ravel()
                want = tgt[np.ix_(*[img[a] for a in axes])].ravel()
                cur = img[res]
                known = cur >= 0
                if np.any(cur[known] != want[known]):
                    return False
                if not known.all():
                    r, w = res[~known], want[~known]
                    img[r] = w
                    if np.any(img[r] != w):
                        return False
                    fresh.append(r)
        new = np.unique(np.concatenate(fresh)) if fresh else np.empty(0, dtype=np.int64)
    return True


def enumerate_homs(source: FiniteAlgebra, target: FiniteAlgebra,
                   limit: int = DEFAULT_HOM_LIMIT) -> list[Hom]:
    """All homomorphisms ``source -> target``, sorted by map table.

    Backtracks over source elements in increasing order and propagates every
    assignment through the operation tables.
    """
    _require_same_signature(source, target)
    ops = [(source.tables[op], target.tables[op], k) for op, k in source.sig if k > 0]
    img = np.full(source.size, -1, dtype=np.int64)
    seeds = []
    for op, k in source.sig:
        if k == 0:
            s, t = int(source.tables[op]), int(target.tables[op])
            if img[s] >= 0 and img[s] != t:
                return []
            img[s] = t
            seeds.append(s)
    if not _propagate(img, np.unique(np.array(seeds, dtype=np.int64)), ops):
        return []

    found: list[np.ndarray] = []
    stack = [img]
    while stack:
        cur = stack.pop()
        free = np.flatnonzero(cur < 0)
        if free.size == 0:
            found.append(cur)
            if len(found) > limit:
                raise LimitExceededError(f"more than {limit} homomorphisms")
            continue
        x = free[0]
        children = []
        for v in range(target.size):
            nxt = cur.copy()
            nxt[x] = v
            if _propagate(nxt, np.array([x], dtype=np.int64), ops):
                children.append(nxt)
        stack.extend(reversed(children))
    found.sort(key=lambda a: a.tolist())
    return [Hom(source, target, a) for a in found]
