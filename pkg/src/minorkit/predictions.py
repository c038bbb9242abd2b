"""Closed-form minor sequences for Boolean algebras, Boolean lattices, median algebras and MV relabelings."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

from .dualspace import MinorSequence
from .errors import PatternMismatchError


@dataclass
class PredictedSequence:
    counts: dict[int, int]
    ess0: int
    formula: str
    ess0_provenance: str = "formula"

    def __post_init__(self):
        self.counts = {j: c for j, c in sorted(self.counts.items()) if c}
        if self.ess0 < 0 or any(c < 0 for c in self.counts.values()):
            raise ValueError("predicted counts must be nonnegative")

    def as_minor_sequence(self) -> MinorSequence:
        return MinorSequence(dict(self.counts), self.ess0)

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.ess0


def predict_boolean(l: int, k: int) -> PredictedSequence:
    """2^l into 2^k: l^k maximal classes, all of arity k."""
    if l < 1 or k < 1:
        raise ValueError("l and k must be positive")
    return PredictedSequence({k: l ** k}, 0, "l^k classes of arity k")


def predict_complemented_dl(n: int) -> PredictedSequence:
    """The Boolean lattice with n atoms as a distributive lattice (no complement, no bounds)."""
    if n < 1:
        raise ValueError("n must be positive")
    counts = {j: comb(n, j) * n ** j * 2 ** (n - j) for j in range(1, n + 1)}
    return PredictedSequence(counts, 2 ** n, "binom(n,j) n^j 2^(n-j)", "proof-derived")


def predict_median_boolean(k: int) -> PredictedSequence:
    """The median reduct of the Boolean algebra 2^k."""
    if k < 1:
        raise ValueError("k must be positive")
    counts = {i: comb(k, i) * 2 ** k * k ** i for i in range(1, k + 1)}
    return PredictedSequence(counts, 2 ** k, "binom(k,i) 2^k k^i", "proof-derived")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError("only positive integers factor")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def infer_prime_map(m: int, m2: int) -> dict[int, int]:
    """Pair the primes of m and m2 by exponent; fails unless the pairing is forced or symmetric."""
    fm, fm2 = factorize(m), factorize(m2)
    if sorted(fm.values()) != sorted(fm2.values()):
        raise PatternMismatchError(f"{m} and {m2} have different exponent patterns")
    a = sorted(fm, key=lambda p: (fm[p], p))
    b = sorted(fm2, key=lambda p: (fm2[p], p))
    return dict(zip(a, b))


def mv_relabel(m: int, m2: int, prime_map: Mapping[int, int] | None, divisors: Sequence[int]) -> list[int]:
    """Apply the multiplicative relabeling induced by a prime bijection to divisors of m."""
    fm, fm2 = factorize(m), factorize(m2)
    if prime_map is None:
        prime_map = infer_prime_map(m, m2)
    prime_map = dict(prime_map)
    if sorted(prime_map) != sorted(fm) or sorted(prime_map.values()) != sorted(fm2):
        raise PatternMismatchError("prime map must be a bijection between the prime sets")
    if any(fm[p] != fm2[q] for p, q in prime_map.items()):
        raise PatternMismatchError("prime map does not preserve exponents")
    out = []
    for d in divisors:
        if d < 1 or m % d:
            raise PatternMismatchError(f"{d} does not divide {m}")
        image = 1
        for p, e in factorize(d).items():
            image *= prime_map[p] ** e
        out.append(image)
    return out
