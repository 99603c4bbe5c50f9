"""Segmented prime-factor tables and enumeration of smooth integers.

The engine behind every smooth sum: a segmented sieve that fills, for a
window [lo, hi], the largest prime factor P(n) and smallest prime factor
p(n) of each n, plus a streaming enumerator of the y-smooth set
S(x, y) = {n <= x : P(n) <= y} that never materializes a table of size x.

Conventions: P(1) = p(1) = 1, and real cutoffs use floor semantics
(n <= x means n <= floor(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .arith import floor_int, is_prime

DEFAULT_SEGMENT = 1 << 22
MAX_SEGMENT = 1 << 26


class ResourceLimitError(RuntimeError):
    """A requested table or scan exceeds the configured memory/work budget."""


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (classic sieve of Eratosthenes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def primes_between(lo: float, hi: float) -> np.ndarray:
    """Primes p with lo < p <= hi, ascending."""
    top = floor_int(hi)
    if top < 2:
        return np.empty(0, dtype=np.int64)
    ps = primes_upto(top)
    return ps[ps > lo]


def next_primes_above(y: float, count: int) -> list[int]:
    """The `count` smallest primes strictly above y.

    Walks candidates one by one with trial division, so no table of size
    O(y) is ever built; prime gaps keep the walk short.
    """
    found: list[int] = []
    n = max(floor_int(y) + 1, 2)
    while len(found) < count:
        if is_prime(n):
            found.append(n)
        n += 1
    return found


@dataclass(frozen=True)
class FactorSieve:
    """Largest/smallest prime factor tables over a segment [lo, hi].

    Attributes:
        lo, hi: inclusive segment bounds, 1 <= lo <= hi
        lpf: int64 array, lpf[n - lo] = P(n)
        spf: int64 array, spf[n - lo] = p(n)
    """

    lo: int
    hi: int
    lpf: np.ndarray
    spf: np.ndarray

    def lpf_of(self, n: int) -> int:
        self._check(n)
        return int(self.lpf[n - self.lo])

    def spf_of(self, n: int) -> int:
        self._check(n)
        return int(self.spf[n - self.lo])

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Factor n by repeated spf division; needs lo == 1."""
        if self.lo != 1:
            raise ValueError("factorize requires a sieve anchored at lo=1")
        self._check(n)
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n - 1])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def _check(self, n: int) -> None:
        if not (self.lo <= n <= self.hi):
            raise ValueError(f"n={n} outside sieve segment [{self.lo}, {self.hi}]")


def build_sieve(lo: int, hi: int, max_entries: int = MAX_SEGMENT) -> FactorSieve:
    """Fill P(n) and p(n) for every n in [lo, hi] in one pass."""
    if not (1 <= lo <= hi):
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    count = hi - lo + 1
    if count > max_entries:
        raise ResourceLimitError(
            f"segment of {count} entries exceeds the {max_entries}-entry budget"
        )
    cof = np.arange(lo, hi + 1, dtype=np.int64)
    lpf = np.ones(count, dtype=np.int64)
    spf = np.zeros(count, dtype=np.int64)
    small = primes_upto(math.isqrt(hi))
    for p in small:
        p = int(p)
        start = ((lo + p - 1) // p) * p - lo
        lpf[start::p] = p
        t = p
        while t <= hi:
            s = ((lo + t - 1) // t) * t - lo
            cof[s::t] //= p
            t *= p
    for p in small[::-1]:
        p = int(p)
        start = ((lo + p - 1) // p) * p - lo
        spf[start::p] = p
    big = cof > 1
    lpf[big] = cof[big]
    unset = spf == 0
    spf[unset & big] = cof[unset & big]
    spf[unset & ~big] = lpf[unset & ~big]  # only n = 1, by convention p(1) = 1
    return FactorSieve(lo=lo, hi=hi, lpf=lpf, spf=spf)


@dataclass(frozen=True)
class SmoothSet:
    """The materialized smooth set S(x, y), ascending."""

    x: float
    y: float
    members: np.ndarray = field(repr=False)

    @property
    def psi(self) -> int:
        return int(self.members.size)


def _segment_bounds(x_floor: int, segment: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + segment - 1, x_floor)) for lo in range(1, x_floor + 1, segment)]


def _smooth_in_segment(
    lo: int,
    hi: int,
    y_floor: int,
    primes: np.ndarray,
    prime_value: Optional[Callable[[int], complex]] = None,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Smooth members of [lo, hi], optionally with multiplicative weights.

    `primes` must hold every prime <= min(y_floor, isqrt(global x)).  After
    dividing those out, a surviving cofactor > 1 is either a single prime
    (division bound isqrt) or a product of primes above y (division bound
    y), so `cof <= y` is exactly the smoothness test in both regimes.
    """
    n = np.arange(lo, hi + 1, dtype=np.int64)
    cof = n.copy()
    weights = np.ones(hi - lo + 1, dtype=np.complex128) if prime_value is not None else None
    for p in primes:
        p = int(p)
        fp = prime_value(p) if prime_value is not None else None
        t = p
        while t <= hi:
            s = ((lo + t - 1) // t) * t - lo
            cof[s::t] //= p
            if weights is not None:
                weights[s::t] *= fp
            t *= p
    mask = cof <= y_floor
    members = n[mask]
    if weights is None:
        return members, None
    w = weights[mask]
    rest = cof[mask]
    large = rest > 1
    if np.any(large):
        w[large] *= np.array([prime_value(int(c)) for c in rest[large]])
    return members, w


def smooth_plan(
    x: float, y: float, segment: int = DEFAULT_SEGMENT
) -> tuple[list[tuple[int, int]], int, np.ndarray]:
    """(segment bounds, floor(y), dividing primes) for a smooth scan of
    S(x, y); segments are independent, so callers may process them in any
    order or in parallel.
    """
    x_floor = floor_int(x)
    y_floor = floor_int(y)
    if x_floor < 1 or y_floor < 1:
        return [], y_floor, np.empty(0, dtype=np.int64)
    bound = min(y_floor, math.isqrt(x_floor))
    return _segment_bounds(x_floor, segment), y_floor, primes_upto(bound)


def smooth_in_range(
    lo: int,
    hi: int,
    y_floor: int,
    primes: np.ndarray,
    prime_value: Optional[Callable[[int], complex]] = None,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Smooth members of one planned segment (see smooth_plan)."""
    return _smooth_in_segment(lo, hi, y_floor, primes, prime_value)


def iter_smooth(
    x: float,
    y: float,
    segment: int = DEFAULT_SEGMENT,
    prime_value: Optional[Callable[[int], complex]] = None,
) -> Iterator[tuple[np.ndarray, Optional[np.ndarray]]]:
    """Stream (members, weights) arrays of S(x, y), one segment at a time.

    `weights`, present when prime_value is given, carries the completely
    multiplicative extension of prime_value over each member.
    """
    bounds, y_floor, primes = smooth_plan(x, y, segment)
    for lo, hi in bounds:
        yield _smooth_in_segment(lo, hi, y_floor, primes, prime_value)


def smooth_members(x: float, y: float, segment: int = DEFAULT_SEGMENT) -> SmoothSet:
    """Materialize S(x, y) as an ascending array (use psi() for counts only)."""
    chunks = [members for members, _ in iter_smooth(x, y, segment)]
    if chunks:
        members = np.concatenate(chunks)
    else:
        members = np.empty(0, dtype=np.int64)
    return SmoothSet(x=x, y=y, members=members)


def psi(x: float, y: float, segment: int = DEFAULT_SEGMENT) -> int:
    """Psi(x, y) = #S(x, y), streamed without materializing the set."""
    return sum(int(members.size) for members, _ in iter_smooth(x, y, segment))
