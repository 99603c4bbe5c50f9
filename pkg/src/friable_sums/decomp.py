"""Combinatorial decompositions of smooth integers and of the von Mangoldt
function, all implemented as exact, checkable computations.

- the threshold split n = k * m with w <= k < w * P(k) and P(k) <= p(m),
  unique for every n >= w (with p(1) treated as +infinity);
- the inclusion-exclusion expansion of a smooth sum into a full sum plus
  alternating prime-convolution corrections;
- verifiers for two exact convolution decompositions of Lambda(n);
- regrouping of prime-tuple convolutions into separable bilinear weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .arith import (
    factorize,
    floor_int,
    floor_quotient,
    fsum_complex,
    prime_factors_with_multiplicity,
)
from .sieve import FactorSieve, build_sieve, next_primes_above, primes_between, primes_upto

VectorizedMap = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# threshold split
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WSplit:
    """The unique factorization n = k * m with w <= k < w*P(k), P(k) <= p(m)."""

    n: int
    k: int
    m: int
    w: float


def w_split(n: int, w: float, sieve: Optional[FactorSieve] = None) -> WSplit:
    """Split n at threshold w: k is the shortest ascending-prefix product of
    n's prime factorization that reaches w.  Defined for every n >= w except
    n = 1, whose only candidate k = 1 fails k < w * P(k).
    """
    if n < 1 or w < 1:
        raise ValueError(f"need n >= 1 and w >= 1, got n={n}, w={w}")
    if n < w:
        raise ValueError(f"no admissible split: n={n} is below the threshold w={w}")
    if n == 1:
        raise ValueError("no admissible split: n=1 has no factor k with k < w*P(k)")
    if sieve is not None:
        factors = [p for p, e in sieve.factorize(n) for _ in range(e)]
    else:
        factors = prime_factors_with_multiplicity(n)
    k = 1
    for p in factors:
        k *= p
        if k >= w:
            return WSplit(n=n, k=k, m=n // k, w=w)
    raise AssertionError("unreachable: the full product n >= w reaches the threshold")


def count_admissible_splits(n: int, w: float, sieve: Optional[FactorSieve] = None) -> int:
    """Number of divisors k of n with w <= k < w*P(k) and P(k) <= p(n/k).

    Exhaustive over all divisors; the split is canonical exactly when this
    returns 1.  P(1) = 1 and p(1) = +infinity by convention.
    """
    tables = sieve is not None and sieve.lo == 1 and n <= sieve.hi
    fac = sieve.factorize(n) if tables else factorize(n)
    divs = [1]
    for p, e in fac:
        divs = [d * p**j for d in divs for j in range(e + 1)]
    count = 0
    for k in divs:
        m = n // k
        if tables:
            pk = sieve.lpf_of(k) if k > 1 else 1
            pm = sieve.spf_of(m) if m > 1 else math.inf
        else:
            pk = _largest_prime_factor(k)
            pm = _smallest_prime_factor(m)
        if w <= k < w * pk and pk <= pm:
            count += 1
    return count


def _largest_prime_factor(n: int) -> int:
    if n == 1:
        return 1
    return prime_factors_with_multiplicity(n)[-1]


def _smallest_prime_factor(n: int) -> float:
    if n == 1:
        return math.inf
    return prime_factors_with_multiplicity(n)[0]


def split_partition_sums(
    f: VectorizedMap,
    x: float,
    y: float,
    w: float,
    sieve: Optional[FactorSieve] = None,
) -> tuple[complex, complex]:
    """(direct, regrouped) where direct sums f over n in S(x, y), n >= w, and
    regrouped sums f(k*m) over the split fibers: w <= k < w*P(k), P(k) <= y,
    and m in S(x/k, y) with p(m) >= P(k).  The two agree exactly for w > 1.
    """
    x_floor = floor_int(x)
    if sieve is None:
        sieve = build_sieve(1, max(x_floor, 1))
    if sieve.lo != 1 or sieve.hi < x_floor:
        raise ValueError("partition sums need a factor sieve covering [1, floor(x)]")
    y_floor = floor_int(y)
    n_all = np.arange(1, x_floor + 1, dtype=np.int64)
    smooth = sieve.lpf[: x_floor] <= y_floor
    members = n_all[smooth]
    direct = complex(np.sum(f(members[members >= w])))

    parts: list[complex] = []
    k_hi = min(x_floor, floor_int(w * y_floor))
    lpf = sieve.lpf
    spf = sieve.spf
    for k in range(max(2, math.ceil(w)), k_hi + 1):
        pk = int(lpf[k - 1])
        if pk > y_floor or not (w <= k < w * pk):
            continue
        z = floor_quotient(x, k)
        m_all = np.arange(1, z + 1, dtype=np.int64)
        ok = (lpf[:z] <= y_floor) & ((spf[:z] >= pk) | (m_all == 1))
        ms = m_all[ok]
        if ms.size:
            parts.append(complex(np.sum(f(k * ms))))
    return direct, fsum_complex(parts)


# ---------------------------------------------------------------------------
# smooth-sum expansion into prime-convolution corrections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BuchstabExpansion:
    """Full-range sum plus alternating prime-tuple corrections.

    recombined() = main + sum_j (-1)^j corrections[j-1]; with strictly
    increasing prime tuples this reproduces the smooth sum exactly whenever
    the expansion depth r is admissible.
    """

    x: float
    y: float
    r: int
    ordering: str
    main: complex
    corrections: tuple[complex, ...]

    def recombined(self) -> complex:
        out = self.main
        for idx, c in enumerate(self.corrections, start=1):
            out += c if idx % 2 == 0 else -c
        return out


def _expansion_depth_ok(x_floor: int, y: float, r: int, ordering: str) -> bool:
    """True when no n <= x can carry r+1 prime factors above y (counted per
    the ordering: distinct primes when strict, with multiplicity otherwise),
    so the alternating series terminates within r corrections.
    """
    if ordering == "strict":
        smallest = next_primes_above(y, r + 1)
        prod = 1
        for p in smallest:
            prod *= p
            if prod > x_floor:
                return True
        return prod > x_floor
    p1 = next_primes_above(y, 1)[0]
    return p1 ** (r + 1) > x_floor


def buchstab_expand(
    f: VectorizedMap,
    x: float,
    y: float,
    r: int,
    *,
    ordering: str = "strict",
    chunk: int = 1 << 20,
) -> BuchstabExpansion:
    """Expand the smooth sum of f over S(x, y) as the full sum over n <= x
    plus r alternating corrections summed over prime tuples above y.

    ordering="strict" uses p_1 < ... < p_j and yields an exact identity;
    ordering="nondecreasing" allows repeated primes (p_1 <= ... <= p_j),
    which over-counts integers whose large prime factors repeat, so its
    recombination is a decomposition but not an identity.  f must accept an
    int64 numpy array and return values of modulus O(1).
    """
    if r < 1:
        raise ValueError(f"need r >= 1, got r={r}")
    if ordering not in ("strict", "nondecreasing"):
        raise ValueError(f"unknown ordering {ordering!r}")
    x_floor = floor_int(x)
    if x_floor < 1:
        return BuchstabExpansion(x, y, r, ordering, 0j, tuple(0j for _ in range(r)))
    ps = [int(p) for p in primes_between(y, x)]
    if ps and not _expansion_depth_ok(x_floor, y, r, ordering):
        raise ValueError(
            f"incomplete expansion: r={r} corrections cannot terminate at x={x}, y={y}"
        )
    main_parts = []
    for lo in range(1, x_floor + 1, chunk):
        hi = min(lo + chunk - 1, x_floor)
        main_parts.append(complex(np.sum(f(np.arange(lo, hi + 1, dtype=np.int64)))))
    main = fsum_complex(main_parts)

    level_parts: list[list[complex]] = [[] for _ in range(r)]

    def walk(i0: int, depth: int, prod: int) -> None:
        for i in range(i0, len(ps)):
            p = ps[i]
            pr = prod * p
            if pr > x_floor:
                break
            z = floor_quotient(x, pr)
            m = np.arange(1, z + 1, dtype=np.int64)
            level_parts[depth].append(complex(np.sum(f(m * pr))))
            if depth + 1 < r:
                walk(i + 1 if ordering == "strict" else i, depth + 1, pr)

    walk(0, 0, 1)
    corrections = tuple(fsum_complex(parts) for parts in level_parts)
    return BuchstabExpansion(x, y, r, ordering, main, corrections)


# ---------------------------------------------------------------------------
# arithmetic tables and Lambda decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArithTables:
    """mu(n), Lambda(n), and smallest-prime-factor tables up to n_max."""

    n_max: int
    spf: np.ndarray
    mobius: np.ndarray
    von_mangoldt: np.ndarray

    def divisors(self, n: int) -> list[int]:
        ds = [1]
        for p, e in self.factorize(n):
            ds = [d * p**j for d in ds for j in range(e + 1)]
        return ds

    def factorize(self, n: int) -> list[tuple[int, int]]:
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


def arith_tables(n_max: int) -> ArithTables:
    sieve = build_sieve(1, n_max)
    spf = np.concatenate([[0], sieve.spf]).astype(np.int64)
    mobius = np.zeros(n_max + 1, dtype=np.int64)
    mobius[1] = 1
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m = n // p
        mobius[n] = 0 if m % p == 0 else -mobius[m]
    von_mangoldt = np.zeros(n_max + 1, dtype=np.float64)
    for p in primes_upto(n_max):
        p = int(p)
        pk = p
        while pk <= n_max:
            von_mangoldt[pk] = math.log(p)
            pk *= p
    return ArithTables(n_max=n_max, spf=spf, mobius=mobius, von_mangoldt=von_mangoldt)


def first_vaughan_counterexample(
    n_max: int, u: float, v: float, tol: float = 1e-9
) -> Optional[int]:
    """Smallest n in (v, n_max] where Lambda(n) differs from its three-part
    decomposition (log-weighted, short-convolution, and bilinear ranges) by
    more than tol; None when the identity holds throughout.

    The decomposition, valid for n > v, is
      Lambda(n) =   sum_{b|n, b<=u} mu(b) log(n/b)
                  - sum_{bc|n, b<=u, c<=v} mu(b) Lambda(c)
                  + sum_{bc|n, b>u, c>v} mu(b) Lambda(c).
    """
    if u < 1 or v < 1:
        raise ValueError(f"need u, v >= 1, got u={u}, v={v}")
    t = arith_tables(n_max)
    mu = t.mobius
    lam = t.von_mangoldt
    for n in range(floor_int(v) + 1, n_max + 1):
        t1 = 0.0
        t2 = 0.0
        t3 = 0.0
        for b in t.divisors(n):
            if mu[b] == 0:
                continue
            rest = n // b
            if b <= u:
                t1 += mu[b] * math.log(n / b)
                for c in t.divisors(rest):
                    if c <= v:
                        t2 += mu[b] * lam[c]
            else:
                for c in t.divisors(rest):
                    if c > v:
                        t3 += mu[b] * lam[c]
        if abs(lam[n] - (t1 - t2 + t3)) > tol:
            return n
    return None


def vaughan_lambda_check(n_max: int, u: float, v: float, tol: float = 1e-9) -> bool:
    """True iff the three-part Lambda decomposition holds on all of (v, n_max]."""
    return first_vaughan_counterexample(n_max, u, v, tol) is None


def _dirichlet_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    n_max = len(f) - 1
    out = np.zeros(n_max + 1)
    for a in range(1, n_max + 1):
        fa = f[a]
        if fa:
            top = n_max // a
            out[a :: a][: top] += fa * g[1 : top + 1]
    return out


def first_heath_brown_counterexample(
    n_max: int, J: int, z: float, tol: float = 1e-9
) -> Optional[int]:
    """Smallest n <= n_max violating the J-fold alternating-binomial
    convolution identity for Lambda built from truncated mu, log, and 1:

      Lambda(n) = sum_{j=1}^{J} (-1)^(j-1) C(J, j)
                  (mu_{<=z} *^j conv log conv 1 *^{j-1})(n),

    valid whenever z^J >= n_max; None when the identity holds.
    """
    if J < 1:
        raise ValueError(f"need J >= 1, got J={J}")
    if z**J < n_max:
        raise ValueError(f"identity range requires z^J >= n_max, got z={z}, J={J}")
    t = arith_tables(n_max)
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    log_arr = np.log(n)
    one = np.ones(n_max + 1)
    one[0] = 0.0
    mu_z = t.mobius.astype(np.float64)
    mu_z[floor_int(z) + 1 :] = 0.0
    mu_z[0] = 0.0
    total = np.zeros(n_max + 1)
    for j in range(1, J + 1):
        conv = log_arr.copy()
        conv[0] = 0.0
        for _ in range(j - 1):
            conv = _dirichlet_convolve(conv, one)
        for _ in range(j):
            conv = _dirichlet_convolve(conv, mu_z)
        total += (-1) ** (j - 1) * math.comb(J, j) * conv
    defect = np.abs(total[1:] - t.von_mangoldt[1:])
    bad = np.nonzero(defect > tol)[0]
    return int(bad[0]) + 1 if bad.size else None


def heath_brown_lambda_check(n_max: int, J: int, z: float, tol: float = 1e-9) -> bool:
    """True iff the J-fold convolution identity for Lambda holds up to n_max."""
    return first_heath_brown_counterexample(n_max, J, z, tol) is None


# ---------------------------------------------------------------------------
# bilinear regrouping of prime-tuple convolutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegroupWeights:
    """Separable weights for the relaxed prime-tuple convolution.

    beta[l] counts primes p > y dividing l (one choice of leading prime
    with cofactor m = l / p); gamma[n] counts ordered (j-1)-tuples of
    primes > y, repetition allowed, with product exactly n.  Then
    sum_{l, n: l*n <= x} beta[l] gamma[n] f(l*n) equals the fully relaxed
    tuple sum (all j slots ordered freely, repeats allowed).
    diagonal_terms counts the relaxed (tuple, m) pairs with a repeated
    prime: the cost of dropping distinctness.
    """

    j: int
    x: float
    y: float
    beta: dict[int, int]
    gamma: dict[int, int]
    diagonal_terms: int


def bilinear_regroup(j: int, x: float, y: float) -> RegroupWeights:
    """Regroup (p_1, m) -> l and (p_2, ..., p_j) -> n for the relaxed
    prime-tuple convolution over primes above y with product cap x.
    """
    if j < 2:
        raise ValueError(f"need j >= 2, got {j}")
    x_floor = floor_int(x)
    ps = [int(p) for p in primes_between(y, x)]

    beta: dict[int, int] = {}
    if ps:
        sieve = build_sieve(1, max(x_floor, 1))
        for ell in range(2, x_floor + 1):
            cnt = sum(1 for p, _ in sieve.factorize(ell) if p > y)
            if cnt:
                beta[ell] = cnt

    gamma: dict[int, int] = {}

    def grow(depth: int, prod: int) -> None:
        if depth == j - 1:
            gamma[prod] = gamma.get(prod, 0) + 1
            return
        for p in ps:
            pr = prod * p
            if pr > x_floor:
                break
            grow(depth + 1, pr)

    if j - 1 >= 1:
        grow(0, 1)
        gamma.pop(1, None)

    diagonal = _diagonal_term_count(j, x, x_floor, ps)
    return RegroupWeights(j=j, x=x, y=y, beta=beta, gamma=gamma, diagonal_terms=diagonal)


def relaxed_tuple_sum(j: int, x: float, y: float, f: VectorizedMap) -> complex:
    """Direct evaluation of the fully relaxed prime-tuple convolution: all
    ordered j-tuples of primes above y (repeats allowed), inner m free.
    """
    x_floor = floor_int(x)
    ps = [int(p) for p in primes_between(y, x)]
    parts: list[complex] = []

    def rec(depth: int, prod: int, start: int, indices: list[int]) -> None:
        if depth == j:
            z = floor_quotient(x, prod)
            m = np.arange(1, z + 1, dtype=np.int64)
            parts.append(_orderings_of(indices) * complex(np.sum(f(m * prod))))
            return
        for i in range(start, len(ps)):
            pr = prod * ps[i]
            if pr > x_floor:
                break
            rec(depth + 1, pr, i, indices + [i])

    rec(0, 1, 0, [])
    return fsum_complex(parts)


def regrouped_tuple_sum(weights: RegroupWeights, f: VectorizedMap) -> complex:
    """sum over l, n with l*n <= x of beta[l] * gamma[n] * f(l*n)."""
    x = weights.x
    parts: list[complex] = []
    for n, g in weights.gamma.items():
        ells = np.array(
            [ell for ell, b in weights.beta.items() if ell * n <= x], dtype=np.int64
        )
        if ells.size == 0:
            continue
        bs = np.array([weights.beta[int(e)] for e in ells], dtype=np.float64)
        parts.append(g * complex(np.sum(bs * f(ells * n))))
    return fsum_complex(parts)


def _diagonal_term_count(j: int, x: float, x_floor: int, ps: list[int]) -> int:
    """Count relaxed (ordered tuple, m) pairs whose tuple repeats a prime.

    Enumerates nondecreasing tuples and scales each by its number of
    distinct orderings, so the count matches the ordered enumeration.
    """
    acc = 0

    def rec(depth: int, prod: int, start: int, indices: list[int]) -> None:
        nonlocal acc
        if depth == j:
            if len(set(indices)) < j:
                acc += _orderings_of(indices) * floor_quotient(x, prod)
            return
        for i in range(start, len(ps)):
            pr = prod * ps[i]
            if pr > x_floor:
                break
            rec(depth + 1, pr, i, indices + [i])

    rec(0, 1, 0, [])
    return acc


def _orderings_of(indices: list[int]) -> int:
    counts: dict[int, int] = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    total = math.factorial(len(indices))
    for c in counts.values():
        total //= math.factorial(c)
    return total
