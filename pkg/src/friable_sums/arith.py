"""Exact modular and complex-exponential primitives shared by every module.

Phase arguments are always reduced modulo q in exact integer arithmetic
before any trigonometric call, so a phase like e_q(a*n^nu) never loses
precision to a huge floating-point argument.  Python integers are
arbitrary precision, which covers moduli well past 2^62 with no special
casing.  Accumulated sums go through `fsum_complex`, which is exact
compensated summation (strictly stronger than a single Kahan accumulator).
"""

from __future__ import annotations

import math
from typing import Iterable

TWO_PI = 2.0 * math.pi


def eq_phase(z: int, q: int) -> complex:
    """e_q(z) = exp(2*pi*i*z/q), with z reduced mod q as an integer first."""
    if q < 1:
        raise ValueError(f"modulus must be a positive integer, got q={q}")
    r = z % q
    angle = TWO_PI * r / q
    return complex(math.cos(angle), math.sin(angle))


def e_frac(t: float) -> complex:
    """e(t) = exp(2*pi*i*t) for real t, reduced mod 1 before the trig call."""
    r = t - math.floor(t)
    angle = TWO_PI * r
    return complex(math.cos(angle), math.sin(angle))


def pow_mod(n: int, nu: int, q: int) -> int:
    """n^nu mod q in [0, q); negative nu uses the modular inverse of n.

    Raises ValueError when nu < 0 and gcd(n, q) > 1, or when nu == 0
    (the exponent of a monomial phase is nonzero by contract).
    """
    if q < 1:
        raise ValueError(f"modulus must be a positive integer, got q={q}")
    if nu == 0:
        raise ValueError("monomial exponent must be nonzero")
    try:
        return pow(n, nu, q)
    except ValueError as exc:
        raise ValueError(f"{n} is not invertible modulo {q}") from exc


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as [(p, e), ...] with ascending p."""
    if n < 1:
        raise ValueError(f"cannot factor n={n}")
    out: list[tuple[int, int]] = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


def prime_factors_with_multiplicity(n: int) -> list[int]:
    """Ascending list of prime factors of n, repeated to multiplicity."""
    return [p for p, e in factorize(n) for _ in range(e)]


def divisor_count(n: int) -> int:
    """tau(n): the number of positive divisors of n >= 1."""
    if n < 1:
        raise ValueError(f"divisor count needs n >= 1, got {n}")
    tau = 1
    for _, e in factorize(n):
        tau *= e + 1
    return tau


def divisors(n: int) -> list[int]:
    """All positive divisors of n >= 1, ascending."""
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    d = 5
    while d * d <= n:
        if n % d == 0 or n % (d + 2) == 0:
            return False
        d += 6
    return True


def floor_int(x: float) -> int:
    """floor(x) as an exact int; the 'n <= x' convention for real cutoffs."""
    return math.floor(x)


def floor_quotient(x: float, d: int) -> int:
    """Largest integer k with k*d <= x, exact for float x and int d >= 1.

    Float division alone can misplace the edge when x sits on a multiple
    of d; the integer products below compare exactly against the float.
    """
    if d < 1:
        raise ValueError(f"divisor must be positive, got {d}")
    if isinstance(x, int):
        return x // d
    if x != x or x in (math.inf, -math.inf):
        raise ValueError(f"cannot take a floor quotient of x={x}")
    if float(x).is_integer():
        return int(x) // d
    k = math.floor(x / d)
    while (k + 1) * d <= x:
        k += 1
    while k * d > x:
        k -= 1
    return k


def fsum_complex(values: Iterable[complex]) -> complex:
    """Exactly compensated complex summation (fsum on both components)."""
    vs = list(values)
    return complex(math.fsum(v.real for v in vs), math.fsum(v.imag for v in vs))
