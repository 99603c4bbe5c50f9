"""Bound envelopes for the smooth exponential sums, and empirical ratio
reports comparing exact |S| against each envelope.

Every envelope is the bracketed saving factor multiplying x; the
unknowable x^{o(1)} prefactor is deliberately reported as x, so all
asymptotic constants land in the ratio |S| / (x * envelope) and are never
asserted against.  Exponent-space twins of the envelopes live in
`optimizer.saving_exponents` for overflow-free region work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .sums import SumParams, SumValue, sum_power, sum_theta

ENVELOPE_NAMES = ("FT_rat", "FT_real", "THM1", "E1", "E2", "E3", "E4", "COR12")


@dataclass(frozen=True)
class LFactor:
    """Rational-approximation penalty 1 + x * |theta - a/q| >= 1."""

    theta: float
    a: int
    q: int
    value: float


def l_factor(x: float, theta: float, a: int, q: int) -> LFactor:
    if q < 1:
        raise ValueError(f"modulus must be positive, got q={q}")
    value = 1.0 + x * abs(theta - a / q)
    return LFactor(theta=theta, a=a, q=q, value=value)


def envelope_ft(x: float, y: float, q: int) -> float:
    """x^{-1/4} y^{1/2} + q^{-1/2} + (q y / x)^{1/2}."""
    return x ** -0.25 * math.sqrt(y) + q ** -0.5 + math.sqrt(q * y / x)


def envelope_thm1(x: float, y: float, q: int) -> float:
    """min(x^{-1/5}, (x/y)^{-1/4}) + q^{-1/2} + (q/x)^{1/2}."""
    return min(x ** -0.2, (x / y) ** -0.25) + q ** -0.5 + math.sqrt(q / x)


def envelope_e(
    i: int, x: float, y: float, q: int, eps: float = 0.01, delta: float = 0.05
) -> float:
    """The i-th monomial-sum envelope, i in {1, 2, 3, 4}.

    eps and delta only enter E4 = (q^{-1/4} + q^{3/4+eps} x^{-1})^delta; the
    defaults are conventions, not derived values.
    """
    if i == 1:
        return (x / y) ** -0.25 + q ** -0.5 + (x / q) ** -0.5
    if i == 2:
        return y ** -0.5 + x ** -0.25 * q ** 0.125 + q ** -0.5 + (x / q) ** -0.5
    if i == 3:
        return (
            min((x / q) ** -0.25, (x / y) ** -0.25 * q ** 0.125)
            + q ** -0.25
            + (x / y) ** -0.25
        )
    if i == 4:
        if eps <= 0 or not 0 < delta <= 1:
            raise ValueError(f"E4 needs eps > 0 and delta in (0, 1], got {eps}, {delta}")
        return (q ** -0.25 + q ** (0.75 + eps) / x) ** delta
    raise ValueError(f"envelope index must be 1..4, got {i}")


def nontrivial_range_cor14(x: float, y: float, eps: float) -> tuple[float, float]:
    """The modulus window [x^eps, max(x^{4/3-eps}, x^{2-eps} / y^2)] on which
    the monomial-sum bounds give a power saving.
    """
    if not 0 < eps < 1 / 3:
        raise ValueError(f"eps must lie in (0, 1/3), got {eps}")
    return x**eps, max(x ** (4 / 3 - eps), x ** (2 - eps) / y**2)


@dataclass(frozen=True)
class BoundReport:
    """Exact |S| against every envelope, with ratios |S| / (x * envelope)."""

    params: SumParams
    exact: SumValue
    psi: int
    envelopes: dict[str, float]
    ratios: dict[str, float]
    trivial: dict[str, bool]

    @property
    def exact_abs(self) -> float:
        return self.exact.abs


def report(
    p: SumParams,
    eps: float = 0.01,
    delta: float = 0.05,
    *,
    segment: Optional[int] = None,
    threads: int = 1,
) -> BoundReport:
    """Evaluate the sum for `p` exactly and fill every envelope and ratio.

    With theta set the sum is the real-frequency one and the two L-scaled
    envelopes pick up the 1 + x|theta - a/q| penalty; otherwise L = 1.
    """
    kwargs = {} if segment is None else {"segment": segment}
    if p.theta is not None:
        exact = sum_theta(p, **kwargs)
        lf = l_factor(p.x, p.theta, p.a, p.q).value
    else:
        exact = sum_power(p, threads=threads, **kwargs)
        lf = 1.0
    x, y, q = p.x, p.y, p.q
    ft = envelope_ft(x, y, q)
    thm1 = envelope_thm1(x, y, q)
    envelopes = {
        "FT_rat": ft,
        "FT_real": ft * lf,
        "THM1": thm1,
        "E1": envelope_e(1, x, y, q),
        "E2": envelope_e(2, x, y, q),
        "E3": envelope_e(3, x, y, q),
        "E4": envelope_e(4, x, y, q, eps, delta),
        "COR12": thm1 * lf,
    }
    ratios = {name: exact.abs / (x * env) for name, env in envelopes.items()}
    trivial = {name: env >= 1.0 for name, env in envelopes.items()}
    return BoundReport(
        params=p,
        exact=exact,
        psi=exact.terms,
        envelopes=envelopes,
        ratios=ratios,
        trivial=trivial,
    )
