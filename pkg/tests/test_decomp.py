import math
import random

import numpy as np
import pytest

from friable_sums.arith import fsum_complex
from friable_sums.decomp import (
    arith_tables,
    bilinear_regroup,
    buchstab_expand,
    count_admissible_splits,
    first_heath_brown_counterexample,
    first_vaughan_counterexample,
    heath_brown_lambda_check,
    regrouped_tuple_sum,
    relaxed_tuple_sum,
    split_partition_sums,
    vaughan_lambda_check,
    w_split,
)
from friable_sums.sieve import build_sieve
from friable_sums.sums import SumParams, sum_linear, sum_power, sum_prime_convolution


def phase_map(q, a):
    def f(n):
        ang = (2.0 * math.pi / q) * ((a % q) * (n % q) % q)
        return np.cos(ang) + 1j * np.sin(ang)

    return f


def ones_map(n):
    return np.ones(len(n), dtype=np.complex128)


# ---------------------------------------------------------------------------
# threshold split
# ---------------------------------------------------------------------------

def test_w_split_hand_examples():
    s = w_split(8, 3)
    assert (s.k, s.m) == (4, 2)
    s = w_split(30, 5)
    assert (s.k, s.m) == (6, 5)


def test_w_split_prime_at_threshold():
    s = w_split(13, 13)
    assert (s.k, s.m) == (13, 1)
    s = w_split(13, 5)
    assert (s.k, s.m) == (13, 1)


def test_w_split_errors():
    with pytest.raises(ValueError, match="below the threshold"):
        w_split(7, 8)
    with pytest.raises(ValueError, match="n=1"):
        w_split(1, 1)


def test_w_split_invariants_random():
    rng = random.Random(21)
    fs = build_sieve(1, 10**5)
    for _ in range(2000):
        n = rng.randrange(2, 10**5)
        w = rng.uniform(1.0, n)
        s = w_split(n, w, fs)
        assert s.k * s.m == n
        pk = fs.lpf_of(s.k)
        pm = fs.spf_of(s.m) if s.m > 1 else math.inf
        assert w <= s.k < w * pk
        assert pk <= pm


def test_w_split_unique_exhaustive_small():
    fs = build_sieve(1, 20000)
    for w in (3.0, 10.0, 316.0):
        for n in range(math.ceil(w), 20001):
            assert count_admissible_splits(n, w, fs) == 1


def test_w_split_range_within_wy():
    fs = build_sieve(1, 30000)
    y = 50
    for n in range(2, 30001):
        if fs.lpf_of(n) > y:
            continue
        for w in (4.0, 25.0):
            if n < w:
                continue
            s = w_split(n, w, fs)
            assert w <= s.k <= w * y


def test_split_partition_identity_exact():
    for x, y, w in [(5000, 10.0, 10.0), (5000, 50.0, 31.5), (3000, 100.0, 100.0)]:
        direct, regrouped = split_partition_sums(phase_map(101, 7), x, y, w)
        assert abs(direct - regrouped) <= 1e-9 * max(1.0, abs(direct))


def test_split_partition_counting_form():
    # f = 1 turns the partition into an integer identity
    direct, regrouped = split_partition_sums(ones_map, 10**4, 20.0, 15.0)
    assert round(direct.real) == round(regrouped.real)
    assert abs(direct.imag) < 1e-9 and abs(regrouped.imag) < 1e-9


# ---------------------------------------------------------------------------
# smooth-sum expansion
# ---------------------------------------------------------------------------

def test_buchstab_trivial_when_y_exceeds_x():
    exp = buchstab_expand(phase_map(7, 2), 50, 60, 2)
    assert all(c == 0 for c in exp.corrections)
    direct = sum_linear(SumParams(x=50, y=60, q=7, a=2)).value
    assert abs(exp.recombined() - direct) < 1e-12


def test_buchstab_hand_case_x30_y5():
    exp = buchstab_expand(phase_map(3, 1), 30, 5, 2)
    direct = sum_linear(SumParams(x=30, y=5, q=3, a=1)).value
    assert abs(exp.recombined() - direct) < 1e-12


def test_buchstab_counting_identity():
    # f = 1: the recombination counts the smooth integers exactly
    exp = buchstab_expand(ones_map, 10**4, 25, 3)
    from friable_sums.sieve import psi

    assert round(exp.recombined().real) == psi(10**4, 25)
    assert abs(exp.recombined().imag) < 1e-9


def test_buchstab_sharp_termination_accepts_wide_prime_gap():
    # 12^4 < 3e4, but the four smallest primes above 12 multiply past 3e4,
    # so depth 3 still terminates and recombines exactly.
    exp = buchstab_expand(phase_map(11, 3), 3 * 10**4, 12, 3)
    direct = sum_linear(SumParams(x=3 * 10**4, y=12, q=11, a=3)).value
    assert abs(exp.recombined() - direct) <= 1e-9 * max(1.0, abs(direct))


def test_buchstab_incomplete_expansion_raises():
    with pytest.raises(ValueError, match="incomplete expansion"):
        buchstab_expand(ones_map, 10**4, 7, 2)


def test_buchstab_orderings_agree_when_no_repeats_fit():
    # y^2 > x leaves no room for a repeated prime above y
    strict = buchstab_expand(phase_map(5, 1), 200, 15, 1)
    relaxed = buchstab_expand(phase_map(5, 1), 200, 15, 1, ordering="nondecreasing")
    assert abs(strict.recombined() - relaxed.recombined()) < 1e-12


def test_buchstab_nondecreasing_is_not_an_identity():
    # with repeated large primes in range, the relaxed ordering over-counts
    exp = buchstab_expand(ones_map, 10, 2, 3, ordering="nondecreasing")
    assert round(exp.recombined().real) == 5  # counts 9 = 3*3 once too many
    strict = buchstab_expand(ones_map, 10, 2, 3)
    assert round(strict.recombined().real) == 4


def test_buchstab_corrections_match_prime_convolution():
    q, a = 13, 4
    exp = buchstab_expand(phase_map(q, a), 2000, 9, 3)
    for j in (1, 2, 3):
        conv = sum_prime_convolution(j, 2000, 9, q, a, 1, strict=True)
        assert abs(exp.corrections[j - 1] - conv.value) < 1e-9


def test_buchstab_recombines_monomial_phases():
    # nonlinear phase map: recombination must reproduce the monomial sum
    q, a = 11, 2

    def f(n):
        r = (n % q).astype(np.int64)
        ang = (2.0 * math.pi / q) * (a * (r * r % q) % q)
        return np.cos(ang) + 1j * np.sin(ang)

    exp = buchstab_expand(f, 5000, 16, 3)
    direct = sum_power(SumParams(x=5000, y=16, q=q, a=a, nu=2)).value
    assert abs(exp.recombined() - direct) <= 1e-9 * max(1.0, abs(direct))


def test_buchstab_rejects_bad_arguments():
    with pytest.raises(ValueError):
        buchstab_expand(ones_map, 100, 5, 0)
    with pytest.raises(ValueError):
        buchstab_expand(ones_map, 100, 5, 2, ordering="sideways")


# ---------------------------------------------------------------------------
# Lambda decompositions
# ---------------------------------------------------------------------------

def test_arith_tables_spot_values():
    t = arith_tables(100)
    assert t.mobius[1] == 1 and t.mobius[6] == 1 and t.mobius[30] == -1
    assert t.mobius[4] == 0 and t.mobius[12] == 0
    assert t.von_mangoldt[8] == pytest.approx(math.log(2))
    assert t.von_mangoldt[97] == pytest.approx(math.log(97))
    assert t.von_mangoldt[6] == 0.0


def test_vaughan_identity_holds():
    assert vaughan_lambda_check(10**3, 10, 20)
    assert first_vaughan_counterexample(10**3, 10, 20) is None


def test_vaughan_prime_case_reduces_to_log():
    # For prime n in (v, n_max] with u < n the decomposition is mu(1) log n.
    t = arith_tables(500)
    assert vaughan_lambda_check(500, 1, 2)


def test_vaughan_various_cutoffs():
    for u, v in [(1, 1), (5, 5), (10, 20), (50, 3)]:
        assert vaughan_lambda_check(800, u, v)


def test_heath_brown_identity_holds():
    assert heath_brown_lambda_check(1000, 2, 32)  # 32^2 >= 1000
    assert heath_brown_lambda_check(500, 3, 8)  # 8^3 >= 500


def test_heath_brown_j1_is_mobius_log_inversion():
    assert heath_brown_lambda_check(600, 1, 600)


def test_heath_brown_range_error():
    with pytest.raises(ValueError, match="identity range"):
        first_heath_brown_counterexample(1000, 2, 10)


def test_heath_brown_cutoff_is_sharp_for_the_range_check():
    assert heath_brown_lambda_check(1000, 2, 31.63)  # 31.63^2 = 1000.4 >= 1000
    with pytest.raises(ValueError, match="identity range"):
        heath_brown_lambda_check(1001, 2, 31.63)


# ---------------------------------------------------------------------------
# bilinear regrouping
# ---------------------------------------------------------------------------

def strict_ordered_tuple_sum(j, x, y, f):
    """Oracle: ordered tuples of distinct primes > y (all orderings)."""
    ps = [p for p in range(2, int(x) + 1) if p > y and all(p % d for d in range(2, int(math.isqrt(p)) + 1))]
    parts = []
    terms = 0

    def rec(start, depth, prod):
        nonlocal terms
        for i in range(start, len(ps)):
            pr = prod * ps[i]
            if pr > x:
                break
            if depth + 1 == j:
                z = int(x // pr) if float(x).is_integer() else int(math.floor(x / pr))
                vals = f(np.arange(1, z + 1, dtype=np.int64) * pr)
                parts.append(math.factorial(j) * complex(np.sum(vals)))
                terms += z
            else:
                rec(i + 1, depth + 1, pr)

    rec(0, 0, 1)
    return fsum_complex(parts), math.factorial(j) * terms


def test_regroup_weights_bounded_by_omega():
    w = bilinear_regroup(2, 2 * 10**4, 7.0)
    fs = build_sieve(1, 2 * 10**4)
    for ell, b in w.beta.items():
        omega = len(fs.factorize(ell))
        assert 0 < b <= omega


def test_regroup_empty_when_y_at_least_x():
    w = bilinear_regroup(2, 100, 100)
    assert w.beta == {} and w.gamma == {} and w.diagonal_terms == 0


def test_regroup_vacuous_at_x100_y7():
    # no product of two primes above 7 fits under 100
    w = bilinear_regroup(2, 100, 7)
    f = phase_map(5, 1)
    assert regrouped_tuple_sum(w, f) == 0
    assert relaxed_tuple_sum(2, 100, 7, f) == 0


def test_regroup_reproduces_relaxed_sum():
    for j, x, y in [(2, 3000, 7.0), (2, 1500, 11.0), (3, 4000, 5.0)]:
        f = phase_map(7, 3)
        w = bilinear_regroup(j, x, y)
        direct = relaxed_tuple_sum(j, x, y, f)
        grouped = regrouped_tuple_sum(w, f)
        assert abs(direct - grouped) <= 1e-9 * max(1.0, abs(direct))


def test_relaxed_equals_strict_plus_diagonal():
    j, x, y = 2, 3000, 7.0
    f = ones_map  # term counting
    relaxed = relaxed_tuple_sum(j, x, y, f)
    strict, strict_terms = strict_ordered_tuple_sum(j, x, y, f)
    w = bilinear_regroup(j, x, y)
    assert round(relaxed.real) == strict_terms + w.diagonal_terms
    assert round(strict.real) == strict_terms


def test_regroup_rejects_small_j():
    with pytest.raises(ValueError):
        bilinear_regroup(1, 100, 7)
