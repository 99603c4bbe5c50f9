"""Command-line front end: single sums, parameter scans, identity-suite
verification, sieve tables, relevance-region emission, and window
optimization, all with machine-readable output.

Exit codes: 0 ok, 1 verification failure, 2 invalid arguments, 3 budget
refusal.  Scans are deterministic given --seed; random residues come from
a splitmix 64-bit stream so output is reproducible across platforms.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, TextIO

import numpy as np

from . import bounds, decomp, optimizer, sums
from .arith import floor_int, is_prime
from .sieve import ResourceLimitError, build_sieve, psi

CSV_VERSION_LINE = "# friable-sums v1"
EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator (splitmix stream), platform independent."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        lim = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < lim:
                return v % n

    def unit_mod(self, q: int) -> int:
        """Uniform draw from the units modulo q (0 for q = 1)."""
        if q == 1:
            return 0
        while True:
            a = 1 + self.below(q - 1)
            if math.gcd(a, q) == 1:
                return a


def cell_rng(seed: int, index: int) -> SplitMix64:
    """Independent per-cell stream: scan cells draw identically no matter
    how work is scheduled across threads.
    """
    return SplitMix64((seed ^ ((index + 1) * _GOLDEN)) & _MASK64)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def parse_grid(spec: str) -> tuple[str, object]:
    """Grid syntax: explicit "1e5,1e6,1e7", geometric "geom:lo:hi:count",
    or x-linked "x^0.6" (value derived from the row's x).
    """
    spec = spec.strip()
    if spec.startswith("x^"):
        return "powx", float(spec[2:])
    if spec.startswith("geom:"):
        _, lo, hi, count = spec.split(":")
        lo_f, hi_f, n = float(lo), float(hi), int(count)
        if n < 1 or lo_f <= 0 or hi_f < lo_f:
            raise ValueError(f"bad geometric grid {spec!r}")
        if n == 1:
            return "values", [lo_f]
        ratio = (hi_f / lo_f) ** (1.0 / (n - 1))
        return "values", [lo_f * ratio**i for i in range(n)]
    vals = [float(tok) for tok in spec.split(",") if tok]
    if not vals:
        raise ValueError(f"empty grid {spec!r}")
    return "values", vals


def resolve_grid(grid: tuple[str, object], x: float) -> list[float]:
    kind, payload = grid
    if kind == "powx":
        return [x**payload]
    return list(payload)


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _emit(lines: Iterable[str], out: TextIO) -> None:
    for line in lines:
        out.write(line + "\n")


# ---------------------------------------------------------------------------
# sum / scan
# ---------------------------------------------------------------------------

SCAN_COLUMNS = ["x", "y", "q", "a", "nu", "abs_S", "psi"]
SCAN_COLUMNS += [f"envelope_{n}" for n in bounds.ENVELOPE_NAMES]
SCAN_COLUMNS += [f"ratio_{n}" for n in bounds.ENVELOPE_NAMES]


def _report_row(rep: bounds.BoundReport) -> dict[str, str]:
    p = rep.params
    row = {
        "x": _fmt(p.x),
        "y": _fmt(p.y),
        "q": str(p.q),
        "a": str(p.a),
        "nu": str(p.nu),
        "abs_S": _fmt(rep.exact_abs),
        "psi": str(rep.psi),
    }
    for name in bounds.ENVELOPE_NAMES:
        row[f"envelope_{name}"] = _fmt(rep.envelopes[name])
        row[f"ratio_{name}"] = _fmt(rep.ratios[name])
    return row


def cmd_sum(args: argparse.Namespace) -> int:
    try:
        params = sums.SumParams(
            x=args.x, y=args.y, q=args.q, a=args.a, nu=args.nu, theta=args.theta
        )
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = bounds.report(params, eps=args.eps, delta=args.delta, threads=args.threads)
    row = _report_row(rep)
    row["re_S"] = _fmt(rep.exact.value.real)
    row["im_S"] = _fmt(rep.exact.value.imag)
    cols = ["x", "y", "q", "a", "nu", "re_S", "im_S", "abs_S", "psi"]
    cols += [f"envelope_{n}" for n in bounds.ENVELOPE_NAMES]
    cols += [f"ratio_{n}" for n in bounds.ENVELOPE_NAMES]
    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            _emit([json.dumps({c: row[c] for c in cols})], out)
        else:
            _emit([CSV_VERSION_LINE, ",".join(cols), ",".join(row[c] for c in cols)], out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_sieve(args: argparse.Namespace) -> int:
    try:
        xg = parse_grid(args.x_grid)
        yg = parse_grid(args.y_grid)
    except ValueError as exc:
        print(f"invalid grid: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for x in resolve_grid(xg, 0.0):
        for y in resolve_grid(yg, x):
            rows.append((x, y, psi(x, y)))
    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            _emit(
                [json.dumps([{"x": x, "y": y, "psi": c} for x, y, c in rows])], out
            )
        else:
            lines = [CSV_VERSION_LINE, "x,y,psi"]
            lines += [f"{_fmt(x)},{_fmt(y)},{c}" for x, y, c in rows]
            _emit(lines, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


@dataclass(frozen=True)
class ScanSpec:
    """Grid specification for a bound-ratio scan: x/y/q grids, residue
    selection (fixed, or k seeded random units per cell), exponent, seed.
    """

    x_grid: tuple[str, object]
    y_grid: tuple[str, object]
    q_grid: tuple[str, object]
    fixed_a: int
    random_a: int  # 0 selects the fixed residue
    nu: int
    seed: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ScanSpec":
        return cls(
            x_grid=parse_grid(args.x_grid),
            y_grid=parse_grid(args.y_grid),
            q_grid=parse_grid(args.q_grid),
            fixed_a=args.a,
            random_a=args.random_a,
            nu=args.nu,
            seed=args.seed,
        )

    def cells(self) -> list[sums.SumParams]:
        """Grid cells in emission order; random residues are drawn from a
        per-cell stream, so the list is independent of any scheduling.
        """
        out: list[sums.SumParams] = []
        index = 0
        for x in resolve_grid(self.x_grid, 0.0):
            for y in resolve_grid(self.y_grid, x):
                for q_raw in resolve_grid(self.q_grid, x):
                    q = max(1, floor_int(q_raw))
                    if self.random_a:
                        rng = cell_rng(self.seed, index)
                        a_values = [rng.unit_mod(q) for _ in range(self.random_a)]
                    else:
                        if math.gcd(self.fixed_a, q) != 1:
                            index += 1
                            continue  # q values are coprime-filtered against a
                        a_values = [self.fixed_a]
                    index += 1
                    for a in a_values:
                        out.append(sums.SumParams(x=x, y=y, q=q, a=a, nu=self.nu))
        return out


def _diag_lines(rows: list[dict[str, str]]) -> list[str]:
    lines = []
    for name in bounds.ENVELOPE_NAMES:
        col = f"ratio_{name}"
        vals = [float(r[col]) for r in rows]
        mono = all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
        lines.append(
            f"# diag {col} nonincreasing={mono} values=" + ",".join(_fmt(v) for v in vals)
        )
    return lines


def cmd_scan(args: argparse.Namespace) -> int:
    try:
        cells = ScanSpec.from_args(args).cells()
    except ValueError as exc:
        print(f"invalid scan spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    budget_cost = sum(floor_int(p.x) for p in cells)
    if budget_cost > args.budget:
        print(
            f"scan refused: estimated {budget_cost} summed terms exceed budget "
            f"{int(args.budget)} (raise --budget to override)",
            file=sys.stderr,
        )
        return EXIT_BUDGET

    def run(p: sums.SumParams) -> dict[str, str]:
        return _report_row(bounds.report(p, eps=args.eps, delta=args.delta))

    if args.threads > 1 and len(cells) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(run, cells))
    else:
        rows = [run(p) for p in cells]

    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            _emit([json.dumps(rows)], out)
        else:
            lines = [CSV_VERSION_LINE, ",".join(SCAN_COLUMNS)]
            lines += [",".join(r[c] for c in SCAN_COLUMNS) for r in rows]
            lines += _diag_lines(rows)
            _emit(lines, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

def _suite_buchstab(args) -> tuple[bool, str]:
    x, y, r = args.x or 1e4, args.y or 25.0, args.r or 3
    rng = cell_rng(args.seed, 0)
    for _ in range(3):
        q = 2 + rng.below(997)
        a = rng.unit_mod(q)
        f = _phase_map(q, a)
        exp = decomp.buchstab_expand(f, x, y, r)
        if args.sabotage and exp.corrections:
            exp = decomp.BuchstabExpansion(
                exp.x, exp.y, exp.r, exp.ordering, exp.main,
                (-exp.corrections[0],) + exp.corrections[1:],
            )
        direct = sums.sum_linear(sums.SumParams(x=x, y=y, q=q, a=a)).value
        err = abs(exp.recombined() - direct) / max(1.0, abs(direct))
        if err > 1e-9:
            return False, f"x={x} y={y} r={r} q={q} a={a}: recombination error {err:.3g}"
    return True, f"x={x} y={y} r={r}: recombination exact on 3 seeded (a, q)"


def _phase_map(q: int, a: int) -> Callable[[np.ndarray], np.ndarray]:
    def f(n: np.ndarray) -> np.ndarray:
        ang = (2.0 * math.pi / q) * ((a % q) * (n % q) % q)
        return np.cos(ang) + 1j * np.sin(ang)

    return f


def _suite_wsplit(args) -> tuple[bool, str]:
    n_max = int(args.x or 20000)
    ws = (3.0, 10.0, 50.0)
    sieve = build_sieve(1, n_max)
    for w in ws:
        for n in range(math.ceil(w), n_max + 1):
            c = decomp.count_admissible_splits(n, w, sieve)
            if c != 1:
                return False, f"n={n} w={w}: {c} admissible splits (expected 1)"
    return True, f"unique splits for all n <= {n_max}, w in {ws}"


def _suite_partition(args) -> tuple[bool, str]:
    x, y, w = args.x or 1e4, args.y or 10.0, 10.0
    direct, regrouped = decomp.split_partition_sums(_phase_map(101, 7), x, y, w)
    err = abs(direct - regrouped) / max(1.0, abs(direct))
    if err > 1e-9:
        return False, f"x={x} y={y} w={w}: partition defect {err:.3g}"
    return True, f"x={x} y={y} w={w}: split partition exact"


def _suite_vaughan(args) -> tuple[bool, str]:
    n_max = int(args.x or 2000)
    bad = decomp.first_vaughan_counterexample(n_max, 10.0, 20.0)
    if bad is not None:
        return False, f"smallest failing n={bad} (n_max={n_max}, u=10, v=20)"
    return True, f"identity holds on (20, {n_max}]"


def _suite_heath_brown(args) -> tuple[bool, str]:
    n_max = int(args.x or 2000)
    z = 13.0
    bad = decomp.first_heath_brown_counterexample(n_max, 3, z)
    if bad is not None:
        return False, f"smallest failing n={bad} (n_max={n_max}, J=3, z={z})"
    return True, f"identity holds up to {n_max} (J=3, z={z})"


def _suite_regroup(args) -> tuple[bool, str]:
    x, y = args.x or 2000.0, args.y or 7.0
    f = _phase_map(5, 1)
    weights = decomp.bilinear_regroup(2, x, y)
    direct = decomp.relaxed_tuple_sum(2, x, y, f)
    grouped = decomp.regrouped_tuple_sum(weights, f)
    err = abs(direct - grouped) / max(1.0, abs(direct))
    if err > 1e-9:
        return False, f"x={x} y={y}: regrouping defect {err:.3g}"
    return True, f"x={x} y={y}: separable regrouping exact ({weights.diagonal_terms} diagonal terms)"


def _suite_weil(args) -> tuple[bool, str]:
    q_max = int(args.x or 199)
    for q in range(2, q_max + 1):
        if not is_prime(q):
            continue
        for nu in range(2, 7):
            for a in range(1, min(q - 1, 20) + 1):
                excess = sums.weil_envelope_violation(q, a, nu)
                if excess is not None:
                    return False, f"q={q} nu={nu} a={a}: envelope exceeded by {excess:.3g}"
    return True, f"complete-sum envelope holds for all primes q <= {q_max}, nu in 2..6"


def _suite_optimizer(args) -> tuple[bool, str]:
    rng = cell_rng(args.seed, 1)
    count = 200
    for _ in range(count):
        alpha = rng.below(10**9) / 1e9
        beta = rng.below(10**9) / 1e9
        omega, kap = optimizer.optimal_omega(alpha, beta)
        o2, k2 = optimizer.oracle_optimal_omega(alpha, beta, step=1e-3)
        if abs(omega - o2) > 2e-3 or abs(kap - k2) > 1e-3:
            return False, f"alpha={alpha:.6f} beta={beta:.6f}: closed form ({omega:.6f}, {kap:.6f}) vs grid ({o2:.6f}, {k2:.6f})"
        if abs(optimizer.kappa(omega, alpha, beta) - omega / 2.0) > 1e-12:
            return False, f"alpha={alpha:.6f} beta={beta:.6f}: kappa != omega/2"
    return True, f"closed form matches grid oracle on {count} seeded points"


SUITES = {
    "buchstab": _suite_buchstab,
    "wsplit": _suite_wsplit,
    "partition": _suite_partition,
    "vaughan": _suite_vaughan,
    "heath-brown": _suite_heath_brown,
    "regroup": _suite_regroup,
    "weil": _suite_weil,
    "optimizer": _suite_optimizer,
}


def cmd_verify(args: argparse.Namespace) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        ok, detail = SUITES[name](args)
        print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
        failed = failed or not ok
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# regions / optimize
# ---------------------------------------------------------------------------

def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def cmd_regions(args: argparse.Namespace) -> int:
    regions = optimizer.figure1_regions(eps_grid=args.eps_grid)
    payload = {
        name: [[_frac_str(a), _frac_str(b)] for a, b in poly]
        for name, poly in regions.polygons.items()
    }
    out, close = _open_out(args.output)
    try:
        _emit([json.dumps(payload, indent=2)], out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    try:
        omega, kap = optimizer.optimal_omega(args.alpha, args.beta)
    except optimizer.TrivialRegimeError as exc:
        print(json.dumps({"alpha": args.alpha, "beta": args.beta, "trivial": True,
                          "reason": str(exc)}))
        return EXIT_OK
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = {"alpha": args.alpha, "beta": args.beta, "omega": omega, "kappa": kap,
               "trivial": False}
    if args.beta <= 1.0:
        payload["regime"] = optimizer.two_peaks_regime(args.alpha, args.beta).value
    print(json.dumps(payload))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friable-sums",
        description="Exponential sums over smooth integers: exact sums, bound "
        "envelopes, identity verification, and exponent optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_sum_flags(sp):
        sp.add_argument("--x", type=float, required=True)
        sp.add_argument("--y", type=float, required=True)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--a", type=int, default=1)
        sp.add_argument("--nu", type=int, default=1)
        sp.add_argument("--theta", type=float, default=None)
        sp.add_argument("--eps", type=float, default=0.01)
        sp.add_argument("--delta", type=float, default=0.05)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", default=None)

    sp = sub.add_parser("sum", help="evaluate one sum and its bound report")
    common_sum_flags(sp)
    sp.set_defaults(func=cmd_sum)

    sp = sub.add_parser("sieve", help="emit a psi(x, y) table")
    sp.add_argument("--x-grid", required=True)
    sp.add_argument("--y-grid", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("scan", help="bound-ratio scan over an (x, y, q, a) grid")
    sp.add_argument("--x-grid", required=True)
    sp.add_argument("--y-grid", required=True)
    sp.add_argument("--q-grid", required=True)
    sp.add_argument("--a", type=int, default=1, help="fixed residue (default)")
    sp.add_argument(
        "--random-a", type=int, default=0, metavar="K",
        help="draw K seeded random units mod q per cell instead of --a",
    )
    sp.add_argument("--nu", type=int, default=1)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--budget", type=float, default=1e10,
                    help="refuse scans whose summed term estimate exceeds this")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run the identity verification suites")
    sp.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--y", type=float, default=None)
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sabotage", action="store_true",
                    help="flip one expansion term (harness self-test)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("regions", help="emit the relevance-region polygons as JSON")
    sp.add_argument("--eps-grid", type=float, default=0.01)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_regions)

    sp = sub.add_parser("optimize", help="closed-form window placement at (alpha, beta)")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.set_defaults(func=cmd_optimize)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
