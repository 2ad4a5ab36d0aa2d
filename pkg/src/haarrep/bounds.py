"""Explicit bound formulas for the Haar graph and m-Cayley counting results.

``f_eps`` and ``h_eps`` are evaluated in double precision working with
``log2 n``; the growth condition that defines ``n_eps`` is evaluated with
mpmath so it stays exact enough near its failure boundary.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import mpmath

EXTENDED_PREC = 512  # bits; keeps n up to ~2^400 exact with room for the logs
DEFAULT_SCAN_CEILING = 2 ** 96
VERIFY_POINTS = 64


class BoundsError(ValueError):
    pass


def _check_domain(n: int, eps: float, m: int = 1) -> None:
    if n < 2:
        raise BoundsError("n must be at least 2")
    if not 0 < eps <= 0.1:
        raise BoundsError("eps must lie in (0, 0.1]")
    if m < 1:
        raise BoundsError("m must be at least 1")


def _main_term(n: int, eps: float) -> float:
    L = math.log2(n)
    return 2.0 ** ((0.5 - eps) * L) / (24.0 * L ** 2.5)


def f_eps(n: int, eps: float) -> float:
    L = math.log2(n)
    return _main_term(n, eps) - 0.75 * L * L - 15.0


def h_eps(n: int, eps: float) -> float:
    L = math.log2(n)
    return _main_term(n, eps) - math.log2(2 * n) ** 2 - 0.75 * L * L - 2.0 * L - 15.0


def msr_bound(n: int, m: int) -> float:
    """Lower bound ``1 - m^2/sqrt(n)`` on the proportion of semiregular representations."""
    return 1.0 - m * m / math.sqrt(n)


def growth_margin(n: int, eps) -> mpmath.mpf:
    """``n^(1-eps)`` minus the left side of the growth condition, in extended precision.

    The condition holds at ``n`` exactly when the margin is positive.
    """
    with mpmath.workprec(EXTENDED_PREC):
        e = mpmath.mpf(str(eps))  # decimal eps, not its binary float
        x = mpmath.mpf(n)
        L = mpmath.log(x, 2)
        a = x ** (mpmath.mpf("0.5") - e) + L
        lhs = (6 + 2 * L) * a * a + (1 - L) * a + L * L + 2 * L
        return +(x ** (1 - e) - lhs)


def growth_condition_holds(n: int, eps) -> bool:
    return growth_margin(n, eps) > 0


@dataclass
class BoundReport:
    n: int
    eps: float
    m: int
    f_eps: float
    h_eps: float
    haar_bound_log2: float  # log2 of 2^(n - f_eps)
    msr_bound: float
    growth_holds: bool
    haar_bound_vacuous: bool
    msr_bound_vacuous: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n"] = str(self.n)
        return d


def eval_bounds(n: int, eps: float, m: int = 1) -> BoundReport:
    _check_domain(n, eps, m)
    f = f_eps(n, eps)
    mb = msr_bound(n, m)
    return BoundReport(
        n=n, eps=eps, m=m, f_eps=f, h_eps=h_eps(n, eps),
        haar_bound_log2=float(n) - f, msr_bound=mb,
        growth_holds=growth_condition_holds(n, eps),
        # 2^(n-f) only says something once f is positive
        haar_bound_vacuous=f <= 0, msr_bound_vacuous=mb <= 0,
    )


@dataclass
class NEpsResult:
    eps: float
    n_eps: int
    last_failure: int
    scan_ceiling: int
    verified_points: int

    def to_dict(self) -> dict:
        return {"eps": self.eps, "n_eps": str(self.n_eps), "log2_n_eps": math.log2(self.n_eps),
                "last_failure": str(self.last_failure), "scan_ceiling": str(self.scan_ceiling),
                "verified_points": self.verified_points}


def find_n_eps(eps: float, ceiling: int = DEFAULT_SCAN_CEILING, steps_per_octave: int = 16) -> NEpsResult:
    """One more than the largest ``n`` at which the growth condition fails.

    A geometric scan (``steps_per_octave`` points per doubling) up to
    ``ceiling`` brackets the last failure; integer bisection pins it down,
    and the condition is then checked at 64 geometrically spaced points
    between the answer and ``ceiling``.
    """
    if not 0 < eps <= 0.1:
        raise BoundsError("eps must lie in (0, 0.1]")
    top = math.log2(ceiling)
    with mpmath.workprec(EXTENDED_PREC):
        grid = sorted({max(2, int(mpmath.floor(mpmath.power(2, mpmath.mpf(k) / steps_per_octave))))
                       for k in range(steps_per_octave, int(top * steps_per_octave) + 1)} | {ceiling})
    holds = [growth_condition_holds(x, eps) for x in grid]
    if not holds[-1]:
        raise BoundsError(f"condition still fails at the scan ceiling 2^{top:g}")
    fails = [i for i, h in enumerate(holds) if not h]
    if not fails:
        lo = 1  # holds everywhere on the grid; n = 2 is the first candidate
        last = 1
    else:
        i = fails[-1]
        lo, hi = grid[i], grid[i + 1]  # fails at lo, holds at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if growth_condition_holds(mid, eps):
                hi = mid
            else:
                lo = mid
        last = lo
    n_eps = last + 1
    a, b = math.log2(n_eps), top
    checked = 0
    with mpmath.workprec(EXTENDED_PREC):
        for k in range(VERIFY_POINTS):
            x = int(mpmath.floor(mpmath.power(2, a + (b - a) * k / (VERIFY_POINTS - 1))))
            x = min(max(x, n_eps), ceiling)
            if not growth_condition_holds(x, eps):
                raise BoundsError(f"condition fails at {x} above the detected boundary")
            checked += 1
    return NEpsResult(eps, n_eps, last, ceiling, checked)
