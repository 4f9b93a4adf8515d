"""Exact SPR distortion lower bounds for complete ternary trees.

DRL(h, alpha) bounds how far the root's contraction target must sit from the
terminals outside its subtree in any distortion-alpha minor of the height-h
complete ternary tree with unit edges and the leaves as terminals:

    DRL(0, alpha) = 0
    DRL(1, alpha) = +infinity if alpha < 2 else 2
    DRL(h, alpha) = min over l in [0, h-1] with (DRL(h-l-1, alpha) + 2h)/(h-l) <= alpha
                    of DRL(h-l-1, alpha) + 2h
                    (+infinity when no l qualifies)

The distortion bound alpha_h is the least alpha at which the top level becomes
feasible, i.e. min{alpha : DRL(h, alpha) < +infinity}; that equals the min-max
form over alpha and l because the inner minimum drops to alpha exactly when
some l satisfies the feasibility constraint, and DRL is nonincreasing in
alpha. DRL values are always even integers, so feasibility tests run in pure
integer arithmetic; the minimizing alpha always has denominator at most h,
which lets a Stern-Brocot descent find it exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

from .errors import MinorforgeError
from .rational import INF, SymbolicInfinity

# (alpha.numerator, alpha.denominator) -> DRL row [h=0, 1, ...], None meaning +infinity
_ROWS: dict[tuple[int, int], list[int | None]] = {}


def _row(h: int, alpha: Fraction) -> list[int | None]:
    key = (alpha.numerator, alpha.denominator)
    row = _ROWS.get(key)
    if row is None:
        row = [0]
        _ROWS[key] = row
    if h >= 1 and len(row) == 1:
        row.append(2 if alpha >= 2 else None)
    num, den = key
    for hh in range(len(row), h + 1):
        best: int | None = None
        double = 2 * hh
        for l in range(hh):
            v = row[hh - l - 1]
            if v is None:
                continue
            cand = v + double
            if cand * den <= num * (hh - l) and (best is None or cand < best):
                best = cand
        row.append(best)
    return row


def drl(h: int, alpha: Fraction | int) -> Fraction | SymbolicInfinity:
    """Evaluate the recurrence exactly; +infinity is the symbolic INF value."""
    if h < 0:
        raise MinorforgeError(f"height must be nonnegative, got {h}")
    alpha = Fraction(alpha)
    if alpha < 1:
        raise MinorforgeError(f"distortion must be >= 1, got {alpha}")
    value = _row(h, alpha)[h]
    return INF if value is None else Fraction(value)


def _stern_brocot_min(pred: Callable[[Fraction], bool], max_den: int) -> Fraction:
    """Least rational satisfying a monotone predicate, given that the minimum
    has denominator <= max_den. Mediant descent with run doubling."""
    if pred(Fraction(1)):
        return Fraction(1)
    lo = (1, 1)  # pred false
    hi = (1, 0)  # stands for +infinity; pred true beyond any candidate

    def value(pair: tuple[int, int]) -> Fraction:
        return Fraction(pair[0], pair[1])

    while lo[1] + hi[1] <= max_den:
        mediant = (lo[0] + hi[0], lo[1] + hi[1])
        if pred(value(mediant)):
            j = 1  # largest j with pred(j*lo + hi) true stays within the cap
            while True:
                cand = (lo[0] * 2 * j + hi[0], lo[1] * 2 * j + hi[1])
                if cand[1] > max_den or not pred(value(cand)):
                    break
                j *= 2
            step = j // 2
            while step:
                cand = (lo[0] * (j + step) + hi[0], lo[1] * (j + step) + hi[1])
                if cand[1] <= max_den and pred(value(cand)):
                    j += step
                step //= 2
            hi = (lo[0] * j + hi[0], lo[1] * j + hi[1])
        else:
            j = 1  # largest j with pred(lo + j*hi) false stays within the cap
            while True:
                cand = (lo[0] + hi[0] * 2 * j, lo[1] + hi[1] * 2 * j)
                if cand[1] > max_den or pred(value(cand)):
                    break
                j *= 2
            step = j // 2
            while step:
                cand = (lo[0] + hi[0] * (j + step), lo[1] + hi[1] * (j + step))
                if cand[1] <= max_den and not pred(value(cand)):
                    j += step
                step //= 2
            lo = (lo[0] + hi[0] * j, lo[1] + hi[1] * j)
    return value(hi)


def alpha_lower(h: int) -> Fraction:
    """The exact distortion lower bound for the height-h complete ternary tree."""
    if h < 2:
        raise MinorforgeError(f"height must be >= 2, got {h}")

    def feasible(alpha: Fraction) -> bool:
        return _row(h, alpha)[h] is not None

    return _stern_brocot_min(feasible, max_den=h)


def alpha_table(heights: Iterable[int]) -> dict[int, Fraction]:
    return {h: alpha_lower(h) for h in heights}
