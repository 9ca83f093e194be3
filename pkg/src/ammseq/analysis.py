"""Runtime checks of the pricing structure a well-behaved pool must have.

For a strictly increasing, quasiconcave potential, the reachable states
on a level set form the graph of a decreasing convex function f (token-2
reserve as a function of token-1 reserve).  Three checkable consequences
follow, and each gets an oracle here:

* pricing monotonicity -- at the state with more token 1, a buy pays no
  more and a sell receives no more;
* slope monotonicity -- the secant slope of f is nondecreasing in each
  endpoint;
* duality -- between any two states on a level set, one full side of the
  market (all buys, or all sells) does at least as well at the first
  state as at the second, decided purely by comparing token-1 reserves.

These run against concrete states sampled by the caller; they are the
workhorses of the randomized suites in `ammseq.suites`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .exchange import (
    TOL_CMP,
    Order,
    PoolState,
    Potential,
    generator_value,
    payment_for_buy,
    proceeds_for_sell,
)
from .game import better_execution


class ProbeViolation(RuntimeError):
    """A probe order contradicted the duality classification; indicates a
    bug (or a potential violating the model assumptions)."""


class DualitySide(enum.Enum):
    BUYS_BETTER_AT_X = "buys_better_at_x"
    SELLS_BETTER_AT_X = "sells_better_at_x"


@dataclass(frozen=True)
class SlopeSample:
    """One secant slope of the level-set curve: r = (f(y) - f(x))/(y - x)."""

    x: float
    y: float
    r: float


def level_state(pot: Potential, c: float, x1: float) -> PoolState:
    """The state on level set c with token-1 reserve x1."""
    return PoolState(x1, generator_value(pot, c, x1))


def check_pricing_monotonicity(
    pot: Potential, c: float, x1_low: float, x1_high: float, q: float, tol: float = TOL_CMP
) -> bool:
    """Both pricing inequalities between the two level-set states:
    the higher-reserve state pays at most as much to buy q and receives
    at most as much for selling q.  Equal reserves pass trivially."""
    if x1_low > x1_high:
        raise ValueError("need x1_low <= x1_high")
    low = level_state(pot, c, x1_low)
    high = level_state(pot, c, x1_high)
    buy_ok = payment_for_buy(pot, high, q) <= payment_for_buy(pot, low, q) + tol
    sell_ok = proceeds_for_sell(pot, high, q) <= proceeds_for_sell(pot, low, q) + tol
    return buy_ok and sell_ok


def check_duality(
    pot: Potential,
    c: float,
    x: PoolState,
    x_prime: PoolState,
    probe_orders: Sequence[Order],
) -> DualitySide:
    """Classify which side of the market prefers `x` over `x_prime` and
    assert every probe of that side agrees.

    States with more token 1 favor buys; ties go to the buy side by
    convention (at equal reserves both classifications hold).  A probe of
    the relevant side that does *not* get at least as good an execution
    at `x` raises ProbeViolation.
    """
    if x.x1 >= x_prime.x1:
        side = DualitySide.BUYS_BETTER_AT_X
        want_buy = True
    else:
        side = DualitySide.SELLS_BETTER_AT_X
        want_buy = False
    for order in probe_orders:
        if order.is_buy != want_buy:
            continue
        if not better_execution(pot, order, x, x_prime):
            raise ProbeViolation(f"{order} prefers {x_prime} over {x} despite {side}")
    return side


def slope_samples(pot: Potential, c: float, xs: Sequence[float]) -> list[SlopeSample]:
    """Secant slopes of the level-set curve between consecutive sample
    points (xs must be strictly increasing)."""
    fs = [generator_value(pot, c, x) for x in xs]
    out = []
    for i in range(len(xs) - 1):
        dx = xs[i + 1] - xs[i]
        out.append(SlopeSample(xs[i], xs[i + 1], (fs[i + 1] - fs[i]) / dx))
    return out


def check_slope_monotone(
    pot: Potential, c: float, xs: Sequence[float], tol: float = TOL_CMP
) -> bool:
    """Secant-slope monotonicity of the level-set curve over all sampled
    pairs: for x <= z, R(x, y) <= R(z, y) and R(y, x) <= R(y, z).

    Equivalent to convexity of the curve on the sampled grid.  The grid
    must be strictly increasing.
    """
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("sample grid must be strictly increasing")
    fs = [generator_value(pot, c, x) for x in xs]

    def r(i, j):
        return (fs[j] - fs[i]) / (xs[j] - xs[i])

    n = len(xs)
    for j in range(n):
        prev = None
        for i in range(n):
            if i == j:
                continue
            s = r(min(i, j), max(i, j))
            if prev is not None and s < prev - tol:
                return False
            prev = s
    return True
