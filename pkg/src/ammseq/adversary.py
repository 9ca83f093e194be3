"""Constructive block-producer strategies against pool traders.

Two attacks are implemented:

* `plan_sandwich` -- front-run a user's limit buy with a producer buy
  sized so the user pays exactly their limit, then sell the front-run
  back.  Works on any pool whose buy payment diverges as a reserve is
  emptied (product and stable pools); on an additive pool the round trip
  nets exactly nothing.

* `impossibility_block` / `select_exploit` -- a block of identical
  market orders (n buys of 2 against n sells of 1 at reserves (4n, 4n))
  on a constant-product pool such that *every* execution ordering admits
  a profitable assignment: pick the buy executing at the highest
  token-1 reserve and two sells executing at reserves at least 2 lower,
  and owning those three orders yields token 2 for free.  No sequencing
  rule can dodge this, because the rule must order the block before
  knowing which orders the producer owns.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .exchange import (
    MAX_BISECT,
    TOL_ROOT,
    Order,
    PoolState,
    Potential,
    can_execute,
    execute_order,
    payment_for_buy,
)
from .sequencing import Block


class NotLiquidityPreserving(ValueError):
    """The pool's pricing does not diverge near depletion, so the
    front-run search has no bite."""


class UserOrderInfeasible(ValueError):
    """The targeted user order cannot execute at the given state."""


class NTooSmall(ValueError):
    """The universal-exploit construction needs at least three of each
    order."""


class CaseTwoReached(RuntimeError):
    """Fewer than two qualifying sells exist; provably impossible, so
    reaching this is a bug."""


@dataclass(frozen=True)
class SandwichPlan:
    """A front-run/back-run pair around a user buy.

    `w` is the slack left in the token-1 reserve: the front-run buys
    x1 - q - w, the minimum-w choice being the largest front-run that
    still lets the user's order execute (at which point the user pays
    their full limit).  front/back are None in the degenerate case where
    any nonzero front-run would knock the user out.
    """

    w: float
    front: Order | None
    back: Order | None
    predicted_profit: float

    def orders(self, user: Order) -> list[Order]:
        """The executable three-order (or degenerate one-order) sequence."""
        seq = []
        if self.front is not None:
            seq.append(self.front)
        seq.append(user)
        if self.back is not None:
            seq.append(self.back)
        return seq


def _user_payment_after_frontrun(pot, state, user, w):
    """Simulate (front-run buy of x1-q-w, then the user's order); returns
    the user's ExecResult."""
    size = state.x1 - user.q - w
    mid = state
    if size > 0:
        mid = execute_order(pot, state, Order.buy(size)).state
    return execute_order(pot, mid, user)


def plan_sandwich(pot: Potential, state: PoolState, user: Order) -> SandwichPlan:
    """Size the sandwich around a user limit buy at `state`.

    Bisects on the reserve slack w: small w means a huge front-run and an
    aborted user order, w = x1 - q means no front-run at all.  The
    boundary where the user barely executes is where they pay q*p, and
    the producer's take is q*p minus the standalone payment.
    """
    if not user.is_buy or user.p == float("inf"):
        raise ValueError("sandwich targets a buy order with a finite limit price")
    if pot.kind == "additive":
        raise NotLiquidityPreserving(
            "additive pools price 1:1 everywhere; a sandwich nets nothing"
        )
    if not can_execute(pot, state, user):
        raise UserOrderInfeasible(f"{user} cannot execute at {state}")
    q, p = user.q, user.p
    standalone = payment_for_buy(pot, state, q)
    hi = state.x1 - q
    if not _user_payment_after_frontrun(pot, state, user, hi).executed:
        # only possible through float fuzz at the no-front-run end
        raise UserOrderInfeasible(f"{user} does not survive even a zero front-run")
    lo = 0.0
    if _user_payment_after_frontrun(pot, state, user, lo).executed:
        # the limit is so loose the full front-run stays under it
        w = 0.0
    else:
        for _ in range(MAX_BISECT):
            if hi - lo <= TOL_ROOT:
                break
            mid = 0.5 * (lo + hi)
            if _user_payment_after_frontrun(pot, state, user, mid).executed:
                hi = mid
            else:
                lo = mid
        w = hi
    size = state.x1 - q - w
    front = Order.buy(size) if size > TOL_ROOT else None
    back = Order.sell(size) if size > TOL_ROOT else None
    return SandwichPlan(w, front, back, q * p - standalone)


@dataclass(frozen=True)
class ExploitSelection:
    """The three block orders whose ownership turns an ordering into
    risk-free producer profit, with the reserve-offset trace that
    justified the choice."""

    buy_index: int
    sell_indices: tuple[int, int]
    z_trace: tuple[float, ...]


def impossibility_block(n: int) -> tuple[PoolState, Block]:
    """Reserves (4n, 4n) and a block of n market Buy(2) plus n market
    Sell(1), each owned by its own user; reserves never run out, so every
    order in every permutation executes."""
    if n < 3:
        raise NTooSmall(f"need n >= 3, got {n}")
    x0 = PoolState(4.0 * n, 4.0 * n)
    orders = tuple(Order.buy(2.0) for _ in range(n)) + tuple(Order.sell(1.0) for _ in range(n))
    owners = tuple(range(1, 2 * n + 1))
    return x0, Block(orders, owners)


def select_exploit(
    pot: Potential, x0: PoolState, block: Block, ordering: Sequence[int]
) -> ExploitSelection:
    """Choose the producer's three orders for a sequenced block from
    `impossibility_block`.

    Tracks z_t, the token-1 offset from the starting reserve.  The buy is
    the one executing at the largest offset (the cheapest buy; lowest
    position on ties); with k that offset, any sell executing at an
    offset of at most k-2 beats the buy's average price, and two such
    sells always exist.  Owning that buy and those two sells nets zero
    token 1 and a strictly positive amount of token 2.
    """
    z = [0.0]
    state = x0
    for t, i in enumerate(ordering):
        res = execute_order(pot, state, block.orders[i])
        if not res.executed:
            raise ValueError(f"order {i} aborted at step {t}; block is not the intended construction")
        state = res.state
        z.append(state.x1 - x0.x1)
    buy_positions = [t for t, i in enumerate(ordering) if block.orders[i].is_buy]
    if not buy_positions:
        raise ValueError("block contains no buy orders")
    best = max(buy_positions, key=lambda t: (z[t], -t))
    k = z[best]
    qualifying = [
        t
        for t, i in enumerate(ordering)
        if not block.orders[i].is_buy and z[t] <= k - 2.0
    ]
    if len(qualifying) < 2:
        raise CaseTwoReached(
            f"only {len(qualifying)} sells execute at offset <= {k - 2.0}; "
            "the construction guarantees two"
        )
    a, b = qualifying[0], qualifying[1]
    return ExploitSelection(
        buy_index=ordering[best],
        sell_indices=(ordering[a], ordering[b]),
        z_trace=tuple(z),
    )


def side_patterns(n: int):
    """One representative index permutation per buy/sell placement of the
    `impossibility_block` orders (orders within a side are identical, so
    this covers every distinguishable ordering: C(2n, n) of them)."""
    total = 2 * n
    for buy_slots in combinations(range(total), n):
        buy_set = set(buy_slots)
        perm = []
        next_buy, next_sell = 0, n
        for slot in range(total):
            if slot in buy_set:
                perm.append(next_buy)
                next_buy += 1
            else:
                perm.append(next_sell)
                next_sell += 1
        yield tuple(perm)
