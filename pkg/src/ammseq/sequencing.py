"""Sequencing rules: who gets to order a block of pool trades, and how.

The block producer picks which orders enter a block, but the execution
ordering is constrained by a sequencing rule.  Two rules live here:

* `arbitrary_sequence` -- the status quo: any permutation goes.
* `greedy_sequence` -- while buys and sells both remain, the next order's
  side is forced by comparing the current token-1 reserve with the
  block-initial one: reserves at or above the starting level admit a buy,
  reserves below it demand a sell.  Once one side runs out, the rest may
  be appended in any order.

`verify_greedy` checks a finished ordering against the rule in one pass,
so anyone can audit a block without rerunning the producer's search.
When the token-1 reserve sits exactly at its starting level, both sides
are equally well off relative to the start, so the verifier admits
either side there; the deterministic sequencer itself takes a buy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .exchange import Order, PoolState, Potential, _step

TIE_BREAKS = ("lowest_index", "highest_quantity", "random")


class InvalidPermutation(ValueError):
    """The proposed ordering is not a permutation of the block."""


class TooLarge(ValueError):
    """Block too big for exhaustive enumeration."""


@dataclass(frozen=True)
class Block:
    """Orders with stable indices plus who owns each one (agent 0 is the
    block producer)."""

    orders: tuple[Order, ...]
    owners: tuple[int, ...]

    def __post_init__(self):
        if len(self.orders) != len(self.owners):
            raise ValueError("orders and owners must have equal length")
        if any(a < 0 for a in self.owners):
            raise ValueError("agent ids must be nonnegative")

    def __len__(self):
        return len(self.orders)

    def buy_indices(self):
        return [i for i, o in enumerate(self.orders) if o.is_buy]

    def sell_indices(self):
        return [i for i, o in enumerate(self.orders) if not o.is_buy]


def _pick(candidates, block, tie_break, rng):
    if tie_break == "lowest_index":
        return min(candidates)
    if tie_break == "highest_quantity":
        return max(candidates, key=lambda i: (block.orders[i].q, -i))
    if tie_break == "random":
        return rng.choice(candidates)
    raise ValueError(f"unknown tie_break {tie_break!r}")


def _order_remainder(candidates, block, tie_break, rng):
    if tie_break == "lowest_index":
        return sorted(candidates)
    if tie_break == "highest_quantity":
        return sorted(candidates, key=lambda i: (-block.orders[i].q, i))
    if tie_break == "random":
        rest = list(candidates)
        rng.shuffle(rest)
        return rest
    raise ValueError(f"unknown tie_break {tie_break!r}")


def greedy_sequence(
    pot: Potential,
    x0: PoolState,
    block: Block,
    tie_break: str = "lowest_index",
    seed: int = 0,
    epsilon: float = 0.0,
) -> tuple[int, ...]:
    """Sequence a block under the greedy rule; returns block indices in
    execution order.

    States are simulated as the ordering is built.  While buys and sells
    are both outstanding, a buy is appended when the simulated token-1
    reserve is at or above its starting level and a sell otherwise; the
    tie_break policy chooses within the mandated side.  Orders that fail
    to execute still take their slot with the reserves unchanged.  Each
    order is executed exactly once, so sequencing costs O(len(block))
    executions.

    The reserve comparison is exact by default (both sides of it come
    from the same arithmetic path); pass `epsilon` > 0 to treat
    reserves within that distance of the start as at the start.
    """
    rng = random.Random(seed)
    buys = block.buy_indices()
    sells = block.sell_indices()
    seq = []
    x1, x2 = x0.x1, x0.x2
    while buys and sells:
        side = buys if x1 >= x0.x1 - epsilon else sells
        i = _pick(side, block, tie_break, rng)
        side.remove(i)
        seq.append(i)
        o = block.orders[i]
        _, _, x1, x2 = _step(pot, x1, x2, o.side, o.q, o.p)
    seq.extend(_order_remainder(buys or sells, block, tie_break, rng))
    return tuple(seq)


def verify_greedy(
    pot: Potential, x0: PoolState, orders: Sequence[Order], epsilon: float = 0.0
) -> bool:
    """Check whether an executed sequence of orders could have come from
    the greedy rule at initial state `x0`.

    Walks the sequence once: a step whose remaining suffix still mixes
    buys and sells must match the side mandated by the simulated reserve
    (strictly above the starting token-1 level: buys only; strictly
    below: sells only; exactly at it: either).  A same-side suffix is
    always acceptable.  `epsilon` widens the at-the-start band just as in
    `greedy_sequence`.
    """
    n = len(orders)
    if n == 0:
        return True
    # same_from[t]: orders[t:] are all of one side
    same_from = [False] * n
    same_from[n - 1] = True
    for t in range(n - 2, -1, -1):
        same_from[t] = same_from[t + 1] and orders[t].side == orders[t + 1].side
    x1, x2 = x0.x1, x0.x2
    for t, o in enumerate(orders):
        if same_from[t]:
            return True
        if x1 > x0.x1 + epsilon and not o.is_buy:
            return False
        if x1 < x0.x1 - epsilon and o.is_buy:
            return False
        _, _, x1, x2 = _step(pot, x1, x2, o.side, o.q, o.p)
    return True


def arbitrary_sequence(block: Block, permutation: Iterable[int]) -> tuple[int, ...]:
    """The unconstrained baseline: returns the given permutation after
    validating it covers the block exactly once."""
    seq = tuple(permutation)
    if sorted(seq) != list(range(len(block))):
        raise InvalidPermutation(f"{seq} is not a permutation of 0..{len(block) - 1}")
    return seq


def enumerate_greedy_orderings(
    pot: Potential,
    x0: PoolState,
    block: Block,
    max_orders: int = 8,
) -> set[tuple[int, ...]]:
    """All permutations of the block the greedy verifier accepts.

    Exhaustive by construction, so only sensible for small blocks; use it
    as an oracle when reasoning about what the rule does and does not
    permit.
    """
    n = len(block)
    if n > max_orders:
        raise TooLarge(f"block of {n} orders exceeds max_orders={max_orders}")
    accepted = set()
    for perm in permutations(range(n)):
        if verify_greedy(pot, x0, [block.orders[i] for i in perm]):
            accepted.add(perm)
    return accepted
