"""The trading game between users and a strategic block producer.

Users privately submit orders; the producer (agent 0, "the miner")
assembles them into a block, may add orders of its own, sequences the
block under a rule, and the pool executes the result.  This module runs
that game end to end and evaluates who gained what:

* per-agent utilities as token deltas (the agent side of each trade, so
  the negative of the pool's reserve change),
* execution-quality comparison of an order across two states,
* the core/tail split of an outcome: an order is in the core when it
  executed at least as well as it would have at the block-initial state,
* a per-user classification of greedy outcomes: a core order proves the
  user did no worse than trading alone ("isolation"); a tail order is
  checked to be a matter of indifference to the producer, by re-running
  the block without it and confirming the producer's utility did not
  improve by its presence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from .exchange import (
    TOL_CMP,
    ExecResult,
    Order,
    PoolState,
    Potential,
    can_execute,
    execute_order,
    payment_for_buy,
    proceeds_for_sell,
)
from .sequencing import Block, arbitrary_sequence, greedy_sequence


class UnknownAgent(ValueError):
    """Agent id is not a valid participant handle."""


class ClassificationViolation(RuntimeError):
    """Neither outcome certificate holds; indicates a bug, not a
    legitimate runtime state."""


class Classification(enum.Enum):
    ISOLATION = "isolation"
    INDIFFERENCE = "indifference"


@dataclass(frozen=True)
class UtilityVector:
    """An agent's net token deltas over a game."""

    d1: float
    d2: float

    def __add__(self, other):
        return UtilityVector(self.d1 + other.d1, self.d2 + other.d2)


ZERO_UTILITY = UtilityVector(0.0, 0.0)


def is_risk_free(u: UtilityVector) -> bool:
    """No token position got worse (up to comparison slack)."""
    return u.d1 >= -TOL_CMP and u.d2 >= -TOL_CMP


def is_profitable_risk_free(u: UtilityVector) -> bool:
    """Risk-free and strictly ahead in at least one token."""
    return is_risk_free(u) and max(u.d1, u.d2) > TOL_CMP


@dataclass(frozen=True)
class Outcome:
    """A fully executed block: initial state, ordering, and the state and
    execution result after every step."""

    x0: PoolState
    block: Block
    ordering: tuple[int, ...]
    states: tuple[PoolState, ...]
    results: tuple[ExecResult, ...]

    @property
    def final_state(self):
        return self.states[-1] if self.states else self.x0

    def order_at(self, t):
        return self.block.orders[self.ordering[t]]

    def state_before(self, t):
        return self.states[t - 1] if t > 0 else self.x0


@dataclass(frozen=True)
class CoreTail:
    """Positions (steps of the execution sequence) split by execution
    quality relative to the block-initial state."""

    core: frozenset
    tail: frozenset


def execute_ordering(
    pot: Potential, x0: PoolState, block: Block, ordering: Sequence[int]
) -> Outcome:
    """Execute the block's orders in the given index order from x0."""
    states = []
    results = []
    state = x0
    for i in ordering:
        res = execute_order(pot, state, block.orders[i])
        state = res.state
        states.append(state)
        results.append(res)
    return Outcome(x0, block, tuple(ordering), tuple(states), tuple(results))


def make_block(user_orders, miner_orders=()) -> Block:
    """Assemble a block from user and producer orders.

    `user_orders` entries are either plain Orders (agents assigned
    1, 2, ... in sequence) or (agent_id, Order) pairs.  Producer orders
    always belong to agent 0.
    """
    orders = []
    owners = []
    next_agent = 1
    for entry in user_orders:
        if isinstance(entry, Order):
            agent, order = next_agent, entry
            next_agent += 1
        else:
            agent, order = entry
            if agent == 0:
                raise ValueError("agent 0 is reserved for the block producer")
        orders.append(order)
        owners.append(agent)
    for order in miner_orders:
        orders.append(order)
        owners.append(0)
    return Block(tuple(orders), tuple(owners))


def run_game(
    pot: Potential,
    x0: PoolState,
    user_orders,
    miner_orders=(),
    rule: str = "greedy",
    tie_break: str = "lowest_index",
    seed: int = 0,
    permutation=None,
) -> Outcome:
    """Play one round: build the block, sequence it under `rule`
    ("greedy" or "arbitrary"), execute from x0, and return the trace."""
    block = make_block(user_orders, miner_orders)
    if rule == "greedy":
        ordering = greedy_sequence(pot, x0, block, tie_break=tie_break, seed=seed)
    elif rule == "arbitrary":
        if permutation is None:
            permutation = range(len(block))
        ordering = arbitrary_sequence(block, permutation)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return execute_ordering(pot, x0, block, ordering)


def agent_utility(outcome: Outcome, ownership: Mapping[int, int], agent: int) -> UtilityVector:
    """Net token deltas for one agent over the outcome.

    `ownership` maps block order index -> agent id.  Executed buys add
    (+q, -payment), executed sells add (-q, +proceeds); aborted orders
    contribute nothing, and an agent owning no sequenced order gets
    (0, 0) -- a censored user looks exactly like an absent one.
    """
    if not isinstance(agent, int) or isinstance(agent, bool) or agent < 0:
        raise UnknownAgent(f"agent ids are nonnegative ints, got {agent!r}")
    d1 = d2 = 0.0
    for t, i in enumerate(outcome.ordering):
        if ownership.get(i) != agent:
            continue
        res = outcome.results[t]
        if not res.executed:
            continue
        o = outcome.block.orders[i]
        if o.is_buy:
            d1 += o.q
            d2 -= res.payment
        else:
            d1 -= o.q
            d2 += res.payment
    return UtilityVector(d1, d2)


def miner_utility(outcome: Outcome) -> UtilityVector:
    return agent_utility(outcome, dict(enumerate(outcome.block.owners)), 0)


def better_execution(pot: Potential, order: Order, state: PoolState, ref: PoolState) -> bool:
    """Whether `order` does at least as well at `state` as at `ref`.

    True when the order fails at `ref`, or succeeds at both with a lower
    payment (buy) / higher proceeds (sell) at `state`, within slack.
    An order that fails at `state` but would have succeeded at `ref`
    compares worse.
    """
    if not can_execute(pot, ref, order):
        return True
    if not can_execute(pot, state, order):
        return False
    if order.is_buy:
        return payment_for_buy(pot, state, order.q) <= payment_for_buy(pot, ref, order.q) + TOL_CMP
    return proceeds_for_sell(pot, state, order.q) >= proceeds_for_sell(pot, ref, order.q) - TOL_CMP


def core_tail_decompose(pot: Potential, outcome: Outcome) -> CoreTail:
    """Split the outcome's steps into core (executed at least as well as
    at the initial state) and tail (the rest)."""
    core = set()
    tail = set()
    for t in range(len(outcome.ordering)):
        order = outcome.order_at(t)
        if better_execution(pot, order, outcome.state_before(t), outcome.x0):
            core.add(t)
        else:
            tail.add(t)
    return CoreTail(frozenset(core), frozenset(tail))


def classify_user_order(
    pot: Potential, outcome: Outcome, ownership: Mapping[int, int], agent: int
) -> Classification:
    """Classify how a greedy outcome treated one user's single order.

    ISOLATION: the order sits in the core, i.e. it executed at least as
    well as it would have at the block-initial state -- no worse than
    trading alone.

    INDIFFERENCE: the order sits in the tail; dropping it from the
    ordering is then re-executed to confirm the producer's utility does
    not fall (componentwise, within slack), i.e. the producer gained
    nothing from the order's presence.

    Raises ClassificationViolation when the indifference certificate
    fails.  On abort-free blocks that signals a bug; with limit orders in
    play it can also fire legitimately, because removing the user's order
    may flip a later producer limit order from aborted to executed, and
    trading d1 up for d2 down is componentwise incomparable (see
    tests/test_game.py for a minimal instance).
    """
    if agent == 0:
        raise ValueError("agent 0 is the block producer, not a user")
    owned = [i for i, a in ownership.items() if a == agent]
    positions = [t for t, i in enumerate(outcome.ordering) if i in owned]
    if len(positions) != 1:
        raise ValueError(f"agent {agent} must own exactly one sequenced order, owns {len(positions)}")
    t = positions[0]
    order = outcome.order_at(t)
    if better_execution(pot, order, outcome.state_before(t), outcome.x0):
        return Classification.ISOLATION
    reduced_ordering = tuple(i for s, i in enumerate(outcome.ordering) if s != t)
    reduced = execute_ordering(pot, outcome.x0, outcome.block, reduced_ordering)
    miner_map = dict(enumerate(outcome.block.owners))
    with_order = agent_utility(outcome, miner_map, 0)
    without_order = agent_utility(reduced, miner_map, 0)
    if (
        without_order.d1 < with_order.d1 - TOL_CMP
        or without_order.d2 < with_order.d2 - TOL_CMP
    ):
        raise ClassificationViolation(
            f"tail order at step {t} benefited the producer: "
            f"with={with_order} without={without_order}"
        )
    return Classification.INDIFFERENCE
