#!/usr/bin/env python3
"""What the greedy sequencing rule does and does not allow.

The rule: while buys and sells are both outstanding, the next order's
side is forced by comparing the current token-1 reserve to the
block-initial one.  Anyone can re-check a published ordering in one
pass, so a producer that breaks the rule gets caught.
"""

from ammseq import (
    Block,
    Order,
    PoolState,
    agent_utility,
    core_tail_decompose,
    classify_user_order,
    enumerate_greedy_orderings,
    execute_ordering,
    greedy_sequence,
    make_potential,
    verify_greedy,
)

pot = make_potential("product")
x0 = PoolState(100, 100)

print("One user market buy + the producer's own buy/sell pair:")
block = Block((Order.buy(10), Order.buy(5), Order.sell(5)), (1, 0, 0))
names = {0: "user buy(10)", 1: "prod buy(5)", 2: "prod sell(5)"}

print(f"  deterministic rule output: "
      f"{[names[i] for i in greedy_sequence(pot, x0, block)]}")
print()
print("  every ordering the rule's verifier accepts:")
for perm in sorted(enumerate_greedy_orderings(pot, x0, block)):
    print(f"    {[names[i] for i in perm]}")
print()
sandwich = (1, 0, 2)
print(f"  the sandwich {[names[i] for i in sandwich]}: "
      f"{verify_greedy(pot, x0, [block.orders[i] for i in sandwich])}")
print()

print("=" * 64)
print("A mixed block still lets the producer profit -- but never at the")
print("expense of a user's standalone price.")
print("=" * 64)
x0 = PoolState(10, 10)
orders = tuple(Order.buy(2) for _ in range(3)) + tuple(Order.sell(2) for _ in range(3))
block = Block(orders, (0, 2, 3, 0, 4, 5))  # producer owns buy #0, sell #3
ownership = dict(enumerate(block.owners))

best, best_ordering = None, None
for ordering in enumerate_greedy_orderings(pot, x0, block):
    out = execute_ordering(pot, x0, block, ordering)
    u = agent_utility(out, ownership, 0)
    if abs(u.d1) < 1e-9 and (best is None or u.d2 > best):
        best, best_ordering = u.d2, ordering

print(f"3 market buys of 2 vs 3 market sells of 2 at reserves {x0}")
print(f"producer owns one buy and one sell; best valid ordering nets it "
      f"(0, {best:.4f})")
out = execute_ordering(pot, x0, block, best_ordering)
for t, i in enumerate(best_ordering):
    o = block.orders[i]
    who = "producer" if block.owners[i] == 0 else f"user {block.owners[i]}"
    print(f"  step {t + 1}: {o.side:>4} {o.q}  by {who:>8}"
          f"  payment {out.results[t].payment:.4f}"
          f"  -> x1={out.states[t].x1:.2f}")

split = core_tail_decompose(pot, out)
print(f"core steps (at least standalone quality): {sorted(split.core)}")
print(f"tail steps: {sorted(split.tail)}")
for agent in (2, 3, 4, 5):
    print(f"  user {agent}: {classify_user_order(pot, out, ownership, agent).value}")
