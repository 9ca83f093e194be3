#!/usr/bin/env python3
"""No sequencing rule can always deny the producer a risk-free profit.

The trick: fill a block with identical market orders (n buys of 2, n
sells of 1, reserves (4n, 4n) on a constant-product pool).  Identical
orders make every rule's choice blind to ownership, so the producer can
wait to see the ordering and *then* claim the most favorable buy and two
cheap-state sells.  Zero token-1 exposure, positive token-2 take.
"""

from collections import Counter

from ammseq import (
    CaseTwoReached,
    agent_utility,
    execute_ordering,
    impossibility_block,
    make_potential,
    select_exploit,
    side_patterns,
)

pot = make_potential("product")

for n in (3, 4, 5):
    x0, block = impossibility_block(n)
    takes = []
    failures = []
    for perm in side_patterns(n):
        try:
            sel = select_exploit(pot, x0, block, perm)
        except CaseTwoReached:
            failures.append("".join(
                "B" if block.orders[i].is_buy else "S" for i in perm))
            continue
        out = execute_ordering(pot, x0, block, perm)
        ownership = dict(enumerate(block.owners))
        for i in (sel.buy_index, *sel.sell_indices):
            ownership[i] = 0
        u = agent_utility(out, ownership, 0)
        takes.append(u.d2)
    print(f"n={n}: reserves {x0}, {len(takes) + len(failures)} distinguishable orderings")
    if takes:
        print(f"  exploitable: {len(takes)}  take range "
              f"[{min(takes):.6f}, {max(takes):.6f}] token 2")
    if failures:
        print(f"  NOT exploitable: {failures}  (best assignment nets exactly 0;"
              " a genuine boundary gap of the construction at n=3)")
    print()

print("One ordering in detail (n=3, sells first):")
x0, block = impossibility_block(3)
perm = (3, 4, 5, 0, 1, 2)  # S S S B B B
sel = select_exploit(pot, x0, block, perm)
sides = Counter(block.orders[i].side for i in perm)
print(f"  ordering sides: {'-'.join(block.orders[i].side for i in perm)} ({dict(sides)})")
print(f"  token-1 offset after each step: {[f'{z:+.0f}' for z in sel.z_trace]}")
print(f"  producer claims buy index {sel.buy_index} (executes at the reserve peak)")
print(f"  and sell indices {sel.sell_indices} (execute at low reserves)")
out = execute_ordering(pot, x0, block, perm)
ownership = dict(enumerate(block.owners))
for i in (sel.buy_index, *sel.sell_indices):
    ownership[i] = 0
u = agent_utility(out, ownership, 0)
print(f"  producer net position: ({u.d1:.9f}, {u.d2:.6f})")
