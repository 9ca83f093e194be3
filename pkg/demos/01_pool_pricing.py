#!/usr/bin/env python3
"""Walk through the three pool designs and what a trade costs on each.

Every trade must keep the reserves on a level set of the pool's
potential, so the token-2 leg of a trade is fully determined by the
reserves, the potential, and the trade size.
"""

import numpy as np

from ammseq import (
    Order,
    PoolState,
    execute_order,
    eval_potential,
    generator_value,
    make_potential,
    payment_for_buy,
    proceeds_for_sell,
)

print("=" * 64)
print("Buying 10 units of token 1 from a 100/100 pool")
print("=" * 64)
state = PoolState(100, 100)
for kind in ("product", "additive", "stable"):
    # the stable interpolation is built for small, near-parity pools;
    # scale its example down accordingly
    pot = make_potential(kind)
    if kind == "stable":
        s, q = PoolState(1.0, 1.0), 0.1
    else:
        s, q = state, 10.0
    pay = payment_for_buy(pot, s, q)
    recv = proceeds_for_sell(pot, s, q)
    print(f"{kind:>8}: reserves ({s.x1}, {s.x2})  buy {q} costs {pay:.6f}"
          f"  sell {q} pays {recv:.6f}")

print()
print("A buy moves the pool along its level set and the potential is conserved:")
pot = make_potential("product")
res = execute_order(pot, state, Order.buy(10))
print(f"  before: {state}  phi={eval_potential(pot, state):.6f}")
print(f"  after:  {res.state}  phi={eval_potential(pot, res.state):.6f}")
print(f"  payment: {res.payment:.6f} token 2 for 10 token 1")

print()
print("Limit prices gate execution (the pool state never changes on an abort):")
for p in (2.0, 1.2, 1.0):
    res = execute_order(pot, state, Order.buy(10, p))
    print(f"  buy 10 with limit {p:>4}: {res.status:>8}  payment={res.payment:.6f}")

print()
print("The level set through (100, 100) as token-2 reserve vs token-1 reserve")
print("(the curve every product-pool trade walks along):")
c = eval_potential(pot, state)
for x1 in np.linspace(50, 200, 7):
    print(f"  x1={x1:7.2f}  x2={generator_value(pot, c, x1):9.4f}")

print()
print("Price moves against the trader: the deeper the buy, the worse the rate.")
for q in (1, 10, 30, 60, 90):
    pay = payment_for_buy(pot, state, q)
    print(f"  buy {q:>2}: total {pay:9.4f}  average unit price {pay / q:.4f}")
