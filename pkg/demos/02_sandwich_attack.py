#!/usr/bin/env python3
"""The classic front-run: buy before the user, sell right after.

A user quotes a limit buy. The block producer sizes a front-running buy
so the user's payment lands exactly on their limit, then unwinds. The
user pays their worst acceptable price; the producer pockets the
difference against the standalone price, risk-free.
"""

from ammseq import (
    Order,
    PoolState,
    execute_order,
    make_potential,
    payment_for_buy,
    plan_sandwich,
    verify_greedy,
)

pot = make_potential("product")
state = PoolState(100, 100)
user = Order.buy(10, 2.0)

standalone = payment_for_buy(pot, state, user.q)
print(f"pool: {state}, user order: buy {user.q} at limit {user.p}")
print(f"standalone payment (user alone in the block): {standalone:.6f}")
print(f"the user is willing to pay up to q*p = {user.q * user.p:.6f}")
print()

plan = plan_sandwich(pot, state, user)
print(f"producer front-runs with a buy of {plan.front.q:.6f}")
print(f"predicted risk-free take: {plan.predicted_profit:.6f} token 2")
print()

print("executing (front-run, user, back-run):")
st = state
d1 = d2 = 0.0
for label, order in [("front", plan.front), ("user", user), ("back", plan.back)]:
    res = execute_order(pot, st, order)
    st = res.state
    print(f"  {label:>5}: {order.side} {order.q:9.4f}  payment {res.payment:9.4f}"
          f"  -> reserves ({st.x1:.4f}, {st.x2:.4f})")
    if label != "user":
        d1 += order.q if order.is_buy else -order.q
        d2 += -res.payment if order.is_buy else res.payment

print()
print(f"producer net position: ({d1:.9f}, {d2:.6f})  <- free token 2")
print(f"user paid {user.q * user.p:.4f} instead of {standalone:.4f}")
print()
print("Would the greedy sequencing rule have allowed this ordering?")
print(f"  verifier says: {verify_greedy(pot, state, plan.orders(user))}")
print("  (the producer's buy would be forced to unwind before the user trades)")
