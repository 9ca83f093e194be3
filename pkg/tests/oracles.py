"""Independent reference solvers for the tests.

Everything here restates the pool math from scratch (formulas included)
so the tests never exercise the library's own code path to produce an
expected value: closed forms come straight from the level-set equations,
and the stable-pool numbers come from a staged grid scan over the raw
definition of the trade amounts.
"""

import numpy as np


def phi_product(x1, x2):
    return x1 * x2


def phi_additive(x1, x2):
    return x1 + x2


def phi_stable(x1, x2):
    s = x1 + x2
    w = (x1 * x2) / (0.5 * s) ** 2
    return w * s + (1.0 - w) * (x1 * x2)


def product_buy_closed_form(x1, x2, q):
    # (x1 - q)(x2 + y) = x1 x2  =>  y = x1 x2 / (x1 - q) - x2
    return x1 * x2 / (x1 - q) - x2


def product_sell_closed_form(x1, x2, q):
    # (x1 + q)(x2 - y) = x1 x2  =>  y = x2 - x1 x2 / (x1 + q)
    return x2 - x1 * x2 / (x1 + q)


def grid_min_payment(phi, x1, x2, q, stages=3, points=1000):
    """min{y >= 0 : phi(x1 - q, x2 + y) >= phi(x1, x2)} by staged grid
    refinement (no bisection)."""
    target = phi(x1, x2)
    nx1 = x1 - q
    hi = max(q, 1.0)
    while phi(nx1, x2 + hi) < target:
        hi *= 2.0
        assert hi < 1e18, "no bracket"
    lo = 0.0
    for _ in range(stages):
        ys = np.linspace(lo, hi, points + 1)
        ok = phi(nx1, x2 + ys) >= target
        idx = int(np.argmax(ok))
        hi = float(ys[idx])
        lo = float(ys[max(idx - 1, 0)])
    return hi


def grid_max_proceeds(phi, x1, x2, q, stages=3, points=1000):
    """max{y <= x2 : phi(x1 + q, x2 - y) >= phi(x1, x2)} by staged grid
    refinement."""
    target = phi(x1, x2)
    nx1 = x1 + q
    if phi(nx1, 0.0) >= target:
        return x2
    lo, hi = 0.0, x2
    for _ in range(stages):
        ys = np.linspace(lo, hi, points + 1)
        ok = phi(nx1, x2 - ys) >= target
        good = np.nonzero(ok)[0]
        idx = int(good[-1])
        lo = float(ys[idx])
        hi = float(ys[min(idx + 1, len(ys) - 1)])
    return lo


def grid_generator(phi, c, x1, stages=3, points=1000):
    """The x2 with phi(x1, x2) = c, by staged grid refinement."""
    hi = 1.0
    while phi(x1, hi) < c:
        hi *= 2.0
        assert hi < 1e18, "no bracket"
    lo = 0.0
    for _ in range(stages):
        ys = np.linspace(lo, hi, points + 1)
        ok = phi(x1, ys) >= c
        idx = int(np.argmax(ok))
        hi = float(ys[idx])
        lo = float(ys[max(idx - 1, 0)])
    return hi
