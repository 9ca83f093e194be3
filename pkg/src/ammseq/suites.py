"""Randomized property suites over the pool, the sequencing rule, and the
attack constructions.

Each suite draws seeded random instances, checks one family of facts,
and reports trial/violation counts.  The sampling respects the model's
standing assumptions: potentials must be strictly increasing and have
convex-from-above level sets, which the product and additive potentials
satisfy everywhere but the stable interpolation satisfies only at small
scale (reserve sums below ~14.4 for monotonicity, level values up to ~4
for convexity -- see tests/test_exchange.py for the demonstration).
Stable pools are therefore sampled inside that envelope.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .adversary import impossibility_block, plan_sandwich, select_exploit, side_patterns
from .exchange import (
    Order,
    PoolState,
    execute_order,
    make_potential,
    payment_for_buy,
    proceeds_for_sell,
)
from .game import (
    ClassificationViolation,
    agent_utility,
    better_execution,
    core_tail_decompose,
    execute_ordering,
)
from .sequencing import TIE_BREAKS, Block, greedy_sequence, verify_greedy

# sampling envelope for stable pools (see module docstring)
STABLE_BASE_RANGE = (0.3, 1.4)
STABLE_X1_MULT = (0.35, 2.2)


@dataclass
class SuiteResult:
    name: str
    trials: int
    violations: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: trials={self.trials} violations={self.violations} [{status}]"


# ---------------------------------------------------------------------------
# samplers


def _sample_kind(rng, kinds=("product", "additive", "stable")):
    return rng.choice(kinds)


def _sample_level(pot, rng):
    """A level value plus a callable drawing x1 coordinates on it."""
    if pot.kind == "product":
        x1 = math.exp(rng.uniform(math.log(2.0), math.log(400.0)))
        x2 = math.exp(rng.uniform(math.log(2.0), math.log(400.0)))
        c = x1 * x2
        draw = lambda: x1 * rng.uniform(0.4, 2.4)
    elif pot.kind == "additive":
        c = rng.uniform(10.0, 800.0)
        draw = lambda: c * rng.uniform(0.08, 0.92)
    else:
        a = rng.uniform(*STABLE_BASE_RANGE)
        b = rng.uniform(*STABLE_BASE_RANGE)
        c = pot.value(a, b)
        u = 0.5 * c
        draw = lambda: u * rng.uniform(*STABLE_X1_MULT)
    return c, draw


def _sample_level_pair(pot, rng):
    """Two distinct states on one level set, lower x1 first."""
    c, draw = _sample_level(pot, rng)
    while True:
        a, b = draw(), draw()
        if abs(a - b) > 1e-6 * max(a, b):
            break
    lo, hi = min(a, b), max(a, b)
    return c, analysis.level_state(pot, c, lo), analysis.level_state(pot, c, hi)


def _sample_x0(pot, rng):
    if pot.kind == "stable":
        return PoolState(rng.uniform(*STABLE_BASE_RANGE), rng.uniform(*STABLE_BASE_RANGE))
    return PoolState(rng.uniform(20.0, 500.0), rng.uniform(20.0, 500.0))


def _sample_block(pot, x0, rng, max_orders=12, miner_share=0.3):
    """A block of mixed orders scaled to x0; roughly half market orders,
    the rest with limits around the standalone price so that both the
    success and abort paths get exercised."""
    n = rng.randint(1, min(max_orders, 5) if pot.kind == "stable" else max_orders)
    frac = 0.1 if pot.kind == "stable" else 0.2
    orders = []
    owners = []
    for t in range(n):
        q = rng.uniform(0.01, frac) * min(x0.x1, x0.x2)
        if rng.random() < 0.5:
            side_buy = True
            standalone = payment_for_buy(pot, x0, q)
        else:
            side_buy = False
            standalone = proceeds_for_sell(pot, x0, q)
        if rng.random() < 0.5:
            order = Order.buy(q) if side_buy else Order.sell(q)
        else:
            p = (standalone / q) * rng.uniform(0.7, 1.6)
            order = Order.buy(q, p) if side_buy else Order.sell(q, p)
        orders.append(order)
        owners.append(0 if rng.random() < miner_share else t + 1)
    return Block(tuple(orders), tuple(owners))


def _probe_orders(pot, base, rng, count=4):
    """Mixed buy/sell probes sized to the base state, limits spanning half
    to twice the standalone price (market orders included)."""
    probes = []
    for _ in range(count):
        q = rng.uniform(0.02, 0.5) * min(base.x1, base.x2)
        if rng.random() < 0.5:
            standalone = payment_for_buy(pot, base, q)
            if rng.random() < 0.4:
                probes.append(Order.buy(q))
            else:
                probes.append(Order.buy(q, (standalone / q) * rng.uniform(0.5, 2.0)))
        else:
            standalone = proceeds_for_sell(pot, base, q)
            if rng.random() < 0.4:
                probes.append(Order.sell(q))
            else:
                probes.append(Order.sell(q, (standalone / q) * rng.uniform(0.5, 2.0)))
    return probes


# ---------------------------------------------------------------------------
# pool-level suites


def pricing_suite(trials=10000, seed=0):
    """Pricing monotonicity across level-set pairs: more token 1 means
    cheaper buys and leaner sells."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        c, low, high = _sample_level_pair(pot, rng)
        q = rng.uniform(0.05, 0.5) * min(low.x1, low.x2, high.x2)
        if not analysis.check_pricing_monotonicity(pot, c, low.x1, high.x1, q):
            violations += 1
    return SuiteResult("pricing", trials, violations)


def zero_payment_suite(trials=10000, seed=1):
    """Selling nothing pays nothing, at any sampled state."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        c, draw = _sample_level(pot, rng)
        state = analysis.level_state(pot, c, draw())
        if abs(proceeds_for_sell(pot, state, 0.0)) > 1e-9:
            violations += 1
    return SuiteResult("zero_payment", trials, violations)


def slope_suite(trials=10000, seed=2, grid=5):
    """Secant slopes of the level-set curve are nondecreasing."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        c, draw = _sample_level(pot, rng)
        xs = sorted({draw() for _ in range(grid)})
        if len(xs) < 3:
            xs = sorted({draw() for _ in range(grid + 3)})
        if not analysis.check_slope_monotone(pot, c, xs):
            violations += 1
    return SuiteResult("slope", trials, violations)


def duality_suite(trials=10000, seed=3, probes=4):
    """One whole side of the market prefers each state of a level-set
    pair, decided by the token-1 reserve comparison."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        c, low, high = _sample_level_pair(pot, rng)
        x, x_prime = (low, high) if rng.random() < 0.5 else (high, low)
        orders = _probe_orders(pot, low, rng, probes)
        try:
            analysis.check_duality(pot, c, x, x_prime, orders)
        except analysis.ProbeViolation:
            violations += 1
    return SuiteResult("duality", trials, violations)


def feasibility_suite(trials=10000, seed=4):
    """Feasibility is monotone along a level set (buys survive moves to
    higher token-1 reserves, sells to lower), and the set of workable
    buy sizes has no holes."""
    rng = random.Random(seed)
    violations = 0
    detail = {"monotone": 0, "interval": 0}
    from .exchange import can_execute

    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        c, low, high = _sample_level_pair(pot, rng)
        for order in _probe_orders(pot, low, rng, 3):
            if order.is_buy:
                if can_execute(pot, low, order) and not can_execute(pot, high, order):
                    violations += 1
                    detail["monotone"] += 1
            else:
                if can_execute(pot, high, order) and not can_execute(pot, low, order):
                    violations += 1
                    detail["monotone"] += 1
        # a buy size workable at the extremes is workable in between
        q_hi = rng.uniform(0.05, 0.6) * low.x1
        q_lo = q_hi * rng.uniform(0.05, 0.5)
        q_mid = rng.uniform(q_lo, q_hi)
        big = Order.buy(q_hi)
        if can_execute(pot, low, Order.buy(q_lo)) and can_execute(pot, low, big):
            if not can_execute(pot, low, Order.buy(q_mid)):
                violations += 1
                detail["interval"] += 1
    return SuiteResult("feasibility", trials, violations, detail)


def solver_suite(trials=1000, seed=5, tol=1e-6):
    """Stable-pool bisection pricing against an independent grid scan."""
    rng = random.Random(seed)
    pot = make_potential("stable")
    violations = 0
    for _ in range(trials):
        c, draw = _sample_level(pot, rng)
        state = analysis.level_state(pot, c, draw())
        q = rng.uniform(0.05, 0.5) * min(state.x1, state.x2)
        buy = payment_for_buy(pot, state, q)
        if abs(buy - grid_buy_payment(state.x1, state.x2, q)) > tol:
            violations += 1
        sell = proceeds_for_sell(pot, state, q)
        if abs(sell - grid_sell_proceeds(state.x1, state.x2, q)) > tol:
            violations += 1
    return SuiteResult("solver", trials, violations)


# -- independent grid oracle for the stable formula ------------------------


def _phi_stable(x1, x2):
    # restated here on purpose: the oracle must not share the pool's code
    s = x1 + x2
    w = (x1 * x2) / (0.5 * s) ** 2
    return w * s + (1.0 - w) * (x1 * x2)


def grid_buy_payment(x1, x2, q, stages=3, points=1000):
    """Smallest potential-restoring payment by staged grid scan (final
    resolution: bracket width / points**stages)."""
    target = _phi_stable(x1, x2)
    nx1 = x1 - q
    hi = max(q, 1.0)
    while _phi_stable(nx1, x2 + hi) < target:
        hi *= 2.0
        if hi > 1e18:
            raise ValueError("no bracket")
    lo = 0.0
    for _ in range(stages):
        ys = np.linspace(lo, hi, points + 1)
        ok = _phi_stable(nx1, x2 + ys) >= target
        idx = int(np.argmax(ok))
        hi = float(ys[idx])
        lo = float(ys[max(idx - 1, 0)])
    return hi


def grid_sell_proceeds(x1, x2, q, stages=3, points=1000):
    """Largest potential-preserving withdrawal by staged grid scan."""
    target = _phi_stable(x1, x2)
    nx1 = x1 + q
    if _phi_stable(nx1, 0.0) >= target:
        return x2
    lo, hi = 0.0, x2
    for _ in range(stages):
        ys = np.linspace(lo, hi, points + 1)
        ok = _phi_stable(nx1, x2 - ys) >= target
        good = np.nonzero(ok)[0]
        idx = int(good[-1])
        lo = float(ys[idx])
        hi = float(ys[min(idx + 1, len(ys) - 1)])
    return lo


# ---------------------------------------------------------------------------
# sequencing / game suites


def greedy_completeness_suite(trials=10000, seed=6, max_orders=12):
    """Every sequencing the greedy rule produces passes its verifier,
    under every tie-break policy."""
    rng = random.Random(seed)
    violations = 0
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        x0 = _sample_x0(pot, rng)
        block = _sample_block(pot, x0, rng, max_orders)
        for tie in TIE_BREAKS:
            seq = greedy_sequence(pot, x0, block, tie_break=tie, seed=rng.randrange(1 << 30))
            if not verify_greedy(pot, x0, [block.orders[i] for i in seq]):
                violations += 1
    return SuiteResult("greedy_completeness", trials, violations)


def tail_suite(trials=10000, seed=7, max_orders=10):
    """Greedy outcomes: the tail is single-sided, and at every step with a
    mixed remaining suffix the side mandated by the reserve comparison
    really is the happier one."""
    rng = random.Random(seed)
    violations = 0
    detail = {"tail_mixed": 0, "trace_duality": 0}
    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        x0 = _sample_x0(pot, rng)
        block = _sample_block(pot, x0, rng, max_orders)
        seq = greedy_sequence(pot, x0, block, tie_break="random", seed=rng.randrange(1 << 30))
        outcome = execute_ordering(pot, x0, block, seq)
        split = core_tail_decompose(pot, outcome)
        sides = {outcome.order_at(t).side for t in split.tail}
        if len(sides) > 1:
            violations += 1
            detail["tail_mixed"] += 1
        # at each mixed-suffix step, probe the mandated side
        n = len(seq)
        mixed = [False] * n
        for t in range(n - 2, -1, -1):
            mixed[t] = mixed[t + 1] or outcome.order_at(t).side != outcome.order_at(t + 1).side
        probe_q = 0.05 * min(x0.x1, x0.x2)
        for t in range(n):
            if not mixed[t]:
                break
            prev = outcome.state_before(t)
            if prev.x1 >= x0.x1:
                ok = better_execution(pot, Order.buy(probe_q), prev, x0)
            else:
                ok = better_execution(pot, Order.sell(probe_q), prev, x0)
            if not ok:
                violations += 1
                detail["trace_duality"] += 1
                break
    return SuiteResult("greedy_tail", trials, violations, detail)


def _sample_market_block(pot, x0, rng, max_orders=10, miner_share=0.3):
    """A block of market orders with total volume capped well inside the
    reserves, so no order can abort in any ordering or sub-ordering.

    The indifference half of the outcome classification compares the
    producer's utility vector with and without the user's order; that
    componentwise comparison is only implied by the rule's structure when
    no order changes execution status between the two runs (a producer
    limit order flipping from aborted to executed trades d1 against d2,
    which is incomparable).  Abort-free blocks are exactly the domain
    where the dominance claim is a theorem; see tests/test_game.py for a
    flip counterexample.
    """
    if pot.kind == "stable":
        # stay inside the envelope where the level set is convex
        n = rng.randint(1, min(max_orders, 5))
        frac = 0.4
    else:
        n = rng.randint(1, max_orders)
        frac = 0.7
    buy_budget = frac * x0.x1
    sell_budget = frac * x0.x2
    orders = []
    owners = []
    for t in range(n):
        if rng.random() < 0.5 and buy_budget > 1e-6 * x0.x1:
            q = rng.uniform(0.05, 0.5) * buy_budget
            buy_budget -= q
            orders.append(Order.buy(q))
        elif sell_budget > 1e-6 * x0.x2:
            q = rng.uniform(0.05, 0.5) * sell_budget
            sell_budget -= q
            orders.append(Order.sell(q))
        else:
            break
        owners.append(0 if rng.random() < miner_share else t + 1)
    return Block(tuple(orders), tuple(owners))


def classification_suite(trials=10000, seed=8, max_orders=10):
    """Every user order in a greedy outcome classifies as isolation or
    indifference; core orders concretely beat their standalone price.

    Samples abort-free market-order blocks (see _sample_market_block for
    why the dominance certificate needs that domain)."""
    rng = random.Random(seed)
    violations = 0
    detail = {"unclassified": 0, "core_price": 0}
    from .exchange import can_execute
    from .game import classify_user_order

    for _ in range(trials):
        pot = make_potential(_sample_kind(rng))
        x0 = _sample_x0(pot, rng)
        block = _sample_market_block(pot, x0, rng, max_orders)
        seq = greedy_sequence(pot, x0, block, tie_break="random", seed=rng.randrange(1 << 30))
        outcome = execute_ordering(pot, x0, block, seq)
        ownership = dict(enumerate(block.owners))
        for agent in sorted(set(block.owners) - {0}):
            try:
                classify_user_order(pot, outcome, ownership, agent)
            except (ClassificationViolation, ValueError):
                violations += 1
                detail["unclassified"] += 1
        split = core_tail_decompose(pot, outcome)
        for t in split.core:
            res = outcome.results[t]
            order = outcome.order_at(t)
            if not res.executed or not can_execute(pot, x0, order):
                continue
            if order.is_buy:
                ok = res.payment <= payment_for_buy(pot, x0, order.q) + 1e-9
            else:
                ok = res.payment >= proceeds_for_sell(pot, x0, order.q) - 1e-9
            if not ok:
                violations += 1
                detail["core_price"] += 1
    return SuiteResult("greedy_classification", trials, violations, detail)


# ---------------------------------------------------------------------------
# attack suites


def sandwich_suite(trials=1000, seed=9):
    """Sandwich plans on product pools deliver exactly the predicted
    risk-free take, the user pays their full limit, and the greedy
    verifier rejects the attack ordering."""
    rng = random.Random(seed)
    pot = make_potential("product")
    violations = 0
    detail = {"profit": 0, "user_pays_limit": 0, "verifier_rejects": 0}
    for _ in range(trials):
        x0 = PoolState(rng.uniform(20.0, 2000.0), rng.uniform(20.0, 2000.0))
        q = rng.uniform(0.05, 0.5) * x0.x1
        standalone = payment_for_buy(pot, x0, q)
        p = (standalone / q) * rng.uniform(1.05, 3.0)
        user = Order.buy(q, p)
        plan = plan_sandwich(pot, x0, user)
        seq = plan.orders(user)
        state = x0
        results = []
        for o in seq:
            res = execute_order(pot, state, o)
            results.append(res)
            state = res.state
        user_pos = 0 if plan.front is None else 1
        miner_d1 = miner_d2 = 0.0
        for pos, (o, res) in enumerate(zip(seq, results)):
            if pos == user_pos or not res.executed:
                continue
            miner_d1 += o.q if o.is_buy else -o.q
            miner_d2 += -res.payment if o.is_buy else res.payment
        expected = q * p - standalone
        if abs(miner_d1) > 1e-6 or abs(miner_d2 - expected) > 1e-6:
            violations += 1
            detail["profit"] += 1
        if not results[user_pos].executed or abs(results[user_pos].payment - q * p) > 1e-6:
            violations += 1
            detail["user_pays_limit"] += 1
        if plan.front is not None and verify_greedy(pot, x0, seq):
            violations += 1
            detail["verifier_rejects"] += 1
    return SuiteResult("sandwich", trials, violations, detail)


def impossibility_suite(ns=(3, 4, 5), tol=1e-9):
    """Every distinguishable ordering of the universal-exploit block
    admits a producer assignment with zero token-1 exposure and strictly
    positive token-2 profit; the reserve-offset algebra is exact.

    Known caveat: at n=3 the single pattern (S,B,S,S,B,B) admits no
    profitable selection at all -- its best assignment nets exactly zero
    -- so that one trial reports a violation.  See
    tests/test_adversary.py for the exact-arithmetic demonstration.
    """
    from .adversary import CaseTwoReached

    pot = make_potential("product")
    trials = 0
    violations = 0
    detail = {"profit": 0, "z_algebra": 0, "no_selection": 0}
    for n in ns:
        x0, block = impossibility_block(n)
        for perm in side_patterns(n):
            trials += 1
            try:
                sel = select_exploit(pot, x0, block, perm)
            except CaseTwoReached:
                violations += 1
                detail["no_selection"] += 1
                continue
            z = sel.z_trace
            for t, i in enumerate(perm):
                step = z[t + 1] - z[t]
                want = -2.0 if block.orders[i].is_buy else 1.0
                if step != want:
                    violations += 1
                    detail["z_algebra"] += 1
                    break
            outcome = execute_ordering(pot, x0, block, perm)
            miner_owned = {sel.buy_index, *sel.sell_indices}
            ownership = {i: (0 if i in miner_owned else a) for i, a in enumerate(block.owners)}
            u = agent_utility(outcome, ownership, 0)
            if abs(u.d1) > tol or u.d2 <= tol:
                violations += 1
                detail["profit"] += 1
    return SuiteResult("impossibility", trials, violations, detail)


# ---------------------------------------------------------------------------
# registry

SUITE_GROUPS = {
    "pricing": ("pricing", "zero_payment", "slope", "solver"),
    "duality": ("duality", "feasibility"),
    "greedy": ("greedy_completeness", "greedy_tail", "greedy_classification"),
    "impossibility": ("impossibility",),
    "sandwich": ("sandwich",),
}


def run_suite(name, trials=None, seed=0):
    """Run one named suite group; returns a list of SuiteResults.

    Group names: pricing, duality, greedy, impossibility, sandwich, all.
    `trials` scales the randomized suites (exhaustive ones ignore it).
    """
    runners = {
        "pricing": lambda: pricing_suite(trials or 10000, seed),
        "zero_payment": lambda: zero_payment_suite(trials or 10000, seed + 1),
        "slope": lambda: slope_suite(trials or 10000, seed + 2),
        "solver": lambda: solver_suite(min(trials or 1000, 1000), seed + 3),
        "duality": lambda: duality_suite(trials or 10000, seed + 4),
        "feasibility": lambda: feasibility_suite(trials or 10000, seed + 5),
        "greedy_completeness": lambda: greedy_completeness_suite(trials or 10000, seed + 6),
        "greedy_tail": lambda: tail_suite(trials or 10000, seed + 7),
        "greedy_classification": lambda: classification_suite(trials or 10000, seed + 8),
        "impossibility": lambda: impossibility_suite(),
        "sandwich": lambda: sandwich_suite(trials or 1000, seed + 9),
    }
    if name == "all":
        names = [s for group in SUITE_GROUPS.values() for s in group]
    elif name in SUITE_GROUPS:
        names = list(SUITE_GROUPS[name])
    else:
        raise KeyError(name)
    return [runners[s]() for s in names]
