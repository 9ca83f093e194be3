"""Two-token liquidity pool: potentials, pricing, and order execution.

A pool holds reserves (x1, x2) of two tokens.  Every trade must keep the
reserves on a level set of a potential function phi, so the amount of
token 2 moved by a trade of q units of token 1 is pinned by phi:

    buy  q:  pay     Y = min{y >= 0     : phi(x1 - q, x2 + y) >= phi(x1, x2)}
    sell q:  receive Y = max{y <= x2    : phi(x1 + q, x2 - y) >= phi(x1, x2)}

Three potentials are supported:

    product   phi = x1 * x2                     (constant-product pool)
    additive  phi = x1 + x2                     (fixed 1:1 price)
    stable    a product/additive interpolation weighted by how close the
              reserves are to parity:
                  w   = x1*x2 / ((x1 + x2)/2)^2      (in [0, 1] by AM-GM)
                  phi = w*(x1 + x2) + (1 - w)*x1*x2

Product and additive pricing use closed forms; stable pricing is solved
by bisection.  A caveat worth knowing: the stable interpolation is only
strictly increasing in each reserve while x1 + x2 < 14.4, and its level
sets only bound a convex region for level values up to roughly 4.  The
randomized suites in `ammseq.suites` therefore sample stable pools at
small scale; see tests/test_exchange.py for a demonstration of the
breakdown at larger reserves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TOL_POTENTIAL = 1e-9   # relative tolerance on potential conservation
TOL_ROOT = 1e-12       # absolute bisection tolerance
TOL_CMP = 1e-9         # slack for inequality checks downstream
MAX_BISECT = 200       # iteration cap for all bisections
BRACKET_LIMIT = 1e18   # give up doubling a bracket beyond this

BUY = "buy"
SELL = "sell"


class ExchangeError(Exception):
    """Base class for pricing/execution failures."""


class QuantityExceedsReserve(ExchangeError):
    """Buy quantity larger than the token-1 reserve."""


class NoSolution(ExchangeError):
    """No payment preserves the potential (reserve-depleting trade)."""


class NotOnLevelSet(ExchangeError):
    """No reserve pair with the requested x1 lies on the level set."""


@dataclass(frozen=True)
class PoolState:
    """Reserves of the two pool tokens."""

    x1: float
    x2: float

    def __post_init__(self):
        if self.x1 < 0 or self.x2 < 0:
            raise ValueError(f"reserves must be nonnegative, got {self}")


@dataclass(frozen=True)
class Order:
    """A trade of `q` units of token 1 with limit price `p` (token 2 per unit).

    A buy withdraws token 1 and pays at most p*q of token 2; a sell
    deposits token 1 and must receive at least p*q of token 2.  Market
    orders are the extreme limits: p = +inf for a buy, p = 0 for a sell.
    """

    side: str
    q: float
    p: float

    def __post_init__(self):
        if self.side not in (BUY, SELL):
            raise ValueError(f"side must be {BUY!r} or {SELL!r}, got {self.side!r}")
        if not self.q > 0:
            raise ValueError(f"quantity must be positive, got {self.q}")
        if self.p < 0:
            raise ValueError(f"limit price must be nonnegative, got {self.p}")

    @classmethod
    def buy(cls, q, p=math.inf):
        return cls(BUY, float(q), float(p))

    @classmethod
    def sell(cls, q, p=0.0):
        return cls(SELL, float(q), float(p))

    @property
    def is_buy(self):
        return self.side == BUY


EXECUTED = "executed"
ABORTED = "aborted"


@dataclass(frozen=True)
class ExecResult:
    """Outcome of executing one order: status, token-2 amount, next reserves."""

    status: str
    payment: float
    state: PoolState

    @property
    def executed(self):
        return self.status == EXECUTED


class Potential:
    """Base potential.  Subclasses provide `value`; pricing defaults to
    bisection against the definition and is overridden where a closed
    form exists."""

    kind = "?"

    def value(self, x1: float, x2: float) -> float:
        raise NotImplementedError

    # -- pricing ---------------------------------------------------------

    def buy_payment(self, x1, x2, q):
        """Smallest token-2 deposit that keeps the potential from falling
        when q units of token 1 are withdrawn."""
        if q == 0:
            return 0.0
        target = self.value(x1, x2)
        nx1 = x1 - q
        g = lambda y: self.value(nx1, x2 + y) - target
        if g(0.0) >= 0.0:
            return 0.0
        hi = max(q, 1.0)
        while g(hi) < 0.0:
            hi *= 2.0
            if hi > BRACKET_LIMIT:
                raise NoSolution(
                    f"no token-2 payment restores the potential after buying {q} at ({x1}, {x2})"
                )
        lo = hi / 2.0 if hi > max(q, 1.0) else 0.0
        for _ in range(MAX_BISECT):
            if hi - lo <= TOL_ROOT:
                break
            mid = 0.5 * (lo + hi)
            if g(mid) >= 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def sell_proceeds(self, x1, x2, q):
        """Largest token-2 withdrawal (capped by the reserve) that keeps
        the potential from falling when q units of token 1 are deposited."""
        if q == 0 and x2 == 0:
            return 0.0
        target = self.value(x1, x2)
        nx1 = x1 + q
        h = lambda y: self.value(nx1, x2 - y) - target
        if h(x2) >= 0.0:
            return x2
        lo, hi = 0.0, x2
        for _ in range(MAX_BISECT):
            if hi - lo <= TOL_ROOT:
                break
            mid = 0.5 * (lo + hi)
            if h(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def generator(self, c, x1):
        """The unique x2 with value(x1, x2) = c, found by bisection."""
        if x1 < 0:
            raise NotOnLevelSet(f"x1={x1} is negative")
        g = lambda y: self.value(x1, y) - c
        if g(0.0) >= 0.0:
            # strictly increasing potentials only reach c at x2 = 0 when
            # the boundary value equals c exactly
            if abs(g(0.0)) <= TOL_ROOT:
                return 0.0
            raise NotOnLevelSet(f"no x2 >= 0 puts x1={x1} on level set {c}")
        hi = 1.0
        while g(hi) < 0.0:
            hi *= 2.0
            if hi > BRACKET_LIMIT:
                raise NotOnLevelSet(f"no x2 puts x1={x1} on level set {c}")
        lo = hi / 2.0 if hi > 1.0 else 0.0
        for _ in range(MAX_BISECT):
            if hi - lo <= TOL_ROOT:
                break
            mid = 0.5 * (lo + hi)
            if g(mid) >= 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)


class ProductPotential(Potential):
    """phi = x1 * x2.  Level sets are hyperbolas; no trade can fully
    deplete a reserve because the payment diverges."""

    kind = "product"

    def value(self, x1, x2):
        return x1 * x2

    def buy_payment(self, x1, x2, q):
        if q == 0:
            return 0.0
        if q >= x1:
            # phi(0, anything) = 0 < phi(x), so no finite payment works
            raise NoSolution(f"buying {q} would deplete a reserve of {x1}")
        return x1 * x2 / (x1 - q) - x2

    def sell_proceeds(self, x1, x2, q):
        if x1 + q == 0:
            return 0.0
        return x2 - x1 * x2 / (x1 + q)

    def generator(self, c, x1):
        if x1 <= 0 or c <= 0:
            raise NotOnLevelSet(f"x1={x1} is not on product level set {c}")
        return c / x1


class AdditivePotential(Potential):
    """phi = x1 + x2.  Every trade is 1:1, and reserves can be emptied."""

    kind = "additive"

    def value(self, x1, x2):
        return x1 + x2

    def buy_payment(self, x1, x2, q):
        return float(q)

    def sell_proceeds(self, x1, x2, q):
        return min(float(q), x2)

    def generator(self, c, x1):
        if x1 < 0 or x1 > c:
            raise NotOnLevelSet(f"x1={x1} is not on additive level set {c}")
        return c - x1


class StablePotential(Potential):
    """Product/additive interpolation; near reserve parity the pool
    behaves like the additive one.  Pricing has no closed form here, so
    the base-class bisection does the work."""

    kind = "stable"

    def value(self, x1, x2):
        s = x1 + x2
        if s == 0:
            return 0.0
        w = (x1 * x2) / ((0.5 * s) * (0.5 * s))
        return w * s + (1.0 - w) * x1 * x2


_POTENTIALS = {
    "product": ProductPotential,
    "additive": AdditivePotential,
    "stable": StablePotential,
}


def make_potential(kind: str) -> Potential:
    try:
        return _POTENTIALS[kind]()
    except KeyError:
        raise ValueError(f"unknown potential kind {kind!r}") from None


def eval_potential(pot: Potential, state: PoolState) -> float:
    """Potential value at a pool state."""
    return pot.value(state.x1, state.x2)


def payment_for_buy(pot: Potential, state: PoolState, q: float) -> float:
    """Token-2 payment for withdrawing q units of token 1 at `state`.

    Raises QuantityExceedsReserve when q > x1, and NoSolution when no
    finite payment can restore the potential (buying out the token-1
    reserve of a product or stable pool).
    """
    if q < 0:
        raise ValueError(f"quantity must be nonnegative, got {q}")
    if q > state.x1:
        raise QuantityExceedsReserve(f"buy of {q} exceeds reserve {state.x1}")
    return pot.buy_payment(state.x1, state.x2, q)


def proceeds_for_sell(pot: Potential, state: PoolState, q: float) -> float:
    """Token-2 proceeds for depositing q units of token 1 at `state`.

    Always well defined: zero proceeds are feasible, and the withdrawal
    is capped by the token-2 reserve.
    """
    if q < 0:
        raise ValueError(f"quantity must be nonnegative, got {q}")
    return pot.sell_proceeds(state.x1, state.x2, q)


def can_execute(pot: Potential, state: PoolState, order: Order) -> bool:
    """Whether `order` executes successfully at `state`.

    A buy needs q <= x1, a payment within its limit, and the next state
    back on the same potential level.  A sell needs proceeds of at least
    its limit, a token-2 reserve covering the withdrawal, and likewise a
    potential-preserving next state.
    """
    ok, _, _, _ = _step(pot, state.x1, state.x2, order.side, order.q, order.p)
    return ok


def execute_order(pot: Potential, state: PoolState, order: Order) -> ExecResult:
    """Execute one order; an infeasible order aborts and leaves the state
    untouched."""
    ok, y, nx1, nx2 = _step(pot, state.x1, state.x2, order.side, order.q, order.p)
    if not ok:
        return ExecResult(ABORTED, 0.0, state)
    return ExecResult(EXECUTED, y, PoolState(nx1, nx2))


def _step(pot, x1, x2, side, q, p):
    """Raw-float execution kernel shared by the sequencing hot loops.

    Returns (executed, token2_amount, next_x1, next_x2); aborted orders
    echo the input reserves.
    """
    if side == BUY:
        if q > x1:
            return False, 0.0, x1, x2
        try:
            y = pot.buy_payment(x1, x2, q)
        except ExchangeError:
            return False, 0.0, x1, x2
        if y > p * q:
            return False, 0.0, x1, x2
        nx1, nx2 = x1 - q, x2 + y
    else:
        y = pot.sell_proceeds(x1, x2, q)
        if y < p * q or y > x2:
            return False, 0.0, x1, x2
        nx1, nx2 = x1 + q, x2 - y
    ref = pot.value(x1, x2)
    if abs(pot.value(nx1, nx2) - ref) > TOL_POTENTIAL * max(1.0, abs(ref)):
        return False, 0.0, x1, x2
    return True, y, nx1, nx2


def generator_value(pot: Potential, c: float, x1: float) -> float:
    """Token-2 reserve paired with `x1` on level set c.

    This is the function whose graph is the set of reachable states: for
    a strictly increasing potential each x1 on the level set determines
    x2 uniquely.  Raises NotOnLevelSet when no such state exists.
    """
    return pot.generator(c, x1)
