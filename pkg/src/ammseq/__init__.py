"""Two-token liquidity-pool exchange with verifiable order sequencing.

The package simulates trading against a reserve-potential pool, the
game between users and a strategic block producer, the greedy
sequencing rule with its one-pass verifier, classic producer attacks
(sandwiching and the universal-exploit block), and randomized suites
that fuzz the market's structural guarantees.
"""

from .analysis import (
    DualitySide,
    ProbeViolation,
    SlopeSample,
    check_duality,
    check_pricing_monotonicity,
    check_slope_monotone,
    level_state,
)
from .adversary import (
    CaseTwoReached,
    ExploitSelection,
    NotLiquidityPreserving,
    NTooSmall,
    SandwichPlan,
    UserOrderInfeasible,
    impossibility_block,
    plan_sandwich,
    select_exploit,
    side_patterns,
)
from .exchange import (
    ABORTED,
    BUY,
    EXECUTED,
    SELL,
    TOL_CMP,
    TOL_POTENTIAL,
    TOL_ROOT,
    AdditivePotential,
    ExchangeError,
    ExecResult,
    NoSolution,
    NotOnLevelSet,
    Order,
    PoolState,
    Potential,
    ProductPotential,
    QuantityExceedsReserve,
    StablePotential,
    can_execute,
    eval_potential,
    execute_order,
    generator_value,
    make_potential,
    payment_for_buy,
    proceeds_for_sell,
)
from .game import (
    Classification,
    ClassificationViolation,
    CoreTail,
    Outcome,
    UnknownAgent,
    UtilityVector,
    agent_utility,
    better_execution,
    classify_user_order,
    core_tail_decompose,
    execute_ordering,
    is_profitable_risk_free,
    is_risk_free,
    make_block,
    miner_utility,
    run_game,
)
from .sequencing import (
    TIE_BREAKS,
    Block,
    InvalidPermutation,
    TooLarge,
    arbitrary_sequence,
    enumerate_greedy_orderings,
    greedy_sequence,
    verify_greedy,
)

__version__ = "0.1.0"
