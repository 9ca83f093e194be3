"""Scenario and report files: JSON in, JSON + CSV out.

A scenario names the pool, the initial reserves, the user orders, the
producer's strategy, and the sequencing rule; running one produces a
report with the executed trace, per-agent utilities, the core/tail
split, per-user classifications, the verifier's verdict, and small
sanity counts from the randomized suites.  Serialization is lossless:
floats round-trip exactly, and market-order limits (infinite for buys)
are stored as nulls.

The state trace is also written as CSV with the fixed header
``t,side,qty,limit,owner,status,payment,x1,x2``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .adversary import impossibility_block, plan_sandwich, select_exploit
from .exchange import Order, PoolState, make_potential
from .game import (
    ClassificationViolation,
    agent_utility,
    classify_user_order,
    core_tail_decompose,
    execute_ordering,
)
from .sequencing import Block, arbitrary_sequence, greedy_sequence, verify_greedy

CSV_HEADER = ["t", "side", "qty", "limit", "owner", "status", "payment", "x1", "x2"]

MINER_STRATEGIES = ("none", "sandwich", "impossibility", "custom")


class ScenarioError(ValueError):
    """Malformed scenario or trace input."""


@dataclass
class MinerSpec:
    strategy: str = "none"
    orders: list = field(default_factory=list)  # custom strategy only
    n: int = 3                                  # impossibility strategy only


@dataclass
class Scenario:
    potential: str
    x0: PoolState
    user_orders: list          # (agent_id, Order) pairs
    miner: MinerSpec = field(default_factory=MinerSpec)
    rule: str = "greedy"
    tie_break: str = "lowest_index"
    seed: int = 0
    permutation: list | None = None


def order_to_json(order: Order) -> dict:
    limit = order.p
    if order.is_buy and math.isinf(limit):
        limit = None
    return {"side": order.side, "qty": order.q, "limit": limit}


def order_from_json(obj) -> Order:
    try:
        side = obj["side"]
        q = float(obj["qty"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad order {obj!r}: {exc}") from None
    limit = obj.get("limit")
    try:
        if limit is None:
            return Order.buy(q) if side == "buy" else Order.sell(q)
        return Order(side, q, float(limit))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def scenario_to_json(s: Scenario) -> dict:
    out = {
        "potential": s.potential,
        "initial_state": {"x1": s.x0.x1, "x2": s.x0.x2},
        "user_orders": [
            {"agent": agent, **order_to_json(order)} for agent, order in s.user_orders
        ],
        "miner": {"strategy": s.miner.strategy},
        "rule": s.rule,
        "tie_break": s.tie_break,
        "seed": s.seed,
    }
    if s.miner.strategy == "custom":
        out["miner"]["orders"] = [order_to_json(o) for o in s.miner.orders]
    if s.miner.strategy == "impossibility":
        out["miner"]["n"] = s.miner.n
    if s.permutation is not None:
        out["permutation"] = list(s.permutation)
    return out


def scenario_from_json(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        potential = obj["potential"]
        init = obj["initial_state"]
        x0 = PoolState(float(init["x1"]), float(init["x2"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad scenario header: {exc}") from None
    if potential not in ("product", "additive", "stable"):
        raise ScenarioError(f"unknown potential {potential!r}")
    users = []
    for entry in obj.get("user_orders", []):
        try:
            agent = int(entry["agent"])
        except (KeyError, TypeError, ValueError):
            raise ScenarioError(f"user order needs an integer agent id: {entry!r}") from None
        if agent <= 0:
            raise ScenarioError("user agent ids must be positive (0 is the producer)")
        users.append((agent, order_from_json(entry)))
    miner_obj = obj.get("miner", {}) or {}
    strategy = miner_obj.get("strategy", "none")
    if strategy not in MINER_STRATEGIES:
        raise ScenarioError(f"unknown miner strategy {strategy!r}")
    miner = MinerSpec(
        strategy=strategy,
        orders=[order_from_json(o) for o in miner_obj.get("orders", [])],
        n=int(miner_obj.get("n", 3)),
    )
    rule = obj.get("rule", "greedy")
    if rule not in ("greedy", "arbitrary"):
        raise ScenarioError(f"unknown rule {rule!r}")
    tie_break = obj.get("tie_break", "lowest_index")
    perm = obj.get("permutation")
    return Scenario(
        potential=potential,
        x0=x0,
        user_orders=users,
        miner=miner,
        rule=rule,
        tie_break=tie_break,
        seed=int(obj.get("seed", 0)),
        permutation=None if perm is None else [int(i) for i in perm],
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
    return scenario_from_json(obj)


# ---------------------------------------------------------------------------
# running a scenario


def _assemble(scenario: Scenario):
    """Build the block and pick the ordering; returns (block, ordering,
    attack_info) where attack_info carries sandwich/exploit metadata."""
    pot = make_potential(scenario.potential)
    info = {}
    if scenario.miner.strategy == "impossibility":
        x0, block = impossibility_block(scenario.miner.n)
        if scenario.user_orders:
            raise ScenarioError("the impossibility strategy builds its own block; drop user_orders")
        scenario = Scenario(
            scenario.potential, x0, [], scenario.miner, scenario.rule,
            scenario.tie_break, scenario.seed, scenario.permutation,
        )
    else:
        orders = [o for _, o in scenario.user_orders]
        owners = [a for a, _ in scenario.user_orders]
        miner_orders = []
        if scenario.miner.strategy == "custom":
            miner_orders = list(scenario.miner.orders)
        elif scenario.miner.strategy == "sandwich":
            targets = [
                (i, o) for i, o in enumerate(orders)
                if o.is_buy and not math.isinf(o.p)
            ]
            if not targets:
                raise ScenarioError("sandwich strategy needs a user limit buy to target")
            t_idx, target = targets[0]
            plan = plan_sandwich(pot, scenario.x0, target)
            info["sandwich"] = {
                "w": plan.w,
                "front_qty": plan.front.q if plan.front else 0.0,
                "predicted_profit": plan.predicted_profit,
                "target_index": t_idx,
            }
            if plan.front is not None:
                miner_orders = [plan.front, plan.back]
                if scenario.rule == "arbitrary" and scenario.permutation is None:
                    n_users = len(orders)
                    front_i, back_i = n_users, n_users + 1
                    user_seq = [t_idx] + [i for i in range(n_users) if i != t_idx]
                    scenario.permutation = [front_i] + user_seq + [back_i]
        block = Block(
            tuple(orders) + tuple(miner_orders),
            tuple(owners) + tuple(0 for _ in miner_orders),
        )
    if scenario.rule == "greedy":
        ordering = greedy_sequence(
            pot, scenario.x0, block, tie_break=scenario.tie_break, seed=scenario.seed
        )
    else:
        perm = scenario.permutation if scenario.permutation is not None else range(len(block))
        ordering = arbitrary_sequence(block, perm)
    return scenario, pot, block, ordering, info


def run_scenario(scenario: Scenario, suite_trials: int = 200) -> dict:
    """Execute a scenario end to end and build the report dict."""
    scenario, pot, block, ordering, info = _assemble(scenario)
    outcome = execute_ordering(pot, scenario.x0, block, ordering)

    ownership = dict(enumerate(block.owners))
    if scenario.miner.strategy == "impossibility" and ordering:
        sel = select_exploit(pot, scenario.x0, block, ordering)
        for i in (sel.buy_index, *sel.sell_indices):
            ownership[i] = 0
        info["exploit"] = {
            "buy_index": sel.buy_index,
            "sell_indices": list(sel.sell_indices),
            "z_trace": list(sel.z_trace),
        }

    agents = sorted(set(ownership.values()) | {0})
    utilities = {
        str(a): [u.d1, u.d2]
        for a in agents
        for u in [agent_utility(outcome, ownership, a)]
    }
    split = core_tail_decompose(pot, outcome)
    ordered_orders = [block.orders[i] for i in ordering]
    verified = verify_greedy(pot, scenario.x0, ordered_orders)
    classifications = {}
    for agent in agents:
        if agent == 0:
            continue
        if sum(1 for i in ownership.values() if i == agent) != 1:
            continue
        try:
            classifications[str(agent)] = classify_user_order(pot, outcome, ownership, agent).value
        except ClassificationViolation:
            # outside the greedy language there is no guarantee at all;
            # inside it, producer limit orders flipping from aborted to
            # executed make the dominance comparison incomparable
            classifications[str(agent)] = "guarantee_violated"
    trace = []
    for t, i in enumerate(ordering):
        o = block.orders[i]
        res = outcome.results[t]
        trace.append(
            {
                "t": t + 1,
                "side": o.side,
                "qty": o.q,
                "limit": None if (o.is_buy and math.isinf(o.p)) else o.p,
                "owner": ownership[i],
                "status": res.status,
                "payment": res.payment,
                "x1": outcome.states[t].x1,
                "x2": outcome.states[t].x2,
            }
        )

    from . import suites as suite_mod

    sanity = {}
    for name, fn in (
        ("pricing", suite_mod.pricing_suite),
        ("duality", suite_mod.duality_suite),
        ("zero_payment", suite_mod.zero_payment_suite),
    ):
        r = fn(trials=suite_trials, seed=scenario.seed)
        sanity[name] = {"trials": r.trials, "violations": r.violations}

    return {
        "scenario": scenario_to_json(scenario),
        "ordering": list(ordering),
        "orders": [
            {**order_to_json(o), "owner": ownership[i]} for i, o in enumerate(block.orders)
        ],
        "trace": trace,
        "final_state": {"x1": outcome.final_state.x1, "x2": outcome.final_state.x2},
        "utilities": utilities,
        "core": sorted(split.core),
        "tail": sorted(split.tail),
        "classifications": classifications,
        "verifier": verified,
        "attack": info or None,
        "suites": sanity,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def trace_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report["trace"]:
        limit = row["limit"]
        writer.writerow(
            [
                row["t"],
                row["side"],
                repr(row["qty"]),
                "inf" if limit is None else repr(limit),
                row["owner"],
                row["status"],
                repr(row["payment"]),
                repr(row["x1"]),
                repr(row["x2"]),
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verifiable trace files


def load_trace(path):
    """Read a verifiable trace: either a report produced by `run` or a
    bare object with potential, x0, and the ordered orders."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ScenarioError("trace must be a JSON object")
    if "scenario" in obj:  # a full report
        scen = scenario_from_json(obj["scenario"])
        pot = make_potential(scen.potential)
        try:
            orders = [order_from_json(o) for o in obj["orders"]]
            ordering = [int(i) for i in obj["ordering"]]
            ordered = [orders[i] for i in ordering]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ScenarioError(f"bad report trace: {exc}") from None
        return pot, scen.x0, ordered
    try:
        pot = make_potential(obj["potential"])
        x0 = PoolState(float(obj["x0"]["x1"]), float(obj["x0"]["x2"]))
        ordered = [order_from_json(o) for o in obj["orders"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad trace: {exc}") from None
    return pot, x0, ordered
