"""Command line front end.

Subcommands:

    run      execute a scenario file, writing a JSON report and a CSV of
             the state trace
    verify   check a trace or report against the greedy sequencing rule
             (exit 0: valid, 1: invalid, 2: malformed input)
    attack   plan a sandwich against a quoted order, or build and solve
             one ordering of the universal-exploit block
    suite    run a named randomized property suite group
             (pricing | duality | greedy | impossibility | sandwich | all)

Reports are deterministic: the same scenario and seed produce the same
bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenario as scn
from . import suites
from .adversary import (
    NotLiquidityPreserving,
    UserOrderInfeasible,
    impossibility_block,
    plan_sandwich,
    select_exploit,
)
from .exchange import Order, PoolState, make_potential
from .game import agent_utility, execute_ordering
from .sequencing import verify_greedy


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ammseq",
        description="Liquidity-pool sequencing simulator: run scenarios, "
        "verify orderings, plan attacks, and fuzz the market invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("--scenario", required=True, help="scenario JSON path")
    p_run.add_argument("--out", help="report JSON path (default: stdout)")
    p_run.add_argument("--csv", help="trace CSV path (default: <out>.csv)")
    p_run.add_argument("--tie-break", choices=["lowest_index", "highest_quantity", "random"],
                       help="override the scenario's tie-break policy")
    p_run.add_argument("--seed", type=int, help="override the scenario's seed")
    p_run.add_argument("--suite-trials", type=int, default=200,
                       help="trials for the report's sanity suites")

    p_ver = sub.add_parser("verify", help="verify a trace or report file")
    p_ver.add_argument("trace", help="trace/report JSON path")

    p_atk = sub.add_parser("attack", help="plan an attack")
    atk_sub = p_atk.add_subparsers(dest="attack_kind", required=True)
    p_sand = atk_sub.add_parser("sandwich", help="size a sandwich around a limit buy")
    p_sand.add_argument("--potential", default="product",
                        choices=["product", "additive", "stable"])
    p_sand.add_argument("--x1", type=float, required=True)
    p_sand.add_argument("--x2", type=float, required=True)
    p_sand.add_argument("--qty", type=float, required=True)
    p_sand.add_argument("--limit", type=float, required=True)
    p_sand.add_argument("--out", help="plan JSON path (default: stdout)")
    p_imp = atk_sub.add_parser("impossibility",
                               help="build the universal-exploit block and pick the producer's orders")
    p_imp.add_argument("--n", type=int, default=3)
    p_imp.add_argument("--pattern", help="side pattern like BSSBSB (default: alternating)")
    p_imp.add_argument("--out", help="result JSON path (default: stdout)")

    p_suite = sub.add_parser("suite", help="run a property suite group")
    p_suite.add_argument("name", help="pricing | duality | greedy | impossibility | sandwich | all")
    p_suite.add_argument("--trials", type=int, default=None)
    p_suite.add_argument("--seed", type=int, default=0)
    return parser


def _emit(payload: dict, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n")
    else:
        print(text)


def cmd_run(args) -> int:
    try:
        scenario = scn.load_scenario(args.scenario)
        if args.tie_break is not None:
            scenario.tie_break = args.tie_break
        if args.seed is not None:
            scenario.seed = args.seed
        report = scn.run_scenario(scenario, suite_trials=args.suite_trials)
    except (scn.ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = scn.report_to_json(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
        csv_path = args.csv or str(Path(args.out).with_suffix(".csv"))
    else:
        print(text)
        csv_path = args.csv
    if csv_path:
        Path(csv_path).write_text(scn.trace_to_csv(report))
    return 0


def cmd_verify(args) -> int:
    try:
        pot, x0, ordered = scn.load_trace(args.trace)
    except (scn.ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ok = verify_greedy(pot, x0, ordered)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_attack(args) -> int:
    if args.attack_kind == "sandwich":
        pot = make_potential(args.potential)
        state = PoolState(args.x1, args.x2)
        user = Order.buy(args.qty, args.limit)
        try:
            plan = plan_sandwich(pot, state, user)
        except (NotLiquidityPreserving, UserOrderInfeasible, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        seq = plan.orders(user)
        state_t = state
        rows = []
        for o in seq:
            from .exchange import execute_order

            res = execute_order(pot, state_t, o)
            rows.append(
                {"side": o.side, "qty": o.q, "status": res.status, "payment": res.payment}
            )
            state_t = res.state
        _emit(
            {
                "w": plan.w,
                "front_qty": plan.front.q if plan.front else 0.0,
                "predicted_profit": plan.predicted_profit,
                "execution": rows,
                "greedy_would_allow": verify_greedy(pot, state, seq),
            },
            args.out,
        )
        return 0
    # impossibility
    try:
        x0, block = impossibility_block(args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    n = args.n
    if args.pattern:
        pattern = args.pattern.upper()
        if sorted(pattern) != sorted("B" * n + "S" * n):
            print(f"error: pattern must use exactly {n} B and {n} S", file=sys.stderr)
            return 2
        perm, nb, ns = [], 0, n
        for ch in pattern:
            if ch == "B":
                perm.append(nb)
                nb += 1
            else:
                perm.append(ns)
                ns += 1
    else:
        perm = [i % 2 * n + i // 2 for i in range(2 * n)]  # B S B S ...
    pot = make_potential("product")
    sel = select_exploit(pot, x0, block, perm)
    outcome = execute_ordering(pot, x0, block, perm)
    ownership = dict(enumerate(block.owners))
    for i in (sel.buy_index, *sel.sell_indices):
        ownership[i] = 0
    u = agent_utility(outcome, ownership, 0)
    _emit(
        {
            "n": n,
            "x0": {"x1": x0.x1, "x2": x0.x2},
            "ordering": list(perm),
            "producer_orders": sorted([sel.buy_index, *sel.sell_indices]),
            "z_trace": list(sel.z_trace),
            "producer_utility": [u.d1, u.d2],
        },
        args.out,
    )
    return 0


def cmd_suite(args) -> int:
    try:
        results = suites.run_suite(args.name, trials=args.trials, seed=args.seed)
    except KeyError:
        print(f"error: unknown suite {args.name!r}; "
              "pick from pricing, duality, greedy, impossibility, sandwich, all",
              file=sys.stderr)
        return 2
    failures = 0
    for r in results:
        print(r.summary())
        for key, count in sorted(r.detail.items()):
            if count:
                print(f"    {key}: {count}")
        failures += r.violations
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": cmd_run,
        "verify": cmd_verify,
        "attack": cmd_attack,
        "suite": cmd_suite,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
