#!/usr/bin/env python3
"""Fuzz the market's structural guarantees at a demo scale.

The same suites back `ammseq suite all` and the acceptance tests; here
they run at a fraction of the full trial counts so the whole tour takes
a couple of seconds.
"""

import time

from ammseq import suites

RUNS = [
    ("pricing monotonicity", suites.pricing_suite, dict(trials=1500)),
    ("zero payment", suites.zero_payment_suite, dict(trials=1500)),
    ("slope monotonicity", suites.slope_suite, dict(trials=1500)),
    ("duality", suites.duality_suite, dict(trials=1500)),
    ("monotone feasibility", suites.feasibility_suite, dict(trials=1500)),
    ("stable solver vs grid", suites.solver_suite, dict(trials=300)),
    ("greedy completeness", suites.greedy_completeness_suite, dict(trials=1500)),
    ("greedy tail", suites.tail_suite, dict(trials=1500)),
    ("outcome classification", suites.classification_suite, dict(trials=1500)),
    ("sandwich delivery", suites.sandwich_suite, dict(trials=300)),
    ("exploit universality", suites.impossibility_suite, {}),
]

total_violations = 0
for label, fn, kwargs in RUNS:
    t0 = time.time()
    result = fn(**kwargs)
    took = time.time() - t0
    flag = "ok" if result.passed else "VIOLATIONS"
    print(f"{label:>24}: {result.trials:>5} trials, "
          f"{result.violations} violations  [{flag}] ({took:.2f}s)")
    if result.detail and any(result.detail.values()):
        print(f"{'':>26}{result.detail}")
    total_violations += result.violations

print()
if total_violations == 1:
    print("The single expected violation is the n=3 ordering (S,B,S,S,B,B)")
    print("of the universal-exploit block, whose best assignment nets")
    print("exactly zero -- a real boundary gap in that construction.")
else:
    print(f"total violations: {total_violations}")
