"""Reliability numbers: why a single sampled key is hopeless and how fast
the mode decision recovers with k.

Prints the single-sample reliability for a mid-sized electorate (both the
without-replacement form and the with-replacement form the sampler actually
follows), then an accuracy-versus-k table comparing the exact analytic value
with a Monte Carlo sweep.
"""

from votesim.experiments import (
    TrialConfig,
    expected_accuracy,
    run_point,
)
from votesim.hevs import (
    reliability_probability,
    reliability_probability_with_replacement,
    resolve_sample_size,
)

n, m = 50, 5
print(f"single sample, n={n}, m={m} uncooperative:")
for t in (5, 10, 25):
    exact = reliability_probability(n, m, t)
    with_repl = reliability_probability_with_replacement(n, m, t)
    print(f"  t={t:2d}: without replacement {exact:.4f}, with replacement {with_repl:.4f}")
print("  (at t = n/2 a single sample is nearly always disrupted)")

print()
p_fail = 0.1
t = resolve_sample_size("sqrt-half", n)
print(f"mode decision, n={n}, p_fail={p_fail}, sample size t={t}:")
print(f"{'k':>4} {'analytic':>10} {'simulated':>10}")
for k in (2, 4, 8, 16):
    analytic = expected_accuracy(n, p_fail, k, t, min_consistency=2)
    row = run_point(TrialConfig(n=n, p_fail=p_fail, k=k, trials=400, seeds=(1, 2)))
    print(f"{k:>4} {analytic:>10.4f} {row.accuracy:>10.4f}")
