"""Monte Carlo reliability experiments for the sampled-key election.

A trial runs one full election and scores it correct when the mode decision
equals the honest vote sum (disrupting voters submit 0, so that sum is well
defined). Two evaluation modes share the same seeded world - roles, votes,
sampling plan - per trial:

* "full" runs the actual group arithmetic end to end.
* "symbolic" skips the crypto: a sample decodes to the true tally iff it
  contains no disruptive voter, and every disrupted sample yields its own
  unique garbage value, which is exactly the regime the full pipeline is in
  once garbage elements stop colliding. The two modes agree trial-for-trial
  on small instances, and symbolic is what makes thousand-trial sweeps cheap.

Accuracy per grid point is averaged over the configured seeds, and
`expected_accuracy` provides the exact analytic value for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .adversary import AdversaryConfig, Behavior, assign_roles
from .errors import AmbiguousMode, NoConsistentResult
from .group import default_group
from .hevs import (
    make_sampling_plan,
    mode_decision,
    reliability_probability,
    reliability_probability_with_replacement,
    resolve_sample_size,
    run_sampled_election,
)
from .seeding import derive_seed, spawn

#: column order of the sweep CSV; header row is mandatory
CSV_COLUMNS = ("n", "p_fail", "k", "min_consistency", "t", "trials", "seeds", "accuracy", "mode")

TRIAL_BEHAVIORS = ("fake_share", "silent")


def format_number(value) -> str:
    """CSV number rendering: six significant digits."""
    return format(value, ".6g")


@dataclass(frozen=True)
class TrialConfig:
    """One grid point: electorate, adversary rate, sampling and scoring knobs.

    The default sample-size policy is sqrt-half (t = ceil(sqrt(n/2))): the
    mode decision needs a macroscopic fraction of clean samples, so the
    per-sample draw count must grow much slower than n.
    """

    n: int
    p_fail: float
    k: int
    t_policy: str | int = "sqrt-half"
    min_consistency: int = 2
    trials: int = 1000
    seeds: tuple[int, ...] = (1, 2, 3)
    mode: str = "symbolic"
    behavior: str = "fake_share"

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be at least 1")
        if not 0.0 <= self.p_fail <= 1.0:
            raise ValueError("p_fail must be in [0, 1]")
        if self.min_consistency not in (2, 3):
            raise ValueError("min_consistency must be 2 or 3")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.mode not in ("symbolic", "full"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.behavior not in TRIAL_BEHAVIORS:
            raise ValueError(f"trial behavior must be one of {TRIAL_BEHAVIORS}")
        resolve_sample_size(self.t_policy, self.n)


@dataclass(frozen=True)
class SweepRow:
    n: int
    p_fail: float
    k: int
    min_consistency: int
    t: int
    trials: int
    seeds: int
    accuracy: float
    mode: str


def run_trial(config: TrialConfig, seed: int) -> bool:
    """One election; True when the mode decision equals the honest sum."""
    world = spawn(seed, "world")
    adversary = AdversaryConfig(config.p_fail, Behavior(config.behavior))
    roles = assign_roles(world, config.n, adversary)
    votes = [world.randrange(2) if role.honest else 0 for role in roles]
    plan = make_sampling_plan(world, config.n, config.k, config.t_policy)
    truth = sum(votes)

    if config.mode == "symbolic":
        silent = Behavior(config.behavior) is Behavior.SILENT
        honest = [role.honest for role in roles]
        candidates: list[int | None] = []
        for j, multiset in enumerate(plan.multisets):
            clean = all(honest[i - 1] for i in multiset)
            if clean:
                candidates.append(truth)
            else:
                # Silence blocks the sample outright; fake data produces a
                # per-sample-unique garbage value, encoded as a sentinel that
                # can never equal a real tally.
                candidates.append(None if silent else -(j + 1))
    else:
        results = run_sampled_election(
            default_group(), votes, roles, plan, spawn(seed, "crypto")
        )
        candidates = results

    try:
        decision = mode_decision(candidates, config.min_consistency)
    except (NoConsistentResult, AmbiguousMode):
        return False
    return decision == truth


def run_point(config: TrialConfig) -> SweepRow:
    """Accuracy at one grid point, averaged over the configured seeds."""
    per_seed = []
    for seed in config.seeds:
        correct = sum(
            run_trial(config, derive_seed("trial", seed, index))
            for index in range(config.trials)
        )
        per_seed.append(correct / config.trials)
    return SweepRow(
        n=config.n,
        p_fail=config.p_fail,
        k=config.k,
        min_consistency=config.min_consistency,
        t=resolve_sample_size(config.t_policy, config.n),
        trials=config.trials,
        seeds=len(config.seeds),
        accuracy=sum(per_seed) / len(per_seed),
        mode=config.mode,
    )


def run_sweep(configs: Sequence[TrialConfig]) -> list[SweepRow]:
    if not configs:
        raise ValueError("empty sweep grid")
    return [run_point(config) for config in configs]


def grid(
    ns: Iterable[int],
    p_fails: Iterable[float],
    ks: Iterable[int],
    **common,
) -> list[TrialConfig]:
    """Cartesian grid in row order: n outermost, then p_fail, then k."""
    configs = [
        TrialConfig(n=n, p_fail=p_fail, k=k, **common)
        for n in ns
        for p_fail in p_fails
        for k in ks
    ]
    if not configs:
        raise ValueError("empty sweep grid")
    return configs


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join((
            format_number(row.n),
            format_number(row.p_fail),
            format_number(row.k),
            format_number(row.min_consistency),
            format_number(row.t),
            format_number(row.trials),
            format_number(row.seeds),
            format_number(row.accuracy),
            row.mode,
        )))
    return "\n".join(lines) + "\n"


def analytic_table(ns: Iterable[int], ms: Iterable[int], t: int) -> list[tuple]:
    """Exact single-sample reliability rows (n, m, t, exact, with-replacement)."""
    rows = []
    for n in ns:
        for m in ms:
            rows.append((
                n, m, t,
                reliability_probability(n, m, t),
                reliability_probability_with_replacement(n, m, t),
            ))
    return rows


def analytic_csv(rows: Sequence[tuple]) -> str:
    lines = ["n,m,t,reliability,reliability_with_replacement"]
    for n, m, t, exact, with_repl in rows:
        lines.append(",".join((
            format_number(n), format_number(m), format_number(t),
            format_number(exact), format_number(with_repl),
        )))
    return "\n".join(lines) + "\n"


def empirical_sample_reliability(n: int, m: int, t: int, trials: int, seed: int = 1) -> float:
    """Monte Carlo estimate of one sample avoiding m fixed bad voters.

    Draws t indices with replacement per trial, matching the sampling plan;
    the estimate converges on reliability_probability_with_replacement, not
    on the without-replacement formula.
    """
    rng = spawn("sample-reliability", seed)
    clean = 0
    for _ in range(trials):
        if all(rng.randrange(n) >= m for _ in range(t)):
            clean += 1
    return clean / trials


def expected_accuracy(n: int, p_fail: float, k: int, t: int, min_consistency: int) -> float:
    """Exact accuracy of the symbolic model.

    The count of disruptive voters is Binomial(n, p_fail); given that count
    M, each of the k samples is independently clean with probability
    ((n - M)/n) ** t, and the decision is correct iff at least
    min_consistency samples are clean.
    """
    total = 0.0
    for bad in range(n + 1):
        weight = math.comb(n, bad) * p_fail ** bad * (1 - p_fail) ** (n - bad)
        if weight < 1e-15:
            continue
        p_clean = ((n - bad) / n) ** t
        tail = sum(
            math.comb(k, i) * p_clean ** i * (1 - p_clean) ** (k - i)
            for i in range(min_consistency, k + 1)
        )
        total += weight * tail
    return total
