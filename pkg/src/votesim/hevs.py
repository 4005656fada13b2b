"""Sampled-key hardening for the homomorphic election.

Instead of one public key built from every voter's piece, the government
draws k multisets of key pieces (with replacement), builds one sampled key
per multiset, and runs the whole vote/aggregate/decrypt pipeline once per
sample. A sample decodes to the true tally whenever every sampled voter
cooperates honestly; disrupted samples land on effectively unique garbage
elements, so the most frequent decoded tally - the mode - is the reliable
result once it reaches a small consistency count.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .adversary import Behavior, VoterRole, extra_vote_ciphertext, fake_decryption_share
from .errors import AmbiguousMode, DiscreteLogNotFound, MissingShares, NoConsistentResult
from .group import GroupParams, discrete_log_bounded
from .hev import Ciphertext, DecryptionShare, aggregate, encrypt_vote, keygen_share

#: recorder callback signature used by the transcript layer:
#: (phase, sender, receiver, payload) -> None
Recorder = Callable[[str, str, str, dict], None]


@dataclass(frozen=True)
class SamplingPlan:
    """k multisets of voter indices, drawn with replacement from [1, n]."""

    population: int
    multisets: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.multisets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(ms) for ms in self.multisets)

    def multiplicity(self, sample_index: int) -> Counter:
        return Counter(self.multisets[sample_index])


@dataclass(frozen=True)
class SampledKey:
    """One sampled public key and how often each voter's piece went into it."""

    sample_index: int
    key: int
    multiplicity: Mapping[int, int]


@dataclass(frozen=True)
class SampleResult:
    """Outcome of one sample: the unmasked element and its decoded tally.

    The tally is None when the element decodes to nothing within the bound,
    which marks the sample as unreliable.
    """

    sample_index: int
    element: int | None
    tally: int | None


def _ceil_sqrt(n: int) -> int:
    root = math.isqrt(n)
    return root if root * root == n else root + 1


def resolve_sample_size(policy, n: int) -> int:
    """Turn a size policy into a concrete per-sample draw count.

    None or "half" gives ceil(n/2); "sqrt" gives ceil(sqrt(n)); "sqrt-half"
    gives ceil(sqrt(ceil(n/2))); an integer is used as-is.
    """
    if policy is None or policy == "half":
        return (n + 1) // 2
    if policy == "sqrt":
        return _ceil_sqrt(n)
    if policy == "sqrt-half":
        return _ceil_sqrt((n + 1) // 2)
    if isinstance(policy, int) and not isinstance(policy, bool):
        if policy < 1:
            raise ValueError("sample size must be at least 1")
        return policy
    raise ValueError(f"unknown sample-size policy {policy!r}")


def make_sampling_plan(rng: random.Random, n: int, k: int, t_policy=None) -> SamplingPlan:
    """Draw k multisets of size t uniformly with replacement from [1, n]."""
    if n < 1:
        raise ValueError("population must be at least 1")
    if k < 1:
        raise ValueError("need at least one sampling")
    if isinstance(t_policy, (list, tuple)):
        sizes = [resolve_sample_size(t, n) for t in t_policy]
        if len(sizes) != k:
            raise ValueError(f"got {len(sizes)} sample sizes for k={k}")
    else:
        sizes = [resolve_sample_size(t_policy, n)] * k
    multisets = tuple(
        tuple(rng.randrange(1, n + 1) for _ in range(size)) for size in sizes
    )
    return SamplingPlan(population=n, multisets=multisets)


def combine_sampled_public_key(
    params: GroupParams, pieces: Mapping[int, int], plan: SamplingPlan, sample_index: int
) -> SampledKey:
    """Multiply the sampled pieces, counting repeats, into the j-th key."""
    mult = plan.multiplicity(sample_index)
    missing = [i for i in mult if i not in pieces]
    if missing:
        raise ValueError(f"no key piece for sampled voters {sorted(missing)}")
    key = 1
    for voter_id, count in mult.items():
        key = params.mul(key, params.exp(pieces[voter_id], count))
    return SampledKey(sample_index, key, dict(mult))


def combine_sampled_decrypt(
    params: GroupParams,
    shares: Mapping[int, DecryptionShare],
    plan: SamplingPlan,
    sample_index: int,
    aggregate_ct: Ciphertext,
    bound: int,
    table: dict[int, int] | None = None,
) -> SampleResult:
    """Unmask one sample using the sampled voters' responses.

    Each distinct sampled voter contributes one response; the government
    raises it to that voter's multiplicity in the sample. Voters outside the
    sample are ignored. Raises MissingShares when a sampled voter never
    responded.
    """
    mult = plan.multiplicity(sample_index)
    missing = [i for i in mult if i not in shares]
    if missing:
        raise MissingShares(missing)
    mask = 1
    for voter_id, count in mult.items():
        mask = params.mul(mask, params.exp(shares[voter_id].partial, count))
    element = params.mul(aggregate_ct.c2, params.inv(mask))
    try:
        tally = discrete_log_bounded(params, element, bound, table=table)
    except DiscreteLogNotFound:
        tally = None
    return SampleResult(sample_index, element, tally)


def mode_decision(results: Iterable, min_consistency: int = 2) -> int:
    """Pick the most frequent decoded tally among the sample results.

    Accepts SampleResult objects or bare optional integers. Undecodable
    samples (None) never become candidates. The winner must reach
    min_consistency occurrences and be the unique maximum; otherwise the
    decision fails closed with NoConsistentResult or AmbiguousMode.
    """
    if min_consistency < 2:
        raise ValueError("min_consistency below 2 cannot distinguish garbage from truth")
    values = []
    for result in results:
        value = result.tally if isinstance(result, SampleResult) else result
        if value is not None:
            values.append(value)
    if not values:
        raise NoConsistentResult("no sample decoded to a tally at all")
    counts = Counter(values)
    top_count = max(counts.values())
    if top_count < min_consistency:
        raise NoConsistentResult(
            f"best consistency is {top_count}, below the required {min_consistency}"
        )
    winners = [value for value, count in counts.items() if count == top_count]
    if len(winners) > 1:
        raise AmbiguousMode(f"tallies {sorted(winners)} tie at {top_count} occurrences")
    return winners[0]


def reliability_probability(n: int, m: int, t: int) -> float:
    """Chance that a without-replacement draw of t pieces avoids all m
    uncooperative voters: C(n-m, t) / C(n, t)."""
    if n < 1 or m < 0 or t < 0 or m > n or t > n:
        raise ValueError(f"bad domain: n={n}, m={m}, t={t}")
    if t > n - m:
        return 0.0
    return math.comb(n - m, t) / math.comb(n, t)


def reliability_probability_with_replacement(n: int, m: int, t: int) -> float:
    """With-replacement counterpart: ((n-m)/n) ** t, matching how the
    sampling plan actually draws."""
    if n < 1 or m < 0 or t < 0 or m > n:
        raise ValueError(f"bad domain: n={n}, m={m}, t={t}")
    return ((n - m) / n) ** t


def run_sampled_election(
    params: GroupParams,
    votes: Sequence[int],
    roles: Sequence[VoterRole],
    plan: SamplingPlan,
    rng: random.Random,
    dlog_table: dict[int, int] | None = None,
    recorder: Recorder | None = None,
) -> list[SampleResult]:
    """Run the full k-sample pipeline over the given votes and roles.

    `votes` holds the plaintext each voter actually encrypts (an extra-vote
    cheater's inflated value included); `roles` controls decryption behavior.
    Fake-share voters reuse one random exponent across every sample they
    appear in. Samples blocked by silent voters come back with element and
    tally None. The caller applies mode_decision to the returned results.
    """
    n = plan.population
    if len(votes) != n or len(roles) != n:
        raise ValueError("votes, roles, and plan population must agree")

    key_shares = [keygen_share(rng, params, i + 1) for i in range(n)]
    pieces = {share.voter_id: share.public_piece for share in key_shares}
    if recorder:
        for share in key_shares:
            recorder("key", f"voter:{share.voter_id}", "government",
                     {"tag": "key_piece", "voter_id": share.voter_id,
                      "piece": format(share.public_piece, "x")})

    sampled_keys = [combine_sampled_public_key(params, pieces, plan, j) for j in range(plan.k)]
    if recorder:
        payload = {"tag": "sampled_keys",
                   "keys": [format(sk.key, "x") for sk in sampled_keys]}
        for i in range(1, n + 1):
            recorder("broadcast", "government", f"voter:{i}", payload)

    ciphertexts: list[list[Ciphertext]] = []
    for i in range(n):
        role = roles[i]
        row = []
        for sk in sampled_keys:
            if role.behavior is Behavior.EXTRA_VOTE:
                row.append(extra_vote_ciphertext(params, sk.key, votes[i], rng))
            else:
                row.append(encrypt_vote(params, sk.key, votes[i], rng))
        ciphertexts.append(row)
        if recorder:
            recorder("vote", f"voter:{i + 1}", "government",
                     {"tag": "ciphertexts", "voter_id": i + 1,
                      "pairs": [[format(ct.c1, "x"), format(ct.c2, "x")] for ct in row]})

    aggregates = [aggregate(params, [ciphertexts[i][j] for i in range(n)]) for j in range(plan.k)]
    if recorder:
        payload = {"tag": "decrypt_request", "pending": True,
                   "aggregates": [[format(ct.c1, "x"), format(ct.c2, "x")] for ct in aggregates]}
        for i in range(1, n + 1):
            recorder("decrypt_request", "government", f"voter:{i}", payload)

    # responses[j] maps voter_id -> share, for the voters sampled in j
    responses: list[dict[int, DecryptionShare]] = [{} for _ in range(plan.k)]
    for i in range(n):
        role = roles[i]
        voter_id = i + 1
        if role.behavior is Behavior.SILENT:
            continue
        fake_exponent = None
        if role.behavior is Behavior.FAKE_SHARE:
            secret = key_shares[i].secret_key
            fake_exponent = params.random_scalar(rng)
            while fake_exponent == secret:
                fake_exponent = params.random_scalar(rng)
        answered = []
        for j in range(plan.k):
            if voter_id not in sampled_keys[j].multiplicity:
                continue
            if fake_exponent is not None:
                share = fake_decryption_share(rng, params, aggregates[j].c1,
                                              voter_id, exponent=fake_exponent)
            else:
                share = DecryptionShare(voter_id, params.exp(aggregates[j].c1,
                                                             key_shares[i].secret_key))
            responses[j][voter_id] = share
            answered.append(j)
        if recorder and answered:
            recorder("decrypt_share", f"voter:{voter_id}", "government",
                     {"tag": "decryption_shares", "voter_id": voter_id,
                      "partials": {str(j): format(responses[j][voter_id].partial, "x")
                                   for j in answered}})

    results = []
    for j in range(plan.k):
        try:
            result = combine_sampled_decrypt(params, responses[j], plan, j,
                                             aggregates[j], n, table=dlog_table)
        except MissingShares:
            result = SampleResult(j, None, None)
        results.append(result)
    if recorder:
        recorder("result", "government", "public",
                 {"tag": "sample_results",
                  "tallies": [r.tally for r in results]})
    return results
