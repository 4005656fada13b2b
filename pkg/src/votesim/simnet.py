"""Deterministic, round-based in-memory elections with replayable transcripts.

run_election drives every party of the chosen protocol to completion (or to
a structured protocol error), recording one Message per exchanged protocol
message. A transcript file is the JSON config header followed by one
tab-separated record per message, so any election can be re-run bit-for-bit
from its transcript alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import bsv
from .adversary import (
    AdversaryConfig,
    Behavior,
    VoterRole,
    assign_roles,
    extra_vote_ciphertext,
    fake_decryption_share,
)
from .errors import ConfigError, CorruptTranscript, ProtocolError
from .group import GroupParams, default_group, generate_group
from .hev import Government, Voter, decryption_share
from .hevs import make_sampling_plan, mode_decision, run_sampled_election
from .seeding import spawn

TRANSCRIPT_MAGIC = "votesim-transcript 1"

PHASE_ORDER = {
    "hev": ("key", "broadcast", "vote", "decrypt_request", "decrypt_share", "result"),
    "hevs": ("key", "broadcast", "vote", "decrypt_request", "decrypt_share", "result"),
    "bsv": ("signer_key", "blind_request", "signed_blind", "post", "result"),
}

PROTOCOLS = tuple(PHASE_ORDER)


@dataclass(frozen=True)
class Message:
    round: int
    phase: str
    sender: str
    receiver: str
    payload: dict

    def line(self) -> str:
        blob = json.dumps(self.payload, sort_keys=True, separators=(",", ":"))
        return f"{self.phase}\t{self.sender}\t{self.receiver}\t{blob.encode('utf-8').hex()}"


@dataclass(frozen=True)
class Schedule:
    """Round boundaries for the timed phases plus delivery behavior.

    The signing and posting windows must be disjoint; the gap is the
    modeled random delay between obtaining a signature and casting.
    """

    sign_window: tuple[int, int] = (1, 3)
    post_window: tuple[int, int] = (3, 5)
    anonymize: bool = True
    delivery_salt: int = 0

    def __post_init__(self):
        if self.sign_window[0] >= self.sign_window[1] or self.post_window[0] >= self.post_window[1]:
            raise ConfigError("phase windows must satisfy start < end")
        if self.sign_window[1] > self.post_window[0]:
            raise ConfigError("signing window must close before posting opens")

    def to_dict(self) -> dict:
        return {
            "sign_window": list(self.sign_window),
            "post_window": list(self.post_window),
            "anonymize": self.anonymize,
            "delivery_salt": self.delivery_salt,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        return cls(
            sign_window=tuple(data["sign_window"]),
            post_window=tuple(data["post_window"]),
            anonymize=data["anonymize"],
            delivery_salt=data["delivery_salt"],
        )


@dataclass(frozen=True)
class ElectionConfig:
    """Everything a run needs; fully determines the transcript via the seed."""

    protocol: str
    n: int
    seed: int = 1
    votes: tuple | None = None
    candidates: tuple[str, ...] = ("for", "against")
    k: int = 4
    t_policy: str | int | None = None
    min_consistency: int = 2
    p_fail: float = 0.0
    behavior: str = "fake_share"
    extra_vote_value: int = 2
    group_bits: int | None = None
    rsa_bits: int = 512
    replay_voters: tuple[int, ...] = ()
    schedule: Schedule = Schedule()

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if not 0.0 <= self.p_fail <= 1.0:
            raise ConfigError("p_fail must be in [0, 1]")
        Behavior(self.behavior)
        if self.votes is not None:
            if len(self.votes) != self.n:
                raise ConfigError(f"got {len(self.votes)} votes for n={self.n}")
            if self.protocol in ("hev", "hevs") and any(v not in (0, 1) for v in self.votes):
                raise ConfigError("hev/hevs votes must be 0 or 1")
        if self.protocol == "bsv":
            if self.p_fail:
                raise ConfigError("bsv does not model p_fail; use replay_voters")
            if not self.candidates:
                raise ConfigError("bsv needs a candidate set")
            if any(not 1 <= v <= self.n for v in self.replay_voters):
                raise ConfigError("replay_voters must be voter ids in [1, n]")

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "n": self.n,
            "seed": self.seed,
            "votes": list(self.votes) if self.votes is not None else None,
            "candidates": list(self.candidates),
            "k": self.k,
            "t_policy": self.t_policy,
            "min_consistency": self.min_consistency,
            "p_fail": self.p_fail,
            "behavior": self.behavior,
            "extra_vote_value": self.extra_vote_value,
            "group_bits": self.group_bits,
            "rsa_bits": self.rsa_bits,
            "replay_voters": list(self.replay_voters),
            "schedule": self.schedule.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ElectionConfig":
        data = dict(data)
        schedule = Schedule.from_dict(data.pop("schedule"))
        votes = data.pop("votes")
        replayers = data.pop("replay_voters")
        candidates = data.pop("candidates")
        return cls(
            votes=tuple(votes) if votes is not None else None,
            candidates=tuple(candidates),
            replay_voters=tuple(replayers),
            schedule=schedule,
            **data,
        )


@dataclass
class ElectionOutcome:
    config: ElectionConfig
    ok: bool
    tally: int | None = None
    decision: int | None = None
    counts: dict[str, int] | None = None
    sample_tallies: tuple | None = None
    true_tally: int | None = None
    error: str | None = None
    error_detail: str | None = None
    ledger_dump: tuple[str, ...] | None = None
    transcript: tuple[Message, ...] = ()


def _error_code(exc: Exception) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", type(exc).__name__).lower()


def _resolve_group(config: ElectionConfig) -> GroupParams:
    if config.group_bits is None:
        return default_group()
    return generate_group(config.group_bits, spawn(config.seed, "group"))


def _derive_world(config: ElectionConfig) -> tuple[list[VoterRole], list]:
    """Roles and the plaintext each voter will submit, drawn from the seed."""
    adversary = AdversaryConfig(config.p_fail, Behavior(config.behavior), config.extra_vote_value)
    roles = assign_roles(spawn(config.seed, "roles"), config.n, adversary)
    vote_rng = spawn(config.seed, "votes")
    submitted = []
    for i in range(config.n):
        if config.protocol == "bsv":
            intent = config.votes[i] if config.votes is not None else vote_rng.choice(config.candidates)
            submitted.append(intent)
            continue
        intent = config.votes[i] if config.votes is not None else vote_rng.randrange(2)
        role = roles[i]
        if role.honest:
            submitted.append(intent)
        elif role.behavior is Behavior.EXTRA_VOTE:
            submitted.append(config.extra_vote_value)
        else:
            submitted.append(0)
    return roles, submitted


def _honest_sum(roles: Sequence[VoterRole], submitted: Sequence[int]) -> int:
    return sum(v for role, v in zip(roles, submitted) if role.honest)


def run_election(config: ElectionConfig) -> ElectionOutcome:
    """Run one election; protocol failures become structured outcomes."""
    messages: list[Message] = []
    partial: dict = {}
    try:
        if config.protocol == "hev":
            fields = _run_hev(config, messages, partial)
        elif config.protocol == "hevs":
            fields = _run_hevs(config, messages, partial)
        else:
            fields = _run_bsv(config, messages)
    except ProtocolError as exc:
        return ElectionOutcome(
            config=config,
            ok=False,
            error=_error_code(exc),
            error_detail=str(exc),
            transcript=tuple(messages),
            **partial,
        )
    return ElectionOutcome(config=config, ok=True, transcript=tuple(messages), **fields)


def _run_hev(config: ElectionConfig, messages: list[Message], partial: dict) -> dict:
    params = _resolve_group(config)
    roles, submitted = _derive_world(config)
    partial["true_tally"] = _honest_sum(roles, submitted)
    n = config.n

    def emit(round_, phase, sender, receiver, payload):
        messages.append(Message(round_, phase, sender, receiver, payload))

    government = Government(params, n)
    voters = [Voter(i + 1, params, n, spawn(config.seed, "voter", i + 1)) for i in range(n)]

    for voter in voters:
        piece = voter.make_key_piece()
        government.receive_key_piece(voter.voter_id, piece)
        emit(0, "key", f"voter:{voter.voter_id}", "government",
             {"tag": "key_piece", "voter_id": voter.voter_id, "piece": format(piece, "x")})

    public_key = government.broadcast_public_key()
    for voter in voters:
        voter.receive_public_key(public_key)
        emit(1, "broadcast", "government", f"voter:{voter.voter_id}",
             {"tag": "public_key", "key": format(public_key, "x")})

    for i, voter in enumerate(voters):
        if roles[i].behavior is Behavior.EXTRA_VOTE:
            # Deviates from the honest machine: encrypts an out-of-range value.
            ct = extra_vote_ciphertext(params, public_key, submitted[i], voter.rng)
        else:
            ct = voter.cast_vote(submitted[i])
        government.receive_ciphertext(voter.voter_id, ct)
        emit(2, "vote", f"voter:{voter.voter_id}", "government",
             {"tag": "ciphertext", "voter_id": voter.voter_id,
              "c1": format(ct.c1, "x"), "c2": format(ct.c2, "x")})

    government.aggregate_votes()
    request = government.decryption_request()
    req_payload = {"tag": "decrypt_request", "pending": True,
                   "c1": format(request.aggregate.c1, "x"),
                   "c2": format(request.aggregate.c2, "x")}
    for voter in voters:
        emit(3, "decrypt_request", "government", f"voter:{voter.voter_id}", req_payload)

    for i, voter in enumerate(voters):
        role = roles[i]
        if role.behavior is Behavior.SILENT:
            continue
        if role.behavior is Behavior.FAKE_SHARE:
            share = fake_decryption_share(voter.rng, params, request.aggregate.c1,
                                          voter.voter_id, true_secret=voter.key_share.secret_key)
        elif role.behavior is Behavior.EXTRA_VOTE:
            # Cheated at the vote step but cooperates in decryption.
            share = decryption_share(params, voter.key_share, request)
        else:
            share = voter.handle_decryption_request(request)
        government.receive_share(share)
        emit(4, "decrypt_share", f"voter:{voter.voter_id}", "government",
             {"tag": "decryption_share", "voter_id": voter.voter_id,
              "partial": format(share.partial, "x")})

    tally = government.decrypt_tally()
    emit(5, "result", "government", "public", {"tag": "tally", "tally": tally})
    return {"tally": tally, "true_tally": partial["true_tally"]}


def _run_hevs(config: ElectionConfig, messages: list[Message], partial: dict) -> dict:
    params = _resolve_group(config)
    roles, submitted = _derive_world(config)
    partial["true_tally"] = _honest_sum(roles, submitted)
    plan = make_sampling_plan(spawn(config.seed, "plan"), config.n, config.k, config.t_policy)
    phase_round = {phase: i for i, phase in enumerate(PHASE_ORDER["hevs"])}

    def recorder(phase, sender, receiver, payload):
        messages.append(Message(phase_round[phase], phase, sender, receiver, payload))

    results = run_sampled_election(params, submitted, roles, plan,
                                   spawn(config.seed, "crypto"), recorder=recorder)
    partial["sample_tallies"] = tuple(r.tally for r in results)
    decision = mode_decision(results, config.min_consistency)
    return {
        "decision": decision,
        "sample_tallies": partial["sample_tallies"],
        "true_tally": partial["true_tally"],
    }


def _run_bsv(config: ElectionConfig, messages: list[Message]) -> dict:
    schedule = config.schedule
    if schedule.sign_window[1] - schedule.sign_window[0] < 2:
        raise ConfigError("signing window needs at least two rounds (request, response)")
    _, choices = _derive_world(config)
    keys = bsv.signer_keygen(spawn(config.seed, "rsa"), config.rsa_bits)
    pub = keys.public
    ledger = bsv.Ledger(pub, schedule.sign_window, schedule.post_window)
    registry = bsv.SignerRegistry(range(1, config.n + 1))

    def emit(round_, phase, sender, receiver, payload):
        messages.append(Message(round_, phase, sender, receiver, payload))

    emit(0, "signer_key", "government", "public",
         {"tag": "signer_key", "modulus": format(pub.modulus, "x"),
          "exponent": format(pub.exponent, "x")})

    request_round, response_round = schedule.sign_window[0], schedule.sign_window[0] + 1
    pending: list[tuple[bsv.Ballot, bsv.BlindingState]] = []
    for i in range(1, config.n + 1):
        rng = spawn(config.seed, "voter", i)
        ballot = bsv.make_ballot(choices[i - 1], rng)
        state = bsv.blind(ballot, pub, rng)
        pending.append((ballot, state))
        emit(request_round, "blind_request", f"voter:{i}", "government",
             {"tag": "blind_request", "voter_id": i, "blinded": format(state.blinded, "x")})
    signed: list[bsv.Ballot] = []
    for i, (ballot, state) in enumerate(pending, start=1):
        blind_sig = bsv.sign_blinded(keys, state.blinded, i, registry)
        emit(response_round, "signed_blind", "government", f"voter:{i}",
             {"tag": "signed_blind", "voter_id": i, "value": format(blind_sig, "x")})
        signed.append(ballot.with_signature(bsv.unblind(blind_sig, state, pub)))

    pool = [(i + 1, ballot) for i, ballot in enumerate(signed)]
    pool.extend((voter_id, signed[voter_id - 1]) for voter_id in config.replay_voters)
    spawn(config.seed, "delivery", schedule.delivery_salt).shuffle(pool)

    post_round = schedule.post_window[0]
    for voter_id, ballot in pool:
        sender = "anon" if schedule.anonymize else f"voter:{voter_id}"
        result = ledger.submit(ballot, now=post_round)
        emit(post_round, "post", sender, "ledger",
             {"tag": "ballot", "content": ballot.content,
              "nonce": format(ballot.nonce, "x"), "signature": format(ballot.signature, "x"),
              "accepted": result.accepted,
              "reason": result.reason.value if result.reason else None})

    counts = ledger.tally(now=schedule.post_window[1])
    counts_dict = {name: counts.get(name, 0) for name in sorted(set(counts) | set(config.candidates))}
    emit(schedule.post_window[1], "result", "ledger", "public",
         {"tag": "counts", "counts": counts_dict})
    return {"counts": counts_dict, "ledger_dump": tuple(ledger.dump_lines())}


def transcript_lines(outcome: ElectionOutcome) -> list[str]:
    header = f"{TRANSCRIPT_MAGIC} {json.dumps(outcome.config.to_dict(), sort_keys=True, separators=(',', ':'))}"
    return [header] + [message.line() for message in outcome.transcript]


def write_transcript(outcome: ElectionOutcome, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in transcript_lines(outcome):
            fh.write(line + "\n")


def replay(lines: Iterable[str]) -> ElectionOutcome:
    """Re-run the election encoded in a transcript and check it matches.

    Any divergence - truncation, edits, reordering, a malformed header -
    raises CorruptTranscript. On success the freshly computed outcome is
    returned.
    """
    lines = [line.rstrip("\n") for line in lines]
    if not lines or not lines[0].startswith(TRANSCRIPT_MAGIC + " "):
        raise CorruptTranscript("missing transcript header")
    try:
        config = ElectionConfig.from_dict(json.loads(lines[0][len(TRANSCRIPT_MAGIC) + 1:]))
    except (ValueError, KeyError, TypeError, ConfigError) as exc:
        raise CorruptTranscript(f"unreadable header: {exc}") from exc
    outcome = run_election(config)
    expected = transcript_lines(outcome)
    if len(lines) != len(expected):
        raise CorruptTranscript(
            f"transcript has {len(lines)} lines, deterministic re-run has {len(expected)}"
        )
    for index, (got, want) in enumerate(zip(lines, expected)):
        if got != want:
            raise CorruptTranscript(f"transcript diverges from re-run at line {index + 1}")
    return outcome
