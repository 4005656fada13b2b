"""Blind-signature voting over textbook RSA.

The government signs blinded ballot digests after an eligibility check, so
it certifies one ballot per voter without seeing any content. Voters unblind
and post (content, nonce, signature) to an append-only ledger - a stand-in
for the bulletin-board blockchain - which accepts a ballot iff the signature
verifies and the nonce has never been seen, and only inside the posting
window.

Digests are hashed rather than signed raw: multiplying two raw RSA
signatures would forge a third, and the unforgeability tests rely on the
hash breaking that structure.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .errors import AlreadySigned, GroupGenerationError, IneligibleVoter, PhaseError
from .group import is_probable_prime

NONCE_BYTES = 32


@dataclass(frozen=True)
class RsaPublicKey:
    modulus: int
    exponent: int


@dataclass(frozen=True)
class SignerKeys:
    modulus: int
    public_exponent: int
    private_exponent: int

    @property
    def public(self) -> RsaPublicKey:
        return RsaPublicKey(self.modulus, self.public_exponent)


#: Classic tiny RSA textbook key (61 * 53), for hand-checkable unit tests only.
TEST_SIGNER_KEYS = SignerKeys(modulus=3233, public_exponent=17, private_exponent=2753)


@dataclass(frozen=True)
class Ballot:
    """A vote string, a wide random nonce, and (once issued) the signature."""

    content: str
    nonce: int
    signature: int | None = None

    def with_signature(self, signature: int) -> "Ballot":
        return Ballot(self.content, self.nonce, signature)


@dataclass(frozen=True)
class BlindingState:
    """The secret blinding factor and the blinded digest sent for signing."""

    factor: int
    blinded: int


def _random_prime(rng: random.Random, bits: int, attempts: int = 100_000) -> int:
    for _ in range(attempts):
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate):
            return candidate
    raise GroupGenerationError(f"no {bits}-bit prime found in {attempts} attempts")


def signer_keygen(rng: random.Random, bits: int = 1024) -> SignerKeys:
    """Generate an RSA keypair with a modulus of roughly `bits` bits."""
    if bits < 16:
        raise ValueError("modulus below 16 bits leaves no room for digests")
    half = bits // 2
    while True:
        p = _random_prime(rng, half)
        q = _random_prime(rng, bits - half)
        if p == q:
            continue
        lam = math.lcm(p - 1, q - 1)
        for e in (65537, 257, 17, 7, 5, 3):
            if e < lam and math.gcd(e, lam) == 1:
                return SignerKeys(p * q, e, pow(e, -1, lam))


def make_ballot(content: str, rng: random.Random) -> Ballot:
    """Pair the vote content with a fresh 32-byte nonce."""
    if not content or any(c in content for c in "\t\n\r"):
        raise ValueError("ballot content must be nonempty, without tabs or newlines")
    return Ballot(content, int.from_bytes(rng.randbytes(NONCE_BYTES), "big"))


def ballot_digest(content: str, nonce: int, modulus: int) -> int:
    """Hash the canonical (content, nonce) encoding down to a signable integer."""
    raw = content.encode("utf-8")
    h = hashlib.sha256()
    h.update(b"ballot.v1")
    h.update(len(raw).to_bytes(4, "big"))
    h.update(raw)
    h.update(nonce.to_bytes(NONCE_BYTES, "big"))
    return int.from_bytes(h.digest(), "big") % modulus


def blind(
    ballot: Ballot,
    pub: RsaPublicKey,
    rng: random.Random | None = None,
    factor: int | None = None,
) -> BlindingState:
    """Hide the ballot digest behind digest * factor**e.

    A fresh factor is drawn coprime to the modulus (redrawing on a common
    divisor); an explicit factor of 1 gives the identity blinding used in
    unit tests. Over a uniform factor the blinded value is uniform over the
    units, so the signer learns nothing about the digest.
    """
    if factor is None:
        if rng is None:
            raise ValueError("either rng or an explicit factor is required")
        while True:
            factor = rng.randrange(2, pub.modulus)
            if math.gcd(factor, pub.modulus) == 1:
                break
    elif math.gcd(factor, pub.modulus) != 1:
        raise ValueError("blinding factor shares a divisor with the modulus")
    digest = ballot_digest(ballot.content, ballot.nonce, pub.modulus)
    return BlindingState(factor, digest * pow(factor, pub.exponent, pub.modulus) % pub.modulus)


class SignerRegistry:
    """Eligibility list plus the served-set enforcing one signature per voter."""

    def __init__(self, eligible_ids):
        self.eligible = frozenset(eligible_ids)
        self.served: set = set()

    def check_and_mark(self, voter_id) -> None:
        if voter_id not in self.eligible:
            raise IneligibleVoter(f"voter {voter_id} is not registered")
        if voter_id in self.served:
            raise AlreadySigned(f"voter {voter_id} already received a signature")
        self.served.add(voter_id)


def sign_blinded(keys: SignerKeys, blinded: int, voter_id, registry: SignerRegistry) -> int:
    """Issue the blind signature after the eligibility and once-only checks."""
    registry.check_and_mark(voter_id)
    return pow(blinded, keys.private_exponent, keys.modulus)


def unblind(signed_blind: int, state: BlindingState, pub: RsaPublicKey) -> int:
    """Divide out the blinding factor, leaving a signature on the digest."""
    return signed_blind * pow(state.factor, -1, pub.modulus) % pub.modulus


def verify_ballot(pub: RsaPublicKey, ballot: Ballot) -> bool:
    if ballot.signature is None:
        return False
    expected = ballot_digest(ballot.content, ballot.nonce, pub.modulus)
    return pow(ballot.signature, pub.exponent, pub.modulus) == expected


class RejectReason(Enum):
    BAD_SIGNATURE = "bad_signature"
    DUPLICATE_NONCE = "duplicate_nonce"
    OUTSIDE_POSTING_WINDOW = "outside_posting_window"


@dataclass(frozen=True)
class SubmitResult:
    accepted: bool
    reason: RejectReason | None = None


class Ledger:
    """Append-only ballot store with the two-condition acceptance rule.

    Ballots are accepted only inside the posting window, which must start
    after the signing window ends - the gap is what breaks the
    timing-correlation between requesting a signature and posting.
    """

    def __init__(self, pub: RsaPublicKey, sign_window: tuple[int, int], post_window: tuple[int, int]):
        if sign_window[0] >= sign_window[1] or post_window[0] >= post_window[1]:
            raise ValueError("phase windows must be nonempty (start < end)")
        if sign_window[1] > post_window[0]:
            raise ValueError("signing and posting windows must not overlap")
        self.pub = pub
        self.sign_window = sign_window
        self.post_window = post_window
        self.ballots: list[Ballot] = []
        self.seen_nonces: set[int] = set()

    def submit(self, ballot: Ballot, now: int) -> SubmitResult:
        """Accept iff inside the posting window, signature valid, nonce fresh."""
        if not self.post_window[0] <= now < self.post_window[1]:
            return SubmitResult(False, RejectReason.OUTSIDE_POSTING_WINDOW)
        if not verify_ballot(self.pub, ballot):
            return SubmitResult(False, RejectReason.BAD_SIGNATURE)
        if ballot.nonce in self.seen_nonces:
            return SubmitResult(False, RejectReason.DUPLICATE_NONCE)
        self.ballots.append(ballot)
        self.seen_nonces.add(ballot.nonce)
        return SubmitResult(True)

    def tally(self, now: int) -> Counter:
        """Per-candidate counts over accepted ballots, once posting has closed."""
        if now < self.post_window[1]:
            raise PhaseError("cannot tally while the posting window is open")
        return Counter(ballot.content for ballot in self.ballots)

    def dump_lines(self) -> list[str]:
        """Accepted ballots as `content<TAB>nonce-hex<TAB>sig-hex<TAB>order` lines."""
        return [
            f"{b.content}\t{b.nonce:0{2 * NONCE_BYTES}x}\t{b.signature:x}\t{i}"
            for i, b in enumerate(self.ballots)
        ]
