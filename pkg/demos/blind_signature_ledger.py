"""Blind-signature ballots and the append-only ledger's acceptance rule.

The signer certifies eligibility without seeing ballot content; the ledger
then accepts a posted ballot iff the signature verifies and its nonce is
fresh, and only while the posting window is open. The script walks one
ballot through the happy path, then demonstrates each rejection.
"""

import random

from votesim.bsv import (
    Ballot,
    Ledger,
    SignerRegistry,
    blind,
    make_ballot,
    sign_blinded,
    signer_keygen,
    unblind,
    verify_ballot,
)

rng = random.Random(42)
keys = signer_keygen(rng, bits=512)
print(f"signer modulus: {keys.modulus.bit_length()} bits, public exponent {keys.public_exponent}")

registry = SignerRegistry([1, 2, 3])
ledger = Ledger(keys.public, sign_window=(1, 3), post_window=(3, 5))

# --- voter 1: blind, sign, unblind, post
ballot = make_ballot("for", rng)
state = blind(ballot, keys.public, rng)
print(f"voter 1 blinds ballot; signer sees only {str(state.blinded)[:24]}...")
blind_sig = sign_blinded(keys, state.blinded, 1, registry)
ballot = ballot.with_signature(unblind(blind_sig, state, keys.public))
print(f"unblinded signature verifies: {verify_ballot(keys.public, ballot)}")
print(f"posted in window: {ledger.submit(ballot, now=3)}")

# --- replaying the same ballot is caught by the nonce
print(f"replayed:          {ledger.submit(ballot, now=3)}")

# --- changing the content invalidates the signature
tampered = Ballot("against", ballot.nonce, ballot.signature)
print(f"tampered content:  {ledger.submit(tampered, now=3)}")

# --- posting is refused while signatures are still being issued
early = make_ballot("for", rng)
early_state = blind(early, keys.public, rng)
early = early.with_signature(unblind(sign_blinded(keys, early_state.blinded, 2, registry),
                                     early_state, keys.public))
print(f"during signing:    {ledger.submit(early, now=1)}")
print(f"after the window:  {ledger.submit(early, now=9)}")

print(f"final counts: {dict(ledger.tally(now=5))}")
print("ledger dump:")
for line in ledger.dump_lines():
    content, nonce_hex, sig_hex, order = line.split("\t")
    print(f"  #{order} {content} nonce={nonce_hex[:12]}... sig={sig_hex[:12]}...")
