"""Prime-order cyclic group arithmetic used by the homomorphic voting protocols.

The group is the order-q subgroup of squares modulo a safe prime p = 2q + 1.
Group elements and scalars are plain Python integers; :class:`GroupParams`
carries the modulus, the subgroup order, and a generator, and provides the
arithmetic. Everything is simulation-grade: no constant-time hardening.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DiscreteLogNotFound, GroupGenerationError

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
    53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with the first 25 primes as bases.

    Deterministic for n < 3.3e24 and overwhelmingly reliable beyond, which is
    ample for the 256-bit simulation parameters used here.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupParams:
    """A cyclic group of prime order inside the integers modulo a safe prime."""

    modulus: int
    order: int
    generator: int

    def validate(self) -> None:
        if not is_probable_prime(self.modulus):
            raise ValueError("modulus is not prime")
        if not is_probable_prime(self.order):
            raise ValueError("order is not prime")
        if (self.modulus - 1) % self.order != 0:
            raise ValueError("order does not divide modulus - 1")
        if not 2 <= self.generator <= self.modulus - 1:
            raise ValueError("generator out of range")
        if pow(self.generator, self.order, self.modulus) != 1:
            raise ValueError("generator does not have the declared order")

    def is_element(self, value: int) -> bool:
        """Membership test for the order-q subgroup."""
        return 1 <= value <= self.modulus - 1 and pow(value, self.order, self.modulus) == 1

    def exp(self, base: int, exponent: int) -> int:
        """base ** exponent in the subgroup; exponents live modulo the order."""
        return pow(base, exponent % self.order, self.modulus)

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def inv(self, a: int) -> int:
        return pow(a, -1, self.modulus)

    def random_scalar(self, rng: random.Random) -> int:
        """Uniform draw from {1, ..., order-1}, the secret-key domain."""
        return rng.randrange(1, self.order)

    def random_nonce(self, rng: random.Random) -> int:
        """Uniform draw from {0, ..., order-1}, the encryption-nonce domain."""
        return rng.randrange(self.order)


#: Hand-checkable parameters for unit tests: the order-11 subgroup mod 23.
TINY_GROUP = GroupParams(modulus=23, order=11, generator=2)

# Pinned 257-bit safe prime (256-bit order), produced by generate_group(257,
# random.Random(20240901)) and frozen so imports stay fast and deterministic.
_DEFAULT_P = int("14a95c29a12209c1294ea72a403a55d216a084e7a6f7a83225c63bd690dc01ee7", 16)
_DEFAULT_Q = (_DEFAULT_P - 1) // 2
_DEFAULT_G = int("940de489cf6794e8c00fdf9fcd599851fa32077d37d08204f12974060e44258a", 16)


def default_group() -> GroupParams:
    """The library-default group: 256-bit prime order, safe-prime modulus."""
    params = GroupParams(modulus=_DEFAULT_P, order=_DEFAULT_Q, generator=_DEFAULT_G)
    return params


def generate_group(bits: int, rng: random.Random, max_attempts: int | None = None) -> GroupParams:
    """Generate fresh parameters with a modulus of exactly `bits` bits.

    Searches for a safe prime p = 2q + 1 and picks a square as generator,
    which has order q automatically. Deterministic for a seeded rng.
    """
    if bits < 16:
        raise ValueError("modulus below 16 bits cannot hold a meaningful subgroup")
    attempts = max_attempts if max_attempts is not None else 400 * bits
    for _ in range(attempts):
        q = rng.getrandbits(bits - 1) | (1 << (bits - 2)) | 1
        if not is_probable_prime(q):
            continue
        p = 2 * q + 1
        if p.bit_length() != bits or not is_probable_prime(p):
            continue
        while True:
            h = rng.randrange(2, p - 1)
            g = h * h % p
            if g != 1:
                break
        params = GroupParams(modulus=p, order=q, generator=g)
        params.validate()
        return params
    raise GroupGenerationError(f"no safe prime of {bits} bits found in {attempts} attempts")


def build_dlog_table(params: GroupParams, bound: int) -> dict[int, int]:
    """Precompute {g**t: t} for t in [0, bound], reusable across decodes."""
    table: dict[int, int] = {}
    acc = 1
    for t in range(bound + 1):
        table.setdefault(acc, t)
        acc = acc * params.generator % params.modulus
    return table


def discrete_log_bounded(
    params: GroupParams,
    target: int,
    bound: int,
    table: dict[int, int] | None = None,
) -> int:
    """Recover t with generator**t == target, searching t in [0, bound].

    The tally of a vote is bounded by the electorate size, so a linear scan
    (or a precomputed table for repeated decodes) is sufficient. Raises
    DiscreteLogNotFound when no exponent within the bound matches, which
    signals a corrupted aggregate or a bound that is too small.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if table is not None:
        t = table.get(target)
        if t is not None and t <= bound:
            return t
        raise DiscreteLogNotFound(target, bound)
    acc = 1
    for t in range(bound + 1):
        if acc == target:
            return t
        acc = acc * params.generator % params.modulus
    raise DiscreteLogNotFound(target, bound)
