import random

import pytest
from hypothesis import given, settings, strategies as st

from votesim.errors import DiscreteLogNotFound, GroupGenerationError
from votesim.group import (
    TINY_GROUP,
    GroupParams,
    build_dlog_table,
    default_group,
    discrete_log_bounded,
    generate_group,
    is_probable_prime,
)

# all hand-checkable examples below live in the order-11 subgroup mod 23


def test_tiny_group_satisfies_invariants():
    TINY_GROUP.validate()
    assert pow(2, 11, 23) == 1


def test_default_group_satisfies_invariants():
    params = default_group()
    params.validate()
    assert params.order.bit_length() == 256
    assert params.modulus == 2 * params.order + 1


def test_exp_examples(tiny):
    assert tiny.exp(tiny.generator, 0) == 1
    assert tiny.exp(tiny.generator, 3) == 8
    # exponents reduce modulo the order
    assert tiny.exp(tiny.generator, 12) == tiny.exp(tiny.generator, 1) == 2


def test_mul_inv_examples(tiny):
    assert tiny.mul(16, 18) == 12  # 288 mod 23
    assert tiny.inv(12) == 2       # 12 * 2 = 24 = 1 mod 23
    for a in (2, 4, 8, 16, 9):
        assert tiny.mul(a, tiny.inv(a)) == 1


def test_membership(tiny):
    powers = {tiny.exp(tiny.generator, e) for e in range(11)}
    for value in range(1, 23):
        assert tiny.is_element(value) == (value in powers)


def test_random_scalar_range_and_coverage(tiny):
    rng = random.Random(5)
    draws = [tiny.random_scalar(rng) for _ in range(2000)]
    assert min(draws) >= 1 and max(draws) <= tiny.order - 1
    assert set(draws) == set(range(1, 11))


def test_random_nonce_includes_zero(tiny):
    rng = random.Random(5)
    draws = {tiny.random_nonce(rng) for _ in range(2000)}
    assert draws == set(range(11))


@given(a=st.integers(0, 10), b=st.integers(0, 10))
def test_exponent_addition_law(a, b):
    g = TINY_GROUP.generator
    left = TINY_GROUP.mul(TINY_GROUP.exp(g, a), TINY_GROUP.exp(g, b))
    assert left == TINY_GROUP.exp(g, (a + b) % TINY_GROUP.order)


@given(a=st.integers(1, 22))
def test_inverse_is_two_sided(a):
    if not TINY_GROUP.is_element(a):
        a = TINY_GROUP.exp(TINY_GROUP.generator, a)
    assert TINY_GROUP.mul(a, TINY_GROUP.inv(a)) == 1
    assert TINY_GROUP.mul(TINY_GROUP.inv(a), a) == 1


def test_generate_group_is_deterministic_and_valid():
    a = generate_group(16, random.Random(42))
    b = generate_group(16, random.Random(42))
    assert a == b
    a.validate()
    assert a.modulus.bit_length() == 16


def test_generate_group_rejects_small_bits():
    with pytest.raises(ValueError):
        generate_group(8, random.Random(1))


def test_generate_group_gives_up_quickly_without_attempts():
    with pytest.raises(GroupGenerationError):
        generate_group(64, random.Random(1), max_attempts=1)


def test_is_probable_prime_small_cases():
    primes = {2, 3, 5, 7, 11, 13, 23, 97, 3233 // 53}
    for n in range(2, 100):
        expected = all(n % d for d in range(2, n))
        assert is_probable_prime(n) == expected, n
    assert not is_probable_prime(3233)


def test_dlog_examples(tiny):
    assert discrete_log_bounded(tiny, 1, 5) == 0
    assert discrete_log_bounded(tiny, 9, 10) == 5  # 2**5 = 32 = 9 mod 23
    with pytest.raises(DiscreteLogNotFound):
        discrete_log_bounded(tiny, 7, 10)  # 7 is not a power of 2 mod 23


def test_dlog_table_matches_scan(tiny):
    table = build_dlog_table(tiny, 10)
    for exponent in range(11):
        target = tiny.exp(tiny.generator, exponent)
        assert discrete_log_bounded(tiny, target, 10, table=table) == exponent
        assert discrete_log_bounded(tiny, target, 10) == exponent
    with pytest.raises(DiscreteLogNotFound):
        discrete_log_bounded(tiny, 9, 3, table=table)  # exponent 5 above bound 3


def test_dlog_rejects_negative_bound(tiny):
    with pytest.raises(ValueError):
        discrete_log_bounded(tiny, 1, -1)


@settings(max_examples=40)
@given(exponent=st.integers(0, 100), data=st.data())
def test_dlog_roundtrip_property(big, exponent, data):
    bound = data.draw(st.integers(exponent, 120))
    target = big.exp(big.generator, exponent)
    assert discrete_log_bounded(big, target, bound) == exponent


def test_dlog_roundtrip_in_generated_group():
    params = generate_group(24, random.Random(7))
    rng = random.Random(9)
    for _ in range(50):
        exponent = rng.randrange(0, 60)
        target = params.exp(params.generator, exponent)
        assert discrete_log_bounded(params, target, 60) == exponent
