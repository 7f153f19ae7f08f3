import random

import pytest
from hypothesis import given, settings, strategies as st

from schreier import ordinals as o
from schreier.ordinals import (OMEGA, ONE, ZERO, OrdinalDepthError,
                               OrdinalParseError, add, compare, from_int,
                               fund_seq, fmt, mul, omega_pow, parse)

from oracles import ordinals_up_to_weight, pair_add, pair_encode


def test_parse_examples():
    assert parse("w*2+3").terms == ((ONE, 2), (ZERO, 3))
    assert parse("0") == ZERO
    assert parse("3+w") == OMEGA  # absorption normalizes
    assert parse("w^2+1") == add(omega_pow(from_int(2)), ONE)
    assert parse("w^(w+1)") == omega_pow(add(OMEGA, ONE))
    assert parse("w^w*2") == mul(omega_pow(OMEGA), from_int(2))


def test_parse_errors_carry_position():
    with pytest.raises(OrdinalParseError) as err:
        parse("w+")
    assert err.value.position == 2
    with pytest.raises(OrdinalParseError):
        parse("w^")
    with pytest.raises(OrdinalParseError):
        parse("2 3")


def test_depth_cap():
    deep = "w^" * 17 + "2"
    with pytest.raises(OrdinalDepthError):
        parse(deep)
    parse("w^" * 15 + "2")  # inside the cap


def test_compare_examples():
    assert compare(OMEGA, from_int(3)) > 0
    assert compare(parse("w*2"), parse("w*2")) == 0
    assert compare(parse("w*5"), parse("w^2")) < 0


def test_arith_examples():
    assert add(from_int(1), OMEGA) == OMEGA
    assert mul(from_int(2), OMEGA) == OMEGA
    assert mul(parse("w+1"), from_int(2)) == parse("w*2+1")


def test_mul_matches_pair_simulator_below_omega_squared():
    """Cross-check addition against the (a, b) ~ w*a+b encoding."""
    candidates = [x for x in ordinals_up_to_weight(5)
                  if pair_encode(x) is not None]
    for a in candidates:
        for b in candidates:
            expected = pair_add(pair_encode(a), pair_encode(b))
            assert pair_encode(add(a, b)) == expected, (fmt(a), fmt(b))


def test_add_associative_and_mul_distributes_exhaustively():
    universe = ordinals_up_to_weight(5)
    assert len(universe) > 25
    for a in universe:
        for b in universe:
            ab = add(a, b)
            for c in universe:
                assert add(ab, c) == add(a, add(b, c))
                assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


def test_fund_seq_examples():
    assert fund_seq(OMEGA, 7) == from_int(7)
    assert fund_seq(parse("w^2"), 3) == parse("w*3")
    assert fund_seq(parse("w^w"), 3) == parse("w^3")
    with pytest.raises(o.OrdinalError):
        fund_seq(from_int(5), 1)
    with pytest.raises(o.OrdinalError):
        fund_seq(ZERO, 1)


def test_fund_seq_increasing_below_limit():
    limits = [x for x in ordinals_up_to_weight(5) if x.is_limit]
    limits.append(parse("w^w"))
    for lam in limits:
        prev = None
        for n in range(1, 51):
            cur = fund_seq(lam, n)
            assert cur < lam
            if prev is not None:
                assert prev < cur
            prev = cur


def test_roundtrip_random_normal_forms():
    rng = random.Random(13371337)

    def random_ordinal(depth):
        if depth == 0 or rng.random() < 0.3:
            return from_int(rng.randint(0, 9))
        exps = []
        while len(exps) < rng.randint(1, 3):
            e = random_ordinal(depth - 1)
            if all(compare(e, other) != 0 for other in exps):
                exps.append(e)
        exps = sorted(exps, reverse=True)
        return o.Ordinal(tuple((e, rng.randint(1, 5)) for e in exps))

    for _ in range(1000):
        x = random_ordinal(3)
        assert parse(fmt(x)) == x


@st.composite
def ordinals_strategy(draw, depth=2):
    if depth == 0:
        return from_int(draw(st.integers(0, 6)))
    n = draw(st.integers(0, 2))
    exps = []
    for _ in range(n):
        e = draw(ordinals_strategy(depth=depth - 1))
        if all(compare(e, x) != 0 for x in exps):
            exps.append(e)
    exps = sorted(exps, reverse=True)
    coeffs = [draw(st.integers(1, 4)) for _ in exps]
    return o.Ordinal(tuple(zip(exps, coeffs)))


@given(ordinals_strategy(), ordinals_strategy())
@settings(max_examples=150, deadline=None)
def test_add_monotone_and_ordered(a, b):
    s = add(a, b)
    assert s >= a and s >= b
    assert parse(fmt(s)) == s


@given(ordinals_strategy(), ordinals_strategy())
@settings(max_examples=100, deadline=None)
def test_total_order(a, b):
    assert (compare(a, b) == 0) == (a == b)
    assert sorted([a, b]) == sorted([b, a])
