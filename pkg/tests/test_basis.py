import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qcantor.basis import (DigitStream, constant, digits_of_rational, explicit, floor_log,
                           floor_loglog, log_rule, parse_rule, power_of_two, probe_divergence,
                           probe_infinite_in_limit, qnk, rational_stream, successor, t_map,
                           t_orbit, value_of_digits, block)
from qcantor.errors import DomainError, RangeError

from oracles import brute_qnk, floor_digits

rationals = st.builds(lambda d, a: Fraction(a % d, d),
                      st.integers(1, 10 ** 6), st.integers(0, 10 ** 9))
rules = st.sampled_from([successor(), power_of_two(), log_rule(), constant(3)])


@pytest.mark.parametrize("x,n,want", [
    (Fraction(1, 2), 4, [1, 0, 0, 0]),
    (Fraction(5, 6), 3, [1, 2, 0]),
    (Fraction(0), 5, [0] * 5),
])
def test_digits_examples(x, n, want):
    assert digits_of_rational(x, successor(), n) == want


@pytest.mark.parametrize("bad", [Fraction(1), Fraction(-1, 3), Fraction(7, 5)])
def test_digits_reject_outside_unit_interval(bad):
    with pytest.raises(DomainError):
        digits_of_rational(bad, successor(), 3)


def test_value_examples():
    assert value_of_digits([1, 0, 0], successor()) == Fraction(1, 2)
    assert value_of_digits([1, 2], successor()) == Fraction(5, 6)
    assert value_of_digits([1, 2, 3], explicit([2, 3, 4])) == Fraction(23, 24)


def test_value_rejects_bad_digit():
    with pytest.raises(DomainError):
        value_of_digits([2], successor())


def test_t_map_examples():
    assert t_map(Fraction(3, 4), successor(), 0) == Fraction(3, 4)
    assert t_map(Fraction(5, 6), successor(), 2) == 0
    assert t_map(Fraction(1, 3), successor(), 1) == Fraction(2, 3)


def test_qnk_examples():
    Q = explicit([2, 3, 4])
    assert qnk(Q, 3, 1) == Fraction(13, 12)
    assert qnk(Q, 2, 2) == Fraction(1, 4)
    assert qnk(power_of_two(), 1, 1) == Fraction(1, 2)


def test_qnk_short_list_raises():
    with pytest.raises(RangeError):
        qnk(explicit([2, 3, 4]), 3, 2)


def test_probe_divergence_examples():
    rows = probe_divergence(power_of_two(), 1, [10, 20])
    assert rows[0][1] < rows[1][1] < 1
    assert rows[1][1] == 1 - Fraction(1, 2 ** 20)
    h = dict(probe_divergence(successor(), 1, [10, 100]))
    assert math.isclose(float(h[10]), 2.0198773448773446, rel_tol=1e-12)
    assert abs(float(h[100]) - 4.197) < 5e-3
    assert probe_divergence(explicit([2] * 10), 1, [10]) == [(10, Fraction(5))]


def test_probe_divergence_rejects_unordered():
    with pytest.raises(DomainError, match="20 then 10"):
        probe_divergence(successor(), 1, [20, 10])


def test_probe_infinite_examples():
    assert probe_infinite_in_limit(successor(), (10, 100)) == 11
    assert probe_infinite_in_limit(constant(2), (3, 9)) == 2
    assert probe_infinite_in_limit(log_rule(), (math.ceil(math.e ** 3), math.floor(math.e ** 4))) == 5


def test_rule_values():
    assert successor().values(1, 3) == [2, 3, 4]
    assert power_of_two().values(1, 3) == [2, 4, 8]
    assert log_rule().values(1, 3) == [2, 2, 3]
    assert log_rule()(8) == 4 and log_rule()(7) == 3


def test_floor_logs_at_integer_boundaries():
    # e^k is never an integer, so the checks are about the nearest integers
    for k in range(1, 30):
        m = math.floor(math.e ** k)
        assert floor_log(m) == k - 1 and floor_log(m + 1) == k
    assert floor_loglog(15) == 0 and floor_loglog(16) == 1


def test_explicit_validation():
    with pytest.raises(DomainError, match="index 2"):
        explicit([2, 1, 3])
    with pytest.raises(RangeError):
        explicit([2, 3])(3)


def test_parse_rule_lists_known_rules():
    assert parse_rule("pow2")(3) == 8
    assert parse_rule("const:5")(9) == 5
    assert parse_rule("list:2,3")(2) == 3
    with pytest.raises(DomainError, match="known rules: succ"):
        parse_rule("fibonacci")


def test_block_validation():
    assert block(1, 2) == (1, 2) and block([0]) == (0,)
    with pytest.raises(DomainError):
        block()
    with pytest.raises(DomainError):
        block(-1)


def test_stream_rejects_out_of_range_digit():
    s = DigitStream(successor(), iter([1, 3]))
    assert s.digit(1) == 1
    with pytest.raises(DomainError):
        s.digit(2)


def test_stream_is_repeatable():
    s = rational_stream(Fraction(3, 7), power_of_two())
    assert s.prefix(10) == s.prefix(10) == [s.digit(n) for n in range(1, 11)]


@settings(max_examples=200, deadline=None)
@given(x=rationals, Q=rules, n=st.integers(1, 40))
def test_round_trip(x, Q, n):
    E = digits_of_rational(x, Q, n)
    assert all(0 <= e < Q(m) for m, e in enumerate(E, start=1))
    assert 0 <= x - value_of_digits(E, Q) < Fraction(1, Q.prefix_product(n))


@settings(max_examples=200, deadline=None)
@given(x=rationals, Q=rules, n=st.integers(1, 30))
def test_digits_match_floor_oracle(x, Q, n):
    assert digits_of_rational(x, Q, n) == floor_digits(x, Q.values(1, n))


@settings(max_examples=100, deadline=None)
@given(x=rationals, Q=rules, n=st.integers(1, 30))
def test_t_map_recurrence_and_digit_link(x, Q, n):
    prev = t_map(x, Q, n - 1)
    cur = t_map(x, Q, n)
    v = Q(n) * prev
    assert cur == v - math.floor(v)
    assert digits_of_rational(x, Q, n)[-1] == math.floor(v)
    assert t_orbit(x, Q, n)[n - 1] == prev


@settings(max_examples=100, deadline=None)
@given(Q=rules, n=st.integers(1, 30), k=st.integers(1, 5))
def test_qnk_additivity_and_oracle(Q, n, k):
    qs = Q.values(1, n + k)
    assert qnk(Q, n, k) == brute_qnk(qs, n, k)
    assert qnk(Q, n + 1, k) - qnk(Q, n, k) == Fraction(1, math.prod(qs[n:n + k]))


@settings(max_examples=50, deadline=None)
@given(x=rationals, Q=rules)
def test_terminated_expansion_is_canonical(x, Q):
    # a finished expansion continues with zeros, never with q_n - 1
    E = digits_of_rational(x, Q, 60)
    assert not all(e == Q(m) - 1 for m, e in enumerate(E, start=1) if m > 40)
