import json
import math
import random
from fractions import Fraction

import pytest

from rotsum import contfrac as cf
from rotsum.errors import ConfigError, PrecisionError, SpecExhaustedError


def test_golden_first_denominators():
    cs = cf.convergents(cf.golden(10), 6)
    assert [c.q for c in cs] == [1, 1, 2, 3, 5, 8, 13]


def sqrt2_bounds(digits: int):
    """Exact rational bounds L < sqrt(2) < U via integer square root."""
    scale = 10 ** digits
    r = math.isqrt(2 * scale * scale)
    lo = Fraction(r, scale)
    hi = Fraction(r + 1, scale)
    assert lo * lo < 2 < hi * hi
    return lo, hi


def test_sqrt2m1_convergent_quality():
    # all partial quotients 2: alpha = sqrt(2) - 1
    cs = cf.convergents(cf.sqrt2m1(10), 4)
    assert (cs[4].p, cs[4].q) == (12, 29)
    lo, hi = sqrt2_bounds(40)
    for c in cs[1:]:
        approx = Fraction(c.p, c.q)
        # |alpha - p/q| < 1/q^2 certified on the enclosing interval
        err_hi = max(abs((hi - 1) - approx), abs((lo - 1) - approx))
        assert err_hi < Fraction(1, c.q * c.q)


@pytest.mark.parametrize("spec", [cf.golden(25), cf.sqrt2m1(25),
                                  cf.from_list([3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7])])
def test_determinant_identity(spec):
    # p_{n-1} q_n - p_n q_{n-1} = (-1)^n, seeds p_{-1}=1, q_{-1}=0
    p = [1, 0]
    q = [0, 1]
    for k in range(1, min(spec.max_index, 14) + 1):
        a = spec.a(k)
        p.append(a * p[-1] + p[-2])
        q.append(a * q[-1] + q[-2])
    for n in range(0, len(p) - 2):
        assert p[n] * q[n + 1] - p[n + 1] * q[n] == (-1) ** n


def test_spec_exhaustion():
    spec = cf.from_list([1, 2, 3])
    with pytest.raises(SpecExhaustedError):
        cf.convergents(spec, 4)
    with pytest.raises(SpecExhaustedError):
        spec.a(4)


def test_quotients_must_be_positive():
    with pytest.raises(ConfigError):
        cf.from_list([1, 0, 2])


@pytest.fixture(scope="module")
def golden_trunc():
    return cf.truncation(cf.golden(40), 30)


def test_distance_at_denominators(golden_trunc):
    tr = golden_trunc
    for n in range(1, tr.level - 2):
        d = cf.nearest_integer_distance(tr.qs[n], tr)
        assert Fraction(1, 2 * tr.qs[n + 1]) <= d <= Fraction(1, tr.qs[n + 1])
        # tighter lower bound 1/(q_{n+1} + q_n)
        assert d >= Fraction(1, tr.qs[n + 1] + tr.qs[n])
        # and the exact upper bound 1/(a_{n+1} q_n + q_{n-1})
        assert d <= Fraction(1, tr.a(n + 1) * tr.qs[n] + tr.qs[n - 1])


def test_distance_k1_is_alpha(golden_trunc):
    tr = golden_trunc
    a = tr.value
    assert cf.nearest_integer_distance(1, tr) == min(a, 1 - a)


def test_denominators_minimize_distance(golden_trunc):
    tr = golden_trunc
    for n in range(3, 9):
        floor_d = tr.denominator_distance(n - 1)
        for k in range(1, tr.qs[n]):
            assert cf.nearest_integer_distance(k, tr) >= floor_d


def test_distance_window_enforced(golden_trunc):
    tr = golden_trunc
    with pytest.raises(PrecisionError):
        cf.nearest_integer_distance(tr.validity_bound, tr)
    with pytest.raises(PrecisionError):
        cf.nearest_integer_distance(0, tr)


def test_one_equals_mixed_distance_sum(golden_trunc):
    # q_n ||q_{n+1} a|| + q_{n+1} ||q_n a|| = 1, exactly on the truncation
    tr = golden_trunc
    for n in range(0, tr.level - 1):
        lhs = (tr.qs[n] * tr.denominator_distance(n + 1)
               + tr.qs[n + 1] * tr.denominator_distance(n))
        assert lhs == 1


def test_ostrowski_golden_ten(golden_trunc):
    d = cf.ostrowski_digits(10, golden_trunc)
    assert d.value == 10
    # greedy picks 8 + 2
    assert d.digits[5] == 1 and d.digits[2] == 1 and d.digit_sum() == 2


def test_ostrowski_single_digit_at_denominator(golden_trunc):
    for n in range(2, 12):
        d = cf.ostrowski_digits(golden_trunc.qs[n], golden_trunc)
        assert d.digit_sum() == 1 and d.digits[n] == 1


def test_ostrowski_property():
    rng = random.Random(42)
    spec2 = cf.from_list([rng.randrange(1, 9) for _ in range(60)])
    tr2 = cf.truncation(spec2, 60)
    deep_golden = cf.truncation(cf.golden(60), 50)
    for tr in (deep_golden, tr2):
        for _ in range(500):
            n = rng.randrange(1, 10 ** 9)
            d = cf.ostrowski_digits(n, tr)
            assert sum(b * q for b, q in zip(d.digits, tr.qs)) == n
            assert 0 <= d.digits[0] <= tr.a(1) - 1
            for k in range(1, d.m):
                assert 0 <= d.digits[k] <= tr.a(k + 1)
            assert 1 <= d.digits[d.m] <= tr.a(d.m + 1)


def test_ostrowski_rejects_nonpositive(golden_trunc):
    with pytest.raises(ValueError):
        cf.ostrowski_digits(0, golden_trunc)


def test_design_alpha_guard():
    with pytest.raises(ConfigError):
        cf.design_alpha(lambda k: 1, 10, guard=1)


def test_design_alpha_golden_rule():
    spec, tr = cf.design_alpha(lambda k: 1, 10, guard=5)
    assert tr.level == 15
    assert tr.qs[:7] == (1, 1, 2, 3, 5, 8, 13)


def test_beta_from_ostrowski(golden_trunc):
    tr = golden_trunc
    assert cf.beta_from_ostrowski([], tr) == 0
    assert cf.beta_from_ostrowski([1], tr) == tr.value  # {alpha}
    beta = cf.beta_from_ostrowski({2: 1, 5: 3}, tr)
    expected = (tr.qs[2] * tr.value + 3 * tr.qs[5] * tr.value) % 1
    assert beta == expected
    with pytest.raises(PrecisionError):
        cf.beta_from_ostrowski({tr.level - 1: 1}, tr)


def test_json_round_trip(golden_trunc):
    text = golden_trunc.to_json()
    doc = json.loads(text)
    assert doc["p"] == str(golden_trunc.p)
    tr2 = cf.RationalTruncation.from_json(text)
    assert tr2.value == golden_trunc.value
    spec = cf.from_list([1, 2, 3, 4, 5])
    assert cf.PartialQuotientSpec.from_json(spec.to_json()).prefix(5) == \
        [1, 2, 3, 4, 5]


def test_custom_rule_not_serializable():
    spec, _ = cf.design_alpha(lambda k: k + 1, 5, guard=3)
    with pytest.raises(ConfigError):
        spec.to_json()
