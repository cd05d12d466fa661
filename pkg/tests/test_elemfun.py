import math
import threading
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import e_digits, pi_chudnovsky_int

from mca import elemfun as E
from mca.errors import CannotDecide, ZeroDenominator
from mca.limbcore import ONE, Integer, Natural
from mca.mpfloat import (EXACT, Float, InexactFlag, Kind, RoundingMode, fcmp, from_float,
                         from_int, from_scaled, round_to_precision, to_decimal)

NE, RZ, RU, RD = (RoundingMode.NEAREST_EVEN, RoundingMode.TOWARD_ZERO,
                  RoundingMode.TOWARD_POSITIVE, RoundingMode.TOWARD_NEGATIVE)
FUNCS = {"exp": E.f_exp, "ln": E.f_ln, "sin": E.f_sin, "cos": E.f_cos}


def frac(x: Float) -> Fraction:
    if x.is_zero:
        return Fraction(0)
    lo = x.lowexp
    v = Fraction(int(x.man)) * (Fraction(2) ** lo)
    return v if x.sign > 0 else -v


def fr(P, Q) -> Fraction:
    return Fraction(int(P), int(Q))


def within_ulps(got, ref: Fraction, p: int, k: int) -> bool:
    """|got - ref| <= k ulps, with ulp taken at p bits around ref."""
    e = abs(ref.numerator).bit_length() - abs(ref.denominator).bit_length()
    ulp = Fraction(2) ** (e - p + 1)
    return abs(frac(got) - ref) <= k * ulp if isinstance(got, Float) else abs(got - ref) <= k * ulp


def F(v, p=53):
    return from_float(v, p)[0]


def self_oracle(f, x, p, mode):
    hi, hflag = f(x, p + 200, RZ)
    if hi.is_zero:
        return Float.zero(hi.sign, p), hflag
    if not hi.is_finite:
        return hi, hflag
    lo, flag = round_to_precision(hi, p, mode)
    return lo, (hflag if flag == EXACT else flag)


# --- series and continued fractions -------------------------------------------

def exp_spec():
    return E.SeriesSpec(first=(1, 1), p=lambda k: 1, q=lambda k: k + 1,
                        tail_bound=lambda K: 2 - E._log2_factorial_lb(K))


def test_binary_split_single_term():
    P, Q = E.binary_split(exp_spec(), 3, 4)
    assert fr(P, Q) == Fraction(1, 6)


def test_binary_split_exp_partial_sum():
    direct = sum(Fraction(1, math.factorial(k)) for k in range(10))
    assert fr(*E.binary_split(exp_spec(), 0, 10)) == direct == Fraction(98641, 36288)
    # terms k = 0..10 give the familiar 10!-denominator value
    assert fr(*E.binary_split(exp_spec(), 0, 11)) == Fraction(9864101, 3628800)


def test_binary_split_empty_range():
    with pytest.raises(ValueError):
        E.binary_split(exp_spec(), 4, 4)


@given(st.integers(1, 40), st.data())
def test_binary_split_midpoint_invariance(k1, data):
    spec = E._atan_inv_spec(7)
    m = data.draw(st.integers(0, k1))
    whole = fr(*E.binary_split(spec, 0, k1))
    parts = (fr(*E.binary_split(spec, 0, m)) if m else 0) + \
        (fr(*E.binary_split(spec, m, k1)) if m < k1 else 0)
    assert whole == parts


SPECS = {
    "exp": exp_spec(),
    "atan5": E._atan_inv_spec(5),
    "atan239": E._atan_inv_spec(239),
    "ln2": E.LN2_SPEC,
    "exp_reduced": E._exp_spec(Integer.from_int(-3 << 40), 45, 2),
    "sin": E._sin_spec(Integer.from_int(5 << 36), 40, 1),
    "cos": E._cos_spec(Integer.from_int(-(5 << 36)), 40, 1),
}


@pytest.mark.parametrize("name", sorted(SPECS))
def test_series_tail_honest(name):
    spec = SPECS[name]
    full = fr(*E.binary_split(spec, 0, 120))
    for K in (1, 2, 3, 5, 8, 13, 21, 34):
        tail = abs(full - fr(*E.binary_split(spec, 0, K)))
        assert tail <= Fraction(2) ** spec.tail_bound(K)


def test_cf_examples():
    ones = E.CFSpec(lambda k: (1, 1))
    assert fr(*E.cf_eval(ones, 5)) == Fraction(8, 5)
    assert fr(*E.cf_eval(E.CFSpec(lambda k: (1, 7 if k == 0 else 2)), 1)) == 7
    with pytest.raises(ZeroDenominator):
        E.cf_eval(E.CFSpec(lambda k: (1, 3 if k == 0 else 0)), 2)
    with pytest.raises(ValueError):
        E.cf_eval(ones, 0)


def test_cf_convergents_interleave():
    # sqrt(2) = [1; 2, 2, 2, ...]
    spec = E.CFSpec(lambda k: (1, 1 if k == 0 else 2))
    root2 = Fraction(math.isqrt(2 << 400), 2 ** 200)
    prev = None
    for d in range(1, 30):
        c = fr(*E.cf_eval(spec, d))
        side = (c > root2) - (c < root2)
        if prev is not None:
            assert side == -prev
        prev = side


# --- Ziv loop -------------------------------------------------------------------

def test_schedule_shape():
    s = list(E.WorkingPrecisionSchedule(53))
    assert s[0] == 85 and all(a < b for a, b in zip(s, s[1:])) and s[-1] <= 64 * 53
    assert s[1] - s[0] == 32 and s[3] - s[2] == 48
    assert list(E.WorkingPrecisionSchedule(2, cap=10)) == [34]


def test_ziv_exact_approx_one_iteration():
    calls = []

    def approx(wp):
        calls.append(wp)
        return F(0.75), 0
    assert E.ziv_round(approx, 10) == (F(0.75, 10), EXACT)
    assert len(calls) == 1


def _adversary(target: Fraction):
    calls = []

    def approx(wp):
        calls.append(wp)
        y = target.numerator * 2 ** wp // target.denominator
        return from_scaled(1, Natural.from_int(y), -wp, max(y.bit_length(), 2))[0], 1
    return approx, calls


@pytest.mark.parametrize("mode", list(RoundingMode))
@pytest.mark.parametrize("side", [1, -1])
def test_ziv_near_boundary_fixture(mode, side):
    p = 24
    # a representable number for directed modes, a midpoint for nearest
    base = Fraction(2 ** (p - 1) + 5, 2 ** (p - 1))
    if mode is NE:
        base += Fraction(1, 2 ** p)
    target = base + side * Fraction(1, 2 ** (p + 60))
    approx, calls = _adversary(target)
    got, flag = E.ziv_round(approx, p, mode)
    assert len(calls) >= 2
    want_up = {NE: side > 0, RZ: False, RD: False, RU: True}[mode]
    step = Fraction(1, 2 ** (p - 1))
    if mode is NE:
        want = base + (step / 2 if want_up else -step / 2)
    else:
        want = base if (side > 0) != want_up else base + side * step
    assert frac(got) == want
    assert flag == (InexactFlag.ROUNDED_UP if frac(got) > target else InexactFlag.ROUNDED_DOWN)


@pytest.mark.cannot_decide_expected
def test_ziv_cannot_decide_at_exact_boundary():
    approx, _ = _adversary(Fraction(3, 2))
    with pytest.raises(CannotDecide) as info:
        E.ziv_round(approx, 8, RZ, E.WorkingPrecisionSchedule(8, cap=200))
    lo, hi = info.value.interval
    assert frac(lo) < Fraction(3, 2) < frac(hi) or frac(lo) <= Fraction(3, 2) <= frac(hi)
    assert info.value.precision == 200


# --- constants ------------------------------------------------------------------

def test_const_examples():
    assert to_decimal(E.const_pi(20), 6) == "3.14159e0"
    assert frac(E.const_pi(2)) == 3
    assert to_decimal(E.const_ln2(60), 12) == "6.93147180560e-1"


@pytest.mark.parametrize("p", [2, 17, 53, 100, 1000])
def test_const_ln2_halving(p):
    assert round_to_precision(E.const_ln2(2 * p), p)[0] == E.const_ln2(p)


def test_machin_agrees_with_chudnovsky():
    bits = 4000
    assert abs(int(E.pi_fixed(bits)) - pi_chudnovsky_int(bits)) <= 4


def test_ln2_against_atanh_series():
    # ln 2 = 2 atanh(1/3) = sum 2 / ((2k+1) 3^(2k+1))
    bits = 2000
    s = sum(Fraction(2, (2 * k + 1) * 3 ** (2 * k + 1)) for k in range(700))
    assert abs(int(E.ln2_fixed(bits)) - int(s * 2 ** bits)) <= 3


def test_cache_rerounding_after_warmup():
    for p in (300, 20, 700, 64):
        E.const_pi(p)
    top = E.const_pi(700)
    for q in (2, 19, 53, 64, 299, 512):
        assert round_to_precision(top, q)[0] == E.const_pi(q)


def test_cache_concurrent_readers():
    want = {p: E.const_pi(p) for p in (50, 400)}
    fresh = E._ConstCache(E._pi_machin)
    out, errors = [], []

    def worker(p):
        try:
            v = fresh.fixed(p)
            out.append((p, v))
        except Exception as exc:  # pragma: no cover
            errors.append(exc)
    threads = [threading.Thread(target=worker, args=(p,)) for p in (50, 3000, 400, 8000) * 4]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    for p, v in out:
        assert abs(int(v) - int(E.pi_fixed(p))) <= 4
    assert all(E.const_pi(p) == w for p, w in want.items())


# --- the functions ---------------------------------------------------------------

def test_exact_special_cases():
    one = from_int(1, 53)[0]
    assert E.f_exp(Float.zero(1, 53), 53) == (one, EXACT)
    assert E.f_ln(one, 53) == (Float.zero(1, 53), EXACT)
    assert E.f_sin(Float.zero(-1, 53), 53) == (Float.zero(-1, 53), EXACT)
    assert E.f_cos(Float.zero(1, 53), 53) == (one, EXACT)


def test_ieee_specials():
    inf, ninf, nan = Float.inf(1, 9), Float.inf(-1, 9), Float.nan(9)
    assert E.f_exp(inf, 9)[0].is_inf and E.f_exp(ninf, 9)[0] == Float.zero(1, 9)
    assert E.f_exp(nan, 9)[0].is_nan
    assert E.f_ln(Float.zero(-1, 9), 9)[0] == Float.inf(-1, 9)
    assert E.f_ln(F(-2.0), 9)[0].is_nan and E.f_ln(inf, 9)[0].is_inf
    for f in (E.f_sin, E.f_cos):
        assert f(inf, 9)[0].is_nan and f(nan, 9)[0].is_nan


def test_exp_one_70_bits():
    y, flag = E.f_exp(from_int(1, 70)[0], 70)
    # 70 bits pin down about 21 significant digits of e
    assert to_decimal(y, 21) == "2.71828182845904523536e0" and flag != EXACT
    assert abs(frac(y) - Fraction(e_digits(40).replace(".", "")) / 10 ** 39) < Fraction(1, 2 ** 68)


def test_ln2_matches_constant():
    assert E.f_ln(from_int(2, 70)[0], 70)[0] == E.const_ln2(70)


def test_sin_10_self_oracle():
    x = from_int(10, 64)[0]
    for mode in RoundingMode:
        assert E.f_sin(x, 64, mode) == self_oracle(E.f_sin, x, 64, mode)


def test_overflow_and_underflow():
    big = F(2.0 ** 45)
    assert E.f_exp(big, 53)[0].is_inf
    top, flag = E.f_exp(big, 53, RZ)
    assert top.is_finite and flag == InexactFlag.ROUNDED_DOWN
    z, flag = E.f_exp(-big, 53)
    assert z.is_zero and flag == InexactFlag.ROUNDED_DOWN


def test_tiny_arguments():
    tiny = Float(Kind.FINITE, 1, 2, -(1 << 35), Natural.from_int(2))
    assert E.f_exp(tiny, 53, RD)[0] == from_int(1, 53)[0]
    assert frac(E.f_exp(tiny, 53, RU)[0]) == 1 + Fraction(1, 2 ** 52)
    assert E.f_exp(-tiny, 53, RU)[0] == from_int(1, 53)[0]
    s, flag = E.f_sin(tiny, 53)
    assert s.exp == tiny.exp and flag == InexactFlag.ROUNDED_UP
    s, flag = E.f_sin(tiny, 53, RZ)
    assert s.exp == tiny.exp - 1 and flag == InexactFlag.ROUNDED_DOWN
    assert E.f_cos(tiny, 53)[0] == from_int(1, 53)[0]
    assert frac(E.f_cos(tiny, 53, RD)[0]) == 1 - Fraction(1, 2 ** 53)


def test_large_argument_reduction():
    mpmath.mp.prec = 400
    for v in (1e6, 1e22, 2.0 ** 100):
        x = F(v)
        got = E.f_sin(x, 53)[0]
        assert float(mpmath.sin(mpmath.mpf(v))) == float(frac(got))


@st.composite
def points(draw, func):
    p = draw(st.integers(2, 256))
    prec = draw(st.integers(2, 120))
    man = (1 << (prec - 1)) | draw(st.integers(0, (1 << (prec - 1)) - 1))
    e = draw(st.integers(-30, 12))
    sign = 1 if func == "ln" else draw(st.sampled_from([1, -1]))
    return Float(Kind.FINITE, sign, prec, e, Natural.from_int(man)), p


@pytest.mark.parametrize("func", sorted(FUNCS))
@given(data=st.data(), mode=st.sampled_from(list(RoundingMode)))
def test_oracle_sandwich(func, data, mode):
    x, p = data.draw(points(func))
    f = FUNCS[func]
    assert f(x, p, mode) == self_oracle(f, x, p, mode)


@pytest.mark.parametrize("func", sorted(FUNCS))
@given(data=st.data(), mode=st.sampled_from(list(RoundingMode)))
def test_against_mpmath(func, data, mode):
    x, p = data.draw(points(func))
    y, flag = FUNCS[func](x, p, mode)
    mpmath.mp.prec = p + 400
    exact = getattr(mpmath, {"ln": "log"}.get(func, func))(mpmath.mpf(frac(x).numerator) /
                                                          frac(x).denominator)
    rnd = {NE: "n", RZ: "d", RU: "c", RD: "f"}[mode]
    want = mpmath.mpf(exact, prec=p, rounding=rnd)
    assert mpmath.mpf(frac(y).numerator) / frac(y).denominator == want
    if want == exact:
        assert flag == EXACT
    else:
        assert flag == (InexactFlag.ROUNDED_UP if want > exact else InexactFlag.ROUNDED_DOWN)


small_args = st.builds(lambda m, e, s: Float(Kind.FINITE, s, 40, e, Natural.from_int(m)),
                       st.integers(1 << 39, (1 << 40) - 1), st.integers(-2, 3),
                       st.sampled_from([1, -1]))


@given(small_args, st.sampled_from([24, 53, 113, 200]))
def test_exp_times_exp_neg(x, p):
    prod = frac(E.f_exp(x, p)[0]) * frac(E.f_exp(-x, p)[0])
    assert within_ulps(prod, Fraction(1), p, 4)


@given(small_args, st.sampled_from([24, 53, 113, 200]))
def test_ln_of_exp(x, p):
    assert within_ulps(E.f_ln(E.f_exp(x, p)[0], p)[0], frac(x), p, 4)


@given(small_args, st.sampled_from([24, 53, 113, 200]))
def test_exp_of_ln(x, p):
    x = Float(x.kind, 1, x.prec, x.exp, x.man)
    assert within_ulps(E.f_exp(E.f_ln(x, p)[0], p)[0], frac(x), p, 4)


@given(st.one_of(small_args, st.just(F(1e6))), st.sampled_from([24, 53, 113, 200]))
def test_pythagorean_identity(x, p):
    s, c = frac(E.f_sin(x, p)[0]), frac(E.f_cos(x, p)[0])
    assert within_ulps(s * s + c * c, Fraction(1), p, 4)


@given(small_args, small_args, st.sampled_from([24, 53, 113]))
def test_exp_addition(a, b, p):
    from mca.mpfloat import fadd
    total = fadd(a, b, 200)[0]  # exact: both have 40 bits and nearby exponents
    assert frac(total) == frac(a) + frac(b)
    lhs = frac(E.f_exp(total, p)[0])
    rhs = frac(E.f_exp(a, p)[0]) * frac(E.f_exp(b, p)[0])
    assert within_ulps(lhs, rhs, p, 4)


def test_f_sqrt_wrapper():
    assert E.f_sqrt(F(9.0), 10) == (F(3.0, 10), EXACT)


def _mp(x: Float):
    v = frac(x)
    return mpmath.mpf(v.numerator) / v.denominator


@pytest.mark.parametrize("mode", list(RoundingMode))
@pytest.mark.parametrize("x,func", [
    # ln(1 + 2^-103): the result sits 2^-207 under a representable number
    (Float(Kind.FINITE, 1, 104, 0, Natural.from_int(1 << 103 | 1)), "ln"),
    (Float(Kind.FINITE, 1, 104, -1, Natural.from_int((1 << 104) - 1)), "ln"),
    # sin of a 1000-bit argument whose low bit is far below the cubic term
    (Float(Kind.FINITE, 1, 1000, -103, Natural.from_int(1 << 999 | 1)), "sin"),
])
@pytest.mark.parametrize("p", [2, 3, 53])
def test_cancellation_against_argument(x, func, p, mode):
    y, flag = FUNCS[func](x, p, mode)
    mpmath.mp.prec = 3000
    exact = getattr(mpmath, {"ln": "log"}.get(func, func))(_mp(x))
    want = mpmath.mpf(exact, prec=p, rounding={NE: "n", RZ: "d", RU: "c", RD: "f"}[mode])
    assert _mp(y) == want
    assert flag == (InexactFlag.ROUNDED_UP if want > exact else InexactFlag.ROUNDED_DOWN)
