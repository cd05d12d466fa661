import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import naturals, nonzero_naturals

from mca import divgcd as D
from mca.errors import DivisionByZero, ModulusTooSmall, NotDivisible, NotInvertible
from mca.limbcore import BETA, ONE, W, ZERO, Integer, Natural, divrem_schoolbook

N = Natural.from_int
rng = random.Random(17)


def I(v):
    return Integer.from_int(v)


def normalized_divisor(limbs):
    return N(rng.getrandbits(W * limbs) | 1 << (W * limbs - 1))


# --- reciprocal -------------------------------------------------------------

def test_reciprocal_power_of_two():
    for n in (1, 3, 8):
        b = N(BETA ** n // 2)
        assert N(2 * BETA ** n) - D.newton_reciprocal(b).value <= N(2)


def test_reciprocal_one_limb():
    b = N(3 << (W - 2))
    want = BETA ** 2 // int(b)
    assert 0 <= want - int(D.newton_reciprocal(b, 1).value) <= 2


def test_reciprocal_64_limbs():
    b = normalized_divisor(64)
    want = divrem_schoolbook(ONE << (2 * W * 64), b)[0]
    got = D.newton_reciprocal(b).value
    assert got <= want and want - got <= N(2)


def test_reciprocal_errors():
    with pytest.raises(DivisionByZero):
        D.newton_reciprocal(ZERO)
    with pytest.raises(ValueError):
        D.newton_reciprocal(N(5))


def test_newton_step_doubles_correct_bits():
    b = normalized_divisor(200)
    trace = []
    D.newton_reciprocal(b, trace=trace)
    assert trace
    for n, x0, x1 in trace:
        bb = b.high_limbs(b.nlimbs - n)
        exact = divrem_schoolbook(ONE << (2 * W * n), bb)[0]
        e0 = abs(int(exact) - int(x0)).bit_length()
        e1 = abs(int(exact) - int(x1)).bit_length()
        good0, good1 = W * n - e0, W * n - e1
        # the step takes about h correct limbs to about 2h (minus a few bits)
        assert good1 >= min(2 * good0 - 4, W * n - 4)


# --- division ---------------------------------------------------------------

def test_divrem_fast_examples():
    b = normalized_divisor(3)
    assert D.divrem_fast(ZERO, b) == (ZERO, ZERO)
    assert D.divrem_fast(b - ONE, b) == (ZERO, b - ONE)
    with pytest.raises(DivisionByZero):
        D.divrem_fast(b, ZERO)


def test_divrem_fast_large():
    a = N(rng.getrandbits(W * 4000))
    b = N(rng.getrandbits(W * 2000) | 1)
    assert D.divrem_fast(a, b) == divrem_schoolbook(a, b)


@pytest.mark.parametrize("threshold", [2, 50])
def test_divrem_fast_edge_shapes(threshold):
    old = D.NEWTON_DIV_FROM
    D.set_newton_div_from(threshold)
    try:
        for _ in range(60):
            b = N(rng.getrandbits(W * rng.randint(1, 120)) | 1)
            k = N(rng.getrandbits(W * rng.randint(1, 120)))
            for a in (k * b, k * b + (b - ONE), b - ONE, k, ONE):
                assert D.divrem_fast(a, b) == divrem_schoolbook(a, b)
            assert D.divrem_fast(k, ONE) == (k, ZERO)
    finally:
        D.set_newton_div_from(old)


@given(naturals(30), nonzero_naturals(15))
def test_divrem_fast_property(a, b):
    old = D.NEWTON_DIV_FROM
    D.set_newton_div_from(2)
    try:
        assert D.divrem_fast(a, b) == divrem_schoolbook(a, b)
    finally:
        D.set_newton_div_from(old)


def test_exact_div():
    x = N(98765)
    assert D.exact_div(x, ONE) == x
    assert D.exact_div(N(6 * (2**1000 + 3)), N(6)) == N(2**1000 + 3)
    with pytest.raises(NotDivisible):
        D.exact_div(N(10), N(4))
    with pytest.raises(DivisionByZero):
        D.exact_div(x, ZERO)


@given(naturals(10))
def test_isqrt(a):
    r = D.isqrt(a)
    assert r * r <= a < (r + ONE) * (r + ONE)


# --- gcd family -------------------------------------------------------------

def test_gcd_examples():
    a = N(12345678901234567890)
    assert D.gcd(ZERO, a) == a
    assert D.gcd(ZERO, ZERO) == ZERO
    assert D.gcd(N(240), N(46)) == N(2)
    # 240/2 and 46/2 share no factor below their size
    assert all(not (120 % d == 0 and 23 % d == 0) for d in range(2, 24))


@given(naturals(6), naturals(6))
def test_gcd_properties(a, b):
    g = D.gcd(a, b)
    assert g == D.gcd(b, a)
    if g:
        assert a % g == ZERO and b % g == ZERO
        assert D.gcd(a // g, b // g) == ONE
    if a >= b:
        assert g == D.gcd(a - b, b)


def test_extgcd_examples():
    assert D.extgcd(I(-9), I(0)) == (N(9), I(-1), I(0))
    assert D.extgcd(I(240), I(46)) == (N(2), I(-9), I(47))


@given(st.integers(-(1 << 200), 1 << 200), st.integers(-(1 << 200), 1 << 200))
def test_extgcd_bezout_and_bounds(a, b):
    g, u, v = D.extgcd(I(a), I(b))
    assert g == D.gcd(N(abs(a)), N(abs(b)))
    assert int(u) * a + int(v) * b == int(g)
    if a and b and abs(a) != abs(b):
        # with |a| = |b| = g no cofactor pair can meet both bounds
        gi = int(g)
        assert 2 * gi * abs(int(u)) <= abs(b) and 2 * gi * abs(int(v)) <= abs(a)


def test_mod_inverse_examples():
    assert D.mod_inverse(ONE, N(97)) == ONE
    assert D.mod_inverse(N(3), N(7)) == N(5)
    with pytest.raises(NotInvertible):
        D.mod_inverse(N(6), N(9))
    with pytest.raises(ModulusTooSmall):
        D.mod_inverse(ONE, ONE)


@given(naturals(4), nonzero_naturals(4))
def test_mod_inverse_composes_to_one(a, n):
    n = n + N(2)
    if D.gcd(a, n) != ONE:
        return
    x = D.mod_inverse(a, n)
    assert ONE <= x < n and (a * x) % n == ONE
