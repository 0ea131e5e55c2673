import random
from fractions import Fraction

import pytest

from bdshift.scalars import Scalar
from bdshift.errors import LevelMismatch, NotFinite, PeriodNotDivisor
from bdshift.profinite import (
    DivisorChain,
    LocallyConstantFunction,
    ProfiniteInteger,
    SupernaturalNumber,
    divides,
    finite_divisors,
    haar_integral,
    lcf_add,
    lcf_constant,
    lcf_from_periodic,
    lcf_mul,
    lcf_scale,
    lcf_shift,
    pullback_sequence,
    q_map,
)

N12 = SupernaturalNumber.from_int(12)
N2INF = SupernaturalNumber({2: "inf"})


def test_supernatural_basics():
    assert N12.factors == {2: 2, 3: 1}
    assert N12.is_finite() and N12.as_int() == 12
    assert not N2INF.is_finite()
    with pytest.raises(NotFinite):
        N2INF.as_int()
    assert SupernaturalNumber.from_int(1).factors == {}
    assert SupernaturalNumber({2: "inf"}).exponent(2) > 100


def test_supernatural_rejects_bad_input():
    with pytest.raises(ValueError):
        SupernaturalNumber({4: 1})
    with pytest.raises(ValueError):
        SupernaturalNumber({2: 0})


def test_divides():
    assert divides(6, N12) and divides(12, N12)
    assert not divides(8, N12) and not divides(5, N12)
    assert divides(16, N2INF) and not divides(3, N2INF)
    assert finite_divisors(N12, 12) == [1, 2, 3, 4, 6, 12]
    assert finite_divisors(N2INF, 10) == [1, 2, 4, 8]


def test_supernatural_json():
    for N in (N12, N2INF, SupernaturalNumber({})):
        assert SupernaturalNumber.from_json(N.to_json()) == N


def test_divisor_chain():
    chain = DivisorChain([1, 2, 4], N2INF)
    assert chain.top() == 4
    with pytest.raises(ValueError):
        DivisorChain([2, 3], SupernaturalNumber.from_int(6))
    with pytest.raises(PeriodNotDivisor):
        DivisorChain([3], N2INF)
    assert DivisorChain.from_json(chain.to_json(), N2INF) == chain


def test_profinite_arithmetic():
    chain = DivisorChain([2, 4, 8], N2INF)
    x = q_map(5, chain)
    y = q_map(7, chain)
    assert x.residues == (1, 1, 5)
    assert (x + y) == q_map(12, chain)
    assert (x * y) == q_map(35, chain)
    assert -x == q_map(-5, chain)
    assert x.residue_at_level(4) == 1
    with pytest.raises(ValueError):
        ProfiniteInteger(chain, [1, 3, 5])
    other = DivisorChain([2, 4], N2INF)
    with pytest.raises(LevelMismatch):
        x + q_map(1, other)


def test_profinite_random_ring_laws():
    rng = random.Random(20240102)
    chain = DivisorChain([1, 3, 6, 12], N12)
    for _ in range(100):
        a, b, c = (q_map(rng.randint(-50, 50), chain) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert a * b == b * a
        assert a + -a == q_map(0, chain)


def test_lcf_minimal_period():
    f = LocallyConstantFunction([Scalar(1), Scalar(1)], N12)
    assert f.period == 1
    g = LocallyConstantFunction(
        [Scalar(1), Scalar(2), Scalar(1), Scalar(2)], N12
    )
    assert g.period == 2
    with pytest.raises(PeriodNotDivisor):
        LocallyConstantFunction([Scalar(k) for k in range(5)], N12)


def test_lcf_values_and_shift():
    g = lcf_from_periodic([Scalar(3), Scalar(-1)], N12)
    assert g.value_at(0) == Scalar(3)
    assert g.value_at(7) == Scalar(-1)
    assert g.value_at(-1) == Scalar(-1)
    assert lcf_shift(g, 1).value_at(0) == g.value_at(1)
    assert pullback_sequence(g) == [Scalar(3), Scalar(-1)]


def test_lcf_pointwise_ops():
    f = lcf_from_periodic([Scalar(1), Scalar(2)], N12)
    g = lcf_from_periodic([Scalar(1), Scalar(0), Scalar(2)], N12)
    s = lcf_add(f, g)
    p = lcf_mul(f, g)
    assert s.period == 6 and p.period == 6
    for k in range(12):
        assert s.value_at(k) == f.value_at(k) + g.value_at(k)
        assert p.value_at(k) == f.value_at(k) * g.value_at(k)
    assert lcf_scale(f, Scalar(2)).value_at(1) == Scalar(4)


def test_haar_integral():
    f = lcf_from_periodic([Scalar(1), Scalar(0), Scalar(0), Scalar(0)], N12)
    assert haar_integral(f) == Scalar(Fraction(1, 4))
    assert haar_integral(lcf_constant(Scalar(7), N12)) == Scalar(7)


def test_haar_shift_invariance():
    rng = random.Random(20240103)
    for _ in range(50):
        vals = [Scalar(rng.randint(-5, 5)) for _ in range(6)]
        f = lcf_from_periodic(vals, N12)
        t = rng.randint(-10, 10)
        assert haar_integral(lcf_shift(f, t)) == haar_integral(f)


def test_lcf_json_round_trip():
    f = lcf_from_periodic([Scalar(1, 2), Scalar(0)], N12)
    assert LocallyConstantFunction.from_json(f.to_json(), N12) == f
