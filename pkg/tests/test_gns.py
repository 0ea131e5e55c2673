import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bdshift.scalars import Scalar, ZERO, ONE
from bdshift.errors import LevelMismatch, RegimeMismatch, WindowTooSmall
from bdshift.profinite import LocallyConstantFunction, SupernaturalNumber
from bdshift.sequences import BilateralAffineSequence, BilateralEPSequence
from bdshift.algebra import (
    BilateralElement,
    bilateral_adjoint,
    bilateral_diag,
    bilateral_identity,
    bilateral_multiply,
    residue_indicator,
    v_element,
)
from bdshift.derivations import bilateral_apply, bilateral_covariant
from bdshift.gns import (
    GNSVector0,
    GNSVectorHaar,
    ImplementationData,
    build_D_haar,
    build_D_haar_exact,
    build_D_tau0,
    build_D_tau0_exact,
    check_covariance,
    check_implementation,
    chi0,
    implementation_from_bilateral,
    inner0,
    inner_haar,
    parametrix_report,
    pi0_apply,
    pi_haar_apply,
    slope_corroborates,
    tau0,
    tau_haar,
)
from bdshift.gns import _pi0_exact

N2 = SupernaturalNumber.from_int(2)
N4 = SupernaturalNumber.from_int(4)
NINF = SupernaturalNumber({2: "inf"})

GRID16 = [2 * math.pi * k / 16 for k in range(16)]
POSITIVE = "compact-parametrix-consistent"
NEGATIVE = "no-compact-parametrix"


def rand_scalar(rng):
    return Scalar(
        Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
        Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
    )


def rand_lcf(rng, N, per):
    return LocallyConstantFunction([rand_scalar(rng) for _ in range(per)], N)


def rand_bilateral(rng, N, per, deg=2):
    terms = {}
    for n in range(-deg, deg + 1):
        if rng.random() < 0.6:
            terms[n] = rand_lcf(rng, N, per)
    if not terms:
        terms[0] = rand_lcf(rng, N, per)
    return BilateralElement(terms, N)


def rand_eta(rng, N, per, linear_ok):
    lin = rand_scalar(rng) if linear_ok and rng.random() < 0.8 else ZERO
    return BilateralAffineSequence(
        lin,
        BilateralEPSequence({}, [rand_scalar(rng) for _ in range(per)], N),
    )


def test_states_on_basics():
    rng = random.Random(20240204)
    f = rand_lcf(rng, N2, 2)
    assert tau0(bilateral_diag(f)) == f.value_at(0)
    eN = residue_indicator(0, 2, N2)
    assert tau_haar(bilateral_diag(eN)) == Scalar(Fraction(1, 2))
    assert tau0(v_element(N2, 3)) == ZERO
    assert tau_haar(v_element(N2, -1)) == ZERO
    assert tau0(bilateral_identity(N2)) == ONE
    assert tau_haar(bilateral_identity(N2)) == ONE


def test_states_positive():
    rng = random.Random(20240205)
    for _ in range(30):
        b = rand_bilateral(rng, N2, 2)
        for t in (tau0, tau_haar):
            val = t(bilateral_multiply(bilateral_adjoint(b), b))
            assert val.is_real() and val.re >= 0


def test_pi0_action():
    rng = random.Random(20240206)
    f = rand_lcf(rng, N2, 2)
    e0 = GNSVector0({0: ONE})
    assert pi0_apply(v_element(N2), e0) == GNSVector0({1: ONE})
    v = GNSVector0({-2: rand_scalar(rng), 5: rand_scalar(rng)})
    w = pi0_apply(bilateral_diag(f), v)
    for l, c in v.coeffs.items():
        assert w.coefficient(l) == f.value_at(l) * c
    for _ in range(30):
        b = rand_bilateral(rng, N2, 2)
        # the state is reproduced by the cyclic vector, exactly
        assert inner0(e0, pi0_apply(b, e0)) == tau0(b)
        b2 = rand_bilateral(rng, N2, 2)
        lhs = pi0_apply(bilateral_multiply(b, b2), v)
        assert lhs == pi0_apply(b, pi0_apply(b2, v))


def test_pi_haar_action():
    rng = random.Random(20240207)
    f = rand_lcf(rng, N2, 2)
    x0 = chi0(2)
    assert inner_haar(x0, x0) == ONE
    got = pi_haar_apply(v_element(N2), GNSVectorHaar({(0, 1): ONE}, 2))
    assert got == GNSVectorHaar({(1, 1): ONE}, 2)
    vH = GNSVectorHaar({(2, 0): rand_scalar(rng), (-1, 1): rand_scalar(rng)}, 2)
    w = pi_haar_apply(bilateral_diag(f), vH)
    for (m, x), c in vH.coeffs.items():
        assert w.coefficient(m, x) == f.value_at(x + m) * c
    for _ in range(30):
        b = rand_bilateral(rng, N2, 2)
        assert inner_haar(x0, pi_haar_apply(b, x0)) == tau_haar(b)
        b2 = rand_bilateral(rng, N2, 2)
        assert pi_haar_apply(bilateral_multiply(b, b2), vH) == pi_haar_apply(
            b, pi_haar_apply(b2, vH)
        )
    with pytest.raises(LevelMismatch):
        pi_haar_apply(
            rand_bilateral(rng, N4, 4), GNSVectorHaar({(0, 0): ONE}, 2)
        )


def test_build_D_tau0():
    etaL = BilateralAffineSequence(ONE, BilateralEPSequence({}, [ZERO], N2))
    dataL = implementation_from_bilateral(bilateral_covariant(0, etaL, N2))
    D = build_D_tau0(dataL, 3)
    assert np.allclose(D, np.diag(np.arange(-3, 4, dtype=float)))
    eta1 = BilateralAffineSequence(ZERO, BilateralEPSequence({}, [ONE], N2))
    data1 = implementation_from_bilateral(bilateral_covariant(1, eta1, N2))
    D1 = build_D_tau0(data1, 2)
    S = np.zeros((5, 5))
    for i in range(4):
        S[i + 1, i] = 1.0
    assert np.allclose(D1, S)


def test_check_covariance():
    etaL = BilateralAffineSequence(ONE, BilateralEPSequence({}, [ZERO], N2))
    dataL = implementation_from_bilateral(bilateral_covariant(0, etaL, N2))
    assert check_covariance(build_D_tau0(dataL, 8), 0, 8, GRID16) < 1e-12
    eta1 = BilateralAffineSequence(ZERO, BilateralEPSequence({}, [ONE], N2))
    data1 = implementation_from_bilateral(bilateral_covariant(1, eta1, N2))
    D1 = build_D_tau0(data1, 2)
    assert check_covariance(D1, 1, 2, GRID16) < 1e-12
    # wrong degree: covariance fails loudly
    assert check_covariance(D1, 2, 2, GRID16) > 0.5


def test_tau0_implementation_exact_all_regimes():
    rng = random.Random(20240208)
    cases = (
        [(n, N2, 2, False) for n in (1, -1, 3)]
        + [(n, N2, 2, True) for n in (0, 2, -2)]
        + [(0, NINF, 4, True)]
        + [(n, NINF, 4, False) for n in (1, -3)]
    )
    for n, N, per, lin_ok in cases:
        for _ in range(3):
            eta = rand_eta(rng, N, per, lin_ok)
            comp = bilateral_covariant(n, eta, N)
            data = implementation_from_bilateral(
                comp, c=rand_scalar(rng) if n == 0 else None
            )
            Dx = build_D_tau0_exact(data, 8)
            b = rand_bilateral(rng, N, per, 2)
            res = check_implementation(Dx, {n: comp}, b, 8, space="tau0")
            assert res == 0.0


def test_tau0_inner_implementation():
    rng = random.Random(20240209)
    g = rand_lcf(rng, N2, 2)
    eta_g = BilateralAffineSequence(
        ZERO, BilateralEPSequence({}, list(g.values), N2)
    )
    comp_g = bilateral_covariant(0, eta_g, N2)
    Dg = _pi0_exact(bilateral_diag(g), 8)
    res = check_implementation(
        Dg, {0: comp_g}, rand_bilateral(rng, N2, 2), 8, space="tau0"
    )
    assert res == 0.0


def test_haar_implementation_exact_all_cases():
    rng = random.Random(20240210)
    cases = (
        [(n, N2, 2, False) for n in (1, -1, 3)]
        + [(n, N2, 2, True) for n in (0, 2, -2)]
        + [(0, NINF, 4, True)]
    )
    for n, N, per, lin_ok in cases:
        for psi in (None, rand_lcf(rng, N, per)):
            eta = rand_eta(rng, N, per, lin_ok)
            comp = bilateral_covariant(n, eta, N)
            data = implementation_from_bilateral(comp, psi=psi)
            Dx = build_D_haar_exact(data, 8)
            b = rand_bilateral(rng, N, per, 2)
            res = check_implementation(
                Dx, {n: comp}, b, 8, space="haar", level=data.level
            )
            assert res == 0.0


def test_haar_covariance():
    rng = random.Random(20240211)
    for n, N, per, lin_ok in [(1, N2, 2, False), (0, N2, 2, True), (2, N2, 2, True)]:
        eta = rand_eta(rng, N, per, lin_ok)
        data = implementation_from_bilateral(
            bilateral_covariant(n, eta, N), psi=rand_lcf(rng, N, per)
        )
        Dh = build_D_haar(data, 8)
        assert check_covariance(Dh, n, 8, GRID16) < 1e-12


def test_haar_generator_formulas():
    rng = random.Random(20240212)
    h = rand_lcf(rng, N2, 2)
    data_b = ImplementationData(1, N2, "bounded", h=h, psi=h)
    Db = build_D_haar_exact(data_b, 4)
    # psi = h kills the commutant term: pure shifted multiplication
    for (i, j), val in Db.items():
        mi, xi = i // 2 - 4, i % 2
        mj, xj = j // 2 - 4, j % 2
        assert mi == mj + 1 and xi == xj
        assert val == h.value_at(xj + mj)
    data_d = ImplementationData(
        2, N2, "incrementN", C=ONE, htilde=LocallyConstantFunction([ZERO], N2)
    )
    Dd = build_D_haar_exact(data_d, 4)
    for (i, j), val in Dd.items():
        mi, xi = i // 2 - 4, i % 2
        mj, xj = j // 2 - 4, j % 2
        assert mi == mj + 2 and xi == xj and val == Scalar(mj)


def test_window_guard():
    rng = random.Random(20240213)
    eta = rand_eta(rng, N2, 2, False)
    comp = bilateral_covariant(1, eta, N2)
    data = implementation_from_bilateral(comp)
    Dx = build_D_tau0_exact(data, 2)
    b = rand_bilateral(rng, N2, 2, 2)
    with pytest.raises(WindowTooSmall):
        check_implementation(Dx, {1: comp}, b, 2, space="tau0")


def test_parametrix_tau0():
    Ms = [8, 16, 32]
    etaL = BilateralAffineSequence(ONE, BilateralEPSequence({}, [ZERO], N2))
    dataL = implementation_from_bilateral(bilateral_covariant(0, etaL, N2))
    rep = parametrix_report(dataL, Ms, space="tau0")
    assert rep["verdict"] == POSITIVE and slope_corroborates(rep)
    assert rep["min_sv"][-1] > 25
    assert rep["M"] == Ms and len(rep["min_sv"]) == 3

    eta1 = BilateralAffineSequence(ZERO, BilateralEPSequence({}, [ONE], N2))
    data1 = implementation_from_bilateral(bilateral_covariant(1, eta1, N2))
    rep = parametrix_report(data1, Ms, space="tau0")
    assert rep["verdict"] == NEGATIVE and not slope_corroborates(rep)

    eta_c0 = BilateralAffineSequence(
        ZERO, BilateralEPSequence({}, [ONE, Scalar(3)], N2)
    )
    rep = parametrix_report(
        implementation_from_bilateral(bilateral_covariant(2, eta_c0, N2)),
        Ms,
        space="tau0",
    )
    assert rep["verdict"] == NEGATIVE and not slope_corroborates(rep)

    eta_i0 = BilateralAffineSequence(
        Scalar(Fraction(1, 2)),
        BilateralEPSequence({}, [ONE, ZERO, ZERO, ONE], NINF),
    )
    rep = parametrix_report(
        implementation_from_bilateral(bilateral_covariant(0, eta_i0, NINF)),
        Ms,
        space="tau0",
    )
    assert rep["verdict"] == POSITIVE and slope_corroborates(rep)


def test_parametrix_haar():
    Ms = [8, 16, 32]
    eta_h = BilateralAffineSequence(
        ONE, BilateralEPSequence({}, [ONE, ZERO], N2)
    )
    rep = parametrix_report(
        implementation_from_bilateral(bilateral_covariant(2, eta_h, N2)),
        Ms,
        space="haar",
    )
    assert rep["verdict"] == POSITIVE and slope_corroborates(rep)

    rng = random.Random(20240214)
    h = rand_lcf(rng, N2, 2)
    data_b = ImplementationData(1, N2, "bounded", h=h, psi=h)
    rep = parametrix_report(data_b, Ms, space="haar")
    assert rep["verdict"] == NEGATIVE and not slope_corroborates(rep)

    eta_c0 = BilateralAffineSequence(
        ZERO, BilateralEPSequence({}, [ONE, Scalar(3)], N2)
    )
    rep = parametrix_report(
        implementation_from_bilateral(bilateral_covariant(2, eta_c0, N2)),
        Ms,
        space="haar",
    )
    assert rep["verdict"] == NEGATIVE and not slope_corroborates(rep)

    # infinite N: the Haar fiber is non-atomic, so no compact parametrix
    # even though the number operator grows on every finite level
    eta_i0 = BilateralAffineSequence(
        Scalar(Fraction(1, 2)),
        BilateralEPSequence({}, [ONE, ZERO, ZERO, ONE], NINF),
    )
    rep = parametrix_report(
        implementation_from_bilateral(bilateral_covariant(0, eta_i0, NINF)),
        Ms,
        space="haar",
    )
    assert rep["verdict"] == NEGATIVE


def test_implementation_data_guards():
    rng = random.Random(20240215)
    h = rand_lcf(rng, N2, 2)
    with pytest.raises(RegimeMismatch):
        ImplementationData(0, N2, "bounded", h=h)
    with pytest.raises(RegimeMismatch):
        ImplementationData(1, N2, "incrementN", C=ONE, htilde=h)


def test_naturality_of_implementation():
    # D commutes past pi exactly because the defect lies in the commutant:
    # cross-check the full derivation identity on a two-component sum
    rng = random.Random(20240216)
    for _ in range(10):
        eta_a = rand_eta(rng, N2, 2, False)
        eta_b = rand_eta(rng, N2, 2, True)
        comp_a = bilateral_covariant(1, eta_a, N2)
        comp_b = bilateral_covariant(2, eta_b, N2)
        comps = {1: comp_a, 2: comp_b}
        b = rand_bilateral(rng, N2, 2, 2)
        img = bilateral_apply(comps, b)
        Dx = build_D_tau0_exact(
            implementation_from_bilateral(comp_a), 10
        )
        Dy = build_D_tau0_exact(
            implementation_from_bilateral(comp_b), 10
        )
        D = dict(Dx)
        for k, v in Dy.items():
            D[k] = D.get(k, ZERO) + v
        assert check_implementation(D, comps, b, 10, space="tau0") == 0.0
        assert not img.is_zero() or b.is_zero() or comp_a.is_zero()
