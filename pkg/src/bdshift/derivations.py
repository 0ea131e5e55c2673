"""Covariant derivations and their classification.

A derivation with finitely many Fourier components is a sum of covariant
pieces d_n(a) = [g_n, a], where the generator g_n carries an affine
coefficient beta_n: g_n = U^n beta_n(K) for n >= 0 and
g_n = beta_n(K) (U*)^{-n} for n < 0.  The affine part never lies in the
algebra itself, so products are tracked through quasi-affine coefficients
and collapsed only after the commutator cancels the unbounded weight.
"""

from fractions import Fraction

from .scalars import Scalar, as_scalar, ZERO, ONE
from .errors import (
    NonzeroMean,
    NotDerivation,
    NotFinite,
    RegimeMismatch,
    UnboundedCoefficient,
)
from .profinite import LocallyConstantFunction, haar_integral, lcf_constant
from .sequences import (
    AffineSequence,
    BilateralAffineSequence,
    BilateralEPSequence,
    BilateralQuasiAffine,
    EPSequence,
    QuasiAffine,
    bep_from_lcf,
    bep_shift,
    bep_to_lcf,
    ep_constant,
    ep_scale,
    ep_shift,
    ep_supnorm_sq,
    ep_zero,
    increment,
    mean_decompose,
    mean_decompose_mod,
    partial_sums,
)
from .algebra import (
    BilateralElement,
    MatrixTrigPoly,
    UnilateralElement,
    _add_coeff,
    _terms_mul,
    bilateral_zero,
    multiply,
    scale,
    spectral_component,
    toeplitz,
    u_element,
    ustar_element,
    zero_element,
)


def _coerce(v):
    s = as_scalar(v)
    if s is NotImplemented:
        raise TypeError(f"cannot use {type(v).__name__} as a scalar")
    return s


def bounded_regime(n, N):
    """True when covariance forces the coefficient to stay bounded."""
    if N.is_finite():
        return n % N.as_int() != 0
    return n != 0


class CovariantDerivationData:
    """A single covariant component: degree n, coefficient beta."""

    __slots__ = ("n", "beta", "N")

    def __init__(self, n, beta, N):
        if bounded_regime(n, N) and beta.linear:
            raise UnboundedCoefficient(
                f"degree {n} admits only bounded coefficients here"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("CovariantDerivationData is immutable")

    def is_zero(self):
        return not self.beta.linear and self.beta.ep.is_zero()

    def __eq__(self, other):
        if not isinstance(other, CovariantDerivationData):
            return NotImplemented
        return (
            self.n == other.n
            and self.beta == other.beta
            and self.N == other.N
        )

    def __hash__(self):
        return hash((self.n, self.beta, self.N))

    def __repr__(self):
        return f"CovariantDerivationData(n={self.n}, beta={self.beta!r})"


def covariant(n, beta, N):
    """Validated covariant component datum."""
    return CovariantDerivationData(n, beta, N)


def d_nk(n, N):
    """The distinguished component with beta(k) = k + 1."""
    return covariant(n, AffineSequence(ONE, ep_zero(N)), N)


class DerivationSum:
    """A derivation with finite Fourier support."""

    __slots__ = ("components", "N")

    def __init__(self, components, N):
        kept = {}
        for n, comp in components.items():
            if comp.n != n:
                raise ValueError("component keyed by the wrong degree")
            if not comp.is_zero():
                kept[n] = comp
        object.__setattr__(self, "components", dict(sorted(kept.items())))
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("DerivationSum is immutable")

    def component(self, n):
        comp = self.components.get(n)
        if comp is None:
            return covariant(n, AffineSequence(ZERO, ep_zero(self.N)), self.N)
        return comp

    def degrees(self):
        return sorted(self.components)

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, DerivationSum):
            return NotImplemented
        return self.components == other.components and self.N == other.N

    def __add__(self, other):
        if not isinstance(other, DerivationSum):
            return NotImplemented
        out = {}
        for n in set(self.components) | set(other.components):
            a = self.component(n).beta
            b = other.component(n).beta
            beta = AffineSequence(a.linear + b.linear, a.ep + b.ep)
            out[n] = covariant(n, beta, self.N)
        return DerivationSum(out, self.N)

    def __sub__(self, other):
        if not isinstance(other, DerivationSum):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        out = {
            n: covariant(
                n,
                AffineSequence(-c.beta.linear, -c.beta.ep),
                self.N,
            )
            for n, c in self.components.items()
        }
        return DerivationSum(out, self.N)

    def __repr__(self):
        return f"DerivationSum(degrees={self.degrees()})"

    def to_json(self):
        return {
            "components": {
                str(n): {
                    "linear": c.beta.linear.to_json(),
                    "ep": c.beta.ep.to_json(),
                }
                for n, c in self.components.items()
            },
            "N": self.N.to_json(),
        }

    @classmethod
    def from_json(cls, data, N):
        comps = {}
        for key, body in data["components"].items():
            n = int(key)
            beta = AffineSequence(
                Scalar.from_json(body.get("linear", [0, 1, 0, 1])),
                EPSequence.from_json(body["ep"], N),
            )
            comps[n] = covariant(n, beta, N)
        return cls(comps, N)


def derivation_scale(d, c):
    c = _coerce(c)
    out = {
        n: covariant(
            n,
            AffineSequence(comp.beta.linear * c, ep_scale(comp.beta.ep, c)),
            d.N,
        )
        for n, comp in d.components.items()
    }
    return DerivationSum(out, d.N)


def from_inner(x):
    """The inner derivation [x, .] as a component sum.

    Coefficients transfer verbatim: both element terms and generators
    store the diagonal part to the left of the shift power.
    """
    comps = {
        n: covariant(n, AffineSequence(ZERO, a), x.N)
        for n, a in x.terms.items()
    }
    return DerivationSum(comps, x.N)


def apply(d, a):
    """d(a), computed exactly.

    The generator coefficients are lifted to quasi-affine pairs; the
    commutator must cancel every affine weight, which the validity
    conditions guarantee.
    """
    gen = {}
    for n, comp in d.components.items():
        gen[n] = QuasiAffine.from_affine(comp.beta)
    if not gen or a.is_zero():
        return zero_element(a.N)
    left = _terms_mul(gen, a.terms)
    right = _terms_mul(a.terms, gen)
    terms = {}
    for deg in set(left) | set(right):
        coeff = left.get(deg)
        if deg in right:
            neg = -right[deg]
            coeff = neg if coeff is None else _add_coeff(coeff, neg)
        if isinstance(coeff, QuasiAffine):
            coeff = coeff.collapse()
        if not coeff.is_zero():
            terms[deg] = coeff
    return UnilateralElement(terms, a.N)


def fourier_component(d, n):
    """The n-th component (exact: components are the Fourier data)."""
    return d.component(n)


def fourier_of_image(d, n, a):
    """Degree-selection route to d_n(a): push each monomial of a
    through d and keep the part at the shifted degree."""
    total = zero_element(a.N)
    for m, coeff in a.terms.items():
        image = apply(d, UnilateralElement({m: coeff}, a.N))
        total = total + spectral_component(image, m + n)
    return total


def fejer_mean(d, M):
    """Components reweighted by the Fejér coefficients 1 - |n|/(M+1)."""
    if M < 0:
        raise ValueError("Fejér order must be nonnegative")
    out = {}
    for n, comp in d.components.items():
        if abs(n) > M:
            continue
        w = Scalar(Fraction(M + 1 - abs(n), M + 1))
        beta = AffineSequence(
            comp.beta.linear * w, ep_scale(comp.beta.ep, w)
        )
        out[n] = covariant(n, beta, d.N)
    return DerivationSum(out, d.N)


def classify(comp):
    """Split a component in the increment regime into
    C_n . d_{n,K} + inner (periodic) + approximately inner (c00).

    The increment of beta is mean-decomposed; partial sums of the three
    pieces give back beta exactly.
    """
    n, beta, N = comp.n, comp.beta, comp.N
    if bounded_regime(n, N):
        raise RegimeMismatch(
            f"degree {n} is inner outright; nothing to classify"
        )
    alpha = increment(beta)
    if N.is_finite():
        corr, mean, per = mean_decompose(alpha, N)
    else:
        corr, mean, per = mean_decompose_mod(alpha, alpha.period)
    per_sums = []
    run = ZERO
    for v in per:
        run = run + v
        per_sums.append(run)
    inner_beta = AffineSequence(ZERO, EPSequence({}, per_sums, N))
    c00_beta = partial_sums(EPSequence(corr, [ZERO], N))
    return {
        "C_n": mean,
        "inner_per": covariant(n, inner_beta, N),
        "approx_c00": covariant(n, c00_beta, N),
    }


def reassemble(parts, n, N):
    """C_n . d_{n,K} + inner_per + approx_c00 as a DerivationSum."""
    base = derivation_scale(DerivationSum({n: d_nk(n, N)}, N), parts["C_n"])
    rest = DerivationSum({n: parts["inner_per"]}, N) + DerivationSum(
        {n: parts["approx_c00"]}, N
    )
    return base + rest


def obstruction_gap(n, N, beta_bounded):
    """sup_k |1 - (beta(k+1) - beta(k))|^2 for a bounded candidate.

    Always >= 1: increments of a bounded eventually-periodic sequence
    average to zero over a period, so some increment has real part <= 0.
    """
    diff = ep_shift(beta_bounded, 1) - beta_bounded
    g = ep_constant(ONE, beta_bounded.N) - diff
    return ep_supnorm_sq(g)


class LaurentFunction:
    """Finite Fourier support on the circle: f(t) = sum f_j e^{ijt}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        kept = {}
        for j, c in coeffs.items():
            c = _coerce(c)
            if c:
                kept[int(j)] = c
        object.__setattr__(self, "coeffs", dict(sorted(kept.items())))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentFunction is immutable")

    def coefficient(self, j):
        return self.coeffs.get(j, ZERO)

    def support(self):
        return sorted(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, LaurentFunction):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out.get(j, ZERO) + c
        return LaurentFunction(out)

    def __mul__(self, other):
        out = {}
        for j, c in self.coeffs.items():
            for k, e in other.coeffs.items():
                key = j + k
                out[key] = out.get(key, ZERO) + c * e
        return LaurentFunction(out)

    def __neg__(self):
        return LaurentFunction({j: -c for j, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return f"LaurentFunction({self.coeffs!r})"

    def to_json(self):
        return {"coeffs": {str(j): c.to_json() for j, c in self.coeffs.items()}}

    @classmethod
    def from_json(cls, data):
        return cls(
            {int(j): Scalar.from_json(c) for j, c in data["coeffs"].items()}
        )


def laurent_substitute(f, N):
    """f(V^N) as a bilateral element, for finite N."""
    N_int = N.as_int()
    terms = {
        j * N_int: lcf_constant(c, N) for j, c in f.coeffs.items()
    }
    return BilateralElement(terms, N)


def d_f_build(f, N):
    """The distinguished derivation d_f for finite N: one component at
    each n = jN with beta = (f_j / N)(k + 1)."""
    if not N.is_finite():
        raise NotFinite("d_f needs a finite N")
    N_int = N.as_int()
    inv = Scalar(Fraction(1, N_int))
    comps = {}
    for j, c in f.coeffs.items():
        n = j * N_int
        comps[n] = covariant(
            n, AffineSequence(c * inv, ep_zero(N)), N
        )
    return DerivationSum(comps, N)


def d_f_images(f, N):
    """Direct generator images of d_f.

    d_f(U) = (1/N) T(f(V^N)) U and d_f(U*) = -(1/N) U* T(f(V^N)); with
    the compression on these sides the images agree exactly with the
    component sum, frequency by frequency.
    """
    if not N.is_finite():
        raise NotFinite("d_f needs a finite N")
    inv = Scalar(Fraction(1, N.as_int()))
    t = toeplitz(laurent_substitute(f, N))
    return {
        "U": scale(multiply(t, u_element(N)), inv),
        "Ustar": scale(multiply(ustar_element(N), t), -inv),
        "a_per": zero_element(N),
    }


def extract_f(d, N):
    """Recover f from the classification constants: f_j = N C_{jN}."""
    if not N.is_finite():
        raise NotFinite("extraction needs a finite N")
    N_int = N.as_int()
    coeffs = {}
    for n in d.degrees():
        if n % N_int != 0:
            continue
        parts = classify(d.component(n))
        c = parts["C_n"] * Scalar(N_int)
        if c:
            coeffs[n // N_int] = c
    return LaurentFunction(coeffs)


def delta_f_apply(f, F):
    """delta_f(F) = f . (1/i) dF/dt: each monomial z^k scales by k and
    convolves with f."""
    size = F.size
    entries = []
    for r in range(size):
        row = []
        for s in range(size):
            out = {}
            for k, c in F.entries[r][s].items():
                if k == 0:
                    continue
                base = Scalar(k) * c
                for j, fj in f.coeffs.items():
                    key = k + j
                    acc = out.get(key, ZERO) + fj * base
                    out[key] = acc
            row.append({k: v for k, v in out.items() if v})
        entries.append(row)
    return MatrixTrigPoly(size, entries)


def _unit_poly(size, r, s):
    entries = [
        [({0: ONE} if (i, j) == (r, s) else {}) for j in range(size)]
        for i in range(size)
    ]
    return MatrixTrigPoly(size, entries)


def inner_part_H(images, N_int):
    """H = (1/N) sum_{r,s} delta(P_rs) P_sr, verified to implement the
    given action on every matrix unit."""
    H = MatrixTrigPoly.zero(N_int)
    for r in range(N_int):
        for s in range(N_int):
            H = H + images[(r, s)] * _unit_poly(N_int, s, r)
    H = H.scale(Scalar(Fraction(1, N_int)))
    for r in range(N_int):
        for s in range(N_int):
            unit = _unit_poly(N_int, r, s)
            if H * unit - unit * H != images[(r, s)]:
                raise NotDerivation(
                    "images are not consistent with the unit relations"
                )
    return H


class BilateralCovariantData:
    """A covariant component on the quotient: degree n, coefficient eta
    with eta(l) = C l + periodic."""

    __slots__ = ("n", "eta", "N")

    def __init__(self, n, eta, N):
        if eta.ep.correction:
            raise ValueError("quotient coefficients have no corrections")
        if bounded_regime(n, N) and eta.linear:
            raise UnboundedCoefficient(
                f"degree {n} admits only bounded coefficients here"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("BilateralCovariantData is immutable")

    def is_zero(self):
        return not self.eta.linear and self.eta.ep.is_zero()

    def __eq__(self, other):
        if not isinstance(other, BilateralCovariantData):
            return NotImplemented
        return (
            self.n == other.n
            and self.eta == other.eta
            and self.N == other.N
        )

    def __repr__(self):
        return f"BilateralCovariantData(n={self.n}, eta={self.eta!r})"


def bilateral_covariant(n, eta, N):
    return BilateralCovariantData(n, eta, N)


def bilateral_zero_component(n, N):
    eta = BilateralAffineSequence(ZERO, BilateralEPSequence({}, [ZERO], N))
    return BilateralCovariantData(n, eta, N)


def quotient_derivation(d):
    """Push a derivation to the quotient: corrections die, the periodic
    table extends over Z, the linear coefficient survives.

    Negative degrees store their coefficient to the left of the shift,
    while V^n eta(L) places it on the right; the table rotates by -n to
    compensate.  Additive constants act trivially and are dropped.
    """
    out = {}
    for n, comp in d.components.items():
        table = list(comp.beta.ep.table)
        if n < 0:
            per = len(table)
            table = [table[(r + n) % per] for r in range(per)]
        eta = BilateralAffineSequence(
            comp.beta.linear, BilateralEPSequence({}, table, d.N)
        )
        data = bilateral_covariant(n, eta, d.N)
        if not data.is_zero():
            out[n] = data
    return out


def bilateral_apply(components, b):
    """Apply quotient components to a bilateral element.

    [V^n eta(L), V^m g(L)] has degree n + m with coefficient
    (S_m eta) g - (S_n g) eta; validity makes the linear weight cancel.
    """
    terms = {}
    for n, comp in components.items():
        gen = BilateralQuasiAffine.from_affine(comp.eta)
        for m, g in b.terms.items():
            gb = bep_from_lcf(g)
            coeff = gen.shift(m).mul_bep(gb) - gen.mul_bep(bep_shift(gb, n))
            deg = n + m
            terms[deg] = terms.get(deg, _bqa_zero(b.N)) + coeff
    out = {}
    for deg, coeff in terms.items():
        ep = coeff.collapse()
        if not ep.is_zero():
            out[deg] = bep_to_lcf(ep)
    return BilateralElement(out, b.N)


def _bqa_zero(N):
    z = BilateralEPSequence({}, [ZERO], N)
    return BilateralQuasiAffine(z, z)


def approx_c00(comp, M):
    """Inner approximant when the increment is purely c00: truncate the
    increment at M and re-sum."""
    alpha = increment(comp.beta)
    if any(v for v in alpha.table):
        raise RegimeMismatch("increment has a periodic part")
    corr = {k: v for k, v in alpha.correction.items() if k <= M}
    beta = partial_sums(EPSequence(corr, [ZERO], comp.N))
    return DerivationSum({comp.n: covariant(comp.n, beta, comp.N)}, comp.N)


def approx_per(f):
    """Inner component from a mean-zero locally constant function: the
    periodic partial sums of f."""
    if haar_integral(f):
        raise NonzeroMean("partial sums stay periodic only at mean zero")
    run = ZERO
    table = []
    for v in f.values:
        run = run + v
        table.append(run)
    beta = AffineSequence(ZERO, EPSequence({}, table, f.N))
    return covariant(0, beta, f.N)
