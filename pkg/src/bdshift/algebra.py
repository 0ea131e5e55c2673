"""Normal-form arithmetic for the shift algebras.

A unilateral element is a finite sum of monomials: degree n >= 0 means
U^n a(K), degree n = -p < 0 means a(K)(U*)^p, with the coefficient kept
LEFT of (U*)^p.  Matrix semantics on the basis {E_k, k >= 0}:

    degree n >= 0:  entry (k+n, k) = a(k)
    degree -p < 0:  entry (i, i+p) = a(i)

A bilateral element is a finite sum V^n b_n(L) with locally constant
coefficients; entries (l+n, l) = b(l) over l in Z.  The products follow
the commutation rule a(K)U = U a(K+I) and its bilateral twin; on the
unilateral side the collapse (U*)U = I is exact while U^p c(K)(U*)^p
produces the chi_{>=p} cutoff, realized by the zero-filling shift of
the sequences module.
"""

from .errors import NotFinite
from .profinite import (
    LocallyConstantFunction,
    SupernaturalNumber,
    lcf_conjugate,
    lcf_shift,
)
from .scalars import Scalar, as_scalar
from .sequences import (
    EPSequence,
    QuasiAffine,
    BilateralQuasiAffine,
    BilateralEPSequence,
    bep_from_lcf,
    bep_to_lcf,
    ep_conjugate,
    ep_constant,
    ep_from_lcf,
    ep_mul,
    ep_scale,
    ep_shift,
    ep_zero,
)

_ZERO = Scalar(0)


def _coerce(v):
    s = as_scalar(v)
    if s is NotImplemented:
        raise TypeError(f"cannot use {type(v).__name__} as a scalar")
    return s


# ---------------------------------------------------------------------------
# generic monomial product kernel, shared by the plain and quasi-affine paths


def _shift_coeff(x, t):
    if isinstance(x, QuasiAffine):
        return x.shift(t)
    return ep_shift(x, t)


def _mul_coeff(x, y):
    if isinstance(x, QuasiAffine):
        return x.mul_ep(y)
    if isinstance(y, QuasiAffine):
        return y.mul_ep(x)
    return ep_mul(x, y)


def _add_coeff(x, y):
    if isinstance(x, QuasiAffine) or isinstance(y, QuasiAffine):
        if not isinstance(x, QuasiAffine):
            x = QuasiAffine.from_ep(x)
        if not isinstance(y, QuasiAffine):
            y = QuasiAffine.from_ep(y)
    return x + y


def _mono_mul(m, a, n, b):
    """Normal form of (degree m, coeff a)*(degree n, coeff b)."""
    if m >= 0 and n >= 0:
        return m + n, _mul_coeff(_shift_coeff(a, n), b)
    if m >= 0 and n < 0:
        q = -n
        return m + n, _shift_coeff(_mul_coeff(a, b), -min(m, q))
    if m < 0 and n >= 0:
        d = n + m
        if d >= 0:
            return d, _mul_coeff(_shift_coeff(a, d), b)
        return d, _mul_coeff(a, _shift_coeff(b, -d))
    # m < 0 and n < 0
    return m + n, _mul_coeff(a, _shift_coeff(b, -m))


def _terms_mul(xt, yt):
    """Product of two term dicts (degree -> coefficient), unnormalized
    accumulation by degree."""
    out = {}
    for m, a in xt.items():
        for n, b in yt.items():
            deg, coeff = _mono_mul(m, a, n, b)
            if deg in out:
                out[deg] = _add_coeff(out[deg], coeff)
            else:
                out[deg] = coeff
    return out


# ---------------------------------------------------------------------------
# unilateral elements


class UnilateralElement:
    """Finite normal form over the unilateral shift algebra."""

    __slots__ = ("terms", "N")

    def __init__(self, terms, N):
        clean = {}
        for n, a in terms.items():
            if not isinstance(a, EPSequence):
                raise TypeError("coefficients must be EPSequence")
            if not a.is_zero():
                clean[int(n)] = a
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("UnilateralElement is immutable")

    def coefficient(self, n):
        return self.terms.get(n)

    def degrees(self):
        return sorted(self.terms.keys())

    def max_abs_degree(self):
        return max((abs(n) for n in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, UnilateralElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        terms = dict(self.terms)
        for n, b in other.terms.items():
            terms[n] = terms[n] + b if n in terms else b
        return UnilateralElement(terms, self.N)

    def __sub__(self, other):
        return self + scale(other, Scalar(-1))

    def __neg__(self):
        return scale(self, Scalar(-1))

    def __mul__(self, other):
        if isinstance(other, UnilateralElement):
            return multiply(self, other)
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return scale(self, c)

    def __rmul__(self, other):
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return scale(self, c)

    def entry(self, i, j):
        """Exact matrix entry (i, j) of the represented operator."""
        val = _ZERO
        n = i - j
        a = self.terms.get(n)
        if a is not None:
            val = val + a.value_at(j if n >= 0 else i)
        return val

    def __repr__(self):
        if not self.terms:
            return "UnilateralElement(0)"
        parts = []
        for n in self.degrees():
            parts.append(f"{n}: {self.terms[n]!r}")
        return "UnilateralElement({" + ", ".join(parts) + "})"

    def to_json(self):
        return {"terms": {str(n): a.to_json() for n, a in self.terms.items()}}

    @classmethod
    def from_json(cls, data, N):
        return cls(
            {
                int(n): EPSequence.from_json(a, N)
                for n, a in data.get("terms", {}).items()
            },
            N,
        )


def zero_element(N):
    return UnilateralElement({}, N)


def identity_element(N):
    return UnilateralElement({0: ep_constant(1, N)}, N)


def u_element(N, power=1):
    """U^power for power >= 1, (U*)^(-power) for power <= -1."""
    if power == 0:
        return identity_element(N)
    return UnilateralElement({power: ep_constant(1, N)}, N)


def ustar_element(N):
    return u_element(N, -1)


def diag_element(a):
    """a(K) for an EPSequence a."""
    return UnilateralElement({0: a}, a.N)


def p0_element(N):
    """The rank-one projection onto E_0."""
    return UnilateralElement({0: EPSequence({0: 1}, [0], N)}, N)


def matrix_unit_compact(r, s, N):
    """U^r P_0 (U*)^s: the rank-one matrix unit E_rs, built directly."""
    return UnilateralElement(
        {r - s: EPSequence({min(r, s): 1}, [0], N)}, N
    )


def scale(x, c):
    c = _coerce(c)
    if not c:
        return zero_element(x.N)
    return UnilateralElement(
        {n: ep_scale(a, c) for n, a in x.terms.items()}, x.N
    )


def multiply(x, y):
    """Normal form of the operator product."""
    return UnilateralElement(_terms_mul(x.terms, y.terms), x.N)


def adjoint(x):
    """The *-operation; coefficients conjugate with no index shift under
    the coefficient-left convention for negative degrees."""
    return UnilateralElement(
        {-n: ep_conjugate(a) for n, a in x.terms.items()}, x.N
    )


def commutator(x, y):
    return multiply(x, y) - multiply(y, x)


def spectral_component(x, n):
    """The single term of degree n (zero element if absent)."""
    a = x.terms.get(n)
    if a is None:
        return zero_element(x.N)
    return UnilateralElement({n: a}, x.N)


def is_compact(x):
    """True iff every coefficient is purely c00 (zero periodic part)."""
    return all(
        all(not v for v in a.table) for a in x.terms.values()
    )


def quotient(x):
    """Image in the quotient by the compacts, in the bilateral picture.

    Corrections die; a negative-degree coefficient is repositioned from
    the coefficient-left form a(K)(U*)^p to V^{-p} b(L) via a cyclic
    shift of its periodic table.
    """
    terms = {}
    for n, a in x.terms.items():
        f = LocallyConstantFunction(list(a.table), x.N)
        if f.is_zero():
            continue
        if n < 0:
            f = lcf_shift(f, n)
        terms[n] = f
    return BilateralElement(terms, x.N)


# ---------------------------------------------------------------------------
# bilateral elements


class BilateralElement:
    """Finite normal form sum V^n b_n(L) with locally constant b_n."""

    __slots__ = ("terms", "N")

    def __init__(self, terms, N):
        clean = {}
        for n, f in terms.items():
            if not isinstance(f, LocallyConstantFunction):
                raise TypeError("coefficients must be LocallyConstantFunction")
            if not f.is_zero():
                clean[int(n)] = f
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("BilateralElement is immutable")

    def coefficient(self, n):
        return self.terms.get(n)

    def degrees(self):
        return sorted(self.terms.keys())

    def max_abs_degree(self):
        return max((abs(n) for n in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BilateralElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        terms = dict(self.terms)
        for n, g in other.terms.items():
            if n in terms:
                from .profinite import lcf_add

                terms[n] = lcf_add(terms[n], g)
            else:
                terms[n] = g
        return BilateralElement(terms, self.N)

    def __sub__(self, other):
        return self + bilateral_scale(other, Scalar(-1))

    def __neg__(self):
        return bilateral_scale(self, Scalar(-1))

    def __mul__(self, other):
        if isinstance(other, BilateralElement):
            return bilateral_multiply(self, other)
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return bilateral_scale(self, c)

    def __rmul__(self, other):
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return bilateral_scale(self, c)

    def entry(self, i, j):
        """Exact matrix entry over Z: (i, j) with i = j + degree."""
        f = self.terms.get(i - j)
        if f is None:
            return _ZERO
        return f.value_at(j)

    def __repr__(self):
        if not self.terms:
            return "BilateralElement(0)"
        parts = [f"{n}: {self.terms[n]!r}" for n in self.degrees()]
        return "BilateralElement({" + ", ".join(parts) + "})"

    def to_json(self):
        return {"terms": {str(n): f.to_json() for n, f in self.terms.items()}}

    @classmethod
    def from_json(cls, data, N):
        return cls(
            {
                int(n): LocallyConstantFunction.from_json(f, N)
                for n, f in data.get("terms", {}).items()
            },
            N,
        )


def bilateral_zero(N):
    return BilateralElement({}, N)


def bilateral_identity(N):
    return BilateralElement(
        {0: LocallyConstantFunction([Scalar(1)], N)}, N
    )


def v_element(N, power=1):
    if power == 0:
        return bilateral_identity(N)
    return BilateralElement(
        {power: LocallyConstantFunction([Scalar(1)], N)}, N
    )


def bilateral_diag(f):
    return BilateralElement({0: f}, f.N)


def bilateral_scale(x, c):
    c = _coerce(c)
    if not c:
        return bilateral_zero(x.N)
    from .profinite import lcf_scale

    return BilateralElement(
        {n: lcf_scale(f, c) for n, f in x.terms.items()}, x.N
    )


def bilateral_multiply(x, y):
    """V^m f(L) V^n g(L) = V^{m+n} f(L+n) g(L); V is invertible so no
    projection corrections arise."""
    from .profinite import lcf_add, lcf_mul

    out = {}
    for m, f in x.terms.items():
        for n, g in y.terms.items():
            coeff = lcf_mul(lcf_shift(f, n), g)
            deg = m + n
            out[deg] = lcf_add(out[deg], coeff) if deg in out else coeff
    return BilateralElement(out, x.N)


def bilateral_adjoint(x):
    return BilateralElement(
        {-n: lcf_shift(lcf_conjugate(f), -n) for n, f in x.terms.items()},
        x.N,
    )


def bilateral_commutator(x, y):
    return bilateral_multiply(x, y) - bilateral_multiply(y, x)


def bilateral_spectral_component(x, n):
    f = x.terms.get(n)
    if f is None:
        return bilateral_zero(x.N)
    return BilateralElement({n: f}, x.N)


def expectation(b):
    """The degree-0 coefficient, as a locally constant function."""
    f = b.terms.get(0)
    if f is None:
        return LocallyConstantFunction([Scalar(0)], b.N)
    return f


def toeplitz(b):
    """Compression T(b) = P b P to the nonnegative coordinates.

    T(V^n c(L)) = U^n (c restricted) for n >= 0; for n = -p < 0 the
    degree -p coefficient is k |-> c(k+p).
    """
    terms = {}
    for n, f in b.terms.items():
        if n >= 0:
            terms[n] = ep_from_lcf(f)
        else:
            terms[n] = ep_from_lcf(lcf_shift(f, -n))
    return UnilateralElement(terms, b.N)


def mult_defect(b1, b2):
    """T(b1 b2) - T(b1)T(b2); always compact."""
    return toeplitz(bilateral_multiply(b1, b2)) - multiply(
        toeplitz(b1), toeplitz(b2)
    )


def residue_indicator(r, N_int, N):
    """The locally constant indicator of the class l = r mod N_int."""
    values = [Scalar(1 if k == r % N_int else 0) for k in range(N_int)]
    return LocallyConstantFunction(values, N)


def matrix_units(N):
    """All P_sr = V^s e_N(L) V^{-r} for finite N, keyed by (s, r)."""
    if not N.is_finite():
        raise NotFinite("matrix units need a finite N")
    N_int = N.as_int()
    units = {}
    for s in range(N_int):
        for r in range(N_int):
            units[(s, r)] = BilateralElement(
                {s - r: residue_indicator(r, N_int, N)}, N
            )
    return units


# ---------------------------------------------------------------------------
# matrix trigonometric polynomials (finite N picture)


class MatrixTrigPoly:
    """N x N matrix of Laurent polynomials in one unimodular variable z,
    with z standing for V^N."""

    __slots__ = ("size", "entries")

    def __init__(self, size, entries):
        if len(entries) != size or any(len(row) != size for row in entries):
            raise ValueError(f"entries must form a {size}x{size} array")
        clean = []
        for row in entries:
            clean_row = []
            for poly in row:
                p = {}
                for k, v in poly.items():
                    v = _coerce(v)
                    if v:
                        p[int(k)] = v
                clean_row.append(p)
            clean.append(tuple(clean_row))
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "entries", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("MatrixTrigPoly is immutable")

    @classmethod
    def zero(cls, size):
        return cls(size, [[{} for _ in range(size)] for _ in range(size)])

    @classmethod
    def constant(cls, matrix):
        """From a square array of scalars."""
        size = len(matrix)
        return cls(
            size,
            [
                [({0: v} if _coerce(v) else {}) for v in row]
                for row in matrix
            ],
        )

    def is_zero(self):
        return all(not p for row in self.entries for p in row)

    def __eq__(self, other):
        if not isinstance(other, MatrixTrigPoly):
            return NotImplemented
        return self.size == other.size and self.entries == other.entries

    def __add__(self, other):
        if self.size != other.size:
            raise ValueError("size mismatch")
        out = []
        for r1, r2 in zip(self.entries, other.entries):
            row = []
            for p1, p2 in zip(r1, r2):
                p = dict(p1)
                for k, v in p2.items():
                    p[k] = p.get(k, _ZERO) + v
                row.append(p)
            out.append(row)
        return MatrixTrigPoly(self.size, out)

    def __sub__(self, other):
        return self + other.scale(Scalar(-1))

    def scale(self, c):
        c = _coerce(c)
        return MatrixTrigPoly(
            self.size,
            [
                [{k: c * v for k, v in p.items()} for p in row]
                for row in self.entries
            ],
        )

    def __mul__(self, other):
        if not isinstance(other, MatrixTrigPoly):
            c = as_scalar(other)
            if c is NotImplemented:
                return NotImplemented
            return self.scale(c)
        if self.size != other.size:
            raise ValueError("size mismatch")
        n = self.size
        out = [[{} for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = out[i][j]
                for t in range(n):
                    p, q = self.entries[i][t], other.entries[t][j]
                    for k1, v1 in p.items():
                        for k2, v2 in q.items():
                            k = k1 + k2
                            acc[k] = acc.get(k, _ZERO) + v1 * v2
        return MatrixTrigPoly(n, out)

    def __rmul__(self, other):
        c = as_scalar(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c)

    def conjugate_transpose(self):
        n = self.size
        out = [[{} for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                out[j][i] = {
                    -k: v.conjugate() for k, v in self.entries[i][j].items()
                }
        return MatrixTrigPoly(n, out)

    def eval_at(self, z):
        """Float evaluation at a complex number z (|z| = 1 intended);
        returns a nested list of complex values."""
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                val = 0j
                for k, v in sorted(self.entries[i][j].items()):
                    val += complex(v) * z**k
                row.append(val)
            out.append(row)
        return out

    def __repr__(self):
        return f"MatrixTrigPoly(size={self.size})"

    def to_json(self):
        return {
            "size": self.size,
            "entries": [
                [
                    {str(k): v.to_json() for k, v in p.items()}
                    for p in row
                ]
                for row in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["size"],
            [
                [
                    {int(k): Scalar.from_json(v) for k, v in p.items()}
                    for p in row
                ]
                for row in data["entries"]
            ],
        )


def to_matrix_form(b, N):
    """Relabel E_{kN+j} as (z^k, basis j): the monomial V^n c(L) puts
    c(j) * z^((j+n-j')/N) at entry (j', j) with j' = (j+n) mod N."""
    if not N.is_finite():
        raise NotFinite("matrix form needs a finite N")
    N_int = N.as_int()
    out = [[{} for _ in range(N_int)] for _ in range(N_int)]
    for n, f in b.terms.items():
        for j in range(N_int):
            val = f.value_at(j)
            if not val:
                continue
            jp = (j + n) % N_int
            w = (j + n - jp) // N_int
            acc = out[jp][j]
            acc[w] = acc.get(w, _ZERO) + val
    return MatrixTrigPoly(N_int, out)


def from_matrix_form(F, N):
    """Inverse of to_matrix_form."""
    if not N.is_finite():
        raise NotFinite("matrix form needs a finite N")
    N_int = N.as_int()
    if F.size != N_int:
        raise ValueError(f"matrix size {F.size} does not match N = {N_int}")
    from .profinite import lcf_add, lcf_scale

    terms = {}
    for jp in range(N_int):
        for j in range(N_int):
            for w, val in F.entries[jp][j].items():
                n = jp - j + w * N_int
                contrib = lcf_scale(residue_indicator(j, N_int, N), val)
                if n in terms:
                    terms[n] = lcf_add(terms[n], contrib)
                else:
                    terms[n] = contrib
    return BilateralElement(terms, N)
