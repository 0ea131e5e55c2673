"""Supernatural numbers, divisor chains, truncated profinite integers,
and locally constant functions on Z/NZ with Haar integration.

A supernatural number is a formal product of primes with exponents in
{1, 2, ..., infinity}; only finitely many primes carry a nonzero exponent
here (every computation touches a finite divisor chain anyway).  Elements
of Z/NZ are represented by compatible residue lists along an explicit,
caller-chosen divisor chain.
"""

import math

from .errors import PeriodNotDivisor, NotFinite, LevelMismatch
from .scalars import Scalar, as_scalar

INF = math.inf


def _factorize(n):
    """Prime factorization of a positive integer by trial division."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    factors = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


class SupernaturalNumber:
    """Formal product of primes with exponents in {1, 2, ...} or infinity."""

    __slots__ = ("factors",)

    def __init__(self, factors=None):
        clean = {}
        for p, e in (factors or {}).items():
            p = int(p)
            if p < 2 or _factorize(p) != {p: 1}:
                raise ValueError(f"{p} is not prime")
            if e == INF or e == "inf":
                clean[p] = INF
            else:
                e = int(e)
                if e < 1:
                    raise ValueError(f"exponent must be positive, got {e}")
                clean[p] = e
        object.__setattr__(self, "factors", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("SupernaturalNumber is immutable")

    @classmethod
    def from_int(cls, n):
        return cls(_factorize(n)) if n > 1 else cls({})

    def is_finite(self):
        return all(e != INF for e in self.factors.values())

    def as_int(self):
        if not self.is_finite():
            raise NotFinite("infinite supernatural number has no integer value")
        n = 1
        for p, e in self.factors.items():
            n *= p ** e
        return n

    def exponent(self, p):
        return self.factors.get(p, 0)

    def __eq__(self, other):
        if not isinstance(other, SupernaturalNumber):
            return NotImplemented
        return self.factors == other.factors

    def __hash__(self):
        return hash(tuple(self.factors.items()))

    def __repr__(self):
        if not self.factors:
            return "SupernaturalNumber(1)"
        parts = [
            f"{p}^{'inf' if e == INF else e}" for p, e in self.factors.items()
        ]
        return "SupernaturalNumber(" + "*".join(parts) + ")"

    def to_json(self):
        return {
            "factors": {
                str(p): ("inf" if e == INF else e)
                for p, e in self.factors.items()
            }
        }

    @classmethod
    def from_json(cls, data):
        return cls(data.get("factors", {}))


def divides(j, N):
    """True iff every prime power in j is bounded by N's exponent."""
    if j < 1:
        raise ValueError(f"expected a positive integer, got {j}")
    for p, e in _factorize(j).items():
        if e > N.exponent(p):
            return False
    return True


def finite_divisors(N, bound):
    """All positive integers j <= bound dividing N, ascending."""
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    return [j for j in range(1, bound + 1) if divides(j, N)]


class DivisorChain:
    """Ascending levels j_1 | j_2 | ... | j_m, each dividing N."""

    __slots__ = ("levels", "N")

    def __init__(self, levels, N):
        levels = [int(j) for j in levels]
        if not levels:
            raise ValueError("divisor chain needs at least one level")
        for j in levels:
            if j < 1:
                raise ValueError(f"levels must be positive, got {j}")
            if not divides(j, N):
                raise PeriodNotDivisor(f"level {j} does not divide N")
        for a, b in zip(levels, levels[1:]):
            if b % a != 0:
                raise ValueError(f"chain level {a} does not divide {b}")
        object.__setattr__(self, "levels", tuple(levels))
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("DivisorChain is immutable")

    def top(self):
        return self.levels[-1]

    def __eq__(self, other):
        if not isinstance(other, DivisorChain):
            return NotImplemented
        return self.levels == other.levels and self.N == other.N

    def __hash__(self):
        return hash((self.levels, self.N))

    def __repr__(self):
        return f"DivisorChain({list(self.levels)})"

    def to_json(self):
        return {"levels": list(self.levels)}

    @classmethod
    def from_json(cls, data, N):
        return cls(data["levels"], N)


class ProfiniteInteger:
    """Compatible residues x_i mod j_i along a divisor chain."""

    __slots__ = ("chain", "residues")

    def __init__(self, chain, residues):
        residues = [int(x) for x in residues]
        if len(residues) != len(chain.levels):
            raise ValueError("one residue per chain level required")
        for x, j in zip(residues, chain.levels):
            if not 0 <= x < j:
                raise ValueError(f"residue {x} out of range for level {j}")
        for (x1, j1), x2 in zip(zip(residues, chain.levels), residues[1:]):
            if x2 % j1 != x1:
                raise ValueError(
                    f"incompatible residues: {x2} mod {j1} != {x1}"
                )
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "residues", tuple(residues))

    def __setattr__(self, name, value):
        raise AttributeError("ProfiniteInteger is immutable")

    def residue_at_level(self, j):
        for level, x in zip(self.chain.levels, self.residues):
            if level % j == 0:
                return x % j
        raise LevelMismatch(f"no chain level divisible by {j}")

    def _binop(self, other, op):
        if not isinstance(other, ProfiniteInteger):
            return NotImplemented
        if self.chain != other.chain:
            raise LevelMismatch("profinite integers live on different chains")
        return ProfiniteInteger(
            self.chain,
            [op(a, b) % j
             for a, b, j in zip(self.residues, other.residues,
                                self.chain.levels)],
        )

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    def __neg__(self):
        return ProfiniteInteger(
            self.chain,
            [(-x) % j for x, j in zip(self.residues, self.chain.levels)],
        )

    def __eq__(self, other):
        if not isinstance(other, ProfiniteInteger):
            return NotImplemented
        return self.chain == other.chain and self.residues == other.residues

    def __hash__(self):
        return hash((self.chain, self.residues))

    def __repr__(self):
        return f"ProfiniteInteger({list(self.residues)} on {list(self.chain.levels)})"


def q_map(x, chain):
    """The truncation q(x) = {x mod j_i} of an ordinary integer."""
    return ProfiniteInteger(chain, [x % j for j in chain.levels])


def _minimal_period(values):
    """Shortest cyclic period of a value table."""
    j = len(values)
    for d in range(1, j + 1):
        if j % d != 0:
            continue
        if all(values[r] == values[r % d] for r in range(j)):
            return values[:d]
    return values


class LocallyConstantFunction:
    """Function on Z/NZ factoring through Z/jZ for a finite divisor j of N.

    Canonical form uses the minimal period.  Value at the residue class
    of k is values[k mod j].
    """

    __slots__ = ("period", "values", "N")

    def __init__(self, values, N):
        values = [v if isinstance(v, Scalar) else _coerce(v) for v in values]
        if not values:
            raise ValueError("value table must be nonempty")
        if not divides(len(values), N):
            raise PeriodNotDivisor(
                f"period {len(values)} does not divide N"
            )
        values = _minimal_period(values)
        object.__setattr__(self, "period", len(values))
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("LocallyConstantFunction is immutable")

    def value_at(self, k):
        """Value on the residue class of the integer k."""
        return self.values[k % self.period]

    def value_at_profinite(self, x):
        return self.values[x.residue_at_level(self.period)]

    def is_zero(self):
        return all(not v for v in self.values)

    def __eq__(self, other):
        if not isinstance(other, LocallyConstantFunction):
            return NotImplemented
        return self.period == other.period and self.values == other.values

    def __hash__(self):
        return hash((self.period, self.values))

    def __repr__(self):
        return f"LCF(period={self.period}, values={[str(v) for v in self.values]})"

    def to_json(self):
        return {
            "period": self.period,
            "values": [v.to_json() for v in self.values],
        }

    @classmethod
    def from_json(cls, data, N):
        return cls([Scalar.from_json(v) for v in data["values"]], N)


def _coerce(v):
    s = as_scalar(v)
    if s is NotImplemented:
        raise TypeError(f"cannot use {type(v).__name__} as a scalar value")
    return s


def lcf_from_periodic(values, N):
    """The unique locally constant function whose pullback is the table."""
    return LocallyConstantFunction(values, N)


def pullback_sequence(f):
    """One period of the j-periodic sequence a_f(k) = f(q(k))."""
    return list(f.values)


def haar_integral(f):
    """Average of the value table over one period."""
    total = Scalar(0)
    for v in f.values:
        total = total + v
    return total / Scalar(f.period)


def lcf_shift(f, t):
    """g with g(x) = f(x + t); cyclic rotation of the value table."""
    j = f.period
    return LocallyConstantFunction(
        [f.values[(r + t) % j] for r in range(j)], f.N
    )


def _lift(f, j):
    """Value table of f lifted to period j (f.period must divide j)."""
    return [f.values[r % f.period] for r in range(j)]


def lcf_add(f, g):
    return _pointwise(f, g, lambda a, b: a + b)


def lcf_mul(f, g):
    return _pointwise(f, g, lambda a, b: a * b)


def _pointwise(f, g, op):
    j = math.lcm(f.period, g.period)
    N = f.N
    if not divides(j, N):
        raise PeriodNotDivisor(f"lcm period {j} does not divide N")
    fa, ga = _lift(f, j), _lift(g, j)
    return LocallyConstantFunction([op(a, b) for a, b in zip(fa, ga)], N)


def lcf_scale(f, c):
    c = _coerce(c)
    return LocallyConstantFunction([c * v for v in f.values], f.N)


def lcf_conjugate(f):
    return LocallyConstantFunction([v.conjugate() for v in f.values], f.N)


def lcf_constant(c, N):
    return LocallyConstantFunction([_coerce(c)], N)
