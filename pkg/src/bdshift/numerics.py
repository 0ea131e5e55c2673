"""Finite truncations and floating-point diagnostics.

Two arithmetic paths: exact rationals certify symbolic identities on an
interior window, floats handle norms and spectra.  The exact path is
authoritative; every float appears only in bounds and reports.
"""

import cmath
import math

import numpy as np

from .scalars import Scalar
from .errors import NoConvergence, NotFinite, WindowTooSmall
from .algebra import multiply, to_matrix_form


def truncate_unilateral(a, M):
    """The M x M compression to span{E_0, ..., E_{M-1}} as floats."""
    if M < 1:
        raise ValueError("window must contain at least one basis vector")
    out = np.zeros((M, M), dtype=complex)
    for n, coeff in a.terms.items():
        for k in range(M):
            i, j = (k + n, k) if n >= 0 else (k, k - n)
            if i < M and j < M:
                out[i, j] = complex(coeff.value_at(k))
    return out


def truncate_exact(a, M):
    """The same compression with exact entries, as {(i, j): Scalar}."""
    if M < 1:
        raise ValueError("window must contain at least one basis vector")
    out = {}
    for n, coeff in a.terms.items():
        for k in range(M):
            i, j = (k + n, k) if n >= 0 else (k, k - n)
            if i < M and j < M:
                v = coeff.value_at(k)
                if (i, j) in out:
                    v = out[(i, j)] + v
                if v:
                    out[(i, j)] = v
                elif (i, j) in out:
                    del out[(i, j)]
    return out


def _sparse_mul(A, B):
    rows = {}
    for (k, j), v in B.items():
        rows.setdefault(k, []).append((j, v))
    out = {}
    for (i, k), u in A.items():
        for j, v in rows.get(k, ()):
            key = (i, j)
            w = out.get(key)
            w = u * v if w is None else w + u * v
            if w:
                out[key] = w
            elif key in out:
                del out[key]
    return out


class TruncationReport:
    """Outcome of an interior-window product comparison."""

    __slots__ = ("M", "margin", "max_dev", "verdict")

    def __init__(self, M, margin, max_dev, verdict):
        self.M = M
        self.margin = margin
        self.max_dev = max_dev
        self.verdict = verdict

    def to_json(self):
        return {
            "M": self.M,
            "margin": self.margin,
            "max_dev": self.max_dev,
            "verdict": self.verdict,
        }

    def __repr__(self):
        return (
            f"TruncationReport(M={self.M}, margin={self.margin}, "
            f"max_dev={self.max_dev}, verdict={self.verdict!r})"
        )


def oracle_product_check(a, b, M):
    """Compare truncate(a b) with truncate(a) truncate(b) away from the
    boundary.  The exact path must match identically; the float path is
    reported as a deviation."""
    margin = a.max_abs_degree() + b.max_abs_degree()
    if M <= 2 * margin:
        raise WindowTooSmall(
            f"window {M} cannot isolate an interior for margin {margin}"
        )
    cut = M - margin

    exact_prod = truncate_exact(multiply(a, b), M)
    exact_split = _sparse_mul(truncate_exact(a, M), truncate_exact(b, M))
    keys = set(exact_prod) | set(exact_split)
    exact_ok = True
    for i, j in keys:
        if i < cut and j < cut:
            if exact_prod.get((i, j), Scalar(0)) != exact_split.get(
                (i, j), Scalar(0)
            ):
                exact_ok = False

    fa = truncate_unilateral(a, M)
    fb = truncate_unilateral(b, M)
    fprod = truncate_unilateral(multiply(a, b), M)
    dev = np.abs((fa @ fb)[:cut, :cut] - fprod[:cut, :cut])
    scalefac = max(1.0, float(np.abs(fprod).max()))
    max_dev = float(dev.max()) / scalefac if dev.size else 0.0

    verdict = "exact" if exact_ok and max_dev <= 1e-12 else "mismatch"
    return TruncationReport(M, margin, max_dev, verdict)


def norm_lower(a, M, tol=1e-10, cap=10000, seed=20240117, strict=True):
    """Largest singular value of the M x M truncation, by power
    iteration on the Gram matrix.  A lower bound for the operator norm,
    monotone nondecreasing in M.

    With strict=False a stalled iteration returns its last Rayleigh
    iterate (still a lower bound) instead of raising."""
    A = truncate_unilateral(a, M)
    return _top_singular_value(A, tol, cap, seed, strict)


def _top_singular_value(A, tol=1e-10, cap=10000, seed=20240117, strict=True):
    M = A.shape[0]
    gram = A.conj().T @ A
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    v /= np.linalg.norm(v)
    lam = 0.0
    for it in range(cap):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(np.real(np.vdot(v, gram @ v)))
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return math.sqrt(max(new, 0.0))
        lam = new
    if strict:
        raise NoConvergence(
            "power iteration did not settle",
            last_value=math.sqrt(max(lam, 0.0)),
            iterations=cap,
        )
    return math.sqrt(max(lam, 0.0))


def rho_theta(a, theta, M):
    """The gauge action on the truncation: conjugation by
    diag(e^{ik theta}), which phase-weights the degree-n block by
    e^{in theta}."""
    A = truncate_unilateral(a, M)
    phases = np.exp(1j * theta * np.arange(M))
    return (phases[:, None] * A) * np.conj(phases)[None, :]


def quotient_norm_estimate(b, N, G):
    """Max over a uniform G-grid on the circle of the spectral norm of
    the matrix form; a lower bound for the quotient norm."""
    if not N.is_finite():
        raise NotFinite("the matrix picture needs a finite N")
    if G < 1:
        raise ValueError("grid needs at least one node")
    F = to_matrix_form(b, N)
    best = 0.0
    for m in range(G):
        z = cmath.exp(2j * math.pi * m / G)
        A = np.array(F.eval_at(z), dtype=complex)
        best = max(best, float(np.linalg.norm(A, 2)))
    return best


def quotient_norm_report(b, N, G, rounds=3):
    """Grid-refinement log for the quotient norm estimate."""
    grids = []
    values = []
    g = G
    for _ in range(max(1, rounds)):
        grids.append(g)
        values.append(quotient_norm_estimate(b, N, g))
        g *= 2
    return {"grid": grids, "value": values, "final": values[-1]}


def write_matrix_csv(A, fh):
    """Dump the nonzero entries as `row,col,re,im` lines; returns the
    number of entries written."""
    fh.write("row,col,re,im\n")
    rows, cols = A.shape
    count = 0
    for i in range(rows):
        for j in range(cols):
            v = A[i, j]
            if v != 0:
                fh.write(f"{i},{j},{float(v.real)!r},{float(v.imag)!r}\n")
                count += 1
    return count
