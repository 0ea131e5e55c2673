"""bdshift command line: every pipeline behind one entry point.

Every command prints machine-readable JSON on stdout; diagnostics go to
stderr.  Exit codes: 0 success, 1 usage, 2 parse error, 3 math-domain
error, 4 numeric non-convergence.
"""

import argparse
import json
import math
import sys

from .scalars import Scalar
from .errors import (
    ExprSyntaxError,
    LevelMismatch,
    MathDomainError,
    NoConvergence,
    UnknownName,
    WindowTooSmall,
)
from .profinite import SupernaturalNumber, LocallyConstantFunction
from . import algebra, derivations, gns, numerics
from .parser import parse, eval_ast, parse_gaussian
from .serialize import Workspace, load_workspace

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NONCONVERGENCE = 4


def _emit(payload):
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _env(args):
    if getattr(args, "workspace", None):
        return load_workspace(args.workspace)
    return Workspace(SupernaturalNumber({}))


def _eval(args, env, text):
    return eval_ast(parse(text), env, args.side)


def _derivation(args, env):
    d = env.derivations.get(args.derivation)
    if d is None:
        raise UnknownName(f"no derivation named {args.derivation!r}")
    return d


def _laurent(args, env):
    f = env.laurent.get(args.laurent)
    if f is None:
        raise UnknownName(f"no Laurent function named {args.laurent!r}")
    return f


def _component_json(comp):
    return {
        "n": comp.n,
        "linear": comp.beta.linear.to_json(),
        "ep": comp.beta.ep.to_json(),
    }


def _implementation(args, env):
    d = _derivation(args, env)
    quotient = derivations.quotient_derivation(d)
    comp = quotient.get(args.n)
    if comp is None:
        comp = derivations.bilateral_zero_component(args.n, env.N)
    psi = None
    if getattr(args, "psi", None):
        psi = env.sequences.get(args.psi)
        if not isinstance(psi, LocallyConstantFunction):
            raise UnknownName(f"no locally constant function {args.psi!r}")
    c = parse_gaussian(args.c) if getattr(args, "c", None) else None
    level = getattr(args, "level", None)
    return gns.implementation_from_bilateral(comp, psi=psi, c=c, level=level)


def _build_D(data, space, M, exact=False):
    if space == "tau0":
        return (gns.build_D_tau0_exact if exact else gns.build_D_tau0)(
            data, M
        )
    return (gns.build_D_haar_exact if exact else gns.build_D_haar)(data, M)


def _matrix_out(A, args, extra):
    payload = dict(extra)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            nnz = numerics.write_matrix_csv(A, fh)
        payload["out"] = args.out
        payload["nnz"] = nnz
    else:
        entries = []
        rows, cols = A.shape
        for i in range(rows):
            for j in range(cols):
                v = A[i, j]
                if v != 0:
                    entries.append([i, j, float(v.real), float(v.imag)])
        payload["entries"] = entries
    return payload


# ---------------------------------------------------------------------------
# command handlers


def cmd_normalize(args):
    env = _env(args)
    _emit(_eval(args, env, args.expr).to_json())


def cmd_mul(args):
    env = _env(args)
    a = _eval(args, env, args.left)
    b = _eval(args, env, args.right)
    _emit((a * b).to_json())


def cmd_comm(args):
    env = _env(args)
    a = _eval(args, env, args.left)
    b = _eval(args, env, args.right)
    _emit((a * b - b * a).to_json())


def cmd_derive(args):
    env = _env(args)
    d = _derivation(args, env)
    x = _eval(args, env, args.expr)
    if args.side == "unilateral":
        _emit(derivations.apply(d, x).to_json())
    else:
        comps = derivations.quotient_derivation(d)
        _emit(derivations.bilateral_apply(comps, x).to_json())


def cmd_fourier(args):
    env = _env(args)
    d = _derivation(args, env)
    _emit(_component_json(derivations.fourier_component(d, args.n)))


def cmd_fejer(args):
    env = _env(args)
    d = _derivation(args, env)
    _emit(derivations.fejer_mean(d, args.m).to_json())


def cmd_classify(args):
    env = _env(args)
    d = _derivation(args, env)
    parts = derivations.classify(derivations.fourier_component(d, args.n))
    _emit({
        "C_n": parts["C_n"].to_json(),
        "inner_per": _component_json(parts["inner_per"]),
        "approx_c00": _component_json(parts["approx_c00"]),
    })


def cmd_extract_f(args):
    env = _env(args)
    d = _derivation(args, env)
    _emit(derivations.extract_f(d, env.N).to_json())


def cmd_df_build(args):
    env = _env(args)
    _emit(derivations.d_f_build(_laurent(args, env), env.N).to_json())


def cmd_toeplitz(args):
    env = _env(args)
    _emit(algebra.toeplitz(_eval(args, env, args.expr)).to_json())


def cmd_defect(args):
    env = _env(args)
    b1 = _eval(args, env, args.left)
    b2 = _eval(args, env, args.right)
    defect = algebra.mult_defect(b1, b2)
    _emit({
        "defect": defect.to_json(),
        "compact": algebra.is_compact(defect),
    })


def cmd_matrix_form(args):
    env = _env(args)
    F = algebra.to_matrix_form(_eval(args, env, args.expr), env.N)
    _emit(F.to_json())


def cmd_units(args):
    env = _env(args)
    units = algebra.matrix_units(env.N)
    _emit({
        "size": env.N.as_int(),
        "units": {
            f"{s},{r}": u.to_json() for (s, r), u in sorted(units.items())
        },
    })


def cmd_gns_rep(args):
    env = _env(args)
    b = _eval(args, env, args.expr)
    if args.state == "tau0":
        vec = gns.pi0_apply(b, gns.GNSVector0({0: Scalar(1)}))
        _emit({
            "tau": gns.tau0(b).to_json(),
            "vector": {
                "coeffs": {str(l): c.to_json()
                           for l, c in sorted(vec.coeffs.items())}
            },
        })
    else:
        level = args.level
        if level is None:
            if not env.N.is_finite():
                raise LevelMismatch("infinite N needs an explicit --level")
            level = env.N.as_int()
        vec = gns.pi_haar_apply(b, gns.chi0(level))
        _emit({
            "tau": gns.tau_haar(b).to_json(),
            "level": level,
            "vector": {
                "coeffs": {f"{m},{x}": c.to_json()
                           for (m, x), c in sorted(vec.coeffs.items())}
            },
        })


def cmd_gns_d(args):
    env = _env(args)
    data = _implementation(args, env)
    D = _build_D(data, args.space, args.m)
    _emit(_matrix_out(D, args, {
        "space": args.space,
        "n": data.n,
        "case": data.case,
        "level": data.level,
        "size": D.shape[0],
    }))


def cmd_covcheck(args):
    env = _env(args)
    data = _implementation(args, env)
    D = _build_D(data, args.space, args.m)
    thetas = [2 * math.pi * k / args.grid for k in range(args.grid)]
    residual = gns.check_covariance(D, data.n, args.m, thetas)
    _emit({
        "space": args.space,
        "n": data.n,
        "M": args.m,
        "grid": args.grid,
        "residual": residual,
    })


def cmd_parametrix(args):
    env = _env(args)
    data = _implementation(args, env)
    Ms = [int(s) for s in args.mlist.split(",") if s]
    _emit(gns.parametrix_report(data, Ms, space=args.space))


def cmd_truncate(args):
    env = _env(args)
    a = _eval(args, env, args.expr)
    A = numerics.truncate_unilateral(a, args.m)
    _emit(_matrix_out(A, args, {"M": args.m}))


def cmd_normest(args):
    env = _env(args)
    a = _eval(args, env, args.expr)
    value = numerics.norm_lower(a, args.m, cap=args.cap)
    _emit({"M": args.m, "value": value})


def cmd_qnorm(args):
    env = _env(args)
    b = _eval(args, env, args.expr)
    _emit(numerics.quotient_norm_report(b, env.N, args.grid,
                                        rounds=args.rounds))


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser():
    top = argparse.ArgumentParser(
        prog="bdshift",
        description="exact shift-algebra computations and reports",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, handler, *, expr=0, side=None, derivation=False,
            n=False, m=None, out=False):
        p = sub.add_parser(name)
        p.add_argument("--workspace", default=None)
        if expr == 1:
            p.add_argument("expr")
        elif expr == 2:
            p.add_argument("left")
            p.add_argument("right")
        if side:
            p.add_argument("--side", default=side,
                           choices=("unilateral", "bilateral"))
        if derivation:
            p.add_argument("--derivation", required=True)
        if n:
            p.add_argument("--n", type=int, required=True)
        if m is not None:
            p.add_argument("--m", type=int, default=m)
        if out:
            p.add_argument("--out", default=None)
        p.set_defaults(handler=handler)
        return p

    add("normalize", cmd_normalize, expr=1, side="unilateral")
    add("mul", cmd_mul, expr=2, side="unilateral")
    add("comm", cmd_comm, expr=2, side="unilateral")
    add("derive", cmd_derive, expr=1, side="unilateral", derivation=True)
    add("fourier", cmd_fourier, derivation=True, n=True)
    add("fejer", cmd_fejer, derivation=True, m=16)
    add("classify", cmd_classify, derivation=True, n=True)
    add("extract-f", cmd_extract_f, derivation=True)
    p = add("df-build", cmd_df_build)
    p.add_argument("--laurent", required=True)
    add("toeplitz", cmd_toeplitz, expr=1, side="bilateral")
    add("defect", cmd_defect, expr=2, side="bilateral")
    add("matrix-form", cmd_matrix_form, expr=1, side="bilateral")
    add("units", cmd_units)

    p = add("gns-rep", cmd_gns_rep, expr=1, side="bilateral")
    p.add_argument("--state", default="tau0", choices=("tau0", "haar"))
    p.add_argument("--level", type=int, default=None)

    def gns_flags(p):
        p.add_argument("--space", default="tau0", choices=("tau0", "haar"))
        p.add_argument("--psi", default=None)
        p.add_argument("--c", default=None)
        p.add_argument("--level", type=int, default=None)

    p = add("gns-d", cmd_gns_d, derivation=True, n=True, m=16, out=True)
    gns_flags(p)
    p = add("covcheck", cmd_covcheck, derivation=True, n=True, m=16)
    gns_flags(p)
    p.add_argument("--grid", type=int, default=16)
    p = add("parametrix", cmd_parametrix, derivation=True, n=True)
    gns_flags(p)
    p.add_argument("--mlist", default="16,32,64")

    add("truncate", cmd_truncate, expr=1, side="unilateral", m=64, out=True)
    p = add("normest", cmd_normest, expr=1, side="unilateral", m=64)
    p.add_argument("--cap", type=int, default=10000)
    p = add("qnorm", cmd_qnorm, expr=1, side="bilateral")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--rounds", type=int, default=3)
    return top


def main(argv=None):
    top = _build_parser()
    try:
        args = top.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        args.handler(args)
    except ExprSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnknownName as exc:
        print(f"unknown name: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (MathDomainError, WindowTooSmall) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError, KeyError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
