"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import expansion, monge_ampere, transforms
from .divisibility import DivisibilityError, obstruction_certificate
from .model_kernel import (
    DEFAULT_DMAX,
    DEFAULT_NTHETA,
    ConditioningError,
    KernelModel,
    fit_expansion,
    log_grid,
    monomial_kernel,
    monomial_series_model,
)
from .numerics import QuadratureError, QuadSpec
from .poly import (
    BiPoly,
    GaussianRational,
    ParseError,
    admissible_weight_check,
    monomial_weight,
    parse_poly,
    q_and_Q,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


# -- serialization ---------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def to_json_text(obj) -> str:
    """JSON with 17-significant-digit floats and insertion-ordered keys."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json_text(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json_text(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, GaussianRational):
        return to_json_text(obj.to_json())
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json_text([obj.real, obj.imag])
    return json.dumps(str(obj))


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v)).strip('"')
    if isinstance(v, (list, tuple, dict)):
        return to_json_text(v)
    return str(v)


def to_csv_text(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row[h]) for h in header])
    return buf.getvalue()


def emit(result: dict, fmt: str, rows: Optional[Sequence[dict]] = None) -> str:
    """Serialize a result; CSV uses ``rows`` when given, otherwise a single row."""
    if fmt == "json":
        return to_json_text(result) + "\n"
    if fmt == "csv":
        return to_csv_text(rows if rows is not None else [result])
    raise UsageError(f"unknown format {fmt!r}")


# -- argument parsing ---------------------------------------------------------------

def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise UsageError(f"malformed point {text!r}") from exc


def _parse_exact_point(text: str) -> Optional[GaussianRational]:
    try:
        re_s, im_s = text.split(",")
        return GaussianRational(Fraction(re_s.strip()), Fraction(im_s.strip()))
    except (ValueError, ZeroDivisionError):
        return None


def _points(text: Optional[str], default: Optional[str] = None) -> List[str]:
    text = text if text is not None else default
    if text is None:
        raise UsageError("--at is required")
    return [s for s in text.split(";") if s.strip()]


def _int_pair(text: str, name: str):
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{name} expects two integers 'a,b'") from exc
    return a, b


def _monomial(text: str):
    try:
        c_s, r_s = text.split(",")
        c, r = Fraction(c_s.strip()), int(r_s)
    except ValueError as exc:
        raise UsageError("--monomial expects 'c,r'") from exc
    if c <= 0 or r < 2 or r % 2:
        raise UsageError("--monomial needs c > 0 and even r >= 2")
    return c, r


def _weight(args) -> BiPoly:
    if args.weight is not None:
        return parse_poly(args.weight)
    if args.monomial is not None:
        c, r = _monomial(args.monomial)
        return monomial_weight(c, r)
    raise UsageError("--weight or --monomial is required")


def _model_weight(args) -> BiPoly:
    """Weight for numeric kernels; must satisfy the model hypotheses."""
    p = _weight(args)
    report = admissible_weight_check(p)
    if not report.admissible:
        failed = [k for k, v in report.as_dict().items() if v is False and k != "admissible"]
        raise UsageError(f"weight is not an admissible model weight ({', '.join(failed)})")
    return p


def _tgrid(text: Optional[str]):
    if text is None:
        return 20.0, 200.0, 12
    try:
        lo, hi, n = text.split(",")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise UsageError("--tgrid expects MIN,MAX,COUNT") from exc
    if not (0 < lo < hi) or n < 2:
        raise UsageError("--tgrid needs 0 < MIN < MAX and COUNT >= 2")
    return lo, hi, n


def _spec(args) -> QuadSpec:
    return QuadSpec(abs_tol=args.quad_tol)


# -- subcommands -----------------------------------------------------------------

def cmd_coeffs(args):
    if args.weight is None and args.monomial is None:
        raise UsageError("--weight or --monomial is required")
    p = _weight(args)
    c = expansion.b_coeffs(p)
    out = {
        "weight": str(p),
        "q": c.q.to_json(),
        "Q": c.Q.to_json(),
        "b": [b.to_json() for b in c.as_list()],
        "values": [],
    }
    rows = []
    for pt in _points(args.at, default=None) if args.at else []:
        z = _parse_complex(pt)
        vals = expansion.eval_b(c, z)
        entry = {"at": [z.real, z.imag], "b": [[v.real, v.imag] for v in vals]}
        exact = _parse_exact_point(pt)
        if exact is not None:
            entry["b_exact"] = [b.eval_exact(exact, exact.conjugate()).to_json() for b in c.as_list()]
        out["values"].append(entry)
        row = {"re": z.real, "im": z.imag}
        for j, v in enumerate(vals):
            row[f"b{j}_re"] = v.real
            row[f"b{j}_im"] = v.imag
        rows.append(row)
    return out, rows or None


def cmd_kernel(args):
    pts = [_parse_complex(s) for s in _points(args.at, "0,0")]
    if len(pts) > 2:
        raise UsageError("--at takes one point z or two points z;w")
    z = pts[0]
    w = pts[1] if len(pts) == 2 else pts[0]
    deriv = _int_pair(args.deriv, "--deriv") if args.deriv else None
    if deriv is not None and len(pts) == 2:
        raise UsageError("--deriv applies to the diagonal; give one point")
    if args.monomial is not None and args.weight is None:
        c, r = _monomial(args.monomial)
        km = monomial_series_model(c, r, args.dmax)
        if deriv is None:
            value = monomial_kernel(float(c), r, z, w)
            method = "closed-form"
        else:
            value = km.diag_derivative(*deriv, z)
            method = "series"
    else:
        p = _model_weight(args)
        km = KernelModel(p, dmax=args.dmax, spec=_spec(args), ntheta=args.ntheta)
        value = km.diag_derivative(*deriv, z) if deriv else km.kernel_eval(z, w)
        method = "quadrature"
    value = complex(value)
    return {
        "value_re": value.real,
        "value_im": value.imag,
        "dmax": km.dmax,
        "condition": km.condition,
        "validated_radius": km.validated_radius,
        "method": method,
    }, None


def cmd_fit(args):
    p = _model_weight(args)
    z = _parse_complex(_points(args.at, "1,0")[0])
    lo, hi, n = _tgrid(args.tgrid)
    fit = fit_expansion(p, z, log_grid(lo, hi, n), n_terms=args.terms, dmax=args.dmax,
                        spec=_spec(args), ntheta=args.ntheta)
    out = {
        "z": [z.real, z.imag],
        "estimates": [float(v) for v in fit.estimates],
        "residual_norm": fit.residual_norm,
        "condition": fit.condition,
        "ill_conditioned": fit.ill_conditioned,
        "dmax_used": [int(v) for v in fit.dmax_used],
        "t": [float(v) for v in fit.t],
        "values": [float(v) for v in fit.values],
    }
    return out, list(fit.rows())


def cmd_obstruction(args):
    if args.weight_q is not None:
        q = parse_poly(args.weight_q)
    elif args.weight is not None or args.monomial is not None:
        q, _ = q_and_Q(_weight(args))
    else:
        raise UsageError("--weight-q, --weight or --monomial is required")
    hint = None
    if args.hint_a is not None:
        hint = _parse_exact_point(args.hint_a)
        if hint is None:
            raise UsageError("--hint-a expects rational 're,im'")
    cert = obstruction_certificate(q, hint)
    return cert.to_json(), None


def cmd_ke_check(args):
    z1 = _parse_complex(_points(args.at, "0,0")[0])
    if args.monomial is not None and args.weight is None:
        c, r = _monomial(args.monomial)
        source = transforms.MonomialSource(c, r, dmax=max(args.dmax, 2 * DEFAULT_DMAX))
    else:
        p = _model_weight(args)
        source = KernelModel(p, dmax=args.dmax, spec=_spec(args), ntheta=args.ntheta)
    res = transforms.ke_determinant(source, z1)
    return res.as_dict(), None


def cmd_quadratic(args):
    if args.r is None:
        raise UsageError("--r is required")
    lhs, rhs, eq = transforms.quadratic_root_check(args.r)
    return {"lhs": str(lhs), "rhs": str(rhs), "equal": eq}, None


def cmd_ball_check(args):
    text = args.at if args.at is not None else "0,0,0,0"
    try:
        x1, y1, x2, y2 = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError("--at for ball-check expects x1,y1,x2,y2") from exc
    z = np.array([complex(x1, y1), complex(x2, y2)])
    K = monge_ampere.BALL_KERNEL
    return {
        "B": monge_ampere.bergman_invariant(K, z, args.h),
        "J": monge_ampere.j_operator(K, z, args.h),
        "K": monge_ampere.ball_kernel(z),
        "residual": monge_ampere.ke_kernel_check(K, z, args.h),
    }, None


def cmd_watson(args):
    if args.b is not None:
        try:
            b = [float(v) for v in args.b.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError("--b expects a comma-separated list of numbers") from exc
    elif args.weight is not None or args.monomial is not None:
        z = _parse_complex(_points(args.at, "1,0")[0])
        b = [v.real for v in expansion.eval_b(expansion.b_coeffs(_weight(args)), z)]
    else:
        raise UsageError("--b or --weight is required")
    alpha0 = args.alpha0
    r = args.r if args.r is not None else 2
    lo, hi, n = _tgrid(args.tgrid) if args.tgrid else (50.0, 500.0, 10)
    grid = log_grid(lo, hi, n)
    w = transforms.watson_coeffs(b, alpha0, r) if b else transforms.WatsonExpansion((), 0.0, alpha0, r)
    out = {"c": list(w.c), "d0": w.d0, "alpha0": alpha0, "r": r,
           "deviation": transforms.watson_vs_quadrature(b, alpha0, r, grid)}
    if len(b) > 3 + alpha0:
        fit = transforms.fit_log_coefficient(b, alpha0, grid)
        out["fitted_d0"] = fit.d0
        out["relative_error"] = fit.relative_error
    return out, None


COMMANDS = {
    "coeffs": cmd_coeffs,
    "kernel": cmd_kernel,
    "fit": cmd_fit,
    "obstruction": cmd_obstruction,
    "ke-check": cmd_ke_check,
    "quadratic": cmd_quadratic,
    "ball-check": cmd_ball_check,
    "watson": cmd_watson,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergmodel", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--weight", help="weight polynomial in z and w (w stands for conj z)")
    src.add_argument("--monomial", metavar="C,R", help="monomial weight (c/2)|z|^r")
    src.add_argument("--weight-q", dest="weight_q", help="q = p_zw given directly")
    common.add_argument("--at", help="point 're,im' (several separated by ';'); ball-check: x1,y1,x2,y2")
    common.add_argument("--dmax", type=int, default=DEFAULT_DMAX)
    common.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-10)
    common.add_argument("--ntheta", type=int, default=DEFAULT_NTHETA)
    common.add_argument("--tgrid", metavar="MIN,MAX,COUNT")
    common.add_argument("--terms", type=int, default=4, help="number of fitted coefficients")
    common.add_argument("--deriv", metavar="A1,A2")
    common.add_argument("--alpha0", type=int, default=0)
    common.add_argument("--hint-a", dest="hint_a", metavar="X,Y")
    common.add_argument("--h", type=float, default=None, help="finite-difference step")
    common.add_argument("--r", type=int)
    common.add_argument("--b", help="symbol coefficients b0,b1,... for watson")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default: standard output)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _validate(args) -> None:
    if args.dmax < 1:
        raise UsageError("--dmax must be positive")
    if args.ntheta < 8:
        raise UsageError("--ntheta must be at least 8")
    if not args.quad_tol > 0:
        raise UsageError("--quad-tol must be positive")
    if args.h is not None and not args.h > 0:
        raise UsageError("--h must be positive")
    if args.terms < 1:
        raise UsageError("--terms must be positive")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _validate(args)
        result, rows = COMMANDS[args.command](args)
        text = emit(result, args.format, rows)
    except (QuadratureError, ConditioningError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ParseError, DivisibilityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
