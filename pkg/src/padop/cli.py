"""``padop`` command-line front end: JSON in, deterministic JSON report out.

Every command reads one JSON payload (``--in``, default stdin) and writes one
report (``--out``, default stdout). Exit codes: 0 success, 2 domain error,
3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from . import derivations as dv
from . import funcalc as fc
from . import io
from . import linalg as la
from . import padic
from .errors import MalformedInput, NotInner, PadopError, SelftestFailed
from .padic import ZERO, PadicScalar

COMMANDS = ("norm", "ldu", "eig", "sqrt", "root", "funcalc", "clamp", "deriv-check", "deriv-space",
            "deriv-solve", "center", "commutant", "carrier", "killing", "selftest")

MIN_PREC, MAX_CLI_PREC = 4, 256

ex = io.exponent


def _check(achieved, bound) -> dict:
    """An asserted inequality ``|lhs| <= p**-bound`` with both sides as exponents."""
    return fc.NormCheck(achieved, bound).as_dict()


def _field(payload, key: str, *alts):
    for k in (key,) + alts:
        if isinstance(payload, dict) and k in payload:
            return payload[k], f"$.{k}"
    raise MalformedInput(f"missing field {key!r}", "$")


def _matrix(payload, p):
    if isinstance(payload, list) or (isinstance(payload, dict) and "entries" in payload):
        return io.parse_matrix(payload, p, "$")
    obj, path = _field(payload, "matrix", "A")
    return io.parse_matrix(obj, p, path)


def _scalar_or_matrix(payload, p):
    if isinstance(payload, dict) and "scalar" in payload:
        return io.parse_scalar(payload["scalar"], p, "$.scalar")
    if isinstance(payload, dict) and "digits" in payload or isinstance(payload, dict) and "zero" in payload:
        return io.parse_scalar(payload, p, "$")
    if isinstance(payload, (int, str)):
        return io.parse_scalar(payload, p, "$")
    return _matrix(payload, p)


def _algebra(payload, p):
    obj, path = _field(payload, "algebra")
    return io.parse_algebra(obj, p, path)


def _derivation(payload, p, alg):
    if isinstance(payload, dict) and "ad" in payload:
        return dv.DerivationMap.ad(io.parse_matrix(payload["ad"], p, "$.ad"), alg)
    if isinstance(payload, dict) and payload.get("derivation") == "transpose":
        return dv.DerivationMap.transpose_map(alg.p, alg.n)
    obj, path = _field(payload, "derivation")
    D = io.parse_derivation(obj, p, path)
    if D.n != alg.n:
        raise MalformedInput(f"derivation acts on Mat_{D.n}, algebra lives in Mat_{alg.n}", path)
    return D


def _prime_of(payload, default):
    if isinstance(payload, dict) and "p" in payload:
        return io.parse_prime(payload["p"])
    return default


# -- commands --------------------------------------------------------------
def cmd_norm(payload, p):
    x = _scalar_or_matrix(payload, p)
    if isinstance(x, PadicScalar):
        return {"kind": "scalar", "norm_exponent": ex(x.norm())}, {}
    return {"kind": "matrix", "n": x.n, "norm_exponent": ex(la.op_norm(x))}, {}


def cmd_ldu(payload, p):
    A = _matrix(payload, p)
    dec = la.ldu_decompose(A)
    I = la.PMatrix.identity(A.p, A.n)
    result = {"row_perm": dec.row_perm, "col_perm": dec.col_perm, "C": io.serialize_matrix(dec.C),
              "T": io.serialize_matrix(dec.T), "E": io.serialize_matrix(dec.E)}
    cert = {"reconstruction_residual": ex((dec.product() - dec.permute(A)).norm()),
            "C_minus_I": _check((dec.C - I).norm(), 0), "E_minus_I": _check((dec.E - I).norm(), 0)}
    return result, cert


def cmd_eig(payload, p):
    A = _matrix(payload, p)
    eig = la.eig_symmetric(A)
    result = {"eigenvalues": [io.serialize_value(x) for x in eig.eigenvalues], "d": eig.d,
              "isometric": eig.isometric, "C": io.serialize_matrix(eig.C), "C_inv": io.serialize_matrix(eig.C_inv)}
    cert = {"reconstruction_residual": ex((eig.reconstruct() - A).norm())}
    if eig.isometric:
        eye = la.PMatrix.identity(A.p, A.n)
        eye = eye if eig.d == "1" and isinstance(eig.C, la.PMatrix) else eye.to_ext(eig.d)
        cert["C_Ct_minus_I"] = ex((eig.C @ eig.C.T - eye).norm())
    return result, cert


def _root(payload, p, n: int):
    x = _scalar_or_matrix(payload, p)
    if isinstance(x, PadicScalar):
        if n == 2:
            y = padic.sqrt(x)
            return {"root": io.serialize_value(y)}, {"residual": ex((y * y - x).norm())}
        y = padic.nth_root(x, n)
        return {"root": io.serialize_scalar(y)}, {"residual": ex((y**n - x).norm())}
    out = fc.operator_root(x, n)
    result = {"B": io.serialize_matrix(out.B), "polynomial": io.serialize_polynomial(out.polynomial),
              "isometric": out.isometric}
    cert = {"power_residual": ex(out.power_residual), "commutator": ex(out.commutator),
            "polynomial_residual": ex(out.poly_residual)}
    return result, cert


def cmd_sqrt(payload, p):
    return _root(payload, p, 2)


def cmd_root(payload, p):
    n = payload.get("n", 2) if isinstance(payload, dict) else 2
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise MalformedInput("root order must be an integer >= 2", "$.n")
    return _root(payload, p, n)


def cmd_funcalc(payload, p):
    A = _matrix(payload, p)
    if isinstance(payload, dict) and "polynomial" in payload:
        f = io.parse_polynomial(payload["polynomial"], A.p, "$.polynomial")
        method = payload.get("method", "direct")
    else:
        obj, path = _field(payload, "function")
        f = io.parse_function_table(obj, A.p, path)
        method = payload.get("method", "spectral")
    if method == "spectral":
        out = fc.funcalc_spectral(f, A)
        result = {"method": method, "value": io.serialize_matrix(out.value), "isometric": out.isometric}
        return result, {"norm_bound": out.check.as_dict()}
    if not isinstance(f, fc.PPolynomial):
        f = f.as_polynomial()
    if method == "triangular":
        out = fc.funcalc_triangular(f, A)
        result = {"method": method, "value": io.serialize_matrix(out.value), "direct": io.serialize_matrix(out.direct)}
        return result, {"norm_bound": out.check.as_dict(), "discrepancy_from_direct": ex(out.discrepancy)}
    if method == "direct":
        value = fc.poly_eval(f, A)
        return {"method": method, "value": io.serialize_matrix(value)}, \
            {"norm_bound": fc.poly_norm_check(f, A, value).as_dict()}
    raise MalformedInput("method must be one of spectral, triangular, direct", "$.method")


def cmd_clamp(payload, p):
    x = _scalar_or_matrix(payload, p)
    if isinstance(x, PadicScalar):
        c = fc.clamp(x)
        return {"value": io.serialize_scalar(c), "shell": fc.ClampFunction.shell(x)}, {"norm": _check(c.norm(), 0)}
    series = fc.ClampFunction(x.p).mahler_series(int(payload.get("terms", 12)) if isinstance(payload, dict) else 12)
    out = fc.funcalc_spectral(series, x)
    return {"value": io.serialize_matrix(out.value)}, {"norm_bound": out.check.as_dict(),
                                                       "difference_from_input": ex((out.value - x).norm())}


def cmd_deriv_check(payload, p):
    alg = _algebra(payload, p)
    D = _derivation(payload, p, alg)
    defect = dv.leibniz_defect(D, alg)
    result = {"is_derivation": defect == ZERO, "algebra_dim": alg.dim}
    if defect == ZERO:
        result["annihilates_center"] = dv.annihilates_center(D, alg)
    if isinstance(payload, dict) and "ad" in payload and payload.get("check_commutant"):
        B = io.parse_matrix(payload["ad"], p, "$.ad")
        result["preserves_commutant"] = dv.commutant_derivation_check(B, alg)
    return result, {"leibniz_defect": ex(defect)}


def cmd_deriv_space(payload, p):
    alg = _algebra(payload, p)
    codomain = payload.get("codomain", "self")
    if codomain not in ("self", "ambient"):
        raise MalformedInput("codomain must be 'self' or 'ambient'", "$.codomain")
    space = dv.derivation_space(alg, codomain)
    result = {"codomain": codomain, "algebra_dim": alg.dim, "dimension": len(space)}
    if payload.get("basis", False):
        result["basis"] = [io.serialize_derivation(D) for D in space]
    return result, {"max_leibniz_defect": ex(min((dv.leibniz_defect(D, alg) for D in space), default=ZERO))}


def cmd_deriv_solve(payload, p):
    alg = _algebra(payload, p)
    D = _derivation(payload, p, alg)
    out = dv.solve_inner(D, alg)
    if out.status == "not_inner":
        msg = "derivation is not inner on the algebra"
        if out.spatial:
            msg += " (it is spatial: implemented by a matrix outside the algebra)"
        raise NotInner(msg)
    result = {"status": out.status, "witness": io.serialize_matrix(out.witness), "notes": out.notes}
    return result, {"residual": ex(out.residual), "certified": ex(out.certified)}


def cmd_center(payload, p):
    alg = _algebra(payload, p)
    z = dv.center(alg)
    return {"algebra_dim": alg.dim, "dimension": z.dim, "basis": [io.serialize_matrix(B) for B in z.basis]}, {}


def cmd_commutant(payload, p):
    alg = _algebra(payload, p)
    n = payload.get("ambient_n", alg.n)
    if n != alg.n:
        raise MalformedInput("ambient_n must equal the algebra's matrix size", "$.ambient_n")
    c = dv.commutant(alg, n)
    return {"dimension": c.dim, "basis": [io.serialize_matrix(B) for B in c.basis]}, {}


def cmd_carrier(payload, p):
    alg = _algebra(payload, p)
    obj, path = _field(payload, "matrix", "B")
    B = io.parse_matrix(obj, alg.p, path)
    CB = dv.central_carrier(B, alg)
    result = {"carrier": io.serialize_matrix(CB)}
    cert = {"carrier_times_input_residual": ex((CB @ B - B).norm())}
    if "other" in payload:
        Q = io.parse_matrix(payload["other"], alg.p, "$.other")
        CQ = dv.central_carrier(Q, alg)
        result.update(other_carrier=io.serialize_matrix(CQ), product_zero=(B @ Q).is_zero(),
                      carriers_orthogonal=(CB @ CQ).is_zero())
    return result, cert


def cmd_killing(payload, p):
    alg = _algebra(payload, p)
    kg = dv.killing_gram(alg)
    result = {"lie_dim": len(kg.basis), "gram": io.serialize_matrix(kg.gram) if kg.basis else None,
              "nondegenerate": kg.nondegenerate}
    if "A" in payload and "B" in payload:
        A = io.parse_matrix(payload["A"], alg.p, "$.A")
        B = io.parse_matrix(payload["B"], alg.p, "$.B")
        result["value"] = io.serialize_scalar(dv.killing_form(A, B, alg))
    return result, {"det_valuation": ex(kg.det_valuation)}


HANDLERS = {
    "norm": cmd_norm, "ldu": cmd_ldu, "eig": cmd_eig, "sqrt": cmd_sqrt, "root": cmd_root,
    "funcalc": cmd_funcalc, "clamp": cmd_clamp, "deriv-check": cmd_deriv_check,
    "deriv-space": cmd_deriv_space, "deriv-solve": cmd_deriv_solve, "center": cmd_center,
    "commutant": cmd_commutant, "carrier": cmd_carrier, "killing": cmd_killing,
}


def run_selftest(seed: int, p: int | None, n_max: int | None, quick: bool):
    from .suites import run_suites

    results = run_suites(seed, p, n_max, quick)
    suites = {name: r.as_dict() for name, r in results.items()}
    failed = [name for name, r in results.items() if not r.passed]
    result = {"seed": seed, "suites": suites, "all_passed": not failed}
    if failed:
        raise SelftestFailed(f"failing suites: {', '.join(failed)}", result)
    return result, {"cases": sum(r.cases for r in results.values()),
                    "failures": sum(r.failures for r in results.values())}


# -- driver ----------------------------------------------------------------
def run(args: argparse.Namespace, payload) -> tuple[dict, int]:
    """Execute one job; returns the report and the exit code."""
    report = {"command": args.command, "version": __version__, "p": args.p, "prec": args.prec,
              "result": None, "certification": None, "timing": None, "error": None}
    t0 = time.perf_counter()
    code = 0
    try:
        if args.prec is not None:
            if not MIN_PREC <= args.prec <= MAX_CLI_PREC:
                raise MalformedInput(f"precision must lie in [{MIN_PREC}, {MAX_CLI_PREC}]", "--prec")
            padic.set_default_prec(args.prec)
        report["prec"] = padic.default_prec()
        if args.p is not None:
            io.parse_prime(args.p, "-p")
        if args.command == "selftest":
            report["seed"] = args.seed
            result, cert = run_selftest(args.seed, args.p, args.n_max, args.quick)
        else:
            p = _prime_of(payload, args.p)
            report["p"] = p
            result, cert = HANDLERS[args.command](payload, p)
        report["result"], report["certification"] = result, cert
    except SelftestFailed as exc:
        report["result"] = exc.args[1] if len(exc.args) > 1 else None
        report["error"] = {"name": exc.name, "message": exc.args[0]}
        code = exc.exit_code
    except PadopError as exc:
        report["error"] = {"name": exc.name, "message": str(exc)}
        code = exc.exit_code
    except (TypeError, ValueError, KeyError, IndexError, AttributeError) as exc:
        # A payload of the right JSON type but the wrong shape somewhere deep.
        err = MalformedInput(f"{type(exc).__name__}: {exc}", "$")
        report["error"] = {"name": err.name, "message": str(err)}
        code = err.exit_code
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    return report, code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padop", description="Exact p-adic operator algebra computations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("-p", "--p", dest="p", type=int, default=None, help="prime (may also be given in the payload)")
    ap.add_argument("--prec", type=int, default=None, help="relative precision N (default PADOP_PREC or 32)")
    ap.add_argument("--seed", type=int, default=42, help="seed for randomized suites")
    ap.add_argument("--in", dest="inp", default="-", help="input JSON path, '-' for stdin")
    ap.add_argument("--out", default="-", help="output path, '-' for stdout")
    ap.add_argument("--n-max", type=int, default=None, help="largest matrix size in selftest suites")
    ap.add_argument("--quick", action="store_true", help="selftest with a tenth of the cases")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identity)")
    return ap


def _read_payload(path: str):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    if not text.strip():
        return {}
    return json.loads(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    payload = {}
    err = None
    if args.command != "selftest":
        try:
            payload = _read_payload(args.inp)
        except json.JSONDecodeError as exc:
            err = MalformedInput(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "$")
        except OSError as exc:
            err = MalformedInput(f"cannot read input: {exc.strerror}", "--in")
    if err is None:
        report, code = run(args, payload)
    else:
        report = {"command": args.command, "version": __version__, "p": args.p, "prec": args.prec,
                  "result": None, "certification": None, "timing": None,
                  "error": {"name": err.name, "message": str(err)}}
        code = err.exit_code
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
