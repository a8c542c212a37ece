"""Command-line front end.

Each subcommand reads one JSON document (``--input`` or stdin), runs a single
engine operation and writes a JSON report (``--output`` or stdout).  A one-line
summary goes to stderr.

Exit status: 0 when the property holds, 1 when it fails with a witness in the
report, 2 for malformed input or a violated hypothesis.

Input documents share a few keys::

    vars      ["x", "y", ...]                      required everywhere
    family    {"coeffs": [form, ...], "truncated": false}
    form      {"p": 1, "components": {"dx": "y", "dy": "x"}}  or  {"d": "x*y"}
    fiber     {"factors": ["x", "y"], "lambda_matrix": [[...]]}
    cycles    [{"torus": {"c": 1, "plane": ["x", "y"], "anchor": [0, 0]}}, ...]
              or serialized cycles {"c": [re, im], "coords": [...]}

Polynomials are expression strings (``"x^2 - 3/2*I*y"``) or the term-list
JSON that reports emit, so a report's ``input`` block can be fed back in.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from . import __version__
from .cohomology import FactoredFiber, decompose, relatively_closed, transversality_probe
from .deformation import DeformationSeries, deformation_equations, integrability_defects
from .errors import DeformationError
from .forms import PForm, d
from .integrator import (
    Neither,
    Obstructed,
    classify_degree_one,
    radial_test,
    reconstruct_first_integral,
    rescale_deformation,
    rescaling_potential,
)
from .periods import DEFAULT_N_MAX, DEFAULT_TOL, Cycle, obstruction_series, standard_torus_cycle
from .polynomial import Polynomial

SCHEMA = "intdeform.report/1"


class InputError(ValueError):
    """The input document is malformed (bad JSON, missing or unknown keys)."""


# -- input parsing ---------------------------------------------------------------


def _need(doc: dict, key: str):
    if key not in doc:
        raise InputError(f"missing required key {key!r}")
    return doc[key]


def _check_keys(doc: dict, required: set[str], optional: set[str] = frozenset()) -> None:
    allowed = required | set(optional) | {"vars", "comment"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise InputError(f"unknown input keys {unknown}; allowed: {sorted(allowed)}")
    for key in sorted(required | {"vars"}):
        _need(doc, key)


def _vars(doc: dict) -> tuple[str, ...]:
    vs = _need(doc, "vars")
    if not isinstance(vs, list) or not vs or not all(isinstance(v, str) for v in vs):
        raise InputError("'vars' must be a non-empty list of names")
    if len(set(vs)) != len(vs):
        raise InputError(f"repeated variable names in {vs}")
    return tuple(vs)


def parse_form(data, vars) -> PForm:
    if isinstance(data, dict) and set(data) == {"d"}:
        return d(Polynomial.from_json(data["d"], vars))
    if not isinstance(data, dict) or "p" not in data:
        raise InputError("a form is {'p': .., 'components': {..}} or {'d': poly}")
    return PForm.from_json(data, vars)


def parse_family(data, vars) -> DeformationSeries:
    if not isinstance(data, dict) or "coeffs" not in data:
        raise InputError("a family is {'coeffs': [form, ...], 'truncated': bool}")
    extra = set(data) - {"coeffs", "truncated", "K"}
    if extra:
        raise InputError(f"unknown family keys {sorted(extra)}")
    coeffs = [parse_form(c, vars) for c in data["coeffs"]]
    if not coeffs:
        raise InputError("a family needs at least one coefficient")
    if "K" in data and int(data["K"]) != len(coeffs) - 1:
        raise InputError(f"K={data['K']} but {len(coeffs)} coefficients given")
    return DeformationSeries(coeffs, truncated=bool(data.get("truncated", False)))


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise InputError(f"expected a number or [re, im], got {v!r}")


def parse_cycles(data, fiber: FactoredFiber) -> list[Cycle]:
    if not isinstance(data, list):
        raise InputError("'cycles' must be a list")
    out = []
    for item in data:
        if isinstance(item, dict) and "torus" in item:
            t = item["torus"]
            extra = set(t) - {"c", "plane", "anchor", "tol"}
            if extra:
                raise InputError(f"unknown torus keys {sorted(extra)}")
            anchor = t.get("anchor")
            if anchor is not None:
                anchor = [_complex(a) for a in anchor]
            out.append(standard_torus_cycle(
                fiber, _complex(t.get("c", 1)), t.get("plane", [0, 1]), anchor, tol=float(t.get("tol", 1e-9))
            ))
        elif isinstance(item, dict) and "coords" in item:
            gamma = Cycle.from_json(item)
            gamma.check_residency(fiber.f)
            out.append(gamma)
        else:
            raise InputError("each cycle is {'torus': {...}} or a serialized cycle")
    return out


# -- command handlers -------------------------------------------------------------
# Each handler returns (normalized input, result, holds, summary line).


def _maybe_truncate(w: DeformationSeries, args) -> DeformationSeries:
    return w.truncate(args.order) if args.order is not None else w


def cmd_check_integrable(doc, args):
    _check_keys(doc, {"family"})
    vars = _vars(doc)
    w = _maybe_truncate(parse_family(doc["family"], vars), args)
    report = integrability_defects(w)
    k = report.first_nonzero
    summary = "integrable through every order" if report.integrable else f"integrability defect at order {k}"
    if report.integrable and not report.exhaustive:
        summary = f"integrable through order {w.K} (truncated family)"
    return {"vars": list(vars), "family": w.to_json()}, report.to_json(), report.integrable, summary


def cmd_deformation_equations(doc, args):
    _check_keys(doc, {"family", "f"})
    vars = _vars(doc)
    w = _maybe_truncate(parse_family(doc["family"], vars), args)
    f = Polynomial.from_json(doc["f"], vars)
    eqs = deformation_equations(w, f)
    failing = [e.k for e in eqs if not e.holds]
    summary = "all deformation equations hold" if not failing else f"equations fail at orders {failing}"
    result = {"equations": [e.to_json() for e in eqs], "failing_orders": failing}
    return {"vars": list(vars), "family": w.to_json(), "f": f.to_json()}, result, not failing, summary


def _fiber(doc, vars, args) -> FactoredFiber:
    data = _need(doc, "fiber")
    if not isinstance(data, dict) or "factors" not in data:
        raise InputError("a fiber is {'factors': [poly, ...], 'lambda_matrix': optional}")
    extra = set(data) - {"factors", "lambda_matrix"}
    if extra:
        raise InputError(f"unknown fiber keys {sorted(extra)}")
    return FactoredFiber.from_json(data, vars, seed=args.seed)


def cmd_decompose(doc, args):
    _check_keys(doc, {"form", "fiber"})
    vars = _vars(doc)
    fiber = _fiber(doc, vars, args)
    omega = parse_form(doc["form"], vars)
    inputs = {"vars": list(vars), "form": omega.to_json(), "fiber": fiber.to_json()}
    check = relatively_closed(omega, fiber.f)
    if not check.closed:
        result = {"relatively_closed": False, "defect": check.defect.to_json()}
        return inputs, result, False, "form is not relatively closed: d(w)^df != 0"
    dec = decompose(omega, fiber)
    probe = transversality_probe(fiber, seed=args.seed)
    result = {"relatively_closed": True, "decomposition": dec.to_json(), "probe": probe.to_json()}
    if dec.obstructed:
        lams = ", ".join(str(v) for v in dec.lambdas)
        return inputs, result, False, f"logarithmic part is nonzero: lambda = ({lams})"
    return inputs, result, True, "w = a df + dh (exact modulo df)"


def _period_options(args) -> dict:
    return {"tol": args.tol, "n_max": args.max_nodes}


def cmd_periods(doc, args):
    _check_keys(doc, {"family", "fiber", "cycles"})
    vars = _vars(doc)
    fiber = _fiber(doc, vars, args)
    w = _maybe_truncate(parse_family(doc["family"], vars), args)
    cycles = parse_cycles(doc["cycles"], fiber)
    report = obstruction_series(w, fiber, cycles, **_period_options(args))
    inputs = {
        "vars": list(vars),
        "family": w.to_json(),
        "fiber": fiber.to_json(),
        "cycles": [g.to_json() for g in cycles],
    }
    k = report.obstruction_order
    summary = "all periods vanish" if k is None else f"nonzero period at order {k}"
    if not report.recursion_valid:
        summary += " (an order below the obstruction is not relatively closed; periods are cycle-dependent)"
    return inputs, report.to_json(), k is None, summary


def cmd_first_integral(doc, args):
    _check_keys(doc, {"family", "fiber"}, {"cycles"})
    vars = _vars(doc)
    fiber = _fiber(doc, vars, args)
    w = _maybe_truncate(parse_family(doc["family"], vars), args)
    cycles = parse_cycles(doc.get("cycles", []), fiber)
    inputs = {"vars": list(vars), "family": w.to_json(), "fiber": fiber.to_json()}
    if cycles:
        inputs["cycles"] = [g.to_json() for g in cycles]
    out = reconstruct_first_integral(w, fiber, cycles, **_period_options(args))
    if isinstance(out, Obstructed):
        lams = ", ".join(str(v) for v in out.lambdas)
        return inputs, out.to_json(), False, f"obstructed at order {out.order}: lambda = ({lams})"
    result = {"kind": "FirstIntegralSeries", "F_t": out.to_json(), "verified": True}
    return inputs, result, True, f"first integral found through order {out.K}"


def cmd_classify_degree_one(doc, args):
    _check_keys(doc, {"fiber", "form"})
    vars = _vars(doc)
    fiber = _fiber(doc, vars, args)
    omega1 = parse_form(doc["form"], vars)
    out = classify_degree_one(fiber, omega1)
    inputs = {"vars": list(vars), "fiber": fiber.to_json(), "form": omega1.to_json()}
    if out.kind == "ExactCase":
        summary = f"exact: w_t = d(f + t h) with h = {out.h}"
    else:
        summary = f"pullback: mu = {out.mu}, lambda = {out.lam}, P = {out.P}, Q = {out.Q}"
    return inputs, out.to_json(), True, summary


def cmd_rescale(doc, args):
    _check_keys(doc, {"form", "nu"}, {"K"})
    vars = _vars(doc)
    omega = parse_form(doc["form"], vars)
    nu = int(doc["nu"])
    K = args.order if args.order is not None else doc.get("K")
    if K is None:
        K = max(0, omega.degree - nu) if omega else 0
    K = int(K)
    w = rescale_deformation(omega, nu, K)
    P = rescaling_potential(omega, nu)
    inputs = {"vars": list(vars), "form": omega.to_json(), "nu": nu, "K": K}
    result = {"family": w.to_json(), "P": P.to_json()}
    return inputs, result, True, f"rescaled family of order {K}, lowest part d({P})"


def cmd_radial_test(doc, args):
    _check_keys(doc, {"form"})
    vars = _vars(doc)
    omega = parse_form(doc["form"], vars)
    out = radial_test(omega)
    holds = not isinstance(out, Neither)
    summary = {
        "ZeroContraction": "w(R) = 0",
        "ClosedQuotient": "w / w(R) is closed",
        "Neither": "w(R) != 0 and w / w(R) is not closed",
    }[out.kind]
    return {"vars": list(vars), "form": omega.to_json()}, out.to_json(), holds, summary


COMMANDS: dict[str, tuple[Callable, str]] = {
    "check-integrable": (cmd_check_integrable, "integrability defects of w_t ^ d(w_t)"),
    "deformation-equations": (cmd_deformation_equations, "order-by-order equations for a deformation of df"),
    "decompose": (cmd_decompose, "w = a df + dh + f sum lam theta"),
    "periods": (cmd_periods, "periods of each order over cycles in the fiber"),
    "first-integral": (cmd_first_integral, "reconstruct F_t or report the first obstruction"),
    "classify-degree-one": (cmd_classify_degree_one, "normal form of df + t w_1 for f = f1 f2"),
    "rescale": (cmd_rescale, "family t^-(nu+1) sigma_t^*(Omega)"),
    "radial-test": (cmd_radial_test, "homogeneous radial dichotomy"),
}


# -- driver ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intdeform",
        description="Integrable deformations of df: exact algebra and period checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--input", "-i", help="input JSON file (stdin when omitted)")
        p.add_argument("--output", "-o", help="report path (stdout when omitted)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
        p.add_argument("--max-nodes", type=int, default=DEFAULT_N_MAX, help="quadrature node cap")
        p.add_argument("--order", "-K", type=int, default=None, help="truncate at order K")
        p.add_argument("--seed", type=int, default=0, help="seed for the randomized fiber checks")
    return parser


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run(argv: list[str] | None = None, stdin=None) -> tuple[int, dict, str]:
    """Execute one job; returns ``(exit status, report, summary)`` without writing anything."""
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    report: dict[str, Any] = {"schema": SCHEMA, "command": args.command}
    try:
        if args.input:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = (stdin or sys.stdin).read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"input is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InputError("input must be a JSON object")
        if args.order is not None and args.order < 0:
            raise InputError("--order must be non-negative")
        inputs, result, holds, summary = handler(doc, args)
    except (DeformationError, InputError, ValueError, KeyError, TypeError, OSError) as exc:
        details = exc.details() if isinstance(exc, DeformationError) else {}
        report.update({
            "status": "error",
            "exit_code": 2,
            "error": {"type": type(exc).__name__, "message": str(exc), "details": details},
        })
        summary = f"error: {type(exc).__name__}: {exc}"
        report["summary"] = summary
        return 2, report, summary
    code = 0 if holds else 1
    report.update({
        "status": "holds" if holds else "fails",
        "exit_code": code,
        "input": inputs,
        "result": result,
        "summary": summary,
    })
    return code, report, summary


def main(argv: list[str] | None = None) -> int:
    code, report, summary = run(argv)
    args = build_parser().parse_args(argv)
    text = _dump(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"[{report['command']}] {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
