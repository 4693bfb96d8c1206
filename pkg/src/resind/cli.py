"""Command-line front end: problem files in, reports out.

One command per invocation.  Problem files are JSON objects; rationals are
written as "p/q" strings so exactness survives serialization.  The machine
report is a single JSON document with stable keys and deterministic byte
layout for a fixed input file and seed; the human format tabulates the
same numbers.  Exit codes: 0 success, 2 precondition failure, 3 resource
cap.  A report is emitted in every case.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import PreconditionError, ResourceCapError
from .index import (
    GenericityReport,
    IndexReport,
    OneFormProblem,
    VectorFieldProblem,
    complex_nesting_check,
    construct_deformable_field,
    euler_char_real_fiber,
    genericity_check,
    index_complex_vector_field,
    index_linear_form,
    index_one_form,
    index_real_vector_field,
    milnor_le_greuel,
    remainder_identity_check,
    _tangency_state,
)
from .localbasis import Budget
from .poly import Context, Poly, SymElem, parse_poly
from .quadform import BilinearForm, SignatureReport
from .residues import (
    CompleteIntersection,
    ResidueEvaluator,
    ResidueProblem,
    residue_at_fiber,
)
from .symbol import SymbolEvaluator

COMMANDS = (
    "index-real", "index-complex", "index-1form", "index-linear-form",
    "residue", "symbol", "signature", "milnor", "euler-char",
    "check-rules", "construct-field",
)

KNOWN_KEYS = {
    "variables", "module_rank", "f", "v", "u", "numerator", "denominators",
    "columns", "scalars", "numerator_degree", "weight", "coordinate", "flag",
    "euler_char", "t_sample", "t", "sign_t", "depth", "seed", "max_steps",
    "direction",
}

EXIT_MEANINGS = {0: "ok", 2: "precondition-failure", 3: "resource-cap"}


class ProblemError(ValueError):
    """Problem-file validation failure, naming the offending field."""


def _fraction(text, field: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ProblemError(f"field {field!r}: not a rational number: {text!r}")


def load_problem(path: str) -> Tuple[Dict, bytes, List[str]]:
    """Read and validate a problem file; returns (problem, raw bytes, warnings)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ProblemError(f"cannot read problem file: {e}")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ProblemError(f"problem file is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ProblemError("problem file must be a JSON object")
    warnings = [f"unknown key {k!r} ignored"
                for k in sorted(data) if k not in KNOWN_KEYS]
    if "variables" not in data:
        raise ProblemError("field 'variables' is required")
    names = data["variables"]
    if (not isinstance(names, list) or not names
            or not all(isinstance(s, str) and s for s in names)):
        raise ProblemError("field 'variables': need a nonempty list of identifiers")
    problem: Dict = {"variables": tuple(names)}
    try:
        ctx = Context(tuple(names))
    except ValueError as e:
        raise ProblemError(f"field 'variables': {e}")
    problem["ctx"] = ctx

    def poly_list(key: str, context: Context) -> List[Poly]:
        val = data.get(key, [])
        if not isinstance(val, list) or not all(isinstance(s, str) for s in val):
            raise ProblemError(f"field {key!r}: need a list of polynomial strings")
        out = []
        for i, s in enumerate(val):
            try:
                out.append(parse_poly(s, context))
            except ValueError as e:
                raise ProblemError(f"field {key!r}[{i}]: {e}")
        return out

    problem["f"] = poly_list("f", ctx)
    rank = data.get("module_rank", len(problem["f"]))
    if not isinstance(rank, int) or rank < 0:
        raise ProblemError("field 'module_rank': need a nonnegative integer")
    if rank != len(problem["f"]):
        raise ProblemError(
            f"field 'module_rank': declared {rank} but 'f' has "
            f"{len(problem['f'])} entries")
    problem["module_rank"] = rank
    for key in ("v", "u", "denominators", "scalars"):
        if key in data:
            problem[key] = poly_list(key, ctx)
    if "columns" in data:
        mctx = ctx.with_module(max(rank, 1))
        problem["columns"] = poly_list("columns", mctx)
        problem["mctx"] = mctx
    for key in ("numerator", "weight"):
        if key in data:
            if not isinstance(data[key], str):
                raise ProblemError(f"field {key!r}: need a polynomial string")
            target = problem.get("mctx", ctx) if key == "numerator" else ctx
            try:
                problem[key] = parse_poly(data[key], target)
            except ValueError as e:
                raise ProblemError(f"field {key!r}: {e}")
    if "direction" in data:
        vals = data["direction"]
        if not isinstance(vals, list):
            raise ProblemError("field 'direction': need a list of rationals")
        problem["direction"] = tuple(
            _fraction(c, "direction") for c in vals)
    for key in ("t_sample", "t"):
        if key in data:
            problem[key] = _fraction(data[key], key)
    if "euler_char" in data:
        val = data["euler_char"]
        if isinstance(val, list):
            if len(val) != 2 or not all(
                    x is None or isinstance(x, int) for x in val):
                raise ProblemError(
                    "field 'euler_char': need [fiber, section] integers or nulls")
            problem["euler_char"] = (val[0], val[1])
        elif isinstance(val, int):
            problem["euler_char"] = val
        else:
            raise ProblemError("field 'euler_char': need an integer or a pair")
    if "sign_t" in data:
        val = data["sign_t"]
        if val in (1, -1):
            problem["sign_t"] = val
        elif val in ("+1", "+"):
            problem["sign_t"] = 1
        elif val in ("-1", "-"):
            problem["sign_t"] = -1
        else:
            raise ProblemError("field 'sign_t': need +1 or -1")
    for key in ("numerator_degree", "depth", "seed", "max_steps"):
        if key in data:
            if not isinstance(data[key], int):
                raise ProblemError(f"field {key!r}: need an integer")
            problem[key] = data[key]
    if "coordinate" in data:
        if not isinstance(data["coordinate"], str):
            raise ProblemError("field 'coordinate': need a variable name")
        problem["coordinate"] = data["coordinate"]
    if "flag" in data:
        val = data["flag"]
        if not isinstance(val, list) or not all(isinstance(s, str) for s in val):
            raise ProblemError("field 'flag': need a list of variable names")
        problem["flag"] = val
    return problem, raw, warnings


def _ci(problem: Dict) -> CompleteIntersection:
    return CompleteIntersection(
        problem["ctx"], tuple(problem["f"]), problem.get("direction"))


def _need(problem: Dict, key: str) -> object:
    if key not in problem:
        raise ProblemError(f"field {key!r} is required for this command")
    return problem[key]


def _vector_problem(problem: Dict) -> VectorFieldProblem:
    v = _need(problem, "v")
    euler = problem.get("euler_char")
    if euler is not None and not isinstance(euler, tuple):
        euler = (euler, None)
    return VectorFieldProblem(
        _ci(problem), tuple(v), euler,
        problem.get("t_sample", Fraction(1, 7)))


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, SignatureReport):
        return {"dimension": value.dimension, "rank": value.rank,
                "signature": value.signature, "positive": value.positive,
                "negative": value.negative, "zero": value.zero}
    if isinstance(value, GenericityReport):
        out = {"checks": {name: ok for name, ok in value.checks}}
        if value.suggestion:
            out["suggestion"] = value.suggestion
        return out
    if isinstance(value, Poly):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(x) for k, x in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(x) for x in value]
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def _from_index_report(rep: IndexReport):
    breakdown = [{"name": n, "value": val} for n, val in rep.breakdown]
    diagnostics = [{"name": n, "value": _jsonable(val)}
                   for n, val in sorted(rep.diagnostics.items())]
    diagnostics.append({
        "name": "combination",
        "value": {n: c for n, c in rep.combination}})
    return rep.index, breakdown, diagnostics


def _signature_result(sig: SignatureReport):
    breakdown = [{"name": n, "value": getattr(sig, n)}
                 for n in ("dimension", "rank", "signature",
                           "positive", "negative", "zero")]
    return sig.signature, breakdown, []


def run_command(command: str, problem: Dict, seed: int,
                budget: Optional[Budget]):
    """Dispatch; returns (result, breakdown, diagnostics)."""
    rng = random.Random(seed)
    if command == "index-real":
        return _from_index_report(
            index_real_vector_field(_vector_problem(problem), budget, rng))
    if command == "index-complex":
        return _from_index_report(
            index_complex_vector_field(_vector_problem(problem), budget))
    if command == "index-1form":
        euler = problem.get("euler_char")
        if isinstance(euler, tuple):
            euler = euler[0]
        op = OneFormProblem(_ci(problem), tuple(_need(problem, "u")), euler)
        return _from_index_report(index_one_form(op, budget, rng))
    if command == "index-linear-form":
        sig = index_linear_form(
            _ci(problem), problem.get("coordinate"), budget, rng)
        return _signature_result(sig)
    if command == "residue":
        rp = ResidueProblem(
            _need(problem, "numerator"),
            tuple(_need(problem, "denominators")),
            _ci(problem) if problem["f"] else None)
        if "t" in problem:
            value = residue_at_fiber(rp, problem["t"], budget)
        else:
            value = rp.local_value(budget)
        return Fraction(value), [], []
    if command == "symbol":
        ci = _ci(problem)
        columns = [SymElem(p, 1) for p in _need(problem, "columns")]
        scalars = tuple(problem.get("scalars", ()))
        num = _need(problem, "numerator")
        degree = problem.get("numerator_degree", -1)
        ev = SymbolEvaluator(ci, columns, scalars, rng=rng, budget=budget)
        value = ev.value(SymElem(num, degree))
        return Fraction(value), [], []
    if command == "signature":
        denominators = list(_need(problem, "denominators"))
        for g in problem["f"]:
            denominators.insert(0, g)
        weight = problem.get(
            "weight", Poly.const(problem["ctx"], Fraction(1)))
        ev = ResidueEvaluator(denominators, budget=budget)
        basis = [Poly.monomial(ev.ctx, mo.z) for mo in ev.quotient_monomials()]
        form = BilinearForm.from_pairing(
            basis, lambda p, q: ev.value(p * q * weight))
        return _signature_result(form.signature())
    if command == "milnor":
        value = milnor_le_greuel(
            _ci(problem), problem.get("flag"), rng, budget)
        return value, [], []
    if command == "euler-char":
        f = problem["f"]
        if len(f) != 1:
            raise ProblemError("field 'f': euler-char needs exactly one polynomial")
        sign_t = problem.get("sign_t", 1)
        value = euler_char_real_fiber(f[0], sign_t, budget)
        return value, [], []
    if command == "check-rules":
        return _check_rules(problem, budget)
    if command == "construct-field":
        field = construct_deformable_field(
            _ci(problem), problem.get("depth", 1), rng, budget)
        report = genericity_check(
            VectorFieldProblem(_ci(problem), tuple(field)), budget)
        diagnostics = [{"name": "genericity", "value": _jsonable(report)}]
        return [str(p) for p in field], [], diagnostics
    raise ProblemError(f"unknown command {command!r}")


def _check_rules(problem: Dict, budget: Optional[Budget]):
    """Identity battery on one vector-field problem; result is overall pass."""
    vp = _vector_problem(problem)
    breakdown = []
    diagnostics = []
    passed = True

    report = genericity_check(vp, budget)
    breakdown.append({"name": "genericity", "value": 1 if report.all_ok else 0})
    diagnostics.append({"name": "genericity", "value": _jsonable(report)})
    passed = passed and report.all_ok

    state = _tangency_state(vp, budget or Budget())
    breakdown.append({"name": "tangency", "value": 1 if state != "violated" else 0})
    diagnostics.append({"name": "tangency", "value": state})
    passed = passed and state != "violated"

    if vp.m >= 1:
        try:
            nest = complex_nesting_check(vp, budget)
            breakdown.append({"name": "nesting", "value": 1 if nest["ok"] else 0})
            diagnostics.append({"name": "nesting", "value": _jsonable(nest)})
            passed = passed and nest["ok"]
        except PreconditionError as e:
            diagnostics.append({"name": "nesting", "value": f"skipped: {e}"})
    if vp.m == 1 and vp.d % 2 == 0:
        try:
            ok = remainder_identity_check(vp.ci, vp.t_sample, budget)
            breakdown.append({"name": "remainder_identity",
                              "value": 1 if ok else 0})
            passed = passed and ok
        except PreconditionError as e:
            diagnostics.append(
                {"name": "remainder_identity", "value": f"skipped: {e}"})
    return passed, breakdown, diagnostics


def emit_report(report: Dict, fmt: str) -> str:
    if fmt == "machine":
        machine = {k: v for k, v in report.items() if k != "timing"}
        return json.dumps(machine, sort_keys=True, indent=2) + "\n"
    lines = [
        f"command:  {report['command']}",
        f"input:    sha256 {report['input_hash']}",
        f"seed:     {report['seed']}",
        f"result:   {json.dumps(report['result'])}",
    ]
    if report["breakdown"]:
        lines.append("breakdown:")
        width = max(len(e["name"]) for e in report["breakdown"])
        for e in report["breakdown"]:
            lines.append(f"  {e['name']:<{width}}  {json.dumps(e['value'])}")
    if report["diagnostics"]:
        lines.append("diagnostics:")
        for e in report["diagnostics"]:
            lines.append(f"  {e['name']}: {json.dumps(e['value'])}")
    lines.append(f"exit:     {report['exit_semantics']['code']} "
                 f"({report['exit_semantics']['meaning']})")
    lines.append(f"time:     {report['timing']}")
    return "\n".join(lines) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="resind",
        description="Exact residue symbols and topological indices at "
                    "complete intersection germs.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="problem file (JSON)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for all randomized choices (default: "
                             "problem file's, then 0)")
    parser.add_argument("--format", choices=("human", "machine"),
                        default="human")
    parser.add_argument("--t-sample", default=None,
                        help="deformation parameter override, as p/q")
    parser.add_argument("--max-steps", type=int, default=None,
                        help="resource cap for the whole run")
    args = parser.parse_args(argv)

    start = time.monotonic()
    code = 0
    result = None
    breakdown: List = []
    diagnostics: List = []
    input_hash = ""
    seed = 0
    try:
        problem, raw, warnings = load_problem(args.input)
        input_hash = hashlib.sha256(raw).hexdigest()
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        seed = args.seed if args.seed is not None else problem.get("seed", 0)
        if args.t_sample is not None:
            problem["t_sample"] = _fraction(args.t_sample, "--t-sample")
        max_steps = (args.max_steps if args.max_steps is not None
                     else problem.get("max_steps"))
        budget = Budget(max_steps) if max_steps is not None else None
        result, breakdown, diagnostics = run_command(
            args.command, problem, seed, budget)
    except (PreconditionError, ProblemError, ValueError) as e:
        code = 2
        diagnostics = list(diagnostics) + [{"name": "error", "value": str(e)}]
    except ResourceCapError as e:
        code = 3
        diagnostics = list(diagnostics) + [{"name": "error", "value": str(e)}]
    except ArithmeticError as e:
        code = 2
        diagnostics = list(diagnostics) + [
            {"name": "error",
             "value": f"internal consistency failure: {e}"}]
    elapsed = time.monotonic() - start
    report = {
        "command": args.command,
        "input_hash": input_hash,
        "seed": seed,
        "result": _jsonable(result),
        "breakdown": _jsonable(breakdown),
        "diagnostics": _jsonable(diagnostics),
        "exit_semantics": {"code": code, "meaning": EXIT_MEANINGS[code]},
        "timing": f"{elapsed:.3f}s",
    }
    sys.stdout.write(emit_report(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
