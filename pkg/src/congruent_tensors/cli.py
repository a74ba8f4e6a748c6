"""Command-line front end.

Subcommands: tensor, check-congruence, pushforward, decompose, verify.
All inputs are UTF-8 JSON files; reports are JSON documents with a status,
an input digest, and every option echoed so a run is reproducible from the
report alone.  Exit codes: 0 success, 1 schema violation, 2 numeric
failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from . import __version__
from .backend import ACTIVE_BACKEND
from .classify import decompose_on_M, decompose_on_P
from .errors import GeometryError, SchemaError
from .markov import MarkovKernel, Statistic, is_congruent, pushforward
from .measures import norm, signed_measure
from .models import (
    ParametrizedModel,
    bernoulli,
    categorical_simplex,
    exponential_family,
    linear_table,
    model_tensor,
    model_tensor_via_roots,
    pushforward_model,
    scaled,
)
from .partitions import partition
from .tensors import (
    TensorFieldOracle,
    linear_combination_oracle,
    pullback_markov,
    tau_P_oracle,
    tau_n_oracle,
    zero_oracle,
)

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_NUMERIC = 2
EXIT_VERIFICATION = 3


# ---------------------------------------------------------------------------
# report serialization: decimal numbers with 17 significant digits


def _format_number(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise GeometryError(f"non-finite value {x} in report")
    return format(x, ".17g")


def _serialize(value: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for key in sorted(value):
            items.append(
                f'{pad}  {json.dumps(str(key))}: {_serialize(value[key], indent + 1)}'
            )
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}  {_serialize(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_number(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise GeometryError(f"cannot serialize {type(value)} in report")


def _digest(payload: Any) -> str:
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# input parsing


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read JSON file {path}: {exc}") from exc


def _require(doc: Dict[str, Any], key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaError(f"{path}: missing required field {key!r}")
    return doc[key]


def _parse_model(doc: Dict[str, Any], path: str) -> ParametrizedModel:
    kind = _require(doc, "type", path)
    if kind == "bernoulli":
        model = bernoulli()
    elif kind == "simplex":
        model = categorical_simplex(int(_require(doc, "size", path)))
    elif kind == "expfam":
        model = exponential_family(
            np.asarray(_require(doc, "sufficient_statistics", path), dtype=float),
            base_weights=(
                np.asarray(doc["base_weights"], dtype=float)
                if "base_weights" in doc
                else None
            ),
            normalized=bool(doc.get("normalized", True)),
        )
    elif kind == "table":
        model = linear_table(
            np.asarray(_require(doc, "matrix", path), dtype=float),
            np.asarray(_require(doc, "offset", path), dtype=float),
            bounds=doc.get("bounds"),
        )
    else:
        raise SchemaError(f"{path}: unknown model type {kind!r}")
    if "scale" in doc:
        model = scaled(model, float(doc["scale"]))
    return model


def _parse_kernel(doc: Dict[str, Any], path: str) -> MarkovKernel:
    rows = _require(doc, "rows", path)
    try:
        return MarkovKernel(np.asarray(rows, dtype=float))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{path}: malformed kernel rows: {exc}") from exc


def _parse_statistic(doc: Dict[str, Any], path: str) -> Statistic:
    mapping = _require(doc, "map", path)
    target_size = int(doc.get("target_size", int(max(mapping)) + 1))
    return Statistic(target_size=target_size, map=np.asarray(mapping, dtype=int))


def _tabulated_coefficient(table: Dict[str, Any], path: str):
    lams = [float(x) for x in _require(table, "lambda", path)]
    values = [float(x) for x in _require(table, "values", path)]
    if len(lams) != len(values):
        raise SchemaError(f"{path}: lambda/values length mismatch")

    def coeff(lam: float) -> float:
        for known, value in zip(lams, values):
            if abs(known - lam) <= 1e-12:
                return value
        raise SchemaError(f"{path}: no tabulated coefficient at lambda = {lam}")

    return coeff


def _builtin_oracle(name: str, n: int, regularity: Fraction) -> TensorFieldOracle:
    if name == "fisher":
        oracle = tau_n_oracle(2, regularity)
    elif name == "amari-chentsov":
        oracle = tau_n_oracle(3, regularity)
    elif name == "score":
        oracle = tau_n_oracle(1, regularity)
    elif name == "zero":
        oracle = zero_oracle(n, regularity)
    elif name == "tau-n":
        oracle = tau_n_oracle(n, regularity)
    else:
        raise SchemaError(f"unknown builtin oracle {name!r}")
    if oracle.degree != n:
        raise SchemaError(
            f"builtin oracle {name!r} has degree {oracle.degree}, --n gave {n}"
        )
    return oracle


def _parse_oracle(spec: str, n: int) -> tuple[TensorFieldOracle, Any]:
    """Returns the oracle and the JSON-able description used for the digest."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        return _builtin_oracle(name, n, Fraction(1)), spec
    doc = _load_json(spec)
    regularity = Fraction(doc.get("regularity", 1))
    if "builtin" in doc:
        return _builtin_oracle(doc["builtin"], n, regularity), doc
    if "linear-combination" in doc:
        terms = []
        for term in doc["linear-combination"]:
            blocks = _require(term, "partition", spec)
            coeff = _require(term, "coefficient", spec)
            if isinstance(coeff, dict):
                coeff = _tabulated_coefficient(coeff, spec)
            else:
                coeff = float(coeff)
            terms.append((partition(blocks), coeff))
        oracle = linear_combination_oracle(terms, regularity)
        if oracle.degree != n:
            raise SchemaError(
                f"{spec}: oracle degree {oracle.degree} does not match --n {n}"
            )
        return oracle, doc
    raise SchemaError(f"{spec}: oracle must be builtin or a linear-combination")


def _csv_floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise SchemaError(f"malformed number list {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands


def _cmd_tensor(args) -> Dict[str, Any]:
    doc = _load_json(args.model)
    model = _parse_model(doc, args.model)
    xi = _csv_floats(args.xi)
    n = args.n
    if args.vs:
        vs = [_csv_floats(part) for part in args.vs.split(";")]
        if len(vs) != n:
            raise SchemaError(f"--vs must give {n} directions")
        value = model_tensor(model, n, xi, vs)
        dual = model_tensor_via_roots(model, n, xi, vs)
        results = {"value": value, "value_pullback_route": dual}
    else:
        d = model.param_dim
        basis = np.eye(d)
        flat = np.empty(d**n)
        shape = (d,) * n
        for pos, multi in enumerate(np.ndindex(shape)):
            flat[pos] = model_tensor(model, n, xi, [basis[a] for a in multi])
        results = {
            "tensor": _nested(flat.reshape(shape)),
            "shape": list(shape),
        }
    return {"status": "ok", "results": results, "inputs": {"model": doc}}


def _nested(array: np.ndarray):
    if array.ndim == 0:
        return float(array)
    return [_nested(sub) for sub in array]


def _cmd_check_congruence(args) -> Dict[str, Any]:
    kernel_doc = _load_json(args.kernel)
    kernel = _parse_kernel(kernel_doc, args.kernel)
    if args.statistic:
        stat_doc = _load_json(args.statistic)
    elif "statistic" in kernel_doc:
        stat_doc = {"map": kernel_doc["statistic"]}
    else:
        raise SchemaError("need --statistic or a 'statistic' field in the kernel file")
    kappa = _parse_statistic(stat_doc, args.statistic or args.kernel)
    congruent = is_congruent(kernel, kappa)
    return {
        "status": "ok" if congruent else "fail",
        "results": {"congruent": congruent},
        "inputs": {"kernel": kernel_doc, "statistic": stat_doc},
    }


def _cmd_pushforward(args) -> Dict[str, Any]:
    kernel_doc = _load_json(args.kernel)
    kernel = _parse_kernel(kernel_doc, args.kernel)
    if args.measure:
        measure_doc = _load_json(args.measure)
        coeffs = _require(measure_doc, "coeffs", args.measure)
    else:
        measure_doc = {"coeffs": _csv_floats(args.coeffs)}
        coeffs = measure_doc["coeffs"]
    mu = signed_measure(coeffs)
    pushed = pushforward(kernel, mu)
    return {
        "status": "ok",
        "results": {
            "coeffs": [float(c) for c in pushed.coeffs],
            "total_mass": pushed.total_mass,
            "source_total_mass": mu.total_mass,
        },
        "inputs": {"kernel": kernel_doc, "measure": measure_doc},
    }


def _cmd_decompose(args) -> Dict[str, Any]:
    oracle, description = _parse_oracle(args.oracle, args.n)
    grid = tuple(_csv_floats(args.lambda_grid))
    if any(lam <= 0 for lam in grid):
        raise SchemaError("lambda grid entries must be positive")
    kwargs = dict(
        lambda_grid=grid,
        probe_size=args.probe_size,
        residual_points=args.residual_points,
        seed=args.seed,
        tolerance=args.tolerance,
    )
    if args.space == "M":
        decomposition = decompose_on_M(oracle, **kwargs)
        coefficients = {
            str(p): [float(a) for a in values]
            for p, values in decomposition.coefficients.items()
        }
        results: Dict[str, Any] = {"coefficients": coefficients}
    else:
        decomposition = decompose_on_P(oracle, **kwargs)
        results = {
            "constants": {str(p): v for p, v in decomposition.constants.items()},
            "absorbed_partitions": [str(p) for p in decomposition.absorbed],
        }
    results.update(
        {
            "lambda_grid": list(decomposition.lambda_grid),
            "residual": decomposition.residual_report,
            "congruent": decomposition.congruent,
        }
    )
    return {
        "status": "ok" if decomposition.congruent else "fail",
        "results": results,
        "inputs": {"oracle": description},
    }


def _cmd_verify(args) -> Dict[str, Any]:
    from .markov import random_congruent_kernel
    from .measures import RMeasure, power_map
    from .partitions import enumerate_partitions

    rng = np.random.default_rng(args.seed)
    checks: Dict[str, Dict[str, Any]] = {}

    # pullback invariance of tau^P under random congruent kernels
    worst = 0.0
    for trial in range(args.trials):
        n = 2 + trial % 2
        r = Fraction(1, n)
        size = int(rng.integers(2, 5))
        fibers = [int(f) for f in rng.integers(1, 4, size=size)]
        kernel, _ = random_congruent_kernel(size, fibers, seed=args.seed + trial)
        base = power_map(signed_measure(rng.uniform(0.5, 2.0, size)), r)
        vs = [RMeasure(r, rng.standard_normal(size)) for _ in range(n)]
        for p in enumerate_partitions(n):
            if p.max_block_size > 1 / r:
                continue
            family = tau_P_oracle(p, r)
            direct = family.evaluate(base, vs)
            pulled = pullback_markov(kernel, family).evaluate(base, vs)
            worst = max(worst, abs(direct - pulled) / max(1.0, abs(direct)))
    checks["pullback_invariance"] = {"max_error": worst, "pass": worst <= 1e-9}

    # score identity on statistical models
    score = 0.0
    model = categorical_simplex(3)
    for _ in range(args.trials):
        xi = rng.uniform(0.1, 0.4, 2)
        score = max(score, abs(model_tensor(model, 1, xi, [rng.standard_normal(2)])))
    checks["score_identity"] = {"max_error": score, "pass": score <= 1e-10}

    # dual-path tensor identity on a random exponential family
    dual = 0.0
    for _ in range(max(1, args.trials // 10)):
        F = rng.standard_normal((4, 2))
        ef = exponential_family(F)
        xi = rng.uniform(-0.5, 0.5, 2)
        vs = [rng.standard_normal(2) for _ in range(3)]
        dual = max(
            dual,
            abs(
                model_tensor(ef, 3, xi, vs) - model_tensor_via_roots(ef, 3, xi, vs)
            ),
        )
    checks["dual_path"] = {"max_error": dual, "pass": dual <= 1e-6}

    # decomposition round trip
    decomposition = decompose_on_M(tau_n_oracle(2, 1), seed=args.seed)
    checks["round_trip"] = {
        "max_error": decomposition.residual_report,
        "pass": decomposition.residual_report <= args.tolerance,
    }

    ok = all(check["pass"] for check in checks.values())
    return {"status": "ok" if ok else "fail", "results": {"checks": checks}, "inputs": {}}


# ---------------------------------------------------------------------------
# driver


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congruent-tensors",
        description="Tensor calculus of congruent families on finite sample spaces.",
    )
    parser.add_argument("--out", help="write the report to this file as well")
    sub = parser.add_subparsers(dest="command", required=True)

    tensor = sub.add_parser("tensor", help="canonical n-tensor of a model")
    tensor.add_argument("--model", required=True)
    tensor.add_argument("--n", type=int, required=True)
    tensor.add_argument("--xi", required=True, help="comma-separated parameter point")
    tensor.add_argument("--vs", help="semicolon-separated list of directions")
    tensor.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0)
    tensor.set_defaults(handler=_cmd_tensor)

    check = sub.add_parser("check-congruence", help="support + basis criterion")
    check.add_argument("--kernel", required=True)
    check.add_argument("--statistic")
    check.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0)
    check.set_defaults(handler=_cmd_check_congruence)

    push = sub.add_parser("pushforward", help="push a signed measure through a kernel")
    push.add_argument("--kernel", required=True)
    push.add_argument("--measure")
    push.add_argument("--coeffs", help="inline comma-separated coefficients")
    push.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0)
    push.set_defaults(handler=_cmd_pushforward)

    dec = sub.add_parser("decompose", help="canonical expansion of a congruent family")
    dec.add_argument("--oracle", required=True, help="builtin:NAME or a JSON file")
    dec.add_argument("--n", type=int, required=True)
    dec.add_argument("--space", choices=("M", "P"), default="M")
    dec.add_argument("--lambda-grid", default="0.5,1,2,4")
    dec.add_argument("--probe-size", type=int)
    dec.add_argument("--residual-points", type=int, default=200)
    dec.add_argument("--tolerance", type=float, default=1e-8)
    dec.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0)
    dec.set_defaults(handler=_cmd_decompose)

    verify = sub.add_parser("verify", help="run the built-in invariant suite")
    verify.add_argument("--trials", type=int, default=50)
    verify.add_argument("--tolerance", type=float, default=1e-8)
    verify.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0)
    verify.set_defaults(handler=_cmd_verify)

    return parser


def _emit(report: Dict[str, Any], out: Optional[str]) -> None:
    text = _serialize(report) + "\n"
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    options = {
        key: value
        for key, value in vars(args).items()
        if key not in ("handler", "out") and value is not None
    }
    try:
        body = args.handler(args)
    except SchemaError as exc:
        _emit(
            {
                "status": "error",
                "error": str(exc),
                "command": args.command,
                "library_version": __version__,
            },
            args.out,
        )
        return EXIT_SCHEMA
    except GeometryError as exc:
        _emit(
            {
                "status": "error",
                "error": str(exc),
                "command": args.command,
                "library_version": __version__,
            },
            args.out,
        )
        return EXIT_NUMERIC

    report = {
        "status": body["status"],
        "command": args.command,
        "library_version": __version__,
        "backend": ACTIVE_BACKEND,
        "options": {k: v for k, v in options.items() if k != "command"},
        "inputs_digest": _digest({"options": options, "inputs": body.get("inputs", {})}),
        "results": body["results"],
    }
    _emit(report, args.out)
    return EXIT_OK if body["status"] == "ok" else EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
