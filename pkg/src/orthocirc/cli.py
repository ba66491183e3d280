"""Command-line front end.

Every subcommand writes one machine-readable record to standard output
(JSON, except `bench` which emits a CSV table) and diagnostics to standard
error.  Exit codes: 0 success, 1 input or validation error, 2 numerical
error (singular factorization, precision failure, residue blow-up).

Variables are addressed as X1..Xd (1-based, so X1 is variable id 0) or as
raw 0-based ids.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .circuit import Circuit, evaluate, max_layer_size, validate
from .domains import is_finite
from .errors import (
    NumericalError,
    OrthocircError,
    PrecisionError,
    SingularityError,
)
from .generator import GenSpec, generate_circuit
from .io import read_circuit, write_circuit
from .marginalize import MacCounter, MarginalCostReport, classify_scopes, marginal_with_report
from .oracle import brute_force_marginal, brute_force_z, quadrature_z
from .orthonormalize import orthonormalize
from .squaring import evaluate_squared_integrated, square_circuit


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_var(token: str, num_vars: int) -> int:
    token = token.strip()
    if token.upper().startswith("X"):
        try:
            var = int(token[1:]) - 1
        except ValueError:
            raise UsageError(f"cannot parse variable {token!r}")
    else:
        try:
            var = int(token)
        except ValueError:
            raise UsageError(f"cannot parse variable {token!r}")
    if not 0 <= var < num_vars:
        raise UsageError(f"variable {token!r} outside the circuit's {num_vars} variables")
    return var


def _parse_assignment(spec: str, circuit: Circuit) -> dict[int, object]:
    assignment: dict[int, object] = {}
    if not spec:
        return assignment
    for item in spec.split(","):
        if "=" not in item:
            raise UsageError(f"assignment item {item!r} is not k=v")
        key, value = item.split("=", 1)
        var = _parse_var(key, circuit.num_vars)
        if is_finite(circuit.domains[var]):
            try:
                assignment[var] = int(value)
            except ValueError:
                raise UsageError(f"variable {key!r} is finite; cannot parse {value!r} as integer")
        else:
            try:
                assignment[var] = float(value)
            except ValueError:
                raise UsageError(f"cannot parse {value!r} as decimal")
    return assignment


def _parse_varset(spec: str, circuit: Circuit) -> frozenset[int]:
    if not spec:
        return frozenset()
    return frozenset(_parse_var(tok, circuit.num_vars) for tok in spec.split(","))


def _load(path: str) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return read_circuit(fh.read())


def _emit(record) -> None:
    print(json.dumps(record, indent=2))


def _report_record(report) -> dict:
    return {
        "method": report.method,
        "layer_count": report.layer_count,
        "max_layer_size": report.max_layer_size,
        "phi_y": report.phi_y,
        "phi_z": report.phi_z,
        "phi_yz": report.phi_yz,
        "total_macs": report.total_macs,
        "squared_width_layers": report.squared_width_layers,
    }


def _cmd_validate(args) -> int:
    report = validate(_load(args.file))
    _emit(
        {
            "decomposable": report.decomposable,
            "structured_decomposable": report.structured_decomposable,
            "orthonormal": report.orthonormal,
            "violations": [{"layer": lid, "reason": why} for lid, why in report.violations],
        }
    )
    return 0


def _cmd_eval(args) -> int:
    circuit = _load(args.file)
    value = evaluate(circuit, _parse_assignment(args.assign, circuit))
    _emit({"value": [value.real, value.imag]})
    return 0


def _cmd_square(args) -> int:
    circuit = _load(args.file)
    squared = square_circuit(circuit)
    text = write_circuit(squared.circuit)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    _emit({"written": args.output, "layers": len(squared.circuit.layers)})
    return 0


def _cmd_marginalize(args) -> int:
    circuit = _load(args.file)
    z = _parse_varset(args.marg, circuit)
    y = _parse_assignment(args.keep, circuit)
    if args.method == "oracle":
        counter = MacCounter()
        value = brute_force_marginal(circuit, y, z, counter=counter)
        part = classify_scopes(circuit, z)
        report = MarginalCostReport(
            method="oracle",
            layer_count=len(circuit.layers),
            max_layer_size=max_layer_size(circuit),
            phi_y=len(part.phi_y),
            phi_z=len(part.phi_z),
            phi_yz=len(part.phi_yz),
            total_macs=counter.total,
            by_layer=dict(counter.by_layer),
        )
    else:
        value, report = marginal_with_report(circuit, y, z, args.method)
    _emit({"value": value, "method": args.method, "cost": _report_record(report)})
    return 0


def _cmd_orthonormalize(args) -> int:
    circuit = _load(args.file)
    result = orthonormalize(circuit)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(write_circuit(result.circuit))
    beta = result.beta
    _emit({"written": args.output, "beta": beta, "partition_function": 1.0 / (beta * beta)})
    return 0


def _cmd_partition(args) -> int:
    circuit = _load(args.file)
    if args.method == "oracle":
        finite = all(is_finite(dom) for dom in circuit.domains)
        value = brute_force_z(circuit) if finite else quadrature_z(circuit)
    elif args.method == "naive":
        value = evaluate_squared_integrated(square_circuit(circuit), {}, circuit.full_scope())
    else:
        beta = orthonormalize(circuit).beta
        value = 1.0 / (beta * beta)
    _emit({"partition_function": value, "method": args.method})
    return 0


def _cmd_gen(args) -> int:
    spec = GenSpec(
        shape=args.shape,
        width=args.k,
        product_kind=args.kind,
        param_mode=args.params,
        seed=args.seed,
        domain_size=args.domain,
    )
    circuit = generate_circuit(args.vars, spec)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(write_circuit(circuit))
    _emit({"written": args.output, "layers": len(circuit.layers), "seed": args.seed})
    return 0


def _default_evidence(circuit: Circuit, kept) -> dict[int, object]:
    # Zero is inside every supported domain; used when bench gets no --keep.
    return {var: 0 if is_finite(circuit.domains[var]) else 0.0 for var in kept}


def _cmd_bench(args) -> int:
    circuit = _load(args.file)
    z = _parse_varset(args.marg, circuit)
    kept = sorted(circuit.full_scope() - z)
    y = _parse_assignment(args.keep, circuit) if args.keep else _default_evidence(circuit, kept)
    rows = []
    for method in ("fast", "naive"):
        value, report = marginal_with_report(circuit, y, z, method)
        times = []
        for _ in range(args.repeat):
            start = time.perf_counter()
            marginal_with_report(circuit, y, z, method)
            times.append(time.perf_counter() - start)
        rows.append(
            {
                "method": method,
                "value": value,
                "total_macs": report.total_macs,
                "phi_y": report.phi_y,
                "phi_z": report.phi_z,
                "phi_yz": report.phi_yz,
                "layer_count": report.layer_count,
                "max_layer_size": report.max_layer_size,
                "wall_mean_s": sum(times) / len(times),
                "wall_min_s": min(times),
            }
        )
    header = [
        "method",
        "total_macs",
        "phi_y",
        "phi_z",
        "phi_yz",
        "layer_count",
        "max_layer_size",
        "wall_mean_s",
        "wall_min_s",
    ]
    print(",".join(header))
    for row in rows:
        print(",".join(f"{row[key]:.9g}" if isinstance(row[key], float) else str(row[key]) for key in header))
    ratio = rows[1]["total_macs"] / max(rows[0]["total_macs"], 1)
    print(f"naive/fast MAC ratio: {ratio:.3f}", file=sys.stderr)
    if args.plot:
        from .report import render_bench_figure

        render_bench_figure(rows, args.plot)
        print(f"figure written to {args.plot}", file=sys.stderr)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="orthocirc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural and orthonormality flags")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("eval", help="evaluate the circuit at one assignment")
    p.add_argument("file")
    p.add_argument("--assign", required=True, help="comma-separated k=v pairs, e.g. X1=0,X2=1")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("square", help="write the squared circuit")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_square)

    p = sub.add_parser("marginalize", help="marginal mass of the squared circuit")
    p.add_argument("file")
    p.add_argument("--keep", default="", help="evidence as k=v pairs over the kept variables")
    p.add_argument("--marg", default="", help="comma-separated variables to marginalize")
    p.add_argument("--method", choices=("fast", "naive", "oracle"), default="fast")
    p.set_defaults(func=_cmd_marginalize)

    p = sub.add_parser("orthonormalize", help="rewrite with semi-unitary sums")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_orthonormalize)

    p = sub.add_parser("partition", help="partition function of the squared circuit")
    p.add_argument("file")
    p.add_argument("--method", choices=("naive", "oracle", "orthonormalize"), default="oracle")
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("gen", help="generate a seeded random circuit file")
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--domain", type=int, default=2)
    p.add_argument("--shape", choices=("chain", "balanced", "random"), default="balanced")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kind", choices=("hadamard", "kronecker", "mixed"), default="mixed")
    p.add_argument("--params", choices=("unitary", "generic"), default="unitary")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="MAC counts and wall times, fast vs naive")
    p.add_argument("file")
    p.add_argument("--marg", required=True)
    p.add_argument("--keep", default="")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--plot", default=None, help="write a comparison figure to this path")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (SingularityError, NumericalError, PrecisionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OrthocircError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
