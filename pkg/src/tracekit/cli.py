"""Command-line front end: tracekit <subcommand> [flags].

Subcommands: estimate, decompose, uniqueness, check-invariance, sample.
All randomness derives from --seed through the substream layout, so a
repeated invocation with identical flags and inputs produces
byte-identical output (fixed JSON key order, floats at 17 significant
digits).  Exit codes: 0 success, 1 usage or input error, 2 numerical
check failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .estimator import (
    EstimatorConfig,
    LinearOperator,
    estimate_trace,
)
from .formats import (
    MatrixMarketError,
    complex_pair,
    dumps,
    matrix_pairs,
    parse_json_dense,
    parse_matrix_market,
    write_report_json,
)
from .linalg import as_matrix, normalized_trace, operator_norm_hermitian
from .sphere import (
    CHUNK_OFFSET_PROBES,
    StreamSpec,
    gaussian_matrix,
    sample_unit_vectors_chunked,
    spawn_stream,
)
from .uniqueness import solve_unique_functional
from .unitary import decompose_into_unitaries, determinant, rephase_to_det_one

__all__ = ["main"]


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{value} is not in [0, 2**64)")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not (value > 0.0 and np.isfinite(value)):
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive finite number")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_uint64, default=0,
                        help="master seed, 64-bit unsigned (default 0)")
    common.add_argument("--samples", type=_positive_int, default=100000,
                        help="number of sphere draws (default 100000)")
    common.add_argument("--tolerance", type=_positive_float, default=1e-10,
                        help="residual tolerance for pass/fail gates (default 1e-10)")
    common.add_argument("--z", type=_positive_float, default=3.0,
                        help="confidence radius in standard errors (default 3)")
    common.add_argument("--format", choices=("mm", "json"), default="mm",
                        help="matrix file format (default mm)")
    common.add_argument("--output", metavar="PATH",
                        help="write the report here instead of stdout")
    common.add_argument("--raw", action="store_true",
                        help="report the raw trace (n times the normalized one)")
    common.add_argument("--no-check", action="store_true",
                        help="estimate: always exit 0, skip the exact-value gate")
    common.add_argument("--det-one", action="store_true",
                        help="decompose: rephase every unitary to determinant 1")
    common.add_argument("--random-unitary", action="store_true",
                        help="check-invariance: draw B from a seeded decomposition")
    common.add_argument("--trusted", action="store_true",
                        help="skip the linearity spot-check on operators")

    parser = argparse.ArgumentParser(
        prog="tracekit",
        description="Randomized trace estimation and its supporting certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common],
                       help="estimate the normalized trace of a matrix file")
    p.add_argument("matrix", help="path to the input matrix")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("decompose", parents=[common],
                       help="write a matrix as a sum of at most four unitaries")
    p.add_argument("matrix", help="path to the input matrix")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("uniqueness", parents=[common],
                       help="solve for the unique normalized tracial functional")
    p.add_argument("--dim", type=_positive_int, required=True,
                   help="matrix dimension n")
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("check-invariance", parents=[common],
                       help="verify the unitary change of variables on random draws")
    p.add_argument("matrix", help="path to the input matrix A")
    p.add_argument("--unitary", metavar="PATH",
                   help="path to the unitary B (or use --random-unitary)")
    p.set_defaults(func=cmd_check_invariance)

    p = sub.add_parser("sample", parents=[common],
                       help="emit seeded unit vectors from the sphere of C^n")
    p.add_argument("--dim", type=_positive_int, required=True,
                   help="vector dimension n")
    p.add_argument("--count", type=_positive_int, default=1,
                   help="number of vectors (default 1)")
    p.set_defaults(func=cmd_sample)
    return parser


def _load_matrix(path: str, fmt: str) -> np.ndarray:
    text = Path(path).read_text()
    parsed = parse_matrix_market(text) if fmt == "mm" else parse_json_dense(text)
    return as_matrix(parsed, f"matrix file {path!r}")


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args) -> int:
    a = _load_matrix(args.matrix, args.format)
    op = LinearOperator.from_matrix(a)
    config = EstimatorConfig(z_multiplier=args.z, check_linearity=not args.trusted)
    report = estimate_trace(op, args.samples, StreamSpec(args.seed, 0), config)
    report.exact = normalized_trace(a)
    if args.raw:
        n = a.shape[0]
        report = replace(
            report,
            mean=report.mean * n,
            stderr=report.stderr * n,
            ci_radius=report.ci_radius * n,
            exact=report.exact * n,
        )
    abs_error = report.abs_error()
    _emit(write_report_json(report, abs_error=abs_error), args)
    if args.no_check:
        return 0
    return 0 if abs_error <= args.z * report.stderr else 2


def cmd_decompose(args) -> int:
    a = _load_matrix(args.matrix, args.format)
    dec = decompose_into_unitaries(a)
    terms = list(zip(dec.coefficients, dec.unitaries))
    if args.det_one:
        rephased = []
        for c, u in terms:
            u2, c2 = rephase_to_det_one(u, c)
            rephased.append((c2, u2))
        terms = rephased

    n = a.shape[0]
    total = np.zeros_like(a)
    eye = np.eye(n)
    unitarity = 0.0
    term_docs = []
    for c, u in terms:
        total += c * u
        unitarity = max(unitarity, float(np.linalg.norm(np.conj(u).T @ u - eye)))
        term_docs.append({
            "coefficient": complex_pair(c),
            "det": complex_pair(determinant(u)),
            "unitary": matrix_pairs(u),
        })
    reconstruction = float(np.linalg.norm(total - a))

    doc = {
        "n": n,
        "terms": term_docs,
        "reconstruction_residual": reconstruction,
        "unitarity_residual": unitarity,
    }
    _emit(dumps(doc) + "\n", args)
    scale = max(1.0, float(np.linalg.norm(a)))
    ok = reconstruction <= args.tolerance * scale and unitarity <= args.tolerance * n
    return 0 if ok else 2


def cmd_uniqueness(args) -> int:
    solution = solve_unique_functional(args.dim)
    doc = {
        "dim": solution.dim,
        "solution": matrix_pairs(solution.values),
        "nullspace_dim": solution.nullspace_dim,
        "residual": solution.residual,
    }
    _emit(dumps(doc) + "\n", args)
    target = np.eye(args.dim) / args.dim
    gap = float(np.max(np.abs(solution.values - target)))
    ok = gap <= args.tolerance and solution.nullspace_dim == 1
    return 0 if ok else 2


def cmd_check_invariance(args) -> int:
    a = _load_matrix(args.matrix, args.format)
    n = a.shape[0]
    if args.random_unitary == (args.unitary is not None):
        raise ValueError("need exactly one of --unitary PATH or --random-unitary")
    if args.random_unitary:
        stream = spawn_stream(StreamSpec(args.seed, CHUNK_OFFSET_PROBES))
        g = gaussian_matrix(stream, n)
        h = (g + np.conj(g).T) / 2.0
        h = h / max(operator_norm_hermitian(h), 1.0)
        b = decompose_into_unitaries(h).unitaries[0]
    else:
        b = _load_matrix(args.unitary, args.format)
        if b.shape[0] != n:
            raise ValueError(f"unitary is {b.shape[0]} x {b.shape[0]}, matrix is {n} x {n}")
    unitarity = float(np.linalg.norm(np.conj(b).T @ b - np.eye(n)))
    if unitarity > 1e-10:
        raise ValueError(f"b is not unitary: ||B*B - I||_F = {unitarity:.3e}")

    # Batched evaluation of the per-draw identity <A B x, x> = <B A z, z>
    # with x = B* z; rows of Z are the draws.
    z = sample_unit_vectors_chunked(StreamSpec(args.seed, 0), n, args.samples)
    x = z @ np.conj(b)
    lhs = np.sum((x @ (a @ b).T) * np.conj(x), axis=1)
    rhs = np.sum((z @ (b @ a).T) * np.conj(z), axis=1)
    max_gap = float(np.max(np.abs(lhs - rhs)))
    bound = args.tolerance * (1.0 + float(np.linalg.norm(a)))

    doc = {
        "n": n,
        "samples": args.samples,
        "max_gap": max_gap,
        "bound": bound,
        "unitarity_residual": unitarity,
        "seed": args.seed,
    }
    _emit(dumps(doc) + "\n", args)
    return 0 if max_gap <= bound else 2


def cmd_sample(args) -> int:
    vectors = sample_unit_vectors_chunked(StreamSpec(args.seed, 0), args.dim, args.count)
    _emit(dumps(matrix_pairs(vectors)) + "\n", args)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
