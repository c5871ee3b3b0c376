"""Command-line front end.

Subcommands: ``scale`` (run one scaling), ``compare`` (run all three
alternating projection methods from one start), ``diffquot`` (central
difference quotient of a divergence at the Sinkhorn output),
``capacity-scatter`` (divergence vs capacity over random trials) and ``gen``
(write a random instance file).

Exit codes: 0 success, 2 parse failure, 3 numeric domain violation,
4 unsupported option, 5 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import divergences, scaling, serialization
from .channels import ChoiMatrix, random_choi, random_density
from .errors import (
    ConvergenceError,
    DomainError,
    InvalidInputError,
    ParseError,
    SingularityError,
    UnsupportedError,
)
from .reference import REFERENCE_M, REFERENCE_N, reference_direction, reference_rho0
from .serialization import csv_line

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_UNSUPPORTED = 4
EXIT_NO_CONVERGENCE = 5

_METHODS = ("sld", "bkm", "burg")

# h = 2^-k for k = 5..40, descending in h
_DEFAULT_H_GRID = tuple(2.0 ** (-k) for k in range(5, 41))


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    parser.add_argument("--tol", type=float, default=1e-8,
                        help="stopping tolerance on the squared marginal residual (default 1e-8; 0 disables early stop)")
    parser.add_argument("--max-iters", type=int, default=200,
                        help="sweep budget (default 200)")
    parser.add_argument("--out", type=str, default=None, help="output file or directory")
    parser.add_argument("--real", action="store_true",
                        help="draw real instead of complex Gaussian instances")
    parser.add_argument("--target-p", type=str, default=None,
                        help="JSON file with the first-marginal target (default I/m)")
    parser.add_argument("--target-q", type=str, default=None,
                        help="JSON file with the second-marginal target (default I/n)")


def _load_target(path: str | None) -> np.ndarray | None:
    if path is None:
        return None
    kind, matrix, _, _ = serialization.load_matrix(path)
    if kind == "choi":
        raise ParseError(f"marginal target {path} must be a matrix or density payload")
    return matrix


def _config(args) -> scaling.ScalingConfig:
    return scaling.ScalingConfig(
        max_iters=args.max_iters,
        tol=args.tol,
        target_p=_load_target(args.target_p),
        target_q=_load_target(args.target_q),
    )


def _load_input_choi(args, loaded=None) -> ChoiMatrix:
    if getattr(args, "paper_rho0", False):
        return reference_rho0()
    if getattr(args, "input", None) is None:
        if getattr(args, "dims", None):
            n, m = args.dims
            rng = np.random.default_rng(args.seed)
            return random_choi(n, m, rng, real=args.real)
        raise ParseError("no input: give a file, --paper-rho0, or --dims")
    kind, matrix, n, m = loaded if loaded is not None else serialization.load_matrix(args.input)
    if kind == "choi":
        return ChoiMatrix(n=n, m=m, matrix=matrix)
    if kind == "density":
        dims = getattr(args, "dims", None)
        if not dims:
            raise ParseError("density input needs --dims N M to fix the block structure")
        return ChoiMatrix(n=dims[0], m=dims[1], matrix=matrix)
    raise ParseError("expected a choi or density payload")


def _trace_summary(trace: scaling.ScalingTrace | scaling.MatrixScalingTrace) -> dict:
    try:
        capacity = scaling.capacity_from_trace(trace)
    except (UnsupportedError, ConvergenceError):
        capacity = None
    return {
        "converged": trace.converged,
        "sweeps": trace.sweeps,
        "residual": trace.residuals[-1],
        "capacity": capacity,
    }


def _residual_csv(trace) -> str:
    lines = ["iter,residual"]
    lines += [csv_line(i, float(r)) for i, r in enumerate(trace.residuals)]
    return "\n".join(lines) + "\n"


def _ensure_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scale(args) -> int:
    cfg = _config(args)
    if args.method not in _METHODS:
        raise UnsupportedError(f"unknown method {args.method!r}; expected one of {_METHODS}")
    loaded = None
    if args.input is not None and not args.paper_rho0:
        loaded = serialization.load_matrix(args.input)
    if loaded is not None and loaded[0] == "matrix":
        if args.method != "sld":
            raise UnsupportedError("matrix payloads support the sld (Sinkhorn) method only")
        trace = scaling.matrix_sinkhorn(loaded[1].real, cfg)
        payload = serialization.matrix_to_payload("matrix", trace.final)
    else:
        choi = _load_input_choi(args, loaded)
        trace = scaling.alternating_projections(args.method, choi, cfg)
        payload = serialization.matrix_to_payload("choi", trace.final.matrix, trace.n, trace.m)
    summary = _trace_summary(trace)
    summary["matrix"] = payload
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        out = _ensure_dir(args.out)
        (out / "final.json").write_text(json.dumps(payload, sort_keys=True) + "\n")
        (out / "residuals.csv").write_text(_residual_csv(trace))
        (out / "summary.json").write_text(
            json.dumps({k: v for k, v in summary.items() if k != "matrix"}, sort_keys=True) + "\n"
        )
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args)
    choi = _load_input_choi(args)
    finals = {}
    for method in _METHODS:
        finals[method] = scaling.alternating_projections(method, choi, cfg).final
    lines = ["method," + ",".join(_METHODS)]
    for a in _METHODS:
        gaps = [float(np.abs(finals[a].matrix - finals[b].matrix).max()) for b in _METHODS]
        lines.append(csv_line(a, *gaps))
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.out:
        out = _ensure_dir(args.out)
        for method, choi_star in finals.items():
            serialization.save_choi(out / f"{method}.json", choi_star)
        (out / "distances.csv").write_text(table)
    return 0


def _parse_h_grid(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return _DEFAULT_H_GRID
    try:
        grid = tuple(float(tok) for tok in raw.split(","))
    except ValueError as exc:
        raise ParseError(f"invalid --h-grid: {exc}") from exc
    if not grid or any(h <= 0 for h in grid) or any(a <= b for a, b in zip(grid, grid[1:])):
        raise ParseError("--h-grid must be positive and strictly descending")
    return grid


def cmd_diffquot(args) -> int:
    cfg = _config(args)
    choi = _load_input_choi(args)
    if args.tag == "measured":
        raise UnsupportedError("measured relative entropy is not supported")
    if args.tag not in divergences.DIVERGENCES:
        raise UnsupportedError(f"unknown divergence tag {args.tag!r}")
    if args.direction:
        kind, direction, _, _ = serialization.load_matrix(args.direction)
        if kind == "choi":
            raise ParseError("perturbation direction must be a matrix payload")
    else:
        if choi.dim != REFERENCE_N * REFERENCE_M:
            raise InvalidInputError(
                "built-in perturbation direction is 4 x 4; pass --direction for other sizes"
            )
        direction = reference_direction()
    trace = scaling.operator_sinkhorn(choi, cfg)
    rho_star = trace.final.matrix
    lines = ["log10_h,delta"]
    for h in _parse_h_grid(args.h_grid):
        try:
            delta = divergences.central_difference_quotient(
                args.tag, rho_star, choi.matrix, direction, h, n=choi.n, m=choi.m
            )
        except DomainError:
            delta = float("nan")
        lines.append(csv_line(float(np.log10(h)), float(delta)))
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.out:
        Path(args.out).write_text(table)
    return 0


def _scatter_instance(n: int, rng: np.random.Generator, args) -> ChoiMatrix:
    if args.diagonal:
        a = rng.uniform(0.05, 1.0, size=(n, n))
        a /= a.sum()
        mat = np.zeros((n * n, n * n), dtype=complex)
        for j in range(n):
            for i in range(n):
                mat[j * n + i, j * n + i] = a[i, j]
        return ChoiMatrix(n=n, m=n, matrix=mat)
    return random_choi(n, n, rng, real=args.real)


def cmd_capacity_scatter(args) -> int:
    cfg = _config(args)
    n = args.dims[0]
    if len(args.dims) > 1 and args.dims[1] != n:
        raise UnsupportedError("capacity requires m = n; pass a single dimension")
    tags = tuple(args.tags.split(","))
    for tag in tags:
        if tag == "measured":
            raise UnsupportedError("measured relative entropy is not supported")
        if tag == "kl" and not args.diagonal:
            raise UnsupportedError("the classical kl tag needs the --diagonal ensemble")
        if tag not in divergences.DIVERGENCES:
            raise UnsupportedError(f"tag {tag!r} is not available for scatter experiments")
    header = ["trial", "converged"] + [f"D_{tag}" for tag in tags] + ["neg_log_capacity"]
    lines = [",".join(header)]
    gaps: dict[str, list[float]] = {tag: [] for tag in tags}
    for trial in range(args.trials):
        rng = np.random.default_rng(args.seed + trial)
        choi0 = _scatter_instance(n, rng, args)
        trace = scaling.operator_sinkhorn(choi0, cfg)
        if not trace.converged:
            row = [trial, 0] + [float("nan")] * (len(tags) + 1)
            lines.append(csv_line(*row))
            continue
        neg_log_cap = -float(np.log(scaling.capacity_from_trace(trace)))
        values = []
        for tag in tags:
            if tag == "kl":
                values.append(
                    divergences.divergence(
                        "kl", np.diag(trace.final.matrix).real, np.diag(choi0.matrix).real
                    )
                )
            else:
                values.append(divergences.divergence(tag, trace.final.matrix, choi0.matrix))
        for tag, value in zip(tags, values):
            gaps[tag].append(abs(value - neg_log_cap))
        lines.append(csv_line(trial, 1, *[float(v) for v in values], float(neg_log_cap)))
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    summary = {
        f"mean_gap_{tag}": (float(np.mean(v)) if v else None) for tag, v in gaps.items()
    }
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    if args.out:
        Path(args.out).write_text(table)
    return 0


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    n, m = args.dims
    if args.kind == "choi":
        payload = serialization.matrix_to_payload(
            "choi", random_choi(n, m, rng, real=args.real).matrix, n, m
        )
    elif args.kind == "density":
        payload = serialization.matrix_to_payload("density", random_density(n * m, rng, real=args.real))
    elif args.kind == "matrix":
        a = rng.uniform(0.05, 1.0, size=(n, m))
        payload = serialization.matrix_to_payload("matrix", (a / a.sum()).astype(complex))
    else:
        raise UnsupportedError(f"unknown kind {args.kind!r}")
    text = json.dumps(payload, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opsinkhorn",
        description="Matrix and operator Sinkhorn scaling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scale = sub.add_parser("scale", help="run one scaling / alternating projection")
    scale.add_argument("input", nargs="?", help="matrix/choi JSON file")
    scale.add_argument("--paper-rho0", action="store_true", help="use the built-in 4x4 reference input")
    scale.add_argument("--method", default="sld", help="sld, bkm or burg (default sld)")
    scale.add_argument("--dims", type=int, nargs=2, metavar=("N", "M"), default=None,
                       help="block structure for density inputs")
    _common_flags(scale)
    scale.set_defaults(func=cmd_scale)

    compare = sub.add_parser("compare", help="run sld, bkm and burg from one start")
    compare.add_argument("input", nargs="?", help="choi JSON file")
    compare.add_argument("--paper-rho0", action="store_true", help="use the built-in 4x4 reference input")
    compare.add_argument("--dims", type=int, nargs=2, metavar=("N", "M"), default=None,
                         help="draw a random seeded instance of this block shape")
    _common_flags(compare)
    compare.set_defaults(func=cmd_compare)

    diffquot = sub.add_parser("diffquot", help="central difference quotient at the Sinkhorn output")
    diffquot.add_argument("input", nargs="?", help="choi JSON file")
    diffquot.add_argument("--paper-rho0", action="store_true", help="use the built-in 4x4 reference input")
    diffquot.add_argument("--dims", type=int, nargs=2, metavar=("N", "M"), default=None,
                          help="draw a random seeded instance of this block shape")
    diffquot.add_argument("--tag", default="bs", help="divergence tag (default bs)")
    diffquot.add_argument("--direction", default=None,
                          help="JSON matrix file with the perturbation direction (default diag(1,-1,-1,1))")
    diffquot.add_argument("--h-grid", default=None, help="comma-separated descending step sizes")
    _common_flags(diffquot)
    diffquot.set_defaults(func=cmd_diffquot)

    scatter = sub.add_parser("capacity-scatter", help="divergences vs capacity on random instances")
    scatter.add_argument("--dims", type=int, nargs="+", default=[2], metavar="N",
                         help="system dimension (m = n, default 2)")
    scatter.add_argument("--trials", type=int, default=30, help="number of random instances (default 30)")
    scatter.add_argument("--tags", default="umegaki",
                         help="comma-separated divergence tags (default umegaki)")
    scatter.add_argument("--diagonal", action="store_true",
                         help="draw diagonal (classical matrix scaling) instances")
    _common_flags(scatter)
    scatter.set_defaults(func=cmd_capacity_scatter)

    gen = sub.add_parser("gen", help="write a random instance file")
    gen.add_argument("--dims", type=int, nargs=2, metavar=("N", "M"), default=[2, 2])
    gen.add_argument("--kind", default="choi", help="choi, density or matrix (default choi)")
    _common_flags(gen)
    gen.set_defaults(func=cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidInputError, DomainError, SingularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except UnsupportedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
