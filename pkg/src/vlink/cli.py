"""Command-line interface.

Subcommands: eval, check, moves test, kernel, gram, enumerate, random.
Exit codes: 0 success, 1 usage or input errors, 2 a theoretical invariant
failed at the requested tolerance.  All randomness comes from numpy's
default_rng (PCG64) seeded with --seed, so identical invocations produce
byte-identical output.  Complex numbers print as "re im" at 15 significant
digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .algebra import load_quantum_tangle
from .characterize import (
    enumerate_tangles,
    gram_psd,
    kernel_probe,
    random_tangle,
)
from .diagram import VldError, load_tangle, serialize_tangle
from .model import (
    TangleTensor,
    load_model,
    model_to_json,
    partition_function,
    qt_evaluate,
    random_model,
)
from .moves import check_algebraic, random_move

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return f"{value + 0.0:.15g}"


def _fmt_complex(z: complex) -> str:
    return f"{_fmt(z.real)} {_fmt(z.imag)}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="vlink",
        description="Vertex-model partition functions of virtual link diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, model=False, fmt=True):
        if model:
            p.add_argument("--model", required=True, help="model JSON file")
            p.add_argument(
                "--symmetrize",
                action="store_true",
                help="project the loaded tensor onto swap-invariant models "
                "instead of validating invariance",
            )
        if fmt:
            p.add_argument(
                "--format",
                choices=("text", "csv", "json-lines"),
                default="text",
            )
        p.add_argument("--tol", type=float, default=1e-10, help="tolerance (default 1e-10)")

    p = sub.add_parser("eval", help="evaluate diagrams (.vld) or combinations (.qtl)")
    add_common(p, model=True)
    p.add_argument("paths", nargs="+", help=".vld or .qtl files")

    p = sub.add_parser("check", help="algebraic move-invariance conditions")
    add_common(p, model=True)

    p = sub.add_parser("moves", help="random move applications must preserve f")
    add_common(p, model=True)
    p.add_argument("action", choices=("test",))
    p.add_argument("paths", nargs="+", help=".vld diagram files")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("kernel", help="determinant-tangle kernel residuals")
    add_common(p)
    p.add_argument("--model", help="model JSON file (default: seeded random model)")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--n", type=int, default=2, help="state count for random model")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--max-vertices", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gram", help="Gram matrix of glued tangle pairs (real model)")
    add_common(p, model=True)
    p.add_argument("--max-vertices", type=int, default=1)

    p = sub.add_parser("enumerate", help="list tangles up to isomorphism")
    add_common(p)
    p.add_argument("--k", type=int, required=True, help="arity (even)")
    p.add_argument("--max-vertices", type=int, default=1)

    p = sub.add_parser("random", help="emit a seeded random model or tangle")
    add_common(p)
    p.add_argument("--kind", choices=("model", "tangle"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2, help="state count (model)")
    p.add_argument("--real", action="store_true", help="real entries (model)")
    p.add_argument("--k", type=int, default=0, help="arity (tangle)")
    p.add_argument("--vertices", type=int, default=2, help="vertex count (tangle)")
    p.add_argument("--loops", type=int, default=0, help="vertexless loops (tangle)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except BrokenPipeError:
        # Downstream consumer (e.g. `head`) closed stdout; exit quietly.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1
    except (VldError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"vlink: error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace) -> int:
    handler = {
        "eval": _cmd_eval,
        "check": _cmd_check,
        "moves": _cmd_moves,
        "kernel": _cmd_kernel,
        "gram": _cmd_gram,
        "enumerate": _cmd_enumerate,
        "random": _cmd_random,
    }[args.command]
    return handler(args)


def _load_model_arg(args: argparse.Namespace):
    return load_model(args.model, project=getattr(args, "symmetrize", False))


def _emit(args: argparse.Namespace, text_line: str, record: dict) -> None:
    if args.format == "text":
        print(text_line)
    elif args.format == "csv":
        print(",".join(str(record[key]) for key in record))
    else:
        print(json.dumps(record, sort_keys=True))


def _cmd_eval(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    for path in args.paths:
        if path.endswith(".qtl"):
            value = qt_evaluate(model, load_quantum_tangle(path))
        else:
            tangle = load_tangle(path)
            if tangle.arity:
                from .model import tangle_tensor

                value = tangle_tensor(model, tangle)
            else:
                value = partition_function(model, tangle)
        if isinstance(value, TangleTensor):
            for idx in np.ndindex(value.values.shape):
                z = complex(value.values[idx])
                pos = " ".join(str(i + 1) for i in idx)
                _emit(
                    args,
                    f"{pos} {_fmt_complex(z)}",
                    {
                        "path": path,
                        "index": [i + 1 for i in idx],
                        "re": z.real + 0.0,
                        "im": z.imag + 0.0,
                    },
                )
        else:
            z = complex(value)
            _emit(
                args,
                _fmt_complex(z),
                {"path": path, "re": z.real + 0.0, "im": z.imag + 0.0},
            )
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    report = check_algebraic(model, tol=args.tol)
    verdict = "pass" if report.passed else "fail"
    if args.format == "text":
        print(f"r1 {_fmt(report.residual_r1)}")
        print(f"r2 {_fmt(report.residual_r2)}")
        print(f"r3 {_fmt(report.residual_r3)}")
        print(verdict)
    else:
        record = {
            "r1": report.residual_r1,
            "r2": report.residual_r2,
            "r3": report.residual_r3,
            "passed": report.passed,
        }
        _emit(args, "", record)
    return 0 if report.passed else 2


def _cmd_moves(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    diagrams = [load_tangle(path) for path in args.paths]
    for path, g in zip(args.paths, diagrams):
        if g.arity:
            raise ValueError(f"{path}: moves need diagrams (arity 0)")
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    applied = 0
    for _ in range(args.count):
        g = diagrams[int(rng.integers(len(diagrams)))]
        f_before = partition_function(model, g)
        try:
            _, moved = random_move(g, rng)
        except ValueError:
            continue
        applied += 1
        delta = abs(partition_function(model, moved) - f_before)
        worst = max(worst, delta / (1.0 + abs(f_before)))
    ok = worst <= args.tol
    _emit(
        args,
        f"applied {applied}\nmax_scaled_delta {_fmt(worst)}\n{'pass' if ok else 'fail'}",
        {"applied": applied, "max_scaled_delta": worst, "passed": ok},
    )
    return 0 if ok else 2


def _cmd_kernel(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    if args.model:
        model = _load_model_arg(args)
    else:
        model = random_model(args.n, rng)
    report = kernel_probe(model, args.samples, args.max_vertices, rng)
    ok = report.passed(args.tol)
    control_ok = report.negative_control > 1e-3
    verdict = "pass" if (ok and control_ok) else "fail"
    _emit(
        args,
        f"max_scaled_residual {_fmt(report.max_scaled_residual)}\n"
        f"negative_control {_fmt(report.negative_control)}\n{verdict}",
        {
            "max_scaled_residual": report.max_scaled_residual,
            "negative_control": report.negative_control,
            "passed": ok and control_ok,
        },
    )
    return 0 if (ok and control_ok) else 2


def _cmd_gram(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    report = gram_psd(model, args.max_vertices)
    for row in np.asarray(report.gram.real):
        print(",".join(_fmt(x) for x in row))
    print(f"min_eigenvalue {_fmt(report.min_eigenvalue)}", file=sys.stderr)
    return 0 if report.passed(args.tol) else 2


def _cmd_enumerate(args: argparse.Namespace) -> int:
    tangles = enumerate_tangles(args.k, args.max_vertices)
    for index, t in enumerate(tangles):
        if args.format == "json-lines":
            print(
                json.dumps(
                    {
                        "index": index,
                        "num_vertices": t.num_vertices,
                        "vld": serialize_tangle(t),
                    },
                    sort_keys=True,
                )
            )
        elif args.format == "csv":
            print(f"{index},{t.num_vertices},{t.loop_count}")
        else:
            body = serialize_tangle(t).rstrip("\n")
            print(body if body else "# empty")
            print("%%")
    print(f"count {len(tangles)}", file=sys.stderr)
    return 0


def _cmd_random(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "model":
        model = random_model(args.n, rng, real=args.real)
        sys.stdout.write(model_to_json(model))
    else:
        t = random_tangle(rng, args.k, args.vertices, args.loops)
        sys.stdout.write(serialize_tangle(t))
    return 0


if __name__ == "__main__":
    sys.exit(main())
