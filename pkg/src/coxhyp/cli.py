"""Command-line interface.

Exit codes: 0 success, 1 a ``verify-paper`` check failed, 2 input error,
3 a zero-row link was found on a matrix that is neither parabolic nor
reducible (``lemma-b``).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import tolerance as tol
from .anm import (
    AlmostNegativeMatrix,
    LemmaBConclusion,
    check_lemma_b,
    classify,
    complement,
    format_entry,
    format_matrix,
    link,
    parse_matrix,
    principal_submatrix,
)
from .coxmat import CoxeterSystem, cosine_matrix, parse_coxeter_system
from .errors import CoxError
from .hyperbolicity import decide
from .moussong import chamber, enumerate_davis_cells
from .nerve import (
    GeodesicResult,
    build_nerve,
    intrinsic_distance,
    link_complex,
    project_to_link,
    suspension_distance,
    verify_counterexamples,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2, 3
DEFAULT_RESOLUTION = 256
VERIFY_RESOLUTION = 512
MIN_RESOLUTION = 8


class InputError(Exception):
    pass


def _fmt_set(T) -> str:
    return "{" + ",".join(str(i + 1) for i in T) + "}"


def _fmt_vec(x) -> str:
    return "[" + ", ".join(format(float(v), ".6g") for v in x) + "]"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def load_system(path: str) -> CoxeterSystem:
    if Path(path).suffix != ".cox":
        raise InputError(f"{path}: this command needs a Coxeter system (.cox)")
    return parse_coxeter_system(_read(path))


def load_matrix(path: str) -> AlmostNegativeMatrix:
    suffix = Path(path).suffix
    if suffix == ".cox":
        return cosine_matrix(parse_coxeter_system(_read(path)))
    if suffix == ".anm":
        return parse_matrix(_read(path))
    raise InputError(f"{path}: expected a .cox or .anm file")


def parse_index_set(text: str | None, n: int) -> tuple[int, ...]:
    if text is None or not text.strip():
        return ()
    try:
        idx = [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad index set {text!r}; use 1-based indices like 1,2") from None
    for i in idx:
        if not 1 <= i <= n:
            raise InputError(f"index {i} out of range 1..{n}")
    if len(set(idx)) != len(idx):
        raise InputError(f"index set {text!r} has duplicates")
    return tuple(sorted(i - 1 for i in idx))


def parse_point(text: str | None, A: AlmostNegativeMatrix, flag: str) -> np.ndarray:
    if text is None:
        raise InputError(f"{flag} is required")
    try:
        x = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"bad coordinates for {flag}: {text!r}") from None
    if x.shape != (A.n,):
        raise InputError(f"{flag} needs {A.n} coordinates, got {x.size}")
    norm2 = float(x @ A.a @ x)
    if not norm2 > 0:
        raise InputError(f"{flag} has non-positive norm and is not a direction in the nerve")
    return x / math.sqrt(norm2)


def _resolution(args, default: int) -> int:
    r = default if args.resolution is None else args.resolution
    if r < MIN_RESOLUTION:
        raise InputError(f"--resolution must be at least {MIN_RESOLUTION}")
    return r


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# -- commands ---------------------------------------------------------------

def cmd_classify(args) -> int:
    A = load_matrix(args.file)
    I = parse_index_set(args.I, A.n)
    M = principal_submatrix(A, I) if I else A
    cls = classify(M)
    _emit(args, {"class": cls.value, "order": M.n, "index": [i + 1 for i in (I or range(A.n))]}, cls.value)
    return EXIT_OK


def cmd_link(args) -> int:
    A = load_matrix(args.file)
    I = parse_index_set(args.I, A.n)
    L = link(A, I)
    rest = complement(A.n, I)
    payload = dict(L.to_json(), index=[i + 1 for i in rest])
    _emit(args, payload, format_matrix(L))
    return EXIT_OK


def _geodesic_text(result: GeodesicResult, origin=None) -> str:
    dist = "inf" if math.isinf(result.distance) else format(result.distance, ".6g")
    lines = [f"distance: {dist}", f"error_bound: {result.error_bound:.6g}", f"resolution: {result.resolution}", "path:"]
    for p in result.path:
        cell = p.cell if origin is None else tuple(origin[i] for i in p.cell)
        lines.append(f"  {_fmt_set(cell)}: {_fmt_vec(p.coeffs)}")
    return "\n".join(lines)


def _write_path_outputs(args, gram: np.ndarray, result: GeodesicResult) -> None:
    n = gram.shape[0]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "arclength", "cell"] + [f"x{k + 1}" for k in range(n)])
            s = 0.0
            prev = None
            for k, p in enumerate(result.path):
                x = p.ambient(n)
                if prev is not None:
                    s += math.acos(min(1.0, max(-1.0, float(prev @ gram @ x))))
                w.writerow([k, repr(s), " ".join(str(i + 1) for i in p.cell)] + [repr(float(v)) for v in x])
                prev = x
    if args.plot:
        from .plotting import plot_geodesic

        plot_geodesic(gram, result, args.plot)


def cmd_nerve_dist(args) -> int:
    A = load_matrix(args.file)
    res = _resolution(args, DEFAULT_RESOLUTION)
    N = build_nerve(A)
    x, y = parse_point(args.x, A, "--x"), parse_point(args.y, A, "--y")
    result = intrinsic_distance(N, x, y, res)
    _emit(args, result.to_json(), _geodesic_text(result))
    if result.path:
        _write_path_outputs(args, A.a, result)
    return EXIT_OK


def cmd_suspension_dist(args) -> int:
    A = load_matrix(args.file)
    res = _resolution(args, DEFAULT_RESOLUTION)
    N = build_nerve(A)
    x, y = parse_point(args.x, A, "--x"), parse_point(args.y, A, "--y")
    if args.v is None:
        base, px, py, tx, ty = N, x, y, math.pi / 2, math.pi / 2
    else:
        if not 1 <= args.v <= A.n:
            raise InputError(f"--v must be in 1..{A.n}")
        v = args.v - 1
        base = link_complex(N, [v])
        tx, px = project_to_link(N, v, x)
        ty, py = project_to_link(N, v, y)
    result = suspension_distance(base, px, py, res, polar_x=tx, polar_y=ty)
    payload = dict(result.to_json(), polar=[tx, ty])
    if args.v is not None:
        payload["path"] = [dict(p, cell=[base.origin[i - 1] + 1 for i in p["cell"]]) for p in payload["path"]]
    text = _geodesic_text(result, base.origin) + f"\npolar: {tx:.6g} {ty:.6g}"
    _emit(args, payload, text)
    if result.path:
        _write_path_outputs(args, base.gram.a, result)
    return EXIT_OK


def cmd_decide(args) -> int:
    sys_ = load_system(args.file)
    verdict = decide(sys_)
    _emit(args, verdict.to_json(sys_), verdict.describe(sys_))
    return EXIT_OK


def cmd_chamber(args) -> int:
    sys_ = load_system(args.file)
    C = chamber(sys_)
    lines = [f"u_{sys_.label(j)} = {_fmt_vec(u)}" for j, u in enumerate(C.dual_basis)]
    lines.append(f"apex = {_fmt_vec(C.apex)}")
    for T, q in C.vertices.items():
        lines.append(f"q_{sys_.format_subset(T)} = {_fmt_vec(q)}")
    _emit(args, C.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_davis(args) -> int:
    sys_ = load_system(args.file)
    P = enumerate_davis_cells(sys_)
    up: dict[int, list[int]] = {k: [] for k in range(len(P.cells))}
    for child, parent in P.covers:
        up[child].append(parent)
    lines = [f"cells: {len(P.cells)} (|W| = {P.group_order})"]
    for k, c in enumerate(P.cells):
        lines.append(f"{k}\t{c.label(sys_)}\t-> {' '.join(str(p) for p in up[k]) or '-'}")
    _emit(args, P.to_json(sys_), "\n".join(lines))
    if args.plot:
        from .plotting import plot_davis_poset

        plot_davis_poset(sys_, P, args.plot)
    return EXIT_OK


def cmd_verify(args) -> int:
    res = _resolution(args, VERIFY_RESOLUTION)
    checks = verify_counterexamples(res)
    payload = {
        "checks": [
            {"name": c.name, "passed": c.passed, "value": c.value, "expected": c.expected} for c in checks
        ],
        "all_passed": all(c.passed for c in checks),
    }
    _emit(args, payload, "\n".join(c.line() for c in checks))
    return EXIT_OK if payload["all_passed"] else EXIT_CHECK_FAILED


def cmd_lemma_b(args) -> int:
    A = load_matrix(args.file)
    report = check_lemma_b(A)
    lines = ["witnesses:"]
    lines += [f"  I={_fmt_set(I)} row {r + 1}" for I, r in report.witnesses] or ["  (none)"]
    concl = report.conclusion.value
    if report.split is not None:
        concl += f" {_fmt_set(report.split[0])} | {_fmt_set(report.split[1])}"
    lines.append(f"conclusion: {concl}")
    payload = {
        "witnesses": [{"I": [i + 1 for i in I], "row": r + 1} for I, r in report.witnesses],
        "conclusion": report.conclusion.value,
        "split": None if report.split is None else [[i + 1 for i in part] for part in report.split],
    }
    _emit(args, payload, "\n".join(lines))
    return EXIT_VIOLATION if report.conclusion is LemmaBConclusion.VIOLATION else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for the positive-definite and zero tests (default 1e-9)")
    common.add_argument("--resolution", type=int, default=None,
                        help=f"face sampling resolution for distance commands (default {DEFAULT_RESOLUTION})")
    common.add_argument("--I", dest="I", default=None, help="1-based index set, e.g. 1,2")

    parser = argparse.ArgumentParser(prog="coxhyp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, file=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if file:
            p.add_argument("file")
        p.set_defaults(func=func)
        return p

    add("classify", cmd_classify, "classify a matrix (or its principal submatrix on --I)")
    add("link", cmd_link, "link matrix lk(I, A)")
    for name, func, help_ in [
        ("nerve-dist", cmd_nerve_dist, "intrinsic distance in the nerve"),
        ("suspension-dist", cmd_suspension_dist, "distance in the suspension of the nerve or of a vertex link"),
    ]:
        p = add(name, func, help_)
        p.add_argument("--x", required=True, help="ambient coordinates, comma separated")
        p.add_argument("--y", required=True, help="ambient coordinates, comma separated")
        p.add_argument("--csv", default=None, help="write the sampled path as CSV")
        p.add_argument("--plot", default=None, help="render the path profile to an image file")
        if name == "suspension-dist":
            p.add_argument("--v", type=int, default=None, help="1-based vertex whose link is suspended")
    add("decide", cmd_decide, "decide Gromov-hyperbolicity of a Coxeter system")
    add("chamber", cmd_chamber, "Moussong-metric chamber of a finite Coxeter system")
    p = add("davis", cmd_davis, "cells of the Davis complex of a finite Coxeter system")
    p.add_argument("--plot", default=None, help="render the Hasse diagram to an image file")
    add("verify-paper", cmd_verify, "reproduce the three counterexample computations", file=False)
    add("lemma-b", cmd_lemma_b, "scan for zero-row links and check the splitting conclusion")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    try:
        if args.tol is not None:
            with tol.relative_tolerance(args.tol):
                return args.func(args)
        return args.func(args)
    except (InputError, CoxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
