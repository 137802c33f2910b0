"""Command line entry point: ``akgeo analyze|verify|kodaira|paper-check``.

Exit codes: 0 success, 1 a verification or check failed, 2 bad input or a
runtime error inside the pipeline.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from akgeo.errors import AkgeoError, SpecError
from akgeo.families import DEFAULT_ZETA, kodaira_thurston, nakamura
from akgeo.report import (
    PipelineOptions,
    analyze,
    default_tolerance,
    expected_for,
    jsonable,
    load_spec,
    run_pipeline,
    verify,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
GRID_KEYS = {"nakamura": ("t1", "t2", "t3", "t4"), "kodaira_thurston": ("a",)}


class UsageError(AkgeoError):
    pass


def parse_grid(text: str) -> tuple[str, list[float]]:
    """``name=start:step:stop`` (stop inclusive) or ``name=v1,v2,...``."""
    name, sep, rng = text.partition("=")
    if not sep or not name:
        raise UsageError(f"grid must look like name=start:step:stop, got {text!r}")
    try:
        if ":" in rng:
            start, step, stop = (float(x) for x in rng.split(":"))
            if step <= 0:
                raise UsageError(f"grid step must be positive in {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            if count < 1:
                raise UsageError(f"empty grid {text!r}")
            values = [round(start + k * step, 12) for k in range(count)]
        else:
            values = [float(x) for x in rng.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    return name.strip(), values


def parse_t(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--t expects four comma-separated numbers, got {text!r}") from None
    if len(vals) != 4:
        raise UsageError(f"--t expects four numbers, got {len(vals)}")
    return vals


def _tol(args) -> float:
    return args.tol if args.tol is not None else default_tolerance()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    tol = _tol(args)
    spec = load_spec(args.spec)
    report = analyze(spec, PipelineOptions(tol=tol, m_max=args.m_max, mode_bound=args.mode_bound))
    _emit(report.to_json() if args.report == "json" else report.to_text(), args.out)
    if report.verification is not None and not report.verification.passed:
        return EXIT_FAIL
    return EXIT_OK


def _respec(spec, values: dict[str, float]):
    if spec.family == "kodaira_thurston":
        return kodaira_thurston(values.get("a", spec.params["a"]))
    p = spec.params
    t = [values.get(k, p[k]) for k in GRID_KEYS["nakamura"]]
    return nakamura(t, p.get("zeta", DEFAULT_ZETA))


def cmd_verify(args) -> int:
    tol = _tol(args)
    spec = load_spec(args.spec)
    if spec.family not in GRID_KEYS:
        raise UsageError("verify needs a spec from a built-in family (closed forms are only known there)")
    grids = [parse_grid(g) for g in args.grid or []]
    for name, _ in grids:
        if name not in GRID_KEYS[spec.family]:
            raise UsageError(f"unknown grid parameter {name!r} for {spec.family}; expected {GRID_KEYS[spec.family]}")
    names = [n for n, _ in grids]
    points = [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in grids))] or [{}]
    opts = PipelineOptions(tol=tol, plurigenus=False)
    rows, ok, worst = [], True, 0.0
    for values in points:
        try:
            s = _respec(spec, values)
        except AkgeoError as exc:
            raise UsageError(f"grid point {values}: {exc}") from None
        result = verify(run_pipeline(s, opts), expected_for(s), tol)
        ok &= result.passed
        worst = max(worst, result.max_residual)
        label = ", ".join(f"{k}={v:g}" for k, v in values.items()) or s.name
        failed = [i.name for i in result.items if not i.passed]
        rows.append({"point": values, "passed": result.passed, "max_residual": result.max_residual, "failed": failed})
        if args.report == "text":
            status = "PASS" if result.passed else "FAIL " + ",".join(failed)
            print(f"{label}: max residual {result.max_residual:.3e} {status}")
    if args.report == "json":
        print(json.dumps(jsonable({"tol": tol, "passed": ok, "max_residual": worst, "points": rows}), indent=2))
    else:
        print(f"{len(points)} point(s), tol {tol:g}, max residual {worst:.3e}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kodaira(args) -> int:
    from akgeo.plurigenus import kodaira_dimension

    t = parse_t(args.t)
    res = kodaira_dimension(t, args.m_max, zeta=args.zeta, bound=args.mode_bound)
    if args.report == "json":
        payload = {"t": list(t), "plurigenera": res.per_m, "kappa": res.kappa, "evidence": res.evidence}
        print(json.dumps(jsonable(payload), indent=2))
        return EXIT_OK
    print(f"t = {t}")
    for m, p in res.per_m.items():
        modes = res.evidence["powers"][m]["modes"]
        print(f"  P_{m} = {p}  modes={modes}")
    print(f"kappa = {'-inf' if res.kappa == -math.inf else f'{res.kappa:g}'}  (mode bound {args.mode_bound})")
    if res.evidence["resonant_powers"]:
        print(f"note: first-order resonance at powers {res.evidence['resonant_powers']}")
    return EXIT_OK


def cmd_paper_check(args) -> int:
    from akgeo.acceptance import format_result, run_all

    results = run_all()
    for r in results:
        print(format_result(r))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="akgeo", description="Hermitian geometry of invariant structures on Lie groups.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline on a spec file")
    a.add_argument("spec")
    a.add_argument("--report", choices=("text", "json"), default="text")
    a.add_argument("--tol", type=float, default=None)
    a.add_argument("--out", default=None)
    a.add_argument("--m-max", type=int, default=10)
    a.add_argument("--mode-bound", type=int, default=1000)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="compare computed tables with closed forms over a parameter grid")
    v.add_argument("spec")
    v.add_argument("--grid", action="append", help="name=start:step:stop (repeatable)")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--report", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kodaira", help="plurigenera and Kodaira dimension of a Nakamura deformation")
    k.add_argument("--t", required=True, help="t1,t2,t3,t4")
    k.add_argument("--m-max", type=int, default=10)
    k.add_argument("--mode-bound", type=int, default=1000)
    k.add_argument("--zeta", type=float, default=DEFAULT_ZETA)
    k.add_argument("--report", choices=("text", "json"), default="text")
    k.set_defaults(func=cmd_kodaira)

    c = sub.add_parser("paper-check", help="run every acceptance criterion")
    c.set_defaults(func=cmd_paper_check)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "tol", None) is not None and not (args.tol > 0):
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (SpecError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AkgeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
