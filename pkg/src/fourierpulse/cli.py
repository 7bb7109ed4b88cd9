"""Command-line front end.

Angles are degrees on every flag and in every printout. Each subcommand
ends with one ``SUMMARY {json}`` line for scripts. The exit code is 0 when
every requested check passes, 1 on failed checks or bad input files, and 2
on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import reference
from .benchmark import dmod_dominates, format_table, published_cell, regenerated_cell, score_program
from .bloch import EnsembleGrid, SimOptions, l2_error, simulate_program
from .modulation import (
    ModulationSpec,
    first_order_coefficient,
    load_shape_csv,
    robust_composite,
    signed_y_angle,
    simulate_modulated,
)
from .notation import PulseParseError, parse_programs, serialize_program
from .pulses import compile_design, infer_design, total_flip_angle
from .records import Method, Selection, load_design, save_design
from .search import ConvergenceError, SearchError, SearchOptions, design
from .synthesis import IllConditionedError

log = logging.getLogger("fourierpulse")

SEED_ENV = "FOURIERPULSE_SEED"


class CheckFailed(Exception):
    """A requested check failed; the message goes to standard error."""


def _summary(**fields):
    print("SUMMARY " + json.dumps(fields, default=_jsonable, sort_keys=True))


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _odd_grid(text):
    value = int(text)
    if value < 3 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"grid size must be odd and at least 3, got {value}")
    return value


def _default_seed():
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {raw!r}") from None


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_design(args) -> int:
    options = SearchOptions(starts=args.starts, seed=args.seed)
    rec = design(args.method, args.terms, args.selection, args.theta, args.delta, options)
    if args.out:
        save_design(rec, args.out)
    print(f"method     {rec.method.value}  selection {rec.selection.value}  theta {rec.theta_deg:g}  delta {rec.delta:g}")
    print("gammas     " + " ".join(f"{g:.1f}" for g in rec.gammas_deg))
    print("alphas     " + " ".join(f"{a:.1f}" for a in rec.alphas_deg))
    print(f"residual   {rec.extras['residual']:.5f}")
    print(f"state err  {rec.extras['state_error']:.5f}")
    _summary(command="design", ok=True, gammas_deg=rec.gammas_deg, alphas_deg=rec.alphas_deg,
             residual=rec.extras["residual"], state_error=rec.extras["state_error"], out=args.out)
    return 0


def cmd_compile(args) -> int:
    if not args.threshold > 0:
        raise CheckFailed(f"threshold must be positive, got {args.threshold}")
    rec = load_design(args.design)
    program = compile_design(rec, args.threshold)
    text = serialize_program(program) + "\n"
    _write_text(args.out, text)
    if args.out not in (None, "-"):
        print(text, end="")
    _summary(command="compile", ok=True, blocks=len(program.blocks), events=program.n_events,
             flip_table1=total_flip_angle(program), flip_rf_sum=total_flip_angle(program, "rf_sum"))
    return 0


def _grid(args) -> EnsembleGrid:
    return EnsembleGrid(args.eps_min, args.eps_max, args.grid)


def cmd_simulate(args) -> int:
    programs = parse_programs(_read_text(args.pulse_file))
    grid = _grid(args)
    reports = []
    for i, program in enumerate(programs):
        profile = simulate_program(program, grid, SimOptions(offset_omega=args.omega))
        report = l2_error(profile, program=program)
        if args.csv:
            path = args.csv if len(programs) == 1 else f"{os.path.splitext(args.csv)[0]}_{i}.csv"
            profile.to_csv(path)
        print(f"[{i}] E = {report.l2_error:.5f}  flip(table) = {report.flip_table1:.3f} rad"
              f"  flip(rf sum) = {report.flip_rf_sum:.3f} rad")
        reports.append({"l2_error": report.l2_error, "flip_table1": report.flip_table1,
                        "flip_rf_sum": report.flip_rf_sum})
    _summary(command="simulate", ok=True, programs=reports)
    return 0


def cmd_evaluate(args) -> int:
    programs = parse_programs(_read_text(args.pulse_file))
    results, ok = [], True
    for i, program in enumerate(programs):
        oracles = score_program(program, infer_design(program, delta=args.delta), args.grid)
        row = {"compiled": oracles.compiled, "ideal": oracles.ideal, "profile": oracles.profile,
               "flip_table1": total_flip_angle(program)}
        if args.expect is not None:
            row["matched"] = oracles.best_match(args.expect) is not None
            ok &= row["matched"]
        print(f"[{i}] compiled {oracles.compiled:.5f}  ideal {oracles.ideal:.5f}  profile {oracles.profile:.5f}"
              f"  flip {row['flip_table1']:.3f} rad" + (f"  expect {args.expect} {'ok' if row.get('matched') else 'MISMATCH'}"
                                                       if args.expect is not None else ""))
        results.append(row)
    _summary(command="evaluate", ok=ok, programs=results)
    if not ok:
        raise CheckFailed("evaluated error differs from the expected value")
    return 0


def cmd_table1(args) -> int:
    selections = [Selection.parse(s).value for s in (args.selection or reference.SELECTIONS)]
    options = SearchOptions(starts=args.starts, seed=args.seed)
    cells = []
    for sel in selections:
        for method in reference.METHODS:
            for n in reference.TERMS:
                if args.published:
                    cells.append(published_cell(method, sel, n, args.grid))
                else:
                    cells.append(regenerated_cell(method, sel, n, options, args.grid))
    print(format_table(cells))
    dominance = dmod_dominates(cells)
    lost = [(s, n) for s, n, d in dominance if not d]
    print(f"delta modulation below FSM in {len(dominance) - len(lost)}/{len(dominance)} cells")
    failed = [c for c in cells if not c.passed]
    ok = not failed and not lost
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([c.to_dict() for c in cells], fh, indent=2, default=_jsonable)
    _summary(command="table1", ok=ok, cells=len(cells), failed=[(c.method, c.selection, c.n) for c in failed],
             dominance_lost=lost)
    if not ok:
        raise CheckFailed(f"{len(failed)} cell(s) out of tolerance, dominance lost in {lost}")
    return 0


def cmd_modulate(args) -> int:
    if args.shape == "linear":
        spec = ModulationSpec(args.A, args.B)
    else:
        try:
            spec = load_shape_csv(args.shape, args.A, args.B)
        except (OSError, ValueError, KeyError) as exc:
            raise CheckFailed(f"invalid shape file {args.shape}: {exc}") from None
    eps_values = args.eps or [0.6, 1.0, 1.4]
    rows = []
    print(f"{'epsilon':>8} {'first order':>12} {'simulated':>12}")
    for e in eps_values:
        c1 = first_order_coefficient(spec, e)
        cs = signed_y_angle(simulate_modulated(spec, e, args.substeps))
        rows.append((e, c1, cs))
        print(f"{e:>8.4f} {c1:>12.6g} {cs:>12.6g}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("epsilon,c_first_order,c_simulated\n")
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    summary = {"command": "modulate", "ok": True, "rows": rows}
    if spec.is_linear:
        _, report = robust_composite(spec)
        print(f"composite: angle(1) = {report.angle_at_one:.6g}  d/deps = {report.derivative_at_one:.3g}"
              f"  relative slope = {report.relative_slope:.3g}")
        summary.update(angle_at_one=report.angle_at_one, derivative_at_one=report.derivative_at_one)
    _summary(**summary)
    return 0


def cmd_roundtrip(args) -> int:
    if args.pulse_file:
        texts = [serialize_program(p) for p in parse_programs(_read_text(args.pulse_file))]
        labels = [f"line {i}" for i in range(len(texts))]
        originals = parse_programs(_read_text(args.pulse_file))
    else:
        keys = sorted(reference.PROGRAMS)
        labels = [f"{m} {s} n={n}" for m, s, n in keys]
        originals = [reference.program(*k) for k in keys]
        texts = [serialize_program(p) for p in originals]
    bad = []
    for label, original, text in zip(labels, originals, texts):
        again = parse_programs(text)[0]
        stable = serialize_program(again) == text and again.blocks == original.blocks
        print(f"{'ok' if stable else 'MISMATCH':<9}{label}")
        if not stable:
            bad.append(label)
    _summary(command="roundtrip", ok=not bad, programs=len(texts), mismatched=bad)
    if bad:
        raise CheckFailed(f"{len(bad)} program(s) did not survive parse/serialize")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _method(text):
    try:
        return Method.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _selection(text):
    try:
        return Selection.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_grid(p, with_range=True):
    p.add_argument("--grid", type=_odd_grid, default=201, help="number of eps points (odd)")
    if with_range:
        p.add_argument("--eps-min", type=float, default=0.5)
        p.add_argument("--eps-max", type=float, default=1.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fourierpulse", description="Design and analyse dispersion-robust pulses.")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="choose frequencies and amplitudes")
    p.add_argument("--method", type=_method, required=True, help="fsm or dmod")
    p.add_argument("--terms", type=_positive_int, required=True)
    p.add_argument("--theta", type=float, default=90.0, help="target rotation, degrees")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--selection", type=_selection, default=Selection.HEURISTIC)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    p.add_argument("--starts", type=_positive_int, default=100)
    p.add_argument("--out", help="write the design record (JSON)")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("compile", help="turn a design record into pulse text")
    p.add_argument("design")
    p.add_argument("--threshold", type=float, default=9.0, help="largest amplitude per repetition, degrees")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="simulate pulse text over an eps grid")
    p.add_argument("pulse_file")
    _add_grid(p)
    p.add_argument("--omega", type=float, default=0.0, help="resonance offset relative to the RF amplitude")
    p.add_argument("--csv", help="write epsilon,x,y,z")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score pulse text with all error oracles")
    p.add_argument("pulse_file")
    p.add_argument("--delta", type=float, default=0.5)
    _add_grid(p, with_range=False)
    p.add_argument("--expect", type=float, help="published error to compare against")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("table1", help="regenerate the benchmark table")
    p.add_argument("--selection", type=_selection, action="append", help="repeatable; default all three")
    p.add_argument("--published", action="store_true", help="score the printed listings instead of regenerating")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--starts", type=_positive_int, default=100)
    _add_grid(p, with_range=False)
    p.add_argument("--out", help="write per-cell results (JSON)")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("modulate", help="first-order analysis of a phase-modulation scheme")
    p.add_argument("--shape", default="linear", help="'linear' or a CSV file with columns t,f")
    p.add_argument("--A", type=float, default=1.0, help="RF amplitude")
    p.add_argument("--B", type=float, default=None, help="sweep rate (default 0.01; max |f| for CSV shapes)")
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--substeps", type=_positive_int, default=1000)
    p.add_argument("--csv", help="write epsilon,c_first_order,c_simulated")
    p.set_defaults(func=cmd_modulate)

    p = sub.add_parser("roundtrip", help="parse/serialize check on pulse text (default: bundled listings)")
    p.add_argument("pulse_file", nargs="?")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    if args.command == "simulate" and not args.eps_min < args.eps_max:
        parser.error("--eps-min must be below --eps-max")
    if args.command == "modulate":
        if not args.A > 0:
            parser.error("--A must be positive")
        if args.B is None and args.shape == "linear":
            args.B = 0.01
        if args.B is not None and args.B < 0:
            parser.error("--B must be non-negative")
    if args.command in ("design",) and not 0 < args.delta < 1:
        parser.error("--delta must lie in (0, 1)")
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PulseParseError as exc:
        print(f"error: malformed pulse text: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, SearchError, IllConditionedError) as exc:
        print(f"error: optimisation failed: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
