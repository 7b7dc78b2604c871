"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 enumeration budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .design import (Design, DesignError, EmpiricalDesign, check_separation, load_design,
                     parse_scalar, parse_tolerance, standardize)
from .fans import (DuplicatePointsError, Fan, nbm, numerical_algebraic_fan_family,
                   numerical_fan, statistical_fan)
from .terms import ORDER_KINDS, BudgetExceeded, TermOrder, count_order_ideals, default_budget

EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    tolerance: tuple | None = None
    scale: object = 1
    scales: tuple = ()
    standardize: bool = False
    strategy: TermOrder = TermOrder()
    format: str = "text"
    budget: int = 10_000_000
    arith: str = "auto"
    jobs: int = 1

    def __post_init__(self):
        if self.budget <= 0:
            raise UsageError("budget must be positive")
        for k in (self.scale, *self.scales):
            if not k > 0:
                raise UsageError(f"scale factors must be positive, got {k}")


# -- formatting helpers ----------------------------------------------------


def num(x):
    """JSON number with 12 significant digits; None for inf/nan."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def fmt(x) -> str:
    if x is None:
        return "-"
    x = float(x)
    return "inf" if math.isinf(x) else f"{x:.6g}"


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def fan_json(fan: Fan, with_conditions: bool = True) -> list[dict]:
    out = []
    for m in fan:
        entry = {"maximal_elements": [list(t) for t in m.maximal_elements], "size": m.size}
        if with_conditions:
            entry["condition_number"] = None if m.condition_number is None else num(m.condition_number)
        out.append(entry)
    return out


def fan_lines(fan: Fan, with_conditions: bool = True) -> list[str]:
    lines = []
    for m in fan:
        cond = f"  cond={fmt(m.condition_number)}" if with_conditions else ""
        lines.append(f"  size={m.size:<3d}{cond}  {m.label()}")
    return lines


def histogram_json(hist: dict[int, int]) -> dict[str, int]:
    return {str(k): v for k, v in hist.items()}


# -- input handling --------------------------------------------------------


def load_input(config: RunConfig) -> Design:
    if not config.input:
        raise UsageError("--input is required")
    try:
        design = load_design(config.input)
    except OSError as exc:
        raise UsageError(f"cannot read {config.input}: {exc.strerror}") from None
    if config.arith == "float":
        return design.as_float()
    if config.arith == "exact" and not design.exact:
        raise UsageError("exact arithmetic requested but the input is not rational")
    return design


def empirical(config: RunConfig, design: Design, required: bool) -> EmpiricalDesign:
    tol = config.tolerance
    if tol is None:
        if required:
            raise UsageError("a tolerance is required (--tol a,b,... or --tol-file)")
        tol = (0,) * design.d
    if len(tol) != design.d:
        raise UsageError(f"tolerance has {len(tol)} entries but the design has d={design.d}")
    return EmpiricalDesign(design, tol).scaled_tolerance(config.scale)


def prepare(ed: EmpiricalDesign, config: RunConfig) -> EmpiricalDesign:
    if config.standardize:
        ed, _ = standardize(ed)
    return ed


def design_header(ed: EmpiricalDesign) -> dict:
    return {"n": ed.n, "d": ed.d}


def tol_list(ed: EmpiricalDesign) -> list:
    return [num(v) for v in ed.tolerance]


# -- commands --------------------------------------------------------------


def cmd_statfan(config: RunConfig, count_ois: bool = False, conditions: bool = False) -> str:
    design = load_input(config)
    ed = prepare(EmpiricalDesign(design), config)
    fan, n_ois = statistical_fan(ed.design, config.strategy, config.budget, with_conditions=conditions)
    if config.format == "json":
        report = {"design": design_header(ed), "fan": fan_json(fan, conditions), "fan_size": len(fan),
                  "standardized": config.standardize}
        if count_ois:
            report["identifiable_count"] = n_ois
        return dump_json(report)
    lines = [f"design: n={ed.n} d={ed.d}", f"statistical fan: {len(fan)} models"]
    if count_ois:
        lines.append(f"identifiable order ideals: {n_ois}")
    lines += fan_lines(fan, conditions)
    return "\n".join(lines)


def run_numfan(ed: EmpiricalDesign, config: RunConfig):
    return numerical_fan(prepare(ed, config), config.strategy, config.budget)


def _numfan_row(args):
    ed, config = args
    res = run_numfan(ed, config)
    return len(res.fan), len(res.weakly_maximal), res.all_stable_count, res.fan.histogram()


def cmd_numfan(config: RunConfig) -> str:
    design = load_input(config)
    ed = empirical(config, design, required=True)
    res = run_numfan(ed, config)
    used = prepare(ed, config)
    warn = check_separation(used)
    if config.format == "json":
        return dump_json({
            "design": design_header(used),
            "tolerance": tol_list(used),
            "scale": num(config.scale),
            "standardized": config.standardize,
            "fan": fan_json(res.fan),
            "weakly_maximal_count": len(res.weakly_maximal),
            "stable_count": res.all_stable_count,
            "histogram": histogram_json(res.fan.histogram()),
            "separation_violations": [[i + 1, j + 1] for i, j in warn],
        })
    lines = [f"design: n={used.n} d={used.d}" + (" (standardized)" if config.standardize else ""),
             f"tolerance: {', '.join(fmt(v) for v in used.tolerance)} (scale {fmt(config.scale)})"]
    if warn:
        lines.append(f"warning: {len(warn)} point pairs are not separated by their tolerance boxes")
    lines.append(f"numerical fan: {len(res.fan)} models "
                 f"(weakly maximal: {len(res.weakly_maximal)}, stable order ideals: {res.all_stable_count})")
    lines += fan_lines(res.fan)
    lines.append("size histogram: " + ", ".join(f"{k}:{v}" for k, v in res.fan.histogram().items()))
    return "\n".join(lines)


def cmd_sweep(config: RunConfig) -> str:
    design = load_input(config)
    scales = config.scales or (config.scale,)
    base = empirical(RunConfig(**{**config.__dict__, "scale": 1, "scales": ()}), design, required=True)
    jobs = [(base.scaled_tolerance(k), config) for k in scales]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_numfan_row, jobs))
    else:
        rows = [_numfan_row(j) for j in jobs]
    if config.format == "json":
        return dump_json({
            "design": design_header(base),
            "tolerance": tol_list(prepare(base, config)),
            "standardized": config.standardize,
            "rows": [{"scale": num(k), "fan_size": f, "weakly_maximal_count": w, "stable_count": s,
                      "histogram": histogram_json(h)} for k, (f, w, s, h) in zip(scales, rows)],
        })
    sizes = sorted({size for *_, h in rows for size in h})
    out = [f"design: n={base.n} d={base.d}",
           f"tolerance: {', '.join(fmt(v) for v in base.tolerance)}",
           "",
           f"{'scale k':>8} | {'|S_num|':>8} | {'#weakly max.':>12} | {'#stable':>8}"]
    out += [f"{fmt(k):>8} | {f:>8} | {w:>12} | {s:>8}" for k, (f, w, s, _) in zip(scales, rows)]
    out += ["", f"{'k vs |O|':>8} | " + " ".join(f"{s:>4}" for s in sizes) + " |  sum"]
    for k, (f, _, _, h) in zip(scales, rows):
        cells = " ".join(f"{h.get(s, '-'):>4}" for s in sizes)
        out.append(f"{fmt(k):>8} | {cells} | {f:>4}")
    return "\n".join(out)


def cmd_count(d: int, n: int, cumulative: bool, budget: int, format: str = "text") -> str:
    value = count_order_ideals(d, n, cumulative, budget)
    if format == "json":
        return dump_json({"d": d, "n": n, "cumulative": cumulative, "count": value})
    return str(value)


def cmd_nbm(config: RunConfig, family: bool = False) -> str:
    design = load_input(config)
    ed = prepare(empirical(config, design, required=False), config)
    if family:
        fan = numerical_algebraic_fan_family(ed)
        if config.format == "json":
            return dump_json({"design": design_header(ed), "tolerance": tol_list(ed),
                              "fan": fan_json(fan)})
        return "\n".join([f"NBM family over {3 * math.factorial(ed.d)} term orders: {len(fan)} order ideals"]
                         + fan_lines(fan))
    out = nbm(ed, config.strategy)
    terms = out.order_ideal.sorted_terms(config.strategy)
    if config.format == "json":
        return dump_json({
            "design": design_header(ed),
            "tolerance": tol_list(ed),
            "order": str(config.strategy),
            "order_ideal": [list(t) for t in terms],
            "maximal_elements": [list(t) for t in TermOrder().sorted(out.order_ideal.maximal_elements())],
            "polynomials": [{"leading_term": list(p.leading_term),
                             "coefficients": [_coef_json(c) for c in p.coefficient_vector(terms)],
                             "text": str(p)} for p in out.polynomials],
        })
    lines = [f"order: {config.strategy}",
             f"order ideal: {out.order_ideal!r}  (size {len(out.order_ideal)})",
             "almost vanishing polynomials:"]
    lines += [f"  {p}" for p in out.polynomials]
    return "\n".join(lines)


def _coef_json(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return num(c)


def cmd_check(config: RunConfig) -> str:
    design = load_input(config)
    ed = empirical(config, design, required=False)
    bad = check_separation(ed)
    dups = design.duplicates()
    if config.format == "json":
        return dump_json({"design": design_header(ed), "tolerance": tol_list(ed),
                          "separated": not bad, "offending_pairs": [[i + 1, j + 1] for i, j in bad],
                          "duplicate_points": [[i + 1, j + 1] for i, j in dups]})
    lines = [f"design: n={ed.n} d={ed.d}", f"tolerance: {', '.join(fmt(v) for v in ed.tolerance)}"]
    if bad:
        lines.append(f"NOT well separated: {len(bad)} pairs with overlapping tolerance boxes")
        lines += [f"  points {i + 1} and {j + 1}" for i, j in bad]
    else:
        lines.append("well separated")
    return "\n".join(lines)


# -- argument parsing ------------------------------------------------------


def _scalars(text: str) -> tuple:
    try:
        return parse_tolerance(text)
    except DesignError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_scalar(text: str):
    try:
        v = parse_scalar(text)
    except DesignError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _positive_scalars(text: str) -> tuple:
    return tuple(_positive_scalar(s) for s in text.split(","))


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="numfan", description="statistical and numerical statistical fans")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="design CSV, one point per row")
    common.add_argument("--tol", type=_scalars, help="tolerance vector a,b,...")
    common.add_argument("--tol-file", help="one-row CSV holding the tolerance vector")
    common.add_argument("--scale", type=_positive_scalar, default=1, help="multiply the tolerance by K")
    common.add_argument("--scales", type=_positive_scalars, default=(), help="K1,K2,... (sweep)")
    common.add_argument("--standardize", action="store_true", help="map every coordinate onto [-1, 1]")
    common.add_argument("--strategy", "--order", dest="strategy", choices=ORDER_KINDS, default="deglex")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=_positive_int, default=None,
                        help="max visited order ideals (default $NUMFAN_BUDGET or 10,000,000)")
    common.add_argument("--arith", choices=("auto", "exact", "float"), default="auto")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("statfan", parents=[common], help="statistical fan (exact on rational input)")
    p.add_argument("--count-ois", action="store_true", help="also report all identifiable order ideals")
    p.add_argument("--conditions", action="store_true", help="condition number per model")
    sub.add_parser("numfan", parents=[common], help="numerical statistical fan")
    p = sub.add_parser("sweep", parents=[common], help="numerical fans over tolerance scale factors")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p = sub.add_parser("count", parents=[common], help="number of order ideals p_d(n)")
    p.add_argument("-d", "--dim", type=_positive_int, required=True)
    p.add_argument("-n", "--size", type=int, required=True)
    p.add_argument("--cumulative", action="store_true", help="count ideals with 1..n terms")
    p = sub.add_parser("nbm", parents=[common], help="numerical Buchberger-Moeller")
    p.add_argument("--all-orders", action="store_true",
                   help="union over lex/deglex/degrevlex and all variable permutations")
    sub.add_parser("check", parents=[common], help="tolerance-box separation check")
    return parser


def config_from_args(args) -> RunConfig:
    tol = args.tol
    if args.tol_file:
        if tol is not None:
            raise UsageError("give either --tol or --tol-file, not both")
        try:
            with open(args.tol_file) as fh:
                tol = parse_tolerance(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.tol_file}: {exc.strerror}") from None
    return RunConfig(
        input=args.input, tolerance=tol, scale=args.scale, scales=args.scales,
        standardize=args.standardize, strategy=TermOrder(args.strategy), format=args.format,
        budget=args.budget or default_budget(), arith=args.arith, jobs=getattr(args, "jobs", 1),
    )


def run(argv: Sequence[str] | None = None) -> str:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config_from_args(args)
    if args.command == "count":
        if args.size < 0:
            raise UsageError("n must be non-negative")
        return cmd_count(args.dim, args.size, args.cumulative, config.budget, config.format)
    if args.command == "statfan":
        return cmd_statfan(config, args.count_ois, args.conditions)
    if args.command == "numfan":
        return cmd_numfan(config)
    if args.command == "sweep":
        return cmd_sweep(config)
    if args.command == "nbm":
        return cmd_nbm(config, args.all_orders)
    return cmd_check(config)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        print(run(argv))
    except (UsageError, DesignError, DuplicatePointsError) as exc:
        print(f"numfan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"numfan: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
