"""``shc`` command line: validate, solve, plan, census, perturb, report.

Every run writes ``<command>.json`` (structured) and ``<command>.csv``
(tabular) into ``--out``. Output is a pure function of the configuration and
the command's own flags; ``--threads`` only changes how fast it is produced.
Exit status: 0 on success, 1 on a domain error or failed validation, 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import oracle, perturb, planner, solver
from .errors import ConfigError, ShcError
from .growth import GrowthTable, growth_report, to_decimal
from .model import resonance_check, validate_cycle

COMMANDS = ("validate", "solve", "plan", "census", "perturb", "report")


# --------------------------------------------------------------------------
# deterministic serialization

def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return _num(to_decimal(x))
    if isinstance(x, Decimal):
        return format(x, ".16E") if x != 0 else "0.0"
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g") if x != int(x) or abs(x) >= 1e17 else format(x, ".1f")


def to_json(obj, indent: int = 0) -> str:
    """JSON text with floats in fixed 17-significant-digit form."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (bool, int, float, Fraction, Decimal, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_cell(x) for x in np.asarray(v).ravel().tolist())
    out = _num(v)
    return "" if out == "null" else out


@dataclass
class RunResult:
    command: str
    input_digest: str
    outputs: dict
    exit_status: int
    table: tuple[list, list] | None = None

    def as_dict(self) -> dict:
        return {"command": self.command, "input_digest": self.input_digest,
                "exit_status": self.exit_status, "outputs": self.outputs}


def _digest(doc: dict, args: dict) -> str:
    payload = json.dumps({"config": doc, "args": args}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# --------------------------------------------------------------------------
# commands

def _opt(args, name, section: dict, key, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    if key in section:
        return section[key]
    return default


def _cmd_validate(loaded, args):
    cyc = loaded.cycle
    rep = loaded.report or validate_cycle(cyc)
    max_coeff = int(_opt(args, "max_coeff", loaded.section("report"), "max_coeff", 10))
    res = resonance_check(cyc, max_coeff) if rep.passed else []
    out = {"passed": rep.passed,
           "failures": [{"axiom": f.axiom, "detail": f.detail, "value": f.value} for f in rep.failures],
           "warnings": list(rep.warnings),
           "resonances": [{"a": w.a, "b": w.b, "value": w.value} for w in res],
           "max_coeff": max_coeff}
    rows = [["failure", f.axiom, f.detail, f.value] for f in rep.failures]
    rows += [["warning", "", w, ""] for w in rep.warnings]
    rows += [["resonance", f"{w.a},{w.b}", w.message, w.value] for w in res]
    return out, (["kind", "axiom", "detail", "value"], rows), 0 if rep.passed else 1


def _solution_dict(sol, rep, cycle):
    return {"m1": sol.params.m1, "m2": sol.params.m2, "period": sol.period,
            "X": sol.X, "Y": sol.Y, "Z": sol.Z, "point": sol.point,
            "product_s": sol.product_s, "center_exponent": sol.center_exponent,
            "realizability_threshold": solver.realizability_threshold(cycle),
            "analytic_realizable": sol.analytic_realizable,
            "verification": {"max_rel_error": rep.max_rel_error, "all_valid": rep.all_valid,
                             "periodic": rep.periodic,
                             "empirical_realizable": rep.empirical_realizable,
                             "reason": rep.reason}}


def _cmd_solve(loaded, args):
    cyc = loaded.cycle
    sol, rep = oracle.verify_params(cyc, (args.m1, args.m2))
    out = _solution_dict(sol, rep, cyc)
    header = ["m1", "m2", "period", "Y", "product_s", "center_exponent",
              "analytic_realizable", "empirical_realizable", "max_rel_error"]
    row = [sol.params.m1, sol.params.m2, sol.period, sol.Y, sol.product_s, sol.center_exponent,
           sol.analytic_realizable, rep.empirical_realizable, rep.max_rel_error]
    return out, (header, [row]), 0


def _plan_config(loaded, args, count_default=50, count_key="count", section="planner"):
    cyc = loaded.cycle
    sec = loaded.section("planner")
    count = int(_opt(args, "count", loaded.section(section), count_key, sec.get("count", count_default)))
    base = planner.interval_defaults(cyc, count,
                                     m_floor=int(_opt(args, "m_floor", sec, "m_floor", planner.DEFAULT_M_FLOOR)),
                                     search_cap=int(sec.get("search_cap", planner.DEFAULT_SEARCH_CAP)))
    L = _opt(args, "L", sec, "L", None)
    Lp = _opt(args, "Lp", sec, "L_prime", None)
    if L is not None or Lp is not None:
        L = base.L if L is None else cfgmod.parse_number(L)
        Lp = base.L_prime if Lp is None else cfgmod.parse_number(Lp)
        base = planner.PlannerConfig(L, Lp, base.C, base.count, base.m_floor, base.search_cap)
    return base


def _cmd_plan(loaded, args):
    cyc = loaded.cycle
    pc = _plan_config(loaded, args)
    plan = planner.plan_exhaustion(cyc, pc)
    sep = planner.separation_report(cyc, plan)
    rows, steps = [], []
    for st, srow in zip(plan.steps, sep.rows):
        budget = perturb.required_budget(perturb.orbit_center_cocycle(cyc, st.solution))
        xz = float(np.sqrt(np.sum(st.solution.X ** 2) + np.sum(st.solution.Z ** 2)))
        rows.append([srow.index, st.params.m1, st.params.m2, st.period, st.log_multiplier,
                     st.solution.center_exponent, st.solution.Y, xz, budget,
                     srow.min_distance_later, srow.distance_to_segment])
        steps.append({"m1": st.params.m1, "m2": st.params.m2, "period": st.period,
                      "log_multiplier": st.log_multiplier,
                      "center_exponent": st.solution.center_exponent, "Y": st.solution.Y,
                      "norm_XZ": xz, "required_budget": budget,
                      "verified": st.verification.empirical_realizable})
    out = {"config": {"L": pc.L, "L_prime": pc.L_prime, "C": pc.C, "count": pc.count,
                      "m_floor": pc.m_floor},
           "first_period": plan.first_period, "last_period": plan.periods[-1],
           "consecutive": plan.periods == list(range(plan.first_period, plan.first_period + pc.count)),
           "min_pairwise_distance": sep.min_pairwise, "steps": steps}
    header = ["l", "m1", "m2", "period", "log_multiplier", "center_exponent", "Y", "norm_XZ",
              "required_budget", "min_distance_later", "distance_to_segment"]
    return out, (header, rows), 0


def _cmd_census(loaded, args):
    cyc = loaded.cycle
    sec = loaded.section("census")
    nmin = int(_opt(args, "nmin", sec, "nmin", 16))
    nmax = int(_opt(args, "nmax", sec, "nmax", nmin))
    kmax = int(_opt(args, "max_loops", sec, "max_loops", 1))
    periods, rows = [], []
    for n in range(nmin, nmax + 1):
        found = oracle.enumerate_periodic_points(cyc, n, kmax, workers=args.threads)
        periods.append({"n": n, "orbits": len(found), "count": n * len(found),
                        "itineraries": [[list(lp) for lp in p.itinerary.key()] for p in found]})
        rows.append([n, len(found), n * len(found)])
    out = {"nmin": nmin, "nmax": nmax, "max_loops": kmax, "periods": periods}
    return out, (["n", "orbits", "count"], rows), 0


def _cascade(loaded, args):
    cyc = loaded.cycle
    sec = loaded.section("perturbation")
    eps = cfgmod.parse_number(_opt(args, "epsilon", sec, "epsilon", 0.2))
    a_seq = _opt(args, "a_seq", sec, "a_seq", "factorial")
    pc = _plan_config(loaded, args, count_default=10, section="perturbation")
    plan = planner.plan_exhaustion(cyc, pc)
    details = []
    table = perturb.perturbed_count_table(cyc, plan, a_seq, eps,
                                          width=sec.get("width"), details=details)
    return table, details, eps, a_seq


def _cmd_perturb(loaded, args):
    table, details, eps, a_seq = _cascade(loaded, args)
    rows = [[d.period, table.counts[d.period], d.spawned, d.budget, d.center,
             d.support[0], d.support[1]] for d in details]
    out = {"epsilon": eps, "a_seq": a_seq,
           "counts": {str(n): c for n, c in table.counts.items()},
           "steps": [{"period": d.period, "spawned": d.spawned, "budget": d.budget,
                      "center": d.center, "support": list(d.support)} for d in details]}
    header = ["n", "count", "spawned", "budget", "center", "support_lo", "support_hi"]
    return out, (header, rows), 0


def read_counts(path) -> GrowthTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "n" not in reader.fieldnames or "count" not in reader.fieldnames:
            raise ConfigError(f"{path}: counts CSV needs columns 'n' and 'count'")
        return GrowthTable({int(r["n"]): int(r["count"]) for r in reader})


def _cmd_report(loaded, args):
    if args.counts:
        table, source = read_counts(args.counts), "file"
    else:
        table, source = _cascade(loaded, args)[0], "perturb"
    r_raw = args.r if args.r is not None else loaded.section("report").get("r", [2, 5, 10])
    r_list = [cfgmod.parse_number(x) for x in (r_raw.split(",") if isinstance(r_raw, str) else r_raw)]
    reports = growth_report(table, r_list)
    rows, per_r = [], []
    for rep in reports:
        for n, ratio, rmin in zip(rep.periods, rep.ratios, rep.running_min):
            rows.append([rep.r, n, table.counts[n], ratio, rmin])
        per_r.append({"r": rep.r, "divergent": rep.divergent,
                      "series": [[n, ratio] for n, ratio in zip(rep.periods, rep.ratios)],
                      "running_min": list(rep.running_min)})
    out = {"source": source, "counts": {str(n): c for n, c in table.counts.items()}, "rates": per_r}
    return out, (["r", "n", "count", "ratio", "running_min"], rows), 0


_HANDLERS = {"validate": _cmd_validate, "solve": _cmd_solve, "plan": _cmd_plan,
             "census": _cmd_census, "perturb": _cmd_perturb, "report": _cmd_report}


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="cycle configuration (default: bundled C0 fixture)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads for enumeration")

    ap = argparse.ArgumentParser(prog="shc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    p = sub.add_parser("validate", parents=[common], help="check cycle axioms and resonances")
    p.add_argument("--max-coeff", type=int, dest="max_coeff")

    p = sub.add_parser("solve", parents=[common], help="closed-form loop solution + oracle check")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)

    def plan_flags(p):
        p.add_argument("--count", type=int)
        p.add_argument("--L", dest="L", type=str)
        p.add_argument("--Lp", dest="Lp", type=str)
        p.add_argument("--m-floor", dest="m_floor", type=int)

    p = sub.add_parser("plan", parents=[common], help="consecutive-period loop sequence")
    plan_flags(p)

    p = sub.add_parser("census", parents=[common], help="enumerate model periodic points")
    p.add_argument("--nmin", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--max-loops", dest="max_loops", type=int)

    def cascade_flags(p):
        plan_flags(p)
        p.add_argument("--epsilon", type=str)
        p.add_argument("--a-seq", dest="a_seq", choices=sorted(perturb.A_SEQUENCES))

    p = sub.add_parser("perturb", parents=[common], help="perturbation cascade counts")
    cascade_flags(p)

    p = sub.add_parser("report", parents=[common], help="growth ratios count(n)/r^n")
    p.add_argument("--r", type=str, help="comma-separated rates, e.g. 2,5,10")
    p.add_argument("--counts", help="CSV with columns n,count (default: run the perturb cascade)")
    cascade_flags(p)
    return ap


_NOT_DIGESTED = {"out", "threads", "config", "command"}


def run(command: str, args: argparse.Namespace) -> RunResult:
    if command not in _HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    if args.config:
        loaded = cfgmod.load_config(args.config, validate=command != "validate")
    else:
        loaded = cfgmod.load_default(validate=command != "validate")
    doc = cfgmod.serialize(loaded.cycle, loaded.sections, loaded.name)
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_DIGESTED}
    if getattr(args, "counts", None):
        flags["counts"] = hashlib.sha256(Path(args.counts).read_bytes()).hexdigest()
    digest = _digest(doc, flags)
    try:
        out, table, status = _HANDLERS[command](loaded, args)
    except ShcError as exc:
        return RunResult(command, digest, {"error": {"type": type(exc).__name__, "message": str(exc)}}, 1)
    return RunResult(command, digest, out, status, table)


def write_outputs(result: RunResult, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jpath = out_dir / f"{result.command}.json"
    cpath = out_dir / f"{result.command}.csv"
    jpath.write_text(to_json(result.as_dict()) + "\n", encoding="utf-8", newline="\n")
    header, rows = result.table if result.table else (["error"], [[result.outputs.get("error", {}).get("message", "")]])
    cpath.write_text(to_csv(header, rows), encoding="utf-8", newline="\n")
    return jpath, cpath


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = run(args.command, args)
    except ConfigError as exc:
        print(f"shc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    jpath, cpath = write_outputs(result, args.out)
    if result.exit_status:
        err = result.outputs.get("error")
        msg = f"{err['type']}: {err['message']}" if err else "validation failed"
        print(f"shc {result.command}: {msg}", file=sys.stderr)
    print(f"wrote {jpath} and {cpath}")
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
