"""Command-line entry point: ``isorank <command> [--json] ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 budget
exceeded, 4 invalid field (even characteristic or non-prime), 5 repeated
parameter, 6 unreadable input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import flip_engine, iso_count, rank_formulas, sod_enum
from .errors import BudgetExceeded, FieldError, RepeatedParameterError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_FIELD = 4
EXIT_REPEATED = 5
EXIT_INPUT = 6

RANKS_MAX_G = 200
SOD_CROSSCHECK_MAX_D = 17


class UsageError(ValueError):
    pass


def _s(value: Any) -> str:
    """Exact decimal or ``num/den`` rendering."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass
class RunReport:
    command: str
    parameters: dict[str, Any]
    checks: list[Check] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, expected: Any, actual: Any) -> None:
        self.checks.append(Check(name, expected, actual))

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "parameters": _stringify(self.parameters),
            "checks": [
                {
                    "name": c.name,
                    "expected": _s(c.expected),
                    "actual": _s(c.actual),
                    "status": "pass" if c.passed else "fail",
                }
                for c in self.checks
            ],
            "data": _stringify(self.data),
            "status": "pass" if self.passed else "fail",
        }


def _stringify(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    if obj is None:
        return None
    return _s(obj)


def render_text(report: RunReport) -> str:
    doc = report.to_json()
    lines = [f"== {doc['command']} " + " ".join(f"{k}={_flat(v)}" for k, v in doc["parameters"].items())]
    for key, value in doc["data"].items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for item in value:
                lines.append("  " + "  ".join(f"{k}={_flat(v)}" for k, v in item.items()))
        else:
            lines.append(f"{key}: {_flat(value)}")
    if doc["checks"]:
        width = max(len(c["name"]) for c in doc["checks"])
        for c in doc["checks"]:
            lines.append(
                f"[{c['status'].upper()}] {c['name']:<{width}}  expected={c['expected']}  actual={c['actual']}"
            )
    lines.append(f"status: {doc['status']}")
    return "\n".join(lines)


def _flat(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_flat(v) for v in value) + "]"
    if value is None:
        return "-"
    return str(value)


def parse_range(text: str) -> tuple[int, int]:
    """``a..b`` inclusive, or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}; expected a..b") from None
    return v, v


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def cmd_ranks(args: argparse.Namespace) -> RunReport:
    lo, hi = parse_range(args.g)
    if not 2 <= lo <= hi <= RANKS_MAX_G:
        raise UsageError(f"need 2 <= g_min <= g_max <= {RANKS_MAX_G}, got {lo}..{hi}")
    report = RunReport("ranks", {"g_min": lo, "g_max": hi})
    routes = {
        "r_direct": rank_formulas.r_direct,
        "r_swapped": rank_formulas.r_swapped,
        "r_reduced": rank_formulas.r_reduced,
        "rank_rhs": sod_enum.rank_rhs,
        "l_g": flip_engine.l_g,
    }
    values = []
    for g in range(lo, hi + 1):
        expected = rank_formulas.closed_form(g)
        values.append({"g": g, "closed_form": expected})
        for name, fn in routes.items():
            report.add(f"g={g} {name}", expected, fn(g))
    report.data["values"] = values
    return report


def cmd_identity(args: argparse.Namespace) -> RunReport:
    max_g = args.max_g
    if not 1 <= max_g <= rank_formulas.MAX_SUBSET_PAIRS_GENUS:
        raise UsageError(f"need 1 <= max-g <= {rank_formulas.MAX_SUBSET_PAIRS_GENUS}, got {max_g}")
    report = RunReport("identity", {"max_g": max_g})
    for g in range(1, max_g + 1):
        report.add(f"g={g} subset pairs", rank_formulas.closed_form(g), rank_formulas.count_subset_pairs(g))
    for g in range(1, max_g + 1):
        lhs, rhs = rank_formulas.variance_identity(g)
        report.add(f"g={g} variance", rhs, lhs)
    return report


def cmd_sod(args: argparse.Namespace) -> RunReport:
    g, k = args.g, args.k
    if g < 2 or not 0 <= k <= g - 1:
        raise UsageError(f"need g >= 2 and 0 <= k <= g-1, got g={g}, k={k}")
    report = RunReport("sod", {"g": g, "k": k})
    count = sod_enum.component_count(g, k)
    rank = sod_enum.rank_stack(g, k)
    report.data["count"] = count
    report.data["rank"] = rank
    if 2 * g + 1 <= SOD_CROSSCHECK_MAX_D or args.list:
        comps = sod_enum.enumerate_components(g, k)
        report.add("component count", count, len(comps))
        report.add("rank", rank, sum(c.rank for c in comps))
        if args.list:
            report.data["components"] = [
                {"subset": list(c.subset), "dim": c.dim, "rank": c.rank} for c in comps
            ]
    return report


def cmd_flips(args: argparse.Namespace) -> RunReport:
    g = args.g
    if g < 2:
        raise UsageError(f"need g >= 2, got {g}")
    report = RunReport("flips", {"g": g})
    trace = flip_engine.poincare_trace(g) if args.poincare else flip_engine.rank_trace(g)
    for st in trace.steps:
        report.add(
            f"i={st.i} delta bookkeeping",
            st.n_i * (st.blowup_gain - st.blowdown_loss),
            st.rank_delta,
        )
    if args.trace:
        report.data["steps"] = [
            {
                "i": st.i,
                "n_i": st.n_i,
                "blowup_dim": st.blowup_center_dim,
                "blowdown_dim": st.blowdown_center_dim,
                "delta": st.rank_delta,
            }
            for st in trace.steps
        ]
        report.data["ranks"] = list(trace.ranks)
    if args.poincare:
        report.data["polynomials"] = [
            {"stage": i, "poly": str(P), "value_at_1": P(1)} for i, P in enumerate(trace.polys)
        ]
        for i, P in enumerate(trace.polys):
            report.add(f"P_{i} palindromic", True, P.is_palindromic())
            report.add(f"P_{i} degree", 2 * g - 2, P.degree)
            report.add(f"P_{i}(1)", trace.ranks[i], P(1))
    report.data["final"] = trace.final_rank
    report.add("final rank", rank_formulas.closed_form(g), trace.final_rank)
    return report


def _load_count_config(path: str) -> dict[str, Any]:
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileNotFoundError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path}: expected a JSON object")
    return cfg


def _instance_from_args(args: argparse.Namespace) -> iso_count.IsotropyInstance:
    cfg = _load_count_config(args.config) if args.config else {}
    p = args.p if args.p is not None else cfg.get("p")
    g = args.g if args.g is not None else cfg.get("g")
    if p is None or g is None:
        raise UsageError("both --p and --g are required (flags or config)")
    if args.params is not None:
        params = parse_int_list(args.params)
    elif "params" in cfg:
        params = [int(x) for x in cfg["params"]]
    else:
        rule = args.rule or cfg.get("rule", "consecutive")
        try:
            params = list(iso_count.params_for_rule(rule, p, g))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if g < 2:
        raise UsageError(f"need g >= 2, got {g}")
    if len(params) != 2 * g + 1:
        raise UsageError(f"expected {2 * g + 1} parameters for g={g}, got {len(params)}")
    return iso_count.IsotropyInstance(p, g, tuple(params))


def cmd_count(args: argparse.Namespace) -> RunReport:
    inst = _instance_from_args(args)
    report = RunReport("count", {"p": inst.p, "g": inst.g, "params": list(inst.params)})
    if args.verbose:
        total = 0
        for basis in iso_count.iter_isotropic(inst, args.budget):
            total += 1
            print(" ; ".join(" ".join(map(str, row)) for row in basis), file=sys.stderr)
    else:
        total = iso_count.count_isotropic(inst, args.budget, args.jobs)
    report.data["count"] = total
    if args.naive:
        oracle = iso_count.naive_count(inst, args.budget)
        report.data["naive_count"] = oracle
        report.add("count == naive", oracle, total)
    if args.compare:
        poly = flip_engine.poincare_polynomial(inst.g)
        report.data["poly"] = str(poly)
        report.data["poly_at_p"] = poly(inst.p)
        report.data["difference"] = total - poly(inst.p)
    return report


def cmd_snc(args: argparse.Namespace) -> RunReport:
    try:
        params = sod_enum.read_params_file(args.params_file)
    except OSError as exc:
        raise FileNotFoundError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"{args.params_file}: {exc}") from None
    if args.k < 1:
        raise UsageError(f"need k >= 1, got {args.k}")
    system = sod_enum.build_hyperplanes(args.k, params)
    result = sod_enum.check_general_position(system)
    report = RunReport("snc", {"k": args.k, "d": system.d, "params": list(system.params)})
    report.data["subsets_checked"] = result.subsets_checked
    if not result.passed:
        report.data["violation"] = list(result.violation or ())
        report.data["violation_rank"] = result.violation_rank
    report.add("general position", True, result.passed)
    return report


def cmd_experiment(args: argparse.Namespace) -> RunReport:
    g = args.g
    if g < 2:
        raise UsageError(f"need g >= 2, got {g}")
    primes = parse_int_list(args.primes)
    exp = iso_count.polynomial_experiment(g, primes, args.rule, args.budget, args.jobs)
    report = RunReport("experiment", {"g": g, "primes": primes, "rule": args.rule})
    report.data["poly"] = exp.poly
    report.data["rows"] = [
        {
            "p": r.p,
            "count": r.count,
            "predicted": r.predicted,
            "difference": r.difference,
            "error": r.error,
        }
        for r in exp.rows
    ]
    report.data["all_differences_zero"] = exp.all_zero
    for r in exp.rows:
        report.add(f"p={r.p} counted", True, r.error is None)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isorank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="emit a machine-readable report")
        return sp

    sp = add("ranks", "all routes to the K_0 rank against g*4^(g-1)")
    sp.add_argument("--g", required=True, help="genus range a..b")
    sp.set_defaults(func=cmd_ranks)

    sp = add("identity", "brute-force subset-pair count and exact variance identity")
    sp.add_argument("--max-g", type=int, required=True)
    sp.set_defaults(func=cmd_identity)

    sp = add("sod", "components of one root-stack decomposition")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--list", action="store_true", help="print every component")
    sp.set_defaults(func=cmd_sod)

    sp = add("flips", "rank and Poincare polynomial along the anti-flip chain")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--poincare", action="store_true")
    sp.set_defaults(func=cmd_flips)

    for name, func, help_ in (
        ("count", cmd_count, "count isotropic subspaces over F_p"),
        ("experiment", cmd_experiment, "compare counts with the flip polynomial at several primes"),
    ):
        sp = add(name, help_)
        sp.add_argument("--budget", type=int, default=iso_count.DEFAULT_BUDGET)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--rule", default=None if name == "count" else "consecutive")
        sp.set_defaults(func=func)
        if name == "count":
            sp.add_argument("--p", type=int)
            sp.add_argument("--g", type=int)
            sp.add_argument("--params", help="comma-separated a_1,...,a_{2g+1}")
            sp.add_argument("--config", help="JSON file with p, g and params or rule")
            sp.add_argument("--naive", action="store_true", help="also run the point-scan oracle")
            sp.add_argument("--compare", action="store_true", help="evaluate the flip polynomial at p")
            sp.add_argument("--verbose", action="store_true", help="stream RREF witnesses to stderr")
        else:
            sp.add_argument("--g", type=int, required=True)
            sp.add_argument("--primes", required=True, help="comma-separated odd primes")

    sp = add("snc", "general-position check for moment-curve hyperplanes")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--params-file", required=True)
    sp.set_defaults(func=cmd_snc)
    return parser


def _emit_error(args: argparse.Namespace, kind: str, message: str) -> None:
    if getattr(args, "json", False):
        doc = {"command": args.command, "status": "error", "error": kind, "message": message}
        print(json.dumps(doc, indent=2))
    else:
        print(f"error ({kind}): {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except UsageError as exc:
        _emit_error(args, "usage", str(exc))
        return EXIT_USAGE
    except BudgetExceeded as exc:
        _emit_error(args, "resource", str(exc))
        return EXIT_RESOURCE
    except RepeatedParameterError as exc:
        _emit_error(args, "repeated-parameter", str(exc))
        return EXIT_REPEATED
    except FieldError as exc:
        _emit_error(args, "field", str(exc))
        return EXIT_FIELD
    except FileNotFoundError as exc:
        _emit_error(args, "input", str(exc))
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(render_text(report))
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
