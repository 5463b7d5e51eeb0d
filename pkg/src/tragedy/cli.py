"""Command-line entry point.

Exit codes: 0 success, 2 bad arguments, 3 I/O or file-content error,
4 capacity error. Reports go to stdout (or ``--output``), diagnostics to
stderr.
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
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .config import ConfigError, GameConfig, load_config
from .game import CapacityError, format_profile
from .productivity import (
    SWEEP_CSV_HEADER,
    aggregate_welfare,
    alpha_sweep,
    cooperative_surplus,
    dominance_gap,
    is_defection_dominant,
    to_symmetric,
)
from .registry import (
    RADAR_CSV_HEADER,
    CaseDataset,
    DatasetError,
    DomainCase,
    UnknownCaseError,
    builtin_dataset,
    compute_table,
    load_dataset,
    radar_data,
)
from .severity import (
    ConditionProfile,
    extract_symmetric_payoffs,
    normalized_rationality_gap,
    price_of_anarchy,
    temptation_ratio,
)
from .verifier import Barrier, C5Declaration, verify_conditions

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CAPACITY = 0, 2, 3, 4
FORMATS = ("markdown", "csv", "json")


class UsageError(Exception):
    pass


class InputFileError(Exception):
    pass


@dataclass(frozen=True)
class ReportBundle:
    format: str
    payload: str
    provenance: dict[str, str]


def fmt(x: float) -> str:
    """Raw values are printed at 6 significant digits."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    out = f"{x:.6g}"
    return "0" if out == "-0" else out


def jnum(x: float) -> float | str:
    return fmt(x) if math.isinf(x) else float(fmt(x))


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode("utf-8"))
        h.update(b"\0")
    return "sha256:" + h.hexdigest()


def _provenance(*parts: str) -> dict[str, str]:
    return {"tool": f"tragedy {__version__}", "input_digest": _digest(*parts)}


def _json(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _csv(header: str, rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _md_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return lines


def _md_footer(prov: dict[str, str]) -> list[str]:
    return ["", f"_{prov['tool']}, input {prov['input_digest']}_"]


def _bundle(fmt_name: str, payload: str | list[str], prov: dict[str, str]) -> ReportBundle:
    if isinstance(payload, list):
        payload = "\n".join(payload) + "\n"
    return ReportBundle(fmt_name, payload, prov)


# --- index / table / radar -------------------------------------------------


def _load_cases(args: argparse.Namespace) -> tuple[CaseDataset, str]:
    if getattr(args, "dataset", None):
        try:
            text = Path(args.dataset).read_text(encoding="utf-8")
            dataset = load_dataset(args.dataset)
        except OSError as exc:
            raise InputFileError(f"cannot read dataset: {exc}") from exc
        except DatasetError as exc:
            raise InputFileError(str(exc)) from exc
        return dataset, text
    dataset = builtin_dataset(include_variants=getattr(args, "variants", False))
    return dataset, "builtin" + (":variants" if getattr(args, "variants", False) else "")


def cmd_index(args: argparse.Namespace) -> ReportBundle:
    cases: list[DomainCase]
    if args.intensities:
        cases = []
        for text in args.intensities:
            try:
                profile = ConditionProfile.parse(text)
            except ValueError as exc:
                raise UsageError(f"bad --intensities {text!r}: {exc}") from exc
            cases.append(DomainCase(name=profile.letters, profile=profile))
        source = "inline:" + ";".join(c.profile.letters for c in cases)
        dataset = CaseDataset(tuple(cases))
    else:
        dataset, source = _load_cases(args)
    rows = compute_table(dataset)
    prov = _provenance("index", source)

    if args.format == "json":
        doc = {
            "command": "index",
            "provenance": prov,
            "cases": [
                {
                    "name": r.name,
                    "intensities": list(r.letters),
                    "iota": jnum(r.iota),
                    "index": r.index,
                    "magnitude": r.magnitude.value,
                    "flags": list(r.flags),
                }
                for r in rows
            ],
        }
        return _bundle("json", _json(doc), prov)
    if args.format == "csv":
        body = [(r.name, *r.letters, fmt(r.iota), r.index, r.magnitude.value) for r in rows]
        return _bundle("csv", _csv("case,c1,c2,c3,c4,c5,iota,index,magnitude", body), prov)

    lines = ["# Tragedy Index", ""]
    lines += _md_table(
        ["case", "intensities", "raw iota", "index"],
        [
            (r.name, ",".join(r.letters), fmt(r.iota), f"{r.index} ({r.magnitude.value})")
            for r in rows
        ],
    )
    lines += _flag_lines(rows)
    lines += _md_footer(prov)
    return _bundle("markdown", lines, prov)


def _flag_lines(rows) -> list[str]:
    flagged = [(r.name, f) for r in rows for f in r.flags]
    if not flagged:
        return []
    return ["", "Flags:", ""] + [f"- {name}: {flag}" for name, flag in flagged]


def cmd_table(args: argparse.Namespace) -> ReportBundle:
    dataset, source = _load_cases(args)
    rows = compute_table(dataset)
    prov = _provenance("table", source)
    if args.format == "json":
        doc = {
            "command": "table",
            "provenance": prov,
            "rows": [
                {
                    "domain": r.name,
                    "c1": r.letters[0],
                    "c2": r.letters[1],
                    "c3": r.letters[2],
                    "c4": r.letters[3],
                    "c5": r.letters[4],
                    "index": r.index,
                    "magnitude": r.magnitude.value,
                    "flags": list(r.flags),
                }
                for r in rows
            ],
        }
        return _bundle("json", _json(doc), prov)
    if args.format == "csv":
        body = [(r.name, *r.letters, r.index, r.magnitude.value) for r in rows]
        return _bundle("csv", _csv("domain,c1,c2,c3,c4,c5,index,magnitude", body), prov)
    lines = ["# Intensity comparison", ""]
    lines += _md_table(
        ["Domain", "C1", "C2", "C3", "C4", "C5", "Index", "Magnitude"],
        [(r.name, *r.letters, f"{r.index:,}", r.magnitude.label) for r in rows],
    )
    lines += [
        "",
        "Intensities: A=Absent (0), L=Low (10), M=Medium (100), H=High (1,000), "
        "E=Extreme (10,000).",
    ]
    notes = [(c.name, c.footnotes) for c in dataset.cases if c.footnotes]
    if notes:
        lines += ["", "Notes:", ""] + [f"- {name}: {text}" for name, text in notes]
    lines += _flag_lines(rows)
    lines += _md_footer(prov)
    return _bundle("markdown", lines, prov)


def cmd_radar(args: argparse.Namespace) -> ReportBundle:
    dataset, source = _load_cases(args)
    selection = None
    if args.cases:
        selection = [s.strip() for s in args.cases.split(",") if s.strip()]
    try:
        data = radar_data(dataset, selection)
    except UnknownCaseError as exc:
        raise UsageError(str(exc)) from exc
    prov = _provenance("radar", source, ",".join(name for name, _ in data))
    if args.format == "json":
        doc = {
            "command": "radar",
            "provenance": prov,
            "scale": "log10 intensity",
            "cases": [{"case": name, "values": list(vals)} for name, vals in data],
        }
        return _bundle("json", _json(doc), prov)
    if args.format == "csv":
        return _bundle("csv", _csv(RADAR_CSV_HEADER, [(name, *vals) for name, vals in data]), prov)
    lines = ["# Radar data (log10 intensity)", ""]
    lines += _md_table(
        ["case", "c1", "c2", "c3", "c4", "c5"], [(name, *vals) for name, vals in data]
    )
    lines += _md_footer(prov)
    return _bundle("markdown", lines, prov)


# --- verify ----------------------------------------------------------------


def _read_config(path: str) -> tuple[GameConfig, str]:
    try:
        return load_config(path)
    except OSError as exc:
        raise InputFileError(f"cannot read config: {exc}") from exc
    except ConfigError as exc:
        raise InputFileError(f"{path}: {exc}") from exc


def _parse_barriers(text: str | None) -> C5Declaration:
    if not text:
        return C5Declaration()
    try:
        return C5Declaration(frozenset(Barrier.parse(t) for t in text.split(",") if t.strip()))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _witness_text(w: dict[str, Any] | None) -> str:
    if not w:
        return ""
    return ", ".join(f"{k}={fmt(v) if isinstance(v, float) else v}" for k, v in w.items())


def cmd_verify(args: argparse.Namespace) -> ReportBundle:
    cfg, text = _read_config(args.config)
    c5 = _parse_barriers(args.barriers)
    verdict = verify_conditions(cfg.game, c5, decentralized=not args.centralized)
    prov = _provenance("verify", text, ",".join(c5.sorted_barriers()), str(args.centralized))
    if args.format == "json":
        doc = {"command": "verify", "provenance": prov, "game": cfg.name, "n": cfg.game.n}
        doc.update(_jsonable(verdict.to_dict()))
        return _bundle("json", _json(doc), prov)
    if args.format == "csv":
        body = [
            (
                r.condition,
                r.status.value,
                "yes" if r.positive else "no",
                _witness_text(r.witness),
                r.detail,
            )
            for r in verdict.reports
        ]
        return _bundle("csv", _csv("condition,status,positive,witness,detail", body), prov)
    yes = lambda b: "yes" if b else "no"  # noqa: E731
    lines = [f"# Tragedy verdict: {cfg.name} (n={cfg.game.n})", ""]
    lines.append(f"Structural tragedy: **{yes(verdict.is_structural_tragedy)}**")
    lines.append("")
    lines += _md_table(
        ["condition", "status", "holds", "witness", "detail"],
        [
            (r.condition, r.status.value, yes(r.positive), _witness_text(r.witness), r.detail)
            for r in verdict.reports
        ],
    )
    nash = ", ".join(format_profile(p) for p in verdict.nash_set) or "(none)"
    lines += [
        "",
        f"- analysis mode: {verdict.mode}",
        f"- pure Nash equilibria: {nash}",
        f"- all-C Pareto-dominates every equilibrium: {yes(verdict.pareto_dominated_equilibrium)}",
        "- best-response dynamics from all-C absorb at all-D: "
        + yes(verdict.dynamics_absorbed_at_all_defect),
        "- every player's choice reaches every other player: "
        + yes(verdict.externalities_reach_all_pairs),
    ]
    if not c5.satisfied:
        lines.append("- C5 flagged: no enforcement barriers declared, so the tragedy cannot hold")
    lines += _md_footer(prov)
    return _bundle("markdown", lines, prov)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, float):
        return jnum(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# --- productivity ----------------------------------------------------------


def _or_undefined(value: float | None, reason: str) -> str:
    return fmt(value) if value is not None else f"undefined ({reason})"


def _safe(fn: Callable[[], float]) -> tuple[float | None, str]:
    try:
        return fn(), ""
    except ValueError as exc:
        return None, str(exc)


def cmd_productivity(args: argparse.Namespace) -> ReportBundle:
    cfg, text = _read_config(args.config)
    if cfg.scenario is None:
        raise InputFileError(f"{args.config}: productivity needs a config of kind 'productivity'")
    sc = cfg.scenario
    sweep = None
    if args.sweep:
        try:
            alphas = [float(t) for t in args.sweep.split(",")]
            sweep = alpha_sweep(sc, alphas)
        except ValueError as exc:
            raise UsageError(f"bad --sweep {args.sweep!r}: {exc}") from exc
    prov = _provenance("productivity", text, args.sweep or "")

    dominance = [is_defection_dominant(sc, i) for i in range(sc.n)]
    gaps = [dominance_gap(sc, i, d.witness) for i, d in enumerate(dominance)]
    surplus = cooperative_surplus(sc)
    w_coop, w_nash = aggregate_welfare(sc)
    poa, poa_err = _safe(lambda: price_of_anarchy(w_coop, w_nash))
    gap, gap_err = _safe(lambda: normalized_rationality_gap(w_coop, w_nash))
    trps = tau = None
    tau_err = ""
    if sc.homogeneous:
        trps = extract_symmetric_payoffs(to_symmetric(sc))
        tau, tau_err = _safe(lambda: temptation_ratio(trps))
    failures = [i for i, d in enumerate(dominance) if not d.holds]

    if args.format == "csv":
        if sweep is not None:
            body = [
                (fmt(r.alpha), r.firm_index, fmt(r.firm_surplus), fmt(r.worker_surplus))
                for r in sweep
            ]
            return _bundle("csv", _csv(SWEEP_CSV_HEADER, body), prov)
        body = [
            (
                i,
                "true" if d.holds else "false",
                fmt(d.worst_case_net),
                format_profile(d.witness),
                fmt(s.firm_surplus),
                fmt(s.worker_surplus),
            )
            for i, (d, s) in enumerate(zip(dominance, surplus))
        ]
        header = "firm_index,dominant,worst_case_net,witness,firm_surplus,worker_surplus"
        return _bundle("csv", _csv(header, body), prov)

    if args.format == "json":
        doc: dict[str, Any] = {
            "command": "productivity",
            "provenance": prov,
            "n": sc.n,
            "dominance": [
                {
                    "firm_index": i,
                    "dominant": d.holds,
                    "worst_case_net": jnum(d.worst_case_net),
                    "witness": format_profile(d.witness),
                    "market_share_gain": jnum(g.market_share_gain),
                    "labor_cost_increase": jnum(g.labor_cost_increase),
                }
                for i, (d, g) in enumerate(zip(dominance, gaps))
            ],
            "dominance_assumption_fails_for": failures,
            "welfare": {"all_cooperate": jnum(w_coop), "all_defect": jnum(w_nash)},
            "price_of_anarchy": None if poa is None else jnum(poa),
            "normalized_rationality_gap": None if gap is None else jnum(gap),
            "symmetric_payoffs": None,
            "temptation_ratio": None if tau is None else jnum(tau),
            "cooperative_surplus": [
                {
                    "firm_index": i,
                    "firm_surplus": jnum(s.firm_surplus),
                    "worker_surplus": jnum(s.worker_surplus),
                }
                for i, s in enumerate(surplus)
            ],
        }
        if trps is not None:
            doc["symmetric_payoffs"] = {
                "T": jnum(trps.T),
                "R": jnum(trps.R),
                "P": jnum(trps.P),
                "S": jnum(trps.S),
                "dilemma": trps.is_dilemma,
            }
        if sweep is not None:
            doc["alpha_sweep"] = [
                {
                    "alpha": jnum(r.alpha),
                    "firm_index": r.firm_index,
                    "firm_surplus": jnum(r.firm_surplus),
                    "worker_surplus": jnum(r.worker_surplus),
                }
                for r in sweep
            ]
        return _bundle("json", _json(doc), prov)

    lines = [f"# Productivity game (n={sc.n})", "", "## Dominance of defection", ""]
    lines += _md_table(
        [
            "firm",
            "dominant",
            "worst-case net",
            "witness (opponents)",
            "share gain",
            "labour cost increase",
        ],
        [
            (
                i,
                "yes" if d.holds else "no",
                fmt(d.worst_case_net),
                format_profile(d.witness),
                fmt(g.market_share_gain),
                fmt(g.labor_cost_increase),
            )
            for i, (d, g) in enumerate(zip(dominance, gaps))
        ],
    )
    for i in failures:
        d = dominance[i]
        lines.append("")
        lines.append(
            f"**Dominance assumption fails for firm {i}:** against opponents "
            f"{format_profile(d.witness)} the market-share gain does not exceed the labour-cost "
            f"increase (net {fmt(d.worst_case_net)})."
        )
    lines += ["", "## Severity", ""]
    if trps is not None:
        lines.append(
            f"- T={fmt(trps.T)}, R={fmt(trps.R)}, P={fmt(trps.P)}, S={fmt(trps.S)} "
            f"(T>R>P>S: {'yes' if trps.is_dilemma else 'no'})"
        )
    lines.append(f"- total firm profit: all-C {fmt(w_coop)}, all-D {fmt(w_nash)}")
    lines.append(
        f"- price of anarchy: {fmt(poa) if poa is not None else 'undefined (' + poa_err + ')'}"
    )
    lines.append(f"- normalized rationality gap: {_or_undefined(gap, gap_err)}")
    if trps is not None:
        lines.append(f"- temptation ratio: {_or_undefined(tau, tau_err)}")
    lines += ["", "## Cooperative surplus (all-C minus all-D)", ""]
    lines += _md_table(
        ["firm", "firm surplus", "worker surplus"],
        [(i, fmt(s.firm_surplus), fmt(s.worker_surplus)) for i, s in enumerate(surplus)],
    )
    if sweep is not None:
        lines += ["", "## Alpha sweep", ""]
        lines += _md_table(
            ["alpha", "firm", "firm surplus", "worker surplus"],
            [
                (fmt(r.alpha), r.firm_index, fmt(r.firm_surplus), fmt(r.worker_surplus))
                for r in sweep
            ],
        )
    lines += _md_footer(prov)
    return _bundle("markdown", lines, prov)


# --- wiring ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    common.add_argument(
        "--output", default=argparse.SUPPRESS, help="write the report here instead of stdout"
    )

    parser = argparse.ArgumentParser(prog="tragedy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tragedy {__version__}")
    parser.add_argument("--format", choices=FORMATS, default="markdown")
    parser.add_argument("--output", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="Tragedy Index for profiles or a dataset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--intensities", action="append", metavar="I1,I2,I3,I4,I5")
    src.add_argument("--builtin", action="store_true", help="the ten built-in reference domains")
    src.add_argument("--dataset", metavar="PATH")
    p.add_argument("--variants", action="store_true", help="include built-in rating variants")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("table", parents=[common], help="intensity comparison table")
    p.add_argument("--dataset", metavar="PATH")
    p.add_argument("--variants", action="store_true")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("radar", parents=[common], help="log10 intensities for radar charts")
    p.add_argument("--dataset", metavar="PATH")
    p.add_argument("--cases", help="comma-separated case names (default: all)")
    p.add_argument("--variants", action="store_true")
    p.set_defaults(func=cmd_radar)

    p = sub.add_parser(
        "verify", parents=[common], help="five-condition diagnostic for a game config"
    )
    p.add_argument("config")
    p.add_argument(
        "--barriers", default="", help="comma list of anarchy,verification,monitoring,commitment"
    )
    p.add_argument(
        "--centralized", action="store_true", help="declare a single central decision-maker"
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("productivity", parents=[common], help="productivity-game analysis")
    p.add_argument("config")
    p.add_argument(
        "--sweep", metavar="A1,A2,...", help="ascending alpha values for a surplus sweep"
    )
    p.set_defaults(func=cmd_productivity)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        bundle = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    if args.output:
        try:
            Path(args.output).write_text(bundle.payload, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(bundle.payload)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
