"""Command-line front door: run the scenario matrix, compare, plot.

Exit codes: 0 success, 2 config validation error, 1 runtime failure.
Outputs land under ``<out>/runs/<scenario>/<autoscaler>/`` as ``events.csv``
and ``report.json``; a side-by-side comparison is written when both
autoscalers run.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .config import ConfigError, MatrixConfig, expand_scenarios, load_config
from .knowledge import KnowledgeBase
from .metrics import HIGHER_IS_BETTER, METRIC_NAMES, ScenarioReport, compute_report
from .simulate import AUTOSCALERS, BASELINE, SMART, run_scenario


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpasim",
        description="Run autoscaler scenarios against a simulated microservice application.",
    )
    sub = parser.add_subparsers(required=True)

    p_run = sub.add_parser("run", help="run the scenario matrix from a config file")
    p_run.add_argument("config", help="path to a YAML scenario config")
    p_run.add_argument(
        "--autoscaler", choices=[SMART, BASELINE, "both"], default="both"
    )
    p_run.add_argument("--out", default="out", help="output directory (default: out)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="build a comparison table from report files")
    p_cmp.add_argument("reports", help="output directory of a previous `run` invocation")
    p_cmp.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser("plot", help="plot one run's event stream")
    p_plot.add_argument("events", help="path to an events.csv file")
    p_plot.add_argument("--kind", choices=["capacity", "utilization"], required=True)
    p_plot.add_argument("--out", default=None, help="output directory (default: beside the CSV)")
    p_plot.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="threshold line for utilization plots (default: parsed from the scenario id)",
    )
    p_plot.set_defaults(func=cmd_plot)
    return parser


def cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    autoscalers = list(AUTOSCALERS) if args.autoscaler == "both" else [args.autoscaler]
    out_dir = Path(args.out)
    reports = run_matrix(cfg, autoscalers, out_dir, seed)
    if set(autoscalers) == set(AUTOSCALERS):
        table = comparison_table(reports)
        write_comparison(table, out_dir)
        print(render_comparison(table))
    print(f"wrote {len(reports)} runs under {out_dir / 'runs'}")
    return 0


def run_matrix(
    cfg: MatrixConfig,
    autoscalers: list[str],
    out_dir: Path,
    seed: int,
) -> dict[tuple[str, str], ScenarioReport]:
    """Run every (scenario, autoscaler) pair and write events.csv/report.json."""
    scenarios = expand_scenarios(cfg)
    reports: dict[tuple[str, str], ScenarioReport] = {}
    for scenario in scenarios:
        for autoscaler in autoscalers:
            kb = KnowledgeBase()
            run_id = f"{scenario.scenario_id}/{autoscaler}"
            snapshots = run_scenario(scenario, autoscaler, kb=kb, run_id=run_id, seed=seed)
            report = compute_report(snapshots)
            reports[(scenario.scenario_id, autoscaler)] = report

            run_dir = out_dir / "runs" / scenario.scenario_id / autoscaler
            run_dir.mkdir(parents=True, exist_ok=True)
            (run_dir / "events.csv").write_bytes(kb.export(run_id, "csv"))
            payload = {
                "scenario": scenario.scenario_id,
                "autoscaler": autoscaler,
                "seed": seed,
                **report.to_dict(),
            }
            (run_dir / "report.json").write_text(
                json.dumps(payload, indent=2, sort_keys=True) + "\n"
            )
    return reports


def cmd_compare(args: argparse.Namespace) -> int:
    reports = read_reports(Path(args.reports))
    table = comparison_table(reports)
    write_comparison(table, Path(args.reports))
    print(render_comparison(table))
    return 0


def read_reports(out_dir: Path) -> dict[tuple[str, str], ScenarioReport]:
    runs_dir = out_dir / "runs"
    if not runs_dir.is_dir():
        raise FileNotFoundError(f"no runs directory under {out_dir}")
    reports: dict[tuple[str, str], ScenarioReport] = {}
    for report_path in sorted(runs_dir.glob("*/*/report.json")):
        data = json.loads(report_path.read_text())
        metrics = data["metrics"]
        reports[(data["scenario"], data["autoscaler"])] = ScenarioReport(
            per_service=data.get("per_service", {}), **metrics
        )
    if not reports:
        raise FileNotFoundError(f"no report.json files under {runs_dir}")
    return reports


def comparison_table(
    reports: dict[tuple[str, str], ScenarioReport]
) -> list[dict[str, str]]:
    """Per scenario and metric: smart value, baseline value, smart/baseline ratio."""
    scenarios_smart = {sid for sid, a in reports if a == SMART}
    scenarios_base = {sid for sid, a in reports if a == BASELINE}
    if scenarios_smart != scenarios_base:
        raise ValueError(
            f"mismatched scenario sets: smart={sorted(scenarios_smart)} "
            f"baseline={sorted(scenarios_base)}"
        )
    if not scenarios_smart:
        raise ValueError("no scenarios with both autoscalers to compare")

    rows = []
    for sid in sorted(scenarios_smart, key=_scenario_sort_key):
        smart = reports[(sid, SMART)]
        base = reports[(sid, BASELINE)]
        for metric in METRIC_NAMES:
            s, b = smart.metric(metric), base.metric(metric)
            if b == 0:
                ratio = "1.00" if s == 0 else "inf"
            else:
                ratio = f"{s / b:.2f}"
            direction = "higher-better" if metric in HIGHER_IS_BETTER else "lower-better"
            rows.append(
                {
                    "scenario": sid,
                    "metric": metric,
                    "smart": f"{s:.2f}",
                    "baseline": f"{b:.2f}",
                    "ratio_smart_over_baseline": ratio,
                    "direction": direction,
                }
            )
    return rows


def _scenario_sort_key(sid: str):
    m = re.fullmatch(r"(\d+)R-([0-9.]+)%", sid)
    if m:
        return (int(m.group(1)), float(m.group(2)))
    return (1 << 30, sid)


def render_comparison(rows: list[dict[str, str]]) -> str:
    headers = list(rows[0].keys())
    widths = {h: max(len(h), *(len(r[h]) for r in rows)) for h in headers}
    lines = ["  ".join(h.ljust(widths[h]) for h in headers)]
    for r in rows:
        lines.append("  ".join(r[h].ljust(widths[h]) for h in headers))
    return "\n".join(lines)


def write_comparison(rows: list[dict[str, str]], out_dir: Path) -> None:
    import csv

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "comparison.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    (out_dir / "comparison.txt").write_text(render_comparison(rows) + "\n")


def cmd_plot(args: argparse.Namespace) -> int:
    from .plotting import read_events_csv, write_plot_data, write_plot_image

    events_path = Path(args.events)
    rows = read_events_csv(events_path)
    out_dir = Path(args.out) if args.out else events_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    threshold = args.threshold
    scenario_hint = _scenario_from_path(events_path)
    if threshold is None and scenario_hint is not None:
        threshold = scenario_hint

    data_path = write_plot_data(rows, args.kind, out_dir / f"plot_{args.kind}.dat")
    image_path = write_plot_image(
        rows,
        args.kind,
        out_dir / f"plot_{args.kind}.svg",
        threshold=threshold if args.kind == "utilization" else None,
        title=str(events_path.parent),
    )
    print(f"wrote {data_path} and {image_path}")
    return 0


def _scenario_from_path(path: Path) -> float | None:
    for part in path.parts:
        m = re.fullmatch(r"\d+R-([0-9.]+)%", part)
        if m:
            return float(m.group(1))
    return None


if __name__ == "__main__":
    sys.exit(main())
