"""Plot outputs for run event streams.

The gnuplot-ready ``.dat`` file is the contract (wide format, one time
column plus per-service value columns, ``#``-prefixed header); the SVG
rendered with matplotlib is a convenience view of the same data.
"""

from __future__ import annotations

import csv
from pathlib import Path

PLOT_KINDS = ("capacity", "utilization")


def read_events_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV")
        required = {"time", "service", "cmv", "demand", "capacity"}
        missing = required - set(reader.fieldnames)
        if missing:
            raise ValueError(f"{path}: unknown column schema, missing {sorted(missing)}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _pivot(rows: list[dict[str, str]], columns: list[str]):
    services = sorted({r["service"] for r in rows})
    times = sorted({int(r["time"]) for r in rows})
    index = {(int(r["time"]), r["service"]): r for r in rows}
    series = {
        col: {svc: [float(index[(t, svc)][col]) for t in times] for svc in services}
        for col in columns
    }
    return times, services, series


def write_plot_data(rows: list[dict[str, str]], kind: str, out_path: Path) -> Path:
    """Write the wide-format data file for one plot kind; returns its path."""
    if kind == "capacity":
        columns = ["demand", "capacity"]
    elif kind == "utilization":
        columns = ["cmv"]
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    times, services, series = _pivot(rows, columns)
    header = ["time"] + [f"{svc}:{col}" for svc in services for col in columns]
    lines = ["# " + "\t".join(header)]
    for j, t in enumerate(times):
        values = [str(t)]
        for svc in services:
            for col in columns:
                values.append(f"{series[col][svc][j]:.2f}")
        lines.append("\t".join(values))
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def write_plot_image(
    rows: list[dict[str, str]],
    kind: str,
    out_path: Path,
    threshold: float | None = None,
    title: str = "",
) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if kind == "capacity":
        times, services, series = _pivot(rows, ["demand", "capacity"])
        fig, ax = plt.subplots(figsize=(9, 5))
        for svc in services:
            (line,) = ax.plot(times, series["demand"][svc], label=f"{svc} demand")
            ax.plot(
                times,
                series["capacity"][svc],
                linestyle="--",
                color=line.get_color(),
                alpha=0.7,
            )
        ax.set_ylabel("milliCPU")
    elif kind == "utilization":
        times, services, series = _pivot(rows, ["cmv"])
        fig, ax = plt.subplots(figsize=(9, 5))
        for svc in services:
            ax.plot(times, series["cmv"][svc], label=svc)
        if threshold is not None:
            ax.axhline(threshold, color="black", linestyle=":", label=f"threshold {threshold:g}%")
        ax.set_ylabel("CPU utilization (% of request)")
    else:
        raise ValueError(f"unknown plot kind {kind!r}")

    ax.set_xlabel("time (s)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="x-small", ncol=2)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
