"""Figure rendering for reports: charts saved next to the delimited output.

Uses the Agg backend so rendering works headless; every figure is written
to a file and the paths are returned for the caller to report.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import MetricsReport
from .persistence import SnapshotDiff

_DPI = 150


def _label(unit: str, name: str) -> str:
    return f"{unit}.{name}"


def save_metrics_figures(report: MetricsReport, out_dir: str | Path) -> list[Path]:
    """Render complexity and line-count charts for a metrics report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    if report.functions:
        rows = sorted(report.functions, key=lambda f: (-f.cc, f.unit, f.function))
        labels = [_label(f.unit, f.function) for f in rows]
        values = [f.cc for f in rows]
        fig, ax = plt.subplots(figsize=(8, max(2.0, 0.35 * len(rows) + 1)))
        ax.barh(range(len(rows)), values, color="#4878d0")
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels(labels, fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("cyclomatic complexity")
        ax.set_title("Complexity per function")
        fig.tight_layout()
        path = out_dir / "complexity.png"
        fig.savefig(path, dpi=_DPI)
        plt.close(fig)
        written.append(path)

    if report.files:
        names = [Path(p).name for p, _, _ in report.files]
        code = [loc.code for _, _, loc in report.files]
        comment = [loc.comment for _, _, loc in report.files]
        blank = [loc.blank for _, _, loc in report.files]
        fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(names) + 1)))
        y = range(len(names))
        ax.barh(y, code, label="code", color="#4878d0")
        ax.barh(y, comment, left=code, label="comment", color="#ee854a")
        base = [c + m for c, m in zip(code, comment)]
        ax.barh(y, blank, left=base, label="blank", color="#b0b0b0")
        ax.set_yticks(list(y))
        ax.set_yticklabels(names, fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("lines")
        ax.set_title("Line counts per file")
        ax.legend(loc="lower right", fontsize=8)
        fig.tight_layout()
        path = out_dir / "loc.png"
        fig.savefig(path, dpi=_DPI)
        plt.close(fig)
        written.append(path)

    return written


def save_diff_figure(diff: SnapshotDiff, out_dir: str | Path) -> list[Path]:
    """Render before/after complexity bars for a snapshot diff."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if diff.empty:
        return []
    labels = []
    before = []
    after = []
    for (unit, name), cc_before, cc_after in diff.changed:
        labels.append(_label(unit, name))
        before.append(cc_before)
        after.append(cc_after)
    for unit, name in diff.added:
        labels.append(_label(unit, name) + " (added)")
        before.append(0)
        after.append(0)
    for unit, name in diff.removed:
        labels.append(_label(unit, name) + " (removed)")
        before.append(0)
        after.append(0)
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.45 * len(labels) + 1)))
    y = range(len(labels))
    height = 0.38
    ax.barh([i - height / 2 for i in y], before, height=height,
            label="before", color="#b0b0b0")
    ax.barh([i + height / 2 for i in y], after, height=height,
            label="after", color="#4878d0")
    ax.set_yticks(list(y))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("cyclomatic complexity")
    ax.set_title("Complexity changes between snapshots")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = out_dir / "diff.png"
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return [path]
