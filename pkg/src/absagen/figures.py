"""Rendering of a metrics report as a bar-chart figure."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_report_figure(report, path) -> None:
    """Save a PNG bar chart of the report's headline numbers next to it."""
    labels = ["precision", "recall", "F1"]
    values = [report.micro.precision, report.micro.recall, report.micro.f1]
    colors = ["#4878a8"] * 3
    if report.implicit_variant is not None:
        variant = report.implicit_variant
        labels += ["P*", "R*", "F1*"]
        values += [variant.precision, variant.recall, variant.f1]
        colors += ["#78a8d0"] * 3
    if report.macro_f1 is not None:
        labels.append("macro F1")
        values.append(report.macro_f1)
        colors.append("#589858")
    if report.accuracy:
        for way, value in report.accuracy.items():
            labels.append(f"acc {way}")
            values.append(value)
            colors.append("#b08030")

    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(labels)), 3.4))
    positions = range(len(labels))
    ax.bar(positions, values, color=colors)
    for x, value in zip(positions, values):
        ax.text(x, value + 0.02, f"{100 * value:.2f}", ha="center", fontsize=8)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.12)
    ax.set_ylabel("fraction")
    title = f"{report.dataset} / {report.task.value}"
    subtitle = f"{report.format.value}, {report.mode.value} mode"
    ax.set_title(f"{title} ({subtitle})", fontsize=10)
    if report.implicit_variant is not None:
        ax.annotate(
            "* implicit-target variant",
            xy=(0.99, 0.97),
            xycoords="axes fraction",
            ha="right",
            fontsize=7,
        )
    fig.tight_layout()
    # Suppress the software tag so repeated runs write identical bytes.
    fig.savefig(path, dpi=130, metadata={"Software": None})
    plt.close(fig)
