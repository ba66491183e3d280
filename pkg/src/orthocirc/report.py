"""Benchmark report rendering: comparison figures for the CLI bench path."""

from __future__ import annotations


def render_bench_figure(rows: list[dict], path: str) -> None:
    """Render a MAC-count and wall-time comparison chart to an image file.

    `rows` holds one dict per method with keys method, total_macs,
    wall_mean_s, and wall_min_s, as produced by the bench subcommand.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    methods = [row["method"] for row in rows]
    macs = [row["total_macs"] for row in rows]
    mean_s = [row["wall_mean_s"] for row in rows]

    fig, (ax_macs, ax_time) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    colors = ["#2b6cb0", "#c05621", "#2f855a", "#6b46c1"][: len(methods)]

    ax_macs.bar(methods, macs, color=colors)
    ax_macs.set_ylabel("multiply-accumulates")
    ax_macs.set_title("MAC count per query")
    if min(macs) > 0 and max(macs) / max(min(macs), 1) > 50:
        ax_macs.set_yscale("log")

    ax_time.bar(methods, [t * 1e3 for t in mean_s], color=colors)
    ax_time.set_ylabel("mean wall time [ms]")
    ax_time.set_title("wall time per query")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
