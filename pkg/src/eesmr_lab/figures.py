"""Figure rendering for reports.

Every report path that writes delimited output also renders a PNG next to
it. Rendering is headless (Agg) and avoids timestamps so repeated runs
produce stable files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_DPI = 110
_META = {"Software": "eesmr-lab"}


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=_DPI, metadata=_META)
    plt.close(fig)


def render_run_figure(report: dict, path: str) -> None:
    """Per-node energy split and commit progress for one run."""
    en = report["energy_mj"]
    nodes = list(range(len(en["per_node"])))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

    ax1.bar(nodes, en["per_node_tx"], label="transmit", color="#d95f02")
    ax1.bar(nodes, en["per_node_rx"], bottom=en["per_node_tx"], label="receive",
            color="#7570b3")
    crypto_bottom = [t + r for t, r in zip(en["per_node_tx"], en["per_node_rx"])]
    ax1.bar(nodes, en["per_node_crypto"], bottom=crypto_bottom, label="signatures",
            color="#1b9e77")
    ax1.set_xlabel("node")
    ax1.set_ylabel("energy (mJ)")
    ax1.set_title("energy by node (%s, %s)" % (en["medium"], en["scheme"]))
    ax1.legend(fontsize=8)

    commits = report["commits"]["per_node"]
    ax2.bar(nodes, commits, color="#386cb0")
    ax2.axhline(report["commits"]["target"], color="#e41a1c", linestyle="--",
                linewidth=1, label="target")
    ax2.set_xlabel("node")
    ax2.set_ylabel("committed blocks")
    ax2.set_title("commit progress (max view %d)" % report["timing"]["max_view"])
    ax2.legend(fontsize=8)

    fig.suptitle(report["scenario"]["name"], fontsize=11)
    fig.tight_layout()
    _save(fig, path)


def render_sweep_figure(aggregate: dict, path: str) -> None:
    """Per-node mean energy against population, one line per profile."""
    rows = aggregate["rows"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

    profiles = aggregate["profiles"]
    for profile in profiles:
        by_n: dict[int, list[float]] = {}
        for r in rows:
            if r["profile"] == profile:
                by_n.setdefault(r["n"], []).append(r["node_mean_mj"])
        ns = sorted(by_n)
        means = [sum(by_n[n]) / len(by_n[n]) for n in ns]
        ax1.plot(ns, means, marker="o", label=profile)
    ax1.set_xlabel("population n")
    ax1.set_ylabel("mean per-node energy (mJ)")
    ax1.set_title("per-node energy by population")
    ax1.legend(fontsize=7)

    by_n_views: dict[int, list[int]] = {}
    for r in rows:
        by_n_views.setdefault(r["n"], []).append(r["view_changes"])
    ns = sorted(by_n_views)
    ax2.boxplot([by_n_views[n] for n in ns], tick_labels=[str(n) for n in ns])
    ax2.set_xlabel("population n")
    ax2.set_ylabel("view changes per run")
    ax2.set_title("%d runs, %d violations" % (aggregate["runs"], aggregate["violations"]))

    fig.tight_layout()
    _save(fig, path)


def render_region_figure(region: dict, path: str) -> None:
    """Sign-structured heatmap of the block-cost difference grid."""
    deltas = region["delta"]
    peak = max(abs(v) for row in deltas for v in row) or 1.0
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    image = ax.imshow(
        deltas, cmap="RdBu_r", vmin=-peak, vmax=peak, aspect="auto",
        origin="lower",
    )
    ax.set_xticks(range(len(region["ms"])), [str(m) for m in region["ms"]],
                  rotation=45, fontsize=7)
    ax.set_yticks(range(len(region["ns"])), [str(n) for n in region["ns"]], fontsize=7)
    ax.set_xlabel("payload bytes m")
    ax.set_ylabel("population n")
    ax.set_title("block cost: %s minus %s (J); blue favors %s"
                 % (region["a"], region["b"], region["a"]))
    fig.colorbar(image, ax=ax, label="joules per block")
    fig.tight_layout()
    _save(fig, path)


def render_compare_figure(compare: dict, path: str) -> None:
    """Steady and view-change cost bars for the compared models."""
    names = sorted(compare["models"])
    blocks = [compare["models"][n]["block_j"] for n in names]
    extras = [compare["models"][n]["viewchange_extra_j"] for n in names]
    xs = range(len(names))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.bar(xs, blocks, color="#386cb0")
    ax1.set_xticks(list(xs), names, fontsize=8)
    ax1.set_ylabel("J per committed block")
    ax1.set_title("steady state")
    ax2.bar(xs, extras, color="#d95f02")
    ax2.set_xticks(list(xs), names, fontsize=8)
    ax2.set_ylabel("J per view change")
    ax2.set_title("view-change overhead")
    fig.suptitle("n=%d, m=%d B, %s, %s" % (
        compare["n"], compare["m"], compare["medium"], compare["scheme"]), fontsize=10)
    fig.tight_layout()
    _save(fig, path)
