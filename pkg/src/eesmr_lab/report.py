"""Run and sweep reports.

Reports are deterministic functions of (scenario, seed): no wall-clock
timestamps, no environment echoes, stable key order, so byte-identical
replays produce byte-identical files. Energy figures inside reports are
millijoules (the analytical layer works in joules; reports convert).
"""

from __future__ import annotations

import csv
import io
import json

from .checkers import vc_windows
from .energy import simulation_energy

SCHEMA_VERSION = 1


def _percentile(values: list[float], fraction: float) -> float:
    """Nearest-rank percentile; 0 <= fraction <= 1 on a non-empty list."""
    ordered = sorted(values)
    idx = min(len(ordered) - 1, max(0, round(fraction * (len(ordered) - 1))))
    return ordered[idx]


def build_run_report(sim, seed: int) -> dict:
    """Summarize one finished simulation as a JSON-ready dictionary."""
    scn = sim.scenario
    monitor = sim.monitor
    ledger = sim.network.ledger
    committed = monitor.committed_height()
    energy = simulation_energy(sim, blocks=committed or None)

    windows = vc_windows(monitor, sim.network.now)
    durations = [(end - start) / scn.delta for start, end in windows]
    new_views = sum(1 for (_, kind, _, _) in monitor.events if kind == "new_view")

    report = {
        "schema": SCHEMA_VERSION,
        "scenario": scn.to_dict(),
        "seed": seed,
        "all_pass": sim.all_pass(),
        "verdicts": {name: v.as_dict() for name, v in sim.verdicts.items()},
        "commits": {
            "target": scn.target_blocks,
            "committed_height": committed,
            "per_node": [monitor.commit_count(i) for i in range(scn.n)],
        },
        "timing": {
            "final_time_deltas": sim.network.now / scn.delta,
            "budget_deltas": sim.budget / scn.delta,
            "max_view": monitor.max_view,
            "view_changes": new_views,
            "recovery_windows": len(windows),
            "max_recovery_deltas": max(durations) if durations else 0.0,
        },
        "energy_mj": {
            "medium": energy["medium"],
            "scheme": energy["scheme"],
            "per_node": [round(e["total_j"] * 1000.0, 6) for e in energy["per_node"]],
            "per_node_tx": [round(e["tx_j"] * 1000.0, 6) for e in energy["per_node"]],
            "per_node_rx": [round(e["rx_j"] * 1000.0, 6) for e in energy["per_node"]],
            "per_node_crypto": [
                round((e["sign_j"] + e["verify_j"]) * 1000.0, 6) for e in energy["per_node"]
            ],
            "total": round(energy["total_j"] * 1000.0, 6),
            "per_block": round(energy["total_j"] / committed * 1000.0, 6) if committed else None,
            "extrapolated_sizes": energy["extrapolated_sizes"],
        },
        "ledger": {
            "edge_transmissions": ledger.total_tx_edges(),
            "waves": len(ledger.waves),
            "per_node_tx_edges": list(ledger.tx_edges),
            "per_node_rx_msgs": list(ledger.rx_msgs),
            "sign_counts": list(sim.auth.sign_count),
            "verify_counts": list(sim.auth.verify_count),
        },
    }
    failures = {name: v.detail for name, v in sim.verdicts.items() if not v.ok}
    if failures:
        report["counterexample"] = failures
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run_report_csv(report: dict) -> str:
    """Per-node delimited view of a run report."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "node", "commits", "tx_edges", "rx_msgs", "signs", "verifies",
        "energy_mj", "tx_mj", "rx_mj", "crypto_mj",
    ])
    n = len(report["commits"]["per_node"])
    led = report["ledger"]
    en = report["energy_mj"]
    for i in range(n):
        writer.writerow([
            i, report["commits"]["per_node"][i],
            led["per_node_tx_edges"][i], led["per_node_rx_msgs"][i],
            led["sign_counts"][i], led["verify_counts"][i],
            en["per_node"][i], en["per_node_tx"][i], en["per_node_rx"][i],
            en["per_node_crypto"][i],
        ])
    return out.getvalue()


def trace_jsonl(events: list[dict]) -> str:
    """Append-only JSON-lines rendering of a trace event list."""
    return "".join(json.dumps(ev, sort_keys=True) + "\n" for ev in events)


# ------------------------------------------------------------------ sweeps


def sweep_row(report: dict, profile: str, policy: str) -> dict:
    """One flat row per run for the sweep table."""
    scn = report["scenario"]
    per_node = report["energy_mj"]["per_node"]
    return {
        "profile": profile,
        "policy": policy,
        "n": scn["n"],
        "f": scn["f"],
        "seed": report["seed"],
        "all_pass": report["all_pass"],
        "committed": report["commits"]["committed_height"],
        "max_view": report["timing"]["max_view"],
        "view_changes": report["timing"]["view_changes"],
        "final_time_deltas": report["timing"]["final_time_deltas"],
        "total_mj": report["energy_mj"]["total"],
        "node_mean_mj": round(sum(per_node) / len(per_node), 6),
        "node_max_mj": max(per_node),
        "failed_checks": ",".join(sorted(report.get("counterexample", {}))) or "",
    }


SWEEP_COLUMNS = [
    "profile", "policy", "n", "f", "seed", "all_pass", "committed", "max_view",
    "view_changes", "final_time_deltas", "total_mj", "node_mean_mj",
    "node_max_mj", "failed_checks",
]


def aggregate_sweep(rows: list[dict]) -> dict:
    """Order-independent aggregate of sweep rows."""
    rows = sorted(rows, key=lambda r: (r["profile"], r["policy"], r["n"], r["seed"]))
    failures = [
        {"profile": r["profile"], "policy": r["policy"], "n": r["n"],
         "seed": r["seed"], "failed_checks": r["failed_checks"]}
        for r in rows if not r["all_pass"]
    ]
    by_n: dict[int, list[float]] = {}
    for r in rows:
        by_n.setdefault(r["n"], []).append(r["node_mean_mj"])
    energy_by_n = {
        str(n): {
            "p50": round(_percentile(vals, 0.50), 6),
            "p90": round(_percentile(vals, 0.90), 6),
            "max": round(max(vals), 6),
        }
        for n, vals in sorted(by_n.items())
    }
    profiles = sorted({r["profile"] for r in rows})
    return {
        "schema": SCHEMA_VERSION,
        "runs": len(rows),
        "violations": len(failures),
        "failures": failures,
        "profiles": profiles,
        "per_node_energy_mj_by_n": energy_by_n,
        "rows": rows,
    }


def sweep_csv(rows: list[dict]) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in sorted(rows, key=lambda r: (r["profile"], r["policy"], r["n"], r["seed"])):
        writer.writerow(row)
    return out.getvalue()


# ------------------------------------------------------------ energy views


def region_csv(region: dict) -> str:
    """Feasible-region delta matrix as CSV: rows are n, columns are m."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n\\m"] + [str(m) for m in region["ms"]])
    for n, row in zip(region["ns"], region["delta"]):
        writer.writerow([n] + [round(v, 6) for v in row])
    return out.getvalue()


def compare_csv(compare: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model", "block_j", "viewchange_extra_j", "wasted_view_j"])
    for name, entry in sorted(compare["models"].items()):
        writer.writerow([
            name, round(entry["block_j"], 6), round(entry["viewchange_extra_j"], 6),
            round(entry["wasted_view_j"], 6),
        ])
    return out.getvalue()
