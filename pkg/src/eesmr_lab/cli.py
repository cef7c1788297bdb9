"""Command-line harness.

Subcommands: `run` (one scenario), `sweep` (seed and adversary matrices),
`topology` (fault-tolerance certification), `energy` (analytical
comparisons, bounds, and feasible-region grids). Every path that writes
delimited output renders a matching PNG figure next to it. Exit status is
0 only when every checker passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import figures, report as rpt
from .adversary import PROFILES, SWEEP_PROFILES, default_corrupt_set
from .energy import (
    CostTable,
    analytic_models,
    build_vector,
    crossover_fraction,
    f_e_bound,
    feasible_region,
    nu_f_bound,
)
from .hypergraph import Hypergraph, certify_f_connectivity, generate_topology, necessary_condition
from .scenario import Scenario
from .simulation import run_scenario

_POLICIES = ("eager", "max_delay", "seeded_random")


def _fail(message: str, code: int = 2) -> int:
    sys.stderr.write(json.dumps({"error": message}, sort_keys=True) + "\n")
    return code


def _write(path: str, text: str) -> None:
    with open(path, "w") as handle:
        handle.write(text)


def _load_scenario(path: str, overrides: list[str]) -> Scenario:
    scenario = Scenario.load(path)
    for pair in overrides:
        if "=" not in pair:
            raise ValueError("override must look like key=value: %r" % pair)
        key, value = pair.split("=", 1)
        scenario.apply_override(key.strip(), value.strip())
    return scenario


def _parse_span(text: str) -> list[int]:
    """Parse "A..B" (inclusive) or a comma list into ints."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError("empty span: %s" % text)
        return list(range(lo, hi + 1))
    return [int(part) for part in text.split(",") if part.strip()]


# ---------------------------------------------------------------- cmd: run


def cmd_run(args) -> int:
    try:
        scenario = _load_scenario(args.config, args.override)
        if args.trace is not None:
            data = scenario.to_dict()
            data["trace"] = args.trace == "on"
            scenario = Scenario.from_dict(data)
    except (ValueError, KeyError, OSError) as err:
        return _fail(str(err))

    sim = run_scenario(scenario, args.seed)
    report = rpt.build_run_report(sim, args.seed)

    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "report.json"), rpt.report_json(report))
    _write(os.path.join(args.out, "report.csv"), rpt.run_report_csv(report))
    figures.render_run_figure(report, os.path.join(args.out, "report.png"))
    if sim.trace_enabled:
        _write(os.path.join(args.out, "trace.jsonl"), rpt.trace_jsonl(sim.trace_events))

    for name in sorted(sim.verdicts):
        verdict = sim.verdicts[name]
        print("%-14s %s" % (name, "pass" if verdict.ok else "FAIL"))
    print("report: %s" % os.path.join(args.out, "report.json"))

    if not report["all_pass"]:
        ce_path = os.path.join(args.out, "counterexample.json")
        _write(ce_path, json.dumps(report["counterexample"], indent=2, sort_keys=True) + "\n")
        print("counterexample: %s" % ce_path)
        return 1
    return 0


# -------------------------------------------------------------- cmd: sweep


def _sweep_job(payload: tuple[dict, int, str, str]) -> dict:
    scenario_data, seed, profile, policy = payload
    scenario = Scenario.from_dict(scenario_data)
    sim = run_scenario(scenario, seed)
    report = rpt.build_run_report(sim, seed)
    return rpt.sweep_row(report, profile, policy)


def _sweep_matrix(base: Scenario, ns: list[int], profiles: list[str],
                  policies: list[str], seeds: list[int]) -> list[tuple]:
    jobs = []
    for n in ns:
        f = (n - 1) // 2
        for profile in profiles or [base.adversary_profile]:
            for policy in policies:
                data = base.to_dict()
                data["n"] = n
                data["f"] = -1
                if data["topology"]["kind"] == "ring":
                    data["topology"]["k"] = f + 1
                data["delivery"] = {"policy": policy}
                if profiles:
                    corrupt = default_corrupt_set(n, f) if profile != "none" else ()
                    data["adversary"] = {
                        "profile": profile, "corrupt": list(corrupt), "params": {},
                    }
                for seed in seeds:
                    jobs.append((data, seed, profile, policy))
    return jobs


def cmd_sweep(args) -> int:
    try:
        base = _load_scenario(args.config, args.override)
        seeds = _parse_span(args.seeds)
        ns = _parse_span(args.ns) if args.ns else [base.n]
        policies = [p.strip() for p in args.policies.split(",") if p.strip()]
        if args.profiles is None:
            profiles = list(SWEEP_PROFILES)
        else:
            profiles = [p.strip() for p in args.profiles.split(",") if p.strip()]
        for profile in profiles:
            if profile not in PROFILES:
                raise ValueError("unknown adversary profile: %r" % profile)
        for policy in policies:
            if policy not in _POLICIES:
                raise ValueError("unknown delivery policy: %r" % policy)
    except (ValueError, KeyError, OSError) as err:
        return _fail(str(err))

    jobs = _sweep_matrix(base, ns, profiles, policies, seeds)
    workers = int(os.environ.get("EESMR_LAB_THREADS", "1") or "1")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rows = list(pool.map(_sweep_job, jobs, chunksize=8))
    else:
        rows = [_sweep_job(job) for job in jobs]

    aggregate = rpt.aggregate_sweep(rows)
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "sweep.json"),
           json.dumps(aggregate, indent=2, sort_keys=True) + "\n")
    _write(os.path.join(args.out, "sweep.csv"), rpt.sweep_csv(rows))
    figures.render_sweep_figure(aggregate, os.path.join(args.out, "sweep.png"))

    print("runs: %d  violations: %d" % (aggregate["runs"], aggregate["violations"]))
    if aggregate["violations"]:
        first = aggregate["failures"][0]
        print("first failure: profile=%s policy=%s n=%d seed=%d (%s)" % (
            first["profile"], first["policy"], first["n"], first["seed"],
            first["failed_checks"]))
        return 1
    return 0


# ----------------------------------------------------------- cmd: topology


def _load_graph(args) -> Hypergraph:
    if args.graph:
        with open(args.graph) as handle:
            data = json.load(handle)
        edges = [(int(tx), frozenset(int(r) for r in rx)) for tx, rx in data["edges"]]
        return Hypergraph(int(data["n"]), edges)
    return generate_topology(args.kind, args.n, args.k)


def cmd_topology(args) -> int:
    try:
        graph = _load_graph(args)
        certified, witness = certify_f_connectivity(graph, args.f)
        bounds = necessary_condition(graph)
    except (ValueError, KeyError, OSError) as err:
        return _fail(str(err))

    profile = bounds["profile"]
    report = {
        "schema": rpt.SCHEMA_VERSION,
        "n": graph.n,
        "edges": len(graph.edges),
        "f": args.f,
        "certified": certified,
        "witness_cut": list(witness) if witness else None,
        "f_nec": bounds["f_nec"],
        "f_nec_edge_bound": bounds["f_nec_edge_bound"],
        "degrees": {
            "min_out_neighbors": profile.dout,
            "min_in_neighbors": profile.din,
            "min_out_edges": profile.Dout,
            "min_in_edges": profile.Din,
        },
    }
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "topology.json"),
           json.dumps(report, indent=2, sort_keys=True) + "\n")
    verdict = "certified" if certified else "refused"
    print("%s for f=%d (f_nec=%d, edge bound=%d)" % (
        verdict, args.f, report["f_nec"], report["f_nec_edge_bound"]))
    if witness:
        print("witness cut: %s" % (sorted(witness),))
    return 0 if certified else 1


# ------------------------------------------------------------- cmd: energy


def _energy_vector(args, table: CostTable):
    return build_vector(
        args.n, m=args.m, k=args.k, medium=args.medium, scheme=args.scheme,
        table=table,
    )


def cmd_energy(args) -> int:
    try:
        table = CostTable.load(args.table) if args.table else CostTable.load_default()
        os.makedirs(args.out, exist_ok=True)

        if args.mode == "compare":
            x = _energy_vector(args, table)
            suite = analytic_models(x, relay_viewchange=args.relay_viewchange)
            models = {}
            for name in suite.names():
                model = suite[name]
                models[name] = {
                    "block_j": model.block_cost(suite.vector),
                    "viewchange_extra_j": model.viewchange_extra_cost(suite.vector),
                    "wasted_view_j": model.wasted_view_cost(suite.vector),
                    "psi_block": str(model.psi_block),
                }
            ee, hs = models["eesmr"], models["sync_hotstuff"]
            payload = {
                "schema": rpt.SCHEMA_VERSION,
                "n": x.n, "f": x.f, "m": x.m, "k": x.k,
                "medium": args.medium, "scheme": args.scheme,
                "models": models,
                "steady_ratio_synchs_over_eesmr": hs["block_j"] / ee["block_j"],
                "viewchange_ratio_eesmr_over_synchs":
                    ee["viewchange_extra_j"] / hs["viewchange_extra_j"],
                "nu_f_eesmr_vs_synchs": nu_f_bound(
                    suite["eesmr"], suite["sync_hotstuff"], suite.vector),
                "crossover_fraction_200_blocks": crossover_fraction(
                    suite["eesmr"], suite["sync_hotstuff"], suite.vector, blocks=200),
            }
            _write(os.path.join(args.out, "compare.json"),
                   json.dumps(payload, indent=2, sort_keys=True) + "\n")
            _write(os.path.join(args.out, "compare.csv"), rpt.compare_csv(payload))
            figures.render_compare_figure(payload, os.path.join(args.out, "compare.png"))
            print("steady ratio (rival/ours): %.3f" % payload["steady_ratio_synchs_over_eesmr"])
            print("view-change ratio (ours/rival): %.3f"
                  % payload["viewchange_ratio_eesmr_over_synchs"])
            return 0

        if args.mode == "bounds":
            x = _energy_vector(args, table)
            suite = analytic_models(x, baseline_medium=args.baseline_medium)
            protocol = suite[args.protocol]
            baseline = suite[args.baseline]
            payload = {
                "schema": rpt.SCHEMA_VERSION,
                "n": x.n, "f": x.f, "m": x.m, "k": x.k,
                "medium": args.medium, "baseline_medium": args.baseline_medium or args.medium,
                "scheme": args.scheme,
                "protocol": args.protocol,
                "baseline": args.baseline,
                "protocol_block_j": protocol.block_cost(suite.vector),
                "protocol_wasted_view_j": protocol.wasted_view_cost(suite.vector),
                "baseline_block_j": baseline.block_cost(suite.vector),
                "favorable_wasted_views_per_block": f_e_bound(
                    protocol, baseline, suite.vector),
                "nu_f_vs_baseline": nu_f_bound(protocol, baseline, suite.vector),
            }
            _write(os.path.join(args.out, "bounds.json"),
                   json.dumps(payload, indent=2, sort_keys=True) + "\n")
            lines = ["metric,value"]
            for key in ("protocol_block_j", "protocol_wasted_view_j",
                        "baseline_block_j", "favorable_wasted_views_per_block"):
                lines.append("%s,%s" % (key, payload[key]))
            _write(os.path.join(args.out, "bounds.csv"), "\n".join(lines) + "\n")
            print("favorable wasted views per block: %s"
                  % payload["favorable_wasted_views_per_block"])
            return 0

        # feasible-region
        ns = _parse_span(args.ns or "4..13")
        ms = _parse_span(args.ms or "256,512,1024,2048")
        region = feasible_region(
            args.protocol, args.baseline, ns, ms,
            medium_a=args.medium, medium_b=args.baseline_medium,
            scheme=args.scheme, k=args.k, table=table,
        )
        _write(os.path.join(args.out, "region.json"),
               json.dumps(region, indent=2, sort_keys=True) + "\n")
        _write(os.path.join(args.out, "region.csv"), rpt.region_csv(region))
        figures.render_region_figure(region, os.path.join(args.out, "region.png"))
        favorable = sum(1 for row in region["favorable"] for cell in row if cell)
        total = len(region["ns"]) * len(region["ms"])
        print("favorable cells: %d of %d" % (favorable, total))
        return 0
    except (ValueError, KeyError, OSError) as err:
        return _fail(str(err))


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eesmr-lab",
        description="Deterministic laboratory for an energy-aware replicated "
                    "state machine: simulation, adversaries, checkers, and "
                    "analytical energy models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario and write its report")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="dot-path scenario override")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--trace", choices=("on", "off"), default=None)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a seed/profile/policy matrix")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seeds", default="0..9", help="A..B inclusive or comma list")
    p_sweep.add_argument("--ns", default=None, help="populations, A..B or comma list")
    p_sweep.add_argument("--profiles", default=None,
                         help="comma list; empty string sweeps delivery policies only")
    p_sweep.add_argument("--policies", default=",".join(_POLICIES))
    p_sweep.add_argument("--override", action="append", default=[])
    p_sweep.add_argument("--out", default="out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_topo = sub.add_parser("topology", help="certify fault tolerance of a graph")
    p_topo.add_argument("--graph", default=None,
                        help='JSON file {"n": int, "edges": [[tx, [rx...]]...]}')
    p_topo.add_argument("--kind", default="ring")
    p_topo.add_argument("--n", type=int, default=7)
    p_topo.add_argument("--k", type=int, default=3)
    p_topo.add_argument("--f", type=int, required=True)
    p_topo.add_argument("--out", default="out")
    p_topo.set_defaults(func=cmd_topology)

    p_energy = sub.add_parser("energy", help="analytical cost comparisons and bounds")
    p_energy.add_argument("--mode", choices=("compare", "bounds", "feasible-region"),
                          required=True)
    p_energy.add_argument("--n", type=int, default=13)
    p_energy.add_argument("--m", type=int, default=256)
    p_energy.add_argument("--k", type=int, default=None)
    p_energy.add_argument("--medium", default="ble_reliability")
    p_energy.add_argument("--baseline-medium", dest="baseline_medium", default=None)
    p_energy.add_argument("--scheme", default="rsa1024")
    p_energy.add_argument("--protocol", default="eesmr")
    p_energy.add_argument("--baseline", default="trusted_relay")
    p_energy.add_argument("--relay-viewchange", dest="relay_viewchange",
                          choices=("deduplicated", "per_sender"), default="deduplicated")
    p_energy.add_argument("--ns", default=None)
    p_energy.add_argument("--ms", default=None)
    p_energy.add_argument("--table", default=None, help="alternate cost table JSON")
    p_energy.add_argument("--out", default="out")
    p_energy.set_defaults(func=cmd_energy)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
