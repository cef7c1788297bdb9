"""One seeded run: topology, signer, network, replicas, adversary, monitor.

The same (scenario, seed) pair always produces the same event sequence, the
same trace, and the same verdicts; nothing here reads wall-clock time or any
other ambient state.
"""

from __future__ import annotations

from .adversary import make_adversary
from .checkers import GlobalMonitor, liveness_budget, run_checkers
from .crypto import SCHEME_SIG_LEN, SigningAuthority
from .hypergraph import generate_topology, necessary_condition
from .network import Network
from .protocol import Node
from .scenario import Scenario

# Extra chain headroom past the commit target, so the leader keeps streaming
# while trailing commits mature but stops soon after.
_HEIGHT_MARGIN = 12


class Simulation:
    def __init__(self, scenario: Scenario, seed: int):
        self.scenario = scenario
        self.seed = seed
        self.n = scenario.n
        self.f = scenario.f
        self.delta = scenario.delta
        self.corrupt = frozenset(scenario.corrupt)
        self.payload_bytes = scenario.payload_bytes
        self.sig_short_circuit = False
        self.equivocation_speedup = False
        self.max_height = scenario.target_blocks + _HEIGHT_MARGIN

        self.graph = generate_topology(
            scenario.topology_kind, scenario.n, scenario.topology_k,
            seed, scenario.topology_edges,
        )
        if self.corrupt and not scenario.allow_invalid_topology:
            guard = necessary_condition(self.graph)
            if guard["f_nec"] < len(self.corrupt):
                raise ValueError(
                    f"topology tolerates at most {guard['f_nec']} corrupt "
                    f"non-relayers, scenario corrupts {len(self.corrupt)}; "
                    "set allow_invalid_topology to run anyway")

        sig_len = SCHEME_SIG_LEN[scenario.signature_scheme]
        self.auth = SigningAuthority(seed, scenario.n, sig_len)
        self.network = Network(self.graph, self.corrupt, scenario.delta,
                               scenario.delivery_policy, seed ^ 0x5EED, sig_len)
        self.monitor = GlobalMonitor(scenario.n, self.corrupt, scenario.delta)
        self.nodes = [Node(i, self) for i in range(scenario.n)]
        self.adversary = make_adversary(scenario.adversary_profile,
                                        scenario.corrupt,
                                        scenario.adversary_params)
        self.adversary.setup(self)

        self.trace_enabled = scenario.trace
        self.trace_events: list[dict] = []
        self.budget = liveness_budget(scenario.target_blocks, scenario.f,
                                      scenario.delta)
        self.stop_reason = "not-run"
        self._done_nodes: set[int] = set()
        self._all_done = False

    # ------------------------------------------------------- protocol-facing

    def leader(self, view: int) -> int:
        return view % self.n

    def send_from(self, origin: int, msg, addressee: int | None = None) -> None:
        if origin in self.corrupt:
            actions = self.adversary.act(origin, msg, addressee)
            if actions is not None:
                for alt_origin, alt_msg, alt_addr, delays in actions:
                    self.network.schedule_send(alt_origin, alt_msg, alt_addr,
                                               delays, force=True)
                return
        self.network.schedule_send(origin, msg, addressee)

    def trace(self, kind: str, **fields) -> None:
        t = self.network.now
        self.monitor.on_event(t, kind, fields)
        if self.trace_enabled:
            self.trace_events.append({"t": t, "kind": kind, **fields})

    def on_commit(self, node_id: int, block) -> None:
        t = self.network.now
        self.monitor.on_commit(t, node_id, block)
        node = self.nodes[node_id]
        if node_id not in self.corrupt:
            if not node.store.extends(node.b_lck, node.b_com):
                self.monitor.on_lock_break(t, node_id, node.b_lck.height,
                                           node.b_com.height)
            if len(self.monitor.commits[node_id]) >= self.scenario.target_blocks:
                self._done_nodes.add(node_id)
                if len(self._done_nodes) == len(self.monitor.correct):
                    self._all_done = True
        if self.trace_enabled:
            self.trace_events.append({
                "t": t, "kind": "commit", "node": node_id,
                "view": block.view, "round": block.round,
                "height": block.height, "digest": block.digest.hex()[:12],
            })

    # --------------------------------------------------------------- running

    def _deliver(self, node_id: int, msg) -> None:
        self.nodes[node_id].receive(msg)

    def _on_timer(self, node_id: int, tag) -> None:
        self.nodes[node_id].on_timer(tag)

    def run(self) -> None:
        for node in self.nodes:
            node.start()
        self.stop_reason = self.network.run(
            self._deliver, self._on_timer, until=self.budget,
            should_stop=lambda: self._all_done,
        )
        self.verdicts = run_checkers(self)

    def all_pass(self) -> bool:
        return all(v.ok for v in self.verdicts.values())


def run_scenario(scenario: Scenario, seed: int) -> Simulation:
    sim = Simulation(scenario, seed)
    sim.run()
    return sim
