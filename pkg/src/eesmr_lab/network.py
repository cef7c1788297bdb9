"""Discrete-event engine with two-layer message accounting.

Logical layer: a broadcast from a correct sender reaches every node whose
flood path survives the corrupt non-relayers, within Delta ticks of the send
(the synchrony bound covers multi-hop flooding, so hops are not simulated).

Physical layer: pure arithmetic per flood. Each reached correct node
retransmits once per message digest (one batch = one transmission per
out-hyperedge), receptions are charged per covering transmission. Duplicate
relays of an already-transmitted digest cost nothing, which is what folds the
protocol-mandated relay into the flood wave on sparse graphs.
"""

from __future__ import annotations

import heapq
import random
from collections import Counter
from dataclasses import dataclass, field

from .hypergraph import Hypergraph
from .messages import ProtocolMsg

EAGER = "eager"
MAX_DELAY = "max_delay"
SEEDED_RANDOM = "seeded_random"

DELIVERY_POLICIES = (EAGER, MAX_DELAY, SEEDED_RANDOM)


@dataclass
class TransmissionLedger:
    """Per-node physical counters, grouped by wire size for energy pricing."""

    n: int
    tx_sizes: list[Counter] = field(default_factory=list)
    rx_sizes: list[Counter] = field(default_factory=list)
    tx_edges: list[int] = field(default_factory=list)
    rx_msgs: list[int] = field(default_factory=list)
    waves: list[tuple[int, int, int, int, int, int, int]] = field(default_factory=list)
    # waves: (time, origin, mtype, round, edge_tx_count, size, block_height)
    # block_height is 0 for messages that do not carry a block.

    def __post_init__(self):
        if not self.tx_sizes:
            self.tx_sizes = [Counter() for _ in range(self.n)]
            self.rx_sizes = [Counter() for _ in range(self.n)]
            self.tx_edges = [0] * self.n
            self.rx_msgs = [0] * self.n

    def charge_tx(self, node: int, size: int, edges: int) -> None:
        self.tx_sizes[node][size] += edges
        self.tx_edges[node] += edges

    def charge_rx(self, node: int, size: int, count: int) -> None:
        if count:
            self.rx_sizes[node][size] += count
            self.rx_msgs[node] += count

    def total_tx_edges(self) -> int:
        return sum(self.tx_edges)

    def snapshot_tx(self) -> list[int]:
        return list(self.tx_edges)


class Network:
    """Event queue, delivery policy, and flood accounting for one run."""

    def __init__(
        self,
        graph: Hypergraph,
        corrupt: frozenset[int],
        delta: int,
        policy: str,
        seed: int,
        sig_len: int,
    ):
        if policy not in DELIVERY_POLICIES:
            raise ValueError(f"unknown delivery policy: {policy}")
        self.graph = graph
        self.corrupt = corrupt
        self.delta = delta
        self.policy = policy
        self.rng = random.Random(seed)
        self.sig_len = sig_len
        self.now = 0
        self.ledger = TransmissionLedger(graph.n)
        self._queue: list[tuple[int, int, int, object, object]] = []
        self._seq = 0
        self._transmitted: set[tuple[int, bytes]] = set()
        self.deliveries = 0

    # ------------------------------------------------------------- scheduling

    def _push(self, time: int, kind: int, a, b) -> None:
        self._seq += 1
        heapq.heappush(self._queue, (time, self._seq, kind, a, b))

    def schedule_timer(self, time: int, node: int, tag: tuple) -> None:
        self._push(time, 1, node, tag)

    def _delay_for(self, recipient: int, overrides: dict[int, int] | None) -> int:
        if overrides is not None and recipient in overrides:
            return max(1, min(self.delta, overrides[recipient]))
        if self.policy == EAGER:
            return 1
        if self.policy == MAX_DELAY:
            return self.delta
        return self.rng.randint(1, self.delta)

    def schedule_send(
        self,
        origin: int,
        msg: ProtocolMsg,
        addressee: int | None = None,
        delay_overrides: dict[int, int] | None = None,
        force: bool = False,
    ) -> None:
        """Transmit a message into the k-cast fabric.

        `addressee` turns the send into a logical unicast (the flood still
        happens physically unless the addressee is a direct out-neighbor).
        `force` retries the flood even when the origin already transmitted
        this digest; adversary injections use it so their messages are never
        swallowed by the origin-side dedup. Each (transmitter, digest) pair
        still charges at most once: honest relays never retransmit a digest
        they have already put on the air, so a completed wave is a no-op to
        retry and a partially completed wave only charges the newcomers.
        Re-sending an already-transmitted digest to a new addressee schedules
        that logical delivery without new charges (the bytes already covered
        the fabric), completing the physical wave first if it had stalled.
        """
        key = (origin, msg.digest)
        already = key in self._transmitted
        if already and not force and addressee is None:
            return  # honest relay folding into an already-launched wave
        size = msg.wire_size(self.sig_len)
        height = msg.block.height if getattr(msg, "block", None) is not None else 0

        direct = None
        if addressee is not None and not already:
            for e in self.graph.out_edges[origin]:
                sender, receivers = self.graph.edges[e]
                if addressee in receivers:
                    direct = receivers
                    break
        if direct is not None:
            # Single-edge direct transmission; everyone on the edge hears it.
            self._transmitted.add(key)
            self.ledger.charge_tx(origin, size, 1)
            for r in direct:
                self.ledger.charge_rx(r, size, 1)
            self.ledger.waves.append(
                (self.now, origin, int(msg.mtype), msg.round, 1, size, height))
            self._push(self.now + self._delay_for(addressee, delay_overrides), 0, addressee, msg)
            return

        transmitters, reached, rx_counts = self.graph.flood_profile(origin, self.corrupt)
        new_transmitters = [x for x in transmitters if (x, msg.digest) not in self._transmitted]
        if not new_transmitters:
            # The digest is already on the air for everyone reachable; a new
            # addressee still gets its logical delivery, charge-free.
            if addressee is not None and (addressee in reached or addressee == origin):
                self._push(self.now + self._delay_for(addressee, delay_overrides),
                           0, addressee, msg)
            return
        edge_tx = 0
        if new_transmitters == list(transmitters):
            # Common case: fresh flood, use the cached full profile.
            for x in transmitters:
                self._transmitted.add((x, msg.digest))
                n_edges = len(self.graph.out_edges[x])
                self.ledger.charge_tx(x, size, n_edges)
                edge_tx += n_edges
            for node, cnt in enumerate(rx_counts):
                self.ledger.charge_rx(node, size, cnt)
        else:
            for x in new_transmitters:
                self._transmitted.add((x, msg.digest))
                n_edges = len(self.graph.out_edges[x])
                self.ledger.charge_tx(x, size, n_edges)
                edge_tx += n_edges
                for e in self.graph.out_edges[x]:
                    for r in self.graph.edges[e][1]:
                        self.ledger.charge_rx(r, size, 1)
        self.ledger.waves.append(
            (self.now, origin, int(msg.mtype), msg.round, edge_tx, size, height))

        if addressee is not None:
            recipients = [addressee] if (addressee in reached or addressee == origin) else []
        else:
            recipients = sorted(reached)
            if origin not in reached:
                recipients.append(origin)  # self-delivery closes the loop
        for r in recipients:
            self._push(self.now + self._delay_for(r, delay_overrides), 0, r, msg)

    # -------------------------------------------------------------- execution

    def run(self, deliver, on_timer, until: int, max_events: int = 5_000_000,
            should_stop=None) -> str:
        """Drain the queue until `until` ticks or exhaustion.

        `deliver(node, msg)` and `on_timer(node, tag)` are the simulation's
        dispatch hooks; `should_stop()` is polled after each event so a run
        can end early once its goal is met. Returns the stop reason.
        """
        events = 0
        while self._queue:
            time, _, kind, a, b = self._queue[0]
            if time > until:
                self.now = until
                return "budget"
            heapq.heappop(self._queue)
            self.now = time
            events += 1
            if events > max_events:
                return "event-cap"
            if kind == 0:
                self.deliveries += 1
                deliver(a, b)
            else:
                on_timer(a, b)
            if should_stop is not None and should_stop():
                return "target"
        return "drained"
