"""Global run-time oracles: safety, liveness, unique extensibility, and
communication-complexity bounds.

The monitor observes commits and trace events; it never feeds anything back
into the protocol, so runs behave identically with checking on or off. The
first violation observed wins and is what replays must reproduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import Block
from .messages import MsgType

# Default bound constants; callers may tighten them per scenario.
STEADY_TX_FACTOR = 2       # steady transmissions per block <= C1 * n * d
VIEWCHANGE_TX_FACTOR = 4   # view-change transmissions <= C2 * n^2 * (commits+1)
VIEWCHANGE_SPAN_DELTAS = 21  # worst-case view change length, in Delta units

_TRACKED_EVENTS = (
    "propose", "blame", "equivocation", "view_condemned", "quit_view",
    "new_view", "steady_resume", "lock_rebase",
)

_VC_MTYPES = frozenset((
    int(MsgType.Blame), int(MsgType.BlameQC), int(MsgType.CommitUpdate),
    int(MsgType.Certify), int(MsgType.CommitQC), int(MsgType.NewViewProposal),
    int(MsgType.VoteMsg), int(MsgType.SyncRequest), int(MsgType.SyncResponse),
))


@dataclass
class Verdict:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}

    def __bool__(self) -> bool:
        return self.ok


class GlobalMonitor:
    """Read-only observer collecting per-node commit logs and event telemetry."""

    def __init__(self, n: int, corrupt, delta: int):
        self.n = n
        self.corrupt = frozenset(corrupt)
        self.correct = tuple(i for i in range(n) if i not in self.corrupt)
        self.delta = delta
        self.commits: list[list[tuple[int, Block]]] = [[] for _ in range(n)]
        self.blocks: dict[bytes, Block] = {}
        self.height_first: dict[int, tuple[bytes, int, int]] = {}
        self.safety_violation: dict | None = None
        self.lock_violation: dict | None = None
        self.events: list[tuple[int, str, int, int]] = []
        self.max_view = 1

    def on_commit(self, t: int, node: int, block: Block) -> None:
        self.commits[node].append((t, block))
        if node in self.corrupt:
            return
        self.blocks[block.digest] = block
        prev = self.height_first.get(block.height)
        if prev is None:
            self.height_first[block.height] = (block.digest, node, t)
        elif prev[0] != block.digest and self.safety_violation is None:
            self.safety_violation = {
                "height": block.height,
                "first": {"node": prev[1], "time": prev[2], "digest": prev[0].hex()},
                "second": {"node": node, "time": t, "digest": block.digest.hex()},
            }

    def on_lock_break(self, t: int, node: int, lock_h: int, commit_h: int) -> None:
        if self.lock_violation is None:
            self.lock_violation = {
                "node": node, "time": t,
                "lock_height": lock_h, "commit_height": commit_h,
            }

    def on_event(self, t: int, kind: str, fields: dict) -> None:
        if kind in _TRACKED_EVENTS:
            view = int(fields.get("view", 0))
            rnd = int(fields.get("round", 0))
            self.events.append((t, kind, view, rnd))
            if view > self.max_view:
                self.max_view = view

    # Convenience views ----------------------------------------------------

    def committed_height(self) -> int:
        return max(self.height_first, default=0)

    def commit_count(self, node: int) -> int:
        return len(self.commits[node])


def check_safety(monitor: GlobalMonitor) -> Verdict:
    """Per-height agreement across correct nodes, prefix-closed logs, and the
    lock-extends-commit invariant sampled at each commit."""
    if monitor.safety_violation is not None:
        return Verdict("safety", False, {"conflict": monitor.safety_violation})
    if monitor.lock_violation is not None:
        return Verdict("safety", False, {"lock_break": monitor.lock_violation})
    for node in monitor.correct:
        prev: Block | None = None
        for _, block in monitor.commits[node]:
            if prev is not None:
                if block.height != prev.height + 1 or block.parent != prev.digest:
                    return Verdict("safety", False, {
                        "prefix_break": {
                            "node": node,
                            "at_height": block.height,
                            "expected_parent": prev.digest.hex(),
                            "got_parent": block.parent.hex(),
                        }})
            prev = block
    return Verdict("safety", True, {"heights": monitor.committed_height()})


def liveness_budget(target: int, f: int, delta: int,
                    span_deltas: int = VIEWCHANGE_SPAN_DELTAS) -> int:
    """Ticks allowed for every correct node to commit `target` blocks: one
    Delta-length round per block plus f+1 worst-case view changes."""
    return target * delta + (f + 1) * span_deltas * delta


def check_liveness(monitor: GlobalMonitor, budget: int, target: int) -> Verdict:
    detail: dict = {"budget": budget, "target": target, "per_node": {}}
    ok = True
    for node in monitor.correct:
        log = monitor.commits[node]
        count = len(log)
        reached = count >= target and log[target - 1][0] <= budget
        detail["per_node"][node] = {
            "commits": count,
            "done_at": log[target - 1][0] if count >= target else None,
        }
        if not reached:
            ok = False
    if not ok:
        detail["stalled_view"] = monitor.max_view
    return Verdict("liveness", ok, detail)


def check_unique_extensibility(monitor: GlobalMonitor) -> Verdict:
    """Every block committed in view v must be an ancestor of every block
    committed in any later view."""
    by_digest: dict[bytes, Block] = {}
    for node in monitor.correct:
        for _, b in monitor.commits[node]:
            by_digest[b.digest] = b
    committed = sorted(by_digest.values(), key=lambda b: (b.height, b.view))
    for older in committed:
        for newer in committed:
            if newer.view <= older.view or newer.height < older.height:
                continue
            cur = newer
            broken = False
            while cur.height > older.height:
                nxt = by_digest.get(cur.parent)
                if nxt is None:
                    broken = True
                    break
                cur = nxt
            if broken or cur.digest != older.digest:
                return Verdict("extensibility", False, {
                    "older": {"view": older.view, "height": older.height,
                              "digest": older.digest.hex()},
                    "newer": {"view": newer.view, "height": newer.height,
                              "digest": newer.digest.hex()},
                })
    return Verdict("extensibility", True, {"blocks": len(committed)})


def vc_windows(monitor: GlobalMonitor, run_end: int) -> list[tuple[int, int]]:
    """Half-open [start, end) spans of view-change activity: a window opens
    at the first blame/equivocation/condemnation after steady state and
    closes at the first steady-round proposal of a later view (so the dying
    view's own traffic stays inside the window; consecutive bad leaders
    merge into one span)."""
    windows = []
    open_at = None
    open_view = 0
    for t, kind, view, rnd in sorted(monitor.events):
        if open_at is None:
            if kind in ("blame", "equivocation", "view_condemned"):
                open_at, open_view = t, view
        else:
            if kind == "propose" and rnd >= 3 and view > open_view:
                windows.append((open_at, t))
                open_at = None
    if open_at is not None:
        windows.append((open_at, run_end + 1))
    return windows


def check_complexity(ledger, n: int, d: int, blocks: int,
                     windows=(), monitor: GlobalMonitor | None = None,
                     c1: int = STEADY_TX_FACTOR,
                     c2: int = VIEWCHANGE_TX_FACTOR) -> Verdict:
    """Steady transmissions per block <= c1*n*d; each view-change window's
    transmissions <= c2*n^2*(blocks committed from the window's start + 1).

    The steady bound only charges proposals at heights that actually
    committed.  The pipeline keeps several heights in flight, so whenever the
    run stops there is a tail of proposed-but-not-yet-committed blocks; their
    floods are a stopping artifact, not per-block cost.  Everything at a
    committed height still counts, so equivocations and duplicate floods for
    real blocks are visible to the bound."""
    d = max(d, 1)
    steady_tx = 0
    window_tx = [0] * len(windows)
    for (t, _origin, mtype, rnd, edge_tx, _size, height) in ledger.waves:
        in_window = None
        for i, (a, b) in enumerate(windows):
            if a <= t < b:
                in_window = i
                break
        if in_window is not None:
            window_tx[in_window] += edge_tx
        elif mtype == int(MsgType.Propose) and rnd >= 3 and height <= blocks:
            steady_tx += edge_tx

    detail: dict = {
        "steady_tx": steady_tx,
        "blocks": blocks,
        "steady_bound_per_block": c1 * n * d,
        "windows": [],
    }
    per_block = steady_tx / max(blocks, 1)
    ok = per_block <= c1 * n * d
    detail["steady_tx_per_block"] = per_block

    for i, (a, b) in enumerate(windows):
        later = 0
        if monitor is not None:
            later = sum(1 for (_dg, _nd, t) in monitor.height_first.values() if t >= a)
        bound = c2 * n * n * (later + 1)
        w_ok = window_tx[i] <= bound
        detail["windows"].append({
            "start": a, "end": b, "tx": window_tx[i],
            "commits_after": later, "bound": bound, "ok": w_ok,
        })
        ok = ok and w_ok
    return Verdict("complexity", ok, detail)


def run_checkers(sim) -> dict[str, Verdict]:
    """All four oracles over a finished run."""
    m = sim.monitor
    d = max((len(sim.graph.out_edges[i]) for i in range(sim.n)), default=1)
    windows = vc_windows(m, sim.network.now)
    return {
        "safety": check_safety(m),
        "liveness": check_liveness(m, sim.budget, sim.scenario.target_blocks),
        "extensibility": check_unique_extensibility(m),
        "complexity": check_complexity(sim.network.ledger, sim.n, d,
                                       m.committed_height(), windows, m),
    }
