"""Adversary strategies.

The adversary is a single entity controlling every corrupt node: it sees
their inbound traffic (the nodes still run the protocol state machine, which
keeps them realistically reactive) and rewrites their outbound traffic. The
`act` hook receives each outbound send and returns either None (pass through
unchanged) or a list of (origin, message, addressee, delay_overrides) tuples
to transmit instead; origins may be any corrupt node, which models collusion
through shared state.
"""

from __future__ import annotations

from .chain import GENESIS, Block
from .messages import MsgType, ProtocolMsg, make_msg


class Adversary:
    name = "none"

    def __init__(self, corrupt=()):
        self.corrupt = frozenset(corrupt)
        self.sim = None

    def setup(self, sim) -> None:
        self.sim = sim

    def act(self, node: int, msg: ProtocolMsg, addressee: int | None):
        return None


class CrashAdversary(Adversary):
    """Corrupt nodes fail-stop once the crash point is reached."""

    name = "crash"

    def __init__(self, corrupt=(), crash_view: int = 1, crash_round: int = 5):
        super().__init__(corrupt)
        self.crash_view = crash_view
        self.crash_round = crash_round

    def act(self, node, msg, addressee):
        state = self.sim.nodes[node]
        crashed = state.view > self.crash_view or (
            state.view == self.crash_view and state.rnd >= self.crash_round
        )
        return [] if crashed else None


class SilentLeaderAdversary(Adversary):
    """Corrupt nodes run the protocol but never propose when leading."""

    name = "silent_leader"

    def act(self, node, msg, addressee):
        if msg.mtype in (MsgType.Propose, MsgType.NewViewProposal) and msg.sender == node:
            if self.sim.leader(msg.view) == node:
                return []
        return None


class EquivocatorAdversary(Adversary):
    """A corrupt leader signs two conflicting blocks for the same slot."""

    name = "equivocator"

    def __init__(self, corrupt=()):
        super().__init__(corrupt)
        self.twinned: set[tuple[int, int]] = set()

    def act(self, node, msg, addressee):
        if msg.mtype != MsgType.Propose or self.sim.leader(msg.view) != node:
            return None
        if msg.block is None or msg.round < 3:
            return None
        slot = (msg.view, msg.round)
        if slot in self.twinned:
            return None  # evidence re-floods pass through untouched
        self.twinned.add(slot)
        twin_cmds = tuple(cmd[::-1] + b"\x01" for cmd in msg.block.commands) or (b"\x01",)
        twin_block = Block(msg.block.view, msg.block.round, msg.block.height,
                           msg.block.parent, twin_cmds)
        twin = make_msg(self.sim.auth, MsgType.Propose, msg.view, msg.round, node,
                        twin_block.wire, block=twin_block)
        self.sim.nodes[node].store.add(twin_block)
        return [(node, msg, None, None), (node, twin, None, None)]


class StaleCommitAdversary(Adversary):
    """Forces a view change, then advertises an old commit during it."""

    name = "stale_commit"

    def __init__(self, corrupt=()):
        super().__init__(corrupt)
        self.silencer = SilentLeaderAdversary(corrupt)

    def setup(self, sim):
        super().setup(sim)
        self.silencer.setup(sim)

    def act(self, node, msg, addressee):
        silenced = self.silencer.act(node, msg, addressee)
        if silenced is not None:
            return silenced
        if msg.mtype == MsgType.CommitUpdate:
            stale = make_msg(self.sim.auth, MsgType.CommitUpdate, msg.view, 0, node,
                             GENESIS.wire, block=GENESIS)
            return [(node, stale, None, None)]
        return None


class LongChainSpammerAdversary(Adversary):
    """A silent corrupt leader privately mints a chain and gets it adopted.

    The minted tip is advertised during quit-view; it extends every correct
    lock, so it gets certified, becomes the highest certified commit, and the
    next leader must build on it after fetching the blocks via sync. The
    blocks therefore all commit, amortizing the view-change cost.
    """

    name = "long_chain_spammer"

    def __init__(self, corrupt=(), ell: int = 20):
        super().__init__(corrupt)
        self.ell = ell
        self.tips: dict[int, Block] = {}  # view -> minted tip

    def _mint(self, node: int, view: int) -> Block:
        state = self.sim.nodes[node]
        tip = state.b_lck
        start_round = max(state.rnd, 3)
        for i in range(self.ell):
            cmd = b"spam-%08d" % i
            tip = Block(view, start_round + i, tip.height + 1, tip.digest, (cmd,))
            for c in self.corrupt:
                self.sim.nodes[c].store.add(tip)
        self.tips[view] = tip
        return tip

    def act(self, node, msg, addressee):
        if msg.mtype in (MsgType.Propose, MsgType.NewViewProposal) and \
                self.sim.leader(msg.view) == node and msg.sender == node:
            if msg.view not in self.tips and msg.mtype == MsgType.Propose:
                self._mint(node, msg.view)
            return []
        if msg.mtype == MsgType.CommitUpdate and msg.view in self.tips:
            tip = self.tips[msg.view]
            adv = make_msg(self.sim.auth, MsgType.CommitUpdate, msg.view, 0, node,
                           tip.wire, block=tip)
            return [(node, adv, None, None)]
        return None


class VoteWithholderAdversary(Adversary):
    """Forces a view change and withholds every certification-layer message,
    so quorums must assemble from correct nodes alone."""

    name = "vote_withholder"

    def __init__(self, corrupt=()):
        super().__init__(corrupt)
        self.silencer = SilentLeaderAdversary(corrupt)

    def setup(self, sim):
        super().setup(sim)
        self.silencer.setup(sim)

    def act(self, node, msg, addressee):
        silenced = self.silencer.act(node, msg, addressee)
        if silenced is not None:
            return silenced
        if msg.mtype in (MsgType.Certify, MsgType.VoteMsg, MsgType.Blame):
            return []
        return None


class TwoColluderSplitAdversary(Adversary):
    """Over-corruption counterexample (f+1 faults on a too-sparse ring).

    The corrupt leader signs two conflicting blocks. It transmits one on its
    only out-edge while its colluder transmits the other (shared keys make
    this possible), and the corrupt nodes swallow all relays addressed
    through them. Each victim observes exactly one proposal, sees a quiet
    4Delta window, and commits: a reproducible safety violation that the
    checkers must catch.
    """

    name = "two_colluder_split"

    def __init__(self, corrupt=(1, 3)):
        super().__init__(corrupt)
        self.fired = False

    def act(self, node, msg, addressee):
        if msg.mtype != MsgType.Propose or self.sim.leader(msg.view) != node:
            return []  # silence everything else from the colluders
        if self.fired or msg.block is None:
            return []
        self.fired = True
        block_a = msg.block
        twin_cmds = tuple(cmd[::-1] + b"\x02" for cmd in block_a.commands) or (b"\x02",)
        block_b = Block(block_a.view, block_a.round, block_a.height,
                        block_a.parent, twin_cmds)
        twin = make_msg(self.sim.auth, MsgType.Propose, msg.view, msg.round, node,
                        block_b.wire, block=block_b)
        colluder = max(self.corrupt - {node})
        for c in self.corrupt:
            self.sim.nodes[c].store.add(block_a)
            self.sim.nodes[c].store.add(block_b)
        return [(node, twin, None, None), (colluder, msg, None, None)]


PROFILES = {
    cls.name: cls
    for cls in (
        CrashAdversary,
        SilentLeaderAdversary,
        EquivocatorAdversary,
        StaleCommitAdversary,
        LongChainSpammerAdversary,
        VoteWithholderAdversary,
        TwoColluderSplitAdversary,
    )
}
PROFILES["none"] = Adversary

SWEEP_PROFILES = ("crash", "silent_leader", "equivocator", "stale_commit",
                  "long_chain_spammer", "vote_withholder")


def default_corrupt_set(n: int, f: int) -> tuple[int, ...]:
    """f corrupt ids: include node 1 (the first leader) so leader-targeting
    profiles engage, avoid node 2 so the successor leader stays correct."""
    if f <= 0:
        return ()
    picks = [1]
    cursor = n - 1
    while len(picks) < f:
        if cursor not in picks and cursor != 2:
            picks.append(cursor)
        cursor -= 1
    return tuple(sorted(picks[:f]))


def make_adversary(profile: str, corrupt, params: dict | None = None) -> Adversary:
    params = dict(params or {})
    try:
        cls = PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown adversary profile: {profile}") from None
    if cls is Adversary:
        return Adversary(corrupt)
    return cls(corrupt, **params)


def enumerate_small_adversaries(n: int, f: int):
    """The bounded profile family used by sweeps: every stock strategy with
    the standard corrupt-set choice for (n, f)."""
    corrupt = default_corrupt_set(n, f)
    for name in SWEEP_PROFILES:
        yield name, make_adversary(name, corrupt)
