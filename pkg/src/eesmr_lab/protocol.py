"""Replica state machine.

Steady state: the leader streams one proposal per round; a node relays the
first valid proposal of its current round, locks on it, and commits it 4Delta
later provided the view stayed alive and no equivocation at the same or a
lower round surfaced in the window ("voting in the head").

View change: f+1 blames (or one equivocation proof) kill the view. Nodes
advertise their commits, certify every non-conflicting advertisement, collect
certificates for 5Delta, flood their own certificate, and move to the next
view, where the first two rounds re-establish a common chain under explicit
signed votes before steady streaming resumes at round 3.
"""

from __future__ import annotations

from .chain import GENESIS, Block
from .chain import BlockStore
from .codec import put_u32
from .messages import (
    MsgType,
    ProtocolMsg,
    form_qc,
    lock_compare,
    make_msg,
    validate_qc,
)

STEADY = "steady"
BLAMED = "blamed"      # view condemned, 1Delta grace before quitting
QUITTING = "quitting"  # certify exchange in progress
ROUND1 = "round1"      # waiting for the new-view proposal
ROUND2 = "round2"      # waiting for the vote-certified proposal

STEADY_TIMEOUT = 4     # blame timer, in Delta units
COMMIT_WAIT = 4
QUIT_GRACE = 1
CERTIFY_WINDOW = 5
POST_CERT_WAIT = 1
STATUS_WINDOW = 4
ROUND1_TIMEOUT = 8
ROUND2_TIMEOUT = 6


class Node:
    def __init__(self, node_id: int, sim):
        self.id = node_id
        self.sim = sim
        self.n = sim.n
        self.f = sim.f
        self.quorum = sim.f + 1
        self.store = BlockStore()

        self.view = 1
        self.rnd = 3
        self.phase = STEADY
        self.epoch = 0
        self.b_lck = GENESIS
        self.b_com = GENESIS

        self.relayed: dict[tuple[int, int], bytes] = {}
        self.slot_msgs: dict[tuple[int, int], dict[bytes, ProtocolMsg]] = {}
        self.pending_commits: dict[bytes, Block] = {}
        self.blames: dict[int, dict[int, ProtocolMsg]] = {}
        self.blamed_views: set[int] = set()
        self.blameqc_adopted = False
        self.equiv_round: int | None = None
        self.equiv_flooded: set[tuple[int, int]] = set()

        # Quit-view bookkeeping (reset each view change).
        self.updates: dict[bytes, Block] = {}
        self.certs: dict[bytes, dict[int, ProtocolMsg]] = {}
        self.certified_sent: set[bytes] = set()
        self.pending_quit: dict[int, list[ProtocolMsg]] = {}

        # Certified-commit knowledge persists across views.
        self.commit_qcs: dict[bytes, tuple[Block, object]] = {}
        self.hc_block = GENESIS
        self.hc_qc = None

        # New-view state.
        self.statuses: dict[int, tuple[Block, object]] = {}
        self.votes: dict[int, ProtocolMsg] = {}
        self.r1_block: Block | None = None
        self.proposed_r2 = False

        self.view_sig_cache: dict = {}
        self.vsig_verified: set[tuple[int, int, int]] = set()
        self.seen: set[bytes] = set()
        self.future_views: dict[int, list[ProtocolMsg]] = {}
        self.future_rounds: dict[tuple[int, int], list[ProtocolMsg]] = {}
        self.sync_asked: set[tuple[int, int]] = set()
        self.parked: dict[bytes, list[ProtocolMsg]] = {}

    # ----------------------------------------------------------------- helpers

    @property
    def delta(self) -> int:
        return self.sim.delta

    @property
    def now(self) -> int:
        return self.sim.network.now

    def leader_of(self, view: int) -> int:
        return view % self.n

    def _send(self, msg: ProtocolMsg, addressee: int | None = None) -> None:
        self.sim.send_from(self.id, msg, addressee)

    def _timer(self, delay_units: int, tag: tuple) -> None:
        self.sim.network.schedule_timer(self.now + delay_units * self.delta, self.id, tag)

    def _make(self, mtype: MsgType, view: int, rnd: int, data: bytes, **extras) -> ProtocolMsg:
        return make_msg(self.sim.auth, mtype, view, rnd, self.id, data,
                        self.view_sig_cache, **extras)

    # ------------------------------------------------------------------ intake

    def start(self) -> None:
        self.on_round_start()

    def receive(self, msg: ProtocolMsg) -> None:
        if msg.digest in self.seen:
            return
        self.seen.add(msg.digest)
        if not self._verify_msg(msg):
            return
        self.dispatch(msg)

    def _verify_msg(self, msg: ProtocolMsg) -> bool:
        auth = self.sim.auth
        from .codec import data_sign_payload, view_sign_payload

        if not self.sim.sig_short_circuit:
            key = (msg.sender, int(msg.mtype), msg.view)
            if key not in self.vsig_verified:
                if not auth.verify(self.id, msg.sender,
                                   view_sign_payload(msg.mtype, msg.view), msg.view_sig):
                    return False
                self.vsig_verified.add(key)
        return auth.verify(self.id, msg.sender,
                           data_sign_payload(msg.data, msg.view), msg.data_sig)

    def dispatch(self, msg: ProtocolMsg) -> None:
        t = msg.mtype
        if t == MsgType.Propose:
            self.on_proposal(msg)
        elif t == MsgType.Blame:
            self.on_blame(msg)
        elif t == MsgType.BlameQC:
            self.on_blame_qc_msg(msg)
        elif t == MsgType.CommitUpdate:
            self.on_commit_update(msg)
        elif t == MsgType.Certify:
            self.on_certify(msg)
        elif t == MsgType.CommitQC:
            self.on_commit_qc(msg)
        elif t == MsgType.NewViewProposal:
            self.on_new_view_proposal(msg)
        elif t == MsgType.VoteMsg:
            self.on_vote(msg)
        elif t == MsgType.SyncRequest:
            self.on_sync_request(msg)
        elif t == MsgType.SyncResponse:
            self.on_sync_response(msg)

    def _buffer_future(self, msg: ProtocolMsg) -> bool:
        if msg.view > self.view:
            self.future_views.setdefault(msg.view, []).append(msg)
            return True
        return False

    # ------------------------------------------------------------ steady state

    def on_round_start(self) -> None:
        self._timer(STEADY_TIMEOUT, ("blame", self.epoch, self.view, self.rnd))
        if self.phase == STEADY and self.leader_of(self.view) == self.id:
            self.create_proposal()
        buffered = self.future_rounds.pop((self.view, self.rnd), None)
        if buffered:
            for m in buffered:
                self.dispatch(m)

    def create_proposal(self) -> None:
        tip = self.b_lck
        if tip.height >= self.sim.max_height:
            return  # client workload exhausted
        cmd = (put_u32(self.view) + put_u32(self.rnd)).ljust(self.sim.payload_bytes, b"\x00")
        block = Block(self.view, self.rnd, tip.height + 1, tip.digest, (cmd,))
        self.store.add(block)
        msg = self._make(MsgType.Propose, self.view, self.rnd, block.wire, block=block)
        self.sim.trace("propose", node=self.id, view=self.view, round=self.rnd,
                       height=block.height, digest=block.digest.hex()[:12])
        self._send(msg)

    def on_proposal(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view < self.view or msg.sender != self.leader_of(msg.view):
            return
        block = msg.block
        if block is None or block.view != msg.view or block.round != msg.round:
            return
        if msg.round == 2:
            self._record_slot(msg)
            self.on_round2_proposal(msg)
            return
        if msg.round < 3:
            return
        self._record_slot(msg)
        if msg.round > self.rnd:
            self.future_rounds.setdefault((msg.view, msg.round), []).append(msg)
            return
        if msg.round < self.rnd or self.phase != STEADY:
            return

        if self.store.missing_ancestor(block) is not None:
            self._request_sync(msg)
            return
        parent = self.store.get(block.parent)
        if parent is None or block.height != parent.height + 1:
            return
        if not lock_compare(self.store, block, self.b_lck):
            return

        self.store.add(block)
        self._adopt_and_relay(msg, block)
        self.rnd += 1
        self.on_round_start()

    def _adopt_and_relay(self, msg: ProtocolMsg, block: Block) -> None:
        self._send(msg)  # relay; free if the flood already marked us
        self.relayed[(msg.view, msg.round)] = block.digest
        self.b_lck = block
        self.pending_commits[block.digest] = block
        self.sim.trace("relay", node=self.id, view=msg.view, round=msg.round,
                       height=block.height, digest=block.digest.hex()[:12])
        self.sim.network.schedule_timer(self.now + COMMIT_WAIT * self.delta, self.id,
                                        ("commit", self.epoch, block.digest))

    def _record_slot(self, msg: ProtocolMsg) -> None:
        """Track leader-signed proposals per (view, round) for equivocation."""
        slot = (msg.view, msg.round)
        bucket = self.slot_msgs.setdefault(slot, {})
        digest = msg.block.digest
        if digest not in bucket:
            if bucket:
                other = next(iter(bucket.values()))
                bucket[digest] = msg
                self.on_equivocation(other, msg)
                return
            bucket[digest] = msg

    # ------------------------------------------------------------------ timers

    def on_timer(self, tag: tuple) -> None:
        kind = tag[0]
        if tag[1] != self.epoch:
            return
        if kind == "blame":
            self.on_blame_expiry(tag[2], tag[3])
        elif kind == "commit":
            self.on_commit_expiry(tag[2])
        elif kind == "quitwait":
            self.quit_view()
        elif kind == "statuswait":
            self.on_certify_window_end()
        elif kind == "postqc":
            self.new_view()
        elif kind == "leaderwait":
            self.on_status_window_end()

    def on_blame_expiry(self, view: int, rnd: int) -> None:
        if view != self.view or rnd != self.rnd:
            return
        if self.phase not in (STEADY, ROUND1, ROUND2):
            return
        if view in self.blamed_views:
            return
        self.blamed_views.add(view)
        msg = self._make(MsgType.Blame, view, rnd, b"")
        self.sim.trace("blame", node=self.id, view=view, round=rnd)
        self._send(msg)

    def on_commit_expiry(self, digest: bytes) -> None:
        block = self.pending_commits.pop(digest, None)
        if block is None:
            return
        if self.blameqc_adopted:
            return
        if self.equiv_round is not None and block.round >= self.equiv_round:
            return
        if self.phase not in (STEADY, BLAMED):
            return
        self._commit_chain(block)

    def _commit_chain(self, block: Block) -> None:
        if not self.store.extends(block, self.b_com):
            return
        fresh = self.store.chain_between(block, self.b_com.digest)
        if fresh is None:
            return
        self.b_com = block
        for b in fresh:
            self.sim.on_commit(self.id, b)

    # ------------------------------------------------------------- blame path

    def on_blame(self, msg: ProtocolMsg) -> None:
        if msg.view < self.view or msg.data != b"":
            return
        self.blames.setdefault(msg.view, {})[msg.sender] = msg
        self._check_blame_quorum()

    def _check_blame_quorum(self) -> None:
        if self.phase not in (STEADY, ROUND1, ROUND2):
            return
        bucket = self.blames.get(self.view, {})
        if len(bucket) >= self.quorum:
            qc = form_qc(list(bucket.values()), self.quorum)
            if qc is not None:
                self.on_blame_quorum(qc)

    def on_blame_quorum(self, qc) -> None:
        if self.phase not in (STEADY, ROUND1, ROUND2):
            return
        self.blameqc_adopted = True
        msg = self._make(MsgType.BlameQC, self.view, self.rnd, qc.wire, qc=qc)
        self._send(msg)
        self._condemn_view("blame-quorum")

    def on_blame_qc_msg(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view or self.phase not in (STEADY, ROUND1, ROUND2):
            return
        qc = msg.qc
        if qc is None or qc.mtype != MsgType.Blame or qc.view != msg.view:
            return
        if not validate_qc(self.sim.auth, self.id, qc, self.quorum):
            return
        self.blameqc_adopted = True
        self._send(msg)  # keep the certificate flooding
        self._condemn_view("blame-quorum")

    def on_equivocation(self, m1: ProtocolMsg, m2: ProtocolMsg) -> None:
        if m1.view != self.view:
            return
        rnd = min(m1.round, m2.round)
        if self.equiv_round is None or rnd < self.equiv_round:
            self.equiv_round = rnd
        slot = (m1.view, rnd)
        if slot not in self.equiv_flooded:
            # The conflicting pair is self-certifying proof; flood it once so
            # every node can verify the view is dead without waiting on blames.
            self.equiv_flooded.add(slot)
            self.sim.trace("equivocation", node=self.id, view=m1.view, round=rnd)
            self._send(m1)
            self._send(m2)
        self._condemn_view("equivocation")

    def _condemn_view(self, reason: str) -> None:
        if self.phase not in (STEADY, ROUND1, ROUND2):
            return
        self.phase = BLAMED
        self.sim.trace("view_condemned", node=self.id, view=self.view, reason=reason)
        if reason == "equivocation" and self.sim.equivocation_speedup:
            self.quit_view()
        else:
            self._timer(QUIT_GRACE, ("quitwait", self.epoch))

    # -------------------------------------------------------------- quit view

    def quit_view(self) -> None:
        if self.phase not in (BLAMED, STEADY, ROUND1, ROUND2):
            return
        self.epoch += 1
        self.phase = QUITTING
        self.pending_commits.clear()
        self.updates = {}
        self.certs = {}
        self.certified_sent = set()
        self.sim.trace("quit_view", node=self.id, view=self.view)
        upd = self._make(MsgType.CommitUpdate, self.view, 0, self.b_com.wire, block=self.b_com)
        self._send(upd)
        self._timer(CERTIFY_WINDOW, ("statuswait", self.epoch))
        buffered = self.pending_quit.pop(self.view, None)
        if buffered:
            for m in buffered:
                self.dispatch(m)

    def on_commit_update(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view:
            return
        if self.phase != QUITTING:
            # The blame certificate is still in flight to us; hold the update.
            self.pending_quit.setdefault(msg.view, []).append(msg)
            return
        block = msg.block
        if block is None:
            return
        self.store.add(block)
        if not self.store.has_ancestry(block):
            self._request_sync(msg)
            return
        self.updates[block.digest] = block
        self._certify_if_compatible(block)

    def _certify_if_compatible(self, block: Block) -> None:
        if block.digest in self.certified_sent:
            return
        comparable = (self.store.extends(block, self.b_lck)
                      or self.store.extends(self.b_lck, block))
        if not comparable:
            return
        self.certified_sent.add(block.digest)
        cmsg = self._make(MsgType.Certify, self.view, 0, block.digest)
        self._send(cmsg)

    def on_certify(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view or len(msg.data) != 32:
            return
        if self.phase != QUITTING:
            self.pending_quit.setdefault(msg.view, []).append(msg)
            return
        bucket = self.certs.setdefault(msg.data, {})
        bucket[msg.sender] = msg
        self._try_form_commit_qc(msg.data)

    def _try_form_commit_qc(self, digest: bytes) -> None:
        if digest in self.commit_qcs:
            return
        bucket = self.certs.get(digest, {})
        if len(bucket) < self.quorum:
            return
        block = self.updates.get(digest) or self.store.get(digest)
        if block is None or not self.store.has_ancestry(block):
            return
        qc = form_qc(list(bucket.values()), self.quorum)
        if qc is None:
            return
        self._adopt_commit_qc(block, qc)

    def _adopt_commit_qc(self, block: Block, qc) -> None:
        self.commit_qcs[block.digest] = (block, qc)
        if self.hc_qc is None:
            # Bootstrap: any certificate beats the placeholder, including the
            # genesis certificate formed in the first view change.
            self.hc_block, self.hc_qc = block, qc
            return
        better = (block.height > self.hc_block.height
                  or (block.height == self.hc_block.height
                      and block.digest < self.hc_block.digest))
        if better:
            self.hc_block, self.hc_qc = block, qc

    def on_certify_window_end(self) -> None:
        if self.phase != QUITTING:
            return
        entry = self.commit_qcs.get(self.b_com.digest)
        if entry is not None:
            block, qc = entry
            msg = self._make(MsgType.CommitQC, self.view, 0, block.wire + qc.wire,
                             block=block, qc=qc)
            self._send(msg)
        self._timer(POST_CERT_WAIT, ("postqc", self.epoch))

    def on_commit_qc(self, msg: ProtocolMsg) -> None:
        if msg.round == 1:
            self.on_status(msg)
            return
        if self._buffer_future(msg):
            return
        qc = msg.qc
        block = msg.block
        if qc is None or block is None or qc.mtype != MsgType.Certify:
            return
        if qc.data != block.digest:
            return
        if not validate_qc(self.sim.auth, self.id, qc, self.quorum):
            return
        self.store.add(block)
        if not self.store.has_ancestry(block):
            self._request_sync(msg)
            return
        self._adopt_commit_qc(block, qc)
        self._send(msg)  # flood participation

    # --------------------------------------------------------------- new view

    def new_view(self) -> None:
        if self.phase != QUITTING:
            return
        self.epoch += 1
        self.view += 1
        self.rnd = 1
        self.phase = ROUND1
        self.blameqc_adopted = False
        self.equiv_round = None
        self.statuses = {}
        self.votes = {}
        self.r1_block = None
        self.proposed_r2 = False
        self.sim.trace("new_view", node=self.id, view=self.view)

        if self.hc_qc is None:
            # First view change certifies genesis at the latest; reaching here
            # without any certificate means certify collection failed, which a
            # correct quorum prevents. Stall and let blame timers recover.
            self._timer(ROUND1_TIMEOUT, ("blame", self.epoch, self.view, 1))
            return
        leader = self.leader_of(self.view)
        if leader == self.id:
            self.statuses[self.id] = (self.hc_block, self.hc_qc)
            self._timer(STATUS_WINDOW, ("leaderwait", self.epoch))
        else:
            smsg = self._make(MsgType.CommitQC, self.view, 1,
                              self.hc_block.wire + self.hc_qc.wire,
                              block=self.hc_block, qc=self.hc_qc)
            self._send(smsg, addressee=leader)
        self._timer(ROUND1_TIMEOUT, ("blame", self.epoch, self.view, 1))
        buffered = self.future_views.pop(self.view, None)
        if buffered:
            for m in buffered:
                self.dispatch(m)
        self._check_blame_quorum()

    def on_status(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view or self.id != self.leader_of(msg.view):
            return
        qc = msg.qc
        block = msg.block
        if qc is None or block is None or qc.mtype != MsgType.Certify or qc.data != block.digest:
            return
        if not validate_qc(self.sim.auth, self.id, qc, self.quorum):
            return
        self.store.add(block)
        if not self.store.has_ancestry(block):
            self._request_sync(msg)
            return
        self.statuses[msg.sender] = (block, qc)
        self._adopt_commit_qc(block, qc)

    def on_status_window_end(self) -> None:
        if self.phase != ROUND1 or self.id != self.leader_of(self.view):
            return
        if len(self.statuses) < self.quorum:
            return  # blame timer recovers
        ranked = sorted(self.statuses.items(),
                        key=lambda kv: (-kv[1][0].height, kv[1][0].digest, kv[0]))
        high_block, high_qc = ranked[0][1]
        if not self.store.has_ancestry(high_block):
            return
        chosen = [ranked[0]] + [kv for kv in sorted(ranked[1:], key=lambda kv: kv[0])]
        chosen = chosen[: self.quorum]
        statuses = tuple((b, q) for _, (b, q) in chosen)
        b1 = Block(self.view, 1, high_block.height + 1, high_block.digest, ())
        self.store.add(b1)
        data = b1.wire + b"".join(b.wire + q.wire for b, q in statuses)
        msg = self._make(MsgType.NewViewProposal, self.view, 1, data,
                         block=b1, statuses=statuses)
        self.sim.trace("propose", node=self.id, view=self.view, round=1,
                       height=b1.height, digest=b1.digest.hex()[:12])
        self._send(msg)

    def on_new_view_proposal(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view or msg.sender != self.leader_of(msg.view):
            return
        block = msg.block
        if block is None or block.view != msg.view or block.round != 1 or block.commands:
            return
        self._record_slot(msg)
        if self.phase != ROUND1 or self.rnd != 1:
            return
        if len(msg.statuses) < self.quorum:
            return
        for sblock, sqc in msg.statuses:
            if sqc.mtype != MsgType.Certify or sqc.data != sblock.digest:
                return
            if not validate_qc(self.sim.auth, self.id, sqc, self.quorum):
                return
        high = sorted((s[0] for s in msg.statuses),
                      key=lambda b: (-b.height, b.digest))[0]
        if block.parent != high.digest or block.height != high.height + 1:
            return
        for sblock, _ in msg.statuses:
            self.store.add(sblock)
        self.store.add(block)
        if not self.store.has_ancestry(block):
            self._request_sync(msg)
            return
        if not self.store.extends(block, self.hc_block):
            return
        if not self.store.extends(block, self.b_lck):
            if not self.store.extends(block, self.b_com):
                return
            self.sim.trace("lock_rebase", node=self.id, view=self.view,
                           from_height=self.b_lck.height, to_height=block.height)
        for sblock, sqc in msg.statuses:
            if self.store.has_ancestry(sblock):
                self._adopt_commit_qc(sblock, sqc)
        self._adopt_and_relay(msg, block)
        self.r1_block = block
        vote = self._make(MsgType.VoteMsg, self.view, 1, block.digest)
        if self.id == self.leader_of(self.view):
            self.votes[self.id] = vote
            self._maybe_propose_round2()
        else:
            self._send(vote, addressee=self.leader_of(self.view))
        self.rnd = 2
        self.phase = ROUND2
        self._timer(ROUND2_TIMEOUT, ("blame", self.epoch, self.view, 2))
        buffered = self.future_rounds.pop((self.view, 2), None)
        if buffered:
            for m in buffered:
                self.dispatch(m)

    def on_vote(self, msg: ProtocolMsg) -> None:
        if self._buffer_future(msg):
            return
        if msg.view != self.view or self.id != self.leader_of(msg.view):
            return
        if self.r1_block is None or msg.data != self.r1_block.digest:
            return
        self.votes[msg.sender] = msg
        self._maybe_propose_round2()

    def _maybe_propose_round2(self) -> None:
        if self.proposed_r2 or self.r1_block is None:
            return
        if len(self.votes) < self.quorum:
            return
        qc = form_qc(list(self.votes.values()), self.quorum)
        if qc is None:
            return
        self.proposed_r2 = True
        b2 = Block(self.view, 2, self.r1_block.height + 1, self.r1_block.digest, ())
        self.store.add(b2)
        msg = self._make(MsgType.Propose, self.view, 2, b2.wire + qc.wire,
                         block=b2, qc=qc)
        self.sim.trace("propose", node=self.id, view=self.view, round=2,
                       height=b2.height, digest=b2.digest.hex()[:12])
        self._send(msg)

    def on_round2_proposal(self, msg: ProtocolMsg) -> None:
        if self.phase != ROUND2 or msg.view != self.view or self.rnd != 2:
            return
        block = msg.block
        qc = msg.qc
        if block is None or qc is None or block.commands:
            return
        if self.r1_block is None or block.parent != self.r1_block.digest:
            return
        if block.height != self.r1_block.height + 1:
            return
        if qc.mtype != MsgType.VoteMsg or qc.view != msg.view or qc.data != self.r1_block.digest:
            return
        if not validate_qc(self.sim.auth, self.id, qc, self.quorum):
            return
        self.store.add(block)
        self._adopt_and_relay(msg, block)
        self.rnd = 3
        self.phase = STEADY
        self.sim.trace("steady_resume", node=self.id, view=self.view)
        self.on_round_start()

    # ------------------------------------------------------------------- sync

    def _request_sync(self, msg: ProtocolMsg) -> None:
        """Fetch missing ancestry for msg.block from the message's sender."""
        block = msg.block
        if block is None:
            return
        self.parked.setdefault(block.digest, []).append(msg)
        key = (msg.sender, msg.round)
        if key in self.sync_asked:
            return
        self.sync_asked.add(key)
        req = self._make(MsgType.SyncRequest, self.view, msg.round,
                         block.digest + self.b_com.digest)
        self._send(req, addressee=msg.sender)

    def on_sync_request(self, msg: ProtocolMsg) -> None:
        if len(msg.data) != 64:
            return
        want, have = msg.data[:32], msg.data[32:]
        tip = self.store.get(want)
        if tip is None:
            return
        segment = self.store.chain_between(tip, have)
        if segment is None:
            # Requester's base is off our chain; send a bounded tail instead.
            segment = []
            cur = tip
            while cur is not None and cur.height > 0 and len(segment) < 256:
                segment.append(cur)
                cur = self.store.get(cur.parent)
            segment.reverse()
        if not segment:
            return
        resp = self._make(MsgType.SyncResponse, msg.view, msg.round,
                          b"".join(b.wire for b in segment), blocks=tuple(segment))
        self._send(resp, addressee=msg.sender)

    def on_sync_response(self, msg: ProtocolMsg) -> None:
        for b in msg.blocks:
            parent = self.store.get(b.parent)
            if parent is not None and b.height != parent.height + 1:
                return
            self.store.add(b)
        ready = [d for d, msgs in self.parked.items()
                 if (blk := self.store.get(d)) is not None and self.store.has_ancestry(blk)]
        for d in ready:
            for m in self.parked.pop(d):
                self.dispatch(m)
