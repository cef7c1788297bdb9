"""Protocol messages, double signatures, and quorum certificates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .chain import Block
from .codec import (
    data_sign_payload,
    encode_msg_header,
    msg_wire_size,
    put_u16,
    put_u32,
    put_u8,
    qc_wire_size,
    sha256,
    view_sign_payload,
)
from .crypto import SigningAuthority


class MsgType(enum.IntEnum):
    Propose = 1
    Blame = 2
    Certify = 3
    CommitUpdate = 4
    NewViewProposal = 5
    VoteMsg = 6
    BlameQC = 7
    CommitQC = 8
    SyncRequest = 9
    SyncResponse = 10


@dataclass(frozen=True)
class QC:
    """f+1 matching signatures from distinct nodes over one payload."""

    mtype: MsgType
    view: int
    data: bytes
    members: tuple[tuple[int, bytes], ...]  # (sender, data_sig), sorted by sender

    def wire_size(self, sig_len: int) -> int:
        return qc_wire_size(len(self.data), len(self.members), sig_len)

    @property
    def wire(self) -> bytes:
        parts = [put_u8(self.mtype), put_u32(self.view), sha256(self.data)]
        for sender, sig in self.members:
            parts.append(put_u16(sender) + sig)
        return b"".join(parts)

    @property
    def senders(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.members)


@dataclass
class ProtocolMsg:
    mtype: MsgType
    view: int
    round: int
    sender: int
    data: bytes
    view_sig: bytes
    data_sig: bytes
    # In-memory conveniences; the canonical content is `data`.
    block: Block | None = None
    qc: QC | None = None
    statuses: tuple[tuple[Block, QC], ...] = ()
    blocks: tuple[Block, ...] = ()
    _digest: bytes = field(default=b"", repr=False)

    @property
    def digest(self) -> bytes:
        if not self._digest:
            self._digest = sha256(
                encode_msg_header(self.mtype, self.view, self.round, self.sender)
                + self.data
                + self.data_sig
            )
        return self._digest

    def wire_size(self, sig_len: int) -> int:
        return msg_wire_size(len(self.data), sig_len)


def make_msg(
    auth: SigningAuthority,
    mtype: MsgType,
    view: int,
    rnd: int,
    sender: int,
    data: bytes,
    view_sig_cache: dict[tuple[int, MsgType, int], bytes] | None = None,
    **extras,
) -> ProtocolMsg:
    """Build and double-sign a message.

    The per-view signature covers only (type, view) and so is cacheable across
    a view; pass `view_sig_cache` to amortize it to one signing operation.
    """
    key = (sender, mtype, view)
    if view_sig_cache is not None and key in view_sig_cache:
        view_sig = view_sig_cache[key]
    else:
        view_sig = auth.sign(sender, view_sign_payload(mtype, view))
        if view_sig_cache is not None:
            view_sig_cache[key] = view_sig
    data_sig = auth.sign(sender, data_sign_payload(data, view))
    return ProtocolMsg(mtype, view, rnd, sender, data, view_sig, data_sig, **extras)


def matching_msg(a: ProtocolMsg, b: ProtocolMsg) -> bool:
    """Messages match when they certify the same payload in the same view."""
    return a.mtype == b.mtype and a.view == b.view and a.data == b.data


def form_qc(msgs: list[ProtocolMsg], quorum: int) -> QC | None:
    """Assemble a certificate from matching messages, if a quorum is present.

    Members are the quorum-many lowest sender ids (sorted), which makes the
    certificate canonical: every node that saw the same message set builds a
    byte-identical QC.
    """
    if not msgs:
        return None
    head = msgs[0]
    by_sender: dict[int, bytes] = {}
    for m in msgs:
        if matching_msg(head, m):
            by_sender.setdefault(m.sender, m.data_sig)
    if len(by_sender) < quorum:
        return None
    members = tuple(sorted(by_sender.items())[:quorum])
    return QC(head.mtype, head.view, head.data, members)


def matching_qc(qc: QC, mtype: MsgType, view: int, data: bytes) -> bool:
    return qc.mtype == mtype and qc.view == view and qc.data == data


def validate_qc(auth: SigningAuthority, verifier: int, qc: QC, quorum: int) -> bool:
    """Check distinctness, quorum size, and every member signature."""
    if len(qc.senders) < quorum or len(qc.members) != len(qc.senders):
        return False
    payload = data_sign_payload(qc.data, qc.view)
    return all(auth.verify(verifier, s, payload, sig) for s, sig in qc.members)


def lock_compare(store, candidate: Block, lock: Block) -> bool:
    """Preference rule: adopt `candidate` iff it extends the lock and names a
    strictly different slot (view or round) than the lock itself."""
    if candidate.view == lock.view and candidate.round == lock.round:
        return False
    return store.extends(candidate, lock)
