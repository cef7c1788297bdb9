"""Message envelopes and quorum certificates.

The quorum-intersection check is the independent oracle here: for q = f+1
out of n = 2f+1 nodes, any two certificates must share a signer, verified
by brute force over every pair of quorums.
"""

from itertools import combinations

from eesmr_lab.chain import GENESIS, Block, BlockStore
from eesmr_lab.codec import msg_wire_size
from eesmr_lab.crypto import SigningAuthority
from eesmr_lab.messages import (
    MsgType,
    ProtocolMsg,
    form_qc,
    lock_compare,
    make_msg,
    matching_msg,
    matching_qc,
    validate_qc,
)


def _vote(auth, sender, view=1, data=b"digest"):
    return make_msg(auth, MsgType.Certify, view, 0, sender, data)


def test_make_msg_signs_view_and_data():
    auth = SigningAuthority(seed=3, n=4)
    msg = _vote(auth, 1)
    assert msg.sender == 1
    assert msg.view_sig and msg.data_sig
    assert msg.wire_size(auth.sig_len) == msg_wire_size(len(msg.data), auth.sig_len)


def test_matching_requires_type_view_and_data():
    auth = SigningAuthority(seed=3, n=4)
    a = _vote(auth, 0)
    assert matching_msg(a, _vote(auth, 1))
    assert not matching_msg(a, _vote(auth, 1, view=2))
    assert not matching_msg(a, _vote(auth, 1, data=b"other"))
    assert not matching_msg(a, make_msg(auth, MsgType.Blame, 1, 0, 1, b"digest"))


def test_form_qc_needs_distinct_senders():
    auth = SigningAuthority(seed=3, n=5)
    votes = [_vote(auth, 0), _vote(auth, 0), _vote(auth, 1)]
    assert form_qc(votes, quorum=3) is None
    votes.append(_vote(auth, 2))
    qc = form_qc(votes, quorum=3)
    assert qc is not None
    assert qc.senders == frozenset({0, 1, 2})


def test_form_qc_is_canonical_across_orderings():
    auth = SigningAuthority(seed=3, n=5)
    votes = [_vote(auth, i) for i in (4, 1, 3, 0, 2)]
    qc_a = form_qc(votes, quorum=3)
    qc_b = form_qc(list(reversed(votes)), quorum=3)
    # lowest quorum-many sender ids, regardless of arrival order
    assert qc_a.members == qc_b.members
    assert qc_a.senders == frozenset({0, 1, 2})
    assert qc_a.wire == qc_b.wire


def test_validate_qc_checks_every_member_signature():
    auth = SigningAuthority(seed=3, n=5)
    qc = form_qc([_vote(auth, i) for i in range(3)], quorum=3)
    assert validate_qc(auth, verifier=4, qc=qc, quorum=3)
    assert not validate_qc(auth, verifier=4, qc=qc, quorum=4)
    bad = type(qc)(qc.mtype, qc.view, b"forged", qc.members)
    assert not validate_qc(auth, verifier=4, qc=bad, quorum=3)
    assert matching_qc(qc, MsgType.Certify, 1, b"digest")
    assert not matching_qc(qc, MsgType.Certify, 2, b"digest")


def test_quorum_intersection_brute_force():
    # q = f+1 of n = 2f+1: every pair of quorums overlaps in >= 1 node,
    # which is what makes a certificate carry at least one correct signer.
    for f in (1, 2, 3):
        n, q = 2 * f + 1, f + 1
        for qa in combinations(range(n), q):
            for qb in combinations(range(n), q):
                assert set(qa) & set(qb), (n, qa, qb)


def test_lock_compare_truth_table():
    store = BlockStore()
    lock = Block(view=1, round=3, height=1, parent=GENESIS.digest, commands=(b"l",))
    child = Block(view=1, round=4, height=2, parent=lock.digest, commands=(b"c",))
    sibling = Block(view=2, round=3, height=1, parent=GENESIS.digest, commands=(b"s",))
    same_slot = Block(view=1, round=3, height=2, parent=lock.digest, commands=(b"x",))
    store.add(lock)
    store.add(child)
    store.add(sibling)
    store.add(same_slot)
    assert lock_compare(store, child, lock)          # extends, later slot
    assert not lock_compare(store, sibling, lock)    # competing branch
    assert not lock_compare(store, same_slot, lock)  # same (view, round) slot
    assert not lock_compare(store, lock, lock)       # self


def test_msg_digest_distinguishes_payloads():
    auth = SigningAuthority(seed=3, n=4)
    a = _vote(auth, 0, data=b"one")
    b = _vote(auth, 0, data=b"two")
    assert isinstance(a, ProtocolMsg)
    assert a.digest != b.digest
