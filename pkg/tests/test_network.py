"""Physical transmission accounting of the k-cast fabric.

Frozen expectations: one flood on a ring is exactly n transmissions (every
node relays once, deduplicated per digest); on a complete unicast graph a
broadcast from one origin is n-1 edge transmissions, and each protocol
relay launches its own.
"""

from eesmr_lab.chain import GENESIS, Block
from eesmr_lab.crypto import SigningAuthority
from eesmr_lab.hypergraph import generate_topology
from eesmr_lab.messages import MsgType, make_msg
from eesmr_lab.network import Network


def _network(kind, n, k=None, policy="max_delay", corrupt=()):
    graph = generate_topology(kind, n, k)
    return Network(graph, frozenset(corrupt), delta=1000, policy=policy,
                   seed=42, sig_len=128)


def _msg(auth, sender=0, view=1, rnd=3, data=b"payload"):
    return make_msg(auth, MsgType.Propose, view, rnd, sender, data)


def _drain(net, until=100_000):
    delivered = []
    net.run(lambda node, msg: delivered.append((net.now, node, msg)),
            lambda node, tag: None, until=until)
    return delivered


def test_ring_flood_is_exactly_n_transmissions():
    auth = SigningAuthority(seed=1, n=10)
    net = _network("ring", 10, 3)
    net.schedule_send(0, _msg(auth))
    delivered = _drain(net)
    assert net.ledger.total_tx_edges() == 10
    assert len(net.ledger.waves) == 1
    # everyone hears it, including the origin's own self-delivery
    assert sorted(node for _, node, _ in delivered) == list(range(10))


def test_relay_of_flooded_digest_is_free():
    auth = SigningAuthority(seed=1, n=10)
    net = _network("ring", 10, 3)
    msg = _msg(auth)
    net.schedule_send(0, msg)
    _drain(net)
    before = net.ledger.total_tx_edges()
    # protocol-level relays of the same digest fold into the finished wave
    for node in range(1, 10):
        net.schedule_send(node, msg)
    _drain(net)
    assert net.ledger.total_tx_edges() == before


def test_force_retries_partial_waves_without_double_charging():
    # corrupt sink at node 2 stops the first wave partway around the line
    auth = SigningAuthority(seed=1, n=6)
    net = _network("ring", 6, 1, corrupt=(2,))
    msg = _msg(auth)
    net.schedule_send(0, msg)
    _drain(net)
    assert net.ledger.total_tx_edges() == 2  # 0 and 1 transmitted
    # a completed transmitter set is a no-op to retry, even forced
    net.schedule_send(0, msg, force=True)
    _drain(net)
    assert net.ledger.total_tx_edges() == 2
    # but a fresh corrupt transmitter downstream can restart the wave and
    # only the newcomers are charged
    net2 = _network("ring", 6, 1, corrupt=(2,))
    net2.schedule_send(0, msg)
    _drain(net2)
    net2.schedule_send(2, msg, force=True)
    delivered = _drain(net2)
    assert net2.ledger.total_tx_edges() == 6  # 2,3,4,5 join; 0,1 not recharged
    # logical redelivery reaches everyone; physical charging stays deduped
    assert sorted(node for _, node, _ in delivered) == [0, 1, 2, 3, 4, 5]


def test_addressed_resend_of_flooded_digest_delivers_free():
    # distinct recipients of the same payload share one physical wave
    auth = SigningAuthority(seed=1, n=7)
    net = _network("ring", 7, 3)
    msg = _msg(auth)
    net.schedule_send(0, msg, addressee=5)  # remote addressee: full flood
    delivered = _drain(net)
    assert [node for _, node, _ in delivered] == [5]
    assert net.ledger.total_tx_edges() == 7
    for addressee in (1, 3, 6):
        net.schedule_send(0, msg, addressee=addressee)
    delivered = _drain(net)
    assert sorted(node for _, node, _ in delivered) == [1, 3, 6]
    assert net.ledger.total_tx_edges() == 7  # no re-charges
    assert len(net.ledger.waves) == 1


def test_complete_graph_uses_direct_unicast_edges():
    auth = SigningAuthority(seed=1, n=4)
    net = _network("complete", 4)
    net.schedule_send(0, _msg(auth))
    _drain(net)
    # origin transmits on its n-1 unicast out-edges; no other node relays
    assert net.ledger.total_tx_edges() == 3
    assert net.ledger.tx_edges == [3, 0, 0, 0]


def test_addressed_send_on_adjacent_edge_is_single_transmission():
    auth = SigningAuthority(seed=1, n=7)
    net = _network("ring", 7, 3)
    net.schedule_send(0, _msg(auth), addressee=2)  # 2 is within 0's k-cast
    delivered = _drain(net)
    assert net.ledger.total_tx_edges() == 1
    assert [node for _, node, _ in delivered] == [2]
    # the whole edge heard it even though only the addressee consumes it
    assert net.ledger.rx_msgs[1] == 1 and net.ledger.rx_msgs[3] == 1


def test_addressed_send_beyond_neighbors_floods():
    auth = SigningAuthority(seed=1, n=7)
    net = _network("ring", 7, 2)
    net.schedule_send(0, _msg(auth), addressee=5)  # not adjacent: full flood
    delivered = _drain(net)
    assert net.ledger.total_tx_edges() == 7
    assert [node for _, node, _ in delivered] == [5]


def test_delivery_within_delta_for_all_policies():
    for policy in ("eager", "max_delay", "seeded_random"):
        auth = SigningAuthority(seed=1, n=10)
        net = _network("ring", 10, 3, policy=policy)
        net.schedule_send(0, _msg(auth))
        delivered = _drain(net)
        assert len(delivered) == 10
        for t, _, _ in delivered:
            assert 0 < t <= 1000, (policy, t)
        if policy == "max_delay":
            assert all(t == 1000 for t, _, _ in delivered)


def test_seeded_random_delays_are_reproducible():
    def stamps(seed):
        auth = SigningAuthority(seed=1, n=10)
        graph = generate_topology("ring", 10, 3)
        net = Network(graph, frozenset(), delta=1000, policy="seeded_random",
                      seed=seed, sig_len=128)
        net.schedule_send(0, _msg(auth))
        out = []
        net.run(lambda node, msg: out.append((net.now, node)),
                lambda node, tag: None, until=10_000)
        return out

    assert stamps(5) == stamps(5)
    assert stamps(5) != stamps(6)


def test_corrupt_nodes_do_not_relay_floods():
    auth = SigningAuthority(seed=1, n=6)
    net = _network("ring", 6, 1, corrupt=(2,))
    net.schedule_send(0, _msg(auth))
    delivered = _drain(net)
    # the k=1 ring is a line once node 2 stops relaying: 0 -> 1 -> 2 (sink)
    assert net.ledger.total_tx_edges() == 2
    assert sorted(node for _, node, _ in delivered) == [0, 1, 2]


def test_wave_records_carry_round_size_and_height():
    auth = SigningAuthority(seed=1, n=5)
    net = _network("ring", 5, 2)
    net.schedule_send(0, _msg(auth, rnd=7))
    _drain(net)
    (t, origin, mtype, rnd, edge_tx, size, height) = net.ledger.waves[0]
    assert (origin, mtype, rnd, edge_tx) == (0, int(MsgType.Propose), 7, 5)
    assert size == _msg(auth, rnd=7).wire_size(128)
    assert height == 0  # no block attached to the bare message

    blk = Block(view=1, round=7, height=9, parent=GENESIS.digest, commands=(b"x",))
    net.schedule_send(1, make_msg(auth, MsgType.Propose, 1, 7, 1,
                                  blk.wire, block=blk))
    _drain(net)
    assert net.ledger.waves[-1][6] == 9
