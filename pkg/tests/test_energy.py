"""Analytical energy engine: tables, expressions, models, and operators.

All frozen numbers below were hand-derived from the bundled measurement
tables before the engine existed: e.g. two 0.40 J signatures cost 0.80 J,
ten 0.02 J verifications cost 0.20 J, a 100-byte advertisement needs four
25-byte fragments at 5.3 mJ each, and so on.
"""

import math
from collections import Counter

import pytest

from eesmr_lab.energy import (
    CostExpr,
    CostTable,
    ParamVector,
    UnboundSymbolError,
    analytic_models,
    build_vector,
    constant_model,
    crossover_fraction,
    eval_expr,
    f_e_bound,
    feasible_region,
    ledger_to_energy,
    message_sizes,
    nu_f_bound,
    schedule_cost,
    simulation_energy,
    steady_node_cost,
)
from eesmr_lab.scenario import Scenario
from eesmr_lab.simulation import run_scenario

TABLE = CostTable.load_default()


# ------------------------------------------------------------- cost table


def test_grid_points_price_exactly():
    # mJ values straight from the measurement set, returned in joules
    expected = {
        ("ble", "send", 256): 0.00073,
        ("ble", "recv", 512): 0.00111,
        ("ble", "multicast", 2048): 0.0047,
        ("wifi", "send", 1024): 0.31054,
        ("lte", "send", 256): 0.49484,
        ("lte", "recv", 2048): 0.55635,
    }
    for (medium, direction, size), joules in expected.items():
        got, extrapolated = TABLE.message_cost(medium, direction, size)
        assert not extrapolated
        assert got == pytest.approx(joules, rel=1e-12), (medium, direction, size)


def test_between_grid_points_is_linear():
    j, extra = TABLE.message_cost("ble", "send", 384)  # midpoint of 256, 512
    assert not extra
    assert j == pytest.approx((0.00073 + 0.00131) / 2)
    j, _ = TABLE.message_cost("wifi", "recv", 768)
    assert j == pytest.approx((0.12323 + 0.23152) / 2)


def test_extrapolation_is_flagged_on_both_sides():
    below, extra_below = TABLE.message_cost("ble", "send", 128)
    assert extra_below and below == pytest.approx(0.00073 * 128 / 256)
    above, extra_above = TABLE.message_cost("ble", "send", 4096)
    slope = (5.91 - 2.93) / (2048 - 1024)
    assert extra_above and above == pytest.approx((5.91 + slope * 2048) / 1000)


def test_reliability_medium_prices_per_fragment():
    assert TABLE.fragments(25) == 1
    assert TABLE.fragments(26) == 2
    assert TABLE.fragments(1) == 1
    assert TABLE.fragments(100) == 4
    send, extra = TABLE.message_cost("ble_reliability", "send", 100)
    assert not extra and send == pytest.approx(4 * 5.3 / 1000)
    recv, _ = TABLE.message_cost("ble_reliability", "recv", 100)
    assert recv == pytest.approx(4 * 9.98 / 1000)


def test_ble_table_alias_and_unknown_medium():
    assert TABLE.message_cost("ble_table", "send", 256) == \
        TABLE.message_cost("ble", "send", 256)
    with pytest.raises(KeyError):
        TABLE.message_cost("zigbee", "send", 256)
    with pytest.raises(ValueError):
        TABLE.message_cost("ble", "send", 0)


def test_signature_prices_and_wire_lengths():
    assert TABLE.sign_cost("rsa1024") == 0.40
    assert TABLE.verify_cost("rsa1024") == 0.02
    assert TABLE.sign_cost("ecdsa_bp256r1") == 13.88
    assert TABLE.verify_cost("ecdsa_bp256r1") == 27.34
    assert TABLE.sign_cost("hmac_sha256") == 0.19
    assert TABLE.sig_bytes("rsa1024") == 128
    assert TABLE.sig_bytes("rsa2048") == 256
    assert TABLE.sig_bytes("ecdsa_bp160r1") == 40
    assert TABLE.sig_bytes("ecdsa_secp224r1") == 56
    assert TABLE.sig_bytes("hmac_sha256") == 32


def test_malformed_tables_are_rejected():
    import copy
    raw = copy.deepcopy(TABLE.raw)
    raw["media"]["ble"]["send"] = [0.73, 0.60, 2.93, 5.91]  # not monotone
    with pytest.raises(ValueError, match="grow"):
        CostTable(raw)
    raw = copy.deepcopy(TABLE.raw)
    raw["media"]["ble"]["sizes"] = [256, 256, 1024, 2048]
    with pytest.raises(ValueError, match="increasing"):
        CostTable(raw)


# ------------------------------------------------------------ expressions


def test_expr_algebra_and_canonical_form():
    n = CostExpr.var("n")
    one = CostExpr.const(1.0)
    assert (n + one) * (n - one) == n * n - one
    assert str(n * n - one) == "-1 + n*n"
    assert str(CostExpr.term(3, "n", "sigma_s") + 2 * n) == "2*n + 3*n*sigma_s"
    assert str(CostExpr()) == "0"
    assert (n - n) == CostExpr()
    assert 2 * n == n * 2
    assert (n + n) == CostExpr.term(2, "n")


def test_expr_evaluation_and_unbound_symbols():
    expr = CostExpr.term(2.0, "sigma_s")
    x = build_vector(10, scheme="rsa1024")
    assert eval_expr(expr, x) == pytest.approx(0.80)
    expr = CostExpr.var("n") * CostExpr.var("sigma_v")
    assert eval_expr(expr, x) == pytest.approx(0.20)
    with pytest.raises(UnboundSymbolError):
        eval_expr(CostExpr.var("u_mystery"), x)


def test_vector_construction_and_binding():
    x = build_vector(10, medium="ble_table", scheme="rsa1024")
    assert (x.n, x.f, x.k) == (10, 4, 5)
    assert x.S == pytest.approx(0.00073 / 256)
    assert x.R == pytest.approx(0.00055 / 256)
    assert x.sigma_s == 0.40 and x.sigma_v == 0.02
    assert x.mu_s == x.mu_v == 0.19
    y = x.bind(u_thing=1.5)
    assert y.extra["u_thing"] == 1.5 and "u_thing" not in x.extra
    with pytest.raises(ValueError):
        ParamVector(n=0, f=0, m=256, k=1, S=0, R=0, sigma_s=0, sigma_v=0,
                    mu_s=0, mu_v=0)


def test_transmission_cost_is_send_plus_k_receives():
    x = build_vector(13, medium="ble_reliability")  # k = 7
    size = 100
    expected = 4 * 5.3 / 1000 + 7 * (4 * 9.98 / 1000)
    assert x.transmission_cost(size) == pytest.approx(expected)


# ----------------------------------------------------------- wire profile


def test_frozen_message_sizes():
    assert message_sizes(256, 6, 128) == {
        "propose": 578, "blame": 271, "blame_qc": 1192,
        "commit_update": 578, "certify": 303, "commit_qc": 1531,
        "status": 1531, "new_view": 9140, "vote": 303, "propose_r2": 1273,
        "hs_propose": 1399, "hs_vote": 171, "hs_quit": 171,
        "hs_status": 1399, "hs_new_view": 1399, "hs_cert_msg": 1092,
        "relay_report": 267,
    }


def test_sizes_scale_with_payload_quorum_and_signature():
    small = message_sizes(64, 1, 40)
    big = message_sizes(2048, 6, 256)
    assert big["propose"] - small["propose"] == (2048 - 64) + 2 * (256 - 40)
    assert big["blame_qc"] > small["blame_qc"]
    assert small["relay_report"] == 11 + 64


# ----------------------------------------------------------------- models


def test_model_identity_wasted_equals_block_plus_extra():
    x = build_vector(13)
    for variant in ("deduplicated", "per_sender"):
        suite = analytic_models(x, relay_viewchange=variant)
        for name in suite.names():
            model = suite[name]
            assert model.psi_wasted - model.psi_block == model.psi_extra
            assert model.wasted_view_cost(suite.vector) == pytest.approx(
                model.block_cost(suite.vector)
                + model.viewchange_extra_cost(suite.vector))


def test_steady_state_cost_ratio_for_thirteen_low_power_nodes():
    x = build_vector(13, medium="ble_reliability", scheme="rsa1024")
    suite = analytic_models(x)
    ratio = (suite["sync_hotstuff"].block_cost(suite.vector)
             / suite["eesmr"].block_cost(suite.vector))
    assert ratio == pytest.approx(2.8389, abs=1e-4)
    assert 2.0 <= ratio <= 4.0


def test_viewchange_overhead_ratio_and_per_sender_blowup():
    x = build_vector(13, medium="ble_reliability", scheme="rsa1024")
    suite = analytic_models(x)
    ratio = (suite["eesmr"].viewchange_extra_cost(suite.vector)
             / suite["sync_hotstuff"].viewchange_extra_cost(suite.vector))
    assert ratio == pytest.approx(2.5491, abs=1e-4)
    assert 1.3 <= ratio <= 3.0
    # without deduplicated relays the same schedule is far heavier
    loose = analytic_models(x, relay_viewchange="per_sender")
    loose_ratio = (loose["eesmr"].viewchange_extra_cost(loose.vector)
                   / loose["sync_hotstuff"].viewchange_extra_cost(loose.vector))
    assert loose_ratio == pytest.approx(4.9595, abs=1e-4)
    assert loose_ratio > 3.0


def test_per_node_steady_cost_is_independent_of_population():
    frozen = {"leader": 1.48528, "replica": 1.10528}
    for n in (4, 7, 10, 13):
        suite = analytic_models(build_vector(n, k=4))
        for role, expected in frozen.items():
            assert steady_node_cost(suite, role) == pytest.approx(expected)


def test_unbound_model_requires_suite_vector():
    x = build_vector(7)
    suite = analytic_models(x)
    with pytest.raises(UnboundSymbolError):
        suite["eesmr"].block_cost(x)  # raw vector lacks the u_ symbols


# -------------------------------------------------------------- operators


def test_wasted_view_budget_worked_examples():
    protocol = constant_model("p", 10.0, 20.0)  # wasted view costs 30
    assert f_e_bound(protocol, 100.0, build_vector(4)) == math.floor(90 / 30) == 3
    no_extra = constant_model("q", 10.0, 0.0)  # wasted view = block only
    assert f_e_bound(no_extra, 100.0, build_vector(4)) == 9
    assert f_e_bound(protocol, 5.0, build_vector(4)) == -1
    free = constant_model("z", 0.0, 0.0)
    assert f_e_bound(free, 1.0, build_vector(4)) == math.inf


def test_viewchange_frequency_crossover_worked_example():
    x = build_vector(4)
    a = constant_model("a", 3.0, 10.0)
    b = constant_model("b", 5.0, 4.0)
    assert nu_f_bound(a, b, x) == pytest.approx((5 - 3) / (10 - 4))
    assert nu_f_bound(a, constant_model("c", 9.0, 10.0), x) is None
    # schedules cross where the bound says they do
    nu = nu_f_bound(a, b, x)
    blocks = 300
    v_at = math.ceil(nu * blocks)
    assert schedule_cost(a, x, blocks, v_at - 1) < schedule_cost(b, x, blocks, v_at - 1)
    assert schedule_cost(a, x, blocks, v_at + 1) > schedule_cost(b, x, blocks, v_at + 1)


def test_crossover_fraction_brackets_the_analytic_bound():
    x = build_vector(4)
    a = constant_model("a", 3.0, 10.0)
    b = constant_model("b", 5.0, 4.0)
    nu = nu_f_bound(a, b, x)
    emp = crossover_fraction(a, b, x, blocks=200)
    assert emp is not None
    assert abs(emp - nu) <= 1 / 200
    # never crosses: same extras
    assert crossover_fraction(a, constant_model("c", 9.0, 10.0), x) is None


def test_feasible_region_on_shared_medium_favors_bare_relaying():
    region = feasible_region("eesmr", "trusted_relay", [4, 10], [256, 1024])
    assert region["a"] == "eesmr" and region["b"] == "trusted_relay"
    for row in region["delta"]:
        for cell in row:
            assert cell > 0  # consensus always costs more than blind relaying
    assert not any(any(r) for r in region["favorable"])
    assert len(region["delta"]) == 2 and len(region["delta"][0]) == 2


def test_feasible_region_cross_medium_can_flip():
    region = feasible_region("eesmr", "trusted_relay", [4], [2048],
                             medium_a="ble_reliability", medium_b="lte", k=3)
    assert region["favorable"][0][0] is True
    assert region["delta"][0][0] < 0


# --------------------------------------------------------- ledger pricing


class _Ledger:
    def __init__(self, n):
        self.tx_sizes = [Counter() for _ in range(n)]
        self.rx_sizes = [Counter() for _ in range(n)]


def test_ledger_pricing_hand_check():
    ledger = _Ledger(2)
    ledger.tx_sizes[0][256] = 3   # 3 sends of 256 B on ble
    ledger.rx_sizes[1][512] = 2   # 2 receives of 512 B
    out = ledger_to_energy(ledger, sign_counts=[2, 0], verify_counts=[0, 5],
                           medium="ble_table", scheme="rsa1024")
    assert out["per_node"][0]["tx_j"] == pytest.approx(3 * 0.00073)
    assert out["per_node"][0]["sign_j"] == pytest.approx(2 * 0.40)
    assert out["per_node"][1]["rx_j"] == pytest.approx(2 * 0.00111)
    assert out["per_node"][1]["verify_j"] == pytest.approx(5 * 0.02)
    assert out["total_j"] == pytest.approx(
        3 * 0.00073 + 2 * 0.40 + 2 * 0.00111 + 5 * 0.02)
    assert out["extrapolated_sizes"] == []
    flagged = ledger_to_energy(_LedgerWith(0, 4096), [0], [0],
                               medium="ble_table", scheme="rsa1024")
    assert flagged["extrapolated_sizes"] == [4096]


class _LedgerWith(_Ledger):
    def __init__(self, node, size):
        super().__init__(node + 1)
        self.tx_sizes[node][size] = 1


def test_model_matches_simulated_steady_state_cost():
    # the closed-form block cost must track the priced simulation ledger
    for n in (4, 13):
        f = (n - 1) // 2
        scenario = Scenario(n=n, topology_kind="ring", topology_k=f + 1,
                            delivery_policy="max_delay", target_blocks=50)
        sim = run_scenario(scenario, seed=5)
        assert sim.all_pass()
        priced = simulation_energy(sim)
        x = build_vector(n, medium="ble_reliability", scheme="rsa1024")
        suite = analytic_models(x)
        model_block = suite["eesmr"].block_cost(suite.vector)
        delta = (priced["per_block_j"] - model_block) / model_block
        assert abs(delta) <= 0.10, (n, delta)
