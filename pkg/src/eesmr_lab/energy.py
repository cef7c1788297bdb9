"""Analytical energy-cost engine.

Everything here works in joules. The bundled measurement tables store
millijoules per message (radio) and joules per operation (signatures); the
loader converts on the way out.

The engine has four layers:

* `CostTable`: the bundled radio and signature measurements, with
  piecewise-linear interpolation over message size.
* `ParamVector`: one concrete deployment point (population, payload size,
  per-byte radio prices, signature prices, k-cast fan-out) plus any derived
  per-message-kind transmission prices bound by a model builder.
* `CostExpr` / `ProtocolCostModel`: symbolic polynomial cost expressions and
  the (block, wasted-view, view-change-extra) triple for one protocol.
* Bound operators: break-even view-change frequency, favorable-block-count
  bound, feasible-region grids, and pricing of a recorded traffic ledger.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .codec import block_wire_size, msg_wire_size, qc_wire_size

# ------------------------------------------------------------------ tables


class UnboundSymbolError(KeyError):
    """A cost expression referenced a symbol the vector does not bind."""


def _check_curve(name: str, sizes: list, values: list) -> None:
    if len(sizes) != len(values):
        raise ValueError("%s: size grid and value list differ in length" % name)
    if len(sizes) < 2:
        raise ValueError("%s: need at least two grid points" % name)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("%s: size grid must be strictly increasing" % name)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("%s: energy must grow with message size" % name)
    if values[0] <= 0:
        raise ValueError("%s: energies must be positive" % name)


class CostTable:
    """Radio and signature energy measurements with interpolation."""

    def __init__(self, raw: dict):
        self.raw = raw
        self.media = raw["media"]
        self.kcast = raw["kcast"]
        self.crypto = raw["crypto"]["schemes"]
        for name, entry in self.media.items():
            for direction in ("send", "recv", "multicast"):
                if direction in entry:
                    _check_curve("%s.%s" % (name, direction), entry["sizes"], entry[direction])
        point = self.kcast["operating_point"]
        if point["send_mj_per_fragment"] <= 0 or point["recv_mj_per_fragment"] <= 0:
            raise ValueError("k-cast fragment prices must be positive")
        for scheme, entry in self.crypto.items():
            if entry["sign"] <= 0 or entry["verify"] <= 0 or entry["sig_bytes"] <= 0:
                raise ValueError("%s: signature costs must be positive" % scheme)

    @classmethod
    def load_default(cls) -> "CostTable":
        global _DEFAULT_TABLE
        if _DEFAULT_TABLE is None:
            text = resources.files("eesmr_lab.data").joinpath("cost_tables.json").read_text()
            _DEFAULT_TABLE = cls(json.loads(text))
        return _DEFAULT_TABLE

    @classmethod
    def load(cls, path: str) -> "CostTable":
        with open(path) as handle:
            return cls(json.load(handle))

    # ---------------------------------------------------------- metadata

    def media_names(self) -> list[str]:
        return sorted(self.media) + ["ble_reliability"]

    def scheme_names(self) -> list[str]:
        return sorted(self.crypto)

    def fragment_bytes(self) -> int:
        return int(self.kcast["fragment_bytes"])

    def fragments(self, size: int) -> int:
        """Advertisement fragments needed to carry `size` bytes."""
        if size <= 0:
            raise ValueError("message size must be positive")
        return -(-size // self.fragment_bytes())

    def kcast_point(self) -> dict:
        return dict(self.kcast["operating_point"])

    # ------------------------------------------------------------ pricing

    def message_cost(self, medium: str, direction: str, size: int) -> tuple[float, bool]:
        """Energy in joules for one message of `size` bytes.

        Returns (joules, extrapolated). `extrapolated` is True when the size
        falls outside the measured grid and the value comes from extending
        the nearest segment (below the grid: proportional to the first
        point).
        """
        medium = MEDIUM_ALIASES.get(medium, medium)
        if size <= 0:
            raise ValueError("message size must be positive")
        if medium == "ble_reliability":
            point = self.kcast["operating_point"]
            key = "send_mj_per_fragment" if direction == "send" else "recv_mj_per_fragment"
            if direction == "multicast":
                key = "send_mj_per_fragment"
            return self.fragments(size) * point[key] / 1000.0, False
        entry = self.media.get(medium)
        if entry is None:
            raise KeyError("unknown medium: %r" % medium)
        if direction not in entry:
            raise KeyError("medium %r has no %r pricing" % (medium, direction))
        sizes, values = entry["sizes"], entry[direction]
        if size < sizes[0]:
            return values[0] * size / sizes[0] / 1000.0, True
        if size > sizes[-1]:
            slope = (values[-1] - values[-2]) / (sizes[-1] - sizes[-2])
            return (values[-1] + slope * (size - sizes[-1])) / 1000.0, True
        for i in range(len(sizes) - 1):
            if sizes[i] <= size <= sizes[i + 1]:
                frac = (size - sizes[i]) / (sizes[i + 1] - sizes[i])
                return (values[i] + frac * (values[i + 1] - values[i])) / 1000.0, False
        raise AssertionError("unreachable")

    def sign_cost(self, scheme: str) -> float:
        return float(self.crypto[scheme]["sign"])

    def verify_cost(self, scheme: str) -> float:
        return float(self.crypto[scheme]["verify"])

    def sig_bytes(self, scheme: str) -> int:
        return int(self.crypto[scheme]["sig_bytes"])


_DEFAULT_TABLE: CostTable | None = None

# Scenario medium names to table medium names.
MEDIUM_ALIASES = {"ble_table": "ble"}

# ------------------------------------------------------------ expressions


class CostExpr:
    """Polynomial over named parameters with float coefficients.

    Terms map a sorted tuple of symbol names (with repetition, so ("n", "n")
    is n squared) to a coefficient. Supports addition, subtraction, scaling,
    polynomial product, evaluation against a binding map, and a canonical
    string form.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[str, ...], float] | None = None):
        self.terms = {}
        for mono, coeff in (terms or {}).items():
            if coeff != 0:
                self.terms[tuple(sorted(mono))] = self.terms.get(tuple(sorted(mono)), 0.0) + coeff

    @staticmethod
    def const(value: float) -> "CostExpr":
        return CostExpr({(): float(value)})

    @staticmethod
    def term(coeff: float, *symbols: str) -> "CostExpr":
        return CostExpr({tuple(symbols): float(coeff)})

    @staticmethod
    def var(symbol: str) -> "CostExpr":
        return CostExpr({(symbol,): 1.0})

    def __add__(self, other: "CostExpr") -> "CostExpr":
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, 0.0) + coeff
        return CostExpr(out)

    def __sub__(self, other: "CostExpr") -> "CostExpr":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, CostExpr):
            out: dict[tuple[str, ...], float] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    mono = tuple(sorted(m1 + m2))
                    out[mono] = out.get(mono, 0.0) + c1 * c2
            return CostExpr(out)
        scaled = {mono: coeff * float(other) for mono, coeff in self.terms.items()}
        return CostExpr(scaled)

    __rmul__ = __mul__

    def symbols(self) -> set[str]:
        return {sym for mono in self.terms for sym in mono}

    def evaluate(self, bindings: dict[str, float]) -> float:
        total = 0.0
        for mono, coeff in self.terms.items():
            value = coeff
            for sym in mono:
                if sym not in bindings:
                    raise UnboundSymbolError("symbol %r is not bound" % sym)
                value *= bindings[sym]
            total += value
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            coeff = self.terms[mono]
            body = "*".join(mono)
            if not mono:
                text = "%g" % coeff
            elif coeff == 1:
                text = body
            elif coeff == -1:
                text = "-" + body
            else:
                text = "%g*%s" % (coeff, body)
            parts.append(text)
        out = parts[0]
        for part in parts[1:]:
            out += " - " + part[1:] if part.startswith("-") else " + " + part
        return out

    def __repr__(self) -> str:
        return "CostExpr(%s)" % self

    def __eq__(self, other) -> bool:
        if not isinstance(other, CostExpr):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(math.isclose(self.terms.get(k, 0.0), other.terms.get(k, 0.0),
                                rel_tol=1e-12, abs_tol=1e-12) for k in keys)

    def __hash__(self):
        return hash(frozenset((m, round(c, 9)) for m, c in self.terms.items()))


def eval_expr(expr: CostExpr, x: "ParamVector") -> float:
    """Evaluate a cost expression against a parameter vector, in joules."""
    return expr.evaluate(x.bindings())


# ---------------------------------------------------------- param vector


@dataclass(frozen=True)
class ParamVector:
    """One concrete deployment point for the analytical models.

    `S` and `R` are per-byte send and receive prices in joules for the
    chosen medium (used by models that price raw byte streams, like the
    trusted-relay baseline). `sigma_s`/`sigma_v` price one signature
    operation and `mu_s`/`mu_v` one MAC operation. `extra` carries derived
    per-transmission prices (symbols starting with "u_") bound by a model
    builder; each is the joule cost of one transmission of that message
    kind plus its k listeners.
    """

    n: int
    f: int
    m: int
    k: int
    S: float
    R: float
    sigma_s: float
    sigma_v: float
    mu_s: float
    mu_v: float
    medium: str = "ble_reliability"
    scheme: str = "rsa1024"
    table: CostTable = field(default=None, repr=False, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.f < self.n:
            raise ValueError("need n >= 1 and 0 <= f < n")
        if self.k < 1 or self.m < 1:
            raise ValueError("k and m must be positive")
        for name in ("S", "R", "sigma_s", "sigma_v", "mu_s", "mu_v"):
            if getattr(self, name) < 0:
                raise ValueError("%s must be non-negative" % name)
        if self.table is None:
            object.__setattr__(self, "table", CostTable.load_default())

    def kcast_cost(self, size: int) -> float:
        """Joules to transmit one message of `size` bytes once."""
        return self.table.message_cost(self.medium, "send", size)[0]

    def kcast_recv_cost(self, size: int) -> float:
        """Joules for one listener to receive a `size`-byte transmission."""
        return self.table.message_cost(self.medium, "recv", size)[0]

    def transmission_cost(self, size: int) -> float:
        """One transmission plus its k listeners, in joules."""
        return self.kcast_cost(size) + self.k * self.kcast_recv_cost(size)

    def bind(self, **extras: float) -> "ParamVector":
        merged = dict(self.extra)
        merged.update(extras)
        return ParamVector(
            n=self.n, f=self.f, m=self.m, k=self.k, S=self.S, R=self.R,
            sigma_s=self.sigma_s, sigma_v=self.sigma_v,
            mu_s=self.mu_s, mu_v=self.mu_v,
            medium=self.medium, scheme=self.scheme, table=self.table,
            extra=merged,
        )

    def bindings(self) -> dict[str, float]:
        out = {
            "n": float(self.n), "f": float(self.f), "m": float(self.m),
            "k": float(self.k), "S": self.S, "R": self.R,
            "sigma_s": self.sigma_s, "sigma_v": self.sigma_v,
            "mu_s": self.mu_s, "mu_v": self.mu_v,
        }
        out.update(self.extra)
        return out


def build_vector(
    n: int,
    *,
    f: int | None = None,
    m: int = 256,
    k: int | None = None,
    medium: str = "ble_reliability",
    scheme: str = "rsa1024",
    table: CostTable | None = None,
) -> ParamVector:
    """Assemble a parameter vector from the bundled tables.

    Per-byte prices use the 256-byte table column as the reference point
    (the reliability-priced medium is exactly linear in fragments, so any
    fragment multiple gives the same rate).
    """
    table = table or CostTable.load_default()
    if f is None:
        f = (n - 1) // 2
    if k is None:
        k = f + 1 if f >= 0 else 1
    ref = 256
    send_ref, _ = table.message_cost(medium, "send", ref)
    recv_ref, _ = table.message_cost(medium, "recv", ref)
    return ParamVector(
        n=n, f=f, m=m, k=max(k, 1),
        S=send_ref / ref, R=recv_ref / ref,
        sigma_s=table.sign_cost(scheme), sigma_v=table.verify_cost(scheme),
        mu_s=table.sign_cost("hmac_sha256"), mu_v=table.verify_cost("hmac_sha256"),
        medium=medium, scheme=scheme, table=table,
    )


# ---------------------------------------------------------- wire profiles


def message_sizes(m: int, f: int, sig_len: int) -> dict[str, int]:
    """Wire sizes in bytes of every priced message kind.

    The replicated-log protocol carries two signatures per message; the
    single-signature comparison protocol carries one (its header drops the
    second length-prefixed signature slot). The trusted-relay baseline
    exchanges bare payloads with a short header.
    """
    q = f + 1
    blk = block_wire_size(1, m)
    empty_blk = block_wire_size(0, 0)
    cert = qc_wire_size(32, q, sig_len)

    def single_sig(data: int) -> int:
        return 9 + data + 2 + sig_len

    return {
        "propose": msg_wire_size(blk, sig_len),
        "blame": msg_wire_size(0, sig_len),
        "blame_qc": msg_wire_size(qc_wire_size(0, q, sig_len), sig_len),
        "commit_update": msg_wire_size(blk, sig_len),
        "certify": msg_wire_size(32, sig_len),
        "commit_qc": msg_wire_size(blk + cert, sig_len),
        "status": msg_wire_size(blk + cert, sig_len),
        "new_view": msg_wire_size(empty_blk + q * (blk + cert), sig_len),
        "vote": msg_wire_size(32, sig_len),
        "propose_r2": msg_wire_size(empty_blk + qc_wire_size(32, q, sig_len), sig_len),
        "hs_propose": single_sig(blk + cert),
        "hs_vote": single_sig(32),
        "hs_quit": single_sig(32),
        "hs_status": single_sig(blk + cert),
        "hs_new_view": single_sig(blk + cert),
        "hs_cert_msg": single_sig(cert),
        "relay_report": 11 + m,
    }


# ------------------------------------------------------------- cost model


@dataclass
class ProtocolCostModel:
    """System-wide cost triple for one protocol.

    `psi_block` is the steady-state cost per committed block, `psi_extra`
    the additional cost of living through one view change, and `psi_wasted`
    the full cost of a wasted view (block plus extra). The identity
    psi_wasted - psi_block == psi_extra holds by construction.
    """

    name: str
    psi_block: CostExpr
    psi_wasted: CostExpr
    psi_extra: CostExpr
    notes: str = ""

    def block_cost(self, x: ParamVector) -> float:
        return eval_expr(self.psi_block, x)

    def wasted_view_cost(self, x: ParamVector) -> float:
        return eval_expr(self.psi_wasted, x)

    def viewchange_extra_cost(self, x: ParamVector) -> float:
        return eval_expr(self.psi_extra, x)


def constant_model(name: str, psi_block: float, psi_extra: float) -> ProtocolCostModel:
    """Model with fixed scalar costs; handy for worked examples and tests."""
    b = CostExpr.const(psi_block)
    v = CostExpr.const(psi_extra)
    return ProtocolCostModel(name, b, b + v, v)


# A view-change phase: how many distinct messages exist, what kind they
# are, whether each is flooded (every node retransmits once) or sent in a
# single transmission, and how many certificate member signatures each
# carries on top of its own envelope signatures.
_N = CostExpr.var("n")
_F = CostExpr.var("f")
_ONE = CostExpr.const(1.0)


def _phase_costs(
    components: list[tuple[CostExpr, str, bool, CostExpr]],
    sigs_per_msg: int,
) -> tuple[CostExpr, CostExpr, CostExpr]:
    """Communication, signing, and verification cost of a message schedule.

    Each component is (distinct message count, kind, flooded, certificate
    member signatures carried). Authoring one message costs `sigs_per_msg`
    signatures; every node that handles a distinct message verifies its
    envelope signatures plus any carried certificate members. Flooded
    messages reach all n-1 other nodes; single transmissions are verified
    by their one addressee.
    """
    comm = CostExpr()
    signs = CostExpr()
    verifies = CostExpr()
    for count, kind, flooded, members in components:
        u = CostExpr.var("u_" + kind)
        transmissions = (count * _N) if flooded else count
        comm = comm + transmissions * u
        signs = signs + count * CostExpr.const(sigs_per_msg)
        receivers = (_N - _ONE) if flooded else _ONE
        verifies = verifies + count * receivers * (CostExpr.const(sigs_per_msg) + members)
    return comm, signs * CostExpr.var("sigma_s"), verifies * CostExpr.var("sigma_v")


@dataclass
class ModelSuite:
    """Cost models plus the vector with their transmission prices bound."""

    vector: ParamVector
    models: dict[str, ProtocolCostModel]
    sizes: dict[str, int]

    def __getitem__(self, name: str) -> ProtocolCostModel:
        return self.models[name]

    def names(self) -> list[str]:
        return sorted(self.models)


def analytic_models(
    x: ParamVector,
    *,
    relay_viewchange: str = "deduplicated",
    baseline_medium: str | None = None,
) -> ModelSuite:
    """Closed-form cost models for the three compared designs.

    `eesmr`: relay-everything replicated log. Steady state commits one
    block per proposal flood; a view change runs blame, blame-certificate,
    commit-update, certify, and commit-certificate floods plus the status /
    new-view / vote / round-two handshake. `relay_viewchange` picks either
    the `deduplicated` schedule (identical commit updates collapse, one
    certify flood per node) or `per_sender` (every node certifies every
    update separately and re-floods updates, an n-fold heavier schedule).

    `sync_hotstuff`: single-signature leader-vote protocol. Steady state
    floods the proposal (certificate embedded) and sends one direct vote
    per replica; its timeout view change broadcasts quit and status
    messages from every node, floods the new-view proposal, broadcasts
    votes, and floods the resulting certificate.

    `trusted_relay`: every node sends its payload to a trusted coordinator
    and receives the ordered result back, priced per byte on
    `baseline_medium` (default: the vector's medium). The coordinator's own
    energy is out of scope, so only the node-side send and receive appear.
    """
    sizes = message_sizes(x.m, x.f, x.table.sig_bytes(x.scheme))
    bound = x.bind(**{"u_" + kind: x.transmission_cost(size) for kind, size in sizes.items()})

    sig_s, sig_v = CostExpr.var("sigma_s"), CostExpr.var("sigma_v")
    q = _F + _ONE

    # Relay-everything steady state: one proposal flood per block. The
    # envelope's view signature is computed once per view and amortizes to
    # nothing over a steady view, so one data signature is charged to the
    # leader and one data verification to every other node.
    ee_block = (
        _N * CostExpr.var("u_propose")
        + sig_s
        + (_N - _ONE) * sig_v
    )
    dedup = relay_viewchange == "deduplicated"
    ee_vc_components = [
        (_N, "blame", True, CostExpr.const(0)),
        (_N, "blame_qc", True, q),
        ((_N if dedup else CostExpr.const(2) * _N), "commit_update", True, CostExpr.const(0)),
        ((_N if dedup else _N * _N), "certify", True, CostExpr.const(0)),
        (_N, "commit_qc", True, q),
        (_N - _ONE, "status", False, q),
        (_ONE, "new_view", True, q * q),
        (_N - _ONE, "vote", False, CostExpr.const(0)),
        (_ONE, "propose_r2", True, q),
    ]
    comm, signs, verifies = _phase_costs(ee_vc_components, sigs_per_msg=2)
    ee_extra = comm + signs + verifies
    eesmr = ProtocolCostModel(
        "eesmr", ee_block, ee_block + ee_extra, ee_extra,
        notes="view change schedule: " + relay_viewchange,
    )

    # Single-signature leader protocol steady state: proposal flood with
    # embedded quorum certificate, one direct vote per replica back to the
    # leader.
    hs_steady = [
        (_ONE, "hs_propose", True, q),
        (_N - _ONE, "hs_vote", False, CostExpr.const(0)),
    ]
    comm, signs, verifies = _phase_costs(hs_steady, sigs_per_msg=1)
    hs_block = comm + signs + verifies
    hs_vc_components = [
        (_N, "hs_quit", True, CostExpr.const(0)),
        (_N, "hs_status", True, q),
        (_ONE, "hs_new_view", True, q),
        (_N, "hs_vote", True, CostExpr.const(0)),
        (_ONE, "hs_cert_msg", True, q),
    ]
    comm, signs, verifies = _phase_costs(hs_vc_components, sigs_per_msg=1)
    hs_extra = comm + signs + verifies
    synchs = ProtocolCostModel("sync_hotstuff", hs_block, hs_block + hs_extra, hs_extra)

    # Trusted-relay baseline: per block each node uploads its payload and
    # downloads the ordered result over the baseline medium. No signatures
    # cross the wire and the coordinator is not priced.
    base_medium = baseline_medium or x.medium
    report = sizes["relay_report"]
    up, _ = x.table.message_cost(base_medium, "send", report)
    down, _ = x.table.message_cost(base_medium, "recv", report)
    bound = bound.bind(u_relay_up=up, u_relay_down=down)
    base_block = _N * (CostExpr.var("u_relay_up") + CostExpr.var("u_relay_down"))
    baseline = ProtocolCostModel(
        "trusted_relay", base_block, base_block, CostExpr(),
        notes="coordinator energy excluded; medium " + base_medium,
    )

    return ModelSuite(
        vector=bound,
        models={"eesmr": eesmr, "sync_hotstuff": synchs, "trusted_relay": baseline},
        sizes=sizes,
    )


def steady_node_cost(suite: ModelSuite, role: str) -> float:
    """Per-node, per-block steady cost: own transmission, k receptions,
    and the role's signature work (`leader` signs the block, `replica`
    verifies it; the per-view envelope signature amortizes away)."""
    x = suite.vector
    comm = x.transmission_cost(suite.sizes["propose"])
    if role == "leader":
        return comm + x.sigma_s
    return comm + x.sigma_v


# ------------------------------------------------------------- operators


def nu_f_bound(model: ProtocolCostModel, rival: ProtocolCostModel, x: ParamVector) -> float | None:
    """View-change frequency below which `model` beats `rival`.

    Totals over a schedule with N blocks and V view changes are
    N*psi_block + V*psi_extra; the totals cross at V/N equal to the
    returned value. Returns None when both protocols waste the same energy
    per view change (the totals never cross: whichever has the cheaper
    block wins at every frequency).
    """
    b, b_star = model.block_cost(x), rival.block_cost(x)
    v, v_star = model.viewchange_extra_cost(x), rival.viewchange_extra_cost(x)
    if v == v_star:
        return None
    return (b_star - b) / (v - v_star)


def f_e_bound(model: ProtocolCostModel, baseline, x: ParamVector) -> int | float:
    """Largest number of wasted views per block that still beats a baseline.

    With psi_block + j * psi_wasted charged against one baseline block,
    the bound is floor((baseline - psi_block) / psi_wasted). A baseline
    cheaper than the protocol's own block cost returns -1 (never
    favorable); a protocol with zero wasted-view cost and a favorable
    block cost has no finite bound and returns math.inf.
    """
    if isinstance(baseline, ProtocolCostModel):
        baseline = baseline.block_cost(x)
    b = model.block_cost(x)
    w = model.wasted_view_cost(x)
    if baseline < b:
        return -1
    if w <= 0:
        return math.inf
    return math.floor((baseline - b) / w)


def schedule_cost(model: ProtocolCostModel, x: ParamVector, blocks: int, view_changes: int) -> float:
    """Total energy of a schedule: `blocks` commits plus `view_changes`
    wasted views."""
    return blocks * model.block_cost(x) + view_changes * model.viewchange_extra_cost(x)


def crossover_fraction(
    model: ProtocolCostModel,
    rival: ProtocolCostModel,
    x: ParamVector,
    blocks: int = 200,
) -> float | None:
    """Empirical crossover frequency found by walking view-change counts.

    Returns the smallest V/blocks at which `model` stops being at least as
    cheap as `rival`, or None if the ordering never flips within the
    schedule. Brackets the analytical `nu_f_bound` to within 1/blocks.
    """
    first_cheaper = schedule_cost(model, x, blocks, 0) <= schedule_cost(rival, x, blocks, 0)
    for v in range(blocks + 1):
        cheaper = schedule_cost(model, x, blocks, v) <= schedule_cost(rival, x, blocks, v)
        if cheaper != first_cheaper:
            return v / blocks
    return None


def feasible_region(
    name_a: str,
    name_b: str,
    ns: list[int],
    ms: list[int],
    *,
    medium_a: str = "ble_reliability",
    medium_b: str | None = None,
    scheme: str = "rsa1024",
    k: int | None = None,
    table: CostTable | None = None,
) -> dict:
    """Steady-state cost difference of two designs over an (n, m) grid.

    Entry [i][j] holds psi_block(protocol a on medium_a) minus
    psi_block(protocol b on medium_b) at population ns[i] and payload
    ms[j]; negative means `a` is the cheaper design there. `k` fixes the
    fan-out across the grid (default: quorum size at each n).
    """
    table = table or CostTable.load_default()
    delta = []
    favorable = []
    for n in ns:
        row = []
        fav_row = []
        for m in ms:
            xa = build_vector(n, m=m, k=k, medium=medium_a, scheme=scheme, table=table)
            suite_a = analytic_models(xa)
            cost_a = suite_a[name_a].block_cost(suite_a.vector)
            medium_bb = medium_b or medium_a
            xb = build_vector(n, m=m, k=k, medium=medium_bb, scheme=scheme, table=table)
            suite_b = analytic_models(xb, baseline_medium=medium_bb)
            cost_b = suite_b[name_b].block_cost(suite_b.vector)
            row.append(cost_a - cost_b)
            fav_row.append(cost_a < cost_b)
        delta.append(row)
        favorable.append(fav_row)
    return {"ns": list(ns), "ms": list(ms), "delta": delta, "favorable": favorable,
            "a": name_a, "b": name_b}


# --------------------------------------------------------- ledger pricing


def ledger_to_energy(
    ledger,
    sign_counts: list[int],
    verify_counts: list[int],
    *,
    medium: str,
    scheme: str,
    table: CostTable | None = None,
    blocks: int | None = None,
) -> dict:
    """Price a recorded traffic ledger and signature counters, in joules.

    Every transmitted (size, count) pair is priced on `medium`; receptions
    use the medium's receive price. Signature work uses `scheme`. Sizes
    outside the measured grid are interpolated linearly and reported under
    "extrapolated_sizes". With `blocks`, per-block figures are included.
    """
    table = table or CostTable.load_default()
    per_node = []
    extrapolated: set[int] = set()
    for node in range(len(sign_counts)):
        tx = rx = 0.0
        for size, count in ledger.tx_sizes[node].items():
            cost, extra = table.message_cost(medium, "send", size)
            tx += cost * count
            if extra:
                extrapolated.add(size)
        for size, count in ledger.rx_sizes[node].items():
            cost, extra = table.message_cost(medium, "recv", size)
            rx += cost * count
            if extra:
                extrapolated.add(size)
        sign = sign_counts[node] * table.sign_cost(scheme)
        verify = verify_counts[node] * table.verify_cost(scheme)
        per_node.append({
            "tx_j": tx, "rx_j": rx, "sign_j": sign, "verify_j": verify,
            "total_j": tx + rx + sign + verify,
        })
    total = sum(entry["total_j"] for entry in per_node)
    out = {
        "medium": medium,
        "scheme": scheme,
        "per_node": per_node,
        "total_j": total,
        "radio_j": sum(e["tx_j"] + e["rx_j"] for e in per_node),
        "crypto_j": sum(e["sign_j"] + e["verify_j"] for e in per_node),
        "extrapolated_sizes": sorted(extrapolated),
    }
    if blocks:
        out["blocks"] = blocks
        out["per_block_j"] = total / blocks
    return out


def simulation_energy(sim, blocks: int | None = None) -> dict:
    """Price a finished simulation run with its own scenario settings."""
    scn = sim.scenario
    if blocks is None:
        blocks = sim.monitor.committed_height() or None
    return ledger_to_energy(
        sim.network.ledger,
        sim.auth.sign_count,
        sim.auth.verify_count,
        medium=scn.medium,
        scheme=scn.signature_scheme,
        blocks=blocks,
    )
