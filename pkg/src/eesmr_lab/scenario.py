"""Scenario configuration: a versioned, fail-closed description of one run.

Unknown fields are rejected rather than ignored so typos surface as errors
instead of silently running a different experiment than intended.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

_TOP_FIELDS = {
    "schema", "name", "n", "f", "delta", "topology", "delivery", "adversary",
    "target_blocks", "payload_bytes", "signature_scheme", "medium",
    "allow_invalid_topology", "trace",
}
_TOPOLOGY_FIELDS = {"kind", "k", "edges"}
_DELIVERY_FIELDS = {"policy"}
_ADVERSARY_FIELDS = {"profile", "corrupt", "params"}

_POLICIES = ("eager", "max_delay", "seeded_random")
_TOPOLOGY_KINDS = ("ring", "complete", "random", "explicit")
_SCHEMES = ("rsa1024", "rsa1260", "rsa2048", "ecdsa_bp160r1", "ecdsa_bp256r1",
            "ecdsa_secp192r1", "ecdsa_secp192k1", "ecdsa_secp224r1",
            "ecdsa_secp256r1", "ecdsa_secp256k1", "hmac_sha256")
_MEDIA = ("ble_reliability", "ble_table", "wifi", "lte")


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    extra = set(section) - allowed
    if extra:
        raise ValueError(f"unknown field(s) in {where}: {sorted(extra)}")


@dataclass
class Scenario:
    name: str = "unnamed"
    n: int = 4
    f: int = -1  # -1 means the floor((n-1)/2) default
    delta: int = 1000
    topology_kind: str = "ring"
    topology_k: int = 1
    topology_edges: tuple = ()
    delivery_policy: str = "max_delay"
    adversary_profile: str = "none"
    corrupt: tuple = ()
    adversary_params: dict = field(default_factory=dict)
    target_blocks: int = 50
    payload_bytes: int = 256
    signature_scheme: str = "rsa1024"
    medium: str = "ble_reliability"
    allow_invalid_topology: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.n < 2 or self.n > 64:
            raise ValueError(f"n out of range: {self.n}")
        if self.f == -1:
            self.f = (self.n - 1) // 2
        if not (0 <= self.f < self.n):
            raise ValueError(f"f out of range: {self.f}")
        if self.delta < 1:
            raise ValueError("delta must be a positive tick count")
        if self.delivery_policy not in _POLICIES:
            raise ValueError(f"unknown delivery policy: {self.delivery_policy}")
        if self.topology_kind not in _TOPOLOGY_KINDS:
            raise ValueError(f"unknown topology kind: {self.topology_kind}")
        if self.signature_scheme not in _SCHEMES:
            raise ValueError(f"unknown signature scheme: {self.signature_scheme}")
        if self.medium not in _MEDIA:
            raise ValueError(f"unknown medium: {self.medium}")
        if self.target_blocks < 1:
            raise ValueError("target_blocks must be at least 1")
        if self.payload_bytes < 4 or self.payload_bytes > 65535:
            raise ValueError("payload_bytes must be in [4, 65535]")
        self.corrupt = tuple(sorted(set(self.corrupt)))
        for c in self.corrupt:
            if not (0 <= c < self.n):
                raise ValueError(f"corrupt id out of range: {c}")

    @classmethod
    def from_dict(cls, raw: dict) -> "Scenario":
        if not isinstance(raw, dict):
            raise ValueError("scenario must be a JSON object")
        _reject_unknown(raw, _TOP_FIELDS, "scenario")
        if raw.get("schema") != SCHEMA_VERSION:
            raise ValueError(
                f"scenario schema must be {SCHEMA_VERSION}, got {raw.get('schema')!r}")
        topo = raw.get("topology", {})
        _reject_unknown(topo, _TOPOLOGY_FIELDS, "topology")
        delivery = raw.get("delivery", {})
        _reject_unknown(delivery, _DELIVERY_FIELDS, "delivery")
        adv = raw.get("adversary", {})
        _reject_unknown(adv, _ADVERSARY_FIELDS, "adversary")
        edges = tuple(
            (int(s), tuple(int(r) for r in rs)) for s, rs in topo.get("edges", ())
        )
        return cls(
            name=raw.get("name", "unnamed"),
            n=int(raw.get("n", 4)),
            f=int(raw.get("f", -1)),
            delta=int(raw.get("delta", 1000)),
            topology_kind=topo.get("kind", "ring"),
            topology_k=int(topo.get("k", 1)),
            topology_edges=edges,
            delivery_policy=delivery.get("policy", "max_delay"),
            adversary_profile=adv.get("profile", "none"),
            corrupt=tuple(adv.get("corrupt", ())),
            adversary_params=dict(adv.get("params", {})),
            target_blocks=int(raw.get("target_blocks", 50)),
            payload_bytes=int(raw.get("payload_bytes", 256)),
            signature_scheme=raw.get("signature_scheme", "rsa1024"),
            medium=raw.get("medium", "ble_reliability"),
            allow_invalid_topology=bool(raw.get("allow_invalid_topology", False)),
            trace=bool(raw.get("trace", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "n": self.n,
            "f": self.f,
            "delta": self.delta,
            "topology": {
                "kind": self.topology_kind,
                "k": self.topology_k,
                "edges": [[s, list(rs)] for s, rs in self.topology_edges],
            },
            "delivery": {"policy": self.delivery_policy},
            "adversary": {
                "profile": self.adversary_profile,
                "corrupt": list(self.corrupt),
                "params": dict(self.adversary_params),
            },
            "target_blocks": self.target_blocks,
            "payload_bytes": self.payload_bytes,
            "signature_scheme": self.signature_scheme,
            "medium": self.medium,
            "allow_invalid_topology": self.allow_invalid_topology,
            "trace": self.trace,
        }

    def apply_override(self, dotted: str, value: str) -> None:
        """Apply a CLI-style `a.b=value` override onto this scenario."""
        d = self.to_dict()
        parts = dotted.split(".")
        cursor = d
        for p in parts[:-1]:
            if p not in cursor or not isinstance(cursor[p], dict):
                raise ValueError(f"unknown override path: {dotted}")
            cursor = cursor[p]
        leaf = parts[-1]
        if leaf not in cursor:
            raise ValueError(f"unknown override path: {dotted}")
        cursor[leaf] = _coerce(value, cursor[leaf])
        fresh = Scenario.from_dict(d)
        self.__dict__.update(fresh.__dict__)


def _coerce(value: str, like):
    if isinstance(like, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {value!r}")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, (list, dict)):
        return json.loads(value)
    return value
