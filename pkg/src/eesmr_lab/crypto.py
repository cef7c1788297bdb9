"""Deterministic simulation signer.

Signatures are HMAC-SHA256 under per-node keys derived from the run seed,
padded to the priced scheme's signature length so that wire sizes (and
therefore transmission energy) match the scheme being modeled. Signing and
verification counts are tracked per node for the cost ledger.
"""

from __future__ import annotations

import hashlib
import hmac

from .codec import put_u16, put_u32

# Wire length of one signature under each priced scheme.
SCHEME_SIG_LEN = {
    "rsa1024": 128,
    "rsa1260": 158,
    "rsa2048": 256,
    "ecdsa_bp160r1": 40,
    "ecdsa_bp256r1": 64,
    "ecdsa_secp192r1": 48,
    "ecdsa_secp192k1": 48,
    "ecdsa_secp224r1": 56,
    "ecdsa_secp256r1": 64,
    "ecdsa_secp256k1": 64,
    "hmac_sha256": 32,
}


class SigningAuthority:
    """Issues and checks padded HMAC signatures for every node in one run."""

    def __init__(self, seed: int, n: int, sig_len: int = 128):
        if sig_len < 32:
            raise ValueError("sig_len must hold an HMAC-SHA256 tag (>= 32)")
        self.sig_len = sig_len
        self._keys = [
            hashlib.sha256(b"node-key" + put_u32(seed & 0xFFFFFFFF) + put_u16(i)).digest()
            for i in range(n)
        ]
        self.sign_count = [0] * n
        self.verify_count = [0] * n

    def raw_sign(self, node: int, payload: bytes) -> bytes:
        """Signature bytes without touching the counters (adversary use)."""
        tag = hmac.new(self._keys[node], payload, hashlib.sha256).digest()
        return tag + b"\x00" * (self.sig_len - len(tag))

    def sign(self, node: int, payload: bytes) -> bytes:
        self.sign_count[node] += 1
        return self.raw_sign(node, payload)

    def verify(self, verifier: int, signer: int, payload: bytes, signature: bytes) -> bool:
        """Check `signer`'s signature, charging the verification to `verifier`."""
        self.verify_count[verifier] += 1
        if len(signature) != self.sig_len:
            return False
        expected = hmac.new(self._keys[signer], payload, hashlib.sha256).digest()
        return hmac.compare_digest(expected, signature[:32])
