"""Canonical byte encodings shared by the simulator and the energy models.

Every protocol object has exactly one wire form (big-endian, length-prefixed)
so that digests are stable across runs and message sizes used for energy
pricing match what the simulator actually "transmits".
"""

from __future__ import annotations

import hashlib
import struct

DIGEST_LEN = 32
ZERO_DIGEST = b"\x00" * DIGEST_LEN


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def put_u8(value: int) -> bytes:
    return struct.pack(">B", value)


def put_u16(value: int) -> bytes:
    return struct.pack(">H", value)


def put_u32(value: int) -> bytes:
    return struct.pack(">I", value)


def put_bytes(data: bytes) -> bytes:
    """Length-prefixed byte string (u16 length)."""
    if len(data) > 0xFFFF:
        raise ValueError("byte string too long for u16 length prefix")
    return put_u16(len(data)) + data


def encode_block(view: int, rnd: int, height: int, parent: bytes, commands: tuple[bytes, ...]) -> bytes:
    if len(parent) != DIGEST_LEN:
        raise ValueError("parent digest must be 32 bytes")
    parts = [b"BLK", put_u32(view), put_u32(rnd), put_u32(height), parent, put_u16(len(commands))]
    for cmd in commands:
        parts.append(put_bytes(cmd))
    return b"".join(parts)


def block_wire_size(n_commands: int, command_bytes: int) -> int:
    """Size of an encoded block without encoding it (used by the cost models)."""
    return 3 + 4 + 4 + 4 + DIGEST_LEN + 2 + n_commands * (2 + command_bytes)


def encode_msg_header(msg_type: int, view: int, rnd: int, sender: int) -> bytes:
    return put_u8(msg_type) + put_u32(view) + put_u32(rnd) + put_u16(sender)


def view_sign_payload(msg_type: int, view: int) -> bytes:
    """Bytes covered by the per-view signature: message type and view only."""
    return b"VS" + put_u8(msg_type) + put_u32(view)


def data_sign_payload(data: bytes, view: int) -> bytes:
    """Bytes covered by the per-message signature: payload digest and view."""
    return b"DS" + sha256(data) + put_u32(view)


def msg_wire_size(data_bytes: int, sig_len: int) -> int:
    """Header + payload + two length-prefixed signatures."""
    return (1 + 4 + 4 + 2) + data_bytes + 2 * (2 + sig_len)


def qc_wire_size(data_bytes: int, members: int, sig_len: int) -> int:
    """Certificate: header fields + the certified payload + member signatures."""
    return 1 + 4 + 4 + data_bytes + 2 + members * (2 + sig_len)
