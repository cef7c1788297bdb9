"""Wire encoding layout and the size helpers the cost models rely on."""

import pytest

from eesmr_lab.codec import (
    DIGEST_LEN,
    ZERO_DIGEST,
    block_wire_size,
    data_sign_payload,
    encode_block,
    encode_msg_header,
    msg_wire_size,
    put_bytes,
    put_u8,
    put_u16,
    put_u32,
    qc_wire_size,
    sha256,
    view_sign_payload,
)


def test_integer_encodings_are_big_endian():
    assert put_u8(7) == b"\x07"
    assert put_u16(0x0102) == b"\x01\x02"
    assert put_u32(0x01020304) == b"\x01\x02\x03\x04"
    assert put_bytes(b"ab") == b"\x00\x02ab"


def test_block_encoding_layout():
    body = encode_block(3, 4, 9, ZERO_DIGEST, (b"cmd",))
    # magic, view, round, height, parent, count, one length-prefixed command
    assert body[:3] == b"BLK"
    assert body[3:7] == put_u32(3)
    assert body[7:11] == put_u32(4)
    assert body[11:15] == put_u32(9)
    assert body[15:47] == ZERO_DIGEST
    assert body[47:49] == put_u16(1)
    assert body[49:] == b"\x00\x03cmd"


def test_block_size_helper_matches_encoder():
    for n_cmds, width in [(0, 0), (1, 16), (1, 256), (3, 64)]:
        cmds = tuple(bytes([i]) * width for i in range(n_cmds))
        assert len(encode_block(1, 3, 1, ZERO_DIGEST, cmds)) == block_wire_size(n_cmds, width)


def test_message_size_helper_counts_header_and_two_signatures():
    # 11-byte header, payload, and two length-prefixed signatures
    assert msg_wire_size(0, 128) == 11 + 0 + 2 * (2 + 128)
    assert msg_wire_size(307, 128) == 578
    assert len(encode_msg_header(1, 1, 3, 0)) == 11


def test_qc_size_helper():
    # tag, length, payload, member count, members with id + signature each
    assert qc_wire_size(32, 7, 128) == 9 + 32 + 2 + 7 * (2 + 128)


def test_sign_payloads_are_domain_separated():
    assert view_sign_payload(1, 5)[:2] == b"VS"
    assert data_sign_payload(b"x", 5)[:2] == b"DS"
    assert view_sign_payload(1, 5) != view_sign_payload(2, 5)
    assert view_sign_payload(1, 5) != view_sign_payload(1, 6)
    # the data signature covers a digest of the payload, so size is fixed
    assert len(data_sign_payload(b"y" * 10_000, 1)) == len(data_sign_payload(b"", 1))


def test_sha256_wrapper():
    assert len(sha256(b"abc")) == DIGEST_LEN
    assert sha256(b"abc") != sha256(b"abd")


def test_block_rejects_bad_parent():
    with pytest.raises(ValueError):
        encode_block(1, 1, 1, b"short", ())
