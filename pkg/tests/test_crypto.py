"""Deterministic signer: counters, padding, scheme wire lengths."""

import pytest

from eesmr_lab.crypto import SCHEME_SIG_LEN, SigningAuthority


def test_sign_and_verify_roundtrip():
    auth = SigningAuthority(seed=1, n=4, sig_len=128)
    sig = auth.sign(0, b"payload")
    assert len(sig) == 128
    assert auth.verify(2, 0, b"payload", sig)
    assert not auth.verify(2, 0, b"other", sig)
    assert not auth.verify(2, 1, b"payload", sig)  # wrong claimed signer


def test_counters_track_work_per_node():
    auth = SigningAuthority(seed=1, n=3)
    auth.sign(1, b"a")
    auth.sign(1, b"b")
    sig = auth.sign(0, b"c")
    auth.verify(2, 0, b"c", sig)
    auth.verify(2, 0, b"c", sig)
    assert auth.sign_count == [1, 2, 0]
    assert auth.verify_count == [0, 0, 2]


def test_raw_sign_skips_counters():
    auth = SigningAuthority(seed=1, n=2)
    sig = auth.raw_sign(0, b"covert")
    assert auth.sign_count == [0, 0]
    assert auth.verify(1, 0, b"covert", sig)


def test_signatures_are_deterministic_per_seed():
    a = SigningAuthority(seed=9, n=2)
    b = SigningAuthority(seed=9, n=2)
    c = SigningAuthority(seed=10, n=2)
    assert a.raw_sign(0, b"x") == b.raw_sign(0, b"x")
    assert a.raw_sign(0, b"x") != c.raw_sign(0, b"x")
    assert a.raw_sign(0, b"x") != a.raw_sign(1, b"x")


def test_wrong_length_signature_rejected():
    auth = SigningAuthority(seed=1, n=2, sig_len=64)
    sig = auth.sign(0, b"m")
    assert not auth.verify(1, 0, b"m", sig + b"\x00")
    assert not auth.verify(1, 0, b"m", sig[:-1])


def test_scheme_sig_lengths_match_primitive_output_sizes():
    # RSA signatures are modulus-sized; ECDSA raw (r, s) pairs are twice the
    # coordinate width; an HMAC tag is the hash output.
    assert SCHEME_SIG_LEN["rsa1024"] == 128
    assert SCHEME_SIG_LEN["rsa1260"] == 158
    assert SCHEME_SIG_LEN["rsa2048"] == 256
    assert SCHEME_SIG_LEN["ecdsa_bp160r1"] == 40
    assert SCHEME_SIG_LEN["ecdsa_secp192r1"] == 48
    assert SCHEME_SIG_LEN["ecdsa_secp224r1"] == 56
    assert SCHEME_SIG_LEN["ecdsa_secp256k1"] == 64
    assert SCHEME_SIG_LEN["hmac_sha256"] == 32
    assert all(length >= 32 for length in SCHEME_SIG_LEN.values())


def test_sig_len_must_hold_tag():
    with pytest.raises(ValueError):
        SigningAuthority(seed=0, n=2, sig_len=16)
