import numpy as np
import pytest

from conftest import GOOD_HYBRID_SEED
from kyfrog import hybrid
from kyfrog.hybrid import (AuthenticationError, HybridContainer,
                           decode_container, decrypt_file_bytes,
                           encode_container, encrypt_file_bytes)
from kyfrog.params import REFERENCE
from kyfrog.rng import Drbg


def _roundtrip(keypair, data):
    pk, sk = keypair
    blob = encrypt_file_bytes(pk, data, Drbg(GOOD_HYBRID_SEED), REFERENCE)
    return blob, decrypt_file_bytes(sk, pk, blob, REFERENCE)


@pytest.mark.parametrize("size", [0, 1, 4096])
def test_roundtrip_sizes(keypair, size):
    data = bytes((j * 7 + 1) % 256 for j in range(size))
    blob, out = _roundtrip(keypair, data)
    assert out == data
    assert len(blob) == 9 + 524813 + 12 + 16 + size


def test_empty_plaintext_has_tag(keypair):
    blob, _ = _roundtrip(keypair, b"")
    container = decode_container(blob)
    assert container.payload == b""
    assert len(container.tag) == 16


def test_container_codec_roundtrip():
    container = HybridContainer(kem_ct=b"\x01" * 100, nonce=b"\x02" * 12,
                                tag=b"\x03" * 16, payload=b"\x04" * 33)
    assert decode_container(encode_container(container)) == container


def test_truncated_container_rejected():
    container = HybridContainer(kem_ct=b"\x01" * 100, nonce=b"\x02" * 12,
                                tag=b"\x03" * 16, payload=b"")
    data = encode_container(container)
    for cut in (0, 4, 8, len(data) - 1):
        with pytest.raises(AuthenticationError):
            decode_container(data[:cut])


CORRUPTION_OFFSETS = {
    "header": 6,                      # inside kem_ct_len
    "kem_ct": 9 + 2000,               # inside the KEM ciphertext
    "nonce": 9 + 524813 + 3,
    "tag": 9 + 524813 + 12 + 5,
    "payload": 9 + 524813 + 12 + 16,  # first payload byte
}


@pytest.mark.parametrize("region,offset", sorted(CORRUPTION_OFFSETS.items()))
def test_every_corruption_region_gives_single_signal(keypair, region, offset):
    pk, sk = keypair
    data = b"attack at dawn" * 10
    blob = bytearray(encrypt_file_bytes(pk, data, Drbg(GOOD_HYBRID_SEED), REFERENCE))
    blob[offset] ^= 0x01
    with pytest.raises(AuthenticationError) as exc:
        decrypt_file_bytes(sk, pk, bytes(blob), REFERENCE)
    assert str(exc.value) == "authentication failure"


def test_kem_ct_len_is_bound_as_associated_data(keypair):
    # shrinking the declared kem_ct length reshapes the parse; the signal must
    # stay the same even though the payload bytes are intact
    pk, sk = keypair
    blob = bytearray(encrypt_file_bytes(pk, b"x" * 64, Drbg(GOOD_HYBRID_SEED), REFERENCE))
    blob[5:9] = (524813 - 2).to_bytes(4, "little")
    with pytest.raises(AuthenticationError):
        decrypt_file_bytes(sk, pk, bytes(blob), REFERENCE)


def test_nonce_draws_do_not_repeat():
    # nonces come from fresh DRBG draws; statistically no repeats
    drbg = Drbg()
    draws = {drbg.generate(12) for _ in range(10**5)}
    assert len(draws) == 10**5


def test_wrong_recipient_fails(keypair):
    from kyfrog import pke

    pk, _sk = keypair
    _pk2, sk2 = pke.keygen(Drbg(b"\x55" * 48), REFERENCE)
    blob = encrypt_file_bytes(pk, b"secret", Drbg(GOOD_HYBRID_SEED), REFERENCE)
    with pytest.raises(AuthenticationError):
        decrypt_file_bytes(sk2, pk, blob, REFERENCE)
