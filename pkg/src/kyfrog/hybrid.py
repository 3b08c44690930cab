"""Hybrid file encryption: a KEM-protected AES-256-GCM payload in one container.

Container layout: magic "KYFH", version 0x01, kem_ct_len as LE32, the KEM
ciphertext, a 12-byte nonce, the 16-byte GCM tag, then the payload. The
header through the KEM ciphertext is bound as GCM associated data, and the
AES key is a subkey derived from the encapsulated key under the "KyFrogFile"
label, so the shared key never keys anything directly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from . import kem
from .params import ParameterSet, derive_sizes
from .pke import PublicKey, SecretKey
from .rng import xof_stream

__all__ = [
    "HybridContainer",
    "AuthenticationError",
    "HYBRID_MAGIC",
    "HYBRID_VERSION",
    "NONCE_BYTES",
    "TAG_BYTES",
    "encode_container",
    "decode_container",
    "encrypt_file_bytes",
    "decrypt_file_bytes",
]

HYBRID_MAGIC = b"KYFH"
HYBRID_VERSION = 0x01
NONCE_BYTES = 12
TAG_BYTES = 16
_PREFIX = struct.Struct("<4sBI")


class AuthenticationError(Exception):
    """Single failure signal for any malformed or unauthentic container."""

    def __init__(self):
        super().__init__("authentication failure")


@dataclass(frozen=True)
class HybridContainer:
    kem_ct: bytes
    nonce: bytes
    tag: bytes
    payload: bytes


def encode_container(container: HybridContainer) -> bytes:
    prefix = _PREFIX.pack(HYBRID_MAGIC, HYBRID_VERSION, len(container.kem_ct))
    return prefix + container.kem_ct + container.nonce + container.tag + container.payload


def decode_container(data: bytes) -> HybridContainer:
    """Structural parse; raises AuthenticationError on any malformation."""
    if len(data) < _PREFIX.size:
        raise AuthenticationError()
    magic, version, kem_ct_len = _PREFIX.unpack_from(data)
    if magic != HYBRID_MAGIC or version != HYBRID_VERSION:
        raise AuthenticationError()
    body = data[_PREFIX.size:]
    if len(body) < kem_ct_len + NONCE_BYTES + TAG_BYTES:
        raise AuthenticationError()
    kem_ct = body[:kem_ct_len]
    nonce = body[kem_ct_len : kem_ct_len + NONCE_BYTES]
    tag = body[kem_ct_len + NONCE_BYTES : kem_ct_len + NONCE_BYTES + TAG_BYTES]
    payload = body[kem_ct_len + NONCE_BYTES + TAG_BYTES :]
    return HybridContainer(kem_ct=kem_ct, nonce=nonce, tag=tag, payload=payload)


def _file_key(shared_key: bytes) -> bytes:
    return xof_stream(b"KyFrogFile", shared_key, 32)


def _associated_data(kem_ct: bytes) -> bytes:
    return _PREFIX.pack(HYBRID_MAGIC, HYBRID_VERSION, len(kem_ct)) + kem_ct


def encrypt_file_bytes(pk: PublicKey, plaintext: bytes, drbg,
                       p: ParameterSet) -> bytes:
    """Encapsulate a fresh key to pk and seal plaintext under the derived subkey."""
    kem_ct, shared = kem.encap(pk, drbg, p)
    nonce = drbg.generate(NONCE_BYTES)
    sealed = AESGCM(_file_key(shared)).encrypt(nonce, plaintext, _associated_data(kem_ct))
    payload, tag = sealed[:-TAG_BYTES], sealed[-TAG_BYTES:]
    return encode_container(HybridContainer(kem_ct=kem_ct, nonce=nonce, tag=tag,
                                            payload=payload))


def decrypt_file_bytes(sk: SecretKey, pk: PublicKey, data: bytes,
                       p: ParameterSet) -> bytes:
    """Open a container; any tampering anywhere raises AuthenticationError.

    KEM-level tampering is absorbed too: implicit rejection yields a wrong
    subkey, which fails the GCM tag check like any other corruption.
    """
    container = decode_container(data)
    expected = derive_sizes(p).ct_bytes
    if len(container.kem_ct) != expected:
        raise AuthenticationError()
    shared = kem.decap(sk, pk, container.kem_ct, p)
    try:
        return AESGCM(_file_key(shared)).decrypt(
            container.nonce,
            container.payload + container.tag,
            _associated_data(container.kem_ct),
        )
    except InvalidTag:
        raise AuthenticationError() from None
