"""FO-style KEM: encapsulation, decapsulation with re-encryption and implicit
rejection, and the bit-exact ciphertext framing.

The wire format is: magic "KYFG", version 0x01, n as LE32, bit count (256) as
LE32, then 256 bit-ciphertexts of n+1 little-endian 16-bit words each (u then
v). Total length is 13 + 256*(2n + 2) bytes.
"""

from __future__ import annotations

import hmac
import struct
from dataclasses import dataclass

import numpy as np

from .params import NBITS, ParameterSet, derive_sizes, validate_kem_parameters
from .pke import PublicKey, SecretKey, decrypt_block, encrypt_block, matrix_for, \
    public_key_to_bytes, sampler_for
from .rng import xof_stream

__all__ = [
    "KemCiphertext",
    "MalformedCiphertext",
    "CT_MAGIC",
    "CT_VERSION",
    "SHARED_KEY_BYTES",
    "encap",
    "decap",
    "encode_ct",
    "decode_ct",
    "constant_time_equal",
]

CT_MAGIC = b"KYFG"
CT_VERSION = 0x01
SHARED_KEY_BYTES = 32
_HEADER = struct.Struct("<4sBII")


class MalformedCiphertext(ValueError):
    """Structural problem in a serialized KEM ciphertext (reason in args)."""


@dataclass(frozen=True)
class KemCiphertext:
    n: int
    u: np.ndarray      # (256, n) uint16
    v: np.ndarray      # (256,) uint16

    def __eq__(self, other):
        return (isinstance(other, KemCiphertext) and self.n == other.n
                and np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v))


def encode_ct(ct: KemCiphertext) -> bytes:
    header = _HEADER.pack(CT_MAGIC, CT_VERSION, ct.n, NBITS)
    body = np.empty((NBITS, ct.n + 1), dtype="<u2")
    body[:, : ct.n] = ct.u
    body[:, ct.n] = ct.v
    return header + body.tobytes()


def decode_ct(data: bytes, p: ParameterSet) -> KemCiphertext:
    """Parse and fully validate a serialized ciphertext for parameter set p."""
    if len(data) < _HEADER.size:
        raise MalformedCiphertext("truncated header")
    magic, version, n_field, nbits_field = _HEADER.unpack_from(data)
    if magic != CT_MAGIC:
        raise MalformedCiphertext("bad magic")
    if version != CT_VERSION:
        raise MalformedCiphertext("unsupported version")
    if n_field != p.n:
        raise MalformedCiphertext(f"dimension mismatch: header says n={n_field}")
    if nbits_field != NBITS:
        raise MalformedCiphertext(f"bit count mismatch: header says {nbits_field}")
    expected = derive_sizes(p).ct_bytes
    if len(data) != expected:
        raise MalformedCiphertext(f"length {len(data)} != expected {expected}")
    words = np.frombuffer(data, dtype="<u2", offset=_HEADER.size).reshape(NBITS, p.n + 1)
    if (words >= p.q).any():
        raise MalformedCiphertext("coefficient out of range")
    u = words[:, : p.n]
    v = words[:, p.n].copy()
    v.flags.writeable = False
    return KemCiphertext(n=p.n, u=u, v=v)


def constant_time_equal(a: bytes, b: bytes) -> int:
    """1 iff a == b; the comparison touches every byte either way.

    Lengths are public and are compared first.
    """
    if len(a) != len(b):
        return 0
    return int(hmac.compare_digest(a, b))


def _select_key(flag: int, good: bytes, bad: bytes) -> bytes:
    """Byte-masked select: good when flag == 1, bad when flag == 0."""
    mask = (-flag) & 0xFF
    inv = mask ^ 0xFF
    return bytes((g & mask) | (b & inv) for g, b in zip(good, bad))


def _bits_of_seed(m: bytes) -> np.ndarray:
    """256 message bits of the 32-byte seed, LSB-first within each byte."""
    return np.unpackbits(np.frombuffer(m, dtype=np.uint8), bitorder="little")


def _seed_of_bits(bits: np.ndarray) -> bytes:
    return np.packbits(bits.astype(np.uint8), bitorder="little").tobytes()


def _encrypt_seed(m: bytes, pk: PublicKey, p: ParameterSet) -> tuple[bytes, bytes]:
    """Deterministic encryption of a 32-byte seed into a framed ciphertext.

    Shared by encapsulation and the re-encryption step of decapsulation: the
    per-bit noise stream i is the "KyFrogR" XOF over seed_r || LE32(i), where
    seed_r is the first half of the FO hash of m || pk. Returns (ct bytes,
    raw key half of the FO hash).
    """
    pk_ser = public_key_to_bytes(pk, p)
    h = xof_stream(b"KyFrogH", m + pk_ser, 64)
    seed_r, k_raw = h[:32], h[32:]
    n = p.n
    sampler = sampler_for(p.sigma_e)
    stream_len = 16 * n + 8
    streams = b"".join(
        xof_stream(b"KyFrogR", seed_r + struct.pack("<I", i), stream_len)
        for i in range(NBITS)
    )
    noise = sampler.sample(streams, NBITS * (2 * n + 1)).reshape(NBITS, 2 * n + 1)
    r = noise[:, :n]
    e1 = noise[:, n : 2 * n]
    e2 = noise[:, 2 * n]
    _, af = matrix_for(pk.seed_a, p)
    bits = _bits_of_seed(m).astype(np.float64)
    u, v = encrypt_block(pk.t, af, bits, r, e1, e2.astype(np.float64), p.q)
    ct = KemCiphertext(n=n, u=u, v=v)
    return encode_ct(ct), k_raw


def _kdf(k_raw: bytes, ct_bytes: bytes) -> bytes:
    return xof_stream(b"KyFrogKDFv1", k_raw + ct_bytes, SHARED_KEY_BYTES)


def _rejection_key(pk_ser: bytes, ct_bytes: bytes) -> bytes:
    rej = xof_stream(b"KyFrogRej", pk_ser + ct_bytes, 32)
    return _kdf(rej, ct_bytes)


def encap(pk: PublicKey, drbg, p: ParameterSet) -> tuple[bytes, bytes]:
    """Encapsulate: returns (ciphertext bytes, 32-byte shared key).

    All encryption randomness is derived from the sampled seed m and pk, so
    the ciphertext is a deterministic function of (m, pk).
    """
    validate_kem_parameters(p)
    m = drbg.generate(32)
    ct_bytes, k_raw = _encrypt_seed(m, pk, p)
    return ct_bytes, _kdf(k_raw, ct_bytes)


def _structurally_valid(data: bytes, p: ParameterSet) -> bool:
    if len(data) != derive_sizes(p).ct_bytes:
        return False
    magic, version, n_field, nbits_field = _HEADER.unpack_from(data)
    return magic == CT_MAGIC and version == CT_VERSION and n_field == p.n and nbits_field == NBITS


def decap(sk: SecretKey, pk: PublicKey, ct_bytes: bytes, p: ParameterSet) -> bytes:
    """Decapsulate with re-encryption and implicit rejection.

    Any malformation, including out-of-range coefficients, yields the
    deterministic rejection key rather than an error. Out-of-range words are
    folded mod q for the decrypt/re-encrypt pipeline and caught by the final
    byte comparison, so the amount of work done does not depend on where a
    tampered ciphertext differs from an honest one.
    """
    validate_kem_parameters(p)
    pk_ser = public_key_to_bytes(pk, p)
    if not _structurally_valid(ct_bytes, p):
        # Header shape and length are public; a mismatch cannot reach the
        # secret-dependent part of the pipeline.
        return _rejection_key(pk_ser, ct_bytes)
    words = np.remainder(
        np.frombuffer(ct_bytes, dtype="<u2", offset=_HEADER.size)
        .reshape(NBITS, p.n + 1)
        .astype(np.int64),
        p.q,
    ).astype(np.uint16)
    u = words[:, : p.n]
    v = words[:, p.n]
    m_hat = _seed_of_bits(decrypt_block(sk.s, u, v, p.q))
    ct_prime, k_raw_hat = _encrypt_seed(m_hat, pk, p)
    flag = constant_time_equal(ct_bytes, ct_prime)
    k_good = _kdf(k_raw_hat, ct_bytes)
    k_bad = _rejection_key(pk_ser, ct_bytes)
    return _select_key(flag, k_good, k_bad)
