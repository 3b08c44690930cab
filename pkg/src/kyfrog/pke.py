"""Single-bit LWE public-key encryption: the base scheme under the KEM.

All modular arithmetic runs through float64 BLAS matmuls with one reduction
per inner product; the KEM parameter envelope guarantees every accumulator
stays below 2^53, so results are exact integers.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .params import ParameterSet, decode_region, derive_sizes, validate_kem_parameters
from .rng import NoiseSampler, expand_a, xof_stream

__all__ = [
    "PublicKey",
    "SecretKey",
    "BitCiphertext",
    "KeyFormatError",
    "keygen",
    "encrypt_bit",
    "decrypt_bit",
    "public_key_to_bytes",
    "public_key_from_bytes",
    "secret_key_to_bytes",
    "secret_key_from_bytes",
    "write_public_key",
    "read_public_key",
    "write_secret_key",
    "read_secret_key",
]

PK_HEADER = b"KYPK\x01"
SK_HEADER = b"KYSK\x01"


class KeyFormatError(ValueError):
    """Raised when a serialized key fails structural validation."""


@dataclass(frozen=True)
class PublicKey:
    seed_a: bytes          # 32 bytes
    t: np.ndarray          # (n,) uint16, entries in [0, q)

    def __eq__(self, other):
        return (isinstance(other, PublicKey) and self.seed_a == other.seed_a
                and np.array_equal(self.t, other.t))


@dataclass(frozen=True)
class SecretKey:
    s: np.ndarray          # (n,) uint16, centered noise stored mod q

    def __eq__(self, other):
        return isinstance(other, SecretKey) and np.array_equal(self.s, other.s)


@dataclass(frozen=True)
class BitCiphertext:
    u: np.ndarray          # (n,) uint16
    v: int

    def __eq__(self, other):
        return (isinstance(other, BitCiphertext) and self.v == other.v
                and np.array_equal(self.u, other.u))


@functools.lru_cache(maxsize=8)
def sampler_for(sigma: float) -> NoiseSampler:
    """Memoized chi sampler (table construction is not free)."""
    return NoiseSampler(sigma)


@functools.lru_cache(maxsize=4)
def _cached_matrix(seed_a: bytes, n: int, q: int, k: int, sigma_s: float, sigma_e: float):
    p = ParameterSet(n=n, k=k, q=q, sigma_s=sigma_s, sigma_e=sigma_e)
    a = expand_a(seed_a, p)
    af = a.astype(np.float64)
    af.flags.writeable = False
    return a, af

def matrix_for(seed_a: bytes, p: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Expanded matrix A for seed_a, as (uint16, float64) views; memoized."""
    return _cached_matrix(seed_a, p.n, p.q, p.k, p.sigma_s, p.sigma_e)


def _noise_from_stream(stream: bytes, n: int, sampler: NoiseSampler) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split an encryption noise stream into (r, e1, e2): 8n + 8n + 8 bytes."""
    r = sampler.sample(stream[: 8 * n], n)
    e1 = sampler.sample(stream[8 * n : 16 * n], n)
    e2 = sampler.sample(stream[16 * n : 16 * n + 8], 1)
    return r, e1, int(e2[0])


def keygen(drbg, p: ParameterSet):
    """Generate a key pair: pk = (seedA, t = A s + e mod q), sk = s.

    seedA and a 32-byte noise seed come from the DRBG, in that order; s and e
    are sampled from chi via the "KyFrogSK" / "KyFrogSE" XOF streams over the
    noise seed.
    """
    validate_kem_parameters(p)
    seed_a = drbg.generate(32)
    noise_seed = drbg.generate(32)
    s = sampler_for(p.sigma_s).sample(xof_stream(b"KyFrogSK", noise_seed, 8 * p.n), p.n)
    e = sampler_for(p.sigma_e).sample(xof_stream(b"KyFrogSE", noise_seed, 8 * p.n), p.n)
    _, af = matrix_for(seed_a, p)
    t = np.remainder(af @ s.astype(np.float64) + e, p.q).astype(np.uint16)
    t.flags.writeable = False
    s_mod = np.mod(s, p.q).astype(np.uint16)
    s_mod.flags.writeable = False
    return PublicKey(seed_a=seed_a, t=t), SecretKey(s=s_mod)


def encrypt_block(t: np.ndarray, af: np.ndarray, bits: np.ndarray,
                  r: np.ndarray, e1: np.ndarray, e2: np.ndarray, q: int):
    """Encrypt a batch of bits with per-bit noise rows.

    r, e1 are (nbits, n); e2 and bits are (nbits,). Returns (U, V) as uint16
    arrays with U[i] = A^T r[i] + e1[i] and V[i] = <t, r[i]> + e2[i] +
    floor(q/2) * bits[i], all mod q.
    """
    rf = r.astype(np.float64)
    u = np.remainder(rf @ af + e1, q)
    v = np.remainder(rf @ t.astype(np.float64) + e2 + (q // 2) * bits, q)
    return u.astype(np.uint16), v.astype(np.uint16)


def encrypt_bit(pk: PublicKey, a: np.ndarray, m: int, noise_stream: bytes,
                p: ParameterSet) -> BitCiphertext:
    """Encrypt one bit deterministically from a noise stream of 16n + 8 bytes."""
    validate_kem_parameters(p)
    if m not in (0, 1):
        raise ValueError("message must be a single bit")
    r, e1, e2 = _noise_from_stream(noise_stream, p.n, sampler_for(p.sigma_e))
    u, v = encrypt_block(
        pk.t, a.astype(np.float64),
        np.array([m], dtype=np.float64),
        r[None, :], e1[None, :].astype(np.float64),
        np.array([e2], dtype=np.float64), p.q,
    )
    u0 = u[0]
    u0.flags.writeable = False
    return BitCiphertext(u=u0, v=int(v[0]))


def decrypt_block(s: np.ndarray, u: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    """Decode a batch: bit i = 1 iff v'_i = v_i - <u_i, s> lands in the 1-region."""
    vp = np.remainder(v.astype(np.float64) - u.astype(np.float64) @ s.astype(np.float64), q)
    lo, hi = decode_region(q)
    return ((vp >= lo) & (vp <= hi)).astype(np.uint8)


def decrypt_bit(sk: SecretKey, c: BitCiphertext, p: ParameterSet) -> int:
    """Decrypt one bit: 1 iff v' is circularly at least as close to floor(q/2) as to 0."""
    bits = decrypt_block(sk.s, c.u[None, :], np.array([c.v], dtype=np.uint16), p.q)
    return int(bits[0])


def decryption_error_terms(sk: SecretKey, u: np.ndarray, v: np.ndarray,
                           bits: np.ndarray, p: ParameterSet) -> np.ndarray:
    """Centered error E per bit, given the true message bits (debug instrumentation).

    E = v' - floor(q/2) * bit, centered to (-q/2, q/2); decryption of a bit
    succeeds iff |E| <= decode_tolerance(q) (with the tie cell giving bit 1 one
    extra unit of positive slack).
    """
    q = p.q
    vp = np.remainder(v.astype(np.float64) - u.astype(np.float64) @ sk.s.astype(np.float64), q)
    e = np.remainder(vp - (q // 2) * bits.astype(np.float64), q)
    half = (q - 1) // 2
    return ((e + half) % q - half).astype(np.int64)


def pack_coeffs(values: np.ndarray, bits: int) -> bytes:
    """Pack coefficients at `bits` bits each, little-endian bit order."""
    n = values.shape[0]
    u8 = np.ascontiguousarray(values.astype("<u2")).view(np.uint8).reshape(n, 2)
    allbits = np.unpackbits(u8, axis=1, bitorder="little")
    return np.packbits(allbits[:, :bits].reshape(-1), bitorder="little").tobytes()


def unpack_coeffs(data: bytes, n: int, bits: int) -> np.ndarray:
    """Inverse of pack_coeffs; rejects nonzero padding bits."""
    total = n * bits
    if len(data) != (total + 7) // 8:
        raise KeyFormatError(f"packed coefficient block must be {(total + 7) // 8} bytes")
    bitstream = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bitstream[total:].any():
        raise KeyFormatError("nonzero padding bits in packed coefficients")
    words = np.zeros((n, 16), dtype=np.uint8)
    words[:, :bits] = bitstream[:total].reshape(n, bits)
    return np.packbits(words, axis=1, bitorder="little").view("<u2").reshape(n).astype(np.uint16)


def public_key_to_bytes(pk: PublicKey, p: ParameterSet) -> bytes:
    """1440-byte payload for the reference set: seedA || t at bits_per_coeff bits."""
    bits = derive_sizes(p).bits_per_coeff
    return pk.seed_a + pack_coeffs(pk.t, bits)


def public_key_from_bytes(data: bytes, p: ParameterSet) -> PublicKey:
    sizes = derive_sizes(p)
    if len(data) != sizes.pk_bytes:
        raise KeyFormatError(f"public key payload must be {sizes.pk_bytes} bytes, got {len(data)}")
    t = unpack_coeffs(data[32:], p.n, sizes.bits_per_coeff)
    if (t >= p.q).any():
        raise KeyFormatError("public key coefficient out of range")
    t.flags.writeable = False
    return PublicKey(seed_a=data[:32], t=t)


def secret_key_to_bytes(sk: SecretKey) -> bytes:
    """2n-byte payload: n unsigned 16-bit little-endian words."""
    return np.ascontiguousarray(sk.s.astype("<u2")).tobytes()


def secret_key_from_bytes(data: bytes, p: ParameterSet) -> SecretKey:
    sizes = derive_sizes(p)
    if len(data) != sizes.sk_bytes:
        raise KeyFormatError(f"secret key payload must be {sizes.sk_bytes} bytes, got {len(data)}")
    s = np.frombuffer(data, dtype="<u2").astype(np.uint16)
    if (s >= p.q).any():
        raise KeyFormatError("secret key coefficient out of range")
    half = (p.q - 1) // 2
    centered = (s.astype(np.int64) + half) % p.q - half
    if (np.abs(centered) > 15).any():
        raise KeyFormatError("secret key entry outside the noise support")
    s.flags.writeable = False
    return SecretKey(s=s)


def write_public_key(pk: PublicKey, p: ParameterSet) -> bytes:
    return PK_HEADER + public_key_to_bytes(pk, p)


def read_public_key(data: bytes, p: ParameterSet) -> PublicKey:
    if data[:5] != PK_HEADER:
        raise KeyFormatError("bad public key file header")
    return public_key_from_bytes(data[5:], p)


def write_secret_key(sk: SecretKey, p: ParameterSet) -> bytes:
    return SK_HEADER + secret_key_to_bytes(sk)


def read_secret_key(data: bytes, p: ParameterSet) -> SecretKey:
    if data[:5] != SK_HEADER:
        raise KeyFormatError("bad secret key file header")
    return secret_key_from_bytes(data[5:], p)
