"""Randomness plumbing: AES-256-CTR DRBG, domain-separated XOF streams, the
discrete Gaussian noise sampler, and expansion of the public matrix A.

Every operation here except OS-seeded DRBG construction is a pure function of
its inputs, so key generation, encapsulation and re-encryption stay bit-exactly
reproducible.
"""

from __future__ import annotations

import hashlib
import os
from typing import Iterator

import mpmath
import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .params import ParameterSet, validate

__all__ = [
    "DOMAIN_LABELS",
    "Drbg",
    "NoiseSampler",
    "StreamExhausted",
    "XofReader",
    "expand_a",
    "expand_a_rows",
    "xof_stream",
]

# Fixed domain-separation labels (ASCII, bit-exact). No two call sites share one.
DOMAIN_LABELS = {
    b"KyFrogA": "public matrix expansion",
    b"KyFrogH": "FO hash of seed || public key",
    b"KyFrogR": "per-bit encryption randomness",
    b"KyFrogKDFv1": "session-key KDF",
    b"KyFrogRej": "implicit-rejection input",
    b"KyFrogFile": "hybrid-layer subkey",
    b"KyFrogSK": "key-generation noise for s",
    b"KyFrogSE": "key-generation noise for e",
}

SEED_BYTES = 48
RESEED_INTERVAL_CALLS = 1 << 16
NOISE_SUPPORT = 15          # chi is supported on [-15, 15]
NOISE_BYTES_PER_COEFF = 8   # one 64-bit draw per coefficient
_REJECTION_CAP = 1 << 20    # consecutive rejected draws before declaring an XOF fault

_MASK128 = (1 << 128) - 1


class StreamExhausted(RuntimeError):
    """A deterministic byte stream ran out before a sampler was satisfied."""


def _check_label(label: bytes) -> None:
    if label not in DOMAIN_LABELS:
        raise ValueError(f"unknown domain label {label!r}")


def xof_stream(label: bytes, data: bytes, length: int) -> bytes:
    """First `length` bytes of the XOF over label || data.

    Instantiated as SHAKE256; requesting a prefix of a longer stream yields
    identical bytes. Labels must come from DOMAIN_LABELS.
    """
    _check_label(label)
    return hashlib.shake_256(label + data).digest(length)


class XofReader:
    """Incremental reader over an XOF stream, for consumers of unbounded prefixes.

    Reads are served from a window that grows geometrically, so total squeeze
    work stays within a small constant factor of the bytes actually consumed
    and already-consumed bytes are dropped.
    """

    _INITIAL_CHUNK = 1 << 12

    def __init__(self, label: bytes, data: bytes):
        _check_label(label)
        self._xof = hashlib.shake_256(label + data)
        self._total = 0          # bytes squeezed so far
        self._window = b""
        self._window_start = 0   # stream offset of window[0]
        self._pos = 0            # stream offset of next unread byte

    def read(self, length: int) -> bytes:
        end = self._pos + length
        while end > self._total:
            grow = max(self._INITIAL_CHUNK, self._total, end - self._total)
            new_total = self._total + grow
            stream = self._xof.digest(new_total)
            self._window = stream[self._pos:]
            self._window_start = self._pos
            self._total = new_total
        out = self._window[self._pos - self._window_start : end - self._window_start]
        self._pos = end
        return out


class Drbg:
    """AES-256-CTR deterministic random bit generator.

    The 48-byte seed splits into a 32-byte AES key and a 16-byte initial
    counter block. Instances built from OS entropy reseed themselves every
    RESEED_INTERVAL_CALLS generate calls; instances built from an explicit
    seed are fully deterministic and never reseed (test mode).

    Single-owner: one instance per thread.
    """

    def __init__(self, seed: bytes | None = None):
        if seed is None:
            self._reseed_enabled = True
            seed = os.urandom(SEED_BYTES)
        else:
            self._reseed_enabled = False
        if len(seed) != SEED_BYTES:
            raise ValueError(f"DRBG seed must be {SEED_BYTES} bytes, got {len(seed)}")
        self._install(seed)

    def _install(self, seed: bytes) -> None:
        self._key = seed[:32]
        self._counter = int.from_bytes(seed[32:48], "big")
        self._calls_since_reseed = 0
        self.generated_blocks = 0

    def _reseed(self) -> None:
        self._install(os.urandom(SEED_BYTES))

    def generate(self, length: int) -> bytes:
        """Return `length` keystream bytes, advancing the counter.

        Output is block-aligned: each call starts at a fresh counter block and
        any tail of a partially used block is discarded.
        """
        if length < 0:
            raise ValueError("length must be nonnegative")
        if self._reseed_enabled and self._calls_since_reseed >= RESEED_INTERVAL_CALLS:
            self._reseed()
        self._calls_since_reseed += 1
        if length == 0:
            return b""
        nblocks = (length + 15) // 16
        nonce = (self._counter & _MASK128).to_bytes(16, "big")
        encryptor = Cipher(algorithms.AES(self._key), modes.CTR(nonce)).encryptor()
        out = encryptor.update(bytes(16 * nblocks))
        self._counter += nblocks
        self.generated_blocks += nblocks
        return out[:length]


class NoiseSampler:
    """Constant-time-style CDT sampler for the discrete Gaussian chi on [-15, 15].

    Cell probabilities are proportional to exp(-x^2 / (2 sigma^2)), quantized
    to 64-bit fixed point (denominator 2^64) with the centre cell absorbing the
    rounding slack, so the sampled distribution matches the ideal one to within
    2^-64 per cell. One uniform 64-bit draw maps to one coefficient, and the
    scan compares the draw against every table entry on every draw.
    """

    def __init__(self, sigma: float, support: int = NOISE_SUPPORT):
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        self.sigma = sigma
        self.support = support
        masses = self._quantized_masses(sigma, support)
        cum = np.cumsum(np.array(masses, dtype=object))
        assert int(cum[-1]) == 1 << 64
        self.cell_masses = masses
        self.cdt = np.array([min(int(c), (1 << 64) - 1) for c in cum], dtype=np.uint64)
        self.values = np.arange(-support, support + 1, dtype=np.int64)

    @staticmethod
    def _quantized_masses(sigma: float, support: int) -> list[int]:
        scale = 1 << 64
        if sigma == 0.0:
            return [0] * support + [scale] + [0] * support
        with mpmath.workdps(60):
            # repr() recovers the intended decimal width (e.g. exactly 1.4)
            # rather than the nearest binary double
            sig = mpmath.mpf(repr(sigma))
            rho = [mpmath.exp(-mpmath.mpf(x * x) / (2 * sig**2))
                   for x in range(support + 1)]
            total = rho[0] + 2 * sum(rho[1:])
            side = [int(mpmath.nint(r / total * scale)) for r in rho[1:]]
        centre = scale - 2 * sum(side)
        if centre <= 0:
            raise ValueError(f"sigma={sigma} puts too little mass at 0 for support {support}")
        return side[::-1] + [centre] + side

    def variance(self):
        """Exact variance of the quantized table, as a Fraction."""
        from fractions import Fraction

        num = sum(m * int(x) * int(x) for m, x in zip(self.cell_masses, self.values))
        return Fraction(num, 1 << 64)

    def sample(self, data: bytes, count: int) -> np.ndarray:
        """Map `count` 64-bit little-endian draws from `data` to chi samples.

        Needs 8*count bytes; raises StreamExhausted otherwise. The comparison
        against the full table runs for every draw regardless of outcome.
        """
        if len(data) < NOISE_BYTES_PER_COEFF * count:
            raise StreamExhausted(
                f"need {NOISE_BYTES_PER_COEFF * count} stream bytes, have {len(data)}"
            )
        draws = np.frombuffer(data, dtype="<u8", count=count)
        idx = np.zeros(count, dtype=np.int64)
        for threshold in self.cdt:  # one comparison per table entry for every draw
            idx += draws >= threshold
        np.minimum(idx, 2 * self.support, out=idx)  # u = 2^64-1 folds into the top cell
        return self.values[idx]


def _acceptance_bound(q: int) -> int:
    return (1 << 16) // q * q


def expand_a_rows(seed_a: bytes, p: ParameterSet) -> Iterator[np.ndarray]:
    """Yield the rows of the public matrix A derived from seed_a, one at a time.

    Entries are produced row-major by rejection sampling: 16-bit little-endian
    words w from the "KyFrogA" XOF stream are accepted iff w < floor(2^16/q)*q
    and contribute w mod q. Streaming keeps only one row resident.
    """
    validate(p)
    if len(seed_a) != 32:
        raise ValueError("seed_a must be 32 bytes")
    n, q = p.n, p.q
    bound = _acceptance_bound(q)
    reader = XofReader(b"KyFrogA", seed_a)
    accept_rate = bound / 65536.0
    pending: list[np.ndarray] = []
    have = 0
    rejected_run = 0
    for _ in range(n):
        while have < n:
            want = n - have
            words = max(int(want / accept_rate * 1.05) + 16, 64)
            raw = np.frombuffer(reader.read(2 * words), dtype="<u2")
            accepted = raw[raw < bound]
            if accepted.size == 0:
                rejected_run += raw.size
                if rejected_run > _REJECTION_CAP:
                    raise RuntimeError("XOF fault: rejection sampling made no progress")
                continue
            rejected_run = 0
            pending.append(accepted)
            have += accepted.size
        flat = np.concatenate(pending) if len(pending) > 1 else pending[0]
        row = np.mod(flat[:n], q).astype(np.uint16)
        leftover = flat[n:]
        pending = [leftover] if leftover.size else []
        have = leftover.size
        yield row


def expand_a(seed_a: bytes, p: ParameterSet) -> np.ndarray:
    """Full n x n public matrix A (row-major, entries in [0, q), dtype uint16)."""
    out = np.empty((p.n, p.n), dtype=np.uint16)
    for i, row in enumerate(expand_a_rows(seed_a, p)):
        out[i] = row
    out.flags.writeable = False
    return out
