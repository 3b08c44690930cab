"""Parameter sets, validation, and the derived size constants used everywhere else."""

from __future__ import annotations

from dataclasses import dataclass
import math

__all__ = [
    "ParameterSet",
    "DerivedSizes",
    "InvalidParameterError",
    "REFERENCE",
    "is_prime",
    "validate",
    "validate_kem_parameters",
    "derive_sizes",
    "decode_region",
    "decode_tolerance",
]

SEED_A_BYTES = 32
NBITS = 256  # seed bits carried per KEM ciphertext


class InvalidParameterError(ValueError):
    """Raised when a parameter set fails validation."""


@dataclass(frozen=True)
class ParameterSet:
    """LWE parameters: dimension n, module rank k, modulus q, noise widths."""

    n: int
    k: int
    q: int
    sigma_s: float
    sigma_e: float


@dataclass(frozen=True)
class DerivedSizes:
    bits_per_coeff: int
    pk_bytes: int
    sk_bytes: int
    ct_bytes: int
    alpha: float


REFERENCE = ParameterSet(n=1024, k=1, q=1103, sigma_s=1.4, sigma_e=1.4)

# Deterministic Miller-Rabin witnesses, valid for all n < 4_759_123_141 (> 2^32).
_MR_WITNESSES = (2, 7, 61)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2^32."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if n >= 1 << 32:
        raise ValueError(f"primality test supports n < 2^32, got {n}")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def validate(p: ParameterSet) -> None:
    """Check the ParameterSet invariants; raise InvalidParameterError with a diagnostic."""
    if not isinstance(p.n, int) or p.n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {p.n!r}")
    if p.k != 1:
        raise InvalidParameterError(f"only module rank k=1 is supported, got {p.k!r}")
    if not isinstance(p.q, int) or p.q < 5:
        raise InvalidParameterError(f"q must be an integer >= 5, got {p.q!r}")
    if not is_prime(p.q):
        raise InvalidParameterError(f"q must be prime, got {p.q}")
    if not (p.sigma_s > 0 and math.isfinite(p.sigma_s)):
        raise InvalidParameterError(f"sigma_s must be positive and finite, got {p.sigma_s!r}")
    if not (p.sigma_e > 0 and math.isfinite(p.sigma_e)):
        raise InvalidParameterError(f"sigma_e must be positive and finite, got {p.sigma_e!r}")


def validate_kem_parameters(p: ParameterSet) -> None:
    """Validate p and additionally require that it fits the KEM wire layout.

    Coefficients travel as 16-bit words and the ciphertext header stores n as a
    32-bit field, so the KEM modules only accept q < 2^16 and n < 2^32.
    """
    validate(p)
    if p.q >= 1 << 16:
        raise InvalidParameterError(f"KEM framing stores coefficients as 16-bit words; q={p.q} too large")
    if p.n >= 1 << 32:
        raise InvalidParameterError(f"KEM header stores n as a 32-bit field; n={p.n} too large")


def derive_sizes(p: ParameterSet) -> DerivedSizes:
    """Derive byte sizes and the noise rate alpha from a validated parameter set."""
    validate(p)
    bits = (p.q - 1).bit_length()
    pk = SEED_A_BYTES + (p.n * bits + 7) // 8
    sk = 2 * p.n
    ct = 4 + 1 + 4 + 4 + NBITS * (2 * p.n + 2)
    return DerivedSizes(
        bits_per_coeff=bits,
        pk_bytes=pk,
        sk_bytes=sk,
        ct_bytes=ct,
        alpha=p.sigma_e / p.q,
    )


def decode_region(q: int) -> tuple[int, int]:
    """Inclusive interval of v' values that decode to the message bit 1.

    The decoder compares circular distances from v' to 0 and to floor(q/2),
    breaking exact ties in favour of 1. For q = 1103 this is [276, 827].
    """
    half = q // 2
    lo = (half + 1) // 2          # first v' at least as close to half as to 0
    hi = half + (q - half) // 2   # last such v' (the tie cell when q is odd)
    return lo, hi


def decode_tolerance(q: int) -> int:
    """Largest integer t such that every error with |E| <= t decodes correctly.

    Correct decoding of both encodings requires v' = E (for bit 0) and
    v' = floor(q/2) + E (for bit 1) to stay inside their regions.
    """
    lo, hi = decode_region(q)
    half = q // 2
    # bit 1 tolerates E in [lo - half, hi - half]; bit 0 tolerates [-(q - hi - 1), lo - 1]
    return min(half - lo, hi - half, q - hi - 1, lo - 1)
