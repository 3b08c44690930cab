"""KyFrog: a conservative plain-LWE key-encapsulation mechanism.

Large dimension, small prime modulus, narrow noise: the scheme trades a very
large ciphertext (about 0.5 MiB) for an unusually high estimated attack cost,
while keys stay a few kilobytes. The package also ships the decryption-failure
analyzer and the parallel modulus-search tool used to pick the parameters.
"""

from .params import REFERENCE, DerivedSizes, InvalidParameterError, ParameterSet, derive_sizes
from .pke import PublicKey, SecretKey, keygen
from .kem import decap, encap
from .hybrid import decrypt_file_bytes, encrypt_file_bytes
from .rng import Drbg

__version__ = "0.1.0"

__all__ = [
    "REFERENCE",
    "DerivedSizes",
    "Drbg",
    "InvalidParameterError",
    "ParameterSet",
    "PublicKey",
    "SecretKey",
    "decap",
    "decrypt_file_bytes",
    "derive_sizes",
    "encap",
    "encrypt_file_bytes",
    "keygen",
]
