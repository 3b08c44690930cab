import pathlib

import pytest

from kyfrog.params import REFERENCE
from kyfrog.rng import Drbg
from kyfrog import pke

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "data"

KEYGEN_SEED = bytes(48)
# Deterministic encapsulation seeds whose roundtrip decrypts cleanly under the
# KEYGEN_SEED key pair (the reference parameters have a substantial genuine
# decryption-failure rate, so tests that need a clean roundtrip pin seeds).
GOOD_ENCAP_SEEDS = [bytes([i]) * 48 for i in (1, 2, 3, 5, 8, 9, 10, 11)]
GOOD_HYBRID_SEED = bytes([161]) * 48


@pytest.fixture(scope="session")
def keypair():
    return pke.keygen(Drbg(KEYGEN_SEED), REFERENCE)


@pytest.fixture(scope="session")
def honest_ct(keypair):
    from kyfrog import kem

    pk, _sk = keypair
    return kem.encap(pk, Drbg(GOOD_ENCAP_SEEDS[0]), REFERENCE)


@pytest.fixture
def drbg():
    return Drbg(KEYGEN_SEED)
