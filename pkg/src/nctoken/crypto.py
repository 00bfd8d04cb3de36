"""Hashing and ed25519 transaction signatures.

Signatures are computed over the transaction's sighash: the SHA-256 digest
of its canonical serialization with every witness field cleared.  Ed25519 is
deterministic, so signing the same transaction twice yields identical bytes.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

DIGEST_SIZE = 32
PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64


class MalformedKey(ValueError):
    pass


class Signable(Protocol):
    @property
    def sighash(self) -> bytes: ...


def hash_bytes(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


@dataclass(frozen=True)
class KeyPair:
    public_key: bytes
    secret_key: bytes

    @classmethod
    def from_secret(cls, secret_key: bytes) -> KeyPair:
        if not isinstance(secret_key, bytes) or len(secret_key) != 32:
            raise MalformedKey("secret key must be 32 bytes")
        sk = Ed25519PrivateKey.from_private_bytes(secret_key)
        return cls(sk.public_key().public_bytes_raw(), secret_key)

    @classmethod
    def derive(cls, label: str) -> KeyPair:
        """Deterministic key pair for a user label (test and scenario keys)."""
        return cls.from_secret(hash_bytes(b"nctoken/key/" + label.encode()))

    def __repr__(self) -> str:
        return f"KeyPair(pk={self.public_key.hex()[:16]}..)"


@lru_cache(maxsize=4096)
def _private_key(secret_key: bytes) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(secret_key)


def sign_digest(secret_key: bytes, digest: bytes) -> bytes:
    if not isinstance(secret_key, bytes) or len(secret_key) != 32:
        raise MalformedKey("secret key must be 32 bytes")
    return _private_key(secret_key).sign(digest)


@lru_cache(maxsize=1 << 16)
def verify_digest(public_key: bytes, signature: bytes, digest: bytes) -> bool:
    if len(public_key) != PUBLIC_KEY_SIZE or len(signature) != SIGNATURE_SIZE:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, digest)
    except (InvalidSignature, ValueError):
        return False
    return True


def sign(secret_key: bytes, tx: Signable) -> bytes:
    return sign_digest(secret_key, tx.sighash)


def verify(public_key: object, signature: object, tx: Signable) -> bool:
    if not isinstance(public_key, bytes) or not isinstance(signature, bytes):
        return False
    return verify_digest(public_key, signature, tx.sighash)
