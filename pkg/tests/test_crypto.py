from __future__ import annotations

import hashlib

import pytest

from nctoken.crypto import KeyPair, MalformedKey, hash_bytes, sign, sign_digest, verify, verify_digest
from nctoken.ledger import Transaction, TxOutput
from nctoken.token.scripts import E_BTC

# RFC 8032 section 7.1, tests 1 and 2 (independent oracle for the ed25519 backend)
RFC_VECTORS = [
    ("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60",
     "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a",
     "",
     "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b"),
    ("4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb",
     "3d4017c3e843895a92b70aa74d1b7ebc9c982ccf2ec4968cc0cd55f12af4660c",
     "72",
     "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da085ac1e43e15996e458f3613d0f11d8c387b2eaeb4302aeeb00d291612bb0c00"),
]


@pytest.mark.parametrize("sk,pk,msg,sig", RFC_VECTORS)
def test_rfc8032_vectors(sk, pk, msg, sig):
    kp = KeyPair.from_secret(bytes.fromhex(sk))
    assert kp.public_key.hex() == pk
    assert sign_digest(kp.secret_key, bytes.fromhex(msg)).hex() == sig
    assert verify_digest(kp.public_key, bytes.fromhex(sig), bytes.fromhex(msg))


def test_hash_is_sha256():
    assert hash_bytes(b"abc") == hashlib.sha256(b"abc").digest()


def test_derive_is_deterministic_and_label_dependent():
    assert KeyPair.derive("A") == KeyPair.derive("A")
    assert KeyPair.derive("A").public_key != KeyPair.derive("B").public_key


def test_malformed_secret_rejected():
    with pytest.raises(MalformedKey):
        KeyPair.from_secret(b"short")
    with pytest.raises(MalformedKey):
        sign_digest(b"x" * 31, b"")


def _tx(val: int = 5) -> Transaction:
    a = KeyPair.derive("A")
    return Transaction((), (), (TxOutput((a.public_key,), E_BTC, val),))


def test_sign_verify_transaction():
    a, b = KeyPair.derive("A"), KeyPair.derive("B")
    tx = _tx()
    s = sign(a.secret_key, tx)
    assert len(s) == 64
    assert s == sign(a.secret_key, tx)  # deterministic
    assert verify(a.public_key, s, tx)
    assert not verify(b.public_key, s, tx)
    assert not verify(a.public_key, s, _tx(6))
    assert not verify(a.public_key, s[:-1] + bytes([s[-1] ^ 1]), tx)


@pytest.mark.parametrize("pk,sig", [(b"", b"x" * 64), (b"x" * 32, b""), (1, b"x" * 64), (b"x" * 32, 7)])
def test_verify_rejects_malformed_inputs(pk, sig):
    assert verify(pk, sig, _tx()) is False
