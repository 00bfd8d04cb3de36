from __future__ import annotations

import pytest

from nctoken.harness.session import user_key
from nctoken.ledger import Chain, Transaction, TxOutput
from nctoken.token import Keyring
from nctoken.token.scripts import E_BTC

A, B, M = user_key("A"), user_key("B"), user_key("M")


@pytest.fixture
def ring() -> Keyring:
    return Keyring([A, B, M])


@pytest.fixture
def coinbase() -> Transaction:
    """A: 0, 0, 5; B: 0, 3; M: 0."""
    outs = [(A, 0), (A, 0), (A, 5), (B, 0), (B, 3), (M, 0)]
    return Transaction((), (), tuple(TxOutput((k.public_key,), E_BTC, v) for k, v in outs))


@pytest.fixture
def chain(coinbase) -> Chain:
    return Chain.genesis(coinbase)
