"""The blockchain as an immutable sequence of transactions, with validity checks."""
from __future__ import annotations

from typing import Iterator, Optional

from ..script import BOTTOM, EvalCtx, evaluate
from ..script.values import truthy
from .tx import MalformedTx, ValidationError, Outpoint, Transaction, TxOutput, tx_from_json, tx_to_json


class UnknownInput(ValidationError):
    pass


class DoubleSpend(ValidationError):
    pass


class ValueCreated(ValidationError):
    pass


class ScriptFailed(ValidationError):
    def __init__(self, input_index: int, reason: str) -> None:
        super().__init__(f"script of input {input_index} failed: {reason}")
        self.input_index = input_index
        self.reason = reason


class UnknownOutpoint(LookupError):
    pass


class Chain:
    """Immutable chain value.  `append` returns a new chain and never mutates this one."""

    __slots__ = ("_txs", "_by_id", "_spent", "_unspent")

    def __init__(self, txs: tuple, by_id: dict, spent: dict, unspent: dict) -> None:
        self._txs = txs
        self._by_id = by_id
        self._spent = spent
        self._unspent = unspent

    @classmethod
    def genesis(cls, coinbase: Transaction) -> Chain:
        if not coinbase.is_coinbase:
            raise MalformedTx("the first transaction must be a coinbase (no inputs)")
        unspent = {coinbase.outpoint(i): None for i in range(1, len(coinbase.outputs) + 1)}
        return cls((coinbase,), {coinbase.txid: coinbase}, {}, unspent)

    @property
    def txs(self) -> tuple[Transaction, ...]:
        return self._txs

    @property
    def coinbase(self) -> Transaction:
        return self._txs[0]

    def __len__(self) -> int:
        return len(self._txs)

    def __iter__(self) -> Iterator[Transaction]:
        return iter(self._txs)

    def get_tx(self, txid: bytes) -> Optional[Transaction]:
        return self._by_id.get(txid)

    def resolve(self, o: Outpoint) -> TxOutput:
        tx = self._by_id.get(o.txid)
        if tx is None:
            raise UnknownOutpoint(f"no transaction {o.txid.hex()}")
        if not 1 <= o.index <= len(tx.outputs):
            raise UnknownOutpoint(f"transaction {o.txid.hex()} has no output {o.index}")
        return tx.outputs[o.index - 1]

    def contains(self, o: Outpoint) -> bool:
        tx = self._by_id.get(o.txid)
        return tx is not None and 1 <= o.index <= len(tx.outputs)

    def spent_by(self, o: Outpoint) -> Optional[tuple[bytes, int]]:
        return self._spent.get(o)

    def is_unspent(self, o: Outpoint) -> bool:
        return o in self._unspent

    def utxo(self) -> list[Outpoint]:
        """Unspent outputs in chain order."""
        return list(self._unspent)

    def parents(self, o: Outpoint) -> tuple[Outpoint, ...]:
        """The outputs redeemed by the transaction that created `o`."""
        tx = self._by_id.get(o.txid)
        if tx is None:
            raise UnknownOutpoint(str(o))
        return tx.inputs

    def check(self, tx: Transaction) -> None:
        """Raise the first validity violation of `tx` as an extension of this chain."""
        if tx.is_coinbase:
            raise MalformedTx("only the first transaction may be a coinbase")
        if tx.txid in self._by_id:
            raise MalformedTx("transaction already in chain")
        seen = set()
        total_in = 0
        for i, o in enumerate(tx.inputs, 1):
            if not self.contains(o):
                raise UnknownInput(f"input {i} refers to unknown output {o}")
            if o in seen or o not in self._unspent:
                raise DoubleSpend(f"input {i} spends {o}, which is already spent")
            seen.add(o)
            total_in += self.resolve(o).val
        for i, o in enumerate(tx.inputs, 1):
            scr = self.resolve(o).scr
            v = evaluate(scr, EvalCtx(self, tx, i))
            if v is BOTTOM:
                raise ScriptFailed(i, "script evaluated to BOTTOM")
            if not truthy(v):
                raise ScriptFailed(i, "script evaluated to 0")
        total_out = sum(out.val for out in tx.outputs)
        if total_out > total_in:
            raise ValueCreated(f"outputs carry {total_out}, inputs only {total_in}")

    def append(self, tx: Transaction) -> Chain:
        self.check(tx)
        return self._append_unchecked(tx)

    def _append_unchecked(self, tx: Transaction) -> Chain:
        by_id = dict(self._by_id)
        by_id[tx.txid] = tx
        spent = dict(self._spent)
        unspent = dict(self._unspent)
        for i, o in enumerate(tx.inputs, 1):
            spent[o] = (tx.txid, i)
            del unspent[o]
        for j in range(1, len(tx.outputs) + 1):
            unspent[Outpoint(tx.txid, j)] = None
        return Chain(self._txs + (tx,), by_id, spent, unspent)

    def prefix(self, n: int) -> Chain:
        """The chain made of the first n transactions (n >= 1)."""
        c = Chain.genesis(self._txs[0])
        for tx in self._txs[1:n]:
            c = c._append_unchecked(tx)
        return c

    def to_json(self) -> dict:
        return {"txs": [tx_to_json(tx) for tx in self._txs]}

    @classmethod
    def from_json(cls, j: dict, validate: bool = True) -> Chain:
        try:
            txs = [tx_from_json(t) for t in j["txs"]]
        except (KeyError, TypeError, MalformedTx) as exc:
            raise MalformedTx(f"malformed chain document: {exc}") from None
        if not txs:
            raise MalformedTx("empty chain document")
        chain = cls.genesis(txs[0])
        for tx in txs[1:]:
            chain = chain.append(tx) if validate else chain._append_unchecked(tx)
        return chain


def validate_and_append(chain: Chain, tx: Transaction) -> Chain:
    return chain.append(tx)


def utxo(chain: Chain) -> list[Outpoint]:
    return chain.utxo()


def resolve(chain: Chain, o: Outpoint) -> TxOutput:
    return chain.resolve(o)
