"""Computational runs (broadcasts and appended transactions) and the coherence maps."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

from ..ledger import Chain, MalformedTx, Outpoint, Transaction, parse_tx
from ..ledger.tx import tx_from_json, tx_to_json

SIG_MAGIC = b"SIG1"


@dataclass(frozen=True)
class Broadcast:
    sender: str
    payload: bytes


@dataclass(frozen=True)
class Append:
    tx: Transaction


CompLabel = Union[Broadcast, Append]


@dataclass(frozen=True)
class SignatureMessage:
    """A signature on a transaction for one of its inputs, as broadcast by honest users."""

    tx: Transaction
    input_index: int
    signature: bytes

    def encode(self) -> bytes:
        body = self.tx.stripped().serialized
        return (SIG_MAGIC + struct.pack(">I", len(body)) + body
                + struct.pack(">II", self.input_index, len(self.signature)) + self.signature)


def decode_signature_message(payload: bytes) -> Optional[SignatureMessage]:
    """Parse a broadcast payload; anything that is not a well-formed signature message gives None."""
    try:
        if not payload.startswith(SIG_MAGIC):
            return None
        pos = len(SIG_MAGIC)
        (n,) = struct.unpack_from(">I", payload, pos)
        pos += 4
        tx = parse_tx(payload[pos:pos + n])
        pos += n
        k, slen = struct.unpack_from(">II", payload, pos)
        pos += 8
        sig = payload[pos:pos + slen]
        if len(sig) != slen or pos + slen != len(payload):
            return None
        if not 1 <= k <= len(tx.inputs):
            return None
        return SignatureMessage(tx, k, sig)
    except (struct.error, MalformedTx, ValueError):
        return None


class Directory:
    """Bidirectional user name <-> public key table.  Unknown keys get the name pk:<hex>."""

    def __init__(self, users: Mapping[str, bytes]) -> None:
        self.users = dict(users)
        self._by_pk = {pk: name for name, pk in self.users.items()}
        if len(self._by_pk) != len(self.users):
            raise ValueError("two users share a public key")

    def pk(self, name: str) -> Optional[bytes]:
        pk = self.users.get(name)
        if pk is None and name.startswith("pk:"):
            try:
                return bytes.fromhex(name[3:])
            except ValueError:
                return None
        return pk

    def name(self, pk: bytes) -> str:
        return self._by_pk.get(pk) or "pk:" + pk.hex()


@dataclass(frozen=True)
class ComputationalRun:
    coinbase: Transaction
    labels: tuple[CompLabel, ...] = ()
    users: Mapping[str, bytes] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "users", dict(self.users))

    @cached_property
    def directory(self) -> Directory:
        return Directory(self.users)

    def extend(self, *labels: CompLabel) -> ComputationalRun:
        return ComputationalRun(self.coinbase, self.labels + labels, self.users)

    def chain(self, validate: bool = True) -> Chain:
        c = Chain.genesis(self.coinbase)
        for lab in self.labels:
            if isinstance(lab, Append):
                c = c.append(lab.tx) if validate else c._append_unchecked(lab.tx)
        return c

    def to_json(self) -> dict:
        labels = []
        for lab in self.labels:
            if isinstance(lab, Broadcast):
                labels.append({"broadcast": {"sender": lab.sender, "payload": lab.payload.hex()}})
            else:
                labels.append({"append": lab.tx.txid.hex()})
        return {
            "users": {n: pk.hex() for n, pk in self.users.items()},
            "coinbase": self.coinbase.txid.hex(),
            "labels": labels,
        }

    @classmethod
    def from_json(cls, j: dict, txs: Mapping[str, Transaction]) -> ComputationalRun:
        """Rebuild from JSON; appended transactions are looked up by txid in `txs`."""
        labels: list[CompLabel] = []
        for lab in j["labels"]:
            if "broadcast" in lab:
                b = lab["broadcast"]
                labels.append(Broadcast(b["sender"], bytes.fromhex(b["payload"])))
            else:
                labels.append(Append(txs[lab["append"]]))
        users = {n: bytes.fromhex(pk) for n, pk in j["users"].items()}
        return cls(txs[j["coinbase"]], tuple(labels), users)


@dataclass(frozen=True)
class CoherenceMaps:
    txout: Mapping[str, Outpoint] = field(default_factory=dict)
    tkid: Mapping[str, Outpoint] = field(default_factory=dict)
    txburn: Mapping[str, Transaction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "txout", dict(self.txout))
        object.__setattr__(self, "tkid", dict(self.tkid))
        object.__setattr__(self, "txburn", {y: t.stripped() for y, t in self.txburn.items()})

    @cached_property
    def txout_inverse(self) -> dict[Outpoint, str]:
        return {o: n for n, o in self.txout.items()}

    def name_at(self, o: Outpoint) -> Optional[str]:
        return self.txout_inverse.get(o)

    def update(self, drop: Iterable[str] = (), bind: Mapping[str, Outpoint] = (),
               tokens: Mapping[str, Outpoint] = (), burn_drop: Iterable[str] = (),
               burn_bind: Mapping[str, Transaction] = ()) -> CoherenceMaps:
        txout = dict(self.txout)
        for n in drop:
            del txout[n]
        txout.update(dict(bind))
        tkid = dict(self.tkid)
        tkid.update(dict(tokens))
        txburn = dict(self.txburn)
        for y in burn_drop:
            txburn.pop(y, None)
        txburn.update(dict(burn_bind))
        return CoherenceMaps(txout, tkid, txburn)

    def to_json(self) -> dict:
        return {
            "txout": {n: str(o) for n, o in sorted(self.txout.items())},
            "tkid": {t: str(o) for t, o in sorted(self.tkid.items())},
            "txburn": {y: tx_to_json(t) for y, t in sorted(self.txburn.items())},
        }

    @classmethod
    def from_json(cls, j: dict) -> CoherenceMaps:
        return cls(
            {n: Outpoint.parse(o) for n, o in j.get("txout", {}).items()},
            {t: Outpoint.parse(o) for t, o in j.get("tkid", {}).items()},
            {y: tx_from_json(t) for y, t in j.get("txburn", {}).items()},
        )


def outpoint_digest(chain: Chain, o: Outpoint) -> Optional[bytes]:
    tx = chain.get_tx(o.txid)
    if tx is None or not 1 <= o.index <= len(tx.outputs):
        return None
    return tx.output_digest(o.index)
