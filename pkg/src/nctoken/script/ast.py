"""AST of the covenant script language.

Nodes are immutable.  Equality and hashing are purely syntactic: two nodes
are equal iff their canonical binary encodings coincide, so `1 + 2` and
`2 + 1` are different scripts.  Encodings are computed once per node.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

from . import codec

BINOPS = ("+", "-", "=", "<")
TXO_KINDS = ("rtxo", "stxo", "ptxo")
FIELDS = ("arg", "val")


class Script:
    """Base class of script nodes."""

    @cached_property
    def encoded(self) -> bytes:
        return codec.encode_node(self)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Script):
            return NotImplemented
        return self.encoded == other.encoded

    def __hash__(self) -> int:
        return hash(self.encoded)

    def __str__(self) -> str:
        from .syntax import to_text

        return to_text(self)


@dataclass(frozen=True, eq=False)
class Const(Script):
    value: Union[int, bytes]

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, (int, bytes)):
            raise TypeError(f"script constant must be int or bytes, got {self.value!r}")


@dataclass(frozen=True, eq=False)
class BinOp(Script):
    op: str
    left: Script
    right: Script

    def __post_init__(self) -> None:
        if self.op not in BINOPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True, eq=False)
class If(Script):
    cond: Script
    then: Script
    orelse: Script


@dataclass(frozen=True, eq=False)
class SeqAt(Script):
    """`e.n`: the n-th element (1-based) of a sequence; n is a literal."""

    seq: Script
    index: int

    def __post_init__(self) -> None:
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 0:
            raise ValueError(f"sequence index must be a non-negative literal, got {self.index!r}")


@dataclass(frozen=True, eq=False)
class RtxWit(Script):
    pass


@dataclass(frozen=True, eq=False)
class Size(Script):
    arg: Script


@dataclass(frozen=True, eq=False)
class Hash(Script):
    arg: Script


@dataclass(frozen=True, eq=False)
class Versig(Script):
    key: Script
    sig: Script


@dataclass(frozen=True)
class TxoSel:
    kind: str
    index: Script

    def __post_init__(self) -> None:
        if self.kind not in TXO_KINDS:
            raise ValueError(f"unknown output selector {self.kind!r}")


@dataclass(frozen=True, eq=False)
class TxoField(Script):
    txo: TxoSel
    field: str

    def __post_init__(self) -> None:
        if self.field not in FIELDS:
            raise ValueError(f"unknown output field {self.field!r}")


@dataclass(frozen=True, eq=False)
class Verscr(Script):
    """verscr(e, txo): compares txo's script with the literal `script`, which is never evaluated."""

    script: Script
    txo: TxoSel


@dataclass(frozen=True, eq=False)
class Verrec(Script):
    txo: TxoSel


@dataclass(frozen=True, eq=False)
class InIdx(Script):
    pass


@dataclass(frozen=True, eq=False)
class OutIdx(Script):
    pass


@dataclass(frozen=True, eq=False)
class InLen(Script):
    txo: TxoSel


@dataclass(frozen=True, eq=False)
class OutLen(Script):
    txo: TxoSel


@dataclass(frozen=True, eq=False)
class TxId(Script):
    txo: TxoSel


def script_eq(a: Script, b: Script) -> bool:
    return a.encoded == b.encoded


def children(e: Script) -> tuple[Script, ...]:
    """Immediate subexpressions that are evaluated (verscr's literal excluded)."""
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, If):
        return (e.cond, e.then, e.orelse)
    if isinstance(e, SeqAt):
        return (e.seq,)
    if isinstance(e, (Size, Hash)):
        return (e.arg,)
    if isinstance(e, Versig):
        return (e.key, e.sig)
    if isinstance(e, (TxoField, Verscr, Verrec, InLen, OutLen, TxId)):
        return (e.txo.index,)
    return ()


def node_count(e: Script) -> int:
    n = 1 + sum(node_count(c) for c in children(e))
    if isinstance(e, Verscr):
        n += node_count(e.script)
    return n


# Well-known scripts registered here are returned by the decoders in place of
# structurally equal copies, so identity comparisons hit the fast path.
_interned: dict[bytes, Script] = {}


def register(e: Script) -> Script:
    return _interned.setdefault(e.encoded, e)


def intern(e: Script) -> Script:
    return _interned.get(e.encoded, e)


def interned(encoded: bytes) -> Optional[Script]:
    """The registered script with this encoding, if any."""
    return _interned.get(encoded)


def rtxo(i: Union[int, Script]) -> TxoSel:
    return TxoSel("rtxo", i if isinstance(i, Script) else Const(i))


def stxo(i: Union[int, Script]) -> TxoSel:
    return TxoSel("stxo", i if isinstance(i, Script) else Const(i))


def ptxo(i: Union[int, Script]) -> TxoSel:
    return TxoSel("ptxo", i if isinstance(i, Script) else Const(i))


def ctxo() -> TxoSel:
    """ctxo is stxo(inidx): the output currently being redeemed."""
    return TxoSel("stxo", InIdx())
