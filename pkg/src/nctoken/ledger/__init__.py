from .chain import (
    Chain,
    DoubleSpend,
    ScriptFailed,
    UnknownInput,
    UnknownOutpoint,
    ValueCreated,
    resolve,
    utxo,
    validate_and_append,
)
from .tx import (
    MalformedTx,
    Outpoint,
    Transaction,
    TxOutput,
    ValidationError,
    canonical_serialize,
    parse_tx,
    txid_of,
)

__all__ = [
    "Chain", "DoubleSpend", "MalformedTx", "Outpoint", "ScriptFailed", "Transaction",
    "TxOutput", "UnknownInput", "UnknownOutpoint", "ValidationError", "ValueCreated",
    "canonical_serialize", "parse_tx", "resolve", "txid_of", "utxo", "validate_and_append",
]
