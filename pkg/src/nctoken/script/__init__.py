from .ast import (
    BinOp,
    Const,
    Hash,
    If,
    InIdx,
    InLen,
    OutIdx,
    OutLen,
    RtxWit,
    Script,
    SeqAt,
    Size,
    TxId,
    TxoField,
    TxoSel,
    Verrec,
    Verscr,
    Versig,
    ctxo,
    ptxo,
    rtxo,
    script_eq,
    stxo,
)
from .codec import DecodeError, serialize_script
from .evaluator import EvalCtx, evaluate
from .reference import reference_eval
from .syntax import ParseError, parse_script, parse_text, to_text
from .values import BOTTOM, Value

__all__ = [
    "BOTTOM", "BinOp", "Const", "DecodeError", "EvalCtx", "Hash", "If", "InIdx",
    "InLen", "OutIdx", "OutLen", "ParseError", "RtxWit", "Script", "SeqAt", "Size",
    "TxId", "TxoField", "TxoSel", "Value", "Verrec", "Verscr", "Versig", "ctxo",
    "evaluate", "parse_script", "parse_text", "ptxo", "reference_eval", "rtxo",
    "script_eq", "serialize_script", "stxo", "to_text",
]
