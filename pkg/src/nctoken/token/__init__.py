from .balance import token_balances, tokval_c
from .builders import (
    BuildError,
    FirstInputNotToken,
    InsufficientUnits,
    Keyring,
    MissingKey,
    MixedAsset,
    MixedBurn,
    NonPositiveMint,
    NonZeroValue,
    NotBtcDeposit,
    TokenFields,
    TokenMismatch,
    UnknownDeposit,
    btc_output,
    build_burn,
    build_gen,
    build_give,
    build_join,
    build_split,
    build_xchg,
    owner_of,
    read_token,
    sign_inputs,
    tkid_of,
    token_output,
)
from .scripts import E_BTC, E_FALSE, E_TOK, e_btc, e_false, e_tok

__all__ = [
    "BuildError", "E_BTC", "E_FALSE", "E_TOK", "FirstInputNotToken", "InsufficientUnits", "Keyring",
    "MissingKey", "MixedAsset", "MixedBurn", "NonPositiveMint", "NonZeroValue", "NotBtcDeposit",
    "TokenFields", "TokenMismatch", "UnknownDeposit", "btc_output", "build_burn", "build_gen",
    "build_give", "build_join", "build_split", "build_xchg", "e_btc", "e_false", "e_tok", "owner_of",
    "read_token", "sign_inputs", "tkid_of", "token_balances", "token_output", "tokval_c",
]
