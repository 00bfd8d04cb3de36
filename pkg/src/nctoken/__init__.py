"""Fungible tokens on a UTXO ledger with neighbourhood covenants."""

__version__ = "0.1.0"
