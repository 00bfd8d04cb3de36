"""Runtime values of the script language and the primitive operations on them.

A value is an int (unbounded), bytes, a tuple (sequence of ints/bytes), or
BOTTOM.  Every choice the language leaves open is made here, in one place.
"""
from __future__ import annotations

from typing import Union

from ..crypto import hash_bytes
from .codec import int_to_bytes


class _Bottom:
    _instance = None

    def __new__(cls) -> _Bottom:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BOTTOM"

    def __bool__(self) -> bool:
        raise TypeError("BOTTOM has no truth value; test with `is BOTTOM`")

    def __reduce__(self) -> str:
        return "BOTTOM"


BOTTOM = _Bottom()

Value = Union[int, bytes, tuple, _Bottom]


def is_value(v: object) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, (int, bytes)):
        return True
    if isinstance(v, tuple):
        return all(isinstance(x, (int, bytes)) and not isinstance(x, bool) for x in v)
    return False


def equal(a: Value, b: Value) -> int:
    """`=`: structural equality; values of different kinds are unequal (0), not BOTTOM."""
    return 1 if type(a) is type(b) and a == b else 0


def less(a: Value, b: Value) -> Value:
    """`<` is defined on integers only."""
    if type(a) is int and type(b) is int:
        return 1 if a < b else 0
    return BOTTOM


def add(a: Value, b: Value) -> Value:
    if type(a) is int and type(b) is int:
        return a + b
    return BOTTOM


def sub(a: Value, b: Value) -> Value:
    if type(a) is int and type(b) is int:
        return a - b
    return BOTTOM


def truthy(v: Value) -> bool:
    """Every defined value other than the integer 0 counts as true."""
    return not (type(v) is int and v == 0)


def size(v: Value) -> Value:
    if type(v) is bytes:
        return len(v)
    if type(v) is int:
        return len(int_to_bytes(v))
    return BOTTOM


def hash_value(v: Value) -> Value:
    if type(v) is bytes:
        return hash_bytes(v)
    if type(v) is int:
        return hash_bytes(int_to_bytes(v))
    return BOTTOM


def seq_at(v: Value, n: int) -> Value:
    if type(v) is tuple and 1 <= n <= len(v):
        return v[n - 1]
    return BOTTOM
