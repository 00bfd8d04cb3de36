"""Scenario files: users, a coinbase allocation, and an ordered list of moves.

Example::

    {"users": ["A", "B", "M"], "honest": ["A", "B"],
     "coinbase": [{"name": "a0", "owner": "A", "amount": 0}],
     "moves": [{"do": "gen", "x": "a0", "v": 10, "token": "t", "as": ["x1"]}],
     "expect": {"deposits": {"x1": ["A", 10, "t"]}, "balances": {"t": 10}}}

Outputs are referred to by alias (set with "as", one per output of the move's
transaction), by symbolic deposit name, or as txid:index.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Union

from ..symbolic.run import tokval_s
from ..token.balance import tokval_c
from .session import Allocation, ScenarioError, Session

HONEST_MOVES = ("gen", "split", "join", "xchg", "give", "burn")
ADVERSARY_MOVES = ("forge-token", "arbitrary-spend", "spend-unmapped", "mint-unmapped",
                   "trade-unmapped", "wrong-signature", "garbage-broadcast", "attempt")

_ARGS = {
    "gen": ("x", "v", "token"),
    "split": ("x", "v", "to"),
    "join": ("x", "y", "to"),
    "xchg": ("x", "y"),
    "give": ("x", "to"),
    "burn": ("xs",),
    "forge-token": ("like", "v", "from", "actor"),
    "arbitrary-spend": ("xs", "actor"),
    "spend-unmapped": ("xs", "actor"),
    "mint-unmapped": ("x", "v", "actor"),
    "trade-unmapped": ("x", "pay", "pay_first"),
    "wrong-signature": ("x", "actor"),
    "garbage-broadcast": ("size", "actor"),
}
_RENAME = {"from": "from_", "as": "as_"}


def load_scenario(path: Union[str, Path]) -> dict:
    with open(path) as fh:
        return json.load(fh)


def new_session(s: dict, seed: int = 0) -> Session:
    try:
        alloc = [Allocation(a["name"], a["owner"], int(a["amount"])) for a in s.get("coinbase", [])]
        return Session(s["users"], s.get("honest", s["users"]), alloc, seed)
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(None, f"malformed scenario header: {e}") from None


def apply_move(sess: Session, i: int, mv: dict) -> None:
    sess.move = i
    kind = mv.get("do")
    if kind == "attempt":
        args = {k: v for k, v in mv.items() if k not in ("do", "action", "signers", "as", "expect")}
        sess.attempt(mv["action"], mv.get("signers"), mv.get("as"), **args)
    else:
        if kind not in _ARGS:
            raise ScenarioError(i, f"unknown move {kind!r}")
        allowed = set(_ARGS[kind]) | {"do", "as", "expect"}
        extra = set(mv) - allowed
        if extra:
            raise ScenarioError(i, f"unexpected fields {sorted(extra)} for {kind}")
        kw = {_RENAME.get(k, k): v for k, v in mv.items() if k not in ("do", "expect")}
        method: Callable[..., Any] = getattr(sess, kind.replace("-", "_"))
        try:
            method(**kw)
        except TypeError as e:
            raise ScenarioError(i, f"bad arguments for {kind}: {e}") from None
    if "expect" in mv:
        fails = check_expectations(sess, mv["expect"])
        if fails:
            raise ScenarioError(i, "; ".join(fails))


def check_expectations(sess: Session, exp: dict) -> list[str]:
    """Compare the current state against expected deposits, absences and balances."""
    fails = []
    g = sess.config
    for alias, (owner, amount, token) in exp.get("deposits", {}).items():
        o = sess.aliases.get(alias)
        name = sess.maps.name_at(o) if o is not None else None
        d = g.deposit(name) if name is not None else None
        want = (owner, amount, sess.token_of(token))
        if d is None:
            fails.append(f"deposit {alias} is missing")
        elif (d.owner, d.amount, d.token) != want:
            fails.append(f"deposit {alias} is {d.owner},{d.amount}:{d.token}, expected {owner},{amount}:{token}")
    for alias in exp.get("absent", []):
        o = sess.aliases.get(alias)
        if o is not None and sess.maps.name_at(o) is not None:
            fails.append(f"deposit {alias} should be gone")
    for token, amount in exp.get("balances", {}).items():
        t = sess.token_of(token)
        s = tokval_s(t, g)
        src = sess.maps.tkid.get(t)
        c = tokval_c(sess.chain, src) if src is not None else 0
        if (s, c) != (amount, amount):
            fails.append(f"balance of {token}: symbolic {s}, computational {c}, expected {amount}")
    if "rejected" in exp and len(sess.rejected) != exp["rejected"]:
        fails.append(f"{len(sess.rejected)} rejected transactions, expected {exp['rejected']}")
    return fails


def execute_scenario(s: dict, seed: int = 0):
    from .bundle import RunBundle

    sess = new_session(s, seed)
    for i, mv in enumerate(s.get("moves", [])):
        apply_move(sess, i, mv)
    fails = check_expectations(sess, s.get("expect", {}))
    return RunBundle.from_session(sess, expectation_failures=fails)
