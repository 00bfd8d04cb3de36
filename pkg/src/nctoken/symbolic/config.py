"""Symbolic configurations: deposits, authorizations, and action labels."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

BTC = "BTC"


@dataclass(frozen=True, order=True)
class Deposit:
    name: str
    owner: str
    amount: int
    token: str

    def __post_init__(self) -> None:
        if isinstance(self.amount, bool) or not isinstance(self.amount, int) or self.amount < 0:
            raise ValueError(f"deposit amount must be a non-negative int, got {self.amount!r}")

    def __str__(self) -> str:
        return f"<{self.owner},{self.amount}:{self.token}>_{self.name}"


# action labels

@dataclass(frozen=True)
class Gen:
    x: str
    v: int

    def __str__(self) -> str:
        return f"gen({self.x},{self.v})"


@dataclass(frozen=True)
class Burn:
    xs: tuple[str, ...]
    y: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "xs", tuple(self.xs))

    def __str__(self) -> str:
        return f"burn({' '.join(self.xs)},{self.y})"


@dataclass(frozen=True)
class Split:
    x: str
    v: int
    to: str

    def __str__(self) -> str:
        return f"split({self.x},{self.v},{self.to})"


@dataclass(frozen=True)
class Join:
    x: str
    y: str
    to: str

    def __str__(self) -> str:
        return f"join({self.x},{self.y},{self.to})"


@dataclass(frozen=True)
class Xchg:
    x: str
    y: str

    def __str__(self) -> str:
        return f"xchg({self.x},{self.y})"


@dataclass(frozen=True)
class Give:
    x: str
    to: str

    def __str__(self) -> str:
        return f"give({self.x},{self.to})"


Action = Union[Gen, Burn, Split, Join, Xchg, Give]


@dataclass(frozen=True)
class Auth:
    """Label of the step granting `user`'s authorization, attached to name z, for `action`."""

    z: str
    user: str
    action: Action

    def __str__(self) -> str:
        return f"auth[{self.z},{self.user}]({self.action})"


Label = Union[Gen, Burn, Split, Join, Xchg, Give, Auth]

ACTION_TYPES = (Gen, Burn, Split, Join, Xchg, Give)


@dataclass(frozen=True)
class Authorization:
    name: str
    user: str
    action: Action

    def __str__(self) -> str:
        return f"{self.user}[{self.name}:{self.action}]"


def label_names(l: Label) -> tuple[str, ...]:
    """Every deposit name mentioned by a label (including a burn's target y)."""
    if isinstance(l, Auth):
        return (l.z,) + label_names(l.action)
    if isinstance(l, Gen):
        return (l.x,)
    if isinstance(l, Burn):
        return l.xs + (l.y,)
    if isinstance(l, (Split, Give)):
        return (l.x,)
    return (l.x, l.y)


def label_to_json(l: Label) -> dict:
    if isinstance(l, Auth):
        return {"kind": "auth", "z": l.z, "user": l.user, "action": label_to_json(l.action)}
    if isinstance(l, Gen):
        return {"kind": "gen", "x": l.x, "v": l.v}
    if isinstance(l, Burn):
        return {"kind": "burn", "xs": list(l.xs), "y": l.y}
    if isinstance(l, Split):
        return {"kind": "split", "x": l.x, "v": l.v, "to": l.to}
    if isinstance(l, Join):
        return {"kind": "join", "x": l.x, "y": l.y, "to": l.to}
    if isinstance(l, Xchg):
        return {"kind": "xchg", "x": l.x, "y": l.y}
    if isinstance(l, Give):
        return {"kind": "give", "x": l.x, "to": l.to}
    raise TypeError(f"not a label: {l!r}")


def label_from_json(j: dict) -> Label:
    k = j["kind"]
    if k == "auth":
        inner = label_from_json(j["action"])
        if isinstance(inner, Auth):
            raise ValueError("nested authorization label")
        return Auth(j["z"], j["user"], inner)
    if k == "gen":
        return Gen(j["x"], j["v"])
    if k == "burn":
        return Burn(tuple(j["xs"]), j["y"])
    if k == "split":
        return Split(j["x"], j["v"], j["to"])
    if k == "join":
        return Join(j["x"], j["y"], j["to"])
    if k == "xchg":
        return Xchg(j["x"], j["y"])
    if k == "give":
        return Give(j["x"], j["to"])
    raise ValueError(f"unknown label kind {k!r}")


class Configuration:
    """An immutable multiset of deposits and authorizations.

    Deposits are keyed by name (names are unique); authorizations may repeat.
    Equality is order-insensitive.
    """

    __slots__ = ("_deposits", "_auths", "_hash")

    def __init__(self, deposits: Iterable[Deposit] = (), auths: Iterable[Authorization] = ()) -> None:
        ds: dict[str, Deposit] = {}
        for d in deposits:
            if d.name in ds:
                raise ValueError(f"duplicate deposit name {d.name!r}")
            ds[d.name] = d
        self._deposits = ds
        self._auths = Counter(auths)
        self._hash: Optional[int] = None

    @classmethod
    def _make(cls, deposits: dict, auths: Counter) -> Configuration:
        g = cls.__new__(cls)
        g._deposits = deposits
        g._auths = auths
        g._hash = None
        return g

    @property
    def deposits(self) -> tuple[Deposit, ...]:
        return tuple(sorted(self._deposits.values()))

    @property
    def authorizations(self) -> tuple[Authorization, ...]:
        return tuple(sorted(self._auths.elements(), key=str))

    def deposit(self, name: str) -> Optional[Deposit]:
        return self._deposits.get(name)

    def auth_count(self, a: Authorization) -> int:
        return self._auths[a]

    def names(self) -> set[str]:
        return set(self._deposits)

    def auth_names(self) -> set[str]:
        """Names mentioned by authorizations (attachment points and label arguments)."""
        out = set()
        for a in self._auths:
            out.add(a.name)
            out.update(label_names(a.action))
        return out

    def tokens(self) -> set[str]:
        return {d.token for d in self._deposits.values()} - {BTC}

    def __iter__(self) -> Iterator[Union[Deposit, Authorization]]:
        yield from self.deposits
        yield from self.authorizations

    def __len__(self) -> int:
        return len(self._deposits) + sum(self._auths.values())

    def replace(self, remove: Iterable[str] = (), add: Iterable[Deposit] = (),
                consume: Iterable[Authorization] = (), grant: Iterable[Authorization] = ()) -> Configuration:
        ds = dict(self._deposits)
        for n in remove:
            del ds[n]
        for d in add:
            if d.name in ds:
                raise ValueError(f"duplicate deposit name {d.name!r}")
            ds[d.name] = d
        auths = Counter(self._auths)
        for a in consume:
            if auths[a] <= 0:
                raise KeyError(a)
            auths[a] -= 1
            if not auths[a]:
                del auths[a]
        for a in grant:
            auths[a] += 1
        return Configuration._make(ds, auths)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self._deposits == other._deposits and self._auths == other._auths

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._deposits.values()), frozenset(self._auths.items())))
        return self._hash

    def __str__(self) -> str:
        parts = [str(x) for x in self]
        return " | ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"Configuration({self})"

    def to_json(self) -> dict:
        return {
            "deposits": [
                {"name": d.name, "owner": d.owner, "amount": d.amount, "token": d.token}
                for d in self.deposits
            ],
            "auths": [
                {"name": a.name, "user": a.user, "action": label_to_json(a.action)}
                for a in self.authorizations
            ],
        }

    @classmethod
    def from_json(cls, j: dict) -> Configuration:
        return cls(
            (Deposit(d["name"], d["owner"], d["amount"], d["token"]) for d in j.get("deposits", [])),
            (Authorization(a["name"], a["user"], label_from_json(a["action"])) for a in j.get("auths", [])),
        )
