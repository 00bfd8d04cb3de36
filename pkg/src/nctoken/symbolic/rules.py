"""Transition rules for token actions and for granting authorizations."""
from __future__ import annotations

from typing import Iterable, Iterator, Protocol

from .config import (
    BTC,
    Auth,
    Authorization,
    Burn,
    Configuration,
    Deposit,
    Gen,
    Give,
    Join,
    Label,
    Split,
    Xchg,
)


class RuleError(Exception):
    pass


class NoSuchDeposit(RuleError):
    pass


class MissingAuthorization(RuleError):
    pass


class NotOwner(RuleError):
    pass


class SideConditionViolated(RuleError):
    def __init__(self, rule: str, detail: str) -> None:
        super().__init__(f"[{rule}] {detail}")
        self.rule = rule


class FreshnessSource(Protocol):
    def name(self) -> str: ...

    def token(self) -> str: ...


class FreshNames:
    """Deterministic counter: x1, x2, ... for deposits and t1, t2, ... for tokens.

    Names listed in `taken` (and everything handed out before) are skipped.
    """

    def __init__(self, taken: Iterable[str] = (), name_prefix: str = "x", token_prefix: str = "t") -> None:
        self.taken = set(taken)
        self.name_prefix = name_prefix
        self.token_prefix = token_prefix
        self._n = 0
        self._t = 0

    def name(self) -> str:
        while True:
            self._n += 1
            s = f"{self.name_prefix}{self._n}"
            if s not in self.taken:
                self.taken.add(s)
                return s

    def token(self) -> str:
        while True:
            self._t += 1
            s = f"{self.token_prefix}{self._t}"
            if s not in self.taken:
                self.taken.add(s)
                return s


class FixedNames:
    """Replays a recorded sequence of fresh names (deposit names and tokens share the stream)."""

    def __init__(self, names: Iterable[str]) -> None:
        self._it: Iterator[str] = iter(names)

    def name(self) -> str:
        try:
            return next(self._it)
        except StopIteration:
            raise RuleError("ran out of recorded fresh names") from None

    token = name


class _Recorder:
    def __init__(self, src: FreshnessSource) -> None:
        self.src = src
        self.used: list[str] = []

    def name(self) -> str:
        s = self.src.name()
        self.used.append(s)
        return s

    def token(self) -> str:
        s = self.src.token()
        self.used.append(s)
        return s


def _dep(g: Configuration, x: str) -> Deposit:
    d = g.deposit(x)
    if d is None:
        raise NoSuchDeposit(f"no deposit named {x!r}")
    return d


def _require_auth(g: Configuration, a: Authorization) -> None:
    if g.auth_count(a) <= 0:
        raise MissingAuthorization(f"missing authorization {a}")


def _check_fresh(g: Configuration, s: str) -> None:
    if s in g.names() or s in g.tokens() or s in g.auth_names():
        raise SideConditionViolated("fresh", f"name {s!r} is not fresh")


def _burn_side(g: Configuration, xs: tuple[str, ...]) -> list[Deposit]:
    if not xs:
        raise SideConditionViolated("Burn", "nothing to burn")
    if len(set(xs)) != len(xs):
        raise SideConditionViolated("Burn", "repeated deposit")
    ds = [_dep(g, x) for x in xs]
    if len(ds) > 1 and any(d.token != BTC for d in ds):
        raise SideConditionViolated("Burn", "several deposits can be burnt together only if all hold bitcoin")
    return ds


def _two(g: Configuration, x: str, y: str, rule: str) -> tuple[Deposit, Deposit]:
    if x == y:
        raise SideConditionViolated(rule, "the two deposits must be distinct")
    return _dep(g, x), _dep(g, y)


def apply(g: Configuration, l: Label, fresh: FreshnessSource) -> tuple[Configuration, tuple[str, ...]]:
    """Fire label l in g.  Returns the new configuration and the fresh names it drew."""
    rec = _Recorder(fresh)
    g2 = _apply(g, l, rec)
    return g2, tuple(rec.used)


def step(g: Configuration, l: Label, fresh: FreshnessSource) -> Configuration:
    return apply(g, l, fresh)[0]


def _apply(g: Configuration, l: Label, fresh: _Recorder) -> Configuration:
    if isinstance(l, Auth):
        return _apply_auth(g, l)

    if isinstance(l, Gen):
        d = _dep(g, l.x)
        if d.token != BTC or d.amount != 0:
            raise SideConditionViolated("Gen", f"{l.x} is not a 0-valued bitcoin deposit")
        if l.v <= 0:
            raise SideConditionViolated("Gen", "minted value must be positive")
        a = Authorization(l.x, d.owner, l)
        _require_auth(g, a)
        y, t = fresh.name(), fresh.token()
        _check_fresh(g, y)
        _check_fresh(g, t)
        return g.replace(remove=[l.x], add=[Deposit(y, d.owner, l.v, t)], consume=[a])

    if isinstance(l, Burn):
        ds = _burn_side(g, l.xs)
        auths = [Authorization(d.name, d.owner, l) for d in ds]
        for a in auths:
            _require_auth(g, a)
        return g.replace(remove=l.xs, consume=auths)

    if isinstance(l, Split):
        d = _dep(g, l.x)
        rest = d.amount - l.v
        if l.v < 0 or rest < 0:
            raise SideConditionViolated("Split", "both parts must be non-negative")
        a = Authorization(l.x, d.owner, l)
        _require_auth(g, a)
        y, y2 = fresh.name(), fresh.name()
        for s in (y, y2):
            _check_fresh(g, s)
        return g.replace(remove=[l.x],
                         add=[Deposit(y, d.owner, l.v, d.token), Deposit(y2, l.to, rest, d.token)],
                         consume=[a])

    if isinstance(l, Join):
        dx, dy = _two(g, l.x, l.y, "Join")
        if dx.token != dy.token:
            raise SideConditionViolated("Join", "deposits hold different tokens")
        auths = [Authorization(l.x, dx.owner, l), Authorization(l.y, dy.owner, l)]
        for a in auths:
            _require_auth(g, a)
        z = fresh.name()
        _check_fresh(g, z)
        return g.replace(remove=[l.x, l.y], add=[Deposit(z, l.to, dx.amount + dy.amount, dx.token)],
                         consume=auths)

    if isinstance(l, Xchg):
        dx, dy = _two(g, l.x, l.y, "Exchange")
        if dx.token == BTC:
            raise SideConditionViolated("Exchange", "the first deposit must hold a user token")
        auths = [Authorization(l.x, dx.owner, l), Authorization(l.y, dy.owner, l)]
        for a in auths:
            _require_auth(g, a)
        x2, y2 = fresh.name(), fresh.name()
        for s in (x2, y2):
            _check_fresh(g, s)
        return g.replace(remove=[l.x, l.y],
                         add=[Deposit(x2, dx.owner, dy.amount, dy.token),
                              Deposit(y2, dy.owner, dx.amount, dx.token)],
                         consume=auths)

    if isinstance(l, Give):
        d = _dep(g, l.x)
        a = Authorization(l.x, d.owner, l)
        _require_auth(g, a)
        y = fresh.name()
        _check_fresh(g, y)
        return g.replace(remove=[l.x], add=[Deposit(y, l.to, d.amount, d.token)], consume=[a])

    raise TypeError(f"not a label: {l!r}")


def _owner_check(d: Deposit, user: str) -> None:
    if d.owner != user:
        raise NotOwner(f"{user} does not own {d.name}")


def check_auth(g: Configuration, l: Auth) -> None:
    """Raise if the authorization label l is not enabled in g."""
    inner = l.action
    if isinstance(inner, Gen):
        if l.z != inner.x:
            raise SideConditionViolated("AuthGen", "authorization must be attached to the spent deposit")
        d = _dep(g, inner.x)
        _owner_check(d, l.user)
        if d.token != BTC or d.amount != 0:
            raise SideConditionViolated("AuthGen", f"{inner.x} is not a 0-valued bitcoin deposit")
        if inner.v <= 0:
            raise SideConditionViolated("AuthGen", "minted value must be positive")
    elif isinstance(inner, Burn):
        ds = _burn_side(g, inner.xs)
        if l.z not in inner.xs:
            raise SideConditionViolated("AuthBurn", "authorization must be attached to a burnt deposit")
        _owner_check(ds[inner.xs.index(l.z)], l.user)
        y = inner.y
        if y in g.names() or y in inner.xs or y in g.tokens():
            raise SideConditionViolated("AuthBurn", f"name {y!r} is not fresh")
        for a in g.authorizations:
            if y in {a.name, *_names_of(a)} and not (isinstance(a.action, Burn) and a.action == inner):
                raise SideConditionViolated("AuthBurn", f"name {y!r} already used by another authorization")
    elif isinstance(inner, Split):
        if l.z != inner.x:
            raise SideConditionViolated("AuthSplit", "authorization must be attached to the split deposit")
        d = _dep(g, inner.x)
        _owner_check(d, l.user)
        if inner.v < 0 or d.amount - inner.v < 0:
            raise SideConditionViolated("AuthSplit", "both parts must be non-negative")
    elif isinstance(inner, (Join, Xchg)):
        rule = "AuthJoin" if isinstance(inner, Join) else "AuthExchange"
        dx, dy = _two(g, inner.x, inner.y, rule)
        if isinstance(inner, Join) and dx.token != dy.token:
            raise SideConditionViolated(rule, "deposits hold different tokens")
        if isinstance(inner, Xchg) and dx.token == BTC:
            raise SideConditionViolated(rule, "the first deposit must hold a user token")
        if l.z == inner.x:
            _owner_check(dx, l.user)
        elif l.z == inner.y:
            _owner_check(dy, l.user)
        else:
            raise SideConditionViolated(rule, "authorization must be attached to one of the deposits")
    elif isinstance(inner, Give):
        if l.z != inner.x:
            raise SideConditionViolated("AuthGive", "authorization must be attached to the given deposit")
        _owner_check(_dep(g, inner.x), l.user)
    else:
        raise TypeError(f"not an action: {inner!r}")


def _names_of(a: Authorization) -> set[str]:
    from .config import label_names

    return set(label_names(a.action))


def _apply_auth(g: Configuration, l: Auth) -> Configuration:
    check_auth(g, l)
    return g.replace(grant=[Authorization(l.z, l.user, l.action)])


def enabled_auth(g: Configuration, l: Auth) -> bool:
    try:
        check_auth(g, l)
    except RuleError:
        return False
    return True
