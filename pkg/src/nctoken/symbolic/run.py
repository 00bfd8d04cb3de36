"""Symbolic runs, token balances, and label inference."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .config import (
    BTC,
    ACTION_TYPES,
    Auth,
    Authorization,
    Burn,
    Configuration,
    Deposit,
    Gen,
    Label,
    label_from_json,
    label_names,
    label_to_json,
)
from .rules import FixedNames, FreshNames, FreshnessSource, RuleError, SideConditionViolated, apply


@dataclass(frozen=True)
class Step:
    label: Label
    fresh: tuple[str, ...]
    config: Configuration


class SymbolicRun:
    """An initial configuration (bitcoin deposits only) followed by labelled steps."""

    __slots__ = ("initial", "steps", "_seen")

    def __init__(self, initial: Configuration, steps: Iterable[Step] = (), _seen: Optional[frozenset] = None) -> None:
        if any(d.token != BTC for d in initial.deposits) or initial.authorizations:
            raise ValueError("an initial configuration holds only bitcoin deposits")
        self.initial = initial
        self.steps = tuple(steps)
        if _seen is None:
            seen = set(initial.names())
            for s in self.steps:
                seen.update(label_names(s.label))
                seen.update(s.fresh)
            _seen = frozenset(seen)
        self._seen = _seen

    @property
    def final(self) -> Configuration:
        return self.steps[-1].config if self.steps else self.initial

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(s.label for s in self.steps)

    def configs(self) -> list[Configuration]:
        return [self.initial] + [s.config for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def fresh_source(self) -> FreshNames:
        return FreshNames(self._seen)

    def extend(self, label: Label, fresh: Optional[FreshnessSource] = None) -> SymbolicRun:
        """Fire `label` at the end of the run; fresh names default to a run-wide counter."""
        if fresh is None:
            fresh = self.fresh_source()
        if isinstance(label, Auth) and isinstance(label.action, Burn):
            y = label.action.y
            shared = any(a.action == label.action for a in self.final.authorizations)
            if not shared and y in self._seen:
                raise SideConditionViolated("AuthBurn", f"name {y!r} was already used in the run")
        g2, used = apply(self.final, label, fresh)
        for s in used:
            if s in self._seen:
                raise SideConditionViolated("fresh", f"name {s!r} was already used in the run")
        seen = self._seen | set(used) | set(label_names(label))
        return SymbolicRun(self.initial, self.steps + (Step(label, used, g2),), frozenset(seen))

    def prefix(self, n: int) -> SymbolicRun:
        return SymbolicRun(self.initial, self.steps[:n])

    def to_json(self) -> dict:
        return {
            "initial": self.initial.to_json(),
            "steps": [{"label": label_to_json(s.label), "fresh": list(s.fresh)} for s in self.steps],
        }

    @classmethod
    def from_json(cls, j: dict) -> SymbolicRun:
        run = cls(Configuration.from_json(j["initial"]))
        for s in j["steps"]:
            run = run.extend(label_from_json(s["label"]), FixedNames(s["fresh"]))
        return run

    def __repr__(self) -> str:
        return f"SymbolicRun({len(self.steps)} steps, final={self.final})"


def initial_run(deposits: Iterable[Deposit]) -> SymbolicRun:
    return SymbolicRun(Configuration(deposits))


def tokval_s(t: str, g: Configuration) -> int:
    if t == BTC:
        raise ValueError("token balance is defined for user tokens only")
    return sum(d.amount for d in g.deposits if d.token == t)


def minted_token(step: Step) -> Optional[str]:
    """The token introduced by a gen step (its second fresh name)."""
    if isinstance(step.label, Gen):
        return step.fresh[1]
    return None


def genval(t: str, run: SymbolicRun) -> int:
    prev = run.initial
    for s in run.steps:
        if isinstance(s.label, Gen) and t in s.config.tokens() and t not in prev.tokens():
            return s.label.v
        prev = s.config
    return 0


def burnval(t: str, run: SymbolicRun) -> int:
    """Units of t destroyed by burn steps (each burn step counted separately)."""
    total = 0
    prev = run.initial
    for s in run.steps:
        if isinstance(s.label, Burn):
            for x in s.label.xs:
                d = prev.deposit(x)
                if d is not None and d.token == t:
                    total += d.amount
        prev = s.config
    return total


class NoneFound(Exception):
    pass


class AmbiguityError(Exception):
    pass


class _Placeholders:
    def __init__(self) -> None:
        self.used: list[str] = []

    def name(self) -> str:
        s = f"\x00fresh{len(self.used)}"
        self.used.append(s)
        return s

    token = name


def _rename_config(g: Configuration, m: dict[str, str]) -> Configuration:
    def r(s: str) -> str:
        return m.get(s, s)

    return Configuration(
        (Deposit(r(d.name), r(d.owner), d.amount, r(d.token)) for d in g.deposits),
        g.authorizations,
    )


def _candidates(g: Configuration, g2: Configuration) -> list[Label]:
    cands: list[Label] = []
    seen = set()
    for a in g.authorizations:
        if a.action not in seen:
            seen.add(a.action)
            cands.append(a.action)
    for a in g2.authorizations:
        if g2.auth_count(a) > g.auth_count(a):
            lab = Auth(a.name, a.user, a.action)
            if lab not in seen:
                seen.add(lab)
                cands.append(lab)
    return cands


def infer_label(g: Configuration, g2: Configuration) -> Label:
    """The unique label l with g --l--> g2, up to renaming of the fresh names."""
    new_names = sorted((g2.names() - g.names()) | (g2.tokens() - g.tokens()))
    found: list[Label] = []
    for lab in _candidates(g, g2):
        ph = _Placeholders()
        try:
            r, used = apply(g, lab, ph)
        except RuleError:
            continue
        if len(used) != len(new_names):
            continue
        for perm in itertools.permutations(new_names):
            if _rename_config(r, dict(zip(used, perm))) == g2:
                found.append(lab)
                break
    if not found:
        raise NoneFound("no enabled label leads to the target configuration")
    if len(set(found)) > 1:
        raise AmbiguityError(f"several labels lead to the target: {', '.join(map(str, found))}")
    return found[0]


def _canon_label(l: Label, m: dict[str, str]) -> Label:
    r = lambda s: m.get(s, s)  # noqa: E731
    from .config import Give, Join, Split, Xchg

    if isinstance(l, Auth):
        return Auth(r(l.z), r(l.user), _canon_label(l.action, m))
    if isinstance(l, Gen):
        return Gen(r(l.x), l.v)
    if isinstance(l, Burn):
        return Burn(tuple(r(x) for x in l.xs), r(l.y))
    if isinstance(l, Split):
        return Split(r(l.x), l.v, l.to)
    if isinstance(l, Join):
        return Join(r(l.x), r(l.y), l.to)
    if isinstance(l, Xchg):
        return Xchg(r(l.x), r(l.y))
    if isinstance(l, Give):
        return Give(r(l.x), l.to)
    raise TypeError(l)


def _canon_config(g: Configuration, m: dict[str, str]) -> Configuration:
    r = lambda s: m.get(s, s)  # noqa: E731
    return Configuration(
        (Deposit(r(d.name), d.owner, d.amount, r(d.token)) for d in g.deposits),
        (Authorization(r(a.name), a.user, _canon_label(a.action, m)) for a in g.authorizations),
    )


def canonical_form(run: SymbolicRun) -> tuple:
    """Labels and configurations with every generated name replaced by its order of appearance."""
    m: dict[str, str] = {}
    known = set(run.initial.names())
    out = []
    for s in run.steps:
        for n in label_names(s.label):
            if n not in known and n not in m:
                m[n] = f"#{len(m)}"
        for n in s.fresh:
            m[n] = f"#{len(m)}"
        out.append((_canon_label(s.label, m), _canon_config(s.config, m)))
    return (run.initial, tuple(out))


def alpha_equivalent(a: SymbolicRun, b: SymbolicRun) -> bool:
    return canonical_form(a) == canonical_form(b)


def is_action(l: Label) -> bool:
    return isinstance(l, ACTION_TYPES)
