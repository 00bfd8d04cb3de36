"""Executing moves: every step updates the symbolic run, the computational run,
and the coherence checker in lockstep.

Honest moves broadcast one signature per input (the owner's authorization)
before appending the transaction.  Adversary directives build transactions the
token protocol does not produce; those spending mapped deposits are matched to
the symbolic action (or burn) they implement, the others leave the symbolic
run unchanged.  Transactions that fail validation are recorded as rejections
and never reach the computational run.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from ..coherence.checker import Checker, CoherenceReport, MapInvariantBroken, MismatchAt, check_coherence
from ..coherence.comp import Append, Broadcast, CoherenceMaps, ComputationalRun, SignatureMessage
from ..coherence.items import ItemFailed, burn_target, check_action, classify_action, classify_burn
from ..coherence.reconstruct import _fresh_for, token_name
from ..crypto import KeyPair, sign
from ..ledger import Chain, Outpoint, Transaction, TxOutput, UnknownOutpoint, ValidationError
from ..symbolic.config import BTC, Action, Auth, Burn, Configuration, Deposit, Gen, Give, Join, Split, Xchg
from ..symbolic.rules import FixedNames, RuleError
from ..symbolic.run import SymbolicRun
from ..token import builders as tb
from ..token.builders import BuildError, Keyring, owner_of, read_token
from ..token.scripts import E_BTC, E_TOK, OP_GEN, is_btc_script, is_token_script


class ScenarioError(Exception):
    def __init__(self, move: Optional[int], message: str) -> None:
        super().__init__(f"move {move}: {message}" if move is not None else message)
        self.move = move
        self.message = message


@dataclass(frozen=True)
class Rejection:
    move: Optional[int]
    kind: str
    error: str

    def to_json(self) -> dict:
        return {"move": self.move, "kind": self.kind, "error": self.error}


def user_key(name: str) -> KeyPair:
    return KeyPair.derive("user:" + name)


@dataclass(frozen=True)
class Allocation:
    name: str
    owner: str
    amount: int


def make_coinbase(users: Mapping[str, bytes], alloc: Iterable[Allocation]) -> Transaction:
    outs = tuple(TxOutput((users[a.owner],), E_BTC, a.amount) for a in alloc)
    if not outs:
        raise ScenarioError(None, "the coinbase needs at least one output")
    return Transaction((), (), outs)


class Session:
    def __init__(self, users: Iterable[str], honest: Iterable[str], alloc: Iterable[Allocation],
                 seed: int = 0) -> None:
        self.users = list(users)
        self.honest = [u for u in honest]
        unknown = set(self.honest) - set(self.users)
        if unknown:
            raise ScenarioError(None, f"honest users {sorted(unknown)} are not users")
        self.adversaries = [u for u in self.users if u not in self.honest]
        self.keys = {u: user_key(u) for u in self.users}
        self.ring = Keyring(self.keys.values())
        self.pks = {u: k.public_key for u, k in self.keys.items()}
        self.seed = seed
        self.rng = random.Random(seed)
        alloc = list(alloc)
        for a in alloc:
            if a.owner not in self.pks:
                raise ScenarioError(None, f"coinbase output {a.name} owned by unknown user {a.owner}")
        self.coinbase = make_coinbase(self.pks, alloc)
        deposits = [Deposit(a.name, a.owner, a.amount, BTC) for a in alloc]
        self.m0 = CoherenceMaps({a.name: self.coinbase.outpoint(i) for i, a in enumerate(alloc, 1)})
        self.run = SymbolicRun(Configuration(deposits))
        self.labels: list = []
        self.rc = ComputationalRun(self.coinbase, (), self.pks)
        self.checker = Checker(self.run, self.rc, self.m0)
        self.aliases: dict[str, Outpoint] = {a.name: self.coinbase.outpoint(i) for i, a in enumerate(alloc, 1)}
        self.token_aliases: dict[str, str] = {}
        self.rejected: list[Rejection] = []
        self.move = 0

    # state access

    @property
    def chain(self) -> Chain:
        return self.checker.chain

    @property
    def maps(self) -> CoherenceMaps:
        return self.checker.maps

    @property
    def config(self) -> Configuration:
        return self.run.final

    def ref(self, r: str) -> Outpoint:
        """An outpoint named by alias, by symbolic deposit name, or written as txid:index."""
        if r in self.aliases:
            return self.aliases[r]
        if r in self.maps.txout:
            return self.maps.txout[r]
        try:
            o = Outpoint.parse(r)
        except ValueError:
            raise ScenarioError(self.move, f"unknown output {r!r}") from None
        if not self.chain.contains(o):
            raise ScenarioError(self.move, f"unknown output {r!r}")
        return o

    def name_of(self, r: str) -> str:
        n = self.maps.name_at(self.ref(r))
        if n is None:
            raise ScenarioError(self.move, f"{r!r} is not a symbolic deposit")
        return n

    def token_of(self, r: str) -> str:
        if r in self.token_aliases:
            return self.token_aliases[r]
        return r

    def _bind_aliases(self, T: Transaction, names: Optional[Iterable[str]]) -> None:
        for i, a in enumerate(names or (), 1):
            if i > len(T.outputs):
                raise ScenarioError(self.move, f"alias {a!r} for a missing output")
            self.aliases[a] = T.outpoint(i)

    # emitting labels

    def _emit(self, lab, sym=None, fresh: tuple[str, ...] = ()) -> None:
        if sym is not None:
            try:
                self.run = self.run.extend(sym, FixedNames(fresh))
            except RuleError as e:
                raise ScenarioError(self.move, f"symbolic step {sym} not enabled: {e}") from None
            self.checker.rs = self.run
        try:
            self.checker.feed(len(self.labels), lab)
        except (MismatchAt, MapInvariantBroken) as e:
            raise ScenarioError(self.move, f"coherence lost: {e}") from None
        self.labels.append(lab)

    def _validate(self, T: Transaction, kind: str) -> bool:
        try:
            self.chain.check(T)
        except ValidationError as e:
            self.rejected.append(Rejection(self.move, kind, f"{type(e).__name__}: {e}"))
            return False
        return True

    def _perform(self, label: Action, T: Transaction) -> None:
        """Broadcast the owners' authorizations for every mapped input, then append."""
        st = self.checker.state()
        try:
            item = check_action(label, T, st)
        except ItemFailed as e:
            raise ScenarioError(self.move, f"transaction does not implement {label}: {e}") from None
        fresh = _fresh_for(label, T, item, st)
        for k, o in enumerate(T.inputs, 1):
            z = st.maps.name_at(o)
            if z is None:
                continue
            owner = st.config.deposit(z).owner
            msg = SignatureMessage(T.stripped(), k, T.witnesses[k - 1][0])
            self._emit(Broadcast(owner, msg.encode()), Auth(z, owner, label))
        self._emit(Append(T), label, fresh)

    def submit(self, T: Transaction, kind: str, expected: Optional[Action] = None) -> bool:
        """Validate T, match it to the symbolic action it implements, and perform it."""
        if not self._validate(T, kind):
            return False
        st = self.checker.state()
        if not any(st.maps.name_at(o) is not None for o in T.inputs):
            self._emit(Append(T))
            return True
        hit = classify_action(T, st)
        if hit is not None:
            label = hit[0]
        else:
            burn = classify_burn(T, st)
            if burn is None:
                raise ScenarioError(self.move, f"{kind}: transaction spends deposits but implements no action")
            label = Burn(burn[0], burn_target(T))
        if expected is not None and type(label) is not type(expected):
            raise ScenarioError(self.move, f"{kind}: expected {expected}, transaction implements {label}")
        self._perform(label, T)
        return True

    # honest moves

    def _build(self, fn, *args, **kw) -> Transaction:
        try:
            return fn(self.chain, *args, keys=self.ring, **kw)
        except (BuildError, UnknownOutpoint) as e:
            raise ScenarioError(self.move, f"{type(e).__name__}: {e}") from None

    def gen(self, x: str, v: int, token: Optional[str] = None, as_: Optional[list] = None) -> Transaction:
        o = self.ref(x)
        T = self._build(tb.build_gen, o, v)
        self._action(Gen(self.name_of(x), v), T, as_)
        if token is not None:
            self.token_aliases[token] = token_name(o)
        return T

    def split(self, x: str, v: int, to: str, as_=None) -> Transaction:
        T = self._build(tb.build_split, self.ref(x), v, self._pk(to))
        self._action(Split(self.name_of(x), v, to), T, as_)
        return T

    def join(self, x: str, y: str, to: str, as_=None) -> Transaction:
        T = self._build(tb.build_join, self.ref(x), self.ref(y), self._pk(to))
        self._action(Join(self.name_of(x), self.name_of(y), to), T, as_)
        return T

    def xchg(self, x: str, y: str, as_=None) -> Transaction:
        T = self._build(tb.build_xchg, self.ref(x), self.ref(y))
        self._action(Xchg(self.name_of(x), self.name_of(y)), T, as_)
        return T

    def give(self, x: str, to: str, as_=None) -> Transaction:
        T = self._build(tb.build_give, self.ref(x), self._pk(to))
        self._action(Give(self.name_of(x), to), T, as_)
        return T

    def burn(self, xs: list[str], as_=None) -> Transaction:
        T = self._build(tb.build_burn, [self.ref(x) for x in xs])
        self._action(Burn(tuple(self.name_of(x) for x in xs), burn_target(T)), T, as_)
        return T

    def _pk(self, user: str) -> bytes:
        if user not in self.pks:
            raise ScenarioError(self.move, f"unknown user {user!r}")
        return self.pks[user]

    def _action(self, label: Action, T: Transaction, as_) -> None:
        if not self._validate(T, str(label)):
            raise ScenarioError(self.move, f"{label} rejected: {self.rejected[-1].error}")
        self._perform(label, T)
        self._bind_aliases(T, as_)

    # adversary directives

    def _adversary(self, actor: Optional[str]) -> str:
        if actor is not None:
            return actor
        if not self.adversaries:
            raise ScenarioError(self.move, "no adversary among the users")
        return self.adversaries[0]

    def _signed(self, inputs: list[Outpoint], outputs: list[TxOutput], signer: KeyPair) -> Transaction:
        T = Transaction(tuple(inputs), tuple(() for _ in inputs), tuple(outputs))
        sig = sign(signer.secret_key, T)
        return T.with_witnesses([(sig,) for _ in inputs])

    def forge_token(self, like: str, v: int, from_: str, actor=None, as_=None) -> bool:
        """Mint units carrying the tkid of an existing token without spending its source."""
        m = self._adversary(actor)
        src = self.chain.resolve(self.ref(like))
        f = read_token(src)
        if f is None:
            raise ScenarioError(self.move, f"{like!r} holds no token")
        out = TxOutput((OP_GEN, self.pks[m], v, f.tkid), E_TOK, 0)
        T = self._signed([self.ref(from_)], [out], self.keys[m])
        ok = self.submit(T, "forge-token")
        if ok:
            self._bind_aliases(T, as_)
        return ok

    def arbitrary_spend(self, xs: list[str], actor=None, as_=None) -> bool:
        """Spend bitcoin outputs into three outputs, a shape no token action has."""
        m = self._adversary(actor)
        ins = [self.ref(x) for x in xs]
        total = sum(self.chain.resolve(o).val for o in ins)
        parts = [total - total // 2, total // 2, 0]
        outs = [TxOutput((self.pks[m],), E_BTC, p) for p in parts]
        T = self._signed(ins, outs, self.keys[m])
        ok = self.submit(T, "arbitrary-spend")
        if ok:
            self._bind_aliases(T, as_)
        return ok

    def spend_unmapped(self, xs: list[str], actor=None, as_=None) -> bool:
        m = self._adversary(actor)
        ins = [self.ref(x) for x in xs]
        total = sum(self.chain.resolve(o).val for o in ins)
        T = self._signed(ins, [TxOutput((self.pks[m],), E_BTC, total)], self.keys[m])
        ok = self.submit(T, "spend-unmapped")
        if ok:
            self._bind_aliases(T, as_)
        return ok

    def mint_unmapped(self, x: str, v: int, actor=None, as_=None) -> bool:
        """Mint a token from an output with no symbolic counterpart."""
        T = self._build(tb.build_gen, self.ref(x), v)
        ok = self.submit(T, "mint-unmapped")
        if ok:
            self._bind_aliases(T, as_)
        return ok

    def trade_unmapped(self, x: str, pay: str, pay_first: bool = False, as_=None) -> bool:
        """Exchange a deposit for an output with no symbolic counterpart (a give symbolically)."""
        a, b = (self.ref(pay), self.ref(x)) if pay_first else (self.ref(x), self.ref(pay))
        T = self._build(tb.build_xchg, a, b)
        ok = self.submit(T, "trade-unmapped", expected=Give("", ""))
        if ok:
            self._bind_aliases(T, as_)
        return ok

    def wrong_signature(self, x: str, actor=None) -> bool:
        """Try to redeem someone else's output with the adversary's key; must be rejected."""
        m = self._adversary(actor)
        o = self.ref(x)
        T = self._build(tb.build_give, o, self.pks[m], sign=False)
        T = T.with_witnesses([(sign(self.keys[m].secret_key, T),)])
        if self.submit(T, "wrong-signature"):
            raise ScenarioError(self.move, "a transaction signed with the wrong key was accepted")
        return False

    def garbage_broadcast(self, size: int = 32, actor=None) -> None:
        m = self._adversary(actor)
        self._emit(Broadcast(m, self.rng.randbytes(size)))

    def attempt(self, action: str, signers: Optional[list[str]] = None, as_=None, **args: Any) -> bool:
        """Build a token transaction without the builders' checks, sign it with the
        input owners' keys, and submit it; rejection is recorded, not raised."""
        fn = {
            "gen": lambda: tb.build_gen(self.chain, self.ref(args["x"]), args["v"], sign=False),
            "split": lambda: tb.build_split(self.chain, self.ref(args["x"]), args["v"], self._pk(args["to"]),
                                            sign=False),
            "join": lambda: tb.build_join(self.chain, self.ref(args["x"]), self.ref(args["y"]),
                                          self._pk(args["to"]), sign=False, check_tokens=False),
            "xchg": lambda: tb.build_xchg(self.chain, self.ref(args["x"]), self.ref(args["y"]), sign=False),
            "give": lambda: tb.build_give(self.chain, self.ref(args["x"]), self._pk(args["to"]), sign=False),
            "burn": lambda: tb.build_burn(self.chain, [self.ref(x) for x in args["xs"]], sign=False),
        }.get(action)
        if fn is None:
            raise ScenarioError(self.move, f"unknown action {action!r}")
        try:
            T = fn()
            if signers is None:
                T = tb.sign_inputs(self.chain, T, self.ring)
            else:
                ks = [self.keys[s] for s in signers]
                T = T.with_witnesses([(sign(k.secret_key, T),) for k in ks])
        except (BuildError, KeyError, UnknownOutpoint) as e:
            raise ScenarioError(self.move, f"{type(e).__name__}: {e}") from None
        ok = self.submit(T, f"attempt-{action}")
        if ok:
            self._bind_aliases(T, as_)
        return ok

    # results

    def report(self) -> CoherenceReport:
        return check_coherence(self.run, self.computational(), self.m0)

    def computational(self) -> ComputationalRun:
        return ComputationalRun(self.coinbase, tuple(self.labels), self.pks)
