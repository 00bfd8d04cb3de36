"""Random runs mixing enabled honest actions with adversary directives."""
from __future__ import annotations

import random
from typing import Callable, Iterable, Optional

from ..ledger import Outpoint
from ..symbolic.config import BTC, Deposit
from ..token.builders import read_token
from ..token.scripts import is_btc_script, is_token_script
from .bundle import RunBundle
from .session import Allocation, Session

HONEST_USERS = ("A", "B", "C")
ADVERSARY = "M"
ADVERSARY_KINDS = ("forge-token", "arbitrary-spend", "spend-unmapped", "mint-unmapped",
                   "trade-unmapped", "wrong-signature", "garbage-broadcast", "bad-join")


def random_allocation(users: Iterable[str], rng: random.Random) -> list[Allocation]:
    alloc = []
    for u in users:
        for k in range(rng.randint(1, 3)):
            alloc.append(Allocation(f"{u}{k}z", u, 0))
        for k in range(rng.randint(1, 2)):
            alloc.append(Allocation(f"{u}{k}b", u, rng.randint(1, 20)))
    return alloc


class _Mover:
    def __init__(self, sess: Session, rng: random.Random, adversary: Optional[str]) -> None:
        self.s = sess
        self.rng = rng
        self.adv = adversary

    # views of the current state

    def deposits(self) -> list[Deposit]:
        return list(self.s.config.deposits)

    def unmapped_btc(self, owner: str) -> list[Outpoint]:
        pk = self.s.pks[owner]
        out = []
        for o in self.s.chain.utxo():
            txo = self.s.chain.resolve(o)
            if self.s.maps.name_at(o) is None and is_btc_script(txo.scr) and txo.arg == (pk,):
                out.append(o)
        return out

    def user(self) -> str:
        return self.rng.choice(self.s.users)

    # honest actions

    def honest_options(self) -> list[Callable[[], None]]:
        r, s = self.rng, self.s
        ds = self.deposits()
        opts: list[Callable[[], None]] = []
        zero = [d for d in ds if d.token == BTC and d.amount == 0]
        if zero:
            opts.append(lambda: s.gen(r.choice(zero).name, r.randint(1, 20)))
        if ds:
            d = r.choice(ds)
            opts.append(lambda: s.split(d.name, r.randint(0, d.amount), self.user()))
            g = r.choice(ds)
            opts.append(lambda: s.give(g.name, self.user()))
        pairs = [(a, b) for a in ds for b in ds if a.name < b.name and a.token == b.token]
        if pairs:
            a, b = r.choice(pairs)
            opts.append(lambda: s.join(a.name, b.name, self.user()))
        toks = [d for d in ds if d.token != BTC]
        if toks and len(ds) > 1:
            x = r.choice(toks)
            y = r.choice([d for d in ds if d.name != x.name])
            opts.append(lambda: s.xchg(x.name, y.name))
        if ds:
            btc = [d for d in ds if d.token == BTC]
            if len(btc) > 1 and r.random() < 0.5:
                xs = r.sample(btc, r.randint(2, min(3, len(btc))))
                opts.append(lambda: s.burn([d.name for d in xs]))
            else:
                b1 = r.choice(ds)
                opts.append(lambda: s.burn([b1.name]))
        return opts

    # adversary directives

    def adversary_move(self, kind: str) -> None:
        r, s, m = self.rng, self.s, self.adv
        own = [d for d in self.deposits() if d.owner == m]
        own_btc = [d.name for d in own if d.token == BTC]
        loose = [str(o) for o in self.unmapped_btc(m)]
        funds = own_btc + loose
        toks = [d for d in self.deposits() if d.token != BTC]
        others = [d for d in self.deposits() if d.owner != m]
        if kind == "forge-token" and toks and funds:
            s.forge_token(r.choice(toks).name, r.randint(1, 20), r.choice(funds), actor=m)
        elif kind == "arbitrary-spend" and funds:
            s.arbitrary_spend(r.sample(funds, r.randint(1, min(2, len(funds)))), actor=m)
        elif kind == "spend-unmapped" and loose:
            s.spend_unmapped(r.sample(loose, r.randint(1, min(2, len(loose)))), actor=m)
        elif kind == "mint-unmapped" and loose:
            zero = [o for o in loose if s.chain.resolve(Outpoint.parse(o)).val == 0]
            if zero:
                s.mint_unmapped(r.choice(zero), r.randint(1, 20), actor=m)
        elif kind == "trade-unmapped" and toks and loose:
            x = r.choice([d for d in toks if d.owner == m] or toks)
            if x.owner == m:
                s.trade_unmapped(x.name, r.choice(loose), pay_first=False)
            else:
                s.wrong_signature(x.name, actor=m)
        elif kind == "wrong-signature" and others:
            s.wrong_signature(r.choice(others).name, actor=m)
        elif kind == "bad-join":
            self.bad_join()
        else:
            s.garbage_broadcast(r.randint(0, 64), actor=m)

    def bad_join(self) -> None:
        """Join two token outputs with different tkids; the token script must refuse it."""
        s = self.s
        by_tkid: dict[bytes, list[Deposit]] = {}
        for d in self.deposits():
            if d.token != BTC:
                f = read_token(s.chain.resolve(s.maps.txout[d.name]))
                by_tkid.setdefault(f.tkid, []).append(d)
        groups = list(by_tkid.values())
        if len(groups) < 2:
            s.garbage_broadcast(8, actor=self.adv)
            return
        a, b = self.rng.sample(groups, 2)
        x, y = self.rng.choice(a), self.rng.choice(b)
        if s.attempt("join", x=x.name, y=y.name, to=x.owner):
            raise AssertionError("a join of different tokens was accepted")


def random_run(seed: int, steps: int, honest: Iterable[str] = HONEST_USERS,
               adversary: Optional[str] = ADVERSARY, adversary_mix: float = 0.3) -> RunBundle:
    """A seeded run of `steps` moves; each move is an adversary directive with
    probability `adversary_mix`, otherwise a uniformly chosen enabled honest action."""
    rng = random.Random(seed)
    honest = list(honest)
    users = honest + ([adversary] if adversary else [])
    sess = Session(users, honest, random_allocation(users, rng), seed)
    mover = _Mover(sess, rng, adversary)
    for i in range(steps):
        sess.move = i
        if adversary and rng.random() < adversary_mix:
            mover.adversary_move(rng.choice(ADVERSARY_KINDS))
            continue
        opts = mover.honest_options()
        if opts:
            rng.choice(opts)()
        elif adversary:
            sess.garbage_broadcast(rng.randint(0, 16), actor=adversary)
    return RunBundle.from_session(sess)
