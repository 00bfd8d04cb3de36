"""Random symbolic runs: enabled actions, each preceded by the authorizations it needs."""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .config import BTC, Action, Auth, Burn, Configuration, Deposit, Gen, Give, Join, Split, Xchg
from .run import SymbolicRun

USERS = ("A", "B", "C")


def random_initial(rng: random.Random, users: Sequence[str] = USERS) -> Configuration:
    ds = []
    for i in range(rng.randint(1, 6)):
        amount = 0 if rng.random() < 0.5 else rng.randint(1, 20)
        ds.append(Deposit(f"d{i}", rng.choice(users), amount, BTC))
    return Configuration(ds)


def random_action(g: Configuration, rng: random.Random, users: Sequence[str], burn_name: str) -> Optional[Action]:
    """An action enabled in g once its authorizations are granted, or None."""
    ds = list(g.deposits)
    if not ds:
        return None
    opts = []
    zero = [d for d in ds if d.token == BTC and d.amount == 0]
    if zero:
        opts.append(lambda: Gen(rng.choice(zero).name, rng.randint(1, 20)))
    d = rng.choice(ds)
    opts.append(lambda: Split(d.name, rng.randint(0, d.amount), rng.choice(users)))
    opts.append(lambda: Give(d.name, rng.choice(users)))
    pairs = [(a, b) for a in ds for b in ds if a.name != b.name and a.token == b.token]
    if pairs:
        a, b = rng.choice(pairs)
        opts.append(lambda: Join(a.name, b.name, rng.choice(users)))
    toks = [x for x in ds if x.token != BTC]
    if toks and len(ds) > 1:
        x = rng.choice(toks)
        y = rng.choice([e for e in ds if e.name != x.name])
        opts.append(lambda: Xchg(x.name, y.name))
    btc = [e.name for e in ds if e.token == BTC]
    if len(btc) > 1 and rng.random() < 0.3:
        opts.append(lambda: Burn(tuple(rng.sample(btc, rng.randint(2, len(btc)))), burn_name))
    else:
        opts.append(lambda: Burn((d.name,), burn_name))
    return rng.choice(opts)()


def _inputs(l: Action) -> tuple[str, ...]:
    if isinstance(l, Burn):
        return l.xs
    if isinstance(l, (Join, Xchg)):
        return (l.x, l.y)
    return (l.x,)


def random_symbolic_run(rng: random.Random, max_steps: int = 50, users: Sequence[str] = USERS,
                        initial: Optional[Configuration] = None) -> SymbolicRun:
    """At most max_steps labels; authorizations are granted in random order just before their action."""
    run = SymbolicRun(initial if initial is not None else random_initial(rng, users))
    while True:
        g = run.final
        l = random_action(g, rng, users, run.fresh_source().name())
        if l is None:
            return run
        xs = list(_inputs(l))
        if len(run) + len(xs) + 1 > max_steps:
            return run
        rng.shuffle(xs)
        for x in xs:
            run = run.extend(Auth(x, g.deposit(x).owner, l))
        run = run.extend(l)
