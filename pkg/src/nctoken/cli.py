"""Command-line interface.  Every command prints a JSON report on stdout.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage errors
(bad arguments, unreadable or malformed input files).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .coherence.comp import outpoint_digest
from .harness.bundle import RunBundle
from .harness.demos import DEMOS
from .harness.random_run import random_run
from .harness.scenario import execute_scenario, load_scenario
from .harness.session import ScenarioError, user_key
from .ledger import Chain, Transaction, TxOutput
from .symbolic.run import tokval_s
from .token.balance import token_balances
from .token.scripts import E_BTC
from .turing import Payout, ProgramError, parse_program, run_on_chain, run_oracle

SEED_ENV = "NCTOKEN_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def _checks(b: RunBundle) -> dict[str, Any]:
    return {k: {"ok": v.ok, "counterexamples": v.counterexamples} for k, v in b.verify().items()}


def _load_bundle(path: str) -> RunBundle:
    try:
        return RunBundle.load(path)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read bundle {path}: {e}") from None


def cmd_scenario_run(args: argparse.Namespace) -> int:
    try:
        s = load_scenario(args.file)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read scenario {args.file}: {e}") from None
    try:
        b = execute_scenario(s, args.seed)
    except ScenarioError as e:
        if e.move is None:
            raise UsageError(str(e)) from None
        emit({"command": "scenario run", "ok": False, "move": e.move, "error": e.message})
        return EXIT_FAIL
    if args.out:
        Path(args.out).write_text(b.dumps())
    checks = _checks(b)
    ok = all(c["ok"] for c in checks.values())
    emit({"command": "scenario run", "ok": ok, "seed": args.seed, "checks": checks,
          "final": str(b.rs.final), "rejected": [r.to_json() for r in b.rejected],
          "transactions": len(b.chain), "bundle": args.out})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_coherence_check(args: argparse.Namespace) -> int:
    b = _load_bundle(args.bundle)
    checks = _checks(b)
    ok = all(c["ok"] for c in checks.values())
    emit({"command": "coherence check", "ok": ok, "checks": checks,
          "steps": [s.to_json() for s in b.report.steps]})
    return EXIT_OK if ok else EXIT_FAIL


def _find_token(b: RunBundle, token: str) -> str:
    """Accept a symbolic token name, a scenario alias, or the hex tkid."""
    if token in b.maps.tkid:
        return token
    if token in b.token_aliases and b.token_aliases[token] in b.maps.tkid:
        return b.token_aliases[token]
    for t, src in b.maps.tkid.items():
        if outpoint_digest(b.chain, src).hex() == token.lower().removeprefix("0x"):
            return t
    raise UsageError(f"unknown token {token!r}")


def cmd_balance(args: argparse.Namespace) -> int:
    b = _load_bundle(args.bundle)
    if not b.report.verdict:
        emit({"command": "balance", "ok": False, "error": f"bundle is not coherent: {b.report.failure}"})
        return EXIT_FAIL
    t = _find_token(b, args.token)
    tkid = outpoint_digest(b.chain, b.maps.tkid[t])
    s = tokval_s(t, b.rs.final)
    c = token_balances(b.chain).get(tkid, 0)
    emit({"command": "balance", "ok": s == c, "token": t, "tkid": tkid.hex(), "tokval_s": s, "tokval_c": c})
    return EXIT_OK if s == c else EXIT_FAIL


def cmd_demo(args: argparse.Namespace) -> int:
    r = DEMOS[args.name](args.seed)
    rep = r.to_json()
    rep["command"] = f"demo {args.name}"
    rep["as_expected"] = r.ok
    emit(rep)
    # the attacking transaction failing validation is reported as a failed check
    return EXIT_FAIL if r.rejected else EXIT_OK


def cmd_cm_run(args: argparse.Namespace) -> int:
    try:
        m = parse_program(Path(args.program).read_text())
    except (OSError, ProgramError) as e:
        raise UsageError(f"cannot load program {args.program}: {e}") from None
    if args.funds < 0 or args.max_steps < 0:
        raise UsageError("--funds and --max-steps must be non-negative")
    funder, a, b = user_key("F"), user_key("A"), user_key("B")
    cb = Transaction((), (), (TxOutput((funder.public_key,), E_BTC, args.funds),))
    r = run_on_chain(Chain.genesis(cb), m, Payout(a.public_key, b.public_key), cb.outpoint(1), funder,
                     args.max_steps)
    o = run_oracle(m, args.max_steps)
    agree = (o.outcome, o.steps, list(o.states)) == (r.outcome, r.steps, r.states)
    rep = r.to_json()
    rep.update({"command": "cm run", "oracle_outcome": o.outcome, "oracle_steps": o.steps,
                "agrees_with_oracle": agree, "ok": agree and r.outcome != "StepLimit"})
    emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_fuzz(args: argparse.Namespace) -> int:
    if args.steps < 0 or args.runs < 1:
        raise UsageError("--steps must be non-negative and --runs positive")
    runs = []
    ok = True
    for k in range(args.runs):
        b = random_run(args.seed + k, args.steps, adversary_mix=args.adversary_mix)
        checks = _checks(b)
        good = all(c["ok"] for c in checks.values())
        ok = ok and good
        runs.append({"seed": args.seed + k, "ok": good, "checks": checks, "labels": len(b.rc.labels),
                     "rejected": len(b.rejected)})
    emit({"command": "fuzz", "ok": ok, "runs": runs})
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nctoken", description="Fungible tokens on a covenant UTXO ledger.")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="scenario files").add_subparsers(dest="sub", required=True)
    r = sc.add_parser("run", help="execute a scenario and check the resulting bundle")
    r.add_argument("file")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="write the run bundle here")
    r.set_defaults(fn=cmd_scenario_run)

    co = sub.add_parser("coherence", help="coherence checks").add_subparsers(dest="sub", required=True)
    c = co.add_parser("check", help="re-check a bundle: coherence, lemmas, reconstruction")
    c.add_argument("bundle")
    c.set_defaults(fn=cmd_coherence_check)

    bal = sub.add_parser("balance", help="symbolic and computational balance of a token")
    bal.add_argument("bundle")
    bal.add_argument("--token", required=True, help="token name, scenario alias, or hex tkid")
    bal.set_defaults(fn=cmd_balance)

    d = sub.add_parser("demo", help="attack demos")
    d.add_argument("name", choices=sorted(DEMOS))
    d.add_argument("--seed", type=int)
    d.set_defaults(fn=cmd_demo)

    cm = sub.add_parser("cm", help="counter machines").add_subparsers(dest="sub", required=True)
    cr = cm.add_parser("run", help="run a counter machine on chain")
    cr.add_argument("program")
    cr.add_argument("--funds", type=int, required=True)
    cr.add_argument("--max-steps", type=int, required=True)
    cr.set_defaults(fn=cmd_cm_run)

    f = sub.add_parser("fuzz", help="random runs with every property check")
    f.add_argument("--seed", type=int)
    f.add_argument("--steps", type=int, required=True)
    f.add_argument("--runs", type=int, default=1)
    f.add_argument("--adversary-mix", type=float, default=0.3)
    f.set_defaults(fn=cmd_fuzz)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.fn(args)
    except UsageError as e:
        print(f"nctoken: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
