"""The two attack demos: joining units of different tokens, and forging units."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..token.spendable import is_spendable
from .bundle import RunBundle
from .session import Allocation, Session


@dataclass
class DemoResult:
    name: str
    rejected: bool
    error: str
    checks: dict[str, bool] = field(default_factory=dict)
    bundle: RunBundle = None

    @property
    def ok(self) -> bool:
        return self.rejected and all(self.checks.values())

    def to_json(self) -> dict:
        return {"demo": self.name, "rejected": self.rejected, "error": self.error, "checks": self.checks,
                "coherence": self.bundle.report.verdict if self.bundle is not None else None}


def _bundle_checks(b: RunBundle) -> dict[str, bool]:
    return {k: bool(v) for k, v in b.verify().items()}


def join_attack(seed: int = 0) -> DemoResult:
    """A and M each mint 10 units.  M hands A 7 units of its own token; a join of
    those with A's 8 units is attempted and must be rejected by the token script."""
    s = Session(["A", "M"], ["A"], [Allocation("a0", "A", 0), Allocation("m0", "M", 0)], seed)
    s.gen("a0", 10, token="t", as_=["T0"])
    s.gen("m0", 10, token="tM", as_=["TM"])
    s.split("T0", 8, "A", as_=["T1", "T1b"])
    s.split("TM", 3, "A", as_=["T2m", "T2"])
    accepted = s.attempt("join", as_=["T3"], x="T1", y="T2", to="A")
    err = s.rejected[-1].error if s.rejected else ""
    b = RunBundle.from_session(s)
    checks = _bundle_checks(b)
    checks["script_failed"] = err.startswith("ScriptFailed")
    checks["balance_t"] = s.config.deposit(s.name_of("T1")).amount == 8
    return DemoResult("join-attack", not accepted, err, checks, b)


def forgery(seed: int = 0) -> DemoResult:
    """M writes a token output carrying the tkid of A's token.  Appending it is
    valid, but the forged output cannot be spent, while A's units can."""
    s = Session(["A", "M"], ["A"], [Allocation("a0", "A", 0), Allocation("m0", "M", 0)], seed)
    s.gen("a0", 10, token="t", as_=["T1"])
    forged_ok = s.forge_token("T1", 10, "m0", as_=["T1f"])
    s.split("T1", 6, "A", as_=["S1", "S2"])
    accepted = s.attempt("split", signers=["M"], as_=["T2"], x="T1f", v=5, to="M")
    err = s.rejected[-1].error if s.rejected else ""
    b = RunBundle.from_session(s)
    checks = _bundle_checks(b)
    checks["forged_appended"] = forged_ok
    checks["script_failed"] = err.startswith("ScriptFailed")
    checks["forged_unspendable"] = not is_spendable(s.chain, s.ref("T1f"))
    checks["honest_spendable"] = is_spendable(s.chain, s.ref("S1"))
    return DemoResult("forgery", not accepted, err, checks, b)


DEMOS = {"join-attack": join_attack, "forgery": forgery}
