"""Run bundles: both runs, the maps, and the reports, as one JSON document."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..coherence.checker import CoherenceReport, check_coherence
from ..coherence.comp import CoherenceMaps, ComputationalRun
from ..coherence.lemmas import LemmaResult, all_properties
from ..coherence.reconstruct import ReconstructionError, reconstruct
from ..ledger import Chain, Outpoint
from ..symbolic.run import SymbolicRun
from .session import Rejection, Session

FORMAT = "nctoken-bundle/1"


@dataclass
class RunBundle:
    rs: SymbolicRun
    rc: ComputationalRun
    m0: CoherenceMaps
    honest: list[str]
    report: CoherenceReport
    seed: int = 0
    rejected: list[Rejection] = field(default_factory=list)
    aliases: dict[str, Outpoint] = field(default_factory=dict)
    token_aliases: dict[str, str] = field(default_factory=dict)
    expectation_failures: list[str] = field(default_factory=list)

    @classmethod
    def from_session(cls, sess: Session, expectation_failures: Optional[list[str]] = None) -> RunBundle:
        rc = sess.computational()
        return cls(sess.run, rc, sess.m0, list(sess.honest), check_coherence(sess.run, rc, sess.m0),
                   sess.seed, list(sess.rejected), dict(sess.aliases), dict(sess.token_aliases),
                   list(expectation_failures or []))

    @property
    def maps(self) -> CoherenceMaps:
        return self.report.maps

    @property
    def chain(self) -> Chain:
        return self.report.trace[-1][1] if self.report.trace else self.rc.chain()

    def properties(self) -> dict[str, LemmaResult]:
        return all_properties(self.rs, self.rc, self.report)

    def reconstruction(self) -> LemmaResult:
        """Reconstruct the symbolic run from the computational one and compare."""
        res = LemmaResult(True)
        names = {o: n for n, o in self.m0.txout.items()}
        try:
            rs2, maps2, _ = reconstruct(self.rc, self.honest, names)
        except ReconstructionError as e:
            res.fail(f"reconstruction failed: {e}")
            return res
        if rs2.to_json() != self.rs.to_json():
            res.fail("reconstructed symbolic run differs from the recorded one")
        if maps2.to_json() != self.maps.to_json():
            res.fail("reconstructed maps differ from the recorded ones")
        return res

    def verify(self, reconstruct_too: bool = True) -> dict[str, LemmaResult]:
        out = {"coherence": LemmaResult(self.report.verdict, [self.report.failure] if self.report.failure else [])}
        if self.report.verdict:
            out.update(self.properties())
            if reconstruct_too:
                out["reconstruct"] = self.reconstruction()
        if self.expectation_failures:
            out["expectations"] = LemmaResult(False, list(self.expectation_failures))
        return out

    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "seed": self.seed,
            "honest": self.honest,
            "chain": self.chain.to_json() if self.report.trace else self.rc.chain(False).to_json(),
            "computational": self.rc.to_json(),
            "symbolic": self.rs.to_json(),
            "initial_maps": self.m0.to_json(),
            "maps": self.maps.to_json() if self.maps is not None else None,
            "report": self.report.to_json(),
            "rejected": [r.to_json() for r in self.rejected],
            "aliases": {a: str(o) for a, o in sorted(self.aliases.items())},
            "token_aliases": dict(sorted(self.token_aliases.items())),
            "expectation_failures": self.expectation_failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, j: dict) -> RunBundle:
        if j.get("format") != FORMAT:
            raise ValueError(f"not a run bundle (format {j.get('format')!r})")
        chain = Chain.from_json(j["chain"], validate=False)
        txs = {tx.txid.hex(): tx for tx in chain}
        rc = ComputationalRun.from_json(j["computational"], txs)
        rs = SymbolicRun.from_json(j["symbolic"])
        m0 = CoherenceMaps.from_json(j["initial_maps"])
        return cls(
            rs, rc, m0, list(j["honest"]), check_coherence(rs, rc, m0), j.get("seed", 0),
            [Rejection(r["move"], r["kind"], r["error"]) for r in j.get("rejected", [])],
            {a: Outpoint.parse(o) for a, o in j.get("aliases", {}).items()},
            dict(j.get("token_aliases", {})),
            list(j.get("expectation_failures", [])),
        )

    @classmethod
    def load(cls, path) -> RunBundle:
        with open(path) as fh:
            return cls.from_json(json.load(fh))
