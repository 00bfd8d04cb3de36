from __future__ import annotations

import json

import pytest

from nctoken.harness import (
    RunBundle,
    ScenarioError,
    data_file,
    execute_scenario,
    forgery,
    join_attack,
    load_scenario,
    random_run,
)
from nctoken.harness.scenario import apply_move, new_session

OVERVIEW = load_scenario(data_file("overview.json"))
SMALL = {
    "users": ["A", "B"],
    "coinbase": [{"name": "a0", "owner": "A", "amount": 0}, {"name": "b0", "owner": "B", "amount": 4}],
    "moves": [{"do": "gen", "x": "a0", "v": 5, "token": "t", "as": ["x1"]},
              {"do": "split", "x": "x1", "v": 2, "to": "B", "as": ["x2", "x3"]}],
    "expect": {"deposits": {"x2": ["A", 2, "t"], "x3": ["B", 3, "t"]}, "balances": {"t": 5}},
}


def all_ok(b: RunBundle) -> bool:
    return all(r.ok for r in b.verify().values())


def test_overview_scenario():
    b = execute_scenario(OVERVIEW)
    assert b.expectation_failures == [] and not b.rejected
    assert all_ok(b)


def test_scenario_is_deterministic():
    assert execute_scenario(SMALL, 3).dumps() == execute_scenario(SMALL, 3).dumps()
    assert random_run(9, 15).dumps() == random_run(9, 15).dumps()


def test_empty_scenario():
    b = execute_scenario({"users": ["A"], "coinbase": [{"name": "a", "owner": "A", "amount": 1}], "moves": []})
    assert all_ok(b) and len(b.chain) == 1


def test_expectation_failure_is_reported():
    s = dict(SMALL, expect={"balances": {"t": 6}})
    b = execute_scenario(s)
    assert b.expectation_failures and not b.verify()["expectations"].ok


@pytest.mark.parametrize("move", [
    {"do": "teleport", "x": "a0"},
    {"do": "gen", "x": "a0", "v": 1, "colour": "red"},
    {"do": "gen", "x": "a0", "v": 1, "expect": {"balances": {"nope": 1}}},
])
def test_bad_moves(move):
    sess = new_session(SMALL)
    with pytest.raises(ScenarioError) as e:
        apply_move(sess, 0, move)
    assert e.value.move == 0


def test_malformed_header():
    with pytest.raises(ScenarioError) as e:
        new_session({"coinbase": []})
    assert e.value.move is None


def test_bundle_json_round_trip(tmp_path):
    b = random_run(4, 25)
    p = tmp_path / "b.json"
    p.write_text(b.dumps())
    c = RunBundle.load(p)
    assert c.dumps() == b.dumps()
    assert {k: v.ok for k, v in c.verify().items()} == {k: v.ok for k, v in b.verify().items()}


def test_bundle_format_checked():
    j = json.loads(random_run(1, 3).dumps())
    j["format"] = "something-else"
    with pytest.raises(ValueError):
        RunBundle.from_json(j)


@pytest.mark.parametrize("seed", range(20))
def test_random_runs_verify(seed):
    b = random_run(seed, 20, adversary_mix=0.5)
    assert all_ok(b)


def test_join_attack_demo():
    r = join_attack()
    assert r.rejected and r.error.startswith("ScriptFailed") and r.ok


def test_forgery_demo():
    r = forgery()
    assert r.rejected and r.checks["forged_unspendable"] and r.checks["honest_spendable"] and r.ok
