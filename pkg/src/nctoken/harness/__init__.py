from pathlib import Path

from .bundle import RunBundle
from .demos import DEMOS, DemoResult, forgery, join_attack
from .random_run import ADVERSARY, ADVERSARY_KINDS, HONEST_USERS, random_run
from .scenario import check_expectations, execute_scenario, load_scenario
from .session import Allocation, Rejection, ScenarioError, Session, user_key

DATA = Path(__file__).resolve().parent.parent / "data"


def data_file(name: str) -> Path:
    """Path of a scenario or program shipped with the package."""
    return DATA / name


__all__ = [
    "ADVERSARY", "ADVERSARY_KINDS", "Allocation", "DATA", "DEMOS", "DemoResult", "HONEST_USERS",
    "Rejection", "RunBundle", "ScenarioError", "Session", "check_expectations", "data_file",
    "execute_scenario", "forgery", "join_attack", "load_scenario", "random_run", "user_key",
]
