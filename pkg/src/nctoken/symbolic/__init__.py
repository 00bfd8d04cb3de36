from .config import (
    ACTION_TYPES,
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
from .rules import (
    FixedNames,
    FreshNames,
    MissingAuthorization,
    NoSuchDeposit,
    NotOwner,
    RuleError,
    SideConditionViolated,
    apply,
    check_auth,
    step,
)
from .run import (
    AmbiguityError,
    NoneFound,
    SymbolicRun,
    alpha_equivalent,
    burnval,
    genval,
    infer_label,
    initial_run,
    tokval_s,
)

__all__ = [
    "ACTION_TYPES", "AmbiguityError", "Auth", "Authorization", "BTC", "Burn", "Configuration",
    "Deposit", "FixedNames", "FreshNames", "Gen", "Give", "Join", "Label", "MissingAuthorization",
    "NoSuchDeposit", "NoneFound", "NotOwner", "RuleError", "SideConditionViolated", "Split",
    "SymbolicRun", "Xchg", "alpha_equivalent", "apply", "burnval", "check_auth", "genval",
    "infer_label", "initial_run", "step", "tokval_s",
]
