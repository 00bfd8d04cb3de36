from .compile import Payout, cm_source, compile_cm, compile_script
from .machine import (
    CounterMachine,
    Halted,
    Instr,
    MachineState,
    OracleRun,
    ProgramError,
    cm_step,
    format_program,
    machine_of,
    parse_program,
    random_machine,
    run_oracle,
)
from .onchain import OnChainRun, payout_tx, run_on_chain, state_outputs, step_tx

__all__ = [
    "CounterMachine", "Halted", "Instr", "MachineState", "OnChainRun", "OracleRun", "Payout",
    "ProgramError", "cm_source", "cm_step", "compile_cm", "compile_script", "format_program", "machine_of",
    "parse_program", "payout_tx", "random_machine", "run_oracle", "run_on_chain", "state_outputs",
    "step_tx",
]
