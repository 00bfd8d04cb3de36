"""Counter machines: programs, the reference step function, and a small assembly format.

Instructions are numbered from 0.  Running past the last instruction halts, and
decrementing a zero register leaves it at zero.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Union

OPS = ("inc", "dec", "zero", "jnz", "halt")


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Instr:
    op: str
    i: int = 0
    j: int = 0

    def __str__(self) -> str:
        if self.op == "halt":
            return "halt"
        if self.op == "jnz":
            return f"jnz {self.i} {self.j}"
        return f"{self.op} {self.i}"


@dataclass(frozen=True)
class CounterMachine:
    n: int
    program: tuple[Instr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "program", tuple(self.program))
        if self.n < 1:
            raise ProgramError("a machine needs at least one register")
        for k, ins in enumerate(self.program):
            if ins.op not in OPS:
                raise ProgramError(f"instruction {k}: unknown operation {ins.op!r}")
            if ins.op != "halt" and not 1 <= ins.i <= self.n:
                raise ProgramError(f"instruction {k}: register {ins.i} out of 1..{self.n}")
            if ins.op == "jnz" and not 0 <= ins.j < len(self.program):
                raise ProgramError(f"instruction {k}: jump target {ins.j} outside the program")

    def initial_state(self) -> MachineState:
        return MachineState((0,) * self.n, 0)


@dataclass(frozen=True)
class MachineState:
    registers: tuple[int, ...]
    pc: int

    def as_arg(self) -> tuple[int, ...]:
        return self.registers + (self.pc,)

    @classmethod
    def from_arg(cls, arg: tuple) -> MachineState:
        return cls(tuple(arg[:-1]), arg[-1])


@dataclass(frozen=True)
class Halted:
    state: MachineState

    @property
    def winner(self) -> str:
        """The payout goes to A when the first register is 0, otherwise to B."""
        return "A" if self.state.registers[0] == 0 else "B"


def cm_step(m: CounterMachine, s: MachineState) -> Union[MachineState, Halted]:
    if not 0 <= s.pc < len(m.program) or m.program[s.pc].op == "halt":
        return Halted(s)
    ins = m.program[s.pc]
    r = list(s.registers)
    nxt = s.pc + 1
    if ins.op == "inc":
        r[ins.i - 1] += 1
    elif ins.op == "dec":
        r[ins.i - 1] = max(0, r[ins.i - 1] - 1)
    elif ins.op == "zero":
        r[ins.i - 1] = 0
    elif ins.op == "jnz" and r[ins.i - 1] != 0:
        nxt = ins.j
    return MachineState(tuple(r), nxt)


@dataclass(frozen=True)
class OracleRun:
    states: tuple[MachineState, ...]
    halted: bool

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    @property
    def outcome(self) -> str:
        if not self.halted:
            return "StepLimit"
        return "PaidA" if self.states[-1].registers[0] == 0 else "PaidB"


def run_oracle(m: CounterMachine, max_steps: int) -> OracleRun:
    """Apply cm_step until the machine halts or max_steps transitions have been made."""
    states = [m.initial_state()]
    while True:
        nxt = cm_step(m, states[-1])
        if isinstance(nxt, Halted):
            return OracleRun(tuple(states), True)
        if len(states) > max_steps:
            return OracleRun(tuple(states), False)
        states.append(nxt)


# assembly: one instruction per line, '#' comments, optional "registers N" header

def parse_program(text: str) -> CounterMachine:
    prog: list[Instr] = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            op, nums = words[0].lower(), [int(w) for w in words[1:]]
        except ValueError:
            raise ProgramError(f"line {lineno}: operands must be integers") from None
        want = {"registers": 1, "inc": 1, "dec": 1, "zero": 1, "jnz": 2, "halt": 0}.get(op)
        if want is None:
            raise ProgramError(f"line {lineno}: unknown operation {words[0]!r}")
        if len(nums) != want:
            raise ProgramError(f"line {lineno}: {op} takes {want} operand(s)")
        if op == "registers":
            n = nums[0]
        else:
            prog.append(Instr(op, *nums))
    if n is None:
        n = max([ins.i for ins in prog if ins.op != "halt"], default=1)
    return CounterMachine(n, tuple(prog))


def format_program(m: CounterMachine) -> str:
    return "\n".join([f"registers {m.n}"] + [str(ins) for ins in m.program]) + "\n"


def random_machine(rng: random.Random, max_registers: int = 5, max_instructions: int = 20) -> CounterMachine:
    n = rng.randint(1, max_registers)
    size = rng.randint(1, max_instructions)
    prog = []
    for _ in range(size):
        op = rng.choices(OPS, weights=(4, 3, 1, 3, 1))[0]
        if op == "halt":
            prog.append(Instr("halt"))
        elif op == "jnz":
            prog.append(Instr("jnz", rng.randint(1, n), rng.randrange(size)))
        else:
            prog.append(Instr(op, rng.randint(1, n)))
    return CounterMachine(n, tuple(prog))


def machine_of(prog: Iterable[str], n: int) -> CounterMachine:
    """Build a machine from assembly lines, for tests and examples."""
    return parse_program("\n".join([f"registers {n}", *prog]))
