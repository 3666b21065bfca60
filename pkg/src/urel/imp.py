"""IMP abstract syntax, program states and the big-step evaluator.

Commands are immutable trees. Execution is deterministic and bounded by
*fuel*: every iteration of a ``while`` loop (guard evaluated true) consumes
one unit, and running out yields :class:`FuelExhausted` instead of a state.
Arithmetic is 64-bit signed and checked; overflow raises
:class:`ImpOverflowError`.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class ImpOverflowError(ArithmeticError):
    """Raised when an arithmetic result leaves the signed 64-bit range."""


def checked(value: int) -> int:
    if INT_MIN <= value <= INT_MAX:
        return value
    raise ImpOverflowError(f"integer overflow: {value}")


# -- arithmetic expressions -------------------------------------------------

class AExp:
    __slots__ = ()

    def __str__(self) -> str:
        return format_aexp(self)


@dataclass(frozen=True)
class Num(AExp):
    value: int


@dataclass(frozen=True)
class Var(AExp):
    name: str


@dataclass(frozen=True)
class BinOp(AExp):
    op: str  # one of + - *
    left: AExp
    right: AExp


# -- boolean expressions ----------------------------------------------------

class BExp:
    __slots__ = ()

    def __str__(self) -> str:
        return format_bexp(self)


@dataclass(frozen=True)
class Bool(BExp):
    value: bool


@dataclass(frozen=True)
class Cmp(BExp):
    op: str  # one of = != < <= > >=
    left: AExp
    right: AExp


@dataclass(frozen=True)
class Not(BExp):
    arg: BExp


@dataclass(frozen=True)
class And(BExp):
    left: BExp
    right: BExp


@dataclass(frozen=True)
class Or(BExp):
    left: BExp
    right: BExp


# -- commands ---------------------------------------------------------------

class Command:
    __slots__ = ()

    def __str__(self) -> str:
        return format_command(self)


@dataclass(frozen=True)
class Skip(Command):
    pass


@dataclass(frozen=True)
class Assign(Command):
    var: str
    expr: AExp


@dataclass(frozen=True)
class Seq(Command):
    first: Command
    second: Command


@dataclass(frozen=True)
class If(Command):
    cond: BExp
    then: Command
    orelse: Command


@dataclass(frozen=True)
class While(Command):
    cond: BExp
    body: Command


SKIP = Skip()

ARITH_OPS: dict[str, Callable[[int, int], int]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
}

COMPARISONS: dict[str, Callable[[int, int], bool]] = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def seq(*commands: Command) -> Command:
    """Right-nested sequence of ``commands`` (``skip`` when empty)."""
    if not commands:
        return SKIP
    result = commands[-1]
    for c in reversed(commands[:-1]):
        result = Seq(c, result)
    return result


# -- states -----------------------------------------------------------------

class State(Mapping[str, int]):
    """Total map from variable names to integers; unmapped names read 0.

    Zero bindings are not stored, so two states are equal exactly when they
    agree on every variable.
    """

    __slots__ = ("_values", "_hash")

    def __init__(self, values: Mapping[str, int] | Iterable[tuple[str, int]] = (), **kwargs: int):
        items = dict(values, **kwargs)
        self._values = {k: int(v) for k, v in sorted(items.items()) if v != 0}
        self._hash = None

    @classmethod
    def _from_dict(cls, values: dict[str, int]) -> State:
        state = cls.__new__(cls)
        state._values = {k: v for k, v in sorted(values.items()) if v != 0}
        state._hash = None
        return state

    def __getitem__(self, name: str) -> int:
        return self._values.get(name, 0)

    def __contains__(self, name: object) -> bool:
        return name in self._values

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self._values == other._values
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._values.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"State({self._values!r})"

    def assign(self, name: str, value: int) -> State:
        """The updated state ``s(name := value)``."""
        values = dict(self._values)
        values[name] = value
        return State._from_dict(values)

    def as_dict(self, names: Iterable[str] = ()) -> dict[str, int]:
        """Explicit bindings plus ``names`` (read through the default)."""
        out = dict(self._values)
        for name in names:
            out.setdefault(name, 0)
        return dict(sorted(out.items()))


# -- evaluation -------------------------------------------------------------

def eval_aexp(e: AExp, s: Mapping[str, int]) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return s[e.name] if isinstance(s, State) else s.get(e.name, 0)
    if isinstance(e, BinOp):
        return checked(ARITH_OPS[e.op](eval_aexp(e.left, s), eval_aexp(e.right, s)))
    raise TypeError(f"not an arithmetic expression: {e!r}")


def eval_bexp(b: BExp, s: Mapping[str, int]) -> bool:
    if isinstance(b, Bool):
        return b.value
    if isinstance(b, Cmp):
        return COMPARISONS[b.op](eval_aexp(b.left, s), eval_aexp(b.right, s))
    if isinstance(b, Not):
        return not eval_bexp(b.arg, s)
    if isinstance(b, And):
        return eval_bexp(b.left, s) and eval_bexp(b.right, s)
    if isinstance(b, Or):
        return eval_bexp(b.left, s) or eval_bexp(b.right, s)
    raise TypeError(f"not a boolean expression: {b!r}")


@dataclass(frozen=True)
class Terminated:
    state: State
    fuel_used: int = 0


@dataclass(frozen=True)
class FuelExhausted:
    fuel: int


ExecResult = Union[Terminated, FuelExhausted]


class _OutOfFuel(Exception):
    pass


def exec_command(c: Command, s: Mapping[str, int], fuel: int) -> ExecResult:
    """Run ``c`` from ``s`` with at most ``fuel`` loop iterations."""
    env = dict(s._values) if isinstance(s, State) else {k: v for k, v in s.items() if v}
    run = _compiled(c)
    try:
        env, remaining = run(env, fuel)
    except _OutOfFuel:
        return FuelExhausted(fuel)
    return Terminated(State._from_dict(env), fuel - remaining)


def exec_reference(c: Command, s: Mapping[str, int], fuel: int) -> ExecResult:
    """Tree-walking evaluator; the semantics the compiled path must agree with."""
    env = dict(s.items())
    box = [fuel]
    try:
        _walk(c, env, box)
    except _OutOfFuel:
        return FuelExhausted(fuel)
    return Terminated(State._from_dict(env), fuel - box[0])


def _walk(c: Command, env: dict[str, int], box: list[int]) -> None:
    while True:
        if isinstance(c, Skip):
            return
        if isinstance(c, Assign):
            env[c.var] = eval_aexp(c.expr, env)
            return
        if isinstance(c, Seq):
            _walk(c.first, env, box)
            c = c.second
        elif isinstance(c, If):
            c = c.then if eval_bexp(c.cond, env) else c.orelse
        elif isinstance(c, While):
            while eval_bexp(c.cond, env):
                if box[0] <= 0:
                    raise _OutOfFuel
                box[0] -= 1
                _walk(c.body, env, box)
            return
        else:
            raise TypeError(f"not a command: {c!r}")


# Commands are compiled to Python functions so that million-iteration loops
# run at bytecode speed. Deeply nested programs fall back to _walk.

_PY_OPS = {"=": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


class _Codegen:
    def __init__(self) -> None:
        self.names: dict[str, str] = {}
        self.lines: list[str] = []

    def local(self, name: str) -> str:
        if name not in self.names:
            self.names[name] = f"v{len(self.names)}"
        return self.names[name]

    def aexp(self, e: AExp) -> str:
        if isinstance(e, Num):
            return repr(e.value)
        if isinstance(e, Var):
            return self.local(e.name)
        return f"_ck({self.aexp(e.left)} {e.op} {self.aexp(e.right)})"

    def bexp(self, b: BExp) -> str:
        if isinstance(b, Bool):
            return repr(b.value)
        if isinstance(b, Cmp):
            return f"({self.aexp(b.left)} {_PY_OPS[b.op]} {self.aexp(b.right)})"
        if isinstance(b, Not):
            return f"(not {self.bexp(b.arg)})"
        if isinstance(b, And):
            return f"({self.bexp(b.left)} and {self.bexp(b.right)})"
        return f"({self.bexp(b.left)} or {self.bexp(b.right)})"

    def command(self, c: Command, depth: int) -> None:
        pad = "    " * depth
        if isinstance(c, Skip):
            self.lines.append(pad + "pass")
        elif isinstance(c, Assign):
            self.lines.append(f"{pad}{self.local(c.var)} = {self.aexp(c.expr)}")
        elif isinstance(c, Seq):
            while isinstance(c, Seq):
                self.command(c.first, depth)
                c = c.second
            self.command(c, depth)
        elif isinstance(c, If):
            self.lines.append(f"{pad}if {self.bexp(c.cond)}:")
            self.command(c.then, depth + 1)
            self.lines.append(pad + "else:")
            self.command(c.orelse, depth + 1)
        elif isinstance(c, While):
            self.lines.append(f"{pad}while {self.bexp(c.cond)}:")
            self.lines.append(f"{pad}    if fuel <= 0: raise _OutOfFuel")
            self.lines.append(f"{pad}    fuel -= 1")
            self.command(c.body, depth + 1)
        else:
            raise TypeError(f"not a command: {c!r}")


def _loop_depth(c: Command) -> int:
    if isinstance(c, Seq):
        return max(_loop_depth(c.first), _loop_depth(c.second))
    if isinstance(c, If):
        return 1 + max(_loop_depth(c.then), _loop_depth(c.orelse))
    if isinstance(c, While):
        return 1 + _loop_depth(c.body)
    return 0


@functools.lru_cache(maxsize=4096)
def _compiled(c: Command) -> Callable[[dict, int], tuple[dict, int]]:
    if _loop_depth(c) > 15:
        return _fallback(c)
    gen = _Codegen()
    gen.command(c, 1)
    body = gen.lines
    loads = [f"    {local} = env.get({name!r}, 0)" for name, local in gen.names.items()]
    stores = [f"    env[{name!r}] = {local}" for name, local in gen.names.items()]
    src = "\n".join(["def run(env, fuel):", *loads, *body, *stores, "    return env, fuel"])
    namespace = {"_ck": checked, "_OutOfFuel": _OutOfFuel}
    try:
        exec(compile(src, "<imp>", "exec"), namespace)
    except (SyntaxError, RecursionError, MemoryError):
        return _fallback(c)
    return namespace["run"]


def _fallback(c: Command) -> Callable[[dict, int], tuple[dict, int]]:
    def run(env: dict, fuel: int) -> tuple[dict, int]:
        box = [fuel]
        _walk(c, env, box)
        return env, box[0]

    return run


# -- free variables ---------------------------------------------------------

def aexp_vars(e: AExp) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return aexp_vars(e.left) | aexp_vars(e.right)
    return set()


def bexp_vars(b: BExp) -> set[str]:
    if isinstance(b, Cmp):
        return aexp_vars(b.left) | aexp_vars(b.right)
    if isinstance(b, Not):
        return bexp_vars(b.arg)
    if isinstance(b, (And, Or)):
        return bexp_vars(b.left) | bexp_vars(b.right)
    return set()


def command_vars(c: Command) -> set[str]:
    if isinstance(c, Assign):
        return {c.var} | aexp_vars(c.expr)
    if isinstance(c, Seq):
        return command_vars(c.first) | command_vars(c.second)
    if isinstance(c, If):
        return bexp_vars(c.cond) | command_vars(c.then) | command_vars(c.orelse)
    if isinstance(c, While):
        return bexp_vars(c.cond) | command_vars(c.body)
    return set()


# -- pretty printing --------------------------------------------------------

_APREC = {"+": 1, "-": 1, "*": 2}


def _aprec(e: AExp) -> int:
    return _APREC[e.op] if isinstance(e, BinOp) else 3


def format_aexp(e: AExp) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    p = _APREC[e.op]
    left = format_aexp(e.left)
    right = format_aexp(e.right)
    if _aprec(e.left) < p:
        left = f"({left})"
    if _aprec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _bprec(b: BExp) -> int:
    if isinstance(b, Or):
        return 1
    if isinstance(b, And):
        return 2
    if isinstance(b, Not):
        return 3
    return 4


def format_bexp(b: BExp) -> str:
    if isinstance(b, Bool):
        return "true" if b.value else "false"
    if isinstance(b, Cmp):
        return f"{format_aexp(b.left)} {b.op} {format_aexp(b.right)}"
    if isinstance(b, Not):
        inner = format_bexp(b.arg)
        return f"!({inner})" if isinstance(b.arg, (Cmp, And, Or)) else f"!{inner}"
    p = _bprec(b)
    op = "&&" if isinstance(b, And) else "||"
    left = format_bexp(b.left)
    right = format_bexp(b.right)
    if _bprec(b.left) < p:
        left = f"({left})"
    if _bprec(b.right) <= p:
        right = f"({right})"
    return f"{left} {op} {right}"


def format_command(c: Command, indent: int | None = None) -> str:
    """Concrete syntax for ``c``; one line unless ``indent`` is given."""
    if indent is None:
        return _flat(c)
    return "\n".join(_lines(c, 0, indent))


def _block_flat(c: Command) -> str:
    return f"{{ {_flat(c)} }}" if isinstance(c, Seq) else _flat(c)


def _flat(c: Command) -> str:
    if isinstance(c, Skip):
        return "skip"
    if isinstance(c, Assign):
        return f"{c.var} := {format_aexp(c.expr)}"
    if isinstance(c, Seq):
        first = f"{{ {_flat(c.first)} }}" if isinstance(c.first, Seq) else _flat(c.first)
        return f"{first}; {_flat(c.second)}"
    if isinstance(c, If):
        then = _block_flat(c.then)
        if isinstance(c.then, If):
            then = f"{{ {then} }}"
        return f"if {format_bexp(c.cond)} then {then} else {_block_flat(c.orelse)}"
    if isinstance(c, While):
        return f"while {format_bexp(c.cond)} do {_block_flat(c.body)}"
    raise TypeError(f"not a command: {c!r}")


def _lines(c: Command, depth: int, step: int) -> list[str]:
    pad = " " * (depth * step)
    if isinstance(c, Seq):
        out = []
        first = c.first
        if isinstance(first, Seq):
            out += [pad + "{", *_lines(first, depth + 1, step), pad + "};"]
        else:
            out += _lines(first, depth, step)
            out[-1] += ";"
        return out + _lines(c.second, depth, step)
    if isinstance(c, If):
        out = [f"{pad}if {format_bexp(c.cond)} then {{"]
        out += _lines(c.then, depth + 1, step)
        out += [pad + "} else {"]
        out += _lines(c.orelse, depth + 1, step)
        return out + [pad + "}"]
    if isinstance(c, While):
        out = [f"{pad}while {format_bexp(c.cond)} do {{"]
        out += _lines(c.body, depth + 1, step)
        return out + [pad + "}"]
    return [pad + _flat(c)]
