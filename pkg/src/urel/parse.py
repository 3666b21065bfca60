"""Concrete syntax for IMP programs and two-state relations.

Programs::

    c ::= skip | x := a | c ; c | if b then c [else c] | while b do c | { c }
    a ::= int | x | a + a | a - a | a * a | -a | ( a )
    b ::= true | false | a (= | != | < | <= | > | >=) a | !b | b && b | b || b | ( b )

Sequencing is right-associative; ``if``/``while`` branches are single
statements, so use braces for sequences. ``//`` starts a line comment.

Relations use ``x<1>``/``x<2>`` for side-tagged variables, ``[b]<1>`` to read
a program condition on one side, ``== != < <= > >=``, ``! && || =>``,
``exists v. R``, ``flip(R)``, postfix assignment transformers
``R[x<1> := e]`` and family instances ``F(n + 1)``. The name ``n`` is the
family parameter; ``exists n. R`` quantifies over it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, TypeVar

from . import assertions as A
from . import imp

KEYWORDS = {"skip", "if", "then", "else", "while", "do", "true", "false"}


class ParseError(SyntaxError):
    """Syntax error carrying a position and the set of expected tokens."""

    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"line {line}, col {col}: {message}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, TVAR, LIFTEND, SYM, EOF
    text: str
    line: int
    col: int
    side: int = 0


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<TVAR>[A-Za-z_][A-Za-z0-9_]*<[12]>)
  | (?P<LIFTEND>\]<[12]>)
  | (?P<INT>\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<SYM>:=|==|!=|<=|>=|=>|&&|\|\||\.\.|[-+*;{}()\[\],.:<>=!$])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        col = pos - line_start + 1
        if kind == "TVAR":
            tokens.append(Token("TVAR", chunk[:-3], line, col, int(chunk[-2])))
        elif kind == "LIFTEND":
            tokens.append(Token("LIFTEND", "]", line, col, int(chunk[-2])))
        elif kind != "ws":
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "<end of input>", line, pos - line_start + 1))
    return tokens


T = TypeVar("T")


@dataclass
class Scope:
    """Names visible to the relation and command parsers."""
    lets: Mapping[str, A.Relation] = field(default_factory=dict)
    families: Mapping[str, A.Family] = field(default_factory=dict)
    commands: Mapping[str, imp.Command] = field(default_factory=dict)


class Parser:
    def __init__(self, text: str, scope: Optional[Scope] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.scope = scope or Scope()
        self._bound: list[str] = []
        self._furthest: Optional[tuple[int, ParseError]] = None

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("SYM", "IDENT") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def error(self, message: str, *expected: str) -> ParseError:
        # a failed alternative that got further usually explains the problem better
        if self._furthest is not None and self._furthest[0] > self.pos:
            return self._furthest[1]
        t = self.tok
        return ParseError(f"{message}, found {t.text!r}", t.line, t.col, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", text)
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "IDENT" or t.text in KEYWORDS:
            raise self.error(f"expected {what}", what)
        self.pos += 1
        return t.text

    def expect_eof(self) -> None:
        if self.tok.kind != "EOF":
            raise self.error("unexpected trailing input", "<end of input>")

    def attempt(self, fn: Callable[[], T]) -> Optional[T]:
        saved = self.pos
        try:
            return fn()
        except ParseError as exc:
            if self._furthest is None or self.pos > self._furthest[0]:
                self._furthest = (self.pos, exc)
            self.pos = saved
            return None

    # -- arithmetic --

    def aexp(self) -> imp.AExp:
        left = self.aterm()
        while self.at("+", "-"):
            op = self.advance().text
            left = imp.BinOp(op, left, self.aterm())
        return left

    def aterm(self) -> imp.AExp:
        left = self.afactor()
        while self.at("*"):
            self.advance()
            left = imp.BinOp("*", left, self.afactor())
        return left

    def afactor(self) -> imp.AExp:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return imp.Num(int(t.text))
        if t.kind == "IDENT" and t.text not in KEYWORDS:
            self.advance()
            return imp.Var(t.text)
        if self.accept("-"):
            if self.tok.kind == "INT":
                return imp.Num(-int(self.advance().text))
            return imp.BinOp("-", imp.Num(0), self.afactor())
        if self.accept("("):
            e = self.aexp()
            self.expect(")")
            return e
        if t.kind == "TVAR":
            raise self.error("side-tagged variable in program text")
        raise self.error("expected arithmetic expression", "integer", "identifier", "(", "-")

    # -- boolean --

    def bexp(self) -> imp.BExp:
        left = self.bconj()
        while self.accept("||"):
            left = imp.Or(left, self.bconj())
        return left

    def bconj(self) -> imp.BExp:
        left = self.bneg()
        while self.accept("&&"):
            left = imp.And(left, self.bneg())
        return left

    def bneg(self) -> imp.BExp:
        if self.accept("!"):
            return imp.Not(self.bneg())
        return self.batom()

    def batom(self) -> imp.BExp:
        if self.accept("true"):
            return imp.Bool(True)
        if self.accept("false"):
            return imp.Bool(False)
        cmp = self.attempt(self.comparison)
        if cmp is not None:
            return cmp
        if self.accept("("):
            b = self.bexp()
            self.expect(")")
            return b
        raise self.error("expected boolean expression", "true", "false", "comparison", "(", "!")

    def comparison(self) -> imp.BExp:
        left = self.aexp()
        if not self.at("=", "!=", "<", "<=", ">", ">="):
            raise self.error("expected comparison operator", "=", "!=", "<", "<=", ">", ">=")
        op = self.advance().text
        return imp.Cmp(op, left, self.aexp())

    # -- commands --

    def starts_statement(self) -> bool:
        t = self.tok
        if t.kind == "IDENT":
            if t.text in ("skip", "if", "while"):
                return True
            return t.text not in KEYWORDS and self.peek().text == ":="
        return t.kind == "SYM" and t.text in ("{", "$")

    def program(self) -> imp.Command:
        stmts = [self.statement()]
        while self.at(";"):
            self.advance()
            if not self.starts_statement():
                break
            stmts.append(self.statement())
        return imp.seq(*stmts)

    def statement(self) -> imp.Command:
        if self.accept("skip"):
            return imp.SKIP
        if self.accept("if"):
            cond = self.bexp()
            self.expect("then")
            then = self.statement()
            orelse = self.statement() if self.accept("else") else imp.SKIP
            return imp.If(cond, then, orelse)
        if self.accept("while"):
            cond = self.bexp()
            self.expect("do")
            return imp.While(cond, self.statement())
        if self.accept("{"):
            body = self.program()
            self.expect("}")
            return body
        if self.accept("$"):
            name = self.ident("command name")
            if name not in self.scope.commands:
                raise self.error(f"unknown command ${name}")
            return self.scope.commands[name]
        t = self.tok
        if t.kind == "IDENT" and t.text not in KEYWORDS:
            self.advance()
            self.expect(":=")
            return imp.Assign(t.text, self.aexp())
        raise self.error("expected statement", "skip", "if", "while", "{", "identifier")

    # -- relations --

    def relation(self) -> A.Relation:
        left = self.rdisj()
        if self.accept("=>"):
            return A.Implies(left, self.relation())
        return left

    def rdisj(self) -> A.Relation:
        args = [self.rconj()]
        while self.accept("||"):
            args.append(self.rconj())
        return args[0] if len(args) == 1 else A.Disj(tuple(args))

    def rconj(self) -> A.Relation:
        args = [self.runary()]
        while self.accept("&&"):
            args.append(self.runary())
        return args[0] if len(args) == 1 else A.Conj(tuple(args))

    def runary(self) -> A.Relation:
        if self.accept("!"):
            return A.Neg(self.runary())
        if self.at("exists"):
            self.advance()
            var = self.ident("bound variable")
            self.expect(".")
            if var == "n":
                return A.FamilyExists(self.relation())
            self._bound.append(var)
            try:
                body = self.relation()
            finally:
                self._bound.pop()
            return A.ExistsValue(var, body)
        return self.rpostfix()

    def rpostfix(self) -> A.Relation:
        r = self.ratom()
        while self.at("["):
            self.advance()
            t = self.tok
            if t.kind != "TVAR":
                raise self.error("expected side-tagged variable", "x<1>", "x<2>")
            self.advance()
            self.expect(":=")
            e = self.aexp()
            self.expect("]")
            r = A.AssignPost(r, t.text, e, t.side)
        return r

    def ratom(self) -> A.Relation:
        t = self.tok
        if self.accept("true"):
            return A.TRUE
        if self.accept("false"):
            return A.FALSE
        if self.at("["):
            self.advance()
            cond = self.bexp()
            end = self.tok
            if end.kind != "LIFTEND":
                raise self.error("expected ']<1>' or ']<2>'", "]<1>", "]<2>")
            self.advance()
            return A.Lift(cond, end.side)
        if t.kind == "IDENT" and t.text == "flip" and self.peek().text == "(":
            self.advance()
            self.expect("(")
            r = self.relation()
            self.expect(")")
            return A.Flip(r)
        if t.kind == "IDENT" and t.text in self.scope.families and self.peek().text == "(":
            self.advance()
            self.expect("(")
            idx = self.texp()
            self.expect(")")
            return A.FamilyInstance(self.scope.families[t.text], idx)
        if t.kind == "IDENT" and t.text in self.scope.lets and t.text not in self._bound:
            self.advance()
            return self.scope.lets[t.text]
        cmp = self.attempt(self.rcompare)
        if cmp is not None:
            return cmp
        if self.accept("("):
            r = self.relation()
            self.expect(")")
            return r
        raise self.error("expected relation", "true", "false", "[", "(", "!", "exists", "comparison")

    def rcompare(self) -> A.Relation:
        left = self.texp()
        if not self.at("==", "!=", "<", "<=", ">", ">="):
            raise self.error("expected comparison operator", "==", "!=", "<", "<=", ">", ">=")
        op = self.advance().text
        return A.Compare(op, left, self.texp())

    def texp(self) -> A.TExp:
        left = self.tterm()
        while self.at("+", "-"):
            op = self.advance().text
            left = A.TBin(op, left, self.tterm())
        return left

    def tterm(self) -> A.TExp:
        left = self.tfactor()
        while self.accept("*"):
            left = A.TBin("*", left, self.tfactor())
        return left

    def tfactor(self) -> A.TExp:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return A.TNum(int(t.text))
        if t.kind == "TVAR":
            self.advance()
            return A.TVar(t.text, t.side)
        if t.kind == "IDENT" and t.text not in KEYWORDS:
            if t.text in self._bound:
                self.advance()
                return A.Bound(t.text)
            if t.text == "n":
                self.advance()
                return A.Param()
            raise self.error(f"unbound name {t.text!r} (program variables need a side tag)")
        if self.accept("-"):
            if self.tok.kind == "INT":
                return A.TNum(-int(self.advance().text))
            return A.TBin("-", A.TNum(0), self.tfactor())
        if self.accept("("):
            e = self.texp()
            self.expect(")")
            return e
        raise self.error("expected term", "integer", "x<1>", "x<2>", "(")


def parse_command(text: str, scope: Optional[Scope] = None) -> imp.Command:
    """Parse a whole IMP program."""
    p = Parser(text, scope)
    c = p.program()
    p.expect_eof()
    return c


def parse_aexp(text: str) -> imp.AExp:
    p = Parser(text)
    e = p.aexp()
    p.expect_eof()
    return e


def parse_bexp(text: str) -> imp.BExp:
    p = Parser(text)
    b = p.bexp()
    p.expect_eof()
    return b


def parse_relation(text: str, scope: Optional[Scope] = None) -> A.Relation:
    p = Parser(text, scope)
    r = p.relation()
    p.expect_eof()
    return r
