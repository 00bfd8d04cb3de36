"""Textual syntax of scripts: parser and pretty-printer.

Grammar, loosest binding first::

    expr    := 'if' expr 'then' expr 'else' expr | or
    or      := and ('or' and)*
    and     := not ('and' not)*
    not     := 'not' not | cmp
    cmp     := add (('=' | '<' | '>' | '>=') add)?
    add     := post (('+' | '-') post)*
    post    := atom ('.' INT)* | txo '.' ('arg' | 'val' | named) ('.' INT)*
    atom    := INT | '-' INT | 0xHEX | 'true' | 'false' | '(' expr ')'
             | 'rtx.wit' | 'inidx' | 'outidx'
             | 'size(' expr ')' | 'H(' expr ')' | 'versig(' expr ',' expr ')'
             | 'verscr(' expr ',' txo ')' | 'verrec(' txo ')'
             | 'inlen(' txo ')' | 'outlen(' txo ')' | 'txid(' txo ')'
    txo     := ('rtxo' | 'stxo' | 'ptxo') '(' expr ')' | 'ctxo'
    named   := 'op' | 'owner' | 'tkval' | 'tkid'     (arg.1 .. arg.4)

Derived forms expand at parse time: `a and b` is `if a then b else 0`,
`a or b` is `if a then 1 else b`, `not a` is `if a then 0 else 1`,
`a > b` is `b < a`, `a >= b` is `not (a < b)`, `true`/`false` are 1/0.
Comments run from `//` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import ast as A

NAMED_FIELDS = {"op": 1, "owner": 2, "tkval": 3, "tkid": 4}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<hex>0x[0-9a-fA-F]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>>=|[-+=<>().,])
    """,
    re.VERBOSE,
)

KEYWORDS = {"if", "then", "else", "and", "or", "not"}


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.pos = pos
        self.line = line
        self.column = col


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "hex" and len(m.group()) % 2:
                raise ParseError("odd-length hex literal", text, pos)
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


FALSE = A.Const(0)
TRUE = A.Const(1)


def _and(a: A.Script, b: A.Script) -> A.Script:
    return A.If(a, b, FALSE)


def _or(a: A.Script, b: A.Script) -> A.Script:
    return A.If(a, TRUE, b)


def _not(a: A.Script) -> A.Script:
    return A.If(a, FALSE, TRUE)


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.text, self.tok.pos)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> A.Script:
        e = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> A.Script:
        if self.accept("if"):
            c = self.expr()
            self.expect("then")
            t = self.expr()
            self.expect("else")
            return A.If(c, t, self.expr())
        return self.or_()

    def or_(self) -> A.Script:
        e = self.and_()
        while self.accept("or"):
            e = _or(e, self.and_())
        return e

    def and_(self) -> A.Script:
        e = self.not_()
        while self.accept("and"):
            e = _and(e, self.not_())
        return e

    def not_(self) -> A.Script:
        if self.accept("not"):
            return _not(self.not_())
        return self.cmp()

    def cmp(self) -> A.Script:
        left = self.add()
        if self.accept("="):
            return A.BinOp("=", left, self.add())
        if self.accept("<"):
            return A.BinOp("<", left, self.add())
        if self.accept(">"):
            return A.BinOp("<", self.add(), left)
        if self.accept(">="):
            return _not(A.BinOp("<", left, self.add()))
        return left

    def add(self) -> A.Script:
        e = self.post()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            e = A.BinOp(op, e, self.post())
        return e

    def index_suffixes(self, e: A.Script) -> A.Script:
        while self.at("."):
            self.i += 1
            if self.tok.kind != "int":
                raise self.error("expected a sequence index")
            e = A.SeqAt(e, int(self.tok.text))
            self.i += 1
        return e

    def post(self) -> A.Script:
        if self.tok.kind == "ident" and self.tok.text in ("rtxo", "stxo", "ptxo", "ctxo"):
            txo = self.txo()
            self.expect(".")
            name = self.tok.text
            if self.tok.kind != "ident" or name not in ("arg", "val", *NAMED_FIELDS):
                raise self.error("expected an output field (arg, val, op, owner, tkval, tkid)")
            self.i += 1
            if name in NAMED_FIELDS:
                e: A.Script = A.SeqAt(A.TxoField(txo, "arg"), NAMED_FIELDS[name])
            else:
                e = A.TxoField(txo, name)
            return self.index_suffixes(e)
        return self.index_suffixes(self.atom())

    def txo(self) -> A.TxoSel:
        if self.tok.kind != "ident":
            raise self.error("expected rtxo, stxo, ptxo or ctxo")
        name = self.tok.text
        if name == "ctxo":
            self.i += 1
            return A.ctxo()
        if name not in A.TXO_KINDS:
            raise self.error("expected rtxo, stxo, ptxo or ctxo")
        self.i += 1
        self.expect("(")
        e = self.expr()
        self.expect(")")
        return A.TxoSel(name, e)

    def call1(self) -> A.Script:
        self.expect("(")
        e = self.expr()
        self.expect(")")
        return e

    def call_txo(self) -> A.TxoSel:
        self.expect("(")
        t = self.txo()
        self.expect(")")
        return t

    def atom(self) -> A.Script:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return A.Const(int(tok.text))
        if tok.kind == "hex":
            self.i += 1
            return A.Const(bytes.fromhex(tok.text[2:]))
        if tok.kind == "op" and tok.text == "-":
            self.i += 1
            if self.tok.kind != "int":
                raise self.error("expected an integer after unary '-'")
            n = int(self.tok.text)
            self.i += 1
            return A.Const(-n)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"unexpected {tok.text or 'end of input'!r}")
        name = tok.text
        self.i += 1
        if name == "true":
            return TRUE
        if name == "false":
            return FALSE
        if name == "rtx":
            self.expect(".")
            if not self.accept("wit"):
                raise self.error("expected 'wit'")
            return A.RtxWit()
        if name == "inidx":
            return A.InIdx()
        if name == "outidx":
            return A.OutIdx()
        if name == "size":
            return A.Size(self.call1())
        if name in ("H", "hash"):
            return A.Hash(self.call1())
        if name == "versig":
            self.expect("(")
            k = self.expr()
            self.expect(",")
            s = self.expr()
            self.expect(")")
            return A.Versig(k, s)
        if name == "verscr":
            self.expect("(")
            lit = self.expr()
            self.expect(",")
            t = self.txo()
            self.expect(")")
            return A.Verscr(lit, t)
        if name == "verrec":
            return A.Verrec(self.call_txo())
        if name == "inlen":
            return A.InLen(self.call_txo())
        if name == "outlen":
            return A.OutLen(self.call_txo())
        if name == "txid":
            return A.TxId(self.call_txo())
        self.i -= 1
        raise self.error(f"unknown identifier {name!r}")


def parse_text(text: str) -> A.Script:
    return A.intern(_Parser(text).parse())


def parse_script(src: str | bytes) -> A.Script:
    """Parse either the textual form (str) or the binary encoding (bytes)."""
    if isinstance(src, bytes):
        from .codec import decode_script

        return decode_script(src)
    return parse_text(src)


# printer precedence levels
P_IF, P_OR, P_AND, P_NOT, P_CMP, P_ADD, P_POST = range(7)


def _is_int(e: A.Script, n: int) -> bool:
    return isinstance(e, A.Const) and isinstance(e.value, int) and e.value == n


def _txo_text(t: A.TxoSel) -> str:
    if t.kind == "stxo" and isinstance(t.index, A.InIdx):
        return "ctxo"
    return f"{t.kind}({_text(t.index, P_IF)})"


def _wrap(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def _text(e: A.Script, ctx: int) -> str:
    if isinstance(e, A.Const):
        if isinstance(e.value, bytes):
            return "0x" + e.value.hex()
        return str(e.value)
    if isinstance(e, A.If):
        if _is_int(e.then, 0) and _is_int(e.orelse, 1):
            return _wrap("not " + _text(e.cond, P_NOT), P_NOT, ctx)
        if _is_int(e.orelse, 0):
            return _wrap(f"{_text(e.cond, P_AND)} and {_text(e.then, P_NOT)}", P_AND, ctx)
        if _is_int(e.then, 1):
            return _wrap(f"{_text(e.cond, P_OR)} or {_text(e.orelse, P_AND)}", P_OR, ctx)
        s = f"if {_text(e.cond, P_IF)} then {_text(e.then, P_IF)} else {_text(e.orelse, P_IF)}"
        return _wrap(s, P_IF, ctx)
    if isinstance(e, A.BinOp):
        if e.op in "+-":
            return _wrap(f"{_text(e.left, P_ADD)} {e.op} {_text(e.right, P_POST)}", P_ADD, ctx)
        return _wrap(f"{_text(e.left, P_ADD)} {e.op} {_text(e.right, P_ADD)}", P_CMP, ctx)
    if isinstance(e, A.SeqAt):
        inner = _text(e.seq, P_POST)
        # a negative literal would otherwise swallow the dot as `-5.1`
        if isinstance(e.seq, A.Const) and isinstance(e.seq.value, int) and e.seq.value < 0:
            inner = f"({inner})"
        return f"{inner}.{e.index}"
    if isinstance(e, A.RtxWit):
        return "rtx.wit"
    if isinstance(e, A.Size):
        return f"size({_text(e.arg, P_IF)})"
    if isinstance(e, A.Hash):
        return f"H({_text(e.arg, P_IF)})"
    if isinstance(e, A.Versig):
        return f"versig({_text(e.key, P_IF)}, {_text(e.sig, P_IF)})"
    if isinstance(e, A.TxoField):
        return f"{_txo_text(e.txo)}.{e.field}"
    if isinstance(e, A.Verscr):
        return f"verscr({_text(e.script, P_IF)}, {_txo_text(e.txo)})"
    if isinstance(e, A.Verrec):
        return f"verrec({_txo_text(e.txo)})"
    if isinstance(e, A.InIdx):
        return "inidx"
    if isinstance(e, A.OutIdx):
        return "outidx"
    if isinstance(e, A.InLen):
        return f"inlen({_txo_text(e.txo)})"
    if isinstance(e, A.OutLen):
        return f"outlen({_txo_text(e.txo)})"
    if isinstance(e, A.TxId):
        return f"txid({_txo_text(e.txo)})"
    raise TypeError(f"not a script node: {e!r}")


def to_text(e: A.Script) -> str:
    return _text(e, P_IF)
