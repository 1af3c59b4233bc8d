"""Recursive-descent parser for the concrete formula syntax.

Global level::

    global  := gor ('->' global)?
    gor     := gand ('|' gand)*
    gand    := gunary ('&' gunary)*
    gunary  := '!' gunary | '@' AGENT '[' local ']' | '(' global ')'

Local level (owner fixed by the enclosing ``@`` or ``C``)::

    local   := lor ('->' local)?
    lor     := land ('|' land)*
    land    := lunary ('&' lunary)*
    lunary  := ('!' | 'X' | 'G' | 'F') lunary | 'C' AGENT '[' local ']'
             | 'true' | 'false' | PROP | '(' local ')'

Unicode spellings ``¬ → ∧ ∨ ○ □ ◇ ©`` are accepted as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, SignatureError
from .formula import (
    Always,
    And,
    At,
    Bottom,
    Comm,
    DistributedSignature,
    Eventually,
    Formula,
    Imp,
    Next,
    Not,
    Or,
    Prop,
    Top,
)

_ALIASES = {"¬": "!", "→": "->", "∧": "&", "∨": "|", "○": "X", "□": "G", "◇": "F", "©": "C"}
_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<arrow>->|→)
  | (?P<const>[⊤⊥])
  | (?P<sym>[!@\[\]()&|¬∧∨○□◇©])
  | (?P<ident>[A-Za-z0-9_]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'sym', 'ident' or 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for offset, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + offset + 1
        else:
            if kind == "arrow":
                kind, chunk = "sym", "->"
            elif kind == "const":
                kind, chunk = "ident", "true" if chunk == "⊤" else "false"
            elif kind == "sym":
                chunk = _ALIASES.get(chunk, chunk)
            if chunk in ("X", "G", "F", "C"):
                kind = "sym"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: DistributedSignature):
        self.tokens = tokenize(text)
        self.i = 0
        self.sig = sig

    # helpers -------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "sym" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}", tok)
        return tok

    def agent(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error("expected an agent identifier", tok)
        if tok.text not in self.sig.props:
            raise self.error(f"undeclared agent {tok.text!r}", tok)
        self.i += 1
        return tok.text

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # global level --------------------------------------------------------
    def global_(self) -> Formula:
        left = self.gor()
        if self.accept("->"):
            return Imp(left, self.global_())
        return left

    def gor(self) -> Formula:
        f = self.gand()
        while self.accept("|"):
            f = Or(f, self.gand())
        return f

    def gand(self) -> Formula:
        f = self.gunary()
        while self.accept("&"):
            f = And(f, self.gunary())
        return f

    def gunary(self) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return Not(self.gunary())
        if self.accept("@"):
            agent = self.agent()
            self.expect("[")
            body = self.local(agent)
            self.expect("]")
            return At(agent, body)
        if self.accept("("):
            f = self.global_()
            self.expect(")")
            return f
        found = tok.text or "end of input"
        raise self.error(f"expected a global formula, found {found!r}", tok)

    # local level ---------------------------------------------------------
    def local(self, owner: str) -> Formula:
        left = self.lor(owner)
        if self.accept("->"):
            return Imp(left, self.local(owner))
        return left

    def lor(self, owner: str) -> Formula:
        f = self.land(owner)
        while self.accept("|"):
            f = Or(f, self.land(owner))
        return f

    def land(self, owner: str) -> Formula:
        f = self.lunary(owner)
        while self.accept("&"):
            f = And(f, self.lunary(owner))
        return f

    def lunary(self, owner: str) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return Not(self.lunary(owner))
        if self.accept("X"):
            return Next(self.lunary(owner))
        if self.accept("G"):
            return Always(self.lunary(owner))
        if self.accept("F"):
            return Eventually(self.lunary(owner))
        if self.accept("C"):
            target = self.agent()
            self.expect("[")
            body = self.local(target)
            self.expect("]")
            return Comm(owner, target, body)
        if self.accept("("):
            f = self.local(owner)
            self.expect(")")
            return f
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "true":
                return Top(owner)
            if tok.text == "false":
                return Bottom(owner)
            prop_owner = self.sig.owner_of(tok.text)
            if prop_owner is None:
                raise self.error(f"undeclared proposition {tok.text!r}", tok)
            if prop_owner != owner:
                raise self.error(
                    f"proposition {tok.text!r} belongs to agent {prop_owner!r} "
                    f"but is used in the scope of {owner!r}",
                    tok,
                )
            return Prop(owner, tok.text)
        if tok.kind == "sym" and tok.text == "@":
            raise self.error("@ is not allowed inside a local formula", tok)
        found = tok.text or "end of input"
        raise self.error(f"expected a local formula, found {found!r}", tok)


def parse_global(text: str, sig: DistributedSignature) -> Formula:
    """Parse a global formula; derived connectives are desugared."""
    p = _Parser(text, sig)
    try:
        f = p.global_()
    except SignatureError as exc:  # e.g. mixed-owner implication
        raise p.error(str(exc)) from exc
    p.finish()
    return f


def parse_local(text: str, agent: str, sig: DistributedSignature) -> Formula:
    """Parse a local formula of ``agent``."""
    sig.check_agent(agent)
    p = _Parser(text, sig)
    f = p.local(agent)
    p.finish()
    return f
