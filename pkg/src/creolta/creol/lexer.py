"""Tokenizer for Creol sources.

Comments are not discarded: each one is attached to the token that precedes
it (``Token.trailing``) so the parser can pick up timing directives written
after a statement.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field


class CreolSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, file: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.file = file
        where = f"{file}:" if file else ""
        super().__init__(f"{where}{line}:{col}: {message}")


KEYWORDS = {
    "interface", "inherits", "begin", "end", "with", "op", "class", "implements",
    "var", "int", "bool", "skip", "release", "await", "while", "do", "od", "if",
    "then", "else", "fi", "true", "false", "self",
}

# longest operators first
_OPS = [":=", "==", "!=", "<=", ">=", "/\\", "\\/", "&&", "||",
        "<", ">", "~", "!", "?", ";", ",", ":", ".", "(", ")", "+", "-", "*"]

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<nl>\n)"
    r"|(?P<lc>//[^\n]*)"
    r"|(?P<bc>/\*.*?\*/)"
    r"|(?P<num>\d+)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>" + "|".join(re.escape(o) for o in _OPS) + ")",
    re.S,
)


@dataclass
class Token:
    kind: str  # 'id' 'kw' 'num' 'op' 'eof'
    text: str
    line: int
    col: int
    trailing: list[tuple[str, int, int]] = field(default_factory=list)  # (comment, line, col)

    def is_(self, text: str) -> bool:
        return self.kind in ("kw", "op") and self.text == text

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def tokenize(text: str, file: str = "") -> list[Token]:
    out: list[Token] = []
    leading: list[tuple[str, int, int]] = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            if text.startswith("/*", pos):
                raise CreolSyntaxError("unterminated comment", line, col, file)
            raise CreolSyntaxError(f"unexpected character {text[pos]!r}", line, col, file)
        kind = m.lastgroup
        s = m.group()
        if kind in ("lc", "bc"):
            target = out[-1].trailing if out else leading
            target.append((s, line, col))
        elif kind == "num":
            out.append(Token("num", s, line, col))
        elif kind == "id":
            out.append(Token("kw" if s in KEYWORDS else "id", s, line, col))
        elif kind == "op":
            out.append(Token("op", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out
