"""Tokenizer shared by theory, structure and cone files."""
from __future__ import annotations

from dataclasses import dataclass


class DSLError(ValueError):
    """Any error in a source file, with a 1-based position when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None,
                 path: str | None = None, expected: tuple = ()):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        self.expected = tuple(expected)
        super().__init__(self.render())

    def render(self) -> str:
        where = ""
        if self.line is not None:
            where = f"{self.path or '<input>'}:{self.line}:{self.col}: "
        elif self.path:
            where = f"{self.path}: "
        tail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        return f"{where}{self.message}{tail}"


class LexError(DSLError):
    pass


KEYWORDS = {
    "base", "import", "arity", "language", "fun", "rel", "theory", "axiom", "schema", "forall",
    "exists", "exists!", "exists!!", "true", "false", "in", "structure", "carrier", "morphism", "cone",
    "apex", "leg", "finset", "poset", "metric", "abgroup", "inf",
}

# multi-character symbols first (longest match)
SYMBOLS = ["(*)", "|-", "/\\", "\\/", "->", "..", "Q+", "{", "}", "(", ")", "[", "]", ",", ";", ":", ".",
           "=", "|", "<", "^", "+", "-", "*", "/"]

UNICODE = {
    "∧": "/\\", "∨": "\\/", "⊢": "|-", "⊗": "(*)", "→": "->", "⊤": "true", "⊥": "false",
    "∀": "forall", "∞": "inf",
}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "int", "string", "kw", "sym", "eof"
    value: str
    line: int
    col: int

    def __repr__(self):
        return f"{self.kind}:{self.value}@{self.line}:{self.col}"


def tokenize(text: str, path: str | None = None) -> list[Token]:
    out: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def emit(kind, value, l, c):
        out.append(Token(kind, value, l, c))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "∃":
            j = i + 1
            while j < n and text[j] == "!" and j - i <= 2:
                j += 1
            if j < n and text[j] == "!":
                raise LexError("unexpected '!'", line, col + (j - i), path)
            emit("kw", "exists" + "!" * (j - i - 1), start_line, start_col)
            col += j - i
            i = j
            continue
        if ch in UNICODE:
            word = UNICODE[ch]
            emit("kw" if word in KEYWORDS else "sym", word, start_line, start_col)
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word == "exists":
                bangs = 0
                while j < n and text[j] == "!" and bangs < 2:
                    j += 1
                    bangs += 1
                if j < n and text[j] == "!":
                    raise LexError("unexpected '!'", line, col + (j - i), path)
                word = "exists" + "!" * bangs
            if word == "Q" and j < n and text[j] == "+":
                j += 1
                word = "Q+"
                emit("sym", word, start_line, start_col)
            else:
                emit("kw" if word in KEYWORDS else "ident", word, start_line, start_col)
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            emit("int", text[i:j], start_line, start_col)
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"' and text[j] != "\n":
                j += 1
            if j >= n or text[j] != '"':
                raise LexError("unterminated string", line, col, path)
            emit("string", text[i + 1:j], start_line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                emit("sym", sym, start_line, start_col)
                i += len(sym)
                col += len(sym)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", line, col, path)
    out.append(Token("eof", "", line, col))
    return out
