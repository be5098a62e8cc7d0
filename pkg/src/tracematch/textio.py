"""Parsing and printing of the model and multi-trace file formats.

Model files::

    # comment
    lifelines: lp, lb, ls
    messages: pub, sub
    interaction: seq(loopW(strict(lp!pub,lb?pub)),strict(ls!sub,lb?sub))

The interaction expression may span several lines; whitespace inside it is
irrelevant.  Multi-trace files hold one line per lifeline, ``lifeline:``
followed by a ``.``-separated list of actions; omitted lifelines are empty.

Printers emit a canonical byte-stable form, and ``parse_model`` /
``parse_multitrace`` invert them exactly.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple, Union

from .multitrace import MultiTrace, make_multitrace
from .terms import (
    EMIT,
    RECV,
    Action,
    BINARY_OPS,
    Interaction,
    ModelError,
    Signature,
    act,
    binary,
    EMPTY,
    is_identifier,
    loop,
)

LOOP_NAMES = {"loopS": "S", "loopW": "W", "loopP": "P"}


class ParseError(ValueError):
    """Syntax or declaration error in an input file, with position information."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        path: Optional[str] = None,
    ) -> None:
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.path or "<input>"
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{where}: {self.message}"


def _to_text(data: Union[str, bytes]) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return data


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _parse_ident_list(
    body: str, lineno: int, what: str, path: Optional[str]
) -> Tuple[str, ...]:
    names = []
    for chunk in body.split(","):
        name = chunk.strip()
        if not is_identifier(name):
            raise ParseError(f"invalid {what} identifier {name!r}", lineno, None, path)
        names.append(name)
    return tuple(names)


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value: str, line: int, col: int) -> None:
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col


def _tokenize_expr(
    pieces: Iterable[Tuple[int, str]], path: Optional[str]
) -> List[_Token]:
    tokens: List[_Token] = []
    for lineno, text in pieces:
        col = 0
        n = len(text)
        while col < n:
            ch = text[col]
            if ch.isspace():
                col += 1
                continue
            if ch in "(),!?":
                kind = {"(": "lpar", ")": "rpar", ",": "comma", "!": "emit", "?": "recv"}[ch]
                tokens.append(_Token(kind, ch, lineno, col + 1))
                col += 1
                continue
            if ch == "0":
                tokens.append(_Token("zero", "0", lineno, col + 1))
                col += 1
                continue
            if ch.isalpha() or ch == "_":
                start = col
                while col < n and (text[col].isalnum() or text[col] == "_"):
                    col += 1
                tokens.append(_Token("ident", text[start:col], lineno, start + 1))
                continue
            raise ParseError(f"unexpected character {ch!r}", lineno, col + 1, path)
    return tokens


class _ExprParser:
    def __init__(self, tokens: List[_Token], sig: Signature, path: Optional[str]) -> None:
        self.tokens = tokens
        self.sig = sig
        self.path = path
        self.pos = 0

    def error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        if token is None:
            token = self.tokens[-1] if self.tokens else None
        if token is None:
            return ParseError(message, None, None, self.path)
        return ParseError(message, token.line, token.col, self.path)

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(
                f"unexpected end of input, expected {what}", None, None, self.path
            )
        if tok.kind != kind:
            raise self.error(f"expected {what}, found {tok.value!r}", tok)
        self.pos += 1
        return tok

    def parse(self) -> Interaction:
        term = self.expr()
        tok = self.peek()
        if tok is not None:
            raise self.error(f"trailing input {tok.value!r}", tok)
        return term

    def expr(self) -> Interaction:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", None, None, self.path)
        if tok.kind == "zero":
            self.pos += 1
            return EMPTY
        if tok.kind != "ident":
            raise self.error(f"expected an expression, found {tok.value!r}", tok)
        self.pos += 1
        nxt = self.peek()
        if nxt is not None and nxt.kind in ("emit", "recv"):
            return self.action(tok)
        if nxt is not None and nxt.kind == "lpar":
            return self.operator(tok)
        raise self.error(f"dangling identifier {tok.value!r}", tok)

    def action(self, head: _Token) -> Interaction:
        kind_tok = self.tokens[self.pos]
        self.pos += 1
        msg_tok = self.take("ident", "a message identifier")
        if not self.sig.has_lifeline(head.value):
            raise self.error(f"undeclared lifeline {head.value!r}", head)
        if msg_tok.value not in self.sig.messages:
            raise self.error(f"undeclared message {msg_tok.value!r}", msg_tok)
        kind = EMIT if kind_tok.kind == "emit" else RECV
        return act(Action(head.value, kind, msg_tok.value))

    def operator(self, head: _Token) -> Interaction:
        name = head.value
        self.take("lpar", "'('")
        if name in BINARY_OPS:
            left = self.expr()
            self.take("comma", "','")
            right = self.expr()
            self.take("rpar", "')'")
            return binary(name, left, right)
        if name in LOOP_NAMES:
            body = self.expr()
            self.take("rpar", "')'")
            return loop(LOOP_NAMES[name], body)
        raise self.error(f"unknown operator {name!r}", head)


def parse_model(
    data: Union[str, bytes], path: Optional[str] = None
) -> Tuple[Signature, Interaction]:
    """Parse a model file into its signature and interaction term."""
    text = _to_text(data)
    lines = text.split("\n")
    headers: Dict[str, Tuple[int, str]] = {}
    expr_pieces: List[Tuple[int, str]] = []
    state = "lifelines"
    for lineno, raw in enumerate(lines, start=1):
        line = _strip_comment(raw)
        if state == "interaction-body":
            expr_pieces.append((lineno, line))
            continue
        if not line.strip():
            continue
        key, sep, body = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError(f"expected '{state}:' header", lineno, None, path)
        if key != state:
            raise ParseError(
                f"expected '{state}:' header, found {key!r}", lineno, None, path
            )
        if state == "lifelines":
            headers["lifelines"] = (lineno, body)
            state = "messages"
        elif state == "messages":
            headers["messages"] = (lineno, body)
            state = "interaction"
        else:
            expr_pieces.append((lineno, body))
            state = "interaction-body"
    if state in ("lifelines", "messages"):
        raise ParseError(f"missing '{state}:' header", len(lines), None, path)
    if state == "interaction":
        raise ParseError("missing 'interaction:' header", len(lines), None, path)

    lifelines = _parse_ident_list(headers["lifelines"][1], headers["lifelines"][0], "lifeline", path)
    messages = _parse_ident_list(headers["messages"][1], headers["messages"][0], "message", path)
    try:
        sig = Signature(lifelines, messages)
    except ModelError as exc:
        raise ParseError(str(exc), headers["lifelines"][0], None, path) from None

    tokens = _tokenize_expr(expr_pieces, path)
    if not tokens:
        raise ParseError("missing interaction expression", expr_pieces[0][0], None, path)
    term = _ExprParser(tokens, sig, path).parse()
    return sig, term


def print_model(sig: Signature, i: Interaction) -> bytes:
    """Canonical, byte-stable rendering of a model; inverse of parse_model."""
    lines = [
        "lifelines: " + ", ".join(sig.lifelines),
        "messages: " + ", ".join(sig.messages),
        "interaction: " + i.text,
        "",
    ]
    return "\n".join(lines).encode("utf-8")


def _parse_action_text(
    text: str, sig: Signature, lineno: int, path: Optional[str]
) -> Action:
    for kind in (EMIT, RECV):
        if kind in text:
            lifeline, _, message = text.partition(kind)
            lifeline = lifeline.strip()
            message = message.strip()
            if not sig.has_lifeline(lifeline):
                raise ParseError(f"undeclared lifeline {lifeline!r}", lineno, None, path)
            if message not in sig.messages:
                raise ParseError(f"undeclared message {message!r}", lineno, None, path)
            return Action(lifeline, kind, message)
    raise ParseError(f"malformed action {text!r}", lineno, None, path)


def parse_multitrace(
    data: Union[str, bytes], sig: Signature, path: Optional[str] = None
) -> MultiTrace:
    """Parse a multi-trace file against a signature; omitted lifelines are empty."""
    text = _to_text(data)
    components: Dict[str, List[Action]] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        lifeline, sep, body = line.partition(":")
        lifeline = lifeline.strip()
        if not sep:
            raise ParseError("expected 'lifeline: actions' line", lineno, None, path)
        if not sig.has_lifeline(lifeline):
            raise ParseError(f"undeclared lifeline {lifeline!r}", lineno, None, path)
        if lifeline in components:
            raise ParseError(f"duplicate component for {lifeline!r}", lineno, None, path)
        actions: List[Action] = []
        body = body.strip()
        if body:
            for chunk in body.split("."):
                action = _parse_action_text(chunk.strip(), sig, lineno, path)
                if action.lifeline != lifeline:
                    raise ParseError(
                        f"action {action.text} does not belong on component {lifeline!r}",
                        lineno,
                        None,
                        path,
                    )
                actions.append(action)
        components[lifeline] = actions
    return make_multitrace(sig, components)


def print_multitrace(mt: MultiTrace) -> bytes:
    """Canonical rendering with one line per lifeline, empties included."""
    lines = []
    for lifeline, part in zip(mt.signature.lifelines, mt.parts):
        body = ".".join(a.text for a in part)
        lines.append(f"{lifeline}: {body}" if body else f"{lifeline}:")
    lines.append("")
    return "\n".join(lines).encode("utf-8")
