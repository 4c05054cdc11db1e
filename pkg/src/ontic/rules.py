"""Parser for ``.rule`` files.

Grammar (whitespace insignificant, ``#`` starts a comment)::

    file    := 'rule' IDENT '{' decl* '}'
    decl    := 'r' '=' NAT ';'
             | 'succ' NAT ':' affine ';'
             | 'map' NAT '->' NAT (',' NAT)* ';'
    affine  := NAT '*' 'x' ('+' NAT)? | 'x' ('+' NAT)? | NAT

A rule uses either ``succ`` declarations (one affine form per branch) or
``map`` declarations (a finite successor table), never both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .model import RuleDomainError, RuleSystem


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class RuleSpec:
    name: str
    r: int
    affine: Optional[tuple[tuple[int, int], ...]] = None
    table: Optional[tuple[tuple[int, tuple[int, ...]], ...]] = None

    @property
    def k(self) -> int:
        return 1 << self.r


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{};:=*+,])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            toks.append(_Tok(kind if kind in ("nat", "ident") else chunk, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        return RuleSyntaxError(msg, tok.line, tok.col)

    def expect(self, kind: str, what: Optional[str] = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {what or repr(kind)}, found {found!r}")
        self.i += 1
        return tok

    def keyword(self, word: str) -> _Tok:
        tok = self.tok
        if tok.kind != "ident" or tok.text != word:
            raise self.error(f"expected {word!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def nat(self) -> int:
        return int(self.expect("nat", "a natural number").text)

    def parse(self) -> RuleSpec:
        start = self.keyword("rule")
        name = self.expect("ident", "a rule name").text
        self.expect("{")
        r = None
        r_tok = None
        affine: dict[int, tuple[int, int]] = {}
        table: dict[int, tuple[int, ...]] = {}
        entry_toks: dict[int, _Tok] = {}
        while not self.accept("}"):
            tok = self.tok
            if tok.kind != "ident":
                raise self.error(f"expected a declaration, found {tok.text or 'end of input'!r}")
            if tok.text == "r":
                self.i += 1
                if r is not None:
                    raise self.error("duplicate r declaration", tok)
                self.expect("=")
                r, r_tok = self.nat(), tok
            elif tok.text == "succ":
                self.i += 1
                if table:
                    raise self.error("cannot mix succ and map declarations", tok)
                idx_tok = self.tok
                idx = self.nat()
                if idx in affine:
                    raise self.error(f"duplicate branch index {idx}", idx_tok)
                self.expect(":")
                affine[idx] = self.affine()
                entry_toks[idx] = idx_tok
            elif tok.text == "map":
                self.i += 1
                if affine:
                    raise self.error("cannot mix succ and map declarations", tok)
                key_tok = self.tok
                key = self.nat()
                if key in table:
                    raise self.error(f"duplicate table key {key}", key_tok)
                self.expect("->")
                succ = [self.nat()]
                while self.accept(","):
                    succ.append(self.nat())
                table[key] = tuple(succ)
                entry_toks[key] = key_tok
            else:
                raise self.error(f"unknown declaration {tok.text!r}")
            self.expect(";")
        self.expect("eof", "end of input")

        if r is None:
            raise self.error("missing r declaration", start)
        k = 1 << r
        if affine:
            for idx, t in entry_toks.items():
                if idx >= k:
                    raise self.error(f"branch index {idx} out of range for r={r}", t)
            if len(affine) != k:
                raise self.error(f"rule has {len(affine)} branches, r={r} requires {k}", r_tok)
            return RuleSpec(name, r, affine=tuple(affine[i] for i in range(k)))
        if table:
            for key, succ in table.items():
                if len(succ) != k:
                    raise self.error(
                        f"map {key} lists {len(succ)} successors, r={r} requires {k}",
                        entry_toks[key],
                    )
            return RuleSpec(name, r, table=tuple(table.items()))
        raise self.error("rule declares no branches", start)

    def affine(self) -> tuple[int, int]:
        if self.tok.kind == "nat":
            a = self.nat()
            if not self.accept("*"):
                return 0, a
        else:
            a = 1
        tok = self.tok
        if tok.kind != "ident" or tok.text != "x":
            raise self.error(f"expected 'x', found {tok.text or 'end of input'!r}")
        self.i += 1
        b = self.nat() if self.accept("+") else 0
        return a, b


def parse_rule(text: str) -> RuleSpec:
    return _Parser(text).parse()


def _affine_text(a: int, b: int) -> str:
    if a == 0:
        return str(b)
    head = "x" if a == 1 else f"{a}*x"
    return head if b == 0 else f"{head}+{b}"


def format_rule(spec: RuleSpec) -> str:
    lines = [f"rule {spec.name} {{", f"  r={spec.r};"]
    if spec.affine is not None:
        lines += [f"  succ {i}: {_affine_text(a, b)};" for i, (a, b) in enumerate(spec.affine)]
    else:
        lines += [f"  map {key} -> {', '.join(map(str, succ))};" for key, succ in spec.table]
    lines.append("}")
    return "\n".join(lines) + "\n"


def compile_rule(spec: RuleSpec) -> RuleSystem:
    if spec.affine is not None:
        forms = spec.affine

        def step(x: int) -> list[int]:
            return [a * x + b for a, b in forms]

    else:
        table = {key: list(succ) for key, succ in spec.table}

        def step(x: int) -> list[int]:
            try:
                return table[x]
            except KeyError:
                raise RuleDomainError(x) from None

    return RuleSystem(spec.name, spec.r, step)


BUNDLED = ("binary_expansion", "successor", "footnote", "triple", "cycle5", "identity")


def load_rule(source: Union[str, Path]) -> RuleSystem:
    """Load a rule from a ``.rule`` path or the name of a bundled rule."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif str(source) in BUNDLED:
        text = resources.files("ontic").joinpath("data", f"{source}.rule").read_text(encoding="utf-8")
    else:
        raise FileNotFoundError(f"no rule file or bundled rule named {str(source)!r}")
    return compile_rule(parse_rule(text))
