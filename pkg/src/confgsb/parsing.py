"""Concrete syntax: expression parsing, canonical printing, presentation files.

Expressions use angle-bracket products and brace derivation prefixes::

    a<0,0> a - a
    3/2 (a<1,0> a)<1,1> a + D{0,1} a

Unparenthesized product chains associate to the right; parentheses force any
other bracketing and may enclose whole linear combinations (products
distribute over them).  A ``D{...}`` prefix applies to the generator that
immediately follows it.

A presentation file is line oriented, with ``#`` comments::

    algebra
      n: 2
      locality: [2, 2]
      generators: [a]

    relations
      f: a<0,0> a - a

    lie
      bracket(h, f): -2*f

Parsing is strict: unknown generators, index-arity mismatches, and stray
tokens raise :class:`ParseError` carrying the line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional, Sequence

from .indices import MultiIndex
from .words import (
    AlgebraSignature,
    ConfPoly,
    ExprTree,
    Leaf,
    LinComb,
    Node,
    NormalWord,
)

__all__ = [
    "ParseError",
    "Presentation",
    "parse_expression",
    "parse_index",
    "parse_presentation",
    "format_index",
    "format_word",
    "format_polynomial",
    "format_lincomb",
    "format_gen_combo",
]


class ParseError(ValueError):
    """Syntax or validation error with a source position."""

    def __init__(self, message: str, line: Optional[int] = None,
                 col: Optional[int] = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            where += ": "
        super().__init__(where + message)


# --------------------------------------------------------------------------
# tokenizer


class _Token(NamedTuple):
    kind: str  # "int", "name", or the punctuation text itself
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct><|>|\{|\}|\(|\)|\[|\]|:|,|\+|-|\*|/)"
)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokenize(text: str, line: int = 1, col: int = 1) -> list[_Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        piece = m.group()
        if kind == "ws":
            newlines = piece.count("\n")
            if newlines:
                line += newlines
                col = len(piece) - piece.rfind("\n")
            else:
                col += len(piece)
        elif kind == "comment":
            col += len(piece)
        else:
            tok_kind = piece if kind == "punct" else kind
            out.append(_Token(tok_kind, piece, line, col))
            col += len(piece)
        pos = m.end()
    return out


# --------------------------------------------------------------------------
# expression parser


class _Parser:
    def __init__(self, tokens: list[_Token], sig: AlgebraSignature):
        self.tokens = tokens
        self.sig = sig
        self.pos = 0

    # -- token plumbing --

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self) -> _Token:
        tok = self._peek()
        if tok is None:
            self._fail("unexpected end of input")
        self.pos += 1
        return tok

    def _expect(self, kind: str) -> _Token:
        tok = self._peek()
        if tok is None or tok.kind != kind:
            got = "end of input" if tok is None else repr(tok.text)
            self._fail(f"expected {kind!r}, got {got}")
        return self._take()

    def _fail(self, message: str):
        tok = self._peek()
        if tok is not None:
            raise ParseError(message, tok.line, tok.col)
        if self.tokens:
            last = self.tokens[-1]
            raise ParseError(message, last.line, last.col + len(last.text))
        raise ParseError(message)

    def expect_end(self) -> None:
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected trailing {tok.text!r}", tok.line, tok.col)

    # -- grammar --

    def parse_comb(self) -> LinComb:
        out: LinComb = []
        sign = Fraction(1)
        tok = self._peek()
        if tok is not None and tok.kind in ("+", "-"):
            self._take()
            if tok.kind == "-":
                sign = Fraction(-1)
        while True:
            for coeff, tree in self.parse_term():
                out.append((sign * coeff, tree))
            tok = self._peek()
            if tok is None or tok.kind not in ("+", "-"):
                break
            self._take()
            sign = Fraction(1) if tok.kind == "+" else Fraction(-1)
        return out

    def parse_term(self) -> LinComb:
        coeff = Fraction(1)
        tok = self._peek()
        if tok is not None and tok.kind == "int":
            self._take()
            num = int(tok.text)
            nxt = self._peek()
            if nxt is not None and nxt.kind == "/":
                self._take()
                den_tok = self._expect("int")
                den = int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.col)
                coeff = Fraction(num, den)
            else:
                coeff = Fraction(num)
            nxt = self._peek()
            if nxt is not None and nxt.kind == "*":
                self._take()
        product = self.parse_product()
        return [(coeff * c, t) for c, t in product]

    def parse_product(self) -> LinComb:
        left = self.parse_atom()
        tok = self._peek()
        if tok is not None and tok.kind == "<":
            m = self.parse_angle_index()
            right = self.parse_product()  # chains associate to the right
            return [
                (cl * cr, Node(tl, m, tr))
                for cl, tl in left
                for cr, tr in right
            ]
        return left

    def parse_atom(self) -> LinComb:
        tok = self._peek()
        if tok is None:
            self._fail("expected a generator or '('")
        if tok.kind == "(":
            self._take()
            comb = self.parse_comb()
            self._expect(")")
            return comb
        if tok.kind == "name":
            nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            if tok.text == "D" and nxt is not None and nxt.kind == "{":
                self._take()
                self._expect("{")
                dexp = self.parse_index_list("}")
                self._expect("}")
                gen_tok = self._peek()
                if gen_tok is None or gen_tok.kind != "name":
                    self._fail("derivation prefix requires a generator")
                self._take()
                return [(Fraction(1), Leaf(self._gen(gen_tok), dexp))]
            self._take()
            return [(Fraction(1), Leaf(self._gen(tok), self.sig.zero_exp()))]
        self._fail("expected a generator or '('")

    def parse_angle_index(self) -> MultiIndex:
        self._expect("<")
        m = self.parse_index_list(">")
        self._expect(">")
        return m

    def parse_index_list(self, closer: str) -> MultiIndex:
        open_tok = self._peek()
        entries = [int(self._expect("int").text)]
        while True:
            tok = self._peek()
            if tok is not None and tok.kind == ",":
                self._take()
                entries.append(int(self._expect("int").text))
            else:
                break
        if len(entries) != self.sig.n:
            line = open_tok.line if open_tok else None
            col = open_tok.col if open_tok else None
            raise ParseError(
                f"index arity {len(entries)} does not match n = {self.sig.n}",
                line, col)
        return tuple(entries)

    def _gen(self, tok: _Token) -> int:
        if tok.text not in self.sig.generators:
            raise ParseError(f"unknown generator {tok.text!r}", tok.line, tok.col)
        return self.sig.gen_index(tok.text)


def parse_expression(sig: AlgebraSignature, text: str,
                     line: int = 1, col: int = 1) -> LinComb:
    """Parse a linear combination of labelled products over ``sig``."""
    tokens = _tokenize(text, line, col)
    if len(tokens) == 1 and tokens[0].kind == "int" and tokens[0].text == "0":
        return []  # the zero polynomial prints as "0"
    parser = _Parser(tokens, sig)
    comb = parser.parse_comb()
    parser.expect_end()
    return comb


def parse_index(text: str, n: int) -> MultiIndex:
    """Parse a bare product label: ``1,0`` (also ``<1,0>`` or ``[1, 0]``)."""
    body = text.strip()
    for opener, closer in (("<", ">"), ("[", "]")):
        if body.startswith(opener) and body.endswith(closer):
            body = body[1:-1]
            break
    parts = [p.strip() for p in body.split(",")]
    if not all(re.fullmatch(r"\d+", p) for p in parts):
        raise ParseError(f"malformed index {text!r}")
    entries = tuple(int(p) for p in parts)
    if len(entries) != n:
        raise ParseError(f"index arity {len(entries)} does not match n = {n}")
    return entries


# --------------------------------------------------------------------------
# canonical printing


def format_index(m: Sequence[int]) -> str:
    return ",".join(str(c) for c in m)


def format_word(sig: AlgebraSignature, w: NormalWord) -> str:
    parts = [f"{sig.generators[g]}<{format_index(m)}>" for g, m in w.links]
    tail = sig.generators[w.tail]
    if any(w.taild):
        tail = f"D{{{format_index(w.taild)}}} {tail}"
    parts.append(tail)
    return " ".join(parts)


def _signed_pieces(first: bool, coeff: Fraction, body: str) -> str:
    mag = abs(coeff)
    scale = "" if mag == 1 else f"{mag} "
    if first:
        return ("-" if coeff < 0 else "") + scale + body
    return (" - " if coeff < 0 else " + ") + scale + body


def format_polynomial(sig: AlgebraSignature, p: ConfPoly) -> str:
    """Canonical text: terms strictly descending, reduced rational coefficients."""
    items = p.items_desc()
    if not items:
        return "0"
    return "".join(
        _signed_pieces(i == 0, coeff, format_word(sig, w))
        for i, (w, coeff) in enumerate(items)
    )


def _format_tree(sig: AlgebraSignature, tree: ExprTree) -> str:
    if isinstance(tree, Leaf):
        name = sig.generators[tree.gen]
        if any(tree.dexp):
            return f"D{{{format_index(tree.dexp)}}} {name}"
        return name
    left = _format_tree(sig, tree.left)
    if isinstance(tree.left, Node):
        left = f"({left})"
    right = _format_tree(sig, tree.right)
    return f"{left}<{format_index(tree.label)}> {right}"


def format_lincomb(sig: AlgebraSignature, comb) -> str:
    """Canonical text for a parsed (unnormalized) linear combination."""
    terms = [(c, t) for c, t in comb if c]
    if not terms:
        return "0"
    return "".join(
        _signed_pieces(i == 0, coeff, _format_tree(sig, tree))
        for i, (coeff, tree) in enumerate(terms)
    )


def format_gen_combo(sig: AlgebraSignature, entries) -> str:
    """Canonical text for a bracket value: ``2*e - h`` over generators."""
    terms = [(k, c) for k, c in entries if c]
    if not terms:
        return "0"
    out = []
    for i, (k, coeff) in enumerate(terms):
        mag = abs(coeff)
        body = sig.generators[k] if mag == 1 else f"{mag}*{sig.generators[k]}"
        if i == 0:
            out.append(("-" if coeff < 0 else "") + body)
        else:
            out.append((" - " if coeff < 0 else " + ") + body)
    return "".join(out)


# --------------------------------------------------------------------------
# presentation files


@dataclass(frozen=True)
class Presentation:
    """A parsed presentation file: signature, named relations, bracket table."""

    signature: AlgebraSignature
    relations: tuple[tuple[str, tuple[tuple[Fraction, ExprTree], ...]], ...]
    brackets: Optional[tuple[tuple[tuple[int, int], tuple[tuple[int, Fraction], ...]], ...]]

    def relation_combs(self) -> Iterator[tuple[str, LinComb]]:
        for name, comb in self.relations:
            yield name, list(comb)

    def canonical(self) -> str:
        sig = self.signature
        lines = [
            "algebra",
            f"  n: {sig.n}",
            f"  locality: [{', '.join(str(b) for b in sig.locality)}]",
            f"  generators: [{', '.join(sig.generators)}]",
        ]
        if self.relations:
            lines.append("")
            lines.append("relations")
            for name, comb in self.relations:
                lines.append(f"  {name}: {format_lincomb(sig, comb)}")
        if self.brackets is not None:
            lines.append("")
            lines.append("lie")
            for (i, j), entries in self.brackets:
                key = f"bracket({sig.generators[i]}, {sig.generators[j]})"
                lines.append(f"  {key}: {format_gen_combo(sig, entries)}")
        return "\n".join(lines) + "\n"


_BRACKET_KEY_RE = re.compile(
    r"bracket\(\s*([A-Za-z0-9_]+)\s*,\s*([A-Za-z0-9_]+)\s*\)\Z")


def _parse_int(value: str, line: int, what: str) -> int:
    if not re.fullmatch(r"\d+", value.strip()):
        raise ParseError(f"{what} must be a nonnegative integer", line)
    return int(value)


def _parse_name_list(value: str, line: int, what: str) -> list[str]:
    body = value.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ParseError(f"{what} must be a [ ... ] list", line)
    inner = body[1:-1].strip()
    if not inner:
        raise ParseError(f"{what} must not be empty", line)
    return [p.strip() for p in inner.split(",")]


def _resolve_gen(sig: AlgebraSignature, text: str, line: int) -> int:
    if re.fullmatch(r"\d+", text):
        idx = int(text)
        if idx >= len(sig.generators):
            raise ParseError(f"generator index {idx} out of range", line)
        return idx
    if text not in sig.generators:
        raise ParseError(f"unknown generator {text!r}", line)
    return sig.gen_index(text)


def _parse_gen_combo(sig: AlgebraSignature, text: str, line: int,
                     col: int) -> tuple[tuple[int, Fraction], ...]:
    tokens = _tokenize(text, line, col)
    if len(tokens) == 1 and tokens[0].kind == "int" and tokens[0].text == "0":
        return ()
    out: list[tuple[int, Fraction]] = []
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    sign = Fraction(1)
    tok = peek()
    if tok is not None and tok.kind in ("+", "-"):
        pos += 1
        if tok.kind == "-":
            sign = Fraction(-1)
    while True:
        coeff = Fraction(1)
        tok = peek()
        if tok is not None and tok.kind == "int":
            pos += 1
            num = int(tok.text)
            tok = peek()
            if tok is not None and tok.kind == "/":
                pos += 1
                tok = peek()
                if tok is None or tok.kind != "int" or int(tok.text) == 0:
                    raise ParseError("malformed rational coefficient", line, col)
                num_den = int(tok.text)
                pos += 1
                coeff = Fraction(num, num_den)
            else:
                coeff = Fraction(num)
            tok = peek()
            if tok is not None and tok.kind == "*":
                pos += 1
        tok = peek()
        if tok is None or tok.kind != "name":
            raise ParseError("expected a generator in bracket value",
                             line, tok.col if tok else col)
        pos += 1
        out.append((_resolve_gen(sig, tok.text, line), sign * coeff))
        tok = peek()
        if tok is None:
            break
        if tok.kind not in ("+", "-"):
            raise ParseError(f"unexpected {tok.text!r} in bracket value",
                             tok.line, tok.col)
        pos += 1
        sign = Fraction(1) if tok.kind == "+" else Fraction(-1)
    return tuple(out)


def parse_presentation(text: str) -> Presentation:
    """Parse a presentation file (see the module docstring for the grammar)."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    header: dict[str, tuple[str, int]] = {}
    raw_relations: list[tuple[str, str, int, int]] = []
    raw_brackets: list[tuple[str, str, str, int, int]] = []
    seen_blocks: set[str] = set()
    current: Optional[str] = None

    for lineno, raw in enumerate(text.split("\n"), 1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        if stripped in ("algebra", "relations", "lie"):
            if stripped in seen_blocks:
                raise ParseError(f"duplicate {stripped!r} block", lineno)
            seen_blocks.add(stripped)
            current = stripped
            continue
        if current is None:
            raise ParseError("expected a block header "
                             "('algebra', 'relations', or 'lie')", lineno)
        if ":" not in body:
            raise ParseError("expected 'key: value'", lineno)
        key, value = body.split(":", 1)
        value_col = len(key) + 2
        key = key.strip()
        if current == "algebra":
            if key not in ("n", "locality", "generators"):
                raise ParseError(f"unknown algebra key {key!r}", lineno)
            if key in header:
                raise ParseError(f"duplicate algebra key {key!r}", lineno)
            header[key] = (value, lineno)
        elif current == "relations":
            if not _NAME_RE.fullmatch(key):
                raise ParseError(f"invalid relation name {key!r}", lineno)
            if any(key == name for name, *_ in raw_relations):
                raise ParseError(f"duplicate relation name {key!r}", lineno)
            raw_relations.append((key, value, lineno, value_col))
        else:
            m = _BRACKET_KEY_RE.fullmatch(key)
            if m is None:
                raise ParseError("lie entries must look like "
                                 "'bracket(i, j): value'", lineno)
            raw_brackets.append((m.group(1), m.group(2), value, lineno, value_col))

    for required in ("n", "locality", "generators"):
        if required not in header:
            raise ParseError(f"algebra block must define {required!r}")

    n = _parse_int(header["n"][0], header["n"][1], "n")
    if n < 1:
        raise ParseError("n must be at least 1", header["n"][1])
    loc_items = _parse_name_list(header["locality"][0], header["locality"][1],
                                 "locality")
    locality = tuple(_parse_int(item, header["locality"][1], "locality entry")
                     for item in loc_items)
    if len(locality) != n:
        raise ParseError(f"locality has {len(locality)} entries for n = {n}",
                         header["locality"][1])
    if any(b < 1 for b in locality):
        raise ParseError("locality bounds must be positive",
                         header["locality"][1])
    gen_items = _parse_name_list(header["generators"][0],
                                 header["generators"][1], "generators")
    for name in gen_items:
        if not _NAME_RE.fullmatch(name):
            raise ParseError(f"invalid generator name {name!r}",
                             header["generators"][1])
    if len(set(gen_items)) != len(gen_items):
        raise ParseError("duplicate generator names",
                         header["generators"][1])
    sig = AlgebraSignature(n, locality, tuple(gen_items))

    relations = tuple(
        (name, tuple(parse_expression(sig, value, lineno, value_col)))
        for name, value, lineno, value_col in raw_relations
    )

    brackets = None
    if "lie" in seen_blocks:
        entries = []
        seen_pairs = set()
        for gi, gj, value, lineno, value_col in raw_brackets:
            i = _resolve_gen(sig, gi, lineno)
            j = _resolve_gen(sig, gj, lineno)
            if (i, j) in seen_pairs:
                raise ParseError(f"duplicate bracket({gi}, {gj})", lineno)
            seen_pairs.add((i, j))
            entries.append(((i, j), _parse_gen_combo(sig, value, lineno,
                                                     value_col)))
        entries.sort(key=lambda item: item[0])
        brackets = tuple(entries)

    return Presentation(sig, relations, brackets)
