"""Line-oriented text format for Sullivan models.

    model CP3
    gen x 2
    gen y 7
    d x = 0
    d y = x^4

Polynomials use rational literals (``2``, ``1/3``), ``*``, ``^``, ``+``,
``-`` and parentheses.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    ModelError,
    Polynomial,
    SullivanModel,
    check_d_squared,
    DifferentialError,
)


class ParseError(ModelError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*^()]))"
)


def _tokenize(text, line=None, col0=0):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            while text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), col0 + m.start(kind) + 1))
        pos = m.end()
    return tokens


class _PolyParser:
    def __init__(self, text, gens, line=None, col0=0):
        self.tokens = _tokenize(text, line, col0)
        self.pos = 0
        self.gens = gens
        self.by_name = {g.name: g for g in gens}
        self.line = line
        self.end_col = col0 + len(text) + 1

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, self.end_col)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def parse(self):
        if not self.tokens:
            self.error("empty polynomial")
        p = self.expr()
        if self.peek()[0] is not None:
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self):
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            else:
                return p

    def factor(self):
        # unary signs bind looser than ^, so -x^2 is -(x^2)
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            p = self.factor()
            return -p if val == "-" else p
        return self.power()

    def power(self):
        p = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or "/" in tok[1]:
                self.error("exponent must be a non-negative integer", tok)
            p = p ** int(tok[1])
        return p

    def atom(self):
        tok = self.take()
        kind, val, col = tok
        if kind == "num":
            return Polynomial.constant(self.gens, Fraction(val))
        if kind == "name":
            g = self.by_name.get(val)
            if g is None:
                self.error(f"undeclared generator {val!r}", tok)
            return Polynomial.generator(self.gens, g.index)
        if kind == "op" and val == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return p
        if kind is None:
            self.error("unexpected end of polynomial", tok)
        self.error(f"unexpected token {val!r}", tok)


def parse_polynomial(text: str, gens, line=None, col0=0) -> Polynomial:
    return _PolyParser(text, tuple(gens), line, col0).parse()


@dataclass
class ModelDocument:
    name: str
    generators: list  # (name, degree, line)
    differential: dict  # name -> (text, line, column)


def read_document(text: str) -> ModelDocument:
    name = None
    gens = []
    diffs = {}
    declared = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        head = stripped.split(None, 1)[0]
        col = line.index(head) + 1
        if head == "model":
            parts = stripped.split()
            if len(parts) != 2:
                raise ParseError("expected 'model NAME'", lineno, col)
            if name is not None:
                raise ParseError("duplicate 'model' line", lineno, col)
            name = parts[1]
        elif head == "gen":
            parts = stripped.split()
            if len(parts) != 3:
                raise ParseError("expected 'gen NAME DEGREE'", lineno, col)
            gname, deg = parts[1], parts[2]
            if not re.fullmatch(r"\d+", deg):
                raise ParseError(f"degree {deg!r} is not a positive integer", lineno, line.index(deg, col) + 1)
            if int(deg) < 2:
                raise ParseError(f"degree {deg} < 2 (simply-connected models only)", lineno, line.index(deg, col) + 1)
            if gname in declared:
                raise ParseError(f"generator {gname!r} declared twice", lineno, col)
            declared.add(gname)
            gens.append((gname, int(deg), lineno))
        elif head == "d":
            m = re.match(r"\s*d\s+([A-Za-z_][A-Za-z0-9_']*)\s*=(.*)\Z", line)
            if not m:
                raise ParseError("expected 'd NAME = POLYNOMIAL'", lineno, col)
            gname = m.group(1)
            if gname not in declared:
                raise ParseError(f"d of undeclared generator {gname!r}", lineno, m.start(1) + 1)
            if gname in diffs:
                raise ParseError(f"d {gname} assigned twice", lineno, col)
            diffs[gname] = (m.group(2), lineno, m.start(2))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)
    if name is None:
        raise ParseError("missing 'model NAME' line", 1, 1)
    return ModelDocument(name, gens, diffs)


def parse_model(text: str, check: bool = True) -> SullivanModel:
    """Parse a model document; validates homogeneity and (by default) d^2 = 0."""
    doc = read_document(text)
    shell = SullivanModel(doc.name, [(g, deg) for g, deg, _ in doc.generators])
    degrees = {g: deg for g, deg, _ in doc.generators}
    d = {}
    for gname, (ptext, lineno, col0) in doc.differential.items():
        p = parse_polynomial(ptext, shell.gens, lineno, col0)
        for k in sorted(p.degrees()):
            if k != degrees[gname] + 1:
                raise ParseError(
                    f"d {gname} has a term of degree {k}, expected {degrees[gname] + 1}",
                    lineno,
                    col0 + 1,
                )
        d[gname] = p
    model = SullivanModel(doc.name, shell.gens, d)
    if check:
        res = check_d_squared(model)
        if not res.ok:
            raise DifferentialError(
                f"d^2 {res.generator} = {format_polynomial(res.residue)} != 0",
                res.generator,
                res.residue,
            )
    return model


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(gens, mono) -> str:
    parts = []
    for g, e in zip(gens, mono):
        if e == 1:
            parts.append(g.name)
        elif e > 1:
            parts.append(f"{g.name}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for mono in sorted(p.terms, key=lambda m: (-sum(e * g.degree for e, g in zip(m, p.gens)), [-e for e in m])):
        c = p.terms[mono]
        body = format_monomial(p.gens, mono)
        mag = abs(c)
        if not body:
            text = format_coefficient(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{format_coefficient(mag)}*{body}"
        if not out:
            out.append(("-" if c < 0 else "") + text)
        else:
            out.append(("- " if c < 0 else "+ ") + text)
    return " ".join(out)


def format_model(m: SullivanModel) -> str:
    lines = [f"model {m.name}"]
    lines += [f"gen {g.name} {g.degree}" for g in m.gens]
    lines += [f"d {g.name} = {format_polynomial(p)}" for g, p in zip(m.gens, m.d)]
    return "\n".join(lines) + "\n"


def parse_assignments(text: str, gens) -> dict:
    """Parse ``d NAME = POLY`` lines (perturbation files) over ``gens``."""
    out = {}
    names = {g.name for g in gens}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = re.match(r"\s*d\s+([A-Za-z_][A-Za-z0-9_']*)\s*=(.*)\Z", line)
        if not m:
            raise ParseError("expected 'd NAME = POLYNOMIAL'", lineno, 1)
        if m.group(1) not in names:
            raise ParseError(f"unknown generator {m.group(1)!r}", lineno, m.start(1) + 1)
        out[m.group(1)] = parse_polynomial(m.group(2), gens, lineno, m.start(2))
    return out
