"""A small text syntax for exponential polynomials.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := [scalar '*'] atom | scalar
    atom   := 'sin(' [rate '*'] 'z)' | 'cos(' [rate '*'] 'z)' | 'e(' number ')'
    rate   := number ['*pi'] | 'pi'
    scalar := number ['*pi'] | 'pi' | '(' complex ')'

``e(a)`` stands for ``exp(2 pi i a z)``.  Complex scalars use Python syntax
inside parentheses, e.g. ``(0.5-2j)``.  :func:`format_poly` prints any
polynomial back in a form :func:`parse_poly_dsl` reads exactly.
"""

from __future__ import annotations

import math
import re

from .errors import ParseError
from .exppoly import ExpPoly, exp_term, from_trig, make_exp_poly, scale

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ParseError(msg, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def eat(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            where = "end of input" if self.pos >= len(self.text) else repr(self.text[self.pos:self.pos + 8])
            self.error(f"expected {s!r}, found {where}")

    def number(self) -> float | None:
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return float(m.group())

    def real_factor(self) -> float | None:
        """number ['*pi'] | 'pi' ; None if nothing numeric starts here."""
        if self.eat("pi"):
            return math.pi
        x = self.number()
        if x is None:
            return None
        save = self.pos
        if self.eat("*") and self.eat("pi"):
            return x * math.pi
        self.pos = save
        return x

    def complex_literal(self) -> complex:
        start = self.pos
        depth = 1
        while self.pos < len(self.text) and depth:
            ch = self.text[self.pos]
            depth += ch == "("
            depth -= ch == ")"
            self.pos += 1
        if depth:
            self.error("unterminated complex literal")
        body = self.text[start:self.pos - 1]
        try:
            return complex(body.replace(" ", ""))
        except ValueError:
            self.pos = start
            self.error(f"bad complex literal {body!r}")

    def scalar(self) -> complex | None:
        if self.eat("("):
            return self.complex_literal()
        return self.real_factor()

    def rate(self) -> float:
        if self.peek("z"):
            return 1.0
        r = self.real_factor()
        if r is None:
            self.error("expected a rate")
        self.expect("*")
        return r

    def atom(self) -> ExpPoly | None:
        for kind in ("sin", "cos"):
            if self.eat(kind + "("):
                r = self.rate()
                self.expect("z")
                self.expect(")")
                if r <= 0:
                    self.error("rate must be positive")
                return from_trig(kind, r)
        if self.eat("e("):
            sign = -1.0 if self.eat("-") else 1.0
            f = self.real_factor()
            if f is None:
                self.error("expected a frequency")
            self.expect(")")
            return exp_term(sign * f)
        return None

    def term(self) -> ExpPoly:
        self.skip()
        start = self.pos
        atom = self.atom()
        if atom is not None:
            return atom
        c = self.scalar()
        if c is None:
            self.pos = start
            self.error("expected a term")
        if self.eat("*"):
            atom = self.atom()
            if atom is None:
                self.error("expected sin(...), cos(...) or e(...) after '*'")
            return scale(atom, c)
        return make_exp_poly([(0.0, c)])

    def expr(self) -> ExpPoly:
        terms = []
        sign = -1.0 if self.eat("-") else 1.0
        while True:
            t = self.term()
            terms.extend((a, sign * b) for a, b in t.terms)
            if self.eat("+"):
                sign = 1.0
            elif self.eat("-"):
                sign = -1.0
            else:
                break
        self.skip()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return make_exp_poly(terms)


def parse_poly_dsl(text: str) -> ExpPoly:
    return _Parser(text).expr()


def format_poly(p: ExpPoly) -> str:
    """Exact textual form ``(b)*e(alpha) + ...`` using ``repr`` floats."""
    parts = []
    for a, b in p.terms:
        parts.append(f"({b.real!r}{b.imag:+}j)*e({a!r})")
    return " + ".join(parts)

