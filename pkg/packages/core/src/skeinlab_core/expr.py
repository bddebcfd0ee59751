"""
Recursive-descent parser for the manifest expression syntax.

Grammar (LL(1), whitespace insignificant)::

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor (('*' factor) | ('/' intatom))*
    factor   := atom ['^' exponent]
    exponent := ['-'] (INT | NAME | '(' intexpr ')')
    atom     := INT | NAME | NAME '(' args ')' | '(' expr ')'
    args     := intexpr (',' intexpr)* [',' NAME]
    intexpr  := ['+'|'-'] intterm (('+'|'-') intterm)*
    intterm  := intatom ('*' intatom)*
    intatom  := INT | NAME | '(' intexpr ')'

Names resolve, in order, to integer parameters (`n`, `m`, `k`, ...), ring
variables (`q`, `qh`, `qb`, `t`, `r`, `r1`..`r4`, `mu`, `K`), aliases
(`theta`, `alpha`, `alphak`) and finally caller-supplied basis symbols. Family
calls are `gamma(k)`, `eta(k,n)`, `c(k,n)`, `lam(k,n)` and `T(j)`, each with an
optional trailing variable argument (default `r`).
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import families
from .algebra import ALPHA, ALPHA_K, QB, QH, THETA, VARIABLES, MPoly, Q
from .errors import ExpressionSyntaxError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")

_ALIASES: dict[str, MPoly] = {
    "q": Q,
    "qb": QB,
    "qh": QH,
    "theta": THETA,
    "alpha": ALPHA,
    "alphak": ALPHA_K,
}

_FAMILY_ARITY: dict[str, int] = {"gamma": 1, "eta": 2, "c": 2, "lam": 2, "T": 1}


def _family_value(name: str, args: list[int], variable: str) -> MPoly:
    if name == "gamma":
        return families.gamma(args[0], variable)
    if name == "eta":
        return families.eta(args[0], args[1], variable)
    if name == "c":
        return families.c_coef(args[0], args[1], variable)
    if name == "lam":
        return families.lambda_coef(args[0], args[1], variable)
    return families.dickson(args[0], variable)


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "name" | "op" | "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex or 0)
        if number is not None:
            tokens.append(_Token("int", number, start))
        elif name is not None:
            tokens.append(_Token("name", name, start))
        elif op is not None:
            if op.strip():
                if op not in "+-*/^(),":
                    raise ExpressionSyntaxError(f"unexpected character {op!r}", start, text)
                tokens.append(_Token("op", op, start))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class Parser:
    """
    One-shot parser over a token list.

    `symbols` maps basis-symbol names to values (usually formal words) that
    support `+`, `*` and `**` with `MPoly` operands; `params` binds integer
    parameters.
    """

    def __init__(
        self,
        text: str,
        params: Mapping[str, int] | None = None,
        symbols: Mapping[str, Any] | None = None,
    ) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.params = dict(params or {})
        self.symbols = symbols or {}

    # --- token helpers ---

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def _expect(self, op: str) -> None:
        if not self._accept(op):
            self._fail(f"expected {op!r}")

    def _fail(self, message: str) -> None:
        found = self.tok.text or "end of input"
        raise ExpressionSyntaxError(f"{message}, found {found!r}", self.tok.pos, self.text)

    # --- polynomial grammar ---

    def parse(self) -> Any:
        value = self.expr()
        if self.tok.kind != "end":
            self._fail("unexpected trailing input")
        return value

    def expr(self) -> Any:
        negate = False
        if self._accept("-"):
            negate = True
        else:
            self._accept("+")
        value = self.term()
        if negate:
            value = -value
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Any:
        value = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self._advance().text
            if op == "*":
                value = value * self.factor()
            else:
                pos = self.tok.pos
                divisor = self.intatom()
                if divisor == 0:
                    raise ExpressionSyntaxError("division by zero", pos, self.text)
                value = value * MPoly.const(Fraction(1, divisor))
        return value

    def factor(self) -> Any:
        base = self.atom()
        if self._accept("^"):
            negative = self._accept("-")
            pos = self.tok.pos
            exponent = self.intatom()
            if negative:
                exponent = -exponent
            if exponent < 0 and not (isinstance(base, MPoly) and base.is_unit()):
                raise ExpressionSyntaxError("negative power of a non-unit", pos, self.text)
            base = base**exponent
        return base

    def atom(self) -> Any:
        tok = self.tok
        if tok.kind == "int":
            self._advance()
            return MPoly.const(int(tok.text))
        if self._accept("("):
            value = self.expr()
            self._expect(")")
            return value
        if tok.kind != "name":
            self._fail("expected a number, name or '('")
        self._advance()
        name = tok.text
        if name in _FAMILY_ARITY and self.tok.kind == "op" and self.tok.text == "(":
            return self._family_call(name, tok.pos)
        if name in self.params:
            return MPoly.const(self.params[name])
        if name in _ALIASES:
            return _ALIASES[name]
        if name in VARIABLES:
            return MPoly.var(name)
        if name in self.symbols:
            return self.symbols[name]
        raise ExpressionSyntaxError(f"unknown name {name!r}", tok.pos, self.text)

    def _family_call(self, name: str, pos: int) -> MPoly:
        self._expect("(")
        args = [self.intexpr()]
        variable = "r"
        while self._accept(","):
            if self.tok.kind == "name" and self.tok.text in VARIABLES and (
                self.tokens[self.i + 1].text == ")"
            ):
                variable = self._advance().text
                break
            args.append(self.intexpr())
        self._expect(")")
        arity = _FAMILY_ARITY[name]
        if len(args) != arity:
            raise ExpressionSyntaxError(
                f"{name} takes {arity} integer argument(s), got {len(args)}", pos, self.text
            )
        if name in ("eta", "c", "lam") and args[1] < 0:
            raise ExpressionSyntaxError(f"{name} needs n >= 0, got {args[1]}", pos, self.text)
        return _family_value(name, args, variable)

    # --- integer sub-grammar ---

    def intexpr(self) -> int:
        sign = -1 if self._accept("-") else 1
        if sign == 1:
            self._accept("+")
        value = sign * self.intterm()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self._advance().text
            rhs = self.intterm()
            value = value + rhs if op == "+" else value - rhs
        return value

    def intterm(self) -> int:
        value = self.intatom()
        while self._accept("*"):
            value *= self.intatom()
        return value

    def intatom(self) -> int:
        tok = self.tok
        if tok.kind == "int":
            self._advance()
            return int(tok.text)
        if tok.kind == "name":
            if tok.text not in self.params:
                self._fail("expected an integer or parameter")
            self._advance()
            return self.params[tok.text]
        if self._accept("("):
            value = self.intexpr()
            self._expect(")")
            return value
        self._fail("expected an integer")
        raise AssertionError  # pragma: no cover


def parse_expr(
    text: str,
    params: Mapping[str, int] | None = None,
    symbols: Mapping[str, Any] | None = None,
) -> Any:
    """Parses `text`; returns an `MPoly`, or a formal value when basis symbols occur."""
    return Parser(text, params, symbols).parse()


def parse_mpoly(text: str, params: Mapping[str, int] | None = None) -> MPoly:
    value = parse_expr(text, params)
    if not isinstance(value, MPoly):
        raise ExpressionSyntaxError("expected a polynomial", 0, text)
    return value
