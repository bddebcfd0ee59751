"""Tests for the manifest expression parser."""

from __future__ import annotations

from fractions import Fraction

import pytest

from skeinlab_core.algebra import ALPHA, QB, MPoly, Q, R, T, THETA
from skeinlab_core.calculus import FormalElement
from skeinlab_core.errors import ExpressionSyntaxError
from skeinlab_core.expr import parse_expr, parse_mpoly
from skeinlab_core.families import c_coef, dickson, eta, gamma, lambda_coef


class TestPolynomials:
    """Test polynomial parsing."""

    def test_precedence(self) -> None:
        """^ binds tighter than *, which binds tighter than +."""
        assert parse_mpoly("1 + 2*r^2") == 1 + 2 * R**2
        assert parse_mpoly("-(q - qb)^2") == -((Q - QB) ** 2)

    def test_aliases(self) -> None:
        """theta and alpha expand to their definitions."""
        assert parse_mpoly("theta") == THETA
        assert parse_mpoly("alpha") == ALPHA
        assert parse_mpoly("qh^2") == Q

    def test_negative_power_of_unit(self) -> None:
        """q^-2 is allowed; r^-1 is not."""
        assert parse_mpoly("q^-2") == QB**2
        with pytest.raises(ExpressionSyntaxError):
            parse_mpoly("r^-1")

    def test_integer_division(self) -> None:
        """Division only by integer literals."""
        assert parse_mpoly("(r + 1)/2") == (R + 1) * MPoly.const(Fraction(1, 2))
        with pytest.raises(ExpressionSyntaxError):
            parse_mpoly("r/t")

    def test_params(self) -> None:
        """Integer parameters in exponents and family arguments."""
        assert parse_mpoly("r^n*q^(n+1)", {"n": 2}) == R**2 * Q**3
        assert parse_mpoly("eta(k+1, n)", {"k": 2, "n": 1}) == eta(3, 1)


class TestFamilies:
    """Test family calls."""

    def test_family_values(self) -> None:
        """Each family name resolves to the cached family."""
        assert parse_mpoly("gamma(3)") == gamma(3)
        assert parse_mpoly("c(2, 1)") == c_coef(2, 1)
        assert parse_mpoly("lam(3, 0)") == lambda_coef(3, 0)
        assert parse_mpoly("T(4)") == dickson(4)

    def test_variable_argument(self) -> None:
        """A trailing variable name moves the family onto that variable."""
        assert parse_mpoly("c(2, 0, r1)") == c_coef(2, 0, "r1")

    def test_arity(self) -> None:
        """eta takes two integers."""
        with pytest.raises(ExpressionSyntaxError, match="takes 2"):
            parse_mpoly("eta(1)")

    def test_negative_n_rejected(self) -> None:
        """n must be non-negative."""
        with pytest.raises(ExpressionSyntaxError, match="n >= 0"):
            parse_mpoly("c(1, -1)")


class TestFormal:
    """Test expressions over basis symbols."""

    def test_words(self) -> None:
        """Symbols multiply into non-commuting words."""
        symbols = {"a": FormalElement.word("a"), "b": FormalElement.word("b")}
        value = parse_expr("q*a*b - b*a + t*a^2", symbols=symbols)
        assert isinstance(value, FormalElement)
        assert value.coefficient(("a", "b")) == Q
        assert value.coefficient(("b", "a")) == -1
        assert value.coefficient(("a", "a")) == T

    def test_undeclared_symbol(self) -> None:
        """Names that are neither variables nor declared symbols are rejected."""
        with pytest.raises(ExpressionSyntaxError, match="unknown name 'x'"):
            parse_expr("a*x", symbols={"a": FormalElement.word("a")})


class TestErrors:
    """Test error positions."""

    @pytest.mark.parametrize(
        ("text", "position"),
        [
            ("r +", 3),
            ("r $ 1", 2),
            ("foo + 1", 0),
            ("(r + 1", 6),
            ("r/0", 2),
        ],
    )
    def test_position(self, text: str, position: int) -> None:
        """The error points at the offending character."""
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse_mpoly(text)

        assert exc_info.value.position == position
        assert exc_info.value.details["text"] == text

    def test_trailing_input(self) -> None:
        """A complete expression followed by more tokens is rejected."""
        with pytest.raises(ExpressionSyntaxError, match="trailing"):
            parse_mpoly("r r")
