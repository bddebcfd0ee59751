"""Tests for the Laurent polynomial layer."""

from __future__ import annotations

from collections.abc import Callable

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skeinlab_core.algebra import (
    ALPHA,
    ALPHA_K,
    KVAR,
    MU,
    ONE,
    QB,
    QH,
    ZERO,
    MPoly,
    Q,
    R,
    RatFrac,
    T,
    format_mpoly,
    format_scalar,
    from_scalar_field,
    mpoly_exact_div,
    mpoly_substitute,
    qpow,
    rename_variable,
    specialize_k,
    substitute_many,
    swap_variables,
    to_scalar_field,
)
from skeinlab_core.errors import DivisionByZero, NonExactDivision, NonInvertibleSubstitution
from skeinlab_core.expr import parse_mpoly

_TERM = st.tuples(
    st.integers(min_value=-4, max_value=4),  # qh
    st.integers(min_value=0, max_value=2),  # t
    st.integers(min_value=0, max_value=3),  # r
    st.integers(min_value=-2, max_value=2),  # K
    st.integers(min_value=-5, max_value=5).filter(bool),
)


@st.composite
def mpolys(draw: st.DrawFn) -> MPoly:
    total = ZERO
    for qh, t, r, k, coeff in draw(st.lists(_TERM, max_size=5)):
        total = total + MPoly.monomial({"qh": qh, "t": t, "r": r, "K": k}, coeff)
    return total


class TestConstruction:
    """Test constants, units and canonical form."""

    def test_q_powers(self) -> None:
        """q is qh squared and qb is its inverse."""
        assert QH**2 == Q
        assert Q * QB == ONE
        assert qpow(-3) == QB**3
        assert ALPHA == Q + Q ** -1

    def test_units(self) -> None:
        """Only single terms in qh, mu and K are units."""
        assert QH.is_unit()
        assert (MU * KVAR**-2).is_unit()
        assert not T.is_unit()
        assert not (Q + 1).is_unit()

    def test_inverse_of_non_unit_raises(self) -> None:
        """Inverting t is not possible."""
        with pytest.raises(NonInvertibleSubstitution):
            T.inverse()

    def test_negative_exponent_of_non_invertible_variable(self) -> None:
        """A monomial with r^-1 is rejected."""
        with pytest.raises(NonInvertibleSubstitution):
            MPoly.monomial({"r": -1})

    def test_unknown_variable(self) -> None:
        """Unknown variable names raise KeyError."""
        with pytest.raises(KeyError):
            MPoly.var("x")

    def test_canonical_shift_makes_equality_structural(self) -> None:
        """The same Laurent polynomial built two ways compares and hashes equal."""
        a = (Q + QB) * (Q - QB)
        b = Q**2 - QB**2
        assert a == b
        assert hash(a) == hash(b)

    def test_equality_with_integers(self) -> None:
        """Integers compare as constant polynomials."""
        assert Q * QB == 1
        assert ZERO == 0
        assert not ZERO


class TestInspection:
    """Test degree and coefficient helpers."""

    def test_degree_of_zero(self) -> None:
        """The zero polynomial has degree -1."""
        assert ZERO.degree("r") == -1

    def test_coefficients_in(self) -> None:
        """Buckets by the exponent of one variable."""
        p = T * R + Q * R**2 + 3
        assert p.coefficients_in("r") == {0: MPoly.const(3), 1: T, 2: Q}

    def test_coefficients_in_many(self) -> None:
        """Buckets by a joint exponent vector."""
        p = T * R + Q * T * R + R**2
        buckets = p.coefficients_in_many(("t", "r"))
        assert buckets[(1, 1)] == Q + 1
        assert buckets[(0, 2)] == ONE

    def test_leading_term(self) -> None:
        """Highest power with its coefficient."""
        assert (Q * R**3 + T * R).leading_term("r") == (3, Q)

    def test_variables(self) -> None:
        """Variables with a non-zero exponent somewhere."""
        assert (QB * T + R).variables() == frozenset({"qh", "t", "r"})
        assert Q.is_constant()


class TestExactDivision:
    """Test exact division in the Laurent ring."""

    def test_exact_quotient(self) -> None:
        """(r^2 - 1)/(r - 1) = r + 1."""
        assert mpoly_exact_div(R**2 - 1, R - 1) == R + 1

    def test_laurent_quotient(self) -> None:
        """Negative powers of q divide exactly."""
        assert mpoly_exact_div(Q**2 - QB**2, Q - QB) == ALPHA

    def test_remainder_raises(self) -> None:
        """A non-zero remainder is reported with the operands."""
        with pytest.raises(NonExactDivision) as exc_info:
            mpoly_exact_div(R**2 + 1, R - 1)

        assert exc_info.value.details["divisor"] == "r - 1"

    def test_division_by_zero(self) -> None:
        """Dividing by the zero polynomial is an error."""
        with pytest.raises(DivisionByZero):
            mpoly_exact_div(R, ZERO)

    def test_truediv_operator(self) -> None:
        """The `/` operator is exact division."""
        assert (R**2 * T - T) / (R + 1) == T * R - T

    @settings(max_examples=40, deadline=None)
    @given(a=mpolys(), b=mpolys())
    def test_product_divides_back(self, a: MPoly, b: MPoly) -> None:
        """(a*b)/b recovers a for every non-zero b."""
        if b.is_zero():
            return
        assert mpoly_exact_div(a * b, b) == a


class TestRingLaws:
    """Test arithmetic laws on random polynomials."""

    @settings(max_examples=40, deadline=None)
    @given(a=mpolys(), b=mpolys(), c=mpolys())
    def test_distributive(self, a: MPoly, b: MPoly, c: MPoly) -> None:
        """a(b + c) = ab + ac."""
        assert a * (b + c) == a * b + a * c

    @settings(max_examples=40, deadline=None)
    @given(a=mpolys(), b=mpolys())
    def test_subtraction_inverts_addition(self, a: MPoly, b: MPoly) -> None:
        """(a + b) - b = a."""
        assert (a + b) - b == a
        assert 1 - a == -(a - 1)


class TestSubstitution:
    """Test substitution homomorphisms."""

    def test_r_to_mu(self) -> None:
        """r = mu + mu^-1 squares to mu^2 + 2 + mu^-2."""
        value = mpoly_substitute(R**2, "r", MU + MU.inverse())
        assert value == MU**2 + 2 + MU**-2

    def test_negative_power_needs_unit(self) -> None:
        """K^-1 cannot be evaluated at the non-unit t + 1."""
        with pytest.raises(NonInvertibleSubstitution):
            mpoly_substitute(KVAR.inverse(), "K", T + 1)

    def test_negative_power_with_fraction(self) -> None:
        """A fraction value resolves negative powers."""
        value = mpoly_substitute(KVAR.inverse() + 1, "K", RatFrac(T + 1))
        assert value == RatFrac(T + 2, T + 1)

    def test_specialize_k(self) -> None:
        """K + K^-1 at k = 2 is q^2 + q^-2."""
        assert specialize_k(ALPHA_K, 2) == Q**2 + QB**2

    def test_substitute_many(self) -> None:
        """Several variables at once."""
        assert substitute_many(T * R + R, {"t": 2, "r": Q}) == 3 * Q

    def test_swap_variables(self) -> None:
        """Exponents of two variables trade places."""
        assert swap_variables(T * R**2, "t", "r") == R * T**2

    def test_rename_variable(self) -> None:
        """r becomes r1, but not onto a variable already in use."""
        assert rename_variable(R**2 + 1, "r", "r1") == MPoly.var("r1") ** 2 + 1
        with pytest.raises(ValueError):
            rename_variable(R + T, "r", "t")


class TestRatFrac:
    """Test unreduced fractions."""

    def test_cross_multiplied_equality(self) -> None:
        """Unreduced fractions equal by cross-multiplication."""
        assert RatFrac(R**2 - 1, R - 1) == RatFrac(R + 1)
        assert RatFrac(R**2 - 1, R - 1).to_mpoly() == R + 1

    def test_zero_denominator(self) -> None:
        """A zero denominator is rejected at construction."""
        with pytest.raises(DivisionByZero):
            RatFrac(1, 0)

    def test_non_polynomial_fraction(self) -> None:
        """to_mpoly raises when the fraction is not a polynomial."""
        with pytest.raises(NonExactDivision):
            RatFrac(ONE, R).to_mpoly()

    def test_arithmetic(self) -> None:
        """1/r + 1/t = (r + t)/(rt)."""
        assert RatFrac(1, R) + RatFrac(1, T) == RatFrac(R + T, R * T)
        assert (RatFrac(T, R) ** -1) == RatFrac(R, T)


class TestFormatting:
    """Test canonical text output."""

    def test_simple_output(self) -> None:
        """Terms print by descending degree with q powers folded in."""
        assert format_mpoly(Q * R + 1) == "q*r + 1"
        assert format_mpoly(-(QB**2) * T) == "-qb^2*t"
        assert format_mpoly(ZERO) == "0"
        assert format_mpoly(QH) == "qh"

    def test_rational_coefficients(self, poly: Callable[[str], MPoly]) -> None:
        """Fractions print as a/b."""
        assert format_mpoly(poly("r/2")) == "1/2*r"

    @settings(max_examples=40, deadline=None)
    @given(p=mpolys())
    def test_output_parses_back(self, p: MPoly) -> None:
        """Printed polynomials are valid manifest expressions."""
        assert parse_mpoly(format_mpoly(p)) == p


class TestScalarField:
    """Test the bridge to Q(qh, K)."""

    def test_round_trip(self) -> None:
        """Field elements map back to equal fractions."""
        value = to_scalar_field(QB + KVAR)
        assert from_scalar_field(value) == RatFrac(QB + KVAR)

    def test_non_scalar_rejected(self) -> None:
        """Polynomials in t are not scalars."""
        with pytest.raises(ValueError):
            to_scalar_field(T)

    def test_format_scalar(self) -> None:
        """Unit denominators fold into the numerator."""
        assert format_scalar(to_scalar_field(Q)) == "q"
        assert format_scalar(to_scalar_field(Q) / to_scalar_field(Q + 1)) == "(q)/(q + 1)"
