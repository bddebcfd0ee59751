"""
Exact Laurent polynomial arithmetic over Q(q^(1/2)).

Everything in skeinlab reduces to arithmetic in one commutative ring: rational
polynomials in the half power `qh = q^(1/2)`, the meridian variable `t`, the
trace variables `r, r1..r4`, the eigenvalue `mu` and the formal `K = q^k`.
The variables `qh`, `mu` and `K` are invertible; the others are not.

Core Features:
- **Sympy-backed arithmetic**: an `MPoly` stores a sympy `PolyElement` over `QQ`
  (graded lexicographic order) together with an exponent shift for the
  invertible variables. Canonical form keeps the minimum exponent of every
  invertible variable in the stored numerator at zero, so structural equality
  is mathematical equality.
- **Exact division**: `mpoly_exact_div` raises `NonExactDivision` instead of
  returning a remainder. A non-zero remainder always means a broken identity.
- **Substitution**: `mpoly_substitute` is a ring homomorphism in one variable
  and accepts polynomial or `RatFrac` values.
- **Fractions**: `RatFrac` is deliberately unreduced; `frac_equal` decides
  equality by cross-multiplication.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any, Union

from sympy import symbols
from sympy.polys.domains import QQ, FractionField
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring

from .errors import DivisionByZero, NonExactDivision, NonInvertibleSubstitution

VARIABLES: tuple[str, ...] = ("qh", "t", "r", "r1", "r2", "r3", "r4", "mu", "K")
INVERTIBLE: frozenset[str] = frozenset({"qh", "mu", "K"})

_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_INV_IDX = tuple(_INDEX[name] for name in VARIABLES if name in INVERTIBLE)
_NVARS = len(VARIABLES)
_ZERO_SHIFT = (0,) * _NVARS

_RING, *_GENS = ring(",".join(VARIABLES), QQ, grlex)

# print order: t < r < r1 < ... < K, qh folded into the coefficient
_PRINT_ORDER = ("t", "r", "r1", "r2", "r3", "r4", "mu", "K")

Scalar = Union[int, Fraction]


def _add_vec(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _sub_vec(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def _normalize(num: PolyElement, shift: tuple[int, ...]) -> tuple[PolyElement, tuple[int, ...]]:
    if not num:
        return _RING.zero, _ZERO_SHIFT
    monoms = list(num.itermonoms())
    low = [0] * _NVARS
    for i in _INV_IDX:
        low[i] = min(m[i] for m in monoms)
    if not any(low):
        return num, shift
    lowt = tuple(low)
    moved = _RING.from_dict({_sub_vec(m, lowt): c for m, c in num.items()})
    return moved, _add_vec(shift, lowt)


def _qq(value: Any) -> Any:
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


class MPoly:
    """
    Immutable Laurent polynomial in the fixed variable alphabet.

    The value represented is `numerator * prod(x_i ** shift_i)` where only the
    invertible variables may carry a non-zero shift.
    """

    __slots__ = ("_num", "_shift", "_hash")

    def __init__(self, num: PolyElement | None = None, shift: tuple[int, ...] = _ZERO_SHIFT):
        if num is None:
            num = _RING.zero
        num, shift = _normalize(num, shift)
        self._num = num
        self._shift = shift
        self._hash: int | None = None

    # --- construction ---

    @classmethod
    def const(cls, value: Scalar) -> MPoly:
        return cls(_RING.ground_new(_qq(value)) if value else _RING.zero)

    @classmethod
    def var(cls, name: str) -> MPoly:
        if name not in _INDEX:
            raise KeyError(f"unknown variable {name!r}")
        return cls(_GENS[_INDEX[name]])

    @classmethod
    def monomial(cls, exponents: Mapping[str, int], coeff: Scalar = 1) -> MPoly:
        """Builds `coeff * prod(v ** e)`; negative exponents only on invertible variables."""
        vec = [0] * _NVARS
        for name, e in exponents.items():
            if e < 0 and name not in INVERTIBLE:
                raise NonInvertibleSubstitution(f"negative power of {name}", variable=name)
            vec[_INDEX[name]] = e
        low = tuple(min(0, e) for e in vec)
        pos = _sub_vec(tuple(vec), low)
        return cls(_RING.from_dict({pos: _qq(coeff)}), low)

    @classmethod
    def coerce(cls, value: Any) -> MPoly:
        if isinstance(value, MPoly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to MPoly")

    # --- inspection ---

    @property
    def numerator_poly(self) -> PolyElement:
        return self._num

    @property
    def shift(self) -> tuple[int, ...]:
        return self._shift

    def is_zero(self) -> bool:
        return not self._num

    def __bool__(self) -> bool:
        return bool(self._num)

    def items(self) -> Iterator[tuple[tuple[int, ...], Any]]:
        """Yields `(exponent vector, rational coefficient)` with the shift applied."""
        for m, c in self._num.items():
            yield _add_vec(m, self._shift), c

    def exponent_dict(self) -> dict[tuple[int, ...], Fraction]:
        return {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in self.items()}

    def variables(self) -> frozenset[str]:
        used = set()
        for m, _ in self.items():
            used.update(VARIABLES[i] for i, e in enumerate(m) if e)
        return frozenset(used)

    def degree(self, name: str) -> int:
        """Maximum exponent of `name`; -1 for the zero polynomial."""
        if not self._num:
            return -1
        i = _INDEX[name]
        return max(m[i] for m, _ in self.items())

    def min_degree(self, name: str) -> int:
        if not self._num:
            return 0
        i = _INDEX[name]
        return min(m[i] for m, _ in self.items())

    def total_degree(self, names: Iterable[str]) -> int:
        idx = [_INDEX[n] for n in names]
        if not self._num:
            return -1
        return max(sum(m[i] for i in idx) for m, _ in self.items())

    def coefficients_in(self, name: str) -> dict[int, MPoly]:
        """Buckets the polynomial by the exponent of `name`."""
        i = _INDEX[name]
        buckets: dict[int, dict[tuple[int, ...], Any]] = {}
        for m, c in self.items():
            e = m[i]
            rest = m[:i] + (0,) + m[i + 1 :]
            buckets.setdefault(e, {})[rest] = c
        return {e: MPoly._from_exponents(d) for e, d in buckets.items()}

    def coefficients_in_many(self, names: tuple[str, ...]) -> dict[tuple[int, ...], MPoly]:
        """Buckets by the joint exponent vector of `names`."""
        idx = [_INDEX[n] for n in names]
        buckets: dict[tuple[int, ...], dict[tuple[int, ...], Any]] = {}
        for m, c in self.items():
            key = tuple(m[i] for i in idx)
            rest = tuple(0 if i in idx else e for i, e in enumerate(m))
            buckets.setdefault(key, {})[rest] = c
        return {k: MPoly._from_exponents(d) for k, d in buckets.items()}

    def leading_term(self, name: str) -> tuple[int, MPoly]:
        """Highest power of `name` together with its coefficient."""
        if not self._num:
            return -1, MPoly()
        buckets = self.coefficients_in(name)
        top = max(buckets)
        return top, buckets[top]

    def is_unit(self) -> bool:
        """True for a single term in invertible variables only."""
        if len(self._num) != 1:
            return False
        (m, _), = self.items()
        return all(e == 0 for i, e in enumerate(m) if i not in _INV_IDX)

    def is_constant(self) -> bool:
        """True for ground-ring elements, Laurent polynomials in `qh` alone."""
        return self.variables() <= {"qh"}

    def inverse(self) -> MPoly:
        if not self.is_unit():
            raise NonInvertibleSubstitution(f"{self} is not a unit", value=str(self))
        (m, c), = self.items()
        return MPoly._from_exponents({tuple(-e for e in m): 1 / c})

    # --- arithmetic ---

    @staticmethod
    def _from_exponents(d: Mapping[tuple[int, ...], Any]) -> MPoly:
        if not d:
            return MPoly()
        low = [0] * _NVARS
        for i in _INV_IDX:
            low[i] = min(0, min(m[i] for m in d))
        lowt = tuple(low)
        return MPoly(_RING.from_dict({_sub_vec(m, lowt): _qq(c) for m, c in d.items()}), lowt)

    def _aligned(self, other: MPoly) -> tuple[PolyElement, PolyElement, tuple[int, ...]]:
        base = tuple(min(a, b) for a, b in zip(self._shift, other._shift))
        a = self._num.mul_monom(_sub_vec(self._shift, base))
        b = other._num.mul_monom(_sub_vec(other._shift, base))
        return a, b, base

    def __add__(self, other: Any) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        other = MPoly.coerce(other)
        a, b, base = self._aligned(other)
        return MPoly(a + b, base)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly(-self._num, self._shift)

    def __sub__(self, other: Any) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        other = MPoly.coerce(other)
        a, b, base = self._aligned(other)
        return MPoly(a - b, base)

    def __rsub__(self, other: Any) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        return MPoly.coerce(other) - self

    def __mul__(self, other: Any) -> MPoly:
        if not isinstance(other, (MPoly, int, Fraction)):
            return NotImplemented
        other = MPoly.coerce(other)
        return MPoly(self._num * other._num, _add_vec(self._shift, other._shift))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> MPoly:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return MPoly(self._num**exponent, tuple(s * exponent for s in self._shift))

    def __truediv__(self, other: Any) -> MPoly:
        return mpoly_exact_div(self, MPoly.coerce(other))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self._shift == other._shift and self._num == other._num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._num.items()), self._shift))
        return self._hash

    def substitute(self, name: str, value: MPoly | RatFrac | int) -> MPoly | RatFrac:
        return mpoly_substitute(self, name, value)

    def __str__(self) -> str:
        return format_mpoly(self)

    def __repr__(self) -> str:
        return f"MPoly({format_mpoly(self)!r})"


# Common constants
ZERO = MPoly()
ONE = MPoly.const(1)
QH = MPoly.var("qh")
Q = QH**2
QB = Q.inverse()
T = MPoly.var("t")
R = MPoly.var("r")
MU = MPoly.var("mu")
KVAR = MPoly.var("K")
ALPHA = Q + QB
ALPHA_K = KVAR + KVAR.inverse()
THETA = T**2 - 1


def qpow(e: int) -> MPoly:
    """q ** e for integer e."""
    return QH ** (2 * e)


def mpoly_exact_div(p: MPoly, d: MPoly) -> MPoly:
    """
    Returns the exact quotient `p / d`.

    Raises:
        DivisionByZero: if `d` is zero.
        NonExactDivision: if `d` does not divide `p` in the Laurent ring.
    """
    if d.is_zero():
        raise DivisionByZero("division by the zero polynomial", dividend=str(p))
    if p.is_zero():
        return ZERO
    try:
        quotient = p.numerator_poly.exquo(d.numerator_poly)
    except ExactQuotientFailed:
        remainder = p.numerator_poly.rem(d.numerator_poly)
        raise NonExactDivision(
            "remainder is not zero",
            dividend=str(p),
            divisor=str(d),
            remainder=str(MPoly(remainder, p.shift)),
        ) from None
    return MPoly(quotient, _sub_vec(p.shift, d.shift))


class RatFrac:
    """Unreduced fraction of two `MPoly` values; equality by cross-multiplication."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: MPoly | int, denominator: MPoly | int = 1) -> None:
        den = MPoly.coerce(denominator)
        if den.is_zero():
            raise DivisionByZero("RatFrac with zero denominator")
        self.numerator = MPoly.coerce(numerator)
        self.denominator = den

    @classmethod
    def coerce(cls, value: Any) -> RatFrac:
        if isinstance(value, RatFrac):
            return value
        return cls(MPoly.coerce(value))

    def __add__(self, other: Any) -> RatFrac:
        o = RatFrac.coerce(other)
        if o.denominator == self.denominator:
            return RatFrac(self.numerator + o.numerator, self.denominator)
        return RatFrac(
            self.numerator * o.denominator + o.numerator * self.denominator,
            self.denominator * o.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> RatFrac:
        return RatFrac(-self.numerator, self.denominator)

    def __sub__(self, other: Any) -> RatFrac:
        return self + (-RatFrac.coerce(other))

    def __rsub__(self, other: Any) -> RatFrac:
        return RatFrac.coerce(other) - self

    def __mul__(self, other: Any) -> RatFrac:
        o = RatFrac.coerce(other)
        return RatFrac(self.numerator * o.numerator, self.denominator * o.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> RatFrac:
        o = RatFrac.coerce(other)
        if o.numerator.is_zero():
            raise DivisionByZero("division by a zero fraction")
        return RatFrac(self.numerator * o.denominator, self.denominator * o.numerator)

    def __pow__(self, exponent: int) -> RatFrac:
        if exponent < 0:
            if self.numerator.is_zero():
                raise DivisionByZero("negative power of zero")
            return RatFrac(self.denominator**-exponent, self.numerator**-exponent)
        return RatFrac(self.numerator**exponent, self.denominator**exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (MPoly, int, Fraction)):
            other = RatFrac.coerce(other)
        if not isinstance(other, RatFrac):
            return NotImplemented
        return frac_equal(self, other)

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def to_mpoly(self) -> MPoly:
        """Exact quotient; raises `NonExactDivision` when the fraction is not a polynomial."""
        return mpoly_exact_div(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"({self.numerator})/({self.denominator})"

    __repr__ = __str__


def frac_equal(a: RatFrac, b: RatFrac) -> bool:
    """True iff `a.num * b.den - b.num * a.den` is the zero polynomial."""
    return (a.numerator * b.denominator - b.numerator * a.denominator).is_zero()


def mpoly_substitute(p: MPoly, name: str, value: MPoly | RatFrac | int) -> MPoly | RatFrac:
    """
    Substitutes `value` for the variable `name`.

    Terms are bucketed by the exponent of `name` so each power of `value` is
    computed once. Negative exponents need an invertible value: a unit
    polynomial or a fraction with non-zero numerator.
    """
    buckets = p.coefficients_in(name)
    if isinstance(value, RatFrac):
        frac_total = RatFrac(ZERO)
        for e, coeff in sorted(buckets.items()):
            if e < 0 and value.is_zero():
                raise NonInvertibleSubstitution(
                    f"negative power of {name} with zero value", variable=name
                )
            frac_total = frac_total + RatFrac(coeff) * value**e
        return frac_total

    val = MPoly.coerce(value)
    powers: dict[int, MPoly] = {0: ONE}
    inverse: MPoly | None = None
    total = ZERO
    for e, coeff in sorted(buckets.items()):
        if e < 0:
            if inverse is None:
                if not val.is_unit():
                    raise NonInvertibleSubstitution(
                        f"negative power of {name} cannot be resolved for {val}",
                        variable=name,
                        value=str(val),
                    )
                inverse = val.inverse()
            total = total + coeff * inverse ** (-e)
            continue
        if e not in powers:
            base = max(k for k in powers if k <= e)
            acc = powers[base]
            for k in range(base + 1, e + 1):
                acc = acc * val
                powers[k] = acc
        total = total + coeff * powers[e]
    return total


def substitute_many(p: MPoly, values: Mapping[str, MPoly | int]) -> MPoly:
    result: MPoly | RatFrac = p
    for name, value in values.items():
        assert isinstance(result, MPoly)
        result = mpoly_substitute(result, name, value)
    assert isinstance(result, MPoly)
    return result


def specialize_k(p: MPoly, k: int) -> MPoly:
    """Replaces the formal `K` by `q ** k`."""
    result = mpoly_substitute(p, "K", qpow(k))
    assert isinstance(result, MPoly)
    return result


def swap_variables(p: MPoly, a: str, b: str) -> MPoly:
    ia, ib = _INDEX[a], _INDEX[b]
    swapped = {}
    for m, c in p.items():
        lst = list(m)
        lst[ia], lst[ib] = lst[ib], lst[ia]
        swapped[tuple(lst)] = c
    return MPoly._from_exponents(swapped)


def rename_variable(p: MPoly, old: str, new: str) -> MPoly:
    """Moves every power of `old` onto `new`; `new` must not occur in `p`."""
    if old == new:
        return p
    if new in p.variables():
        raise ValueError(f"{new} already occurs in {p}")
    return swap_variables(p, old, new)


# --- printing ---


def _format_qpower(h: int) -> str:
    if h % 2:
        return f"qh^{h}" if h != 1 else "qh"
    e = h // 2
    if e == 1:
        return "q"
    if e == -1:
        return "qb"
    return f"q^{e}" if e > 0 else f"qb^{-e}"


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_mpoly(p: MPoly) -> str:
    """
    Canonical text in the manifest syntax; parsing the output gives back `p`.

    Terms are ordered by descending total degree in the non-`qh` variables,
    then lexicographically in the print order `t < r < ... < K`.
    """
    if p.is_zero():
        return "0"
    items = p.exponent_dict()

    def key(m: tuple[int, ...]) -> tuple[Any, ...]:
        rest = tuple(m[_INDEX[v]] for v in reversed(_PRINT_ORDER))
        return (-sum(rest), tuple(-x for x in rest), -m[0])

    parts: list[str] = []
    for m in sorted(items, key=key):
        c = items[m]
        factors = []
        if m[0]:
            factors.append(_format_qpower(m[0]))
        for v in _PRINT_ORDER:
            e = m[_INDEX[v]]
            if e == 1:
                factors.append(v)
            elif e:
                factors.append(f"{v}^{e}")
        mag = abs(c)
        if not factors:
            body = _format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_rational(mag) + "*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {body}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


# --- the scalar field Q(qh, K) ---

_QH_SYM, _K_SYM = symbols("qh K")
SCALAR_FIELD: FractionField = QQ.frac_field(_QH_SYM, _K_SYM)
SCALAR_VARIABLES: frozenset[str] = frozenset({"qh", "K"})
_QH_POS, _K_POS = _INDEX["qh"], _INDEX["K"]


def to_scalar_field(p: MPoly) -> Any:
    """Maps a Laurent polynomial in `qh` and `K` into the field `Q(qh, K)`."""
    extra = p.variables() - SCALAR_VARIABLES
    if extra:
        raise ValueError(f"not a scalar: involves {sorted(extra)}")
    field = SCALAR_FIELD.field
    if p.is_zero():
        return field.zero
    low_q = min(0, p.min_degree("qh"))
    low_k = min(0, p.min_degree("K"))
    numer = field.ring.from_dict(
        {(m[_QH_POS] - low_q, m[_K_POS] - low_k): c for m, c in p.items()}
    )
    denom = field.ring.from_dict({(-low_q, -low_k): QQ.one})
    return field.new(numer, denom)


def _field_poly_to_mpoly(poly: PolyElement) -> MPoly:
    total = ZERO
    for (a, b), c in poly.items():
        coeff = Fraction(int(c.numerator), int(c.denominator))
        total = total + MPoly.monomial({"qh": a, "K": b}, coeff)
    return total


def from_scalar_field(value: Any) -> RatFrac:
    """Inverse of `to_scalar_field`, as an unreduced `RatFrac`."""
    return RatFrac(_field_poly_to_mpoly(value.numer), _field_poly_to_mpoly(value.denom))


def format_scalar(value: Any) -> str:
    """Prints a field element in manifest syntax, as `(num)/(den)` when needed."""
    frac = from_scalar_field(value)
    num, den = frac.numerator, frac.denominator
    if den.is_constant() and den.is_unit():
        return format_mpoly(num * den.inverse())
    return f"({format_mpoly(num)})/({format_mpoly(den)})"
