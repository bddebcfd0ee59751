"""
Trace-free SL(2, C) characters of the 2-bridge knots b([[3, n, 3]]).

Core Features:
- **Cyclotomic arithmetic**: exact elements of Q(ζ_M) stored as rational
  polynomials reduced modulo Φ_M, or mpmath complex values with an error bound.
  A field context picks one or the other; both expose roots of unity, √−1 and
  a zero test.
- **Representations**: the matrices A(a), the b_i recursion (numeric and as
  signed powers of b) and the representation condition x⁻¹ = A(b_h) checked
  against its scalar form.
- **Traces**: r1 = −φ_k and r2 = −φ_{k(3n+1)} against matrix traces and the
  Dickson bridge φ_{k(3n+1)} = T_{3n+1}(φ_k).
- **Degree separation**: f_n = σ0 + 2σ2 − σ1 T_{3n+1} + σ2 T_{3n+4}, its surviving
  leading term, and its values at φ_k against a direct evaluation.
"""

from __future__ import annotations

import logging
import math
import random
import time
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Union

import mpmath
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, ring

from . import families
from .algebra import VARIABLES, MPoly, format_mpoly
from .errors import (
    ConditionDisagreement,
    LeadingTermCancelled,
    NonInvertibleParameter,
    TraceMismatch,
    ZeroDeterminant,
)
from .results import CheckResult, result_from_failures

logger = logging.getLogger(__name__)

ANCHOR = "Appendix A"
TOLERANCE = 1e-12

_XRING, _X = ring("x", QQ)
_CONSTANT = (0,) * len(VARIABLES)

Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def cyclotomic_modulus(order: int) -> PolyElement:
    """Φ_N by dividing x^N − 1 by Φ_d for every proper divisor d of N."""
    if order < 1:
        raise ValueError(f"cyclotomic order must be positive, got {order}")
    poly = _X**order - 1
    for d in range(1, order):
        if order % d == 0:
            poly = poly.exquo(cyclotomic_modulus(d))
    return poly


def order_for(n: int) -> int:
    """lcm(4, 9n + 6): both ζ_{9n+6} and √−1 live in Q(ζ_M)."""
    return math.lcm(4, 9 * n + 6)


def _check_n(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be an odd positive integer, got {n}")


# --- exact elements ---


class Cyclotomic:
    """An element of Q(ζ_M), as a polynomial in x = ζ_M of degree < φ(M)."""

    __slots__ = ("order", "rep")
    mode = "exact"

    def __init__(self, order: int, rep: PolyElement) -> None:
        self.order = order
        self.rep = rep.rem(cyclotomic_modulus(order))

    def _coerce(self, other: Any) -> Cyclotomic | None:
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise ValueError(f"orders differ: {self.order} and {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, _XRING(QQ(other.numerator, other.denominator)))
        return None

    def __add__(self, other: Any) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, self.rep + o.rep)

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic(self.order, -self.rep)

    def __sub__(self, other: Any) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, self.rep - o.rep)

    def __rsub__(self, other: Any) -> Cyclotomic:
        return -self + other

    def __mul__(self, other: Any) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, self.rep * o.rep)

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        if self.is_zero():
            raise NonInvertibleParameter("zero has no inverse", order=self.order)
        s, _, h = self.rep.gcdex(cyclotomic_modulus(self.order))
        return Cyclotomic(self.order, s * (1 / h.LC))

    def __truediv__(self, other: Any) -> Cyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, exponent: int) -> Cyclotomic:
        base = self if exponent >= 0 else self.inverse()
        result = Cyclotomic(self.order, _XRING.one)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.rep

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def to_complex(self, mp: Any = mpmath.mp) -> Any:
        total = mp.mpc(0)
        for (e,), c in self.rep.items():
            total += mp.mpf(int(c.numerator)) / int(c.denominator) * mp.expjpi(
                mp.mpf(2 * e) / self.order
            )
        return total

    def __str__(self) -> str:
        return f"{self.rep.as_expr()} (mod Phi_{self.order})"

    __repr__ = __str__


# --- float elements ---


class FloatCyclotomic:
    """An mpmath complex value with a running absolute error bound."""

    __slots__ = ("mp", "value", "error")
    mode = "float"

    def __init__(self, mp: Any, value: Any, error: float = 0.0) -> None:
        self.mp = mp
        self.value = mp.mpc(value)
        self.error = float(error) + float(mp.eps) * float(abs(self.value))

    def _coerce(self, other: Any) -> FloatCyclotomic | None:
        if isinstance(other, FloatCyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return FloatCyclotomic(self.mp, self.mp.mpf(other.numerator) / other.denominator)
        return None

    def __add__(self, other: Any) -> FloatCyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatCyclotomic(self.mp, self.value + o.value, self.error + o.error)

    __radd__ = __add__

    def __neg__(self) -> FloatCyclotomic:
        return FloatCyclotomic(self.mp, -self.value, self.error)

    def __sub__(self, other: Any) -> FloatCyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FloatCyclotomic(self.mp, self.value - o.value, self.error + o.error)

    def __rsub__(self, other: Any) -> FloatCyclotomic:
        return -self + other

    def __mul__(self, other: Any) -> FloatCyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        error = (
            float(abs(self.value)) * o.error
            + float(abs(o.value)) * self.error
            + self.error * o.error
        )
        return FloatCyclotomic(self.mp, self.value * o.value, error)

    __rmul__ = __mul__

    def inverse(self) -> FloatCyclotomic:
        if self.is_zero():
            raise NonInvertibleParameter("value is numerically zero", value=str(self.value))
        size = float(abs(self.value))
        return FloatCyclotomic(self.mp, 1 / self.value, self.error / (size * (size - self.error)))

    def __truediv__(self, other: Any) -> FloatCyclotomic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, exponent: int) -> FloatCyclotomic:
        base = self if exponent >= 0 else self.inverse()
        result = FloatCyclotomic(self.mp, 1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def is_zero(self) -> bool:
        return float(abs(self.value)) <= TOLERANCE + self.error

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def to_complex(self, mp: Any = None) -> Any:
        return self.value

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, 15)} ± {self.error:.1e}"

    __repr__ = __str__


Element = Union[Cyclotomic, FloatCyclotomic]


# --- field contexts ---


class ExactField:
    """Q(ζ_M) with exact arithmetic."""

    mode = "exact"

    def __init__(self, order: int) -> None:
        self.order = order
        self.modulus = cyclotomic_modulus(order)

    def const(self, value: Number) -> Cyclotomic:
        v = Fraction(value)
        return Cyclotomic(self.order, _XRING(QQ(v.numerator, v.denominator)))

    def root(self, j: int, n: int | None = None) -> Cyclotomic:
        """ζ_n^j; `n` must divide the field order."""
        n = n or self.order
        if self.order % n:
            raise ValueError(f"ζ_{n} is not in Q(ζ_{self.order})")
        return Cyclotomic(self.order, _X ** ((j * (self.order // n)) % self.order))

    def imag_unit(self) -> Cyclotomic:
        return self.root(1, 4)

    def describe(self) -> dict[str, Any]:
        return {"mode": self.mode, "order": self.order, "degree": self.modulus.degree()}


class FloatField:
    """Complex floats at a fixed binary precision, in a private mpmath context."""

    mode = "float"

    def __init__(self, order: int, precision: int = 128) -> None:
        if precision < 53:
            raise ValueError(f"precision below double: {precision}")
        self.order = order
        self.precision = precision
        self.mp = mpmath.MPContext()
        self.mp.prec = precision

    def const(self, value: Number) -> FloatCyclotomic:
        v = Fraction(value)
        return FloatCyclotomic(self.mp, self.mp.mpf(v.numerator) / v.denominator)

    def value(self, z: Any) -> FloatCyclotomic:
        return FloatCyclotomic(self.mp, z)

    def root(self, j: int, n: int | None = None) -> FloatCyclotomic:
        n = n or self.order
        return FloatCyclotomic(self.mp, self.mp.expjpi(self.mp.mpf(2 * j) / n))

    def imag_unit(self) -> FloatCyclotomic:
        return FloatCyclotomic(self.mp, self.mp.mpc(0, 1))

    def describe(self) -> dict[str, Any]:
        return {"mode": self.mode, "order": self.order, "precision": self.precision}


FieldContext = Union[ExactField, FloatField]


def field_context(order: int, mode: str = "exact", precision: int = 128) -> FieldContext:
    """Exact Q(ζ_order) or mpmath floats at `precision` bits."""
    if mode == "exact":
        return ExactField(order)
    if mode == "float":
        return FloatField(order, precision)
    raise ValueError(f"unknown arithmetic mode {mode!r}")


# --- 2×2 matrices ---

Mat2C = tuple[tuple[Any, Any], tuple[Any, Any]]


def mat2_mul(a: Mat2C, b: Mat2C) -> Mat2C:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat2_trace(a: Mat2C) -> Any:
    return a[0][0] + a[1][1]


def mat2_det(a: Mat2C) -> Any:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def mat2_adjugate(a: Mat2C) -> Mat2C:
    """The inverse when det = 1."""
    return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))


def mat2_equal(a: Mat2C, b: Mat2C) -> bool:
    return all(a[i][j] == b[i][j] for i in range(2) for j in range(2))


def amat(a: Element, field: FieldContext) -> Mat2C:
    """A(a) = ½ [[(a + a⁻¹)i, a − a⁻¹], [a − a⁻¹, −(a + a⁻¹)i]]."""
    try:
        inv = a.inverse()
    except NonInvertibleParameter as exc:
        raise NonInvertibleParameter("A(a) needs an invertible a", value=str(a)) from exc
    half = field.const(Fraction(1, 2))
    i = field.imag_unit()
    plus = (a + inv) * half
    minus = (a - inv) * half
    return ((plus * i, minus), (minus, -(plus * i)))


# --- 2-bridge patterns ---


@dataclass(frozen=True)
class BridgePattern:
    k_list: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.k_list:
            raise ValueError("a bridge pattern needs at least one entry")

    @classmethod
    def three_n_three(cls, n: int) -> BridgePattern:
        return cls((3, n, 3))


def bridge_b_sequence(pattern: BridgePattern, b: Element) -> list[Element]:
    """[b0, b1, ..., bh] with b0 = b, b_{-1} = −1 and b_i = b_{i-1}^{-k_i} b_{i-2}."""
    previous = -(b ** 0)
    sequence = [b]
    for k in pattern.k_list:
        current = sequence[-1] ** (-k) * previous
        previous = sequence[-1]
        sequence.append(current)
    return sequence


def symbolic_b_sequence(pattern: BridgePattern) -> list[tuple[int, int]]:
    """The same recursion on signed powers: (ε, e) stands for ε·b^e."""
    previous = (-1, 0)
    sequence = [(1, 1)]
    for k in pattern.k_list:
        sign, exp = sequence[-1]
        current = (sign ** (k % 2) * previous[0], -k * exp + previous[1])
        previous = sequence[-1]
        sequence.append(current)
    return sequence


def _default_field(n: int, field: FieldContext | None) -> FieldContext:
    return field if field is not None else ExactField(order_for(n))


def representation_holds(n: int, b: Element, field: FieldContext) -> bool:
    """
    x⁻¹ = A(b3) for x = A(1), cross-checked against (−b)^{9n+6} = 1.

    Raises `ConditionDisagreement` when the two verdicts differ.
    """
    seq = bridge_b_sequence(BridgePattern.three_n_three(n), b)
    one = field.const(1)
    x = amat(one, field)
    matrix_verdict = mat2_equal(mat2_adjugate(x), amat(seq[-1], field))
    scalar_verdict = (-b) ** (9 * n + 6) == one
    if matrix_verdict != scalar_verdict:
        raise ConditionDisagreement(
            "matrix and scalar conditions disagree",
            n=n,
            b=str(b),
            matrix=matrix_verdict,
            scalar=scalar_verdict,
        )
    return matrix_verdict


def rep_condition_check(n: int, k: int, field: FieldContext | None = None) -> bool:
    """The condition for b = −ζ^k, ζ of order 9n + 6, 0 <= k < 9n + 6."""
    _check_n(n)
    order = 9 * n + 6
    if not 0 <= k < order:
        raise ValueError(f"k must lie in [0, {order}), got {k}")
    field = _default_field(n, field)
    return representation_holds(n, -field.root(k, order), field)


def phi(j: int, n: int, field: FieldContext) -> Element:
    """φ_j = ζ^j + ζ^{−j} with ζ of order 9n + 6."""
    order = 9 * n + 6
    return field.root(j, order) + field.root(-j, order)


def evaluate(p: MPoly, variable: str, value: Element, field: FieldContext) -> Element:
    """Horner evaluation of a rational polynomial in one variable."""
    extra = p.variables() - {variable}
    if extra:
        raise ValueError(f"cannot evaluate: {format_mpoly(p)} involves {sorted(extra)}")
    coeffs = p.coefficients_in(variable)
    total = field.const(0)
    for e in range(max(coeffs, default=0), -1, -1):
        total = total * value
        c = coeffs.get(e)
        if c is not None:
            total = total + c.exponent_dict().get(_CONSTANT, Fraction(0))
    return total


def trace_values(n: int, k: int, field: FieldContext | None = None) -> tuple[Element, Element]:
    """
    (r1, r2) = (−φ_k, −φ_{k(3n+1)}) for b = −ζ^k.

    Checked against −tr(x y), −tr(x y2), tr(x y_i) = −b_i − b_i⁻¹ and the Dickson
    bridge; any disagreement raises `TraceMismatch`.
    """
    _check_n(n)
    field = _default_field(n, field)
    order = 9 * n + 6
    b = -field.root(k, order)
    if not representation_holds(n, b, field):
        raise TraceMismatch("b does not define a representation", n=n, k=k)
    seq = bridge_b_sequence(BridgePattern.three_n_three(n), b)
    x = amat(field.const(1), field)
    r1 = -phi(k, n, field)
    r2 = -phi(k * (3 * n + 1), n, field)
    checks = {
        "r1 = -tr(xy)": (-mat2_trace(mat2_mul(x, amat(seq[0], field))), r1),
        "r2 = -tr(xy2)": (-mat2_trace(mat2_mul(x, amat(seq[2], field))), r2),
        "dickson": (evaluate(families.dickson(3 * n + 1, "r1"), "r1", -r1, field), -r2),
    }
    for i in (1, 2):
        checks[f"tr(xy{i})"] = (
            mat2_trace(mat2_mul(x, amat(seq[i], field))),
            -seq[i] - seq[i].inverse(),
        )
    for label, (got, want) in checks.items():
        if not got == want:
            raise TraceMismatch(f"{label} fails", n=n, k=k, got=str(got), want=str(want))
    return r1, r2


# --- the φ matrix ---


def phi_matrix(n: int, field: FieldContext) -> list[list[Element]]:
    m = (9 * n + 5) // 2
    return [[phi(k * v, n, field) for v in range(m + 1)] for k in range(m + 1)]


def _exact_det(rows: list[list[Cyclotomic]]) -> Cyclotomic:
    a = [list(row) for row in rows]
    size = len(a)
    det: Cyclotomic = a[0][0] ** 0
    for col in range(size):
        pivot = next((r for r in range(col, size) if not a[r][col].is_zero()), None)
        if pivot is None:
            return det * 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        inv = a[col][col].inverse()
        det = det * a[col][col]
        for r in range(col + 1, size):
            if a[r][col].is_zero():
                continue
            factor = a[r][col] * inv
            a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return det


def _float_det(n: int, field: FloatField) -> FloatCyclotomic:
    """Real determinant of (2cos(2πkv/(9n+6))) at the field precision and twice it."""
    m = (9 * n + 5) // 2
    order = 9 * n + 6
    values = []
    for prec in (field.precision, 2 * field.precision):
        mp = mpmath.MPContext()
        mp.prec = prec
        matrix = mp.matrix(
            [[2 * mp.cospi(mp.mpf(2 * k * v) / order) for v in range(m + 1)] for k in range(m + 1)]
        )
        values.append(mp.det(matrix))
    error = float(abs(values[0] - values[1]))
    return FloatCyclotomic(field.mp, field.mp.mpf(values[1]), error)


def phi_matrix_det(n: int, field: FieldContext | None = None) -> Element:
    """det(φ_{kv})_{k,v=0..m}, m = (9n+5)/2; raises `ZeroDeterminant` when it vanishes."""
    _check_n(n)
    field = _default_field(n, field)
    if isinstance(field, ExactField):
        det: Element = _exact_det(phi_matrix(n, field))  # type: ignore[arg-type]
    else:
        det = _float_det(n, field)
    if det.is_zero():
        raise ZeroDeterminant("phi matrix is singular", n=n, field=field.describe())
    logger.debug("phi determinant for n=%d: %s", n, det)
    return det


# --- degree separation ---


def _qh_slices(p: MPoly) -> dict[int, MPoly]:
    """Splits a polynomial in qh and r1 into rational polynomials in r1, by qh-exponent."""
    slices: dict[int, MPoly] = {}
    for h, coeff in p.coefficients_in("qh").items():
        slices[h] = coeff
    return slices


def separation_polynomial(sigmas: Sequence[MPoly], n: int) -> MPoly:
    """f_n = σ0 + 2σ2 − σ1 T_{3n+1} + σ2 T_{3n+4} in r1."""
    s0, s1, s2 = sigmas
    t_a = families.dickson(3 * n + 1, "r1")
    t_b = families.dickson(3 * n + 4, "r1")
    return s0 + 2 * s2 - s1 * t_a + s2 * t_b


def check_degree_separation(
    sigma0: MPoly,
    sigma1: MPoly,
    sigma2: MPoly,
    n: int,
    *,
    field: FieldContext | None = None,
    evaluate_ks: Sequence[int] | None = None,
    check_id: str = "appA.degree-separation",
) -> CheckResult:
    """
    Builds f_n and checks the degree-separation argument.

    (i) all σ zero gives f_n = 0; (ii) when 3n + 1 exceeds max deg σ + 3 and
    some σ is nonzero, f_n has a surviving leading term; (iii) f_n(φ_k) is
    compared with Σ σ_i(r1) r2^i at (r1, r2) = (−φ_k, −φ_{k(3n+1)}), both as
    written and with σ_i(−x).
    """
    started = time.perf_counter()
    _check_n(n)
    sigmas = (sigma0, sigma1, sigma2)
    for s in sigmas:
        if not s.variables() <= {"qh", "r1"}:
            raise ValueError(f"sigma must be univariate in r1: {format_mpoly(s)}")
    f = separation_polynomial(sigmas, n)
    details: dict[str, Any] = {"n": n, "f_n_degree": f.degree("r1")}
    failures: list[dict[str, Any]] = []
    nonzero = [s for s in sigmas if not s.is_zero()]
    if not nonzero and not f.is_zero():
        failures.append({"property": "zero input", "f_n": format_mpoly(f)})
    max_deg = max((s.degree("r1") for s in nonzero), default=-1)
    if nonzero and 3 * n + 1 > max_deg + 3:
        if f.is_zero():
            raise LeadingTermCancelled(
                "f_n vanishes for nonzero sigma",
                pair=["sigma1*T", "sigma2*T"],
                n=n,
            )
        degree, coeff = f.leading_term("r1")
        details["leading_term"] = {"degree": degree, "coefficient": format_mpoly(coeff)}
        top1 = sigma1.degree("r1") + 3 * n + 1 if not sigma1.is_zero() else -1
        top2 = sigma2.degree("r1") + 3 * n + 4 if not sigma2.is_zero() else -1
        if top1 == top2 and degree < top1:
            details["top_cancelling_pair"] = ["sigma1", "sigma2"]
    elif nonzero:
        details["hypothesis"] = "3n+1 <= max deg sigma + 3; no separation claim"

    if evaluate_ks:
        ctx = _default_field(n, field)
        direct = flipped = 0
        for k in evaluate_ks:
            ok_direct, ok_flip = _evaluation_matches(sigmas, f, n, k, ctx)
            direct += ok_direct
            flipped += ok_flip
        details["evaluated_ks"] = list(evaluate_ks)
        details["direct_matches"] = direct
        details["matches_after_sign_flip"] = flipped
        if flipped != len(evaluate_ks):
            failures.append({"property": "evaluation", "matches_after_sign_flip": flipped})
    return result_from_failures(check_id, ANCHOR, failures, started, details=details)


def _evaluation_matches(
    sigmas: Sequence[MPoly], f: MPoly, n: int, k: int, field: FieldContext
) -> tuple[bool, bool]:
    x = phi(k, n, field)
    r2 = -phi(k * (3 * n + 1), n, field)
    f_slices = _qh_slices(f)
    sigma_slices = [_qh_slices(s) for s in sigmas]
    direct_ok = flip_ok = True
    for h in set(f_slices) | {h for sl in sigma_slices for h in sl}:
        fx = evaluate(f_slices.get(h, MPoly()), "r1", x, field)
        direct = field.const(0)
        flipped = field.const(0)
        for i, sl in enumerate(sigma_slices):
            s = sl.get(h, MPoly())
            direct = direct + evaluate(s, "r1", -x, field) * r2**i
            flipped = flipped + evaluate(s, "r1", x, field) * r2**i
        direct_ok = direct_ok and fx == direct
        flip_ok = flip_ok and fx == flipped
    return direct_ok, flip_ok


# --- suite ---


def _random_unit(field: FieldContext, rng: random.Random) -> Element:
    scale = Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((1, -1))
    return field.root(rng.randrange(field.order)) * scale


def verify_amat(samples: int = 50, seed: int = 7, mode: str = "exact") -> CheckResult:
    started = time.perf_counter()
    field = field_context(60, mode)
    rng = random.Random(seed)
    failures = []
    for _ in range(samples):
        a = _random_unit(field, rng)
        m = amat(a, field)
        if not mat2_trace(m).is_zero() or not mat2_det(m) == field.const(1):
            failures.append({"a": str(a)})
    one = amat(field.const(1), field)
    i = field.imag_unit()
    if not mat2_equal(one, ((i, field.const(0)), (field.const(0), -i))):
        failures.append({"a": "1", "property": "A(1) = diag(i, -i)"})
    return result_from_failures("appA.amat", ANCHOR, failures, started, checked=samples + 1)


def verify_b_sequences(n_values: Sequence[int]) -> CheckResult:
    """Closed forms for [[3, n, 3]] and numeric against signed-power sequences."""
    started = time.perf_counter()
    failures = []
    for n in n_values:
        symbolic = symbolic_b_sequence(BridgePattern.three_n_three(n))
        want = [(1, 1), (-1, -3), (-1, 3 * n + 1), (1, -9 * n - 6)]
        if symbolic != want:
            failures.append({"n": n, "symbolic": symbolic, "expected": want})
        field = ExactField(order_for(n))
        for j in (1, 2, 5):
            b = field.root(j) * Fraction(2, 3)
            numeric = bridge_b_sequence(BridgePattern.three_n_three(n), b)
            for i, ((sign, exp), value) in enumerate(zip(symbolic, numeric)):
                if not value == b**exp * sign:
                    failures.append({"n": n, "root": j, "index": i})
    return result_from_failures(
        "appA.b-sequence", ANCHOR, failures, started, checked=len(n_values)
    )


def verify_representations(n: int, mode: str = "exact", precision: int = 128) -> CheckResult:
    started = time.perf_counter()
    field = field_context(order_for(n), mode, precision)
    failures = [
        {"k": k} for k in range(9 * n + 6) if not rep_condition_check(n, k, field)
    ]
    # the condition must not hold off the unit circle
    off_circle = FloatField(order_for(n), max(precision, 128))
    if representation_holds(n, off_circle.const(Fraction(11, 10)), off_circle):
        failures.append({"b": "1.1"})
    return result_from_failures(
        f"appA.rep-condition.n{n}",
        ANCHOR,
        failures,
        started,
        checked=9 * n + 7,
        details={"field": field.describe()},
    )


def verify_traces(n: int, mode: str = "exact", precision: int = 128) -> CheckResult:
    started = time.perf_counter()
    field = field_context(order_for(n), mode, precision)
    failures = []
    for k in range(9 * n + 6):
        try:
            trace_values(n, k, field)
        except TraceMismatch as exc:
            failures.append(exc.as_details())
    return result_from_failures(
        f"appA.traces.n{n}", ANCHOR, failures, started, checked=9 * n + 6
    )


def verify_phi_identities(n: int) -> CheckResult:
    """φ_j φ_l = φ_{j+l} + φ_{j−l} for 0 <= j, l <= 9n + 5."""
    started = time.perf_counter()
    field = ExactField(order_for(n))
    top = 9 * n + 6
    values = [phi(j, n, field) for j in range(-top, 2 * top)]

    def at(j: int) -> Cyclotomic:
        return values[j + top]  # type: ignore[return-value]

    failures = []
    for j in range(top):
        for m in range(top):
            if not at(j) * at(m) == at(j + m) + at(j - m):
                failures.append({"j": j, "l": m})
    return result_from_failures(
        f"appA.phi-identities.n{n}", ANCHOR, failures, started, checked=top * top
    )


def verify_phi_det(n: int, mode: str = "exact", precision: int = 128) -> CheckResult:
    started = time.perf_counter()
    field = field_context(order_for(n), mode, precision)
    det = phi_matrix_det(n, field)
    size = (9 * n + 5) // 2 + 1
    magnitude = float(abs(det.to_complex(mpmath.mp)))
    matrix = phi_matrix(n, field) if mode == "exact" else None
    symmetric = matrix is None or all(
        matrix[i][j] == matrix[j][i] for i in range(size) for j in range(i)
    )
    details = {"size": size, "magnitude": magnitude, "field": field.describe()}
    if isinstance(det, FloatCyclotomic):
        details["error_bound"] = det.error
    failures = [] if symmetric and magnitude >= 1e-8 else [{"symmetric": symmetric}]
    return result_from_failures(
        f"appA.det.n{n}", ANCHOR, failures, started, checked=1, details=details
    )


def verify_mode_agreement(n: int, precision: int = 128) -> CheckResult:
    """Traces in exact and float mode agree within 1e-10."""
    started = time.perf_counter()
    exact = ExactField(order_for(n))
    floats = FloatField(order_for(n), precision)
    failures = []
    for k in range(9 * n + 6):
        for e, f in zip(trace_values(n, k, exact), trace_values(n, k, floats)):
            gap = float(abs(e.to_complex(floats.mp) - f.value))
            if gap > 1e-10:
                failures.append({"k": k, "gap": gap})
    return result_from_failures(
        f"appA.mode-agreement.n{n}", ANCHOR, failures, started, checked=9 * n + 6
    )


def random_sigmas(rng: random.Random, degree: int) -> tuple[MPoly, MPoly, MPoly]:
    """Three random polynomials in r1 of degree <= `degree` with q-power coefficients."""
    out = []
    for _ in range(3):
        terms = {
            e: rng.randint(-3, 3) for e in range(degree + 1) if rng.random() < 0.6
        }
        poly = MPoly()
        for e, c in terms.items():
            poly = poly + MPoly.monomial({"r1": e, "qh": 2 * rng.randint(-2, 2)}, c)
        out.append(poly)
    return out[0], out[1], out[2]


def verify_degree_separation(seed: int = 11, samples: int = 100) -> list[CheckResult]:
    zero = MPoly()
    one = MPoly.const(1)
    r1 = MPoly.var("r1")
    results = [
        check_degree_separation(zero, zero, zero, 1, check_id="appA.degree-separation.zero"),
        check_degree_separation(zero, one, zero, 5, check_id="appA.degree-separation.sigma1"),
        check_degree_separation(one, zero, zero, 3, check_id="appA.degree-separation.constant"),
        check_degree_separation(
            r1 + one,
            r1**2,
            MPoly.var("qh") ** 2 * r1,
            1,
            evaluate_ks=range(8),
            check_id="appA.degree-separation.evaluation",
        ),
    ]
    rng = random.Random(seed)
    started = time.perf_counter()
    failures = []
    for _ in range(samples):
        sigmas = random_sigmas(rng, 5)
        if all(s.is_zero() for s in sigmas):
            continue
        if separation_polynomial(sigmas, 5).is_zero():
            failures.append({"sigmas": [format_mpoly(s) for s in sigmas]})
    results.append(
        result_from_failures(
            "appA.degree-separation.random", ANCHOR, failures, started, checked=samples
        )
    )
    return results


def verify_character_n(n: int, mode: str = "exact", precision: int = 128) -> list[CheckResult]:
    """The per-n checks: representations, traces, determinant and mode agreement."""
    _check_n(n)
    results = [verify_representations(n, mode, precision), verify_traces(n, mode, precision)]
    # 17×17 and larger determinants run in float mode
    det_mode = mode if n == 1 else "float"
    results.append(verify_phi_det(n, det_mode, max(precision, 128)))
    if n == 1:
        results.append(verify_phi_identities(n))
    results.append(verify_mode_agreement(n, max(precision, 128)))
    return results


def verify_character_suite(
    n_values: Sequence[int], mode: str = "exact", precision: int = 128
) -> list[CheckResult]:
    """Everything the character checks cover, for each odd n in `n_values`."""
    results = [verify_amat(mode=mode), verify_b_sequences(n_values)]
    for n in n_values:
        results.extend(verify_character_n(n, mode, precision))
    results.extend(verify_degree_separation())
    statuses = {r.check_id: r.status.value for r in results}
    logger.info("character suite finished: %s", statuses)
    return results


__all__ = [
    "BridgePattern",
    "Cyclotomic",
    "ExactField",
    "FloatCyclotomic",
    "FloatField",
    "amat",
    "bridge_b_sequence",
    "check_degree_separation",
    "cyclotomic_modulus",
    "field_context",
    "phi_matrix_det",
    "rep_condition_check",
    "symbolic_b_sequence",
    "trace_values",
]
