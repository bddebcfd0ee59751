"""
q-deformed Chebyshev-type polynomial families in a trace variable r = μ + μ⁻¹.

Core Features:
- γ_k, the Chebyshev polynomials of the second kind shifted so that γ₀ = 0, γ₁ = 1
- η_k^n as the binomial sum Σ C(n, j) q^{2(2j−n)+k} γ_{2j−n+k}
- c_k^n as the exact quotient (q̄η_{k+1}^n − qη_k^n − rⁿ) / (r − α)
- λ_k^n = −η_{k+1}^n + η_k^n − c_k^n t²
- Dickson polynomials T_j with T_j(μ + μ⁻¹) = μʲ + μ⁻ʲ
- A lock-guarded memo table and the identity suite over |k| ≤ kmax, n ≤ nmax

All values are built in the variable r and renamed on request, so `eta(2, 1, "r3")`
is the same polynomial as `eta(2, 1)` with r replaced by r3.
"""

from __future__ import annotations

import logging
import threading
import time
from collections.abc import Callable, Iterator
from math import comb
from typing import Any

from .algebra import (
    ALPHA,
    MU,
    ONE,
    QB,
    ZERO,
    MPoly,
    Q,
    R,
    T,
    format_mpoly,
    mpoly_exact_div,
    mpoly_substitute,
    qpow,
    rename_variable,
)
from .results import CheckResult, result_from_failures

logger = logging.getLogger(__name__)

B_ANCHOR = "Appendix B"
S51_ANCHOR = "§5.1"


class FamilyTable:
    """
    Memo table keyed by (family-tag, k, n).

    Reads are lock-free; population takes the lock and re-checks, so two threads
    racing on the same key store one value.
    """

    def __init__(self) -> None:
        self._cache: dict[tuple[str, int, int], MPoly] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._cache)

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def _get(self, key: tuple[str, int, int], build: Callable[[], MPoly]) -> MPoly:
        value = self._cache.get(key)
        if value is not None:
            return value
        # build outside the lock; recursive builds re-enter _get
        value = build()
        with self._lock:
            return self._cache.setdefault(key, value)

    # --- families in r ---

    def gamma(self, k: int) -> MPoly:
        if k < 0:
            return -self.gamma(-k)
        if k <= 1:
            return MPoly.const(k)
        return self._get(("gamma", k, 0), lambda: R * self.gamma(k - 1) - self.gamma(k - 2))

    def eta(self, k: int, n: int) -> MPoly:
        if n < 0:
            raise ValueError(f"eta needs n >= 0, got {n}")
        return self._get(("eta", k, n), lambda: self._eta_sum(k, n))

    def _eta_sum(self, k: int, n: int) -> MPoly:
        total = ZERO
        for j in range(n + 1):
            shift = 2 * j - n
            term = MPoly.const(comb(n, j)) * qpow(2 * shift + k) * self.gamma(shift + k)
            total = total + term
        return total

    def c_coef(self, k: int, n: int) -> MPoly:
        if n < 0:
            raise ValueError(f"c needs n >= 0, got {n}")
        return self._get(("c", k, n), lambda: self._c_quotient(k, n))

    def _c_quotient(self, k: int, n: int) -> MPoly:
        numerator = QB * self.eta(k + 1, n) - Q * self.eta(k, n) - R**n
        return mpoly_exact_div(numerator, R - ALPHA)

    def lambda_coef(self, k: int, n: int) -> MPoly:
        if n < 0:
            raise ValueError(f"lam needs n >= 0, got {n}")
        return self._get(
            ("lam", k, n),
            lambda: -self.eta(k + 1, n) + self.eta(k, n) - self.c_coef(k, n) * T**2,
        )

    def dickson(self, j: int) -> MPoly:
        j = abs(j)
        if j == 0:
            return MPoly.const(2)
        if j == 1:
            return R
        return self._get(("T", j, 0), lambda: R * self.dickson(j - 1) - self.dickson(j - 2))


_TABLE = FamilyTable()


def _in(variable: str, value: MPoly) -> MPoly:
    return value if variable == "r" else rename_variable(value, "r", variable)


def gamma(k: int, variable: str = "r") -> MPoly:
    """γ_k; γ_{−k} = −γ_k."""
    return _in(variable, _TABLE.gamma(k))


def eta(k: int, n: int, variable: str = "r") -> MPoly:
    return _in(variable, _TABLE.eta(k, n))


def c_coef(k: int, n: int, variable: str = "r") -> MPoly:
    """c_k^n by exact division; a `NonExactDivision` here means a broken family."""
    return _in(variable, _TABLE.c_coef(k, n))


def lambda_coef(k: int, n: int, variable: str = "r") -> MPoly:
    return _in(variable, _TABLE.lambda_coef(k, n))


def dickson(j: int, variable: str = "r") -> MPoly:
    return _in(variable, _TABLE.dickson(j))


def phi_relation(j: int, variable: str = "r") -> MPoly:
    """
    φ_j for j ∈ {3, 4, 5}: λ₃^{j−3} minus its ∼-reduced form.

    φ₃ = λ₃⁰ − r, φ₄ = λ₃¹ − r² − q̄² + 1, φ₅ = λ₃² − r³ − (q̄⁴ − 1) r.
    """
    if j == 3:
        rest = R
    elif j == 4:
        rest = R**2 + QB**2 - ONE
    elif j == 5:
        rest = R**3 + (QB**4 - ONE) * R
    else:
        raise ValueError(f"phi_relation is defined for j in 3..5, got {j}")
    return _in(variable, _TABLE.lambda_coef(3, j - 3) - rest)


# --- closed forms in μ ---


def _at_mu(p: MPoly) -> MPoly:
    value = mpoly_substitute(p, "r", MU + MU.inverse())
    assert isinstance(value, MPoly)
    return value


def eta_mu_form(k: int, n: int) -> MPoly:
    """q^k(μ^k λ₊ⁿ − μ^{−k} λ₋ⁿ)/(μ − μ⁻¹) with λ± = q^{±2}μ + q^{∓2}μ⁻¹."""
    mu_inv = MU.inverse()
    lam_plus = Q**2 * MU + QB**2 * mu_inv
    lam_minus = QB**2 * MU + Q**2 * mu_inv
    numerator = qpow(k) * (MU**k * lam_plus**n - mu_inv**k * lam_minus**n)
    return mpoly_exact_div(numerator, MU - mu_inv)


def eta_leading_term(k: int, n: int) -> tuple[int, MPoly]:
    """The claimed highest-order term of η_k^n as (degree in r, coefficient)."""
    if k > 0:
        return n + k - 1, qpow(2 * n + k)
    if k == 0:
        return n - 1, qpow(2 * n) - qpow(-2 * n)
    return n - k - 1, -qpow(-(2 * n - k))


# --- identity suite ---

SMALL_C_VALUES: dict[tuple[int, int], str] = {
    (0, 0): "0",
    (0, 1): "q^2 - 1",
    (1, 0): "q",
    (1, 1): "q^3*r + q^2 - 1",
    (2, 0): "q^2*r + q",
    (2, 1): "q^4*(r^2 - 1) + q^3*r + q^2",
}


def _grid(kmax: int, nmax: int) -> Iterator[tuple[int, int]]:
    for k in range(-kmax, kmax + 1):
        for n in range(nmax + 1):
            yield k, n


def _difference_failure(case: dict[str, Any], lhs: MPoly, rhs: MPoly) -> dict[str, Any] | None:
    diff = lhs - rhs
    if diff.is_zero():
        return None
    return {**case, "difference": format_mpoly(diff)}


def _grid_identity(
    check_id: str,
    anchor: str,
    kmax: int,
    nmax: int,
    sides: Callable[[int, int], tuple[MPoly, MPoly]],
) -> CheckResult:
    started = time.perf_counter()
    failures: list[dict[str, Any]] = []
    checked = 0
    for k, n in _grid(kmax, nmax):
        lhs, rhs = sides(k, n)
        checked += 1
        failure = _difference_failure({"k": k, "n": n}, lhs, rhs)
        if failure is not None:
            failures.append(failure)
    return result_from_failures(check_id, anchor, failures, started, checked=checked)


def _single_identity(
    check_id: str, anchor: str, pairs: list[tuple[str, MPoly, MPoly]]
) -> CheckResult:
    started = time.perf_counter()
    failures = [
        f
        for label, lhs, rhs in pairs
        if (f := _difference_failure({"case": label}, lhs, rhs)) is not None
    ]
    return result_from_failures(check_id, anchor, failures, started, checked=len(pairs))


def _leading_term_check(kmax: int, nmax: int) -> CheckResult:
    started = time.perf_counter()
    failures: list[dict[str, Any]] = []
    checked = 0
    for k, n in _grid(kmax, nmax):
        if k == 0 and n == 0:
            # η₀⁰ = 0 has no leading term
            continue
        checked += 1
        degree, coeff = _TABLE.eta(k, n).leading_term("r")
        want_degree, want_coeff = eta_leading_term(k, n)
        if degree != want_degree or coeff != want_coeff:
            failures.append(
                {
                    "k": k,
                    "n": n,
                    "degree": degree,
                    "expected_degree": want_degree,
                    "coefficient": format_mpoly(coeff),
                    "expected_coefficient": format_mpoly(want_coeff),
                }
            )
    return result_from_failures(
        "appB.eta-leading-term", B_ANCHOR, failures, started, checked=checked
    )


def _small_c_table() -> CheckResult:
    from .expr import parse_mpoly

    started = time.perf_counter()
    failures: list[dict[str, Any]] = []
    for (k, n), text in SMALL_C_VALUES.items():
        failure = _difference_failure({"k": k, "n": n}, _TABLE.c_coef(k, n), parse_mpoly(text))
        if failure is not None:
            failures.append(failure)
    eta_table = {
        f"eta({k},{n})": format_mpoly(_TABLE.eta(k, n)) for k in range(4) for n in range(2)
    }
    return result_from_failures(
        "appB.c-small-values",
        B_ANCHOR,
        failures,
        started,
        checked=len(SMALL_C_VALUES),
        details={"eta_table": eta_table},
    )


def _phi_leading_check() -> CheckResult:
    started = time.perf_counter()
    failures: list[dict[str, Any]] = []
    for j in (3, 4, 5):
        degree, coeff = phi_relation(j).leading_term("r")
        expected = -qpow(2 * j - 2)
        if degree != j or coeff != expected:
            failures.append(
                {"j": j, "degree": degree, "coefficient": format_mpoly(coeff)}
            )
    return result_from_failures(
        "sec51.phi-leading", "Lemma L1 (2)", failures, started, checked=3
    )


def verify_family_identities(kmax: int, nmax: int) -> list[CheckResult]:
    """
    Runs the full identity suite for |k| ≤ kmax, n ≤ nmax.

    Every identity family becomes one result; failing (k, n) cases are listed
    with the nonzero difference.
    """
    if kmax < 4 or nmax < 3:
        raise ValueError(f"identity suite needs kmax >= 4 and nmax >= 3, got {kmax}, {nmax}")
    t = _TABLE
    eta_, c_, lam_ = t.eta, t.c_coef, t.lambda_coef
    r2 = T**2
    results = [
        _grid_identity(
            "appB.relation-eta-1",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (R * eta_(k, n), QB * eta_(k + 1, n) + Q * eta_(k - 1, n)),
        ),
        _grid_identity(
            "appB.relation-eta-2",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (eta_(k, n + 1), Q * eta_(k + 1, n) + QB * eta_(k - 1, n)),
        ),
        _grid_identity(
            "appB.c-anchor",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (c_(k, n), c_(k - 1, n) + eta_(k, n)),
        ),
        _grid_identity(
            "appB.c-times-r",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (R * c_(k, n), QB * c_(k + 1, n) + Q * c_(k - 1, n) - R**n),
        ),
        _grid_identity(
            "appB.relation-c",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (c_(k, n + 1), Q * c_(k + 1, n) + QB * c_(k - 1, n) - R**n),
        ),
        _grid_identity(
            "appB.relation-lambda",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (lam_(k, n + 1), Q * lam_(k + 1, n) + QB * lam_(k - 1, n) + R**n * r2),
        ),
        _single_identity(
            "sec51.lambda-1",
            S51_ANCHOR,
            [("lambda-1", lam_(2, 1), Q * (lam_(3, 0) - R) + ONE)],
        ),
        _single_identity(
            "sec51.lambda-2",
            S51_ANCHOR,
            [("lambda-2", lam_(2, 2), Q * lam_(3, 1) + lam_(2, 0) + R * r2 + QB * (r2 - ONE))],
        ),
        _single_identity(
            "appB.coincide",
            B_ANCHOR,
            [
                ("coincide-1", c_(3, 0), QB * c_(2, 1)),
                ("coincide-2", c_(3, 1), QB * c_(2, 2) + (QB**3 - QB) * c_(2, 0)),
                ("coincide-3", c_(3, 2), QB * c_(2, 3) + (QB**5 - QB) * c_(2, 1)),
            ],
        ),
        _grid_identity(
            "appB.eta-closed-form",
            B_ANCHOR,
            kmax,
            nmax,
            lambda k, n: (_at_mu(eta_(k, n)), eta_mu_form(k, n)),
        ),
        _leading_term_check(kmax, nmax),
        _small_c_table(),
        _single_identity(
            "appB.gamma-closed-form",
            B_ANCHOR,
            [
                (f"gamma({k})", _at_mu(t.gamma(k)) * (MU - MU.inverse()), MU**k - MU.inverse() ** k)
                for k in range(-kmax, kmax + 1)
            ],
        ),
        _single_identity(
            "appB.dickson-bridge",
            "Appendix A",
            [
                (f"T({j})", t.dickson(j), t.gamma(j + 1) - t.gamma(j - 1))
                for j in range(-12, 13)
            ]
            + [
                (f"T({j}) at mu", _at_mu(t.dickson(j)), MU**j + MU.inverse() ** j)
                for j in range(0, 13)
            ],
        ),
        _single_identity(
            "g2.final-2-aux",
            "Lemma G2",
            [("final-2-aux", Q * eta_(4, 0), eta_(3, 1) - QB * c_(2, 0) + ONE)],
        ),
        _phi_leading_check(),
    ]
    logger.info("family identities checked: %d entries cached", len(t))
    return results
