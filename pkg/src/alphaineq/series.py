"""Finite power series in ``x**(k*alpha)`` and their term-wise calculus.

This is the function algebra the whole engine operates on: sums
``sum_k c_k * x**(k*alpha)`` with real grades ``k >= 0``.  The derivative
and integral are defined term by term through the monomial rules

    d^alpha/dx^alpha x**(k a) = [G(1+k a)/G(1+(k-1) a)] x**((k-1) a)
    integral of x**(k a)      = [G(1+k a)/G(1+(k+1) a)] (b**((k+1)a) - a**((k+1)a))

taken as the *definitions* on this algebra.  The limit-based forms of both
operators diverge under ordinary arithmetic for alpha < 1, so the term-wise
rules are the semantics that can actually be computed; the residual
operators below measure how far classical identities (integration by parts
in particular) remain true under them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .alphanum import AlphaContext, alpha_pow_signed, gamma

__all__ = [
    "AlphaSeries",
    "GammaPoleError",
    "byparts_residual",
    "lf_derivative",
    "lf_derivative_n",
    "lf_integral",
    "series_add",
    "series_eval",
    "series_mul",
    "series_scale",
]

# Grades closer than this are considered the same term during normalization.
_GRADE_MERGE_TOL = 1e-12

# Grades must stay above -1 so every term keeps a convergent integral; the
# open interval (-1, 0) is needed because differentiating a grade in (0, 1)
# lands there.
_GRADE_FLOOR = -1.0


class GammaPoleError(ArithmeticError):
    """A term-wise derivative hit a Gamma pole at some grade."""


def _normalize(terms: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    merged: list[list[float]] = []
    for k, c in sorted(terms):
        if not (math.isfinite(k) and math.isfinite(c)):
            raise ValueError(f"non-finite term (grade={k}, coeff={c})")
        if k <= _GRADE_FLOOR:
            raise ValueError(f"grades must stay above {_GRADE_FLOOR}, got {k}")
        if merged and abs(k - merged[-1][0]) <= _GRADE_MERGE_TOL * max(1.0, abs(k)):
            merged[-1][1] += c
        else:
            merged.append([k, c])
    return tuple((k, c) for k, c in merged if c != 0.0)


@dataclass(frozen=True)
class AlphaSeries:
    """A finite sum ``sum_k c_k * x**(k*alpha)`` over grades ``k > -1``.

    Candidate functions use grades ``k >= 0``; grades in ``(-1, 0)`` arise
    only as derivatives of grades in ``(0, 1)`` and keep convergent
    integrals.  Terms are kept sorted by grade with equal grades merged and
    zero coefficients dropped.  Evaluation uses ordinary real powers on
    ``x >= 0`` (``x > 0`` when a negative grade is present).
    """

    terms: tuple[tuple[float, float], ...]
    ctx: AlphaContext

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _normalize(self.terms))

    @classmethod
    def monomial(cls, grade: float, ctx: AlphaContext, coeff: float = 1.0) -> "AlphaSeries":
        return cls(((grade, coeff),), ctx)

    @classmethod
    def constant(cls, value: float, ctx: AlphaContext) -> "AlphaSeries":
        return cls(((0.0, value),), ctx)

    @classmethod
    def zero(cls, ctx: AlphaContext) -> "AlphaSeries":
        return cls((), ctx)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "AlphaSeries") -> "AlphaSeries":
        return series_add(self, other)

    def __mul__(self, other: "AlphaSeries") -> "AlphaSeries":
        return series_mul(self, other)

    def scaled(self, c: float) -> "AlphaSeries":
        return series_scale(self, c)

    def evaluate(self, x: np.ndarray | float) -> np.ndarray | float:
        """Vectorized evaluation at nonnegative points (not range-checked).

        Negative-grade terms evaluate to inf at 0, silently; use
        :func:`series_eval` for the range-checked scalar path.
        """
        xs = np.asarray(x, dtype=float)
        out = np.zeros_like(xs)
        a = self.ctx.alpha
        with np.errstate(divide="ignore"):
            for k, c in self.terms:
                out = out + c * xs ** (k * a)
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def __call__(self, x: float) -> float:
        return series_eval(self, x)


def _require_same_ctx(f: AlphaSeries, g: AlphaSeries) -> None:
    if f.ctx != g.ctx:
        raise ValueError("series have different contexts")


def series_add(f: AlphaSeries, g: AlphaSeries) -> AlphaSeries:
    _require_same_ctx(f, g)
    return AlphaSeries(f.terms + g.terms, f.ctx)


def series_scale(f: AlphaSeries, c: float) -> AlphaSeries:
    return AlphaSeries(tuple((k, c * coeff) for k, coeff in f.terms), f.ctx)


def series_mul(f: AlphaSeries, g: AlphaSeries) -> AlphaSeries:
    _require_same_ctx(f, g)
    prod = [(kf + kg, cf * cg) for kf, cf in f.terms for kg, cg in g.terms]
    return AlphaSeries(tuple(prod), f.ctx)


def series_eval(f: AlphaSeries, x: float) -> float:
    """Evaluate at a single point ``x >= 0``."""
    if x < 0.0:
        raise ValueError(f"series are defined on x >= 0, got x={x}")
    if x == 0.0 and f.terms and f.terms[0][0] < 0.0:
        raise ValueError("series with negative grades are singular at x = 0")
    return float(f.evaluate(float(x)))


def lf_derivative(f: AlphaSeries) -> AlphaSeries:
    """Term-wise derivative of order alpha; constants are annihilated.

    The grade-0 case is excluded from the monomial rule (the difference
    quotient of a constant vanishes identically, and at alpha=1 the rule
    would hit the Gamma pole at 0), so constants simply map to the zero
    series.
    """
    a = f.ctx.alpha
    out: list[tuple[float, float]] = []
    for k, c in f.terms:
        if k == 0.0:
            continue
        if k < 0.0:
            raise GammaPoleError(
                f"cannot differentiate grade {k}: the result would leave the "
                "integrable range"
            )
        lower = 1.0 + (k - 1.0) * a
        if lower <= 0.0:
            raise GammaPoleError(
                f"derivative of grade {k} hits a Gamma pole (argument {lower})"
            )
        out.append((k - 1.0, c * gamma(1.0 + k * a) / gamma(lower)))
    return AlphaSeries(tuple(out), f.ctx)


def lf_derivative_n(f: AlphaSeries, n: int) -> AlphaSeries:
    """n-fold application of :func:`lf_derivative`."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    for _ in range(n):
        f = lf_derivative(f)
    return f


def lf_integral(f: AlphaSeries, a: float, b: float) -> float:
    """The normalized definite integral of order alpha over ``[a, b]``.

    Equals ``sum_k c_k [G(1+k a)/G(1+(k+1) a)] (b**((k+1)a) - a**((k+1)a))``
    with signed powers, is zero when ``a == b`` and antisymmetric in
    ``(a, b)`` by construction.
    """
    if a < 0.0 or b < 0.0:
        raise ValueError(f"integration endpoints must be nonnegative, got ({a}, {b})")
    if a == b:
        return 0.0
    al = f.ctx.alpha
    total = 0.0
    for k, c in f.terms:
        ratio = gamma(1.0 + k * al) / gamma(1.0 + (k + 1.0) * al)
        hi = alpha_pow_signed(b, f.ctx) ** (k + 1.0)
        lo = alpha_pow_signed(a, f.ctx) ** (k + 1.0)
        total += c * ratio * (hi - lo)
    return total


def byparts_residual(f: AlphaSeries, g: AlphaSeries, a: float, b: float) -> float:
    """Absolute residual of the integration-by-parts identity on ``[a, b]``.

    Returns ``| I(f * g') - [f g]_a^b + I(f' * g) |`` where ``I`` is
    :func:`lf_integral` and primes are term-wise derivatives.  Zero means
    the identity holds for this input; under term-wise semantics it fails
    for generic inputs when alpha < 1, and the residual is the measurement
    of that failure.
    """
    _require_same_ctx(f, g)
    left = lf_integral(series_mul(f, lf_derivative(g)), a, b)
    boundary = f.evaluate(b) * g.evaluate(b) - f.evaluate(a) * g.evaluate(a)
    right = lf_integral(series_mul(lf_derivative(f), g), a, b)
    return abs(left - boundary + right)
