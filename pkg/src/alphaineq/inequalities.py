"""Evaluators for every inequality and identity the engine verifies.

Each evaluator computes the left side, the right side and the slack
``rhs - lhs`` of one displayed inequality and packages them into an
:class:`IneqReport`; ``holds`` means ``slack >= -slack_tol``.  The
evaluators never assert: for alpha = 1 the framework collapses to classical
calculus and everything here is an established theorem, while for alpha < 1
the reported slacks and residuals constitute a consistency study of the
term-wise calculus itself.

The midpoint/sup-norm corollary bounds are implemented in the form obtained
by specializing their parent bound at ``x = (a+b)/2`` and applying the
s-convexity and subadditivity steps in ordinary real arithmetic.  Care is
needed here: dividing the midpoint chain by ``2**(s*alpha)`` twice, or
dropping the ``2**(1/q)`` factor that the conjugate-exponent route
produces, yields tighter-looking expressions that are simply false for
convex inputs at alpha = 1, so only the honestly derived forms are used.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .alphanum import AlphaContext, alpha_pow_signed, gamma
from .convexity import check_s_convex_second
from .quadrature import MomentFunctional, composed_moment, fractal_integral_numeric
from .series import AlphaSeries, lf_derivative, lf_derivative_n, lf_integral

__all__ = [
    "COROLLARY_VARIANTS",
    "IneqReport",
    "OstrowskiConstants",
    "eval_corollary",
    "eval_ghh",
    "eval_holder",
    "eval_ostrowski_classic",
    "eval_shh",
    "eval_thm1",
    "eval_thm2",
    "eval_thm3",
    "identity_residual",
    "ostrowski_constants",
    "sup_abs",
]

COROLLARY_VARIANTS = tuple(
    f"{kind}-thm{i}" for i in (1, 2, 3) for kind in ("midpoint", "theta", "midpoint-theta")
)


@dataclass(frozen=True)
class OstrowskiConstants:
    """The Gamma-ratio constants of the s-convex Ostrowski bounds.

    ``M`` is the moment of ``t**((s+2)*alpha)`` and ``N`` the moment of the
    expanded ``t**(2*alpha) * (1-t)**(s*alpha)`` integrand, both on [0, 1].
    """

    M: float
    N: float
    s: float
    ctx: AlphaContext


@dataclass(frozen=True)
class IneqReport:
    """One verification record: an inequality, its parameters, and the slack."""

    ineq: str
    alpha: float
    lhs: float
    rhs: float
    slack: float
    holds: bool
    s: Optional[float] = None
    p: Optional[float] = None
    q: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    x: Optional[float] = None
    fn: str = ""
    notes: str = ""

    def with_fn(self, fn: str) -> "IneqReport":
        return replace(self, fn=fn)


def _report(
    ineq: str,
    ctx: AlphaContext,
    lhs: float,
    rhs: float,
    notes: str = "",
    **params: Optional[float],
) -> IneqReport:
    slack = rhs - lhs
    return IneqReport(
        ineq=ineq,
        alpha=ctx.alpha,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        holds=slack >= -ctx.slack_tol,
        notes=notes,
        **params,
    )


def _spow(u: float, ctx: AlphaContext) -> float:
    return alpha_pow_signed(u, ctx)


def _check_interval(a: float, b: float) -> None:
    if not (0.0 <= a < b):
        raise ValueError(f"need 0 <= a < b, got ({a}, {b})")


def _check_point(x: float, a: float, b: float) -> None:
    if not (a <= x <= b):
        raise ValueError(f"need a <= x <= b, got x={x} for [{a}, {b}]")


def _check_conjugate(p: float, q: float, tol: float = 1e-12) -> None:
    if p <= 1.0 or q <= 1.0:
        raise ValueError(f"need p, q > 1, got ({p}, {q})")
    if abs(1.0 / p + 1.0 / q - 1.0) > tol:
        raise ValueError(f"(p, q) = ({p}, {q}) are not conjugate")


def sup_abs(f: AlphaSeries, a: float, b: float, grid: int = 1025) -> float:
    """Sup norm of ``|f|`` on ``[a, b]``: dense grid plus local refinement.

    After the grid scan, the cell around the maximizer is re-gridded three
    times, which is enough for the smooth series handled here.
    """
    if grid < 3:
        raise ValueError(f"grid must be >= 3, got {grid}")
    lo, hi = a, b
    best = 0.0
    for _ in range(4):
        xs = np.linspace(lo, hi, grid)
        vals = np.abs(f.evaluate(xs))
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
        grid = 33
    return best


def ostrowski_constants(s: float, ctx: AlphaContext) -> OstrowskiConstants:
    """The moment constants of the s-convex Ostrowski bounds."""
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    a = ctx.alpha
    M = gamma(1.0 + (s + 2.0) * a) / gamma(1.0 + (s + 3.0) * a)
    N = (
        gamma(1.0 + s * a) / gamma(1.0 + (s + 1.0) * a)
        - 2.0**a * gamma(1.0 + (s + 1.0) * a) / gamma(1.0 + (s + 2.0) * a)
        + gamma(1.0 + (s + 2.0) * a) / gamma(1.0 + (s + 3.0) * a)
    )
    return OstrowskiConstants(M=M, N=N, s=s, ctx=ctx)


def eval_ghh(f: AlphaSeries, a: float, b: float) -> IneqReport:
    """Two-sided Hermite-Hadamard check for a generalized convex candidate.

    The report's lhs/rhs carry the binding pair of the chain
    ``f(mid) <= normalized mean <= endpoint average``; the full chain is
    recorded in the notes.
    """
    _check_interval(a, b)
    ctx = f.ctx
    al = ctx.alpha
    left = f.evaluate((a + b) / 2.0)
    mid = gamma(1.0 + al) * lf_integral(f, a, b) / (b - a) ** al
    right = (f.evaluate(a) + f.evaluate(b)) / 2.0**al
    return _binding_report("ghh", ctx, left, mid, right, a=a, b=b)


def eval_shh(f: AlphaSeries, s: float, a: float, b: float) -> IneqReport:
    """Two-sided s-convex Hermite-Hadamard check."""
    _check_interval(a, b)
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    ctx = f.ctx
    al = ctx.alpha
    left = 2.0 ** ((s - 1.0) * al) / gamma(1.0 + al) * f.evaluate((a + b) / 2.0)
    mid = lf_integral(f, a, b) / (b - a) ** al
    right = gamma(1.0 + s * al) / gamma(1.0 + (s + 1.0) * al) * (f.evaluate(a) + f.evaluate(b))
    return _binding_report("shh", ctx, left, mid, right, a=a, b=b, s=s)


def _binding_report(
    ineq: str,
    ctx: AlphaContext,
    left: float,
    mid: float,
    right: float,
    **params: Optional[float],
) -> IneqReport:
    slack_left = mid - left
    slack_right = right - mid
    if slack_left <= slack_right:
        lhs, rhs, binding = left, mid, "left"
    else:
        lhs, rhs, binding = mid, right, "right"
    notes = f"left={left:.17g} mid={mid:.17g} right={right:.17g} binding={binding}"
    rep = _report(ineq, ctx, lhs, rhs, notes=notes, **params)
    # both sides must hold, not just the binding one
    holds = min(slack_left, slack_right) >= -ctx.slack_tol
    return replace(rep, holds=holds)


def eval_holder(
    f: Callable,
    g: Callable,
    p: float,
    q: float,
    a: float,
    b: float,
    functional: MomentFunctional,
) -> IneqReport:
    """Generalized Hoelder inequality via the numeric moment functional.

    Integrals over ``[a, b]`` are pulled back to ``[0, 1]`` through the
    affine map with the factor ``(b-a)**alpha``.
    """
    _check_interval(a, b)
    _check_conjugate(p, q)
    ctx = functional.ctx
    al = ctx.alpha
    scale = (b - a) ** al

    def pull(h: Callable) -> Callable[[np.ndarray], np.ndarray]:
        return lambda t: np.abs(np.asarray(h(a + t * (b - a)), dtype=float))

    fg = lambda t: pull(f)(t) * pull(g)(t)
    lhs = scale * fractal_integral_numeric(fg, functional)[0]
    intf = scale * fractal_integral_numeric(lambda t: pull(f)(t) ** p, functional)[0]
    intg = scale * fractal_integral_numeric(lambda t: pull(g)(t) ** q, functional)[0]
    rhs = max(intf, 0.0) ** (1.0 / p) * max(intg, 0.0) ** (1.0 / q)
    return _report("holder", ctx, lhs, rhs, a=a, b=b, p=p, q=q)


def eval_ostrowski_classic(
    f: AlphaSeries, x: float, a: float, b: float, grid: int = 1025
) -> IneqReport:
    """The first-derivative Ostrowski bound with a grid sup norm."""
    _check_interval(a, b)
    _check_point(x, a, b)
    ctx = f.ctx
    al = ctx.alpha
    mean = gamma(1.0 + al) * lf_integral(f, a, b) / (b - a) ** al
    lhs = abs(f.evaluate(x) - mean)
    theta1 = sup_abs(lf_derivative(f), a, b, grid)
    bracket = 1.0 / 4.0**al + (_spow(x - (a + b) / 2.0, ctx) / (b - a) ** al) ** 2
    rhs = 2.0**al * gamma(1.0 + al) / gamma(1.0 + 2.0 * al) * bracket * (b - a) ** al * theta1
    return _report("ostrowski", ctx, lhs, rhs, a=a, b=b, x=x)


def _ostrowski_lhs(f: AlphaSeries, x: float, a: float, b: float) -> float:
    ctx = f.ctx
    al = ctx.alpha
    f1 = lf_derivative(f)
    return abs(
        lf_integral(f, a, b) / (b - a) ** al
        - f.evaluate(x) / gamma(1.0 + al)
        + _spow(2.0 * x - a - b, ctx) * f1.evaluate(x) / gamma(1.0 + 2.0 * al)
    )


def identity_residual(
    f: AlphaSeries, x: float, a: float, b: float, functional: MomentFunctional
) -> float:
    """Absolute residual of the second-derivative integral identity.

    The right side carries the two weighted moments of ``f^(2a)`` composed
    with the affine maps onto ``[a, x]`` and ``[x, b]``; the moments are the
    normalized integrals, so the prefactor is ``1/(G(1+2a) (b-a)**a)``.
    Zero residual means the identity holds for this input; for alpha < 1 it
    generally does not, and the residual is the reported inconsistency.
    """
    _check_interval(a, b)
    _check_point(x, a, b)
    ctx = f.ctx
    al = ctx.alpha
    f2 = lf_derivative_n(f, 2)
    lhs = (
        lf_integral(f, a, b) / (b - a) ** al
        - f.evaluate(x) / gamma(1.0 + al)
        + _spow(2.0 * x - a - b, ctx) * lf_derivative(f).evaluate(x) / gamma(1.0 + 2.0 * al)
    )
    # a side's moment only enters with a nonzero prefactor; skipping the
    # degenerate side also avoids 0 * inf when f2 is singular at an endpoint
    rhs = 0.0
    if x > a:
        rhs += _spow(x - a, ctx) ** 3 * composed_moment(f2, 2.0, x, a, functional)
    if x < b:
        rhs += _spow(b - x, ctx) ** 3 * composed_moment(f2, 2.0, x, b, functional)
    rhs /= gamma(1.0 + 2.0 * al) * (b - a) ** al
    return abs(lhs - rhs)


def _second_derivative_data(
    f: AlphaSeries, x: float, a: float, b: float
) -> tuple[float, float, float]:
    f2 = lf_derivative_n(f, 2)
    return abs(f2.evaluate(x)), abs(f2.evaluate(a)), abs(f2.evaluate(b))


def _hypothesis_note(
    f: AlphaSeries, s: float, a: float, b: float, grid: int, power: float = 1.0
) -> str:
    """Grid-check the s-convexity hypothesis on |f^(2a)|**power; empty if ok."""
    if grid <= 0:
        return ""
    f2 = lf_derivative_n(f, 2)

    def cand(u: np.ndarray) -> np.ndarray:
        v = np.abs(f2.evaluate(u))
        return v**power if power != 1.0 else v

    verdict = check_s_convex_second(cand, s, a, b, grid, f.ctx)
    if verdict.holds_on_grid:
        return "hypothesis=verified"
    gap = verdict.witness[3] if verdict.witness else float("nan")
    return f"hypothesis=failed(gap={gap:.3g})"


def eval_thm1(
    f: AlphaSeries,
    s: float,
    x: float,
    a: float,
    b: float,
    hypothesis_grid: int = 0,
) -> IneqReport:
    """Ostrowski-type bound for |f^(2a)| generalized s-convex (second sense).

    With ``hypothesis_grid > 0`` the s-convexity hypothesis is grid-checked
    and the outcome recorded in the notes; the bound is evaluated either
    way, since a failed hypothesis is itself a reportable finding.
    """
    _check_interval(a, b)
    _check_point(x, a, b)
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    ctx = f.ctx
    al = ctx.alpha
    const = ostrowski_constants(s, ctx)
    dx, da, db = _second_derivative_data(f, x, a, b)
    rhs = (
        _spow(x - a, ctx) ** 3 * (const.M * dx + const.N * da)
        + _spow(b - x, ctx) ** 3 * (const.M * dx + const.N * db)
    ) / (gamma(1.0 + 2.0 * al) * (b - a) ** al)
    notes = _hypothesis_note(f, s, a, b, hypothesis_grid)
    return _report("thm1", ctx, _ostrowski_lhs(f, x, a, b), rhs, notes=notes, a=a, b=b, x=x, s=s)


def eval_thm2(
    f: AlphaSeries,
    s: float,
    p: float,
    q: float,
    x: float,
    a: float,
    b: float,
    hypothesis_grid: int = 0,
) -> IneqReport:
    """Hoelder-route Ostrowski-type bound for |f^(2a)|**q s-convex."""
    _check_interval(a, b)
    _check_point(x, a, b)
    _check_conjugate(p, q)
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    ctx = f.ctx
    al = ctx.alpha
    dx, da, db = _second_derivative_data(f, x, a, b)
    hoelder = (gamma(1.0 + 2.0 * p * al) / gamma(1.0 + (2.0 * p + 1.0) * al)) ** (1.0 / p)
    sfac = (gamma(1.0 + s * al) / gamma(1.0 + (s + 1.0) * al)) ** (1.0 / q)
    rhs = (
        hoelder
        * sfac
        * (
            _spow(x - a, ctx) ** 3 * (dx**q + da**q) ** (1.0 / q)
            + _spow(b - x, ctx) ** 3 * (dx**q + db**q) ** (1.0 / q)
        )
        / (gamma(1.0 + 2.0 * al) * (b - a) ** al)
    )
    notes = _hypothesis_note(f, s, a, b, hypothesis_grid, power=q)
    return _report(
        "thm2", ctx, _ostrowski_lhs(f, x, a, b), rhs, notes=notes, a=a, b=b, x=x, s=s, p=p, q=q
    )


def eval_thm3(
    f: AlphaSeries,
    s: float,
    q: float,
    x: float,
    a: float,
    b: float,
    hypothesis_grid: int = 0,
) -> IneqReport:
    """Power-mean-route Ostrowski-type bound; collapses to thm1 at q = 1."""
    _check_interval(a, b)
    _check_point(x, a, b)
    if q < 1.0:
        raise ValueError(f"q must be >= 1, got {q}")
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    ctx = f.ctx
    al = ctx.alpha
    const = ostrowski_constants(s, ctx)
    dx, da, db = _second_derivative_data(f, x, a, b)
    mean_pow = (gamma(1.0 + 2.0 * al) / gamma(1.0 + 3.0 * al)) ** (1.0 - 1.0 / q)
    rhs = (
        mean_pow
        * (
            _spow(x - a, ctx) ** 3 * (const.M * dx**q + const.N * da**q) ** (1.0 / q)
            + _spow(b - x, ctx) ** 3 * (const.M * dx**q + const.N * db**q) ** (1.0 / q)
        )
        / (gamma(1.0 + 2.0 * al) * (b - a) ** al)
    )
    notes = _hypothesis_note(f, s, a, b, hypothesis_grid, power=q)
    return _report(
        "thm3", ctx, _ostrowski_lhs(f, x, a, b), rhs, notes=notes, a=a, b=b, x=x, s=s, q=q
    )


def _midpoint_lhs(f: AlphaSeries, a: float, b: float) -> float:
    al = f.ctx.alpha
    return abs(
        lf_integral(f, a, b) / (b - a) ** al
        - f.evaluate((a + b) / 2.0) / gamma(1.0 + al)
    )


def eval_corollary(
    variant: str,
    f: AlphaSeries,
    a: float,
    b: float,
    s: float,
    p: Optional[float] = None,
    q: Optional[float] = None,
    x: Optional[float] = None,
    grid: int = 1025,
) -> IneqReport:
    """Evaluate one of the nine corollary bounds derived from the theorems.

    ``variant`` selects the midpoint form, the sup-norm (theta) form, or
    the combined form, for each of the three theorems.  Theta is the grid
    supremum of ``|f^(2a)|`` over ``[a, b]``.  Midpoint forms ignore ``x``;
    theta forms require it.
    """
    if variant not in COROLLARY_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose one of {COROLLARY_VARIANTS}")
    _check_interval(a, b)
    if not (0.0 < s <= 1.0):
        raise ValueError(f"s must lie in (0, 1], got {s}")
    kind, thm = variant.rsplit("-", 1)
    needs_pq = thm == "thm2"
    needs_q = thm in ("thm2", "thm3")
    if needs_pq:
        if p is None or q is None:
            raise ValueError(f"{variant} needs conjugate (p, q)")
        _check_conjugate(p, q)
    elif needs_q:
        if q is None or q < 1.0:
            raise ValueError(f"{variant} needs q >= 1")

    ctx = f.ctx
    al = ctx.alpha
    const = ostrowski_constants(s, ctx)
    M, N = const.M, const.N
    g2 = gamma(1.0 + 2.0 * al)
    f2 = lf_derivative_n(f, 2)
    da, db = abs(f2.evaluate(a)), abs(f2.evaluate(b))
    theta = sup_abs(f2, a, b, grid)
    sa = 2.0 ** (s * al)

    if thm == "thm1":
        front = 1.0
    elif thm == "thm2":
        front = (gamma(1.0 + 2.0 * p * al) / gamma(1.0 + (2.0 * p + 1.0) * al)) ** (1.0 / p) * (
            gamma(1.0 + s * al) / gamma(1.0 + (s + 1.0) * al)
        ) ** (1.0 / q)
    else:
        front = (g2 / gamma(1.0 + 3.0 * al)) ** (1.0 - 1.0 / q)

    if kind == "midpoint":
        lhs = _midpoint_lhs(f, a, b)
        scale = (b - a) ** (2.0 * al) / g2
        if thm == "thm1":
            rhs = front * scale / 8.0**al * (2.0 * M / sa + N) * (da + db)
        elif thm == "thm2":
            rhs = (
                front
                * scale
                / 2.0 ** ((3.0 + s / q) * al)
                * (1.0 + (1.0 + sa) ** (1.0 / q))
                * (da + db)
            )
        else:
            rhs = (
                front
                * scale
                / 2.0 ** ((3.0 + s / q) * al)
                * ((M + sa * N) ** (1.0 / q) + M ** (1.0 / q))
                * (da + db)
            )
        rep_x: Optional[float] = None
    elif kind == "theta":
        if x is None:
            raise ValueError(f"{variant} needs the evaluation point x")
        _check_point(x, a, b)
        lhs = _ostrowski_lhs(f, x, a, b)
        bracket = (b - a) ** (2.0 * al) / 12.0**al + _spow(x - (a + b) / 2.0, ctx) ** 2
        if thm == "thm1":
            rhs = front * 3.0**al * theta * (M + N) / g2 * bracket
        elif thm == "thm2":
            rhs = front * 2.0 ** (1.0 / q) * 3.0**al * theta / g2 * bracket
        else:
            rhs = front * 3.0**al * theta * (M + N) ** (1.0 / q) / g2 * bracket
        rep_x = x
    else:  # midpoint-theta
        lhs = _midpoint_lhs(f, a, b)
        scale = theta * (b - a) ** (2.0 * al) / (4.0**al * g2)
        if thm == "thm1":
            rhs = front * (M + N) * scale
        elif thm == "thm2":
            rhs = front * 2.0 ** (1.0 / q) * scale
        else:
            rhs = front * (M + N) ** (1.0 / q) * scale
        rep_x = None

    return _report(
        variant,
        ctx,
        lhs,
        rhs,
        a=a,
        b=b,
        x=rep_x,
        s=s,
        p=p if needs_pq else None,
        q=q if needs_q else None,
    )
