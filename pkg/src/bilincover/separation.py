"""Closed-form cut coefficients and linear-time separation for covering rows.

The complete linear description of a covering row is generated column by
column. For integer index k >= 1 the chord of the hyperbola x*y = r through
(k-1, r/(k-1)) and (k, r/k) has coefficients

    a_k = 1 / (2k - 1),        b_k = k (k - 1) / (r (2k - 1)),

with (a_1, b_1) = (1, 0) degenerating to x >= 1. When x_i <= u_i is present
the column carries one extra bound-derived term y_i * u_i / r. An inequality
of the family picks exactly one term per column and requires the sum to be
at least one; separating a point therefore reduces to minimizing each column
at the point independently, which takes O(1) per column via the stationary
point of the chord value

    f(w) = x / (2w - 1) + y w (w - 1) / (r (2w - 1)),

namely w = 1/2 + sqrt(4 x r / y - 1) / 2 whenever 4 x r > y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    EPS_FEAS,
    Instance,
    Point,
    ValidationError,
    validate_instance,
)


class BoundViolation(ValueError):
    """The query point exceeds an upper bound; separation is not needed."""

    def __init__(self, index: int, value: float, bound: float):
        super().__init__(f"x[{index}] = {value} exceeds its bound {bound}")
        self.index = index
        self.value = value
        self.bound = bound


@dataclass(frozen=True)
class FacetCoeff:
    """Chord coefficients (a_k, b_k) for one column index k."""

    k: int
    a: float
    b: float


def facet_coeffs(k: int, r: float) -> FacetCoeff:
    """Closed-form coefficients of the k-th chord inequality a_k x + b_k y >= 1."""
    if k < 1:
        raise ValidationError("k must be a positive integer")
    den = 2 * k - 1
    return FacetCoeff(k, 1.0 / den, (k * (k - 1)) / (r * den))


def chord_value(x: float, y: float, k: int, r: float) -> float:
    """Value of the k-th chord term at (x, y)."""
    den = 2 * k - 1
    return x / den + y * k * (k - 1) / (r * den)


def column_term(i: int, k: int, p: Point, inst: Instance) -> float:
    """Evaluate one entry of column i of the generating family at ``p``.

    ``k`` in 1..u_i selects the chord term; k = u_i + 1 selects the
    bound-derived term y_i * u_i / r (bounded instances only).
    """
    validate_instance(inst)
    p.check(inst)
    if not 0 <= i < inst.n:
        raise ValidationError("column index out of range")
    if k < 1:
        raise ValidationError("k out of range")
    if inst.u is not None:
        if k > inst.u[i] + 1:
            raise ValidationError("k out of range")
        if k == inst.u[i] + 1:
            return p.y[i] * inst.u[i] / inst.r
    return chord_value(p.x[i], p.y[i], k, inst.r)


@dataclass(frozen=True)
class ColumnMin:
    """Per-column separation result: chosen index and minimum value xi.

    ``w_hat`` is None for an unbounded column whose infimum 0 is approached
    as w grows (x > 0, y = 0); the index is fixed later when the cut is
    assembled.
    """

    w_hat: int | None
    xi: float


@dataclass(frozen=True)
class Cut:
    """Inequality sum_i (alpha_i x_i + beta_i y_i) >= 1 with generating indices."""

    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    w: tuple[int, ...]
    rhs: float = 1.0

    def value(self, p: Point) -> float:
        return sum(a * xi for a, xi in zip(self.alpha, p.x)) + sum(
            b * yi for b, yi in zip(self.beta, p.y)
        )

    def violated_by(self, p: Point, tol: float = EPS_FEAS) -> bool:
        return self.value(p) < self.rhs - tol

    def pretty(self) -> str:
        terms = []
        for i, (a, b) in enumerate(zip(self.alpha, self.beta)):
            if a != 0.0:
                terms.append(f"{a:g}*x{i + 1}")
            if b != 0.0:
                terms.append(f"{b:g}*y{i + 1}")
        lhs = " + ".join(terms) if terms else "0"
        return f"{lhs} >= {self.rhs:g}"


@dataclass(frozen=True)
class SeparationResult:
    """Outcome of a separation query.

    ``xi_total`` is the minimum left-hand value of the whole family at the
    point; ``violation`` equals 1 - xi_total when the point is cut off,
    0.0 otherwise.
    """

    feasible: bool
    cut: Cut | None
    violation: float
    xi_total: float
    column_mins: tuple[ColumnMin, ...] = ()


def _argmin_chord(x: float, y: float, r: float, cap: int | None = None) -> int:
    """Integer w >= 1 (and <= cap when given) minimizing the chord value.

    Requires x, y > 0. Both integer neighbors of the stationary point are
    evaluated explicitly after clamping, so a one-ulp sqrt error cannot
    change the answer; ties pick the smaller index.
    """
    if 4.0 * x * r > y:
        wbar = 0.5 + math.sqrt(4.0 * x * r / y - 1.0) / 2.0
        p = math.floor(wbar)
    else:
        # f is nondecreasing on w >= 1, so the first index wins.
        p = 1
    lo = max(1, p)
    hi = max(1, p + 1)
    if cap is not None:
        lo = min(lo, cap)
        hi = min(hi, cap)
    if lo == hi:
        return lo
    return lo if chord_value(x, y, lo, r) <= chord_value(x, y, hi, r) else hi


def min_column_bounded(x: float, y: float, r: float, u: int) -> ColumnMin:
    """Minimize column i of a bounded row at (x, y).

    The candidates are the chord terms w = 1..u and the bound-derived term
    y*u/r encoded as w = u + 1. A tie between the best chord and the bound
    term resolves to the chord.
    """
    if x < 0 or y < 0:
        raise ValidationError("negative inputs")
    if y == 0.0:
        return ColumnMin(u + 1, 0.0)
    if x == 0.0:
        return ColumnMin(1, 0.0)
    q = _argmin_chord(x, y, r, cap=u)
    fq = chord_value(x, y, q, r)
    bound_term = y * u / r
    if fq <= bound_term:
        return ColumnMin(q, fq)
    return ColumnMin(u + 1, bound_term)


def _clean_components(values, eps: float) -> list[float]:
    out = []
    for i, v in enumerate(values):
        if v < -eps:
            raise ValidationError(f"component {i} is negative")
        out.append(0.0 if v < 0.0 else v)
    return out


def separate_bounded(p: Point, inst: Instance, eps: float = EPS_FEAS) -> SeparationResult:
    """Decide membership in the bounded hull, or return a most-violated cut.

    The point must satisfy x <= u (up to ``eps``); a genuine bound violation
    raises BoundViolation since the bound itself is the separating
    inequality in that case.
    """
    validate_instance(inst)
    if inst.u is None:
        raise ValidationError("bounded separation requires upper bounds u")
    if not inst.has_unit_weights():
        raise ValidationError("apply the weight transform before separating")
    p.check(inst)
    x = _clean_components(p.x, eps)
    y = _clean_components(p.y, eps)
    for i, (xi, ui) in enumerate(zip(x, inst.u)):
        if xi > ui + eps:
            raise BoundViolation(i, xi, ui)

    cols = tuple(
        min_column_bounded(x[i], y[i], inst.r, inst.u[i]) for i in range(inst.n)
    )
    total = sum(c.xi for c in cols)
    if total >= 1.0 - eps:
        return SeparationResult(True, None, 0.0, total, cols)

    alpha, beta = [], []
    for i, c in enumerate(cols):
        if c.w_hat <= inst.u[i]:
            fc = facet_coeffs(c.w_hat, inst.r)
            alpha.append(fc.a)
            beta.append(fc.b)
        else:
            alpha.append(0.0)
            beta.append(inst.u[i] / inst.r)
    cut = Cut(tuple(alpha), tuple(beta), tuple(c.w_hat for c in cols))
    return SeparationResult(False, cut, 1.0 - total, total, cols)


def separate_unbounded(
    p: Point, inst: Instance, gamma: int = 1, eps: float = EPS_FEAS
) -> SeparationResult:
    """Decide membership in the hull of the unbounded row, or return a cut.

    Columns with x > 0, y = 0 have infimum 0 approached as w grows; when the
    point is cut off they all receive the common index

        t = floor((1 - xi + v) / (2 (1 - xi))) + gamma,

    v being the sum of their x values, which is the least choice (at
    gamma = 1) making the assembled inequality violated. Any gamma >= 1
    yields a violated inequality of the family.
    """
    validate_instance(inst)
    if not inst.has_unit_weights():
        raise ValidationError("apply the weight transform before separating")
    if not isinstance(gamma, int) or gamma < 1:
        raise ValidationError("gamma must be a positive integer")
    p.check(inst)
    x = _clean_components(p.x, eps)
    y = _clean_components(p.y, eps)

    cols: list[ColumnMin] = []
    for i in range(inst.n):
        if x[i] == 0.0:
            cols.append(ColumnMin(1, 0.0))
        elif y[i] > 0.0:
            q = _argmin_chord(x[i], y[i], inst.r)
            cols.append(ColumnMin(q, chord_value(x[i], y[i], q, inst.r)))
        else:
            cols.append(ColumnMin(None, 0.0))
    total = sum(c.xi for c in cols)
    if total >= 1.0 - eps:
        return SeparationResult(True, None, 0.0, total, tuple(cols))

    v = sum(x[i] for i, c in enumerate(cols) if c.w_hat is None)
    t = math.floor((1.0 - total + v) / (2.0 * (1.0 - total))) + gamma
    # the deferred terms must make the inequality strictly violated; bump t
    # when the ratio sat within one ulp of an integer and floor undershot
    while v > 0 and total + v / (2 * t - 1) >= 1.0:
        t += 1
    resolved = tuple(
        ColumnMin(t, c.xi) if c.w_hat is None else c for c in cols
    )
    alpha, beta = [], []
    for c in resolved:
        fc = facet_coeffs(c.w_hat, inst.r)
        alpha.append(fc.a)
        beta.append(fc.b)
    cut = Cut(tuple(alpha), tuple(beta), tuple(c.w_hat for c in resolved))
    return SeparationResult(False, cut, 1.0 - total, total, resolved)
