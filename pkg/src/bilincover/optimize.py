"""Exact linear optimization over covering rows by extreme-point case analysis.

Optimizing c.x + d.y over a covering row reduces to inspecting objective
signs and, per column, rounding the continuous stationary point
sqrt(r d / c) of c*x + d*r/x to an integer neighbor. The bounded variant
additionally clamps into 1..u and scans which column carries the covering
product; it runs in O(n^2) overall, O(n) per column subproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .model import (
    Instance,
    LinearObjective,
    Point,
    ValidationError,
    validate_instance,
)


class OptStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFIMUM_NOT_ATTAINED = "infimum_not_attained"


@dataclass(frozen=True)
class OptResult:
    status: OptStatus
    value: float | None = None
    solution: Point | None = None


def _single_column_point(n: int, t: int, x: float, y: float) -> Point:
    xs = [0.0] * n
    ys = [0.0] * n
    xs[t] = float(x)
    ys[t] = float(y)
    return Point(tuple(xs), tuple(ys))


def _best_neighbor(eta: float, lo: int, hi: int | None, f) -> int:
    """Clamp both integer neighbors of ``eta`` into [lo, hi] and take the better.

    Evaluating both neighbors explicitly makes the choice immune to one-ulp
    errors in the square root; ties resolve to the smaller integer.
    """
    p = math.floor(eta)
    cand_lo = max(lo, p)
    cand_hi = max(lo, p + 1)
    if hi is not None:
        cand_lo = min(cand_lo, hi)
        cand_hi = min(cand_hi, hi)
    if cand_lo == cand_hi:
        return cand_lo
    return cand_lo if f(cand_lo) <= f(cand_hi) else cand_hi


def optimize_column(c: float, d: float, r: float) -> tuple[int, float, float]:
    """Minimize c*x + d*(r/x) over integers x >= 1 for positive c and d.

    Returns (x, y, value) with y = r/x; a floor/ceil tie picks the floor.
    """
    if c <= 0 or d <= 0:
        raise ValidationError("optimize_column requires positive c and d")
    f = lambda x: c * x + d * r / x
    x = _best_neighbor(math.sqrt(r * d / c), 1, None, f)
    return x, r / x, f(x)


def optimize_unbounded(obj: LinearObjective, r: float) -> OptResult:
    """Exact minimum of c.x + d.y over the unbounded covering row.

    Sign cases: any negative coefficient makes the problem unbounded; a
    zero c_t with d_t > 0 drives the infimum 0 without attainment; zero d
    reduces to the cheapest x column at (1, r).
    """
    if r <= 0:
        raise ValidationError("r must be positive")
    n = obj.n
    if any(ci < 0 for ci in obj.c) or any(di < 0 for di in obj.d):
        return OptResult(OptStatus.UNBOUNDED)
    zero_c = [t for t in range(n) if obj.c[t] == 0.0]
    if zero_c:
        for t in zero_c:
            if obj.d[t] == 0.0:
                return OptResult(
                    OptStatus.OPTIMAL, 0.0, _single_column_point(n, t, 1, r)
                )
        return OptResult(OptStatus.INFIMUM_NOT_ATTAINED, 0.0, None)
    if all(di == 0.0 for di in obj.d):
        t = min(range(n), key=lambda i: (obj.c[i], i))
        return OptResult(
            OptStatus.OPTIMAL, obj.c[t], _single_column_point(n, t, 1, r)
        )
    best = None
    for i in range(n):
        if obj.d[i] == 0.0:
            cand = (obj.c[i] * 1 + 0.0, i, 1, r)
        else:
            x, y, val = optimize_column(obj.c[i], obj.d[i], r)
            cand = (val, i, x, y)
        if best is None or cand[0] < best[0]:
            best = cand
    val, t, x, y = best
    return OptResult(OptStatus.OPTIMAL, val, _single_column_point(n, t, x, y))


def near_optimal_witness(obj: LinearObjective, r: float, tol: float) -> Point:
    """A feasible point within ``tol`` of the unattained infimum 0.

    Only meaningful for the infimum case (some c_t = 0 with d_t > 0): the
    witness pushes x_t high enough that d_t * (r / x_t) <= tol.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    for t in range(obj.n):
        if obj.c[t] == 0.0 and obj.d[t] > 0.0:
            x = math.ceil(r * obj.d[t] / tol)
            return _single_column_point(obj.n, t, x, r / x)
    raise ValidationError("objective has no unattained-infimum column")


def optimize_fixed_column(
    obj: LinearObjective, inst: Instance, i: int
) -> tuple[Point, float]:
    """Best extreme point whose covering product sits in column i (d >= 0).

    Every other column contributes its cheaper box corner (u_j when
    c_j <= 0, else 0); column i rounds the stationary point of
    c_i*x + d_i*r/x into 1..u_i.
    """
    validate_instance(inst)
    if inst.u is None:
        raise ValidationError("bounded optimization requires upper bounds u")
    if not inst.has_unit_weights():
        raise ValidationError("apply the weight transform before optimizing")
    if obj.n != inst.n:
        raise ValidationError("objective dimension mismatch")
    if not 0 <= i < inst.n:
        raise ValidationError("column index out of range")
    if any(di < 0 for di in obj.d):
        raise ValidationError("fixed-column optimization requires d >= 0")

    xs = [0.0] * inst.n
    for j in range(inst.n):
        if j != i and obj.c[j] <= 0.0:
            xs[j] = float(inst.u[j])
    ci, di, r, ui = obj.c[i], obj.d[i], inst.r, inst.u[i]
    if ci <= 0.0:
        xi = ui
    elif di == 0.0:
        xi = 1
    else:
        f = lambda x: ci * x + di * r / x
        xi = _best_neighbor(math.sqrt(r * di / ci), 1, ui, f)
    xs[i] = float(xi)
    ys = [0.0] * inst.n
    ys[i] = r / xi
    point = Point(tuple(xs), tuple(ys))
    return point, obj.value(point)


def optimize_bounded(obj: LinearObjective, inst: Instance) -> OptResult:
    """Exact minimum of c.x + d.y over the bounded covering row.

    Negative d is unbounded (y has no cap); c <= 0 with d = 0 sits at the
    all-upper corner with the covering product in the first column;
    otherwise the best over the n fixed-column subproblems wins, ties going
    to the smallest column index.
    """
    validate_instance(inst)
    if inst.u is None:
        raise ValidationError("bounded optimization requires upper bounds u")
    if not inst.has_unit_weights():
        raise ValidationError("apply the weight transform before optimizing")
    if obj.n != inst.n:
        raise ValidationError("objective dimension mismatch")
    if any(di < 0 for di in obj.d):
        return OptResult(OptStatus.UNBOUNDED)
    if all(ci <= 0 for ci in obj.c) and all(di == 0 for di in obj.d):
        xs = tuple(float(ui) for ui in inst.u)
        ys = (inst.r / inst.u[0],) + (0.0,) * (inst.n - 1)
        point = Point(xs, ys)
        return OptResult(OptStatus.OPTIMAL, obj.value(point), point)
    best: tuple[float, Point] | None = None
    for i in range(inst.n):
        point, val = optimize_fixed_column(obj, inst, i)
        if best is None or val < best[0]:
            best = (val, point)
    return OptResult(OptStatus.OPTIMAL, best[0], best[1])
