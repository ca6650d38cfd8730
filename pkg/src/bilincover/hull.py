"""Exhaustive vertex and facet generators for bounded covering rows.

Both enumerations are exponential in n and exist as ground-truth oracles
for the closed-form machinery; caps keep accidental blowups out. Outputs
are lexicographically ordered so runs are reproducible byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import EPS_FEAS, Instance, Point, ValidationError, validate_instance
from .separation import Cut, facet_coeffs

DEFAULT_CAP_N = 12
DEFAULT_CAP_FACETS = 10**6


class CapExceeded(ValidationError):
    """The requested enumeration is larger than the configured cap."""


def _require_bounded_unit(inst: Instance) -> Instance:
    validate_instance(inst)
    if inst.u is None:
        raise ValidationError("hull enumeration requires upper bounds u")
    if not inst.has_unit_weights():
        raise ValidationError("apply the weight transform before enumerating")
    return inst


def enumerate_extreme_points(inst: Instance, cap_n: int = DEFAULT_CAP_N) -> list[Point]:
    """All extreme points of the bounded hull, exactly once each.

    Every extreme point has one active column t with x_t in 1..u_t and
    y_t = r / x_t, while each other column sits at x_j in {0, u_j}, y_j = 0.
    The count is 2**(n-1) * sum(u).
    """
    _require_bounded_unit(inst)
    if inst.n > cap_n:
        raise CapExceeded(f"n = {inst.n} exceeds the enumeration cap {cap_n}")
    points: list[Point] = []
    others_all = list(range(inst.n))
    for t in range(inst.n):
        others = [j for j in others_all if j != t]
        for p_t in range(1, inst.u[t] + 1):
            for pattern in itertools.product(*[(0, inst.u[j]) for j in others]):
                x = [0.0] * inst.n
                y = [0.0] * inst.n
                x[t] = float(p_t)
                y[t] = inst.r / p_t
                for j, xj in zip(others, pattern):
                    x[j] = float(xj)
                points.append(Point(tuple(x), tuple(y)))
    return points


def enumerate_facets(inst: Instance, cap: int = DEFAULT_CAP_FACETS) -> list[Cut]:
    """One cut per index vector in prod_i ({1..u_i} + bound term u_i + 1)."""
    _require_bounded_unit(inst)
    count = 1
    for ui in inst.u:
        count *= ui + 1
    if count > cap:
        raise CapExceeded(f"{count} facets exceed the enumeration cap {cap}")
    cuts: list[Cut] = []
    for w in itertools.product(*[range(1, ui + 2) for ui in inst.u]):
        alpha, beta = [], []
        for i, wi in enumerate(w):
            if wi <= inst.u[i]:
                fc = facet_coeffs(wi, inst.r)
                alpha.append(fc.a)
                beta.append(fc.b)
            else:
                alpha.append(0.0)
                beta.append(inst.u[i] / inst.r)
        cuts.append(Cut(tuple(alpha), tuple(beta), w))
    return cuts


@dataclass(frozen=True)
class Membership:
    """Hull membership verdict with one violated constraint as witness."""

    inside: bool
    cut: Cut | None = None
    bound: tuple[str, int] | None = None  # ("x_upper" | "x_nonneg" | "y_nonneg", index)


def membership(
    p: Point,
    inst: Instance,
    eps: float = EPS_FEAS,
    cap: int = DEFAULT_CAP_FACETS,
) -> Membership:
    """Exact membership in the bounded hull by checking every constraint.

    The hull equals the full inequality family intersected with the box
    0 <= x <= u and y >= 0, so the check is: nonnegativity, bounds, then
    each enumerated cut.
    """
    _require_bounded_unit(inst)
    p.check(inst)
    for i, xi in enumerate(p.x):
        if xi < -eps:
            return Membership(False, bound=("x_nonneg", i))
    for i, yi in enumerate(p.y):
        if yi < -eps:
            return Membership(False, bound=("y_nonneg", i))
    for i, (xi, ui) in enumerate(zip(p.x, inst.u)):
        if xi > ui + eps:
            return Membership(False, bound=("x_upper", i))
    for cut in enumerate_facets(inst, cap=cap):
        if cut.value(p) < 1.0 - eps:
            return Membership(False, cut=cut)
    return Membership(True)
