"""Domain types and validation for mixed-integer bilinear covering rows.

A covering row constrains integer x >= 0 and real y >= 0 through

    sum_i delta_i * x_i * y_i >= r,      r > 0,

optionally with componentwise upper bounds x <= u. The weighted form
(delta != 1) is reduced to the unit-weight form by rescaling y, see
``apply_delta_transform``; every other module in the package assumes
unit weights.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

# Absolute feasibility tolerance shared across the package.
EPS_FEAS = 1e-9


class ValidationError(ValueError):
    """A structural invariant of an instance or point is violated."""


@dataclass(frozen=True)
class Instance:
    """A single covering row: sum_i delta_i x_i y_i >= r over Z+^n x R+^n.

    ``u`` bounds the integer variables componentwise; ``None`` means the
    row is unbounded in x. ``delta`` defaults to all ones.
    """

    n: int
    r: float
    u: tuple[int, ...] | None = None
    delta: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        if self.u is not None:
            object.__setattr__(self, "u", tuple(self.u))
        if self.delta is not None:
            object.__setattr__(self, "delta", tuple(float(v) for v in self.delta))

    @property
    def bounded(self) -> bool:
        return self.u is not None

    @property
    def ubar(self) -> tuple[float, ...]:
        """Implied lower bounds r / u_i on y_i at the upper bound of x_i."""
        if self.u is None:
            raise ValidationError("ubar requires upper bounds u")
        return tuple(self.r / ui for ui in self.u)

    def weights(self) -> tuple[float, ...]:
        return self.delta if self.delta is not None else (1.0,) * self.n

    def has_unit_weights(self) -> bool:
        return self.delta is None or all(d == 1.0 for d in self.delta)


def validate_instance(inst: Instance) -> Instance:
    """Return ``inst`` unchanged iff every type invariant holds.

    Raises ValidationError naming the first violated invariant.
    """
    if not isinstance(inst.n, int) or isinstance(inst.n, bool) or inst.n < 1:
        raise ValidationError("n must be a positive integer")
    if not math.isfinite(inst.r) or inst.r <= 0:
        raise ValidationError("r must be positive")
    if inst.u is not None:
        if len(inst.u) != inst.n:
            raise ValidationError("u must have exactly n entries")
        for i, ui in enumerate(inst.u):
            if isinstance(ui, bool) or not isinstance(ui, int):
                if not (isinstance(ui, float) and ui.is_integer()):
                    raise ValidationError(f"u[{i}] must be an integer")
            if ui < 1:
                raise ValidationError("u_i >= 1 required")
    if inst.delta is not None:
        if len(inst.delta) != inst.n:
            raise ValidationError("delta must have exactly n entries")
        for i, di in enumerate(inst.delta):
            if not math.isfinite(di) or di <= 0:
                raise ValidationError("delta_i > 0 required")
    return inst


@dataclass(frozen=True)
class Point:
    """A candidate (x, y) for one covering row; x is real here so LP iterates fit."""

    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))

    @classmethod
    def from_flat(cls, flat) -> "Point":
        """Build from the interleaved layout [x1, y1, x2, y2, ...]."""
        flat = list(flat)
        if len(flat) % 2 != 0:
            raise ValidationError("flat point must have an even number of entries")
        return cls(tuple(flat[0::2]), tuple(flat[1::2]))

    def flat(self) -> tuple[float, ...]:
        out: list[float] = []
        for xi, yi in zip(self.x, self.y):
            out.extend((xi, yi))
        return tuple(out)

    def check(self, inst: Instance) -> "Point":
        if len(self.x) != inst.n or len(self.y) != inst.n:
            raise ValidationError("point dimension mismatch: expected n components per side")
        for v in self.x + self.y:
            if not math.isfinite(v):
                raise ValidationError("point components must be finite")
        return self


@dataclass(frozen=True)
class LinearObjective:
    """Coefficients of the linear objective c.x + d.y to be minimized."""

    c: tuple[float, ...]
    d: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.c) != len(self.d):
            raise ValidationError("objective c and d must have equal length")

    @property
    def n(self) -> int:
        return len(self.c)

    def value(self, p: Point) -> float:
        return sum(ci * xi for ci, xi in zip(self.c, p.x)) + sum(
            di * yi for di, yi in zip(self.d, p.y)
        )


def eval_bilinear(p: Point, inst: Instance) -> float:
    """Value of sum_i delta_i x_i y_i at ``p``."""
    p.check(inst)
    return sum(w * xi * yi for w, xi, yi in zip(inst.weights(), p.x, p.y))


@dataclass(frozen=True)
class DeltaMap:
    """Invertible maps between a weighted row and its unit-weight reduction.

    The reduction substitutes y_i -> delta_i * y_i, so scaled points live in
    the unit-weight space and cuts found there pull back by multiplying the
    y-coefficients with delta.
    """

    delta: tuple[float, ...]

    def scale_point(self, p: Point) -> Point:
        """Original space -> unit-weight space."""
        return Point(p.x, tuple(d * yi for d, yi in zip(self.delta, p.y)))

    def unscale_point(self, p: Point) -> Point:
        """Unit-weight space -> original space."""
        return Point(p.x, tuple(yi / d for d, yi in zip(self.delta, p.y)))

    def pull_back_cut(self, cut):
        """Map a cut valid in the unit-weight space back to the original row."""
        return dataclasses.replace(
            cut, beta=tuple(b * d for b, d in zip(cut.beta, self.delta))
        )

    def scale_objective(self, obj: LinearObjective) -> LinearObjective:
        """Objective over original variables rewritten for the scaled y."""
        return LinearObjective(obj.c, tuple(di / d for di, d in zip(obj.d, self.delta)))


def apply_delta_transform(inst: Instance) -> tuple[Instance, DeltaMap]:
    """Reduce a weighted row to the equivalent unit-weight row.

    Returns the delta-free instance together with the point/cut maps. The
    identity map comes back when the weights are already all ones.
    """
    validate_instance(inst)
    weights = inst.weights()
    unit = Instance(inst.n, inst.r, inst.u, None)
    return unit, DeltaMap(weights)


@dataclass(frozen=True)
class TrimLossInstance:
    """Cutting-stock data: stock length L, final lengths, demands, pattern count."""

    L: float
    lengths: tuple[float, ...]
    demands: tuple[float, ...]
    n_patterns: int

    def __post_init__(self):
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "demands", tuple(float(v) for v in self.demands))

    @property
    def n_finals(self) -> int:
        return len(self.lengths)

    @property
    def implied_bounds(self) -> tuple[int, ...]:
        """Per-final cap floor(L / l_j) on any x_ij, implied by the knapsack row."""
        return tuple(int(math.floor(self.L / lj)) for lj in self.lengths)


def validate_trimloss(t: TrimLossInstance) -> TrimLossInstance:
    if not math.isfinite(t.L) or t.L <= 0:
        raise ValidationError("L must be positive")
    if len(t.lengths) == 0:
        raise ValidationError("at least one final length required")
    if len(t.demands) != len(t.lengths):
        raise ValidationError("demands must match lengths in count")
    for j, lj in enumerate(t.lengths):
        if not math.isfinite(lj) or lj <= 0:
            raise ValidationError(f"lengths[{j}] must be positive")
        if lj > t.L:
            raise ValidationError(f"lengths[{j}] exceeds the stock length L")
    for j, dj in enumerate(t.demands):
        if not math.isfinite(dj) or dj <= 0:
            raise ValidationError(f"demands[{j}] must be positive")
    if not isinstance(t.n_patterns, int) or t.n_patterns < 1:
        raise ValidationError("n_patterns must be a positive integer")
    return t
