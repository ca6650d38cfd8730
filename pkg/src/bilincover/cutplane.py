"""Iterative LP tightening with covering-row cuts.

The driver starts from a root relaxation (cover starts, knapsacks, bounds),
then repeatedly separates the LP point row by row and appends at most one
most-violated cut per covering row until no cut is violated or the LP-solve
cap is reached. Cuts are never deleted; duplicates (same generating index
vector on the same row) are suppressed. Lower bounds are monotone by
construction and enforced.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

from .model import (
    Instance,
    LinearObjective,
    Point,
    TrimLossInstance,
    ValidationError,
    apply_delta_transform,
    validate_instance,
    validate_trimloss,
)
from .separation import separate_bounded, separate_unbounded
from .simplex import LpProblem, LpStatus, NumericalError, SimplexSolver

EPS_CUT = 1e-7
MAX_ITERS = 800

CSV_HEADER = "iter,lb,cuts_added,cuts_total,ms"


class CutFamily(Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    lower_bound: float
    cuts_added: int
    cuts_total: int
    ms: float


@dataclass
class IterationLog:
    """One record per LP solve; ``terminated`` means no violated cut remained."""

    records: list[IterationRecord] = field(default_factory=list)
    terminated: bool = False

    @property
    def lps_solved(self) -> int:
        return len(self.records)

    @property
    def final_lower_bound(self) -> float:
        if not self.records:
            raise ValueError("empty iteration log")
        return self.records[-1].lower_bound

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for rec in self.records:
            lines.append(
                f"{rec.iteration},{rec.lower_bound!r},{rec.cuts_added},"
                f"{rec.cuts_total},{rec.ms!r}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "IterationLog":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or lines[0] != CSV_HEADER:
            raise ValidationError(f"iteration log must start with header {CSV_HEADER!r}")
        records = []
        for ln in lines[1:]:
            it, lb, added, total, ms = ln.split(",")
            records.append(
                IterationRecord(int(it), float(lb), int(added), int(total), float(ms))
            )
        terminated = bool(records) and records[-1].cuts_added == 0
        return cls(records, terminated)


@dataclass(frozen=True)
class _RowSpec:
    """Wiring of one covering row into the LP variable space."""

    r: float
    u: tuple[int, ...] | None
    x_ids: tuple[int, ...]
    y_ids: tuple[int, ...]


def build_root_relaxation(t: TrimLossInstance) -> LpProblem:
    """Root LP: min sum(y) over cover starts, knapsacks, implied bounds.

    Variables are x_ij (final j cut in pattern i, bounded by floor(L/l_j))
    and y_i (usage of pattern i); rows are sum_i x_ij >= 1 per final and
    sum_j l_j x_ij <= L per pattern.
    """
    validate_trimloss(t)
    lp = LpProblem()
    n, nf = t.n_patterns, t.n_finals
    bounds = t.implied_bounds
    x = [
        [lp.add_var(f"x_{i}_{j}", 0.0, float(bounds[j])) for j in range(nf)]
        for i in range(n)
    ]
    for i in range(n):
        lp.add_var(f"y_{i}", 0.0, obj=1.0)
    for j in range(nf):
        lp.add_row({x[i][j]: 1.0 for i in range(n)}, ">=", 1.0)
    for i in range(n):
        lp.add_row({x[i][j]: t.lengths[j] for j in range(nf)}, "<=", t.L)
    return lp


def _trimloss_rows(t: TrimLossInstance) -> list[_RowSpec]:
    n, nf = t.n_patterns, t.n_finals
    bounds = t.implied_bounds
    rows = []
    for j in range(nf):
        x_ids = tuple(i * nf + j for i in range(n))
        y_ids = tuple(n * nf + i for i in range(n))
        rows.append(_RowSpec(t.demands[j], (bounds[j],) * n, x_ids, y_ids))
    return rows


def _build_generic_lp(inst: Instance, obj: LinearObjective) -> tuple[LpProblem, _RowSpec]:
    lp = LpProblem()
    x_ids, y_ids = [], []
    for i in range(inst.n):
        ub = float(inst.u[i]) if inst.u is not None else float("inf")
        x_ids.append(lp.add_var(f"x_{i}", 0.0, ub, obj=obj.c[i]))
    for i in range(inst.n):
        y_ids.append(lp.add_var(f"y_{i}", 0.0, obj=obj.d[i]))
    lp.add_row({j: 1.0 for j in x_ids}, ">=", 1.0)
    return lp, _RowSpec(inst.r, inst.u, tuple(x_ids), tuple(y_ids))


def _clamped_point(sol_x, spec: _RowSpec) -> Point:
    xs = []
    for k, j in enumerate(spec.x_ids):
        v = max(sol_x[j], 0.0)
        if spec.u is not None:
            v = min(v, float(spec.u[k]))
        xs.append(v)
    ys = [max(sol_x[j], 0.0) for j in spec.y_ids]
    return Point(tuple(xs), tuple(ys))


def run_cutting_plane(
    instance: TrimLossInstance | Instance,
    family: CutFamily,
    objective: LinearObjective | None = None,
    max_iters: int = MAX_ITERS,
    gamma: int = 1,
    eps_cut: float = EPS_CUT,
) -> IterationLog:
    """Run the cut loop until no violated cut is found or ``max_iters`` LP solves.

    For trim-loss instances each demand row is a covering row with r = d_j
    and implied bounds floor(L/l_j); for a generic row the root relaxation
    is sum(x) >= 1 plus the box. The LP point restricted to a row is handed
    to the separator of the selected family, and a cut is appended only when
    its realized violation exceeds ``eps_cut`` and it was not added before.
    """
    if isinstance(instance, TrimLossInstance):
        validate_trimloss(instance)
        lp = build_root_relaxation(instance)
        rows = _trimloss_rows(instance)
    else:
        validate_instance(instance)
        if objective is None:
            raise ValidationError("generic instances need a linear objective")
        if objective.n != instance.n:
            raise ValidationError("objective dimension mismatch")
        inst_unit, dmap = apply_delta_transform(instance)
        obj_unit = dmap.scale_objective(objective)
        if any(d < 0 for d in obj_unit.d):
            raise ValidationError("negative y cost makes the relaxation unbounded")
        if inst_unit.u is None and any(c < 0 for c in obj_unit.c):
            raise ValidationError("negative x cost without bounds makes the relaxation unbounded")
        lp, spec = _build_generic_lp(inst_unit, obj_unit)
        rows = [spec]
    if family is CutFamily.BOUNDED and any(row.u is None for row in rows):
        raise ValidationError("the bounded cut family requires bounds on every integer variable")
    if max_iters < 1:
        raise ValidationError("max_iters must be at least 1")

    solver = SimplexSolver(lp)
    seen: list[set[tuple[int, ...]]] = [set() for _ in rows]
    log = IterationLog()
    cuts_total = 0
    prev_lb: float | None = None
    for it in range(1, max_iters + 1):
        t0 = time.perf_counter()
        sol = solver.solve()
        if sol.status is not LpStatus.OPTIMAL:
            raise NumericalError(
                f"LP solve failed at iteration {it}: status {sol.status.value}"
            )
        lb = sol.value
        if prev_lb is not None and lb < prev_lb - 1e-9 * max(1.0, abs(prev_lb)):
            raise NumericalError(
                f"lower bound decreased at iteration {it}: {prev_lb} -> {lb}"
            )
        prev_lb = lb

        cuts_this = 0
        for spec, seen_row in zip(rows, seen):
            point = _clamped_point(sol.x, spec)
            if family is CutFamily.BOUNDED:
                row_inst = Instance(len(spec.x_ids), spec.r, spec.u)
                res = separate_bounded(point, row_inst)
            else:
                row_inst = Instance(len(spec.x_ids), spec.r, None)
                res = separate_unbounded(point, row_inst, gamma=gamma)
                # the least-index choice for deferred columns can be violated
                # by a sliver only; larger gamma still yields a valid cut of
                # the family, so escalate until the violation is usable
                extra = gamma
                while (
                    not res.feasible
                    and res.violation > eps_cut
                    and 1.0 - res.cut.value(point) <= eps_cut
                    and extra < 1 << 24
                ):
                    extra *= 2
                    res = separate_unbounded(point, row_inst, gamma=extra)
            if res.feasible:
                continue
            cut = res.cut
            if 1.0 - cut.value(point) <= eps_cut:
                continue
            if cut.w in seen_row:
                continue
            seen_row.add(cut.w)
            coeffs: dict[int, float] = {}
            for k, a in enumerate(cut.alpha):
                if a != 0.0:
                    coeffs[spec.x_ids[k]] = a
            for k, b in enumerate(cut.beta):
                if b != 0.0:
                    coeffs[spec.y_ids[k]] = coeffs.get(spec.y_ids[k], 0.0) + b
            solver.add_row(coeffs, ">=", 1.0)
            cuts_this += 1
        cuts_total += cuts_this
        ms = (time.perf_counter() - t0) * 1000.0
        log.records.append(IterationRecord(it, lb, cuts_this, cuts_total, ms))
        if cuts_this == 0:
            log.terminated = True
            break
    return log
