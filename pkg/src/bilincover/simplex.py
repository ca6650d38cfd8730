"""Self-contained bounded-variable simplex over a dense tableau.

Scope is deliberately small: the LPs here have at most a few thousand rows
(root relaxation plus accumulated cuts), so a dense float64 tableau with
full pricing is simple, deterministic, and fast enough. Features:

* primal simplex with a two-phase start (artificial variables),
* dual simplex for warm restarts after rows are appended,
* bound flips for nonbasic variables with two finite bounds,
* Bland's rule engaged after a run of degenerate pivots,
* a weak-duality certificate plus primal residual check on every optimal
  solve, with bounded rebuild-and-retry before reporting failure.

Variables require a finite lower bound (upper may be infinite), which covers
every LP this package builds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import ValidationError

FEAS_TOL = 1e-7
PIV_TOL = 1e-9
PRICE_TOL = 1e-9

AT_LO, AT_UP, BASIC = 0, 1, 2
SENSES = ("<=", ">=", "=")


class NumericalError(RuntimeError):
    """The solver could not produce a trustworthy result."""


class _PivotBreakdown(Exception):
    """Internal: the current factorization is numerically unusable."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL = "numerical"


class LpProblem:
    """A minimization LP built incrementally from variables and rows."""

    def __init__(self):
        self.obj: list[float] = []
        self.lo: list[float] = []
        self.up: list[float] = []
        self.names: list[str] = []
        self.rows: list[tuple[dict[int, float], str, float]] = []

    @property
    def num_vars(self) -> int:
        return len(self.obj)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_var(
        self,
        name: str | None = None,
        lb: float = 0.0,
        ub: float = math.inf,
        obj: float = 0.0,
    ) -> int:
        j = len(self.obj)
        self.obj.append(float(obj))
        self.lo.append(float(lb))
        self.up.append(float(ub))
        self.names.append(name if name is not None else f"v{j}")
        return j

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> int:
        if sense not in SENSES:
            raise ValidationError(f"unknown row sense {sense!r}")
        row = {int(j): float(v) for j, v in sorted(coeffs.items()) if float(v) != 0.0}
        self.rows.append((row, sense, float(rhs)))
        return len(self.rows) - 1

    def validate(self) -> "LpProblem":
        if self.num_vars < 1:
            raise ValidationError("LP needs at least one variable")
        for j in range(self.num_vars):
            if not math.isfinite(self.obj[j]):
                raise ValidationError(f"objective coefficient {j} must be finite")
            if not math.isfinite(self.lo[j]):
                raise ValidationError(f"variable {j} needs a finite lower bound")
            if self.up[j] < self.lo[j]:
                raise ValidationError(f"variable {j} has an empty bound interval")
        for i, (row, _sense, rhs) in enumerate(self.rows):
            if not math.isfinite(rhs):
                raise ValidationError(f"row {i} rhs must be finite")
            for j, v in row.items():
                if not 0 <= j < self.num_vars:
                    raise ValidationError(f"row {i} references unknown variable {j}")
                if not math.isfinite(v):
                    raise ValidationError(f"row {i} coefficient on {j} must be finite")
        return self


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    value: float | None
    x: tuple[float, ...]
    duals: tuple[float, ...]
    iterations: int
    names: tuple[str, ...] = ()

    @property
    def primal(self) -> dict[str, float]:
        return dict(zip(self.names, self.x))


@dataclass
class _Row:
    idx: np.ndarray  # structural column indices
    coef: np.ndarray
    sense: str
    rhs: float
    logical: int
    sigma: float
    artificial: int | None = None
    art_sigma: float = 1.0


class SimplexSolver:
    """One mutable solver per LP; rows may be appended between solves."""

    def __init__(self, problem: LpProblem, feas_tol: float = FEAS_TOL, piv_tol: float = PIV_TOL):
        problem.validate()
        self.feas_tol = feas_tol
        self.piv_tol = piv_tol
        self.ns = problem.num_vars
        self.names = tuple(problem.names)

        cap_n = max(16, 2 * (self.ns + problem.num_rows) + 8)
        cap_m = max(8, 2 * problem.num_rows + 8)
        self.lo = np.full(cap_n, 0.0)
        self.up = np.full(cap_n, np.inf)
        self.cost = np.zeros(cap_n)
        self.lo[: self.ns] = problem.lo
        self.up[: self.ns] = problem.up
        self.cost[: self.ns] = problem.obj
        self.nc = self.ns

        self.T = np.zeros((cap_m, cap_n))
        self.beta = np.zeros(cap_m)
        self.basis = np.zeros(cap_m, dtype=np.int64)
        self.vstat = np.full(cap_n, AT_LO, dtype=np.int8)
        self.xval = self.lo.copy()
        self.z = np.zeros(cap_n)
        self.m = 0

        self.rows_data: list[_Row] = []
        self._art_cols: list[int] = []
        self._pending: list[tuple[dict[int, float], str, float]] = list(problem.rows)
        self._struct_cols: list[int] = list(range(self.ns))
        self._built = False
        self._dirty = True
        self._rows_added = False
        self.pivots = 0
        self._degen_streak = 0
        self._bland = False
        self._phase_cost = self.cost
        self._cached: LpSolution | None = None

    # ---------------------------------------------------------------- state

    def _grow(self, m_need: int, n_need: int) -> None:
        cap_m, cap_n = self.T.shape
        new_m, new_n = cap_m, cap_n
        while new_m < m_need:
            new_m *= 2
        while new_n < n_need:
            new_n *= 2
        if new_m == cap_m and new_n == cap_n:
            return
        T = np.zeros((new_m, new_n))
        T[:cap_m, :cap_n] = self.T
        self.T = T
        for name, fill in (("lo", 0.0), ("up", np.inf), ("cost", 0.0), ("xval", 0.0), ("z", 0.0)):
            arr = np.full(new_n, fill)
            arr[:cap_n] = getattr(self, name)
            setattr(self, name, arr)
        vstat = np.full(new_n, AT_LO, dtype=np.int8)
        vstat[:cap_n] = self.vstat
        self.vstat = vstat
        beta = np.zeros(new_m)
        beta[:cap_m] = self.beta
        self.beta = beta
        basis = np.zeros(new_m, dtype=np.int64)
        basis[:cap_m] = self.basis
        self.basis = basis
        self._phase_cost = self.cost

    def _new_col(self, lb: float, ub: float, cost: float = 0.0) -> int:
        self._grow(self.m + 1, self.nc + 1)
        j = self.nc
        self.lo[j] = lb
        self.up[j] = ub
        self.cost[j] = cost
        self.xval[j] = lb
        self.vstat[j] = AT_LO
        self.z[j] = 0.0
        self.T[: self.m, j] = 0.0
        self.nc += 1
        return j

    def _values(self) -> np.ndarray:
        v = self.xval[: self.nc].copy()
        if self.m:
            v[self.basis[: self.m]] = self.beta[: self.m]
        return v

    def _logical_for(self, sense: str) -> tuple[int, float]:
        if sense == "<=":
            return self._new_col(0.0, np.inf), 1.0
        if sense == ">=":
            return self._new_col(0.0, np.inf), -1.0
        return self._new_col(0.0, 0.0), 1.0  # "=" rows carry a fixed logical

    @staticmethod
    def _row_arrays(coeffs: dict[int, float]) -> tuple[np.ndarray, np.ndarray]:
        items = sorted(coeffs.items())
        idx = np.array([j for j, _ in items], dtype=np.int64)
        coef = np.array([v for _, v in items], dtype=np.float64)
        return idx, coef

    # ---------------------------------------------------------------- build

    def _build(self) -> None:
        rows = self._pending
        self._pending = []
        self._grow(len(rows) + 1, self.nc + 2 * len(rows) + 2)
        for coeffs, sense, rhs in rows:
            jl, sigma = self._logical_for(sense)
            idx, coef = self._row_arrays(coeffs)
            rho = rhs - (float(coef @ self.xval[idx]) if len(idx) else 0.0)

            slack_ok = (
                (sense == "<=" and rho >= 0.0)
                or (sense == ">=" and rho <= 0.0)
                or (sense == "=" and rho == 0.0)
            )
            art: int | None = None
            if slack_ok:
                bcol, bsig = jl, sigma
            else:
                bsig = 1.0 if rho >= 0.0 else -1.0
                bcol = self._new_col(0.0, np.inf, 0.0)
                art = bcol
                self._art_cols.append(bcol)

            i = self.m
            self._grow(i + 1, self.nc)
            self.T[i, : self.nc] = 0.0
            self.T[i, idx] = coef
            self.T[i, jl] = sigma
            if art is not None:
                self.T[i, art] = bsig
            if bsig != 1.0:
                self.T[i, : self.nc] /= bsig
            self.beta[i] = rho / bsig
            self.basis[i] = bcol
            self.vstat[bcol] = BASIC
            self.m += 1
            self.rows_data.append(_Row(idx, coef, sense, rhs, jl, sigma, art, bsig))
        self._built = True

    # ------------------------------------------------------------- pivoting

    def _recompute_z(self) -> None:
        m, nc = self.m, self.nc
        z = self._phase_cost[:nc].copy()
        if m:
            cb = self._phase_cost[self.basis[:m]]
            nz = np.flatnonzero(cb)
            if nz.size:
                z -= self.T[nz, :nc].T @ cb[nz]
            z[self.basis[:m]] = 0.0
        self.z[:nc] = z

    def _eliminate(self, r: int, e: int) -> None:
        m, nc = self.m, self.nc
        piv = self.T[r, e]
        if not np.isfinite(piv) or abs(piv) < self.piv_tol:
            raise _PivotBreakdown
        trow = self.T[r, :nc] / piv
        col = self.T[:m, e].copy()
        col[r] = 0.0
        self.T[:m, :nc] -= np.outer(col, trow)
        self.T[r, :nc] = trow
        self.T[:m, e] = 0.0
        self.T[r, e] = 1.0
        ze = self.z[e]
        if ze != 0.0:
            self.z[:nc] -= ze * trow
        self.z[e] = 0.0
        self.pivots += 1

    def _note_step(self, t: float) -> None:
        if t <= 1e-12:
            self._degen_streak += 1
            if self._degen_streak > 3 * (self.m + self.nc):
                self._bland = True
        else:
            self._degen_streak = 0
            self._bland = False

    def _pivot(self, r: int, e: int, dirn: float, t: float, leave_to: int | None = None) -> None:
        m = self.m
        g = dirn * self.T[:m, e]
        leaving = int(self.basis[r])
        enter_val = self.xval[e] + dirn * t
        self.beta[:m] -= t * g
        # primal steps: the basic in row r hits its lower bound when it was
        # decreasing (g > 0); dual steps pass the violated bound explicitly
        if leave_to is None:
            leave_to = AT_LO if g[r] > 0 else AT_UP
        self.vstat[leaving] = leave_to
        self.xval[leaving] = self.lo[leaving] if leave_to == AT_LO else self.up[leaving]
        self.basis[r] = e
        self.vstat[e] = BASIC
        self.beta[r] = enter_val
        self._eliminate(r, e)
        self._note_step(t)

    def _iter_guard(self) -> int:
        return 20_000 + 40 * (self.m + self.nc)

    def _nonfixed(self) -> np.ndarray:
        return self.up[: self.nc] - self.lo[: self.nc] > 0.0

    def _primal(self) -> str:
        guard = self._iter_guard()
        for _ in range(guard):
            m, nc = self.m, self.nc
            z = self.z[:nc]
            vstat = self.vstat[:nc]
            elig = self._nonfixed() & (
                ((vstat == AT_LO) & (z < -PRICE_TOL))
                | ((vstat == AT_UP) & (z > PRICE_TOL))
            )
            idx = np.flatnonzero(elig)
            if idx.size == 0:
                return "optimal"
            if self._bland:
                e = int(idx[0])
            else:
                e = int(idx[np.argmax(np.abs(z[idx]))])
            dirn = 1.0 if self.vstat[e] == AT_LO else -1.0
            g = dirn * self.T[:m, e]

            flip_t = self.up[e] - self.lo[e]
            b = self.basis[:m]
            ratios = np.full(m, np.inf)
            pos = g > self.piv_tol
            if np.any(pos):
                ratios[pos] = np.maximum(self.beta[:m][pos] - self.lo[b[pos]], 0.0) / g[pos]
            neg = g < -self.piv_tol
            if np.any(neg):
                cap = self.up[b[neg]] - self.beta[:m][neg]
                ratios[neg] = np.where(
                    np.isfinite(cap), np.maximum(cap, 0.0) / -g[neg], np.inf
                )
            row_t = float(ratios.min()) if m else math.inf
            if not np.isfinite(row_t) and not np.isfinite(flip_t):
                return "unbounded"
            if flip_t < row_t:
                self.beta[:m] -= flip_t * g
                self.vstat[e] = AT_UP if dirn > 0 else AT_LO
                self.xval[e] = self.up[e] if dirn > 0 else self.lo[e]
                self.pivots += 1
                self._note_step(flip_t)
                continue
            cands = np.flatnonzero(ratios <= row_t + 1e-12)
            if self._bland:
                r = int(cands[np.argmin(b[cands])])
            else:
                r = int(cands[np.argmax(np.abs(g[cands]))])
            self._pivot(r, e, dirn, max(float(ratios[r]), 0.0))
        raise _PivotBreakdown

    def _dual(self) -> str:
        guard = self._iter_guard()
        for _ in range(guard):
            m, nc = self.m, self.nc
            if m == 0:
                return "optimal"
            b = self.basis[:m]
            below = self.lo[b] - self.beta[:m]
            above = self.beta[:m] - self.up[b]
            above = np.where(np.isfinite(above), above, -np.inf)
            viol = np.maximum(below, above)
            if float(viol.max()) <= self.feas_tol:
                return "optimal"
            if self._bland:
                rows = np.flatnonzero(viol > self.feas_tol)
                r = int(rows[np.argmin(b[rows])])
            else:
                r = int(np.argmax(viol))
            too_low = below[r] > self.feas_tol
            target = self.lo[b[r]] if too_low else self.up[b[r]]

            row = self.T[r, :nc]
            vstat = self.vstat[:nc]
            nonfixed = self._nonfixed()
            if too_low:
                elig = nonfixed & (
                    ((vstat == AT_LO) & (row < -self.piv_tol))
                    | ((vstat == AT_UP) & (row > self.piv_tol))
                )
            else:
                elig = nonfixed & (
                    ((vstat == AT_LO) & (row > self.piv_tol))
                    | ((vstat == AT_UP) & (row < -self.piv_tol))
                )
            idx = np.flatnonzero(elig)
            if idx.size == 0:
                return "infeasible"
            ratios = np.abs(self.z[idx] / row[idx])
            best = float(ratios.min())
            cands = idx[ratios <= best + 1e-12]
            if self._bland:
                e = int(cands[0])
            else:
                e = int(cands[np.argmax(np.abs(row[cands]))])

            dirn = 1.0 if self.vstat[e] == AT_LO else -1.0
            t = (float(self.beta[r]) - target) / (dirn * float(self.T[r, e]))
            self._pivot(r, int(e), dirn, max(t, 0.0), AT_LO if too_low else AT_UP)
        raise _PivotBreakdown

    # -------------------------------------------------------------- phase 1

    def _rhs_scale(self) -> float:
        return max([1.0] + [abs(row.rhs) for row in self.rows_data])

    def _phase1(self) -> str:
        cost1 = np.zeros_like(self.cost)
        cost1[self._art_cols] = 1.0
        self._phase_cost = cost1
        self._recompute_z()
        status = self._primal()
        arts = np.array(self._art_cols, dtype=np.int64)
        infeas = float(self._values()[arts].sum())
        self._phase_cost = self.cost
        if status != "optimal":
            raise _PivotBreakdown  # phase-1 objective is bounded below by 0
        if infeas > self.feas_tol * self._rhs_scale():
            return "infeasible"
        self._drive_out_artificials()
        for j in self._art_cols:
            self.lo[j] = 0.0
            self.up[j] = 0.0
            if self.vstat[j] != BASIC:
                self.vstat[j] = AT_LO
                self.xval[j] = 0.0
        return "feasible"

    def _drive_out_artificials(self) -> None:
        art = set(self._art_cols)
        for r in range(self.m):
            leaving = int(self.basis[r])
            if leaving not in art:
                continue
            row = self.T[r, : self.nc]
            cand = [
                int(j)
                for j in np.flatnonzero(np.abs(row) > self.piv_tol)
                if int(j) not in art and self.vstat[j] != BASIC
            ]
            if not cand:
                continue  # redundant row; fixed artificial stays basic at 0
            e = max(cand, key=lambda j: abs(row[j]))
            self.vstat[leaving] = AT_LO
            self.xval[leaving] = 0.0
            self.basis[r] = e
            self.vstat[e] = BASIC
            self.beta[r] = self.xval[e]
            self._eliminate(r, e)

    # ------------------------------------------------------------- solving

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        if sense not in SENSES:
            raise ValidationError(f"unknown row sense {sense!r}")
        clean = {int(j): float(v) for j, v in sorted(coeffs.items()) if float(v) != 0.0}
        struct = set(self._struct_cols)
        for j in clean:
            if j not in struct:
                raise ValidationError(f"row references unknown variable {j}")
        if not self._built:
            self._pending.append((clean, sense, float(rhs)))
        else:
            self._install_row_live(clean, sense, float(rhs))
        self._dirty = True
        self._rows_added = True
        self._cached = None

    def add_var(
        self,
        name: str | None = None,
        lb: float = 0.0,
        ub: float = math.inf,
        obj: float = 0.0,
        column: dict[int, float] | None = None,
    ) -> int:
        """Append a structural variable, optionally with row coefficients.

        ``column`` maps existing row indices to coefficients. The variable
        enters nonbasic at its lower bound, so the current basis stays valid
        and the next solve continues with primal pricing. Returns the solver
        column index for use in later ``add_row`` calls.
        """
        if not math.isfinite(lb):
            raise ValidationError("variables need a finite lower bound")
        if ub < lb:
            raise ValidationError("empty bound interval")
        column = {int(i): float(v) for i, v in sorted((column or {}).items()) if v != 0.0}
        for i in column:
            if not 0 <= i < self.m + sum(1 for _ in self._pending):
                raise ValidationError(f"column references unknown row {i}")
        if not self._built:
            raise ValidationError("add_var on a live solver requires a built tableau")
        j = self._new_col(lb, ub, float(obj))
        self.names = self.names + (name if name is not None else f"v{j}",)
        self._struct_cols.append(j)
        if column:
            # tableau column = B^{-1} a; columns of B^{-1} are the logical
            # tableau columns divided by their sign
            tcol = np.zeros(self.m)
            for i, v in column.items():
                row = self.rows_data[i]
                tcol += (v / row.sigma) * self.T[: self.m, row.logical]
                row.idx = np.append(row.idx, j)
                row.coef = np.append(row.coef, v)
            self.T[: self.m, j] = tcol
        cb = self._phase_cost[self.basis[: self.m]]
        self.z[j] = self.cost[j] - float(cb @ self.T[: self.m, j])
        self._dirty = True
        self._cached = None
        return j

    def _install_row_live(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        jl, sigma = self._logical_for(sense)
        self._grow(self.m + 1, self.nc)
        nc, m = self.nc, self.m
        idx, coef = self._row_arrays(coeffs)
        arow = np.zeros(nc)
        arow[idx] = coef
        arow[jl] = sigma
        if m:
            f = arow[self.basis[:m]]
            if np.any(f != 0.0):
                arow = arow - f @ self.T[:m, :nc]
        if sigma != 1.0:
            arow = arow / sigma
        vals = self._values()
        act = float(coef @ vals[idx]) if len(idx) else 0.0
        self.T[m, :nc] = arow
        self.T[m, jl] = 1.0
        self.beta[m] = (rhs - act) / sigma
        self.basis[m] = jl
        self.vstat[jl] = BASIC
        self.z[jl] = 0.0
        self.m += 1
        self.rows_data.append(_Row(idx, coef, sense, rhs, jl, sigma, None))

    def _dual_feasible(self) -> bool:
        nc = self.nc
        z = self.z[:nc]
        vstat = self.vstat[:nc]
        bad = self._nonfixed() & (
            ((vstat == AT_LO) & (z < -10 * self.feas_tol))
            | ((vstat == AT_UP) & (z > 10 * self.feas_tol))
        )
        return not bool(bad.any())

    def _cold_restart(self) -> str:
        rows = [
            ({int(j): float(v) for j, v in zip(row.idx, row.coef)}, row.sense, row.rhs)
            for row in self.rows_data
        ]
        self.nc = self.ns
        self.m = 0
        self.rows_data = []
        self._art_cols = []
        self.vstat[: self.nc] = AT_LO
        self.xval[: self.nc] = self.lo[: self.nc]
        self._degen_streak = 0
        self._bland = False
        self._pending = rows
        self._built = False
        return self._run()

    def _run(self) -> str:
        if not self._built:
            self._build()
            if self._art_cols:
                outcome = self._phase1()
                if outcome != "feasible":
                    return outcome
            self._phase_cost = self.cost
            self._recompute_z()
            return self._primal()
        # warm path: refresh reduced costs from the tableau so drift in the
        # incrementally maintained z row cannot mislead the dual steps
        self._phase_cost = self.cost
        self._recompute_z()
        if self._dual_feasible():
            outcome = self._dual()
            if outcome != "optimal":
                return outcome
            return self._primal()
        return self._cold_restart()

    def solve(self) -> LpSolution:
        if self._cached is not None and not self._dirty:
            return self._cached
        outcome = "numerical"
        for attempt in range(3):
            try:
                outcome = self._run()
                if outcome == "optimal" and not self._verify_optimal():
                    raise _PivotBreakdown
                break
            except _PivotBreakdown:
                if attempt == 2:
                    outcome = "numerical"
                    break
                try:
                    outcome = self._cold_restart()
                    if outcome == "optimal" and not self._verify_optimal():
                        continue
                    break
                except _PivotBreakdown:
                    continue
        self._dirty = False
        self._cached = self._finish(outcome)
        return self._cached

    # ---------------------------------------------------------- certificates

    def _dual_of_row(self, i: int) -> float:
        row = self.rows_data[i]
        return -float(self.z[row.logical]) / row.sigma

    def _verify_optimal(self) -> bool:
        vals = self._values()
        scale = self._rhs_scale()
        for row in self.rows_data:
            act = float(row.coef @ vals[row.idx]) if len(row.idx) else 0.0
            act += row.sigma * float(vals[row.logical])
            if row.artificial is not None:
                act += row.art_sigma * float(vals[row.artificial])  # 0 after phase 1
            if abs(act - row.rhs) > self.feas_tol * (1.0 + scale):
                return False
        if np.any(vals < self.lo[: self.nc] - self.feas_tol) or np.any(
            vals > self.up[: self.nc] + self.feas_tol
        ):
            return False
        primal = float(self.cost[: self.nc] @ vals)
        dual = sum(self._dual_of_row(i) * self.rows_data[i].rhs for i in range(self.m))
        nonbasic = self.vstat[: self.nc] != BASIC
        dual += float(self.z[: self.nc][nonbasic] @ self.xval[: self.nc][nonbasic])
        if abs(primal - dual) > 1e-6 * (1.0 + abs(primal)):
            return False
        return self._dual_feasible()

    def _finish(self, outcome: str) -> LpSolution:
        status = {
            "optimal": LpStatus.OPTIMAL,
            "infeasible": LpStatus.INFEASIBLE,
            "unbounded": LpStatus.UNBOUNDED,
            "numerical": LpStatus.NUMERICAL,
        }[outcome]
        if status is not LpStatus.OPTIMAL:
            return LpSolution(status, None, (), (), self.pivots, self.names)
        vals = self._values()
        x = tuple(float(v) for v in vals[: self.ns])
        value = float(self.cost[: self.nc] @ vals)
        duals = tuple(self._dual_of_row(i) for i in range(self.m))
        return LpSolution(status, value, x, duals, self.pivots, self.names)


def solve_lp(problem: LpProblem) -> LpSolution:
    """One-shot solve; deterministic for identical input."""
    return SimplexSolver(problem).solve()
