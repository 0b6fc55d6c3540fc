"""Deterministic multistart local solver for the polygon programs.

The y variables are eliminated against the circle equalities
(y_i = +sqrt(1 - x_i^2)), leaving a smooth nonconvex problem over the x
box.  Each start runs an augmented-Lagrangian outer loop whose inner
subproblem (bound-constrained, smooth) goes to a quasi-Newton minimizer
(L-BFGS-B).  A Newton polish on the active-constraint system then pushes
the violation to roundoff.  Starts are independent and the best-result
fold is order-free, so running them in parallel cannot change the answer.

Seed 0 is the structural seed: x values follow the sine pattern of a
regular configuration, sin(pi * rank / n), where rank orders the variable
roles (x1 first, the chain pairs after).  Remaining seeds perturb it with
counter-based Philox noise keyed on (rng_seed, n), so identical inputs
give identical seeds on every platform.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, nnls

from .formulation import (
    Assignment,
    QuadraticProgram,
    evaluate,
)

__all__ = [
    "SolverConfig",
    "SolveResult",
    "StartLog",
    "PolishResult",
    "InfeasibleError",
    "initial_seeds",
    "solve",
    "polish",
    "kkt_residual",
    "result_to_json",
    "result_from_json",
]

RESULT_VERSION = "maxpoly-result/1"
PERTURB_AMPLITUDE = 0.15
ACTIVE_TOL = 1e-6


class InfeasibleError(RuntimeError):
    """No start produced a feasible point; carries the best violation seen."""

    def __init__(self, best_violation: float):
        super().__init__(f"no feasible point found (best violation {best_violation:.3e})")
        self.best_violation = best_violation


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 64
    rng_seed: int = 0
    max_outer_iterations: int = 30
    feasibility_tol: float = 1e-10
    kkt_tol: float = 1e-8
    x_interior_clamp: float = 1e-12

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        for name in ("feasibility_tol", "kkt_tol", "x_interior_clamp"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class StartLog:
    start: int
    objective: float
    max_violation: float
    status: str  # "feasible" | "infeasible"


@dataclass(frozen=True)
class SolveResult:
    best: Assignment
    objective: float
    max_violation: float
    kkt_residual: float
    winning_start: int
    start_logs: tuple[StartLog, ...]
    config: SolverConfig


@dataclass(frozen=True)
class PolishResult:
    assignment: Assignment
    no_progress: bool
    max_violation: float


# -- compiled numeric form ----------------------------------------------------


class _Compiled:
    """Stacked-triplet evaluators for the x-only (eliminated-y) problem.

    Variables are the program's x variables in order; each paired y lives
    at slot nx + j.  The compiled constraint set is canonical:
    inequalities c_k(x) <= 0 and equalities h_k(x) = 0.  Circle
    equalities, y-nonnegativity and the box are satisfied by construction
    or handled as bounds.
    """

    def __init__(self, p: QuadraticProgram, clamp: float = 1e-12):
        self.program = p
        xnames = [v for v in p.variables if v.startswith("x")]
        self.nx = len(xnames)
        slot = {v: i for i, v in enumerate(xnames)}
        for i, v in enumerate(xnames):
            slot["y" + v[1:]] = self.nx + i
        self.slot = slot
        self.clamp = clamp
        self.lb = np.zeros(self.nx)
        self.ub = np.ones(self.nx) - clamp
        if xnames and xnames[0] == "x1":
            self.ub[0] = 0.5

        rows = []  # (expr, offset, sign, is_eq, tag): canonical sign*expr + offset (<=0 / ==0)
        for c in p.constraints:
            if c.kind == "less-equal-one":
                rows.append((c.expr, -1.0, 1.0, False, c.tag))
            elif c.kind == "equal-one":
                rows.append((c.expr, -1.0, 1.0, True, c.tag))
            elif c.kind == "order-cut":
                rows.append((c.expr, 0.0, -1.0, False, c.tag))
            # circle-equality, nonneg, box: satisfied by elimination / bounds
        self.tags = [r[4] for r in rows]
        self.is_eq = np.array([r[3] for r in rows], dtype=bool)
        self.n_rows = len(rows)

        qi, qa, qb, qc = [], [], [], []
        li, la, lc = [], [], []
        const = np.zeros(self.n_rows)
        for k, (expr, off, sgn, _eq, _tag) in enumerate(rows):
            const[k] = sgn * expr.const + off
            for (a, b), cf in expr.quad.items():
                qi.append(k)
                qa.append(slot[a])
                qb.append(slot[b])
                qc.append(sgn * cf)
            for v, cf in expr.lin.items():
                li.append(k)
                la.append(slot[v])
                lc.append(sgn * cf)
        self.qi = np.array(qi, dtype=np.intp)
        self.qa = np.array(qa, dtype=np.intp)
        self.qb = np.array(qb, dtype=np.intp)
        self.qc = np.array(qc)
        self.li = np.array(li, dtype=np.intp)
        self.la = np.array(la, dtype=np.intp)
        self.lc = np.array(lc)
        self.const = const

        o = p.objective
        oqa, oqb, oqc = [], [], []
        ola, olc = [], []
        for (a, b), cf in o.quad.items():
            oqa.append(slot[a])
            oqb.append(slot[b])
            oqc.append(cf)
        for v, cf in o.lin.items():
            ola.append(slot[v])
            olc.append(cf)
        self.oqa = np.array(oqa, dtype=np.intp)
        self.oqb = np.array(oqb, dtype=np.intp)
        self.oqc = np.array(oqc)
        self.ola = np.array(ola, dtype=np.intp)
        self.olc = np.array(olc)
        self.oconst = o.const

    def lift(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Full variable vector z = (x, y(x)) and dy/dx."""
        xc = np.clip(x, 0.0, 1.0 - self.clamp)
        y = np.sqrt(1.0 - xc * xc)
        return np.concatenate([xc, y]), -xc / y

    def objective(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        z, dydx = self.lift(x)
        val = self.oconst + float(self.oqc @ (z[self.oqa] * z[self.oqb])) + float(
            self.olc @ z[self.ola]
        )
        gz = np.zeros(2 * self.nx)
        np.add.at(gz, self.oqa, self.oqc * z[self.oqb])
        np.add.at(gz, self.oqb, self.oqc * z[self.oqa])
        np.add.at(gz, self.ola, self.olc)
        return val, gz[: self.nx] + gz[self.nx :] * dydx

    def constraints(self, x: np.ndarray) -> np.ndarray:
        """Canonical values: <= 0 rows and == 0 rows interleaved in order."""
        z, _ = self.lift(x)
        vals = self.const.copy()
        if len(self.qi):
            np.add.at(vals, self.qi, self.qc * z[self.qa] * z[self.qb])
        if len(self.li):
            np.add.at(vals, self.li, self.lc * z[self.la])
        return vals

    def weighted_cons_grad(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Gradient of sum_k w_k c_k(x)."""
        z, dydx = self.lift(x)
        gz = np.zeros(2 * self.nx)
        if len(self.qi):
            wq = w[self.qi] * self.qc
            np.add.at(gz, self.qa, wq * z[self.qb])
            np.add.at(gz, self.qb, wq * z[self.qa])
        if len(self.li):
            np.add.at(gz, self.la, w[self.li] * self.lc)
        return gz[: self.nx] + gz[self.nx :] * dydx

    def jacobian(self, x: np.ndarray, rows: np.ndarray) -> np.ndarray:
        out = np.zeros((len(rows), self.nx))
        for i, k in enumerate(rows):
            w = np.zeros(self.n_rows)
            w[k] = 1.0
            out[i] = self.weighted_cons_grad(x, w)
        return out

    def weighted_hessian(self, x: np.ndarray, w_obj: float, w: np.ndarray) -> np.ndarray:
        """Hessian of w_obj * objective + sum_k w_k c_k, in the x space.

        Chain rule through y = sqrt(1 - x^2): quadratic z-space curvature
        plus the diagonal y'' = -1/y^3 term weighted by the y gradient.
        """
        z, dydx = self.lift(x)
        n2 = 2 * self.nx
        hz = np.zeros((n2, n2))
        gz = np.zeros(n2)
        if len(self.oqa):
            for a, b, c in zip(self.oqa, self.oqb, self.oqc):
                hz[a, b] += w_obj * c
                hz[b, a] += w_obj * c
                gz[a] += w_obj * c * z[b]
                gz[b] += w_obj * c * z[a]
        if len(self.ola):
            for a, c in zip(self.ola, self.olc):
                gz[a] += w_obj * c
        if len(self.qi):
            for k, a, b, c in zip(self.qi, self.qa, self.qb, self.qc):
                wt = w[k]
                if wt == 0.0:
                    continue
                hz[a, b] += wt * c
                hz[b, a] += wt * c
                gz[a] += wt * c * z[b]
                gz[b] += wt * c * z[a]
        if len(self.li):
            for k, a, c in zip(self.li, self.la, self.lc):
                if w[k] != 0.0:
                    gz[a] += w[k] * c
        nx = self.nx
        hx = (
            hz[:nx, :nx]
            + hz[:nx, nx:] * dydx[None, :]
            + dydx[:, None] * hz[nx:, :nx]
            + np.outer(dydx, dydx) * hz[nx:, nx:]
        )
        y = z[nx:]
        hx[np.diag_indices(nx)] += gz[nx:] * (-1.0 / y**3)
        return hx

    def violation(self, x: np.ndarray) -> float:
        vals = self.constraints(x)
        if not len(vals):
            return 0.0
        v = np.where(self.is_eq, np.abs(vals), np.maximum(0.0, vals))
        return float(v.max())


def _role_ranks(p: QuadraticProgram) -> list[int]:
    ranks = []
    for v in p.variables:
        if not v.startswith("x"):
            continue
        i = int(v[1:])
        ranks.append(1 if i == 1 else i // 2 + 1)
    return ranks


def _seed_vector(n: int, ranks: list[int]) -> np.ndarray:
    base = np.array([math.sin(math.pi * r / n) for r in ranks])
    base[0] = min(base[0], 0.5)
    return base


def initial_seeds(
    n: int, count: int, rng_seed: int = 0, symmetric: bool = False
) -> list[Assignment]:
    """Deterministic start points: structural seed plus Philox perturbations."""
    if count < 1:
        raise ValueError("count must be >= 1")
    from .formulation import build_program

    p = build_program(n, symmetric=symmetric)
    ranks = _role_ranks(p)
    base = _seed_vector(n, ranks)
    ub = np.ones(len(base))
    ub[0] = 0.5
    seeds = [Assignment(tuple(base))]
    for s in range(1, count):
        gen = np.random.Generator(
            np.random.Philox(
                key=[np.uint64(rng_seed), np.uint64(2 * n + int(symmetric))],
                counter=[0, 0, 0, np.uint64(s)],
            )
        )
        x = base + gen.uniform(-PERTURB_AMPLITUDE, PERTURB_AMPLITUDE, len(base))
        seeds.append(Assignment(tuple(np.clip(x, 0.0, ub))))
    return seeds


def _solve_one_start(comp: _Compiled, x0: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Augmented-Lagrangian outer loop with an L-BFGS-B inner minimizer."""
    x = np.clip(x0, comp.lb, comp.ub)
    lam = np.zeros(comp.n_rows)  # eq rows use lam, ineq rows use its clipped image
    rho = 10.0
    bounds = list(zip(comp.lb, comp.ub))
    prev_viol = math.inf
    for _outer in range(cfg.max_outer_iterations):

        def al(xv: np.ndarray) -> tuple[float, np.ndarray]:
            f, fg = comp.objective(xv)
            f, fg = -f, -fg  # maximize
            c = comp.constraints(xv)
            # equality rows always contribute; inequality rows only while
            # lam + rho*c stays positive (standard clipped multiplier form)
            act = comp.is_eq | (lam + rho * c > 0.0)
            val = f + float(lam[act] @ c[act]) + 0.5 * rho * float(c[act] @ c[act])
            grad = fg + comp.weighted_cons_grad(xv, np.where(act, lam + rho * c, 0.0))
            return val, grad

        res = minimize(
            al,
            x,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": 500, "ftol": 1e-18, "gtol": 1e-12},
        )
        x = res.x
        c = comp.constraints(x)
        lam = np.where(comp.is_eq, lam + rho * c, np.maximum(0.0, lam + rho * c))
        viol = comp.violation(x)
        if viol <= 1e-11:
            break
        if viol > 0.25 * prev_viol:
            rho = min(rho * 10.0, 1e10)
        prev_viol = viol
    return x


def _polish_arrays(comp: _Compiled, x0: np.ndarray, act_tol: float = 1e-7):
    """Primal-dual Newton on the active-set KKT system.

    Solves [grad_f + J_act^T lam; c_act] = 0 with least-squares steps
    (tolerates the rank-deficient multipliers of symmetric optima).
    Active bounds enter as pinning rows.  Returns (x, violation) on
    success, (None, start violation) when nothing improved.
    """
    x = x0.copy()
    start_viol = comp.violation(x)
    nx = comp.nx

    vals = comp.constraints(x)
    rows = np.flatnonzero(comp.is_eq | (vals >= -act_tol))
    bnd_lo = np.flatnonzero(x <= comp.lb + 1e-9)
    bnd_hi = np.flatnonzero(x >= comp.ub - 1e-9)

    def system(xv, lam):
        _f, fg = comp.objective(xv)
        grad_f = -fg  # minimizing the negated area
        jac_rows = comp.jacobian(xv, rows) if len(rows) else np.zeros((0, nx))
        pins = []
        pin_res = []
        for j in bnd_lo:
            e = np.zeros(nx)
            e[j] = 1.0
            pins.append(e)
            pin_res.append(xv[j] - comp.lb[j])
        for j in bnd_hi:
            e = np.zeros(nx)
            e[j] = 1.0
            pins.append(e)
            pin_res.append(xv[j] - (0.5 if (j == 0 and comp.ub[0] == 0.5) else 1.0))
        jac = np.vstack([jac_rows] + [np.array(pins)]) if pins else jac_rows
        res_c = comp.constraints(xv)[rows] if len(rows) else np.zeros(0)
        res_c = np.concatenate([res_c, np.array(pin_res)]) if pins else res_c
        stat = grad_f + (jac.T @ lam if jac.size else 0.0)
        return stat, res_c, jac

    n_mult = len(rows) + len(bnd_lo) + len(bnd_hi)
    if n_mult == 0:
        return (x, start_viol) if start_viol <= 1e-12 else (None, start_viol)
    # least-squares multiplier start
    _f, fg = comp.objective(x)
    jac0 = system(x, np.zeros(n_mult))[2]
    lam, *_ = np.linalg.lstsq(jac0.T, fg, rcond=None)  # grad_f = -fg
    best = None
    for _ in range(40):
        stat, res_c, jac = system(x, lam)
        fnorm = max(
            float(np.abs(stat).max()) if stat.size else 0.0,
            float(np.abs(res_c).max()) if res_c.size else 0.0,
        )
        if best is None or fnorm < best[0]:
            best = (fnorm, x.copy(), lam.copy())
        if fnorm <= 1e-13:
            break
        w = np.zeros(comp.n_rows)
        for i, k in enumerate(rows):
            w[k] = lam[i]
        hess = comp.weighted_hessian(x, -1.0, w)
        kkt = np.block(
            [[hess, jac.T], [jac, np.zeros((jac.shape[0], jac.shape[0]))]]
        )
        rhs = -np.concatenate([stat, res_c])
        step, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        dx, dlam = step[:nx], step[nx:]
        norm = float(np.abs(dx).max()) if dx.size else 0.0
        if norm > 0.05:
            dx = dx * (0.05 / norm)
            dlam = dlam * (0.05 / norm)
        x = np.clip(x + dx, comp.lb, comp.ub)
        lam = lam + dlam
    else:
        x = best[1]
    if best is not None and comp.violation(best[1]) < comp.violation(x):
        x = best[1]
    end_viol = comp.violation(x)
    if end_viol <= 1e-12 or end_viol < start_viol:
        return x, end_viol
    return None, start_viol


def _assignment_from_x(comp: _Compiled, x: np.ndarray) -> Assignment:
    ub = np.ones(comp.nx)
    ub[0] = comp.ub[0] if comp.ub[0] == 0.5 else 1.0
    return Assignment(tuple(np.clip(x, 0.0, ub)))


def solve(p: QuadraticProgram, cfg: SolverConfig | None = None) -> SolveResult:
    """Best feasible local maximum over all starts.

    Ties on the objective break toward the lowest start index, and starts
    are folded in index order, so the result does not depend on execution
    order.  Raises InfeasibleError when no start reaches feasibility.
    """
    cfg = cfg or SolverConfig()
    comp = _Compiled(p, clamp=cfg.x_interior_clamp)
    seeds = initial_seeds(p.n, cfg.starts, cfg.rng_seed, symmetric=p.symmetric)

    def run(start: int) -> tuple[int, Assignment, float, float]:
        x0 = np.array(seeds[start].x)
        x = _solve_one_start(comp, x0, cfg)
        polished, _viol = _polish_arrays(comp, x)
        if polished is not None:
            x = polished
        a = _assignment_from_x(comp, x)
        rep = evaluate(p, a)
        return start, a, rep.objective, rep.max_violation

    workers = int(os.environ.get("MAXPOLY_THREADS", "1") or "1")
    workers = max(1, min(workers, cfg.starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(cfg.starts)))
    else:
        outcomes = [run(s) for s in range(cfg.starts)]

    logs = []
    best = None
    for start, a, obj, viol in outcomes:  # index order: deterministic fold
        ok = viol <= cfg.feasibility_tol
        logs.append(
            StartLog(start, obj, viol, "feasible" if ok else "infeasible")
        )
        if ok and (best is None or obj > best[2]):
            best = (start, a, obj, viol)
    if best is None:
        raise InfeasibleError(min(log.max_violation for log in logs))
    start, a, obj, viol = best
    # a loose feasibility_tol can admit points outside the KKT routine's
    # own feasibility precondition; report inf rather than raising
    kkt = kkt_residual(p, a) if viol <= ACTIVE_TOL else math.inf
    return SolveResult(
        best=a,
        objective=obj,
        max_violation=viol,
        kkt_residual=kkt,
        winning_start=start,
        start_logs=tuple(logs),
        config=cfg,
    )


def polish(p: QuadraticProgram, a: Assignment) -> PolishResult:
    """Newton refinement on the active constraints of a near-feasible point.

    Returns the input unchanged with `no_progress` set when the point is
    not near-feasible (violation > 1e-4) or the iteration cannot reduce
    the violation (singular or stalled active-set system).
    """
    comp = _Compiled(p)
    rep = evaluate(p, a)
    if rep.max_violation > 1e-4:
        return PolishResult(a, True, rep.max_violation)
    x0 = np.array(a.x)
    polished, viol = _polish_arrays(comp, x0)
    if polished is None:
        return PolishResult(a, True, rep.max_violation)
    out = _assignment_from_x(comp, polished)
    out_rep = evaluate(p, out)
    if out_rep.max_violation > 1e-12 and out_rep.max_violation >= rep.max_violation:
        return PolishResult(a, True, rep.max_violation)
    return PolishResult(out, False, out_rep.max_violation)


def kkt_residual(p: QuadraticProgram, a: Assignment, act_tol: float = ACTIVE_TOL) -> float:
    """Infinity norm of the Lagrangian gradient after a least-squares fit.

    Multipliers for active inequalities and bounds are constrained
    nonnegative (NNLS); the closing-edge equality multiplier is free.
    With nothing active this is just the objective-gradient norm.
    """
    rep = evaluate(p, a)
    if rep.max_violation > 1e-6:
        raise ValueError(f"point infeasible (violation {rep.max_violation:.3e})")
    comp = _Compiled(p)
    x = np.array(a.x)
    _f, fg = comp.objective(x)
    grad_f = -fg  # minimize -objective
    cols = []
    vals = comp.constraints(x)
    active_rows = [
        k
        for k in range(comp.n_rows)
        if comp.is_eq[k] or vals[k] >= -act_tol
    ]
    if active_rows:
        jac = comp.jacobian(x, np.array(active_rows))
        for i, k in enumerate(active_rows):
            if comp.is_eq[k]:
                cols.append(jac[i])
                cols.append(-jac[i])
            else:
                cols.append(jac[i])
    for j in range(comp.nx):
        if x[j] <= comp.lb[j] + 1e-9:
            e = np.zeros(comp.nx)
            e[j] = -1.0
            cols.append(e)
        hi = 0.5 if (j == 0 and comp.ub[0] == 0.5) else 1.0
        if x[j] >= hi - 1e-9:
            e = np.zeros(comp.nx)
            e[j] = 1.0
            cols.append(e)
    if not cols:
        return float(np.abs(grad_f).max())
    amat = np.column_stack(cols)
    sol, _ = nnls(amat, -grad_f)
    return float(np.abs(amat @ sol + grad_f).max())


# -- result JSON --------------------------------------------------------------


def result_to_json(p: QuadraticProgram, r: SolveResult) -> str:
    doc = {
        "version": RESULT_VERSION,
        "n": p.n,
        "symmetric": p.symmetric,
        "objective": r.objective,
        "x": list(r.best.x),
        "max_violation": r.max_violation,
        "kkt_residual": r.kkt_residual,
        "winning_start": r.winning_start,
        "config": {
            "starts": r.config.starts,
            "rng_seed": r.config.rng_seed,
            "max_outer_iterations": r.config.max_outer_iterations,
            "feasibility_tol": r.config.feasibility_tol,
            "kkt_tol": r.config.kkt_tol,
            "x_interior_clamp": r.config.x_interior_clamp,
        },
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def result_from_json(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("version") != RESULT_VERSION:
        raise ValueError(f"unsupported result version: {doc.get('version')!r}")
    for key in ("n", "symmetric", "objective", "x"):
        if key not in doc:
            raise ValueError(f"result JSON missing field {key!r}")
    return doc
