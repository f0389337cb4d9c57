"""SAT-based optimal solvers: eager full encoding and lazy refinement.

Both search the sum-of-costs axis: starting at the sum of single-item
shortest settle times, each candidate xi is tested for a solution of cost
<= xi, so the first satisfiable bound is optimal.

mdd_sat_solve tests each xi with the complete encoding. smt_cbs_solve tests
each xi with the relaxed encoding plus the conflict clauses learned so far,
validates satisfying assignments against the movement rules, and adds the
clauses of all violated rules before re-solving; an unsatisfiable relaxation
is a proof that the full encoding is unsatisfiable too, so the bound can be
raised. Conflict records persist across bounds and are re-grounded against
the new variable layout.
"""

from __future__ import annotations

import time

from .cbs import (
    STATUS_LIMIT,
    STATUS_SOLVED,
    STATUS_TIMEOUT,
    STATUS_UNSOLVABLE,
    SolveResult,
    SolveStats,
    cost_cutoff,
    solvability_precheck,
)
from .encoder import (
    ConflictRecord,
    clause_for_record,
    encode_basic,
    encode_full,
    extract_plan,
    lower_bound,
    record_from_collision,
)
from .graphs import INF
from .relocation import Instance, validate
from . import satcore as satmod


def _record_key(rec: ConflictRecord):
    return (rec.kind, rec.t, rec.i, rec.v,
            -1 if rec.j is None else rec.j,
            -1 if rec.u is None else rec.u)


def _remaining(deadline):
    if deadline is None:
        return None
    return deadline - time.monotonic()


def mdd_sat_solve(inst: Instance, timeout: float | None = None,
                  sat=None, xi_cap: int | None = None) -> SolveResult:
    """Optimal solve by eager encoding of increasing cost bounds."""
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout
    sat = sat or satmod.solve
    stats = SolveStats(algorithm="mddsat")

    solvable = solvability_precheck(inst)
    if solvable is False:
        stats.runtime = time.monotonic() - t0
        return SolveResult(STATUS_UNSOLVABLE, stats=stats)
    if xi_cap is None:
        xi_cap = INF if solvable else cost_cutoff(inst)

    xi = lower_bound(inst)
    while xi <= xi_cap:
        formula, vm = encode_full(inst, xi)
        stats.clauses = len(formula.clauses)
        stats.variables = formula.num_vars
        budget = _remaining(deadline)
        if budget is not None and budget <= 0:
            break
        t1 = time.monotonic()
        model = sat(formula, budget)
        stats.sat_time += time.monotonic() - t1
        stats.sat_calls += 1
        if model == "TIMEOUT":
            break
        if model != "UNSAT":
            plan = extract_plan(vm, model)
            residual = validate(inst, plan)
            if residual:
                raise RuntimeError(f"full encoding produced invalid plan: {residual[0]}")
            stats.runtime = time.monotonic() - t0
            stats.xi = plan.cost
            stats.mu = plan.makespan
            return SolveResult(STATUS_SOLVED, plan.cost, plan, stats)
        xi += 1
    stats.runtime = time.monotonic() - t0
    if deadline is not None and time.monotonic() > deadline:
        return SolveResult(STATUS_TIMEOUT, stats=stats)
    return SolveResult(STATUS_LIMIT, stats=stats)


class _Session:
    """One solving context per cost bound: either the incremental internal
    solver or an external callable re-solving the accumulated formula."""

    def __init__(self, formula, backend):
        self.formula = formula
        self.backend = backend
        self.solver = None
        if backend is None:
            self.solver = satmod.SatSolver()
            self.solver.ensure_vars(formula.num_vars)
            for clause in formula.clauses:
                self.solver.add_clause(clause)

    def add_clause(self, clause):
        self.formula.add_clause(clause)
        if self.solver is not None:
            self.solver.add_clause(clause)

    def solve(self, budget):
        # no model replay here: satisfying assignments are checked by plan
        # extraction and validation, and UNSAT answers end the bound anyway
        if self.solver is not None:
            deadline = None if budget is None else time.monotonic() + budget
            return self.solver.solve(deadline)
        return self.backend(self.formula, budget)


def refine_for_variant(inst: Instance, collision, vm):
    """Ground refinement clause for one collision under vm's variables, or
    None when every assignment exhibiting the collision is already ruled out
    by variable absence."""
    return clause_for_record(record_from_collision(inst, collision), vm)


def smt_cbs_solve(inst: Instance, timeout: float | None = None,
                  sat=None, xi_cap: int | None = None,
                  incremental: bool = True) -> SolveResult:
    """Optimal solve by lazy encoding with validation-driven refinement.

    incremental=False re-solves the accumulated formula from scratch after
    every refinement (slower; kept for equivalence testing).
    """
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout
    stats = SolveStats(algorithm="smtcbs")

    solvable = solvability_precheck(inst)
    if solvable is False:
        stats.runtime = time.monotonic() - t0
        return SolveResult(STATUS_UNSOLVABLE, stats=stats)
    if xi_cap is None:
        xi_cap = INF if solvable else cost_cutoff(inst)

    records: set[ConflictRecord] = set()
    xi = lower_bound(inst)
    while xi <= xi_cap:
        ordered = sorted(records, key=_record_key)
        formula, vm = encode_basic(inst, xi, ordered)
        backend = sat if sat is not None else (None if incremental else satmod.solve)
        session = _Session(formula, backend)
        # clause-level duplicate guard for this bound
        emitted = {tuple(sorted(c)) for c in formula.clauses}
        if len(emitted) != len(formula.clauses):
            raise RuntimeError("duplicate clause in initial lazy encoding")
        timed_out = False
        while True:
            budget = _remaining(deadline)
            if budget is not None and budget <= 0:
                timed_out = True
                break
            t1 = time.monotonic()
            model = session.solve(budget)
            stats.sat_time += time.monotonic() - t1
            stats.sat_calls += 1
            if model == "TIMEOUT":
                timed_out = True
                break
            if model == "UNSAT":
                break  # no solution of cost <= xi exists; raise the bound
            plan = extract_plan(vm, model)
            collisions = validate(inst, plan)
            if not collisions:
                stats.clauses = len(formula.clauses)
                stats.variables = formula.num_vars
                stats.conflicts_stored = len(records)
                stats.runtime = time.monotonic() - t0
                stats.xi = plan.cost
                stats.mu = plan.makespan
                return SolveResult(STATUS_SOLVED, plan.cost, plan, stats)
            new_recs = sorted(
                {record_from_collision(inst, c) for c in collisions},
                key=_record_key,
            )
            added = 0
            for rec in new_recs:
                records.add(rec)
                clause = clause_for_record(rec, vm)
                if clause is None:
                    continue
                key = tuple(sorted(clause))
                if key in emitted:
                    # a colliding pair can re-trigger a record whose clause is
                    # already satisfied (e.g. a swap reciprocated by an item
                    # that itself collides); some other record of this round
                    # always yields a fresh clause
                    continue
                emitted.add(key)
                session.add_clause(clause)
                added += 1
                stats.refinements += 1
            if added == 0:
                raise RuntimeError(
                    "refinement stalled: every collision clause already present"
                )
        stats.clauses = len(formula.clauses)
        stats.variables = formula.num_vars
        stats.conflicts_stored = len(records)
        if timed_out:
            stats.runtime = time.monotonic() - t0
            return SolveResult(STATUS_TIMEOUT, stats=stats)
        xi += 1
    stats.runtime = time.monotonic() - t0
    return SolveResult(STATUS_LIMIT, stats=stats)
