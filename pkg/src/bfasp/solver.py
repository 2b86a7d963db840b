"""Stable-model checking, enumeration, and optimization.

A valuation is stable when it satisfies the constraints and reproduces
itself: the minimal model of the program's reduct under the valuation agrees
with it on every founded variable.  The search branches only on the guess
set (standard variables plus founded variables with substituted body
occurrences); everything else is determined by the fixpoint at each leaf.
"""

import enum
import time
import warnings
from dataclasses import dataclass

from .analysis import ReductBuilder, guess_set, validate_positive_cp
from .errors import SolveError
from .fixpoint import minimal_model
from .program import (
    NEG_INF,
    Program,
    Sort,
    Truth,
    VarKind,
    _Infinity,
    eval_clause,
    eval_linear_expr,
    failing_constraint,
    format_value,
    validate_valuation,
)

# Guessed founded integers are enumerated over their whole extended domain;
# warn when that domain is large enough to dominate the search.
_GUESS_DOMAIN_WARN = 64


class StabilityReason(enum.Enum):
    CONSTRAINT_VIOLATED = "constraint violated"
    CONSTRAINT_UNDEFINED = "constraint evaluation undefined"
    MODEL_MISMATCH = "minimal model disagrees"
    REDUCT_UNSAT = "reduct has no model"


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of check_stable, with a witness for every rejection."""

    stable: bool
    reason: StabilityReason | None = None
    clause_index: int | None = None
    rule_index: int | None = None
    var: int | None = None
    assigned: object = None
    derived: object = None

    def describe(self, program: Program) -> str:
        if self.stable:
            return "stable"
        if self.reason is StabilityReason.CONSTRAINT_VIOLATED:
            return f"constraint {self.clause_index} violated"
        if self.reason is StabilityReason.CONSTRAINT_UNDEFINED:
            return (f"constraint {self.clause_index} undefined "
                    f"(mixed infinite terms)")
        if self.reason is StabilityReason.REDUCT_UNSAT:
            return f"reduct unsatisfiable (rule {self.rule_index})"
        return (f"{program.name(self.var)} = {format_value(self.assigned)} "
                f"but minimal model gives {format_value(self.derived)}")


def check_stable(program: Program, valuation, *,
                 on_update=None) -> StabilityVerdict:
    """Decide stability of a total, in-domain valuation.

    Standard variables are free (only the constraints restrict them); every
    founded variable must equal its value in the minimal model of the reduct.
    Raises ValueError on partial or out-of-domain input.
    """
    issues = validate_valuation(program, valuation)
    if issues:
        raise ValueError("; ".join(issues))
    failing = failing_constraint(program, valuation)
    if failing is not None:
        index, verdict = failing
        reason = (StabilityReason.CONSTRAINT_UNDEFINED
                  if verdict is Truth.UNDEFINED
                  else StabilityReason.CONSTRAINT_VIOLATED)
        return StabilityVerdict(False, reason, clause_index=index)
    reduct = ReductBuilder(program).build(valuation)
    shape_issues = validate_positive_cp(reduct)
    if shape_issues:  # guards the folding logic; never expected to fire
        raise AssertionError("reduct is not positive: " + "; ".join(shape_issues))
    result = minimal_model(reduct, on_update=on_update)
    if not result.ok:
        return StabilityVerdict(
            False, StabilityReason.REDUCT_UNSAT,
            rule_index=reduct.origin_of(result.unsat_index))
    for var, info in enumerate(program.variables):
        if info.kind is not VarKind.FOUNDED:
            continue
        if valuation[var] != result.model[var]:
            return StabilityVerdict(False, StabilityReason.MODEL_MISMATCH,
                                    var=var, assigned=valuation[var],
                                    derived=result.model[var])
    return StabilityVerdict(True)


class PropagationLevel(enum.Enum):
    LEAF_CHECK = "leaf"
    CLAUSE = "clause"


class BranchOrder(enum.Enum):
    DECLARATION = "declaration"
    ACTIVITY = "activity"


class ValueOrder(enum.Enum):
    MIN_FIRST = "min-first"
    MAX_FIRST = "max-first"


class SearchStatus(enum.Enum):
    EXHAUSTED = "exhausted"
    SOLUTION_LIMIT = "solution limit"
    TIME_LIMIT = "time limit"


@dataclass
class SearchConfig:
    branch_order: BranchOrder = BranchOrder.DECLARATION
    value_order: ValueOrder = ValueOrder.MIN_FIRST
    propagation: PropagationLevel = PropagationLevel.CLAUSE
    solution_limit: int | None = None
    time_budget: float | None = None

    def __post_init__(self):
        if self.solution_limit is not None and self.solution_limit <= 0:
            raise ValueError("solution limit must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")


@dataclass
class OptimizeOutcome:
    """Best model found, its objective value, and whether optimality is proven."""

    model: dict
    value: int
    proven: bool


class _StopSearch(Exception):
    pass


class Search:
    """Depth-first stable-model search over one program.

    ``models()`` yields stable valuations in deterministic order; in
    objective mode each yielded model strictly improves on the previous one.
    ``status`` reports, after the generator finishes, whether the space was
    exhausted or a limit cut the run short.
    """

    def __init__(self, program: Program, config: SearchConfig | None = None,
                 *, on_update=None):
        self.program = program
        self.config = config or SearchConfig()
        self.status: SearchStatus | None = None
        self._on_update = on_update
        self._builder = ReductBuilder(program)
        self._guess = self._order_guesses()
        self._guess_founded = [v for v in self._guess
                               if program.variables[v].is_founded]
        self._watch: dict[int, list] = {}
        if self.config.propagation is PropagationLevel.CLAUSE:
            self._index_clauses()
        self._objective = program.objective
        self._bound: int | None = None
        self._obj_floor = self._objective_floor_terms()
        self._emitted = 0
        self._deadline = None

    # -- setup -----------------------------------------------------------

    def _order_guesses(self) -> list[int]:
        chosen = sorted(guess_set(self.program))
        if self.config.branch_order is BranchOrder.ACTIVITY:
            occurrences = {v: 0 for v in chosen}
            clauses = list(self.program.constraints) + \
                [r.clause for r in self.program.rules]
            for clause in clauses:
                for var in clause.variables():
                    if var in occurrences:
                        occurrences[var] += 1
            chosen.sort(key=lambda v: (-occurrences[v], v))
        for var in chosen:
            info = self.program.variables[var]
            if info.is_founded and info.sort is Sort.INT:
                size = info.hi - info.lo + 2
                if size > _GUESS_DOMAIN_WARN:
                    warnings.warn(
                        f"founded variable '{info.name}' is guessed over "
                        f"{size} values; expect search blowup", stacklevel=3)
        return chosen

    def _values_for(self, var: int):
        info = self.program.variables[var]
        if info.sort is Sort.BOOL:
            values = [False, True]
        elif info.is_founded:
            values = [NEG_INF] + list(range(info.lo, info.hi + 1))
        else:
            values = list(range(info.lo, info.hi + 1))
        if self.config.value_order is ValueOrder.MAX_FIRST:
            values.reverse()
        return values

    def _index_clauses(self):
        guessed = set(self._guess)
        clauses = list(self.program.constraints) + \
            [r.clause for r in self.program.rules]
        for clause in clauses:
            if clause.is_empty:
                self._watch.setdefault(-1, []).append(clause)
                continue
            for var in set(clause.variables()):
                if var in guessed:
                    self._watch.setdefault(var, []).append(clause)

    def _objective_floor_terms(self):
        """Per-term minima for bound pruning; None disables the prune."""
        if self._objective is None:
            return None
        floors = {}
        for coeff, var in self._objective.terms:
            info = self.program.variables[var]
            if info.sort is Sort.BOOL:
                floors[var] = min(coeff, 0)
            elif info.is_founded:
                return None  # -inf possible, no useful floor
            else:
                floors[var] = min(coeff * info.lo, coeff * info.hi)
        return floors

    # -- search ----------------------------------------------------------

    def models(self):
        cfg = self.config
        self.status = None
        self._emitted = 0
        self._bound = None
        if cfg.time_budget is not None:
            self._deadline = time.monotonic() + cfg.time_budget
        if any(c.is_empty for c in self.program.constraints):
            self.status = SearchStatus.EXHAUSTED
            return
        assignment: dict = {}
        try:
            yield from self._node(assignment, 0)
        except _StopSearch:
            return
        self.status = SearchStatus.EXHAUSTED

    def _node(self, assignment: dict, depth: int):
        if self._deadline is not None and time.monotonic() > self._deadline:
            self.status = SearchStatus.TIME_LIMIT
            raise _StopSearch
        if depth == len(self._guess):
            model = self._leaf(assignment)
            if model is not None:
                yield model
                self._emitted += 1
                limit = self.config.solution_limit
                if limit is not None and self._emitted >= limit:
                    self.status = SearchStatus.SOLUTION_LIMIT
                    raise _StopSearch
            return
        var = self._guess[depth]
        for value in self._values_for(var):
            assignment[var] = value
            if not self._pruned(assignment, var):
                yield from self._node(assignment, depth + 1)
        del assignment[var]

    def _pruned(self, assignment: dict, var: int) -> bool:
        if self.config.propagation is not PropagationLevel.CLAUSE:
            return False
        for clause in self._watch.get(var, ()):
            if self._definitely_false(clause, assignment):
                return True
        if self._bound is not None and self._obj_floor is not None:
            floor = self._objective.constant
            for coeff, v in self._objective.terms:
                if v in assignment:
                    value = assignment[v]
                    floor += coeff * (1 if value is True else
                                      0 if value is False else value)
                else:
                    floor += self._obj_floor[v]
            if floor > self._bound:
                return True
        return False

    def _definitely_false(self, clause, assignment) -> bool:
        """All members known false under the partial guess assignment."""
        for lit in clause.lits:
            if lit.var not in assignment:
                return False
            if assignment[lit.var] == lit.positive:
                return False
        for atom in clause.atoms:
            pulled_down = pulled_up = False
            total = 0
            for coeff, v in atom.terms:
                if v not in assignment:
                    return False
                value = assignment[v]
                if isinstance(value, _Infinity):
                    if coeff > 0:
                        pulled_down = True
                    else:
                        pulled_up = True
                else:
                    total += coeff * value
            if pulled_up and pulled_down:
                return False  # undefined: not definitely false
            if pulled_up:
                return False
            if not pulled_down and total >= atom.bound:
                return False
        return True

    def _leaf(self, assignment: dict):
        reduct = self._builder.build(assignment)
        result = minimal_model(reduct, on_update=self._on_update)
        if not result.ok:
            return None
        model = result.model
        for var in self._guess_founded:
            if model[var] != assignment[var]:
                return None
        candidate = dict(model)
        for var in self._guess:
            if self.program.variables[var].kind is VarKind.STANDARD:
                candidate[var] = assignment[var]
        if failing_constraint(self.program, candidate) is not None:
            return None
        if self._objective is not None:
            value = eval_linear_expr(self._objective, candidate)
            if not isinstance(value, int):
                raise SolveError(
                    "objective has no finite value on a stable model "
                    f"(got {format_value(value) if value is not None else 'undefined'})")
            if self._bound is not None and value > self._bound:
                return None
            self._bound = value - 1
            self.objective_value = value
        return candidate


def enumerate_stable(program: Program, config: SearchConfig | None = None):
    """Yield every stable model, duplicate-free, in deterministic order."""
    yield from Search(program, config).models()


def optimize(program: Program,
             config: SearchConfig | None = None) -> OptimizeOutcome | None:
    """Minimize the program objective by branch and bound.

    Runs the enumeration with a shrinking objective bound and returns the
    last (best) model, or None when no stable model exists.  ``proven`` is
    True when the search space was exhausted.
    """
    if program.objective is None:
        raise SolveError("program has no objective to optimize")
    search = Search(program, config)
    best = None
    value = None
    for model in search.models():
        best = model
        value = search.objective_value
    if best is None:
        return None
    return OptimizeOutcome(best, value,
                           search.status is SearchStatus.EXHAUSTED)
