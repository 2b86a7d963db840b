"""Minimal models of positive constraint programs by bounds propagation.

Every variable starts at its least value (founded sorts at their bottom) and
clause requirements only ever push head bounds upward, so the propagation is
a monotone fixpoint computation on a finite lattice: it terminates, the
result is order-independent, and it is the unique minimal model when one
exists.  A requirement above a variable's domain ceiling witnesses
unsatisfiability.
"""

from collections import deque
from dataclasses import dataclass

from .analysis import PositiveCP, validate_positive_cp
from .program import NEG_INF, POS_INF, Rule, Sort, _Infinity


def _ceil_div(num: int, den: int) -> int:
    return -((-num) // den)


def _member_literal_true(lit, bounds) -> bool:
    return bounds[lit.var] == lit.positive


def _member_atom_true(atom, bounds) -> bool:
    """Truth of a non-head atom at the current bounds.

    Decreasing terms at -inf contribute +inf.  An infinite folded bound is
    unreachable, and a mixed sum counts as not satisfied.
    """
    pulled_up = pulled_down = False
    total = 0
    for coeff, var in atom.terms:
        value = bounds[var]
        if isinstance(value, _Infinity):
            if coeff < 0:
                pulled_up = True
            else:
                pulled_down = True
        else:
            total += coeff * value
    if isinstance(atom.bound, _Infinity):
        return atom.bound.sign < 0
    if pulled_down:
        return False
    if pulled_up:
        return True
    return total >= atom.bound


def clause_requirement(rule: Rule, bounds, variables):
    """Least head value satisfying ``rule.clause`` with others at ``bounds``.

    Returns the head sort's bottom (False / NEG_INF) when some other member
    already satisfies the clause, POS_INF when no head value can.  For an
    integer head the value is the ceiling of the residual slack divided by
    the head coefficient.
    """
    head = rule.head
    no_requirement = False if variables[head].sort is Sort.BOOL else NEG_INF
    head_atom = None
    for lit in rule.clause.lits:
        if lit.var == head:
            continue
        if _member_literal_true(lit, bounds):
            return no_requirement
    for atom in rule.clause.atoms:
        if any(var == head for _, var in atom.terms):
            head_atom = atom
            continue
        if _member_atom_true(atom, bounds):
            return no_requirement

    if variables[head].sort is Sort.BOOL:
        return True
    if head_atom is None:
        # Head occurs as a literal in a clause with an integer-sorted head:
        # ruled out by validation.
        return POS_INF
    if isinstance(head_atom.bound, _Infinity):
        return POS_INF if head_atom.bound.sign > 0 else NEG_INF
    coefficient = None
    slack = 0
    slack_up = False
    for coeff, var in head_atom.terms:
        if var == head:
            coefficient = coeff
            continue
        value = bounds[var]
        if isinstance(value, _Infinity):
            if coeff < 0:
                slack_up = True
            else:
                return POS_INF  # increasing non-head at bottom: invalid shape
        else:
            slack += coeff * value
    if slack_up:
        return NEG_INF
    return _ceil_div(head_atom.bound - slack, coefficient)


@dataclass
class FixpointResult:
    """Either a minimal model or the clause that forced a bound past its hi."""

    model: dict | None
    unsat_index: int | None = None

    @property
    def ok(self) -> bool:
        return self.model is not None


def minimal_model(pcp: PositiveCP, *, on_update=None,
                  validate: bool = False) -> FixpointResult:
    """Propagate clause requirements to the least fixpoint.

    ``on_update(var, old, new, clause_index)`` observes every bound raise.
    With ``validate`` the positive-CP shape is checked first and a ValueError
    raised on violations.  The returned model covers every founded variable
    of the table plus any standard variables the clauses mention.
    """
    if validate:
        issues = validate_positive_cp(pcp)
        if issues:
            raise ValueError("not a positive constraint program: "
                             + "; ".join(issues))

    variables = pcp.variables
    bounds = {i: v.least_value() for i, v in enumerate(variables)
              if v.is_founded}
    watchers: dict[int, list[int]] = {}
    for index, rule in enumerate(pcp.rules):
        for var in set(rule.clause.variables()):
            if var not in bounds:
                bounds[var] = variables[var].least_value()
            if var != rule.head:
                watchers.setdefault(var, []).append(index)
        if rule.head not in bounds:
            bounds[rule.head] = variables[rule.head].least_value()

    budget = len(pcp.rules)
    for var in bounds:
        info = variables[var]
        budget += 2 if info.sort is Sort.BOOL else info.hi - info.lo + 2
    raises = 0

    queue = deque(range(len(pcp.rules)))
    queued = [True] * len(pcp.rules)
    while queue:
        index = queue.popleft()
        queued[index] = False
        rule = pcp.rules[index]
        required = clause_requirement(rule, bounds, variables)
        if required == POS_INF:
            return FixpointResult(None, index)
        current = bounds[rule.head]
        if not required > current:
            continue
        info = variables[rule.head]
        new = required
        if info.sort is Sort.INT:
            if new < info.lo:
                new = info.lo  # least domain value meeting the requirement
            if new > info.hi:
                return FixpointResult(None, index)
        if not new > current:
            continue
        if on_update is not None:
            on_update(rule.head, current, new, index)
        bounds[rule.head] = new
        raises += 1
        if raises > budget:
            raise RuntimeError("fixpoint watchdog: bound raises exceeded "
                               "the lattice budget")
        for watching in watchers.get(rule.head, ()):
            if not queued[watching]:
                queued[watching] = True
                queue.append(watching)
    return FixpointResult(bounds)


def satisfied_at(rule: Rule, valuation, variables) -> bool:
    """Head-aware satisfaction: the head meets the clause's requirement.

    At bottom-involved valuations the raw three-valued clause evaluation can
    be UNDEFINED even though the head owes nothing (its requirement is
    vacuous); this predicate is the one minimal models are guaranteed to
    pass.
    """
    required = clause_requirement(rule, valuation, variables)
    if required == POS_INF:
        return False
    return valuation[rule.head] >= required
