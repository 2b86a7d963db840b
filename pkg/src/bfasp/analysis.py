"""Monotonicity analysis, rule validation, guess sets, and reducts.

A clause is *increasing* in a variable when raising that variable can only
help satisfy it, *decreasing* when raising can only hurt.  Rules must be
increasing in their head; every other rule-body variable must be decreasing
or absent.  The reduct of a program under a valuation substitutes values for
all standard and non-decreasing body occurrences, folds the constants, and
keeps what remains: a positive constraint program whose unique minimal model
the fixpoint module computes.
"""

import enum
from dataclasses import dataclass

from .program import (
    NEG_INF,
    POS_INF,
    Clause,
    LinearAtom,
    Program,
    Rule,
    Sort,
    VarKind,
    Variable,
    _Infinity,
)


class Monotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    CONSTANT = "constant"
    NON_MONOTONE = "non-monotone"


def monotonicity(clause: Clause, var: int) -> Monotonicity:
    """Syntactic classification of ``var`` across all occurrences in ``clause``.

    Positive literals and positive coefficients are increasing, negative
    ones decreasing; mixed polarities are non-monotone, absence is constant.
    """
    up = down = False
    for lit in clause.lits:
        if lit.var == var:
            if lit.positive:
                up = True
            else:
                down = True
    for atom in clause.atoms:
        for coeff, v in atom.terms:
            if v == var:
                if coeff > 0:
                    up = True
                else:
                    down = True
    if up and down:
        return Monotonicity.NON_MONOTONE
    if up:
        return Monotonicity.INCREASING
    if down:
        return Monotonicity.DECREASING
    return Monotonicity.CONSTANT


class RuleViolation(enum.Enum):
    """Why a clause/head pair fails to be a rule."""

    HEAD_NOT_FOUNDED = "head is not a founded variable"
    HEAD_ABSENT = "head does not occur in the clause"
    HEAD_MULTIPLE_OCCURRENCES = "head occurs more than once"
    HEAD_NOT_INCREASING = "clause is not increasing in the head"

    def describe(self, head_name: str) -> str:
        return f"head '{head_name}': {self.value}"


def validate_rule(rule: Rule, variables) -> RuleViolation | None:
    """None when the rule is well-formed, else the first violation found."""
    head = rule.head
    if variables[head].kind is not VarKind.FOUNDED:
        return RuleViolation.HEAD_NOT_FOUNDED
    count = sum(1 for v in rule.clause.variables() if v == head)
    if count == 0:
        return RuleViolation.HEAD_ABSENT
    if count > 1:
        return RuleViolation.HEAD_MULTIPLE_OCCURRENCES
    if monotonicity(rule.clause, head) is not Monotonicity.INCREASING:
        return RuleViolation.HEAD_NOT_INCREASING
    return None


def guess_set(program: Program) -> frozenset[int]:
    """Variables the stable-model search must branch on.

    All standard variables, plus every founded variable with at least one
    substituted occurrence: a non-head rule position where the clause is not
    decreasing in it.  Values of purely decreasing body variables never enter
    a reduct, so they need no guess.
    """
    guessed = {i for i, v in enumerate(program.variables)
               if v.kind is VarKind.STANDARD}
    for rule in program.rules:
        for var in set(rule.clause.variables()):
            if var == rule.head or var in guessed:
                continue
            if monotonicity(rule.clause, var) in (Monotonicity.INCREASING,
                                                  Monotonicity.NON_MONOTONE):
                guessed.add(var)
    return frozenset(guessed)


def is_tautology(clause: Clause, variables) -> bool:
    """Conservatively decide whether every in-domain valuation satisfies ``clause``.

    True when the clause holds a complementary literal pair, or an atom whose
    left side cannot drop below its bound (computed from domain extremes;
    founded integers bottom out at -inf, so any positive term on a founded
    variable blocks that argument).  Pre: clause is constant-folded.
    """
    positive = {lit.var for lit in clause.lits if lit.positive}
    negative = {lit.var for lit in clause.lits if not lit.positive}
    if positive & negative:
        return True
    for atom in clause.atoms:
        if isinstance(atom.bound, _Infinity):
            if atom.bound.sign < 0:
                return True
            continue
        least = 0
        for coeff, var in atom.terms:
            info = variables[var]
            if coeff > 0:
                if info.kind is VarKind.FOUNDED:
                    least = NEG_INF
                    break
                least += coeff * info.lo
            else:
                # At -inf a negative coefficient pushes the sum up, so the
                # minimum over the extended domain sits at hi.
                least += coeff * info.hi
        if not isinstance(least, _Infinity) and least >= atom.bound:
            return True
    return False


@dataclass(frozen=True)
class PositiveCP:
    """A positive constraint program: head-tagged clauses over shared variables.

    Each clause is increasing in its head and decreasing in every other
    variable, so bounds propagation from the bottom reaches the unique
    minimal model.  ``origins`` maps each clause back to the source rule
    index it was folded from (None for hand-built programs).
    """

    variables: tuple[Variable, ...]
    rules: tuple[Rule, ...]
    origins: tuple = ()

    def origin_of(self, index: int):
        return self.origins[index] if index < len(self.origins) else None


def validate_positive_cp(pcp: PositiveCP) -> list[str]:
    """Issues breaking the positive-CP shape; empty list means well-formed."""
    issues = []
    for i, rule in enumerate(pcp.rules):
        violation = validate_rule(rule, pcp.variables)
        if violation is not None:
            issues.append(f"clause {i}: "
                          f"{violation.describe(pcp.variables[rule.head].name)}")
        for var in set(rule.clause.variables()) - {rule.head}:
            mono = monotonicity(rule.clause, var)
            if mono not in (Monotonicity.DECREASING, Monotonicity.CONSTANT):
                issues.append(f"clause {i}: not decreasing in "
                              f"'{pcp.variables[var].name}'")
    return issues


_TRUE_ATOM = LinearAtom((), 0)  # constant truth marker, sum 0 >= 0


@dataclass(frozen=True)
class _AtomPlan:
    kept: tuple[tuple[int, int], ...]
    substituted: tuple[tuple[int, int], ...]
    bound: int
    has_head: bool


@dataclass(frozen=True)
class _RulePlan:
    head: int
    kept_lits: tuple
    substituted_lits: tuple
    atoms: tuple


class ReductBuilder:
    """Precomputed substitution plans for building reducts of one program.

    The plan partition depends only on the program (which occurrences are
    standard or non-decreasing), so a search reuses one builder across all
    candidate valuations.
    """

    def __init__(self, program: Program):
        self.program = program
        plans = []
        for rule in program.rules:
            substitute = {}
            for var in set(rule.clause.variables()):
                if var == rule.head:
                    continue
                info = program.variables[var]
                mono = monotonicity(rule.clause, var)
                substitute[var] = (info.kind is VarKind.STANDARD
                                   or mono is not Monotonicity.DECREASING)
            kept_lits = tuple(l for l in rule.clause.lits
                              if l.var == rule.head or not substitute[l.var])
            sub_lits = tuple(l for l in rule.clause.lits
                             if l.var != rule.head and substitute[l.var])
            atom_plans = []
            for atom in rule.clause.atoms:
                kept = tuple((c, v) for c, v in atom.terms
                             if v == rule.head or not substitute[v])
                subbed = tuple((c, v) for c, v in atom.terms
                               if v != rule.head and substitute[v])
                has_head = any(v == rule.head for _, v in atom.terms)
                atom_plans.append(_AtomPlan(kept, subbed, atom.bound, has_head))
            plans.append(_RulePlan(rule.head, kept_lits, sub_lits,
                                   tuple(atom_plans)))
        self._plans = plans

    def build(self, valuation, *, drop_tautologies: bool = True) -> PositiveCP:
        """Fold ``valuation`` into every rule and collect the surviving clauses.

        ``valuation`` must cover all substituted occurrences (the guess set
        suffices; totality is not required).  With ``drop_tautologies``
        disabled, clauses made true by a substituted member are kept with a
        constant-truth atom in its place, which leaves minimal models
        unchanged.
        """
        variables = self.program.variables
        out_rules = []
        origins = []
        try:
            return self._fold(valuation, drop_tautologies, out_rules, origins)
        except KeyError as missing:
            name = variables[missing.args[0]].name
            raise ValueError(f"reduct needs a value for '{name}'") from None

    def _fold(self, valuation, drop_tautologies, out_rules, origins):
        variables = self.program.variables
        for index, plan in enumerate(self._plans):
            satisfied = False
            for lit in plan.substituted_lits:
                if valuation[lit.var] == lit.positive:
                    satisfied = True
                    break
            atoms = []
            if not satisfied:
                for ap in plan.atoms:
                    shift = 0
                    bottomed = False
                    for coeff, var in ap.substituted:
                        value = valuation[var]
                        if isinstance(value, _Infinity):
                            # Substituted occurrences are standard (finite)
                            # or increasing, so only -inf at coeff > 0 occurs.
                            bottomed = True
                        else:
                            shift += coeff * value
                    if not ap.kept:
                        if not bottomed and shift >= ap.bound:
                            satisfied = True
                            break
                        continue
                    bound = POS_INF if bottomed else ap.bound - shift
                    if isinstance(bound, _Infinity) and not ap.has_head:
                        continue  # unsatisfiable member, deleted
                    atoms.append(LinearAtom(ap.kept, bound))
            if satisfied:
                if drop_tautologies:
                    continue
                head_lit = tuple(l for l in plan.kept_lits
                                 if l.var == plan.head)
                head_atoms = tuple(LinearAtom(ap.kept, ap.bound)
                                   for ap in plan.atoms if ap.has_head)
                clause = Clause(head_lit, head_atoms + (_TRUE_ATOM,))
                out_rules.append(Rule(clause, plan.head))
                origins.append(index)
                continue
            clause = Clause(plan.kept_lits, tuple(atoms))
            if drop_tautologies and is_tautology(clause, variables):
                continue
            out_rules.append(Rule(clause, plan.head))
            origins.append(index)
        return PositiveCP(variables, tuple(out_rules), tuple(origins))


def build_reduct(program: Program, valuation, *,
                 drop_tautologies: bool = True) -> PositiveCP:
    """Reduct of ``program`` under ``valuation``.

    Substitutes the value of every non-head occurrence that is standard or
    not decreasing, folds constants (a satisfied substituted member makes the
    clause a tautology, a falsified one is deleted), and drops tautologies.
    Depends only on the valuation's restriction to substituted variables.
    """
    return ReductBuilder(program).build(valuation,
                                        drop_tautologies=drop_tautologies)
