"""Ground program representation for bound-founded answer set solving.

A ground program couples ordinary constraint variables ("standard") with
founded variables whose values must be justified by rules.  Founded integer
variables admit an extra bottom value below every integer, spelled
``NEG_INF``; founded Booleans bottom out at ``false``.  Constraints and rule
bodies share one normalized clause shape: a disjunction of Boolean literals
and integer linear inequalities ``c1*x1 + ... + cn*xn >= k``.

Evaluation uses extended arithmetic: ``NEG_INF`` times a positive coefficient
contributes negative infinity, times a negative coefficient positive
infinity, and a sum mixing both is ``Truth.UNDEFINED`` rather than an
exception.  Undefined never counts as satisfied.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property


class _Infinity:
    """A signed infinite value, below or above every integer.

    ``NEG_INF`` is storable (it is the founded-integer bottom); ``POS_INF``
    only appears transiently in extended arithmetic and in folded reduct
    bounds, never in a valuation.
    """

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        if isinstance(other, int):
            return self.sign < 0
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        if isinstance(other, int):
            return self.sign > 0
        return NotImplemented

    def __le__(self, other):
        eq = self.__eq__(other)
        lt = self.__lt__(other)
        if lt is NotImplemented:
            return NotImplemented
        return lt or eq is True

    def __ge__(self, other):
        eq = self.__eq__(other)
        gt = self.__gt__(other)
        if gt is NotImplemented:
            return NotImplemented
        return gt or eq is True

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("infinity", self.sign))

    def __neg__(self):
        return POS_INF if self.sign < 0 else NEG_INF

    def __repr__(self):
        return "-inf" if self.sign < 0 else "inf"


NEG_INF = _Infinity(-1)
POS_INF = _Infinity(1)

# A variable's value: bool for Boolean sorts, int for integer sorts,
# NEG_INF for founded integers left at their bottom.
Value = int  # documentation alias; bool and _Infinity also occur


class Sort(enum.Enum):
    BOOL = "bool"
    INT = "int"


class VarKind(enum.Enum):
    STANDARD = "standard"
    FOUNDED = "founded"


@dataclass(frozen=True)
class Variable:
    """Declaration of one ground variable.

    Integer variables carry a finite interval ``lo..hi``; founded integers
    additionally admit ``NEG_INF``.  Boolean variables leave ``lo``/``hi``
    unset.
    """

    name: str
    kind: VarKind
    sort: Sort
    lo: int | None = None
    hi: int | None = None

    @property
    def is_founded(self) -> bool:
        return self.kind is VarKind.FOUNDED

    def least_value(self):
        """The smallest admissible value: the lattice start for fixpoints."""
        if self.sort is Sort.BOOL:
            return False
        return NEG_INF if self.is_founded else self.lo

    def admits(self, value) -> bool:
        """True iff ``value`` lies in this variable's (extended) domain."""
        if self.sort is Sort.BOOL:
            return isinstance(value, bool)
        if isinstance(value, bool):
            return False
        if isinstance(value, _Infinity):
            return value == NEG_INF and self.is_founded
        return isinstance(value, int) and self.lo <= value <= self.hi


@dataclass(frozen=True)
class Literal:
    """A Boolean variable occurrence, positive or negated."""

    var: int
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.var, not self.positive)


@dataclass(frozen=True)
class LinearAtom:
    """Integer inequality ``sum(coeff * var) >= bound``.

    Coefficients are nonzero and no variable repeats.  ``bound`` is an int in
    source programs; reduct folding may produce an infinite bound.  An atom
    with no terms is a constant (its truth is ``0 >= bound``) and only occurs
    inside reducts built with tautology retention.
    """

    terms: tuple[tuple[int, int], ...]  # (coeff, var)
    bound: int


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals and linear atoms.

    The empty clause is permitted only as an explicit unsatisfiable marker.
    """

    lits: tuple[Literal, ...] = ()
    atoms: tuple[LinearAtom, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.lits and not self.atoms

    def variables(self):
        """All variable ids occurring in the clause, in member order."""
        for lit in self.lits:
            yield lit.var
        for atom in self.atoms:
            for _, var in atom.terms:
                yield var


@dataclass(frozen=True)
class Rule:
    """A clause tagged with its founded head variable.

    The head must occur exactly once in the clause, in a position where
    raising it can only help satisfy the clause (validated separately).
    """

    clause: Clause
    head: int


@dataclass(frozen=True)
class LinearExpr:
    """Objective expression: integer terms plus 0/1-valued Boolean terms."""

    terms: tuple[tuple[int, int], ...] = ()  # (coeff, var)
    constant: int = 0


@dataclass(frozen=True)
class Program:
    """An immutable ground program: variables, constraints, rules, objective."""

    variables: tuple[Variable, ...]
    constraints: tuple[Clause, ...] = ()
    rules: tuple[Rule, ...] = ()
    objective: LinearExpr | None = None

    @cached_property
    def index_by_name(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def name(self, var: int) -> str:
        return self.variables[var].name


class Truth(enum.Enum):
    """Three-valued verdict of extended evaluation."""

    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"


def format_value(value) -> str:
    """Canonical spelling of a value: true/false, -inf, or the integer."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, _Infinity) else str(value)


def eval_linear(atom: LinearAtom, valuation) -> Truth:
    """Evaluate one inequality under a valuation, with extended arithmetic.

    All atom variables must be assigned.  NEG_INF times a positive
    coefficient pulls the sum to -inf, times a negative coefficient to +inf;
    a sum with both is UNDEFINED.
    """
    pulled_down = pulled_up = False
    total = 0
    for coeff, var in atom.terms:
        value = valuation[var]
        if isinstance(value, _Infinity):
            if coeff > 0:
                pulled_down = True
            else:
                pulled_up = True
        else:
            total += coeff * value
    if pulled_down and pulled_up:
        return Truth.UNDEFINED
    bound = atom.bound
    if isinstance(bound, _Infinity):
        if bound.sign < 0:
            return Truth.TRUE
        # bound +inf: unreachable by finite sums; an infinite sum against an
        # infinite bound has no defined answer.
        return Truth.UNDEFINED if pulled_up else Truth.FALSE
    if pulled_down:
        return Truth.FALSE
    if pulled_up:
        return Truth.TRUE
    return Truth.TRUE if total >= bound else Truth.FALSE


def eval_clause(clause: Clause, valuation) -> Truth:
    """TRUE if some member holds, FALSE if all fail, else UNDEFINED."""
    for lit in clause.lits:
        if valuation[lit.var] == lit.positive:
            return Truth.TRUE
    undefined = False
    for atom in clause.atoms:
        verdict = eval_linear(atom, valuation)
        if verdict is Truth.TRUE:
            return Truth.TRUE
        if verdict is Truth.UNDEFINED:
            undefined = True
    return Truth.UNDEFINED if undefined else Truth.FALSE


def failing_constraint(program: Program, valuation):
    """First constraint not evaluating TRUE, as (index, Truth), or None.

    The witness is deterministic: constraints are scanned in program order,
    so the same clause id is reported across runs.
    """
    for i, clause in enumerate(program.constraints):
        verdict = eval_clause(clause, valuation)
        if verdict is not Truth.TRUE:
            return i, verdict
    return None


def satisfies(program: Program, valuation) -> bool:
    """True iff every constraint evaluates TRUE (UNDEFINED does not count)."""
    return failing_constraint(program, valuation) is None


def eval_linear_expr(expr: LinearExpr, valuation):
    """Value of an objective expression; bools count 0/1.

    Returns an int, or NEG_INF/POS_INF for pure infinite sums, or None when
    the sum mixes both infinities.
    """
    pulled_down = pulled_up = False
    total = expr.constant
    for coeff, var in expr.terms:
        value = valuation[var]
        if isinstance(value, bool):
            total += coeff if value else 0
        elif isinstance(value, _Infinity):
            if coeff > 0:
                pulled_down = True
            else:
                pulled_up = True
        else:
            total += coeff * value
    if pulled_down and pulled_up:
        return None
    if pulled_down:
        return NEG_INF
    if pulled_up:
        return POS_INF
    return total


@dataclass
class ValidationReport:
    """Outcome of validate_program: empty issue list means valid."""

    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self):
        return "ok" if self.ok else "\n".join(self.issues)


def _check_clause(clause: Clause, variables, where: str, issues: list):
    for lit in clause.lits:
        if not 0 <= lit.var < len(variables):
            issues.append(f"{where}: literal references unknown variable {lit.var}")
        elif variables[lit.var].sort is not Sort.BOOL:
            issues.append(f"{where}: literal on non-Boolean variable "
                          f"'{variables[lit.var].name}'")
    for atom in clause.atoms:
        seen = set()
        for coeff, var in atom.terms:
            if not 0 <= var < len(variables):
                issues.append(f"{where}: atom references unknown variable {var}")
                continue
            if variables[var].sort is not Sort.INT:
                issues.append(f"{where}: atom term on non-integer variable "
                              f"'{variables[var].name}'")
            if coeff == 0:
                issues.append(f"{where}: zero coefficient on "
                              f"'{variables[var].name}'")
            if var in seen:
                issues.append(f"{where}: variable '{variables[var].name}' "
                              f"repeats within one atom")
            seen.add(var)
        if isinstance(atom.bound, _Infinity):
            issues.append(f"{where}: infinite bound outside a reduct")


def validate_program(program: Program) -> ValidationReport:
    """Check referential and structural sanity of a ground program.

    Covers variable domains, clause well-formedness, rule head requirements
    (founded, single increasing occurrence) and monotone rule bodies.
    """
    from .analysis import Monotonicity, monotonicity, validate_rule

    issues: list[str] = []
    names = set()
    for i, var in enumerate(program.variables):
        if var.name in names:
            issues.append(f"variable {i}: duplicate name '{var.name}'")
        names.add(var.name)
        if var.sort is Sort.INT:
            if var.lo is None or var.hi is None:
                issues.append(f"variable '{var.name}': integer without interval")
            elif var.lo > var.hi:
                issues.append(f"variable '{var.name}': empty interval "
                              f"{var.lo}..{var.hi}")
        elif var.lo is not None or var.hi is not None:
            issues.append(f"variable '{var.name}': interval on a Boolean")

    for i, clause in enumerate(program.constraints):
        _check_clause(clause, program.variables, f"constraint {i}", issues)

    for i, rule in enumerate(program.rules):
        where = f"rule {i}"
        _check_clause(rule.clause, program.variables, where, issues)
        if rule.clause.is_empty:
            issues.append(f"{where}: empty clause")
            continue
        if not 0 <= rule.head < len(program.variables):
            issues.append(f"{where}: unknown head variable {rule.head}")
            continue
        violation = validate_rule(rule, program.variables)
        if violation is not None:
            issues.append(f"{where}: {violation.describe(program.name(rule.head))}")
        for var in set(rule.clause.variables()) - {rule.head}:
            if monotonicity(rule.clause, var) is Monotonicity.NON_MONOTONE:
                issues.append(f"{where}: non-monotone occurrence of "
                              f"'{program.name(var)}' in a rule body")

    if program.objective is not None:
        seen = set()
        for coeff, var in program.objective.terms:
            if not 0 <= var < len(program.variables):
                issues.append(f"objective: unknown variable {var}")
                continue
            if coeff == 0:
                issues.append(f"objective: zero coefficient on "
                              f"'{program.name(var)}'")
            if var in seen:
                issues.append(f"objective: variable '{program.name(var)}' repeats")
            seen.add(var)

    return ValidationReport(issues)


def validate_valuation(program: Program, valuation) -> list[str]:
    """Issues preventing ``valuation`` from being a total in-domain map."""
    issues = []
    for i, var in enumerate(program.variables):
        if i not in valuation:
            issues.append(f"variable '{var.name}' is unassigned")
        elif not var.admits(valuation[i]):
            issues.append(f"variable '{var.name}' has out-of-domain value "
                          f"{format_value(valuation[i])}")
    return issues
