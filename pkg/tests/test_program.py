"""Core representation: values, evaluation, and structural validation."""

import pytest

from bfasp import (
    NEG_INF,
    POS_INF,
    Clause,
    LinearAtom,
    LinearExpr,
    Literal,
    Program,
    Rule,
    Sort,
    Truth,
    VarKind,
    Variable,
    eval_clause,
    eval_linear,
    eval_linear_expr,
    failing_constraint,
    format_value,
    satisfies,
    validate_program,
    validate_valuation,
)

from conftest import build_example_one, valuation_of


# -- the extended value order -------------------------------------------------


def test_infinities_bracket_every_integer():
    for n in (-10**9, -1, 0, 1, 10**9):
        assert NEG_INF < n < POS_INF
        assert n > NEG_INF
        assert n < POS_INF
        assert not NEG_INF > n
        assert NEG_INF <= n <= POS_INF


def test_infinity_identity_and_negation():
    assert NEG_INF == NEG_INF
    assert NEG_INF != POS_INF
    assert -NEG_INF == POS_INF
    assert -POS_INF == NEG_INF
    assert NEG_INF < POS_INF
    assert NEG_INF <= NEG_INF
    assert POS_INF >= POS_INF
    assert hash(NEG_INF) != hash(POS_INF)


def test_infinity_sorts_deterministically():
    values = [3, NEG_INF, -7, 0]
    assert sorted(values) == [NEG_INF, -7, 0, 3]


def test_format_value_spellings():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(NEG_INF) == "-inf"
    assert format_value(POS_INF) == "inf"
    assert format_value(-42) == "-42"


# -- variables ---------------------------------------------------------------


def test_least_value_per_sort_and_kind():
    assert Variable("p", VarKind.FOUNDED, Sort.BOOL).least_value() is False
    assert Variable("q", VarKind.STANDARD, Sort.BOOL).least_value() is False
    assert Variable("n", VarKind.STANDARD, Sort.INT, 2, 9).least_value() == 2
    assert Variable("m", VarKind.FOUNDED, Sort.INT, 2, 9).least_value() == NEG_INF


def test_admits_respects_sort_kind_and_interval():
    founded = Variable("m", VarKind.FOUNDED, Sort.INT, -3, 3)
    standard = Variable("n", VarKind.STANDARD, Sort.INT, -3, 3)
    flag = Variable("p", VarKind.FOUNDED, Sort.BOOL)
    assert founded.admits(NEG_INF)
    assert founded.admits(0) and founded.admits(-3) and founded.admits(3)
    assert not founded.admits(4)
    assert not founded.admits(POS_INF)
    assert not founded.admits(True)  # bool is not an int value here
    assert not standard.admits(NEG_INF)
    assert flag.admits(True) and flag.admits(False)
    assert not flag.admits(0)
    assert not flag.admits(NEG_INF)


# -- extended evaluation ------------------------------------------------------


def atom(*terms, bound):
    return LinearAtom(tuple(terms), bound)


def test_eval_linear_finite():
    a = atom((2, 0), (-1, 1), bound=3)
    assert eval_linear(a, {0: 2, 1: 1}) is Truth.TRUE  # 4 - 1 >= 3
    assert eval_linear(a, {0: 1, 1: 0}) is Truth.FALSE


def test_eval_linear_bottom_pulls():
    down = atom((1, 0), bound=0)
    up = atom((-1, 0), bound=-4)
    assert eval_linear(down, {0: NEG_INF}) is Truth.FALSE
    assert eval_linear(up, {0: NEG_INF}) is Truth.TRUE


def test_eval_linear_mixed_is_undefined():
    a = atom((1, 0), (-1, 1), bound=1)
    assert eval_linear(a, {0: NEG_INF, 1: NEG_INF}) is Truth.UNDEFINED


def test_eval_linear_infinite_bounds():
    always = atom((1, 0), bound=NEG_INF)
    never = atom((1, 0), bound=POS_INF)
    assert eval_linear(always, {0: 5}) is Truth.TRUE
    assert eval_linear(never, {0: 5}) is Truth.FALSE
    # an infinite sum against an infinite bound has no defined answer
    assert eval_linear(atom((-1, 0), bound=POS_INF),
                       {0: NEG_INF}) is Truth.UNDEFINED


def test_eval_clause_member_combination():
    c = Clause(lits=(Literal(0),), atoms=(atom((1, 1), bound=0),))
    assert eval_clause(c, {0: True, 1: -5}) is Truth.TRUE
    assert eval_clause(c, {0: False, 1: 5}) is Truth.TRUE
    assert eval_clause(c, {0: False, 1: -5}) is Truth.FALSE
    mixed = Clause(atoms=(atom((1, 0), (-1, 1), bound=1),))
    assert eval_clause(mixed, {0: NEG_INF, 1: NEG_INF}) is Truth.UNDEFINED
    # one true member outweighs an undefined one
    both = Clause(lits=(Literal(2),),
                  atoms=(atom((1, 0), (-1, 1), bound=1),))
    assert eval_clause(both, {0: NEG_INF, 1: NEG_INF, 2: True}) is Truth.TRUE


def test_empty_clause_is_false():
    assert eval_clause(Clause(), {}) is Truth.FALSE
    assert Clause().is_empty


def test_failing_constraint_reports_first_in_program_order():
    variables = (Variable("p", VarKind.STANDARD, Sort.BOOL),)
    failing = Clause(lits=(Literal(0),))
    program = Program(variables, constraints=(failing, failing))
    assert failing_constraint(program, {0: False}) == (0, Truth.FALSE)
    assert satisfies(program, {0: True})
    assert not satisfies(program, {0: False})


def test_undefined_constraint_is_not_satisfied():
    variables = (Variable("u", VarKind.FOUNDED, Sort.INT, 0, 5),
                 Variable("v", VarKind.FOUNDED, Sort.INT, 0, 5))
    clause = Clause(atoms=(atom((1, 0), (-1, 1), bound=0),))
    program = Program(variables, constraints=(clause,))
    witness = failing_constraint(program, {0: NEG_INF, 1: NEG_INF})
    assert witness == (0, Truth.UNDEFINED)


def test_eval_linear_expr_counts_bools_as_01():
    expr = LinearExpr(((3, 0), (2, 1), (1, 2)), 10)
    value = eval_linear_expr(expr, {0: True, 1: False, 2: -4})
    assert value == 3 + 0 - 4 + 10


def test_eval_linear_expr_infinite_and_mixed():
    expr = LinearExpr(((1, 0), (1, 1)), 0)
    assert eval_linear_expr(expr, {0: NEG_INF, 1: 3}) == NEG_INF
    assert eval_linear_expr(LinearExpr(((-1, 0),), 0), {0: NEG_INF}) == POS_INF
    mixed = LinearExpr(((1, 0), (-1, 1)), 0)
    assert eval_linear_expr(mixed, {0: NEG_INF, 1: NEG_INF}) is None


def test_eval_linear_random_matches_plain_arithmetic(rng):
    """On finite valuations the extended evaluation is ordinary arithmetic."""
    for _ in range(200):
        n = rng.randint(1, 5)
        terms = tuple((rng.choice((-3, -2, -1, 1, 2, 3)), v)
                      for v in range(n))
        a = LinearAtom(terms, rng.randint(-10, 10))
        values = {v: rng.randint(-6, 6) for v in range(n)}
        plain = sum(c * values[v] for c, v in terms) >= a.bound
        assert (eval_linear(a, values) is Truth.TRUE) == plain


# -- validation ---------------------------------------------------------------


def test_validate_program_accepts_the_walkthrough():
    assert validate_program(build_example_one()).ok


def test_validate_program_flags_variable_issues():
    program = Program((
        Variable("a", VarKind.STANDARD, Sort.INT, 0, 5),
        Variable("a", VarKind.STANDARD, Sort.INT),
        Variable("b", VarKind.STANDARD, Sort.INT, 5, 0),
        Variable("c", VarKind.STANDARD, Sort.BOOL, 0, 1),
    ))
    issues = validate_program(program).issues
    assert any("duplicate name 'a'" in i for i in issues)
    assert any("integer without interval" in i for i in issues)
    assert any("empty interval" in i for i in issues)
    assert any("interval on a Boolean" in i for i in issues)


def test_validate_program_flags_clause_issues():
    variables = (Variable("p", VarKind.STANDARD, Sort.BOOL),
                 Variable("n", VarKind.STANDARD, Sort.INT, 0, 3))
    bad = Clause(lits=(Literal(1), Literal(7)),
                 atoms=(LinearAtom(((1, 0), (0, 1), (2, 1), (1, 1)), 0),))
    issues = validate_program(Program(variables, constraints=(bad,))).issues
    assert any("literal on non-Boolean" in i for i in issues)
    assert any("unknown variable 7" in i for i in issues)
    assert any("atom term on non-integer" in i for i in issues)
    assert any("zero coefficient" in i for i in issues)
    assert any("repeats within one atom" in i for i in issues)


def test_validate_program_flags_rule_issues():
    variables = (Variable("p", VarKind.STANDARD, Sort.BOOL),
                 Variable("q", VarKind.FOUNDED, Sort.BOOL),
                 Variable("r", VarKind.FOUNDED, Sort.BOOL))
    head_not_founded = Rule(Clause(lits=(Literal(0),)), 0)
    head_absent = Rule(Clause(lits=(Literal(2),)), 1)
    empty = Rule(Clause(), 1)
    non_monotone = Rule(Clause(lits=(Literal(1), Literal(2),
                                     Literal(2, False))), 1)
    program = Program(variables, rules=(head_not_founded, head_absent,
                                        empty, non_monotone))
    issues = validate_program(program).issues
    assert any("head 'p': head is not a founded variable" in i for i in issues)
    assert any("head 'q': head does not occur" in i for i in issues)
    assert any("empty clause" in i for i in issues)
    assert any("non-monotone occurrence of 'r'" in i for i in issues)


def test_validate_program_flags_objective_issues():
    variables = (Variable("n", VarKind.STANDARD, Sort.INT, 0, 3),)
    objective = LinearExpr(((0, 0), (1, 0), (2, 9)), 0)
    issues = validate_program(Program(variables,
                                      objective=objective)).issues
    assert any("objective: zero coefficient" in i for i in issues)
    assert any("objective: variable 'n' repeats" in i for i in issues)
    assert any("objective: unknown variable 9" in i for i in issues)


def test_validate_valuation_totality_and_domains():
    program = build_example_one()
    good = valuation_of(program, s=0, a=NEG_INF, b=0, x=False, y=False)
    assert validate_valuation(program, good) == []
    partial = valuation_of(program, s=0, a=0, b=0, x=False)
    assert validate_valuation(program, partial) == \
        ["variable 'y' is unassigned"]
    bad = valuation_of(program, s=NEG_INF, a=0, b=0, x=False, y=False)
    assert validate_valuation(program, bad) == \
        ["variable 's' has out-of-domain value -inf"]


def test_index_by_name_matches_declaration_order():
    program = build_example_one()
    assert program.index_by_name == {"s": 0, "a": 1, "b": 2, "x": 3, "y": 4}
    assert program.name(3) == "x"


@pytest.mark.parametrize("value,admitted", [
    (NEG_INF, True), (0, True), (True, False), (POS_INF, False)])
def test_founded_int_domain_edges(value, admitted):
    info = Variable("z", VarKind.FOUNDED, Sort.INT, -1, 1)
    assert info.admits(value) is admitted
