"""Plain-text exchange format for ground programs and assignments.

One item per line, ``#`` comments, and a deliberately small grammar:

    var int -50..50 founded a;
    var bool standard x;
    constraint 1*a - 1*b >= 9 | ~x;
    rule 1*b >= 8 | ~x head b;
    minimize 1*a + 2;

Clause members are separated by ``|``; an empty clause is written ``false``.
Assignment files hold ``name = value;`` lines with true/false/int/-inf values.
"""

import re

from .errors import FormatError
from .program import (
    NEG_INF,
    POS_INF,
    Clause,
    LinearAtom,
    LinearExpr,
    Literal,
    Program,
    Rule,
    Sort,
    VarKind,
    Variable,
    format_value,
)

# -- writing ---------------------------------------------------------------


def _format_terms(terms) -> str:
    parts = []
    for coeff, name in terms:
        if not parts:
            parts.append(f"{coeff}*{name}")
        elif coeff < 0:
            parts.append(f" - {-coeff}*{name}")
        else:
            parts.append(f" + {coeff}*{name}")
    return "".join(parts)


def format_atom(atom: LinearAtom, program: Program) -> str:
    named = [(c, program.name(v)) for c, v in atom.terms]
    lhs = _format_terms(named) if named else "0"
    return f"{lhs} >= {format_value(atom.bound)}"


def format_clause(clause: Clause, program: Program) -> str:
    members = [(program.name(l.var) if l.positive else "~" + program.name(l.var))
               for l in clause.lits]
    members.extend(format_atom(a, program) for a in clause.atoms)
    return " | ".join(members) if members else "false"


def format_linexpr(expr: LinearExpr, program: Program) -> str:
    named = [(c, program.name(v)) for c, v in expr.terms]
    out = _format_terms(named)
    if not out:
        return str(expr.constant)
    if expr.constant > 0:
        out += f" + {expr.constant}"
    elif expr.constant < 0:
        out += f" - {-expr.constant}"
    return out


def format_program(program: Program) -> str:
    lines = []
    for info in program.variables:
        if info.sort is Sort.BOOL:
            sort = "bool"
        else:
            sort = f"int {info.lo}..{info.hi}"
        lines.append(f"var {sort} {info.kind.value} {info.name};")
    for clause in program.constraints:
        lines.append(f"constraint {format_clause(clause, program)};")
    for rule in program.rules:
        lines.append(f"rule {format_clause(rule.clause, program)} "
                     f"head {program.name(rule.head)};")
    if program.objective is not None:
        lines.append(f"minimize {format_linexpr(program.objective, program)};")
    return "\n".join(lines) + "\n"


def format_assignment(program: Program, valuation) -> str:
    lines = [f"{info.name} = {format_value(valuation[var])};"
             for var, info in enumerate(program.variables)]
    return "\n".join(lines) + "\n"


# -- tokenizing ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<name>[A-Za-z_]\w*(?:\[\s*-?\d+(?:\s*,\s*-?\d+)*\s*\])?)
      | (?P<int>\d+)
      | (?P<op>>=|\.\.|[|~;*+=-])
    """,
    re.VERBOSE,
)

# model separator / proven marker lines emitted by the solve command
_SEPARATOR_RE = re.compile(r"\s*(-{2,}|={2,})\s*$")


def _tokenize(text: str):
    """Yield (kind, value, line) triples; raises on stray characters."""
    line = 1
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise FormatError(f"unexpected character {text[pos]!r}", line)
        kind = match.lastgroup
        value = match.group()
        if kind == "ws":
            line += value.count("\n")
        elif kind != "comment":
            yield kind, value, line
        pos = match.end()
    yield "end", "", line


class _Tokens:
    def __init__(self, text: str):
        self._items = list(_tokenize(text))
        self._at = 0

    @property
    def current(self):
        return self._items[self._at]

    @property
    def line(self) -> int:
        return self._items[self._at][2]

    def peek(self, value: str) -> bool:
        return self._items[self._at][1] == value and \
            self._items[self._at][0] != "end"

    def take(self, value: str) -> bool:
        if self.peek(value):
            self._at += 1
            return True
        return False

    def expect(self, value: str):
        kind, got, line = self._items[self._at]
        if kind == "end" or got != value:
            shown = "end of input" if kind == "end" else repr(got)
            raise FormatError(f"expected {value!r}, found {shown}", line)
        self._at += 1

    def name(self, what: str = "name") -> str:
        kind, got, line = self._items[self._at]
        if kind != "name":
            shown = "end of input" if kind == "end" else repr(got)
            raise FormatError(f"expected {what}, found {shown}", line)
        self._at += 1
        return got

    def integer(self) -> int:
        negative = self.take("-")
        kind, got, line = self._items[self._at]
        if kind != "int":
            raise FormatError(f"expected integer, found {got!r}", line)
        self._at += 1
        return -int(got) if negative else int(got)

    def at_end(self) -> bool:
        return self._items[self._at][0] == "end"


# -- reading ground programs ------------------------------------------------


class _GroundReader:
    def __init__(self, text: str):
        self.tokens = _Tokens(text)
        self.variables: list[Variable] = []
        self.index: dict[str, int] = {}
        self.constraints: list[Clause] = []
        self.rules: list[Rule] = []
        self.objective: LinearExpr | None = None

    def run(self) -> Program:
        t = self.tokens
        while not t.at_end():
            if t.take("var"):
                self._var_decl()
            elif t.take("constraint"):
                self.constraints.append(self._clause())
                t.expect(";")
            elif t.take("rule"):
                self._rule()
            elif t.take("minimize"):
                self._minimize()
            else:
                raise FormatError(
                    f"expected an item, found {t.current[1]!r}", t.line)
        return Program(tuple(self.variables), tuple(self.constraints),
                       tuple(self.rules), self.objective)

    def _var_decl(self):
        t = self.tokens
        line = t.line
        if t.take("bool"):
            sort, lo, hi = Sort.BOOL, None, None
        elif t.take("int"):
            sort = Sort.INT
            lo = self._bound()
            t.expect("..")
            hi = self._bound()
        else:
            raise FormatError(
                f"expected 'bool' or 'int', found {t.current[1]!r}", line)
        if t.take("standard"):
            kind = VarKind.STANDARD
        elif t.take("founded"):
            kind = VarKind.FOUNDED
        else:
            raise FormatError(
                f"expected 'standard' or 'founded', found {t.current[1]!r}",
                t.line)
        name = t.name("variable name")
        t.expect(";")
        if name in self.index:
            raise FormatError(f"duplicate variable '{name}'", line)
        self.index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, sort, lo, hi))

    def _bound(self):
        t = self.tokens
        if t.take("inf"):
            return POS_INF
        if t.peek("-"):
            save = t._at
            t.take("-")
            if t.take("inf"):
                return NEG_INF
            t._at = save
        return t.integer()

    def _lookup(self, name: str, line: int) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise FormatError(f"unknown variable '{name}'", line) from None

    def _clause(self) -> Clause:
        t = self.tokens
        if t.take("false"):
            return Clause((), ())
        lits: list[Literal] = []
        atoms: list[LinearAtom] = []
        while True:
            self._member(lits, atoms)
            if not t.take("|"):
                break
        return Clause(tuple(lits), tuple(atoms))

    def _member(self, lits: list, atoms: list):
        """One clause member: ``~name``, ``name``, or a linear atom."""
        t = self.tokens
        line = t.line
        if t.take("~"):
            var = self._lookup(t.name(), line)
            self._want_sort(var, Sort.BOOL, line)
            lits.append(Literal(var, False))
            return
        kind, value, _ = t.current
        if kind == "name" and not self._starts_atom():
            t.name()
            var = self._lookup(value, line)
            self._want_sort(var, Sort.BOOL, line)
            lits.append(Literal(var, True))
            return
        terms, constant = self._linear(line)
        t.expect(">=")
        bound = self._bound()
        if isinstance(constant, int) and isinstance(bound, int):
            bound -= constant
        atoms.append(LinearAtom(tuple(terms), bound))

    def _starts_atom(self) -> bool:
        """Lookahead: a bare name is an atom when an operator follows."""
        nxt = self.tokens._items[self.tokens._at + 1][1]
        return nxt in (">=", "+", "-", "*")

    def _linear(self, line: int, *, allow_bool: bool = False):
        """Sum of ``k*name``, ``name``, and integer terms.

        Objectives may carry Boolean variables (counted 0/1); clause atoms
        may not.
        """
        t = self.tokens
        terms: list[tuple[int, int]] = []
        constant = 0
        sign = 1
        while True:
            if t.take("-"):
                sign = -sign
            item_line = t.line
            kind, value, _ = t.current
            if kind == "int":
                coeff = sign * t.integer()
                if t.take("*"):
                    name = t.name()
                    var = self._lookup(name, item_line)
                    if not allow_bool:
                        self._want_sort(var, Sort.INT, item_line)
                    terms.append((coeff, var))
                else:
                    constant += coeff
            elif kind == "name":
                var = self._lookup(t.name(), item_line)
                if not allow_bool:
                    self._want_sort(var, Sort.INT, item_line)
                terms.append((sign, var))
            else:
                raise FormatError(
                    f"expected a term, found {value!r}", item_line)
            sign = 1
            if t.take("+"):
                continue
            if t.peek("-"):
                continue
            return terms, constant

    def _want_sort(self, var: int, sort: Sort, line: int):
        info = self.variables[var]
        if info.sort is not sort:
            place = "a literal" if sort is Sort.BOOL else "a linear term"
            raise FormatError(
                f"'{info.name}' is {info.sort.value}, not usable as {place}",
                line)

    def _rule(self):
        t = self.tokens
        clause = self._clause()
        t.expect("head")
        head = self._lookup(t.name("head variable"), t.line)
        t.expect(";")
        self.rules.append(Rule(clause, head))

    def _minimize(self):
        t = self.tokens
        line = t.line
        if self.objective is not None:
            raise FormatError("more than one minimize item", line)
        terms, constant = self._linear(line, allow_bool=True)
        t.expect(";")
        self.objective = LinearExpr(tuple(terms), constant)


def parse_ground_program(text: str) -> Program:
    """Parse ground-program text into a Program.

    Raises FormatError with a line number on malformed input.  The result is
    structurally well formed but not semantically validated; run
    validate_program for rule and interval checks.
    """
    return _GroundReader(text).run()


# -- assignments -------------------------------------------------------------


def _parse_value(tokens: _Tokens, info: Variable, line: int):
    if tokens.take("true"):
        value = True
    elif tokens.take("false"):
        value = False
    elif tokens.take("-"):
        if tokens.take("inf"):
            value = NEG_INF
        else:
            tokens._at -= 1
            value = tokens.integer()
    else:
        value = tokens.integer()
    if not info.admits(value):
        raise FormatError(
            f"value {format_value(value)} is outside the domain of "
            f"'{info.name}'", line)
    return value


def parse_assignment(text: str, program: Program) -> dict:
    """Parse ``name = value;`` lines into a total valuation.

    Every program variable must be assigned exactly once and within its
    domain; -inf is admitted only for founded variables.  Solver output is
    accepted as-is: ``#`` comments and the ``----------`` / ``==========``
    marker lines are ignored.
    """
    kept = [line if not _SEPARATOR_RE.match(line) else ""
            for line in text.splitlines()]
    tokens = _Tokens("\n".join(kept))
    valuation: dict[int, object] = {}
    index = program.index_by_name
    while not tokens.at_end():
        line = tokens.line
        name = tokens.name("variable name")
        if name not in index:
            raise FormatError(f"unknown variable '{name}'", line)
        var = index[name]
        if var in valuation:
            raise FormatError(f"'{name}' assigned twice", line)
        tokens.expect("=")
        valuation[var] = _parse_value(tokens, program.variables[var], line)
        tokens.expect(";")
    missing = [info.name for var, info in enumerate(program.variables)
               if var not in valuation]
    if missing:
        raise FormatError("missing assignments: " + ", ".join(missing))
    return valuation
