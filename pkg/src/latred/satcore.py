"""CNF formulas: DIMACS parsing, exact clause counting, exhaustive MAX-SAT.

The brute-force side runs on bit-parallel truth tables: one Python big int per
variable holds that variable's value over all 2^n assignments, clause counts
are accumulated in bit-sliced binary counters, and the maximum plus its
lexicographically smallest witness fall out of pure integer operations. Exact
by construction and fast enough for the n <= BRUTE_SAT_LIMIT contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import promise as promise_tags
from .errors import ParseError, TautologyError, TooLarge
from .exactmath import as_scalar, scalar_to_str

# Hard ceiling for exhaustive assignment enumeration (2^24 truth-table bits).
BRUTE_SAT_LIMIT = 24

Assignment = tuple[bool, ...]


@dataclass(frozen=True, order=True)
class Literal:
    """A variable occurrence: 1-based index, possibly negated."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if not isinstance(self.var, int) or isinstance(self.var, bool) or self.var < 1:
            raise ParseError(f"variable index must be a positive int, got {self.var!r}")

    @classmethod
    def from_dimacs(cls, code: int) -> "Literal":
        if code == 0:
            raise ParseError("0 is the clause terminator, not a literal")
        return cls(abs(code), code < 0)

    def to_dimacs(self) -> int:
        return -self.var if self.negated else self.var

    def value_under(self, assignment: Assignment) -> bool:
        v = assignment[self.var - 1]
        return not v if self.negated else v

    def __str__(self) -> str:
        return f"-x{self.var}" if self.negated else f"x{self.var}"


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals over distinct variables.

    Duplicate literals are rejected (ParseError) and so is x or-ed with its
    own negation (TautologyError): a tautological clause would silently
    corrupt every gap computation downstream.
    """

    literals: tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ParseError("empty clause")
        seen_vars: dict[int, bool] = {}
        for lit in self.literals:
            if lit.var in seen_vars:
                if seen_vars[lit.var] != lit.negated:
                    raise TautologyError(
                        f"clause contains x{lit.var} and its negation")
                raise ParseError(f"duplicate literal {lit} in clause")
            seen_vars[lit.var] = lit.negated

    @classmethod
    def from_dimacs(cls, codes) -> "Clause":
        return cls(tuple(Literal.from_dimacs(c) for c in codes))

    @property
    def width(self) -> int:
        return len(self.literals)

    def variables(self) -> tuple[int, ...]:
        return tuple(lit.var for lit in self.literals)

    def satisfied_by(self, assignment: Assignment) -> bool:
        return any(lit.value_under(assignment) for lit in self.literals)

    def to_dimacs(self) -> list[int]:
        return [lit.to_dimacs() for lit in self.literals]

    def __str__(self) -> str:
        return "(" + " | ".join(str(lit) for lit in self.literals) + ")"


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula over variables 1..num_vars.

    Invariant: every variable in range occurs in at least one clause (the
    DIMACS parser enforces this by normalization; direct construction raises).
    """

    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ParseError(f"negative variable count {self.num_vars}")
        used = set()
        for cl in self.clauses:
            for v in cl.variables():
                if v > self.num_vars:
                    raise ParseError(
                        f"literal on x{v} exceeds declared count {self.num_vars}")
                used.add(v)
        missing = set(range(1, self.num_vars + 1)) - used
        if missing:
            raise ParseError(
                f"unused variables {sorted(missing)}; normalize before constructing")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        return max((cl.width for cl in self.clauses), default=0)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {self.num_clauses}"]
        for cl in self.clauses:
            lines.append(" ".join(str(c) for c in cl.to_dimacs()) + " 0")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {"n": self.num_vars,
                "clauses": [cl.to_dimacs() for cl in self.clauses]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CnfFormula":
        try:
            n = obj["n"]
            raw = obj["clauses"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed formula object: missing {exc}") from exc
        if not isinstance(n, int) or isinstance(n, bool):
            raise ParseError(f"malformed variable count: {n!r}")
        clauses = []
        for codes in raw:
            for c in codes:
                if not isinstance(c, int) or isinstance(c, bool) or c == 0:
                    raise ParseError(f"malformed literal code: {c!r}")
            clauses.append(Clause.from_dimacs(codes))
        return cls(n, tuple(clauses))


@dataclass(frozen=True)
class VarRemap:
    """Report of the unused-variable normalization applied at parse time.

    kept[j] is the original index of the variable now called j+1; dropped
    lists the original indices that occurred in no clause.
    """

    declared_num_vars: int
    kept: tuple[int, ...]
    dropped: tuple[int, ...]

    @property
    def changed(self) -> bool:
        return bool(self.dropped)


def parse_dimacs_report(text: str) -> tuple[CnfFormula, VarRemap]:
    """Parse DIMACS CNF and normalize away unused variables.

    Returns the normalized formula together with the remap report. Raises
    ParseError for malformed input (bad header, literal out of range, missing
    0 terminator, clause-count mismatch, duplicate literal, empty clause) and
    TautologyError for x | -x inside one clause.
    """
    declared_vars = declared_clauses = None
    tokens: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            if declared_vars is not None:
                raise ParseError(f"line {lineno}: second header")
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {stripped!r}")
            try:
                declared_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: malformed header counts") from exc
            if declared_vars < 0 or declared_clauses < 0:
                raise ParseError(f"line {lineno}: negative header counts")
            continue
        if declared_vars is None:
            raise ParseError(f"line {lineno}: clause data before 'p cnf' header")
        for tok in stripped.split():
            try:
                tokens.append(int(tok))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad token {tok!r}") from exc
    if declared_vars is None:
        raise ParseError("missing 'p cnf' header")

    clauses: list[Clause] = []
    current: list[int] = []
    for code in tokens:
        if code == 0:
            clauses.append(Clause.from_dimacs(current))
            current = []
            continue
        if abs(code) > declared_vars:
            raise ParseError(
                f"literal {code} out of range 1..{declared_vars}")
        current.append(code)
    if current:
        raise ParseError("last clause is missing its 0 terminator")
    if len(clauses) != declared_clauses:
        raise ParseError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}")

    used = sorted({v for cl in clauses for v in cl.variables()})
    dropped = tuple(v for v in range(1, declared_vars + 1) if v not in set(used))
    new_index = {old: new for new, old in enumerate(used, start=1)}
    if dropped:
        clauses = [
            Clause(tuple(Literal(new_index[lit.var], lit.negated)
                         for lit in cl.literals))
            for cl in clauses
        ]
    formula = CnfFormula(len(used), tuple(clauses))
    return formula, VarRemap(declared_vars, tuple(used), dropped)


def parse_dimacs(text: str) -> CnfFormula:
    """parse_dimacs_report without the remap report."""
    return parse_dimacs_report(text)[0]


def count_satisfied(f: CnfFormula, assignment: Assignment) -> int:
    """Number of clauses satisfied by a full assignment (exact, by scan)."""
    if len(assignment) != f.num_vars:
        raise ValueError(
            f"assignment length {len(assignment)} != num_vars {f.num_vars}")
    return sum(1 for cl in f.clauses if cl.satisfied_by(assignment))


# ---------- bit-parallel exhaustive MAX-SAT ----------

def _variable_truth_tables(n: int) -> list[int]:
    # Table j (0-based) has bit i set iff assignment index i gives variable
    # j+1 the value True. Variable 1 occupies the most significant position of
    # the assignment index, so integer order on i is lexicographic order on
    # assignments with False < True.
    total_bits = 1 << n
    tables = []
    for j in range(1, n + 1):
        block = 1 << (n - j)
        period = block << 1
        unit = ((1 << block) - 1) << block
        repeats = ((1 << total_bits) - 1) // ((1 << period) - 1)
        tables.append(unit * repeats)
    return tables


def _add_to_counter(planes: list[int], mask: int) -> None:
    # Bit-sliced increment: planes[k] holds bit k of every assignment's count.
    carry = mask
    level = 0
    while carry:
        if level == len(planes):
            planes.append(0)
        stored = planes[level]
        planes[level] = stored ^ carry
        carry = stored & carry
        level += 1


def max_sat_fraction(f: CnfFormula) -> tuple[Fraction, Assignment]:
    """Exhaustive MAX-SAT: (best fraction of satisfied clauses, witness).

    Ties break to the lexicographically smallest assignment (False < True).
    Raises TooLarge above BRUTE_SAT_LIMIT variables.
    """
    n, m = f.num_vars, f.num_clauses
    if m == 0:
        raise ValueError("formula has no clauses")
    if n > BRUTE_SAT_LIMIT:
        raise TooLarge(f"{n} variables exceeds brute-force limit {BRUTE_SAT_LIMIT}")
    full = (1 << (1 << n)) - 1
    tables = _variable_truth_tables(n)
    planes: list[int] = []
    for cl in f.clauses:
        mask = 0
        for lit in cl.literals:
            t = tables[lit.var - 1]
            mask |= (full ^ t) if lit.negated else t
        _add_to_counter(planes, mask)
    candidates = full
    best = 0
    for level in reversed(range(len(planes))):
        refined = candidates & planes[level]
        if refined:
            candidates = refined
            best += 1 << level
    index = (candidates & -candidates).bit_length() - 1
    witness = tuple(bool((index >> (n - j)) & 1) for j in range(1, n + 1))
    return Fraction(best, m), witness


@dataclass(frozen=True)
class GapSatInstance:
    """A CNF formula with gap parameters 0 <= delta < epsilon <= 1.

    YES promises an assignment satisfying at least epsilon*m clauses; NO
    promises that none satisfies more than delta*m; UNKNOWN promises nothing.
    """

    formula: CnfFormula
    delta: Fraction
    epsilon: Fraction
    promise: str = promise_tags.UNKNOWN

    def __post_init__(self):
        object.__setattr__(self, "delta", as_scalar(self.delta))
        object.__setattr__(self, "epsilon", as_scalar(self.epsilon))
        promise_tags.check_promise(self.promise)
        if not (0 <= self.delta < self.epsilon <= 1):
            raise ValueError(
                f"need 0 <= delta < epsilon <= 1, got delta={self.delta}, "
                f"epsilon={self.epsilon}")

    def to_json_dict(self) -> dict:
        return {
            "formula": self.formula.to_json_dict(),
            "delta": scalar_to_str(self.delta),
            "epsilon": scalar_to_str(self.epsilon),
            "promise": self.promise,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GapSatInstance":
        try:
            formula = CnfFormula.from_json_dict(obj["formula"])
            delta = as_scalar(obj["delta"])
            epsilon = as_scalar(obj["epsilon"])
            tag = obj["promise"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed gap-SAT object: {exc}") from exc
        return cls(formula, delta, epsilon, tag)
